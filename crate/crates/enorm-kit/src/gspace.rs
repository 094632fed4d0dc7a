//! The generating operator G in spectral form, energy budgets and the
//! feasible-state sampler.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix};
use crate::random::haar_vector;
use crate::scalar::{czero, re, Real, C};

/// Positive operator G = Σ E_k |τ_k⟩⟨τ_k| with ascending E_k.
///
/// JSON form: `{"dim": n, "eigenvalues": [...], "basis": matrix}` with the
/// basis optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawGenerator<T>",
    into = "RawGenerator<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub struct GeneratingOperator<T> {
    eigenvalues: Vec<T>,
    /// Eigenvectors as columns; `None` means the standard basis.
    basis: Option<ComplexMatrix<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
struct RawGenerator<T> {
    dim: usize,
    eigenvalues: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<ComplexMatrix<T>>,
}

impl<T: Real> TryFrom<RawGenerator<T>> for GeneratingOperator<T> {
    type Error = Error;

    fn try_from(raw: RawGenerator<T>) -> Result<Self> {
        if raw.dim != raw.eigenvalues.len() {
            return Err(Error::DimMismatch(format!(
                "dim {} but {} eigenvalues",
                raw.dim,
                raw.eigenvalues.len()
            )));
        }
        Self::new(raw.eigenvalues, raw.basis)
    }
}

impl<T: Real> From<GeneratingOperator<T>> for RawGenerator<T> {
    fn from(g: GeneratingOperator<T>) -> Self {
        Self {
            dim: g.eigenvalues.len(),
            eigenvalues: g.eigenvalues,
            basis: g.basis,
        }
    }
}

impl<T: Real> GeneratingOperator<T> {
    /// G diagonal in the standard basis. Values are sorted ascending by
    /// permuting basis vectors if needed.
    pub fn diagonal(eigenvalues: Vec<T>) -> Result<Self> {
        Self::new(eigenvalues, None)
    }

    /// Builds G from eigenvalues and an optional orthonormal eigenbasis.
    pub fn new(eigenvalues: Vec<T>, basis: Option<ComplexMatrix<T>>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(b) = &basis {
            if b.rows() != n || b.cols() != n {
                return Err(Error::DimMismatch(format!(
                    "basis {}x{} for {n} eigenvalues",
                    b.rows(),
                    b.cols()
                )));
            }
            let defect = (&(&b.adjoint() * b) - &ComplexMatrix::identity(n)).frobenius_norm();
            if defect > T::lit(1e-8) {
                return Err(Error::BadParams(format!(
                    "basis is not orthonormal (defect {:e})",
                    defect.as_f64()
                )));
            }
        }
        let tol = T::lit(1e-9);
        let top = eigenvalues.iter().fold(T::one(), |a, &b| a.max(b.abs()));
        if let Some(lo) = eigenvalues.iter().copied().reduce(T::min) {
            if lo < -tol * top {
                return Err(Error::NotPsd { min_eig: lo.as_f64() });
            }
        }
        let sorted = eigenvalues.windows(2).all(|w| w[0] <= w[1]);
        if sorted {
            return Ok(Self { eigenvalues, basis });
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap());
        let vals = idx.iter().map(|&i| eigenvalues[i]).collect();
        let b = match basis {
            Some(b) => ComplexMatrix::from_fn(n, n, |i, k| b[(i, idx[k])]),
            None => ComplexMatrix::from_fn(n, n, |i, k| if i == idx[k] { re(T::one()) } else { czero() }),
        };
        Ok(Self {
            eigenvalues: vals,
            basis: Some(b),
        })
    }

    /// Spectral form of a PSD Hermitian matrix. Diagonal input keeps the
    /// compact standard-basis representation.
    pub fn from_matrix(g: &ComplexMatrix<T>) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::NonSquare {
                rows: g.rows(),
                cols: g.cols(),
            });
        }
        let n = g.rows();
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || g[(i, j)] == czero()));
        if diagonal {
            return Self::diagonal((0..n).map(|i| g[(i, i)].re).collect());
        }
        let e = hermitian_eig(g)?;
        let values = e
            .values
            .iter()
            .map(|&x| {
                if x.abs() < T::epsilon() * T::count(n) {
                    T::zero()
                } else {
                    x
                }
            })
            .collect();
        Self::new(values, Some(e.vectors))
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> Option<&ComplexMatrix<T>> {
        self.basis.as_ref()
    }

    pub fn ground_energy(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or(T::zero())
    }

    pub fn max_energy(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or(T::zero())
    }

    pub fn is_normalized(&self) -> bool {
        self.ground_energy() == T::zero()
    }

    /// Dense matrix Σ E_k |τ_k⟩⟨τ_k|.
    pub fn to_matrix(&self) -> ComplexMatrix<T> {
        let d = ComplexMatrix::from_real_diag(&self.eigenvalues);
        match &self.basis {
            None => d,
            Some(u) => &(u * &d) * &u.adjoint(),
        }
    }

    /// Eigenvector τ_k in standard coordinates.
    pub fn eigenvector(&self, k: usize) -> Vec<C<T>> {
        match &self.basis {
            None => crate::matcore::basis_vector(self.dim(), k),
            Some(u) => u.column(k),
        }
    }

    /// Canonical ground state τ₀ (first basis vector of a degenerate ground space).
    pub fn ground_vector(&self) -> Vec<C<T>> {
        self.eigenvector(0)
    }

    /// Shifts G by its ground energy: returns (G − E₀I, E₀).
    pub fn normalize_ground(&self) -> (Self, T) {
        let shift = self.ground_energy();
        let eigenvalues = self.eigenvalues.iter().map(|&x| x - shift).collect();
        (
            Self {
                eigenvalues,
                basis: self.basis.clone(),
            },
            shift,
        )
    }

    /// A·U, i.e. the operator A written against the eigenbasis of G.
    pub fn to_eigen_columns(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match &self.basis {
            None => a.clone(),
            Some(u) => a * u,
        }
    }

    /// U*MU.
    pub fn to_eigen_operator(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match &self.basis {
            None => m.clone(),
            Some(u) => &(&u.adjoint() * m) * u,
        }
    }

    /// Maps eigen-coordinates back to the standard basis.
    pub fn from_eigen_vector(&self, v: &[C<T>]) -> Vec<C<T>> {
        match &self.basis {
            None => v.to_vec(),
            Some(u) => u.mul_vec(v),
        }
    }

    pub fn to_eigen_vector(&self, v: &[C<T>]) -> Vec<C<T>> {
        match &self.basis {
            None => v.to_vec(),
            Some(u) => u.adjoint().mul_vec(v),
        }
    }

    /// Projector onto eigenvectors with E_k ∈ [l, u].
    pub fn spectral_projector(&self, l: T, u: T) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut p = ComplexMatrix::zeros(n, n);
        for (k, &ek) in self.eigenvalues.iter().enumerate() {
            if ek < l || ek > u {
                continue;
            }
            let t = self.eigenvector(k);
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] += t[i] * t[j].conj();
                }
            }
        }
        p
    }

    /// Projector onto τ_n, τ_{n+1}, … (the levels from index n upwards).
    pub fn tail_projector(&self, n: usize) -> ComplexMatrix<T> {
        let d = self.dim();
        let mut p = ComplexMatrix::zeros(d, d);
        for k in n.min(d)..d {
            let t = self.eigenvector(k);
            for i in 0..d {
                for j in 0..d {
                    p[(i, j)] += t[i] * t[j].conj();
                }
            }
        }
        p
    }

    /// ⟨φ|G|φ⟩.
    pub fn vector_energy(&self, phi: &[C<T>]) -> T {
        let c = self.to_eigen_vector(phi);
        c.iter()
            .zip(&self.eigenvalues)
            .fold(T::zero(), |acc, (z, &e)| acc + z.norm_sqr() * e)
    }

    /// Tr(Gρ) for a PSD ρ.
    pub fn mean_energy(&self, rho: &ComplexMatrix<T>, psd_tol: T) -> Result<T> {
        if rho.rows() != self.dim() || rho.cols() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "state {}x{} for G of dimension {}",
                rho.rows(),
                rho.cols(),
                self.dim()
            )));
        }
        let lo = crate::matcore::lambda_min(rho)?;
        if lo < -psd_tol * rho.frobenius_norm().max(T::one()) {
            return Err(Error::NotPsd { min_eig: lo.as_f64() });
        }
        let r = self.to_eigen_operator(rho);
        Ok(self
            .eigenvalues
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, &e)| acc + r[(k, k)].re * e))
    }

    /// `n` unit vectors with ⟨φ|G|φ⟩ ≤ E, deterministic in `seed`.
    ///
    /// Each sample is Haar-random; an infeasible draw is moved along the
    /// geodesic towards the ground vector until it sits on ⟨G⟩ = E. Along
    /// that geodesic the energy is sin²θ·⟨w|G|w⟩ + cos²θ·E₀, so the crossing
    /// angle is found in closed form.
    pub fn sample_feasible_states(&self, e: T, n: usize, seed: u64) -> Vec<Vec<C<T>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.dim();
        let e0 = self.ground_energy();
        (0..n)
            .map(|_| {
                let c = haar_vector::<T, _>(dim, &mut rng);
                let energy = energy_of(&c, &self.eigenvalues);
                let c = if energy <= e {
                    c
                } else {
                    pull_to_budget(&c, &self.eigenvalues, e, e0)
                };
                self.from_eigen_vector(&c)
            })
            .collect()
    }
}

fn energy_of<T: Real>(c: &[C<T>], g: &[T]) -> T {
    c.iter()
        .zip(g)
        .fold(T::zero(), |acc, (z, &e)| acc + z.norm_sqr() * e)
}

/// Geodesic mix of the eigen-coordinate vector `c` with e₀ landing on energy `e`.
fn pull_to_budget<T: Real>(c: &[C<T>], g: &[T], e: T, e0: T) -> Vec<C<T>> {
    let dim = c.len();
    let c0 = c[0];
    let mut w: Vec<C<T>> = c.to_vec();
    w[0] = czero();
    let wn = crate::matcore::vnorm(&w);
    let mut ground = vec![czero(); dim];
    ground[0] = re(T::one());
    if wn == T::zero() || e <= e0 {
        return ground;
    }
    w.iter_mut().for_each(|z| *z = *z / wn);
    let ew = energy_of(&w, g);
    let mut s2 = ((e - e0) / (ew - e0)).max(T::zero()).min(T::one());
    let phase = if c0.norm() > T::zero() {
        c0 / c0.norm()
    } else {
        re(T::one())
    };
    // shrink slightly if rounding lands a hair above the budget
    for _ in 0..8 {
        let s = s2.sqrt();
        let mut out: Vec<C<T>> = w.iter().map(|&z| z * s).collect();
        out[0] = phase * (T::one() - s2).sqrt();
        if energy_of(&out, g) <= e {
            return out;
        }
        s2 *= T::one() - T::epsilon() * T::lit(16.0);
    }
    ground
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_shifts_ground() {
        let g = GeneratingOperator::diagonal(vec![3.0, 4.0]).unwrap();
        let (g2, s) = g.normalize_ground();
        assert_eq!(s, 3.0);
        assert_eq!(g2.eigenvalues(), &[0.0, 1.0]);
        let g = GeneratingOperator::diagonal(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(g.normalize_ground().1, 0.0);
    }

    #[test]
    fn projector_on_interval() {
        let g = GeneratingOperator::<f64>::diagonal(vec![0.0, 1.0, 2.0]).unwrap();
        let p = g.spectral_projector(0.0, 1.0);
        assert_eq!(p, ComplexMatrix::from_real_diag(&[1.0, 1.0, 0.0]));
        assert_eq!(g.spectral_projector(0.0, 10.0), ComplexMatrix::identity(3));
    }

    #[test]
    fn unsorted_diagonal_gets_basis() {
        let g = GeneratingOperator::<f64>::diagonal(vec![2.0, 0.0, 1.0]).unwrap();
        assert_eq!(g.eigenvalues(), &[0.0, 1.0, 2.0]);
        let m = g.to_matrix();
        assert_eq!(m, ComplexMatrix::from_real_diag(&[2.0, 0.0, 1.0]));
    }

    #[test]
    fn eigenstate_energy() {
        let g = GeneratingOperator::<f64>::diagonal(vec![0.0, 1.5, 2.0]).unwrap();
        let t = g.eigenvector(1);
        let rho = ComplexMatrix::outer(&t, &t);
        assert!((g.mean_energy(&rho, 1e-9).unwrap() - 1.5).abs() < 1e-14);
        let t = g.ground_vector();
        assert_eq!(g.mean_energy(&ComplexMatrix::outer(&t, &t), 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn sampler_zero_budget_gives_ground() {
        let g = GeneratingOperator::<f64>::diagonal(vec![0.0, 0.0, 1.0]).unwrap();
        for phi in g.sample_feasible_states(0.0, 20, 3) {
            assert!(phi[2].norm() == 0.0);
            assert!((phi[0].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_respects_budget() {
        let g = GeneratingOperator::<f64>::diagonal((0..8).map(|k| k as f64).collect()).unwrap();
        let samples = g.sample_feasible_states(1.3, 1000, 7);
        assert_eq!(samples.len(), 1000);
        for phi in &samples {
            assert!((crate::matcore::vnorm(phi) - 1.0).abs() < 1e-12);
            assert!(g.vector_energy(phi) <= 1.3);
        }
        assert_eq!(samples, g.sample_feasible_states(1.3, 1000, 7));
        // large budget leaves Haar samples untouched
        let free = g.sample_feasible_states(100.0, 5, 1);
        assert!(free.iter().any(|p| g.vector_energy(p) > 1.3));
    }
}

#[cfg(test)]
mod props {
    use proptest::prelude::*;

    use super::*;
    use crate::random::random_generator;

    proptest! {
        #[test]
        fn ground_state_is_always_feasible(seed in 0u64..10_000, n in 1usize..=8, shift in 0.0f64..5.0, e in 1e-6f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_generator::<f64, _>(n, 3.0, true, &mut rng);
            let shifted = GeneratingOperator::new(
                g.eigenvalues().iter().map(|x| x + shift).collect(),
                g.basis().cloned(),
            ).unwrap();
            let (norm, _) = shifted.normalize_ground();
            let phi = norm.ground_vector();
            prop_assert!((crate::matcore::vnorm(&phi) - 1.0).abs() <= 1e-12);
            prop_assert!(norm.vector_energy(&phi) <= e + 1e-12);
            for s in norm.sample_feasible_states(e, 4, seed) {
                prop_assert!(norm.vector_energy(&s) <= e + 1e-10);
            }
        }

        #[test]
        fn spectral_projectors_split_identity(seed in 0u64..10_000, n in 1usize..=8, a in 0.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_generator::<f64, _>(n, 3.0, true, &mut rng);
            prop_assume!(g.eigenvalues().iter().all(|x| (x - a).abs() > 1e-9));
            let sum = &g.spectral_projector(0.0, a) + &g.spectral_projector(a, f64::INFINITY);
            prop_assert!((&sum - &ComplexMatrix::identity(n)).max_abs() <= 1e-12);
        }
    }
}
