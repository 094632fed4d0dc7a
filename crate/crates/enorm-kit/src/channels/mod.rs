//! Completely positive maps, Stinespring dilations, fidelity and the
//! energy-constrained Bures distance and cb-norm.

mod distance;
mod ellipsoid;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    kron, lambda_max, partial_trace, polar, sqrtm_psd, sqrtm_psd_clean, trace_norm, ComplexMatrix, Keep,
};
use crate::random::ginibre;
use crate::scalar::{re, Real, C};

pub use distance::{
    cb_norm_single, ec_bures, ec_cb_norm, isometric_rep_bound, ksw_verify, sequence_demo, BuresOptions,
    CbNormEstimate, CbOptions, IsometricBound, KswReport, SeesawResult, SequenceRow,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceBehavior {
    Preserving,
    NonIncreasing,
    General,
}

/// Φ(ρ) = Σ K_i ρ K_i* with K_i of shape dim_out × dim_in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawCpMap<T>",
    into = "RawCpMap<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub struct CPMap<T> {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix<T>>,
    trace_behavior: TraceBehavior,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
struct RawCpMap<T> {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix<T>>,
}

impl<T: Real> TryFrom<RawCpMap<T>> for CPMap<T> {
    type Error = Error;

    fn try_from(raw: RawCpMap<T>) -> Result<Self> {
        let map = Self::new(raw.kraus)?;
        if map.dim_in != raw.dim_in || map.dim_out != raw.dim_out {
            return Err(Error::DimMismatch(format!(
                "declared {}->{} but Kraus operators are {}->{}",
                raw.dim_in, raw.dim_out, map.dim_in, map.dim_out
            )));
        }
        Ok(map)
    }
}

impl<T: Real> From<CPMap<T>> for RawCpMap<T> {
    fn from(m: CPMap<T>) -> Self {
        Self {
            dim_in: m.dim_in,
            dim_out: m.dim_out,
            kraus: m.kraus,
        }
    }
}

fn pauli<T: Real>(which: char) -> ComplexMatrix<T> {
    let (o, z) = (C::new(T::one(), T::zero()), C::new(T::zero(), T::zero()));
    let i = C::new(T::zero(), T::one());
    let data = match which {
        'x' => vec![z, o, o, z],
        'y' => vec![z, -i, i, z],
        _ => vec![o, z, z, -o],
    };
    ComplexMatrix::new(2, 2, data).expect("finite")
}

impl<T: Real> CPMap<T> {
    /// Validates shapes and classifies the trace behaviour at 1e-9 (relative
    /// to machine precision for `f32`).
    pub fn new(kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if let Some(k) = kraus.iter().find(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(Error::DimMismatch(format!(
                "Kraus operators {dim_out}x{dim_in} and {}x{}",
                k.rows(),
                k.cols()
            )));
        }
        let mut map = Self {
            dim_in,
            dim_out,
            kraus,
            trace_behavior: TraceBehavior::General,
        };
        let tol = T::lit(1e-9).max(T::lit(1024.0) * T::epsilon());
        let s = map.adjoint_apply(&ComplexMatrix::identity(dim_out));
        let defect = (&s - &ComplexMatrix::identity(dim_in)).frobenius_norm();
        map.trace_behavior = if defect <= tol {
            TraceBehavior::Preserving
        } else if lambda_max(&s)? <= T::one() + tol {
            TraceBehavior::NonIncreasing
        } else {
            TraceBehavior::General
        };
        Ok(map)
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(d)]).expect("identity is valid")
    }

    /// Qubit dephasing ρ ↦ (1−p)ρ + p ZρZ.
    pub fn dephasing(p: T) -> Result<Self> {
        check_prob(p, "dephasing")?;
        Self::new(vec![
            ComplexMatrix::identity(2).scale_real((T::one() - p).sqrt()),
            pauli::<T>('z').scale_real(p.sqrt()),
        ])
    }

    /// The full phase flip ρ ↦ ZρZ.
    pub fn phase_flip() -> Self {
        Self::new(vec![pauli('z')]).expect("unitary")
    }

    /// Qubit amplitude damping with decay probability γ.
    pub fn amplitude_damping(gamma: T) -> Result<Self> {
        check_prob(gamma, "damping")?;
        let (o, z) = (T::one(), T::zero());
        let k0 = ComplexMatrix::new(2, 2, vec![re(o), re(z), re(z), re((o - gamma).sqrt())])?;
        let k1 = ComplexMatrix::new(2, 2, vec![re(z), re(gamma.sqrt()), re(z), re(z)])?;
        Self::new(vec![k0, k1])
    }

    /// Qubit depolarizing ρ ↦ (1−p)ρ + p·I/2.
    pub fn depolarizing(p: T) -> Result<Self> {
        check_prob(p, "depolarizing")?;
        let q = (p / T::lit(4.0)).sqrt();
        Self::new(vec![
            ComplexMatrix::identity(2).scale_real((T::one() - T::lit(0.75) * p).sqrt()),
            pauli::<T>('x').scale_real(q),
            pauli::<T>('y').scale_real(q),
            pauli::<T>('z').scale_real(q),
        ])
    }

    /// Replaces every input by the basis state |k⟩.
    pub fn replacer(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::BadParams(format!("state {k} outside dimension {d}")));
        }
        let kraus = (0..d)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(k, i)] = re(T::one());
                m
            })
            .collect();
        Self::new(kraus)
    }

    /// Random channel from a Haar-like isometry split into `k` Kraus operators.
    /// `k` is raised to ⌈d_in/d_out⌉ when smaller, since no isometry exists below that.
    pub fn random_cptp<R: Rng + ?Sized>(d_in: usize, d_out: usize, k: usize, rng: &mut R) -> Self {
        let k = k.max(d_in.div_ceil(d_out.max(1))).max(1);
        let g = ginibre::<T, R>(d_out * k, d_in, rng);
        let (w, _) = polar(&g).expect("finite Gaussian sample");
        let kraus = (0..k)
            .map(|i| ComplexMatrix::from_fn(d_out, d_in, |b, a| w[(b * k + i, a)]))
            .collect();
        Self::new(kraus).expect("consistent shapes")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn trace_behavior(&self) -> TraceBehavior {
        self.trace_behavior
    }

    pub fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &(&(k * rho) * &k.adjoint());
        }
        out
    }

    /// Φ†(A) = Σ K_i* A K_i.
    pub fn adjoint_apply(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += &(&(&k.adjoint() * a) * k);
        }
        out
    }

    /// (Φ ⊗ id_R)(ρ) for ρ on H_A ⊗ H_R.
    pub fn apply_extended(&self, rho: &ComplexMatrix<T>, dim_r: usize) -> ComplexMatrix<T> {
        let id = ComplexMatrix::identity(dim_r);
        let mut out = ComplexMatrix::zeros(self.dim_out * dim_r, self.dim_out * dim_r);
        for k in &self.kraus {
            let kk = kron(k, &id);
            out += &(&(&kk * rho) * &kk.adjoint());
        }
        out
    }

    /// (Φ ⊗ id_R)†(Y) for Y on H_B ⊗ H_R.
    pub fn adjoint_extended(&self, y: &ComplexMatrix<T>, dim_r: usize) -> ComplexMatrix<T> {
        let id = ComplexMatrix::identity(dim_r);
        let mut out = ComplexMatrix::zeros(self.dim_in * dim_r, self.dim_in * dim_r);
        for k in &self.kraus {
            let kk = kron(k, &id);
            out += &(&(&kk.adjoint() * y) * &kk);
        }
        out
    }

    /// The same map with zero Kraus operators appended up to `n`.
    pub fn padded(&self, n: usize) -> Self {
        let mut kraus = self.kraus.clone();
        while kraus.len() < n {
            kraus.push(ComplexMatrix::zeros(self.dim_out, self.dim_in));
        }
        Self {
            kraus,
            ..self.clone()
        }
    }
}

fn check_prob<T: Real>(p: T, what: &str) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::BadParams(format!(
            "{what} parameter {} not in [0, 1]",
            p.as_f64()
        )));
    }
    Ok(())
}

/// V: H_A → H_B ⊗ H_E, row index b·dim_e + e.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct StinespringRep<T> {
    pub v: ComplexMatrix<T>,
    pub dim_b: usize,
    pub dim_e: usize,
}

impl<T: Real> StinespringRep<T> {
    pub fn dim_a(&self) -> usize {
        self.v.cols()
    }

    /// Tr_E VρV*.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let big = &(&self.v * rho) * &self.v.adjoint();
        partial_trace(&big, self.dim_b, self.dim_e, Keep::X)
    }

    /// Largest deviation of the dilated action from Φ over matrix units.
    pub fn dilation_defect(&self, phi: &CPMap<T>) -> Result<T> {
        let d = self.dim_a();
        let mut worst = T::zero();
        for i in 0..d {
            for j in 0..d {
                let mut unit = ComplexMatrix::zeros(d, d);
                unit[(i, j)] = re(T::one());
                let diff = &self.apply(&unit)? - &phi.apply(&unit);
                worst = worst.max(diff.frobenius_norm());
            }
        }
        Ok(worst)
    }
}

/// V = Σ_i K_i ⊗ |i⟩_E.
pub fn kraus_to_stinespring<T: Real>(phi: &CPMap<T>) -> Result<StinespringRep<T>> {
    let k = phi.kraus.len();
    if k == 0 {
        return Err(Error::EmptyKraus);
    }
    let v = ComplexMatrix::from_fn(phi.dim_out * k, phi.dim_in, |r, a| phi.kraus[r % k][(r / k, a)]);
    Ok(StinespringRep {
        v,
        dim_b: phi.dim_out,
        dim_e: k,
    })
}

/// Dilations of Φ and Ψ on a common environment (zero-padded Kraus lists).
pub fn common_stinespring<T: Real>(
    phi: &CPMap<T>,
    psi: &CPMap<T>,
) -> Result<(StinespringRep<T>, StinespringRep<T>)> {
    if phi.dim_in != psi.dim_in || phi.dim_out != psi.dim_out {
        return Err(Error::DimMismatch("maps act between different spaces".into()));
    }
    let k = phi.kraus.len().max(psi.kraus.len());
    Ok((
        kraus_to_stinespring(&phi.padded(k))?,
        kraus_to_stinespring(&psi.padded(k))?,
    ))
}

/// Choi matrix Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|) on H_A ⊗ H_B.
pub fn choi<T: Real>(phi: &CPMap<T>) -> ComplexMatrix<T> {
    let (a, b) = (phi.dim_in, phi.dim_out);
    let mut c = ComplexMatrix::zeros(a * b, a * b);
    for i in 0..a {
        for j in 0..a {
            let mut unit = ComplexMatrix::zeros(a, a);
            unit[(i, j)] = re(T::one());
            c.set_block(i * b, j * b, &phi.apply(&unit));
        }
    }
    c
}

/// Kraus operators from the eigenvectors of a Choi matrix; eigenvalues at or
/// below `tol_rank`·max(1, λ_max) are dropped.
pub fn kraus_from_choi<T: Real>(
    c: &ComplexMatrix<T>,
    dim_in: usize,
    dim_out: usize,
    tol_rank: T,
) -> Result<CPMap<T>> {
    if !c.is_square() || c.rows() != dim_in * dim_out {
        return Err(Error::DimMismatch(format!(
            "Choi matrix {}x{} for a {dim_in}->{dim_out} map",
            c.rows(),
            c.cols()
        )));
    }
    let e = crate::matcore::hermitian_eig(&c.hermitian_part())?;
    let top = e.values.last().copied().unwrap_or(T::zero()).max(T::one());
    if e.values[0] < -tol_rank * top {
        return Err(Error::NotPsd {
            min_eig: e.values[0].as_f64(),
        });
    }
    let mut kraus = Vec::new();
    for k in (0..e.values.len()).rev() {
        let lam = e.values[k];
        if lam <= tol_rank * top {
            continue;
        }
        let w = lam.sqrt();
        let v = e.vector(k);
        kraus.push(ComplexMatrix::from_fn(dim_out, dim_in, |bb, a| {
            v[a * dim_out + bb] * w
        }));
    }
    if kraus.is_empty() {
        kraus.push(ComplexMatrix::zeros(dim_out, dim_in));
    }
    CPMap::new(kraus)
}

/// F(ρ, σ) = ‖√ρ√σ‖₁².
pub fn fidelity<T: Real>(rho: &ComplexMatrix<T>, sigma: &ComplexMatrix<T>, psd_tol: T) -> Result<T> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(Error::DimMismatch("fidelity needs equal square operators".into()));
    }
    let (a, b) = (sqrtm_psd_clean(rho, psd_tol)?, sqrtm_psd_clean(sigma, psd_tol)?);
    Ok(trace_norm(&(&a * &b))?.powi(2))
}

/// β(ρ, σ) = √(‖ρ‖₁ + ‖σ‖₁ − 2√F(ρ, σ)).
pub fn bures<T: Real>(rho: &ComplexMatrix<T>, sigma: &ComplexMatrix<T>, psd_tol: T) -> Result<T> {
    let f = fidelity(rho, sigma, psd_tol)?;
    let s = rho.trace().re + sigma.trace().re - T::lit(2.0) * f.sqrt();
    Ok(s.max(T::zero()).sqrt())
}

/// Tr_B[V_Ψ ρ V_Φ*], an operator on H_E.
pub(crate) fn cross_operator<T: Real>(
    vphi: &StinespringRep<T>,
    vpsi: &StinespringRep<T>,
    rho: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let m = &(&vpsi.v * rho) * &vphi.v.adjoint();
    partial_trace(&m, vpsi.dim_b, vpsi.dim_e, Keep::Y)
}

/// sup over contractions C of |Tr V_Φ*(I⊗C)V_Ψ ρ|, with the optimal C.
pub fn inner_contraction_value<T: Real>(
    vphi: &StinespringRep<T>,
    vpsi: &StinespringRep<T>,
    rho: &ComplexMatrix<T>,
) -> Result<(T, ComplexMatrix<T>)> {
    if vphi.dim_e != vpsi.dim_e || vphi.dim_b != vpsi.dim_b || vphi.dim_a() != vpsi.dim_a() {
        return Err(Error::DimMismatch("dilations do not share spaces".into()));
    }
    if rho.rows() != vphi.dim_a() || !rho.is_square() {
        return Err(Error::DimMismatch("state does not act on the input space".into()));
    }
    let x = cross_operator(vphi, vpsi, rho)?;
    let (w, _) = polar(&x)?;
    Ok((trace_norm(&x)?, w.adjoint()))
}

/// V_Φ*(I_B ⊗ C)V_Ψ.
pub(crate) fn contracted<T: Real>(
    vphi: &StinespringRep<T>,
    vpsi: &StinespringRep<T>,
    c: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let ic = kron(&ComplexMatrix::identity(vpsi.dim_b), c);
    &(&vphi.v.adjoint() * &ic) * &vpsi.v
}

/// The doubled-environment pair (Ṽ_Φ, Ṽ_Ψ,C) with Ṽ_Φ*Ṽ_Ψ,C = V_Φ*(I⊗C)V_Ψ.
pub fn common_rep<T: Real>(
    vphi: &StinespringRep<T>,
    vpsi: &StinespringRep<T>,
    c: &ComplexMatrix<T>,
    psd_tol: T,
) -> Result<(StinespringRep<T>, StinespringRep<T>)> {
    let de = vphi.dim_e;
    if vpsi.dim_e != de || vphi.dim_b != vpsi.dim_b || c.rows() != de || c.cols() != de {
        return Err(Error::DimMismatch("contraction and dilations disagree".into()));
    }
    let norm = crate::enorms::operator_norm(c)?;
    if norm > T::one() + psd_tol {
        return Err(Error::NotContraction { norm: norm.as_f64() });
    }
    let defect = &ComplexMatrix::identity(de) - &c.gram();
    let d = sqrtm_psd(
        &defect.hermitian_part(),
        psd_tol.max(T::lit(2.0) * (norm - T::one())),
    )?;
    let db = vphi.dim_b;
    let da = vphi.dim_a();
    let upper = &kron(&ComplexMatrix::identity(db), c) * &vpsi.v;
    let lower = &kron(&ComplexMatrix::identity(db), &d) * &vpsi.v;
    let mut tphi = ComplexMatrix::zeros(db * 2 * de, da);
    let mut tpsi = ComplexMatrix::zeros(db * 2 * de, da);
    for b in 0..db {
        for e in 0..de {
            for a in 0..da {
                tphi[(b * 2 * de + e, a)] = vphi.v[(b * de + e, a)];
                tpsi[(b * 2 * de + e, a)] = upper[(b * de + e, a)];
                tpsi[(b * 2 * de + de + e, a)] = lower[(b * de + e, a)];
            }
        }
    }
    let wrap = |v| StinespringRep {
        v,
        dim_b: db,
        dim_e: 2 * de,
    };
    Ok((wrap(tphi), wrap(tpsi)))
}
