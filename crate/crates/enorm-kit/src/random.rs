//! Seeded random instances: Haar vectors and unitaries, Ginibre matrices,
//! density matrices, generating operators.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::gspace::GeneratingOperator;
use crate::matcore::{vdot, vnorm, ComplexMatrix};
use crate::scalar::{Real, C};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex::new(
        T::lit(a * std::f64::consts::FRAC_1_SQRT_2),
        T::lit(b * std::f64::consts::FRAC_1_SQRT_2),
    )
}

/// Haar-distributed unit vector.
pub fn haar_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C<T>> {
    loop {
        let v: Vec<C<T>> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = vnorm(&v);
        if n > T::lit(1e-6) {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    ginibre(n, n, rng).hermitian_part()
}

/// Haar unitary via Gram–Schmidt on a Ginibre matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = ginibre(n, n, rng);
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for c in &cols {
                let p = vdot(c, &v);
                for (vi, &ci) in v.iter_mut().zip(c) {
                    *vi -= ci * p;
                }
            }
        }
        let nv = vnorm(&v);
        cols.push(v.into_iter().map(|z| z / nv).collect());
    }
    ComplexMatrix::from_columns(&cols)
}

/// Full-rank density matrix XX*/Tr(XX*).
pub fn random_density<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let x: ComplexMatrix<T> = ginibre(n, n, rng);
    let r = &x * &x.adjoint();
    let t = r.trace().re;
    r.scale_real(T::one() / t)
}

/// Normalized generating operator: E₀ = 0, remaining levels uniform in
/// (0, scale], random eigenbasis when `rotate`.
pub fn random_generator<T: Real, R: Rng + ?Sized>(
    n: usize,
    scale: f64,
    rotate: bool,
    rng: &mut R,
) -> GeneratingOperator<T> {
    let mut vals: Vec<f64> = (1..n).map(|_| rng.random_range(0.05..=1.0) * scale).collect();
    vals.push(0.0);
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let vals = vals.into_iter().map(T::lit).collect();
    let basis = rotate.then(|| haar_unitary(n, rng));
    GeneratingOperator::new(vals, basis).expect("valid random generator")
}
