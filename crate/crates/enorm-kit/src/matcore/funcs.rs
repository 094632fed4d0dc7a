use super::{hermitian_eig, svd, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{czero, re, Real, C};

/// Which tensor factor survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    X,
    Y,
}

/// Principal square root of a PSD matrix.
///
/// Eigenvalues down to `-psd_tol · max(1, ‖M‖)` are clipped to zero; anything
/// more negative is rejected.
pub fn sqrtm_psd<T: Real>(m: &ComplexMatrix<T>, psd_tol: T) -> Result<ComplexMatrix<T>> {
    psd_function(m, psd_tol, |x| x.sqrt())
}

/// √m with eigenvalues at roundoff level treated as exact zeros, so a
/// rank-deficient input does not pick up O(√ε) spurious components.
pub(crate) fn sqrtm_psd_clean<T: Real>(m: &ComplexMatrix<T>, psd_tol: T) -> Result<ComplexMatrix<T>> {
    let top = m.rows().max(1) as f64 * 16.0 * f64::EPSILON;
    let scale = crate::enorms::operator_norm(m)?;
    let cut = T::lit(top) * scale;
    psd_function(m, psd_tol, |x| if x <= cut { T::zero() } else { x.sqrt() })
}

pub(crate) fn psd_function<T: Real>(
    m: &ComplexMatrix<T>,
    psd_tol: T,
    f: impl Fn(T) -> T,
) -> Result<ComplexMatrix<T>> {
    let e = hermitian_eig(m)?;
    let top = e.values.last().copied().unwrap_or(T::zero()).abs();
    let floor = -psd_tol * top.max(T::one());
    if let Some(&lo) = e.values.first() {
        if lo < floor {
            return Err(Error::NotPsd { min_eig: lo.as_f64() });
        }
    }
    let vals: Vec<T> = e.values.iter().map(|&x| f(x.max(T::zero()))).collect();
    Ok(assemble(&e.vectors, &vals))
}

/// Σ_k vals[k]·|q_k⟩⟨q_k| over the columns of `q`.
pub(crate) fn assemble<T: Real>(q: &ComplexMatrix<T>, vals: &[T]) -> ComplexMatrix<T> {
    let n = q.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        if lam == T::zero() {
            continue;
        }
        for i in 0..n {
            let a = q[(i, k)] * lam;
            for j in 0..n {
                out[(i, j)] += a * q[(j, k)].conj();
            }
        }
    }
    out
}

/// Polar decomposition T = W·P built from the SVD (W = UV*, P = VΣV*).
pub fn polar<T: Real>(t: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let d = svd(t)?;
    let w = &d.u * &d.v.adjoint();
    let p = assemble(&d.v, &d.s);
    Ok((w, p))
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(t: &ComplexMatrix<T>) -> Result<T> {
    Ok(svd(t)?.s.iter().fold(T::zero(), |a, &b| a + b))
}

/// Partial trace of an operator on H_X ⊗ H_Y.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    dx: usize,
    dy: usize,
    keep: Keep,
) -> Result<ComplexMatrix<T>> {
    if m.rows() != dx * dy || m.cols() != dx * dy {
        return Err(Error::DimMismatch(format!(
            "{}x{} operator on a {dx}x{dy} product space",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match keep {
        Keep::X => ComplexMatrix::from_fn(dx, dx, |i, j| {
            (0..dy).fold(czero(), |acc, k| acc + m[(i * dy + k, j * dy + k)])
        }),
        Keep::Y => ComplexMatrix::from_fn(dy, dy, |i, j| {
            (0..dx).fold(czero(), |acc, k| acc + m[(k * dy + i, k * dy + j)])
        }),
    })
}

/// Kronecker product A ⊗ B.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn kron_vec<T: Real>(u: &[C<T>], v: &[C<T>]) -> Vec<C<T>> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect()
}

/// Block-diagonal A ⊕ B.
pub fn direct_sum<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(a.rows(), a.cols(), b);
    out
}

/// Vector η ∈ H ⊗ H with Tr₂|η⟩⟨η| = ρ; the largest eigenvalue is paired
/// with the first reference basis vector.
pub fn purify<T: Real>(rho: &ComplexMatrix<T>, psd_tol: T) -> Result<Vec<C<T>>> {
    let e = hermitian_eig(rho)?;
    let n = rho.rows();
    let top = e.values.last().copied().unwrap_or(T::zero()).abs();
    if let Some(&lo) = e.values.first() {
        if lo < -psd_tol * top.max(T::one()) {
            return Err(Error::NotPsd { min_eig: lo.as_f64() });
        }
    }
    // weights at rounding level would only add O(√eps) noise
    let negligible = T::epsilon() * T::count(n) * top;
    let mut eta = vec![czero(); n * n];
    for (r, k) in (0..n).rev().enumerate() {
        let lam = e.values[k];
        if lam <= negligible {
            continue;
        }
        let w = lam.sqrt();
        if w == T::zero() {
            continue;
        }
        for i in 0..n {
            eta[i * n + r] = e.vectors[(i, k)] * re(w);
        }
    }
    Ok(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(x: f64) -> C<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = ComplexMatrix::from_real_diag(&[4.0, 9.0]);
        let r = sqrtm_psd(&m, 1e-9).unwrap();
        assert!((&r - &ComplexMatrix::from_real_diag(&[2.0, 3.0])).frobenius_norm() < 1e-14);
        let id = ComplexMatrix::<f64>::identity(3);
        assert!((&sqrtm_psd(&id, 1e-9).unwrap() - &id).frobenius_norm() < 1e-14);
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::from_real_diag(&[1.0, -0.1]);
        assert!(matches!(sqrtm_psd(&m, 1e-9), Err(Error::NotPsd { .. })));
        let m = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        assert!(sqrtm_psd(&m, 1e-9).is_ok());
    }

    #[test]
    fn trace_norm_simple() {
        let m = ComplexMatrix::<f64>::from_real_diag(&[1.0, -2.0]);
        assert!((trace_norm(&m).unwrap() - 3.0).abs() < 1e-14);
        let u = vec![c(0.6), Complex::new(0.0, 0.8)];
        let v = vec![c(1.0), c(0.0)];
        assert!((trace_norm(&ComplexMatrix::outer(&u, &v)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = ComplexMatrix::from_real_diag(&[0.25, 0.75]);
        let sigma = ComplexMatrix::from_real_diag(&[0.5, 0.3, 0.2]).scale_real(2.0);
        let p = partial_trace(&kron(&rho, &sigma), 2, 3, Keep::X).unwrap();
        assert!((&p - &rho.scale_real(2.0)).frobenius_norm() < 1e-14);
        assert!(partial_trace(&rho, 2, 3, Keep::X).is_err());
    }

    #[test]
    fn bell_marginal() {
        let h = 0.5f64.sqrt();
        let phi = vec![c(h), c(0.0), c(0.0), c(h)];
        let m = ComplexMatrix::outer(&phi, &phi);
        let p = partial_trace(&m, 2, 2, Keep::Y).unwrap();
        assert!((&p - &ComplexMatrix::from_real_diag(&[0.5, 0.5])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn kron_identities() {
        let i6 = kron(&ComplexMatrix::<f64>::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(i6, ComplexMatrix::identity(6));
        let d = kron(
            &ComplexMatrix::from_real_diag(&[1.0, 2.0]),
            &ComplexMatrix::from_real_diag(&[3.0, 5.0]),
        );
        assert_eq!(d, ComplexMatrix::from_real_diag(&[3.0, 5.0, 6.0, 10.0]));
    }

    #[test]
    fn purify_pure_state() {
        let phi = vec![c(0.6), c(0.8)];
        let eta = purify(&ComplexMatrix::outer(&phi, &phi), 1e-9).unwrap();
        let expect = kron_vec(&phi, &[c(1.0), c(0.0)]);
        // global phase is free; compare the projector
        let a = ComplexMatrix::outer(&eta, &eta);
        let b = ComplexMatrix::outer(&expect, &expect);
        assert!((&a - &b).frobenius_norm() < 1e-12);
    }

    #[test]
    fn polar_of_psd_and_unitary() {
        let p = ComplexMatrix::from_real_diag(&[2.0, 0.5]);
        let (w, pp) = polar(&p).unwrap();
        assert!((&w - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-12);
        assert!((&pp - &p).frobenius_norm() < 1e-12);
        let u = ComplexMatrix::new(2, 2, vec![c(0.0), c(1.0), Complex::new(0.0, 1.0), c(0.0)]).unwrap();
        let (w, pp) = polar(&u).unwrap();
        assert!((&pp - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-12);
        assert!((&w - &u).frobenius_norm() < 1e-12);
    }
}
