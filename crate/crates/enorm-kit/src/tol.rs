//! Central tolerance record.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// All numerical tolerances in one place.
///
/// The `f64` defaults are the calibrated values; narrower types get the same
/// values floored at a small multiple of their machine epsilon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    /// Relative reconstruction / orthogonality tolerance for decompositions.
    pub tol_eig: T,
    /// Negative eigenvalues above `-psd_tol` are treated as zero.
    pub psd_tol: T,
    /// Allowed Frobenius distance from Hermitian.
    pub herm_tol: T,
    /// Accepted duality gap for E-norm certificates (scaled by `max(1, dual)`).
    pub gap_tol: T,
    /// Agreement tolerance for the t-transform checks.
    pub transform_tol: T,
    /// Target bracket width of the seesaw solvers.
    pub seesaw_tol: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        let floor = |v: f64, k: f64| {
            let v = T::lit(v);
            let m = eps * T::lit(k);
            if v > m {
                v
            } else {
                m
            }
        };
        Self {
            tol_eig: floor(1e-10, 512.0),
            psd_tol: floor(1e-9, 1024.0),
            herm_tol: floor(1e-9, 1024.0),
            gap_tol: floor(1e-8, 4096.0),
            transform_tol: floor(1e-6, 16384.0),
            seesaw_tol: floor(1e-6, 16384.0),
        }
    }
}
