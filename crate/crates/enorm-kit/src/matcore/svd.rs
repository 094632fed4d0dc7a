use super::eig::jacobi_cs;
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, re, Real, C};

/// Thin singular value decomposition M = U·diag(s)·V*.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// rows × k with orthonormal columns (completed where σ = 0).
    pub u: ComplexMatrix<T>,
    /// k = min(rows, cols) singular values, descending.
    pub s: Vec<T>,
    /// cols × k with orthonormal columns.
    pub v: ComplexMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let (m, n, k) = (self.u.rows(), self.v.rows(), self.s.len());
        ComplexMatrix::from_fn(m, n, |i, j| {
            (0..k).fold(czero(), |acc, l| {
                acc + self.u[(i, l)] * self.v[(j, l)].conj() * self.s[l]
            })
        })
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> Result<Svd<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    let (rows, n) = (m.rows(), m.cols());
    // column-major working copy for cache-friendly column rotations
    let mut a: Vec<Vec<C<T>>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n).map(|j| super::basis_vector(n, j)).collect();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm2(&a[p]);
                let beta = norm2(&a[q]);
                let gamma = super::vdot(&a[p], &a[q]);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s) = jacobi_cs(alpha, beta, g);
                let u = gamma / g;
                rotate(&mut a, p, q, c, s, u.conj());
                rotate(&mut v, p, q, c, s, u.conj());
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<(T, usize)> = a.iter().enumerate().map(|(j, c)| (norm2(c).sqrt(), j)).collect();
    sv.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let smax = sv.first().map_or(T::zero(), |x| x.0);
    let cutoff = smax * eps * T::count(rows.max(n));
    let mut ucols: Vec<Option<Vec<C<T>>>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut vcols = Vec::with_capacity(n);
    for &(sig, j) in &sv {
        s.push(sig);
        vcols.push(v[j].clone());
        if sig > cutoff && sig > T::zero() {
            ucols.push(Some(a[j].iter().map(|&z| z / sig).collect()));
        } else {
            ucols.push(None);
        }
    }
    let ucols = complete_orthonormal(ucols, rows);
    Ok(Svd {
        u: ComplexMatrix::from_columns(&ucols),
        s,
        v: ComplexMatrix::from_columns(&vcols),
    })
}

fn norm2<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Column update X ← X·R on columns p, q with R = [[c, s], [−s ū, c ū]].
fn rotate<T: Real>(x: &mut [Vec<C<T>>], p: usize, q: usize, c: T, s: T, ub: C<T>) {
    let (lo, hi) = x.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (zp, zq) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*zp, *zq);
        *zp = a * c - b * ub * s;
        *zq = a * s + b * ub * c;
    }
}

/// Fills `None` slots with unit vectors orthogonal to all others
/// (Gram–Schmidt against the standard basis).
fn complete_orthonormal<T: Real>(mut cols: Vec<Option<Vec<C<T>>>>, dim: usize) -> Vec<Vec<C<T>>> {
    let mut next_basis = 0;
    for slot in 0..cols.len() {
        if cols[slot].is_some() {
            continue;
        }
        while next_basis < dim {
            let mut w = super::basis_vector::<T>(dim, next_basis);
            next_basis += 1;
            for _ in 0..2 {
                for c in cols.iter().flatten() {
                    let proj = super::vdot(c, &w);
                    for (wi, &ci) in w.iter_mut().zip(c) {
                        *wi -= ci * proj;
                    }
                }
            }
            let nw = norm2(&w).sqrt();
            if nw > T::lit(1e-3) {
                cols[slot] = Some(w.iter().map(|&z| z / nw).collect());
                break;
            }
        }
        if cols[slot].is_none() {
            cols[slot] = Some(vec![re(T::zero()); dim]);
        }
    }
    cols.into_iter().map(Option::unwrap).collect()
}
