use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, re, Real, C};

/// Spectral decomposition M = QΛQ* of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }

    /// QΛQ*.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let q = &self.vectors;
        let n = q.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..self.values.len()).fold(czero(), |acc, k| {
                acc + q[(i, k)] * q[(j, k)].conj() * self.values[k]
            })
        })
    }
}

fn check_input<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part (M+M*)/2.
///
/// Real input goes through Householder tridiagonalization and implicit QL;
/// complex input uses cyclic Jacobi rotations.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEig<T>> {
    check_input(m)?;
    let (values, vectors) = decompose(m, true);
    Ok(HermitianEig {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Ascending eigenvalues only; cheaper than [`hermitian_eig`].
pub fn hermitian_eigvals<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    check_input(m)?;
    Ok(decompose(m, false).0)
}

pub fn lambda_max<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(*hermitian_eigvals(m)?.last().unwrap_or(&T::zero()))
}

/// Largest eigenvalue of the Hermitian part with one unit eigenvector.
///
/// For real input this costs one Householder reduction plus O(n²): the
/// vector comes from inverse iteration on the tridiagonal form.
pub fn top_eigpair<T: Real>(m: &ComplexMatrix<T>) -> Result<(T, Vec<C<T>>)> {
    check_input(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok((T::zero(), Vec::new()));
    }
    if !m.is_real() || n < 3 {
        let (vals, vecs) = decompose(m, true);
        let vecs = vecs.expect("vectors requested");
        return Ok((vals[n - 1], vecs.column(n - 1)));
    }
    let half = T::lit(0.5);
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = (m[(i, j)].re + m[(j, i)].re) * half;
        }
    }
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    householder_reduce(&mut v, &mut d, &mut e, n);
    let hs = d.clone();
    let diag: Vec<T> = (0..n).map(|j| v[j * n + j]).collect();
    let sub = e.clone();
    let mut dd = diag.clone();
    let mut ee = e;
    ee[0] = T::zero();
    tql2(&mut dd, &mut ee, None, n);
    let mu = dd.iter().copied().fold(T::neg_infinity(), T::max);

    let y = tridiagonal_inverse_iteration(&diag, &sub, mu);
    // x = H_{n-1} ⋯ H_1 y
    let mut x = y;
    for k in 1..n {
        let h = hs[k];
        if h == T::zero() {
            continue;
        }
        let mut g = T::zero();
        for j in 0..k {
            g += v[j * n + k] * x[j];
        }
        let g = g / h;
        for j in 0..k {
            x[j] -= g * v[j * n + k];
        }
    }
    let nrm = x.iter().fold(T::zero(), |a, &b| a + b * b).sqrt();
    Ok((mu, x.iter().map(|&z| re(z / nrm)).collect()))
}

/// Eigenvector of the symmetric tridiagonal (diag, sub[1..]) for the
/// eigenvalue `mu`, by inverse iteration with a shift just above `mu`.
fn tridiagonal_inverse_iteration<T: Real>(diag: &[T], sub: &[T], mu: T) -> Vec<T> {
    let n = diag.len();
    let norm = diag
        .iter()
        .zip(sub)
        .fold(T::zero(), |a, (&x, &y)| a.max(x.abs() + T::lit(2.0) * y.abs()));
    let delta = T::epsilon() * T::lit(64.0) * norm.max(T::min_positive_value());
    let sigma = mu + delta;
    let mut x = vec![T::one(); n];
    for (k, xi) in x.iter_mut().enumerate() {
        // avoid starting orthogonal to the target by accident
        *xi += T::lit(1e-3) * T::count(k % 7);
    }
    for _ in 0..3 {
        x = solve_shifted_tridiagonal(diag, sub, sigma, &x);
        let nrm = x.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
        if !(nrm > T::zero()) || !nrm.is_finite() {
            x = vec![T::one(); n];
            break;
        }
        x.iter_mut().for_each(|z| *z /= nrm);
    }
    x
}

/// Solves (T − σI)x = b by Gaussian elimination with partial pivoting.
fn solve_shifted_tridiagonal<T: Real>(diag: &[T], sub: &[T], sigma: T, b: &[T]) -> Vec<T> {
    let n = diag.len();
    let tiny = T::min_positive_value().sqrt();
    // row i: lower l[i] (col i-1), main m[i], upper u[i] (col i+1), second upper w[i]
    let mut lo: Vec<T> = (0..n).map(|i| if i > 0 { sub[i] } else { T::zero() }).collect();
    let mut ma: Vec<T> = diag.iter().map(|&x| x - sigma).collect();
    let mut up: Vec<T> = (0..n)
        .map(|i| if i + 1 < n { sub[i + 1] } else { T::zero() })
        .collect();
    let mut w2 = vec![T::zero(); n];
    let mut rhs = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        let below = lo[i + 1];
        if below.abs() > ma[i].abs() {
            // swap rows i and i+1
            std::mem::swap(&mut ma[i], &mut lo[i + 1]);
            std::mem::swap(&mut up[i], &mut ma[i + 1]);
            w2[i] = up[i + 1];
            up[i + 1] = T::zero();
            rhs.swap(i, i + 1);
            // after swap, row i = old row i+1: (lo=below→ma[i], ma[i+1]→up[i], up[i+1]→w2[i])
            // row i+1 = old row i: (ma[i]→lo[i+1], up[i]→ma[i+1], 0)
        }
        let piv = if ma[i].abs() < tiny { tiny } else { ma[i] };
        ma[i] = piv;
        let f = lo[i + 1] / piv;
        lo[i + 1] = T::zero();
        ma[i + 1] -= f * up[i];
        up[i + 1] -= f * w2[i];
        let r = rhs[i];
        rhs[i + 1] -= f * r;
    }
    if ma[n - 1].abs() < tiny {
        ma[n - 1] = tiny;
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        if i + 1 < n {
            acc -= up[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= w2[i] * x[i + 2];
        }
        x[i] = acc / ma[i];
    }
    x
}

pub fn lambda_min<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(*hermitian_eigvals(m)?.first().unwrap_or(&T::zero()))
}

fn decompose<T: Real>(m: &ComplexMatrix<T>, want: bool) -> (Vec<T>, Option<ComplexMatrix<T>>) {
    let n = m.rows();
    if n == 0 {
        return (Vec::new(), want.then(|| ComplexMatrix::zeros(0, 0)));
    }
    let half = T::lit(0.5);
    let mut diagonal = true;
    let mut real = true;
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            if i != j && (z.re != T::zero() || z.im != T::zero()) {
                diagonal = false;
            }
            real &= z.im == T::zero();
        }
    }
    if diagonal {
        let mut idx: Vec<usize> = (0..n).collect();
        let d: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
        idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
        let values = idx.iter().map(|&i| d[i]).collect();
        let vectors = want.then(|| {
            let mut q = ComplexMatrix::zeros(n, n);
            for (k, &i) in idx.iter().enumerate() {
                q[(i, k)] = re(T::one());
            }
            q
        });
        return (values, vectors);
    }
    if real {
        let mut a = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (m[(i, j)].re + m[(j, i)].re) * half;
            }
        }
        let (d, v) = real_symmetric(a, n, want);
        let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, j| re(v[i * n + j])));
        (d, vectors)
    } else {
        let h = m.hermitian_part();
        complex_jacobi(h, want)
    }
}

/// Householder reduction to tridiagonal form followed by implicit QL.
/// Row-major `a` is overwritten; returns ascending eigenvalues and, if
/// requested, the row-major eigenvector matrix (columns).
fn real_symmetric<T: Real>(mut v: Vec<T>, n: usize, want: bool) -> (Vec<T>, Option<Vec<T>>) {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let zero = T::zero();
    let one = T::one();
    let ix = |i: usize, j: usize| i * n + j;

    householder_reduce(&mut v, &mut d, &mut e, n);

    if want {
        for i in 0..n - 1 {
            v[ix(n - 1, i)] = v[ix(i, i)];
            v[ix(i, i)] = one;
            let h = d[i + 1];
            if h != zero {
                for k in 0..=i {
                    d[k] = v[ix(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = zero;
                    for k in 0..=i {
                        g += v[ix(k, i + 1)] * v[ix(k, j)];
                    }
                    for k in 0..=i {
                        let upd = g * d[k];
                        v[ix(k, j)] -= upd;
                    }
                }
            }
            for k in 0..=i {
                v[ix(k, i + 1)] = zero;
            }
        }
        for j in 0..n {
            d[j] = v[ix(n - 1, j)];
            v[ix(n - 1, j)] = zero;
        }
        v[ix(n - 1, n - 1)] = one;
    } else {
        for j in 0..n {
            d[j] = v[ix(j, j)];
        }
    }
    e[0] = zero;

    tql2(&mut d, &mut e, if want { Some(&mut v) } else { None }, n);

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<T> = idx.iter().map(|&i| d[i]).collect();
    let vectors = want.then(|| {
        let mut out = vec![zero; n * n];
        for (k, &c) in idx.iter().enumerate() {
            for r in 0..n {
                out[ix(r, k)] = v[ix(r, c)];
            }
        }
        out
    });
    (values, vectors)
}

/// Householder stage of tred2. On return `d[i]` holds the reflector scale h_i
/// and column i of `v` (rows < i) the reflector vector; the tridiagonal
/// diagonal sits on the diagonal of `v` and the subdiagonal in `e[1..]`.
fn householder_reduce<T: Real>(v: &mut [T], d: &mut [T], e: &mut [T], n: usize) {
    let zero = T::zero();
    let ix = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[ix(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[ix(i - 1, j)];
                v[ix(i, j)] = zero;
                v[ix(j, i)] = zero;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = zero;
            }
            for j in 0..i {
                f = d[j];
                v[ix(j, i)] = f;
                g = e[j] + v[ix(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[ix(k, j)] * d[k];
                    e[k] += v[ix(k, j)] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[ix(k, j)] -= upd;
                }
                d[j] = v[ix(i - 1, j)];
                v[ix(i, j)] = zero;
            }
        }
        d[i] = h;
    }
}

fn tql2<T: Real>(d: &mut [T], e: &mut [T], mut v: Option<&mut Vec<T>>, n: usize) {
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        let m = m.min(n - 1);
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let h = v[k * n + i + 1];
                            let vi = v[k * n + i];
                            v[k * n + i + 1] = s * vi + c * h;
                            v[k * n + i] = c * vi - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter > 60 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
}

/// Cyclic Jacobi for complex Hermitian matrices.
fn complex_jacobi<T: Real>(mut a: ComplexMatrix<T>, want: bool) -> (Vec<T>, Option<ComplexMatrix<T>>) {
    let n = a.rows();
    let mut v = want.then(|| ComplexMatrix::<T>::identity(n));
    let scale = a.frobenius_norm();
    let eps = T::epsilon();
    for i in 0..n {
        a[(i, i)] = re(a[(i, i)].re);
    }
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= eps * scale * T::lit(0.25) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == T::zero() {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let (c, s) = jacobi_cs(alpha, beta, r);
                let u = apq / r;
                let ub = u.conj();
                let (cc, ss) = (re(c), re(s));
                // columns: M R, R = [[c, s], [-s ū, c ū]]
                for k in 0..n {
                    let mkp = a[(k, p)];
                    let mkq = a[(k, q)];
                    a[(k, p)] = mkp * cc - mkq * ss * ub;
                    a[(k, q)] = mkp * ss + mkq * cc * ub;
                }
                // rows: R* M
                for k in 0..n {
                    let mpk = a[(p, k)];
                    let mqk = a[(q, k)];
                    a[(p, k)] = mpk * cc - mqk * ss * u;
                    a[(q, k)] = mpk * ss + mqk * cc * u;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)] = re(a[(p, p)].re);
                a[(q, q)] = re(a[(q, q)].re);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * cc - vkq * ss * ub;
                        v[(k, q)] = vkp * ss + vkq * cc * ub;
                    }
                }
            }
        }
    }
    let d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap());
    let values = idx.iter().map(|&i| d[i]).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, k| v[(i, idx[k])]));
    (values, vectors)
}

/// Rotation (c, s) annihilating the off-diagonal of [[α, r], [r, β]] via
/// QᵀSQ with Q = [[c, s], [−s, c]].
pub(super) fn jacobi_cs<T: Real>(alpha: T, beta: T, r: T) -> (T, T) {
    let one = T::one();
    let theta = (beta - alpha) / (T::lit(2.0) * r);
    let t = if theta.is_infinite() {
        one / (T::lit(2.0) * theta)
    } else {
        let sgn = if theta >= T::zero() { one } else { -one };
        sgn / (theta.abs() + (theta * theta + one).sqrt())
    };
    let c = one / (t * t + one).sqrt();
    (c, t * c)
}
