//! Lagrangian dual of sup{Tr Mρ : Tr ρ = 1, Tr Gρ ≤ E} with G diagonal:
//! min_{λ≥0} h(λ) = λE + λ_max(M − λG).

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, top_eigpair, vdot, vnorm, ComplexMatrix};
use crate::scalar::{czero, re, Real, C};
use crate::tol::Tolerances;

/// Solution of the linear-objective energy-constrained problem.
#[derive(Clone, Debug)]
pub struct LinearDual<T> {
    /// ⟨φ|M|φ⟩ at the witness.
    pub primal: T,
    /// h(λ*), an upper bound on the supremum.
    pub dual_value: T,
    pub lambda: T,
    /// Feasible unit vector, in eigen-coordinates of G.
    pub witness: Vec<C<T>>,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
struct Probe<T> {
    lambda: T,
    h: T,
    v: Vec<C<T>>,
    /// ⟨v|M|v⟩
    mv: T,
    /// ⟨v|G|v⟩
    gv: T,
}

impl<T: Real> Probe<T> {
    fn slope(&self, e: T) -> T {
        e - self.gv
    }
    /// Supporting line λ ↦ ⟨v|M|v⟩ + λ(E − ⟨v|G|v⟩), a global minorant of h.
    fn line(&self, x: T, e: T) -> T {
        self.mv + x * self.slope(e)
    }
}

pub(crate) fn energy<T: Real>(v: &[C<T>], g: &[T]) -> T {
    v.iter()
        .zip(g)
        .fold(T::zero(), |acc, (z, &e)| acc + z.norm_sqr() * e)
}

fn shifted<T: Real>(m: &ComplexMatrix<T>, g: &[T], lambda: T) -> ComplexMatrix<T> {
    let mut x = m.clone();
    for (i, &gi) in g.iter().enumerate() {
        x[(i, i)] -= re(lambda * gi);
    }
    x
}

fn probe<T: Real>(m: &ComplexMatrix<T>, g: &[T], e: T, lambda: T) -> Result<Probe<T>> {
    let (mu, v) = top_eigpair(&shifted(m, g, lambda))?;
    let mv = m.expectation(&v).re;
    let gv = energy(&v, g);
    Ok(Probe {
        lambda,
        h: lambda * e + mu,
        v,
        mv,
        gv,
    })
}

/// Top eigenspace of M − λG (eigenvalues within `window` of the top), with
/// G compressed to it and diagonalized. Returns the compressed-G eigenvectors
/// in ascending ⟨G⟩ order, plus λ_max.
fn top_space<T: Real>(m: &ComplexMatrix<T>, g: &[T], lambda: T, window: T) -> Result<(T, Vec<Vec<C<T>>>)> {
    let eig = hermitian_eig(&shifted(m, g, lambda))?;
    let n = eig.values.len();
    let mu = eig.values[n - 1];
    let idx: Vec<usize> = (0..n).filter(|&k| eig.values[k] >= mu - window).collect();
    let q: Vec<Vec<C<T>>> = idx.iter().map(|&k| eig.vector(k)).collect();
    if q.len() == 1 {
        return Ok((mu, q));
    }
    let k = q.len();
    let gq = ComplexMatrix::from_fn(k, k, |i, j| {
        q[i].iter()
            .zip(&q[j])
            .zip(g)
            .fold(czero(), |acc, ((a, b), &gg)| acc + a.conj() * *b * gg)
    });
    let ge = hermitian_eig(&gq)?;
    let out = (0..k)
        .map(|c| {
            let y = ge.vector(c);
            let mut v: Vec<C<T>> = vec![czero(); n];
            for (l, ql) in q.iter().enumerate() {
                for (vi, &qi) in v.iter_mut().zip(ql) {
                    *vi += qi * y[l];
                }
            }
            let nv = vnorm(&v);
            v.into_iter().map(|z| z / nv).collect::<Vec<C<T>>>()
        })
        .collect();
    Ok((mu, out))
}

/// Best unit vector in span{u, w} for max ⟨φ|M|φ⟩ s.t. ⟨φ|G|φ⟩ ≤ E.
///
/// On the Bloch sphere of the span both expectations are affine in the
/// Bloch vector r, so the problem is max m·r on |r| = 1 with g·r ≤ c.
fn best_in_span<T: Real>(
    u: &[C<T>],
    mu_: &[C<T>],
    w: &[C<T>],
    mw: &[C<T>],
    g: &[T],
    e: T,
    feas: T,
) -> Option<(Vec<C<T>>, T)> {
    let one = T::one();
    let half = T::lit(0.5);
    let nu = vnorm(u);
    if nu == T::zero() {
        return None;
    }
    let e1: Vec<C<T>> = u.iter().map(|&z| z / nu).collect();
    let me1: Vec<C<T>> = mu_.iter().map(|&z| z / nu).collect();
    let single = |v: &[C<T>], mv: &[C<T>]| {
        let gv = energy(v, g);
        (gv <= e + feas).then(|| (v.to_vec(), vdot(v, mv).re))
    };
    let proj = vdot(&e1, w);
    let r: Vec<C<T>> = w.iter().zip(&e1).map(|(&a, &b)| a - b * proj).collect();
    let nr = vnorm(&r);
    if nr <= T::lit(1e-9) * vnorm(w).max(T::min_positive_value()) {
        return single(&e1, &me1);
    }
    let e2: Vec<C<T>> = r.iter().map(|&z| z / nr).collect();
    let me2: Vec<C<T>> = mw.iter().zip(&me1).map(|(&a, &b)| (a - b * proj) / nr).collect();
    let ma = vdot(&e1, &me1).re;
    let md = vdot(&e2, &me2).re;
    let mb = vdot(&e1, &me2);
    let ga = energy(&e1, g);
    let gd = energy(&e2, g);
    let gb = e1
        .iter()
        .zip(&e2)
        .zip(g)
        .fold(czero::<T>(), |acc, ((a, b), &gg)| acc + a.conj() * *b * gg);
    let mvec = [mb.re, -mb.im, (ma - md) * half];
    let gvec = [gb.re, -gb.im, (ga - gd) * half];
    let g0 = (ga + gd) * half;
    let dot = |a: &[T; 3], b: &[T; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let norm3 = |a: &[T; 3]| dot(a, a).sqrt();
    let mn = norm3(&mvec);
    let gn = norm3(&gvec);
    let c = e - g0;

    let r = if mn > T::zero() && g0 + dot(&gvec, &mvec) / mn <= e {
        [mvec[0] / mn, mvec[1] / mn, mvec[2] / mn]
    } else if gn == T::zero() {
        if g0 > e + feas {
            return None;
        }
        if mn > T::zero() {
            [mvec[0] / mn, mvec[1] / mn, mvec[2] / mn]
        } else {
            [T::zero(), T::zero(), one]
        }
    } else {
        let gh = [gvec[0] / gn, gvec[1] / gn, gvec[2] / gn];
        let s = c / gn;
        if s < -one - feas {
            return None;
        }
        let s = s.max(-one).min(one);
        let along = dot(&mvec, &gh);
        let mut perp = [
            mvec[0] - along * gh[0],
            mvec[1] - along * gh[1],
            mvec[2] - along * gh[2],
        ];
        let pn = norm3(&perp);
        if pn <= T::epsilon() * mn.max(T::one()) {
            // any direction orthogonal to ĝ
            let trial = if gh[0].abs() < T::lit(0.9) {
                [one, T::zero(), T::zero()]
            } else {
                [T::zero(), one, T::zero()]
            };
            let t = dot(&trial, &gh);
            perp = [trial[0] - t * gh[0], trial[1] - t * gh[1], trial[2] - t * gh[2]];
        }
        let pn = norm3(&perp);
        let k = (one - s * s).max(T::zero()).sqrt() / pn;
        [
            s * gh[0] + k * perp[0],
            s * gh[1] + k * perp[1],
            s * gh[2] + k * perp[2],
        ]
    };
    let c1 = ((one + r[2]) * half).max(T::zero()).sqrt();
    let (a1, a2) = if c1 > T::lit(1e-150) {
        (re(c1), C::new(r[0], r[1]) / (c1 + c1))
    } else {
        (czero(), re(one))
    };
    let mut phi: Vec<C<T>> = e1.iter().zip(&e2).map(|(&x, &y)| x * a1 + y * a2).collect();
    let nphi = vnorm(&phi);
    phi.iter_mut().for_each(|z| *z = *z / nphi);
    let mphi: Vec<C<T>> = me1
        .iter()
        .zip(&me2)
        .map(|(&x, &y)| (x * a1 + y * a2) / nphi)
        .collect();
    let gv = energy(&phi, g);
    (gv <= e + feas).then(|| {
        let val = vdot(&phi, &mphi).re;
        (phi, val)
    })
}

/// Best witness over all candidate vectors and their pairwise spans.
fn best_witness<T: Real>(
    m: &ComplexMatrix<T>,
    g: &[T],
    e: T,
    cands: &[Vec<C<T>>],
    feas: T,
) -> Option<(Vec<C<T>>, T)> {
    let prods: Vec<Vec<C<T>>> = cands.iter().map(|c| m.mul_vec(c)).collect();
    let mut best: Option<(Vec<C<T>>, T)> = None;
    let mut consider = |cand: Option<(Vec<C<T>>, T)>| {
        if let Some((v, val)) = cand {
            if best.as_ref().is_none_or(|b| val > b.1) {
                best = Some((v, val));
            }
        }
    };
    for i in 0..cands.len() {
        consider(best_in_span(
            &cands[i], &prods[i], &cands[i], &prods[i], g, e, feas,
        ));
        for j in (i + 1)..cands.len() {
            consider(best_in_span(
                &cands[i], &prods[i], &cands[j], &prods[j], g, e, feas,
            ));
        }
    }
    best
}

fn feasibility_slack<T: Real>(e: T, g: &[T]) -> T {
    let gmax = g.iter().copied().fold(T::zero(), T::max);
    T::epsilon() * T::lit(64.0) * (e + gmax)
}

fn ground<T: Real>(n: usize) -> Vec<C<T>> {
    let mut v: Vec<C<T>> = vec![czero(); n];
    v[0] = re(T::one());
    v
}

/// Solves the dual for Hermitian `m` given in the eigenbasis of G (diagonal `g`,
/// ascending, g[0] = 0).
pub fn solve_linear<T: Real>(
    m: &ComplexMatrix<T>,
    g: &[T],
    e: T,
    tol: &Tolerances<T>,
) -> Result<LinearDual<T>> {
    let n = g.len();
    if !(e > T::zero()) {
        return Err(Error::Infeasible(format!(
            "budget E = {} must be positive",
            e.as_f64()
        )));
    }
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimMismatch(format!(
            "objective {}x{} against G of dimension {n}",
            m.rows(),
            m.cols()
        )));
    }
    if e < g[0] {
        return Err(Error::Infeasible(format!(
            "budget {} below ground energy {}",
            e.as_f64(),
            g[0].as_f64()
        )));
    }
    let m = m.hermitian_part();
    let gmax = g[n - 1];
    let scale = m.max_abs().max(T::one());
    let feas = feasibility_slack(e, g);
    let window = T::lit(1e-12) * scale;

    // λ = 0: the budget is slack if some top eigenvector is affordable.
    let (mu0, space0) = top_space(&m, g, T::zero(), window)?;
    let low = &space0[0];
    if energy(low, g) <= e + feas {
        let mv = m.expectation(low).re;
        return Ok(LinearDual {
            primal: mv,
            dual_value: mu0.max(mv),
            lambda: T::zero(),
            witness: low.clone(),
            iterations: 1,
        });
    }
    let mut a = Probe {
        lambda: T::zero(),
        h: mu0,
        mv: m.expectation(low).re,
        gv: energy(low, g),
        v: low.clone(),
    };
    let high0 = space0.last().cloned().unwrap_or_else(|| low.clone());

    // Bracket: double until the subgradient turns nonnegative.
    let lmin = crate::matcore::lambda_min(&m)?;
    let gpos = g.iter().copied().find(|&x| x > T::zero()).unwrap_or(T::one());
    let mut cap = ((mu0 - lmin) / gpos).max(T::epsilon() * scale);
    let mut b = probe(&m, g, e, cap)?;
    let mut doublings = 0;
    while b.slope(e) < T::zero() {
        doublings += 1;
        if doublings > 80 {
            return Err(Error::NoBracket {
                lambda_cap: cap.as_f64(),
            });
        }
        a = b;
        cap = cap + cap;
        b = probe(&m, g, e, cap)?;
    }

    let mut best = if a.h <= b.h { a.clone() } else { b.clone() };
    let stop = |ub: T| tol.gap_tol * T::lit(1e-2) * ub.abs().max(T::one());
    let mut widths: Vec<T> = vec![b.lambda - a.lambda];
    let invphi2 = T::lit(0.381_966_011_250_105_1);
    let mut iterations = doublings + 2;
    for _ in 0..200 {
        let (sa, sb) = (a.slope(e), b.slope(e));
        if sb == T::zero() {
            break;
        }
        let mut x = (a.mv - b.mv) / (sb - sa);
        x = x.max(a.lambda).min(b.lambda);
        let lb = a.line(x, e).max(b.line(x, e));
        if best.h - lb <= stop(best.h) {
            break;
        }
        let w = b.lambda - a.lambda;
        let k = widths.len();
        if k >= 2 && w > widths[k - 2] * T::lit(0.5) {
            x = if x - a.lambda < b.lambda - x {
                a.lambda + invphi2 * w
            } else {
                b.lambda - invphi2 * w
            };
        }
        if !(x > a.lambda && x < b.lambda) {
            break;
        }
        let p = probe(&m, g, e, x)?;
        iterations += 1;
        if p.h < best.h {
            best = p.clone();
        }
        if p.slope(e) < T::zero() {
            a = p;
        } else {
            b = p;
        }
        widths.push(b.lambda - a.lambda);
    }

    let cands = vec![a.v.clone(), b.v.clone(), best.v.clone(), high0, ground(n)];
    let (mut witness, mut primal) = best_witness(&m, g, e, &cands, feas).unwrap_or_else(|| {
        let gv = ground(n);
        let val = m.expectation(&gv).re;
        (gv, val)
    });
    if best.h - primal > tol.gap_tol * best.h.abs().max(T::one()) {
        let rw = recover_in_eigenbasis(
            &m,
            g,
            e,
            best.lambda,
            scale * T::lit(1e-9) + (b.lambda - a.lambda) * gmax,
        )?;
        let val = m.expectation(&rw).re;
        if val > primal {
            witness = rw;
            primal = val;
        }
    }
    Ok(LinearDual {
        primal,
        dual_value: best.h,
        lambda: best.lambda,
        witness,
        iterations,
    })
}

/// Witness from the top eigenspace of M − λG: mixes its lowest- and
/// highest-energy vectors (and the ground state when every top vector is
/// too expensive) onto ⟨G⟩ = E.
pub(crate) fn recover_in_eigenbasis<T: Real>(
    m: &ComplexMatrix<T>,
    g: &[T],
    e: T,
    lambda: T,
    window: T,
) -> Result<Vec<C<T>>> {
    let (_, space) = top_space(m, g, lambda, window)?;
    let n = g.len();
    let mut cands = vec![space[0].clone()];
    if space.len() > 1 {
        cands.push(space[space.len() - 1].clone());
    }
    cands.push(ground(n));
    let feas = feasibility_slack(e, g);
    Ok(best_witness(m, g, e, &cands, feas)
        .map(|x| x.0)
        .unwrap_or_else(|| ground(n)))
}
