//! Energy-constrained Bures distance, cb-norm estimates and the checks built
//! on them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ellipsoid::{self, Oracle};
use super::{
    common_rep, common_stinespring, contracted, cross_operator, CPMap, StinespringRep, TraceBehavior,
};
use crate::enorms::{enorm, maximize_expectation};
use crate::error::{Error, Result};
use crate::gspace::GeneratingOperator;
use crate::matcore::{hermitian_eig, kron, polar, purify, svd, trace_norm, ComplexMatrix};
use crate::random::random_hermitian;
use crate::report::{Check, Report};
use crate::scalar::{re, Real, C};
use crate::tol::Tolerances;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BuresOptions {
    /// Ellipsoid iterations on the state space.
    pub max_iter: usize,
}

impl Default for BuresOptions {
    fn default() -> Self {
        Self { max_iter: 20_000 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CbOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for CbOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            max_iter: 200,
            seed: 0,
        }
    }
}

/// β_E(Φ, Ψ) bracketed by a feasible input state and a contraction on H_E.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct SeesawResult<T> {
    pub beta: T,
    pub lower: T,
    pub upper: T,
    pub rho_star: ComplexMatrix<T>,
    pub c_star: ComplexMatrix<T>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CbNormEstimate<T> {
    /// Attained value ‖(Φ−Ψ)⊗id(ρ)‖₁, a lower bound on the cb-norm.
    pub value: T,
    /// Pure input on H_A ⊗ H_R.
    pub witness: Vec<C<T>>,
    /// 2·β_E upper bound, for trace-preserving pairs.
    pub sandwich_upper: Option<T>,
}

fn check_pair<T: Real>(phi: &CPMap<T>, psi: &CPMap<T>, g: &GeneratingOperator<T>, e: T) -> Result<()> {
    if phi.dim_in() != psi.dim_in() || phi.dim_out() != psi.dim_out() {
        return Err(Error::DimMismatch("maps act between different spaces".into()));
    }
    if phi.dim_in() != g.dim() {
        return Err(Error::DimMismatch(format!(
            "maps take dimension {} but G has {}",
            phi.dim_in(),
            g.dim()
        )));
    }
    if !(e > T::zero()) {
        return Err(Error::Infeasible(format!("budget {}", e.as_f64())));
    }
    Ok(())
}

/// Orthonormal basis of traceless Hermitian d×d matrices (Tr B_k B_l = δ_kl).
fn traceless_basis<T: Real>(d: usize) -> Vec<ComplexMatrix<T>> {
    let h = T::lit(0.5).sqrt();
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = re(h);
            s[(k, j)] = re(h);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = C::new(T::zero(), -h);
            a[(k, j)] = C::new(T::zero(), h);
            out.push(a);
        }
    }
    for l in 1..d {
        let norm = (T::count(l) * T::count(l + 1)).sqrt().recip();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = re(norm);
        }
        m[(l, l)] = re(-T::count(l) * norm);
        out.push(m);
    }
    out
}

fn pairing<T: Real>(m: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    // Tr(M B) for Hermitian B.
    let n = m.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            s += (m[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

/// Value of the C-fixed objective sup_ρ Tr[(Φ†(I) + Ψ†(I) − N_C − N_C*)ρ].
fn contraction_bound<T: Real>(
    s: &ComplexMatrix<T>,
    vphi: &StinespringRep<T>,
    vpsi: &StinespringRep<T>,
    c: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<T> {
    let n = contracted(vphi, vpsi, c);
    let m = &(s - &n) - &n.adjoint();
    Ok(maximize_expectation(&m, g, e, tol)?.dual_value)
}

/// β_E(Φ, Ψ)² = sup_ρ [TrΦ(ρ) + TrΨ(ρ) − 2‖Tr_B V_Ψ ρ V_Φ*‖₁] over energy-feasible
/// states. The concave objective is maximized over the state space; the polar
/// contraction of the best state then certifies an upper bound through the
/// linear dual.
pub fn ec_bures<T: Real>(
    phi: &CPMap<T>,
    psi: &CPMap<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
    opts: &BuresOptions,
) -> Result<SeesawResult<T>> {
    check_pair(phi, psi, g, e)?;
    let d = phi.dim_in();
    let (vphi, vpsi) = common_stinespring(phi, psi)?;
    let s = &phi.adjoint_apply(&ComplexMatrix::identity(d)) + &psi.adjoint_apply(&ComplexMatrix::identity(d));
    let basis = traceless_basis::<T>(d);
    let gm = g.to_matrix();
    let gk: Vec<T> = basis.iter().map(|b| pairing(&gm, b)).collect();
    let inv_d = T::count(d).recip();
    let state = |x: &[T]| {
        let mut rho = ComplexMatrix::identity(d).scale_real(inv_d);
        for (b, &xk) in basis.iter().zip(x) {
            rho += &b.scale_real(xk);
        }
        rho
    };
    let mut first_err: Option<Error> = None;
    let oracle = |x: &[T]| -> Oracle<T> {
        let rho = state(x);
        let eig = match hermitian_eig(&rho) {
            Ok(eig) => eig,
            Err(err) => {
                first_err.get_or_insert(err);
                return Oracle::Cut(x.to_vec());
            }
        };
        if eig.values[0] < T::zero() {
            let v = eig.vector(0);
            return Oracle::Cut(basis.iter().map(|b| -b.expectation(&v).re).collect());
        }
        if pairing(&gm, &rho) > e {
            return Oracle::Cut(gk.clone());
        }
        let x_op = match cross_operator(&vphi, &vpsi, &rho) {
            Ok(x) => x,
            Err(err) => {
                first_err.get_or_insert(err);
                return Oracle::Cut(x.to_vec());
            }
        };
        let (w, _) = polar(&x_op).expect("finite cross operator");
        let tn = trace_norm(&x_op).expect("finite cross operator");
        let value = pairing(&s, &rho) - T::lit(2.0) * tn;
        let n = contracted(&vphi, &vpsi, &w.adjoint());
        let grad = &(&s - &n) - &n.adjoint();
        Oracle::Value(value, basis.iter().map(|b| pairing(&grad, b)).collect())
    };
    let radius = (T::one() - inv_d).sqrt() * T::lit(1.01);
    let target = T::lit(1e-14).max(T::lit(64.0) * T::epsilon());
    let run = ellipsoid::maximize(vec![T::zero(); d * d - 1], radius, target, opts.max_iter, oracle);
    if let Some(err) = first_err {
        return Err(err);
    }
    let x = run
        .best_x
        .ok_or_else(|| Error::NoConvergence("no energy-feasible state found".into()))?;
    let rho_star = state(&x);
    let x_op = cross_operator(&vphi, &vpsi, &rho_star)?;
    let lower_sq = pairing(&s, &rho_star) - T::lit(2.0) * trace_norm(&x_op)?;
    let (c_star, upper_sq) = certify(&s, &vphi, &vpsi, &x_op, g, e, tol, target, opts.max_iter)?;
    let lower = lower_sq.max(T::zero()).sqrt();
    let upper = upper_sq.max(lower_sq).max(T::zero()).sqrt();
    Ok(SeesawResult {
        beta: (lower + upper) / T::lit(2.0),
        lower,
        upper,
        rho_star,
        c_star,
        iterations: run.iterations,
        converged: upper - lower <= tol.seesaw_tol,
    })
}

/// Upper certificate: a contraction C minimizing the linear dual bound
/// u(C) = sup_ρ Tr[(S − N_C − N_C*)ρ]. Any optimal C agrees with the polar
/// factor of X(ρ★) on its clearly nonzero singular pairs, so only the block
/// on the complementary singular vectors is searched.
#[allow(clippy::too_many_arguments)]
fn certify<T: Real>(
    s: &ComplexMatrix<T>,
    vphi: &StinespringRep<T>,
    vpsi: &StinespringRep<T>,
    x_op: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
    target: T,
    max_iter: usize,
) -> Result<(ComplexMatrix<T>, T)> {
    let de = x_op.rows();
    let dec = svd(x_op)?;
    let top = dec.s.first().copied().unwrap_or(T::zero());
    let r = dec
        .s
        .iter()
        .take_while(|&&v| v > T::lit(1e-4) * top && v > T::zero())
        .count();
    let m = de - r;
    // C = Σ_{i<r} v_i u_i* + Σ_{k,l ≥ r} K_kl v_k u_l*.
    let build = |k: &[T]| {
        ComplexMatrix::from_fn(de, de, |i, j| {
            let mut z = C::new(T::zero(), T::zero());
            for l in 0..r {
                z += dec.v[(i, l)] * dec.u[(j, l)].conj();
            }
            for a in 0..m {
                for b in 0..m {
                    let kab = C::new(k[2 * (a * m + b)], k[2 * (a * m + b) + 1]);
                    z += kab * dec.v[(i, r + a)] * dec.u[(j, r + b)].conj();
                }
            }
            z
        })
    };
    let value = |c: &ComplexMatrix<T>| contraction_bound(s, vphi, vpsi, c, g, e, tol);
    let c0 = build(&vec![T::zero(); 2 * m * m]);
    let mut best = (value(&c0)?, c0);
    if m == 0 {
        return Ok((best.1, best.0));
    }
    let kmat =
        |k: &[T]| ComplexMatrix::from_fn(m, m, |a, b| C::new(k[2 * (a * m + b)], k[2 * (a * m + b) + 1]));
    let mut first_err: Option<Error> = None;
    let oracle = |k: &[T]| -> Oracle<T> {
        let kd = match svd(&kmat(k)) {
            Ok(d) => d,
            Err(err) => {
                first_err.get_or_insert(err);
                return Oracle::Cut(k.to_vec());
            }
        };
        if kd.s[0] > T::one() {
            // Re p*Kq = ‖K‖ for the top singular pair; feasible K keep it ≤ 1.
            let mut a = vec![T::zero(); 2 * m * m];
            for i in 0..m {
                for j in 0..m {
                    let w = kd.u[(i, 0)].conj() * kd.v[(j, 0)];
                    a[2 * (i * m + j)] = w.re;
                    a[2 * (i * m + j) + 1] = -w.im;
                }
            }
            return Oracle::Cut(a);
        }
        let c = build(k);
        let n = contracted(vphi, vpsi, &c);
        let mm = &(s - &n) - &n.adjoint();
        let sol = match maximize_expectation(&mm, g, e, tol) {
            Ok(sol) => sol,
            Err(err) => {
                first_err.get_or_insert(err);
                return Oracle::Cut(k.to_vec());
            }
        };
        let w = &sol.witness;
        let x = match cross_operator(vphi, vpsi, &ComplexMatrix::outer(w, w)) {
            Ok(x) => x,
            Err(err) => {
                first_err.get_or_insert(err);
                return Oracle::Cut(k.to_vec());
            }
        };
        // u(C) ≥ Tr Sρ_w − 2 Re Tr(C X_w), linear in K with Tr(v_a u_b* X) = u_b* X v_a.
        let mut h = vec![T::zero(); 2 * m * m];
        for a in 0..m {
            for b in 0..m {
                let mut y = C::new(T::zero(), T::zero());
                for i in 0..de {
                    for j in 0..de {
                        y += dec.u[(i, r + b)].conj() * x[(i, j)] * dec.v[(j, r + a)];
                    }
                }
                // Supergradient of −u.
                h[2 * (a * m + b)] = T::lit(2.0) * y.re;
                h[2 * (a * m + b) + 1] = -T::lit(2.0) * y.im;
            }
        }
        Oracle::Value(-sol.dual_value, h)
    };
    let radius = T::count(m).sqrt() * T::lit(1.01);
    let run = ellipsoid::maximize(vec![T::zero(); 2 * m * m], radius, target, max_iter, oracle);
    if let Some(err) = first_err {
        return Err(err);
    }
    if let Some(k) = run.best_x {
        let c = build(&k);
        let v = value(&c)?;
        if v < best.0 {
            best = (v, c);
        }
    }
    Ok((best.1, best.0))
}

/// Lifts G to G ⊗ I_R.
fn lifted<T: Real>(g: &GeneratingOperator<T>, dim_r: usize) -> Result<GeneratingOperator<T>> {
    let eig: Vec<T> = g
        .eigenvalues()
        .iter()
        .flat_map(|&x| std::iter::repeat_n(x, dim_r))
        .collect();
    let basis = g.basis().map(|u| kron(u, &ComplexMatrix::identity(dim_r)));
    GeneratingOperator::new(eig, basis)
}

/// U = sign(Δ) for Hermitian Δ (zero eigenvalues mapped to +1).
fn sign_unitary<T: Real>(delta: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(&delta.hermitian_part())?;
    let signs: Vec<T> = eig
        .values
        .iter()
        .map(|&v| if v < T::zero() { -T::one() } else { T::one() })
        .collect();
    Ok(crate::matcore::assemble(&eig.vectors, &signs))
}

/// Lower bound on ‖Φ−Ψ‖_{cb,E} by alternating between the input state on
/// H_A ⊗ H_R (dim_R = dim_A, linear step through the dual) and the sign
/// unitary of the output difference.
pub fn ec_cb_norm<T: Real>(
    phi: &CPMap<T>,
    psi: &CPMap<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
    opts: &CbOptions,
) -> Result<CbNormEstimate<T>> {
    check_pair(phi, psi, g, e)?;
    let d = phi.dim_in();
    let big_g = lifted(g, d)?;
    let diff = |v: &[C<T>]| {
        let rho = ComplexMatrix::outer(v, v);
        &phi.apply_extended(&rho, d) - &psi.apply_extended(&rho, d)
    };
    // Energy-feasible maximally mixed-ish start: ground state blended with I/d.
    let mean = g.eigenvalues().iter().fold(T::zero(), |a, &b| a + b) / T::count(d);
    let s = if mean > e { e / mean } else { T::one() };
    let g0 = g.ground_vector();
    let start_rho = &ComplexMatrix::outer(&g0, &g0).scale_real(T::one() - s)
        + &ComplexMatrix::identity(d).scale_real(s / T::count(d));
    let start = purify(&start_rho, tol.psd_tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = (T::neg_infinity(), start.clone());
    for r in 0..opts.restarts.max(1) {
        let mut u = if r == 0 {
            sign_unitary(&diff(&start))?
        } else {
            sign_unitary(&random_hermitian::<T, _>(phi.dim_out() * d, &mut rng))?
        };
        let mut prev = T::neg_infinity();
        for _ in 0..opts.max_iter.max(1) {
            let m = &phi.adjoint_extended(&u, d) - &psi.adjoint_extended(&u, d);
            let sol = maximize_expectation(&m.hermitian_part(), &big_g, e, tol)?;
            let v = sol.witness;
            let delta = diff(&v);
            let val = trace_norm(&delta)?;
            if val > best.0 {
                best = (val, v.clone());
            }
            u = sign_unitary(&delta)?;
            if val - prev <= T::lit(1e-13) * val.max(T::one()) {
                break;
            }
            prev = val;
        }
    }
    let sandwich_upper = if phi.trace_behavior() == TraceBehavior::Preserving
        && psi.trace_behavior() == TraceBehavior::Preserving
    {
        let b = ec_bures(phi, psi, g, e, tol, &BuresOptions::default())?;
        Some(T::lit(2.0) * b.upper)
    } else {
        None
    };
    Ok(CbNormEstimate {
        value: best.0.max(T::zero()),
        witness: best.1,
        sandwich_upper,
    })
}

/// ‖Φ‖_{cb,E} = sup Tr Φ(ρ) over energy-feasible ρ (exact: a linear objective).
pub fn cb_norm_single<T: Real>(
    phi: &CPMap<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<T> {
    let unit = phi.adjoint_apply(&ComplexMatrix::identity(phi.dim_out()));
    Ok(maximize_expectation(&unit, g, e, tol)?.dual_value)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct IsometricBound<T> {
    /// ‖(I⊗U)V_Ψ − V_Φ‖_E.
    pub distance: T,
    /// ‖Ṽ_Φ − Ṽ_Ψ,C★‖_E for the doubled-environment pair.
    pub common_distance: T,
    pub u: ComplexMatrix<T>,
    pub report: Report,
}

/// Stinespring distances realised by C★: the doubled pair attains β, and the
/// unitary factor U of C★ (perturbed to full rank) gives a dilation of Ψ
/// within 2β.
pub fn isometric_rep_bound<T: Real>(
    phi: &CPMap<T>,
    psi: &CPMap<T>,
    g: &GeneratingOperator<T>,
    e: T,
    seesaw: &SeesawResult<T>,
    tol: &Tolerances<T>,
) -> Result<IsometricBound<T>> {
    check_pair(phi, psi, g, e)?;
    let (vphi, vpsi) = common_stinespring(phi, psi)?;
    let de = vphi.dim_e;
    if seesaw.c_star.rows() != de {
        return Err(Error::DimMismatch(
            "contraction does not match the environment".into(),
        ));
    }
    let delta = T::lit(1e-8);
    let c = &seesaw.c_star.scale_real(T::one() - delta) + &ComplexMatrix::identity(de).scale_real(delta);
    let (u, _) = polar(&c)?;
    let rotated = &kron(&ComplexMatrix::identity(vpsi.dim_b), &u) * &vpsi.v;
    let distance = enorm(&(&rotated - &vphi.v), g, e, tol)?.value;
    let (tphi, tpsi) = common_rep(&vphi, &vpsi, &seesaw.c_star, tol.psd_tol)?;
    let common_distance = enorm(&(&tpsi.v - &tphi.v), g, e, tol)?.value;
    let t = tol.seesaw_tol;
    let report = vec![
        Check::eq(
            "doubled dilation distance = beta",
            common_distance,
            seesaw.beta,
            T::lit(2.0) * t + (seesaw.upper - seesaw.lower),
        ),
        Check::le("beta <= unitary dilation distance", seesaw.lower, distance, t),
        Check::le(
            "unitary dilation distance <= 2 beta",
            distance,
            T::lit(2.0) * seesaw.upper,
            t,
        ),
    ];
    Ok(IsometricBound {
        distance,
        common_distance,
        u,
        report,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct KswReport<T> {
    pub bures: SeesawResult<T>,
    pub cb: CbNormEstimate<T>,
    pub cb_phi: T,
    pub cb_psi: T,
    pub report: Report,
}

/// ‖Φ−Ψ‖_cb/(√‖Φ‖_cb + √‖Ψ‖_cb) ≤ β_E ≤ √‖Φ−Ψ‖_cb with every term computed separately.
/// The right inequality is tested against a cb lower bound, which is stronger
/// than required and can fail only if the cb search misses the maximum.
pub fn ksw_verify<T: Real>(
    phi: &CPMap<T>,
    psi: &CPMap<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
    bures_opts: &BuresOptions,
    cb_opts: &CbOptions,
) -> Result<KswReport<T>> {
    let bures = ec_bures(phi, psi, g, e, tol, bures_opts)?;
    let cb = ec_cb_norm(phi, psi, g, e, tol, cb_opts)?;
    let cb_phi = cb_norm_single(phi, g, e, tol)?;
    let cb_psi = cb_norm_single(psi, g, e, tol)?;
    let t = tol.seesaw_tol;
    let denom = cb_phi.max(T::zero()).sqrt() + cb_psi.max(T::zero()).sqrt();
    let left = if denom > T::zero() {
        cb.value / denom
    } else {
        T::zero()
    };
    let report = vec![
        Check::le("cb/(sqrt|Phi|cb + sqrt|Psi|cb) <= beta", left, bures.upper, t),
        Check::le(
            "beta <= sqrt(cb lower bound) (heuristic side)",
            bures.lower,
            cb.value.sqrt(),
            t,
        ),
        Check::le("bures bracket width", bures.upper - bures.lower, t, T::zero()),
    ];
    Ok(KswReport {
        bures,
        cb,
        cb_phi,
        cb_psi,
        report,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceRow<T> {
    pub index: usize,
    pub beta: T,
    /// ‖V_n − V_0‖_E with V_n = (I⊗U_n)V_{Φ_n}.
    pub distance: T,
    pub cb: T,
    pub within_bound: bool,
}

/// Dilation convergence along a family Φ_n → Φ_0.
pub fn sequence_demo<T: Real>(
    family: &[CPMap<T>],
    limit: &CPMap<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
    bures_opts: &BuresOptions,
    cb_opts: &CbOptions,
) -> Result<Vec<SequenceRow<T>>> {
    let rows = crate::parallel::map(&family.iter().enumerate().collect::<Vec<_>>(), |&(i, phi_n)| {
        let b = ec_bures(limit, phi_n, g, e, tol, bures_opts)?;
        let iso = isometric_rep_bound(limit, phi_n, g, e, &b, tol)?;
        let cb = ec_cb_norm(phi_n, limit, g, e, tol, cb_opts)?.value;
        let bound = T::lit(2.0) * cb.sqrt();
        Ok(SequenceRow {
            index: i + 1,
            beta: b.beta,
            distance: iso.distance,
            cb,
            within_bound: iso.distance <= bound + tol.seesaw_tol,
        })
    });
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traceless_basis_is_orthonormal() {
        for d in 2..5 {
            let b = traceless_basis::<f64>(d);
            assert_eq!(b.len(), d * d - 1);
            for (i, x) in b.iter().enumerate() {
                assert!(x.trace().norm() < 1e-15);
                for (j, y) in b.iter().enumerate() {
                    let ip = pairing(x, y);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-14);
                }
            }
        }
    }
}
