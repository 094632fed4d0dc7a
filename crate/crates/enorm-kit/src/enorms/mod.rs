//! Operator E-norms ‖A‖_E^G, the seminorm ⦀A⦀_E^G, relative-boundedness
//! characteristics and the inequality suites built on them.

mod dual;
mod suites;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gspace::GeneratingOperator;
use crate::matcore::{lambda_max, lambda_min, trace_norm, vnorm, ComplexMatrix};
use crate::report::{Check, Report};
use crate::scalar::{re, Real, C};
use crate::tol::Tolerances;
use crate::transforms::log_scan_optimize;

pub use dual::LinearDual;
pub use suites::{inequality_suite_basic, inequality_suite_tensor};

/// ‖A‖_E^G with its dual certificate and primal witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ENormResult<T> {
    /// √dual_value.
    pub value: T,
    pub dual_lambda: T,
    /// λ*E + λ_max(A*A − λ*G).
    pub dual_value: T,
    /// Feasible unit vector (standard basis).
    pub witness: Vec<C<T>>,
    /// ‖Aφ₀‖².
    pub primal: T,
    /// dual_value − ‖Aφ₀‖².
    pub gap: T,
    pub converged: bool,
}

/// (a, b) with ‖Aφ‖² ≤ a²‖φ‖² + b²⟨φ|G|φ⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeBoundCert<T> {
    pub a: T,
    pub b: T,
}

fn check_columns<T: Real>(a: &ComplexMatrix<T>, g: &GeneratingOperator<T>) -> Result<()> {
    if a.cols() != g.dim() {
        return Err(Error::DimMismatch(format!(
            "operator has {} columns, G has dimension {}",
            a.cols(),
            g.dim()
        )));
    }
    Ok(())
}

/// sup ⟨φ|M|φ⟩ over unit φ with ⟨φ|G|φ⟩ ≤ E for Hermitian M; the witness is
/// returned in the standard basis.
pub fn maximize_expectation<T: Real>(
    m: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<LinearDual<T>> {
    if m.rows() != g.dim() || m.cols() != g.dim() {
        return Err(Error::DimMismatch(format!(
            "objective {}x{} against G of dimension {}",
            m.rows(),
            m.cols(),
            g.dim()
        )));
    }
    let me = g.to_eigen_operator(m);
    let mut out = dual::solve_linear(&me, g.eigenvalues(), e, tol)?;
    out.witness = g.from_eigen_vector(&out.witness);
    Ok(out)
}

/// Operator E-norm via the Lagrangian dual min_λ λE + λ_max(A*A − λG).
pub fn enorm<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<ENormResult<T>> {
    check_columns(a, g)?;
    let ae = g.to_eigen_columns(a);
    let m = ae.gram();
    let sol = dual::solve_linear(&m, g.eigenvalues(), e, tol)?;
    let primal = vnorm(&ae.mul_vec(&sol.witness)).powi(2);
    let dual_value = sol.dual_value.max(primal);
    let gap = dual_value - primal;
    Ok(ENormResult {
        value: dual_value.max(T::zero()).sqrt(),
        dual_lambda: sol.lambda,
        dual_value,
        witness: g.from_eigen_vector(&sol.witness),
        primal,
        gap,
        converged: gap <= tol.gap_tol * dual_value.max(T::one()),
    })
}

/// ‖A‖ (largest singular value).
pub fn operator_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(lambda_max(&a.gram())?.max(T::zero()).sqrt())
}

/// lim_{E→0+} ‖A‖_E: the norm of A restricted to the ground eigenspace.
pub fn ground_limit<T: Real>(a: &ComplexMatrix<T>, g: &GeneratingOperator<T>) -> Result<T> {
    check_columns(a, g)?;
    let e0 = g.ground_energy();
    let k = g.eigenvalues().iter().take_while(|&&x| x == e0).count();
    let cols: Vec<Vec<C<T>>> = (0..k).map(|j| a.mul_vec(&g.eigenvector(j))).collect();
    let restricted = ComplexMatrix::from_columns(&cols);
    operator_norm(&restricted)
}

/// ‖A‖_E extended to E = 0 (ground limit) and E = ∞ (operator norm).
pub fn enorm_value<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<T> {
    if e == T::zero() {
        ground_limit(a, g)
    } else if e.is_infinite() || e >= g.max_energy() {
        check_columns(a, g)?;
        operator_norm(a)
    } else {
        Ok(enorm(a, g, e, tol)?.value)
    }
}

/// The dual function h(λ) = λE + λ_max(A*A − λG).
pub fn dual_function<T: Real>(a: &ComplexMatrix<T>, g: &GeneratingOperator<T>, e: T, lambda: T) -> Result<T> {
    check_columns(a, g)?;
    let ae = g.to_eigen_columns(a);
    let mut m = ae.gram();
    for (i, &gi) in g.eigenvalues().iter().enumerate() {
        m[(i, i)] -= re(lambda * gi);
    }
    Ok(lambda * e + lambda_max(&m)?)
}

/// Feasible witness from the top eigenspace of A*A − λG.
pub fn recover_witness<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    lambda: T,
    tol: &Tolerances<T>,
) -> Result<Vec<C<T>>> {
    check_columns(a, g)?;
    if !(e > T::zero()) {
        return Err(Error::Infeasible(format!("budget {}", e.as_f64())));
    }
    let ae = g.to_eigen_columns(a);
    let m = ae.gram();
    let window = tol.tol_eig * m.max_abs().max(T::one());
    let w = dual::recover_in_eigenbasis(&m, g.eigenvalues(), e, lambda, window)?;
    Ok(g.from_eigen_vector(&w))
}

/// Brute-force lower bound: max ‖Aφ‖ over `n` sampled feasible states.
pub fn enorm_sampled<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    n: usize,
    seed: u64,
) -> Result<T> {
    check_columns(a, g)?;
    Ok(g.sample_feasible_states(e, n, seed)
        .iter()
        .map(|phi| vnorm(&a.mul_vec(phi)))
        .fold(T::zero(), T::max))
}

/// ⦀A⦀_E = σ_max(A(I + G/E)^{-1/2}).
pub fn seminorm<T: Real>(a: &ComplexMatrix<T>, g: &GeneratingOperator<T>, e: T) -> Result<T> {
    check_columns(a, g)?;
    if !(e > T::zero()) {
        return Err(Error::Infeasible(format!("budget {}", e.as_f64())));
    }
    let ae = g.to_eigen_columns(a);
    let d: Vec<T> = g
        .eigenvalues()
        .iter()
        .map(|&x| (T::one() + x / e).sqrt().recip())
        .collect();
    let scaled = ComplexMatrix::from_fn(ae.rows(), ae.cols(), |i, j| ae[(i, j)] * d[j]);
    operator_norm(&scaled)
}

/// `per_decade` log-spaced points from `lo` to `hi` (both included).
pub fn log_grid<T: Real>(lo: T, hi: T, per_decade: usize) -> Result<Vec<T>> {
    if !(lo > T::zero()) || !(hi >= lo) || !hi.is_finite() || per_decade == 0 {
        return Err(Error::InvalidGrid(format!(
            "need 0 < lo <= hi, got [{}, {}]",
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    let step = T::one() / T::count(per_decade);
    let ten = T::lit(10.0);
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let x = lo * ten.powf(T::count(k) * step);
        if x > hi * (T::one() + T::lit(1e-12)) {
            break;
        }
        out.push(x);
        k += 1;
    }
    let last = *out.last().expect("lo is always included");
    if (hi - last).abs() > T::lit(1e-12) * hi {
        out.push(hi);
    } else {
        *out.last_mut().unwrap() = hi;
    }
    Ok(out)
}

/// `points` log-spaced values from `lo` to `hi`.
pub fn log_points<T: Real>(lo: T, hi: T, points: usize) -> Result<Vec<T>> {
    if !(lo > T::zero()) || !(hi >= lo) || points == 0 {
        return Err(Error::InvalidGrid(format!(
            "need 0 < lo <= hi and points > 0, got [{}, {}] x {points}",
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    let denom = T::count(points - 1);
    Ok((0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                (l0 + (l1 - l0) * T::count(k) / denom).exp()
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileRow<T> {
    pub e: T,
    pub enorm: T,
    pub seminorm: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Profile<T> {
    pub rows: Vec<ProfileRow<T>>,
    /// Interior grid indices where E ↦ ‖A‖²_E falls below its neighbour chord.
    pub concavity_violations: Vec<usize>,
}

/// Three-point concavity test on a nonuniform grid; returns violating indices.
pub fn concavity_violations<T: Real>(x: &[T], f: &[T], tol: T) -> Vec<usize> {
    (1..x.len().saturating_sub(1))
        .filter(|&i| {
            let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
            let chord = (f[i - 1] * (x2 - x1) + f[i + 1] * (x1 - x0)) / (x2 - x0);
            f[i] < chord - tol * f[i].abs().max(T::one())
        })
        .collect()
}

/// Both norms on an ascending grid, with a concavity post-check of ‖A‖²_E.
pub fn profile<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    grid: &[T],
    tol: &Tolerances<T>,
) -> Result<Profile<T>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|&x| !(x > T::zero())) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(
            "grid must be positive and strictly ascending".into(),
        ));
    }
    let rows = crate::parallel::map(grid, |&e| {
        Ok(ProfileRow {
            e,
            enorm: enorm(a, g, e, tol)?.value,
            seminorm: seminorm(a, g, e)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let sq: Vec<T> = rows.iter().map(|r| r.enorm * r.enorm).collect();
    let concavity_violations = concavity_violations(grid, &sq, tol.gap_tol);
    Ok(Profile {
        rows,
        concavity_violations,
    })
}

/// (a, b) ∈ Π_√G(A) iff a²I + b²G − A*A ⪰ 0.
pub fn pi_membership<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    cert: RelativeBoundCert<T>,
    tol: &Tolerances<T>,
) -> Result<bool> {
    check_columns(a, g)?;
    if cert.a < T::zero() || cert.b < T::zero() {
        return Err(Error::BadParams(
            "relative bound coefficients must be nonnegative".into(),
        ));
    }
    let ae = g.to_eigen_columns(a);
    let ata = ae.gram();
    let mut m = -&ata;
    for (i, &gi) in g.eigenvalues().iter().enumerate() {
        m[(i, i)] += re(cert.a * cert.a + cert.b * cert.b * gi);
    }
    let scale = ata.max_abs().max(T::one());
    Ok(lambda_min(&m)? >= -tol.psd_tol * scale)
}

/// Smallest a with (a, b) ∈ Π_√G(A): a² = max(0, λ_max(A*A − b²G)).
pub fn critical_a<T: Real>(a: &ComplexMatrix<T>, g: &GeneratingOperator<T>, b: T) -> Result<T> {
    check_columns(a, g)?;
    let ae = g.to_eigen_columns(a);
    let mut m = ae.gram();
    for (i, &gi) in g.eigenvalues().iter().enumerate() {
        m[(i, i)] -= re(b * b * gi);
    }
    Ok(lambda_max(&m)?.max(T::zero()).sqrt())
}

/// Estimate of b_√G(A) as min over the list of ‖A‖_E/√E.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SqrtGBound<T> {
    pub value: T,
    pub ratios: Vec<(T, T)>,
    /// Whether the ratio sequence is nonincreasing within tolerance.
    pub nonincreasing: bool,
}

pub fn sqrtg_bound<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e_list: &[T],
    tol: &Tolerances<T>,
) -> Result<SqrtGBound<T>> {
    if e_list.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if e_list.iter().any(|&x| !(x > T::zero())) || e_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(
            "energy list must be positive and ascending".into(),
        ));
    }
    let ratios = crate::parallel::map(e_list, |&e| Ok((e, enorm(a, g, e, tol)?.value / e.sqrt())))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let nonincreasing = ratios
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + tol.gap_tol * w[0].1.max(T::one()));
    let value = ratios.iter().map(|r| r.1).fold(T::infinity(), T::min);
    Ok(SqrtGBound {
        value,
        ratios,
        nonincreasing,
    })
}

/// Both directions of the t-transform linking ‖·‖_E and ⦀·⦀_E.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransformCheck<T> {
    pub seminorm_direct: T,
    /// √sup_t ‖A‖²_{tE}/(1+t).
    pub seminorm_via_sup: T,
    pub enorm_direct: T,
    /// √inf_t ⦀A⦀²_{tE}(1+1/t).
    pub enorm_via_inf: T,
    pub report: Report,
}

pub fn transform_check<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<TransformCheck<T>> {
    check_columns(a, g)?;
    let (tlo, thi) = (T::lit(1e-4), T::lit(1e4));
    let sup = |t: T| -> Result<T> {
        let v = enorm(a, g, t * e, tol)?.dual_value;
        Ok(v / (T::one() + t))
    };
    let (_, best_sup) = log_scan_optimize(sup, tlo, thi, 5, true, 40)?;
    let g0 = ground_limit(a, g)?;
    let best_sup = best_sup.max(g0 * g0);
    let inf = |t: T| -> Result<T> {
        let s = seminorm(a, g, t * e)?;
        Ok(s * s * (T::one() + t.recip()))
    };
    let (_, best_inf) = log_scan_optimize(inf, tlo, thi, 5, false, 40)?;
    let op = operator_norm(a)?;
    let best_inf = best_inf.min(op * op);

    let seminorm_direct = seminorm(a, g, e)?;
    let enorm_direct = enorm(a, g, e, tol)?.value;
    let seminorm_via_sup = best_sup.max(T::zero()).sqrt();
    let enorm_via_inf = best_inf.max(T::zero()).sqrt();
    let report = vec![
        Check::eq(
            "seminorm = sup_t enorm(tE)/sqrt(1+t)",
            seminorm_direct,
            seminorm_via_sup,
            tol.transform_tol,
        ),
        Check::eq(
            "enorm = inf_t seminorm(tE)*sqrt(1+1/t)",
            enorm_direct,
            enorm_via_inf,
            tol.transform_tol,
        ),
    ];
    Ok(TransformCheck {
        seminorm_direct,
        seminorm_via_sup,
        enorm_direct,
        enorm_via_inf,
        report,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayRow<T> {
    pub n: usize,
    pub computed: T,
    /// min(1, √(E/E_n)).
    pub closed_form: T,
}

/// ‖P̄_n‖_E for the tail projectors P̄_n onto levels n, n+1, ….
pub fn projector_decay<T: Real>(
    g: &GeneratingOperator<T>,
    e: T,
    ns: &[usize],
    tol: &Tolerances<T>,
) -> Result<Vec<DecayRow<T>>> {
    ns.iter()
        .map(|&n| {
            if n >= g.dim() {
                return Err(Error::BadParams(format!(
                    "level {n} outside the {}-level truncation",
                    g.dim()
                )));
            }
            let p = g.tail_projector(n);
            let computed = enorm(&p, g, e, tol)?.value;
            let en = g.eigenvalues()[n];
            let closed_form = if en <= e { T::one() } else { (e / en).sqrt() };
            Ok(DecayRow {
                n,
                computed,
                closed_form,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncationBound<T> {
    /// √(E/n)·‖A‖_n.
    pub bound: T,
    /// ‖A − AP_n‖_E with P_n the projector onto levels below energy n.
    pub actual: T,
}

pub fn truncation_error_bound<T: Real>(
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    n: T,
    tol: &Tolerances<T>,
) -> Result<TruncationBound<T>> {
    check_columns(a, g)?;
    if !(n > e) {
        return Err(Error::BadParams("truncation level must exceed the budget".into()));
    }
    let tail = g.spectral_projector(n, T::infinity());
    let bound = (e / n).sqrt() * enorm_value(a, g, n, tol)?;
    let actual = enorm(&(a * &tail), g, e, tol)?.value;
    Ok(TruncationBound { bound, actual })
}

fn check_state<T: Real>(
    rho: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
    name: &str,
) -> Result<T> {
    let energy = g.mean_energy(rho, tol.psd_tol).map_err(|err| match err {
        Error::NotPsd { .. } => Error::InfeasibleState(format!("{name} is not PSD")),
        other => other,
    })?;
    let tr = rho.trace().re;
    if tr > T::one() + tol.psd_tol {
        return Err(Error::InfeasibleState(format!(
            "{name} has trace {}",
            tr.as_f64()
        )));
    }
    if energy > e + tol.psd_tol * e.max(T::one()) {
        return Err(Error::InfeasibleState(format!(
            "{name} has energy {} above {}",
            energy.as_f64(),
            e.as_f64()
        )));
    }
    Ok(energy)
}

/// ‖AρB* − AσB*‖₁ ≤ √ε(‖A‖_E‖B‖_{4E/ε} + ‖B‖_E‖A‖_{4E/ε}), ε = ‖ρ − σ‖₁.
pub fn continuity_bound_check<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    rho: &ComplexMatrix<T>,
    sigma: &ComplexMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<Report> {
    check_columns(a, g)?;
    check_columns(b, g)?;
    check_state(rho, g, e, tol, "rho")?;
    check_state(sigma, g, e, tol, "sigma")?;
    let eps = trace_norm(&(rho - sigma))?;
    let bstar = b.adjoint();
    let diff = &(&(a * rho) * &bstar) - &(&(a * sigma) * &bstar);
    let lhs = trace_norm(&diff)?;
    let rhs = if eps == T::zero() {
        T::zero()
    } else {
        let big = T::lit(4.0) * e / eps;
        let (ae, be) = (enorm_value(a, g, e, tol)?, enorm_value(b, g, e, tol)?);
        let (ab, bb) = (enorm_value(a, g, big, tol)?, enorm_value(b, g, big, tol)?);
        eps.sqrt() * (ae * bb + be * ab)
    };
    let slack_tol = tol.gap_tol * rhs.max(T::one());
    Ok(vec![Check::le(
        "continuity bound (trace-norm difference)",
        lhs,
        rhs,
        slack_tol,
    )])
}

/// Y_Φ(E) = sup{Tr GΦ(ρ) : Tr Gρ ≤ E}.
pub fn channel_energy_factor<T: Real>(
    phi: &crate::channels::CPMap<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<T> {
    if phi.dim_in() != g.dim() || phi.dim_out() != g.dim() {
        return Err(Error::DimMismatch("channel and G dimensions differ".into()));
    }
    let gm = g.to_matrix();
    let ghat = phi.adjoint_apply(&gm);
    Ok(maximize_expectation(&ghat, g, e, tol)?.dual_value)
}

/// ‖Φ†(A)‖_E ≤ √‖Φ†(I)‖·‖A‖_{Y(E)} ≤ √(‖Φ†(I)‖K)·‖A‖_E.
pub fn kadison_bound_check<T: Real>(
    phi: &crate::channels::CPMap<T>,
    a: &ComplexMatrix<T>,
    g: &GeneratingOperator<T>,
    e: T,
    tol: &Tolerances<T>,
) -> Result<Report> {
    check_columns(a, g)?;
    let unit = phi.adjoint_apply(&ComplexMatrix::identity(phi.dim_out()));
    let unit_norm = lambda_max(&unit)?;
    if unit_norm > T::one() + tol.psd_tol {
        return Err(Error::NotSubunital {
            lambda_max: unit_norm.as_f64(),
        });
    }
    let y = channel_energy_factor(phi, g, e, tol)?.max(T::zero());
    let k = T::one().max(y / e);
    let lhs = enorm(&phi.adjoint_apply(a), g, e, tol)?.value;
    let mid = unit_norm.sqrt() * enorm_value(a, g, y, tol)?;
    let rhs = (unit_norm * k).sqrt() * enorm(a, g, e, tol)?.value;
    let t = tol.gap_tol * rhs.max(T::one());
    Ok(vec![
        Check::le("adjoint map: enorm <= sqrt(|Phi(I)|) enorm at Y(E)", lhs, mid, t),
        Check::le("adjoint map: middle <= sqrt(|Phi(I)| K) enorm", mid, rhs, t),
    ])
}

#[cfg(test)]
mod tests;
