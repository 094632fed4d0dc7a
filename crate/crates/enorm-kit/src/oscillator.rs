//! Truncated ladder operators on span{τ_0, …, τ_nmax} with N = a†a as the
//! generating operator.

use serde::{Deserialize, Serialize};

use crate::enorms::{enorm, log_points, seminorm, sqrtg_bound};
use crate::error::{Error, Result};
use crate::gspace::GeneratingOperator;
use crate::matcore::{basis_vector, vnorm, ComplexMatrix};
use crate::report::{Check, Report};
use crate::scalar::{re, Real, C};
use crate::tol::Tolerances;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct OscillatorSystem<T> {
    pub n_max: usize,
    pub omega: T,
    pub a: ComplexMatrix<T>,
    pub a_dag: ComplexMatrix<T>,
    pub number: GeneratingOperator<T>,
    pub q: ComplexMatrix<T>,
    pub p: ComplexMatrix<T>,
}

/// a_t|τ_n⟩ = n^{t/2}|τ_{n−1}⟩ on the truncation (t = 1 gives a).
pub fn lowering<T: Real>(n_max: usize, t: T) -> ComplexMatrix<T> {
    let d = n_max + 1;
    ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            re(T::count(j).powf(t / T::lit(2.0)))
        } else {
            re(T::zero())
        }
    })
}

pub fn build<T: Real>(n_max: usize, omega: T) -> Result<OscillatorSystem<T>> {
    if n_max < 2 {
        return Err(Error::BadParams(format!("n_max = {n_max} must be at least 2")));
    }
    if !(omega > T::zero()) || !omega.is_finite() {
        return Err(Error::BadParams("omega must be positive".into()));
    }
    let a = lowering(n_max, T::one());
    let a_dag = a.adjoint();
    let number = GeneratingOperator::diagonal((0..=n_max).map(T::count).collect())?;
    let two = T::lit(2.0);
    let q = (&a_dag + &a).scale_real((two * omega).sqrt().recip());
    let p = (&a_dag - &a).scale(C::new(T::zero(), (omega / two).sqrt()));
    Ok(OscillatorSystem {
        n_max,
        omega,
        a,
        a_dag,
        number,
        q,
        p,
    })
}

impl<T: Real> OscillatorSystem<T> {
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// √N.
    pub fn sqrt_number(&self) -> ComplexMatrix<T> {
        let d: Vec<T> = (0..self.dim()).map(|k| T::count(k).sqrt()).collect();
        ComplexMatrix::from_real_diag(&d)
    }

    /// Largest |([q, p] − iI)_{jk}| over indices below the top level.
    pub fn commutator_defect(&self) -> T {
        let c = &(&self.q * &self.p) - &(&self.p * &self.q);
        let mut worst = T::zero();
        for j in 0..self.n_max {
            for k in 0..self.n_max {
                let want = if j == k {
                    C::new(T::zero(), T::one())
                } else {
                    re(T::zero())
                };
                worst = worst.max((c[(j, k)] - want).norm());
            }
        }
        worst
    }

    /// ⦀a⦀²_E on the truncation: max_k kE/(E+k) = n_max·E/(E + n_max).
    pub fn seminorm_a_truncated(&self, e: T) -> T {
        let n = T::count(self.n_max);
        (n * e / (e + n)).sqrt()
    }

    /// ⦀a†⦀²_E on the truncation: max_{k<n_max} (k+1)E/(E+k).
    pub fn seminorm_adag_truncated(&self, e: T) -> T {
        (0..self.n_max)
            .map(|k| {
                let k = T::count(k);
                (k + T::one()) * e / (e + k)
            })
            .fold(T::zero(), T::max)
            .sqrt()
    }
}

fn too_large<T: Real>(operator: &str, e: T, limit: T) -> Error {
    Error::GridTooLarge {
        operator: operator.into(),
        energy: e.as_f64(),
        limit: limit.as_f64(),
    }
}

/// Closed-form values: ‖a‖ = ‖√N‖ = √E, ‖a†‖ = √(E+1), the q/p intervals, and
/// the seminorms of a and a†. Each computed seminorm is also listed next to
/// the other operator's limit in an informational row, since the two limits
/// are easily swapped.
pub fn closed_form_suite<T: Real>(
    sys: &OscillatorSystem<T>,
    e_grid: &[T],
    tol: &Tolerances<T>,
) -> Result<Report> {
    let n = T::count(sys.n_max);
    for &e in e_grid {
        if !(e > T::zero()) {
            return Err(Error::InvalidGrid("energies must be positive".into()));
        }
        if e > n - T::one() {
            return Err(too_large("a_dag", e, n - T::one()));
        }
        if e > n / T::lit(4.0) {
            return Err(too_large("q,p", e, n / T::lit(4.0)));
        }
    }
    let g = &sys.number;
    let sqrt_n = sys.sqrt_number();
    let w = sys.omega;
    let (half, two) = (T::lit(0.5), T::lit(2.0));
    let exact = T::lit(1e-8);
    let rows = crate::parallel::map(e_grid, |&e| -> Result<Report> {
        let mut r = Report::new();
        let tag = e.as_f64();
        r.push(Check::eq(
            format!("E={tag}: enorm(a) = sqrt(E)"),
            enorm(&sys.a, g, e, tol)?.value,
            e.sqrt(),
            exact,
        ));
        r.push(Check::eq(
            format!("E={tag}: enorm(a_dag) = sqrt(E+1)"),
            enorm(&sys.a_dag, g, e, tol)?.value,
            (e + T::one()).sqrt(),
            exact,
        ));
        r.push(Check::eq(
            format!("E={tag}: enorm(sqrt N) = sqrt(E)"),
            enorm(&sqrt_n, g, e, tol)?.value,
            e.sqrt(),
            exact,
        ));
        let nq = enorm(&sys.q, g, e, tol)?.value;
        let np = enorm(&sys.p, g, e, tol)?.value;
        let t = tol.gap_tol;
        r.push(Check::lt(
            format!("E={tag}: q lower end"),
            ((two * e + half) / w).sqrt(),
            nq,
            T::zero(),
        ));
        r.push(Check::le(
            format!("E={tag}: q upper end"),
            nq,
            ((two * e + T::one()) / w).sqrt(),
            t,
        ));
        r.push(Check::lt(
            format!("E={tag}: p lower end"),
            ((two * e + half) * w).sqrt(),
            np,
            T::zero(),
        ));
        r.push(Check::le(
            format!("E={tag}: p upper end"),
            np,
            ((two * e + T::one()) * w).sqrt(),
            t,
        ));
        let sa = seminorm(&sys.a, g, e)?;
        let sd = seminorm(&sys.a_dag, g, e)?;
        r.push(Check::eq(
            format!("E={tag}: seminorm(a) truncated closed form"),
            sa,
            sys.seminorm_a_truncated(e),
            exact,
        ));
        r.push(Check::eq(
            format!("E={tag}: seminorm(a_dag) truncated closed form"),
            sd,
            sys.seminorm_adag_truncated(e),
            exact,
        ));
        r.push(Check::flag(
            format!("E={tag}: seminorm(a) computed vs max(1, sqrt E), the a_dag limit (informational)"),
            sa.as_f64(),
            T::one().max(e.sqrt()).as_f64(),
            true,
        ));
        r.push(Check::flag(
            format!("E={tag}: seminorm(a_dag) computed vs sqrt E, the a limit (informational)"),
            sd.as_f64(),
            e.sqrt().as_f64(),
            true,
        ));
        Ok(r)
    });
    let mut out = Report::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SqrtNBounds<T> {
    pub a: T,
    pub a_dag: T,
    pub q: T,
    pub p: T,
    pub report: Report,
}

/// √N-bound estimates min_E ‖X‖_E/√E over a log grid on [1, E_max].
pub fn sqrtn_bound_suite<T: Real>(
    sys: &OscillatorSystem<T>,
    e_max: T,
    tol: &Tolerances<T>,
) -> Result<SqrtNBounds<T>> {
    let limit = T::count(sys.n_max) / T::lit(4.0);
    if e_max > limit {
        return Err(too_large("sqrt-N bound", e_max, limit));
    }
    if !(e_max > T::one()) {
        return Err(Error::InvalidGrid("E_max must exceed 1".into()));
    }
    let grid = log_points(T::one(), e_max, 12)?;
    let g = &sys.number;
    let w = sys.omega;
    let two = T::lit(2.0);
    let targets = [
        ("a", &sys.a, T::one()),
        ("a_dag", &sys.a_dag, T::one()),
        ("q", &sys.q, (two / w).sqrt()),
        ("p", &sys.p, (two * w).sqrt()),
    ];
    let mut report = Report::new();
    let mut vals = [T::zero(); 4];
    for (k, (name, op, want)) in targets.iter().enumerate() {
        let b = sqrtg_bound(op, g, &grid, tol)?;
        vals[k] = b.value;
        report.push(Check::eq(
            format!("b({name}) within 2%"),
            b.value,
            *want,
            T::lit(0.02) * *want,
        ));
        report.push(Check::flag(
            format!("b({name}): ratio sequence nonincreasing"),
            0.0,
            0.0,
            b.nonincreasing,
        ));
    }
    Ok(SqrtNBounds {
        a: vals[0],
        a_dag: vals[1],
        q: vals[2],
        p: vals[3],
        report,
    })
}

/// Bounds on a_t and a_t†, the non-vanishing normalized gap ‖a − a_t‖_E/√E,
/// and pointwise convergence on low levels.
pub fn a_t_family<T: Real>(
    sys: &OscillatorSystem<T>,
    t: T,
    e_grid: &[T],
    tol: &Tolerances<T>,
) -> Result<Report> {
    if !(t < T::one()) || t < T::zero() {
        return Err(Error::BadParams("t must lie in [0, 1)".into()));
    }
    let n = T::count(sys.n_max);
    if let Some(&e) = e_grid.iter().find(|&&e| e > n - T::one() || !(e > T::zero())) {
        return Err(too_large("a_t", e, n - T::one()));
    }
    let g = &sys.number;
    let at = lowering(sys.n_max, t);
    let at_dag = at.adjoint();
    let diff = &sys.a - &at;
    let half = t / T::lit(2.0);
    let mut r = Report::new();
    let mut first_ratio = None;
    for &e in e_grid {
        let tag = e.as_f64();
        let slack = tol.gap_tol * e.max(T::one());
        r.push(Check::le(
            format!("E={tag}: enorm(a_t) <= E^(t/2)"),
            enorm(&at, g, e, tol)?.value,
            e.powf(half),
            slack,
        ));
        r.push(Check::le(
            format!("E={tag}: enorm(a_t dag) <= (E+1)^(t/2)"),
            enorm(&at_dag, g, e, tol)?.value,
            (e + T::one()).powf(half),
            slack,
        ));
        let ratio = enorm(&diff, g, e, tol)?.value / e.sqrt();
        let base = *first_ratio.get_or_insert(ratio);
        r.push(Check::flag(
            format!("E={tag}: enorm(a - a_t)/sqrt(E) stays away from 0"),
            base.as_f64(),
            ratio.as_f64(),
            ratio >= base * (T::one() - T::lit(1e-9)) && ratio > T::zero(),
        ));
    }
    for k in [1usize, 5] {
        let v = vnorm(&diff.mul_vec(&basis_vector(sys.dim(), k)));
        let want = T::count(k).sqrt() - T::count(k).powf(half);
        r.push(Check::eq(
            format!("|(a - a_t) tau_{k}|"),
            v,
            want.abs(),
            T::lit(1e-12),
        ));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_pass;

    #[test]
    fn small_truncation_matrices() {
        let s = build::<f64>(2, 1.0).unwrap();
        let r2 = 2f64.sqrt();
        assert!((s.a[(0, 1)].re - 1.0).abs() < 1e-15 && (s.a[(1, 2)].re - r2).abs() < 1e-15);
        assert_eq!(s.a[(1, 0)].re, 0.0);
        assert_eq!(s.number.eigenvalues(), &[0.0, 1.0, 2.0]);
        assert!(build::<f64>(1, 1.0).is_err());
        assert!(build::<f64>(4, 0.0).is_err());
    }

    #[test]
    fn number_is_a_dag_a() {
        let s = build::<f64>(10, 1.3).unwrap();
        let n = &s.a_dag * &s.a;
        let want = s.number.to_matrix();
        assert!((&n - &want).max_abs() < 1e-13);
        assert!(s.commutator_defect() < 1e-12);
    }

    #[test]
    fn closed_forms_hold() {
        let s = build::<f64>(64, 1.0).unwrap();
        let r = closed_form_suite(&s, &[0.25, 1.0, 4.0], &Tolerances::default()).unwrap();
        assert!(all_pass(&r), "{r:#?}");
        assert!(matches!(
            closed_form_suite(&s, &[40.0], &Tolerances::default()),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn a_t_bounds() {
        let s = build::<f64>(64, 1.0).unwrap();
        let r = a_t_family(&s, 0.5, &[1.0, 4.0, 16.0], &Tolerances::default()).unwrap();
        assert!(all_pass(&r), "{r:#?}");
        let a0 = lowering::<f64>(8, 0.0);
        let g = build::<f64>(8, 1.0).unwrap().number;
        assert!(enorm(&a0, &g, 3.0, &Tolerances::default()).unwrap().value <= 1.0 + 1e-12);
    }

    #[test]
    fn truncation_exactness_at_threshold() {
        let s = build::<f64>(16, 1.0).unwrap();
        let t = Tolerances::default();
        let a = enorm(&s.a, &s.number, 16.0, &t).unwrap().value;
        let ad = enorm(&s.a_dag, &s.number, 15.0, &t).unwrap().value;
        assert!((a - 4.0).abs() < 1e-10 && (ad - 4.0).abs() < 1e-10, "{a} {ad}");
    }

    #[test]
    fn seminorms_match_transforms() {
        let s = build::<f64>(64, 1.0).unwrap();
        let t = Tolerances::default();
        for e in [0.5, 3.0, 10.0] {
            for op in [&s.a, &s.a_dag] {
                let c = crate::enorms::transform_check(op, &s.number, e, &t).unwrap();
                assert!((c.seminorm_direct - c.seminorm_via_sup).abs() < 1e-8);
            }
            assert!((seminorm(&s.a, &s.number, e).unwrap() - s.seminorm_a_truncated(e)).abs() < 1e-10);
        }
    }
}
