//! Seeded randomized runs of the module suites, shared by the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{isometric_rep_bound, ksw_verify, BuresOptions, CPMap, CbOptions};
use crate::enorms::{inequality_suite_basic, inequality_suite_tensor, projector_decay, transform_check};
use crate::error::{Error, Result};
use crate::gspace::GeneratingOperator;
use crate::oscillator;
use crate::random::{ginibre, random_generator};
use crate::report::{Check, Report};
use crate::tol::Tolerances;
use crate::transforms::{concave_hull, random_profile, round_trip};

pub const SUITES: [&str; 6] = ["basic", "tensor", "transforms", "channels", "oscillator", "all"];

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seeds: usize,
    /// Fixed dimension for the random instances; suite default when absent.
    pub dims: Option<usize>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seeds: 20,
            dims: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub checks: usize,
    pub failures: usize,
    pub report: Report,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn label(report: Report, tag: &str) -> Report {
    report
        .into_iter()
        .map(|mut c| {
            c.check = format!("[{tag}] {}", c.check);
            c
        })
        .collect()
}

fn seeded<F>(cfg: &VerifyConfig, name: &str, f: F) -> Result<Report>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Report> + Sync,
{
    let ids: Vec<usize> = (0..cfg.seeds).collect();
    let parts = crate::parallel::map(&ids, |&i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        f(&mut rng).map(|r| label(r, &format!("{name} seed={i}")))
    });
    let mut out = Report::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn basic(cfg: &VerifyConfig, tol: &Tolerances<f64>) -> Result<Report> {
    seeded(cfg, "basic", |rng| {
        let n = cfg.dims.unwrap_or_else(|| rng.random_range(2..=6));
        let g = random_generator::<f64, _>(n, 2.0, true, rng);
        let a = ginibre(n, n, rng);
        let b = ginibre(n, n, rng);
        let e = log_uniform(rng, 0.05, 1.5);
        inequality_suite_basic(&a, &b, &g, e, tol)
    })
}

fn tensor(cfg: &VerifyConfig, tol: &Tolerances<f64>) -> Result<Report> {
    seeded(cfg, "tensor", |rng| {
        let n1 = cfg.dims.unwrap_or_else(|| rng.random_range(2..=3));
        let n2 = cfg.dims.unwrap_or_else(|| rng.random_range(2..=3));
        let g1 = random_generator::<f64, _>(n1, 1.5, true, rng);
        let g2 = random_generator::<f64, _>(n2, 1.5, true, rng);
        let a = ginibre(n1, n1, rng);
        let b = ginibre(n2, n2, rng);
        let e = log_uniform(rng, 0.05, 1.0);
        inequality_suite_tensor(&a, &g1, &b, &g2, e, tol)
    })
}

fn transforms(cfg: &VerifyConfig, tol: &Tolerances<f64>) -> Result<Report> {
    seeded(cfg, "transforms", |rng| {
        let n = cfg.dims.unwrap_or_else(|| rng.random_range(2..=6));
        let g = random_generator::<f64, _>(n, 2.0, true, rng);
        let a = ginibre(n, n, rng);
        let e = log_uniform(rng, 0.05, 1.5);
        let mut r = transform_check(&a, &g, e, tol)?.report;
        let f = random_profile::<f64, _>(200, rng)?;
        let hull = concave_hull(&f)?;
        let worst = f
            .grid()
            .iter()
            .zip(hull.values())
            .map(|(&x, &h)| round_trip(&f, x).map(|v| (v - h).abs()))
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;
        r.push(Check::le(
            "round trip equals concave hull",
            worst,
            tol.transform_tol,
            0.0,
        ));
        Ok(r)
    })
}

fn channels(cfg: &VerifyConfig, tol: &Tolerances<f64>) -> Result<Report> {
    seeded(cfg, "channels", |rng| {
        let d = cfg.dims.unwrap_or(2);
        let g = if d == 2 {
            GeneratingOperator::diagonal(vec![0.0, 1.0])?
        } else {
            random_generator::<f64, _>(d, 2.0, false, rng)
        };
        let k1 = rng.random_range(1..=d + 2);
        let k2 = rng.random_range(1..=d + 2);
        let phi = CPMap::random_cptp(d, d, k1, rng);
        let psi = CPMap::random_cptp(d, d, k2, rng);
        let e = if rng.random_bool(0.5) { 0.5 } else { 2.0 };
        let ksw = ksw_verify(
            &phi,
            &psi,
            &g,
            e,
            tol,
            &BuresOptions::default(),
            &CbOptions::default(),
        )?;
        let iso = isometric_rep_bound(&phi, &psi, &g, e, &ksw.bures, tol)?;
        let mut r = ksw.report;
        r.extend(iso.report);
        Ok(r)
    })
}

fn oscillator_suite(tol: &Tolerances<f64>) -> Result<Report> {
    let mut out = Report::new();
    let sys = oscillator::build(128, 1.0)?;
    out.extend(label(
        oscillator::closed_form_suite(&sys, &[0.25, 1.0, 4.0, 9.0, 25.0], tol)?,
        "oscillator n=128 w=1",
    ));
    for w in [0.5, 2.0] {
        let sys = oscillator::build(128, w)?;
        out.extend(label(
            oscillator::closed_form_suite(&sys, &[1.0, 4.0, 10.0], tol)?,
            &format!("oscillator n=128 w={w}"),
        ));
    }
    for w in [0.5, 1.0, 2.0] {
        let sys = oscillator::build(256, w)?;
        let b = oscillator::sqrtn_bound_suite(&sys, 50.0, tol)?;
        out.extend(label(b.report, &format!("sqrt-N bounds n=256 w={w}")));
    }
    let sys = oscillator::build(64, 1.0)?;
    out.extend(label(
        oscillator::a_t_family(&sys, 0.5, &[1.0, 4.0, 16.0], tol)?,
        "a_t family t=0.5",
    ));
    for e in [0.5, 2.0, 8.0] {
        for row in projector_decay(&sys.number, e, &(1..=32).collect::<Vec<_>>(), tol)? {
            out.push(Check::eq(
                format!("[projector decay] E={e} n={}", row.n),
                row.computed,
                row.closed_form,
                1e-10,
            ));
        }
    }
    Ok(out)
}

/// Runs one named suite; `all` concatenates every suite in canonical order.
pub fn run_suite(name: &str, cfg: &VerifyConfig, tol: &Tolerances<f64>) -> Result<SuiteSummary> {
    if cfg.seeds == 0 {
        return Err(Error::BadParams("seeds must be positive".into()));
    }
    if matches!(cfg.dims, Some(d) if d < 2) {
        return Err(Error::BadParams("dims must be at least 2".into()));
    }
    let report = match name {
        "basic" => basic(cfg, tol)?,
        "tensor" => tensor(cfg, tol)?,
        "transforms" => transforms(cfg, tol)?,
        "channels" => channels(cfg, tol)?,
        "oscillator" => oscillator_suite(tol)?,
        "all" => {
            let mut r = Report::new();
            for s in &SUITES[..5] {
                r.extend(run_suite(s, cfg, tol)?.report);
            }
            r
        }
        other => return Err(Error::UnknownSuite(other.into())),
    };
    let failures = report.iter().filter(|c| !c.pass).count();
    Ok(SuiteSummary {
        suite: name.into(),
        checks: report.len(),
        failures,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        let r = run_suite("nope", &VerifyConfig::default(), &Tolerances::default());
        assert!(matches!(r, Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn small_runs_pass_and_repeat() {
        let cfg = VerifyConfig {
            seeds: 3,
            dims: None,
            seed: 7,
        };
        let tol = Tolerances::default();
        for s in ["basic", "tensor", "transforms", "channels"] {
            let a = run_suite(s, &cfg, &tol).unwrap();
            assert!(
                a.passed(),
                "{s}: {:?}",
                a.report.iter().filter(|c| !c.pass).collect::<Vec<_>>()
            );
            let b = run_suite(s, &cfg, &tol).unwrap();
            assert_eq!(a.report, b.report);
        }
    }
}
