//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are reported honestly but do not
//! fail the run; the README explains why they cannot hold.

use std::process::ExitCode;
use std::time::Instant;

use enorm_kit::channels::{
    ec_bures, ec_cb_norm, fidelity, inner_contraction_value, isometric_rep_bound, kraus_to_stinespring,
    BuresOptions, CbOptions,
};
use enorm_kit::enorms::{
    continuity_bound_check, critical_a, enorm, enorm_sampled, log_points, pi_membership, profile, seminorm,
    sqrtg_bound, transform_check, RelativeBoundCert,
};
use enorm_kit::matcore::{lambda_max, purify};
use enorm_kit::random::{ginibre, random_density, random_generator};
use enorm_kit::transforms::{concave_hull, random_profile, round_trip};
use enorm_kit::verify::{run_suite, VerifyConfig};
use enorm_kit::{oscillator, CPMap, GeneratingOperator, Matrix, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_UNATTAINABLE: [usize; 1] = [11];

type Outcome = Result<(bool, String), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_closed_forms() -> Outcome {
    let sys = oscillator::build(128, 1.0).map_err(err)?;
    let sq = sys.sqrt_number();
    let mut worst = 0.0f64;
    for e in [0.25, 1.0, 4.0, 9.0, 25.0] {
        let a = enorm(&sys.a, &sys.number, e, &tol()).map_err(err)?.value;
        let ad = enorm(&sys.a_dag, &sys.number, e, &tol()).map_err(err)?.value;
        let s = enorm(&sq, &sys.number, e, &tol()).map_err(err)?.value;
        worst = worst
            .max((a - e.sqrt()).abs())
            .max((ad - (e + 1.0).sqrt()).abs())
            .max((s - e.sqrt()).abs());
    }
    Ok((worst <= 1e-8, format!("max |deviation| {worst:.2e} (tol 1e-8)")))
}

fn c2_qp_intervals() -> Outcome {
    let mut ok = true;
    let mut min_room = f64::INFINITY;
    for w in [0.5f64, 1.0, 2.0] {
        let sys = oscillator::build(128, w).map_err(err)?;
        for e in [1.0, 4.0, 10.0] {
            let q = enorm(&sys.q, &sys.number, e, &tol()).map_err(err)?.value;
            let p = enorm(&sys.p, &sys.number, e, &tol()).map_err(err)?.value;
            let (ql, qh) = (((2.0 * e + 0.5) / w).sqrt(), ((2.0 * e + 1.0) / w).sqrt());
            let (pl, ph) = (((2.0 * e + 0.5) * w).sqrt(), ((2.0 * e + 1.0) * w).sqrt());
            ok &= q > ql && q <= qh + 1e-10 && p > pl && p <= ph + 1e-10;
            min_room = min_room.min(q - ql).min(qh - q).min(p - pl).min(ph - p);
        }
    }
    Ok((
        ok,
        format!("9 (omega, E) cells, smallest distance to an interval end {min_room:.2e}"),
    ))
}

fn c3_sqrtn_bounds() -> Outcome {
    let grid = log_points(1.0, 50.0, 12).map_err(err)?;
    let mut worst = 0.0f64;
    for w in [0.5f64, 1.0, 2.0] {
        let sys = oscillator::build(256, w).map_err(err)?;
        for (op, want) in [
            (&sys.a, 1.0),
            (&sys.a_dag, 1.0),
            (&sys.q, (2.0 / w).sqrt()),
            (&sys.p, (2.0 * w).sqrt()),
        ] {
            let b = sqrtg_bound(op, &sys.number, &grid, &tol()).map_err(err)?;
            worst = worst.max((b.value / want - 1.0).abs());
        }
    }
    Ok((
        worst <= 0.02,
        format!("max relative deviation {:.3}% (tol 2%)", 100.0 * worst),
    ))
}

fn c4_two_level() -> Outcome {
    let g = GeneratingOperator::diagonal(vec![1.0, 0.0]).map_err(err)?;
    let a = Matrix::from_real_diag(&[2f64.sqrt(), 1.0]);
    let closed = |e: f64| {
        if e <= 1.0 {
            1.0
        } else {
            (2.0 * e / (e + 1.0)).sqrt()
        }
    };
    let mut worst = 0.0f64;
    for e in [0.25, 0.5, 1.0, 2.0, 4.0, 10.0] {
        worst = worst.max((seminorm(&a, &g, e).map_err(err)? - closed(e)).abs());
    }
    // Midpoint test of E ↦ ⦀A⦀²_E at E = 1.
    let sq = |e: f64| seminorm(&a, &g, e).map(|v| v * v).map_err(err);
    let chord = 0.5 * (sq(0.5)? + sq(1.5)?);
    let violates = sq(1.0)? < chord - 1e-12;
    // ‖·‖²_E profiles of the test set must all be concave.
    let grid = log_points(0.05, 20.0, 40).map_err(err)?;
    let sys = oscillator::build(64, 1.0).map_err(err)?;
    let mut ops: Vec<(Matrix, GeneratingOperator<f64>)> = vec![
        (a.clone(), g.clone()),
        (sys.a.clone(), sys.number.clone()),
        (sys.a_dag.clone(), sys.number.clone()),
        (sys.q.clone(), sys.number.clone()),
    ];
    let mut r = rng(4);
    for k in 0..10 {
        let n = 2 + k % 5;
        ops.push((ginibre(n, n, &mut r), random_generator(n, 2.0, true, &mut r)));
    }
    let mut bad = 0;
    for (op, gen) in &ops {
        let grid = if gen.dim() > 2 && gen.max_energy() > 30.0 {
            grid.clone()
        } else {
            log_points(0.05, gen.max_energy().max(1.0), 40).map_err(err)?
        };
        bad += profile(op, gen, &grid, &tol())
            .map_err(err)?
            .concavity_violations
            .len();
    }
    Ok((
        worst <= 1e-10 && violates && bad == 0,
        format!(
            "closed form max |dev| {worst:.1e}; seminorm² midpoint at E=1 {:.4} vs chord {chord:.4} (non-concave: {violates}); {} norm profiles, {bad} concavity violations",
            sq(1.0)?,
            ops.len()
        ),
    ))
}

/// h(λ) = λE + λ_max(A*A − λG) minimized by ternary search on a doubling bracket.
fn dual_by_ternary(a: &Matrix, g: &GeneratingOperator<f64>, e: f64) -> f64 {
    let aa = a.gram();
    let gm = g.to_matrix();
    let h = |l: f64| l * e + lambda_max(&(&aa - &gm.scale_real(l))).unwrap();
    let mut hi = 1.0;
    while h(2.0 * hi) < h(hi) {
        hi *= 2.0;
    }
    let (mut lo, mut hi) = (0.0, 2.0 * hi);
    for _ in 0..120 {
        let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if h(m1) <= h(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    h(0.5 * (lo + hi)).min(h(0.0))
}

fn c5_duality_gap() -> Outcome {
    let mut r = rng(5);
    let (mut max_gap, mut max_excess, mut max_oracle) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for i in 0..500u64 {
        let n = r.random_range(2..=16);
        let g = random_generator::<f64, _>(n, 2.0, true, &mut r);
        let a = ginibre(n, n, &mut r);
        let e = r.random_range((0.01f64).ln()..(2.0f64).ln()).exp();
        let res = enorm(&a, &g, e, &tol()).map_err(err)?;
        max_gap = max_gap.max(res.gap);
        let s = enorm_sampled(&a, &g, e, 200, i).map_err(err)?;
        max_excess = max_excess.max(s * s - res.dual_value);
        let o = dual_by_ternary(&a, &g, e);
        max_oracle = max_oracle.max((o - res.dual_value).abs() / o.max(1.0));
    }
    Ok((
        max_gap <= 1e-8 && max_excess <= 1e-10 && max_oracle <= 1e-8,
        format!(
            "500 instances: max gap {max_gap:.1e}, max sampled-minus-dual {max_excess:.1e}, max relative deviation from ternary-search dual {max_oracle:.1e}"
        ),
    ))
}

fn c6_membership() -> Outcome {
    let mut r = rng(6);
    let mut disagree = 0;
    for i in 0..200 {
        let n = r.random_range(2..=6);
        let g = random_generator::<f64, _>(n, 2.0, true, &mut r);
        let a_op = ginibre(n, n, &mut r);
        let b = r.random_range(0.2..2.0);
        let crit = critical_a(&a_op, &g, b).map_err(err)?;
        let a = if i % 2 == 0 {
            crit * r.random_range(0.0..0.7)
        } else {
            crit * (1.0 + r.random_range(0.01..0.5))
        };
        let psd = pi_membership(&a_op, &g, RelativeBoundCert { a, b }, &tol()).map_err(err)?;
        let grid = log_points(1e-4, 2.0 * g.max_energy().max(1.0), 40).map_err(err)?;
        let mut on_grid = true;
        for &e in &grid {
            let v = enorm(&a_op, &g, e, &tol()).map_err(err)?.value;
            on_grid &= v * v <= a * a + b * b * e;
        }
        disagree += usize::from(psd != on_grid);
    }
    Ok((
        disagree == 0,
        format!("200 instances, {disagree} disagreements between the PSD test and the 40-point grid test"),
    ))
}

fn c7_transforms() -> Outcome {
    let mut r = rng(7);
    let (mut semi, mut inv) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = r.random_range(2..=6);
        let g = random_generator::<f64, _>(n, 2.0, true, &mut r);
        let a = ginibre(n, n, &mut r);
        let e = r.random_range((0.05f64).ln()..(1.5f64).ln()).exp();
        let c = transform_check(&a, &g, e, &tol()).map_err(err)?;
        semi = semi.max((c.seminorm_direct - c.seminorm_via_sup).abs());
        inv = inv.max((c.enorm_direct - c.enorm_via_inf).abs());
    }
    let mut hull_dev = 0.0f64;
    for _ in 0..100 {
        let f = random_profile::<f64, _>(200, &mut r).map_err(err)?;
        let h = concave_hull(&f).map_err(err)?;
        for (k, &x) in f.grid().iter().enumerate() {
            hull_dev = hull_dev.max((round_trip(&f, x).map_err(err)? - h.values()[k]).abs());
        }
    }
    Ok((
        semi <= 1e-6 && inv <= 1e-6 && hull_dev <= 1e-6,
        format!("100 operators: seminorm via sup {semi:.1e}, norm via inf {inv:.1e}; 100 profiles on 200 points: G[F[f]] vs hull {hull_dev:.1e} (tol 1e-6)"),
    ))
}

fn c8_suites() -> Outcome {
    let cfg = VerifyConfig {
        seeds: 100,
        dims: None,
        seed: 8,
    };
    let basic = run_suite("basic", &cfg, &tol()).map_err(err)?;
    let tensor = run_suite("tensor", &cfg, &tol()).map_err(err)?;
    Ok((
        basic.passed() && tensor.passed(),
        format!(
            "basic {} checks / {} failures, tensor {} checks / {} failures",
            basic.checks, basic.failures, tensor.checks, tensor.failures
        ),
    ))
}

struct PairRun {
    sandwich_ok: bool,
    width: f64,
    attain: f64,
    factor2_ok: bool,
}

fn channel_pairs() -> Result<Vec<PairRun>, String> {
    let g = GeneratingOperator::diagonal(vec![0.0, 1.0]).map_err(err)?;
    let mut r = rng(9);
    let mut out = Vec::new();
    for _ in 0..50 {
        let k1 = r.random_range(1..=4);
        let k2 = r.random_range(1..=4);
        let phi = CPMap::<f64>::random_cptp(2, 2, k1, &mut r);
        let psi = CPMap::<f64>::random_cptp(2, 2, k2, &mut r);
        for e in [0.5, 2.0] {
            let b = ec_bures(&phi, &psi, &g, e, &tol(), &BuresOptions::default()).map_err(err)?;
            let cb = ec_cb_norm(&phi, &psi, &g, e, &tol(), &CbOptions::default())
                .map_err(err)?
                .value;
            let iso = isometric_rep_bound(&phi, &psi, &g, e, &b, &tol()).map_err(err)?;
            out.push(PairRun {
                sandwich_ok: cb / 2.0 <= b.upper + 1e-6 && b.lower <= cb.sqrt() + 1e-6,
                width: b.upper - b.lower,
                attain: (iso.common_distance - b.beta).abs(),
                factor2_ok: iso.distance >= b.beta - 1e-6 && iso.distance <= 2.0 * b.beta + 1e-6,
            });
        }
    }
    Ok(out)
}

fn c9_sandwich(runs: &[PairRun]) -> Outcome {
    let bad = runs.iter().filter(|p| !p.sandwich_ok).count();
    let width = runs.iter().map(|p| p.width).fold(0.0, f64::max);
    Ok((
        bad == 0 && width <= 1e-6,
        format!(
            "{} pair/budget cases, {bad} sandwich violations, max bracket width {width:.1e} (tol 1e-6)",
            runs.len()
        ),
    ))
}

fn c10_attainability(runs: &[PairRun]) -> Outcome {
    let att = runs.iter().map(|p| p.attain).fold(0.0, f64::max);
    let bad = runs.iter().filter(|p| !p.factor2_ok).count();
    Ok((
        att <= 2e-6 && bad == 0,
        format!(
            "max |doubled dilation distance - beta| {att:.1e} (tol 2e-6), {bad} cases outside [beta, 2 beta]"
        ),
    ))
}

fn c11_sequence() -> Outcome {
    let g = GeneratingOperator::diagonal(vec![0.0, 1.0]).map_err(err)?;
    let e = 0.5;
    let id = CPMap::<f64>::identity(2);
    let (mut betas, mut dists) = (Vec::new(), Vec::new());
    let mut bound_ok = true;
    let mut closed_dev = 0.0f64;
    for n in 1..=32 {
        let p = 1.0 / n as f64;
        let phi_n = CPMap::dephasing(p).map_err(err)?;
        let b = ec_bures(&id, &phi_n, &g, e, &tol(), &BuresOptions::default()).map_err(err)?;
        let iso = isometric_rep_bound(&id, &phi_n, &g, e, &b, &tol()).map_err(err)?;
        let cb = ec_cb_norm(&phi_n, &id, &g, e, &tol(), &CbOptions::default())
            .map_err(err)?
            .value;
        bound_ok &= iso.distance <= 2.0 * cb.sqrt() + 1e-9;
        // β² = 2 − 2√(1 − p) once the budget allows ⟨Z⟩ = 0.
        closed_dev = closed_dev.max((b.beta - (2.0 - 2.0 * (1.0 - p).sqrt()).sqrt()).abs());
        betas.push(b.beta);
        dists.push(iso.distance);
    }
    let mono = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let (b32, d32) = (betas[31], dists[31]);
    let small = b32 < 1e-2 && d32 < 1e-2;
    Ok((
        mono(&betas) && mono(&dists) && bound_ok && small,
        format!(
            "E={e}: monotone beta {}, monotone distance {}, 2 sqrt(cb) bound at every n {bound_ok}; at n=32 beta {b32:.4}, distance {d32:.4} (target < 1e-2; beta matches its closed form to {closed_dev:.1e})",
            mono(&betas),
            mono(&dists)
        ),
    ))
}

fn c12_uhlmann() -> Outcome {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = 2 + i % 2;
        let k1 = r.random_range(1..=3);
        let k2 = r.random_range(1..=3);
        let phi = CPMap::<f64>::random_cptp(d, d, k1, &mut r);
        let psi = CPMap::<f64>::random_cptp(d, d, k2, &mut r);
        let rho = random_density::<f64, _>(d, &mut r);
        let k = k1.max(k2);
        let vphi = kraus_to_stinespring(&phi.padded(k)).map_err(err)?;
        let vpsi = kraus_to_stinespring(&psi.padded(k)).map_err(err)?;
        let (value, _) = inner_contraction_value(&vphi, &vpsi, &rho).map_err(err)?;
        let w = purify(&rho, 1e-12).map_err(err)?;
        let omega = Matrix::outer(&w, &w);
        let f = fidelity(
            &phi.apply_extended(&omega, d),
            &psi.apply_extended(&omega, d),
            1e-9,
        )
        .map_err(err)?;
        worst = worst.max((value - f.sqrt()).abs());
    }
    Ok((
        worst <= 1e-8,
        format!("100 triples, max |value - sqrt F| {worst:.1e} (tol 1e-8)"),
    ))
}

fn c13_projector_decay() -> Outcome {
    let sys = oscillator::build(64, 1.0).map_err(err)?;
    let mut worst = 0.0f64;
    for e in [0.5, 2.0, 8.0] {
        for n in 1..=32usize {
            let p = sys.number.tail_projector(n);
            let v = enorm(&p, &sys.number, e, &tol()).map_err(err)?.value;
            worst = worst.max((v - (e / n as f64).sqrt().min(1.0)).abs());
        }
    }
    Ok((
        worst <= 1e-10,
        format!("96 (E, n) cells, max |deviation| {worst:.1e} (tol 1e-10)"),
    ))
}

fn feasible_state(g: &GeneratingOperator<f64>, e: f64, seed: u64, r: &mut ChaCha8Rng) -> Matrix {
    let vs = g.sample_feasible_states(e, 3, seed);
    let w: Vec<f64> = (0..vs.len()).map(|_| r.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut rho = Matrix::zeros(g.dim(), g.dim());
    for (v, wk) in vs.iter().zip(&w) {
        rho += &Matrix::outer(v, v).scale_real(wk / total);
    }
    rho
}

fn c14_continuity() -> Outcome {
    let sys = oscillator::build(48, 1.0).map_err(err)?;
    let e = 4.0;
    let at = oscillator::lowering(48, 0.5);
    let at_dag = at.adjoint();
    let pairs = [(&at, &at), (&at, &at_dag), (&at_dag, &at), (&at_dag, &at_dag)];
    let mut r = rng(14);
    let (mut violations, mut min_slack) = (0, f64::INFINITY);
    let mut states = Vec::new();
    for i in 0..200u64 {
        let rho = feasible_state(&sys.number, e, 2 * i, &mut r);
        let sigma = if i % 2 == 0 {
            feasible_state(&sys.number, e, 2 * i + 1, &mut r)
        } else {
            // Close pairs push the budget 4E/ε far up the spectrum.
            let s = 10f64.powf(-r.random_range(1.0..6.0));
            let other = feasible_state(&sys.number, e, 2 * i + 1, &mut r);
            &rho.scale_real(1.0 - s) + &other.scale_real(s)
        };
        states.push((rho, sigma));
    }
    for (a, b) in pairs {
        for (rho, sigma) in &states {
            let rep = continuity_bound_check(a, b, &sys.number, e, rho, sigma, &tol()).map_err(err)?;
            for c in &rep {
                violations += usize::from(!c.pass);
                min_slack = min_slack.min(c.slack);
            }
        }
    }
    Ok((
        violations == 0,
        format!(
            "4 operator pairs x 200 state pairs, {violations} violations, smallest slack {min_slack:.2e}"
        ),
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let t0 = Instant::now();
    let runs = channel_pairs();
    println!(
        "channel pairs for criteria 9 and 10 prepared [{:.1}s]",
        t0.elapsed().as_secs_f64()
    );
    let shared = |f: fn(&[PairRun]) -> Outcome| match &runs {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };
    let criteria: Vec<Criterion<'_>> = vec![
        ("oscillator closed forms", Box::new(c1_closed_forms)),
        ("q and p energy intervals", Box::new(c2_qp_intervals)),
        ("sqrt-N bound estimates", Box::new(c3_sqrtn_bounds)),
        ("two-level seminorm and concavity", Box::new(c4_two_level)),
        ("duality gap and sampling", Box::new(c5_duality_gap)),
        ("relative bound membership", Box::new(c6_membership)),
        ("norm transforms and concave hull", Box::new(c7_transforms)),
        ("inequality suites", Box::new(c8_suites)),
        (
            "cb-norm sandwich of the Bures distance",
            Box::new(move || shared(c9_sandwich)),
        ),
        (
            "attainability and factor-2 dilation bound",
            Box::new(move || shared(c10_attainability)),
        ),
        ("dephasing sequence", Box::new(c11_sequence)),
        ("Uhlmann cross-check", Box::new(c12_uhlmann)),
        ("projector decay", Box::new(c13_projector_decay)),
        ("continuity bound", Box::new(c14_continuity)),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        let t0 = Instant::now();
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let tag = if ok {
            "PASS"
        } else if known {
            "FAIL (known)"
        } else {
            "FAIL"
        };
        println!(
            "criterion {id:>2} [{tag}] {name}: {detail} [{:.1}s]",
            t0.elapsed().as_secs_f64()
        );
        passed += usize::from(ok);
        unexpected += usize::from(!ok && !known);
    }
    println!(
        "{passed}/{} criteria pass, {unexpected} unexpected failures, {:.1}s",
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
