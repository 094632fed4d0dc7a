//! `enorm-kit` command-line front end.

mod inputs;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use enorm_kit::channels::{isometric_rep_bound, ksw_verify, BuresOptions, CbOptions};
use enorm_kit::enorms::{enorm, log_points, profile, seminorm};
use enorm_kit::transforms::{concave_hull, round_trip, transform_f, transform_g, SampledFunction};
use enorm_kit::verify::{run_suite, VerifyConfig};
use enorm_kit::{configure_threads, Error, Tolerances};
use serde::Serialize;
use serde_json::json;

use inputs::OscParams;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Input(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::NoConvergence(_) | Error::NoBracket { .. }) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Io(_) => "io".into(),
            CliError::Input(_) => "input".into(),
            CliError::Lib(e) => {
                let dbg = format!("{e:?}");
                dbg.split(['(', ' ', '{']).next().unwrap_or("error").to_string()
            }
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) | CliError::Input(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "enorm-kit",
    version,
    about = "Energy-constrained operator norms and channel distances"
)]
struct Cli {
    /// Worker threads (defaults to ENORM_KIT_THREADS, then the core count).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON file overriding the tolerance record.
    #[arg(long, global = true)]
    tol: Option<String>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Osc {
    /// Truncation level for oscillator presets.
    #[arg(long, default_value_t = 128)]
    n_max: usize,
    /// Frequency for oscillator presets.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

impl From<Osc> for OscParams {
    fn from(o: Osc) -> Self {
        OscParams {
            n_max: o.n_max,
            omega: o.omega,
        }
    }
}

#[derive(Args, Debug)]
struct OperatorInput {
    /// Operator: Matrix JSON path, osc:{a,adag,q,p,sqrtn,n}, two-level, identity:<n>.
    #[arg(long)]
    a: String,
    /// Generator: JSON path, osc, two-level or qubit.
    #[arg(long)]
    g: String,
    #[command(flatten)]
    osc: Osc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy-constrained norm with its dual certificate.
    Enorm {
        #[command(flatten)]
        input: OperatorInput,
        #[arg(long = "E")]
        energy: f64,
    },
    /// Energy-constrained seminorm.
    Seminorm {
        #[command(flatten)]
        input: OperatorInput,
        #[arg(long = "E")]
        energy: f64,
    },
    /// Both norms on a log grid.
    Profile {
        #[command(flatten)]
        input: OperatorInput,
        #[arg(long)]
        emin: f64,
        #[arg(long)]
        emax: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// F, G, concave hull and G∘F of a sampled function (CSV with header x,f).
    Transforms {
        #[arg(long)]
        input: String,
    },
    /// Energy-constrained Bures distance, cb-norm sandwich and dilation bounds.
    Channels {
        /// Channel: JSON path or identity, phase-flip, dephasing(p), damping(g), depolarizing(p).
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        /// Generator: JSON path, qubit, two-level or osc.
        #[arg(long, default_value = "qubit")]
        g: String,
        #[arg(long = "E")]
        energy: f64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized verification suites: basic, tensor, transforms, channels, oscillator, all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long)]
        dims: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A closed downstream pipe (`| head`) ends output quietly.
fn io_result(r: io::Result<()>) -> Result<(), CliError> {
    match r {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn emit(value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    io_result(writeln!(io::stdout(), "{text}"))
}

fn emit_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(io::stdout());
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => io_result(Err(e)),
        other => Err(CliError::Io(format!("{other:?}"))),
    };
    if let Err(e) = w.write_record(header) {
        return csv_err(e);
    }
    for row in rows {
        if let Err(e) = w.write_record(row.iter().map(|v| v.to_string())) {
            return csv_err(e);
        }
    }
    io_result(w.flush())
}

fn check_energy(e: f64) -> Result<(), CliError> {
    if e.is_finite() && e > 0.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "energy budget must be positive and finite, got {e}"
        )))
    }
}

fn tolerances(path: Option<&str>) -> Result<Tolerances<f64>, CliError> {
    let Some(path) = path else {
        return Ok(Tolerances::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

/// Returns whether every reported check passed.
fn run(cli: Cli) -> Result<bool, CliError> {
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => match std::env::var("ENORM_KIT_THREADS") {
            Ok(v) => Some(
                v.parse()
                    .map_err(|_| CliError::Input(format!("ENORM_KIT_THREADS=`{v}` is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Input("thread count must be positive".into()));
        }
        configure_threads(t);
    }
    let tol = tolerances(cli.tol.as_deref())?;
    match cli.cmd {
        Command::Enorm { input, energy } => {
            check_energy(energy)?;
            let a = inputs::operator(&input.a, input.osc.into())?;
            let g = inputs::generator(&input.g, input.osc.into())?;
            emit(&enorm(&a, &g, energy, &tol)?)?;
            Ok(true)
        }
        Command::Seminorm { input, energy } => {
            check_energy(energy)?;
            let a = inputs::operator(&input.a, input.osc.into())?;
            let g = inputs::generator(&input.g, input.osc.into())?;
            emit(&json!({ "E": energy, "seminorm": seminorm(&a, &g, energy)? }))?;
            Ok(true)
        }
        Command::Profile {
            input,
            emin,
            emax,
            points,
            format,
        } => {
            if !(emin > 0.0 && emax >= emin && emax.is_finite()) || points == 0 {
                return Err(CliError::Input(format!(
                    "bad grid: need 0 < emin <= emax and points > 0 (got {emin}, {emax}, {points})"
                )));
            }
            let a = inputs::operator(&input.a, input.osc.into())?;
            let g = inputs::generator(&input.g, input.osc.into())?;
            let grid = log_points(emin, emax, points)?;
            let p = profile(&a, &g, &grid, &tol)?;
            match format {
                Format::Csv => emit_csv(
                    &["E", "enorm", "seminorm"],
                    p.rows.iter().map(|r| vec![r.e, r.enorm, r.seminorm]),
                )?,
                Format::Json => emit(&p)?,
            }
            Ok(true)
        }
        Command::Transforms { input } => {
            let (x, f) = inputs::sampled(&input)?;
            let f = SampledFunction::new(x, f)?;
            let hull = concave_hull(&f)?;
            let mut rows = Vec::with_capacity(f.len());
            for (k, &x) in f.grid().iter().enumerate() {
                rows.push(vec![
                    x,
                    f.values()[k],
                    transform_f(&f, x)?,
                    transform_g(&f, x)?,
                    hull.values()[k],
                    round_trip(&f, x)?,
                ]);
            }
            emit_csv(&["x", "f", "F", "G", "hull", "round_trip"], rows)?;
            Ok(true)
        }
        Command::Channels {
            phi,
            psi,
            g,
            energy,
            restarts,
            seed,
        } => {
            check_energy(energy)?;
            let phi = inputs::channel(&phi)?;
            let psi = inputs::channel(&psi)?;
            let g = inputs::generator(
                &g,
                OscParams {
                    n_max: 128,
                    omega: 1.0,
                },
            )?;
            let bures_opts = BuresOptions::default();
            let cb_opts = CbOptions {
                restarts,
                seed,
                ..CbOptions::default()
            };
            let ksw = ksw_verify(&phi, &psi, &g, energy, &tol, &bures_opts, &cb_opts)?;
            let iso = isometric_rep_bound(&phi, &psi, &g, energy, &ksw.bures, &tol)?;
            let pass = ksw.report.iter().chain(&iso.report).all(|c| c.pass);
            emit(&json!({
                "beta": { "value": ksw.bures.beta, "lower": ksw.bures.lower, "upper": ksw.bures.upper },
                "cb_lower": ksw.cb.value,
                "cb_upper": ksw.cb.sandwich_upper,
                "cb_phi": ksw.cb_phi,
                "cb_psi": ksw.cb_psi,
                "dilation_distance": iso.distance,
                "common_distance": iso.common_distance,
                "report": ksw.report.iter().chain(&iso.report).collect::<Vec<_>>(),
            }))?;
            Ok(pass)
        }
        Command::Verify {
            suite,
            seeds,
            dims,
            seed,
        } => {
            let summary = run_suite(&suite, &VerifyConfig { seeds, dims, seed }, &tol)?;
            emit(&summary)?;
            Ok(summary.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::Input(e.render().to_string().trim().to_string());
            return report(&err);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    let code = e.exit_code();
    let body = json!({ "error": { "kind": e.kind(), "message": e.message(), "exit_code": code } });
    let _ = writeln!(io::stderr(), "{body}");
    ExitCode::from(code)
}
