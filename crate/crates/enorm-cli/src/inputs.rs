//! Operator, generator and channel sources: JSON files or named presets.

use std::fs;
use std::path::Path;

use enorm_kit::{oscillator, CPMap, ComplexMatrix, GeneratingOperator, Matrix};
use serde::de::DeserializeOwned;

use crate::CliError;

#[derive(Clone, Copy, Debug)]
pub struct OscParams {
    pub n_max: usize,
    pub omega: f64,
}

fn read_json<T: DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

/// Argument of a preset such as `dephasing(0.3)`.
fn preset_arg(arg: &str, name: &str) -> Result<Option<f64>, CliError> {
    let Some(rest) = arg.strip_prefix(name) else {
        return Ok(None);
    };
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| CliError::Input(format!("preset `{arg}` needs the form {name}(value)")))?;
    inner
        .trim()
        .parse()
        .map(Some)
        .map_err(|_| CliError::Input(format!("preset `{arg}`: `{inner}` is not a number")))
}

/// `osc:a|adag|q|p|sqrtn|n`, `two-level`, `identity:<n>` or a Matrix JSON path.
pub fn operator(arg: &str, osc: OscParams) -> Result<Matrix, CliError> {
    if let Some(which) = arg.strip_prefix("osc:") {
        let sys = oscillator::build(osc.n_max, osc.omega)?;
        return Ok(match which {
            "a" => sys.a,
            "adag" => sys.a_dag,
            "q" => sys.q,
            "p" => sys.p,
            "sqrtn" => sys.sqrt_number(),
            "n" => sys.number.to_matrix(),
            other => return Err(CliError::Input(format!("unknown oscillator operator `{other}`"))),
        });
    }
    if arg == "two-level" {
        return Ok(ComplexMatrix::from_real_diag(&[2f64.sqrt(), 1.0]));
    }
    if let Some(n) = arg.strip_prefix("identity:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Input(format!("bad identity size `{n}`")))?;
        if n == 0 {
            return Err(CliError::Input("identity size must be positive".into()));
        }
        return Ok(ComplexMatrix::identity(n));
    }
    read_json(arg)
}

/// `osc` (number operator), `two-level` = diag(1, 0), `qubit` = diag(0, 1) or a
/// generator JSON path.
pub fn generator(arg: &str, osc: OscParams) -> Result<GeneratingOperator<f64>, CliError> {
    Ok(match arg {
        "osc" => oscillator::build(osc.n_max, osc.omega)?.number,
        "two-level" => GeneratingOperator::diagonal(vec![1.0, 0.0])?,
        "qubit" => GeneratingOperator::diagonal(vec![0.0, 1.0])?,
        path => read_json(path)?,
    })
}

/// Qubit presets `identity`, `phase-flip`, `dephasing(p)`, `damping(γ)`,
/// `depolarizing(p)`, or a CPMap JSON path.
pub fn channel(arg: &str) -> Result<CPMap<f64>, CliError> {
    match arg {
        "identity" => return Ok(CPMap::identity(2)),
        "phase-flip" => return Ok(CPMap::phase_flip()),
        _ => {}
    }
    if let Some(p) = preset_arg(arg, "dephasing")? {
        return Ok(CPMap::dephasing(p)?);
    }
    if let Some(g) = preset_arg(arg, "damping")? {
        return Ok(CPMap::amplitude_damping(g)?);
    }
    if let Some(p) = preset_arg(arg, "depolarizing")? {
        return Ok(CPMap::depolarizing(p)?);
    }
    read_json(arg)
}

/// Two-column CSV with header `x,f`.
pub fn sampled(path: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("{path}: {e}")))?
        .clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "f" {
        return Err(CliError::Input(format!("{path}: expected header `x,f`")));
    }
    let (mut x, mut f) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        let num = |k: usize| -> Result<f64, CliError> {
            rec[k].trim().parse().map_err(|_| {
                CliError::Input(format!("{path}: row {}: `{}` is not a number", line + 2, &rec[k]))
            })
        };
        x.push(num(0)?);
        f.push(num(1)?);
    }
    Ok((x, f))
}
