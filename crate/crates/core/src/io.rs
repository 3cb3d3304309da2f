//! Run configuration documents and CSV/JSON output files.
//!
//! A configuration is a flat JSON object:
//!
//! ```json
//! {"m": 0.1, "M": 0.2, "alpha": 0.05, "horizon": 10, "J": 50, "N": 200,
//!  "quadrature": "trapezoid", "mode": "fixed", "snapshot_stride": 0}
//! ```
//!
//! `quadrature` defaults to `trapezoid` on a fixed grid and to `riemann` on
//! an adaptive grid; `mode` defaults to `fixed`; `snapshot_stride` to 0.
//! Adaptive runs take `N0` and `Nstage` instead of `N`.

use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{ConfigError, Error, Result};
use crate::oracle::{exact_switch_time, switches_before, ControlConfig};
use crate::quadrature::QuadratureKind;
use crate::runner::{ErrorReport, Outcome, RunConfig, SweepRow, TimeGrid, Trajectory};

const KNOWN_KEYS: &[&str] = &[
    "m",
    "M",
    "alpha",
    "horizon",
    "J",
    "N",
    "quadrature",
    "mode",
    "N0",
    "Nstage",
    "snapshot_stride",
];

pub const SWITCHES_FILE: &str = "switches.csv";
pub const MASS_FILE: &str = "mass.csv";
pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const REPORT_FILE: &str = "report.json";

fn number(doc: &Map<String, Value>, key: &str) -> Result<Option<f64>, ConfigError> {
    match doc.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| ConfigError::new(key, "expected a number")),
    }
}

fn required_number(doc: &Map<String, Value>, key: &str) -> Result<f64, ConfigError> {
    number(doc, key)?.ok_or_else(|| ConfigError::new(key, "missing"))
}

fn count(doc: &Map<String, Value>, key: &str) -> Result<Option<usize>, ConfigError> {
    match doc.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => {
            // accept 200 and 200.0, reject 200.5 and negatives
            let as_int = v.as_u64().or_else(|| {
                v.as_f64()
                    .filter(|f| f.fract() == 0.0 && *f >= 0.0 && *f < u64::MAX as f64)
                    .map(|f| f as u64)
            });
            as_int
                .map(|n| Some(n as usize))
                .ok_or_else(|| ConfigError::new(key, "expected a non-negative integer"))
        }
    }
}

fn required_count(doc: &Map<String, Value>, key: &str) -> Result<usize, ConfigError> {
    count(doc, key)?.ok_or_else(|| ConfigError::new(key, "missing"))
}

fn text<'a>(doc: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>, ConfigError> {
    match doc.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(ConfigError::new(key, "expected a string")),
    }
}

/// Parses the text of a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError::new("document", format!("not valid JSON: {e}")))?;
    config_from_value(&value)
}

pub fn config_from_value(value: &Value) -> Result<RunConfig, ConfigError> {
    let doc = value
        .as_object()
        .ok_or_else(|| ConfigError::new("document", "expected a JSON object"))?;
    if let Some(key) = doc.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::new(key.as_str(), "unknown key"));
    }

    let control = ControlConfig::new(
        required_number(doc, "m")?,
        required_number(doc, "M")?,
        required_number(doc, "alpha")?,
        required_number(doc, "horizon")?,
    )?;
    let cells = required_count(doc, "J")?;

    let (time_grid, default_quad) = match text(doc, "mode")?.unwrap_or("fixed") {
        "fixed" => {
            for key in ["N0", "Nstage"] {
                if doc.contains_key(key) {
                    warn!("`{key}` is ignored on a fixed grid");
                }
            }
            let steps = required_count(doc, "N")?;
            (TimeGrid::Fixed { steps }, QuadratureKind::Trapezoid)
        }
        "adaptive" => {
            if doc.contains_key("N") {
                warn!("`N` is ignored on an adaptive grid");
            }
            let grid = TimeGrid::Adaptive {
                first_stage_steps: required_count(doc, "N0")?,
                stage_steps: required_count(doc, "Nstage")?,
            };
            (grid, QuadratureKind::RiemannInterior)
        }
        other => {
            return Err(ConfigError::new(
                "mode",
                format!("expected \"fixed\" or \"adaptive\", got {other:?}"),
            ))
        }
    };

    let quadrature = match text(doc, "quadrature")? {
        None => default_quad,
        Some("riemann") => QuadratureKind::RiemannInterior,
        Some("trapezoid") => QuadratureKind::Trapezoid,
        Some(other) => {
            return Err(ConfigError::new(
                "quadrature",
                format!("expected \"riemann\" or \"trapezoid\", got {other:?}"),
            ))
        }
    };
    let snapshot_stride = count(doc, "snapshot_stride")?.unwrap_or(0);

    RunConfig::new(control, cells, quadrature, time_grid, snapshot_stride)
}

/// The configuration document describing `run`.
pub fn config_to_value(run: &RunConfig) -> Value {
    let c = &run.control;
    let mut doc = json!({
        "m": c.lower,
        "M": c.upper,
        "alpha": c.alpha,
        "horizon": c.horizon,
        "J": run.cells,
        "quadrature": run.quadrature.name(),
        "snapshot_stride": run.snapshot_stride,
    });
    let map = doc.as_object_mut().expect("object literal");
    match run.time_grid {
        TimeGrid::Fixed { steps } => {
            map.insert("mode".into(), json!("fixed"));
            map.insert("N".into(), json!(steps));
        }
        TimeGrid::Adaptive {
            first_stage_steps,
            stage_steps,
        } => {
            map.insert("mode".into(), json!("adaptive"));
            map.insert("N0".into(), json!(first_stage_steps));
            map.insert("Nstage".into(), json!(stage_steps));
        }
    }
    doc
}

pub fn serialize_config(run: &RunConfig) -> String {
    serde_json::to_string_pretty(&config_to_value(run)).expect("config serializes")
}

/// Applies `key=value` overrides to a configuration document. Values are
/// read as JSON when possible (`N=400`, `alpha=0.1`) and as strings
/// otherwise (`mode=adaptive`).
pub fn apply_overrides(doc: &mut Value, overrides: &[String]) -> Result<(), ConfigError> {
    let map = doc
        .as_object_mut()
        .ok_or_else(|| ConfigError::new("document", "expected a JSON object"))?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| ConfigError::new(item.as_str(), "override must look like key=value"))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::new(key, "unknown key"));
        }
        let raw = raw.trim();
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        map.insert(key.to_string(), value);
    }
    Ok(())
}

/// Reads a configuration file, applies overrides and validates it.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut doc: Value = serde_json::from_str(&text)
        .map_err(|e| ConfigError::new("document", format!("not valid JSON: {e}")))?;
    apply_overrides(&mut doc, overrides)?;
    Ok(config_from_value(&doc)?)
}

fn fixed10(v: f64) -> String {
    format!("{v:.10}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv<R, I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let body = serde_json::to_string_pretty(value).expect("report serializes");
    fs::write(path, body + "\n").map_err(io_err(path))
}

pub fn write_switches(path: &Path, report: &ErrorReport) -> Result<()> {
    write_csv(
        path,
        &["k", "T_k", "t_k", "err", "bound", "within_bound"],
        report.entries.iter().map(|e| {
            [
                e.k.to_string(),
                fixed10(e.numeric),
                fixed10(e.exact),
                fixed10(e.error),
                e.bound.to_string(),
                e.within_bound.to_string(),
            ]
        }),
    )
}

pub fn write_mass(path: &Path, traj: &Trajectory) -> Result<()> {
    write_csv(
        path,
        &["time", "mass", "flux"],
        traj.samples.iter().map(|s| {
            [
                s.time.to_string(),
                s.mass.to_string(),
                s.flux.as_int().to_string(),
            ]
        }),
    )
}

pub fn write_snapshots(path: &Path, traj: &Trajectory) -> Result<()> {
    write_csv(
        path,
        &["time", "x", "u"],
        traj.snapshots.iter().flat_map(|snap| {
            let dx = 1.0 / snap.cells() as f64;
            snap.values.iter().enumerate().map(move |(j, u)| {
                [
                    snap.time.to_string(),
                    (j as f64 * dx).to_string(),
                    u.to_string(),
                ]
            })
        }),
    )
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes `switches.csv`, `mass.csv`, `snapshots.csv` and `report.json`
/// into `dir`, creating it if needed.
pub fn emit_outputs(traj: &Trajectory, report: &ErrorReport, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let paths: Vec<PathBuf> = [SWITCHES_FILE, MASS_FILE, SNAPSHOTS_FILE, REPORT_FILE]
        .iter()
        .map(|f| dir.join(f))
        .collect();
    write_switches(&paths[0], report)?;
    write_mass(&paths[1], traj)?;
    write_snapshots(&paths[2], traj)?;
    write_json(&paths[3], report)?;
    Ok(paths)
}

#[derive(Debug, Serialize)]
struct SideBySide<'a> {
    trapezoid: &'a ErrorReport,
    riemann: &'a ErrorReport,
}

/// Writes each quadrature's outputs to its own subdirectory plus a
/// side-by-side `compare.csv` / `compare.json`.
pub fn emit_comparison(trapezoid: &Outcome, riemann: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = emit_outputs(&trapezoid.trajectory, &trapezoid.report, &dir.join("trapezoid"))?;
    written.extend(emit_outputs(&riemann.trajectory, &riemann.report, &dir.join("riemann"))?);

    let (trap, riem) = (&trapezoid.report.entries, &riemann.report.entries);
    let rows = trap.len().max(riem.len());
    let control = &trapezoid.run.control;
    let csv_path = dir.join("compare.csv");
    write_csv(
        &csv_path,
        &[
            "k",
            "t_k",
            "T_k_trapezoid",
            "err_trapezoid",
            "within_bound_trapezoid",
            "T_k_riemann",
            "err_riemann",
            "within_bound_riemann",
        ],
        (0..rows).map(|i| {
            let side = |entries: &[crate::runner::SwitchError]| match entries.get(i) {
                Some(e) => [fixed10(e.numeric), fixed10(e.error), e.within_bound.to_string()],
                None => [String::new(), String::new(), String::new()],
            };
            let mut row = vec![(i + 1).to_string(), fixed10(exact_switch_time(i + 1, control))];
            row.extend(side(trap));
            row.extend(side(riem));
            row
        }),
    )?;
    written.push(csv_path);

    let json_path = dir.join("compare.json");
    write_json(
        &json_path,
        &SideBySide {
            trapezoid: &trapezoid.report,
            riemann: &riemann.report,
        },
    )?;
    written.push(json_path);
    Ok(written)
}

pub fn emit_sweep(rows: &[SweepRow], dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let csv_path = dir.join("sweep.csv");
    write_csv(
        &csv_path,
        &[
            "N",
            "dt",
            "events",
            "max_abs_err",
            "max_err_over_bound",
            "all_within_bound",
        ],
        rows.iter().map(|r| {
            [
                r.steps.to_string(),
                r.dt.to_string(),
                r.events.to_string(),
                fixed10(r.max_abs_error),
                fixed10(r.max_bound_ratio),
                r.all_within_bound.to_string(),
            ]
        }),
    )?;
    let json_path = dir.join("sweep.json");
    write_json(&json_path, &rows)?;
    Ok(vec![csv_path, json_path])
}

/// `k,t_k,threshold` rows for every exact switch up to the horizon.
pub fn oracle_table(control: &ControlConfig) -> String {
    let mut out = String::from("k,t_k,threshold\n");
    for k in 1..=switches_before(control.horizon, control) {
        let threshold = if k % 2 == 1 { control.upper } else { control.lower };
        out.push_str(&format!("{k},{},{threshold}\n", fixed10(exact_switch_time(k, control))));
    }
    out
}
