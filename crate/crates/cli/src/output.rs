//! Fixed-format numbers, CSV trajectories and JSON helpers.

use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use s3flow::flow::{rhs, FlowKind, StopEvent, StopReason, Trajectory};
use s3flow::geometry::{self, TwoParamJet};

use crate::error::CliError;
use crate::spec::RunSpec;

/// 17 significant digits, scientific notation. Used for every float written
/// to a data file so output is byte-for-byte reproducible.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float serialized with [`fmt_num`]; non-finite values become `null`.
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fmt_num(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

/// A JSON object whose keys keep insertion order.
#[derive(Debug, Clone, Default)]
pub struct Ordered<V>(pub Vec<(String, V)>);

impl<V: Serialize> Serialize for Ordered<V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

pub fn stop_label(stop: &StopEvent) -> String {
    match stop.reason {
        StopReason::Collapse { component } => format!("collapse({component})"),
        other => other.label().to_owned(),
    }
}

#[derive(Debug, Serialize)]
pub struct StopJson {
    pub reason: String,
    pub t_stop: Num,
}

impl From<&StopEvent> for StopJson {
    fn from(s: &StopEvent) -> Self {
        Self {
            reason: stop_label(s),
            t_stop: Num(s.t_stop),
        }
    }
}

pub fn init_json(spec: &RunSpec) -> Ordered<Num> {
    Ordered(
        spec.init_pairs()
            .map(|(k, v)| (k.to_owned(), Num(v)))
            .collect(),
    )
}

/// Column names of the trajectory table.
pub fn columns(kind: FlowKind, flagged: bool) -> Vec<&'static str> {
    let mut c = vec!["t"];
    c.extend_from_slice(kind.var_names());
    c.extend_from_slice(match kind {
        FlowKind::Dirac { .. } => &["constraint_residual"][..],
        FlowKind::RicciRound => &["conserved"],
        FlowKind::RicciBerger => &["alpha_over_beta"],
        FlowKind::NormalizedBerger => &["volume"],
        FlowKind::AsdEguchiHanson | FlowKind::Flow9 | FlowKind::HitchinContact => {
            &["asd_res1", "asd_res2"]
        }
    });
    if flagged {
        c.push("nonriemannian");
    }
    c
}

/// Derived columns for one sample.
fn derived(kind: FlowKind, t: f64, y: &[f64]) -> Vec<f64> {
    match kind {
        FlowKind::Dirac { k } => vec![rhs::dirac_constraint(y[0], y[1], k)],
        FlowKind::RicciRound => vec![y[0].mul_add(y[0], 8.0 * t)],
        FlowKind::RicciBerger => vec![y[0] / y[1]],
        FlowKind::NormalizedBerger => vec![y[0] * y[1] * y[1]],
        _ => {
            let mut dy = [0.0; 2];
            let res = kind.rhs(y, &mut dy).ok().and_then(|_| {
                geometry::asd_residual(&TwoParamJet::new(y[0], y[1], dy[0], dy[1])).ok()
            });
            match res {
                Some(r) => vec![r.rho1, r.rho2],
                None => vec![f64::NAN, f64::NAN],
            }
        }
    }
}

/// Rows of the trajectory table, matching [`columns`].
pub fn rows(traj: &Trajectory, flagged: bool) -> Vec<Vec<f64>> {
    traj.samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = Vec::with_capacity(s.vars.len() + 4);
            row.push(s.t);
            row.extend_from_slice(&s.vars);
            if traj.is_nonriemannian(i) {
                row.extend(std::iter::repeat_n(f64::NAN, derived_len(traj.kind)));
            } else {
                row.extend(derived(traj.kind, s.t, &s.vars));
            }
            if flagged {
                row.push(if traj.is_nonriemannian(i) { 1.0 } else { 0.0 });
            }
            row
        })
        .collect()
}

fn derived_len(kind: FlowKind) -> usize {
    columns(kind, false).len() - 1 - kind.dim()
}

fn fmt_cell(col: &str, v: f64) -> String {
    if col == "nonriemannian" {
        format!("{}", v as u8)
    } else {
        fmt_num(v)
    }
}

pub fn write_csv(w: &mut dyn Write, spec: &RunSpec, traj: &Trajectory) -> std::io::Result<()> {
    let flagged = spec.cfg.continue_past_collapse;
    let cols = columns(spec.kind, flagged);
    writeln!(w, "# flow={}", spec.kind.name())?;
    if let Some(k) = spec.k() {
        writeln!(w, "# k={k}")?;
    }
    let init: Vec<String> = spec
        .init_pairs()
        .map(|(k, v)| format!("{k}={}", fmt_num(v)))
        .collect();
    writeln!(w, "# init={}", init.join(","))?;
    writeln!(
        w,
        "# t_end={} step={} adaptive={} collapse_eps={}",
        fmt_num(spec.cfg.t_end),
        fmt_num(spec.cfg.step),
        spec.cfg.adaptive,
        fmt_num(spec.cfg.collapse_eps)
    )?;
    writeln!(w, "# stop={}", stop_label(&traj.stop))?;
    writeln!(w, "{}", cols.join(","))?;
    for row in rows(traj, flagged) {
        let cells: Vec<String> = cols
            .iter()
            .zip(&row)
            .map(|(c, v)| fmt_cell(c, *v))
            .collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    writeln!(
        w,
        "# stop={} t_stop={}",
        stop_label(&traj.stop),
        fmt_num(traj.stop.t_stop)
    )
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    flow: &'static str,
    k: Option<i32>,
    init: Ordered<Num>,
    t_end: Num,
    step: Num,
    adaptive: bool,
    collapse_eps: Num,
    stop: StopJson,
    columns: Vec<&'a str>,
    rows: Vec<Vec<Num>>,
}

pub fn write_json(w: &mut dyn Write, spec: &RunSpec, traj: &Trajectory) -> std::io::Result<()> {
    let flagged = spec.cfg.continue_past_collapse;
    let doc = TrajectoryJson {
        flow: spec.kind.name(),
        k: spec.k(),
        init: init_json(spec),
        t_end: Num(spec.cfg.t_end),
        step: Num(spec.cfg.step),
        adaptive: spec.cfg.adaptive,
        collapse_eps: Num(spec.cfg.collapse_eps),
        stop: StopJson::from(&traj.stop),
        columns: columns(spec.kind, flagged),
        rows: rows(traj, flagged)
            .into_iter()
            .map(|r| r.into_iter().map(Num).collect())
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

/// Write to `path`, or to standard output when `path` is `None`.
pub fn emit(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let io_err = |p: &Path| {
        let p = p.to_owned();
        move |source| CliError::Io { path: p, source }
    };
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(io_err(p))?;
            let mut w = std::io::BufWriter::new(file);
            f(&mut w).map_err(io_err(p))?;
            w.flush().map_err(io_err(p))
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = std::io::BufWriter::new(stdout.lock());
            f(&mut w).map_err(io_err(Path::new("<stdout>")))?;
            w.flush().map_err(io_err(Path::new("<stdout>")))
        }
    }
}
