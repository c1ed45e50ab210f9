use rayon::prelude::*;

use s3flow::flow::{FlowKind, StopReason, Trajectory};

use crate::args::SweepArgs;
use crate::commands::run::integrate_spec;
use crate::error::CliError;
use crate::output::{emit, fmt_num, stop_label};
use crate::spec::{flow_kind, load_config, RunSpec};

/// Ratio window for calling the two scales merged at collapse.
const MERGE_TOL: f64 = 0.01;

/// One axis `name=start:stop:count` of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::usage(format!("grid `{text}` is not `name=start:stop:count`"));
        let (name, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad());
        };
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let values = if count == 1 {
            vec![start]
        } else {
            (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect()
        };
        Ok(Self {
            name: name.trim().to_owned(),
            values,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    NutCollapse,
    BoltCollapse,
    MergeThenCollapse,
    DomainExit,
    Horizon,
}

impl Class {
    pub fn label(self) -> &'static str {
        match self {
            Self::NutCollapse => "nut-collapse",
            Self::BoltCollapse => "bolt-collapse",
            Self::MergeThenCollapse => "merge-then-collapse",
            Self::DomainExit => "domain-exit",
            Self::Horizon => "horizon",
        }
    }
}

/// The two quantities whose ratio decides merging: the metric scales, or
/// `(alpha, beta)` themselves for ricci2.
fn scales(kind: FlowKind, y: &[f64]) -> (f64, f64) {
    match kind {
        FlowKind::RicciRound | FlowKind::Dirac { .. } => (y[0], y[0]),
        _ => (y[0], y[1]),
    }
}

/// The last Riemannian sample.
fn final_state(traj: &Trajectory) -> &[f64] {
    let end = traj.nonriemannian_from.unwrap_or(traj.samples.len());
    &traj.samples[end - 1].vars
}

pub fn classify(traj: &Trajectory, failed: bool) -> Class {
    match traj.stop.reason {
        _ if failed => Class::DomainExit,
        StopReason::DomainExit | StopReason::StepUnderflow => Class::DomainExit,
        StopReason::ReachedTEnd => Class::Horizon,
        StopReason::Collapse { .. } => {
            let kind = traj.kind;
            let (s1, s2) = scales(kind, &traj.samples[0].vars);
            let (f1, f2) = scales(kind, final_state(traj));
            let merged = s1 > 0.0 && (f1 / f2 - 1.0).abs() < MERGE_TOL;
            if merged && s1 == s2 {
                Class::NutCollapse
            } else if merged {
                Class::MergeThenCollapse
            } else {
                Class::BoltCollapse
            }
        }
    }
}

struct Row {
    i: usize,
    j: usize,
    x: f64,
    y: f64,
    class: Class,
    stop: String,
    t_stop: f64,
    last: Vec<f64>,
}

fn cell(base: &RunSpec, axes: &[Axis; 2], idx: [usize; 2]) -> Result<Row, CliError> {
    let mut spec = base.clone();
    let names = spec.kind.var_names();
    let (x, y) = (axes[0].values[idx[0]], axes[1].values[idx[1]]);
    for (axis, v) in axes.iter().zip([x, y]) {
        let k = names
            .iter()
            .position(|n| *n == axis.name)
            .expect("validated");
        spec.init[k] = v;
    }
    let out = integrate_spec(&spec)?;
    let (traj, failed) = (out.traj, out.note.is_some());
    Ok(Row {
        i: idx[0],
        j: idx[1],
        x,
        y,
        class: classify(&traj, failed),
        stop: stop_label(&traj.stop),
        t_stop: traj.stop.t_stop,
        last: final_state(&traj).to_vec(),
    })
}

pub fn sweep(args: &SweepArgs) -> Result<u8, CliError> {
    let file = load_config(&args.flow)?;
    let [a, b] = &args.grid[..] else {
        return Err(CliError::usage("--grid must be given exactly twice"));
    };
    let axes = [Axis::parse(a)?, Axis::parse(b)?];
    if axes[0].name == axes[1].name {
        return Err(CliError::usage("the two grid axes must differ"));
    }

    // grid axes fill in init values that are not given explicitly
    let mut flow_args = args.flow.clone();
    let name = flow_args
        .flow
        .clone()
        .or_else(|| file.get_str("flow").map(str::to_owned))
        .ok_or_else(|| CliError::usage("--flow is required"))?;
    let k = match flow_args.k {
        Some(k) => Some(k),
        None => file.get("k")?,
    };
    let names = flow_kind(&name, k)?.var_names();
    for axis in &axes {
        if !names.contains(&axis.name.as_str()) {
            return Err(CliError::usage(format!(
                "grid axis `{}` is not a state component ({})",
                axis.name,
                names.join(", ")
            )));
        }
    }
    let mut init: Vec<String> = flow_args
        .init
        .clone()
        .or_else(|| file.get_str("init").map(str::to_owned))
        .map(|s| {
            s.split(',')
                .map(|p| p.trim().to_owned())
                .filter(|p| !p.is_empty())
                .collect()
        })
        .unwrap_or_default();
    init.retain(|p| {
        !axes
            .iter()
            .any(|a| p.split('=').next().map(str::trim) == Some(a.name.as_str()))
    });
    for axis in &axes {
        init.push(format!("{}={}", axis.name, axis.values[0]));
    }
    flow_args.init = Some(init.join(","));
    let base = RunSpec::resolve(&flow_args, &file)?;

    let cells = axes[0].values.len() * axes[1].values.len();
    let per_cell = (base.cfg.t_end / base.cfg.step).ceil() + 1.0;
    if cells as f64 * per_cell > base.cfg.max_samples as f64 {
        return Err(CliError::usage(format!(
            "grid of {cells} cells needs about {} samples, over the budget of {}",
            cells as f64 * per_cell,
            base.cfg.max_samples
        )));
    }

    let indices: Vec<[usize; 2]> = (0..axes[0].values.len())
        .flat_map(|i| (0..axes[1].values.len()).map(move |j| [i, j]))
        .collect();
    let work = || -> Result<Vec<Row>, CliError> {
        indices
            .par_iter()
            .map(|&idx| cell(&base, &axes, idx))
            .collect()
    };
    let rows = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::usage(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let var_names = base.kind.var_names();
    emit(args.out.as_deref(), |w| {
        writeln!(w, "# flow={}", base.kind.name())?;
        if let Some(k) = base.k() {
            writeln!(w, "# k={k}")?;
        }
        writeln!(
            w,
            "# grid={}:{},{}:{} t_end={} step={}",
            axes[0].name,
            axes[0].values.len(),
            axes[1].name,
            axes[1].values.len(),
            fmt_num(base.cfg.t_end),
            fmt_num(base.cfg.step)
        )?;
        let finals: Vec<String> = var_names.iter().map(|n| format!("final_{n}")).collect();
        writeln!(
            w,
            "i,j,{},{},class,stop,t_stop,{}",
            axes[0].name,
            axes[1].name,
            finals.join(",")
        )?;
        for r in &rows {
            let last: Vec<String> = r.last.iter().map(|v| fmt_num(*v)).collect();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.i,
                r.j,
                fmt_num(r.x),
                fmt_num(r.y),
                r.class.label(),
                r.stop,
                fmt_num(r.t_stop),
                last.join(",")
            )?;
        }
        Ok(())
    })?;
    Ok(0)
}
