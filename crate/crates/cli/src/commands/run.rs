use s3flow::flow::{integrate, StopReason, Trajectory};
use s3flow::FlowError;

use crate::args::{Format, RunArgs};
use crate::error::CliError;
use crate::output::{self, emit};
use crate::spec::{load_config, RunSpec};

/// Result of integrating a spec: a trajectory (possibly truncated) and the
/// exit code its outcome maps to.
pub struct Outcome {
    pub traj: Trajectory,
    pub exit: u8,
    pub note: Option<String>,
}

pub fn integrate_spec(spec: &RunSpec) -> Result<Outcome, CliError> {
    match integrate(spec.kind, &spec.state(), &spec.cfg) {
        Ok(traj) => {
            let exit = match traj.stop.reason {
                StopReason::ReachedTEnd | StopReason::Collapse { .. } => 0,
                StopReason::DomainExit | StopReason::StepUnderflow => 2,
            };
            Ok(Outcome {
                traj,
                exit,
                note: None,
            })
        }
        Err(FlowError::NonFinite { t, trajectory }) => Ok(Outcome {
            traj: *trajectory,
            exit: 2,
            note: Some(format!("state became non-finite near t = {t}")),
        }),
        Err(e @ (FlowError::InvalidConfig(_) | FlowError::InvalidInitialState(_))) => {
            Err(CliError::usage(e.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run(args: &RunArgs) -> Result<u8, CliError> {
    let file = load_config(&args.flow)?;
    let spec = RunSpec::resolve(&args.flow, &file)?;
    let format = match args.format {
        Some(f) => f,
        None => match file.get_str("format") {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(CliError::usage(format!("unknown format `{other}`"))),
        },
    };
    let out = args
        .out
        .clone()
        .or_else(|| file.get_str("out").map(Into::into));

    let outcome = integrate_spec(&spec)?;
    emit(out.as_deref(), |w| match format {
        Format::Csv => output::write_csv(w, &spec, &outcome.traj),
        Format::Json => output::write_json(w, &spec, &outcome.traj),
    })?;
    if outcome.exit != 0 {
        let stop = &outcome.traj.stop;
        eprintln!(
            "s3flow: {} stopped: {} at t = {}",
            spec.kind.name(),
            output::stop_label(stop),
            stop.t_stop
        );
    }
    if let Some(note) = outcome.note {
        eprintln!("s3flow: {note}");
    }
    Ok(outcome.exit)
}
