use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use s3flow::flow::reparam::verify_prop1;
use s3flow::flow::{rhs, CurvatureSign, FlowKind, Trajectory};
use s3flow::oracle::{self, MatchReport, OracleKind};
use s3flow::OracleError;

use crate::args::VerifyArgs;
use crate::commands::run::integrate_spec;
use crate::error::CliError;
use crate::output::{emit, init_json, Num, Ordered, StopJson};
use crate::spec::{load_config, RunSpec};

const PROP1_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    ClosedForm,
    EhMatch,
    Einstein,
    Volume,
    BetaOde,
    Implicit7,
    Slopes,
    Prop1,
}

impl Oracle {
    pub const ALL: [Oracle; 8] = [
        Self::ClosedForm,
        Self::EhMatch,
        Self::Einstein,
        Self::Volume,
        Self::BetaOde,
        Self::Implicit7,
        Self::Slopes,
        Self::Prop1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed-form",
            Self::EhMatch => "eh-match",
            Self::Einstein => "einstein",
            Self::Volume => "volume",
            Self::BetaOde => "beta-ode",
            Self::Implicit7 => "implicit7",
            Self::Slopes => "slopes",
            Self::Prop1 => "prop1",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Self::ClosedForm | Self::EhMatch | Self::Implicit7 => 1e-6,
            Self::Einstein => 1e-5,
            Self::Volume => 1e-8,
            Self::BetaOde => 1e-4,
            // 2% of the limiting slope -8
            Self::Slopes => 0.16,
            Self::Prop1 => 1e-10,
        }
    }

    fn parse(name: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == name.trim())
            .ok_or_else(|| {
                let known: Vec<_> = Self::ALL.iter().map(|o| o.name()).collect();
                CliError::usage(format!(
                    "unknown oracle `{name}`; expected one of {}",
                    known.join(", ")
                ))
            })
    }
}

/// What an oracle is checked against, decided from the flow and its initial data.
enum Plan {
    ClosedForm(OracleKind),
    EhMatch { a: f64 },
    Einstein(CurvatureSign),
    Volume,
    BetaOde,
    Implicit7,
    Slopes,
    Prop1(CurvatureSign),
}

fn inapplicable(o: Oracle, reason: impl Into<String>) -> CliError {
    CliError::Inapplicable {
        name: o.name().to_owned(),
        reason: reason.into(),
    }
}

fn plan(o: Oracle, spec: &RunSpec) -> Result<Plan, CliError> {
    let y = &spec.init;
    let flow = spec.kind.name();
    let unit_dirac = |k| (y[0] == 0.0 && y[1] == 1.0).then_some(k);
    let bolt_start = y.len() == 2 && y[0] == 0.0 && y[1] > 0.0;
    let p = match (o, spec.kind) {
        (Oracle::ClosedForm, FlowKind::Dirac { k }) => unit_dirac(k)
            .map(|k| Plan::ClosedForm(OracleKind::DiracProfile { k }))
            .ok_or_else(|| inapplicable(o, "the constant-curvature profiles start at f=0, df=1"))?,
        (Oracle::ClosedForm, FlowKind::RicciRound) => {
            Plan::ClosedForm(OracleKind::RicciRoundProfile {
                t0: y[0] * y[0] / 8.0,
            })
        }
        (Oracle::ClosedForm, FlowKind::RicciBerger) if y[0] == y[1] => {
            Plan::ClosedForm(OracleKind::Nut { t0: y[0] / 8.0 })
        }
        (Oracle::ClosedForm, FlowKind::RicciBerger) if y[0] == 0.0 => {
            Plan::ClosedForm(OracleKind::Bolt { t0: y[1] / 16.0 })
        }
        (Oracle::ClosedForm, FlowKind::RicciBerger) => {
            return Err(inapplicable(
                o,
                "ricci2 has closed forms only for alpha=beta or alpha=0",
            ))
        }
        (Oracle::ClosedForm, FlowKind::AsdEguchiHanson | FlowKind::HitchinContact)
            if bolt_start =>
        {
            Plan::ClosedForm(OracleKind::EguchiHanson { a: y[1] })
        }
        (Oracle::EhMatch, FlowKind::AsdEguchiHanson | FlowKind::HitchinContact) if bolt_start => {
            Plan::EhMatch { a: y[1] }
        }
        (
            Oracle::ClosedForm | Oracle::EhMatch,
            FlowKind::AsdEguchiHanson | FlowKind::HitchinContact,
        ) => {
            return Err(inapplicable(
                o,
                "the Eguchi-Hanson profile starts at a1=0, a2=a>0",
            ))
        }
        (Oracle::ClosedForm | Oracle::EhMatch, FlowKind::Flow9) => {
            return Err(inapplicable(o, "flow9 is undefined at the bolt a1=0"))
        }
        (Oracle::Einstein, FlowKind::Dirac { k }) => {
            if rhs::dirac_constraint(y[0], y[1], k).abs() > 1e-12 {
                return Err(inapplicable(o, "initial data violate df² + K f² = 1"));
            }
            Plan::Einstein(k)
        }
        (
            Oracle::Einstein,
            FlowKind::AsdEguchiHanson | FlowKind::HitchinContact | FlowKind::Flow9,
        ) => Plan::Einstein(CurvatureSign::Zero),
        (Oracle::Volume, FlowKind::NormalizedBerger) => Plan::Volume,
        (Oracle::BetaOde, FlowKind::RicciBerger) => Plan::BetaOde,
        (Oracle::Implicit7, FlowKind::RicciBerger) => {
            if !(y[0] > y[1]) {
                return Err(inapplicable(o, "the real branch needs alpha > beta"));
            }
            Plan::Implicit7
        }
        (Oracle::Slopes, FlowKind::RicciBerger) => {
            if !(y[0] > 0.0) {
                return Err(inapplicable(o, "needs alpha(0) > 0"));
            }
            Plan::Slopes
        }
        (Oracle::Prop1, FlowKind::Dirac { k }) => Plan::Prop1(k),
        _ => return Err(inapplicable(o, format!("not defined for flow {flow}"))),
    };
    Ok(p)
}

#[derive(Debug, Serialize)]
struct OracleResult {
    max_abs_deviation: Num,
    location_of_max: Num,
    n_points: usize,
    tolerance: Num,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<Ordered<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl OracleResult {
    fn from_report(r: MatchReport) -> Self {
        Self {
            max_abs_deviation: Num(r.max_abs_deviation),
            location_of_max: Num(r.location_of_max),
            n_points: r.n_points,
            tolerance: Num(r.tolerance),
            passed: r.passed,
            detail: None,
            error: None,
        }
    }

    fn failed(tol: f64, e: &OracleError) -> Self {
        Self {
            max_abs_deviation: Num(f64::INFINITY),
            location_of_max: Num(f64::NAN),
            n_points: 0,
            tolerance: Num(tol),
            passed: false,
            detail: None,
            error: Some(e.to_string()),
        }
    }

    fn with_detail(mut self, d: &[(&str, f64)]) -> Self {
        self.detail = Some(Ordered(
            d.iter().map(|(k, v)| ((*k).to_owned(), Num(*v))).collect(),
        ));
        self
    }
}

fn evaluate(p: &Plan, traj: &Trajectory, tol: f64) -> Result<OracleResult, OracleError> {
    let r = match *p {
        Plan::ClosedForm(kind) => {
            OracleResult::from_report(oracle::closed_form_match(traj, kind, tol)?)
        }
        Plan::EhMatch { a } => OracleResult::from_report(oracle::eh_match(traj, a, tol)?),
        Plan::Einstein(k) => OracleResult::from_report(oracle::einstein_report(traj, k, tol)?),
        Plan::Volume => OracleResult::from_report(oracle::volume_drift(traj, tol)?),
        Plan::BetaOde => {
            let res = oracle::beta_second_order_residual(traj)?;
            OracleResult::from_report(MatchReport::from_deviations(res, tol))
        }
        Plan::Implicit7 => {
            let rep = oracle::implicit7_check(traj)?;
            let detail = [
                ("c1", rep.c1),
                ("c2", rep.c2),
                ("max_rate_residual", rep.max_rate_residual()),
            ];
            OracleResult::from_report(MatchReport::from_deviations(rep.residuals, tol))
                .with_detail(&detail)
        }
        Plan::Slopes => {
            let s = oracle::singularity_slopes(traj)?;
            let dev = (s.dalpha + 8.0).abs().max((s.dbeta + 8.0).abs());
            OracleResult::from_report(MatchReport::from_deviations([(s.t, dev)], tol))
                .with_detail(&[("alpha", s.alpha), ("dalpha", s.dalpha), ("dbeta", s.dbeta)])
        }
        Plan::Prop1(k) => {
            let mut end = traj.last().t;
            if k == CurvatureSign::Positive {
                end = end.min(PI);
            }
            let mut pts = Vec::with_capacity(PROP1_POINTS);
            for i in 0..PROP1_POINTS {
                let t = end * (i as f64 + 0.5) / PROP1_POINTS as f64;
                pts.push((t, verify_prop1(k, t)?));
            }
            OracleResult::from_report(MatchReport::from_deviations(pts, tol))
        }
    };
    Ok(r)
}

#[derive(Debug, Serialize)]
struct Report {
    flow: &'static str,
    k: Option<i32>,
    init: Ordered<Num>,
    t_end: Num,
    step: Num,
    stop: StopJson,
    oracles: Ordered<OracleResult>,
    pass: bool,
    wall_time_s: Num,
}

pub fn verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let started = Instant::now();
    let file = load_config(&args.flow)?;
    let spec = RunSpec::resolve(&args.flow, &file)?;
    let mut selected = Vec::new();
    for name in &args.oracle {
        let o = Oracle::parse(name)?;
        if !selected.iter().any(|(s, _)| *s == o) {
            selected.push((o, plan(o, &spec)?));
        }
    }
    if selected.is_empty() {
        return Err(CliError::usage("no oracle selected"));
    }

    let outcome = integrate_spec(&spec)?;
    let mut results = Vec::new();
    for (o, p) in &selected {
        let tol = args.tol.unwrap_or(o.default_tol());
        let r = evaluate(p, &outcome.traj, tol).unwrap_or_else(|e| OracleResult::failed(tol, &e));
        results.push((o.name().to_owned(), r));
    }
    let pass = results.iter().all(|(_, r)| r.passed) && outcome.note.is_none();
    let report = Report {
        flow: spec.kind.name(),
        k: spec.k(),
        init: init_json(&spec),
        t_end: Num(spec.cfg.t_end),
        step: Num(spec.cfg.step),
        stop: StopJson::from(&outcome.traj.stop),
        oracles: Ordered(results),
        pass,
        wall_time_s: Num(started.elapsed().as_secs_f64()),
    };
    emit(args.report.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)
    })?;
    if let Some(note) = outcome.note {
        eprintln!("s3flow: {note}");
    }
    Ok(if pass { 0 } else { 2 })
}
