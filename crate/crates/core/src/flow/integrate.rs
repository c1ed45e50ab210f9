//! Classical RK4 stepping with collapse detection.
//!
//! Near a collapse the step is capped at a fixed fraction of the predicted
//! time-to-zero `y / |y'|` of every shrinking metric component, so finite-time
//! singularities are approached geometrically instead of being overshot. Once
//! a step carries a component below `collapse_eps`, the crossing is located by
//! bisection on the step length.

use crate::error::FlowError;
use crate::flow::{FlowKind, FlowState};

/// Steps shorter than this are treated as underflow.
pub const STEP_FLOOR: f64 = 1e-12;

/// Fraction of the predicted time-to-collapse allowed per step.
const COLLAPSE_STEP_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Initial (and maximal) step size.
    pub step: f64,
    pub adaptive: bool,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    pub collapse_eps: f64,
    pub max_samples: usize,
    /// Keep integrating past a collapse where the flow admits it; later samples
    /// are flagged non-Riemannian.
    pub continue_past_collapse: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            adaptive: false,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_end: 1.0,
            collapse_eps: 1e-6,
            max_samples: 10_000_000,
            continue_past_collapse: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: &str| Err(FlowError::InvalidConfig(m.to_owned()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.collapse_eps > 0.0) {
            return bad("collapse_eps must be positive");
        }
        if !self.t_end.is_finite() {
            return bad("t_end must be finite");
        }
        if self.max_samples < 2 {
            return bad("max_samples must be at least 2");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ReachedTEnd,
    Collapse { component: &'static str },
    DomainExit,
    StepUnderflow,
}

impl StopReason {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ReachedTEnd => "reached_t_end",
            Self::Collapse { .. } => "collapse",
            Self::DomainExit => "domain_exit",
            Self::StepUnderflow => "step_underflow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopEvent {
    pub reason: StopReason,
    pub t_stop: f64,
}

/// Sampled solution of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: FlowKind,
    pub samples: Vec<FlowState>,
    /// First singular or terminal event. When integration continued past a
    /// collapse this stays the collapse event.
    pub stop: StopEvent,
    /// Index of the first sample computed past a collapse, if any.
    pub nonriemannian_from: Option<usize>,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.samples.last().expect("trajectory is never empty")
    }

    /// Values of one state component.
    pub fn component(&self, index: usize) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(move |s| s.vars[index])
    }

    pub fn is_nonriemannian(&self, index: usize) -> bool {
        self.nonriemannian_from.is_some_and(|from| index >= from)
    }
}

#[derive(Debug)]
enum StepFault {
    Domain { exit: bool },
    NonFinite,
}

struct Stepper {
    kind: FlowKind,
    extended: bool,
    // stage buffers
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    fn new(kind: FlowKind) -> Self {
        let n = kind.dim();
        Self {
            kind,
            extended: false,
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
        }
    }

    fn eval(&self, y: &[f64], dy: &mut [f64]) -> Result<(), StepFault> {
        let res = if self.extended {
            self.kind.rhs_extended(y, dy)
        } else {
            self.kind.rhs(y, dy)
        };
        match res {
            Ok(()) if dy.iter().all(|v| v.is_finite()) => Ok(()),
            Ok(()) => Err(StepFault::NonFinite),
            Err(FlowError::DomainExit(_)) => Err(StepFault::Domain { exit: true }),
            Err(_) => Err(StepFault::Domain { exit: false }),
        }
    }

    /// One classical RK4 step of length `h`; `dy0` is the derivative at `y`.
    fn rk4(&mut self, y: &[f64], dy0: &[f64], h: f64) -> Result<Vec<f64>, StepFault> {
        let n = y.len();
        self.k[0].copy_from_slice(dy0);
        for stage in 1..4 {
            let c = if stage == 3 { h } else { 0.5 * h };
            for ((t, yi), ki) in self.tmp.iter_mut().zip(y).zip(&self.k[stage - 1]) {
                *t = yi + c * ki;
            }
            let (tmp, k) = (&self.tmp, &mut self.k[stage]);
            let res = if self.extended {
                self.kind.rhs_extended(tmp, k)
            } else {
                self.kind.rhs(tmp, k)
            };
            match res {
                Ok(()) if k.iter().all(|v| v.is_finite()) => {}
                Ok(()) => return Err(StepFault::NonFinite),
                Err(FlowError::DomainExit(_)) => return Err(StepFault::Domain { exit: true }),
                Err(_) => return Err(StepFault::Domain { exit: false }),
            }
        }
        let out: Vec<f64> = (0..n)
            .map(|i| {
                y[i] + h / 6.0
                    * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i])
            })
            .collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(StepFault::NonFinite)
        }
    }

    fn rk4_fresh(&mut self, y: &[f64], h: f64) -> Result<Vec<f64>, StepFault> {
        let mut dy = vec![0.0; y.len()];
        self.eval(y, &mut dy)?;
        self.rk4(y, &dy, h)
    }
}

/// Components that start a step at or above the threshold and end it below.
fn crossing(kind: &FlowKind, before: &[f64], after: &[f64], eps: f64) -> Option<usize> {
    kind.metric_components()
        .iter()
        .copied()
        .find(|&i| before[i] >= eps && after[i] < eps)
}

/// Integrate `kind` from `init` until `cfg.t_end`, a collapse, a domain exit
/// or step underflow.
pub fn integrate(
    kind: FlowKind,
    init: &FlowState,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, FlowError> {
    cfg.validate()?;
    let n = kind.dim();
    if init.vars.len() != n {
        return Err(FlowError::InvalidInitialState(format!(
            "{} expects {} components, got {}",
            kind.name(),
            n,
            init.vars.len()
        )));
    }
    if !init.t.is_finite() || init.vars.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::InvalidInitialState("non-finite value".into()));
    }
    if cfg.t_end <= init.t {
        return Err(FlowError::InvalidConfig(
            "t_end must exceed the initial t".into(),
        ));
    }
    let mut probe = vec![0.0; n];
    match kind.rhs(&init.vars, &mut probe) {
        Ok(()) | Err(FlowError::DomainExit(_)) => {}
        Err(e) => return Err(FlowError::InvalidInitialState(e.to_string())),
    }
    if kind.metric_components().iter().any(|&i| init.vars[i] < 0.0) {
        return Err(FlowError::InvalidInitialState(
            "metric scales must be non-negative".into(),
        ));
    }

    let mut stepper = Stepper::new(kind);
    let mut samples = vec![init.clone()];
    let mut t = init.t;
    let mut y = init.vars.clone();
    let mut h_ctrl = cfg.step;
    let mut dy = vec![0.0; n];
    let mut nonriemannian_from = None;
    let mut collapse_event: Option<StopEvent> = None;
    let t_eps = 4.0 * f64::EPSILON * cfg.t_end.abs().max(1.0);
    // while every step is a full nominal step, t is computed as t0 + n·step
    // so that rounding does not accumulate along the grid
    let mut grid_steps: Option<u64> = Some(0);

    let finish =
        |samples: Vec<FlowState>, stop: StopEvent, collapse: Option<StopEvent>, nr| Trajectory {
            kind,
            samples,
            stop: collapse.unwrap_or(stop),
            nonriemannian_from: nr,
        };

    loop {
        if cfg.t_end - t <= t_eps {
            let stop = StopEvent {
                reason: StopReason::ReachedTEnd,
                t_stop: t,
            };
            return Ok(finish(samples, stop, collapse_event, nonriemannian_from));
        }
        if samples.len() >= cfg.max_samples {
            return Err(FlowError::SampleBudgetExceeded {
                max_samples: cfg.max_samples,
            });
        }
        if let Err(fault) = stepper.eval(&y, &mut dy) {
            let reason = match fault {
                StepFault::Domain { .. } => StopReason::DomainExit,
                StepFault::NonFinite => {
                    return Err(FlowError::NonFinite {
                        t,
                        trajectory: Box::new(finish(
                            samples,
                            StopEvent {
                                reason: StopReason::DomainExit,
                                t_stop: t,
                            },
                            collapse_event,
                            nonriemannian_from,
                        )),
                    })
                }
            };
            let stop = StopEvent { reason, t_stop: t };
            return Ok(finish(samples, stop, collapse_event, nonriemannian_from));
        }

        let mut h = h_ctrl.min(cfg.t_end - t);
        if !stepper.extended {
            for &i in kind.metric_components() {
                if y[i] >= cfg.collapse_eps && dy[i] < 0.0 {
                    h = h.min(COLLAPSE_STEP_FRACTION * y[i] / -dy[i]);
                }
            }
        }

        // attempt, halving on faults or rejected error estimates
        let (h_used, y_new) = loop {
            let attempt = if cfg.adaptive {
                adaptive_attempt(&mut stepper, &y, &dy, h, cfg)
            } else {
                stepper.rk4(&y, &dy, h).map(|v| (v, 0.0))
            };
            let fault = match attempt {
                Ok((v, err)) if err <= 1.0 => {
                    if cfg.adaptive {
                        let grow = if err == 0.0 {
                            2.0
                        } else {
                            (0.9 * err.powf(-0.2)).clamp(1.0, 2.0)
                        };
                        h_ctrl = (h * grow).min(cfg.step);
                    }
                    break (h, v);
                }
                Ok(_) => None,
                Err(f) => Some(f),
            };
            h *= 0.5;
            if h < STEP_FLOOR {
                let reason = match fault {
                    Some(StepFault::Domain { exit: true }) => StopReason::DomainExit,
                    Some(StepFault::NonFinite) => {
                        return Err(FlowError::NonFinite {
                            t,
                            trajectory: Box::new(finish(
                                samples,
                                StopEvent {
                                    reason: StopReason::StepUnderflow,
                                    t_stop: t,
                                },
                                collapse_event,
                                nonriemannian_from,
                            )),
                        })
                    }
                    _ => StopReason::StepUnderflow,
                };
                let stop = StopEvent { reason, t_stop: t };
                return Ok(finish(samples, stop, collapse_event, nonriemannian_from));
            }
        };
        let component = if stepper.extended {
            None
        } else {
            crossing(&kind, &y, &y_new, cfg.collapse_eps)
        };
        let Some(first) = component else {
            let next = match grid_steps {
                Some(n) if h_used == cfg.step => {
                    grid_steps = Some(n + 1);
                    init.t + (n + 1) as f64 * cfg.step
                }
                _ => {
                    grid_steps = None;
                    t + h_used
                }
            };
            t = if cfg.t_end - next <= t_eps {
                cfg.t_end
            } else {
                next
            };
            y = y_new;
            samples.push(FlowState::new(t, y.clone()));
            continue;
        };

        // bisection on the step length for the threshold crossing
        let refine = cfg.step * 1e-3;
        let (mut lo, mut hi) = (0.0, h_used);
        let mut y_hi = y_new;
        let mut which = first;
        while hi - lo > refine {
            let mid = 0.5 * (lo + hi);
            match stepper.rk4_fresh(&y, mid) {
                Ok(v) => match crossing(&kind, &y, &v, cfg.collapse_eps) {
                    Some(c) => {
                        hi = mid;
                        which = c;
                        y_hi = v;
                    }
                    None => lo = mid,
                },
                Err(_) => hi = mid,
            }
        }
        // hi may have shrunk onto a faulting step; y_hi still belongs to the
        // last crossing step that succeeded
        let t_stop = t + hi;
        let y_stop = match stepper.rk4_fresh(&y, hi) {
            Ok(v) if crossing(&kind, &y, &v, cfg.collapse_eps).is_some() => v,
            _ => y_hi,
        };
        samples.push(FlowState::new(t_stop, y_stop.clone()));
        let event = StopEvent {
            reason: StopReason::Collapse {
                component: kind.var_names()[which],
            },
            t_stop,
        };
        match kind
            .extend_past_collapse(&y_stop)
            .filter(|_| cfg.continue_past_collapse)
        {
            Some(y_ext) => {
                collapse_event = Some(event);
                stepper.extended = true;
                nonriemannian_from = Some(samples.len());
                t = t_stop;
                y = y_ext;
                h_ctrl = cfg.step;
            }
            None => return Ok(finish(samples, event, None, None)),
        }
    }
}

/// Step doubling: one step of `h` against two of `h/2`. Returns the two-step
/// result and the normalized error estimate (accept when `≤ 1`).
fn adaptive_attempt(
    stepper: &mut Stepper,
    y: &[f64],
    dy: &[f64],
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, f64), StepFault> {
    let full = stepper.rk4(y, dy, h)?;
    let half = stepper.rk4(y, dy, 0.5 * h)?;
    let two = stepper.rk4_fresh(&half, 0.5 * h)?;
    let err = error_norm(&full, &two, cfg);
    Ok((two, err))
}

fn error_norm(a: &[f64], b: &[f64], cfg: &IntegratorConfig) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / 15.0 / (cfg.abs_tol + cfg.rel_tol * y.abs().max(x.abs())))
        .fold(0.0, f64::max)
}
