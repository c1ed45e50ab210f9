//! Resolution of flags, config file and per-flow defaults into a run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use s3flow::flow::{CurvatureSign, FlowKind, FlowState, IntegratorConfig};

use crate::args::FlowArgs;
use crate::error::CliError;

const CONFIG_KEYS: &[&str] = &[
    "flow",
    "k",
    "init",
    "t_end",
    "step",
    "adaptive",
    "rel_tol",
    "abs_tol",
    "collapse_eps",
    "max_samples",
    "continue_past_collapse",
    "out",
    "format",
];

/// Parsed `key = value` lines.
#[derive(Debug, Default)]
pub struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, CliError> {
        let err = |line: usize, msg: String| CliError::Config {
            path: path.to_owned(),
            line,
            msg,
        };
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(n + 1, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(err(n + 1, format!("unknown key `{key}`")));
            }
            if entries
                .insert(key.clone(), (n + 1, value.trim().to_owned()))
                .is_some()
            {
                return Err(err(n + 1, format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            path: path.to_owned(),
            entries,
        })
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| CliError::Config {
                path: self.path.clone(),
                line: *line,
                msg: format!("cannot parse `{v}` for `{key}`"),
            }),
        }
    }
}

pub fn flow_kind(name: &str, k: Option<i32>) -> Result<FlowKind, CliError> {
    let kind = match name {
        "ricci1" => FlowKind::RicciRound,
        "dirac" => {
            let k = k.ok_or_else(|| CliError::usage("flow `dirac` needs --k -1, 0 or 1"))?;
            let k = CurvatureSign::try_from(k).map_err(|e| CliError::usage(e.to_string()))?;
            return Ok(FlowKind::Dirac { k });
        }
        "ricci2" => FlowKind::RicciBerger,
        "nricci2" => FlowKind::NormalizedBerger,
        "asd" => FlowKind::AsdEguchiHanson,
        "flow9" => FlowKind::Flow9,
        "hitchin" => FlowKind::HitchinContact,
        other => return Err(CliError::usage(format!("unknown flow `{other}`"))),
    };
    if k.is_some() {
        return Err(CliError::usage(format!(
            "--k only applies to dirac, not {name}"
        )));
    }
    Ok(kind)
}

fn default_init(kind: FlowKind) -> Option<Vec<f64>> {
    match kind {
        FlowKind::Dirac { .. } => Some(vec![0.0, 1.0]),
        FlowKind::RicciRound => Some(vec![8f64.sqrt()]),
        FlowKind::AsdEguchiHanson | FlowKind::HitchinContact => Some(vec![0.0, 1.0]),
        _ => None,
    }
}

pub fn default_t_end(kind: FlowKind) -> f64 {
    match kind {
        FlowKind::Dirac {
            k: CurvatureSign::Positive,
        } => 1.5,
        FlowKind::Dirac { .. } => 3.0,
        FlowKind::RicciRound => 2.0,
        FlowKind::RicciBerger | FlowKind::NormalizedBerger => 10.0,
        FlowKind::AsdEguchiHanson | FlowKind::Flow9 | FlowKind::HitchinContact => 2.0,
    }
}

pub fn default_step(kind: FlowKind) -> f64 {
    match kind {
        FlowKind::NormalizedBerger
        | FlowKind::AsdEguchiHanson
        | FlowKind::Flow9
        | FlowKind::HitchinContact => 1e-4,
        _ => 1e-3,
    }
}

/// Parse `name=value,...` against the flow's state layout.
pub fn parse_init(kind: FlowKind, text: Option<&str>) -> Result<Vec<f64>, CliError> {
    let names = kind.var_names();
    let mut vals: Vec<Option<f64>> = vec![None; names.len()];
    for item in text
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("init item `{item}` is not `name=value`")))?;
        let key = key.trim();
        let idx = names.iter().position(|n| *n == key).ok_or_else(|| {
            CliError::usage(format!(
                "unknown init key `{key}` for {}; expected {}",
                kind.name(),
                names.join(", ")
            ))
        })?;
        let v: f64 = value.trim().parse().map_err(|_| {
            CliError::usage(format!("cannot parse init value `{value}` for `{key}`"))
        })?;
        if vals[idx].replace(v).is_some() {
            return Err(CliError::usage(format!("init key `{key}` given twice")));
        }
    }
    if vals.iter().all(Option::is_none) {
        if let Some(d) = default_init(kind) {
            return Ok(d);
        }
    }
    vals.iter()
        .zip(names)
        .map(|(v, n)| v.ok_or_else(|| CliError::usage(format!("missing init value for `{n}`"))))
        .collect()
}

/// A fully resolved integration request.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub kind: FlowKind,
    pub init: Vec<f64>,
    pub cfg: IntegratorConfig,
}

impl RunSpec {
    pub fn resolve(args: &FlowArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let name = match (&args.flow, file.get_str("flow")) {
            (Some(f), _) => f.clone(),
            (None, Some(f)) => f.to_owned(),
            (None, None) => return Err(CliError::usage("--flow is required")),
        };
        let k = match args.k {
            Some(k) => Some(k),
            None => file.get("k")?,
        };
        let kind = flow_kind(&name, k)?;
        let init_text = args.init.as_deref().or(file.get_str("init"));
        let init = parse_init(kind, init_text)?;

        let pick = |flag: Option<f64>, key: &str, default: f64| -> Result<f64, CliError> {
            Ok(match flag {
                Some(v) => v,
                None => file.get(key)?.unwrap_or(default),
            })
        };
        let base = IntegratorConfig::default();
        let cfg = IntegratorConfig {
            step: pick(args.step, "step", default_step(kind))?,
            adaptive: args.adaptive || file.get("adaptive")?.unwrap_or(false),
            rel_tol: pick(args.rel_tol, "rel_tol", base.rel_tol)?,
            abs_tol: pick(args.abs_tol, "abs_tol", base.abs_tol)?,
            t_end: pick(args.t_end, "t_end", default_t_end(kind))?,
            collapse_eps: pick(args.collapse_eps, "collapse_eps", base.collapse_eps)?,
            max_samples: match args.max_samples {
                Some(m) => m,
                None => file.get("max_samples")?.unwrap_or(base.max_samples),
            },
            continue_past_collapse: args.continue_past_collapse
                || file.get("continue_past_collapse")?.unwrap_or(false),
        };
        cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(Self { kind, init, cfg })
    }

    pub fn state(&self) -> FlowState {
        FlowState::new(0.0, self.init.clone())
    }

    /// `name=value` pairs in layout order.
    pub fn init_pairs(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.kind
            .var_names()
            .iter()
            .copied()
            .zip(self.init.iter().copied())
    }

    /// `K` for dirac runs.
    pub fn k(&self) -> Option<i32> {
        match self.kind {
            FlowKind::Dirac { k } => Some(k.value() as i32),
            _ => None,
        }
    }
}

pub fn load_config(args: &FlowArgs) -> Result<ConfigFile, CliError> {
    match &args.config {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}
