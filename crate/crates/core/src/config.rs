//! Scenario files: UTF-8 text, `#` comments, one `section.key = value` per line.
//!
//! ```text
//! model.alpha   = 0.5
//! model.kappa   = 0.5
//! chain.times   = 0.5, 1, 2, 4
//! ```
//!
//! `model.alpha` and `model.kappa` are required; everything else has a
//! default, and the defaults actually used are recorded so they can be echoed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::error::{Error as CrateError, Result};
use crate::hierarchy::{ChainConfig, FractionalParams, InitialDatum};
use crate::lattice::{DispersalKernel, KernelShape, TorusGrid, MAX_TENSOR_ENTRIES};

#[derive(Debug, Error)]
#[error("invalid configuration:\n  {}", .issues.join("\n  "))]
pub struct ConfigError {
    pub issues: Vec<String>,
}

impl ConfigError {
    pub fn single(issue: impl Into<String>) -> Self {
        Self { issues: vec![issue.into()] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitKind {
    Constant,
    Modulated { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub alpha: f64,
    pub kappa: f64,
    pub c: f64,
    pub kernel_shape: KernelShape,
    pub kernel_width: f64,
    pub kernel_mass: f64,
    pub dimension: usize,
    pub length: f64,
    pub points: usize,
    pub n_max: usize,
    pub times: Vec<f64>,
    pub s_nodes: usize,
    pub refine: bool,
    pub init: InitKind,
    pub output_dir: PathBuf,
    /// Reserved; the solver is deterministic.
    pub seed: u64,
    /// Probe points, one coordinate tuple per particle; missing ones are the origin.
    pub report_probe: Vec<Vec<f64>>,
    /// Keys filled from defaults, in file order of the documented key list.
    pub defaults_applied: Vec<String>,
}

const KEYS: &[&str] = &[
    "model.alpha",
    "model.kappa",
    "model.c",
    "kernel.shape",
    "kernel.width",
    "kernel.mass",
    "grid.dimension",
    "grid.length",
    "grid.points",
    "chain.n_max",
    "chain.times",
    "chain.s_nodes",
    "chain.refine",
    "init.kind",
    "init.amplitude",
    "output.dir",
    "run.seed",
    "report.probe",
];

struct Entries {
    values: BTreeMap<String, (usize, String)>,
    issues: Vec<String>,
    defaults: Vec<String>,
}

impl Entries {
    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let (line, v) = self.raw(key)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.issues.push(format!("line {line}: {key}: expected {what}, got `{v}`"));
                None
            }
        }
    }

    fn number(&mut self, key: &str, default: Option<f64>) -> Option<f64> {
        let had = self.values.contains_key(key);
        let v = self.parsed::<f64>(key, "a number");
        match (had, v, default) {
            (true, v, _) => v,
            (false, _, Some(d)) => {
                self.defaults.push(key.to_string());
                Some(d)
            }
            (false, _, None) => {
                self.issues.push(format!("{key}: required key is missing"));
                None
            }
        }
    }

    fn count(&mut self, key: &str, default: usize) -> Option<usize> {
        if !self.values.contains_key(key) {
            self.defaults.push(key.to_string());
            return Some(default);
        }
        self.parsed::<usize>(key, "a non-negative integer")
    }

    fn list(&mut self, key: &str) -> Option<(usize, Vec<f64>)> {
        let (line, v) = self.raw(key)?;
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<f64>() {
                Ok(x) => out.push(x),
                Err(_) => {
                    self.issues.push(format!("line {line}: {key}: `{item}` is not a number"));
                    return None;
                }
            }
        }
        Some((line, out))
    }
}

/// Parses and validates a scenario, reporting every problem found.
pub fn parse_config(text: &str) -> std::result::Result<ScenarioConfig, ConfigError> {
    let mut e = Entries {
        values: BTreeMap::new(),
        issues: Vec::new(),
        defaults: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            e.issues.push(format!("line {line}: expected `section.key = value`, got `{content}`"));
            continue;
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        let well_formed = key
            .split_once('.')
            .is_some_and(|(s, k)| !s.is_empty() && !k.is_empty() && !k.contains('.'));
        if !well_formed {
            e.issues.push(format!("line {line}: key `{key}` is not of the form `section.key`"));
            continue;
        }
        if !KEYS.contains(&key.as_str()) {
            e.issues.push(format!("line {line}: unknown key `{key}`"));
            continue;
        }
        if value.is_empty() {
            e.issues.push(format!("line {line}: {key}: missing value"));
            continue;
        }
        if let Some((first, _)) = e.values.get(&key) {
            e.issues.push(format!("line {line}: {key} already set on line {first}"));
            continue;
        }
        e.values.insert(key, (line, value));
    }

    let alpha = e.number("model.alpha", None);
    let kappa = e.number("model.kappa", None);
    let c = e.number("model.c", Some(1.0));

    let kernel_shape = match e.raw("kernel.shape") {
        Some((line, v)) => KernelShape::parse(&v).or_else(|| {
            e.issues.push(format!(
                "line {line}: kernel.shape: unknown shape `{v}` (expected gaussian, tophat or exponential-decay)"
            ));
            None
        }),
        None => {
            e.defaults.push("kernel.shape".into());
            Some(KernelShape::Gaussian)
        }
    };
    let kernel_width = e.number("kernel.width", Some(1.0));
    let kernel_mass = e.number("kernel.mass", Some(1.0));
    let dimension = e.count("grid.dimension", 1);
    let length = e.number("grid.length", Some(32.0));
    let points = e.count("grid.points", 256);
    let n_max = e.count("chain.n_max", 2);
    let times = match e.list("chain.times") {
        Some((_, t)) => Some(t),
        None if e.issues.iter().any(|s| s.contains("chain.times")) => None,
        None => {
            e.defaults.push("chain.times".into());
            Some(vec![0.5, 1.0, 2.0, 4.0])
        }
    };
    let s_nodes = e.count("chain.s_nodes", 32);
    let refine = if e.values.contains_key("chain.refine") {
        e.parsed::<bool>("chain.refine", "true or false")
    } else {
        e.defaults.push("chain.refine".into());
        Some(true)
    };
    let init = match e.raw("init.kind") {
        None => {
            e.defaults.push("init.kind".into());
            Some("constant".to_string())
        }
        Some((line, v)) => match v.to_ascii_lowercase().as_str() {
            k @ ("constant" | "modulated") => Some(k.to_string()),
            _ => {
                e.issues.push(format!("line {line}: init.kind: expected constant or modulated, got `{v}`"));
                None
            }
        },
    };
    let init = match init.as_deref() {
        Some("modulated") => e.number("init.amplitude", Some(0.5)).map(|amplitude| InitKind::Modulated { amplitude }),
        Some(_) => {
            if let Some((line, _)) = e.raw("init.amplitude") {
                e.issues.push(format!("line {line}: init.amplitude only applies to init.kind = modulated"));
            }
            Some(InitKind::Constant)
        }
        None => None,
    };
    let output_dir = match e.raw("output.dir") {
        Some((_, v)) => PathBuf::from(v),
        None => {
            e.defaults.push("output.dir".into());
            PathBuf::from("out")
        }
    };
    let seed = if e.values.contains_key("run.seed") {
        e.parsed::<u64>("run.seed", "a non-negative integer")
    } else {
        e.defaults.push("run.seed".into());
        Some(0)
    };
    let probe = match e.list("report.probe") {
        Some((line, flat)) => Some((line, flat)),
        None => {
            if !e.issues.iter().any(|s| s.contains("report.probe")) {
                e.defaults.push("report.probe".into());
            }
            Some((0, Vec::new()))
        }
    };

    let mut issues = std::mem::take(&mut e.issues);
    let (
        Some(alpha),
        Some(kappa),
        Some(c),
        Some(kernel_shape),
        Some(kernel_width),
        Some(kernel_mass),
        Some(dimension),
        Some(length),
        Some(points),
        Some(n_max),
        Some(times),
        Some(s_nodes),
        Some(refine),
        Some(init),
        Some(seed),
        Some((probe_line, probe_flat)),
    ) = (
        alpha,
        kappa,
        c,
        kernel_shape,
        kernel_width,
        kernel_mass,
        dimension,
        length,
        points,
        n_max,
        times,
        s_nodes,
        refine,
        init,
        seed,
        probe,
    )
    else {
        // validate what can be validated so the user sees everything at once
        if let Some(a) = alpha {
            check_alpha(a, &mut issues);
        }
        return Err(ConfigError { issues });
    };

    let mut report_probe = Vec::new();
    if dimension == 0 || probe_flat.len() % dimension != 0 {
        issues.push(format!(
            "line {probe_line}: report.probe: {} coordinates do not form points of dimension {dimension}",
            probe_flat.len()
        ));
    } else {
        report_probe = probe_flat.chunks(dimension).map(<[f64]>::to_vec).collect();
    }

    let cfg = ScenarioConfig {
        alpha,
        kappa,
        c,
        kernel_shape,
        kernel_width,
        kernel_mass,
        dimension,
        length,
        points,
        n_max,
        times,
        s_nodes,
        refine,
        init,
        output_dir,
        seed,
        report_probe,
        defaults_applied: e.defaults,
    };
    cfg.collect_issues(&mut issues);
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { issues })
    }
}

fn check_alpha(alpha: f64, issues: &mut Vec<String>) {
    if !(alpha > 0.0 && alpha <= 1.0) {
        issues.push(format!("model.alpha: alpha must lie in (0,1], got {alpha}"));
    }
}

/// Validates a `--times` style list.
pub fn parse_times(text: &str) -> std::result::Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| ConfigError::single(format!("--times: `{s}` is not a number"))))
        .collect()
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CrateError::io(path, e))?;
        Ok(parse_config(&text)?)
    }

    fn collect_issues(&self, issues: &mut Vec<String>) {
        check_alpha(self.alpha, issues);
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            issues.push(format!("model.kappa: kappa must be positive, got {}", self.kappa));
        }
        if !(self.c >= 1.0) || !self.c.is_finite() {
            issues.push(format!("model.c: C must be at least 1, got {}", self.c));
        }
        if !(self.kernel_width > 0.0) || !self.kernel_width.is_finite() {
            issues.push(format!("kernel.width: width must be positive, got {}", self.kernel_width));
        }
        if !(self.kernel_mass > 0.0) || !self.kernel_mass.is_finite() {
            issues.push(format!("kernel.mass: mass must be positive, got {}", self.kernel_mass));
        }
        if !(1..=2).contains(&self.dimension) {
            issues.push(format!("grid.dimension: dimension must be 1 or 2, got {}", self.dimension));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            issues.push(format!("grid.length: length must be positive, got {}", self.length));
        } else if self.kernel_width > 0.0 && self.length < 20.0 * self.kernel_width {
            issues.push(format!(
                "grid.length: torus length {} must be at least 20 kernel widths ({})",
                self.length,
                20.0 * self.kernel_width
            ));
        }
        if self.points < 2 {
            issues.push(format!("grid.points: need at least 2 points per axis, got {}", self.points));
        }
        let cap = if self.dimension == 2 { 2 } else { 3 };
        if self.n_max == 0 || self.n_max > cap {
            issues.push(format!(
                "chain.n_max: N_max must lie in 1..={cap} for d = {}, got {}",
                self.dimension, self.n_max
            ));
        } else if (1..=2).contains(&self.dimension) && self.points >= 2 {
            let stored = match self.init {
                InitKind::Constant => self.n_max - 1,
                InitKind::Modulated { .. } => self.n_max,
            };
            let entries = (self.points as f64).powi((self.dimension * stored) as i32);
            if entries > MAX_TENSOR_ENTRIES as f64 {
                issues.push(format!(
                    "chain.n_max: order {} on {}^{} points needs {entries:.0} tensor entries (limit {MAX_TENSOR_ENTRIES})",
                    self.n_max, self.points, self.dimension
                ));
            }
        }
        let mut prev = 0.0;
        for &t in &self.times {
            if !(t > prev) || !t.is_finite() {
                issues.push(format!(
                    "chain.times: times must be finite, positive and strictly increasing; {t} follows {prev}"
                ));
                break;
            }
            prev = t;
        }
        if self.s_nodes < 2 {
            issues.push(format!("chain.s_nodes: need at least 2 Volterra nodes, got {}", self.s_nodes));
        }
        if let InitKind::Modulated { amplitude } = self.init {
            if !(0.0..=1.0).contains(&amplitude) {
                issues.push(format!("init.amplitude: amplitude must lie in [0, 1], got {amplitude}"));
            }
        }
        if self.report_probe.len() > self.n_max {
            issues.push(format!(
                "report.probe: {} probe points given but N_max is {}",
                self.report_probe.len(),
                self.n_max
            ));
        }
        let half = 0.5 * self.length;
        for p in &self.report_probe {
            if p.iter().any(|x| !(x.abs() <= half)) {
                issues.push(format!("report.probe: point {p:?} lies outside the torus [-{half}, {half}]"));
            }
        }
    }

    /// Replaces the time list and re-validates.
    pub fn with_times(mut self, times: Vec<f64>) -> std::result::Result<Self, ConfigError> {
        self.times = times;
        self.defaults_applied.retain(|k| k != "chain.times");
        let mut issues = Vec::new();
        self.collect_issues(&mut issues);
        if issues.is_empty() {
            Ok(self)
        } else {
            Err(ConfigError { issues })
        }
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dimension, self.length, self.points)
    }

    pub fn kernel(&self) -> Result<DispersalKernel> {
        DispersalKernel::sample(self.kernel_shape, self.kernel_width, self.kernel_mass, self.grid()?)
    }

    pub fn params(&self) -> Result<FractionalParams> {
        FractionalParams::new(self.alpha, self.kappa, self.c)
    }

    pub fn chain_config(&self) -> Result<ChainConfig> {
        let kernel = self.kernel()?;
        let grid = *kernel.grid();
        let probe = self.report_probe.iter().map(|p| grid.snap(p)).collect::<Result<Vec<_>>>()?;
        let mut cfg = ChainConfig::new(self.n_max, self.times.clone(), self.params()?, kernel);
        cfg.s_nodes = self.s_nodes;
        cfg.refinement_check = self.refine;
        cfg.probe = probe;
        cfg.initial = match self.init {
            InitKind::Constant => InitialDatum::Constant,
            InitKind::Modulated { amplitude } => InitialDatum::Modulated { amplitude },
        };
        Ok(cfg)
    }

    /// The resolved configuration in the input format; defaulted keys are marked.
    pub fn echo(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut values: Vec<(&str, String)> = vec![
            ("model.alpha", format!("{:?}", self.alpha)),
            ("model.kappa", format!("{:?}", self.kappa)),
            ("model.c", format!("{:?}", self.c)),
            ("kernel.shape", self.kernel_shape.name().to_string()),
            ("kernel.width", format!("{:?}", self.kernel_width)),
            ("kernel.mass", format!("{:?}", self.kernel_mass)),
            ("grid.dimension", self.dimension.to_string()),
            ("grid.length", format!("{:?}", self.length)),
            ("grid.points", self.points.to_string()),
            ("chain.n_max", self.n_max.to_string()),
            ("chain.times", join(&self.times)),
            ("chain.s_nodes", self.s_nodes.to_string()),
            ("chain.refine", self.refine.to_string()),
        ];
        match self.init {
            InitKind::Constant => values.push(("init.kind", "constant".into())),
            InitKind::Modulated { amplitude } => {
                values.push(("init.kind", "modulated".into()));
                values.push(("init.amplitude", format!("{amplitude:?}")));
            }
        }
        values.push(("output.dir", self.output_dir.display().to_string()));
        values.push(("run.seed", self.seed.to_string()));
        let probe = join(&self.report_probe.concat());

        let mut out = String::new();
        for (k, v) in values {
            let mark = if self.defaults_applied.iter().any(|d| d == k) {
                "  # default"
            } else {
                ""
            };
            let _ = writeln!(out, "{k} = {v}{mark}");
        }
        if probe.is_empty() {
            out.push_str("# report.probe: origin  # default\n");
        } else {
            let _ = writeln!(out, "report.probe = {probe}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("model.alpha = 0.5\nmodel.kappa = 0.5\n").unwrap();
        assert_eq!(cfg.dimension, 1);
        assert_eq!(cfg.points, 256);
        assert_eq!(cfg.n_max, 2);
        assert_eq!(cfg.kernel_mass, 1.0);
        assert!(cfg.defaults_applied.iter().any(|k| k == "kernel.mass"));
        assert!(cfg.echo().contains("kernel.mass = 1.0  # default"));
        let mut again = parse_config(&cfg.echo()).unwrap();
        assert!(again.defaults_applied.iter().all(|k| k == "report.probe"));
        again.defaults_applied = cfg.defaults_applied.clone();
        assert_eq!(again, cfg);
    }

    #[test]
    fn all_issues_reported() {
        let err = parse_config("model.alpha = 1.5\nmodel.kappa = -1\nkernel.shape = square\nbogus\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("alpha must lie in (0,1]"), "{text}");
        assert!(text.contains("kernel.shape"), "{text}");
        assert!(text.contains("line 4"), "{text}");
        let err = parse_config("model.alpha = 1.5\nmodel.kappa = -1\n").unwrap_err();
        assert_eq!(err.issues.len(), 2, "{err}");
    }

    #[test]
    fn echo_round_trips() {
        let text = "model.alpha = 0.7 # memory\nmodel.kappa=1.5\ninit.kind = modulated\nreport.probe = 0, 1.5\nchain.n_max = 2\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&cfg.echo()).unwrap();
        assert_eq!(cfg.report_probe, again.report_probe);
        assert_eq!(cfg.init, InitKind::Modulated { amplitude: 0.5 });
        assert_eq!(again.init, cfg.init);
        assert_eq!(again.times, cfg.times);
    }

    #[test]
    fn duplicate_and_unknown_keys() {
        let err = parse_config("model.alpha = 0.5\nmodel.alpha = 0.6\nmodel.kappa = 1\nmodel.beta = 2\n").unwrap_err();
        assert_eq!(err.issues.len(), 2, "{err}");
    }
}
