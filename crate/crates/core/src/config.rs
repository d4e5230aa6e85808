//! Flat `key = value` experiment configuration.
//!
//! One pair per line, `#` starts a comment, keys are dotted paths. Unknown
//! keys are rejected; missing keys take the defaults listed in the README.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::analysis::WeightSpec;
use crate::error::{Error, Result};
use crate::model::{derive_constants, ModelParams};
use crate::solver::{PerturbationSpec, Shape};
use crate::stationary::Regime;

/// Supersonic weight scale used when `weights.<i>.beta = auto`.
pub const DEFAULT_SUPERSONIC_BETA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// `None` selects the regime-dependent default length.
    pub length: Option<f64>,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub t_end: f64,
    pub cfl: f64,
    /// Cadence of `snapshots/*.csv`.
    pub snapshot_interval: f64,
    /// Cadence of the decay series.
    pub sample_interval: f64,
    /// `None` means 20% of `t_end`.
    pub burn_in: Option<f64>,
}

impl RunConfig {
    pub fn burn_in(&self) -> f64 {
        self.burn_in.unwrap_or(0.2 * self.t_end)
    }
}

/// A weight whose scale may be left to the regime (`beta = auto`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConfig {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub order: u8,
}

impl WeightConfig {
    /// `auto` resolves to `B = delta~ A` for transonic data and to
    /// [`DEFAULT_SUPERSONIC_BETA`] otherwise.
    pub fn resolve(&self, p: &ModelParams, regime: Regime) -> Result<WeightSpec> {
        let beta = match (self.beta, regime) {
            (Some(b), _) => b,
            (None, Regime::Transonic) => derive_constants(p)?.b,
            (None, _) => DEFAULT_SUPERSONIC_BETA,
        };
        WeightSpec::new(self.alpha, beta, self.order)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    /// Expected regime; reported as a check when present.
    pub regime_hint: Option<Regime>,
    pub grid: GridConfig,
    pub run: RunConfig,
    pub perturbation: PerturbationSpec,
    /// The first weight drives the decay series and the theoretical exponent.
    pub weights: Vec<WeightConfig>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: ModelParams::default(),
            regime_hint: None,
            grid: GridConfig { length: None, cells: 1024 },
            run: RunConfig {
                t_end: 50.0,
                cfl: 0.8,
                snapshot_interval: 10.0,
                sample_interval: 0.5,
                burn_in: None,
            },
            perturbation: PerturbationSpec {
                shape: Shape::Bump,
                a_rho: 0.01,
                a_u: 0.01,
                a_omega: 0.01,
                center: 4.0,
                width: 3.5,
            },
            weights: vec![WeightConfig { alpha: 2.0, beta: None, order: 0 }],
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("`{key}` expects a number, got `{v}`"),
    })
}

fn parse_auto(line: usize, key: &str, v: &str) -> Result<Option<f64>> {
    if v == "auto" {
        Ok(None)
    } else {
        parse_f64(line, key, v).map(Some)
    }
}

fn parse_regime(line: usize, v: &str) -> Result<Option<Regime>> {
    match v {
        "auto" => Ok(None),
        "supersonic" => Ok(Some(Regime::Supersonic)),
        "transonic" => Ok(Some(Regime::Transonic)),
        "nonexistent" => Ok(Some(Regime::NonExistent)),
        _ => Err(Error::Parse { line, message: format!("unknown regime `{v}`") }),
    }
}

fn parse_shape(line: usize, v: &str) -> Result<Shape> {
    match v {
        "bump" => Ok(Shape::Bump),
        "gaussian" => Ok(Shape::Gaussian),
        "zero" => Ok(Shape::Zero),
        _ => Err(Error::Parse { line, message: format!("unknown shape `{v}`") }),
    }
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

#[derive(Default)]
struct PartialWeight {
    alpha: Option<f64>,
    beta: Option<Option<f64>>,
    order: Option<u8>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut mach = None;
    let mut chi0 = None;
    let mut weights: BTreeMap<usize, PartialWeight> = BTreeMap::new();
    let mut seen = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, got `{body}`"),
        })?;
        let (key, v) = (key.trim(), value.trim());
        if key.is_empty() || v.is_empty() {
            return Err(Error::Parse { line, message: "empty key or value".into() });
        }
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(Error::Parse { line, message: format!("duplicate key `{key}` (first on line {prev})") });
        }
        let num = || parse_f64(line, key, v);
        let p = &mut cfg.params;
        match key {
            "params.lambda" => p.lambda = num()?,
            "params.mu" => p.mu = num()?,
            "params.nu" => p.nu = num()?,
            "params.K" => p.k = num()?,
            "params.gamma" => p.gamma = num()?,
            "params.rho_plus" => p.rho_plus = num()?,
            "params.u_plus" => p.u_plus = num()?,
            "params.u_b" => p.u_b = num()?,
            "params.omega_b" => p.omega_b = num()?,
            "params.mach" => mach = Some(num()?),
            "params.chi0" => chi0 = Some(num()?),
            "regime.hint" => cfg.regime_hint = parse_regime(line, v)?,
            "grid.length" => cfg.grid.length = parse_auto(line, key, v)?,
            "grid.cells" => {
                cfg.grid.cells = v.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("`grid.cells` expects a positive integer, got `{v}`"),
                })?
            }
            "run.t_end" => cfg.run.t_end = num()?,
            "run.cfl" => cfg.run.cfl = num()?,
            "run.snapshot_interval" => cfg.run.snapshot_interval = num()?,
            "run.sample_interval" => cfg.run.sample_interval = num()?,
            "run.burn_in" => cfg.run.burn_in = parse_auto(line, key, v)?,
            "perturbation.shape" => cfg.perturbation.shape = parse_shape(line, v)?,
            "perturbation.a_rho" => cfg.perturbation.a_rho = num()?,
            "perturbation.a_u" => cfg.perturbation.a_u = num()?,
            "perturbation.a_omega" => cfg.perturbation.a_omega = num()?,
            "perturbation.center" => cfg.perturbation.center = num()?,
            "perturbation.width" => cfg.perturbation.width = num()?,
            "output.dir" => cfg.output_dir = PathBuf::from(unquote(v)),
            _ => {
                let parts: Vec<&str> = key.split('.').collect();
                let index = match parts.as_slice() {
                    ["weights", i, _] => i.parse::<usize>().ok(),
                    _ => None,
                };
                let Some(i) = index else {
                    return Err(Error::Parse { line, message: format!("unknown key `{key}`") });
                };
                let w = weights.entry(i).or_default();
                match parts[2] {
                    "alpha" => w.alpha = Some(num()?),
                    "beta" => w.beta = Some(parse_auto(line, key, v)?),
                    "order" => {
                        w.order = Some(v.parse().map_err(|_| Error::Parse {
                            line,
                            message: format!("`{key}` expects 0 or 1, got `{v}`"),
                        })?)
                    }
                    _ => return Err(Error::Parse { line, message: format!("unknown key `{key}`") }),
                }
            }
        }
    }

    if let Some(m) = mach {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Validation(format!("params.mach must be > 0, got {m}")));
        }
        cfg.params = cfg.params.with_mach(m);
    }
    if let Some(c) = chi0 {
        cfg.params.u_b = c * cfg.params.u_plus;
    }
    if !weights.is_empty() {
        let mut list = Vec::with_capacity(weights.len());
        for (expected, (i, w)) in weights.into_iter().enumerate() {
            if i != expected {
                return Err(Error::Validation(format!("weights must be numbered 0, 1, ...; missing weights.{expected}")));
            }
            list.push(WeightConfig {
                alpha: w.alpha.unwrap_or(2.0),
                beta: w.beta.unwrap_or(None),
                order: w.order.unwrap_or(0),
            });
        }
        cfg.weights = list;
    }
    validate(&cfg)?;
    Ok(cfg)
}

/// Checks every invariant of the configuration and its nested types.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let fail = |msg: String| Err(Error::Validation(msg));
    cfg.params.validate()?;
    if let Some(l) = cfg.grid.length {
        if !(l > 0.0 && l.is_finite()) {
            return fail(format!("grid.length must be > 0, got {l}"));
        }
    }
    if cfg.grid.cells < crate::grid::MIN_CELLS {
        return fail(format!("grid.cells must be >= {}, got {}", crate::grid::MIN_CELLS, cfg.grid.cells));
    }
    let r = &cfg.run;
    if !(r.t_end > 0.0 && r.t_end.is_finite()) {
        return fail(format!("run.t_end must be > 0, got {}", r.t_end));
    }
    if !(r.cfl > 0.0 && r.cfl <= 1.0) {
        return fail(format!("run.cfl must lie in (0, 1], got {}", r.cfl));
    }
    if !(r.snapshot_interval > 0.0 && r.snapshot_interval.is_finite()) {
        return fail(format!("run.snapshot_interval must be > 0, got {}", r.snapshot_interval));
    }
    if !(r.sample_interval > 0.0 && r.sample_interval.is_finite()) {
        return fail(format!("run.sample_interval must be > 0, got {}", r.sample_interval));
    }
    let burn = r.burn_in();
    if !(burn >= 0.0 && burn < r.t_end) {
        return fail(format!("run.burn_in must satisfy 0 <= burn_in < t_end, got {burn}"));
    }
    let window = ((r.t_end - burn) / r.sample_interval).floor() as usize + 1;
    if window < crate::analysis::MIN_FIT_SAMPLES {
        return fail(format!(
            "only {window} decay samples after burn-in; need {} (shrink run.sample_interval)",
            crate::analysis::MIN_FIT_SAMPLES
        ));
    }
    let pt = &cfg.perturbation;
    for (name, a) in [("a_rho", pt.a_rho), ("a_u", pt.a_u), ("a_omega", pt.a_omega), ("center", pt.center)] {
        if !a.is_finite() {
            return fail(format!("perturbation.{name} must be finite"));
        }
    }
    if pt.shape != Shape::Zero && !(pt.width > 0.0 && pt.width.is_finite()) {
        return fail(format!("perturbation.width must be > 0, got {}", pt.width));
    }
    if cfg.weights.is_empty() {
        return fail("at least one weight is required".into());
    }
    for (i, w) in cfg.weights.iter().enumerate() {
        WeightSpec::new(w.alpha, w.beta.unwrap_or(0.0), w.order)
            .map_err(|e| Error::Validation(format!("weights.{i}: {e}")))?;
    }
    Ok(())
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_auto(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_else(|| "auto".into())
}

/// Writes a document that [`parse_config`] maps back to an equal config.
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let p = &cfg.params;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("params.lambda", fmt_f(p.lambda));
    kv("params.mu", fmt_f(p.mu));
    kv("params.nu", fmt_f(p.nu));
    kv("params.K", fmt_f(p.k));
    kv("params.gamma", fmt_f(p.gamma));
    kv("params.rho_plus", fmt_f(p.rho_plus));
    kv("params.u_plus", fmt_f(p.u_plus));
    kv("params.u_b", fmt_f(p.u_b));
    kv("params.omega_b", fmt_f(p.omega_b));
    kv("regime.hint", cfg.regime_hint.map(|r| r.as_str()).unwrap_or("auto").into());
    kv("grid.length", fmt_auto(cfg.grid.length));
    kv("grid.cells", cfg.grid.cells.to_string());
    kv("run.t_end", fmt_f(cfg.run.t_end));
    kv("run.cfl", fmt_f(cfg.run.cfl));
    kv("run.snapshot_interval", fmt_f(cfg.run.snapshot_interval));
    kv("run.sample_interval", fmt_f(cfg.run.sample_interval));
    kv("run.burn_in", fmt_auto(cfg.run.burn_in));
    let pt = &cfg.perturbation;
    kv("perturbation.shape", pt.shape.as_str().into());
    kv("perturbation.a_rho", fmt_f(pt.a_rho));
    kv("perturbation.a_u", fmt_f(pt.a_u));
    kv("perturbation.a_omega", fmt_f(pt.a_omega));
    kv("perturbation.center", fmt_f(pt.center));
    kv("perturbation.width", fmt_f(pt.width));
    for (i, w) in cfg.weights.iter().enumerate() {
        kv(&format!("weights.{i}.alpha"), fmt_f(w.alpha));
        kv(&format!("weights.{i}.beta"), fmt_auto(w.beta));
        kv(&format!("weights.{i}.order"), w.order.to_string());
    }
    kv("output.dir", format!("\"{}\"", cfg.output_dir.display()));
    s
}
