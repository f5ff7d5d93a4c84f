//! Run configuration: config-file entries overridden by flags, validated
//! before dispatch.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use idm_core::{truncation_dimension, CoherentSpec, ProbeAngles};

use crate::args::Common;
use crate::error::{CliError, CliResult};
use crate::table::Format;

pub const SCHEMA_VERSION: &str = "1";
pub const MAX_DIM: usize = 512;
pub const TRUNCATION_EPS: f64 = 1e-12;

const KNOWN_KEYS: [&str; 21] = [
    "model",
    "system",
    "omega",
    "mu",
    "gamma",
    "t",
    "t-grid",
    "theta",
    "phi",
    "alpha",
    "dim",
    "c",
    "x",
    "measure-theta",
    "measure-phi",
    "M",
    "rounds",
    "seed",
    "guess",
    "out",
    "format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Mid,
    Gnd,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Mid => "mid",
            Model::Gnd => "gnd",
        }
    }

    pub fn param_name(self) -> &'static str {
        match self {
            Model::Mid => "mu",
            Model::Gnd => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Qubit,
    Oscillator,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Qubit => "qubit",
            System::Oscillator => "oscillator",
        }
    }
}

/// `lo:hi:points[:log]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub log: bool,
}

impl Grid {
    pub fn parse(key: &str, s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(CliError::key(key, format!("expected lo:hi:points[:log], got `{s}`")));
        }
        let lo = parse_real(key, parts[0])?;
        let hi = parse_real(key, parts[1])?;
        let points: usize = parts[2]
            .parse()
            .map_err(|_| CliError::key(key, format!("point count `{}` is not a non-negative integer", parts[2])))?;
        let log = match parts.get(3) {
            None | Some(&"lin") => false,
            Some(&"log") => true,
            Some(other) => {
                return Err(CliError::key(
                    key,
                    format!("spacing must be `lin` or `log`, got `{other}`"),
                ))
            }
        };
        if points == 0 {
            return Err(CliError::key(key, "needs at least one point"));
        }
        if points == 1 && lo != hi {
            return Err(CliError::key(key, "a single-point grid needs lo == hi"));
        }
        if points > 1 && !(lo < hi) {
            return Err(CliError::key(key, format!("needs lo < hi, got {lo} and {hi}")));
        }
        if log && !(lo > 0.0) {
            return Err(CliError::key(key, "log spacing needs lo > 0"));
        }
        Ok(Grid { lo, hi, points, log })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let f = i as f64 / n;
                if i + 1 == self.points {
                    self.hi
                } else if self.log {
                    (self.lo.ln() + f * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + f * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

/// Reals, optionally as multiples of pi: `0.5`, `pi`, `-pi/2`, `3pi/4`, `0.25*pi`.
pub fn parse_real(key: &str, s: &str) -> CliResult<f64> {
    let s = s.trim();
    let bad = || CliError::key(key, format!("`{s}` is not a number"));
    let v = if let Ok(v) = s.parse::<f64>() {
        v
    } else if let Some((pre, post)) = s.split_once("pi") {
        let pre = pre.trim_end_matches('*');
        let factor = match pre {
            "" | "+" => 1.0,
            "-" => -1.0,
            p => p.parse::<f64>().map_err(|_| bad())?,
        };
        let divisor = match post {
            "" => 1.0,
            p => p
                .strip_prefix('/')
                .and_then(|d| d.parse::<f64>().ok())
                .ok_or_else(bad)?,
        };
        factor * PI / divisor
    } else {
        return Err(bad());
    };
    if !v.is_finite() {
        return Err(CliError::key(key, format!("must be finite, got {s}")));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(key: &str, s: &str) -> CliResult<T> {
    s.trim()
        .parse()
        .map_err(|_| CliError::key(key, format!("`{s}` is not a non-negative integer")))
}

/// Reads `key = value` lines; `#` starts a comment. `schema` must be present.
pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    let mut schema = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
        let key = key.trim();
        let value = value.trim().trim_matches('"').to_string();
        if key == "schema" {
            schema = Some(value);
            continue;
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
        }
        if map.insert(key.to_string(), value).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key `{key}`", i + 1)));
        }
    }
    match schema.as_deref() {
        Some(SCHEMA_VERSION) => Ok(map),
        Some(v) => Err(CliError::key(
            "schema",
            format!("unsupported version `{v}` (expected {SCHEMA_VERSION})"),
        )),
        None => Err(CliError::key(
            "schema",
            format!("missing; add `schema = {SCHEMA_VERSION}`"),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Option<Model>,
    pub system: System,
    pub omega: f64,
    pub mu: Option<f64>,
    pub gamma: Option<f64>,
    pub t: Option<f64>,
    pub t_grid: Option<Grid>,
    pub theta: f64,
    pub phi: f64,
    pub alpha: CoherentSpec,
    pub alpha_given: bool,
    pub dim: Option<usize>,
    pub c: Option<f64>,
    pub x: Option<f64>,
    pub measure_theta: f64,
    pub measure_phi: f64,
    pub shots: Option<u64>,
    pub rounds: Option<usize>,
    pub seed: Option<u64>,
    pub guess: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn check(key: &str, v: f64, ok: bool, rule: &str) -> CliResult<f64> {
    if ok {
        Ok(v)
    } else {
        Err(CliError::key(key, format!("must be {rule}, got {v}")))
    }
}

impl RunConfig {
    pub fn resolve(common: &Common) -> CliResult<Self> {
        let mut map = match &common.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        for (key, value) in common.flag_entries() {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> CliResult<Self> {
        if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::Config(format!("unknown key `{k}`")));
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let real = |k: &str| get(k).map(|s| parse_real(k, s)).transpose();

        let model = match get("model") {
            None => None,
            Some("mid") => Some(Model::Mid),
            Some("gnd") => Some(Model::Gnd),
            Some(v) => return Err(CliError::key("model", format!("expected `mid` or `gnd`, got `{v}`"))),
        };
        let system = match get("system") {
            None | Some("qubit") => System::Qubit,
            Some("oscillator") => System::Oscillator,
            Some(v) => {
                return Err(CliError::key(
                    "system",
                    format!("expected `qubit` or `oscillator`, got `{v}`"),
                ))
            }
        };
        let format = match get("format") {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(v) => return Err(CliError::key("format", format!("expected `csv` or `json`, got `{v}`"))),
        };

        let omega = real("omega")?.unwrap_or(1.0);
        check("omega", omega, omega > 0.0, "> 0")?;
        let mu = real("mu")?.map(|v| check("mu", v, v >= 0.0, ">= 0")).transpose()?;
        let gamma = real("gamma")?
            .map(|v| check("gamma", v, v >= 0.0, ">= 0"))
            .transpose()?;
        let t = real("t")?.map(|v| check("t", v, v >= 0.0, ">= 0")).transpose()?;
        let c = real("c")?.map(|v| check("c", v, v >= 0.0, ">= 0")).transpose()?;
        let x = real("x")?.map(|v| check("x", v, v >= 0.0, ">= 0")).transpose()?;
        let guess = real("guess")?.map(|v| check("guess", v, v > 0.0, "> 0")).transpose()?;
        let theta = real("theta")?.unwrap_or(PI / 2.0);
        check("theta", theta, (0.0..=PI).contains(&theta), "in [0, pi]")?;
        let phi = real("phi")?.unwrap_or(0.0);
        let measure_theta = real("measure-theta")?.unwrap_or(PI / 2.0);
        check(
            "measure-theta",
            measure_theta,
            (0.0..=PI).contains(&measure_theta),
            "in [0, pi]",
        )?;
        let measure_phi = real("measure-phi")?.unwrap_or(0.0);

        let t_grid = get("t-grid").map(|s| Grid::parse("t-grid", s)).transpose()?;
        if let Some(g) = &t_grid {
            check("t-grid", g.lo, g.lo >= 0.0, "non-negative")?;
        }
        if t.is_some() && t_grid.is_some() {
            return Err(CliError::key("t", "conflicts with `t-grid`; give one of them"));
        }
        if let (Some(_), Some(other)) = (t, x.map(|_| "x").or(c.map(|_| "c"))) {
            return Err(CliError::key(
                "t",
                format!("conflicts with `{other}`; give one of them"),
            ));
        }
        if x.is_some() && c.is_some() {
            return Err(CliError::key("c", "conflicts with `x`; both set mu omega^2 t"));
        }
        match model {
            Some(Model::Mid) if gamma.is_some() => {
                return Err(CliError::key("gamma", "does not apply to model mid (use `mu`)"))
            }
            Some(Model::Gnd) if mu.is_some() => {
                return Err(CliError::key("mu", "does not apply to model gnd (use `gamma`)"))
            }
            Some(Model::Gnd) if c.is_some() => return Err(CliError::key("c", "is a MID variable; use `x` for gnd")),
            _ => {}
        }

        let (alpha, alpha_given) = match get("alpha") {
            None => (CoherentSpec::real(1.0), false),
            Some(s) => {
                let parts: Vec<&str> = s.split(',').collect();
                let spec = match parts.as_slice() {
                    [re] => CoherentSpec::new(parse_real("alpha", re)?, 0.0),
                    [re, im] => CoherentSpec::new(parse_real("alpha", re)?, parse_real("alpha", im)?),
                    _ => return Err(CliError::key("alpha", format!("expected `re` or `re,im`, got `{s}`"))),
                };
                (spec, true)
            }
        };
        let dim = get("dim").map(|s| parse_int::<usize>("dim", s)).transpose()?;
        if let Some(d) = dim {
            if d == 0 || d > MAX_DIM {
                return Err(CliError::key("dim", format!("must be in [1, {MAX_DIM}], got {d}")));
            }
        }
        let shots = get("M").map(|s| parse_int::<u64>("M", s)).transpose()?;
        let rounds = get("rounds").map(|s| parse_int::<usize>("rounds", s)).transpose()?;
        if let Some(r) = rounds {
            if r > 100_000 {
                return Err(CliError::key("rounds", format!("must be <= 100000, got {r}")));
            }
        }
        let seed = get("seed").map(|s| parse_int::<u64>("seed", s)).transpose()?;
        let out = get("out").map(PathBuf::from);

        Ok(RunConfig {
            model,
            system,
            omega,
            mu,
            gamma,
            t,
            t_grid,
            theta,
            phi,
            alpha,
            alpha_given,
            dim,
            c,
            x,
            measure_theta,
            measure_phi,
            shots,
            rounds,
            seed,
            guess,
            out,
            format,
        })
    }

    pub fn require_model(&self) -> CliResult<Model> {
        self.model
            .ok_or_else(|| CliError::key("model", "required (`mid` or `gnd`)"))
    }

    /// Decoherence parameter of `model`, default 0.1.
    pub fn param(&self, model: Model) -> f64 {
        match model {
            Model::Mid => self.mu.unwrap_or(0.1),
            Model::Gnd => self.gamma.unwrap_or(0.1),
        }
    }

    /// Scaling variable set directly (`x`, or `c` for MID).
    pub fn scaling(&self) -> Option<f64> {
        self.x.or(self.c)
    }

    /// Evolution time: `t`, or derived from `x`/`c`; default 1.
    pub fn time(&self, model: Model) -> CliResult<f64> {
        if let Some(t) = self.t {
            return Ok(t);
        }
        let Some(s) = self.scaling() else { return Ok(1.0) };
        let lambda = self.param(model);
        if lambda == 0.0 {
            return Err(CliError::key(
                model.param_name(),
                "must be > 0 when the time is set through `x` or `c`",
            ));
        }
        Ok(match model {
            Model::Mid => s / (lambda * self.omega * self.omega),
            Model::Gnd => s / (lambda * self.omega),
        })
    }

    pub fn times(&self, default: Grid) -> Vec<f64> {
        match (self.t, &self.t_grid) {
            (Some(t), _) => vec![t],
            (None, Some(g)) => g.values(),
            (None, None) => default.values(),
        }
    }

    pub fn probe(&self) -> CliResult<ProbeAngles> {
        Ok(ProbeAngles::new(self.theta, self.phi)?)
    }

    pub fn measurement(&self) -> CliResult<ProbeAngles> {
        Ok(ProbeAngles::new(self.measure_theta, self.measure_phi)?)
    }

    /// `dim`, or the smallest truncation discarding less than 1e-12 of the coherent mass.
    pub fn dim_for(&self, alpha: &CoherentSpec) -> CliResult<usize> {
        match self.dim {
            Some(d) => Ok(d),
            None => {
                let d = truncation_dimension(alpha, TRUNCATION_EPS)?;
                if d > MAX_DIM {
                    return Err(CliError::key("alpha", format!("needs dim {d} > {MAX_DIM}")));
                }
                Ok(d)
            }
        }
    }
}
