//! Scenario configuration: a JSON document with CLI overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Scenario {
    /// Constant Hamiltonian `½ω r·σ`.
    Unitary,
    /// Pauli rates, constant or from a preset.
    Pauli,
    /// Pauli rates plus a σ3 Hamiltonian.
    PauliHamiltonian,
    /// Switched planar generator without time ordering.
    Remark4,
    /// The self-dual covariant family with parameter `C`.
    CovariantExample4,
    /// Constant GKSL generator given entrywise.
    Custom,
}

impl Scenario {
    /// Accepted parameters with their defaults.
    pub fn defaults(self) -> &'static [(&'static str, ParamDefault)] {
        use ParamDefault::{Number as N, Text as T};
        match self {
            Scenario::Unitary => &[("omega", N(1.0)), ("rx", N(0.0)), ("ry", N(0.0)), ("rz", N(1.0))],
            Scenario::Pauli => &[("preset", T("constant")), ("gamma1", N(1.0)), ("gamma2", N(1.0)), ("gamma3", N(1.0))],
            Scenario::PauliHamiltonian => {
                &[("preset", T("constant")), ("gamma1", N(1.0)), ("gamma2", N(1.0)), ("gamma3", N(1.0)), ("omega", N(2.0))]
            }
            Scenario::Remark4 => &[],
            Scenario::CovariantExample4 => &[("C", N(1.5))],
            Scenario::Custom => &[
                ("omega_x", N(0.0)),
                ("omega_y", N(0.0)),
                ("omega_z", N(0.0)),
                ("k11", N(0.0)),
                ("k22", N(0.0)),
                ("k33", N(0.0)),
                ("k12_re", N(0.0)),
                ("k12_im", N(0.0)),
                ("k13_re", N(0.0)),
                ("k13_im", N(0.0)),
                ("k23_re", N(0.0)),
                ("k23_im", N(0.0)),
            ],
        }
    }
}

/// Default value of a scenario parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamDefault {
    Number(f64),
    Text(&'static str),
}

/// A scenario parameter: a number or a named preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl ParamValue {
    /// Numbers, or strings such as `pi/8`, `3pi/4` and `0.25`.
    pub fn parse(raw: &str) -> Self {
        match parse_number(raw) {
            Ok(x) => ParamValue::Number(x),
            Err(_) => ParamValue::Text(raw.to_string()),
        }
    }
}

/// Parses a float, also accepting multiples of π such as `pi/8` or `-3pi/4`.
pub fn parse_number(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    let lower = s.to_ascii_lowercase().replace('π', "pi");
    let (head, den) = match lower.split_once('/') {
        Some((h, d)) => (h.to_string(), d.trim().parse::<f64>().map_err(|_| format!("invalid number `{raw}`"))?),
        None => (lower.clone(), 1.0),
    };
    let coef = head.trim().strip_suffix("pi").ok_or_else(|| format!("invalid number `{raw}`"))?.trim().trim_end_matches('*');
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("invalid number `{raw}`"))?,
    };
    Ok(coef * PI / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t_max: f64,
    pub steps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { t_max: 10.0, steps: 1000 }
    }
}

/// Reference basis `n = (sin χ cos ξ, sin χ sin ξ, cos χ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisConfig {
    pub chi: f64,
    pub xi: f64,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self { chi: PI / 2.0, xi: 0.0 }
    }
}

/// Classical states `ρ_p`, `ρ_q` and the prior `μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatesConfig {
    pub p: [f64; 2],
    pub q: [f64; 2],
    pub mu: f64,
}

impl Default for StatesConfig {
    fn default() -> Self {
        Self { p: [1.0, 0.0], q: [0.0, 1.0], mu: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Slack on divisibility margins.
    pub divisibility: f64,
    /// `|2T_00 − 1|` below this marks a singular point.
    pub singular: f64,
    /// Growth rate above which a series counts as reviving.
    pub revival: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { divisibility: 1e-9, singular: 1e-12, revival: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub trajectory: String,
    pub summary: String,
    pub sweep: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), trajectory: "trajectory.csv".into(), summary: "summary.json".into(), sweep: "sweep.csv".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default)]
    pub states: StatesConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    /// Scan the default basis grid for classical divisibility.
    #[serde(default = "yes")]
    pub witness: bool,
}

fn yes() -> bool {
    true
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            params: BTreeMap::new(),
            grid: GridConfig::default(),
            basis: BasisConfig::default(),
            states: StatesConfig::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
            witness: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Checks parameter names, ranges and the grid.
    pub fn validate(&self) -> Result<(), CliError> {
        let known = self.scenario.defaults();
        for (key, value) in &self.params {
            let Some((_, default)) = known.iter().find(|(k, _)| k == key) else {
                let names: Vec<&str> = known.iter().map(|(k, _)| *k).collect();
                return Err(CliError::Config(format!("unknown parameter `{key}` for {:?}; expected one of {names:?}", self.scenario)));
            };
            let same_kind = matches!((value, default), (ParamValue::Number(x), ParamDefault::Number(_)) if x.is_finite())
                || matches!((value, default), (ParamValue::Text(_), ParamDefault::Text(_)));
            if !same_kind {
                return Err(CliError::Config(format!("parameter `{key}` has the wrong type: {value:?}")));
            }
        }
        if let Some(ParamValue::Text(p)) = self.params.get("preset") {
            if !["constant", "eternal"].contains(&p.as_str()) {
                return Err(CliError::Config(format!("unknown rate preset `{p}`; expected `constant` or `eternal`")));
            }
        }
        if !(self.grid.t_max > 0.0 && self.grid.t_max.is_finite()) || self.grid.steps == 0 {
            return Err(CliError::Config(format!("grid needs t_max > 0 and steps ≥ 1, got {:?}", self.grid)));
        }
        let probs = |v: &[f64; 2]| v.iter().all(|x| *x >= 0.0) && (v[0] + v[1] - 1.0).abs() < 1e-12;
        if !probs(&self.states.p) || !probs(&self.states.q) {
            return Err(CliError::Config("states.p and states.q must be probability vectors".into()));
        }
        if !(0.0..=1.0).contains(&self.states.mu) {
            return Err(CliError::Config(format!("prior mu = {} outside [0, 1]", self.states.mu)));
        }
        let t = &self.tolerances;
        if [t.divisibility, t.singular, t.revival].iter().any(|x| !(*x >= 0.0)) {
            return Err(CliError::Config("tolerances must be non-negative".into()));
        }
        Ok(())
    }

    /// Numeric parameter, falling back to the scenario default.
    pub fn number(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(ParamValue::Number(x)) => *x,
            _ => match self.scenario.defaults().iter().find(|(k, _)| *k == key) {
                Some((_, ParamDefault::Number(x))) => *x,
                _ => panic!("no numeric parameter `{key}`"),
            },
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(ParamValue::Text(s)) => s,
            _ => match self.scenario.defaults().iter().find(|(k, _)| *k == key) {
                Some((_, ParamDefault::Text(s))) => s,
                _ => panic!("no text parameter `{key}`"),
            },
        }
    }

    /// Sets a sweepable quantity: a scenario parameter, or one of `chi`,
    /// `xi`, `mu`, `t_max`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        match key {
            "chi" => self.basis.chi = value,
            "xi" => self.basis.xi = value,
            "mu" => self.states.mu = value,
            "t_max" => self.grid.t_max = value,
            _ if self.scenario.defaults().iter().any(|(k, d)| *k == key && matches!(d, ParamDefault::Number(_))) => {
                self.params.insert(key.to_string(), ParamValue::Number(value));
            }
            _ => return Err(CliError::Config(format!("cannot sweep `{key}` in {:?}", self.scenario))),
        }
        Ok(())
    }
}

/// `key:start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn parse(raw: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("sweep must look like key:start:stop:count, got `{raw}`"));
        let parts: Vec<&str> = raw.split(':').collect();
        let [key, start, stop, count] = parts.as_slice() else { return Err(bad()) };
        let start = parse_number(start).map_err(|_| bad())?;
        let stop = parse_number(stop).map_err(|_| bad())?;
        let count: usize = count.parse().map_err(|_| bad())?;
        if key.is_empty() || count == 0 {
            return Err(bad());
        }
        Ok(Self { key: key.to_string(), start, stop, count })
    }

    /// Evenly spaced values including both ends.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        (0..self.count).map(|i| self.start + span * i as f64 / (self.count - 1) as f64).collect()
    }
}
