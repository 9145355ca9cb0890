//! Run configuration: flat `key = value` files, command-line overrides and
//! validation into the library's parameter types.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cellbath::mean_field::curie_temperature;
use cellbath::model::{AtomParams, FieldVector, LatticeSpec, ThermalPoint};
use cellbath::spin::SpinMagnitude;

use crate::CliError;

/// Keys accepted in config files, in canonical order.
pub const KEYS: &[&str] = &[
    "spin",
    "coupling_sum",
    "eta",
    "temperature",
    "hx",
    "hy",
    "hz",
    "omega0",
    "alpha",
    "gamma",
    "lambda",
    "t_max",
    "n_points",
    "initial",
    "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Ground,
    Plus,
    BellPair,
}

impl FromStr for InitialState {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ground" => Ok(InitialState::Ground),
            "plus" | "plus-superposition" => Ok(InitialState::Plus),
            "bell" | "bell-pair" => Ok(InitialState::BellPair),
            other => Err(CliError::Config(format!(
                "unknown initial state '{other}' (expected ground, plus or bell-pair)"
            ))),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialState::Ground => "ground",
            InitialState::Plus => "plus",
            InitialState::BellPair => "bell-pair",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spin: SpinMagnitude,
    pub coupling_sum: f64,
    pub eta: usize,
    pub temperature: f64,
    pub field: FieldVector,
    pub omega0: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub t_max: f64,
    pub n_points: usize,
    pub initial: Option<InitialState>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spin: SpinMagnitude::HALF,
            coupling_sum: 6.0,
            eta: 8,
            temperature: 2.0,
            field: FieldVector::along_z(0.5),
            omega0: 2.0,
            alpha: 0.0,
            gamma: 0.0,
            lambda: 1.0,
            t_max: 50.0,
            n_points: 1001,
            initial: None,
            output: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "spin" => {
                self.spin = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("invalid spin '{value}'")))?
            }
            "coupling_sum" => self.coupling_sum = parse_num(key, value)?,
            "eta" => self.eta = parse_num(key, value)?,
            "temperature" => self.temperature = parse_num(key, value)?,
            "hx" => self.field.hx = parse_num(key, value)?,
            "hy" => self.field.hy = parse_num(key, value)?,
            "hz" => self.field.hz = parse_num(key, value)?,
            "omega0" => self.omega0 = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "lambda" => self.lambda = parse_num(key, value)?,
            "t_max" => self.t_max = parse_num(key, value)?,
            "n_points" => self.n_points = parse_num(key, value)?,
            "initial" => self.initial = Some(value.parse()?),
            "output" => self.output = Some(PathBuf::from(value.trim())),
            other => return Err(CliError::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return bad("temperature must be positive");
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad("t_max must be positive");
        }
        if self.n_points < 2 {
            return bad("n_points must be at least 2");
        }
        if !(self.coupling_sum.is_finite() && self.coupling_sum > 0.0) {
            return bad("coupling_sum must be positive");
        }
        if self.eta == 0 {
            return bad("eta must be at least 1");
        }
        if self.spin.twice() == 0 {
            return bad("spin must be positive");
        }
        if !self.field.is_finite() || !self.atom().is_finite() {
            return bad("field and couplings must be finite");
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<LatticeSpec, CliError> {
        Ok(LatticeSpec::new(self.coupling_sum, self.eta, self.spin)?)
    }

    pub fn thermal(&self) -> Result<ThermalPoint, CliError> {
        Ok(ThermalPoint::new(self.temperature)?)
    }

    pub fn atom(&self) -> AtomParams {
        AtomParams::new(self.omega0, self.alpha, self.gamma, self.lambda)
    }

    /// `T >= T_c` is legal but puts the lattice in its paramagnetic phase.
    pub fn regime_warning(&self) -> Option<String> {
        let lat = self.lattice().ok()?;
        let tc = curie_temperature(&lat);
        (self.temperature >= tc).then(|| {
            format!(
                "warning: T = {} is at or above the Curie temperature {tc}; the lattice is paramagnetic",
                self.temperature
            )
        })
    }

    /// Canonical `key=value` listing (output path excluded), used for
    /// hashing and the sweep index.
    pub fn canonical(&self) -> String {
        let mut map = BTreeMap::new();
        map.insert("spin", self.spin.to_string());
        map.insert("coupling_sum", format!("{:?}", self.coupling_sum));
        map.insert("eta", self.eta.to_string());
        map.insert("temperature", format!("{:?}", self.temperature));
        map.insert("hx", format!("{:?}", self.field.hx));
        map.insert("hy", format!("{:?}", self.field.hy));
        map.insert("hz", format!("{:?}", self.field.hz));
        map.insert("omega0", format!("{:?}", self.omega0));
        map.insert("alpha", format!("{:?}", self.alpha));
        map.insert("gamma", format!("{:?}", self.gamma));
        map.insert("lambda", format!("{:?}", self.lambda));
        map.insert("t_max", format!("{:?}", self.t_max));
        map.insert("n_points", self.n_points.to_string());
        if let Some(init) = self.initial {
            map.insert("initial", init.to_string());
        }
        map.into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "# fig 9\nspin = 1/2\ntemperature=2.5\nalpha = 1 # isotropic\ngamma=1\nlambda=1\ninitial = ground\n",
        )
        .unwrap();
        assert_eq!(cfg.temperature, 2.5);
        assert_eq!(cfg.initial, Some(InitialState::Ground));
        cfg.set("temperature", "3").unwrap();
        assert_eq!(cfg.temperature, 3.0);
        assert!(cfg.atom().is_isotropic());
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_text("nonsense").is_err());
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.set("eta", "-1").is_err());
        assert!(cfg.set("initial", "excited").is_err());
        cfg.temperature = 0.0;
        assert!(cfg.validate().is_err());
        let mut short = RunConfig::default();
        short.n_points = 1;
        assert!(short.validate().is_err());
    }

    #[test]
    fn warns_above_curie() {
        let mut cfg = RunConfig::default();
        assert!(cfg.regime_warning().is_none());
        cfg.temperature = 3.0;
        assert!(cfg.regime_warning().is_some());
    }

    #[test]
    fn every_key_is_settable() {
        let samples = [
            "1", "6", "4", "2", "0.1", "0.2", "0.3", "1", "0.5", "0.5", "0.5", "10", "11", "plus", "out.csv",
        ];
        let mut cfg = RunConfig::default();
        for (k, v) in KEYS.iter().zip(samples) {
            cfg.set(k, v).unwrap();
        }
        assert_eq!(cfg.output, Some(PathBuf::from("out.csv")));
        assert!(!cfg.canonical().contains("output"));
    }
}
