//! Run configuration for the command-line driver.
//!
//! Configs are TOML files; a `.json` file with the same structure is also
//! accepted, which is how `manifest.json` from a previous run is replayed.
//!
//! ```toml
//! output = "out/rtn"            # optional
//! assembly = "spin_diagonal"    # or "sojourn_blip_2x2"
//! plot = true
//!
//! [physical]
//! g = 0.01
//! delta = 0.0
//!
//! [bath]
//! kind = "rtn"                  # "rtn" | "band" | "multiband"
//! j_c = 1.0
//! tau0 = 1.0
//!
//! [grid]
//! dt = 0.01
//! t_max = 20.0
//!
//! [initial]                     # (s_tr, s_pm, s_mp, s_z)
//! re = [1.0, 0.0, 0.0, 0.0]
//! im = [0.0, 0.0, 0.0, 0.0]     # optional
//!
//! [sweep]                       # optional
//! parameter = "tau0"            # tau0 | mu | delta_b | temperature
//! values = [0.5, 1.0, 2.0, 4.0, 8.0]
//!
//! [oracle]                      # optional, used by `oracle-compare`
//! initial_qubit = "up"          # up | down | plus
//! tolerance = 0.05
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assembly::Assembly;
use crate::error::{Error, Result};
use crate::kernels::{BandParams, RtnParams};
use crate::model::{PhysicalParams, SojournBlipState};
use crate::oracle::InitialQubit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathConfig {
    Rtn(RtnParams),
    Band(BandParams),
    Multiband(BandParams),
}

impl BathConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            BathConfig::Rtn(p) => p.validate(),
            BathConfig::Band(p) => BandParams {
                n_bands: 1,
                n_spins: 1,
                ..*p
            }
            .validate(),
            BathConfig::Multiband(p) => p.validate(),
        }
    }

    pub fn band(&self) -> Option<&BandParams> {
        match self {
            BathConfig::Rtn(_) => None,
            BathConfig::Band(p) | BathConfig::Multiband(p) => Some(p),
        }
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Result<Self> {
        let mut bath = *self;
        match (&mut bath, parameter) {
            (BathConfig::Rtn(p), SweepParameter::Tau0) => p.tau0 = value,
            (BathConfig::Band(p) | BathConfig::Multiband(p), SweepParameter::Mu) => p.mu = value,
            (BathConfig::Band(p) | BathConfig::Multiband(p), SweepParameter::Temperature) => {
                p.temperature = value
            }
            (BathConfig::Multiband(p), SweepParameter::DeltaB) => p.delta_b = value,
            (_, parameter) => {
                return Err(Error::Config(format!(
                    "sweep parameter {parameter} does not apply to a {} bath",
                    self.kind()
                )))
            }
        }
        Ok(bath)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BathConfig::Rtn(_) => "rtn",
            BathConfig::Band(_) => "band",
            BathConfig::Multiband(_) => "multiband",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dt: f64,
    pub t_max: f64,
}

impl GridConfig {
    /// `round(t_max / dt)`; the run ends at `n_steps · dt`.
    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub re: [f64; 4],
    #[serde(default)]
    pub im: [f64; 4],
}

impl InitialConfig {
    pub fn state(&self) -> SojournBlipState {
        let mut v = [Complex64::new(0.0, 0.0); 4];
        for (k, z) in v.iter_mut().enumerate() {
            *z = Complex64::new(self.re[k], self.im[k]);
        }
        SojournBlipState::from_array(v)
    }
}

impl From<SojournBlipState> for InitialConfig {
    fn from(s: SojournBlipState) -> Self {
        let a = s.to_array();
        Self {
            re: a.map(|z| z.re),
            im: a.map(|z| z.im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Tau0,
    Mu,
    DeltaB,
    Temperature,
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParameter::Tau0 => "tau0",
            SweepParameter::Mu => "mu",
            SweepParameter::DeltaB => "delta_b",
            SweepParameter::Temperature => "temperature",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

fn default_tolerance() -> f64 {
    0.05
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default)]
    pub initial_qubit: InitialQubit,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            initial_qubit: InitialQubit::Up,
            tolerance: default_tolerance(),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub physical: PhysicalParams,
    pub bath: BathConfig,
    pub grid: GridConfig,
    pub initial: InitialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub assembly: Assembly,
    #[serde(default = "default_true")]
    pub plot: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

/// Non-fatal findings from [`RunConfig::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning(pub String);

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn n_steps(&self) -> usize {
        self.grid.n_steps()
    }

    pub fn initial_state(&self) -> SojournBlipState {
        self.initial.state()
    }

    /// Every `(sweep value, bath)` pair to run, in sweep order. Without a
    /// sweep there is a single point with no value.
    pub fn points(&self) -> Result<Vec<(Option<f64>, BathConfig)>> {
        match &self.sweep {
            None => Ok(vec![(None, self.bath)]),
            Some(s) => s
                .values
                .iter()
                .map(|&v| Ok((Some(v), self.bath.with_parameter(s.parameter, v)?)))
                .collect(),
        }
    }

    /// Rejects invalid configs; returns warnings for suspicious ones.
    pub fn validate(&self) -> Result<Vec<Warning>> {
        let config_err = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        self.physical.validate().map_err(config_err)?;
        let GridConfig { dt, t_max } = self.grid;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("grid.dt must be > 0, got {dt}")));
        }
        if !(t_max.is_finite() && t_max > dt) {
            return Err(Error::Config(format!("grid.t_max must exceed dt, got {t_max}")));
        }
        if !self.initial_state().is_finite() {
            return Err(Error::Config("initial state must be finite".into()));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::Config("sweep.values must not be empty".into()));
            }
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("sweep values must be finite".into()));
            }
        }
        if let Some(o) = &self.oracle {
            if !(o.tolerance.is_finite() && o.tolerance > 0.0) {
                return Err(Error::Config("oracle.tolerance must be > 0".into()));
            }
        }

        let mut warnings = Vec::new();
        for (value, bath) in self.points().map_err(config_err)? {
            bath.validate().map_err(|e| match value {
                Some(v) => Error::Config(format!("sweep value {v}: {e}")),
                None => config_err(e),
            })?;
            if let Some(band) = bath.band() {
                if t_max >= band.horizon() {
                    warnings.push(Warning(format!(
                        "t_max = {t_max} reaches the finite-size horizon N/4 = {} of a {}-site bath; \
                         expect spurious recurrences",
                        band.horizon(),
                        band.n_sites
                    )));
                }
            }
        }
        warnings.dedup();
        Ok(warnings)
    }
}
