//! Run configuration: TOML with dotted sections, strictly validated.
//!
//! ```toml
//! experiment = "snr_beta_sweep"
//! base_seed = 17
//! params.beta = 0.4
//! params.gamma_con = 0.6672
//! beta_sweep.n = 24
//! ```
//!
//! Unknown keys are rejected. Everything except `experiment` and
//! `base_seed` has a default, and [`RunConfig::to_manifest`] writes the fully
//! resolved configuration back out, which loads again as an equivalent
//! config.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cascade::SmeScheme;
use crate::error::{Error, Result};
use crate::pulse::{PulseKind, PulseShape, TimeGrid};
use crate::qutrit::SystemParams;
use crate::snr::{linspace, SnrMethod};
use crate::variants::transmission::{NumeratorVariant, DEFAULT_EPS_EFF};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Polarisation,
    SnrBetaSweep,
    SnrHistogram,
    DetuningMap,
    SqueezeSweep,
    EnsembleRescale,
    TransmissionSpectrum,
    CascadeSnr,
    FourLevelCompare,
    RatioSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Polarisation,
        Experiment::SnrBetaSweep,
        Experiment::SnrHistogram,
        Experiment::DetuningMap,
        Experiment::SqueezeSweep,
        Experiment::EnsembleRescale,
        Experiment::TransmissionSpectrum,
        Experiment::CascadeSnr,
        Experiment::FourLevelCompare,
        Experiment::RatioSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Polarisation => "polarisation",
            Experiment::SnrBetaSweep => "snr_beta_sweep",
            Experiment::SnrHistogram => "snr_histogram",
            Experiment::DetuningMap => "detuning_map",
            Experiment::SqueezeSweep => "squeeze_sweep",
            Experiment::EnsembleRescale => "ensemble_rescale",
            Experiment::TransmissionSpectrum => "transmission_spectrum",
            Experiment::CascadeSnr => "cascade_snr",
            Experiment::FourLevelCompare => "four_level_compare",
            Experiment::RatioSweep => "ratio_sweep",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Evenly spaced values `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    pub const fn new(lo: f64, hi: f64, n: usize) -> Self {
        Range { lo, hi, n }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.n == 0 || !self.lo.is_finite() || !self.hi.is_finite() || self.hi < self.lo {
            return Err(Error::Config(format!("{name}: need finite lo <= hi and n >= 1")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub dt: f64,
    /// Horizon; chosen from the pulse when absent.
    pub t_end: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { dt: 1e-3, t_end: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub kind: PulseKind,
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig { kind: PulseKind::Exponential }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BetaSweepConfig {
    pub beta: Range,
    pub method: SnrMethod,
    pub optimize: bool,
}

impl Default for BetaSweepConfig {
    fn default() -> Self {
        BetaSweepConfig { beta: Range::new(0.05, 1.2, 24), method: SnrMethod::RegressionAnalytic, optimize: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetuningConfig {
    pub delta_b: Range,
    pub delta_c: Range,
}

impl Default for DetuningConfig {
    fn default() -> Self {
        DetuningConfig { delta_b: Range::new(-2.0, 2.0, 11), delta_c: Range::new(-2.0, 2.0, 11) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SqueezeConfig {
    /// Squeezing magnitude `r`; the phase is the noise-reducing one.
    pub r: Range,
}

impl Default for SqueezeConfig {
    fn default() -> Self {
        SqueezeConfig { r: Range::new(0.0, 1.5, 31) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub sizes: Vec<usize>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { sizes: vec![1, 2, 5, 10] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransmissionConfig {
    pub alpha: f64,
    pub eps_eff: f64,
    pub variant: NumeratorVariant,
    /// Common detuning `Δb = Δc = δ`.
    pub delta: Range,
}

impl Default for TransmissionConfig {
    fn default() -> Self {
        TransmissionConfig {
            alpha: 2.0,
            eps_eff: DEFAULT_EPS_EFF,
            variant: NumeratorVariant::SqrtGammaC,
            delta: Range::new(-10.0, 10.0, 2001),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CascadeConfig {
    pub n_max: usize,
    /// Probe amplitude per node; the SNR-optimal `β` when absent.
    pub alpha: Option<f64>,
    pub eps_eff: f64,
    pub variant: NumeratorVariant,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig { n_max: 20, alpha: None, eps_eff: DEFAULT_EPS_EFF, variant: NumeratorVariant::SqrtGammaC }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourLevelConfig {
    pub omega_drive: f64,
    pub delta_12: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta_sig: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl Default for FourLevelConfig {
    fn default() -> Self {
        FourLevelConfig { omega_drive: 10.0, delta_12: 0.0, gamma: 1.0, alpha: 1.0, beta_sig: 1.0, t_end: 20.0, dt: 2e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatioConfig {
    pub ratios: Vec<f64>,
}

impl Default for RatioConfig {
    fn default() -> Self {
        RatioConfig { ratios: vec![1.0, 2.0, 5.0, 10.0, 30.0, 100.0] }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StochasticConfig {
    pub scheme: SmeScheme,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_n_traj() -> usize {
    5000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub base_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub params: SystemParams,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub pulse: PulseConfig,
    #[serde(default)]
    pub stochastic: StochasticConfig,
    #[serde(default)]
    pub beta_sweep: BetaSweepConfig,
    #[serde(default)]
    pub detuning: DetuningConfig,
    #[serde(default)]
    pub squeeze: SqueezeConfig,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub transmission: TransmissionConfig,
    #[serde(default)]
    pub cascade: CascadeConfig,
    #[serde(default)]
    pub four_level: FourLevelConfig,
    #[serde(default)]
    pub ratio: RatioConfig,
}

impl RunConfig {
    /// All defaults for `experiment`.
    pub fn new(experiment: Experiment, base_seed: u64) -> Self {
        RunConfig {
            experiment,
            base_seed,
            output_dir: default_output_dir(),
            n_traj: default_n_traj(),
            params: SystemParams::default(),
            grid: GridConfig::default(),
            pulse: PulseConfig::default(),
            stochastic: StochasticConfig::default(),
            beta_sweep: BetaSweepConfig::default(),
            detuning: DetuningConfig::default(),
            squeeze: SqueezeConfig::default(),
            ensemble: EnsembleConfig::default(),
            transmission: TransmissionConfig::default(),
            cascade: CascadeConfig::default(),
            four_level: FourLevelConfig::default(),
            ratio: RatioConfig::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| match e {
            Error::InvalidArgument(m) => Error::Config(m),
            other => other,
        };
        self.params.validate().map_err(cfg_err)?;
        if !(self.grid.dt.is_finite() && self.grid.dt > 0.0) {
            return Err(Error::Config("grid.dt must be positive".into()));
        }
        if let Some(t) = self.grid.t_end {
            if !(t.is_finite() && t >= self.grid.dt) {
                return Err(Error::Config("grid.t_end must be at least grid.dt".into()));
            }
        }
        if self.n_traj < 2 {
            return Err(Error::Config("n_traj must be at least 2".into()));
        }
        self.beta_sweep.beta.validate("beta_sweep.beta")?;
        if self.beta_sweep.beta.lo <= 0.0 {
            return Err(Error::Config("beta_sweep.beta.lo must be positive".into()));
        }
        self.detuning.delta_b.validate("detuning.delta_b")?;
        self.detuning.delta_c.validate("detuning.delta_c")?;
        self.squeeze.r.validate("squeeze.r")?;
        if self.squeeze.r.lo < 0.0 {
            return Err(Error::Config("squeeze.r.lo must be non-negative".into()));
        }
        if self.ensemble.sizes.is_empty() || self.ensemble.sizes.contains(&0) {
            return Err(Error::Config("ensemble.sizes must be non-empty and positive".into()));
        }
        self.transmission.delta.validate("transmission.delta")?;
        for (name, v) in [("transmission.eps_eff", self.transmission.eps_eff), ("cascade.eps_eff", self.cascade.eps_eff)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.cascade.n_max == 0 {
            return Err(Error::Config("cascade.n_max must be at least 1".into()));
        }
        let f = &self.four_level;
        if !(f.dt > 0.0 && f.t_end >= f.dt && f.gamma >= 0.0) {
            return Err(Error::Config("four_level needs dt > 0, t_end >= dt and gamma >= 0".into()));
        }
        if self.ratio.ratios.is_empty() || self.ratio.ratios.iter().any(|r| !(1.0..=100.0).contains(r)) {
            return Err(Error::Config("ratio.ratios must be non-empty and lie in [1, 100]".into()));
        }
        if self.beta_sweep.method == SnrMethod::StochasticEnsemble && self.pulse.kind != PulseKind::Exponential {
            return Err(Error::Config("stochastic estimates need pulse.kind = \"exponential\"".into()));
        }
        Ok(())
    }

    pub fn pulse_shape(&self) -> Result<PulseShape> {
        PulseShape::for_bandwidth(self.pulse.kind, self.params.gamma_con)
    }

    /// Simulation grid for the configured pulse.
    pub fn time_grid(&self) -> Result<TimeGrid> {
        match self.grid.t_end {
            Some(t) => TimeGrid::new(t, self.grid.dt),
            None => TimeGrid::for_pulse(&self.pulse_shape()?, self.grid.dt, self.params.gamma_b),
        }
    }

    /// Resolved configuration as TOML.
    pub fn to_manifest(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialise config: {e}")))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_polarisation_config() {
        let c = RunConfig::parse(
            "experiment = \"polarisation\"\nbase_seed = 1\nparams.gamma_con = 0.6672\nparams.beta = 0.4\n",
        )
        .unwrap();
        assert_eq!(c.experiment, Experiment::Polarisation);
        assert_eq!(c.params.gamma_con, 0.6672);
        assert_eq!(c.params.beta, 0.4);
        let m = c.to_manifest().unwrap();
        assert!(m.contains("gamma_con = 0.6672") && m.contains("beta = 0.4"));
    }

    #[test]
    fn physical_invariants_are_reported() {
        let e = RunConfig::parse("experiment = \"polarisation\"\nbase_seed = 1\nparams.gamma_b = -1\n").unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("gamma_b must be positive")), "{e}");
    }

    #[test]
    fn unknown_and_missing_keys() {
        let e = RunConfig::parse("experiment = \"polarisation\"\nbase_seed = 1\nparams.gamm_c = 2\n").unwrap_err();
        assert!(e.to_string().contains("unknown field `gamm_c`"), "{e}");
        let e = RunConfig::parse("experiment = \"polarisation\"\n").unwrap_err();
        assert!(e.to_string().contains("base_seed"), "{e}");
    }

    #[test]
    fn manifest_round_trips() {
        for e in Experiment::ALL {
            let mut c = RunConfig::new(e, 42);
            c.cascade.alpha = Some(0.3);
            c.grid.t_end = Some(12.5);
            let back = RunConfig::parse(&c.to_manifest().unwrap()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn experiment_names() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert_eq!(e.name().replace('_', "-").parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }
}
