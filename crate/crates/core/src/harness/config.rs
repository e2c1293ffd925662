use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, noise_power_dbm, ChannelModel, LinkBudget};
use crate::error::{Error, Result};
use crate::itis::{gamma_constant, regime_constant};
use crate::scheduling::Scheme;
use crate::topology::TopologyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SumRateSweep,
    LinkRateCdf,
    FractionVsN,
    FadingFraction,
    GapVsN,
    TheoryCurves,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::SumRateSweep => "sum_rate_sweep",
            ExperimentKind::LinkRateCdf => "link_rate_cdf",
            ExperimentKind::FractionVsN => "fraction_vs_n",
            ExperimentKind::FadingFraction => "fading_fraction",
            ExperimentKind::GapVsN => "gap_vs_n",
            ExperimentKind::TheoryCurves => "theory_curves",
        }
    }

    fn uses_covers(&self) -> bool {
        matches!(self, ExperimentKind::FractionVsN | ExperimentKind::FadingFraction | ExperimentKind::GapVsN)
    }

    fn uses_schemes(&self) -> bool {
        matches!(self, ExperimentKind::SumRateSweep | ExperimentKind::LinkRateCdf)
    }
}

/// Transmit power and noise. The noise is given either as a total power or
/// as a PSD plus noise figure over `bandwidth_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub tx_power_dbm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_psd_dbm_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_figure_db: Option<f64>,
    /// Defaults to 1 Hz, i.e. rates reported per Hz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_hz: Option<f64>,
}

impl BudgetConfig {
    pub fn resolve(&self) -> Result<LinkBudget> {
        let bandwidth_hz = self.bandwidth_hz.unwrap_or(1.0);
        let noise = match (self.noise_power_dbm, self.noise_psd_dbm_hz) {
            (Some(n), None) => {
                if self.noise_figure_db.is_some() {
                    return Err(config("noise_figure_db only applies with noise_psd_dbm_hz"));
                }
                n
            }
            (None, Some(psd)) => {
                if self.bandwidth_hz.is_none() {
                    return Err(config("noise_psd_dbm_hz requires bandwidth_hz"));
                }
                noise_power_dbm(psd, bandwidth_hz, self.noise_figure_db.unwrap_or(0.0))?
            }
            _ => return Err(config("give exactly one of noise_power_dbm and noise_psd_dbm_hz")),
        };
        let b = LinkBudget { tx_power_dbm: self.tx_power_dbm, noise_power_dbm: noise, bandwidth_hz };
        b.validate()?;
        Ok(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorityMode {
    /// One permutation per trial, used by every scheme.
    #[default]
    Shared,
    /// An independent permutation per scheme and trial.
    PerScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedConstant {
    /// Constant 1.
    Normalized,
    /// `2 pi R^2 / (sqrt(3) gamma^2)` from the disk and path-loss parameters.
    Derived,
}

/// Constant of the `beta < 1` theory regime: a name or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TheoryConstant {
    Named(NamedConstant),
    Value(f64),
}

impl Default for TheoryConstant {
    fn default() -> Self {
        TheoryConstant::Named(NamedConstant::Derived)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub topology: TopologyParams,
    pub channel: ChannelModel,
    pub budget: BudgetConfig,
    #[serde(default)]
    pub schemes: Vec<Scheme>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Values of the disk-model exponent to sweep; empty uses the topology's.
    #[serde(default)]
    pub betas: Vec<f64>,
    /// Also evaluate covers under Rayleigh fading.
    #[serde(default)]
    pub fading: bool,
    #[serde(default)]
    pub priority: PriorityMode,
    #[serde(default)]
    pub theory_constant: TheoryConstant,
    /// Link rates below this count toward `low_rate_fraction`.
    #[serde(default = "default_low_rate_threshold")]
    pub low_rate_threshold: f64,
    /// Keep one CSV row per (trial, scheme, link).
    #[serde(default)]
    pub emit_link_rows: bool,
}

fn default_low_rate_threshold() -> f64 {
    0.1
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialization; the config hash is taken over these bytes.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config("trials must be at least 1"));
        }
        if self.trials >= 1 << 48 {
            return Err(config("trials too large"));
        }
        if self.n_list.is_empty() {
            return Err(config("n_list must not be empty"));
        }
        if self.n_list.contains(&0) {
            return Err(config("every n must be at least 1"));
        }
        self.topology.validate()?;
        self.channel.validate()?;
        self.budget.resolve()?;
        for b in &self.betas {
            if !(b.is_finite() && *b > 0.0) {
                return Err(config(format!("betas must be positive, got {b}")));
            }
        }
        if !self.betas.is_empty() && !matches!(self.topology, TopologyParams::Disk { .. }) {
            return Err(config("betas only apply to the disk topology"));
        }
        if !self.low_rate_threshold.is_finite() {
            return Err(config("low_rate_threshold must be finite"));
        }
        if self.experiment.uses_schemes() {
            if self.schemes.is_empty() {
                return Err(config("schemes must not be empty"));
            }
            for s in &self.schemes {
                s.validate()?;
            }
            let mut labels: Vec<String> = self.schemes.iter().map(Scheme::label).collect();
            labels.sort();
            if labels.windows(2).any(|w| w[0] == w[1]) {
                return Err(config("duplicate scheme"));
            }
        }
        if self.experiment == ExperimentKind::LinkRateCdf && self.n_list.len() != 1 {
            return Err(config("link_rate_cdf takes a single n"));
        }
        if self.experiment.uses_covers() {
            if !matches!(self.topology, TopologyParams::Disk { .. }) {
                return Err(config("cover experiments need the disk topology"));
            }
            if matches!(self.channel, ChannelModel::Itu1411(_)) {
                return Err(config("cover experiments need a path-loss channel"));
            }
        }
        if self.experiment == ExperimentKind::TheoryCurves {
            if self.n_list.iter().any(|&n| n < 2) {
                return Err(config("theory curves need n >= 2"));
            }
            self.regime_constant()?;
        }
        Ok(())
    }

    /// Betas to sweep; a single `None` when the topology's own value is used.
    pub(crate) fn beta_grid(&self) -> Vec<Option<f64>> {
        if self.betas.is_empty() {
            vec![None]
        } else {
            self.betas.iter().copied().map(Some).collect()
        }
    }

    pub(crate) fn topology_for(&self, beta: Option<f64>) -> TopologyParams {
        match (self.topology, beta) {
            (TopologyParams::Disk { radius_m, r0_m, .. }, Some(beta)) => TopologyParams::Disk { radius_m, r0_m, beta },
            (t, _) => t,
        }
    }

    pub(crate) fn effective_betas(&self) -> Vec<f64> {
        match self.topology {
            TopologyParams::Disk { beta, .. } if self.betas.is_empty() => vec![beta],
            _ => self.betas.clone(),
        }
    }

    /// Constant of the `beta < 1` regime in use.
    pub fn regime_constant(&self) -> Result<f64> {
        match self.theory_constant {
            TheoryConstant::Value(c) if c > 0.0 && c.is_finite() => Ok(c),
            TheoryConstant::Value(c) => Err(config(format!("theory_constant must be positive, got {c}"))),
            TheoryConstant::Named(NamedConstant::Normalized) => Ok(1.0),
            TheoryConstant::Named(NamedConstant::Derived) => {
                let TopologyParams::Disk { radius_m, r0_m, .. } = self.topology else {
                    return Err(config("derived theory constant needs the disk topology"));
                };
                let (ChannelModel::PathLoss { g0, alpha } | ChannelModel::RayleighPathLoss { g0, alpha }) =
                    self.channel
                else {
                    return Err(config("derived theory constant needs a path-loss channel"));
                };
                let b = self.budget.resolve()?;
                let gamma =
                    gamma_constant(db_to_linear(b.tx_power_dbm), db_to_linear(b.noise_power_dbm), g0, r0_m, alpha)?;
                Ok(regime_constant(radius_m, gamma))
            }
        }
    }
}
