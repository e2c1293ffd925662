//! Geometry to channel gains, and gains to SNR/INR tables.
//!
//! Everything is kept in linear power internally. dB only appears in
//! configuration values.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::topology::LinkTopology;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Parameters of the ITU-R P.1411 line-of-sight model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Itu1411Params {
    pub carrier_hz: f64,
    pub h_b_m: f64,
    pub h_m_m: f64,
    pub shadow_sigma_db: f64,
    /// Applied once at the transmitting and once at the receiving device.
    pub antenna_gain_db_per_device: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelModel {
    /// `g0 * d^(-alpha)`.
    PathLoss {
        g0: f64,
        alpha: f64,
    },
    /// Path loss times an independent unit-mean exponential fade per entry.
    RayleighPathLoss {
        g0: f64,
        alpha: f64,
    },
    Itu1411(Itu1411Params),
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::PathLoss { g0, alpha } | ChannelModel::RayleighPathLoss { g0, alpha } => {
                if !(g0 > 0.0 && g0.is_finite()) {
                    return Err(invalid(format!("g0 must be positive, got {g0}")));
                }
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(invalid(format!("alpha must be positive, got {alpha}")));
                }
            }
            ChannelModel::Itu1411(p) => {
                if !(p.carrier_hz > 0.0) {
                    return Err(invalid("carrier_hz must be positive"));
                }
                if !(p.h_b_m > 0.0 && p.h_m_m > 0.0) {
                    return Err(invalid("antenna heights must be positive"));
                }
                if !(p.shadow_sigma_db >= 0.0) {
                    return Err(invalid("shadow_sigma_db must be non-negative"));
                }
                if !p.antenna_gain_db_per_device.is_finite() {
                    return Err(invalid("antenna gain must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// Transmit power and receiver noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    /// Total noise power, bandwidth and noise figure included.
    pub noise_power_dbm: f64,
    /// Only used to report dimensioned rates.
    pub bandwidth_hz: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(invalid("bandwidth_hz must be positive"));
        }
        if !self.tx_power_dbm.is_finite() || !self.noise_power_dbm.is_finite() {
            return Err(invalid("powers must be finite"));
        }
        Ok(())
    }

    /// `P / N` in linear scale.
    pub fn p_over_n(&self) -> f64 {
        db_to_linear(self.tx_power_dbm - self.noise_power_dbm)
    }
}

/// Noise power in dBm from a PSD, bandwidth and noise figure.
pub fn noise_power_dbm(psd_dbm_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(invalid("bandwidth_hz must be positive"));
    }
    Ok(psd_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

pub fn pathloss_gain(d: f64, g0: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(invalid(format!("distance must be positive, got {d}")));
    }
    Ok(g0 * d.powf(-alpha))
}

/// Breakpoint distance `4 h_b h_m / lambda`.
pub fn itu1411_breakpoint_m(carrier_hz: f64, h_b: f64, h_m: f64) -> f64 {
    4.0 * h_b * h_m / (SPEED_OF_LIGHT / carrier_hz)
}

/// Basic transmission loss at the breakpoint, `|20 log10(lambda^2 / (8 pi h_b h_m))|`.
pub fn itu1411_breakpoint_loss_db(carrier_hz: f64, h_b: f64, h_m: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / carrier_hz;
    (20.0 * (lambda * lambda / (8.0 * PI * h_b * h_m)).log10()).abs()
}

/// LoS transmission loss in dB: two slopes (20 and 40 dB/decade) joined at
/// the breakpoint.
pub fn itu1411_loss_db(d: f64, carrier_hz: f64, h_b: f64, h_m: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(invalid(format!("distance must be positive, got {d}")));
    }
    let r_bp = itu1411_breakpoint_m(carrier_hz, h_b, h_m);
    let l_bp = itu1411_breakpoint_loss_db(carrier_hz, h_b, h_m);
    let slope = if d <= r_bp { 20.0 } else { 40.0 };
    Ok(l_bp + 6.0 + slope * (d / r_bp).log10())
}

/// Unit-mean exponential power fade.
pub fn rayleigh_fade(rng: &mut impl Rng) -> f64 {
    Exp1.sample(rng)
}

/// Zero-mean Gaussian shadowing offset in dB.
pub fn lognormal_shadow_db(rng: &mut impl Rng, sigma_db: f64) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    let z: f64 = StandardNormal.sample(rng);
    sigma_db * z
}

/// Source of the random channel components. Any [`Rng`] draws them; the
/// [`PinnedChannel`] fixes fades to 1 and shadowing to 0 dB.
pub trait ChannelRandomness {
    fn fade(&mut self) -> f64;
    fn shadow_db(&mut self, sigma_db: f64) -> f64;
}

impl<R: Rng> ChannelRandomness for R {
    fn fade(&mut self) -> f64 {
        rayleigh_fade(self)
    }

    fn shadow_db(&mut self, sigma_db: f64) -> f64 {
        lognormal_shadow_db(self, sigma_db)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PinnedChannel;

impl ChannelRandomness for PinnedChannel {
    fn fade(&mut self) -> f64 {
        1.0
    }

    fn shadow_db(&mut self, _sigma_db: f64) -> f64 {
        0.0
    }
}

/// `g[i][j]`: linear power gain from source `j` to destination `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    n: usize,
    g: Vec<f64>,
}

impl GainTable {
    pub fn from_rows(n: usize, g: Vec<f64>) -> Result<Self> {
        if g.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: g.len() });
        }
        if let Some(bad) = g.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(invalid(format!("gains must be positive and finite, got {bad}")));
        }
        Ok(Self { n, g })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, dst: usize, src: usize) -> f64 {
        self.g[dst * self.n + src]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }

    /// CSV dump, one row per destination and one column per source.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:e}", self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Gains for every (destination, source) pair of `t` under `model`.
///
/// Random components are drawn row by row (destination-major), one draw per
/// directed pair.
pub fn compute_gain_table(
    t: &LinkTopology,
    model: &ChannelModel,
    rng: &mut impl ChannelRandomness,
) -> Result<GainTable> {
    model.validate()?;
    let n = t.n();
    let mut g = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = t.cross_distance(i, j);
            if !(d > 0.0) {
                return Err(Error::ZeroDistance { src: j, dst: i });
            }
            let gain = match *model {
                ChannelModel::PathLoss { g0, alpha } => pathloss_gain(d, g0, alpha)?,
                ChannelModel::RayleighPathLoss { g0, alpha } => pathloss_gain(d, g0, alpha)? * rng.fade(),
                ChannelModel::Itu1411(p) => {
                    let loss = itu1411_loss_db(d, p.carrier_hz, p.h_b_m, p.h_m_m)?;
                    let shadow = rng.shadow_db(p.shadow_sigma_db);
                    db_to_linear(-loss + 2.0 * p.antenna_gain_db_per_device + shadow)
                }
            };
            g.push(gain);
        }
    }
    GainTable::from_rows(n, g)
}

/// Linear SNR and INR values of one network.
///
/// `snr[i] = P g[i][i] / N`, `inr[i][j] = P g[i][j] / N` for `j != i`; the
/// diagonal of `inr` is stored as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrTable {
    n: usize,
    snr: Vec<f64>,
    inr: Vec<f64>,
}

impl SnrTable {
    /// Build from explicit values; `inr` is row-major `n x n`, its diagonal is
    /// ignored.
    pub fn new(snr: Vec<f64>, mut inr: Vec<f64>) -> Result<Self> {
        let n = snr.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if inr.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: inr.len() });
        }
        if let Some(bad) = snr.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(invalid(format!("snr must be positive and finite, got {bad}")));
        }
        for i in 0..n {
            inr[i * n + i] = 0.0;
        }
        if let Some(bad) = inr.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!("inr must be non-negative and finite, got {bad}")));
        }
        Ok(Self { n, snr, inr })
    }

    /// Build from values in dB. Cross entries of `-inf` dB map to 0.
    pub fn from_db(snr_db: &[f64], inr_db: &[f64]) -> Result<Self> {
        Self::new(snr_db.iter().map(|&v| db_to_linear(v)).collect(), inr_db.iter().map(|&v| db_to_linear(v)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn snr(&self, i: usize) -> f64 {
        self.snr[i]
    }

    /// Interference from source `j` at destination `i`.
    pub fn inr(&self, i: usize, j: usize) -> f64 {
        self.inr[i * self.n + j]
    }

    pub fn snr_values(&self) -> &[f64] {
        &self.snr
    }

    pub fn inr_values(&self) -> &[f64] {
        &self.inr
    }

    /// Every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.snr.iter().map(|v| v * c).collect(), self.inr.iter().map(|v| v * c).collect())
    }

    /// The sub-network formed by `links`, in the given order.
    pub fn restrict(&self, links: &[usize]) -> Result<Self> {
        for &id in links {
            if id >= self.n {
                return Err(Error::LinkOutOfRange { id, n: self.n });
            }
        }
        let snr = links.iter().map(|&i| self.snr[i]).collect();
        let inr = links
            .iter()
            .flat_map(|&i| links.iter().map(move |&j| (i, j)))
            .map(|(i, j)| if i == j { 0.0 } else { self.inr(i, j) })
            .collect();
        Self::new(snr, inr)
    }
}

pub fn compute_snr_table(g: &GainTable, b: &LinkBudget) -> Result<SnrTable> {
    b.validate()?;
    let p_over_n = db_to_linear(b.tx_power_dbm) / db_to_linear(b.noise_power_dbm);
    let n = g.n();
    let snr = (0..n).map(|i| g.get(i, i) * p_over_n).collect();
    let inr = g.as_slice().iter().map(|v| v * p_over_n).collect();
    SnrTable::new(snr, inr)
}
