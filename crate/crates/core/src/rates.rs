//! SINRs, achievable rates and capacity-fraction statistics.
//!
//! Rates are in bits per channel use (bits/s/Hz); the bandwidth only enters
//! when a dimensioned rate is requested.

use serde::{Deserialize, Serialize};

use crate::channel::{linear_to_db, SnrTable};
use crate::error::{invalid, Error, Result};
use crate::itis::CoverResult;
use crate::scheduling::Schedule;

fn check(schedule: &Schedule, s: &SnrTable) -> Result<()> {
    if schedule.n() != s.n() {
        return Err(Error::DimensionMismatch { expected: s.n(), actual: schedule.n() });
    }
    Ok(())
}

fn sinr_unchecked(active: &[bool], s: &SnrTable, i: usize) -> f64 {
    let interference: f64 = (0..s.n()).filter(|&j| j != i && active[j]).map(|j| s.inr(i, j)).sum();
    s.snr(i) / (1.0 + interference)
}

/// `snr[i] / (1 + sum of inr[i][j] over the other active links)`.
pub fn sinr(schedule: &Schedule, s: &SnrTable, i: usize) -> Result<f64> {
    check(schedule, s)?;
    if i >= s.n() {
        return Err(Error::LinkOutOfRange { id: i, n: s.n() });
    }
    if !schedule.active[i] {
        return Err(Error::InactiveLink(i));
    }
    Ok(sinr_unchecked(&schedule.active, s, i))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub per_link_bits_s_hz: Vec<f64>,
    pub sum_bits_s_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_link_bits_s: Option<Vec<f64>>,
}

impl RateReport {
    fn from_rates(rates: Vec<f64>) -> Self {
        let sum = rates.iter().sum();
        Self { per_link_bits_s_hz: rates, sum_bits_s_hz: sum, per_link_bits_s: None }
    }

    /// Attach rates in bits/s.
    pub fn with_bandwidth(mut self, bandwidth_hz: f64) -> Self {
        self.per_link_bits_s = Some(self.per_link_bits_s_hz.iter().map(|r| r * bandwidth_hz).collect());
        self
    }
}

/// Rates under treating interference as noise: `log2(1 + sinr)` for active
/// links, 0 otherwise.
pub fn link_rates(schedule: &Schedule, s: &SnrTable) -> Result<RateReport> {
    check(schedule, s)?;
    let rates = (0..s.n())
        .map(|i| if schedule.active[i] { (1.0 + sinr_unchecked(&schedule.active, s, i)).log2() } else { 0.0 })
        .collect();
    Ok(RateReport::from_rates(rates))
}

/// Each link alone for a `1/n` share of the time.
pub fn time_sharing_rate(s: &SnrTable) -> RateReport {
    let n = s.n() as f64;
    RateReport::from_rates(s.snr_values().iter().map(|&snr| (1.0 + snr).log2() / n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionReport {
    pub kappa: usize,
    pub lambda: f64,
    pub gap_bits: f64,
}

/// Time-sharing over the classes of a cover achieves a `1/kappa` fraction of
/// the capacity region to within `log2(3n)/kappa` bits.
pub fn fraction_from_cover(cover: &CoverResult, n: usize) -> Result<FractionReport> {
    fraction_from_kappa(cover.kappa, n)
}

pub fn fraction_from_kappa(kappa: usize, n: usize) -> Result<FractionReport> {
    if kappa == 0 {
        return Err(invalid("kappa must be at least 1"));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let k = kappa as f64;
    Ok(FractionReport { kappa, lambda: 1.0 / k, gap_bits: (3.0 * n as f64).log2() / k })
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Distinct sample values with the CDF value at each.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (k, &v) in self.sorted.iter().enumerate() {
            let frac = (k + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = frac,
                _ => out.push((v, frac)),
            }
        }
        out
    }

    /// Smallest sample `x` with `F(x) >= q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let k = ((q * n as f64).ceil() as usize).clamp(1, n);
        self.sorted[k - 1]
    }

    /// Lower median.
    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(invalid("samples contain NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}

/// Header of the per-link rate CSV.
pub const LINK_RATE_CSV_HEADER: &str = "trial,scheme,link,active,sinr_db,rate_bits_s_hz";

/// Per-link CSV rows for one trial; `sinr_db` is empty for inactive links.
pub fn link_rate_csv_rows(trial: usize, scheme: &str, schedule: &Schedule, s: &SnrTable) -> Result<Vec<String>> {
    check(schedule, s)?;
    let report = link_rates(schedule, s)?;
    Ok((0..s.n())
        .map(|i| {
            let sinr_db = if schedule.active[i] {
                format!("{}", linear_to_db(sinr_unchecked(&schedule.active, s, i)))
            } else {
                String::new()
            };
            format!(
                "{trial},{},{i},{},{sinr_db},{}",
                csv_field(scheme),
                u8::from(schedule.active[i]),
                report.per_link_bits_s_hz[i]
            )
        })
        .collect())
}

/// Quote a CSV field when it contains a comma or quote.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
