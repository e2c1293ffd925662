use rayon::prelude::*;
use serde::Serialize;

use super::config::{config, ExperimentConfig, ExperimentKind, PriorityMode};
use crate::channel::{compute_gain_table, compute_snr_table, ChannelModel, LinkBudget, PinnedChannel, SnrTable};
use crate::error::Result;
use crate::itis::{greedy_itis_cover, theoretical_fraction_with_constant};
use crate::rates::{empirical_cdf, fraction_from_kappa, link_rate_csv_rows, link_rates, time_sharing_rate};
use crate::rng::{derive_seed, substream};
use crate::scheduling::{random_priority, PriorityOrder};
use crate::topology::{LinkTopology, TopologyParams};

const LANE_TOPOLOGY: u16 = 0;
const LANE_CHANNEL: u16 = 1;
const LANE_PRIORITY: u16 = 2;
const LANE_FADING: u16 = 3;
const LANE_SCHEME_PRIORITY: u16 = 16;

/// Number of quantile levels in each emitted CDF series.
const CDF_LEVELS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub scheme: String,
    pub statistic: String,
    pub value: f64,
    /// Standard error of `value`; 0 for exact or unestimated quantities.
    pub stderr: f64,
}

/// Empirical CDF sampled at evenly spaced quantile levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfSeries {
    pub n: usize,
    pub scheme: String,
    /// `link_rate` (pooled over trials and links) or `sum_rate` (one per trial).
    pub kind: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub cdfs: Vec<CdfSeries>,
    /// Per-link rows in the `rates` CSV layout, when requested.
    #[serde(skip)]
    pub link_rows: Vec<String>,
}

impl ExperimentResult {
    /// Look up a row by (n, scheme, statistic).
    pub fn find(&self, n: usize, scheme: &str, statistic: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.n == n && r.scheme == scheme && r.statistic == statistic)
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.experiment, a.n, &a.scheme, &a.statistic).cmp(&(b.experiment, b.n, &b.scheme, &b.statistic))
        });
        self.cdfs.sort_by(|a, b| (a.n, &a.scheme, &a.kind).cmp(&(b.n, &b.scheme, &b.kind)));
    }
}

/// Order in which trials are evaluated. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
    Reversed,
}

fn run_trials<T: Send>(trials: usize, exec: Execution, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    match exec {
        Execution::Parallel => (0..trials).into_par_iter().map(&f).collect(),
        Execution::Sequential => (0..trials).map(&f).collect(),
        Execution::Reversed => {
            let mut out = (0..trials).rev().map(&f).collect::<Result<Vec<T>>>()?;
            out.reverse();
            Ok(out)
        }
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn row(kind: ExperimentKind, n: usize, scheme: &str, statistic: &str, value: f64, stderr: f64) -> ResultRow {
    ResultRow { experiment: kind, n, scheme: scheme.to_string(), statistic: statistic.to_string(), value, stderr }
}

fn stat_row(kind: ExperimentKind, n: usize, scheme: &str, statistic: &str, xs: &[f64]) -> ResultRow {
    let (m, se) = mean_stderr(xs);
    row(kind, n, scheme, statistic, m, se)
}

fn beta_suffix(cfg: &ExperimentConfig, beta: Option<f64>) -> String {
    match cfg.topology_for(beta) {
        TopologyParams::Disk { beta, .. } => format!("[beta={beta}]"),
        _ => String::new(),
    }
}

fn cell_seed(cfg: &ExperimentConfig, n: usize, beta_idx: usize) -> u64 {
    derive_seed(cfg.master_seed, &[n as u64, beta_idx as u64])
}

fn snr_table(
    t: &LinkTopology,
    model: &ChannelModel,
    budget: &LinkBudget,
    seed: u64,
    trial: usize,
    lane: u16,
) -> Result<SnrTable> {
    let gains = match model {
        ChannelModel::PathLoss { .. } => compute_gain_table(t, model, &mut PinnedChannel)?,
        _ => compute_gain_table(t, model, &mut substream(seed, trial as u64, lane))?,
    };
    compute_snr_table(&gains, budget)
}

/// Run the experiment named in the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with(cfg, Execution::Parallel)
}

pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut result = match cfg.experiment {
        ExperimentKind::SumRateSweep | ExperimentKind::LinkRateCdf => run_rates(cfg, exec)?,
        ExperimentKind::FractionVsN | ExperimentKind::FadingFraction | ExperimentKind::GapVsN => run_covers(cfg, exec)?,
        ExperimentKind::TheoryCurves => run_theory_curves(cfg)?,
    };
    result.sort();
    Ok(result)
}

pub fn run_sum_rate_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::SumRateSweep)?;
    run_experiment(cfg)
}

pub fn run_link_rate_cdf(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::LinkRateCdf)?;
    run_experiment(cfg)
}

pub fn run_fraction_vs_n(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if !matches!(cfg.experiment, ExperimentKind::FractionVsN | ExperimentKind::FadingFraction) {
        return Err(config(format!("expected a fraction experiment, got {}", cfg.experiment.as_str())));
    }
    run_experiment(cfg)
}

pub fn run_gap_vs_n(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::GapVsN)?;
    run_experiment(cfg)
}

pub fn run_theory_curves(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::TheoryCurves)?;
    cfg.validate()?;
    let constant = cfg.regime_constant()?;
    let kind = ExperimentKind::TheoryCurves;
    let mut out = ExperimentResult::default();
    for beta in cfg.effective_betas() {
        let label = format!("theory[beta={beta}]");
        for &n in &cfg.n_list {
            if beta == 1.0 && n < 3 {
                continue;
            }
            let th = theoretical_fraction_with_constant(beta, n, constant)?;
            out.rows.push(row(kind, n, &label, "lambda", th.lambda, 0.0));
            out.rows.push(row(kind, n, &label, "gap_bits", th.gap_bits, 0.0));
        }
    }
    for &n in &cfg.n_list {
        out.rows.push(row(kind, n, "tdma", "lambda", 1.0 / n as f64, 0.0));
    }
    out.sort();
    Ok(out)
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(config(format!("expected a {} experiment, got {}", kind.as_str(), cfg.experiment.as_str())));
    }
    Ok(())
}

struct RateTrial {
    sum_rates: Vec<f64>,
    active: Vec<f64>,
    link_rates: Vec<Vec<f64>>,
    time_sharing: f64,
    link_rows: Vec<String>,
}

fn run_rates(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult> {
    let kind = cfg.experiment;
    let budget = cfg.budget.resolve()?;
    let keep_links = kind == ExperimentKind::LinkRateCdf;
    let labels: Vec<String> = cfg.schemes.iter().map(|s| s.label()).collect();
    let mut out = ExperimentResult::default();
    for (bi, beta) in cfg.beta_grid().into_iter().enumerate() {
        let topo = cfg.topology_for(beta);
        let suffix = beta_suffix(cfg, beta);
        for &n in &cfg.n_list {
            let seed = cell_seed(cfg, n, bi);
            let trials = run_trials(cfg.trials, exec, |trial| {
                let t = topo.generate(n, &mut substream(seed, trial as u64, LANE_TOPOLOGY))?;
                let s = snr_table(&t, &cfg.channel, &budget, seed, trial, LANE_CHANNEL)?;
                let shared = random_priority(n, &mut substream(seed, trial as u64, LANE_PRIORITY))?;
                let mut res = RateTrial {
                    sum_rates: Vec::new(),
                    active: Vec::new(),
                    link_rates: Vec::new(),
                    time_sharing: time_sharing_rate(&s).sum_bits_s_hz,
                    link_rows: Vec::new(),
                };
                for (k, scheme) in cfg.schemes.iter().enumerate() {
                    let priority: PriorityOrder = match cfg.priority {
                        PriorityMode::Shared => shared.clone(),
                        PriorityMode::PerScheme => {
                            random_priority(n, &mut substream(seed, trial as u64, LANE_SCHEME_PRIORITY + k as u16))?
                        }
                    };
                    let sched = scheme.schedule(&s, &priority)?;
                    let rates = link_rates(&sched, &s)?;
                    res.sum_rates.push(rates.sum_bits_s_hz);
                    res.active.push(sched.active_count() as f64);
                    if cfg.emit_link_rows {
                        let name = format!("{}{suffix}", labels[k]);
                        res.link_rows.extend(link_rate_csv_rows(trial, &name, &sched, &s)?);
                    }
                    if keep_links {
                        res.link_rates.push(rates.per_link_bits_s_hz);
                    }
                }
                Ok(res)
            })?;

            let ts: Vec<f64> = trials.iter().map(|t| t.time_sharing).collect();
            out.rows.push(stat_row(kind, n, &format!("time_sharing{suffix}"), "mean_sum_rate", &ts));
            for (k, label) in labels.iter().enumerate() {
                let name = format!("{label}{suffix}");
                let sums: Vec<f64> = trials.iter().map(|t| t.sum_rates[k]).collect();
                let active: Vec<f64> = trials.iter().map(|t| t.active[k]).collect();
                out.rows.push(stat_row(kind, n, &name, "mean_sum_rate", &sums));
                out.rows.push(stat_row(kind, n, &name, "mean_active_links", &active));
                if keep_links {
                    let pooled: Vec<f64> = trials.iter().flat_map(|t| t.link_rates[k].iter().copied()).collect();
                    let link_cdf = empirical_cdf(&pooled)?;
                    let sum_cdf = empirical_cdf(&sums)?;
                    let low: Vec<f64> = trials
                        .iter()
                        .map(|t| {
                            let r = &t.link_rates[k];
                            r.iter().filter(|&&x| x < cfg.low_rate_threshold).count() as f64 / r.len() as f64
                        })
                        .collect();
                    out.rows.push(row(kind, n, &name, "median_sum_rate", sum_cdf.median(), 0.0));
                    out.rows.push(stat_row(kind, n, &name, "low_rate_fraction", &low));
                    out.rows.push(stat_row(kind, n, &name, "mean_link_rate", &pooled));
                    out.cdfs.push(cdf_series(n, &name, "link_rate", &link_cdf));
                    out.cdfs.push(cdf_series(n, &name, "sum_rate", &sum_cdf));
                }
            }
            if cfg.emit_link_rows {
                out.link_rows.extend(trials.into_iter().flat_map(|t| t.link_rows));
            }
        }
    }
    Ok(out)
}

fn cdf_series(n: usize, scheme: &str, kind: &str, cdf: &crate::rates::EmpiricalCdf) -> CdfSeries {
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(CDF_LEVELS);
    for k in 1..=CDF_LEVELS {
        let v = cdf.quantile(k as f64 / CDF_LEVELS as f64);
        if points.last().is_none_or(|p| p.0 != v) {
            points.push((v, cdf.eval(v)));
        }
    }
    CdfSeries { n, scheme: scheme.to_string(), kind: kind.to_string(), points }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Variant {
    Plain,
    Rayleigh,
}

impl Variant {
    fn label(&self) -> &'static str {
        match self {
            Variant::Plain => "greedy_itis_cover",
            Variant::Rayleigh => "greedy_itis_cover+rayleigh",
        }
    }
}

fn run_covers(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult> {
    let kind = cfg.experiment;
    let budget = cfg.budget.resolve()?;
    let (ChannelModel::PathLoss { g0, alpha } | ChannelModel::RayleighPathLoss { g0, alpha }) = cfg.channel else {
        return Err(config("cover experiments need a path-loss channel"));
    };
    let variants = if kind == ExperimentKind::FadingFraction || cfg.fading {
        vec![Variant::Plain, Variant::Rayleigh]
    } else if matches!(cfg.channel, ChannelModel::RayleighPathLoss { .. }) {
        vec![Variant::Rayleigh]
    } else {
        vec![Variant::Plain]
    };
    let constant = cfg.regime_constant().ok();
    let mut out = ExperimentResult::default();
    for (bi, beta) in cfg.beta_grid().into_iter().enumerate() {
        let topo = cfg.topology_for(beta);
        let TopologyParams::Disk { beta: beta_value, .. } = topo else {
            return Err(config("cover experiments need the disk topology"));
        };
        let suffix = beta_suffix(cfg, beta);
        for &n in &cfg.n_list {
            let seed = cell_seed(cfg, n, bi);
            let kappas = run_trials(cfg.trials, exec, |trial| {
                let t = topo.generate(n, &mut substream(seed, trial as u64, LANE_TOPOLOGY))?;
                let order: Vec<usize> = (0..n).collect();
                variants
                    .iter()
                    .map(|v| {
                        let s = match v {
                            Variant::Plain => snr_table(
                                &t,
                                &ChannelModel::PathLoss { g0, alpha },
                                &budget,
                                seed,
                                trial,
                                LANE_CHANNEL,
                            )?,
                            Variant::Rayleigh => snr_table(
                                &t,
                                &ChannelModel::RayleighPathLoss { g0, alpha },
                                &budget,
                                seed,
                                trial,
                                LANE_FADING,
                            )?,
                        };
                        Ok(greedy_itis_cover(&s, &order)?.kappa)
                    })
                    .collect::<Result<Vec<usize>>>()
            })?;

            let mut inv_by_variant = Vec::new();
            for (vi, v) in variants.iter().enumerate() {
                let name = format!("{}{suffix}", v.label());
                let reports = kappas.iter().map(|k| fraction_from_kappa(k[vi], n)).collect::<Result<Vec<_>>>()?;
                let inv: Vec<f64> = reports.iter().map(|r| r.lambda).collect();
                let kap: Vec<f64> = reports.iter().map(|r| r.kappa as f64).collect();
                let gap: Vec<f64> = reports.iter().map(|r| r.gap_bits).collect();
                out.rows.push(stat_row(kind, n, &name, "mean_inv_kappa", &inv));
                out.rows.push(stat_row(kind, n, &name, "mean_kappa", &kap));
                out.rows.push(stat_row(kind, n, &name, "mean_gap_bits", &gap));
                inv_by_variant.push(inv);
            }
            if variants.len() == 2 {
                let diff: Vec<f64> = inv_by_variant[1].iter().zip(&inv_by_variant[0]).map(|(a, b)| a - b).collect();
                out.rows.push(stat_row(kind, n, &format!("rayleigh_minus_plain{suffix}"), "mean_inv_kappa", &diff));
            }
            if let Some(c) = constant {
                if n >= 3 || (n == 2 && beta_value != 1.0) {
                    let th = theoretical_fraction_with_constant(beta_value, n, c)?;
                    out.rows.push(row(kind, n, &format!("theory{suffix}"), "lambda", th.lambda, 0.0));
                    out.rows.push(row(kind, n, &format!("theory{suffix}"), "gap_bits", th.gap_bits, 0.0));
                }
            }
            out.rows.push(row(kind, n, &format!("tdma{suffix}"), "lambda", 1.0 / n as f64, 0.0));
        }
    }
    Ok(out)
}
