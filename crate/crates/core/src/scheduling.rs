//! Priority-based link schedulers.
//!
//! All schedulers take an [`SnrTable`] and a [`PriorityOrder`] and walk the
//! links from highest to lowest priority, deciding each link against the set
//! of links already activated. The top-priority link is always active (except
//! under TDMA, which activates exactly the requested slot).

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, SnrTable};
use crate::error::{invalid, Error, Result};

/// A permutation of the links; `perm[0]` has the highest priority.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorityOrder(Vec<usize>);

impl PriorityOrder {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &v in &perm {
            if v >= n || seen[v] {
                return Err(Error::InvalidPriority(format!("{perm:?} is not a permutation of 0..{n}")));
            }
            seen[v] = true;
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Same order with `link` moved to the top.
    pub fn promote(&self, link: usize) -> Self {
        let mut perm = Vec::with_capacity(self.0.len());
        perm.push(link);
        perm.extend(self.0.iter().copied().filter(|&v| v != link));
        Self(perm)
    }
}

/// Uniform random permutation (Fisher-Yates).
pub fn random_priority(n: usize, rng: &mut impl Rng) -> Result<PriorityOrder> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Ok(PriorityOrder(perm))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItlinqParams {
    pub eta: f64,
    pub m_db: f64,
}

impl Default for ItlinqParams {
    fn default() -> Self {
        Self { eta: 0.7, m_db: 25.0 }
    }
}

impl ItlinqParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid(format!("eta must be positive, got {}", self.eta)));
        }
        if !self.m_db.is_finite() {
            return Err(invalid("m_db must be finite"));
        }
        Ok(())
    }

    /// Largest INR link `j` tolerates, `M * snr^eta`.
    fn threshold(&self, snr: f64) -> f64 {
        db_to_linear(self.m_db) * snr.powf(self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairItlinqParams {
    #[serde(flatten)]
    pub base: ItlinqParams,
    pub snr_th_db: f64,
    pub eta_bar: f64,
    pub m_bar_db: f64,
}

impl Default for FairItlinqParams {
    fn default() -> Self {
        Self { base: ItlinqParams::default(), snr_th_db: 110.0, eta_bar: 0.6, m_bar_db: 20.0 }
    }
}

impl FairItlinqParams {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        ItlinqParams { eta: self.eta_bar, m_db: self.m_bar_db }.validate()?;
        if self.eta_bar > self.base.eta {
            return Err(invalid(format!("eta_bar ({}) must not exceed eta ({})", self.eta_bar, self.base.eta)));
        }
        if !self.snr_th_db.is_finite() {
            return Err(invalid("snr_th_db must be finite"));
        }
        Ok(())
    }
}

/// How the FlashLinQ receiver combines interference from active links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RxAggregation {
    #[default]
    Sum,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlashLinqParams {
    pub gamma_tx_db: f64,
    pub gamma_rx_db: f64,
    #[serde(default)]
    pub rx_aggregation: RxAggregation,
}

impl Default for FlashLinqParams {
    fn default() -> Self {
        Self { gamma_tx_db: 9.0, gamma_rx_db: 9.0, rx_aggregation: RxAggregation::Sum }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    Itlinq,
    FairItlinq,
    Flashlinq,
    Tdma,
    AllOn,
}

/// The active set of one slot together with the order that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub active: Vec<bool>,
    pub priority: PriorityOrder,
    pub scheme: SchemeTag,
}

impl Schedule {
    pub fn n(&self) -> usize {
        self.active.len()
    }

    pub fn active_links(&self) -> Vec<usize> {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i).collect()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

fn check_dims(s: &SnrTable, p: &PriorityOrder) -> Result<()> {
    if s.n() != p.len() {
        return Err(Error::DimensionMismatch { expected: s.n(), actual: p.len() });
    }
    Ok(())
}

/// Walk `p` and admit each link for which `admit(j, active_so_far)` holds;
/// the first link is admitted unconditionally.
fn greedy_by_priority(
    s: &SnrTable,
    p: &PriorityOrder,
    scheme: SchemeTag,
    mut admit: impl FnMut(usize, &[usize]) -> bool,
) -> Result<Schedule> {
    check_dims(s, p)?;
    let mut active = vec![false; s.n()];
    let mut order: Vec<usize> = Vec::new();
    for (rank, &j) in p.as_slice().iter().enumerate() {
        if rank == 0 || admit(j, &order) {
            active[j] = true;
            order.push(j);
        }
    }
    Ok(Schedule { active, priority: p.clone(), scheme })
}

/// Distributed ITLinQ: link `j` joins when, for every already-active `i`,
/// `inr[j][i] <= M snr[j]^eta` (checked at its destination) and
/// `inr[i][j] <= M snr[j]^eta` (checked at its source).
pub fn itlinq_schedule(s: &SnrTable, p: &PriorityOrder, params: &ItlinqParams) -> Result<Schedule> {
    params.validate()?;
    greedy_by_priority(s, p, SchemeTag::Itlinq, |j, active| {
        let limit = params.threshold(s.snr(j));
        active.iter().all(|&i| s.inr(j, i) <= limit) && active.iter().all(|&i| s.inr(i, j) <= limit)
    })
}

/// Fair ITLinQ: as ITLinQ, but links whose SNR exceeds the threshold check
/// their outgoing interference against the stricter `M_bar snr^eta_bar`.
pub fn fair_itlinq_schedule(s: &SnrTable, p: &PriorityOrder, params: &FairItlinqParams) -> Result<Schedule> {
    params.validate()?;
    let strict = ItlinqParams { eta: params.eta_bar, m_db: params.m_bar_db };
    let snr_th = db_to_linear(params.snr_th_db);
    greedy_by_priority(s, p, SchemeTag::FairItlinq, |j, active| {
        let rx_limit = params.base.threshold(s.snr(j));
        let tx_limit = if s.snr(j) <= snr_th { rx_limit } else { strict.threshold(s.snr(j)) };
        active.iter().all(|&i| s.inr(j, i) <= rx_limit) && active.iter().all(|&i| s.inr(i, j) <= tx_limit)
    })
}

/// FlashLinQ-style SIR yielding: link `j` joins when its own SIR against the
/// active links is at least `gamma_rx` and it would leave every active link
/// `i` with `snr[i] / inr[i][j] >= gamma_tx`.
pub fn flashlinq_schedule(s: &SnrTable, p: &PriorityOrder, params: &FlashLinqParams) -> Result<Schedule> {
    let gamma_tx = db_to_linear(params.gamma_tx_db);
    let gamma_rx = db_to_linear(params.gamma_rx_db);
    greedy_by_priority(s, p, SchemeTag::Flashlinq, |j, active| {
        let interference = match params.rx_aggregation {
            RxAggregation::Sum => active.iter().map(|&i| s.inr(j, i)).sum::<f64>(),
            RxAggregation::Max => active.iter().map(|&i| s.inr(j, i)).fold(0.0, f64::max),
        };
        // snr / interference >= gamma, written without dividing by zero.
        s.snr(j) >= gamma_rx * interference && active.iter().all(|&i| s.snr(i) >= gamma_tx * s.inr(i, j))
    })
}

/// Exactly link `slot` active.
pub fn tdma_schedule(n: usize, slot: usize) -> Result<Schedule> {
    if slot >= n {
        return Err(Error::LinkOutOfRange { id: slot, n });
    }
    let mut active = vec![false; n];
    active[slot] = true;
    Ok(Schedule { active, priority: PriorityOrder::identity(n), scheme: SchemeTag::Tdma })
}

pub fn all_on_schedule(n: usize) -> Schedule {
    Schedule { active: vec![true; n], priority: PriorityOrder::identity(n), scheme: SchemeTag::AllOn }
}

/// A scheduling scheme with its parameters, as named in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scheme {
    Itlinq {
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_m_db")]
        m_db: f64,
    },
    FairItlinq {
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_m_db")]
        m_db: f64,
        #[serde(default = "default_snr_th_db")]
        snr_th_db: f64,
        #[serde(default = "default_eta_bar")]
        eta_bar: f64,
        #[serde(default = "default_m_bar_db")]
        m_bar_db: f64,
    },
    Flashlinq {
        #[serde(default = "default_gamma_db")]
        gamma_tx_db: f64,
        #[serde(default = "default_gamma_db")]
        gamma_rx_db: f64,
        #[serde(default)]
        rx_aggregation: RxAggregation,
    },
    Tdma,
    AllOn,
}

fn default_eta() -> f64 {
    ItlinqParams::default().eta
}
fn default_m_db() -> f64 {
    ItlinqParams::default().m_db
}
fn default_snr_th_db() -> f64 {
    FairItlinqParams::default().snr_th_db
}
fn default_eta_bar() -> f64 {
    FairItlinqParams::default().eta_bar
}
fn default_m_bar_db() -> f64 {
    FairItlinqParams::default().m_bar_db
}
fn default_gamma_db() -> f64 {
    9.0
}

impl Scheme {
    pub fn tag(&self) -> SchemeTag {
        match self {
            Scheme::Itlinq { .. } => SchemeTag::Itlinq,
            Scheme::FairItlinq { .. } => SchemeTag::FairItlinq,
            Scheme::Flashlinq { .. } => SchemeTag::Flashlinq,
            Scheme::Tdma => SchemeTag::Tdma,
            Scheme::AllOn => SchemeTag::AllOn,
        }
    }

    /// Short label used in result tables, e.g. `itlinq(eta=0.7,M=25dB)`.
    pub fn label(&self) -> String {
        match *self {
            Scheme::Itlinq { eta, m_db } => format!("itlinq(eta={eta},M={m_db}dB)"),
            Scheme::FairItlinq { eta, m_db, snr_th_db, eta_bar, m_bar_db } => {
                format!("fair_itlinq(eta={eta},M={m_db}dB,th={snr_th_db}dB,eta_bar={eta_bar},M_bar={m_bar_db}dB)")
            }
            Scheme::Flashlinq { gamma_tx_db, gamma_rx_db, rx_aggregation } => {
                let agg = match rx_aggregation {
                    RxAggregation::Sum => "",
                    RxAggregation::Max => ",rx=max",
                };
                format!("flashlinq(tx={gamma_tx_db}dB,rx={gamma_rx_db}dB{agg})")
            }
            Scheme::Tdma => "tdma".into(),
            Scheme::AllOn => "all_on".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Scheme::Itlinq { eta, m_db } => ItlinqParams { eta, m_db }.validate(),
            Scheme::FairItlinq { eta, m_db, snr_th_db, eta_bar, m_bar_db } => {
                FairItlinqParams { base: ItlinqParams { eta, m_db }, snr_th_db, eta_bar, m_bar_db }.validate()
            }
            Scheme::Flashlinq { gamma_tx_db, gamma_rx_db, .. } => {
                if gamma_tx_db.is_finite() && gamma_rx_db.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("FlashLinQ thresholds must be finite"))
                }
            }
            Scheme::Tdma | Scheme::AllOn => Ok(()),
        }
    }

    /// Schedule one slot. TDMA serves the top-priority link.
    pub fn schedule(&self, s: &SnrTable, p: &PriorityOrder) -> Result<Schedule> {
        match *self {
            Scheme::Itlinq { eta, m_db } => itlinq_schedule(s, p, &ItlinqParams { eta, m_db }),
            Scheme::FairItlinq { eta, m_db, snr_th_db, eta_bar, m_bar_db } => fair_itlinq_schedule(
                s,
                p,
                &FairItlinqParams { base: ItlinqParams { eta, m_db }, snr_th_db, eta_bar, m_bar_db },
            ),
            Scheme::Flashlinq { gamma_tx_db, gamma_rx_db, rx_aggregation } => {
                flashlinq_schedule(s, p, &FlashLinqParams { gamma_tx_db, gamma_rx_db, rx_aggregation })
            }
            Scheme::Tdma => {
                check_dims(s, p)?;
                let top = *p.as_slice().first().ok_or(Error::EmptyInput)?;
                let mut sched = tdma_schedule(s.n(), top)?;
                sched.priority = p.clone();
                Ok(sched)
            }
            Scheme::AllOn => {
                check_dims(s, p)?;
                let mut sched = all_on_schedule(s.n());
                sched.priority = p.clone();
                Ok(sched)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn two(snr: [f64; 2], inr01: f64, inr10: f64) -> SnrTable {
        SnrTable::new(snr.to_vec(), vec![0.0, inr01, inr10, 0.0]).unwrap()
    }

    const M0: ItlinqParams = ItlinqParams { eta: 0.5, m_db: 0.0 };

    #[test]
    fn random_priority_basics() {
        assert_eq!(random_priority(1, &mut seeded(0)).unwrap(), PriorityOrder::identity(1));
        assert!(random_priority(0, &mut seeded(0)).is_err());
        let a = random_priority(50, &mut seeded(3)).unwrap();
        let b = random_priority(50, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
        assert!(PriorityOrder::new(a.as_slice().to_vec()).is_ok());
    }

    #[test]
    fn random_priority_is_uniform_on_three() {
        let mut rng = seeded(17);
        let mut counts = std::collections::HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            *counts.entry(random_priority(3, &mut rng).unwrap().0).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        // Binomial(60000, 1/6): sd = sqrt(60000 * 1/6 * 5/6) ~ 91.3.
        let sd = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for (perm, c) in counts {
            assert!((c as f64 - 10_000.0).abs() < 3.0 * sd, "{perm:?}: {c}");
        }
    }

    #[test]
    fn itlinq_hand_traces() {
        let p = PriorityOrder::identity(2);
        let s = two([100.0, 100.0], 5.0, 5.0);
        assert_eq!(itlinq_schedule(&s, &p, &M0).unwrap().active, vec![true, true]);
        // inr[1][0] = 20 > 100^0.5 fails the destination check of link 1.
        let s = two([100.0, 100.0], 5.0, 20.0);
        assert_eq!(itlinq_schedule(&s, &p, &M0).unwrap().active, vec![true, false]);
        // inr[0][1] = 20 fails the source check of link 1.
        let s = two([100.0, 100.0], 20.0, 5.0);
        assert_eq!(itlinq_schedule(&s, &p, &M0).unwrap().active, vec![true, false]);
        let one = SnrTable::new(vec![2.0], vec![0.0]).unwrap();
        assert_eq!(itlinq_schedule(&one, &PriorityOrder::identity(1), &M0).unwrap().active, vec![true]);
    }

    #[test]
    fn itlinq_boundary_admits() {
        let p = PriorityOrder::identity(2);
        let s = two([100.0, 100.0], 10.0, 10.0);
        assert_eq!(itlinq_schedule(&s, &p, &M0).unwrap().active, vec![true, true]);
    }

    #[test]
    fn itlinq_margin_is_linear_multiplier() {
        let p = PriorityOrder::identity(2);
        let s = two([100.0, 100.0], 5.0, 99.0);
        let loose = ItlinqParams { eta: 0.5, m_db: 10.0 };
        assert_eq!(itlinq_schedule(&s, &p, &loose).unwrap().active, vec![true, true]);
        let s = two([100.0, 100.0], 5.0, 101.0);
        assert_eq!(itlinq_schedule(&s, &p, &loose).unwrap().active, vec![true, false]);
    }

    #[test]
    fn fair_matches_itlinq_below_threshold() {
        let p = PriorityOrder::identity(2);
        let s = two([100.0, 100.0], 5.0, 20.0);
        let fair = FairItlinqParams { base: M0, snr_th_db: 110.0, eta_bar: 0.4, m_bar_db: -5.0 };
        assert_eq!(fair_itlinq_schedule(&s, &p, &fair).unwrap().active, itlinq_schedule(&s, &p, &M0).unwrap().active);
        let one = SnrTable::new(vec![2.0], vec![0.0]).unwrap();
        assert_eq!(fair_itlinq_schedule(&one, &PriorityOrder::identity(1), &fair).unwrap().active, vec![true]);
    }

    #[test]
    fn fair_blocks_strong_link_in_the_sandwich() {
        // Link 1 has snr 1e12 (120 dB). With eta = 0.7, M = 25 dB the source
        // limit is 10^2.5 * 10^8.4 = 10^10.9; with eta_bar = 0.6, M_bar = 20 dB
        // it is 10^2 * 10^7.2 = 10^9.2. inr[0][1] = 10^10 sits in between.
        let params = FairItlinqParams::default();
        let s = SnrTable::new(vec![1e6, 1e12], vec![0.0, 1e10, 1.0, 0.0]).unwrap();
        let p = PriorityOrder::identity(2);
        assert_eq!(itlinq_schedule(&s, &p, &params.base).unwrap().active, vec![true, true]);
        assert_eq!(fair_itlinq_schedule(&s, &p, &params).unwrap().active, vec![true, false]);
    }

    #[test]
    fn fair_params_validation() {
        let bad = FairItlinqParams { eta_bar: 0.9, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(FairItlinqParams::default().validate().is_ok());
    }

    #[test]
    fn flashlinq_hand_traces() {
        let p = PriorityOrder::identity(2);
        let f = FlashLinqParams::default();
        let s = two([100.0, 100.0], 1.0, 1.0);
        assert_eq!(flashlinq_schedule(&s, &p, &f).unwrap().active, vec![true, true]);
        // snr[0] / inr[0][1] = 2 < 7.94: link 1 would hurt link 0.
        let s = two([100.0, 100.0], 50.0, 1.0);
        assert_eq!(flashlinq_schedule(&s, &p, &f).unwrap().active, vec![true, false]);
        let one = SnrTable::new(vec![2.0], vec![0.0]).unwrap();
        assert_eq!(flashlinq_schedule(&one, &PriorityOrder::identity(1), &f).unwrap().active, vec![true]);
    }

    #[test]
    fn flashlinq_rx_aggregation() {
        // Link 2 sees 8 from each of links 0 and 1: SIR 100/16 = 6.25 fails
        // under sum, 100/8 = 12.5 passes under max.
        let mut inr = vec![0.0; 9];
        inr[2 * 3] = 8.0;
        inr[2 * 3 + 1] = 8.0;
        let s = SnrTable::new(vec![100.0; 3], inr).unwrap();
        let p = PriorityOrder::identity(3);
        let sum = flashlinq_schedule(&s, &p, &FlashLinqParams::default()).unwrap();
        assert_eq!(sum.active, vec![true, true, false]);
        let max = FlashLinqParams { rx_aggregation: RxAggregation::Max, ..Default::default() };
        assert_eq!(flashlinq_schedule(&s, &p, &max).unwrap().active, vec![true, true, true]);
    }

    #[test]
    fn tdma_and_all_on() {
        assert_eq!(tdma_schedule(5, 0).unwrap().active_links(), vec![0]);
        let mut hits = vec![0; 4];
        for slot in 0..4 {
            for l in tdma_schedule(4, slot).unwrap().active_links() {
                hits[l] += 1;
            }
        }
        assert_eq!(hits, vec![1; 4]);
        assert_eq!(tdma_schedule(1, 0).unwrap().active, vec![true]);
        assert!(tdma_schedule(3, 3).is_err());
        assert_eq!(all_on_schedule(3).active, vec![true; 3]);
        assert_eq!(all_on_schedule(3).active_count(), 3);
    }

    #[test]
    fn priority_top_link_is_active() {
        let s = SnrTable::new(vec![1.0; 3], vec![1e9; 9]).unwrap();
        let p = PriorityOrder::new(vec![2, 0, 1]).unwrap();
        for scheme in [
            Scheme::Itlinq { eta: 0.7, m_db: 25.0 },
            Scheme::Flashlinq { gamma_tx_db: 9.0, gamma_rx_db: 9.0, rx_aggregation: RxAggregation::Sum },
            Scheme::Tdma,
        ] {
            assert_eq!(scheme.schedule(&s, &p).unwrap().active, vec![false, false, true]);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let s = SnrTable::new(vec![1.0; 3], vec![0.0; 9]).unwrap();
        assert!(itlinq_schedule(&s, &PriorityOrder::identity(2), &M0).is_err());
        assert!(PriorityOrder::new(vec![0, 0]).is_err());
    }

    #[test]
    fn scheme_json_defaults() {
        let s: Scheme = serde_json::from_str(r#"{"scheme":"itlinq","eta":0.5}"#).unwrap();
        assert_eq!(s, Scheme::Itlinq { eta: 0.5, m_db: 25.0 });
        let f: Scheme = serde_json::from_str(r#"{"scheme":"fair_itlinq"}"#).unwrap();
        assert_eq!(f.label(), "fair_itlinq(eta=0.7,M=25dB,th=110dB,eta_bar=0.6,M_bar=20dB)");
        assert!(serde_json::from_str::<Scheme>(r#"{"scheme":"itlinq","eta2":1}"#).is_err());
        assert!(serde_json::from_str::<Scheme>(r#"{"scheme":"aloha"}"#).is_err());
    }
}
