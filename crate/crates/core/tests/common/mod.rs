//! Brute-force oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

use itlinq::channel::{db_to_linear, SnrTable};
use itlinq::rng::{seeded, SimRng};
use rand::Rng;

/// Plain matrices so the oracles do not go through the library accessors.
#[derive(Debug, Clone)]
pub struct Instance {
    pub snr: Vec<f64>,
    /// `inr[i][j]`: at destination `i` from source `j`.
    pub inr: Vec<Vec<f64>>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.snr.len()
    }

    pub fn table(&self) -> SnrTable {
        let flat = self.inr.iter().flatten().copied().collect();
        SnrTable::new(self.snr.clone(), flat).unwrap()
    }

    pub fn from_table(s: &SnrTable) -> Self {
        let n = s.n();
        Self {
            snr: (0..n).map(|i| s.snr(i)).collect(),
            inr: (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { s.inr(i, j) }).collect()).collect(),
        }
    }
}

/// SNRs and INRs drawn uniformly in dB.
pub fn random_instance(rng: &mut SimRng, n: usize, snr_db: (f64, f64), inr_db: (f64, f64)) -> Instance {
    let snr = (0..n).map(|_| db_to_linear(rng.random_range(snr_db.0..snr_db.1))).collect();
    let inr = (0..n)
        .map(|i| {
            (0..n).map(|j| if i == j { 0.0 } else { db_to_linear(rng.random_range(inr_db.0..inr_db.1)) }).collect()
        })
        .collect();
    Instance { snr, inr }
}

pub fn random_instances(
    seed: u64,
    count: usize,
    max_n: usize,
    snr_db: (f64, f64),
    inr_db: (f64, f64),
) -> Vec<Instance> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            random_instance(&mut rng, n, snr_db, inr_db)
        })
        .collect()
}

/// The ITIS condition written out: every member's SNR is at least the
/// product of its largest incoming and largest outgoing INR inside the set.
pub fn oracle_is_itis(inst: &Instance, set: &[usize]) -> bool {
    set.iter().all(|&i| {
        let mut max_in: f64 = 0.0;
        let mut max_out: f64 = 0.0;
        for &j in set {
            if j != i {
                max_in = max_in.max(inst.inr[i][j]);
                max_out = max_out.max(inst.inr[j][i]);
            }
        }
        inst.snr[i] >= max_in * max_out
    })
}

/// Every set partition of `0..n`, as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            go(prefix, n, max.max(b), out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut prefix = vec![0];
    go(&mut prefix, n, 0, &mut out);
    out
}

fn blocks(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut b = vec![Vec::new(); k];
    for (v, &l) in labels.iter().enumerate() {
        b[l].push(v);
    }
    b
}

/// Minimum number of ITISs partitioning the links, by exhaustive search.
pub fn oracle_min_itis_cover(inst: &Instance) -> usize {
    set_partitions(inst.n())
        .iter()
        .map(|labels| blocks(labels))
        .filter(|bs| bs.iter().all(|b| oracle_is_itis(inst, b)))
        .map(|bs| bs.len())
        .min()
        .unwrap()
}

/// Chromatic number by exhaustive search over partitions.
pub fn oracle_chromatic(n: usize, edges: &[(usize, usize)]) -> usize {
    set_partitions(n)
        .iter()
        .filter(|labels| edges.iter().all(|&(a, b)| labels[a] != labels[b]))
        .map(|labels| labels.iter().max().map_or(0, |m| m + 1))
        .min()
        .unwrap()
}

/// Algorithm 1 written as a straight line over the priority list.
pub fn oracle_itlinq(inst: &Instance, perm: &[usize], eta: f64, m_db: f64) -> Vec<bool> {
    let m = 10f64.powf(m_db / 10.0);
    let mut active = vec![false; inst.n()];
    active[perm[0]] = true;
    for (pos, &j) in perm.iter().enumerate().skip(1) {
        let limit = m * inst.snr[j].powf(eta);
        let mut ok = true;
        for &i in &perm[..pos] {
            if active[i] && inst.inr[j][i] > limit {
                ok = false;
            }
        }
        for &i in &perm[..pos] {
            if active[i] && inst.inr[i][j] > limit {
                ok = false;
            }
        }
        active[j] = ok;
    }
    active
}

/// Algorithm 2 written as a straight line.
pub fn oracle_fair(
    inst: &Instance,
    perm: &[usize],
    (eta, m_db): (f64, f64),
    snr_th_db: f64,
    (eta_bar, m_bar_db): (f64, f64),
) -> Vec<bool> {
    let m = 10f64.powf(m_db / 10.0);
    let m_bar = 10f64.powf(m_bar_db / 10.0);
    let th = 10f64.powf(snr_th_db / 10.0);
    let mut active = vec![false; inst.n()];
    active[perm[0]] = true;
    for (pos, &j) in perm.iter().enumerate().skip(1) {
        let rx = m * inst.snr[j].powf(eta);
        let tx = if inst.snr[j] > th { m_bar * inst.snr[j].powf(eta_bar) } else { rx };
        let earlier: Vec<usize> = perm[..pos].iter().copied().filter(|&i| active[i]).collect();
        active[j] = earlier.iter().all(|&i| inst.inr[j][i] <= rx) && earlier.iter().all(|&i| inst.inr[i][j] <= tx);
    }
    active
}

/// The FlashLinQ rule with summed receiver interference.
pub fn oracle_flashlinq(inst: &Instance, perm: &[usize], gamma_tx_db: f64, gamma_rx_db: f64) -> Vec<bool> {
    let gtx = 10f64.powf(gamma_tx_db / 10.0);
    let grx = 10f64.powf(gamma_rx_db / 10.0);
    let mut active = vec![false; inst.n()];
    active[perm[0]] = true;
    for (pos, &j) in perm.iter().enumerate().skip(1) {
        let earlier: Vec<usize> = perm[..pos].iter().copied().filter(|&i| active[i]).collect();
        let total: f64 = earlier.iter().map(|&i| inst.inr[j][i]).sum();
        let rx_ok = total == 0.0 || inst.snr[j] / total >= grx;
        let tx_ok = earlier.iter().all(|&i| inst.inr[i][j] == 0.0 || inst.snr[i] / inst.inr[i][j] >= gtx);
        active[j] = rx_ok && tx_ok;
    }
    active
}

/// Sum of `log2(1 + SINR)` over active links.
pub fn oracle_sum_rate(inst: &Instance, active: &[bool]) -> f64 {
    let n = inst.n();
    (0..n)
        .filter(|&i| active[i])
        .map(|i| {
            let interference: f64 = (0..n).filter(|&j| j != i && active[j]).map(|j| inst.inr[i][j]).sum();
            (1.0 + inst.snr[i] / (1.0 + interference)).log2()
        })
        .sum()
}

pub fn random_perm(rng: &mut SimRng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}
