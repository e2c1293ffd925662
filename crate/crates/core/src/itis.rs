//! Information-theoretic independent sets (ITIS).
//!
//! A set of links `S` is an ITIS when every member `i` satisfies
//!
//! ```text
//! snr[i] >= max_{j in S\{i}} inr[i][j] * max_{k in S\{i}} inr[k][i]
//! ```
//!
//! with the maximum over an empty set taken as 0. The property is hereditary:
//! every subset of an ITIS is an ITIS, so a minimum cover can always be taken
//! to be a partition.
//!
//! This module also builds the geometric conflict graph whose independent sets
//! are guaranteed ITISs under the disk model with pure path loss, and computes
//! greedy and exact covers of a network by ITISs or by conflict-graph colors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::SnrTable;
use crate::error::{invalid, Error, Result};
use crate::topology::LinkTopology;

pub const DEFAULT_EXACT_CHROMATIC_CAP: usize = 12;
pub const DEFAULT_EXACT_COVER_CAP: usize = 10;

fn check_ids(subset: &[usize], n: usize) -> Result<()> {
    match subset.iter().find(|&&id| id >= n) {
        Some(&id) => Err(Error::LinkOutOfRange { id, n }),
        None => Ok(()),
    }
}

fn dedup(subset: &[usize]) -> Vec<usize> {
    let mut v = subset.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Whether `subset` satisfies the ITIS condition under `s`. Ties admit.
pub fn is_itis(subset: &[usize], s: &SnrTable) -> Result<bool> {
    check_ids(subset, s.n())?;
    let members = dedup(subset);
    Ok(members.iter().all(|&i| {
        let (incoming, outgoing) = members
            .iter()
            .filter(|&&j| j != i)
            .fold((0.0f64, 0.0f64), |(a, b), &j| (a.max(s.inr(i, j)), b.max(s.inr(j, i))));
        s.snr(i) >= incoming * outgoing
    }))
}

/// Pairwise sufficient condition: every member `i` has
/// `inr[i][j] <= sqrt(snr[i])` and `inr[j][i] <= sqrt(snr[i])` for all other
/// members `j`.
pub fn is_itis_sufficient(subset: &[usize], s: &SnrTable) -> Result<bool> {
    check_ids(subset, s.n())?;
    let members = dedup(subset);
    Ok(members.iter().all(|&i| {
        let root = s.snr(i).sqrt();
        members.iter().filter(|&&j| j != i).all(|&j| s.inr(i, j) <= root && s.inr(j, i) <= root)
    }))
}

/// Threshold source separation `gamma * n^(-beta/2) + r0 * n^(-beta)` beyond
/// which two disk-model links do not need to be separated.
pub fn threshold_distance(n: usize, gamma_m: f64, r0_m: f64, beta: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let n = n as f64;
    Ok(gamma_m * n.powf(-beta / 2.0) + r0_m * n.powf(-beta))
}

/// `((P/N) g0 r0^alpha)^(1 / (2 alpha))`, in meters.
pub fn gamma_constant(p_linear: f64, n_linear: f64, g0: f64, r0_m: f64, alpha: f64) -> Result<f64> {
    for (name, v) in [("P", p_linear), ("N", n_linear), ("g0", g0), ("r0", r0_m), ("alpha", alpha)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    Ok((p_linear / n_linear * g0 * r0_m.powf(alpha)).powf(1.0 / (2.0 * alpha)))
}

/// Undirected graph joining links whose sources are within `threshold_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictGraph {
    n: usize,
    adjacency: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
    pub threshold_m: f64,
}

impl ConflictGraph {
    /// Build from an explicit edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![false; n * n];
        for &(a, b) in edges {
            check_ids(&[a, b], n)?;
            if a == b {
                return Err(invalid(format!("self-loop at {a}")));
            }
            adjacency[a * n + b] = true;
            adjacency[b * n + a] = true;
        }
        Ok(Self::from_adjacency(n, adjacency, f64::NAN))
    }

    fn from_adjacency(n: usize, adjacency: Vec<bool>, threshold_m: f64) -> Self {
        let neighbors = (0..n).map(|i| (0..n).filter(|&j| adjacency[i * n + j]).collect()).collect();
        Self { n, adjacency, neighbors, threshold_m }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a * self.n + b]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(k, &a)| set[k + 1..].iter().all(|&b| !self.has_edge(a, b)))
    }

    /// Edge list as CSV with a `source,target` header.
    pub fn to_edge_csv(&self) -> String {
        let mut out = String::from("source,target\n");
        for (a, b) in self.edges() {
            out.push_str(&format!("{a},{b}\n"));
        }
        out
    }
}

/// Edges exactly where the source-to-source distance is at most `d_th`.
pub fn build_conflict_graph(t: &LinkTopology, d_th: f64) -> ConflictGraph {
    let n = t.n();
    let mut adjacency = vec![false; n * n];
    for i in 0..n {
        for j in i + 1..n {
            if t.src[i].distance(&t.src[j]) <= d_th {
                adjacency[i * n + j] = true;
                adjacency[j * n + i] = true;
            }
        }
    }
    ConflictGraph::from_adjacency(n, adjacency, d_th)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    GreedyColoring,
    ExactChromatic,
    GreedyItisCover,
    ExactItisCover,
}

/// A partition of the links into classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    pub kappa: usize,
    pub method: CoverMethod,
    pub classes: Vec<Vec<usize>>,
}

impl CoverResult {
    fn new(method: CoverMethod, mut classes: Vec<Vec<usize>>) -> Self {
        for c in &mut classes {
            c.sort_unstable();
        }
        Self { kappa: classes.len(), method, classes }
    }

    fn from_labels(method: CoverMethod, labels: &[usize]) -> Self {
        let k = labels.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); k];
        for (v, &c) in labels.iter().enumerate() {
            classes[c].push(v);
        }
        Self::new(method, classes)
    }

    /// True when the classes are disjoint and their union is `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for c in &self.classes {
            for &v in c {
                if v >= n || seen[v] {
                    return false;
                }
                seen[v] = true;
            }
        }
        self.kappa == self.classes.len() && seen.into_iter().all(|s| s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cover serializes")
    }
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidPriority(format!("order has {} entries for {n} links", order.len())));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || seen[v] {
            return Err(Error::InvalidPriority(format!("order is not a permutation (entry {v})")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Smallest-last vertex order: repeatedly remove a minimum-degree vertex
/// (lowest index on ties); the order is the reverse of the removal sequence.
pub fn smallest_last_order(g: &ConflictGraph) -> Vec<usize> {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n).map(|v| g.neighbors(v).len()).collect();
    let mut removed = vec![false; n];
    let mut removal = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !removed[v]).min_by_key(|&v| (degree[v], v)).expect("vertex left");
        removed[v] = true;
        removal.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    removal.reverse();
    removal
}

/// First-fit coloring in `order`; each vertex takes the smallest color not
/// used by an already-colored neighbor.
pub fn greedy_coloring(g: &ConflictGraph, order: &[usize]) -> Result<CoverResult> {
    let n = g.n();
    check_order(order, n)?;
    let mut labels = vec![usize::MAX; n];
    let mut used = Vec::new();
    for &v in order {
        used.clear();
        used.resize(n, false);
        for &u in g.neighbors(v) {
            if labels[u] != usize::MAX {
                used[labels[u]] = true;
            }
        }
        labels[v] = used.iter().position(|&b| !b).unwrap_or(0);
    }
    Ok(CoverResult::from_labels(CoverMethod::GreedyColoring, &labels))
}

/// Greedy coloring in smallest-last order.
pub fn greedy_coloring_default(g: &ConflictGraph) -> CoverResult {
    greedy_coloring(g, &smallest_last_order(g)).expect("smallest-last order is a permutation")
}

/// Minimum partition of `0..n` into sets accepted by `good`, by dynamic
/// programming over subsets (`O(3^n)`).
fn exact_partition(n: usize, good: &[bool]) -> Vec<Vec<usize>> {
    let full = (1usize << n) - 1;
    let mut best = vec![u32::MAX; 1 << n];
    let mut choice = vec![0usize; 1 << n];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // Enumerate submasks of `rest`; the class always contains `low`.
        let mut sub = rest;
        loop {
            let class = sub | low;
            if good[class] {
                let cost = best[mask ^ class].saturating_add(1);
                if cost < best[mask] {
                    best[mask] = cost;
                    choice[mask] = class;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut classes = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let class = choice[mask];
        classes.push((0..n).filter(|&v| class >> v & 1 == 1).collect());
        mask ^= class;
    }
    classes
}

/// Exact chromatic number for graphs up to `cap` vertices.
pub fn exact_chromatic(g: &ConflictGraph, cap: usize) -> Result<CoverResult> {
    let n = g.n();
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::CapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(CoverResult::new(CoverMethod::ExactChromatic, Vec::new()));
    }
    let mut independent = vec![true; 1 << n];
    for mask in 1usize..1 << n {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        independent[mask] = independent[rest] && g.neighbors(v).iter().all(|&u| rest >> u & 1 == 0);
    }
    Ok(CoverResult::new(CoverMethod::ExactChromatic, exact_partition(n, &independent)))
}

/// Running state of one class in the greedy cover: for each member, the
/// largest incoming and outgoing INR within the class.
struct GreedyClass {
    members: Vec<usize>,
    incoming: Vec<f64>,
    outgoing: Vec<f64>,
}

impl GreedyClass {
    /// Insert `l` if the class stays an ITIS.
    fn try_insert(&mut self, l: usize, s: &SnrTable) -> bool {
        let (mut inc, mut out) = (0.0f64, 0.0f64);
        for &m in &self.members {
            inc = inc.max(s.inr(l, m));
            out = out.max(s.inr(m, l));
        }
        if s.snr(l) < inc * out {
            return false;
        }
        let fits = self
            .members
            .iter()
            .enumerate()
            .all(|(k, &m)| s.snr(m) >= self.incoming[k].max(s.inr(m, l)) * self.outgoing[k].max(s.inr(l, m)));
        if !fits {
            return false;
        }
        for (k, &m) in self.members.iter().enumerate() {
            self.incoming[k] = self.incoming[k].max(s.inr(m, l));
            self.outgoing[k] = self.outgoing[k].max(s.inr(l, m));
        }
        self.members.push(l);
        self.incoming.push(inc);
        self.outgoing.push(out);
        true
    }
}

/// First-fit cover: each link in `order` joins the first class that remains
/// an ITIS, otherwise opens a new one.
pub fn greedy_itis_cover(s: &SnrTable, order: &[usize]) -> Result<CoverResult> {
    check_order(order, s.n())?;
    let mut classes: Vec<GreedyClass> = Vec::new();
    for &l in order {
        if !classes.iter_mut().any(|c| c.try_insert(l, s)) {
            classes.push(GreedyClass { members: vec![l], incoming: vec![0.0], outgoing: vec![0.0] });
        }
    }
    Ok(CoverResult::new(CoverMethod::GreedyItisCover, classes.into_iter().map(|c| c.members).collect()))
}

/// Minimum number of ITISs covering all links, for networks up to `cap` links.
pub fn exact_itis_cover(s: &SnrTable, cap: usize) -> Result<CoverResult> {
    let n = s.n();
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut itis = vec![false; 1 << n];
    let mut members = Vec::with_capacity(n);
    for (mask, slot) in itis.iter_mut().enumerate() {
        members.clear();
        members.extend((0..n).filter(|&v| mask >> v & 1 == 1));
        *slot = is_itis(&members, s)?;
    }
    Ok(CoverResult::new(CoverMethod::ExactItisCover, exact_partition(n, &itis)))
}

/// Guaranteed capacity fraction `lambda` and gap `k` (bits) in the three
/// regimes of the destination-distance exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryFraction {
    pub lambda: f64,
    pub gap_bits: f64,
}

/// `2 pi R^2 / (sqrt(3) gamma^2)`, the constant of the `beta < 1` regime.
pub fn regime_constant(radius_m: f64, gamma_m: f64) -> f64 {
    2.0 * PI * radius_m * radius_m / (3f64.sqrt() * gamma_m * gamma_m)
}

pub fn theoretical_fraction(beta: f64, n: usize, radius_m: f64, gamma_m: f64) -> Result<TheoryFraction> {
    theoretical_fraction_with_constant(beta, n, regime_constant(radius_m, gamma_m))
}

/// Same as [`theoretical_fraction`] with the `beta < 1` constant supplied
/// directly (1 gives the normalized curves).
pub fn theoretical_fraction_with_constant(beta: f64, n: usize, constant: f64) -> Result<TheoryFraction> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let nf = n as f64;
    let log3n = (3.0 * nf).log2();
    if beta < 1.0 {
        let lambda = constant * nf.powf(beta - 1.0);
        Ok(TheoryFraction { lambda, gap_bits: lambda * log3n })
    } else if beta == 1.0 {
        if n < 3 {
            return Err(invalid("beta = 1 requires n >= 3"));
        }
        let ln_n = nf.ln();
        let lambda = ln_n.ln() / ln_n;
        Ok(TheoryFraction { lambda, gap_bits: ln_n.log2() + 3f64.log2() * lambda })
    } else {
        let classes = (1.0 / (beta - 1.0) + 0.5).floor() + 1.0;
        let lambda = 1.0 / classes;
        Ok(TheoryFraction { lambda, gap_bits: lambda * log3n })
    }
}
