//! Random node placements for the network models.
//!
//! Three models are supported:
//!
//! * **Disk**: sources uniform on a disk of radius `R` around the origin, each
//!   destination uniform on the disk of radius `r0 * n^(-beta)` around its
//!   source.
//! * **Square**: sources uniform in a `side x side` square, each destination at
//!   a uniform length in `[len_min, len_max]` and uniform angle from its
//!   source. Destinations may land outside the square.
//! * **ClosestSource**: `2n` points uniform on a disk; destinations are paired
//!   with their nearest still-unassigned source, destinations taken in index
//!   order.
//!
//! All generators are pure functions of their parameters and RNG state.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{seeded, SimRng};

/// A point in the plane, in meters. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::new(p[0], p[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyModel {
    Disk,
    Square,
    ClosestSource,
}

/// Generation parameters, tagged by model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologyParams {
    Disk { radius_m: f64, r0_m: f64, beta: f64 },
    Square { side_m: f64, len_min_m: f64, len_max_m: f64 },
    ClosestSource { radius_m: f64 },
}

impl TopologyParams {
    pub fn model(&self) -> TopologyModel {
        match self {
            TopologyParams::Disk { .. } => TopologyModel::Disk,
            TopologyParams::Square { .. } => TopologyModel::Square,
            TopologyParams::ClosestSource { .. } => TopologyModel::ClosestSource,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TopologyParams::Disk { radius_m, r0_m, beta } => {
                positive("radius_m", radius_m)?;
                positive("r0_m", r0_m)?;
                positive("beta", beta)
            }
            TopologyParams::Square { side_m, len_min_m, len_max_m } => {
                positive("side_m", side_m)?;
                positive("len_min_m", len_min_m)?;
                if !(len_min_m <= len_max_m && len_max_m <= side_m) {
                    return Err(invalid(format!(
                        "need 0 < len_min ({len_min_m}) <= len_max ({len_max_m}) <= side ({side_m})"
                    )));
                }
                Ok(())
            }
            TopologyParams::ClosestSource { radius_m } => positive("radius_m", radius_m),
        }
    }

    /// Generate `n` links from these parameters.
    pub fn generate(&self, n: usize, rng: &mut impl Rng) -> Result<LinkTopology> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        self.validate()?;
        let (src, dst) = match *self {
            TopologyParams::Disk { radius_m, r0_m, beta } => {
                let r_n = link_radius(n, r0_m, beta);
                let mut src = Vec::with_capacity(n);
                let mut dst = Vec::with_capacity(n);
                for _ in 0..n {
                    let s = uniform_in_disk(rng, Point::new(0.0, 0.0), radius_m);
                    let d = uniform_in_disk(rng, s, r_n);
                    src.push(s);
                    dst.push(d);
                }
                (src, dst)
            }
            TopologyParams::Square { side_m, len_min_m, len_max_m } => {
                let mut src = Vec::with_capacity(n);
                let mut dst = Vec::with_capacity(n);
                for _ in 0..n {
                    let s = Point::new(rng.random::<f64>() * side_m, rng.random::<f64>() * side_m);
                    let len = if len_min_m == len_max_m { len_min_m } else { rng.random_range(len_min_m..=len_max_m) };
                    let theta = rng.random::<f64>() * 2.0 * PI;
                    src.push(s);
                    dst.push(Point::new(s.x + len * theta.cos(), s.y + len * theta.sin()));
                }
                (src, dst)
            }
            TopologyParams::ClosestSource { radius_m } => {
                let origin = Point::new(0.0, 0.0);
                let sources: Vec<Point> = (0..n).map(|_| uniform_in_disk(rng, origin, radius_m)).collect();
                let dests: Vec<Point> = (0..n).map(|_| uniform_in_disk(rng, origin, radius_m)).collect();
                let pairing = pair_closest_sources(&sources, &dests)?;
                (pairing.iter().map(|&s| sources[s]).collect(), dests)
            }
        };
        Ok(LinkTopology { model: self.model(), params: *self, seed: None, src, dst })
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Maximum source-destination distance `r0 * n^(-beta)` of the disk model.
pub fn link_radius(n: usize, r0_m: f64, beta: f64) -> f64 {
    r0_m * (n as f64).powf(-beta)
}

fn uniform_in_disk(rng: &mut impl Rng, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * 2.0 * PI;
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Greedy one-to-one pairing: destinations are visited in index order and each
/// takes the nearest source not yet taken (lower source index on ties).
///
/// Returns, for each destination `j`, the index of its source.
pub fn pair_closest_sources(sources: &[Point], dests: &[Point]) -> Result<Vec<usize>> {
    if sources.len() != dests.len() {
        return Err(Error::DimensionMismatch { expected: sources.len(), actual: dests.len() });
    }
    let mut taken = vec![false; sources.len()];
    let mut pairing = Vec::with_capacity(dests.len());
    for d in dests {
        let mut best: Option<(usize, f64)> = None;
        for (s, p) in sources.iter().enumerate() {
            if taken[s] {
                continue;
            }
            let dist = p.distance(d);
            if best.is_none_or(|(_, b)| dist < b) {
                best = Some((s, dist));
            }
        }
        let (s, _) = best.expect("as many sources as destinations");
        taken[s] = true;
        pairing.push(s);
    }
    Ok(pairing)
}

/// Positions of `n` sources and `n` destinations; link `i` is `src[i] -> dst[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkTopology {
    pub model: TopologyModel,
    pub params: TopologyParams,
    /// Seed used by the seed-based constructors; `None` when generated from a
    /// caller-provided stream.
    pub seed: Option<u64>,
    pub src: Vec<Point>,
    pub dst: Vec<Point>,
}

impl LinkTopology {
    /// Build a topology from explicit positions.
    pub fn from_points(params: TopologyParams, src: Vec<Point>, dst: Vec<Point>) -> Result<Self> {
        if src.len() != dst.len() {
            return Err(Error::DimensionMismatch { expected: src.len(), actual: dst.len() });
        }
        if src.is_empty() {
            return Err(Error::EmptyInput);
        }
        params.validate()?;
        Ok(Self { model: params.model(), params, seed: None, src, dst })
    }

    pub fn n(&self) -> usize {
        self.src.len()
    }

    pub fn link_length(&self, i: usize) -> f64 {
        self.src[i].distance(&self.dst[i])
    }

    /// Distance from source `j` to destination `i`.
    pub fn cross_distance(&self, dst: usize, src: usize) -> f64 {
        self.src[src].distance(&self.dst[dst])
    }

    /// Check the invariants of the generating model. Returns a description of
    /// the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n();
        if self.dst.len() != n || n == 0 {
            return Err(format!("src/dst lengths {} / {}", n, self.dst.len()));
        }
        if self.model != self.params.model() {
            return Err(format!("model tag {:?} does not match params", self.model));
        }
        match self.params {
            TopologyParams::Disk { radius_m, r0_m, beta } => {
                let r_n = link_radius(n, r0_m, beta);
                for i in 0..n {
                    if self.src[i].norm() > radius_m {
                        return Err(format!("source {i} outside the disk"));
                    }
                    if self.link_length(i) > r_n * (1.0 + 1e-12) {
                        return Err(format!("link {i} longer than r_n = {r_n}"));
                    }
                }
            }
            TopologyParams::Square { side_m, len_min_m, len_max_m } => {
                for i in 0..n {
                    let s = self.src[i];
                    if !(0.0..=side_m).contains(&s.x) || !(0.0..=side_m).contains(&s.y) {
                        return Err(format!("source {i} outside the square"));
                    }
                    let len = self.link_length(i);
                    let tol = 1e-9 * len_max_m;
                    if len < len_min_m - tol || len > len_max_m + tol {
                        return Err(format!("link {i} length {len} outside bounds"));
                    }
                }
            }
            TopologyParams::ClosestSource { radius_m } => {
                // Greedy pairing: src[i] is the nearest among sources not
                // claimed by destinations 0..i.
                for i in 0..n {
                    if self.src[i].norm() > radius_m || self.dst[i].norm() > radius_m {
                        return Err(format!("point of link {i} outside the disk"));
                    }
                    let own = self.link_length(i);
                    for j in i + 1..n {
                        if self.src[j].distance(&self.dst[i]) < own {
                            return Err(format!("destination {i} has an unassigned source closer than its own"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("topology serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: LinkTopology = serde_json::from_str(s).map_err(|e| Error::Config(format!("topology JSON: {e}")))?;
        t.params.validate()?;
        t.check_invariants().map_err(Error::InvalidParameter)?;
        Ok(t)
    }
}

fn with_seed(params: TopologyParams, n: usize, seed: u64) -> Result<LinkTopology> {
    let mut rng: SimRng = seeded(seed);
    let mut t = params.generate(n, &mut rng)?;
    t.seed = Some(seed);
    Ok(t)
}

pub fn gen_disk_topology(n: usize, radius_m: f64, r0_m: f64, beta: f64, seed: u64) -> Result<LinkTopology> {
    with_seed(TopologyParams::Disk { radius_m, r0_m, beta }, n, seed)
}

pub fn gen_square_topology(n: usize, side_m: f64, len_min_m: f64, len_max_m: f64, seed: u64) -> Result<LinkTopology> {
    with_seed(TopologyParams::Square { side_m, len_min_m, len_max_m }, n, seed)
}

pub fn gen_closest_source_topology(n: usize, radius_m: f64, seed: u64) -> Result<LinkTopology> {
    with_seed(TopologyParams::ClosestSource { radius_m }, n, seed)
}

/// Symmetric `n x n` matrix (row-major) of source-to-source distances.
pub fn pairwise_source_distances(t: &LinkTopology) -> Vec<f64> {
    let n = t.n();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = t.src[i].distance(&t.src[j]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_disk_link_within_r0() {
        for seed in 0..20 {
            let t = gen_disk_topology(1, 10_000.0, 1000.0, 1.0, seed).unwrap();
            assert!(t.src[0].norm() <= 10_000.0);
            assert!(t.link_length(0) <= 1000.0);
        }
    }

    #[test]
    fn disk_link_radius_shrinks_with_n() {
        let t = gen_disk_topology(4, 10_000.0, 1000.0, 0.5, 3).unwrap();
        for i in 0..4 {
            assert!(t.link_length(i) <= 500.0);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_disk_topology(100, 10_000.0, 1000.0, 1.0, 7).unwrap();
        let b = gen_disk_topology(100, 10_000.0, 1000.0, 1.0, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_square_topology(50, 1000.0, 2.0, 65.0, 7).unwrap();
        let d = gen_square_topology(50, 1000.0, 2.0, 65.0, 7).unwrap();
        assert_eq!(c, d);
        let e = gen_closest_source_topology(30, 500.0, 7).unwrap();
        let f = gen_closest_source_topology(30, 500.0, 7).unwrap();
        assert_eq!(e, f);
    }

    #[test]
    fn degenerate_length_interval() {
        let t = gen_square_topology(1, 1000.0, 10.0, 10.0, 1).unwrap();
        assert!((t.link_length(0) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn square_lengths_in_bounds() {
        let t = gen_square_topology(1024, 1000.0, 2.0, 65.0, 11).unwrap();
        for i in 0..t.n() {
            let l = t.link_length(i);
            assert!((2.0 - 1e-9..=65.0 + 1e-9).contains(&l), "{l}");
        }
        t.check_invariants().unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_disk_topology(0, 1.0, 1.0, 1.0, 0).is_err());
        assert!(gen_disk_topology(1, 0.0, 1.0, 1.0, 0).is_err());
        assert!(gen_disk_topology(1, 1.0, -1.0, 1.0, 0).is_err());
        assert!(gen_disk_topology(1, 1.0, 1.0, 0.0, 0).is_err());
        assert!(gen_square_topology(1, 1000.0, 0.0, 10.0, 0).is_err());
        assert!(gen_square_topology(1, 1000.0, 20.0, 10.0, 0).is_err());
        assert!(gen_square_topology(1, 5.0, 2.0, 10.0, 0).is_err());
        assert!(gen_closest_source_topology(0, 1.0, 0).is_err());
    }

    #[test]
    fn single_closest_source_pair() {
        let t = gen_closest_source_topology(1, 100.0, 5).unwrap();
        assert_eq!(t.n(), 1);
        t.check_invariants().unwrap();
    }

    #[test]
    fn forced_pairing_matches_exhaustive_assignment() {
        let sources = [Point::new(0.0, 0.0), Point::new(100.0, 0.0)];
        let dests = [Point::new(1.0, 0.0), Point::new(99.0, 0.0)];
        // Both permutations: identity costs 1 + 1, swap costs 99 + 99.
        assert_eq!(pair_closest_sources(&sources, &dests).unwrap(), vec![0, 1]);
        let swapped = [Point::new(99.0, 0.0), Point::new(1.0, 0.0)];
        assert_eq!(pair_closest_sources(&sources, &swapped).unwrap(), vec![1, 0]);
    }

    #[test]
    fn pairing_ties_go_to_lower_index() {
        let sources = [Point::new(-1.0, 0.0), Point::new(1.0, 0.0)];
        let dests = [Point::new(0.0, 0.0), Point::new(0.0, 5.0)];
        assert_eq!(pair_closest_sources(&sources, &dests).unwrap(), vec![0, 1]);
    }

    #[test]
    fn distance_matrix_examples() {
        let p = TopologyParams::Disk { radius_m: 10.0, r0_m: 1.0, beta: 1.0 };
        let t = LinkTopology::from_points(
            p,
            vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)],
            vec![Point::new(0.1, 0.0), Point::new(3.0, 4.1)],
        )
        .unwrap();
        let d = pairwise_source_distances(&t);
        assert_eq!(d, vec![0.0, 5.0, 5.0, 0.0]);

        let t = LinkTopology::from_points(
            p,
            (0..3).map(|i| Point::new(i as f64, 0.0)).collect(),
            (0..3).map(|i| Point::new(i as f64, 0.1)).collect(),
        )
        .unwrap();
        let d = pairwise_source_distances(&t);
        assert_eq!((d[1], d[5], d[2]), (1.0, 1.0, 2.0));
        for i in 0..3 {
            assert_eq!(d[i * 3 + i], 0.0);
            for j in 0..3 {
                assert_eq!(d[i * 3 + j], d[j * 3 + i]);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let t = gen_square_topology(5, 1000.0, 2.0, 65.0, 3).unwrap();
        let json = t.to_json();
        assert!(json.contains("\"model\":\"square\""));
        assert!(json.contains("\"seed\":3"));
        assert_eq!(LinkTopology::from_json(&json).unwrap(), t);
    }

    #[test]
    fn mean_squared_radius_is_half_r_squared() {
        let r = 1000.0;
        let n = 10_000;
        let t = gen_disk_topology(n, r, 1.0, 1.0, 42).unwrap();
        let sq: Vec<f64> = t.src.iter().map(|p| p.norm().powi(2)).collect();
        let mean = sq.iter().sum::<f64>() / n as f64;
        let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - r * r / 2.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }
}
