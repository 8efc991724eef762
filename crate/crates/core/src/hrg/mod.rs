//! Threshold hyperbolic random graphs.
//!
//! A graph is sampled by a Poisson point process on the disk of radius
//! `R = 2 ln(n) + C`: the number of vertices is `Poisson(n)`, each vertex
//! gets an independent radius via the inverse radial CDF and a uniform
//! angle, and two vertices are adjacent iff their hyperbolic distance is at
//! most `R`. Everything is keyed off a single 64-bit seed; the same seed
//! reproduces the same graph bit for bit regardless of thread count.
//!
//! Edge construction sorts vertices into radial bands of width one and, per
//! vertex, only scans the angular window inside each band that can possibly
//! contain neighbours. Every candidate is then checked with the exact
//! distance predicate, so the output equals the quadratic reference builder
//! [`brute_force_edges`] exactly; the reference is kept as the test oracle.

mod io;

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    self, ball_measure_origin, cosh_distance, sample_radius, theta_threshold, DiskSpec,
    GeometryError, PolarPoint,
};
use crate::rng::Stream;

pub use io::read_instance;

pub type VertexId = u32;

/// Default cap on the number of edges a single generation may produce.
pub const DEFAULT_EDGE_BUDGET: u64 = 100_000_000;

const TAG_COUNT: u64 = 0xc0;
const TAG_COORD: u64 = 0xc1;

#[derive(Debug, Error)]
pub enum HrgError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("edge budget exceeded: about {estimate} edges expected, budget {budget}")]
    EdgeBudgetExceeded { estimate: u64, budget: u64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance violates the adjacency invariant: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Model parameters. The disk radius is derived: `R = 2 ln(n) + C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrgParams {
    /// Expected number of vertices (the Poisson mean).
    pub n: u64,
    /// Radial density parameter, in `(1/2, 1)`; controls the power-law tail.
    pub alpha: f64,
    /// Radius offset constant.
    pub c: f64,
    /// Master seed.
    pub seed: u64,
}

impl HrgParams {
    pub fn new(n: u64, alpha: f64, c: f64, seed: u64) -> Result<Self, HrgError> {
        let params = HrgParams { n, alpha, c, seed };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<(), HrgError> {
        if self.n < 1 {
            return Err(HrgError::InvalidParams("n must be at least 1".into()));
        }
        if !(self.alpha > 0.5 && self.alpha < 1.0) {
            return Err(HrgError::InvalidParams(format!(
                "alpha must lie in (1/2, 1), got {}",
                self.alpha
            )));
        }
        if self.radius() <= 0.0 || self.radius().is_nan() {
            return Err(HrgError::InvalidParams(format!(
                "derived disk radius 2 ln(n) + C = {} must be positive",
                self.radius()
            )));
        }
        Ok(())
    }

    /// Disk radius `R = 2 ln(n) + C`.
    pub fn radius(&self) -> f64 {
        2.0 * (self.n as f64).ln() + self.c
    }

    pub fn disk_spec(&self) -> DiskSpec {
        DiskSpec {
            radius: self.radius(),
            alpha: self.alpha,
        }
    }
}

/// A sampled graph: immutable coordinates plus sorted adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct HrgGraph {
    params: HrgParams,
    coords: Vec<PolarPoint>,
    adj: Vec<Vec<VertexId>>,
}

/// Assignment of vertices to layers. Layer `l` is the annulus at distance
/// `[l, l+1)` from the disk boundary, i.e. radii in `(R-l-1, R-l]`; a radius
/// exactly on a band boundary belongs to the inner (larger level) side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layering {
    pub level_of: Vec<u32>,
    pub members: Vec<Vec<VertexId>>,
    pub max_level: u32,
}

impl Layering {
    pub fn members_at(&self, level: u32) -> &[VertexId] {
        self.members
            .get(level as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Generates a graph with the default edge budget.
pub fn generate(params: &HrgParams) -> Result<HrgGraph, HrgError> {
    generate_with_budget(params, DEFAULT_EDGE_BUDGET)
}

/// Generates a graph, failing early if the expected edge count exceeds the
/// budget (and failing late if the realized count does).
pub fn generate_with_budget(params: &HrgParams, edge_budget: u64) -> Result<HrgGraph, HrgError> {
    params.validate()?;
    let count = Stream::derive(params.seed, &[TAG_COUNT]).poisson(params.n as f64);
    if count > u32::MAX as u64 {
        return Err(HrgError::InvalidParams(format!(
            "realized vertex count {count} exceeds u32 range"
        )));
    }
    let coords = sample_coords(params, count as usize);

    // Cheap a-priori bound: certain failure is reported before the scan.
    let lower_estimate = expected_edges_lower(params, &coords);
    if lower_estimate > edge_budget as f64 {
        return Err(HrgError::EdgeBudgetExceeded {
            estimate: lower_estimate as u64,
            budget: edge_budget,
        });
    }

    let edges = band_scan_edges(&coords, params.radius());
    if edges.len() as u64 > edge_budget {
        return Err(HrgError::EdgeBudgetExceeded {
            estimate: edges.len() as u64,
            budget: edge_budget,
        });
    }
    HrgGraph::from_parts(*params, coords, edges)
}

fn sample_coords(params: &HrgParams, count: usize) -> Vec<PolarPoint> {
    let disk = params.disk_spec();
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut s = Stream::derive(params.seed, &[TAG_COORD, i as u64]);
            let r = sample_radius(s.next_f64(), &disk);
            let phi = s.next_f64() * TAU;
            PolarPoint::new(r, phi)
        })
        .collect()
}

fn expected_edges_lower(params: &HrgParams, coords: &[PolarPoint]) -> f64 {
    let n = params.n as f64;
    let lower_const = params.alpha / (PI * (params.alpha - 0.5));
    0.5 * coords
        .iter()
        .map(|p| n * lower_const * (-p.r / 2.0).exp())
        .sum::<f64>()
}

/// The quadratic reference edge builder; the oracle the fast path is tested
/// against. Pairs are returned with `u < v` in lexicographic order.
pub fn brute_force_edges(coords: &[PolarPoint], radius: f64) -> Vec<(VertexId, VertexId)> {
    let cosh_r = radius.cosh();
    let mut edges = Vec::new();
    for i in 0..coords.len() {
        for j in (i + 1)..coords.len() {
            if cosh_distance(coords[i], coords[j]) <= cosh_r {
                edges.push((i as VertexId, j as VertexId));
            }
        }
    }
    edges
}

/// Near-linear edge construction: radial bands of width one, per-vertex
/// angular window per band, exact predicate on every candidate.
fn band_scan_edges(coords: &[PolarPoint], radius: f64) -> Vec<(VertexId, VertexId)> {
    if coords.is_empty() {
        return Vec::new();
    }
    let cosh_r = radius.cosh();
    let band_count = radius.floor() as usize + 1;

    // Vertices per band, sorted by angle.
    let mut bands: Vec<Vec<(f64, VertexId)>> = vec![Vec::new(); band_count];
    for (i, p) in coords.iter().enumerate() {
        let b = (p.r.floor() as usize).min(band_count - 1);
        bands[b].push((p.phi, i as VertexId));
    }
    for band in &mut bands {
        band.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    }

    let per_vertex: Vec<Vec<(VertexId, VertexId)>> = (0..coords.len())
        .into_par_iter()
        .map(|u| {
            let pu = coords[u];
            let mut found = Vec::new();
            for (b, band) in bands.iter().enumerate() {
                if band.is_empty() {
                    continue;
                }
                let band_lo = (b as f64).max(f64::MIN_POSITIVE);
                let window = if pu.r + band_lo <= radius {
                    PI
                } else {
                    // A hair of slack absorbs rounding at the window edge;
                    // candidates are re-checked exactly anyway.
                    (theta_threshold(pu.r, band_lo, radius).expect("positive radii") + 1e-9)
                        .min(PI)
                };
                let mut check = |v: VertexId| {
                    if v as usize > u && cosh_distance(pu, coords[v as usize]) <= cosh_r {
                        found.push((u as VertexId, v));
                    }
                };
                if window >= PI {
                    for &(_, v) in band {
                        check(v);
                    }
                } else {
                    for (start, end) in wrapped_ranges(band, pu.phi, window) {
                        for &(_, v) in &band[start..end] {
                            check(v);
                        }
                    }
                }
            }
            found
        })
        .collect();

    per_vertex.into_iter().flatten().collect()
}

/// Index ranges of `band` (sorted by angle) whose angle lies within `window`
/// of `phi`, taking wrap-around at `2*pi` into account.
fn wrapped_ranges(band: &[(f64, VertexId)], phi: f64, window: f64) -> Vec<(usize, usize)> {
    let lo = phi - window;
    let hi = phi + window;
    let search = |x: f64| band.partition_point(|&(p, _)| p < x);
    let mut ranges = Vec::with_capacity(2);
    if lo < 0.0 {
        ranges.push((search(lo + TAU), band.len()));
        ranges.push((0, search(hi)));
    } else if hi > TAU {
        ranges.push((search(lo), band.len()));
        ranges.push((0, search(hi - TAU)));
    } else {
        ranges.push((search(lo), search(hi)));
    }
    ranges
}

impl HrgGraph {
    /// Builds a graph from explicit coordinates and an edge list. The edge
    /// list is taken at face value (no distance check); use
    /// [`HrgGraph::validate_adjacency`] to verify it against the coordinates.
    pub fn from_parts(
        params: HrgParams,
        coords: Vec<PolarPoint>,
        edges: Vec<(VertexId, VertexId)>,
    ) -> Result<Self, HrgError> {
        params.validate()?;
        let n = coords.len();
        let radius = params.radius();
        for (i, p) in coords.iter().enumerate() {
            if !(0.0..=radius).contains(&p.r) || !p.r.is_finite() || !p.phi.is_finite() {
                return Err(HrgError::InvalidParams(format!(
                    "vertex {i} has coordinates ({}, {}) outside the disk of radius {radius}",
                    p.r, p.phi
                )));
            }
        }
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(HrgError::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(HrgError::InvalidParams(format!("self-loop at vertex {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(HrgError::InvalidParams(format!(
                    "duplicate edge at vertex {u}"
                )));
            }
        }
        Ok(HrgGraph {
            params,
            coords,
            adj,
        })
    }

    /// Synthetic-graph helper for tests and harnesses: places `n` vertices
    /// on the disk boundary and wires exactly the given edges.
    pub fn from_edge_list(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, HrgError> {
        let params = HrgParams::new(n.max(2) as u64, 0.75, 0.0, 0)?;
        let radius = params.radius();
        let coords = (0..n)
            .map(|i| PolarPoint::new(radius, i as f64 * TAU / n.max(1) as f64))
            .collect();
        Self::from_parts(params, coords, edges.to_vec())
    }

    pub fn params(&self) -> &HrgParams {
        &self.params
    }

    /// Realized vertex count (the Poisson draw at generation time).
    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn coords(&self) -> &[PolarPoint] {
        &self.coords
    }

    pub fn point(&self, u: VertexId) -> PolarPoint {
        self.coords[u as usize]
    }

    /// Sorted neighbour list. Panics on an out-of-range vertex.
    pub fn neighbours(&self, u: VertexId) -> &[VertexId] {
        &self.adj[u as usize]
    }

    fn check_vertex(&self, u: VertexId) -> Result<(), HrgError> {
        if (u as usize) < self.coords.len() {
            Ok(())
        } else {
            Err(HrgError::VertexOutOfRange {
                vertex: u,
                n: self.coords.len(),
            })
        }
    }

    pub fn degree(&self, u: VertexId) -> Result<usize, HrgError> {
        self.check_vertex(u)?;
        Ok(self.adj[u as usize].len())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The degree-1 neighbours of `u`.
    pub fn leaves_of(&self, u: VertexId) -> Result<Vec<VertexId>, HrgError> {
        self.check_vertex(u)?;
        Ok(self.adj[u as usize]
            .iter()
            .copied()
            .filter(|&v| self.adj[v as usize].len() == 1)
            .collect())
    }

    /// Neighbours of `u` whose degree is at least `deg(u)` (ties included).
    pub fn larger_degree_neighbourhood(&self, u: VertexId) -> Result<Vec<VertexId>, HrgError> {
        self.check_vertex(u)?;
        let du = self.adj[u as usize].len();
        Ok(self.adj[u as usize]
            .iter()
            .copied()
            .filter(|&v| self.adj[v as usize].len() >= du)
            .collect())
    }

    /// Vertices with radius at most `R/2`. Any two of them are within
    /// distance `r(u) + r(v) <= R`, so the set is a clique.
    pub fn core(&self) -> Vec<VertexId> {
        let half = self.params.radius() / 2.0;
        (0..self.coords.len() as VertexId)
            .filter(|&u| self.coords[u as usize].r <= half)
            .collect()
    }

    /// All edges as `(u, v)` pairs with `u < v`, lexicographically sorted.
    pub fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        let mut edges = Vec::with_capacity(self.num_edges());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if (u as VertexId) < v {
                    edges.push((u as VertexId, v));
                }
            }
        }
        edges
    }

    /// Recomputes the edge set from the coordinates and reports the first
    /// discrepancy, if any.
    pub fn validate_adjacency(&self) -> Result<(), HrgError> {
        let expected = band_scan_edges(&self.coords, self.params.radius());
        let mut expected = expected;
        expected.sort_unstable();
        let actual = self.edge_list();
        if expected == actual {
            return Ok(());
        }
        use std::collections::BTreeSet;
        let e: BTreeSet<_> = expected.iter().copied().collect();
        let a: BTreeSet<_> = actual.iter().copied().collect();
        if let Some(&(u, v)) = a.difference(&e).next() {
            let d = geometry::hyperbolic_distance(self.coords[u as usize], self.coords[v as usize]);
            return Err(HrgError::InvariantViolation(format!(
                "edge ({u}, {v}) present but distance {d:.6} exceeds R = {:.6}",
                self.params.radius()
            )));
        }
        let &(u, v) = e.difference(&a).next().expect("sets differ");
        Err(HrgError::InvariantViolation(format!(
            "edge ({u}, {v}) missing although the points are within distance R"
        )))
    }

    /// Induced subgraph on `vertices`; returns the kept (global) ids and the
    /// adjacency re-indexed to positions within `vertices`.
    pub fn induced(&self, vertices: &[VertexId]) -> (Vec<VertexId>, Vec<Vec<u32>>) {
        let mut local = vec![u32::MAX; self.coords.len()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                self.adj[v as usize]
                    .iter()
                    .filter_map(|&w| {
                        let l = local[w as usize];
                        (l != u32::MAX).then_some(l)
                    })
                    .collect()
            })
            .collect();
        (vertices.to_vec(), adj)
    }
}

/// Assigns every vertex to its layer.
pub fn build_layering(g: &HrgGraph) -> Layering {
    let radius = g.params().radius();
    let level_of: Vec<u32> = g
        .coords()
        .iter()
        .map(|p| (radius - p.r).floor().max(0.0) as u32)
        .collect();
    let max_level = level_of.iter().copied().max().unwrap_or(0);
    let mut members = vec![Vec::new(); max_level as usize + 1];
    for (v, &l) in level_of.iter().enumerate() {
        members[l as usize].push(v as VertexId);
    }
    Layering {
        level_of,
        members,
        max_level,
    }
}

/// Exact expected degree of a vertex at radius `r`: `n` times the measure of
/// the distance-`R` ball around it, evaluated by quadrature of the angular
/// window against the radial density.
pub fn expected_degree(r: f64, params: &HrgParams) -> f64 {
    let radius = params.radius();
    let spec = params.disk_spec();
    let inner = ball_measure_origin((radius - r).max(0.0).min(radius), &spec).expect("in disk");
    let norm = (params.alpha * radius).cosh() - 1.0;
    // angular fraction theta(x, r) / pi integrated over x in [R - r, R]
    let lo = (radius - r).max(0.0);
    let steps = 4000;
    let h = (radius - lo) / steps as f64;
    let f = |x: f64| {
        let theta = if x <= 0.0 {
            PI
        } else {
            theta_threshold(x.max(f64::MIN_POSITIVE), r.max(f64::MIN_POSITIVE), radius)
                .unwrap_or(PI)
        };
        let density = params.alpha * (params.alpha * x).sinh() / norm;
        (theta / PI) * density
    };
    let mut acc = f(lo) + f(radius);
    for i in 1..steps {
        let x = lo + i as f64 * h;
        acc += f(x) * if i % 2 == 0 { 2.0 } else { 4.0 };
    }
    let ring = acc * h / 3.0;
    params.n as f64 * (inner + ring)
}

/// Closed-form band `[lower, upper]` for the expected degree at radius `r`.
pub fn expected_degree_bounds(r: f64, params: &HrgParams) -> (f64, f64) {
    let n = params.n as f64;
    let a = params.alpha;
    let base = n * a * (-r / 2.0).exp() / (a - 0.5);
    (base / PI, base)
}

#[cfg(test)]
mod tests;
