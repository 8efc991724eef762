//! Deterministic LOCAL colouring via an inner/outer radius split.
//!
//! Vertices at radius `(2 - epsilon) ln n` or beyond form the outer set
//! `O`; it has small maximum degree and is coloured in a single simulated
//! round by a polynomial construction over a prime field (each vertex only
//! needs its own id and its neighbours' ids). The remaining inner set `I`
//! induces a subgraph of constant diameter; each component elects its
//! minimum-id vertex as leader, gathers the topology over eccentricity-many
//! rounds, colours centrally with the smallest-last greedy and
//! redistributes. The two sides use disjoint colour ranges, so cut edges are
//! proper by construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hrg::{HrgGraph, VertexId};
use crate::sim::validate_colouring;
use crate::structure::{estimate_chromatic, greedy_colour_in_order, smallest_last_order};

#[derive(Debug, Error, PartialEq)]
pub enum DetError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("vertex ids must be unique and below the id space {id_space}")]
    InvalidIdSpace { id_space: u64 },
    #[error("id space too large for 32-bit colours")]
    IdSpaceOverflow,
    #[error("outer palette too small: the one-round construction needs q^2 = {needed} colours, {available} available")]
    OuterPaletteTooSmall { needed: u64, available: u64 },
    #[error("inner palette too small: greedy colouring needs {needed} colours, {available} available")]
    InnerPaletteTooSmall { needed: usize, available: usize },
}

/// Radius-based split plus the two disjoint colour ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub epsilon: f64,
    /// Vertices with `r >= (2 - epsilon) ln n`, ascending.
    pub outer: Vec<VertexId>,
    /// The complement, ascending.
    pub inner: Vec<VertexId>,
    /// Colour range for the inner set: `[0, chi_upper)`.
    pub psi_inner: (u32, u32),
    /// Disjoint colour range for the outer set, `ceil(n^{3 (1 - alpha) / 4})`
    /// colours wide.
    pub psi_outer: (u32, u32),
}

impl Partition {
    pub fn psi_inner_len(&self) -> u32 {
        self.psi_inner.1 - self.psi_inner.0
    }

    pub fn psi_outer_len(&self) -> u32 {
        self.psi_outer.1 - self.psi_outer.0
    }
}

/// The split parameter the constant-round guarantee is proved at.
pub fn default_epsilon(alpha: f64) -> f64 {
    (1.0 - alpha) / 2.0
}

pub fn partition(g: &HrgGraph, epsilon: f64) -> Result<Partition, DetError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(DetError::EpsilonOutOfRange(epsilon));
    }
    let n = g.params().n as f64;
    let threshold = (2.0 - epsilon) * n.ln();
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for u in 0..g.num_vertices() as VertexId {
        if g.point(u).r >= threshold {
            outer.push(u);
        } else {
            inner.push(u);
        }
    }
    let chi_upper = estimate_chromatic(g).upper as u32;
    let outer_len = n.powf(3.0 * (1.0 - g.params().alpha) / 4.0).ceil() as u32;
    Ok(Partition {
        epsilon,
        outer,
        inner,
        psi_inner: (0, chi_upper),
        psi_outer: (chi_upper, chi_upper + outer_len),
    })
}

/// One-round colouring of a graph with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LinialColouring {
    /// Field size; the colour space is `[0, q^2)`.
    pub q: u64,
    /// Polynomial degree bound.
    pub degree: u32,
    /// Per-vertex colours `x * q + p(x)`, indexed like the input adjacency.
    pub colours: Vec<u32>,
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x.is_multiple_of(2) {
        return x == 2;
    }
    let mut d = 3;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn smallest_prime_at_least(x: u64) -> u64 {
    let mut x = x.max(2);
    while !is_prime(x) {
        x += 1;
    }
    x
}

/// Smallest integer `x` with `x^e >= m`. A `checked_pow` overflow means the
/// power certainly exceeds `m`.
fn ceil_root(m: u64, e: u32) -> u64 {
    if m <= 1 {
        return 1;
    }
    let ge = |x: u64| x.checked_pow(e).is_none_or(|p| p >= m);
    let mut x = (m as f64).powf(1.0 / e as f64).floor().max(1.0) as u64;
    while x > 1 && ge(x - 1) {
        x -= 1;
    }
    while !ge(x) {
        x += 1;
    }
    x
}

/// Picks the field size `q` (prime) and polynomial degree `d` minimising
/// the colour space `q^2` subject to `q >= delta * d + 1` (a collision-free
/// evaluation point must exist) and `q^{d+1} >= m` (ids must be encodable).
fn select_field(id_space: u64, delta: usize) -> (u64, u32) {
    let mut best: Option<(u64, u32)> = None;
    for d in 1..=60u32 {
        let qmin = ((delta as u64) * d as u64 + 1).max(ceil_root(id_space, d + 1)).max(2);
        let q = smallest_prime_at_least(qmin);
        if best.is_none_or(|(bq, _)| q < bq) {
            best = Some((q, d));
        }
        if let Some((bq, _)) = best {
            if (delta as u64) * d as u64 + 1 >= bq {
                break;
            }
        }
    }
    best.expect("at least one candidate degree")
}

/// Base-`q` digits of `id`, least significant first, as a polynomial over
/// the field of order `q` evaluated at `x`.
fn poly_eval(id: u64, q: u64, degree: u32, x: u64) -> u64 {
    let mut coeffs = [0u64; 61];
    let mut rest = id;
    for c in coeffs.iter_mut().take(degree as usize + 1) {
        *c = rest % q;
        rest /= q;
    }
    let mut acc = 0u64;
    for i in (0..=degree as usize).rev() {
        acc = (acc * x + coeffs[i]) % q;
    }
    acc
}

/// Colours a graph in one simulated round: each vertex encodes its id as a
/// low-degree polynomial over a prime field and picks the smallest
/// evaluation point where its value differs from every neighbour's value
/// there; the colour is the pair `(x, p(x))`. Distinct polynomials of
/// degree `d` agree on at most `d` points and `q > d * delta`, so a free
/// point always exists and adjacent vertices end up with distinct colours.
pub fn linial_one_round(
    adj: &[Vec<u32>],
    ids: &[u64],
    id_space: u64,
) -> Result<LinialColouring, DetError> {
    assert_eq!(adj.len(), ids.len());
    let mut seen = std::collections::HashSet::with_capacity(ids.len());
    for &id in ids {
        if id >= id_space || !seen.insert(id) {
            return Err(DetError::InvalidIdSpace { id_space });
        }
    }
    let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
    let (q, degree) = select_field(id_space.max(1), delta);
    if q.checked_mul(q).is_none_or(|c| c > u32::MAX as u64) {
        return Err(DetError::IdSpaceOverflow);
    }
    let mut colours = Vec::with_capacity(adj.len());
    for (u, neigh) in adj.iter().enumerate() {
        let mut chosen = None;
        for x in 0..q {
            let mine = poly_eval(ids[u], q, degree, x);
            if neigh
                .iter()
                .all(|&v| poly_eval(ids[v as usize], q, degree, x) != mine)
            {
                chosen = Some((x * q + mine) as u32);
                break;
            }
        }
        // q > d * delta guarantees a free evaluation point
        colours.push(chosen.expect("free evaluation point exists"));
    }
    Ok(LinialColouring { q, degree, colours })
}

/// Result of the gather-and-colour pass over the inner subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerColouring {
    /// Colours indexed like the inner vertex list, already offset into the
    /// inner palette range.
    pub colours: Vec<u32>,
    pub components: usize,
    /// Exact diameter of the inner subgraph (max over components).
    pub diameter: usize,
    /// Simulated rounds: up and down the leader's BFS tree, worst component.
    pub gather_rounds: u32,
    pub colours_used: usize,
}

fn bfs(adj: &[Vec<u32>], src: u32, dist: &mut [u32]) -> (u32, u32) {
    dist.fill(u32::MAX);
    dist[src as usize] = 0;
    let mut queue = std::collections::VecDeque::from([src]);
    let (mut far, mut ecc) = (src, 0);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                if dist[w as usize] > ecc {
                    ecc = dist[w as usize];
                    far = w;
                }
                queue.push_back(w);
            }
        }
    }
    (far, ecc)
}

/// Exact diameter of one component by iterative fringe upper bounding:
/// double sweep for a lower bound, then eccentricities of the BFS fringes
/// from a midpoint root, pruned once the bound closes.
fn component_diameter(adj: &[Vec<u32>], start: u32, scratch: &mut [u32]) -> u32 {
    let (a, _) = bfs(adj, start, scratch);
    let (b, ecc_a) = bfs(adj, a, scratch);
    // walk to the middle of the a-b path
    let mut parents = vec![u32::MAX; adj.len()];
    {
        scratch.fill(u32::MAX);
        scratch[a as usize] = 0;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v as usize] {
                if scratch[w as usize] == u32::MAX {
                    scratch[w as usize] = scratch[v as usize] + 1;
                    parents[w as usize] = v;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut mid = b;
    for _ in 0..(ecc_a / 2) {
        mid = parents[mid as usize];
    }
    let (_, ecc_mid) = bfs(adj, mid, scratch);
    let levels: Vec<Vec<u32>> = {
        let mut by_level = vec![Vec::new(); ecc_mid as usize + 1];
        for (v, &d) in scratch.iter().enumerate() {
            if d != u32::MAX {
                by_level[d as usize].push(v as u32);
            }
        }
        by_level
    };
    let mut lb = ecc_a;
    let mut dist2 = vec![u32::MAX; adj.len()];
    for i in (1..=ecc_mid).rev() {
        if lb >= 2 * i {
            break;
        }
        for &v in &levels[i as usize] {
            let (_, ecc_v) = bfs(adj, v, &mut dist2);
            lb = lb.max(ecc_v);
        }
    }
    lb
}

/// Colours the induced inner subgraph with the given palette range using
/// component leaders, a full gather, and central smallest-last greedy.
pub fn colour_inner(
    g: &HrgGraph,
    inner: &[VertexId],
    palette: (u32, u32),
) -> Result<InnerColouring, DetError> {
    let (_, adj) = g.induced(inner);
    let n = adj.len();
    let available = (palette.1 - palette.0) as usize;
    if n == 0 {
        return Ok(InnerColouring {
            colours: vec![],
            components: 0,
            diameter: 0,
            gather_rounds: 0,
            colours_used: 0,
        });
    }

    // components and leaders (minimum global id = minimum local index,
    // since the inner list is ascending)
    let mut component = vec![u32::MAX; n];
    let mut leaders = Vec::new();
    let mut scratch = vec![u32::MAX; n];
    let mut diameter = 0u32;
    let mut max_leader_ecc = 0u32;
    for v in 0..n as u32 {
        if component[v as usize] != u32::MAX {
            continue;
        }
        let comp_id = leaders.len() as u32;
        leaders.push(v);
        let (_, leader_ecc) = bfs(&adj, v, &mut scratch);
        for (w, &d) in scratch.iter().enumerate() {
            if d != u32::MAX {
                component[w] = comp_id;
            }
        }
        max_leader_ecc = max_leader_ecc.max(leader_ecc);
        diameter = diameter.max(component_diameter(&adj, v, &mut scratch));
    }

    let order = smallest_last_order(&adj);
    let raw = greedy_colour_in_order(&adj, &order);
    let needed = raw.iter().copied().max().map_or(0, |m| m as usize + 1);
    if needed > available {
        return Err(DetError::InnerPaletteTooSmall { needed, available });
    }
    Ok(InnerColouring {
        colours: raw.iter().map(|&c| palette.0 + c).collect(),
        components: leaders.len(),
        diameter: diameter as usize,
        gather_rounds: 2 * max_leader_ecc,
        colours_used: needed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetStats {
    /// One round for the outer colouring plus the gather rounds.
    pub rounds: u32,
    pub colours_used_inner: usize,
    pub colours_used_outer: usize,
    pub inner_diameter: usize,
    pub inner_components: usize,
    /// Maximum degree of the induced outer subgraph.
    pub outer_max_degree: usize,
    /// Field size used by the outer construction (0 when the outer set is
    /// empty).
    pub q: u64,
    pub psi_inner: (u32, u32),
    pub psi_outer: (u32, u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetOutcome {
    /// Total colouring, one colour per vertex.
    pub colouring: Vec<u32>,
    pub stats: DetStats,
}

/// The full deterministic algorithm: partition, one-round outer colouring
/// on its own range, gather-and-colour for the inner set. Fails loudly when
/// a palette cannot accommodate its side; that is a property of the
/// instance, not retried.
pub fn run_deterministic(g: &HrgGraph, epsilon: f64) -> Result<DetOutcome, DetError> {
    let part = partition(g, epsilon)?;
    let n = g.num_vertices();

    let (outer_colours, outer_max_degree, q) = if part.outer.is_empty() {
        (Vec::new(), 0, 0)
    } else {
        let (_, outer_adj) = g.induced(&part.outer);
        let outer_max_degree = outer_adj.iter().map(Vec::len).max().unwrap_or(0);
        let ids: Vec<u64> = part.outer.iter().map(|&v| v as u64).collect();
        let id_space = n as u64;
        let lin = linial_one_round(&outer_adj, &ids, id_space)?;
        let needed = lin.q * lin.q;
        let available = part.psi_outer_len() as u64;
        if needed > available {
            return Err(DetError::OuterPaletteTooSmall { needed, available });
        }
        (lin.colours, outer_max_degree, lin.q)
    };

    let inner = colour_inner(g, &part.inner, part.psi_inner)?;

    let mut colouring = vec![0u32; n];
    for (i, &v) in part.inner.iter().enumerate() {
        colouring[v as usize] = inner.colours[i];
    }
    let mut outer_used = std::collections::BTreeSet::new();
    for (i, &v) in part.outer.iter().enumerate() {
        colouring[v as usize] = part.psi_outer.0 + outer_colours[i];
        outer_used.insert(outer_colours[i]);
    }

    let assigned: Vec<Option<u32>> = colouring.iter().map(|&c| Some(c)).collect();
    let check = validate_colouring(g, &assigned);
    assert!(
        check.proper && check.total,
        "palette-disjoint composition must be proper, violation {:?}",
        check.first_violation
    );

    Ok(DetOutcome {
        colouring,
        stats: DetStats {
            rounds: 1 + inner.gather_rounds,
            colours_used_inner: inner.colours_used,
            colours_used_outer: outer_used.len(),
            inner_diameter: inner.diameter,
            inner_components: inner.components,
            outer_max_degree,
            q,
            psi_inner: part.psi_inner,
            psi_outer: part.psi_outer,
        },
    })
}
