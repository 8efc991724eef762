//! Synchronous round engine for the randomized colour trials.
//!
//! Every uncoloured vertex draws a uniformly random candidate from its
//! palette (the colour space minus the colours already committed by its
//! neighbours) and commits unless a conflicting neighbour beats it under the
//! active priority rule:
//!
//! - `Symmetric`: any uncoloured neighbour trying the same candidate blocks
//!   both endpoints,
//! - `SmallerIdWins`: only a same-candidate neighbour with a smaller
//!   priority id blocks,
//! - `LargerDegreeWins`: only a same-candidate neighbour with strictly larger
//!   degree blocks; degree ties go to the smaller id.
//!
//! Per round, a vertex's decision uses exactly its own draw plus its
//! neighbours' candidates, commit bits and (rule-dependent) ids or degrees:
//! the conflict test is a pure function of that local view ([`beats`]), and
//! every value involved fits in `O(log n)` bits per edge per round.
//!
//! Candidate draws are counter-based: the draw for vertex `u` in round `t`
//! comes from a stream keyed by `(master seed, u, t)` and is therefore
//! independent of evaluation order and thread schedule. Palettes are never
//! materialized; the candidate is the `j`-th smallest non-forbidden colour,
//! found by rank-select over the sorted forbidden set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hrg::{build_layering, HrgGraph, VertexId};
use crate::rng::Stream;

const TAG_SIM: u64 = 0x51;
const TAG_IDS: u64 = 0x1d;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("colour space must contain at least one colour")]
    EmptyColourSpace,
    #[error("vertex {vertex} has an empty palette")]
    EmptyPalette { vertex: VertexId },
    #[error("id assignment must be a permutation of 0..{expected}")]
    InvalidIds { expected: usize },
    #[error("max_rounds must be at least 1")]
    NoRoundBudget,
    #[error("no vertex at level {level} has a leaf neighbour")]
    NoEligibleTarget { level: u32 },
}

/// Size of the colour space; colours are `0..k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteSpec {
    pub k: u32,
}

impl PaletteSpec {
    pub fn new(k: u32) -> Result<Self, SimError> {
        if k == 0 {
            return Err(SimError::EmptyColourSpace);
        }
        Ok(PaletteSpec { k })
    }
}

/// Conflict-resolution rule between two vertices trying the same candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorityRule {
    /// The plain random colour trial: a collision blocks both vertices.
    Symmetric,
    /// Collision resolved in favour of the smaller priority id.
    SmallerIdWins,
    /// Collision resolved in favour of the strictly larger degree; ties by
    /// smaller id.
    LargerDegreeWins,
}

/// How vertices obtain their priority ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdStrategy {
    /// Identity: vertex index is the id.
    ByIndex,
    /// Seeded uniform permutation.
    RandomPermutation { seed: u64 },
    /// Gives the vertex with the most leaves at `level` the largest id and
    /// its leaves the smallest ids, so the leaves outrank it everywhere.
    AdversarialLeafPriority { level: u32 },
}

/// A permutation of the vertex indices used as priority ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdAssignment {
    ids: Vec<u32>,
}

impl IdAssignment {
    pub fn from_vec(ids: Vec<u32>) -> Result<Self, SimError> {
        let n = ids.len();
        let mut seen = vec![false; n];
        for &id in &ids {
            if id as usize >= n || seen[id as usize] {
                return Err(SimError::InvalidIds { expected: n });
            }
            seen[id as usize] = true;
        }
        Ok(IdAssignment { ids })
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }
}

/// Vertex with the most leaf neighbours at the given level (ties broken by
/// index); the target the adversarial id assignment is built around.
pub fn adversarial_target(g: &HrgGraph, level: u32) -> Result<VertexId, SimError> {
    let layering = build_layering(g);
    let mut best: Option<(usize, VertexId)> = None;
    for &u in layering.members_at(level) {
        let leaves = g.leaves_of(u).expect("vertex in layering").len();
        if leaves >= 1 && best.is_none_or(|(b, _)| leaves > b) {
            best = Some((leaves, u));
        }
    }
    best.map(|(_, u)| u)
        .ok_or(SimError::NoEligibleTarget { level })
}

pub fn assign_ids(g: &HrgGraph, strategy: IdStrategy) -> Result<IdAssignment, SimError> {
    let n = g.num_vertices();
    let ids = match strategy {
        IdStrategy::ByIndex => (0..n as u32).collect(),
        IdStrategy::RandomPermutation { seed } => {
            let mut ids: Vec<u32> = (0..n as u32).collect();
            Stream::derive(seed, &[TAG_IDS]).shuffle(&mut ids);
            ids
        }
        IdStrategy::AdversarialLeafPriority { level } => {
            let target = adversarial_target(g, level)?;
            let leaves = g.leaves_of(target).expect("valid target");
            let mut ids = vec![u32::MAX; n];
            for (rank, &leaf) in leaves.iter().enumerate() {
                ids[leaf as usize] = rank as u32;
            }
            ids[target as usize] = n as u32 - 1;
            let mut next = leaves.len() as u32;
            for id in ids.iter_mut() {
                if *id == u32::MAX {
                    *id = next;
                    next += 1;
                }
            }
            ids
        }
    };
    IdAssignment::from_vec(ids)
}

/// Colouring state between rounds. Snapshots are immutable values; stepping
/// produces a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Completed rounds.
    round: u32,
    assigned: Vec<Option<u32>>,
    /// Per vertex, the sorted set of colours committed in its neighbourhood.
    forbidden: Vec<Vec<u32>>,
    /// Uncoloured vertices in ascending order.
    uncoloured: Vec<VertexId>,
    ids: Vec<u32>,
    k: u32,
    seed: u64,
}

impl SimState {
    pub fn new(g: &HrgGraph, palette: PaletteSpec, ids: &IdAssignment, seed: u64) -> Self {
        let n = g.num_vertices();
        assert_eq!(ids.ids().len(), n, "id assignment size mismatch");
        SimState {
            round: 0,
            assigned: vec![None; n],
            forbidden: vec![Vec::new(); n],
            uncoloured: (0..n as VertexId).collect(),
            ids: ids.ids().to_vec(),
            k: palette.k,
            seed,
        }
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn assigned(&self) -> &[Option<u32>] {
        &self.assigned
    }

    pub fn uncoloured(&self) -> &[VertexId] {
        &self.uncoloured
    }

    /// Palette size `X(u) = k - |forbidden(u)|`.
    pub fn palette_size(&self, u: VertexId) -> u32 {
        self.k - self.forbidden[u as usize].len() as u32
    }

    /// Uniformly random candidate from the palette of `u` for the upcoming
    /// round; a pure function of `(seed, u, round)`.
    pub fn candidate_colour(&self, u: VertexId) -> Result<u32, SimError> {
        let x = self.palette_size(u);
        if x == 0 {
            return Err(SimError::EmptyPalette { vertex: u });
        }
        let j = Stream::derive(self.seed, &[TAG_SIM, u as u64, self.round as u64])
            .next_below(x as u64) as u32;
        Ok(rank_select(&self.forbidden[u as usize], j))
    }
}

/// The `j`-th smallest colour not contained in the sorted list `forbidden`.
fn rank_select(forbidden: &[u32], j: u32) -> u32 {
    let mut c = j;
    for &f in forbidden {
        if f <= c {
            c += 1;
        } else {
            break;
        }
    }
    c
}

/// Whether contender `a` beats contender `b` on a colour collision.
#[inline]
fn beats(rule: PriorityRule, a: (u32, usize), b: (u32, usize)) -> bool {
    let ((id_a, deg_a), (id_b, deg_b)) = (a, b);
    match rule {
        PriorityRule::Symmetric => true,
        PriorityRule::SmallerIdWins => id_a < id_b,
        PriorityRule::LargerDegreeWins => deg_a > deg_b || (deg_a == deg_b && id_a < id_b),
    }
}

/// Executes one synchronous round: simultaneous candidate draws, conflict
/// resolution, commit, forbidden-set update. Fails with `EmptyPalette` if an
/// uncoloured vertex has no colour left to draw.
pub fn step(g: &HrgGraph, state: &SimState, rule: PriorityRule) -> Result<SimState, SimError> {
    let n = g.num_vertices();
    let mut candidates: Vec<Option<u32>> = vec![None; n];
    for &u in &state.uncoloured {
        candidates[u as usize] = Some(state.candidate_colour(u)?);
    }

    let mut next = state.clone();
    next.round += 1;

    let mut commits: Vec<(VertexId, u32)> = Vec::new();
    for &u in &state.uncoloured {
        let cu = candidates[u as usize].expect("uncoloured vertex drew");
        let me = (state.ids[u as usize], g.neighbours(u).len());
        let blocked = g.neighbours(u).iter().any(|&v| {
            candidates[v as usize] == Some(cu)
                && beats(rule, (state.ids[v as usize], g.neighbours(v).len()), me)
        });
        if !blocked {
            commits.push((u, cu));
        }
    }

    for &(u, c) in &commits {
        next.assigned[u as usize] = Some(c);
    }
    for &(u, c) in &commits {
        for &v in g.neighbours(u) {
            if next.assigned[v as usize].is_none() {
                let list = &mut next.forbidden[v as usize];
                if let Err(pos) = list.binary_search(&c) {
                    list.insert(pos, c);
                }
            }
        }
    }
    next.uncoloured
        .retain(|&u| next.assigned[u as usize].is_none());

    debug_assert!(
        validate_colouring(g, &next.assigned).proper,
        "properness is a loop invariant"
    );
    Ok(next)
}

/// Proof that a run can never finish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// An uncoloured vertex whose neighbours exhausted the colour space.
    EmptyPalette { vertex: VertexId },
    /// Two adjacent uncoloured vertices locked on the same single colour;
    /// under the symmetric rule they collide forever.
    LockedPair {
        u: VertexId,
        v: VertexId,
        colour: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum RunOutcome {
    Completed {
        rounds: u32,
    },
    NeverTerminates {
        rounds_executed: u32,
        certificate: Certificate,
    },
    RoundLimit {
        rounds: u32,
        uncoloured: usize,
    },
}

/// Per-round progress measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    pub round: u32,
    pub uncoloured_total: usize,
    pub uncoloured_per_level: Vec<usize>,
    pub max_uncoloured_degree: usize,
    pub min_palette: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub rounds: Vec<RoundStats>,
}

/// The outcome of a full run plus the final state it stopped in.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: RunOutcome,
    pub trace: Trace,
    pub final_state: SimState,
}

/// Runs the trial to completion, a non-termination certificate, or the round
/// limit. Pure in `(graph, palette, rule, ids, seed, max_rounds)`.
pub fn run(
    g: &HrgGraph,
    palette: PaletteSpec,
    rule: PriorityRule,
    ids: &IdAssignment,
    seed: u64,
    max_rounds: u32,
) -> Result<RunResult, SimError> {
    if max_rounds == 0 {
        return Err(SimError::NoRoundBudget);
    }
    if ids.ids().len() != g.num_vertices() {
        return Err(SimError::InvalidIds {
            expected: g.num_vertices(),
        });
    }
    let layering = build_layering(g);
    let mut state = SimState::new(g, palette, ids, seed);
    let mut trace = Trace::default();

    loop {
        if state.uncoloured.is_empty() {
            return Ok(RunResult {
                outcome: RunOutcome::Completed {
                    rounds: state.round,
                },
                trace,
                final_state: state,
            });
        }
        if let Some(cert) = find_certificate(g, &state, rule) {
            return Ok(RunResult {
                outcome: RunOutcome::NeverTerminates {
                    rounds_executed: state.round,
                    certificate: cert,
                },
                trace,
                final_state: state,
            });
        }
        if state.round >= max_rounds {
            return Ok(RunResult {
                outcome: RunOutcome::RoundLimit {
                    rounds: state.round,
                    uncoloured: state.uncoloured.len(),
                },
                trace,
                final_state: state,
            });
        }
        state = step(g, &state, rule)?;
        trace.rounds.push(round_stats(g, &state, &layering));
    }
}

/// Empty-palette scan, plus the locked-pair scan under the symmetric rule
/// (restricted to uncoloured vertices with a single-colour palette).
fn find_certificate(g: &HrgGraph, state: &SimState, rule: PriorityRule) -> Option<Certificate> {
    for &u in &state.uncoloured {
        if state.palette_size(u) == 0 {
            return Some(Certificate::EmptyPalette { vertex: u });
        }
    }
    if rule != PriorityRule::Symmetric {
        return None;
    }
    for &u in &state.uncoloured {
        if state.palette_size(u) != 1 {
            continue;
        }
        let cu = rank_select(&state.forbidden[u as usize], 0);
        for &v in g.neighbours(u) {
            if v > u
                && state.assigned[v as usize].is_none()
                && state.palette_size(v) == 1
                && rank_select(&state.forbidden[v as usize], 0) == cu
            {
                return Some(Certificate::LockedPair { u, v, colour: cu });
            }
        }
    }
    None
}

fn round_stats(g: &HrgGraph, state: &SimState, layering: &crate::hrg::Layering) -> RoundStats {
    let mut per_level = vec![0usize; layering.max_level as usize + 1];
    let mut min_palette = None;
    for &u in &state.uncoloured {
        per_level[layering.level_of[u as usize] as usize] += 1;
        let x = state.palette_size(u);
        min_palette = Some(min_palette.map_or(x, |m: u32| m.min(x)));
    }
    let max_uncoloured_degree = (0..g.num_vertices() as VertexId)
        .map(|u| {
            g.neighbours(u)
                .iter()
                .filter(|&&v| state.assigned[v as usize].is_none())
                .count()
        })
        .max()
        .unwrap_or(0);
    RoundStats {
        round: state.round,
        uncoloured_total: state.uncoloured.len(),
        uncoloured_per_level: per_level,
        max_uncoloured_degree,
        min_palette,
    }
}

/// Result of checking a (partial) colouring against the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringCheck {
    /// No edge has two equal committed colours.
    pub proper: bool,
    /// Proper and every vertex is coloured.
    pub total: bool,
    pub first_violation: Option<(VertexId, VertexId)>,
}

pub fn validate_colouring(g: &HrgGraph, assigned: &[Option<u32>]) -> ColouringCheck {
    let mut total = true;
    for colour in assigned {
        if colour.is_none() {
            total = false;
            break;
        }
    }
    for u in 0..g.num_vertices() as VertexId {
        if let Some(cu) = assigned[u as usize] {
            for &v in g.neighbours(u) {
                if v > u && assigned[v as usize] == Some(cu) {
                    return ColouringCheck {
                        proper: false,
                        total: false,
                        first_violation: Some((u, v)),
                    };
                }
            }
        }
    }
    ColouringCheck {
        proper: true,
        total,
        first_violation: None,
    }
}

#[cfg(test)]
mod tests;
