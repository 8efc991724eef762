//! Experiment harness: parameter sweeps over `(alpha, colour exponent, n)`
//! with seed batteries, outcome classification, and phase-diagram outputs.
//!
//! A sweep is a pure function of its configuration and master seed: cell
//! graphs and run seeds are derived per `(alpha, n, seed index)`, never from
//! cell order or thread schedule, so removing a cell changes no other cell
//! and re-running under any thread count reproduces byte-identical output
//! files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hrg::{self, HrgGraph, HrgParams};
use crate::rng::Stream;
use crate::sim::{
    self, assign_ids, IdStrategy, PaletteSpec, PriorityRule, RunOutcome,
};
use crate::structure::estimate_chromatic;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("alpha must lie in (1/2, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Closed-form colour-space exponents for a given `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedThresholds {
    /// `1 / (2 alpha + 1/2)`.
    pub zeta1: f64,
    /// `1 / (4 alpha - 1)`.
    pub zeta2: f64,
    /// `min(zeta1, 2 (1 - alpha))`: below this (over log n), trials lock.
    pub zeta_min: f64,
    /// `max(2 (1 - alpha), 1/2)`: two-round budget for degree priority.
    pub zeta_max: f64,
    /// `min(zeta1, zeta2)`: constant-round budget for degree priority.
    pub zeta_min_prime: f64,
    /// Maximum-degree exponent `1 / (2 alpha)`.
    pub delta_exponent: f64,
    /// Chromatic-number exponent `1 - alpha`.
    pub chi_exponent: f64,
}

pub fn thresholds(alpha: f64) -> Result<DerivedThresholds, SweepError> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(SweepError::AlphaOutOfRange(alpha));
    }
    let zeta1 = 1.0 / (2.0 * alpha + 0.5);
    let zeta2 = 1.0 / (4.0 * alpha - 1.0);
    Ok(DerivedThresholds {
        zeta1,
        zeta2,
        zeta_min: zeta1.min(2.0 * (1.0 - alpha)),
        zeta_max: (2.0 * (1.0 - alpha)).max(0.5),
        zeta_min_prime: zeta1.min(zeta2),
        delta_exponent: 1.0 / (2.0 * alpha),
        chi_exponent: 1.0 - alpha,
    })
}

/// Colour-space size for a cell: either a fixed exponent `f` (palette
/// `ceil(n^f)`) or one of the closed-form presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentSpec {
    Fixed(f64),
    Preset(Preset),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `ceil(Delta / 4)`: the epsilon-Delta two-round regime.
    EpsDelta,
    /// `ceil(ln^4 n * chi_upper^2)` for `alpha <= 3/4`, else
    /// `ceil(ln^4 n * sqrt(n))`: degree-priority two-round budget.
    Rctdeg2round,
    /// `ceil(ln n * n^{zeta'_min})`: degree-priority constant-round budget.
    RctdegConst,
    /// `floor(0.05 n^{zeta_min} / ln n)`: the locking regime.
    Lock,
    /// `floor(|L(target)| / (4 ln n))` for the adversarial target.
    RctidLock,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::EpsDelta => "eps_delta",
            Preset::Rctdeg2round => "rctdeg_2round",
            Preset::RctdegConst => "rctdeg_const",
            Preset::Lock => "lock",
            Preset::RctidLock => "rctid_lock",
        }
    }
}

impl ExponentSpec {
    pub fn label(&self) -> String {
        match self {
            ExponentSpec::Fixed(f) => format!("{f}"),
            ExponentSpec::Preset(p) => p.name().to_string(),
        }
    }

    /// Fixed exponents sort numerically before presets (alphabetical).
    fn sort_key(&self) -> (u8, f64, String) {
        match self {
            ExponentSpec::Fixed(f) => (0, *f, String::new()),
            ExponentSpec::Preset(p) => (1, 0.0, p.name().to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdStrategyConfig {
    Index,
    Random,
    Adversarial,
}

fn default_max_rounds() -> u32 {
    64
}
fn default_cutoff() -> u32 {
    10
}
fn default_edge_budget() -> u64 {
    hrg::DEFAULT_EDGE_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub exponents: Vec<ExponentSpec>,
    pub ns: Vec<u64>,
    /// Seeds per cell.
    pub seeds: u32,
    pub algo: PriorityRule,
    pub ids: IdStrategyConfig,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u32,
    /// Completed runs within this many rounds count as "constant rounds".
    #[serde(default = "default_cutoff")]
    pub const_round_cutoff: u32,
    /// Radius offset constant.
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_edge_budget")]
    pub edge_budget: u64,
}

impl SweepConfig {
    fn validate(&self) -> Result<(), SweepError> {
        for &a in &self.alphas {
            if !(a > 0.5 && a < 1.0) {
                return Err(SweepError::AlphaOutOfRange(a));
            }
        }
        for e in &self.exponents {
            if let ExponentSpec::Fixed(f) = e {
                if !(*f > 0.0 && *f <= 1.0) {
                    return Err(SweepError::InvalidConfig(format!(
                        "fixed exponent {f} outside (0, 1]"
                    )));
                }
            }
        }
        if self.seeds == 0 {
            return Err(SweepError::InvalidConfig("seeds must be at least 1".into()));
        }
        if self.max_rounds == 0 {
            return Err(SweepError::InvalidConfig(
                "max_rounds must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One sweep cell: the outcome histogram over its seed battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub alpha: f64,
    pub f: String,
    pub n: u64,
    /// Seeds that produced a run (errors excluded).
    pub seed_count: u32,
    pub completed2: u32,
    pub completed_const: u32,
    pub round_limit: u32,
    pub never: u32,
    /// Mean rounds among completed runs; NaN when none completed.
    pub mean_rounds: f64,
    /// Per-seed failures (generation errors, missing adversarial targets).
    pub errors: Vec<String>,
}

/// Derives the graph/run seed for `(alpha, n, seed index)`; deliberately
/// independent of the exponent so cells at the same `(alpha, n)` see the
/// same graphs, and of cell order so cells are independent.
fn cell_seed(master: u64, alpha: f64, n: u64, index: u32) -> u64 {
    Stream::derive(master, &[alpha.to_bits(), n, index as u64]).next_u64()
}

/// Base level for the adversarial target: `ceil((ln n - 1.1 ln ln n) / alpha)`.
pub fn adversarial_base_level(n: u64, alpha: f64) -> u32 {
    let ln = (n as f64).ln();
    let lll = if ln > 1.0 { ln.ln() } else { 0.0 };
    (((ln - 1.1 * lll) / alpha).ceil().max(0.0)) as u32
}

/// Searches the base level and its neighbours for a vertex with leaves.
pub fn find_adversarial_level(g: &HrgGraph, base: u32) -> Option<u32> {
    for offset in [0i64, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5] {
        let level = base as i64 + offset;
        if level < 0 {
            continue;
        }
        if sim::adversarial_target(g, level as u32).is_ok() {
            return Some(level as u32);
        }
    }
    None
}

/// Palette size for one generated graph under the configured exponent.
fn palette_size(
    spec: &ExponentSpec,
    g: &HrgGraph,
    alpha: f64,
    n: u64,
    adversarial_level: Option<u32>,
) -> Result<u32, String> {
    let nf = n as f64;
    let ln = nf.ln();
    let t = thresholds(alpha).expect("validated");
    let k = match spec {
        ExponentSpec::Fixed(f) => nf.powf(*f).ceil(),
        ExponentSpec::Preset(Preset::EpsDelta) => (g.max_degree() as f64 / 4.0).ceil(),
        ExponentSpec::Preset(Preset::Rctdeg2round) => {
            let chi = estimate_chromatic(g).upper as f64;
            if alpha <= 0.75 {
                (ln.powi(4) * chi * chi).ceil()
            } else {
                (ln.powi(4) * nf.sqrt()).ceil()
            }
        }
        ExponentSpec::Preset(Preset::RctdegConst) => (ln * nf.powf(t.zeta_min_prime)).ceil(),
        ExponentSpec::Preset(Preset::Lock) => (0.05 * nf.powf(t.zeta_min) / ln).floor(),
        ExponentSpec::Preset(Preset::RctidLock) => {
            let level = adversarial_level.ok_or("no adversarial target level")?;
            let target = sim::adversarial_target(g, level).map_err(|e| e.to_string())?;
            let leaves = g.leaves_of(target).expect("target in graph").len() as f64;
            (leaves / (4.0 * ln)).floor()
        }
    };
    Ok((k.max(1.0)) as u32)
}

fn run_cell(config: &SweepConfig, alpha: f64, spec: &ExponentSpec, n: u64) -> PhaseCell {
    let mut cell = PhaseCell {
        alpha,
        f: spec.label(),
        n,
        seed_count: 0,
        completed2: 0,
        completed_const: 0,
        round_limit: 0,
        never: 0,
        mean_rounds: f64::NAN,
        errors: Vec::new(),
    };
    let mut rounds_sum = 0u64;
    let mut completed = 0u32;
    for index in 0..config.seeds {
        let seed = cell_seed(config.master_seed, alpha, n, index);
        let params = match HrgParams::new(n, alpha, config.c, seed) {
            Ok(p) => p,
            Err(e) => {
                cell.errors.push(format!("seed {index}: {e}"));
                continue;
            }
        };
        let g = match hrg::generate_with_budget(&params, config.edge_budget) {
            Ok(g) => g,
            Err(e) => {
                cell.errors.push(format!("seed {index}: {e}"));
                continue;
            }
        };
        let adversarial_level = match (config.ids, spec) {
            (IdStrategyConfig::Adversarial, _) | (_, ExponentSpec::Preset(Preset::RctidLock)) => {
                find_adversarial_level(&g, adversarial_base_level(n, alpha))
            }
            _ => None,
        };
        let k = match palette_size(spec, &g, alpha, n, adversarial_level) {
            Ok(k) => k,
            Err(e) => {
                cell.errors.push(format!("seed {index}: {e}"));
                continue;
            }
        };
        let strategy = match config.ids {
            IdStrategyConfig::Index => IdStrategy::ByIndex,
            IdStrategyConfig::Random => IdStrategy::RandomPermutation { seed },
            IdStrategyConfig::Adversarial => match adversarial_level {
                Some(level) => IdStrategy::AdversarialLeafPriority { level },
                None => {
                    cell.errors
                        .push(format!("seed {index}: no adversarial target level"));
                    continue;
                }
            },
        };
        let ids = match assign_ids(&g, strategy) {
            Ok(ids) => ids,
            Err(e) => {
                cell.errors.push(format!("seed {index}: {e}"));
                continue;
            }
        };
        let palette = PaletteSpec::new(k).expect("clamped to >= 1");
        let result = match sim::run(&g, palette, config.algo, &ids, seed, config.max_rounds) {
            Ok(r) => r,
            Err(e) => {
                cell.errors.push(format!("seed {index}: {e}"));
                continue;
            }
        };
        cell.seed_count += 1;
        match result.outcome {
            RunOutcome::Completed { rounds } => {
                let check = sim::validate_colouring(&g, result.final_state.assigned());
                if !(check.proper && check.total) {
                    cell.errors
                        .push(format!("seed {index}: completed run failed validation"));
                    cell.seed_count -= 1;
                    continue;
                }
                completed += 1;
                rounds_sum += rounds as u64;
                if rounds <= 2 {
                    cell.completed2 += 1;
                } else if rounds <= config.const_round_cutoff {
                    cell.completed_const += 1;
                } else {
                    // finished, but past the constant-round budget
                    cell.round_limit += 1;
                }
            }
            RunOutcome::NeverTerminates { .. } => cell.never += 1,
            RunOutcome::RoundLimit { .. } => cell.round_limit += 1,
        }
    }
    if completed > 0 {
        cell.mean_rounds = rounds_sum as f64 / completed as f64;
    }
    cell
}

/// Runs every cell of the configured grid, honouring `HYPERCOLOR_THREADS`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<PhaseCell>, SweepError> {
    config.validate()?;
    let mut grid: Vec<(f64, ExponentSpec, u64)> = Vec::new();
    for &alpha in &config.alphas {
        for spec in &config.exponents {
            for &n in &config.ns {
                grid.push((alpha, spec.clone(), n));
            }
        }
    }
    grid.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then_with(|| a.1.sort_key().partial_cmp(&b.1.sort_key()).unwrap())
            .then_with(|| a.2.cmp(&b.2))
    });

    let work = || {
        grid.par_iter()
            .map(|(alpha, spec, n)| run_cell(config, *alpha, spec, *n))
            .collect::<Vec<_>>()
    };
    let cells = match thread_cap() {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SweepError::InvalidConfig(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(cells)
}

fn thread_cap() -> Option<usize> {
    std::env::var("HYPERCOLOR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
}

pub fn render_csv(cells: &[PhaseCell]) -> String {
    let mut out =
        String::from("alpha,f,n,seed_count,completed2,completed_const,round_limit,never,mean_rounds\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.alpha,
            c.f,
            c.n,
            c.seed_count,
            c.completed2,
            c.completed_const,
            c.round_limit,
            c.never,
            c.mean_rounds
        ));
    }
    out
}

const OUTCOME_CLASSES: [(char, &str); 4] = [
    ('2', "completed in <= 2 rounds"),
    ('c', "completed in constant rounds"),
    ('r', "round limit / slow"),
    ('N', "never terminates (certificate)"),
];

fn majority_class(cell: &PhaseCell) -> Option<usize> {
    if cell.seed_count == 0 {
        return None;
    }
    let counts = [cell.completed2, cell.completed_const, cell.round_limit, cell.never];
    let max = *counts.iter().max().unwrap();
    // ties resolved towards the more severe outcome
    (0..4).rev().find(|&i| counts[i] == max)
}

/// ASCII heatmap for one `n`: rows are exponents (descending), columns are
/// alphas (ascending); each cell shows the majority outcome.
pub fn render_heatmap(cells: &[PhaseCell], n: u64) -> String {
    let (alphas, specs) = grid_axes(cells, n);
    let mut out = format!("phase diagram, n = {n}\n");
    out.push_str("rows: colour-space f (descending); columns: alpha (ascending)\n");
    for (label, _) in specs.iter().rev() {
        out.push_str(&format!("{label:>14} |"));
        for &alpha in &alphas {
            let cell = cells
                .iter()
                .find(|c| c.n == n && c.alpha == alpha && &c.f == label);
            let ch = cell
                .and_then(majority_class)
                .map(|i| OUTCOME_CLASSES[i].0)
                .unwrap_or('.');
            out.push_str(&format!(" {ch}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("{:>14} |", "alpha"));
    for &alpha in &alphas {
        out.push_str(&format!(" {alpha}"));
    }
    out.push('\n');
    out.push_str(&format!("{:>14} |", "delta_exp 1/2a"));
    for &alpha in &alphas {
        out.push_str(&format!(" {:.3}", 1.0 / (2.0 * alpha)));
    }
    out.push('\n');
    out.push_str(&format!("{:>14} |", "chi_exp 1-a"));
    for &alpha in &alphas {
        out.push_str(&format!(" {:.3}", 1.0 - alpha));
    }
    out.push('\n');
    out.push_str("legend:");
    for (ch, desc) in OUTCOME_CLASSES {
        out.push_str(&format!(" {ch} = {desc};"));
    }
    out.push_str(" . = no data\n");
    out
}

/// Numeric matrix for one `n`: one row per alpha, one column per exponent
/// (majority class index, -1 for no data), plus the reference exponents.
pub fn render_matrix(cells: &[PhaseCell], n: u64) -> String {
    let (alphas, specs) = grid_axes(cells, n);
    let mut out = String::from("alpha");
    for (label, _) in &specs {
        out.push_str(&format!(",f={label}"));
    }
    out.push_str(",delta_exponent,chi_exponent\n");
    for &alpha in &alphas {
        out.push_str(&format!("{alpha}"));
        for (label, _) in &specs {
            let cell = cells
                .iter()
                .find(|c| c.n == n && c.alpha == alpha && &c.f == label);
            let class = cell
                .and_then(majority_class)
                .map(|i| i as i64)
                .unwrap_or(-1);
            out.push_str(&format!(",{class}"));
        }
        out.push_str(&format!(",{},{}\n", 1.0 / (2.0 * alpha), 1.0 - alpha));
    }
    out
}

type Axes = (Vec<f64>, Vec<(String, (u8, f64, String))>);

fn grid_axes(cells: &[PhaseCell], n: u64) -> Axes {
    let mut alphas: Vec<f64> = Vec::new();
    let mut specs: BTreeMap<String, (u8, f64, String)> = BTreeMap::new();
    for c in cells.iter().filter(|c| c.n == n) {
        if !alphas.contains(&c.alpha) {
            alphas.push(c.alpha);
        }
        // recover the sort key from the label
        let key = match c.f.parse::<f64>() {
            Ok(v) => (0u8, v, String::new()),
            Err(_) => (1u8, 0.0, c.f.clone()),
        };
        specs.insert(c.f.clone(), key);
    }
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut spec_list: Vec<(String, (u8, f64, String))> = specs.into_iter().collect();
    spec_list.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    (alphas, spec_list)
}

/// Writes `cells.csv`, `cells.json`, and per-`n` heatmap and matrix files.
pub fn write_outputs(cells: &[PhaseCell], dir: &Path) -> Result<(), SweepError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("cells.csv"), render_csv(cells))?;
    let mut json = std::io::BufWriter::new(std::fs::File::create(dir.join("cells.json"))?);
    serde_json::to_writer_pretty(&mut json, cells).map_err(std::io::Error::from)?;
    json.write_all(b"\n")?;
    drop(json);
    let mut ns: Vec<u64> = cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        std::fs::write(dir.join(format!("heatmap_n{n}.txt")), render_heatmap(cells, n))?;
        std::fs::write(dir.join(format!("matrix_n{n}.csv")), render_matrix(cells, n))?;
    }
    Ok(())
}
