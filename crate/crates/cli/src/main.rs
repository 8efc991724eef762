//! Command-line harness around the `hypercolor` library: instance
//! generation, structural checks, single colouring runs, the deterministic
//! algorithm, and phase-diagram sweeps.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hypercolor::hrg::{self, HrgParams};
use hypercolor::sim::{self, IdStrategy, PaletteSpec, PriorityRule};
use hypercolor::structure::{self, LemmaReport};
use hypercolor::sweep::{self, SweepConfig};
use hypercolor::{detlocal, RunOutcome};

#[derive(Parser)]
#[command(name = "hypercolor", version, about = "hyperbolic random graph colouring experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write it as a versioned text instance.
    Gen {
        /// Expected vertex count (Poisson mean).
        #[arg(long)]
        n: u64,
        /// Radial density parameter in (1/2, 1).
        #[arg(long)]
        alpha: f64,
        /// Radius offset: the disk radius is 2 ln(n) + C.
        #[arg(long = "C", default_value_t = 0.0)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = hrg::DEFAULT_EDGE_BUDGET)]
        edge_budget: u64,
    },
    /// Validate structural properties of an instance and emit a JSON report.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// `all` or one of: layer_counts, layer_degrees, max_level,
        /// max_degree, leaves, larger_degree_radius, larger_degree_nbhd,
        /// core_clique.
        #[arg(long, default_value = "all")]
        lemma: String,
        /// Where to write the JSON report.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Re-verify the edge list against the coordinates first.
        #[arg(long)]
        validate: bool,
    },
    /// Run one randomized colour trial on an instance.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        algo: Algo,
        /// Colour-space size.
        #[arg(long)]
        colours: u32,
        #[arg(long, default_value = "index")]
        ids: Ids,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        max_rounds: u32,
        /// Target layer level for the adversarial id assignment; defaults
        /// to the leaf-rich level derived from the instance parameters.
        #[arg(long)]
        target_level: Option<u32>,
        /// Where to write the per-round trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        validate: bool,
    },
    /// Run the deterministic inner/outer colouring.
    Det {
        #[arg(long = "in")]
        input: PathBuf,
        /// Split parameter; defaults to (1 - alpha) / 2.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a parameter sweep described by a TOML config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Rct,
    Rctid,
    Rctdeg,
}

impl From<Algo> for PriorityRule {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Rct => PriorityRule::Symmetric,
            Algo::Rctid => PriorityRule::SmallerIdWins,
            Algo::Rctdeg => PriorityRule::LargerDegreeWins,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Ids {
    Index,
    Random,
    Adversarial,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen {
            n,
            alpha,
            c,
            seed,
            out,
            edge_budget,
        } => {
            let params = HrgParams::new(n, alpha, c, seed)?;
            let g = hrg::generate_with_budget(&params, edge_budget)?;
            g.write_to_path(&out)?;
            println!(
                "wrote {} ({} vertices, {} edges, R = {:.4})",
                out.display(),
                g.num_vertices(),
                g.num_edges(),
                params.radius()
            );
        }
        Command::Check {
            input,
            lemma,
            json,
            validate,
        } => {
            let g = hrg::read_instance(&input)?;
            if validate {
                g.validate_adjacency()?;
                println!("adjacency invariant holds");
            }
            let reports = select_reports(&g, &lemma)?;
            for report in &reports {
                println!(
                    "{:<20} pass_ratio {:.3} ({} records){}",
                    format!("{:?}", report.lemma),
                    report.pass_ratio,
                    report.records.len(),
                    report
                        .note
                        .as_deref()
                        .map(|n| format!(" note: {n}"))
                        .unwrap_or_default()
                );
            }
            if let Some(path) = json {
                let file = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                serde_json::to_writer_pretty(file, &reports)?;
                println!("report written to {}", path.display());
            }
            if reports.iter().any(|r| !r.passed()) {
                bail!("at least one check failed");
            }
        }
        Command::Run {
            input,
            algo,
            colours,
            ids,
            seed,
            max_rounds,
            target_level,
            trace,
            validate,
        } => {
            let g = hrg::read_instance(&input)?;
            if validate {
                g.validate_adjacency()?;
            }
            let strategy = match ids {
                Ids::Index => IdStrategy::ByIndex,
                Ids::Random => IdStrategy::RandomPermutation { seed },
                Ids::Adversarial => {
                    let base = target_level.unwrap_or_else(|| {
                        sweep::adversarial_base_level(g.params().n, g.params().alpha)
                    });
                    let level = sweep::find_adversarial_level(&g, base)
                        .with_context(|| format!("no leaf-rich vertex near level {base}"))?;
                    IdStrategy::AdversarialLeafPriority { level }
                }
            };
            let assignment = sim::assign_ids(&g, strategy)?;
            let palette = PaletteSpec::new(colours)?;
            let result = sim::run(&g, palette, algo.into(), &assignment, seed, max_rounds)?;
            match &result.outcome {
                RunOutcome::Completed { rounds } => {
                    let check = sim::validate_colouring(&g, result.final_state.assigned());
                    println!(
                        "completed in {rounds} rounds (proper: {}, total: {})",
                        check.proper, check.total
                    );
                }
                RunOutcome::NeverTerminates {
                    rounds_executed,
                    certificate,
                } => println!(
                    "never terminates; certificate after {rounds_executed} rounds: {certificate:?}"
                ),
                RunOutcome::RoundLimit { rounds, uncoloured } => {
                    println!("round limit {rounds} reached with {uncoloured} uncoloured")
                }
            }
            if let Some(path) = trace {
                #[derive(Serialize)]
                struct TraceFile<'a> {
                    outcome: &'a RunOutcome,
                    rounds: &'a [sim::RoundStats],
                }
                let file = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                serde_json::to_writer_pretty(
                    file,
                    &TraceFile {
                        outcome: &result.outcome,
                        rounds: &result.trace.rounds,
                    },
                )?;
                println!("trace written to {}", path.display());
            }
        }
        Command::Det {
            input,
            epsilon,
            out,
        } => {
            let g = hrg::read_instance(&input)?;
            let eps = epsilon.unwrap_or_else(|| detlocal::default_epsilon(g.params().alpha));
            let outcome = detlocal::run_deterministic(&g, eps)?;
            #[derive(Serialize)]
            struct ColouringFile {
                colours: Vec<u32>,
                psi_inner: (u32, u32),
                psi_outer: (u32, u32),
                stats: detlocal::DetStats,
            }
            let file = std::fs::File::create(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            serde_json::to_writer_pretty(
                file,
                &ColouringFile {
                    colours: outcome.colouring.clone(),
                    psi_inner: outcome.stats.psi_inner,
                    psi_outer: outcome.stats.psi_outer,
                    stats: outcome.stats.clone(),
                },
            )?;
            println!(
                "coloured in {} rounds with {} + {} colours (inner diameter {}); written to {}",
                outcome.stats.rounds,
                outcome.stats.colours_used_inner,
                outcome.stats.colours_used_outer,
                outcome.stats.inner_diameter,
                out.display()
            );
        }
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let config: SweepConfig = toml::from_str(&text).context("parsing sweep config")?;
            let cells = sweep::run_sweep(&config)?;
            sweep::write_outputs(&cells, &out)?;
            println!("{} cells written to {}", cells.len(), out.display());
        }
    }
    Ok(())
}

fn select_reports(g: &hypercolor::HrgGraph, lemma: &str) -> Result<Vec<LemmaReport>> {
    if lemma == "all" {
        return Ok(structure::check_all(g));
    }
    let layering = hrg::build_layering(g);
    let report = match lemma {
        "layer_counts" => structure::check_layer_counts(g, &layering),
        "layer_degrees" => structure::check_layer_degrees(g, &layering),
        "max_level" => structure::check_max_level(g, &layering),
        "max_degree" => structure::check_max_degree(g),
        "leaves" => {
            let cfg = structure::LeavesConfig::default();
            match structure::leaves_level_range(g, &cfg) {
                Some((lo, hi)) if lo <= hi => {
                    structure::check_leaves_lemma(g, &layering, lo.max(0) as u32, &cfg)?
                }
                _ => bail!("instance too small for the leaf-abundance check"),
            }
        }
        "larger_degree_radius" => structure::check_larger_degree_radius(g),
        "larger_degree_nbhd" => structure::check_larger_degree_nbhd(g, &layering),
        "core_clique" => structure::check_core_clique(g),
        other => bail!("unknown lemma `{other}`"),
    };
    Ok(vec![report])
}
