//! Threshold hyperbolic random graphs and randomized distributed colouring.
//!
//! The crate is organised around five building blocks:
//!
//! - [`geometry`]: primitives on the hyperbolic disk (distance, adjacency
//!   angle, ball measure, inverse-CDF radial sampling),
//! - [`hrg`]: sampling of threshold hyperbolic random graphs, layering and
//!   structural queries (degrees, leaves, core, larger-degree neighbourhood),
//! - [`sim`]: a deterministic synchronous round engine for the three
//!   randomized colour trials (symmetric, ID priority, degree priority),
//! - [`detlocal`]: the deterministic LOCAL algorithm (inner/outer split,
//!   one-round polynomial colouring of the outer set, gather-and-colour of
//!   the inner set),
//! - [`structure`] and [`sweep`]: empirical validators for the structural
//!   properties the algorithms rely on, and the experiment harness that maps
//!   out the colour-space phase diagram.
//!
//! All randomness is derived from explicit 64-bit seeds via counter-based
//! streams ([`rng`]), so every artifact in the crate is a pure function of
//! its inputs: the same seed produces bit-identical graphs, runs and sweep
//! tables regardless of thread count.

pub mod detlocal;
pub mod geometry;
pub mod hrg;
pub mod rng;
pub mod sim;
pub mod structure;
pub mod sweep;

pub use geometry::{DiskSpec, GeometryError, PolarPoint};
pub use hrg::{HrgError, HrgGraph, HrgParams, Layering, VertexId};
pub use sim::{
    Certificate, ColouringCheck, IdAssignment, IdStrategy, PaletteSpec, PriorityRule, RunOutcome,
    RunResult, SimState, Trace,
};
pub use structure::{ChromaticEstimate, CheckRecord, LemmaId, LemmaReport, Subject};
pub use sweep::{DerivedThresholds, PhaseCell, SweepConfig};
