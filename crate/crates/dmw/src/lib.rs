//! A workbench for two-dimensional modal product logics with a diagonal
//! constant.
//!
//! The crate provides:
//!
//! - [`formula`]: the 3-modal language with horizontal/vertical boxes and the
//!   diagonal constant `diag`, with a text syntax, a JSON tree format, and
//!   structural metrics.
//! - [`frames`]: finite Kripke frames, delta-frames, delta-products, fans,
//!   spy-chains, disjoint unions with a spy-point, and frame property checks.
//! - [`semantics`]: truth, global truth, and per-frame satisfiability /
//!   validity by exhaustive (or propagation-based) valuation search.
//! - [`counter_machine`]: Minsky machines under reliable, lossy, and
//!   insertion-error step semantics, run validation, reconstruction of a
//!   reliable run from a lossy/insertion-error pair, and bounded searches.
//! - [`encodings`]: the formula families that compile a counter machine into
//!   grid-generating and run-emulating conjunctions (forward, finitary,
//!   backward, and linear styles), the tick transform, and the spy-point
//!   reduction of global consequence to validity.
//! - [`model_builders`]: constructs finite product models satisfying the
//!   finitary encoding from a reliable run, and extracts faulty run pairs
//!   back out of satisfying models.
//! - [`decider`]: satisfiability for products with a bounded-branching
//!   vertical component, via filtration-bounded layered search, with an
//!   independent brute-force oracle and the selective filtration operation.
//! - [`cli`]: a command-line front door with stable JSON I/O; see the `dmw`
//!   binary and the runnable examples under `examples/`.
//!
//! Every value is immutable and every operation is a pure function of its
//! inputs; all set-like data uses ordered containers so output is
//! deterministic across runs.

pub mod cli;
pub mod counter_machine;
pub mod decider;
pub mod encodings;
pub mod formula;
pub mod frames;
pub mod model_builders;
pub mod semantics;

pub use formula::{Formula, FormulaMetrics, ParseError};
pub use frames::{DeltaFrame, Frame, World};
pub use semantics::Model;
