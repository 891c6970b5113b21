//! Quantum state-vector simulation organized around scalable vector units.
//!
//! The crate simulates `n`-qubit circuits on `2^n` complex amplitudes and, at
//! the same time, models how the work maps onto a vector unit whose register
//! width is unknown at compile time. Amplitudes can be stored in a blocked
//! layout matched to the lane count, gate kernels run over whole lane blocks
//! under predicate masks, and every kernel feeds a set of portable counters
//! (average vector length, instruction reduction, arithmetic intensity) that
//! describe the vectorization quality independently of the host CPU.
//!
//! Two engines share the numerics:
//!
//! * [`reference`]: a plain scalar engine on the interleaved layout, one
//!   amplitude pair at a time. Slow, obvious, and the correctness oracle.
//! * [`vla`]: the lane-blocked engine with predicated whole-block kernels,
//!   gather-free load buffering, and per-op lane accounting.
//!
//! Both follow a single multiply-accumulate convention, so running the same
//! gate plan on both produces bitwise-identical states, not just close ones.
//!
//! The `examples/` directory is the guided tour: each example is a runnable
//! walkthrough of one capability. The `vlaq` binary wraps the same machinery
//! as a benchmark harness.

pub mod buffer;
pub mod circuit;
pub mod error;
pub mod fusion;
pub mod gate;
pub mod generators;
pub mod harness;
pub mod mask;
pub mod metrics;
pub mod reference;
pub mod rng;
pub mod state;
pub mod vla;

pub use circuit::Circuit;
pub use error::{Error, Result};
pub use gate::{Gate, GateMatrix};
pub use metrics::VectorCounters;
pub use state::{LaneConfig, Layout, Precision, Scalar, StateVector};
