//! Exact uniform superpositions over any number of basis states, without
//! ancilla wires.
//!
//! * [`prep`] synthesizes the preparation circuit and predicts its
//!   two-wire gate cost.
//! * [`sim`] is a dense statevector simulator used to verify circuits and
//!   draw seeded samples.
//! * [`grover`] runs Grover graph-coloring searches with either a Hadamard
//!   or a restricted initializer.
//! * [`qasm`] and [`io`] handle OpenQASM 2.0 export and problem files.

pub mod circuit;
pub mod grover;
pub mod io;
pub mod prep;
pub mod qasm;
pub mod sim;

pub use circuit::{Circuit, CircuitError, Control, Gate, Polarity, WireIndex};
pub use grover::{ColoringProblem, GrowthPolicy, Mode, SearchStats, WireLayout};
pub use prep::{generate, predicted_two_wire_count, summation_two_wire_count, PrepError};
pub use sim::{simulate, Histogram, StateVector};

/// Crate version, echoed in CLI output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
