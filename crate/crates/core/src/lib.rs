//! Closed-form dynamics and positivity diagnostics for a single qubit
//! weakly coupled to a thermal bath, together with the entanglement fate
//! of a qubit pair of which only one member feels the bath.
//!
//! The crate is organised as a pipeline:
//!
//! * [`numerics`] — fixed-size complex linear algebra: a Jacobi
//!   eigensolver, matrix exponential and logarithm, Kronecker algebra;
//! * [`bath`] — bath parameters, the damping description in terms of a
//!   Kossakowski matrix, and quadrature of bath correlation functions;
//! * [`dynamics`] — the Bloch-vector generator, its closed-form
//!   propagator, and positivity witnesses for the single-qubit map;
//! * [`entanglement`] — two-qubit X states, their evolution when one
//!   qubit is left untouched, concurrence and mutual information;
//! * [`diagnostics`] — Choi-spectrum scans, trajectory scans and event
//!   extraction (entanglement sudden death, onset of complete
//!   positivity, mutual-information rises);
//! * [`scenario`] — config parsing, CSV output and the command
//!   implementations behind the `redfield` binary.

pub mod bath;
pub mod diagnostics;
pub mod dynamics;
pub mod entanglement;
pub mod numerics;
pub mod scenario;

mod error;

pub use error::Error;

pub use bath::{BathParameters, CorrelationSamples, KossakowskiMatrix};
pub use dynamics::{BlochState, GeneratorMatrix, PropagatorMatrices};
pub use entanglement::{FamilyParams, FanoCoefficients, XState};
pub use diagnostics::{AnalysisTolerances, ChoiReport, TimeSeries, TrajectoryFindings};
