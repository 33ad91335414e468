//! Head-on collision of a quantum projectile with a fixed Coulomb centre.
//!
//! A Gaussian wave packet is propagated with the Cayley-form Crank-Nicolson
//! scheme while the matching point particle follows Hamilton's equations.
//! The [`experiment`] module compares Ehrenfest averages with the classical
//! trajectory: forces, lag and distance of closest approach.

pub mod classical;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod io;
pub mod potential;
pub mod propagator;
pub mod tridiag;
pub mod wavepacket;

pub use classical::{analytic_closest_approach, classical_trajectory, hamilton_step, ClassicalSeries, ClassicalState, ForceLaw};
pub use error::{Error, Result};
pub use experiment::{run_comparison, run_with_field, Approach, ComparisonMetrics, ObservableSeries, RunConfig, TargetField};
pub use grid::{quadrature, Grid, UnitSystem};
pub use potential::{coupling_constant, PotentialKind, PotentialTable};
pub use propagator::CnPropagator;
pub use tridiag::{solve_tridiagonal, TridiagonalLu, TridiagonalSystem};
pub use wavepacket::{QuantumObservables, WaveFunction};
