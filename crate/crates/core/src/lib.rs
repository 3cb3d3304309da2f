//! Diffusion on the unit interval with bang-bang Neumann flux control.
//!
//! The boundary flux `φ = ±1` is flipped whenever the total mass of the
//! field reaches an upper threshold `M` (going up) or a lower threshold `m`
//! (going down). The crate steps the diffusion equation with a
//! backward-implicit scheme, detects the switching times numerically and
//! compares them with the closed-form switching times.

pub mod controller;
pub mod error;
pub mod io;
pub mod oracle;
pub mod quadrature;
pub mod runner;
pub mod stepper;
pub mod tridiag;

pub use controller::{ControllerState, Direction, SwitchEvent};
pub use error::{ConfigError, Error, Result};
pub use oracle::{exact_mass, exact_switch_time, switch_spacing, ControlConfig};
pub use quadrature::{mass, QuadratureKind};
pub use runner::{
    compare_quadratures, compare_with_oracle, run_adaptive_grid, run_fixed_grid, sweep,
    ErrorReport, Outcome, RunConfig, TimeGrid, Trajectory,
};
pub use stepper::{assemble, step, FieldState, FluxSign, GridSpec};
pub use tridiag::{SolveError, TridiagonalSystem};
