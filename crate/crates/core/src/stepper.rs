//! Backward-implicit time step for `u_t = α u_xx` on `[0, 1]`.
//!
//! Boundary rows use the one-sided conditions
//! `(U_1 - U_0)/Δx = -φ` and `(U_J - U_{J-1})/Δx = φ` at the new time level.
//! The boundary unknowns are eliminated before the solve and rebuilt from
//! the interior afterwards, so the interior Riemann mass changes by exactly
//! `2 α Δt φ` per step.

use crate::error::ConfigError;
use crate::tridiag::{SolveError, TridiagonalSystem};

/// Uniform spatial mesh with `cells` intervals and a time step `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Number of spatial cells `J`.
    pub cells: usize,
    /// Number of time steps `N` covering the horizon.
    pub steps: usize,
    pub dx: f64,
    pub dt: f64,
}

impl GridSpec {
    /// `J` cells on the unit interval and `N` equal steps up to `horizon`.
    pub fn uniform(cells: usize, steps: usize, horizon: f64) -> Result<Self, ConfigError> {
        if steps < 1 {
            return Err(ConfigError::new("N", "must be at least 1"));
        }
        Self::with_dt(cells, horizon / steps as f64).map(|g| Self { steps, ..g })
    }

    /// `J` cells on the unit interval and a single prescribed step size.
    pub fn with_dt(cells: usize, dt: f64) -> Result<Self, ConfigError> {
        if cells < 2 {
            return Err(ConfigError::new("J", "must be at least 2"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ConfigError::new("dt", "time step must be positive"));
        }
        Ok(Self {
            cells,
            steps: 1,
            dx: 1.0 / cells as f64,
            dt,
        })
    }

    /// Mesh ratio `ν = α Δt / Δx²`.
    pub fn mesh_ratio(&self, alpha: f64) -> f64 {
        alpha * self.dt / (self.dx * self.dx)
    }

    /// Node coordinate `x_j = j Δx`.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }
}

/// Sign of the boundary flux `φ`; its magnitude is always one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluxSign {
    /// `φ = +1`, material enters through both ends.
    Inflow,
    /// `φ = -1`, material leaves through both ends.
    Outflow,
}

impl FluxSign {
    pub fn value(self) -> f64 {
        match self {
            FluxSign::Inflow => 1.0,
            FluxSign::Outflow => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            FluxSign::Inflow => FluxSign::Outflow,
            FluxSign::Outflow => FluxSign::Inflow,
        }
    }

    pub fn as_int(self) -> i8 {
        match self {
            FluxSign::Inflow => 1,
            FluxSign::Outflow => -1,
        }
    }
}

/// Nodal concentrations `U_0..U_J` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub values: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    /// The zero initial condition, boundary nodes included.
    pub fn zeros(cells: usize) -> Self {
        Self {
            values: vec![0.0; cells + 1],
            time: 0.0,
        }
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds the `(J-1)`-row system for the interior unknowns `U_1..U_{J-1}`.
///
/// Substituting `U_0 = U_1 + Δx φ` into row 1 (and `U_J = U_{J-1} + Δx φ`
/// into row `J-1`) turns their diagonal into `1 + ν` and adds `ν Δx φ` to the
/// right-hand side. For `J = 2` both substitutions land on the single row.
pub fn assemble(
    state: &FieldState,
    flux: FluxSign,
    grid: &GridSpec,
    alpha: f64,
) -> TridiagonalSystem {
    let cells = grid.cells;
    assert_eq!(state.values.len(), cells + 1, "field length must be J + 1");
    let nu = grid.mesh_ratio(alpha);
    let n = cells - 1;
    let forcing = nu * grid.dx * flux.value();

    let mut diag = vec![1.0 + 2.0 * nu; n];
    let mut rhs = state.values[1..cells].to_vec();
    diag[0] -= nu;
    rhs[0] += forcing;
    diag[n - 1] -= nu;
    rhs[n - 1] += forcing;

    TridiagonalSystem {
        sub: vec![-nu; n - 1],
        diag,
        sup: vec![-nu; n - 1],
        rhs,
    }
}

/// Advances the field by one implicit step of length `grid.dt` using `flux`
/// at the new time level.
pub fn step(
    state: &FieldState,
    flux: FluxSign,
    grid: &GridSpec,
    alpha: f64,
) -> Result<FieldState, SolveError> {
    let interior = assemble(state, flux, grid, alpha).solve()?;
    let edge = grid.dx * flux.value();
    let mut values = Vec::with_capacity(grid.cells + 1);
    values.push(interior[0] + edge);
    values.extend_from_slice(&interior);
    values.push(interior[interior.len() - 1] + edge);
    Ok(FieldState {
        values,
        time: state.time + grid.dt,
    })
}
