//! Discrete total mass of a field.

use serde::{Deserialize, Serialize};

use crate::stepper::{FieldState, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureKind {
    /// `Δx Σ_{j=1}^{J-1} U_j`; the implicit step changes it by exactly `2αΔtφ`.
    #[serde(rename = "riemann")]
    RiemannInterior,
    /// `(Δx/2) Σ_{j=0}^{J-1} (U_j + U_{j+1})`.
    Trapezoid,
}

impl QuadratureKind {
    pub fn name(self) -> &'static str {
        match self {
            QuadratureKind::RiemannInterior => "riemann",
            QuadratureKind::Trapezoid => "trapezoid",
        }
    }
}

pub fn mass(state: &FieldState, grid: &GridSpec, quad: QuadratureKind) -> f64 {
    let u = &state.values;
    assert_eq!(u.len(), grid.cells + 1, "field length must be J + 1");
    match quad {
        QuadratureKind::RiemannInterior => grid.dx * u[1..grid.cells].iter().sum::<f64>(),
        QuadratureKind::Trapezoid => {
            0.5 * grid.dx * u.windows(2).map(|w| w[0] + w[1]).sum::<f64>()
        }
    }
}
