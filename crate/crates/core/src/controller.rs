//! Hysteresis (bang-bang) switching of the boundary flux on total mass.

use serde::{Deserialize, Serialize};

use crate::oracle::ControlConfig;
use crate::stepper::FluxSign;

/// Masses within this distance of a threshold count as reaching it.
///
/// The interior Riemann mass lands on a threshold only up to rounding, so an
/// exact comparison would miss hits such as `0.2 - 3e-17 >= 0.2`.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    ReachedUpper,
    ReachedLower,
}

/// One detected threshold crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    /// 1-based switch index `k`.
    pub index: usize,
    /// Time level `n` of the step whose mass crossed the threshold.
    pub step: usize,
    /// Switch time `T_k`.
    pub time: f64,
    pub mass_at_switch: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    phase: FluxSign,
    events: Vec<SwitchEvent>,
    tie_tolerance: f64,
}

impl Default for ControllerState {
    fn default() -> Self {
        Self::new()
    }
}

impl ControllerState {
    /// Starts in the inflow phase with no events.
    pub fn new() -> Self {
        Self::with_tolerance(DEFAULT_TIE_TOLERANCE)
    }

    pub fn with_tolerance(tie_tolerance: f64) -> Self {
        Self {
            phase: FluxSign::Inflow,
            events: Vec::new(),
            tie_tolerance,
        }
    }

    pub fn phase(&self) -> FluxSign {
        self.phase
    }

    pub fn events(&self) -> &[SwitchEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<SwitchEvent> {
        self.events
    }

    /// Index `k` the next event will carry.
    pub fn next_index(&self) -> usize {
        self.events.len() + 1
    }

    /// Feeds the mass observed after time level `step` and returns the flux
    /// for the next step.
    pub fn observe(&mut self, mass: f64, time: f64, step: usize, cfg: &ControlConfig) -> FluxSign {
        if let Some(last) = self.events.last() {
            debug_assert!(time > last.time, "observations must move forward in time");
        }
        let direction = match self.phase {
            FluxSign::Inflow if mass >= cfg.upper - self.tie_tolerance => Direction::ReachedUpper,
            FluxSign::Outflow if mass <= cfg.lower + self.tie_tolerance => Direction::ReachedLower,
            _ => return self.phase,
        };
        self.events.push(SwitchEvent {
            index: self.next_index(),
            step,
            time,
            mass_at_switch: mass,
            direction,
        });
        self.phase = self.phase.flipped();
        self.phase
    }
}
