//! Closed-form total mass and switching times of the controlled problem.
//!
//! Integrating `u_t = α u_xx` over the unit interval with boundary fluxes
//! `-u_x(0) = u_x(1) = φ` gives `μ'(t) = 2αφ`. Starting from `μ(0) = 0` with
//! `φ = +1`, the mass climbs to the upper threshold at `t_1 = M / (2α)` and
//! afterwards zig-zags between the thresholds with constant period
//! `(M - m) / (2α)` per leg.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Thresholds, diffusivity and horizon of one controlled run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlConfig {
    /// Lower mass threshold `m`; the flux flips back to `+1` at or below it.
    pub lower: f64,
    /// Upper mass threshold `M`; the flux flips to `-1` at or above it.
    pub upper: f64,
    /// Diffusivity `α`.
    pub alpha: f64,
    /// Final time `T`.
    pub horizon: f64,
}

impl ControlConfig {
    pub fn new(lower: f64, upper: f64, alpha: f64, horizon: f64) -> Result<Self, ConfigError> {
        if !(lower.is_finite() && lower > 0.0) {
            return Err(ConfigError::new("m", "must be a positive number"));
        }
        if !(upper.is_finite() && upper > 0.0) {
            return Err(ConfigError::new("M", "must be a positive number"));
        }
        if lower >= upper {
            return Err(ConfigError::new("m", "must be below M"));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ConfigError::new("alpha", "must be a positive number"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(ConfigError::new("horizon", "must be a positive number"));
        }
        Ok(Self {
            lower,
            upper,
            alpha,
            horizon,
        })
    }

    /// Rate of change of the mass while the flux is `+1`.
    pub fn mass_rate(&self) -> f64 {
        2.0 * self.alpha
    }
}

/// Exact time `t_k` of the `k`-th switch, `k >= 1`.
///
/// Odd `k` are upper-threshold hits, even `k` lower-threshold hits.
pub fn exact_switch_time(k: usize, cfg: &ControlConfig) -> f64 {
    assert!(k >= 1, "switch indices start at 1");
    let k = k as f64;
    (k * cfg.upper - (k - 1.0) * cfg.lower) / cfg.mass_rate()
}

/// Duration between consecutive exact switches after the first.
pub fn switch_spacing(cfg: &ControlConfig) -> f64 {
    (cfg.upper - cfg.lower) / cfg.mass_rate()
}

/// Number of exact switches with `t_k <= until`.
pub fn switches_before(until: f64, cfg: &ControlConfig) -> usize {
    let first = exact_switch_time(1, cfg);
    if until < first {
        return 0;
    }
    let mut count = 1 + ((until - first) / switch_spacing(cfg)).floor() as usize;
    // floor() can land one off when `until` sits on a switch time
    while count > 0 && exact_switch_time(count, cfg) > until {
        count -= 1;
    }
    while exact_switch_time(count + 1, cfg) <= until {
        count += 1;
    }
    count
}

/// Exact total mass `μ(t)` under the ideal bang-bang control.
pub fn exact_mass(t: f64, cfg: &ControlConfig) -> f64 {
    assert!(t >= 0.0, "time must be non-negative");
    let rate = cfg.mass_rate();
    let first = exact_switch_time(1, cfg);
    if t <= first {
        return rate * t;
    }
    let k = 1 + ((t - first) / switch_spacing(cfg)).floor() as usize;
    let since = t - exact_switch_time(k, cfg);
    if k % 2 == 1 {
        cfg.upper - rate * since
    } else {
        cfg.lower + rate * since
    }
}
