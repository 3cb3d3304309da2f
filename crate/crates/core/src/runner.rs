//! Full controlled simulations on fixed and stage-adapted time grids, and
//! their comparison with the exact switching times.

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controller::{ControllerState, SwitchEvent};
use crate::error::{ConfigError, Error, Result};
use crate::oracle::{exact_switch_time, switches_before, ControlConfig};
use crate::quadrature::{mass, QuadratureKind};
use crate::stepper::{step, FieldState, FluxSign, GridSpec};

/// Rounding allowance on time comparisons (switch-time lower bound, horizon).
pub const TIME_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeGrid {
    /// `steps` equal steps of `T / steps`.
    Fixed { steps: usize },
    /// `first_stage_steps` steps of `M / (2α N0)` up to the first switch,
    /// then steps of `(M - m) / (2α Nstage)` so every later leg takes
    /// exactly `stage_steps` steps.
    Adaptive {
        first_stage_steps: usize,
        stage_steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub control: ControlConfig,
    /// Number of spatial cells `J`.
    pub cells: usize,
    pub quadrature: QuadratureKind,
    pub time_grid: TimeGrid,
    /// Record a field snapshot every this many steps; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl RunConfig {
    pub fn new(
        control: ControlConfig,
        cells: usize,
        quadrature: QuadratureKind,
        time_grid: TimeGrid,
        snapshot_stride: usize,
    ) -> Result<Self, ConfigError> {
        if cells < 2 {
            return Err(ConfigError::new("J", "must be at least 2"));
        }
        match time_grid {
            TimeGrid::Fixed { steps } if steps < 1 => {
                return Err(ConfigError::new("N", "must be at least 1"));
            }
            TimeGrid::Adaptive {
                first_stage_steps,
                stage_steps,
            } => {
                if first_stage_steps < 1 {
                    return Err(ConfigError::new("N0", "must be at least 1"));
                }
                if stage_steps < 1 {
                    return Err(ConfigError::new("Nstage", "must be at least 1"));
                }
                if quadrature != QuadratureKind::RiemannInterior {
                    return Err(ConfigError::new(
                        "quadrature",
                        "the adaptive grid hits the thresholds only with the riemann rule",
                    ));
                }
            }
            _ => {}
        }
        Ok(Self {
            control,
            cells,
            quadrature,
            time_grid,
            snapshot_stride,
        })
    }

    /// Reference configuration: J=50, N=200, T=10, α=0.05, m=0.1, M=0.2.
    pub fn reference_example(quadrature: QuadratureKind) -> Self {
        let control = ControlConfig::new(0.1, 0.2, 0.05, 10.0).expect("valid thresholds");
        Self::new(control, 50, quadrature, TimeGrid::Fixed { steps: 200 }, 0)
            .expect("valid reference run")
    }

    /// Step size of the first stage in adaptive mode.
    fn first_stage_dt(&self, first_stage_steps: usize) -> f64 {
        self.control.upper / (self.control.mass_rate() * first_stage_steps as f64)
    }

    fn stage_dt(&self, stage_steps: usize) -> f64 {
        (self.control.upper - self.control.lower) / (self.control.mass_rate() * stage_steps as f64)
    }

    /// Largest time step used by the run; `k` times this bounds `T_k - t_k`.
    pub fn max_dt(&self) -> f64 {
        match self.time_grid {
            TimeGrid::Fixed { steps } => self.control.horizon / steps as f64,
            TimeGrid::Adaptive {
                first_stage_steps,
                stage_steps,
            } => self
                .first_stage_dt(first_stage_steps)
                .max(self.stage_dt(stage_steps)),
        }
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self, ConfigError> {
        Self::new(
            self.control,
            self.cells,
            self.quadrature,
            TimeGrid::Fixed { steps },
            self.snapshot_stride,
        )
    }

    pub fn with_quadrature(&self, quadrature: QuadratureKind) -> Result<Self, ConfigError> {
        Self::new(
            self.control,
            self.cells,
            quadrature,
            self.time_grid,
            self.snapshot_stride,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub mass: f64,
    /// Flux applied during the step that ended at `time`.
    pub flux: FluxSign,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub snapshots: Vec<FieldState>,
    pub events: Vec<SwitchEvent>,
}

impl Trajectory {
    pub fn switch_times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }
}

/// Drives the stepper, quadrature and controller over a sequence of
/// `(dt, time)` pairs.
fn integrate(run: &RunConfig, schedule: impl Iterator<Item = (f64, f64)>) -> Result<Trajectory> {
    let alpha = run.control.alpha;
    let mut state = FieldState::zeros(run.cells);
    let mut controller = ControllerState::new();
    let mut flux = controller.phase();
    let mut traj = Trajectory::default();
    if run.snapshot_stride > 0 {
        traj.snapshots.push(state.clone());
    }

    for (n, (dt, time)) in (1..).zip(schedule) {
        let grid = GridSpec::with_dt(run.cells, dt)?;
        state = step(&state, flux, &grid, alpha)?;
        state.time = time;
        let mu = mass(&state, &grid, run.quadrature);
        traj.samples.push(Sample {
            time,
            mass: mu,
            flux,
        });
        if run.snapshot_stride > 0 && n % run.snapshot_stride == 0 {
            traj.snapshots.push(state.clone());
        }
        let next = controller.observe(mu, time, n, &run.control);
        if next != flux {
            debug!("switch {} at t={time} (n={n}, mass={mu})", controller.events().len());
        }
        flux = next;
    }

    traj.events = controller.into_events();
    info!(
        "{} steps, {} switches, quadrature={}",
        traj.samples.len(),
        traj.events.len(),
        run.quadrature.name()
    );
    Ok(traj)
}

/// `N` equal steps of `T / N` from the zero field.
pub fn run_fixed_grid(run: &RunConfig) -> Result<Trajectory> {
    let TimeGrid::Fixed { steps } = run.time_grid else {
        return Err(ConfigError::new("mode", "expected a fixed time grid").into());
    };
    let dt = run.control.horizon / steps as f64;
    integrate(run, (1..=steps).map(|n| (dt, n as f64 * dt)))
}

/// Stage-adapted grid on which the interior mass lands exactly on the
/// thresholds at the end of every stage.
pub fn run_adaptive_grid(run: &RunConfig) -> Result<Trajectory> {
    let TimeGrid::Adaptive {
        first_stage_steps,
        stage_steps,
    } = run.time_grid
    else {
        return Err(ConfigError::new("mode", "expected an adaptive time grid").into());
    };
    if run.quadrature != QuadratureKind::RiemannInterior {
        return Err(ConfigError::new("quadrature", "adaptive mode requires riemann").into());
    }
    let dt0 = run.first_stage_dt(first_stage_steps);
    let dt = run.stage_dt(stage_steps);
    let first_stage_end = first_stage_steps as f64 * dt0;
    let stop = run.control.horizon * (1.0 - TIME_SLACK);

    let mut done = false;
    let schedule = (1usize..).map_while(move |n| {
        if done {
            return None;
        }
        let entry = if n <= first_stage_steps {
            (dt0, n as f64 * dt0)
        } else {
            (dt, first_stage_end + (n - first_stage_steps) as f64 * dt)
        };
        done = entry.1 >= stop;
        Some(entry)
    });
    integrate(run, schedule)
}

pub fn run(run: &RunConfig) -> Result<Trajectory> {
    match run.time_grid {
        TimeGrid::Fixed { .. } => run_fixed_grid(run),
        TimeGrid::Adaptive { .. } => run_adaptive_grid(run),
    }
}

/// Numeric vs exact switch time for one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchError {
    pub k: usize,
    pub numeric: f64,
    pub exact: f64,
    pub error: f64,
    /// `k Δt`
    pub bound: f64,
    /// `0 <= T_k - t_k < k Δt`
    pub within_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub events: usize,
    pub max_abs_error: f64,
    /// Mean of `T_k - T_{k-1}` over `k >= 2`.
    pub mean_spacing: Option<f64>,
    pub exact_spacing: f64,
    pub all_within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub quadrature: QuadratureKind,
    pub dt: f64,
    pub entries: Vec<SwitchError>,
    pub summary: ErrorSummary,
}

pub fn compare_with_oracle(traj: &Trajectory, run: &RunConfig) -> Result<ErrorReport> {
    let cfg = &run.control;
    let dt = run.max_dt();
    let count = traj.events.len();
    if count > 0 {
        let available = switches_before(cfg.horizon + count as f64 * dt, cfg);
        if count > available {
            return Err(Error::OracleMismatch {
                numeric: count,
                oracle: available,
            });
        }
    }

    let entries: Vec<SwitchError> = traj
        .events
        .iter()
        .map(|e| {
            let exact = exact_switch_time(e.index, cfg);
            let error = e.time - exact;
            let bound = e.index as f64 * dt;
            SwitchError {
                k: e.index,
                numeric: e.time,
                exact,
                error,
                bound,
                within_bound: error >= -TIME_SLACK && error < bound,
            }
        })
        .collect();

    let mean_spacing = (count >= 2)
        .then(|| (traj.events[count - 1].time - traj.events[0].time) / (count - 1) as f64);
    let summary = ErrorSummary {
        events: count,
        max_abs_error: entries.iter().map(|e| e.error.abs()).fold(0.0, f64::max),
        mean_spacing,
        exact_spacing: crate::oracle::switch_spacing(cfg),
        all_within_bound: entries.iter().all(|e| e.within_bound),
    };
    Ok(ErrorReport {
        quadrature: run.quadrature,
        dt,
        entries,
        summary,
    })
}

/// One quadrature's run and its oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub run: RunConfig,
    pub trajectory: Trajectory,
    pub report: ErrorReport,
}

pub fn execute(run_cfg: &RunConfig) -> Result<Outcome> {
    let trajectory = run(run_cfg)?;
    let report = compare_with_oracle(&trajectory, run_cfg)?;
    Ok(Outcome {
        run: *run_cfg,
        trajectory,
        report,
    })
}

/// Runs the same fixed-grid configuration with both quadratures.
pub fn compare_quadratures(run_cfg: &RunConfig) -> Result<(Outcome, Outcome)> {
    if !matches!(run_cfg.time_grid, TimeGrid::Fixed { .. }) {
        return Err(ConfigError::new("mode", "compare needs a fixed time grid").into());
    }
    let trapezoid = execute(&run_cfg.with_quadrature(QuadratureKind::Trapezoid)?)?;
    let riemann = execute(&run_cfg.with_quadrature(QuadratureKind::RiemannInterior)?)?;
    Ok((trapezoid, riemann))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub steps: usize,
    pub dt: f64,
    pub events: usize,
    pub max_abs_error: f64,
    /// `max_k |T_k - t_k| / (k Δt)`; below 1 when the error bound holds.
    pub max_bound_ratio: f64,
    pub all_within_bound: bool,
}

/// Repeats a fixed-grid run for each step count, in parallel.
pub fn sweep(run_cfg: &RunConfig, step_counts: &[usize]) -> Result<Vec<SweepRow>> {
    if !matches!(run_cfg.time_grid, TimeGrid::Fixed { .. }) {
        return Err(ConfigError::new("mode", "sweep needs a fixed time grid").into());
    }
    step_counts
        .par_iter()
        .map(|&steps| {
            let cfg = run_cfg.with_steps(steps)?;
            let outcome = execute(&cfg)?;
            let report = &outcome.report;
            Ok(SweepRow {
                steps,
                dt: report.dt,
                events: report.summary.events,
                max_abs_error: report.summary.max_abs_error,
                max_bound_ratio: report
                    .entries
                    .iter()
                    .map(|e| e.error.abs() / e.bound)
                    .fold(0.0, f64::max),
                all_within_bound: report.summary.all_within_bound,
            })
        })
        .collect()
}
