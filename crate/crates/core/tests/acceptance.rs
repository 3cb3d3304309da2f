//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p massgate --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use massgate::io::emit_comparison;
use massgate::runner::{compare_quadratures, execute, run_adaptive_grid};
use massgate::{
    compare_with_oracle, exact_switch_time, mass, run_fixed_grid, step, switch_spacing,
    ControlConfig, FieldState, FluxSign, GridSpec, QuadratureKind, RunConfig, TimeGrid,
    Trajectory, TridiagonalSystem,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_flux(rng: &mut StdRng) -> FluxSign {
    if rng.gen_bool(0.5) {
        FluxSign::Inflow
    } else {
        FluxSign::Outflow
    }
}

/// Dense Gaussian elimination with partial pivoting.
fn dense_solve(system: &TridiagonalSystem) -> Vec<f64> {
    let n = system.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        a[i][i] = system.diag[i];
        if i > 0 {
            a[i][i - 1] = system.sub[i - 1];
        }
        if i + 1 < n {
            a[i][i + 1] = system.sup[i];
        }
        a[i][n] = system.rhs[i];
    }
    for col in 0..n {
        let p = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..=n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    x
}

fn reference_switch_table() -> Outcome {
    const TABLE: [f64; 9] = [1.95, 2.90, 3.85, 4.80, 5.75, 6.70, 7.65, 8.60, 9.55];
    let run = RunConfig::reference_example(QuadratureKind::Trapezoid);
    let start = Instant::now();
    let traj = run_fixed_grid(&run).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let times = traj.switch_times();
    check(times.len() == TABLE.len(), || {
        format!("expected 9 switches, got {times:?}")
    })?;
    for (k, (t, want)) in times.iter().zip(TABLE).enumerate() {
        check(format!("{t:.4}") == format!("{want:.4}"), || {
            format!("T_{} = {t} but the reference lists {want}", k + 1)
        })?;
    }
    for w in traj.events.windows(2) {
        check(w[1].step - w[0].step == 19, || {
            format!("steps {} -> {} are not 19 apart", w[0].step, w[1].step)
        })?;
        check(((w[1].time - w[0].time) - 0.95).abs() < 1e-12, || {
            format!("T_{} - T_{} = {}", w[1].index, w[0].index, w[1].time - w[0].time)
        })?;
    }
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("T_1..T_9 = {times:.4?}, spacing 19 steps, {elapsed:?}"))
}

fn oracle_formulas() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..100 {
        let m = rng.gen_range(0.01..1.0);
        let big_m = m + rng.gen_range(0.01..1.0);
        let cfg = ControlConfig::new(m, big_m, 1.0, 100.0).unwrap();
        let expected = [big_m / 2.0, big_m - m / 2.0, 1.5 * big_m - m];
        for (k, want) in expected.iter().enumerate() {
            let got = exact_switch_time(k + 1, &cfg);
            check((got - want).abs() < 1e-12, || {
                format!("t_{} = {got}, expected {want} (m={m}, M={big_m})", k + 1)
            })?;
        }
        for n in 2..=50 {
            let gap = exact_switch_time(n, &cfg) - exact_switch_time(n - 1, &cfg);
            check((gap - (big_m - m) / 2.0).abs() < 1e-12, || {
                format!("t_{n} - t_{} = {gap} (m={m}, M={big_m})", n - 1)
            })?;
        }
    }
    Ok("100 random (m, M) at alpha = 1".into())
}

fn discrete_mass_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    // mesh ratios up to 1e4; far beyond that, rounding in the solve alone
    // exceeds 1e-11 on increments of order 10
    for _ in 0..100 {
        let cells = rng.gen_range(2..=100);
        let dt = 10f64.powf(rng.gen_range(-4.0..-1.0));
        let alpha = 10f64.powf(rng.gen_range(-2.0..1.0));
        let flux = random_flux(&mut rng);
        let grid = GridSpec::with_dt(cells, dt).unwrap();
        let state = FieldState {
            values: (0..=cells).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            time: 0.0,
        };
        let next = step(&state, flux, &grid, alpha).map_err(|e| e.to_string())?;
        let gained = mass(&next, &grid, QuadratureKind::RiemannInterior)
            - mass(&state, &grid, QuadratureKind::RiemannInterior);
        let dev = (gained - 2.0 * alpha * dt * flux.value()).abs();
        worst = worst.max(dev);
        check(dev < 1e-11, || {
            format!("J={cells} dt={dt} alpha={alpha}: deviation {dev:e}")
        })?;
    }
    Ok(format!("100 random steps, worst deviation {worst:.1e}"))
}

fn adaptive_exactness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for alpha in [1.0, 0.05] {
        for _ in 0..25 {
            let m = rng.gen_range(0.01..1.0);
            let big_m = m + rng.gen_range(0.01..1.0);
            let probe = ControlConfig::new(m, big_m, alpha, 1.0).unwrap();
            let horizon = exact_switch_time(10, &probe);
            let cfg = ControlConfig::new(m, big_m, alpha, horizon).unwrap();
            let grid = TimeGrid::Adaptive {
                first_stage_steps: rng.gen_range(1..=40),
                stage_steps: rng.gen_range(1..=40),
            };
            let cells = rng.gen_range(4..=60);
            let run =
                RunConfig::new(cfg, cells, QuadratureKind::RiemannInterior, grid, 0).unwrap();
            let traj = run_adaptive_grid(&run).map_err(|e| e.to_string())?;
            check(traj.events.len() == 10, || {
                format!("{grid:?} m={m} M={big_m} alpha={alpha}: {} events", traj.events.len())
            })?;
            for e in &traj.events {
                let dev = (e.time - exact_switch_time(e.index, &cfg)).abs();
                worst = worst.max(dev);
                check(dev < 1e-10, || {
                    format!("{grid:?} alpha={alpha}: T_{} off by {dev:e}", e.index)
                })?;
            }
        }
    }
    Ok(format!("50 random adaptive runs, k = 1..10, worst {worst:.1e}"))
}

fn switch_error_bound() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let trials = 50;
    let mut failures = Vec::new();
    for _ in 0..trials {
        let m = rng.gen_range(0.05..0.5);
        let big_m = m + rng.gen_range(0.05..0.5);
        let alpha = rng.gen_range(0.01..1.0);
        let probe = ControlConfig::new(m, big_m, alpha, 1.0).unwrap();
        let horizon = exact_switch_time(1, &probe) + 8.0 * switch_spacing(&probe);
        let cfg = ControlConfig::new(m, big_m, alpha, horizon).unwrap();
        let steps = rng.gen_range(100..=1000);
        let run = RunConfig::new(
            cfg,
            rng.gen_range(5..=60),
            QuadratureKind::RiemannInterior,
            TimeGrid::Fixed { steps },
            0,
        )
        .unwrap();
        let traj = run_fixed_grid(&run).map_err(|e| e.to_string())?;
        let report = compare_with_oracle(&traj, &run).map_err(|e| e.to_string())?;
        if let Some(bad) = report.entries.iter().find(|e| !e.within_bound) {
            failures.push(format!(
                "m={m:.4} M={big_m:.4} alpha={alpha:.4} N={steps}: T_{}-t_{} = {:.3} dt",
                bad.k,
                bad.k,
                bad.error / report.dt
            ));
        }
    }

    let base = RunConfig::reference_example(QuadratureKind::RiemannInterior);
    let mut errors = Vec::new();
    for steps in [200, 400, 800] {
        let run = base.with_steps(steps).unwrap();
        let traj = run_fixed_grid(&run).map_err(|e| e.to_string())?;
        let report = compare_with_oracle(&traj, &run).map_err(|e| e.to_string())?;
        check(report.summary.all_within_bound, || {
            format!("reference config, N={steps}: bound violated")
        })?;
        errors.push(report.summary.max_abs_error);
    }
    check(errors.windows(2).all(|w| w[1] <= w[0] + 1e-12), || {
        format!("max errors for N=200,400,800 not non-increasing: {errors:?}")
    })?;

    check(failures.is_empty(), || {
        format!(
            "{}/{trials} random configs violate 0 <= T_k - t_k < k dt, e.g. {}",
            failures.len(),
            failures[0]
        )
    })?;
    Ok(format!("{trials} random configs; reference max errors {errors:?}"))
}

fn trapezoid_discrepancy() -> Outcome {
    let run = RunConfig::reference_example(QuadratureKind::Trapezoid);
    let (trap, riem) = compare_quadratures(&run).map_err(|e| e.to_string())?;
    let first = trap.report.entries[0];
    check((first.error + 0.05).abs() < 1e-12 && !first.within_bound, || {
        format!("trapezoid T_1 - t_1 = {}, within_bound={}", first.error, first.within_bound)
    })?;
    check(riem.report.summary.all_within_bound, || {
        "riemann side of the comparison violates the bound".into()
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    emit_comparison(&trap, &riem, dir.path()).map_err(|e| e.to_string())?;
    let switches = std::fs::read_to_string(dir.path().join("trapezoid/switches.csv"))
        .map_err(|e| e.to_string())?;
    let row = switches.lines().nth(1).unwrap_or_default();
    check(row == "1,1.9500000000,2.0000000000,-0.0500000000,0.05,false", || {
        format!("first switches.csv row is {row:?}")
    })?;
    let compare =
        std::fs::read_to_string(dir.path().join("compare.csv")).map_err(|e| e.to_string())?;
    let row = compare.lines().nth(1).unwrap_or_default();
    check(row.split(',').nth(4) == Some("false"), || {
        format!("compare.csv first row is {row:?}")
    })?;
    Ok("trapezoid T_1 - t_1 = -0.05 reported with within_bound=false".into())
}

fn property_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);

    for _ in 0..1000 {
        let n = rng.gen_range(2..=20);
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag = (0..n)
            .map(|i| {
                let off = if i > 0 { sub[i - 1].abs() } else { 0.0 }
                    + if i + 1 < n { sup[i].abs() } else { 0.0 };
                let d = off + rng.gen_range(0.1..2.0);
                if rng.gen_bool(0.5) {
                    d
                } else {
                    -d
                }
            })
            .collect();
        let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let sys = TridiagonalSystem::new(sub, diag, sup, rhs).unwrap();
        let x = sys.solve().map_err(|e| e.to_string())?;
        let dev = x
            .iter()
            .zip(dense_solve(&sys))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        check(dev < 1e-10, || format!("tridiagonal vs dense: {dev:e} at n={n}"))?;
    }

    for _ in 0..200 {
        let cells = rng.gen_range(2..=80);
        let half: Vec<f64> = (0..=cells / 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let state = FieldState {
            values: (0..=cells).map(|j| half[j.min(cells - j)]).collect(),
            time: 0.0,
        };
        let grid = GridSpec::with_dt(cells, rng.gen_range(1e-3..1.0)).unwrap();
        let next = step(&state, random_flux(&mut rng), &grid, rng.gen_range(0.01..5.0))
            .map_err(|e| e.to_string())?;
        for j in 0..=cells {
            let dev = (next.values[j] - next.values[cells - j]).abs();
            check(dev < 1e-12, || format!("mirror symmetry broken by {dev:e}"))?;
        }
    }

    for _ in 0..200 {
        let cells = rng.gen_range(2..=200);
        let state = FieldState {
            values: (0..=cells).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            time: 0.0,
        };
        let grid = GridSpec::with_dt(cells, 1.0).unwrap();
        let diff = mass(&state, &grid, QuadratureKind::Trapezoid)
            - mass(&state, &grid, QuadratureKind::RiemannInterior);
        let edges = 0.5 * grid.dx * (state.values[0] + state.values[cells]);
        check((diff - edges).abs() < 1e-14, || {
            format!("quadrature identity off by {:e}", (diff - edges).abs())
        })?;
    }

    let bits = |t: &Trajectory| -> Vec<u64> {
        t.samples
            .iter()
            .flat_map(|s| [s.time.to_bits(), s.mass.to_bits()])
            .chain(t.events.iter().map(|e| e.time.to_bits()))
            .collect()
    };
    for quad in [QuadratureKind::Trapezoid, QuadratureKind::RiemannInterior] {
        let mut run = RunConfig::reference_example(quad);
        run.snapshot_stride = 7;
        let a = run_fixed_grid(&run).map_err(|e| e.to_string())?;
        let b = run_fixed_grid(&run).map_err(|e| e.to_string())?;
        check(a == b && bits(&a) == bits(&b), || {
            format!("{} reruns differ", quad.name())
        })?;
    }
    Ok("1000 solver systems, 200 symmetric steps, 200 quadrature fields, bit-identical reruns".into())
}

/// Groups consecutive samples by the flux that produced them.
fn phases(traj: &Trajectory) -> Vec<(FluxSign, Vec<usize>)> {
    let mut out: Vec<(FluxSign, Vec<usize>)> = Vec::new();
    for (i, s) in traj.samples.iter().enumerate() {
        match out.last_mut() {
            Some((flux, idx)) if *flux == s.flux => idx.push(i),
            _ => out.push((s.flux, vec![i])),
        }
    }
    out
}

fn profile_properties() -> Outcome {
    let mut summary = Vec::new();
    for quad in [QuadratureKind::Trapezoid, QuadratureKind::RiemannInterior] {
        let mut run = RunConfig::reference_example(quad);
        run.snapshot_stride = 1;
        let outcome = execute(&run).map_err(|e| e.to_string())?;
        let traj = &outcome.trajectory;
        // snapshot i + 1 is the field after sample i
        let field = |i: usize| &traj.snapshots[i + 1];

        for (flux, idx) in phases(traj) {
            // the first three steps of a phase may still carry the previous trend
            for w in idx.get(2..).unwrap_or(&[]).windows(2) {
                let (prev, next) = (field(w[0]).max(), field(w[1]).max());
                let ok = match flux {
                    FluxSign::Inflow => next > prev,
                    FluxSign::Outflow => next < prev,
                };
                check(ok, || {
                    format!(
                        "{}: field max not monotone in {flux:?} phase at t={}",
                        quad.name(),
                        traj.samples[w[1]].time
                    )
                })?;
            }
        }

        let mid = run.cells / 2;
        let series: Vec<(f64, f64)> = traj
            .snapshots
            .iter()
            .map(|s| (s.time, s.values[mid]))
            .collect();
        let peaks: Vec<f64> = series
            .windows(3)
            .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1)
            .map(|w| w[1].0)
            .collect();
        check(peaks.len() >= 3, || {
            format!("{}: only {} peaks at x=0.5", quad.name(), peaks.len())
        })?;
        // the riemann run switches on the exact spacing; the trapezoid run
        // switches on its own (shorter) spacing
        let spacing = match quad {
            QuadratureKind::RiemannInterior => switch_spacing(&run.control),
            QuadratureKind::Trapezoid => outcome.report.summary.mean_spacing.unwrap(),
        };
        let dt = run.max_dt();
        for w in peaks.windows(2) {
            let period = w[1] - w[0];
            check((period - 2.0 * spacing).abs() <= 2.0 * dt + 1e-9, || {
                format!(
                    "{}: peaks at {} and {} are not 2*{spacing} +/- {} apart",
                    quad.name(),
                    w[0],
                    w[1],
                    2.0 * dt
                )
            })?;
        }
        summary.push(format!("{} peaks {:.2?}", quad.name(), peaks));
    }
    Ok(summary.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("AC1 reference switch table", reference_switch_table),
        ("AC2 oracle formulas", oracle_formulas),
        ("AC3 discrete mass identity", discrete_mass_identity),
        ("AC4 adaptive-grid exactness", adaptive_exactness),
        ("AC5 error bound 0 <= T_k - t_k < k dt", switch_error_bound),
        ("AC6 trapezoid discrepancy reported", trapezoid_discrepancy),
        ("AC7 property suite", property_suite),
        ("AC8 profile monotonicity and periodicity", profile_properties),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
