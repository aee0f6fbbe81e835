//! Acceptance suite: criteria 1–9, one PASS/FAIL line each.

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::Result;
use sha2::{Digest, Sha256};
use vacuumlab::affine::{
    extract_asymptotics, integrate_affine, shoot_prescribed_asymptotics, AffineState,
    ExtractionOptions, Integrator, RateModel, ShootingOptions,
};
use vacuumlab::euler1d::{
    residual_space_study, residual_time_study, ManufacturedSolution, PerturbationField1D,
    Solver1d,
};
use vacuumlab::weights::{Family, Grid1d};
use vacuumlab::{Mat3, Verdict};

use crate::config::{Kind, ScenarioConfig};
use crate::output::{diff_trees, list_tree, RunManifest, Staging, Table};
use crate::scenarios::run_at;

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {:<4} {}: {} [{:.1} s of {} s]",
            self.id,
            self.verdict,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

#[derive(Debug)]
pub struct AcceptanceReport {
    pub outcomes: Vec<CriterionOutcome>,
    pub manifest: RunManifest,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.verdict == Verdict::Pass)
    }
}

type Check = fn(&Path) -> Result<(bool, String)>;

struct Criterion {
    id: u8,
    title: &'static str,
    dir: &'static str,
    budget_s: u64,
    check: Check,
}

const CRITERIA: [Criterion; 8] = [
    Criterion {
        id: 1,
        title: "affine det growth",
        dir: "c1-affine-growth",
        budget_s: 10,
        check: affine_growth,
    },
    Criterion {
        id: 2,
        title: "velocity-limit rate",
        dir: "c2-velocity-rate",
        budget_s: 30,
        check: velocity_rate,
    },
    Criterion {
        id: 3,
        title: "shooting round trip",
        dir: "c3-shooting",
        budget_s: 30,
        check: shooting,
    },
    Criterion {
        id: 4,
        title: "1-d steady state",
        dir: "c4-steady-state",
        budget_s: 5,
        check: steady_state,
    },
    Criterion {
        id: 5,
        title: "1-d small-data boundedness",
        dir: "c5-small-data",
        budget_s: 120,
        check: small_data,
    },
    Criterion {
        id: 6,
        title: "manufactured-solution convergence",
        dir: "c6-manufactured",
        budget_s: 60,
        check: manufactured,
    },
    Criterion {
        id: 7,
        title: "geometric identity suite",
        dir: "c7-geom3d",
        budget_s: 120,
        check: geom3d_suite,
    },
    Criterion {
        id: 8,
        title: "functional-inequality suite",
        dir: "c8-weights",
        budget_s: 60,
        check: weights_suite,
    },
];

const TOTAL_BUDGET_S: u64 = 600;

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn affine_growth(dir: &Path) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for gamma in [1.2, 1.5] {
        let mut cfg = ScenarioConfig::new(Kind::Affine);
        let p = cfg.affine.as_mut().expect("normalized");
        p.gamma = gamma;
        p.t_end = 1000.0;
        p.dt = 0.5;
        p.fit_t_start = 10.0;
        let m = run_at(&cfg, &dir.join(format!("gamma-{gamma}")))?;
        let slope = m.metrics["det_exponent"];
        ok &= (slope - 3.0).abs() <= 0.05;
        parts.push(format!("slope {slope:.4} at gamma {gamma}"));
    }
    Ok((ok, format!("{} (need 3 ± 0.05)", parts.join(", "))))
}

fn velocity_rate(dir: &Path) -> Result<(bool, String)> {
    let forward = |gamma: f64| -> Result<_> {
        let s = AffineState::new(Mat3::identity(), Mat3::identity(), gamma)?;
        let traj = integrate_affine(&s, 1.0e4, 2.0, Integrator::default())?;
        Ok(extract_asymptotics(&traj, &ExtractionOptions::default())?)
    };
    let p = forward(1.5)?;
    write_json(&dir.join("profile-gamma-1.5.json"), &p)?;
    let rate = p.residual_rates.first().map_or(f64::NAN, |r| r.fitted);
    let want = -3.0 * 1.5 + 3.0;
    let rate_ok = (rate - want).abs() <= 0.15;
    let q = forward(4.0 / 3.0)?;
    write_json(&dir.join("profile-gamma-4_3.json"), &q)?;
    let log = q
        .residual_rates
        .iter()
        .find(|r| r.quantity.contains("A1 t|"))
        .map(|r| r.model == RateModel::Logarithmic)
        .unwrap_or(false);
    Ok((
        rate_ok && log,
        format!(
            "rate {rate:.4} at gamma 1.5 (need {want} ± 0.15); gamma 4/3 prefers {}",
            if log { "the logarithmic model" } else { "a power law" }
        ),
    ))
}

fn shooting(dir: &Path) -> Result<(bool, String)> {
    let cases = [
        ("identity", Mat3::identity(), Mat3::zeros()),
        (
            "diagonal",
            Mat3::from_diag([1.0, 2.0, 3.0]),
            Mat3::from_diag([0.5, -0.25, 1.0]),
        ),
    ];
    let mut worst: f64 = 0.0;
    for (name, a1, a0) in cases {
        let init = shoot_prescribed_asymptotics(&a1, &a0, 2.0, 2000.0, &ShootingOptions::default())?;
        let traj = integrate_affine(
            &init,
            4000.0,
            2.0,
            Integrator::Adaptive {
                rtol: 1e-13,
                atol: 1e-14,
            },
        )?;
        let prof = extract_asymptotics(&traj, &ExtractionOptions::default())?;
        write_json(&dir.join(format!("profile-{name}.json")), &prof)?;
        let a0_err = prof.a0.map_or(f64::INFINITY, |p| (p - a0).max_abs());
        worst = worst.max((prof.a1 - a1).max_abs()).max(a0_err);
    }
    Ok((worst < 1e-3, format!("max entry error {worst:.3e} (need < 1e-3)")))
}

fn steady_state(dir: &Path) -> Result<(bool, String)> {
    let mut table = Table::new(["gamma", "steps", "max_abs_deta", "max_abs_v"]);
    let mut worst: f64 = 0.0;
    for gamma in [2.0, 4.0] {
        let grid = Arc::new(Grid1d::chebyshev(32, gamma)?);
        let solver = Solver1d::new(Arc::clone(&grid), 0.5);
        let mut f = PerturbationField1D::zero(grid, 1.0)?;
        let dt = solver.guarded_dt();
        for _ in 0..1000 {
            solver.step(&mut f, dt)?;
        }
        let sup = |x: &[f64]| x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (d, v) = (sup(&f.deta), sup(&f.v));
        worst = worst.max(d);
        table.push(vec![
            crate::output::fmt_f64(gamma),
            "1000".into(),
            crate::output::fmt_f64(d),
            crate::output::fmt_f64(v),
        ]);
    }
    fs::write(dir.join("steady_state.csv"), table.to_bytes()?)?;
    Ok((
        worst < 1e-12,
        format!("max |deta| {worst:.3e} after 1000 steps at gamma 2 and 4 (need < 1e-12)"),
    ))
}

fn small_data(dir: &Path) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for gamma in [2.0, 5.0] {
        let mut cfg = ScenarioConfig::new(Kind::Euler1d);
        let p = cfg.euler1d.as_mut().expect("normalized");
        p.gamma = gamma;
        p.n_nodes = 64;
        p.t_end = 50.0;
        p.perturbation.amplitude = 1e-3;
        let m = run_at(&cfg, &dir.join(format!("gamma-{gamma}")))?;
        let guard = m.metrics["max_guard_deviation"];
        let growth = m.metrics["max_energy_ratio"];
        let decay = m.metrics["final_velocity_fraction"];
        ok &= m.passed() && guard <= 0.1 && growth <= 10.0 && decay < 0.25;
        parts.push(format!(
            "gamma {gamma}: guard {guard:.2e}, e/e0 ≤ {growth:.3}, v(T)/max v {decay:.2e}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn manufactured(dir: &Path) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for gamma in [2.0, 5.0] {
        let m = ManufacturedSolution::new(0.01, gamma);
        let s = residual_time_study(&m, 16, 0.5, &[0.05, 0.025, 0.0125])?;
        write_json(&dir.join(format!("time-gamma-{gamma}.json")), &s)?;
        ok &= (s.fitted_order - 2.0).abs() <= 0.2;
        parts.push(format!("time order {:.3} at gamma {gamma}", s.fitted_order));
    }
    let m = ManufacturedSolution::new(0.01, 2.0);
    let cheb = residual_space_study(&m, Family::Jacobi, &[6, 8, 10, 12, 16], 0.3)?;
    write_json(&dir.join("space-spectral.json"), &cheb)?;
    let spectral = cheb.errors.windows(2).all(|w| w[1] < 0.1 * w[0])
        && cheb.errors.last().is_some_and(|e| *e < 1e-9);
    let fd = residual_space_study(&m, Family::Uniform, &[32, 64, 128], 0.3)?;
    write_json(&dir.join("space-uniform.json"), &fd)?;
    let fourth = (fd.fitted_order - 4.0).abs() <= 0.2;
    ok &= spectral && fourth;
    parts.push(format!(
        "spectral error {:.2e} at n=16, uniform order {:.3}",
        cheb.errors.last().copied().unwrap_or(f64::NAN),
        fd.fitted_order
    ));
    Ok((ok, parts.join(", ")))
}

fn verdict_list(m: &RunManifest) -> String {
    m.verdicts
        .iter()
        .map(|(k, v)| format!("{k} {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn geom3d_suite(dir: &Path) -> Result<(bool, String)> {
    let cfg = ScenarioConfig::new(Kind::Geom3dSuite);
    let m = run_at(&cfg, dir)?;
    let order = m.metrics.get("piola_min_order").copied().unwrap_or(f64::NAN);
    let ok = m.passed()
        && m.verdicts.values().all(|v| *v == Verdict::Pass)
        && order >= 3.5;
    Ok((ok, format!("{}; piola order {order:.3}", verdict_list(&m))))
}

fn weights_suite(dir: &Path) -> Result<(bool, String)> {
    let cfg = ScenarioConfig::new(Kind::WeightsSuite);
    let m = run_at(&cfg, dir)?;
    let want = [
        ("embedding", Verdict::Pass),
        ("hardy", Verdict::Pass),
        ("hardy_constant", Verdict::ExpectedFail),
        ("mollifier", Verdict::Pass),
    ];
    let ok = want.iter().all(|(k, v)| m.verdicts.get(*k) == Some(v));
    Ok((ok, verdict_list(&m)))
}

/// Runs criteria 1–8 into `root`; `on_line` sees each outcome as it completes.
fn run_criteria(root: &Path, mut on_line: impl FnMut(&CriterionOutcome)) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .map(|c| {
            let start = Instant::now();
            let dir = root.join(c.dir);
            let res = fs::create_dir_all(&dir)
                .map_err(anyhow::Error::from)
                .and_then(|_| (c.check)(&dir));
            let elapsed = start.elapsed();
            let budget = Duration::from_secs(c.budget_s);
            let (ok, detail) = match res {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e:#}")),
            };
            let o = CriterionOutcome {
                id: c.id,
                title: c.title,
                verdict: Verdict::from_bool(ok && elapsed <= budget),
                detail: if elapsed <= budget {
                    detail
                } else {
                    format!("{detail}; over the runtime budget")
                },
                elapsed,
                budget,
            };
            on_line(&o);
            o
        })
        .collect()
}

/// Runs the suite into `target`, then reruns criteria 1–8 into a scratch directory and
/// compares both trees byte for byte (criterion 9).
pub fn run_acceptance(
    target: &Path,
    mut on_line: impl FnMut(&CriterionOutcome),
) -> Result<AcceptanceReport> {
    let start = Instant::now();
    let mut stage = Staging::new(target)?;
    let mut outcomes = run_criteria(stage.path(), &mut on_line);

    let replay = Staging::new(&target.with_file_name(format!(
        "{}-replay",
        target
            .file_name()
            .map_or("accept".into(), |n| n.to_string_lossy().into_owned())
    )))?;
    run_criteria(replay.path(), |_| {});
    let diff = diff_trees(stage.path(), replay.path())?;
    let files = list_tree(stage.path())?;
    drop(replay);
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(TOTAL_BUDGET_S);
    let (ok, detail) = match diff {
        None => (
            true,
            format!("two passes wrote byte-identical trees ({} files)", files.len()),
        ),
        Some(d) => (false, format!("passes differ: {d}")),
    };
    let c9 = CriterionOutcome {
        id: 9,
        title: "determinism",
        verdict: Verdict::from_bool(ok && elapsed <= budget),
        detail,
        elapsed,
        budget,
    };
    on_line(&c9);
    outcomes.push(c9);

    let mut table = Table::new(["criterion", "title", "verdict", "detail"]);
    for o in &outcomes {
        table.push(vec![
            o.id.to_string(),
            o.title.to_string(),
            o.verdict.to_string(),
            o.detail.clone(),
        ]);
    }
    let suite_id = CRITERIA
        .iter()
        .map(|c| c.dir)
        .collect::<Vec<_>>()
        .join(",");
    let mut manifest = RunManifest::with(
        "accept",
        format!("{:x}", Sha256::digest(suite_id.as_bytes())),
        true,
    );
    for o in &outcomes {
        manifest.record(&format!("criterion_{}", o.id), o.verdict);
    }
    stage.write("acceptance.csv", &table.to_bytes()?)?;
    for f in files {
        stage.adopt(&f.to_string_lossy());
    }
    manifest.finish(true);
    stage.commit(&mut manifest)?;
    Ok(AcceptanceReport { outcomes, manifest })
}
