//! Scenario runners: one function per config kind, plus checkpoint resume.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use vacuumlab::affine::{
    det_growth_exponent, extract_asymptotics, integrate_affine, trajectory_csv, AffineState,
    ExtractionOptions, Integrator, ScalarAffineState,
};
use vacuumlab::euler1d::{
    assess, energy_terms, run_until, term_key, EnergyReport, GuardEvent, OutputSample, Regime,
    Run1d, StabilityConfig, StabilityOutcome, Summand,
};
use vacuumlab::geom3d::{
    cofactor_linearization_check, curl_transport_study, jacobian_identity_check,
    lemma_aenergy_study, lemma_atan_check, lemma_tan_check, piola_check, random_points,
    time_identities_study, Family3, Field3, FourierField, Poly3, TensorField3D,
};
use vacuumlab::weights::{embedding_refinement, hardy_refinement, mollifier_growth, Grid1d};
use vacuumlab::{CheckReport, Mat3, Verdict};

use crate::checkpoint::Checkpoint;
use crate::config::{
    AffineParams, ConfigError, Euler1dParams, Geom3dCheck, Geom3dParams, Kind, ScenarioConfig,
    WeightsParams,
};
use crate::output::{fmt_f64, resolve_output_dir, RunManifest, Staging, Table};

pub const CHECKPOINT_FILE: &str = "checkpoint.bin";

/// Runs `cfg` into its resolved output directory under `root`.
pub fn run(cfg: &ScenarioConfig, root: &Path) -> Result<RunManifest> {
    run_at(cfg, &resolve_output_dir(cfg, root))
}

/// Runs `cfg` into `target`, replacing any previous contents once the run has finished.
pub fn run_at(cfg: &ScenarioConfig, target: &Path) -> Result<RunManifest> {
    cfg.validate()?;
    let cfg = cfg.clone().normalized();
    let mut stage = Staging::new(target)?;
    let mut m = RunManifest::new(&cfg);
    stage.write("config.toml", cfg.to_toml().as_bytes())?;
    match cfg.kind {
        Kind::Affine => run_affine(cfg.affine.as_ref().expect("normalized"), &mut stage, &mut m)?,
        Kind::Euler1d => run_euler1d(&cfg, &mut stage, &mut m)?,
        Kind::Geom3dSuite => run_geom3d(cfg.geom3d.as_ref().expect("normalized"), &mut stage, &mut m)?,
        Kind::WeightsSuite => {
            run_weights(cfg.weights.as_ref().expect("normalized"), &mut stage, &mut m)?
        }
    }
    m.finish(cfg.deterministic);
    stage.commit(&mut m)?;
    Ok(m)
}

// ---- affine ----

fn run_affine(p: &AffineParams, stage: &mut Staging, m: &mut RunManifest) -> Result<()> {
    let s = AffineState::new(Mat3::new(p.a_initial), Mat3::new(p.adot_initial), p.gamma)?;
    let traj = integrate_affine(
        &s,
        p.t_end,
        p.dt,
        Integrator::Adaptive {
            rtol: p.rtol,
            atol: p.atol,
        },
    )?;
    stage.write("trajectory.csv", trajectory_csv(&traj).as_bytes())?;
    let slope = det_growth_exponent(&traj, p.fit_t_start, p.t_end)
        .ok_or_else(|| anyhow!("too few positive samples to fit the growth of det A"))?;
    m.metric("det_exponent", slope);
    m.record(
        "det_exponent",
        Verdict::from_bool((slope - p.det_exponent_expected).abs() <= p.det_exponent_tolerance),
    );
    // the profile needs a long enough horizon; a short run simply has none
    if let Ok(prof) = extract_asymptotics(&traj, &ExtractionOptions::default()) {
        if let Some(r) = prof.residual_rates.first() {
            m.metric("velocity_residual_rate", r.fitted);
        }
        stage.write_json("profile.json", &prof)?;
    }
    Ok(())
}

// ---- euler1d ----

const SERIES_HEAD: [&str; 5] = ["step", "t", "alpha", "alphadot", "total_energy"];
const SERIES_TAIL: [&str; 6] = [
    "sup_v",
    "sup_deta",
    "sup_weighted_v",
    "e_proxy",
    "guard_deviation",
    "ft_ratio",
];

/// Column layout of the sampled series for a regime.
struct SeriesLayout {
    regime: Regime,
    terms: Vec<(vacuumlab::euler1d::Component, usize, f64, f64)>,
}

impl SeriesLayout {
    fn new(gamma: f64, velocity_alpha_power: f64) -> Result<Self> {
        let regime = Regime::for_gamma(gamma)?;
        Ok(Self {
            regime,
            terms: energy_terms(regime, gamma, Some(velocity_alpha_power)),
        })
    }

    fn columns(&self) -> Vec<String> {
        SERIES_HEAD
            .iter()
            .map(|s| s.to_string())
            .chain(self.terms.iter().map(|t| term_key(t.0, t.1)))
            .chain(SERIES_TAIL.iter().map(|s| s.to_string()))
            .collect()
    }

    fn row(&self, s: &OutputSample) -> Vec<f64> {
        let mut r = vec![s.step as f64, s.t, s.alpha, s.alphadot, s.energy.total];
        r.extend(s.energy.summands.iter().map(|x| x.value));
        r.extend([
            s.sup_v,
            s.sup_deta,
            s.sup_weighted_v,
            s.e_proxy,
            s.guard_deviation,
            s.ft_ratio,
        ]);
        r
    }

    fn sample(&self, r: &[f64]) -> OutputSample {
        let k = self.terms.len();
        let summands = self
            .terms
            .iter()
            .zip(&r[5..5 + k])
            .map(|(&(component, b, d_power, alpha_power), &value)| Summand {
                key: term_key(component, b),
                component,
                b,
                d_power,
                alpha_power,
                value,
            })
            .collect();
        let tail = &r[5 + k..];
        OutputSample {
            step: r[0] as u64,
            t: r[1],
            alpha: r[2],
            alphadot: r[3],
            sup_v: tail[0],
            sup_deta: tail[1],
            sup_weighted_v: tail[2],
            e_proxy: tail[3],
            guard_deviation: tail[4],
            ft_ratio: tail[5],
            energy: EnergyReport {
                t: r[1],
                regime: self.regime,
                summands,
                total: r[4],
            },
        }
    }

    fn csv(&self, rows: &[Vec<f64>]) -> Result<Vec<u8>> {
        let mut t = Table::new(self.columns());
        for r in rows {
            let mut cells = vec![(r[0] as u64).to_string()];
            cells.extend(r[1..].iter().map(|x| fmt_f64(*x)));
            t.push(cells);
        }
        t.to_bytes()
    }
}

#[derive(Serialize)]
struct OutcomeSummary<'a> {
    dt: f64,
    verdict: Verdict,
    blow_up: &'a Option<GuardEvent>,
    samples: usize,
    max_energy_ratio: f64,
    final_velocity_fraction: f64,
    max_guard_deviation: f64,
    max_ft_ratio: f64,
}

fn record_outcome(o: &StabilityOutcome, stage: &mut Staging, m: &mut RunManifest) -> Result<()> {
    m.record("stability", o.verdict);
    m.metric("max_energy_ratio", o.max_energy_ratio);
    m.metric("final_velocity_fraction", o.final_velocity_fraction);
    m.metric("max_guard_deviation", o.max_guard_deviation);
    m.metric("max_ft_ratio", o.max_ft_ratio);
    m.metric("dt", o.dt);
    stage.write_json(
        "outcome.json",
        &OutcomeSummary {
            dt: o.dt,
            verdict: o.verdict,
            blow_up: &o.blow_up,
            samples: o.samples.len(),
            max_energy_ratio: o.max_energy_ratio,
            final_velocity_fraction: o.final_velocity_fraction,
            max_guard_deviation: o.max_guard_deviation,
            max_ft_ratio: o.max_ft_ratio,
        },
    )
}

fn write_series(
    cfg: &ScenarioConfig,
    run: &Run1d,
    layout: &SeriesLayout,
    rows: Vec<Vec<f64>>,
    blow_up: &Option<GuardEvent>,
    stage: &mut Staging,
) -> Result<()> {
    stage.write("energy.csv", &layout.csv(&rows)?)?;
    // a tripped guard leaves no restartable state
    if blow_up.is_none() {
        let ck = Checkpoint {
            config_hash: cfg.hash(),
            config_toml: cfg.to_toml(),
            snapshot: run.snapshot(),
            columns: layout.columns(),
            rows,
        };
        stage.write(CHECKPOINT_FILE, &ck.encode())?;
    }
    Ok(())
}

fn run_euler1d(cfg: &ScenarioConfig, stage: &mut Staging, m: &mut RunManifest) -> Result<()> {
    let p = cfg.euler1d.as_ref().expect("normalized");
    let sc = p.stability_config();
    let mut run = sc.build_run()?;
    let e0 = run.sample()?.energy.total;
    if e0 > sc.energy_budget {
        return Err(ConfigError::new(
            "euler1d.energy_budget",
            format!("initial energy {e0:e} exceeds the budget {:e}", sc.energy_budget),
        )
        .into());
    }
    let layout = SeriesLayout::new(sc.gamma, run.velocity_alpha_power)?;
    let total = sc.total_steps(run.dt);
    let (samples, blow_up) = run_until(&mut run, total, sc.output_every, |_| {})?;
    let o = assess(&samples, &blow_up, &sc, run.dt);
    let rows = samples.iter().map(|s| layout.row(s)).collect();
    write_series(cfg, &run, &layout, rows, &blow_up, stage)?;
    record_outcome(&o, stage, m)
}

/// Largest relative difference between two rows, zero when they agree bit for bit.
fn row_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if x.to_bits() == y.to_bits() {
                0.0
            } else {
                (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max)
}

/// Extends a checkpointed 1-d run to `until`. The output directory defaults to a sibling of the
/// checkpoint's directory named `<dir>-until-<until>`.
pub fn resume(
    checkpoint: &Path,
    until: f64,
    dt: Option<f64>,
    target: Option<&Path>,
) -> Result<RunManifest> {
    let ck = Checkpoint::read(checkpoint)?;
    let mut cfg = ScenarioConfig::from_toml(&ck.config_toml)
        .map_err(|e| anyhow!("checkpoint carries an invalid config: {e}"))?;
    if cfg.hash() != ck.config_hash {
        bail!("checkpoint config does not match its recorded hash");
    }
    let snap = &ck.snapshot;
    if let Some(dt) = dt {
        if dt.to_bits() != snap.dt.to_bits() {
            return Err(ConfigError::new(
                "dt",
                format!(
                    "checkpoint was written with dt = {}; resuming with dt = {} would change the time grid",
                    fmt_f64(snap.dt),
                    fmt_f64(dt)
                ),
            )
            .into());
        }
    }
    let t_ckpt = snap.step as f64 * snap.dt;
    if !(until.is_finite() && until > t_ckpt) {
        return Err(ConfigError::new(
            "until",
            format!("must exceed the checkpoint time {}", fmt_f64(t_ckpt)),
        )
        .into());
    }
    let p: &mut Euler1dParams = cfg
        .euler1d
        .as_mut()
        .ok_or_else(|| anyhow!("checkpoint does not belong to a 1-d run"))?;
    p.t_end = until;
    let sc: StabilityConfig = p.stability_config();
    cfg.validate()?;

    let layout = SeriesLayout::new(snap.gamma, snap.velocity_alpha_power)?;
    if ck.columns != layout.columns() {
        bail!("checkpoint series columns do not match the run's energy layout");
    }
    let last = ck
        .rows
        .last()
        .ok_or_else(|| anyhow!("checkpoint has an empty series"))?;
    let mut run = Run1d::from_snapshot(snap)?;
    let overlap = row_deviation(&layout.row(&run.sample()?), last);

    let target: PathBuf = match target {
        Some(t) => t.to_path_buf(),
        None => {
            let dir = checkpoint
                .parent()
                .filter(|d| !d.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let name = dir
                .file_name()
                .map_or("run".into(), |n| n.to_string_lossy().into_owned());
            dir.with_file_name(format!("{name}-until-{}", fmt_f64(until)))
        }
    };
    let mut stage = Staging::new(&target)?;
    let mut m = RunManifest::new(&cfg);
    stage.write("config.toml", cfg.to_toml().as_bytes())?;

    let every = sc.output_every.max(1) as u64;
    let total = sc.total_steps(run.dt);
    let (tail, blow_up) = run_until(&mut run, total, sc.output_every, |_| {})?;
    let mut rows = ck.rows.clone();
    // an uninterrupted run samples only on the cadence and at its end
    if snap.step % every != 0 {
        rows.pop();
    }
    rows.extend(tail.iter().map(|s| layout.row(s)));
    let samples: Vec<OutputSample> = rows.iter().map(|r| layout.sample(r)).collect();
    let o = assess(&samples, &blow_up, &sc, run.dt);
    m.metric("resume_overlap_deviation", overlap);
    m.record("resume_overlap", Verdict::from_bool(overlap <= 1e-13));
    write_series(&cfg, &run, &layout, rows, &blow_up, &mut stage)?;
    record_outcome(&o, &mut stage, &mut m)?;
    m.finish(cfg.deterministic);
    stage.commit(&mut m)?;
    Ok(m)
}

// ---- geom3d ----

#[derive(Serialize)]
struct NamedReport {
    check: &'static str,
    field: String,
    report: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    displayed_form_deviation: Option<f64>,
}

fn near_identity(seed: u64) -> FourierField {
    FourierField::random(seed, 4, 0.15, 2.5, true)
}

const ALPHAS: [[usize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

fn per_field<F>(p: &Geom3dParams, count: usize, check: Geom3dCheck, f: F) -> Vec<Result<NamedReport>>
where
    F: Fn(u64, usize) -> vacuumlab::Result<(CheckReport, Option<f64>)> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let s = p.seed + i as u64;
            let (report, shown) =
                f(s, i).with_context(|| format!("{} on field seed {s}", check.name()))?;
            Ok(NamedReport {
                check: check.name(),
                field: format!("seed {s}"),
                report,
                displayed_form_deviation: shown,
            })
        })
        .collect()
}

fn geom3d_reports(p: &Geom3dParams, check: Geom3dCheck) -> Vec<Result<NamedReport>> {
    let ns = p.resolutions();
    let n = p.n_fields;
    let pts = p.points_per_field;
    match check {
        Geom3dCheck::Piola => per_field(p, p.piola_fields, check, |s, _| {
            Ok((piola_check(&near_identity(s), &ns, p.half_width), None))
        }),
        Geom3dCheck::JacobianIdentity => per_field(p, n, check, |s, _| {
            let t = TensorField3D::from_field(&near_identity(s), random_points(s, pts, 0.95))?;
            Ok((jacobian_identity_check(&t), None))
        }),
        Geom3dCheck::TimeIdentities => per_field(p, n, check, |s, _| {
            let fam = Family3::random(s, 2, 0.1);
            Ok((
                time_identities_study(&fam, &random_points(s, pts, 0.9), 0.3, &p.time_dts)?,
                None,
            ))
        }),
        Geom3dCheck::LemmaAenergy => per_field(p, n, check, |s, i| {
            let fam = Family3::random(s, 2, 0.1);
            let o = lemma_aenergy_study(
                &fam,
                ALPHAS[i % 3],
                &random_points(s, pts, 0.9),
                0.4,
                &p.time_dts,
            )?;
            Ok((o.report, o.displayed_deviation))
        }),
        Geom3dCheck::LemmaAtan => per_field(p, n, check, |s, i| {
            let o = lemma_atan_check(&near_identity(s), ALPHAS[i % 3], &ns, p.half_width);
            Ok((o.report, o.displayed_deviation))
        }),
        Geom3dCheck::LemmaTan => per_field(p, n, check, |s, _| {
            let field = near_identity(s);
            let m = move |x: &[f64; 3]| {
                let g = field.gradient(x);
                g - g.transpose()
            };
            let r = lemma_tan_check(
                &Poly3::random(s, 3),
                &m,
                &random_points(s, pts, 1.0),
                "random cubic",
            )?;
            Ok((r, None))
        }),
        Geom3dCheck::CofactorLinearization => per_field(p, 1, check, |s, _| {
            let o = cofactor_linearization_check(s, &[1e-2, 5e-3, 2.5e-3, 1.25e-3], 50);
            Ok((o.report, o.displayed_deviation))
        }),
        Geom3dCheck::CurlTransport => per_field(p, 1, check, |s, _| {
            let u = FourierField::random(s + 5, 4, 1.0, 2.5, false);
            let o = curl_transport_study(
                &u,
                p.curl_epsilon,
                ScalarAffineState::new(1.0, 1.0, 2.0, 3)?,
                &random_points(s + 21, 8, 0.9),
                p.curl_t_end,
                &p.curl_dts,
            )?;
            Ok((o.report, o.displayed_deviation))
        }),
    }
}

fn run_geom3d(p: &Geom3dParams, stage: &mut Staging, m: &mut RunManifest) -> Result<()> {
    let mut table = Table::new([
        "check",
        "field",
        "resolution",
        "deviation",
        "fitted_order",
        "verdict",
    ]);
    let mut all = Vec::new();
    let mut checks = p.checks.clone();
    checks.sort();
    checks.dedup();
    for check in checks {
        let name = check.name();
        let mut ok = true;
        let mut worst_dev: f64 = 0.0;
        let mut min_order = f64::INFINITY;
        for r in geom3d_reports(p, check) {
            let r = match r {
                Ok(r) => r,
                Err(e) => {
                    ok = false;
                    table.push(vec![
                        name.into(),
                        format!("{e:#}"),
                        String::new(),
                        String::new(),
                        String::new(),
                        Verdict::Fail.to_string(),
                    ]);
                    continue;
                }
            };
            ok &= r.report.verdict.is_success();
            if let Some(d) = r.report.deviations.last() {
                worst_dev = worst_dev.max(*d);
            }
            if let Some(o) = r.report.fitted_order {
                min_order = min_order.min(o);
            }
            for (res, dev) in r.report.resolutions.iter().zip(&r.report.deviations) {
                table.push(vec![
                    name.into(),
                    r.field.clone(),
                    fmt_f64(*res),
                    fmt_f64(*dev),
                    r.report.fitted_order.map(fmt_f64).unwrap_or_default(),
                    r.report.verdict.to_string(),
                ]);
            }
            all.push(r);
        }
        m.record(name, Verdict::from_bool(ok));
        m.metric(&format!("{name}_max_deviation"), worst_dev);
        if min_order.is_finite() {
            m.metric(&format!("{name}_min_order"), min_order);
        }
    }
    stage.write("checks.csv", &table.to_bytes()?)?;
    stage.write_json("reports.json", &all)
}

// ---- weights ----

type Field1 = (&'static str, fn(f64) -> f64);

fn dist(x: f64) -> f64 {
    0.25 * (1.0 - x * x)
}

/// Fields vanishing at least like the distance to the boundary, plus one that does not.
pub const ADMISSIBLE_FIELDS: [Field1; 10] = [
    ("d", |x| dist(x)),
    ("d_sin_pi_x", |x| dist(x) * (std::f64::consts::PI * x).sin()),
    ("d_cos_pi_x", |x| dist(x) * (std::f64::consts::PI * x).cos()),
    ("d_exp_x", |x| dist(x) * x.exp()),
    ("d_1_plus_x3", |x| dist(x) * (1.0 + x * x * x)),
    ("d_squared", |x| dist(x) * dist(x)),
    ("sin_pi_x", |x| (std::f64::consts::PI * x).sin()),
    ("d_over_2_plus_x", |x| dist(x) / (2.0 + x)),
    ("d_cosh_2x", |x| dist(x) * (2.0 * x).cosh()),
    ("d_x_sin_3x", |x| dist(x) * x * (3.0 * x).sin()),
];

const EMBEDDING_EXTRA: [Field1; 1] = [("chebyshev_t5", |x| {
    16.0 * x.powi(5) - 20.0 * x.powi(3) + 5.0 * x
})];

fn run_weights(p: &WeightsParams, stage: &mut Staging, m: &mut RunManifest) -> Result<()> {
    let mut hardy = Table::new(["field", "k", "n", "ratio", "spread", "verdict"]);
    let jobs: Vec<(Field1, usize)> = ADMISSIBLE_FIELDS
        .iter()
        .flat_map(|f| p.hardy_orders.iter().map(move |k| (*f, *k)))
        .collect();
    let studies: Vec<_> = jobs
        .par_iter()
        .map(|((_, u), k)| hardy_refinement(u, *k, p.gamma, p.family, &p.hardy_resolutions))
        .collect();
    let mut ok = true;
    let mut spread: f64 = 0.0;
    for (((name, _), k), st) in jobs.iter().zip(studies) {
        let st = st?;
        ok &= st.verdict == Verdict::Pass;
        spread = spread.max(st.spread);
        for (n, r) in st.ns.iter().zip(&st.ratios) {
            hardy.push(vec![
                name.to_string(),
                k.to_string(),
                n.to_string(),
                fmt_f64(*r),
                fmt_f64(st.spread),
                st.verdict.to_string(),
            ]);
        }
    }
    m.record("hardy", Verdict::from_bool(ok));
    m.metric("hardy_max_spread", spread);

    let st = hardy_refinement(|_| 1.0, 1, p.gamma, p.family, &p.constant_resolutions)?;
    let diverging = st.ratios.windows(2).all(|w| w[1] > w[0]);
    for (n, r) in st.ns.iter().zip(&st.ratios) {
        hardy.push(vec![
            "constant".into(),
            "1".into(),
            n.to_string(),
            fmt_f64(*r),
            fmt_f64(st.spread),
            st.verdict.to_string(),
        ]);
    }
    m.record(
        "hardy_constant",
        if st.verdict == Verdict::ExpectedFail && diverging {
            Verdict::ExpectedFail
        } else {
            Verdict::Fail
        },
    );
    m.metric(
        "hardy_constant_ratio_growth",
        st.ratios.last().copied().unwrap_or(0.0) / st.ratios.first().copied().unwrap_or(1.0),
    );
    stage.write("hardy.csv", &hardy.to_bytes()?)?;

    let mut emb = Table::new(["field", "n", "ratio", "spread", "verdict"]);
    let fields: Vec<Field1> = ADMISSIBLE_FIELDS
        .iter()
        .chain(EMBEDDING_EXTRA.iter())
        .copied()
        .collect();
    let studies: Vec<_> = fields
        .par_iter()
        .map(|(_, f)| {
            embedding_refinement(
                f,
                (p.embedding_k, p.embedding_r, p.embedding_s),
                p.gamma,
                p.family,
                &p.embedding_resolutions,
            )
        })
        .collect();
    let mut ok = true;
    let mut spread: f64 = 0.0;
    for ((name, _), st) in fields.iter().zip(studies) {
        let st = st?;
        ok &= st.verdict == Verdict::Pass;
        spread = spread.max(st.spread);
        for (n, r) in st.ns.iter().zip(&st.ratios) {
            emb.push(vec![
                name.to_string(),
                n.to_string(),
                fmt_f64(*r),
                fmt_f64(st.spread),
                st.verdict.to_string(),
            ]);
        }
    }
    m.record("embedding", Verdict::from_bool(ok));
    m.metric("embedding_max_spread", spread);
    stage.write("embedding.csv", &emb.to_bytes()?)?;

    let g = Grid1d::new(p.family, p.mollifier_nodes, p.gamma)?;
    let u0 = g.sample(|x| (x / p.step_width).tanh());
    let kappas: Vec<f64> = p.mollifier_log_kappas.iter().map(|l| (-l).exp()).collect();
    let mg = mollifier_growth(&u0, &kappas, &g)?;
    let mut mol = Table::new(["log_kappa", "kappa", "ratio", "distance"]);
    for (i, k) in mg.kappas.iter().enumerate() {
        mol.push(vec![
            fmt_f64(p.mollifier_log_kappas[i]),
            fmt_f64(*k),
            fmt_f64(mg.ratios[i]),
            fmt_f64(mg.distances[i]),
        ]);
    }
    m.record("mollifier", Verdict::from_bool(mg.bounded()));
    if let (Some(a), Some(b)) = (mg.ratios.first(), mg.ratios.iter().cloned().reduce(f64::max)) {
        m.metric("mollifier_max_ratio_over_first", b / a);
    }
    stage.write("mollifier.csv", &mol.to_bytes()?)
}
