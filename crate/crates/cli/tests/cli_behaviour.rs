use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use vacuumlab::euler1d::PerturbationKind;
use vacuumlab::weights::Family;
use vacuumlab::Verdict;
use vacuumlab_cli::config::{AffineParams, Euler1dParams, Geom3dCheck, PerturbationParams};
use vacuumlab_cli::output::{diff_trees, list_tree};
use vacuumlab_cli::scenarios::CHECKPOINT_FILE;
use vacuumlab_cli::{
    error_exit_code, exit, resume, run_at, sweep, Checkpoint, CheckpointError, ConfigError, Kind,
    ScenarioConfig,
};

fn euler(gamma: f64, n: usize, t_end: f64, amplitude: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(Kind::Euler1d);
    let p = c.euler1d.as_mut().unwrap();
    p.gamma = gamma;
    p.n_nodes = n;
    p.t_end = t_end;
    p.perturbation.amplitude = amplitude;
    p.output_every_steps = 100;
    c
}

fn small_geom3d(seed: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(Kind::Geom3dSuite);
    let p = c.geom3d.as_mut().unwrap();
    p.seed = seed;
    p.n_fields = 2;
    p.piola_fields = 1;
    p.resolution = 16;
    p.points_per_field = 4;
    p.curl_dts = vec![0.1, 0.05];
    c
}

fn leftovers(dir: &Path) -> Vec<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.contains("staging"))
        .collect()
}

#[test]
fn zero_amplitude_passes_with_zero_energy() {
    let root = tempfile::tempdir().unwrap();
    let m = run_at(&euler(2.0, 16, 1.0, 0.0), &root.path().join("zero")).unwrap();
    assert_eq!(m.verdict, Verdict::Pass);
    let text = fs::read_to_string(root.path().join("zero/energy.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let col = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "total_energy")
        .unwrap();
    let totals: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[col].parse().unwrap())
        .collect();
    assert!(totals.len() > 1 && totals.iter().all(|e| *e == 0.0));
    assert!(m.outputs.contains(&"energy.csv".to_string()));
    assert!(m.started_unix_s.is_none());
}

#[test]
fn affine_defaults_record_the_growth_verdict() {
    let root = tempfile::tempdir().unwrap();
    let m = run_at(&ScenarioConfig::new(Kind::Affine), &root.path().join("a")).unwrap();
    assert_eq!(m.verdicts["det_exponent"], Verdict::Pass);
    assert!((m.metrics["det_exponent"] - 3.0).abs() <= 0.05);
}

#[test]
fn reruns_are_byte_identical() {
    let root = tempfile::tempdir().unwrap();
    for (name, cfg) in [("g", small_geom3d(42)), ("e", euler(2.0, 16, 2.0, 1e-3))] {
        let a = root.path().join(format!("{name}1"));
        let b = root.path().join(format!("{name}2"));
        let ma = run_at(&cfg, &a).unwrap();
        let mb = run_at(&cfg, &b).unwrap();
        assert_eq!(ma.config_hash, mb.config_hash);
        assert_eq!(diff_trees(&a, &b).unwrap(), None, "{name}");
        assert!(list_tree(&a).unwrap().len() >= 3);
    }
    let m = run_at(&small_geom3d(42), &root.path().join("g3")).unwrap();
    for c in Geom3dCheck::ALL {
        assert!(m.verdicts.contains_key(c.name()), "{}", c.name());
    }
}

#[test]
fn nondeterministic_mode_stamps_times() {
    let root = tempfile::tempdir().unwrap();
    let mut cfg = euler(2.0, 16, 0.5, 1e-3);
    cfg.deterministic = false;
    let m = run_at(&cfg, &root.path().join("t")).unwrap();
    assert!(m.started_unix_s.unwrap() <= m.finished_unix_s.unwrap());
}

#[test]
fn resumed_run_matches_single_run() {
    let root = tempfile::tempdir().unwrap();
    let straight = root.path().join("straight");
    run_at(&euler(5.0, 24, 2.0, 1e-3), &straight).unwrap();
    let half = root.path().join("half");
    run_at(&euler(5.0, 24, 1.0, 1e-3), &half).unwrap();

    let m = resume(&half.join(CHECKPOINT_FILE), 2.0, None, None).unwrap();
    let resumed = root.path().join("half-until-2.0");
    assert_eq!(m.output_dir, resumed);
    assert_eq!(m.verdicts["resume_overlap"], Verdict::Pass);
    assert_eq!(m.metrics["resume_overlap_deviation"], 0.0);
    for f in ["energy.csv", CHECKPOINT_FILE, "outcome.json", "config.toml"] {
        assert_eq!(
            fs::read(straight.join(f)).unwrap(),
            fs::read(resumed.join(f)).unwrap(),
            "{f}"
        );
    }
    let a = Checkpoint::read(&straight.join(CHECKPOINT_FILE)).unwrap();
    let b = Checkpoint::read(&resumed.join(CHECKPOINT_FILE)).unwrap();
    let worst = a
        .snapshot
        .deta
        .iter()
        .chain(&a.snapshot.v)
        .zip(b.snapshot.deta.iter().chain(&b.snapshot.v))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-13);
}

#[test]
fn resume_rejects_changed_step() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("r");
    let mut cfg = euler(2.0, 16, 0.5, 1e-3);
    cfg.euler1d.as_mut().unwrap().dt = Some(1e-3);
    run_at(&cfg, &dir).unwrap();
    let ck = dir.join(CHECKPOINT_FILE);
    let e = resume(&ck, 1.0, Some(2e-3), None).unwrap_err();
    let ce = e.downcast_ref::<ConfigError>().expect("config error");
    assert_eq!(ce.path, "dt");
    assert!(ce.message.contains("0.001"), "{ce}");
    assert_eq!(error_exit_code(&e), exit::CONFIG_ERROR);
    assert!(resume(&ck, 1.0, Some(1e-3), None).is_ok());
    let e = resume(&ck, 0.25, None, None).unwrap_err();
    assert_eq!(e.downcast_ref::<ConfigError>().unwrap().path, "until");
}

#[test]
fn corrupted_checkpoint_reports_checksum() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("c");
    run_at(&euler(2.0, 16, 0.5, 1e-3), &dir).unwrap();
    let ck = dir.join(CHECKPOINT_FILE);
    let mut bytes = fs::read(&ck).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x01;
    fs::write(&ck, &bytes).unwrap();
    let e = resume(&ck, 1.0, None, None).unwrap_err();
    assert_eq!(
        e.downcast_ref::<CheckpointError>(),
        Some(&CheckpointError::Checksum)
    );
    assert!(format!("{e}").contains("checksum"));
    assert_eq!(error_exit_code(&e), exit::FAIL);
}

#[test]
fn failed_run_leaves_no_output() {
    let root = tempfile::tempdir().unwrap();
    let mut cfg = euler(2.0, 16, 1.0, 0.1);
    cfg.euler1d.as_mut().unwrap().energy_budget = 1e-12;
    let target = root.path().join("budget");
    let e = run_at(&cfg, &target).unwrap_err();
    assert_eq!(
        e.downcast_ref::<ConfigError>().unwrap().path,
        "euler1d.energy_budget"
    );
    assert!(!target.exists());
    assert!(leftovers(root.path()).is_empty());

    // a failed rerun keeps the previous complete output
    run_at(&euler(2.0, 16, 0.5, 1e-3), &target).unwrap();
    let before = fs::read(target.join("energy.csv")).unwrap();
    assert!(run_at(&cfg, &target).is_err());
    assert_eq!(fs::read(target.join("energy.csv")).unwrap(), before);
    assert!(leftovers(root.path()).is_empty());
}

#[test]
fn empty_sweep_writes_header_only() {
    let root = tempfile::tempdir().unwrap();
    let out = sweep(&euler(2.0, 16, 0.5, 1e-3), "euler1d.gamma", &[], root.path()).unwrap();
    assert!(out.runs.is_empty());
    assert_eq!(
        fs::read_to_string(&out.summary).unwrap(),
        "value,status,verdict,config_hash,error\n"
    );
}

#[test]
fn sweep_isolates_failures() {
    let root = tempfile::tempdir().unwrap();
    let values: Vec<String> = ["2", "0.5", "5"].iter().map(|s| s.to_string()).collect();
    let out = sweep(&euler(2.0, 16, 1.0, 1e-3), "euler1d.gamma", &values, root.path()).unwrap();
    assert_eq!(out.runs.len(), 3);
    assert!(out.runs[0].result.is_ok() && out.runs[2].result.is_ok());
    assert!(out.runs[1].result.as_ref().unwrap_err().contains("euler1d.gamma"));
    assert!(!out.all_passed());
    let text = fs::read_to_string(&out.summary).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let h = rdr.headers().unwrap().clone();
    assert!(h.iter().any(|c| c == "max_energy_ratio"));
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[1][1], "error");
    assert!(out.dir.join("gamma-5").join("manifest.json").exists());
    let name = out.dir.file_name().unwrap().to_string_lossy().into_owned();
    assert!(name.starts_with("euler1d-sweep-gamma-"), "{name}");

    let e = sweep(&euler(2.0, 16, 1.0, 1e-3), "euler1d.nope", &values, root.path()).unwrap_err();
    assert_eq!(error_exit_code(&e), exit::CONFIG_ERROR);
}

#[test]
fn resolution_sweep_reports_piola_order() {
    let root = tempfile::tempdir().unwrap();
    let mut cfg = small_geom3d(0);
    cfg.geom3d.as_mut().unwrap().checks = vec![Geom3dCheck::Piola];
    let values: Vec<String> = ["16", "32"].iter().map(|s| s.to_string()).collect();
    let out = sweep(&cfg, "geom3d.resolution", &values, root.path()).unwrap();
    let text = fs::read_to_string(&out.summary).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let col = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "piola_min_order")
        .expect("order column");
    let orders: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[col].parse().unwrap())
        .collect();
    assert_eq!(orders.len(), 2);
    assert!(orders.iter().all(|o| *o > 2.5), "{orders:?}");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vacuumlab"))
}

#[test]
fn binary_exit_codes() {
    let root = tempfile::tempdir().unwrap();
    let good = root.path().join("good.toml");
    fs::write(
        &good,
        "kind = \"euler1d\"\noutput_dir = \"zero\"\n[euler1d]\nn_nodes = 16\nt_end = 0.5\n\
         [euler1d.perturbation]\nkind = \"fourier\"\namplitude = 0.0\n",
    )
    .unwrap();
    let out = root.path().join("out");
    let s = bin()
        .args(["run", good.to_str().unwrap()])
        .env("VACUUMLAB_OUTPUT_ROOT", &out)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(exit::PASS));
    assert!(out.join("zero/manifest.json").exists());

    let bad = root.path().join("bad.toml");
    fs::write(&bad, "kind = \"euler1d\"\n[euler1d]\ncfl = 3.0\n").unwrap();
    let o = bin()
        .args(["run", bad.to_str().unwrap()])
        .env("VACUUMLAB_OUTPUT_ROOT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(exit::CONFIG_ERROR));
    assert!(String::from_utf8_lossy(&o.stderr).contains("euler1d.cfl"));

    let blowup = root.path().join("blowup.toml");
    fs::write(
        &blowup,
        "kind = \"euler1d\"\n[euler1d]\nn_nodes = 32\nt_end = 20.0\nenergy_budget = 1e300\n\
         output_every_steps = 50\n[euler1d.perturbation]\nkind = \"fourier\"\namplitude = 0.5\n",
    )
    .unwrap();
    let s = bin()
        .args(["--output-root", out.to_str().unwrap(), "run", blowup.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(exit::FAIL));
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Jacobi), Just(Family::Uniform)]
}

fn positive() -> impl Strategy<Value = f64> {
    (1e-6f64..1e6).prop_map(|x| x * (1.0 + f64::EPSILON))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configs_round_trip_bit_exactly(
        gamma in 1.0001f64..20.0,
        n in 4usize..1024,
        fam in family(),
        dt in proptest::option::of(positive()),
        cfl in 1e-3f64..1.0,
        t_end in positive(),
        amp in -1.0f64..1.0,
        mode in 1usize..256,
        every in 1usize..10_000,
        vap in proptest::option::of(-5.0f64..5.0),
        m in proptest::array::uniform9(-3.0f64..3.0),
        deterministic in any::<bool>(),
    ) {
        let mut e = ScenarioConfig::new(Kind::Euler1d);
        e.deterministic = deterministic;
        e.output_dir = Some(format!("runs/g{n}").into());
        e.euler1d = Some(Euler1dParams {
            gamma,
            n_nodes: n,
            family: fam,
            dt,
            cfl,
            t_end,
            alphadot_initial: amp.abs(),
            perturbation: PerturbationParams { kind: PerturbationKind::Bump, amplitude: amp, mode },
            filter: deterministic,
            output_every_steps: every,
            energy_growth_limit: 10.0 + amp.abs(),
            decay_fraction: 0.25,
            energy_budget: t_end,
            velocity_alpha_power: vap,
        });
        let back = ScenarioConfig::from_toml(&e.to_toml()).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.hash(), e.hash());
        let p = back.euler1d.unwrap();
        prop_assert_eq!(p.t_end.to_bits(), t_end.to_bits());
        prop_assert_eq!(p.dt.map(f64::to_bits), dt.map(f64::to_bits));

        let mut a = ScenarioConfig::new(Kind::Affine);
        a.affine = Some(AffineParams {
            gamma,
            adot_initial: [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]],
            ..AffineParams::default()
        });
        let back = ScenarioConfig::from_toml(&a.to_toml()).unwrap();
        prop_assert_eq!(back, a);
    }
}
