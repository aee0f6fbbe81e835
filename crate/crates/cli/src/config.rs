//! Scenario configuration: TOML with one parameter table per scenario kind.
//!
//! All physical quantities are nondimensional (lengths in units of the initial domain
//! radius, times in the matching sound-crossing unit), so no unit suffixes appear.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vacuumlab::euler1d::{Perturbation, PerturbationKind, StabilityConfig};
use vacuumlab::weights::Family;

/// Invalid configuration; `path` names the offending field, e.g. `euler1d.gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

type Checked = std::result::Result<(), ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Affine,
    Euler1d,
    Geom3dSuite,
    WeightsSuite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Affine => "affine",
            Self::Euler1d => "euler1d",
            Self::Geom3dSuite => "geom3d-suite",
            Self::WeightsSuite => "weights-suite",
        }
    }

    /// Name of the parameter table this kind reads.
    pub fn table(self) -> &'static str {
        match self {
            Self::Affine => "affine",
            Self::Euler1d => "euler1d",
            Self::Geom3dSuite => "geom3d",
            Self::WeightsSuite => "weights",
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    /// Relative paths are resolved against the output root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Omits wall-clock timestamps from the manifest so reruns are byte-identical.
    #[serde(default = "yes")]
    pub deterministic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler1d: Option<Euler1dParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geom3d: Option<Geom3dParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AffineParams {
    pub gamma: f64,
    /// Row-major `A(0)`.
    pub a_initial: [[f64; 3]; 3],
    /// Row-major `A'(0)`.
    pub adot_initial: [[f64; 3]; 3],
    pub t_end: f64,
    /// Output spacing of the trajectory.
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    /// The `det A` slope is fitted over `[fit_t_start, t_end]`.
    pub fit_t_start: f64,
    pub det_exponent_expected: f64,
    pub det_exponent_tolerance: f64,
}

const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

impl Default for AffineParams {
    fn default() -> Self {
        Self {
            gamma: 1.5,
            a_initial: IDENTITY,
            adot_initial: IDENTITY,
            t_end: 1000.0,
            dt: 0.5,
            rtol: 1e-12,
            atol: 1e-13,
            fit_t_start: 10.0,
            det_exponent_expected: 3.0,
            det_exponent_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationParams {
    pub kind: PerturbationKind,
    pub amplitude: f64,
    #[serde(default = "one")]
    pub mode: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Euler1dParams {
    pub gamma: f64,
    /// Number of intervals; the grid has `n_nodes + 1` points.
    pub n_nodes: usize,
    pub family: Family,
    /// Fixed step; the guarded CFL step is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub cfl: f64,
    pub t_end: f64,
    pub alphadot_initial: f64,
    pub perturbation: PerturbationParams,
    pub filter: bool,
    /// Steps between rows of the energy table.
    pub output_every_steps: usize,
    pub energy_growth_limit: f64,
    pub decay_fraction: f64,
    pub energy_budget: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity_alpha_power: Option<f64>,
}

impl Default for Euler1dParams {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            n_nodes: 64,
            family: Family::Jacobi,
            dt: None,
            cfl: 0.5,
            t_end: 50.0,
            alphadot_initial: 1.0,
            perturbation: PerturbationParams {
                kind: PerturbationKind::Fourier,
                amplitude: 1e-3,
                mode: 1,
            },
            filter: false,
            output_every_steps: 500,
            energy_growth_limit: 10.0,
            decay_fraction: 0.25,
            energy_budget: 1.0,
            velocity_alpha_power: None,
        }
    }
}

impl Euler1dParams {
    pub fn stability_config(&self) -> StabilityConfig {
        StabilityConfig {
            gamma: self.gamma,
            n_nodes: self.n_nodes,
            family: self.family,
            dt: self.dt,
            cfl: self.cfl,
            t_end: self.t_end,
            alphadot0: self.alphadot_initial,
            perturbation: Perturbation {
                kind: self.perturbation.kind,
                amplitude: self.perturbation.amplitude,
                mode: self.perturbation.mode,
            },
            filter: self.filter,
            output_every: self.output_every_steps,
            energy_growth_limit: self.energy_growth_limit,
            decay_fraction: self.decay_fraction,
            energy_budget: self.energy_budget,
            velocity_alpha_power: self.velocity_alpha_power,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geom3dCheck {
    Piola,
    JacobianIdentity,
    TimeIdentities,
    LemmaAenergy,
    LemmaAtan,
    LemmaTan,
    CofactorLinearization,
    CurlTransport,
}

impl Geom3dCheck {
    pub const ALL: [Self; 8] = [
        Self::Piola,
        Self::JacobianIdentity,
        Self::TimeIdentities,
        Self::LemmaAenergy,
        Self::LemmaAtan,
        Self::LemmaTan,
        Self::CofactorLinearization,
        Self::CurlTransport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Piola => "piola",
            Self::JacobianIdentity => "jacobian_identity",
            Self::TimeIdentities => "time_identities",
            Self::LemmaAenergy => "lemma_aenergy",
            Self::LemmaAtan => "lemma_atan",
            Self::LemmaTan => "lemma_tan",
            Self::CofactorLinearization => "cofactor_linearization",
            Self::CurlTransport => "curl_transport",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Geom3dParams {
    /// Field `i` of a check uses seed `seed + i`.
    pub seed: u64,
    pub checks: Vec<Geom3dCheck>,
    pub n_fields: usize,
    /// Fields used for the grid-refinement Piola study.
    pub piola_fields: usize,
    pub points_per_field: usize,
    /// Finest cells per side of the cube grids; the study uses a quarter, a half and all of it.
    pub resolution: usize,
    pub half_width: f64,
    pub time_dts: Vec<f64>,
    pub curl_dts: Vec<f64>,
    pub curl_epsilon: f64,
    pub curl_t_end: f64,
}

impl Default for Geom3dParams {
    fn default() -> Self {
        Self {
            seed: 0,
            checks: Geom3dCheck::ALL.to_vec(),
            n_fields: 20,
            piola_fields: 3,
            points_per_field: 10,
            resolution: 48,
            half_width: 0.5,
            time_dts: vec![1e-2, 5e-3, 2.5e-3],
            curl_dts: vec![0.1, 0.05, 0.025, 0.0125],
            curl_epsilon: 0.2,
            curl_t_end: 1.0,
        }
    }
}

impl Geom3dParams {
    pub fn resolutions(&self) -> [usize; 3] {
        [self.resolution / 4, self.resolution / 2, self.resolution]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsParams {
    pub gamma: f64,
    pub family: Family,
    pub hardy_orders: Vec<usize>,
    pub hardy_resolutions: Vec<usize>,
    pub constant_resolutions: Vec<usize>,
    /// `(k, r, s)` of the embedding `‖·‖_{k,s}`-into-`W^{r,∞}` check.
    pub embedding_k: usize,
    pub embedding_r: usize,
    pub embedding_s: f64,
    pub embedding_resolutions: Vec<usize>,
    pub mollifier_nodes: usize,
    /// `κ = e^{-m}` for each listed `m`.
    pub mollifier_log_kappas: Vec<f64>,
    pub step_width: f64,
}

impl Default for WeightsParams {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            family: Family::Jacobi,
            hardy_orders: vec![1, 2],
            hardy_resolutions: vec![32, 64, 128],
            constant_resolutions: vec![16, 32, 64],
            embedding_k: 2,
            embedding_r: 1,
            embedding_s: 3.0,
            embedding_resolutions: vec![16, 32, 64],
            mollifier_nodes: 96,
            mollifier_log_kappas: vec![3.0, 4.0, 5.0],
            step_width: 0.15,
        }
    }
}

fn check(ok: bool, path: &str, message: impl FnOnce() -> String) -> Checked {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(path, message()))
    }
}

fn positive(v: f64, path: &str) -> Checked {
    check(v.is_finite() && v > 0.0, path, || {
        format!("must be a positive finite number, got {v}")
    })
}

fn finite(v: f64, path: &str) -> Checked {
    check(v.is_finite(), path, || format!("must be finite, got {v}"))
}

fn gamma(v: f64, path: &str) -> Checked {
    check(v.is_finite() && v > 1.0 && v <= 20.0, path, || {
        format!("must lie in (1, 20], got {v}")
    })
}

fn decreasing_steps(v: &[f64], path: &str) -> Checked {
    check(v.len() >= 2, path, || "needs at least two steps".into())?;
    for (i, x) in v.iter().enumerate() {
        positive(*x, &format!("{path}[{i}]"))?;
    }
    check(v.windows(2).all(|w| w[1] < w[0]), path, || {
        "steps must be strictly decreasing".into()
    })
}

fn increasing_sizes(v: &[usize], min: usize, max: usize, path: &str) -> Checked {
    check(v.len() >= 2, path, || "needs at least two resolutions".into())?;
    for (i, n) in v.iter().enumerate() {
        check(*n >= min && *n <= max, &format!("{path}[{i}]"), || {
            format!("must lie in [{min}, {max}], got {n}")
        })?;
    }
    check(v.windows(2).all(|w| w[1] > w[0]), path, || {
        "resolutions must be strictly increasing".into()
    })
}

impl AffineParams {
    fn validate(&self) -> Checked {
        gamma(self.gamma, "affine.gamma")?;
        for (name, m) in [("a_initial", &self.a_initial), ("adot_initial", &self.adot_initial)] {
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    finite(*v, &format!("affine.{name}[{i}][{j}]"))?;
                }
            }
        }
        let a = vacuumlab::Mat3::new(self.a_initial);
        check(a.det() > 0.0, "affine.a_initial", || {
            format!("must have positive determinant, got {}", a.det())
        })?;
        positive(self.t_end, "affine.t_end")?;
        positive(self.dt, "affine.dt")?;
        check(self.dt <= self.t_end, "affine.dt", || {
            format!("must not exceed t_end = {}", self.t_end)
        })?;
        check(self.t_end / self.dt <= 1e7, "affine.dt", || {
            "more than 10^7 output samples".into()
        })?;
        positive(self.rtol, "affine.rtol")?;
        positive(self.atol, "affine.atol")?;
        positive(self.fit_t_start, "affine.fit_t_start")?;
        check(self.fit_t_start < self.t_end, "affine.fit_t_start", || {
            format!("must be below t_end = {}", self.t_end)
        })?;
        finite(self.det_exponent_expected, "affine.det_exponent_expected")?;
        positive(self.det_exponent_tolerance, "affine.det_exponent_tolerance")
    }
}

impl Euler1dParams {
    fn validate(&self) -> Checked {
        gamma(self.gamma, "euler1d.gamma")?;
        check(
            (4..=1024).contains(&self.n_nodes),
            "euler1d.n_nodes",
            || format!("must lie in [4, 1024], got {}", self.n_nodes),
        )?;
        if let Some(dt) = self.dt {
            positive(dt, "euler1d.dt")?;
        }
        check(
            self.cfl > 0.0 && self.cfl <= 1.0,
            "euler1d.cfl",
            || format!("must lie in (0, 1], got {}", self.cfl),
        )?;
        positive(self.t_end, "euler1d.t_end")?;
        check(
            self.alphadot_initial.is_finite() && self.alphadot_initial >= 0.0,
            "euler1d.alphadot_initial",
            || format!("must be finite and non-negative, got {}", self.alphadot_initial),
        )?;
        finite(self.perturbation.amplitude, "euler1d.perturbation.amplitude")?;
        check(
            (1..=256).contains(&self.perturbation.mode),
            "euler1d.perturbation.mode",
            || format!("must lie in [1, 256], got {}", self.perturbation.mode),
        )?;
        check(self.output_every_steps >= 1, "euler1d.output_every_steps", || {
            "must be at least 1".into()
        })?;
        check(
            self.energy_growth_limit.is_finite() && self.energy_growth_limit >= 1.0,
            "euler1d.energy_growth_limit",
            || format!("must be at least 1, got {}", self.energy_growth_limit),
        )?;
        check(
            self.decay_fraction > 0.0 && self.decay_fraction <= 1.0,
            "euler1d.decay_fraction",
            || format!("must lie in (0, 1], got {}", self.decay_fraction),
        )?;
        check(self.energy_budget > 0.0, "euler1d.energy_budget", || {
            format!("must be positive, got {}", self.energy_budget)
        })?;
        if let Some(p) = self.velocity_alpha_power {
            finite(p, "euler1d.velocity_alpha_power")?;
        }
        Ok(())
    }
}

impl Geom3dParams {
    fn validate(&self) -> Checked {
        check(!self.checks.is_empty(), "geom3d.checks", || {
            "needs at least one check".into()
        })?;
        check(
            (1..=1000).contains(&self.n_fields),
            "geom3d.n_fields",
            || format!("must lie in [1, 1000], got {}", self.n_fields),
        )?;
        check(
            (1..=100).contains(&self.piola_fields),
            "geom3d.piola_fields",
            || format!("must lie in [1, 100], got {}", self.piola_fields),
        )?;
        check(
            (1..=10_000).contains(&self.points_per_field),
            "geom3d.points_per_field",
            || format!("must lie in [1, 10000], got {}", self.points_per_field),
        )?;
        check(
            (16..=256).contains(&self.resolution) && self.resolution % 4 == 0,
            "geom3d.resolution",
            || format!("must be a multiple of 4 in [16, 256], got {}", self.resolution),
        )?;
        check(
            self.half_width > 0.0 && self.half_width <= 0.55,
            "geom3d.half_width",
            || format!("must lie in (0, 0.55] so the cube stays inside the ball, got {}", self.half_width),
        )?;
        decreasing_steps(&self.time_dts, "geom3d.time_dts")?;
        decreasing_steps(&self.curl_dts, "geom3d.curl_dts")?;
        check(
            self.curl_epsilon > 0.0 && self.curl_epsilon <= 1.0,
            "geom3d.curl_epsilon",
            || format!("must lie in (0, 1], got {}", self.curl_epsilon),
        )?;
        positive(self.curl_t_end, "geom3d.curl_t_end")?;
        check(
            self.curl_dts[0] <= self.curl_t_end,
            "geom3d.curl_dts[0]",
            || format!("must not exceed curl_t_end = {}", self.curl_t_end),
        )
    }
}

impl WeightsParams {
    fn validate(&self) -> Checked {
        gamma(self.gamma, "weights.gamma")?;
        check(!self.hardy_orders.is_empty(), "weights.hardy_orders", || {
            "needs at least one order".into()
        })?;
        for (i, k) in self.hardy_orders.iter().enumerate() {
            check((1..=4).contains(k), &format!("weights.hardy_orders[{i}]"), || {
                format!("must lie in [1, 4], got {k}")
            })?;
        }
        increasing_sizes(&self.hardy_resolutions, 8, 512, "weights.hardy_resolutions")?;
        increasing_sizes(&self.constant_resolutions, 8, 512, "weights.constant_resolutions")?;
        increasing_sizes(&self.embedding_resolutions, 8, 512, "weights.embedding_resolutions")?;
        check(self.embedding_k <= 6, "weights.embedding_k", || {
            format!("must not exceed 6, got {}", self.embedding_k)
        })?;
        check(self.embedding_r <= self.embedding_k, "weights.embedding_r", || {
            format!("must not exceed embedding_k = {}", self.embedding_k)
        })?;
        check(
            self.embedding_s.is_finite() && self.embedding_s >= 0.0,
            "weights.embedding_s",
            || format!("must be finite and non-negative, got {}", self.embedding_s),
        )?;
        check(
            (8..=512).contains(&self.mollifier_nodes),
            "weights.mollifier_nodes",
            || format!("must lie in [8, 512], got {}", self.mollifier_nodes),
        )?;
        check(!self.mollifier_log_kappas.is_empty(), "weights.mollifier_log_kappas", || {
            "needs at least one value".into()
        })?;
        for (i, m) in self.mollifier_log_kappas.iter().enumerate() {
            check(
                m.is_finite() && *m > 1.5 && *m <= 50.0,
                &format!("weights.mollifier_log_kappas[{i}]"),
                || format!("must lie in (1.5, 50] so that kappa < e^(-3/2), got {m}"),
            )?;
        }
        positive(self.step_width, "weights.step_width")
    }
}

impl ScenarioConfig {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            output_dir: None,
            deterministic: true,
            affine: None,
            euler1d: None,
            geom3d: None,
            weights: None,
        }
        .normalized()
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            ConfigError::new(String::new(), msg)
        })?;
        cfg.validate()?;
        Ok(cfg.normalized())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Fills the table of the configured kind with defaults.
    pub fn normalized(mut self) -> Self {
        match self.kind {
            Kind::Affine => {
                self.affine.get_or_insert_with(Default::default);
            }
            Kind::Euler1d => {
                self.euler1d.get_or_insert_with(Default::default);
            }
            Kind::Geom3dSuite => {
                self.geom3d.get_or_insert_with(Default::default);
            }
            Kind::WeightsSuite => {
                self.weights.get_or_insert_with(Default::default);
            }
        }
        self
    }

    pub fn validate(&self) -> Checked {
        let present = [
            ("affine", self.affine.is_some()),
            ("euler1d", self.euler1d.is_some()),
            ("geom3d", self.geom3d.is_some()),
            ("weights", self.weights.is_some()),
        ];
        for (table, is_set) in present {
            check(!is_set || table == self.kind.table(), table, || {
                format!(
                    "table does not apply to kind `{}` (expected `[{}]`)",
                    self.kind.name(),
                    self.kind.table()
                )
            })?;
        }
        if let Some(p) = &self.affine {
            p.validate()?;
        }
        if let Some(p) = &self.euler1d {
            p.validate()?;
        }
        if let Some(p) = &self.geom3d {
            p.validate()?;
        }
        if let Some(p) = &self.weights {
            p.validate()?;
        }
        Ok(())
    }

    /// SHA-256 of the normalized config without its output location.
    pub fn hash(&self) -> String {
        let mut c = self.clone().normalized();
        c.output_dir = None;
        let digest = Sha256::digest(c.to_toml().as_bytes());
        format!("{digest:x}")
    }

    /// Copy with the dotted field `axis` set to `value`; the result is re-validated.
    pub fn with_field(&self, axis: &str, value: &str) -> std::result::Result<Self, ConfigError> {
        let mut tree = toml::Value::try_from(self.clone().normalized())
            .map_err(|e| ConfigError::new("", e.to_string()))?;
        let parts: Vec<&str> = axis.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(ConfigError::new(axis, "empty path segment"));
        }
        let (leaf, parents) = parts.split_last().expect("split yields one part");
        let mut node = &mut tree;
        for p in parents {
            node = node
                .get_mut(*p)
                .filter(|v| v.is_table())
                .ok_or_else(|| ConfigError::new(axis, format!("no table `{p}` in the config")))?;
        }
        let table = node.as_table_mut().expect("checked above");
        let parsed = parse_scalar(value);
        table.insert(leaf.to_string(), parsed);
        let text = toml::to_string(&tree).map_err(|e| ConfigError::new(axis, e.to_string()))?;
        let out: Self = toml::from_str(&text)
            .map_err(|e| ConfigError::new(axis, format!("cannot set to {value}: {}", e.message())))?;
        out.validate()?;
        Ok(out.normalized())
    }
}

fn parse_scalar(v: &str) -> toml::Value {
    let v = v.trim();
    if let Ok(i) = v.parse::<i64>() {
        toml::Value::Integer(i)
    } else if let Ok(f) = v.parse::<f64>() {
        toml::Value::Float(f)
    } else if let Ok(b) = v.parse::<bool>() {
        toml::Value::Boolean(b)
    } else {
        toml::Value::String(v.to_string())
    }
}
