//! Declarative experiment configuration, read from JSON or TOML.
//!
//! Every field has a default. Defaults that depend on the potential family
//! are filled in by [`ExperimentConfig::resolve`], so the serialized form of
//! a resolved config is complete and can be fed back in unchanged.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use smoothreg_core::extrapolate::Abscissa;
use smoothreg_core::flow::ContinuityConfig;
use smoothreg_core::ode::OdeConfig;
use smoothreg_core::quadrature::QuadConfig;
use smoothreg_core::radial::Case;
use smoothreg_core::simulator::SimConfig;
use smoothreg_core::PotentialSpec;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Floats that may be infinite, written as `"inf"` in JSON.
mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    #[default]
    Logarithmic,
    Homogeneous { alpha: f64 },
}

impl PotentialConfig {
    pub fn spec(&self) -> Result<PotentialSpec, ConfigError> {
        match *self {
            PotentialConfig::Logarithmic => Ok(PotentialSpec::Logarithmic),
            PotentialConfig::Homogeneous { alpha } => {
                PotentialSpec::homogeneous(alpha).map_err(|e| ConfigError::Invalid(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// Collision orbit starting at rest inside the ball.
    Case1,
    /// Collision orbit entering the ball radially at its boundary.
    Case2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseConfig {
    pub kind: CaseKind,
    pub energy: Option<f64>,
    #[serde(with = "extended")]
    pub r_bar: f64,
}

impl Default for CaseConfig {
    fn default() -> Self {
        Self {
            kind: CaseKind::Case1,
            energy: None,
            r_bar: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub quad: f64,
    pub ode: f64,
    /// Budget for energy and angular momentum drift.
    pub drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad: 1e-10,
            ode: 1e-12,
            drift: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScheme {
    /// Diagonal and offset diagonals with `eps, l = 10^-k`.
    Decades,
    /// `eps = 0`, `l = 2^-k`.
    BinaryL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbscissaName {
    Power,
    InverseLog,
}

impl From<AbscissaName> for Abscissa {
    fn from(a: AbscissaName) -> Self {
        match a {
            AbscissaName::Power => Abscissa::Power,
            AbscissaName::InverseLog => Abscissa::InverseLog,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub scheme: Option<SweepScheme>,
    pub ks: Option<Vec<i32>>,
    pub abscissa: Option<AbscissaName>,
    /// Expected limit of the apsidal angle.
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PiConfig {
    pub xis: Vec<f64>,
    pub tol: f64,
}

impl Default for PiConfig {
    fn default() -> Self {
        Self {
            xis: vec![1.0001, 1.5, 2.0, 10.0, 1e6],
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub epsilons: Vec<f64>,
    pub samples: usize,
    pub tol: f64,
    pub r_max: f64,
    pub l_min: f64,
    pub l_max: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-2, 1e-4],
            samples: 1000,
            tol: 1e-9,
            r_max: 1.0,
            l_min: 1e-6,
            l_max: 1e-1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuityParams {
    pub ks: Vec<i32>,
    /// `T` as a multiple of the collision time.
    pub t_factor: f64,
    /// Direction of the position perturbation.
    pub dq_angle: f64,
    pub min_speed: f64,
    pub angle_tol: f64,
}

impl Default for ContinuityParams {
    fn default() -> Self {
        Self {
            ks: (2..=6).collect(),
            t_factor: 1.5,
            dq_angle: FRAC_PI_4,
            min_speed: 1e-8,
            angle_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectionParams {
    pub deltas: Vec<f64>,
    pub samples: usize,
    pub t_factor: f64,
}

impl Default for SectionParams {
    fn default() -> Self {
        Self {
            deltas: vec![1e-2, 1e-3, 1e-4],
            samples: 50,
            t_factor: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransmissionParams {
    /// Uniform output grid on `[0, 2 T0]`.
    pub samples: usize,
}

impl Default for TransmissionParams {
    fn default() -> Self {
        Self { samples: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationalParams {
    pub deltas: Vec<f64>,
    pub cells_log2: u32,
    /// `T1` as a fraction of the half span `T`.
    pub t1_factor: f64,
    pub dk_tol: f64,
}

impl Default for VariationalParams {
    fn default() -> Self {
        Self {
            deltas: vec![1e-2, 1e-3, 1e-4],
            cells_log2: 14,
            t1_factor: 0.5,
            dk_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrosscheckParams {
    pub kepler_cases: usize,
    pub kepler_tol: f64,
    pub orbits: usize,
    pub horizon: f64,
    pub period_tol: f64,
}

impl Default for CrosscheckParams {
    fn default() -> Self {
        Self {
            kepler_cases: 5,
            kepler_tol: 1e-6,
            orbits: 20,
            horizon: 100.0,
            period_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialConfig,
    pub case: CaseConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub output_dir: PathBuf,
    pub sweep: SweepConfig,
    pub pi_identity: PiConfig,
    pub audit: AuditConfig,
    pub continuity: ContinuityParams,
    pub section: SectionParams,
    pub transmission: TransmissionParams,
    pub variational: VariationalParams,
    pub crosscheck: CrosscheckParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            potential: PotentialConfig::default(),
            case: CaseConfig::default(),
            tolerances: Tolerances::default(),
            seed: 2024,
            jobs: 0,
            output_dir: PathBuf::from("smoothreg-out"),
            sweep: SweepConfig::default(),
            pi_identity: PiConfig::default(),
            audit: AuditConfig::default(),
            continuity: ContinuityParams::default(),
            section: SectionParams::default(),
            transmission: TransmissionParams::default(),
            variational: VariationalParams::default(),
            crosscheck: CrosscheckParams::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub tol_quad: Option<f64>,
    pub tol_ode: Option<f64>,
    pub xis: Option<Vec<f64>>,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn positive(name: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

fn decreasing_to_zero(name: &str, xs: &[f64]) -> Result<(), ConfigError> {
    if xs.is_empty() {
        return Err(invalid(format!("{name} is empty")));
    }
    if xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) || xs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid(format!("{name} must be positive and strictly decreasing, got {xs:?}")));
    }
    Ok(())
}

fn increasing_exponents(name: &str, ks: &[i32]) -> Result<(), ConfigError> {
    if ks.is_empty() || ks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid(format!("{name} must be strictly increasing, got {ks:?}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_str_with(text: &str, toml_syntax: bool, path: &Path) -> Result<Self, ConfigError> {
        let parsed = if toml_syntax {
            toml::from_str(text).map_err(|e| e.to_string())
        } else {
            serde_json::from_str(text).map_err(|e| e.to_string())
        };
        parsed.map_err(|message| ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Reads a config file; `.toml` files are TOML, anything else JSON.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let toml_syntax = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        Self::from_str_with(&text, toml_syntax, path)
    }

    /// Loads, applies overrides and resolves. `None` starts from defaults.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply(overrides);
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(jobs) = o.jobs {
            self.jobs = jobs;
        }
        if let Some(t) = o.tol_quad {
            self.tolerances.quad = t;
        }
        if let Some(t) = o.tol_ode {
            self.tolerances.ode = t;
        }
        if let Some(xis) = &o.xis {
            self.pi_identity.xis = xis.clone();
        }
    }

    /// Fills family-dependent defaults and validates.
    pub fn resolve(&mut self) -> Result<(), ConfigError> {
        let log = matches!(self.potential, PotentialConfig::Logarithmic);
        self.potential.spec()?;
        if self.case.energy.is_none() {
            self.case.energy = Some(match (self.case.kind, log) {
                (CaseKind::Case1, true) => 0.0,
                (CaseKind::Case2, true) => 1.0,
                (_, false) => -1.0,
            });
        }
        let scheme = *self.sweep.scheme.get_or_insert(if log { SweepScheme::Decades } else { SweepScheme::BinaryL });
        self.sweep.ks.get_or_insert_with(|| match scheme {
            SweepScheme::Decades => (2..=6).collect(),
            SweepScheme::BinaryL => (4..=14).collect(),
        });
        self.sweep.abscissa.get_or_insert(match scheme {
            SweepScheme::Decades => AbscissaName::InverseLog,
            SweepScheme::BinaryL => AbscissaName::Power,
        });
        let target = self.expected_limit();
        self.sweep.target.get_or_insert(target);
        self.validate()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.tolerances;
        positive("tolerances.quad", t.quad)?;
        positive("tolerances.ode", t.ode)?;
        positive("tolerances.drift", t.drift)?;
        let energy = self.case.energy.unwrap_or(f64::NAN);
        if !energy.is_finite() {
            return Err(invalid("case.energy must be finite"));
        }
        if !(self.case.r_bar > 0.0) {
            return Err(invalid(format!("case.r_bar must be positive, got {}", self.case.r_bar)));
        }
        if self.case.kind == CaseKind::Case2 && !self.case.r_bar.is_finite() {
            return Err(invalid("case2 needs a finite case.r_bar"));
        }
        if let Some(ks) = &self.sweep.ks {
            increasing_exponents("sweep.ks", ks)?;
        }
        if self.pi_identity.xis.is_empty() || self.pi_identity.xis.iter().any(|&x| !(x > 1.0)) {
            return Err(invalid("pi_identity.xis must be nonempty and above 1"));
        }
        positive("pi_identity.tol", self.pi_identity.tol)?;
        let a = &self.audit;
        decreasing_to_zero("audit.epsilons", &a.epsilons)?;
        positive("audit.tol", a.tol)?;
        positive("audit.r_max", a.r_max)?;
        positive("audit.l_min", a.l_min)?;
        if !(a.l_max > a.l_min && a.l_max.is_finite()) || a.samples == 0 {
            return Err(invalid("audit needs l_min < l_max and samples > 0"));
        }
        let c = &self.continuity;
        increasing_exponents("continuity.ks", &c.ks)?;
        positive("continuity.t_factor", c.t_factor)?;
        positive("continuity.min_speed", c.min_speed)?;
        positive("continuity.angle_tol", c.angle_tol)?;
        if !c.dq_angle.is_finite() {
            return Err(invalid("continuity.dq_angle must be finite"));
        }
        decreasing_to_zero("section.deltas", &self.section.deltas)?;
        positive("section.t_factor", self.section.t_factor)?;
        if self.section.samples == 0 {
            return Err(invalid("section.samples must be positive"));
        }
        if self.transmission.samples < 2 {
            return Err(invalid("transmission.samples must be at least 2"));
        }
        let v = &self.variational;
        decreasing_to_zero("variational.deltas", &v.deltas)?;
        if !(2..=24).contains(&v.cells_log2) {
            return Err(invalid("variational.cells_log2 must lie in 2..=24"));
        }
        if !(v.t1_factor > 0.0 && v.t1_factor < 1.0) {
            return Err(invalid("variational.t1_factor must lie in (0, 1)"));
        }
        positive("variational.dk_tol", v.dk_tol)?;
        let x = &self.crosscheck;
        positive("crosscheck.kepler_tol", x.kepler_tol)?;
        positive("crosscheck.horizon", x.horizon)?;
        positive("crosscheck.period_tol", x.period_tol)?;
        Ok(())
    }

    /// Limit of the collision-limit apsidal angle predicted for the family.
    pub fn expected_limit(&self) -> f64 {
        match self.potential {
            PotentialConfig::Logarithmic => std::f64::consts::FRAC_PI_2,
            PotentialConfig::Homogeneous { alpha } => std::f64::consts::PI / (2.0 - alpha),
        }
    }

    pub fn spec(&self) -> PotentialSpec {
        self.potential.spec().expect("validated potential")
    }

    pub fn case(&self) -> Case {
        let energy = self.case.energy.expect("resolved energy");
        match self.case.kind {
            CaseKind::Case1 => Case::Bounded {
                energy,
                r_bar: self.case.r_bar,
            },
            CaseKind::Case2 => Case::Unbounded {
                energy,
                r_bar: self.case.r_bar,
            },
        }
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig::with_rel_tol(self.tolerances.quad)
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig {
            ode: OdeConfig::with_tol(self.tolerances.ode),
            ..SimConfig::default()
        }
    }

    pub fn continuity_config(&self) -> ContinuityConfig {
        ContinuityConfig {
            sim: self.sim(),
            quad: self.quad(),
            min_speed: self.continuity.min_speed,
        }
    }

    /// Canonical JSON of the config, as written next to the reports.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hash of the config with the worker count and output directory
    /// cleared, since neither changes any result.
    pub fn sha256(&self) -> String {
        let mut c = self.clone();
        c.jobs = 0;
        c.output_dir = PathBuf::new();
        hex::encode(Sha256::digest(c.to_json().as_bytes()))
    }
}
