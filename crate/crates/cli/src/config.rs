//! Run configuration: a TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    U1,
    Sun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// All fields zero.
    Zero,
    /// A single matter plane wave in mode `modes[0]`.
    FreeWave,
    /// Neutral particle/antiparticle pair with a smooth a₁ background (U(1)).
    Pair,
    /// Matter at rest in a smooth, seeded, non-commuting a₁ background.
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeKind {
    Smooth,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub sites: usize,
    pub spacing: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            sites: 64,
            spacing: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub modes: Vec<i64>,
    pub background: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            kind: InitialKind::Pair,
            amplitude: 0.1,
            modes: vec![2, -3],
            background: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionSection {
    pub dt: f64,
    pub steps: usize,
    pub cadence: usize,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        EvolutionSection {
            dt: 0.1,
            steps: 1600,
            cadence: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: String,
    pub snapshot: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("."),
            csv: "diagnostics.csv".into(),
            snapshot: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksConfig {
    /// Number of random gauge functions in the invariance study.
    pub gauge_functions: usize,
    pub gauge: GaugeKind,
    pub gauge_amplitude: f64,
    /// Refinement factor between the two resolutions.
    pub refine: usize,
    /// Largest acceptable fine-grid form-invariance defect.
    pub defect_budget: f64,
    pub algebraic_only: bool,
    /// Test hook: transform with the wrong sign of q. Must make checks fail.
    pub flip_coupling_sign: bool,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            gauge_functions: 20,
            gauge: GaugeKind::Smooth,
            gauge_amplitude: 0.5,
            refine: 2,
            defect_budget: 1e-2,
            algebraic_only: false,
            flip_coupling_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: Model,
    pub n: usize,
    pub q: f64,
    pub m: f64,
    pub seed: u64,
    pub lattice: LatticeConfig,
    pub initial: InitialConfig,
    pub evolution: EvolutionSection,
    pub output: OutputConfig,
    pub checks: ChecksConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::U1,
            n: 1,
            q: 0.5,
            m: 1.0,
            seed: 0,
            lattice: LatticeConfig::default(),
            initial: InitialConfig::default(),
            evolution: EvolutionSection::default(),
            output: OutputConfig::default(),
            checks: ChecksConfig::default(),
        }
    }
}

/// Values given on the command line; each replaces the file's value when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub refine: Option<usize>,
    pub algebraic_only: bool,
}

#[derive(Debug)]
pub enum ConfigError {
    Read(PathBuf, std::io::Error),
    Parse(String),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Read(p, e) => write!(f, "cannot read config {}: {e}", p.display()),
            ConfigError::Parse(msg) => write!(f, "invalid config: {msg}"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_path_buf(), e))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if let Some(k) = o.refine {
            self.checks.refine = k;
        }
        if o.algebraic_only {
            self.checks.algebraic_only = true;
        }
    }

    /// Checks everything that can be checked without building a lattice.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.model == Model::U1 && self.n != 1 {
            return bad(format!("model u1 requires n = 1, got n = {}", self.n));
        }
        if !(self.q.is_finite() && self.m.is_finite() && self.m >= 0.0) {
            return bad(format!("q = {} and m = {} must be finite with m >= 0", self.q, self.m));
        }
        if self.lattice.sites < 4 {
            return bad(format!(
                "lattice.sites = {} is below the minimum of 4",
                self.lattice.sites
            ));
        }
        if !(self.lattice.spacing.is_finite() && self.lattice.spacing > 0.0) {
            return bad(format!("lattice.spacing = {} must be positive", self.lattice.spacing));
        }
        let bound = 0.5 * self.lattice.spacing;
        if !(self.evolution.dt > 0.0 && self.evolution.dt <= bound) {
            return bad(format!(
                "evolution.dt = {} violates the CFL bound dt <= {bound}",
                self.evolution.dt
            ));
        }
        if self.evolution.cadence == 0 {
            return bad("evolution.cadence must be at least 1".into());
        }
        if self.checks.refine < 2 {
            return bad(format!("refine = {} must be at least 2", self.checks.refine));
        }
        if self.checks.gauge_functions == 0 {
            return bad("checks.gauge_functions must be at least 1".into());
        }
        let needs_modes = matches!(self.initial.kind, InitialKind::FreeWave | InitialKind::Pair);
        if needs_modes && self.initial.modes.is_empty() {
            return bad("initial.modes must name at least one mode".into());
        }
        if self.initial.kind == InitialKind::Pair {
            if self.n != 1 {
                return bad("initial.kind = \"pair\" needs n = 1".into());
            }
            if self.initial.modes.len() != 2 || self.initial.modes[0] == self.initial.modes[1] {
                return bad("initial.kind = \"pair\" needs two distinct modes".into());
            }
        }
        Ok(())
    }

    /// The effective configuration as TOML, for report headers.
    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}
