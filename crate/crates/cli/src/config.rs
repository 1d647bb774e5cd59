//! Run configuration, read from TOML.
//!
//! ```toml
//! n = 3
//! metric = "reference"            # or a [metric] table with a `kind`
//! resolution = 32
//! radii = [10, 20, 40, 80, 160]
//! checks = ["mass", "ricci"]
//! workers = 4
//! seed = 7
//!
//! [output]
//! dir = "reports"
//! name = "schwarzschild"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use hypmass::zoo::RadialProfile;

use crate::CliError;

pub const MIN_RESOLUTION: usize = 8;
pub const DEFAULT_RESOLUTION: usize = 32;
pub const DEFAULT_RADII: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Mass,
    Ricci,
    Invariance,
    Exactness,
    Expansion,
    Spin,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Mass => "mass",
            Check::Ricci => "ricci",
            Check::Invariance => "invariance",
            Check::Exactness => "exactness",
            Check::Expansion => "expansion",
            Check::Spin => "spin",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Table,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn table(self) -> bool {
        matches!(self, Format::Table | Format::Both)
    }
}

/// Metric to analyse. A bare string selects a zoo entry with default parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Reference {},
    AdsSchwarzschild {
        #[serde(default = "one")]
        mass: f64,
    },
    Trace {
        profile: RadialProfile,
        #[serde(default = "one")]
        r0: f64,
    },
    /// Conformally compact data file; relative paths resolve against the config file.
    Conformal {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

fn metric_entry<'de, D: Deserializer<'de>>(d: D) -> Result<MetricSpec, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Name(String),
        Table(toml::Table),
    }
    match Entry::deserialize(d)? {
        Entry::Name(name) => match name.as_str() {
            "reference" => Ok(MetricSpec::Reference {}),
            "ads_schwarzschild" => Ok(MetricSpec::AdsSchwarzschild { mass: 1.0 }),
            "trace" | "conformal" => {
                Err(serde::de::Error::custom(format!("metric `{}` needs a [metric] table with its parameters", name)))
            }
            other => Err(serde::de::Error::custom(format!("unknown metric `{}`", other))),
        },
        Entry::Table(t) => MetricSpec::deserialize(t).map_err(serde::de::Error::custom),
    }
}

/// Optional pushforward by a decaying boundary-tangent diffeomorphism applied
/// to the selected metric before any check runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffeoConfig {
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceConfig {
    /// Boost axis, `1 ≤ axis ≤ n − 1`.
    #[serde(default = "default_axis")]
    pub axis: usize,
    #[serde(default = "default_rapidity")]
    pub rapidity: f64,
    /// Amplitude of the diffeomorphism composed with the boost.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_axis() -> usize {
    1
}
fn default_rapidity() -> f64 {
    0.3
}
fn default_amplitude() -> f64 {
    0.5
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        Self { axis: default_axis(), rapidity: default_rapidity(), amplitude: default_amplitude() }
    }
}

/// Pass thresholds of the checks. Lowering one below what the numerics reach
/// makes the corresponding check fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Maximum fit residual relative to the largest mass component.
    pub mass_fit: f64,
    /// Relative change of the mass vector under an isometry.
    pub invariance: f64,
    pub exactness: f64,
    /// Allowed deviation of the log-log slope from 2.
    pub expansion_slope: f64,
    /// Spread of the charge/Ricci mass ratio across radii.
    pub calibration: f64,
    /// Largest Ricci-form mass accepted when the mass vanishes.
    pub ricci_zero: f64,
    pub clifford: f64,
    pub killing: f64,
    pub spin_pointwise: f64,
    pub spin_round_trip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mass_fit: 1e-3,
            invariance: 1e-2,
            exactness: 1e-5,
            expansion_slope: 0.1,
            calibration: 0.02,
            ricci_zero: 1e-6,
            clifford: 1e-12,
            killing: 1e-6,
            spin_pointwise: 1e-9,
            spin_round_trip: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(deserialize_with = "metric_entry")]
    pub metric: MetricSpec,
    #[serde(default)]
    pub diffeo: Option<DiffeoConfig>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub format: Format,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub invariance: InvarianceConfig,
    /// Like `format`, not echoed into reports so that runs writing to different places compare equal.
    #[serde(default, skip_serializing)]
    pub output: OutputConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}
fn default_radii() -> Vec<f64> {
    DEFAULT_RADII.to_vec()
}
fn default_checks() -> Vec<Check> {
    vec![Check::Mass]
}

impl RunConfig {
    /// Parses and validates; parse errors carry the line number.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.checks.sort();
        cfg.checks.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {}", path.display(), msg)),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::Config(format!("{}: {}", field, msg)));
        if self.n < 3 {
            return bad("n", format!("dimension must be at least 3, got {}", self.n));
        }
        if self.resolution < MIN_RESOLUTION {
            return bad("resolution", format!("must be at least {}, got {}", MIN_RESOLUTION, self.resolution));
        }
        if self.radii.len() < 3 {
            return bad("radii", format!("at least three radii are needed, got {}", self.radii.len()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("radii", "radii must be positive and finite".into());
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return bad("radii", "radii not increasing".into());
        }
        if self.checks.is_empty() {
            return bad("checks", "no checks selected".into());
        }
        if self.workers == Some(0) {
            return bad("workers", "must be at least 1".into());
        }
        if !(1..self.n).contains(&self.invariance.axis) {
            return bad(
                "invariance.axis",
                format!("boost axis must lie in 1..{}, got {}", self.n - 1, self.invariance.axis),
            );
        }
        if let MetricSpec::AdsSchwarzschild { mass } = self.metric {
            if !(mass >= 0.0 && mass.is_finite()) {
                return bad("metric.mass", format!("must be finite and non-negative, got {}", mass));
            }
        }
        if let Some(d) = &self.diffeo {
            if !d.amplitude.is_finite() {
                return bad("diffeo.amplitude", "must be finite".into());
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("mass_fit", t.mass_fit),
            ("invariance", t.invariance),
            ("exactness", t.exactness),
            ("expansion_slope", t.expansion_slope),
            ("calibration", t.calibration),
            ("ricci_zero", t.ricci_zero),
            ("clifford", t.clifford),
            ("killing", t.killing),
            ("spin_pointwise", t.spin_pointwise),
            ("spin_round_trip", t.spin_round_trip),
        ] {
            if !(v >= 0.0) {
                return bad(&format!("tolerances.{}", name), format!("must be non-negative, got {}", v));
            }
        }
        Ok(())
    }

    pub fn selected(&self, c: Check) -> bool {
        self.checks.contains(&c)
    }

    /// Directory and file stem of the report.
    pub fn output_target(&self) -> (PathBuf, String) {
        let dir = self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let name = self.output.name.clone().unwrap_or_else(|| "report".to_string());
        (dir, name)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}
