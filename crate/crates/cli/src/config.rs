//! Run configuration: one TOML file with a section per parameter group.
//!
//! ```toml
//! field = "full3"
//!
//! [model.production]
//! A = 1.0
//! a_K = 0.5
//! # ...
//!
//! [integrator]
//! t_end = 2000.0
//! ```

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rescycle_core::analysis::{BranchSelector, Control, Criterion, SweepSpec};
use rescycle_core::kaldor::{self, SplitKind};
use rescycle_core::{Field, FieldKind, IntegratorSettings, ModelParams, SolowParams, VdpParams};

use crate::error::{CliError, Result};

/// Environment variable naming the output directory when neither `--out`
/// nor `output.directory` is given.
pub const OUT_ENV: &str = "RESCYCLE_OUT";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        })
    }
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: None,
            formats: default_formats(),
        }
    }
}

fn all_splits() -> Vec<SplitKind> {
    SplitKind::ALL.to_vec()
}

fn default_samples() -> usize {
    kaldor::DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KaldorConfig {
    #[serde(default = "all_splits")]
    pub variants: Vec<SplitKind>,
    /// Capital levels at which curves are emitted. The smallest and largest
    /// also bound the requirement check. Defaults to 0.5 and 1.5 times the
    /// baseline capital.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for KaldorConfig {
    fn default() -> Self {
        KaldorConfig {
            variants: all_splits(),
            k_values: None,
            y_min: None,
            y_max: None,
            samples: default_samples(),
        }
    }
}

impl KaldorConfig {
    pub fn y_range(&self, params: &ModelParams) -> (f64, f64) {
        let (lo, hi) = kaldor::default_y_range(params);
        (self.y_min.unwrap_or(lo), self.y_max.unwrap_or(hi))
    }

    /// Sorted capital levels.
    pub fn k_values(&self, params: &ModelParams) -> Vec<f64> {
        let mut ks = self.k_values.clone().unwrap_or_else(|| {
            let k0 = rescycle_core::model::baseline_capital(params);
            vec![0.5 * k0, 1.5 * k0]
        });
        ks.sort_by(f64::total_cmp);
        ks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BisectConfig {
    pub control: Control,
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<Criterion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solow: Option<SolowParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vdp: Option<VdpParams>,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kaldor: Option<KaldorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisect: Option<BisectConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg = Self::from_toml(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let family = |present: bool, section: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "field `{}` needs a [{section}] section",
                    self.field
                )))
            }
        };
        match self.field {
            FieldKind::Solow => family(self.solow.is_some(), "solow")?,
            FieldKind::Vdp => family(self.vdp.is_some(), "vdp")?,
            _ => family(self.model.is_some(), "model")?,
        }
        let sections = [self.model.is_some(), self.solow.is_some(), self.vdp.is_some()];
        if sections.iter().filter(|s| **s).count() != 1 {
            return Err(CliError::Config(
                "exactly one of [model], [solow] and [vdp] may be given".into(),
            ));
        }

        self.integrator.validate()?;
        self.build_field()?;
        if let Some(init) = &self.initial_state {
            if init.len() != self.field.dim() {
                return Err(CliError::Config(format!(
                    "initial_state has {} components, field `{}` needs {}",
                    init.len(),
                    self.field,
                    self.field.dim()
                )));
            }
            if init.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config("initial_state must be finite".into()));
            }
        }

        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        if let Some(k) = &self.kaldor {
            if k.samples < 2 {
                return Err(CliError::Config("kaldor.samples must be at least 2".into()));
            }
            if k.variants.is_empty() {
                return Err(CliError::Config("kaldor.variants is empty".into()));
            }
            if let Some(ks) = &k.k_values {
                if ks.is_empty() || ks.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::Config(
                        "kaldor.k_values must be a non-empty list of numbers".into(),
                    ));
                }
            }
        }
        if let Some(b) = &self.bisect {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo < b.hi) {
                return Err(CliError::Config(format!(
                    "bisect bracket [{}, {}] is not increasing",
                    b.lo, b.hi
                )));
            }
        }
        Ok(())
    }

    pub fn build_field(&self) -> Result<Field> {
        let field = match self.field {
            FieldKind::Solow => Field::solow(self.solow.expect("validated"))?,
            FieldKind::Vdp => Field::vdp(self.vdp.expect("validated"))?,
            kind => Field::model(kind, self.model.expect("validated"))?,
        };
        Ok(field)
    }

    /// Model parameters, for verbs that only work with the growth model.
    pub fn model_params(&self, verb: &str) -> Result<ModelParams> {
        self.model
            .ok_or_else(|| CliError::Config(format!("`{verb}` needs a [model] section")))
    }

    /// Canonical serialization of the inputs, used to fingerprint outputs.
    pub fn fingerprint(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputConfig::default();
        serde_json::to_string(&canonical).unwrap_or_default()
    }
}

/// Output directory: `--out`, then `output.directory`, then the
/// environment variable, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(
    flag: Option<&Path>,
    config: &OutputConfig,
    env: Option<OsString>,
) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.directory.clone())
        .or_else(|| env.filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Parses `--criterion`: `trace-zero-at-branch[:<branch>]` (branch defaults
/// to `baseline`), `discriminant-zero` or `cycle-exists`.
pub fn parse_criterion(s: &str) -> Result<Criterion> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let bad = || CliError::Config(format!("unknown criterion `{s}`"));
    match (name, arg) {
        ("trace-zero-at-branch", branch) => Ok(Criterion::TraceZeroAtBranch {
            branch: match branch {
                Some(b) => b.parse::<BranchSelector>()?,
                None => BranchSelector::Baseline,
            },
        }),
        ("discriminant-zero", None) => Ok(Criterion::DiscriminantZero),
        ("cycle-exists", None) => Ok(Criterion::CycleExists),
        _ => Err(bad()),
    }
}
