use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use speedpower_core::data::{reference_vessel, FilterPolicy, WindScenario};
use speedpower_core::eval::MapeDenominator;
use speedpower_core::mlmodel::TrainConfig;
use speedpower_core::units::knots_to_ms;
use speedpower_core::waves::{TheoryRegistry, ValidityMode};
use speedpower_core::VesselParticulars;

pub const RUNCONFIG_SCHEMA: &str = "runconfig/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalmFitSettings {
    pub breakpoints: usize,
    /// Smallest segment the breakpoint search may produce. When unset it is
    /// a tenth of the calm-weather records, but never below
    /// [`MIN_SEGMENT_FLOOR`].
    pub min_segment: Option<usize>,
    pub smoothing_delta_kn: f64,
    /// Wave theory used to strip added resistance before fitting.
    pub correction_theory: String,
}

impl Default for CalmFitSettings {
    fn default() -> Self {
        Self {
            breakpoints: 1,
            min_segment: None,
            smoothing_delta_kn: 0.5,
            correction_theory: "kreitner-directional".into(),
        }
    }
}

pub const MIN_SEGMENT_FLOOR: usize = 20;

impl CalmFitSettings {
    pub fn min_segment_for(&self, n: usize) -> usize {
        self.min_segment.unwrap_or((n / 10).max(MIN_SEGMENT_FLOOR))
    }

    pub fn smoothing_delta(&self) -> f64 {
        knots_to_ms(self.smoothing_delta_kn)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSettings {
    pub k_folds: usize,
    pub bins: usize,
    pub mape_denominator: MapeDenominator,
    /// Theories scored by `benchmark`; empty means every registered one.
    pub theories: Vec<String>,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            k_folds: 5,
            bins: 12,
            mape_denominator: MapeDenominator::Predicted,
            theories: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolarSettings {
    pub h_s: f64,
    pub t_p: f64,
    pub stw_kn: f64,
    pub step_deg: f64,
}

impl Default for PolarSettings {
    fn default() -> Self {
        Self {
            h_s: 3.0,
            t_p: 9.0,
            stw_kn: 12.0,
            step_deg: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub schema: String,
    /// JSON file with vessel particulars; the bundled reference bulk
    /// carrier is used when absent.
    pub vessel_file: Option<PathBuf>,
    pub wind: WindScenario,
    /// Parametric response files registered as extra wave theories.
    pub response_files: Vec<PathBuf>,
    pub filter: FilterPolicy,
    pub calm_fit: CalmFitSettings,
    pub train: TrainConfig,
    pub eval: EvalSettings,
    pub polar: PolarSettings,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub strict_validity: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: RUNCONFIG_SCHEMA.into(),
            vessel_file: None,
            wind: WindScenario::default(),
            response_files: Vec::new(),
            filter: FilterPolicy::default(),
            calm_fit: CalmFitSettings::default(),
            train: TrainConfig::default(),
            eval: EvalSettings::default(),
            polar: PolarSettings::default(),
            out_dir: PathBuf::from("out"),
            seed: 0,
            strict_validity: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if cfg.schema != RUNCONFIG_SCHEMA {
            bail!(
                "config {}: expected schema `{RUNCONFIG_SCHEMA}`, found `{}`",
                path.display(),
                cfg.schema
            );
        }
        Ok(cfg)
    }

    /// Checks that every referenced file exists and the numeric settings
    /// make sense.
    pub fn validate(&self) -> Result<()> {
        let mut files: Vec<&Path> = self.response_files.iter().map(PathBuf::as_path).collect();
        files.extend(self.vessel_file.as_deref());
        files.extend(self.wind.kitamura_file.as_deref().map(Path::new));
        for f in files {
            ensure!(
                f.is_file(),
                "referenced file {} does not exist",
                f.display()
            );
        }
        ensure!(self.eval.k_folds >= 2, "eval.k_folds must be >= 2");
        ensure!(self.eval.bins >= 2, "eval.bins must be >= 2");
        ensure!(
            self.calm_fit.smoothing_delta_kn > 0.0,
            "calm_fit.smoothing_delta_kn must be > 0"
        );
        self.train.validate()?;
        Ok(())
    }

    pub fn vessel(&self) -> Result<VesselParticulars> {
        let v = match &self.vessel_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading vessel {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing vessel {}", path.display()))?
            }
            None => reference_vessel(),
        };
        v.validate()?;
        Ok(v)
    }

    pub fn registry(&self) -> Result<TheoryRegistry> {
        let mut reg = TheoryRegistry::with_builtins();
        for f in &self.response_files {
            reg.load_plugin(f)
                .with_context(|| format!("loading response file {}", f.display()))?;
        }
        Ok(reg)
    }

    pub fn validity_mode(&self) -> ValidityMode {
        if self.strict_validity {
            ValidityMode::Strict
        } else {
            ValidityMode::ExtrapolateWithFlag
        }
    }
}
