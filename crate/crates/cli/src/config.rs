//! Experiment configuration. All quantities are in model units (dimensionless).

use std::path::{Path, PathBuf};

use resonance_core::dynamics::{InvariantOptions, PotentialSpec, SearchOptions};
use resonance_core::spectral::{Case, QuantizationInput, SolverOptions, SyntheticRecord, WindowParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CaseChoice {
    I,
    II,
    #[default]
    #[serde(rename = "none")]
    None,
}

impl CaseChoice {
    pub fn case(self) -> Option<Case> {
        match self {
            CaseChoice::I => Some(Case::I),
            CaseChoice::II => Some(Case::II),
            CaseChoice::None => None,
        }
    }
}

/// Invariants supplied directly instead of computed from a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticInvariants {
    pub lambda1: f64,
    pub lambda2: f64,
    pub e0: f64,
    /// Zero-based index of the trajectory carrying `w`.
    #[serde(default)]
    pub perturbed: usize,
    pub records: Vec<SyntheticRecord<f64>>,
}

impl SyntheticInvariants {
    pub fn input(&self) -> Result<QuantizationInput<f64>> {
        let mut input = QuantizationInput::from_records(&self.records, self.lambda1, self.lambda2, self.e0)
            .map_err(|e| CliError::from_spectral("synthetic invariants", e))?;
        input.perturbed = self.perturbed;
        input.validate().map_err(|e| CliError::from_spectral("synthetic invariants", e))?;
        Ok(input)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HSelection {
    Explicit { values: Vec<f64> },
    /// Admissible set of the configured case, `j = 0..=j_max` (dyadic grid for case II).
    Case { j_max: usize },
    /// `h = base^{-m}` for `m = m_min..=m_max`.
    Geometric { base: f64, m_min: i32, m_max: i32 },
}

impl Default for HSelection {
    fn default() -> Self {
        HSelection::Geometric { base: 2.0, m_min: 7, m_max: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MuScanConfig {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    /// Imaginary part shared by all grid points.
    pub tau_im: f64,
}

impl Default for MuScanConfig {
    fn default() -> Self {
        Self { tau_min: -5.0, tau_max: 5.0, n_tau: 101, tau_im: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_invariants: Option<SyntheticInvariants>,
    #[serde(default)]
    pub case: CaseChoice,
    pub delta: f64,
    /// Unperturbed strip coefficient; `λ₁/4` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Maslov indices of the computed trajectories; zeros when empty.
    #[serde(default)]
    pub maslov: Vec<i32>,
    #[serde(default)]
    pub h_selection: HSelection,
    #[serde(default)]
    pub window: WindowParams,
    #[serde(default)]
    pub mu_scan: MuScanConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub search: SearchOptions<f64>,
    #[serde(default)]
    pub invariants: InvariantOptions<f64>,
    #[serde(default)]
    pub solver: SolverOptions<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn lambda1(&self) -> f64 {
        match (&self.potential, &self.synthetic_invariants) {
            (Some(p), _) => p.lambda1,
            (None, Some(s)) => s.lambda1,
            (None, None) => f64::NAN,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(self.lambda1() / 4.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Validation(m));
        match (&self.potential, &self.synthetic_invariants) {
            (Some(_), Some(_)) | (None, None) => {
                return bad("exactly one of `potential` and `synthetic_invariants` must be given".into())
            }
            (Some(p), None) => p.validate().map_err(|e| CliError::Validation(format!("potential: {e}")))?,
            (None, Some(s)) => {
                s.input()?;
            }
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return bad(format!("delta = {} must lie in (0, 1/2)", self.delta));
        }
        let alpha = self.alpha();
        if !(alpha > 0.0 && alpha < self.lambda1() / 2.0) {
            return bad(format!("alpha = {alpha} must lie in (0, lambda1/2)"));
        }
        self.window.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        match &self.h_selection {
            HSelection::Explicit { values } => check_h_values(values)?,
            HSelection::Case { .. } if self.case == CaseChoice::None => {
                return bad("h_selection kind `case` needs case I or II".into())
            }
            HSelection::Case { .. } => {}
            HSelection::Geometric { base, m_min, m_max } => {
                if !(*base > 1.0 && base.is_finite() && m_min <= m_max && *m_min >= 1) {
                    return bad("geometric h grid needs base > 1 and 1 <= m_min <= m_max".into());
                }
            }
        }
        let m = &self.mu_scan;
        if !(m.n_tau >= 1 && m.tau_min <= m.tau_max && m.tau_min.is_finite() && m.tau_max.is_finite()) {
            return bad("mu_scan needs n_tau >= 1 and tau_min <= tau_max".into());
        }
        Ok(())
    }
}

pub fn check_h_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::Validation("h list is empty".into()));
    }
    if let Some(h) = values.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
        return Err(CliError::Validation(format!("h = {h} must lie in (0, 1)")));
    }
    Ok(())
}
