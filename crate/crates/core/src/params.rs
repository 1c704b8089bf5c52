//! Shearing, deformation and blank-holding forces and tool travel.

use serde::Serialize;
use thiserror::Error;

use crate::classify::EdgeClassTotals;
use crate::features::{FeatureKind, RecognitionError, SheetMetrics};
use crate::resources::{MaterialSpec, ToolSpec};

/// Share of the thickness the punch travels before the cut completes.
pub const DEFAULT_H1_FRACTION: f64 = 1.0 / 3.0;
/// Blank-holding force as a share of the larger working force.
pub const DEFAULT_HOLDING_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessParameters {
    /// Shearing force, N.
    #[serde(rename = "Fs")]
    pub fs: f64,
    /// Deformation force, N.
    #[serde(rename = "Fd")]
    pub fd: f64,
    /// Blank-holding force, N.
    #[serde(rename = "Fh")]
    pub fh: f64,
    /// Primary (shearing) travel, mm.
    #[serde(rename = "H1")]
    pub h1: f64,
    /// Secondary (forming) travel, mm.
    #[serde(rename = "H2")]
    pub h2: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("thickness {t} mm is not positive")]
    NonPositiveThickness { t: f64 },
    #[error("feature height {h} mm is not positive")]
    NonPositiveHeight { h: f64 },
    #[error("feature height {h} mm is below the shearing travel {h1} mm")]
    NegativeTravel { h: f64, h1: f64 },
    #[error("{what} must be a positive finite number, got {value}")]
    InvalidInput { what: &'static str, value: f64 },
}

/// Per-run knobs. `None` means the tool or recognised value is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub kd: Option<f64>,
    pub h1_fraction: f64,
    pub holding_fraction: f64,
    pub cut_height: Option<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self { kd: None, h1_fraction: DEFAULT_H1_FRACTION, holding_fraction: DEFAULT_HOLDING_FRACTION, cut_height: None }
    }
}

/// Fs = τ·t·TLIIEs, Fd = Kd·Ys·t·(TLCIEs + TLCEEs), Fh = 0.2·max(Fs, Fd);
/// H1 = t/3 and H2 = h − H1 when the feature has isolated interior edges,
/// otherwise H1 = 0 and H2 = h.
pub fn compute_process_parameters(
    tot: &EdgeClassTotals,
    t: f64,
    h: f64,
    mat: &MaterialSpec,
    kd: f64,
) -> Result<ProcessParameters, ParamsError> {
    compute_with(tot, t, h, mat, kd, DEFAULT_H1_FRACTION, DEFAULT_HOLDING_FRACTION)
}

pub fn compute_with(
    tot: &EdgeClassTotals,
    t: f64,
    h: f64,
    mat: &MaterialSpec,
    kd: f64,
    h1_fraction: f64,
    holding_fraction: f64,
) -> Result<ProcessParameters, ParamsError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(ParamsError::NonPositiveThickness { t });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(ParamsError::NonPositiveHeight { h });
    }
    for (what, value) in [("Kd", kd), ("h1 fraction", h1_fraction), ("holding fraction", holding_fraction)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(ParamsError::InvalidInput { what, value });
        }
    }
    let fs = mat.shear_stress * t * tot.tl_iie;
    let fd = kd * mat.yield_stress * t * (tot.tl_cie + tot.tl_cee);
    let fh = holding_fraction * fs.max(fd);
    let (h1, h2) = if tot.n_iie > 0 {
        let h1 = t * h1_fraction;
        if h < h1 {
            return Err(ParamsError::NegativeTravel { h, h1 });
        }
        (h1, h - h1)
    } else {
        (0.0, h)
    };
    Ok(ProcessParameters { fs, fd, fh, h1, h2 })
}

/// Whether the tool can deliver the working force plus the holding force.
pub fn capacity_ok(p: &ProcessParameters, tool: &ToolSpec) -> bool {
    tool.max_force == 0.0 || p.fs.max(p.fd) + p.fh <= tool.max_force
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error(transparent)]
    Recognition(#[from] RecognitionError),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

/// What a feature contributes to the calculation.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureInput {
    pub id: usize,
    pub kind: FeatureKind,
    pub totals: EdgeClassTotals,
    pub height: Result<f64, RecognitionError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureReport {
    pub feature: usize,
    pub kind: FeatureKind,
    pub t: f64,
    pub totals: EdgeClassTotals,
    /// Height used, if one could be determined.
    pub h: Option<f64>,
    pub kd: f64,
    pub material: String,
    pub tool: String,
    pub result: Result<ProcessParameters, FeatureError>,
    /// `None` when the parameters could not be computed.
    pub capacity_ok: Option<bool>,
}

/// One report per feature; a failing feature does not stop the others.
pub fn build_report(
    features: &[FeatureInput],
    metrics: &SheetMetrics,
    mat: &MaterialSpec,
    tool: &ToolSpec,
    settings: &Settings,
) -> Vec<FeatureReport> {
    let kd = settings.kd.unwrap_or(tool.force_coefficient);
    features
        .iter()
        .map(|f| {
            let height = match (f.kind, settings.cut_height) {
                (FeatureKind::Cut, Some(h)) => Ok(h),
                _ => f.height.clone(),
            };
            let result = height.clone().map_err(FeatureError::from).and_then(|h| {
                compute_with(&f.totals, metrics.thickness, h, mat, kd, settings.h1_fraction, settings.holding_fraction)
                    .map_err(FeatureError::from)
            });
            FeatureReport {
                feature: f.id,
                kind: f.kind,
                t: metrics.thickness,
                totals: f.totals,
                h: height.ok(),
                kd,
                material: mat.name.clone(),
                tool: tool.name.clone(),
                capacity_ok: result.as_ref().ok().map(|p| capacity_ok(p, tool)),
                result,
            }
        })
        .collect()
}
