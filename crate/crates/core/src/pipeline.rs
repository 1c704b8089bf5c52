//! Load a model and run recognition and classification end to end.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::brep::{load_brep_json, EdgeId, SchemaError, Solid, Violation};
use crate::classify::{classify_reference_edges, totals, EdgeClass, EdgeClassTotals, EdgeClassification};
use crate::features::{
    compute_thickness, feature_height, group_features, pair_faces, select_reference_face, FacePairing,
    RecognitionError, SheetFeature, SheetMetrics,
};
use crate::params::FeatureInput;
use crate::step::{parse_exchange, resolve_brep_with_diagnostics, StepError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Step,
    BrepJson,
}

impl InputFormat {
    /// `.step`/`.stp` or `.json`, case-insensitive.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "step" | "stp" => Some(InputFormat::Step),
            "json" => Some(InputFormat::BrepJson),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub solid: Solid,
    /// Instance count per keyword; STEP input only.
    pub entity_counts: Option<BTreeMap<String, usize>>,
    pub warnings: Vec<String>,
}

pub fn load_model(text: &str, format: InputFormat) -> Result<LoadedModel, LoadError> {
    match format {
        InputFormat::BrepJson => Ok(LoadedModel { solid: load_brep_json(text)?, entity_counts: None, warnings: Vec::new() }),
        InputFormat::Step => {
            let xs = parse_exchange(text)?;
            let (solid, diag) = resolve_brep_with_diagnostics(&xs)?;
            let mut warnings = diag.warnings;
            if !diag.ignored.is_empty() {
                let names: Vec<&str> = diag.ignored.keys().map(String::as_str).collect();
                let n: usize = diag.ignored.values().sum();
                warnings.push(format!("ignored {n} record(s) of entities outside the geometry subset: {}", names.join(", ")));
            }
            Ok(LoadedModel { solid, entity_counts: Some(xs.keyword_counts()), warnings })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("solid is not a closed manifold ({} violation(s))", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Recognition(#[from] RecognitionError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureAnalysis {
    pub feature: SheetFeature,
    /// Ascending by edge id, with lengths in mm.
    pub edges: Vec<(EdgeId, EdgeClass, f64)>,
    pub totals: EdgeClassTotals,
    pub height: Result<f64, RecognitionError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub metrics: SheetMetrics,
    pub pairing: FacePairing,
    pub classification: EdgeClassification,
    pub features: Vec<FeatureAnalysis>,
}

impl Analysis {
    pub fn feature_inputs(&self) -> Vec<FeatureInput> {
        self.features
            .iter()
            .map(|f| FeatureInput { id: f.feature.id, kind: f.feature.kind, totals: f.totals, height: f.height.clone() })
            .collect()
    }
}

pub fn analyze(solid: &Solid) -> Result<Analysis, AnalysisError> {
    let violations = solid.validate_manifold();
    if !violations.is_empty() {
        return Err(AnalysisError::Invalid(violations));
    }
    let t = compute_thickness(solid)?;
    let metrics = select_reference_face(solid, t)?;
    let pairing = pair_faces(solid, &metrics)?;
    let features = group_features(solid, &pairing, &metrics)?;
    let classification = classify_reference_edges(solid, &metrics, &pairing, &features)?;
    let mut out = Vec::with_capacity(features.len());
    for feature in features {
        let list = classification.by_feature.get(&feature.id).cloned().unwrap_or_default();
        let edges = list
            .iter()
            .map(|&(e, c)| Ok((e, c, solid.edge_length(e)?)))
            .collect::<Result<Vec<_>, RecognitionError>>()?;
        out.push(FeatureAnalysis {
            totals: totals(&list, solid)?,
            height: feature_height(solid, &metrics, &feature),
            edges,
            feature,
        });
    }
    Ok(Analysis { metrics, pairing, classification, features: out })
}
