//! Report documents and their JSON, CSV and text renderings.
//!
//! The JSON document is versioned by [`SCHEMA_VERSION`]. Every feature block
//! records the inputs its parameters were computed from, so a consumer can
//! recompute `params` from `inputs` alone.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::brep::{EdgeId, FaceId, Solid, UnitVector};
use crate::classify::EdgeClass;
use crate::features::{FaceRole, FeatureKind};
use crate::params::{FeatureReport, ProcessParameters, Settings};
use crate::pipeline::{Analysis, AnalysisError, LoadedModel};
use crate::resources::{MaterialSpec, ToolSpec};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "feature,kind,t,n_CEE,n_CIE,n_IIE,TLIIEs,TLCIEs,TLCEEs,h,Fs,Fd,Fh,H1,H2,capacity_ok";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub part: String,
    pub metrics: MetricsBlock,
    pub material: MaterialSpec,
    pub tool: ToolSpec,
    pub settings: Settings,
    pub features: Vec<FeatureBlock>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsBlock {
    pub t: f64,
    pub reference_face: FaceId,
    pub opposite_face: FaceId,
    pub reference_normal: UnitVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeEntry {
    pub edge: EdgeId,
    pub class: EdgeClass,
    pub length: f64,
}

/// Everything the force and travel formulas consume.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inputs {
    pub t: f64,
    pub h: Option<f64>,
    #[serde(rename = "n_CEE")]
    pub n_cee: usize,
    #[serde(rename = "n_CIE")]
    pub n_cie: usize,
    #[serde(rename = "n_IIE")]
    pub n_iie: usize,
    #[serde(rename = "TLIIEs")]
    pub tl_iie: f64,
    #[serde(rename = "TLCIEs")]
    pub tl_cie: f64,
    #[serde(rename = "TLCEEs")]
    pub tl_cee: f64,
    pub shear_stress: f64,
    pub yield_stress: f64,
    #[serde(rename = "Kd")]
    pub kd: f64,
    pub h1_fraction: f64,
    pub holding_fraction: f64,
    pub max_force: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureBlock {
    pub feature: usize,
    pub kind: FeatureKind,
    pub member_faces: Vec<FaceId>,
    pub edges: Vec<EdgeEntry>,
    pub inputs: Inputs,
    /// "ok" or "error".
    pub status: &'static str,
    pub params: Option<ProcessParameters>,
    pub capacity_ok: Option<bool>,
    pub error: Option<String>,
}

impl FeatureBlock {
    pub fn is_ok(&self) -> bool {
        self.params.is_some()
    }
}

impl ReportDocument {
    pub fn new(
        part: &str,
        analysis: &Analysis,
        reports: &[FeatureReport],
        mat: &MaterialSpec,
        tool: &ToolSpec,
        settings: &Settings,
        warnings: Vec<String>,
    ) -> Self {
        let features = analysis
            .features
            .iter()
            .zip(reports)
            .map(|(fa, r)| FeatureBlock {
                feature: r.feature,
                kind: r.kind,
                member_faces: fa.feature.member_faces.iter().copied().collect(),
                edges: fa.edges.iter().map(|&(edge, class, length)| EdgeEntry { edge, class, length }).collect(),
                inputs: Inputs {
                    t: r.t,
                    h: r.h,
                    n_cee: r.totals.n_cee,
                    n_cie: r.totals.n_cie,
                    n_iie: r.totals.n_iie,
                    tl_iie: r.totals.tl_iie,
                    tl_cie: r.totals.tl_cie,
                    tl_cee: r.totals.tl_cee,
                    shear_stress: mat.shear_stress,
                    yield_stress: mat.yield_stress,
                    kd: r.kd,
                    h1_fraction: settings.h1_fraction,
                    holding_fraction: settings.holding_fraction,
                    max_force: tool.max_force,
                },
                status: if r.result.is_ok() { "ok" } else { "error" },
                params: r.result.as_ref().ok().copied(),
                capacity_ok: r.capacity_ok,
                error: r.result.as_ref().err().map(|e| e.to_string()),
            })
            .collect();
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            part: part.to_string(),
            metrics: MetricsBlock {
                t: analysis.metrics.thickness,
                reference_face: analysis.metrics.reference_face,
                opposite_face: analysis.metrics.opposite_face,
                reference_normal: analysis.metrics.reference_normal,
            },
            material: mat.clone(),
            tool: tool.clone(),
            settings: *settings,
            features,
            warnings,
        }
    }

    /// Pretty JSON with a trailing newline; key order is fixed.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for f in &self.features {
            let i = &f.inputs;
            let _ = write!(
                out,
                "{},{},{:.3},{},{},{},{:.3},{:.3},{:.3},{},",
                f.feature,
                f.kind.as_str(),
                i.t,
                i.n_cee,
                i.n_cie,
                i.n_iie,
                i.tl_iie,
                i.tl_cie,
                i.tl_cee,
                i.h.map(|h| format!("{h:.3}")).unwrap_or_default()
            );
            match (&f.params, f.capacity_ok) {
                (Some(p), Some(ok)) => {
                    let _ = writeln!(out, "{:.0},{:.0},{:.0},{:.3},{:.3},{ok}", p.fs, p.fd, p.fh, p.h1, p.h2);
                }
                _ => out.push_str(",,,,,\n"),
            }
        }
        out
    }

    /// Fixed-width table for terminals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "part {}  t = {:.3} mm  reference face {}  material {}  tool {}",
            self.part, self.metrics.t, self.metrics.reference_face, self.material.name, self.tool.name
        );
        if self.features.is_empty() {
            out.push_str("no features\n");
        } else {
            let _ = writeln!(
                out,
                "{:>4} {:<6} {:>5} {:>5} {:>5} {:>9} {:>9} {:>9} {:>8} {:>9} {:>9} {:>9} {:>7} {:>8}  capacity",
                "feat", "kind", "n_CEE", "n_CIE", "n_IIE", "TLIIEs", "TLCIEs", "TLCEEs", "h", "Fs", "Fd", "Fh", "H1", "H2"
            );
            for f in &self.features {
                let i = &f.inputs;
                let h = i.h.map(|h| format!("{h:.3}")).unwrap_or_else(|| "-".into());
                let _ = write!(
                    out,
                    "{:>4} {:<6} {:>5} {:>5} {:>5} {:>9.3} {:>9.3} {:>9.3} {:>8}",
                    f.feature,
                    f.kind.as_str(),
                    i.n_cee,
                    i.n_cie,
                    i.n_iie,
                    i.tl_iie,
                    i.tl_cie,
                    i.tl_cee,
                    h
                );
                match (&f.params, f.capacity_ok, &f.error) {
                    (Some(p), Some(ok), _) => {
                        let _ = writeln!(
                            out,
                            " {:>9.0} {:>9.0} {:>9.0} {:>7.3} {:>8.3}  {}",
                            p.fs,
                            p.fd,
                            p.fh,
                            p.h1,
                            p.h2,
                            if ok { "ok" } else { "exceeded" }
                        );
                    }
                    (_, _, Some(e)) => {
                        let _ = writeln!(out, "  error: {e}");
                    }
                    _ => out.push('\n'),
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

/// Feature listing: kind, member faces, classified edges and height.
pub fn features_listing(analysis: &Analysis) -> String {
    let mut out = String::new();
    let m = &analysis.metrics;
    let _ = writeln!(out, "t = {:.3} mm, reference face {} (opposite {})", m.thickness, m.reference_face, m.opposite_face);
    if analysis.features.is_empty() {
        out.push_str("no features\n");
        return out;
    }
    for f in &analysis.features {
        let faces = if f.feature.member_faces.is_empty() {
            "none".to_string()
        } else {
            f.feature.member_faces.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(", ")
        };
        let _ = writeln!(out, "feature {} ({}): faces {}", f.feature.id, f.feature.kind.as_str(), faces);
        for (e, class, len) in &f.edges {
            let _ = writeln!(out, "  edge {e:>4}  {class}  {len:.3}");
        }
        let t = &f.totals;
        let _ = writeln!(
            out,
            "  totals: {} CEE {:.3}, {} CIE {:.3}, {} IIE {:.3}",
            t.n_cee, t.tl_cee, t.n_cie, t.tl_cie, t.n_iie, t.tl_iie
        );
        match &f.height {
            Ok(h) => {
                let _ = writeln!(out, "  h = {h:.3}");
            }
            Err(e) => {
                let _ = writeln!(out, "  h unavailable: {e}");
            }
        }
    }
    out
}

/// Diagnostic text for `inspect`: entity counts, face table, sheet metrics
/// and manifold report.
pub fn inspect_listing(model: &LoadedModel, analysis: &Result<Analysis, AnalysisError>) -> String {
    let s: &Solid = &model.solid;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "part {}: {} faces, {} edges, {} vertices",
        s.name(),
        s.face_count(),
        s.edge_count(),
        s.vertex_count()
    );
    if let Some(counts) = &model.entity_counts {
        out.push_str("entities:\n");
        for (k, n) in counts {
            let _ = writeln!(out, "  {k:<40} {n}");
        }
    }
    let roles = analysis.as_ref().ok().map(|a| &a.pairing);
    let rf: BTreeSet<FaceId> =
        analysis.as_ref().map(|a| [a.metrics.reference_face, a.metrics.opposite_face].into()).unwrap_or_default();
    out.push_str("faces:\n");
    for f in s.faces() {
        let area = s.surface_area(f.id).ok().flatten().map(|a| format!("{a:.3}")).unwrap_or_else(|| "-".into());
        let role = match roles.and_then(|p| p.role(f.id)) {
            Some(FaceRole::ReferencePair) if rf.first() == Some(&f.id) => "reference".to_string(),
            Some(FaceRole::ReferencePair) => "reference pair".to_string(),
            Some(FaceRole::Wall { pair }) => format!("wall (pair {pair})"),
            Some(FaceRole::Bend { pair }) => format!("bend (pair {pair})"),
            Some(FaceRole::SideFace) => "side".to_string(),
            None => String::new(),
        };
        let _ = writeln!(out, "  {:>6} {:<8} area {:>12}  {}", f.id, f.surface.kind_name(), area, role);
    }
    match analysis {
        Ok(a) => {
            let _ = writeln!(out, "thickness {:.3} mm", a.metrics.thickness);
            let _ = writeln!(out, "reference face {}", a.metrics.reference_face);
            out.push_str("manifold: ok\n");
        }
        Err(AnalysisError::Invalid(v)) => {
            let _ = writeln!(out, "manifold: {} violation(s)", v.len());
            for x in v {
                let _ = writeln!(out, "  {x}");
            }
        }
        Err(e) => {
            out.push_str("manifold: ok\n");
            let _ = writeln!(out, "recognition failed: {e}");
        }
    }
    for w in &model.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::parts;
    use crate::params::build_report;
    use crate::pipeline::analyze;
    use crate::resources::{MaterialDb, ToolDb};

    fn doc(s: &Solid, settings: Settings) -> ReportDocument {
        let a = analyze(s).unwrap();
        let mat = MaterialDb::builtin().get("low_carbon_steel").unwrap().clone();
        let tool = ToolDb::builtin().get("punching_press").unwrap().clone();
        let r = build_report(&a.feature_inputs(), &a.metrics, &mat, &tool, &settings);
        ReportDocument::new(s.name(), &a, &r, &mat, &tool, &settings, vec![])
    }

    #[test]
    fn bridge_csv_row() {
        let csv = doc(&parts::bridge(), Settings::default()).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("1,mixed,2.000,0,2,2,100.000,60.000,0.000,10.000,20000,8400,4000,0.667,9.333,true")
        );
    }

    #[test]
    fn json_is_stable() {
        let a = doc(&parts::offset_tab(), Settings::default()).to_json();
        let b = doc(&parts::offset_tab(), Settings::default()).to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["features"][0]["params"]["Fs"], 26000.0);
    }

    #[test]
    fn flat_sheet_lists_no_features() {
        let a = analyze(&parts::flat_sheet(100.0, 80.0, 2.0)).unwrap();
        assert!(features_listing(&a).contains("no features"));
    }
}
