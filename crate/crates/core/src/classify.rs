//! Reference-face edge taxonomy: common/isolated × exterior/interior.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::brep::{EdgeId, FaceId, Solid};
use crate::features::{FacePairing, FaceRole, RecognitionError, SheetFeature, SheetMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeClass {
    #[serde(rename = "CEE")]
    Cee,
    #[serde(rename = "IEE")]
    Iee,
    #[serde(rename = "CIE")]
    Cie,
    #[serde(rename = "IIE")]
    Iie,
}

impl EdgeClass {
    pub fn from_parts(exterior: bool, common: bool) -> Self {
        match (exterior, common) {
            (true, true) => EdgeClass::Cee,
            (true, false) => EdgeClass::Iee,
            (false, true) => EdgeClass::Cie,
            (false, false) => EdgeClass::Iie,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeClass::Cee => "CEE",
            EdgeClass::Iee => "IEE",
            EdgeClass::Cie => "CIE",
            EdgeClass::Iie => "IIE",
        }
    }

    pub fn is_exterior(&self) -> bool {
        matches!(self, EdgeClass::Cee | EdgeClass::Iee)
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-class counts and total lengths (mm).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EdgeClassTotals {
    #[serde(rename = "n_CEE")]
    pub n_cee: usize,
    #[serde(rename = "n_IEE")]
    pub n_iee: usize,
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
    #[serde(rename = "TLIEEs")]
    pub tl_iee: f64,
}

impl EdgeClassTotals {
    pub fn add(&mut self, class: EdgeClass, length: f64) {
        match class {
            EdgeClass::Cee => {
                self.n_cee += 1;
                self.tl_cee += length;
            }
            EdgeClass::Iee => {
                self.n_iee += 1;
                self.tl_iee += length;
            }
            EdgeClass::Cie => {
                self.n_cie += 1;
                self.tl_cie += length;
            }
            EdgeClass::Iie => {
                self.n_iie += 1;
                self.tl_iie += length;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.n_cee + self.n_iee + self.n_cie + self.n_iie
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EdgeClassification {
    /// Every reference-face edge and its class.
    pub edges: BTreeMap<EdgeId, EdgeClass>,
    /// Feature id → its edges, ascending by edge id.
    pub by_feature: BTreeMap<usize, Vec<(EdgeId, EdgeClass)>>,
    /// Outer-bound edges of the reference face.
    pub exterior: Vec<(EdgeId, EdgeClass)>,
}

/// Classifies every edge of the reference face and hands common edges to
/// the feature owning the adjacent wall or bend, isolated interior edges to
/// the feature owning their loop.
pub fn classify_reference_edges(
    solid: &Solid,
    metrics: &SheetMetrics,
    pairing: &FacePairing,
    features: &[SheetFeature],
) -> Result<EdgeClassification, RecognitionError> {
    let mut face_owner: BTreeMap<FaceId, usize> = BTreeMap::new();
    let mut loop_owner = BTreeMap::new();
    for f in features {
        face_owner.extend(f.member_faces.iter().map(|&m| (m, f.id)));
        loop_owner.extend(f.interior_loops.iter().map(|&l| (l, f.id)));
    }

    let rf = solid.face(metrics.reference_face)?;
    let mut out = EdgeClassification::default();
    for b in &rf.bounds {
        for oe in &solid.get_loop(b.loop_id)?.edges {
            let other = solid.other_face(oe.edge, rf.id)?;
            let role = pairing.role(other).unwrap_or(FaceRole::SideFace);
            if role == FaceRole::ReferencePair {
                return Err(RecognitionError::InconsistentTopology { edge: oe.edge });
            }
            let common = role.is_deformation();
            let class = EdgeClass::from_parts(b.outer, common);
            out.edges.insert(oe.edge, class);
            let owner = if common { face_owner.get(&other).copied() } else { loop_owner.get(&b.loop_id).copied() };
            if let Some(id) = owner {
                out.by_feature.entry(id).or_default().push((oe.edge, class));
            }
            if b.outer {
                out.exterior.push((oe.edge, class));
            }
        }
    }
    for list in out.by_feature.values_mut() {
        list.sort();
    }
    out.exterior.sort();
    Ok(out)
}

/// Sums lengths per class.
pub fn totals(feature_edges: &[(EdgeId, EdgeClass)], solid: &Solid) -> Result<EdgeClassTotals, RecognitionError> {
    let mut t = EdgeClassTotals::default();
    for &(e, class) in feature_edges {
        t.add(class, solid.edge_length(e)?);
    }
    Ok(t)
}
