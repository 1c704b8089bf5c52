//! Thickness, reference face, face pairing, feature grouping and height.

use std::collections::{BTreeMap, BTreeSet};

use geo::{Area, BooleanOps, Coord, LineString, Polygon};
use serde::Serialize;
use thiserror::Error;

use crate::brep::{
    BrepError, Face, FaceId, LoopId, PlaneFrame, Point3, Solid, SurfaceGeometry, UnitVector, ANGULAR_TOLERANCE,
    LINEAR_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecognitionError {
    #[error("no pair of same-kind faces with anti-parallel normals; not a sheet-metal solid")]
    NoParallelPairs,
    #[error("solid has no planar face")]
    NoPlanarFace,
    #[error("no face lies opposite reference face {face} at the sheet thickness")]
    NoOppositeFace { face: FaceId },
    #[error("face {face} has {} candidate partners at the sheet thickness: {}", candidates.len(), join(candidates))]
    AmbiguousPairing { face: FaceId, candidates: Vec<FaceId> },
    #[error("feature {feature} has no face parallel to the reference face; supply the height manually")]
    NoParallelFeatureFace { feature: usize },
    #[error("edge {edge} of the reference face borders the opposite reference face")]
    InconsistentTopology { edge: crate::brep::EdgeId },
    #[error(transparent)]
    Model(#[from] BrepError),
}

fn join(ids: &[FaceId]) -> String {
    ids.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SheetMetrics {
    pub thickness: f64,
    pub reference_face: FaceId,
    pub reference_normal: UnitVector,
    pub opposite_face: FaceId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum FaceRole {
    ReferencePair,
    Wall { pair: usize },
    Bend { pair: usize },
    SideFace,
}

impl FaceRole {
    /// Wall or Bend.
    pub fn is_deformation(&self) -> bool {
        matches!(self, FaceRole::Wall { .. } | FaceRole::Bend { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct FacePairing {
    pub roles: BTreeMap<FaceId, FaceRole>,
    /// Wall and bend pairs; pair ids index this list from 1.
    pub pairs: Vec<(FaceId, FaceId)>,
}

impl FacePairing {
    pub fn role(&self, face: FaceId) -> Option<FaceRole> {
        self.roles.get(&face).copied()
    }

    pub fn partner(&self, face: FaceId) -> Option<FaceId> {
        match self.role(face)? {
            FaceRole::Wall { pair } | FaceRole::Bend { pair } => {
                let (a, b) = self.pairs[pair - 1];
                Some(if a == face { b } else { a })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Formed,
    Cut,
    Mixed,
}

impl FeatureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureKind::Formed => "formed",
            FeatureKind::Cut => "cut",
            FeatureKind::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SheetFeature {
    pub id: usize,
    pub kind: FeatureKind,
    pub member_faces: BTreeSet<FaceId>,
    pub interior_loops: BTreeSet<LoopId>,
}

fn face_points(solid: &Solid, f: &Face) -> Result<Vec<Point3>, BrepError> {
    let mut pts = Vec::new();
    for b in &f.bounds {
        pts.extend(solid.loop_polyline(b.loop_id, 16)?);
    }
    Ok(pts)
}

/// Face outline projected into `frame`, holes included.
fn projected(solid: &Solid, f: &Face, frame: &PlaneFrame) -> Result<Polygon, BrepError> {
    let ring = |id: LoopId| -> Result<LineString, BrepError> {
        let pts = solid.loop_polyline(id, 16)?;
        Ok(pts.iter().map(|p| frame.project(p)).map(|[x, y]| Coord { x, y }).collect())
    };
    let mut outer = LineString::new(vec![]);
    let mut holes = Vec::new();
    for b in &f.bounds {
        if b.outer {
            outer = ring(b.loop_id)?;
        } else {
            holes.push(ring(b.loop_id)?);
        }
    }
    Ok(Polygon::new(outer, holes))
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.1.min(b.1) - a.0.max(b.0) > LINEAR_TOLERANCE
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Distance across an opposed pair, or `None` if the faces do not qualify.
///
/// Planes qualify when their outward normals are anti-parallel, each lies
/// behind the other and their outlines share area when projected onto each
/// other. Cylinders qualify when coaxial, one convex and one concave with
/// the convex one larger, and their axial extents overlap.
pub fn opposed_distance(solid: &Solid, a: &Face, b: &Face) -> Result<Option<f64>, BrepError> {
    match (a.surface, b.surface) {
        (SurfaceGeometry::Plane { origin: oa, .. }, SurfaceGeometry::Plane { origin: ob, .. }) => {
            let (na, nb) = (a.normal()?, b.normal()?);
            if !na.is_anti_parallel(&nb) {
                return Ok(None);
            }
            let d = (ob - oa).dot(&na.to_vec());
            if d > -LINEAR_TOLERANCE {
                return Ok(None);
            }
            let frame = PlaneFrame::new(oa, na);
            let pa: Vec<[f64; 2]> = face_points(solid, a)?.iter().map(|p| frame.project(p)).collect();
            let pb: Vec<[f64; 2]> = face_points(solid, b)?.iter().map(|p| frame.project(p)).collect();
            if !(0..2).all(|k| overlap(range(pa.iter().map(|p| p[k])), range(pb.iter().map(|p| p[k])))) {
                return Ok(None);
            }
            let shared = projected(solid, a, &frame)?.intersection(&projected(solid, b, &frame)?).unsigned_area();
            Ok((shared > LINEAR_TOLERANCE).then_some(-d))
        }
        (
            SurfaceGeometry::Cylinder { axis_point: pa, axis_dir: da, radius: ra },
            SurfaceGeometry::Cylinder { axis_point: pb, axis_dir: db, radius: rb },
        ) => {
            if !(da.is_parallel(&db) || da.is_anti_parallel(&db)) {
                return Ok(None);
            }
            let off = pb - pa;
            let radial = off - da * off.dot(&da.to_vec());
            if radial.norm() > LINEAR_TOLERANCE {
                return Ok(None);
            }
            let (convex, concave) = match (a.same_sense, b.same_sense) {
                (true, false) => (ra, rb),
                (false, true) => (rb, ra),
                _ => return Ok(None),
            };
            let gap = convex - concave;
            if gap <= LINEAR_TOLERANCE {
                return Ok(None);
            }
            let axial = |f: &Face| -> Result<(f64, f64), BrepError> {
                Ok(range(face_points(solid, f)?.iter().map(|p| (*p - pa).dot(&da.to_vec()))))
            };
            Ok(overlap(axial(a)?, axial(b)?).then_some(gap))
        }
        _ => Ok(None),
    }
}

/// Area used to rank faces: planar area, or developed area of a cylinder.
fn ranking_area(solid: &Solid, f: &Face) -> Result<f64, BrepError> {
    Ok(solid.surface_area(f.id)?.unwrap_or(0.0))
}

/// Minimum distance over all qualifying opposed face pairs.
pub fn compute_thickness(solid: &Solid) -> Result<f64, RecognitionError> {
    let faces: Vec<&Face> = solid.faces().collect();
    let mut best: Option<f64> = None;
    for (i, a) in faces.iter().enumerate() {
        for b in &faces[i + 1..] {
            if let Some(d) = opposed_distance(solid, a, b)? {
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
    }
    best.ok_or(RecognitionError::NoParallelPairs)
}

/// Largest planar face (smaller id on ties) and its opposite face.
pub fn select_reference_face(solid: &Solid, t: f64) -> Result<SheetMetrics, RecognitionError> {
    let mut planar = Vec::new();
    for f in solid.faces().filter(|f| f.is_planar()) {
        planar.push((solid.face_area(f.id)?, f));
    }
    let max = planar.iter().map(|(a, _)| *a).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * max.abs().max(1.0);
    let (_, rf) = planar.iter().find(|(a, _)| *a >= max - tol).ok_or(RecognitionError::NoPlanarFace)?;
    let mut opposite: Option<(f64, FaceId)> = None;
    for (area, f) in &planar {
        if let Some(d) = opposed_distance(solid, rf, f)? {
            if (d - t).abs() <= LINEAR_TOLERANCE && opposite.is_none_or(|(a, _)| *area > a + tol) {
                opposite = Some((*area, f.id));
            }
        }
    }
    let (_, opposite_face) = opposite.ok_or(RecognitionError::NoOppositeFace { face: rf.id })?;
    Ok(SheetMetrics { thickness: t, reference_face: rf.id, reference_normal: rf.normal()?, opposite_face })
}

/// Greedy pairing in descending area order. Planar pairs become walls,
/// cylindrical pairs bends; faces left over are side faces.
pub fn pair_faces(solid: &Solid, metrics: &SheetMetrics) -> Result<FacePairing, RecognitionError> {
    let mut pairing = FacePairing::default();
    pairing.roles.insert(metrics.reference_face, FaceRole::ReferencePair);
    pairing.roles.insert(metrics.opposite_face, FaceRole::ReferencePair);

    let mut order = Vec::new();
    for f in solid.faces() {
        if !pairing.roles.contains_key(&f.id) {
            order.push((ranking_area(solid, f)?, f));
        }
    }
    order.sort_by(|(a, fa), (b, fb)| b.total_cmp(a).then(fa.id.cmp(&fb.id)));

    for (_, f) in &order {
        if pairing.roles.contains_key(&f.id) {
            continue;
        }
        let mut candidates = Vec::new();
        for (_, g) in &order {
            if g.id == f.id || pairing.roles.contains_key(&g.id) {
                continue;
            }
            if let Some(d) = opposed_distance(solid, f, g)? {
                if (d - metrics.thickness).abs() <= LINEAR_TOLERANCE {
                    candidates.push(g.id);
                }
            }
        }
        match candidates.as_slice() {
            [] => {}
            [g] => {
                pairing.pairs.push((f.id.min(*g), f.id.max(*g)));
                let pair = pairing.pairs.len();
                let role = if f.is_planar() { FaceRole::Wall { pair } } else { FaceRole::Bend { pair } };
                pairing.roles.insert(f.id, role);
                pairing.roles.insert(*g, role);
            }
            _ => {
                candidates.sort();
                return Err(RecognitionError::AmbiguousPairing { face: f.id, candidates });
            }
        }
    }
    for f in solid.faces() {
        pairing.roles.entry(f.id).or_insert(FaceRole::SideFace);
    }
    Ok(pairing)
}

fn find(parent: &mut BTreeMap<FaceId, FaceId>, x: FaceId) -> FaceId {
    let p = parent[&x];
    if p == x {
        return x;
    }
    let root = find(parent, p);
    parent.insert(x, root);
    root
}

fn union(parent: &mut BTreeMap<FaceId, FaceId>, a: FaceId, b: FaceId) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent.insert(ra.max(rb), ra.min(rb));
    }
}

/// Groups wall and bend faces into features (a pair stays together, and
/// pairs sharing an edge join) and attaches every
/// inner loop of the reference face to one feature. Inner loops touching
/// no wall or bend become cut features. Features are numbered from 1 in
/// order of the smallest face id among their members and the faces across
/// their loops.
pub fn group_features(solid: &Solid, pairing: &FacePairing, metrics: &SheetMetrics) -> Result<Vec<SheetFeature>, RecognitionError> {
    let formed: Vec<FaceId> = pairing.roles.iter().filter(|(_, r)| r.is_deformation()).map(|(&f, _)| f).collect();
    let mut parent: BTreeMap<FaceId, FaceId> = formed.iter().map(|&f| (f, f)).collect();
    for &(a, b) in &pairing.pairs {
        union(&mut parent, a, b);
    }
    for &f in &formed {
        for n in solid.neighbours(f) {
            if parent.contains_key(&n) {
                union(&mut parent, f, n);
            }
        }
    }

    let rf = solid.face(metrics.reference_face)?;
    // (loop, deformation faces across it, faces across it, has isolated edges)
    let mut loops = Vec::new();
    for l in rf.inner_loops() {
        let mut attached = Vec::new();
        let mut across = BTreeSet::new();
        let mut isolated = false;
        for oe in &solid.get_loop(l)?.edges {
            let other = solid.other_face(oe.edge, rf.id)?;
            across.insert(other);
            match pairing.role(other) {
                Some(r) if r.is_deformation() => attached.push(other),
                Some(FaceRole::ReferencePair) => return Err(RecognitionError::InconsistentTopology { edge: oe.edge }),
                _ => isolated = true,
            }
        }
        for w in attached.windows(2) {
            union(&mut parent, w[0], w[1]);
        }
        loops.push((l, attached.first().copied(), across, isolated));
    }

    struct Group {
        members: BTreeSet<FaceId>,
        loops: BTreeSet<LoopId>,
        key: FaceId,
        isolated: bool,
    }
    let mut groups: BTreeMap<FaceId, Group> = BTreeMap::new();
    for &f in &formed {
        let root = find(&mut parent, f);
        let g = groups.entry(root).or_insert_with(|| Group { members: BTreeSet::new(), loops: BTreeSet::new(), key: f, isolated: false });
        g.members.insert(f);
        g.key = g.key.min(f);
    }
    let mut cuts = Vec::new();
    for (l, attached, across, isolated) in loops {
        let key = *across.iter().next().expect("loops have edges");
        match attached {
            Some(face) => {
                let g = groups.get_mut(&find(&mut parent, face)).expect("formed face has a group");
                g.loops.insert(l);
                g.key = g.key.min(key);
                g.isolated |= isolated;
            }
            None => cuts.push(Group { members: BTreeSet::new(), loops: BTreeSet::from([l]), key, isolated: true }),
        }
    }

    let mut all: Vec<Group> = groups.into_values().chain(cuts).collect();
    all.sort_by_key(|g| (g.key, g.loops.iter().next().copied()));
    Ok(all
        .into_iter()
        .enumerate()
        .map(|(i, g)| SheetFeature {
            id: i + 1,
            kind: match (g.members.is_empty(), g.isolated) {
                (true, _) => FeatureKind::Cut,
                (false, true) => FeatureKind::Mixed,
                (false, false) => FeatureKind::Formed,
            },
            member_faces: g.members,
            interior_loops: g.loops,
        })
        .collect())
}

/// Largest distance from the reference plane to a planar member face that
/// faces the same way as the reference face. Cut features use the sheet
/// thickness.
pub fn feature_height(solid: &Solid, metrics: &SheetMetrics, f: &SheetFeature) -> Result<f64, RecognitionError> {
    if f.kind == FeatureKind::Cut {
        return Ok(metrics.thickness);
    }
    let rf = solid.face(metrics.reference_face)?;
    let SurfaceGeometry::Plane { origin: rf_origin, .. } = rf.surface else {
        return Err(BrepError::NonPlanarFace { face: rf.id }.into());
    };
    let n = metrics.reference_normal;
    let mut best: Option<f64> = None;
    for &id in &f.member_faces {
        let face = solid.face(id)?;
        let SurfaceGeometry::Plane { origin, .. } = face.surface else { continue };
        if face.normal()?.dot(&n) > 1.0 - ANGULAR_TOLERANCE {
            let d = (origin - rf_origin).dot(&n.to_vec()).abs();
            best = Some(best.map_or(d, |b| b.max(d)));
        }
    }
    best.ok_or(RecognitionError::NoParallelFeatureFace { feature: f.id })
}
