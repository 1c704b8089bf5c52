//! Boundary-representation data model and its metric queries.
//!
//! A [`Solid`] is immutable once built. Construction checks referential
//! integrity, orients planar loops (outer loops counter-clockwise about the
//! outward normal, inner loops clockwise) and builds the edge → face
//! adjacency index. Geometric and manifold defects that do not prevent
//! construction are reported by [`Solid::validate_manifold`].

mod geom;
mod json;
mod metrics;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geom::{signed_angle, PlaneFrame, Point3, UnitVector, Vec3, ANGULAR_TOLERANCE, LINEAR_TOLERANCE};
pub use json::{load_brep_json, to_brep_json, SchemaError};
pub(crate) use metrics::{arc_angle, rotate_about};
pub(crate) use validate::point_in_polygon;
pub(crate) use json::Node;
pub use validate::Violation;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(VertexId);
id_type!(EdgeId);
id_type!(LoopId);
id_type!(FaceId);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveGeometry {
    Line { point: Point3, dir: UnitVector },
    /// Arcs run counter-clockwise about `axis` from the edge start to the
    /// edge end. An edge whose start and end coincide is a full circle.
    Circle { center: Point3, axis: UnitVector, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceGeometry {
    /// `normal` is the surface normal before the face `same_sense` flag.
    Plane { origin: Point3, normal: UnitVector },
    /// The surface normal points away from the axis.
    Cylinder { axis_point: Point3, axis_dir: UnitVector, radius: f64 },
}

impl SurfaceGeometry {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SurfaceGeometry::Plane { .. } => "plane",
            SurfaceGeometry::Cylinder { .. } => "cylinder",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: VertexId,
    pub point: Point3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub curve: CurveGeometry,
    pub start: VertexId,
    pub end: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    /// `true` when the loop traverses the edge from its start to its end.
    pub sense: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    pub id: LoopId,
    pub edges: Vec<OrientedEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceBound {
    pub loop_id: LoopId,
    pub outer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: FaceId,
    pub surface: SurfaceGeometry,
    pub same_sense: bool,
    pub bounds: Vec<FaceBound>,
}

impl Face {
    pub fn is_planar(&self) -> bool {
        matches!(self.surface, SurfaceGeometry::Plane { .. })
    }

    pub fn outer_loops(&self) -> impl Iterator<Item = LoopId> + '_ {
        self.bounds.iter().filter(|b| b.outer).map(|b| b.loop_id)
    }

    pub fn inner_loops(&self) -> impl Iterator<Item = LoopId> + '_ {
        self.bounds.iter().filter(|b| !b.outer).map(|b| b.loop_id)
    }

    /// Outward normal of a planar face.
    pub fn normal(&self) -> Result<UnitVector, BrepError> {
        match self.surface {
            SurfaceGeometry::Plane { normal, .. } => Ok(if self.same_sense { normal } else { -normal }),
            _ => Err(BrepError::NonPlanarFace { face: self.id }),
        }
    }

    /// Whether the outward normal of a cylindrical face points away from
    /// its axis.
    pub fn is_convex_cylinder(&self) -> Option<bool> {
        match self.surface {
            SurfaceGeometry::Cylinder { .. } => Some(self.same_sense),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BrepError {
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: u64 },
    #[error("{from_kind} {from} references missing {to_kind} {to}")]
    MissingReference { from_kind: &'static str, from: u64, to_kind: &'static str, to: u64 },
    #[error("invalid geometry on {kind} {id}: {reason}")]
    InvalidGeometry { kind: &'static str, id: u64, reason: String },
    #[error("loop {loop_id} is bound by more than one face")]
    SharedLoop { loop_id: LoopId },
    #[error("face {face} is not planar")]
    NonPlanarFace { face: FaceId },
    #[error("edge {edge} is degenerate (line endpoints coincide)")]
    DegenerateEdge { edge: EdgeId },
    #[error("unknown edge {edge}")]
    UnknownEdge { edge: EdgeId },
    #[error("unknown face {face}")]
    UnknownFace { face: FaceId },
    #[error("unknown loop {loop_id}")]
    UnknownLoop { loop_id: LoopId },
    #[error("edge {edge} is used {uses} times (expected 2)")]
    NonManifoldEdge { edge: EdgeId, uses: usize },
    #[error("loop {loop_id} does not close")]
    OpenLoop { loop_id: LoopId },
    #[error("edge {edge} does not lie in the plane of face {face}")]
    CurveNotInPlane { edge: EdgeId, face: FaceId },
}

/// A closed-shell boundary representation.
#[derive(Debug, Clone)]
pub struct Solid {
    name: String,
    vertices: BTreeMap<VertexId, Vertex>,
    edges: BTreeMap<EdgeId, Edge>,
    loops: BTreeMap<LoopId, Loop>,
    faces: BTreeMap<FaceId, Face>,
    // one entry per oriented-edge use, so a seam edge lists its face twice
    edge_uses: BTreeMap<EdgeId, Vec<FaceId>>,
    loop_owner: BTreeMap<LoopId, FaceId>,
}

fn index<K: Ord + Copy, T>(
    kind: &'static str,
    items: Vec<T>,
    key: impl Fn(&T) -> K,
    raw: impl Fn(K) -> u64,
) -> Result<BTreeMap<K, T>, BrepError> {
    let mut map = BTreeMap::new();
    for item in items {
        let k = key(&item);
        if map.insert(k, item).is_some() {
            return Err(BrepError::DuplicateId { kind, id: raw(k) });
        }
    }
    Ok(map)
}

impl Solid {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        loops: Vec<Loop>,
        faces: Vec<Face>,
    ) -> Result<Solid, BrepError> {
        let vertices = index("vertex", vertices, |v| v.id, |k| k.0)?;
        let edges = index("edge", edges, |e| e.id, |k| k.0)?;
        let loops = index("loop", loops, |l| l.id, |k| k.0)?;
        let faces = index("face", faces, |f| f.id, |k| k.0)?;

        for v in vertices.values() {
            if !v.point.is_finite() {
                return Err(BrepError::InvalidGeometry {
                    kind: "vertex",
                    id: v.id.0,
                    reason: "non-finite coordinate".into(),
                });
            }
        }
        for e in edges.values() {
            for v in [e.start, e.end] {
                if !vertices.contains_key(&v) {
                    return Err(BrepError::MissingReference { from_kind: "edge", from: e.id.0, to_kind: "vertex", to: v.0 });
                }
            }
            let bad = match e.curve {
                CurveGeometry::Line { point, .. } => (!point.is_finite()).then(|| "non-finite line point".to_string()),
                CurveGeometry::Circle { center, radius, .. } => {
                    if !center.is_finite() {
                        Some("non-finite circle centre".to_string())
                    } else if !(radius > 0.0 && radius.is_finite()) {
                        Some(format!("circle radius {radius} must be positive"))
                    } else {
                        None
                    }
                }
            };
            if let Some(reason) = bad {
                return Err(BrepError::InvalidGeometry { kind: "edge", id: e.id.0, reason });
            }
        }
        for l in loops.values() {
            for oe in &l.edges {
                if !edges.contains_key(&oe.edge) {
                    return Err(BrepError::MissingReference { from_kind: "loop", from: l.id.0, to_kind: "edge", to: oe.edge.0 });
                }
            }
        }
        let mut loop_owner = BTreeMap::new();
        for f in faces.values() {
            if let SurfaceGeometry::Cylinder { radius, axis_point, .. } = f.surface {
                if !(radius > 0.0 && radius.is_finite()) || !axis_point.is_finite() {
                    return Err(BrepError::InvalidGeometry {
                        kind: "face",
                        id: f.id.0,
                        reason: format!("cylinder radius {radius} must be positive"),
                    });
                }
            }
            for b in &f.bounds {
                if !loops.contains_key(&b.loop_id) {
                    return Err(BrepError::MissingReference { from_kind: "face", from: f.id.0, to_kind: "loop", to: b.loop_id.0 });
                }
                if loop_owner.insert(b.loop_id, f.id).is_some() {
                    return Err(BrepError::SharedLoop { loop_id: b.loop_id });
                }
            }
        }

        let mut edge_uses: BTreeMap<EdgeId, Vec<FaceId>> = edges.keys().map(|&e| (e, Vec::new())).collect();
        for f in faces.values() {
            for b in &f.bounds {
                for oe in &loops[&b.loop_id].edges {
                    edge_uses.get_mut(&oe.edge).expect("checked above").push(f.id);
                }
            }
        }

        let mut solid = Solid { name: name.into(), vertices, edges, loops, faces, edge_uses, loop_owner };
        solid.orient_planar_loops();
        Ok(solid)
    }

    // Outer loops counter-clockwise about the outward normal, inner loops
    // clockwise. Loops that do not close are left untouched; validation
    // reports them.
    fn orient_planar_loops(&mut self) {
        let mut flips = Vec::new();
        for f in self.faces.values() {
            if !f.is_planar() {
                continue;
            }
            for b in &f.bounds {
                if let Ok(a) = self.loop_signed_area(f, b.loop_id) {
                    if (b.outer && a < 0.0) || (!b.outer && a > 0.0) {
                        flips.push(b.loop_id);
                    }
                }
            }
        }
        for id in flips {
            let l = self.loops.get_mut(&id).expect("loop exists");
            l.edges.reverse();
            for oe in &mut l.edges {
                oe.sense = !oe.sense;
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn loops(&self) -> impl Iterator<Item = &Loop> {
        self.loops.values()
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.values()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.get(&id)
    }

    pub fn point(&self, id: VertexId) -> Point3 {
        self.vertices[&id].point
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, BrepError> {
        self.edges.get(&id).ok_or(BrepError::UnknownEdge { edge: id })
    }

    pub fn face(&self, id: FaceId) -> Result<&Face, BrepError> {
        self.faces.get(&id).ok_or(BrepError::UnknownFace { face: id })
    }

    pub fn get_loop(&self, id: LoopId) -> Result<&Loop, BrepError> {
        self.loops.get(&id).ok_or(BrepError::UnknownLoop { loop_id: id })
    }

    /// The face bounded by a loop, if any.
    pub fn loop_face(&self, id: LoopId) -> Option<FaceId> {
        self.loop_owner.get(&id).copied()
    }

    /// Every face use of an edge, one entry per oriented-edge occurrence.
    pub fn edge_uses(&self, id: EdgeId) -> Result<&[FaceId], BrepError> {
        self.edge_uses.get(&id).map(Vec::as_slice).ok_or(BrepError::UnknownEdge { edge: id })
    }

    /// The two faces meeting at a manifold edge, in ascending id order.
    pub fn edge_adjacent_faces(&self, id: EdgeId) -> Result<(FaceId, FaceId), BrepError> {
        let uses = self.edge_uses(id)?;
        if uses.len() != 2 {
            return Err(BrepError::NonManifoldEdge { edge: id, uses: uses.len() });
        }
        Ok((uses[0].min(uses[1]), uses[0].max(uses[1])))
    }

    /// The face across `edge` from `face`.
    pub fn other_face(&self, edge: EdgeId, face: FaceId) -> Result<FaceId, BrepError> {
        let (a, b) = self.edge_adjacent_faces(edge)?;
        Ok(if a == face { b } else { a })
    }

    /// Faces sharing at least one edge with `face`, excluding itself.
    pub fn neighbours(&self, face: FaceId) -> BTreeSet<FaceId> {
        let mut out = BTreeSet::new();
        if let Some(f) = self.faces.get(&face) {
            for b in &f.bounds {
                for oe in &self.loops[&b.loop_id].edges {
                    out.extend(self.edge_uses[&oe.edge].iter().copied().filter(|&g| g != face));
                }
            }
        }
        out
    }

    /// Distinct edge ids bounding a face, ascending.
    pub fn face_edges(&self, face: FaceId) -> Result<BTreeSet<EdgeId>, BrepError> {
        let f = self.face(face)?;
        Ok(f.bounds.iter().flat_map(|b| self.loops[&b.loop_id].edges.iter().map(|oe| oe.edge)).collect())
    }

    /// Start and end vertex of an oriented edge in traversal order.
    pub fn traversal(&self, oe: &OrientedEdge) -> (VertexId, VertexId) {
        let e = &self.edges[&oe.edge];
        if oe.sense {
            (e.start, e.end)
        } else {
            (e.end, e.start)
        }
    }

    /// Returns a copy with every vertex and geometric entity mapped through
    /// `f` (a similarity transform: rotation, translation, uniform scale).
    pub fn transformed(&self, f: impl Fn(Point3) -> Point3) -> Solid {
        let o = f(Point3::ORIGIN);
        let map_dir = |d: UnitVector| (f(Point3::ORIGIN + d.to_vec()) - o).normalized().expect("similarity keeps directions");
        let scale = (f(Point3::new(1.0, 0.0, 0.0)) - o).norm();
        let mut s = self.clone();
        for v in s.vertices.values_mut() {
            v.point = f(v.point);
        }
        for e in s.edges.values_mut() {
            e.curve = match e.curve {
                CurveGeometry::Line { point, dir } => CurveGeometry::Line { point: f(point), dir: map_dir(dir) },
                CurveGeometry::Circle { center, axis, radius } => {
                    CurveGeometry::Circle { center: f(center), axis: map_dir(axis), radius: radius * scale }
                }
            };
        }
        for face in s.faces.values_mut() {
            face.surface = match face.surface {
                SurfaceGeometry::Plane { origin, normal } => SurfaceGeometry::Plane { origin: f(origin), normal: map_dir(normal) },
                SurfaceGeometry::Cylinder { axis_point, axis_dir, radius } => SurfaceGeometry::Cylinder {
                    axis_point: f(axis_point),
                    axis_dir: map_dir(axis_dir),
                    radius: radius * scale,
                },
            };
        }
        s
    }

    /// Returns a copy without the given faces (and their loops). Intended for
    /// building defective models in tests and diagnostics.
    pub fn without_faces(&self, remove: &[FaceId]) -> Result<Solid, BrepError> {
        let faces: Vec<Face> = self.faces.values().filter(|f| !remove.contains(&f.id)).cloned().collect();
        let keep: BTreeSet<LoopId> = faces.iter().flat_map(|f| f.bounds.iter().map(|b| b.loop_id)).collect();
        Solid::new(
            self.name.clone(),
            self.vertices.values().cloned().collect(),
            self.edges.values().cloned().collect(),
            self.loops.values().filter(|l| keep.contains(&l.id)).cloned().collect(),
            faces,
        )
    }
}
