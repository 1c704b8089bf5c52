use std::collections::{BTreeMap, BTreeSet};

use super::{Entity, ExchangeStructure, Parameter, Record, StepError};
use crate::brep::{
    CurveGeometry, Edge, EdgeId, Face, FaceBound, FaceId, Loop, LoopId, OrientedEdge, Point3, Solid, SurfaceGeometry,
    UnitVector, Vertex, VertexId,
};

/// Keywords the resolver interprets. Anything else is kept in the entity
/// map and counted in [`Diagnostics::ignored`].
pub const SUPPORTED_ENTITIES: [&str; 17] = [
    "CARTESIAN_POINT",
    "DIRECTION",
    "AXIS2_PLACEMENT_3D",
    "VERTEX_POINT",
    "LINE",
    "CIRCLE",
    "VECTOR",
    "EDGE_CURVE",
    "ORIENTED_EDGE",
    "EDGE_LOOP",
    "FACE_BOUND",
    "FACE_OUTER_BOUND",
    "PLANE",
    "CYLINDRICAL_SURFACE",
    "ADVANCED_FACE",
    "CLOSED_SHELL",
    "MANIFOLD_SOLID_BREP",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Unsupported keyword → number of instances skipped.
    pub ignored: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

struct Resolver<'a> {
    xs: &'a ExchangeStructure,
    vertices: BTreeMap<u64, Vertex>,
    edges: BTreeMap<u64, Edge>,
}

fn malformed(id: u64, reason: impl Into<String>) -> StepError {
    StepError::MalformedEntity { entity_id: id, reason: reason.into() }
}

impl<'a> Resolver<'a> {
    fn entity(&self, from: u64, to: u64) -> Result<&'a Entity, StepError> {
        self.xs.entities.get(&to).ok_or(StepError::DanglingReference { from_id: from, to_id: to })
    }

    /// The record of a simple instance whose keyword is one of `expected`.
    fn record(&self, from: u64, to: u64, expected: &[&str]) -> Result<&'a Record, StepError> {
        match self.entity(from, to)? {
            Entity::Simple(r) if expected.contains(&r.keyword.as_str()) => Ok(r),
            other => Err(StepError::UnexpectedEntity { entity_id: to, expected: expected.join(" or "), found: other.keyword() }),
        }
    }

    fn param(&self, id: u64, r: &'a Record, i: usize) -> Result<&'a Parameter, StepError> {
        r.params.get(i).ok_or_else(|| malformed(id, format!("{} needs at least {} parameters", r.keyword, i + 1)))
    }

    fn reference(&self, id: u64, r: &Record, i: usize) -> Result<u64, StepError> {
        self.param(id, r, i)?.as_reference().ok_or_else(|| malformed(id, format!("parameter {} of {} must be a reference", i + 1, r.keyword)))
    }

    fn boolean(&self, id: u64, r: &Record, i: usize) -> Result<bool, StepError> {
        self.param(id, r, i)?.as_bool().ok_or_else(|| malformed(id, format!("parameter {} of {} must be .T. or .F.", i + 1, r.keyword)))
    }

    fn real(&self, id: u64, r: &Record, i: usize) -> Result<f64, StepError> {
        self.param(id, r, i)?.as_f64().ok_or_else(|| malformed(id, format!("parameter {} of {} must be a number", i + 1, r.keyword)))
    }

    fn refs(&self, id: u64, r: &Record, i: usize) -> Result<Vec<u64>, StepError> {
        let list = self.param(id, r, i)?.as_list().ok_or_else(|| malformed(id, format!("parameter {} of {} must be a list", i + 1, r.keyword)))?;
        list.iter().map(|p| p.as_reference().ok_or_else(|| malformed(id, "list entries must be references"))).collect()
    }

    fn triple(&self, id: u64, r: &Record) -> Result<[f64; 3], StepError> {
        let list = self.param(id, r, 1)?.as_list().ok_or_else(|| malformed(id, "coordinates must be a list"))?;
        let vals: Option<Vec<f64>> = list.iter().map(Parameter::as_f64).collect();
        match vals.as_deref() {
            Some([x, y, z]) => Ok([*x, *y, *z]),
            // 2D points are lifted to z = 0
            Some([x, y]) => Ok([*x, *y, 0.0]),
            _ => Err(malformed(id, "expected two or three coordinates")),
        }
    }

    fn point(&self, from: u64, id: u64) -> Result<Point3, StepError> {
        let r = self.record(from, id, &["CARTESIAN_POINT"])?;
        let [x, y, z] = self.triple(id, r)?;
        Ok(Point3::new(x, y, z))
    }

    fn direction(&self, from: u64, id: u64) -> Result<UnitVector, StepError> {
        let r = self.record(from, id, &["DIRECTION"])?;
        let [x, y, z] = self.triple(id, r)?;
        UnitVector::new(x, y, z).ok_or_else(|| malformed(id, "zero-length direction"))
    }

    // (location, axis); the reference direction is not needed.
    fn placement(&self, from: u64, id: u64) -> Result<(Point3, UnitVector), StepError> {
        let r = self.record(from, id, &["AXIS2_PLACEMENT_3D"])?;
        let loc = self.point(id, self.reference(id, r, 1)?)?;
        let axis = match self.param(id, r, 2)? {
            Parameter::Unset => UnitVector::Z,
            Parameter::Reference(d) => self.direction(id, *d)?,
            _ => return Err(malformed(id, "axis must be a DIRECTION reference or $")),
        };
        Ok((loc, axis))
    }

    fn unsupported(&self, from: u64, id: u64) -> Result<StepError, StepError> {
        let e = self.entity(from, id)?;
        Ok(StepError::UnsupportedGeometry { entity_id: id, keyword: e.keyword() })
    }

    fn vertex(&mut self, from: u64, id: u64) -> Result<VertexId, StepError> {
        if !self.vertices.contains_key(&id) {
            let r = self.record(from, id, &["VERTEX_POINT"])?;
            let p = self.point(id, self.reference(id, r, 1)?)?;
            self.vertices.insert(id, Vertex { id: VertexId(id), point: p });
        }
        Ok(VertexId(id))
    }

    fn edge(&mut self, from: u64, id: u64) -> Result<EdgeId, StepError> {
        if self.edges.contains_key(&id) {
            return Ok(EdgeId(id));
        }
        let r = self.record(from, id, &["EDGE_CURVE"])?;
        let start = self.vertex(id, self.reference(id, r, 1)?)?;
        let end = self.vertex(id, self.reference(id, r, 2)?)?;
        let curve_id = self.reference(id, r, 3)?;
        let same_sense = self.boolean(id, r, 4)?;
        let curve = match self.entity(id, curve_id)? {
            Entity::Simple(c) if c.keyword == "LINE" => {
                let point = self.point(curve_id, self.reference(curve_id, c, 1)?)?;
                let vec_id = self.reference(curve_id, c, 2)?;
                let v = self.record(curve_id, vec_id, &["VECTOR"])?;
                let dir = self.direction(vec_id, self.reference(vec_id, v, 1)?)?;
                CurveGeometry::Line { point, dir: if same_sense { dir } else { -dir } }
            }
            Entity::Simple(c) if c.keyword == "CIRCLE" => {
                let (center, axis) = self.placement(curve_id, self.reference(curve_id, c, 1)?)?;
                let radius = self.real(curve_id, c, 2)?;
                if radius.is_nan() || radius <= 0.0 {
                    return Err(malformed(curve_id, "circle radius must be positive"));
                }
                // arcs run counter-clockwise about the axis from start to end
                CurveGeometry::Circle { center, axis: if same_sense { axis } else { -axis }, radius }
            }
            _ => return Err(self.unsupported(id, curve_id)?),
        };
        self.edges.insert(id, Edge { id: EdgeId(id), curve, start, end });
        Ok(EdgeId(id))
    }

    fn edge_loop(&mut self, from: u64, id: u64, orientation: bool) -> Result<Loop, StepError> {
        let r = self.record(from, id, &["EDGE_LOOP"])?;
        let mut oes = Vec::new();
        for oe_id in self.refs(id, r, 1)? {
            let oe = self.record(id, oe_id, &["ORIENTED_EDGE"])?;
            let edge = self.edge(oe_id, self.reference(oe_id, oe, 3)?)?;
            let sense = self.boolean(oe_id, oe, 4)?;
            oes.push(OrientedEdge { edge, sense });
        }
        if oes.is_empty() {
            return Err(malformed(id, "EDGE_LOOP has no edges"));
        }
        if !orientation {
            oes.reverse();
            for oe in &mut oes {
                oe.sense = !oe.sense;
            }
        }
        Ok(Loop { id: LoopId(id), edges: oes })
    }

    fn surface(&self, from: u64, id: u64) -> Result<SurfaceGeometry, StepError> {
        match self.entity(from, id)? {
            Entity::Simple(s) if s.keyword == "PLANE" => {
                let (origin, normal) = self.placement(id, self.reference(id, s, 1)?)?;
                Ok(SurfaceGeometry::Plane { origin, normal })
            }
            Entity::Simple(s) if s.keyword == "CYLINDRICAL_SURFACE" => {
                let (axis_point, axis_dir) = self.placement(id, self.reference(id, s, 1)?)?;
                let radius = self.real(id, s, 2)?;
                if radius.is_nan() || radius <= 0.0 {
                    return Err(malformed(id, "cylinder radius must be positive"));
                }
                Ok(SurfaceGeometry::Cylinder { axis_point, axis_dir, radius })
            }
            _ => Err(self.unsupported(from, id)?),
        }
    }
}

fn unit_warnings(xs: &ExchangeStructure) -> Vec<String> {
    let mut out = Vec::new();
    for (id, e) in &xs.entities {
        for r in e.records().iter().filter(|r| r.keyword == "SI_UNIT") {
            // simple form carries a leading derived dimensions parameter
            let n = r.params.len();
            if n < 2 {
                continue;
            }
            let prefix = match &r.params[n - 2] {
                Parameter::Enumeration(p) => Some(p.as_str()),
                _ => None,
            };
            if let Parameter::Enumeration(name) = &r.params[n - 1] {
                if name == "METRE" && prefix != Some("MILLI") {
                    out.push(format!(
                        "#{id}: length unit is {}METRE; coordinates are read as millimetres",
                        prefix.map(|p| format!("{p}.")).unwrap_or_default()
                    ));
                }
            }
        }
    }
    out
}

/// Resolves the single manifold solid, discarding diagnostics.
pub fn resolve_brep(xs: &ExchangeStructure) -> Result<Solid, StepError> {
    resolve_brep_with_diagnostics(xs).map(|(s, _)| s)
}

pub fn resolve_brep_with_diagnostics(xs: &ExchangeStructure) -> Result<(Solid, Diagnostics), StepError> {
    let mut diagnostics = Diagnostics { warnings: unit_warnings(xs), ..Default::default() };
    for e in xs.entities.values() {
        for r in e.records() {
            if !SUPPORTED_ENTITIES.contains(&r.keyword.as_str()) {
                *diagnostics.ignored.entry(r.keyword.clone()).or_insert(0) += 1;
            }
        }
    }

    let solids: Vec<u64> = xs
        .entities
        .iter()
        .filter(|(_, e)| matches!(e, Entity::Simple(r) if r.keyword == "MANIFOLD_SOLID_BREP"))
        .map(|(&id, _)| id)
        .collect();
    let solid_id = match solids.as_slice() {
        [] => return Err(StepError::NoSolid),
        [one] => *one,
        many => return Err(StepError::MultipleSolids { count: many.len() }),
    };

    let mut res = Resolver { xs, vertices: BTreeMap::new(), edges: BTreeMap::new() };
    let brep = res.record(solid_id, solid_id, &["MANIFOLD_SOLID_BREP"])?;
    let name = brep.params.first().and_then(Parameter::as_str).unwrap_or_default().to_string();
    let shell_id = res.reference(solid_id, brep, 1)?;
    let shell = res.record(solid_id, shell_id, &["CLOSED_SHELL"])?;

    let mut loops = Vec::new();
    let mut faces = Vec::new();
    let mut seen_faces = BTreeSet::new();
    for face_id in res.refs(shell_id, shell, 1)? {
        if !seen_faces.insert(face_id) {
            return Err(malformed(shell_id, format!("face #{face_id} listed twice")));
        }
        let f = match res.entity(shell_id, face_id)? {
            Entity::Simple(r) if r.keyword == "ADVANCED_FACE" => r,
            Entity::Complex(_) => return Err(res.unsupported(shell_id, face_id)?),
            other => {
                return Err(StepError::UnexpectedEntity {
                    entity_id: face_id,
                    expected: "ADVANCED_FACE".into(),
                    found: other.keyword(),
                })
            }
        };
        let surface = res.surface(face_id, res.reference(face_id, f, 2)?)?;
        let same_sense = res.boolean(face_id, f, 3)?;
        let mut bounds = Vec::new();
        for bound_id in res.refs(face_id, f, 1)? {
            let b = res.record(face_id, bound_id, &["FACE_OUTER_BOUND", "FACE_BOUND"])?;
            let loop_id = res.reference(bound_id, b, 1)?;
            let orientation = res.boolean(bound_id, b, 2)?;
            let l = res.edge_loop(bound_id, loop_id, orientation)?;
            bounds.push(FaceBound { loop_id: l.id, outer: b.keyword == "FACE_OUTER_BOUND" });
            loops.push(l);
        }
        // a face with a single FACE_BOUND has that bound as its outer one
        if bounds.len() == 1 {
            bounds[0].outer = true;
        }
        faces.push(Face { id: FaceId(face_id), surface, same_sense, bounds });
    }

    let solid = Solid::new(
        name,
        res.vertices.into_values().collect(),
        res.edges.into_values().collect(),
        loops,
        faces,
    )?;
    Ok((solid, diagnostics))
}
