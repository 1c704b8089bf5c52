//! Native B-Rep interchange format.
//!
//! ```json
//! { "name": "plate",
//!   "vertices": [{"id": 1, "x": 0, "y": 0, "z": 0}],
//!   "edges": [{"id": 1, "curve": {"kind": "line"}, "start": 1, "end": 2}],
//!   "loops": [{"id": 1, "oriented_edges": [{"edge": 1, "sense": true}]}],
//!   "faces": [{"id": 1, "surface": {"kind": "plane", "origin": [0,0,0], "normal": [0,0,1]},
//!              "same_sense": true, "bounds": [{"loop": 1, "outer": true}]}] }
//! ```
//!
//! Line curves may omit `point`/`dir`; they are then taken from the edge
//! endpoints. Circles need `center`, `axis` and `radius`; cylinders need
//! `axis_point`, `axis_dir` and `radius`. All lengths are millimetres.

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use super::{
    BrepError, CurveGeometry, Edge, EdgeId, Face, FaceBound, FaceId, Loop, LoopId, OrientedEdge, Point3, Solid,
    SurfaceGeometry, UnitVector, Vertex, VertexId,
};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("schema error at {path}: {reason}")]
pub struct SchemaError {
    /// JSON pointer to the offending value ("" is the document root).
    pub path: String,
    pub reason: String,
}

impl SchemaError {
    pub fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { path: path.into(), reason: reason.into() }
    }
}

/// A JSON value paired with its pointer path, for error reporting.
#[derive(Clone)]
pub(crate) struct Node<'a> {
    pub value: &'a Value,
    pub path: String,
}

impl<'a> Node<'a> {
    pub fn root(value: &'a Value) -> Self {
        Node { value, path: String::new() }
    }

    pub fn err(&self, reason: impl Into<String>) -> SchemaError {
        SchemaError::new(self.path.clone(), reason)
    }

    pub fn object(&self) -> Result<&'a Map<String, Value>, SchemaError> {
        self.value.as_object().ok_or_else(|| self.err("expected an object"))
    }

    pub fn array(&self) -> Result<&'a Vec<Value>, SchemaError> {
        self.value.as_array().ok_or_else(|| self.err("expected an array"))
    }

    pub fn f64(&self) -> Result<f64, SchemaError> {
        self.value.as_f64().filter(|v| v.is_finite()).ok_or_else(|| self.err("expected a finite number"))
    }

    pub fn u64(&self) -> Result<u64, SchemaError> {
        self.value.as_u64().filter(|&v| v > 0).ok_or_else(|| self.err("expected a positive integer id"))
    }

    pub fn bool(&self) -> Result<bool, SchemaError> {
        self.value.as_bool().ok_or_else(|| self.err("expected a boolean"))
    }

    pub fn str(&self) -> Result<&'a str, SchemaError> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    pub fn field(&self, key: &str) -> Result<Node<'a>, SchemaError> {
        let path = format!("{}/{}", self.path, key);
        match self.object()?.get(key) {
            Some(value) => Ok(Node { value, path }),
            None => Err(SchemaError::new(path, "missing required field")),
        }
    }

    pub fn opt_field(&self, key: &str) -> Result<Option<Node<'a>>, SchemaError> {
        Ok(self
            .object()?
            .get(key)
            .filter(|v| !v.is_null())
            .map(|value| Node { value, path: format!("{}/{}", self.path, key) }))
    }

    pub fn items(&self) -> Result<Vec<Node<'a>>, SchemaError> {
        Ok(self
            .array()?
            .iter()
            .enumerate()
            .map(|(i, value)| Node { value, path: format!("{}/{}", self.path, i) })
            .collect())
    }

    pub fn point(&self) -> Result<Point3, SchemaError> {
        let items = self.items()?;
        if items.len() != 3 {
            return Err(self.err("expected three coordinates"));
        }
        Ok(Point3::new(items[0].f64()?, items[1].f64()?, items[2].f64()?))
    }

    pub fn direction(&self) -> Result<UnitVector, SchemaError> {
        let p = self.point()?;
        UnitVector::new(p.x, p.y, p.z).ok_or_else(|| self.err("direction has zero length"))
    }

    pub fn positive(&self) -> Result<f64, SchemaError> {
        let v = self.f64()?;
        if v <= 0.0 {
            return Err(self.err("must be positive"));
        }
        Ok(v)
    }
}

pub fn load_brep_json(text: &str) -> Result<Solid, SchemaError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
    let root = Node::root(&doc);
    root.object()?;

    let name = match root.opt_field("name")? {
        Some(n) => n.str()?.to_string(),
        None => String::new(),
    };

    let vertex_nodes = root.field("vertices")?.items()?;
    let edge_nodes = root.field("edges")?.items()?;
    let loop_nodes = root.field("loops")?.items()?;
    let face_nodes = root.field("faces")?.items()?;

    let mut vertices = Vec::with_capacity(vertex_nodes.len());
    for n in &vertex_nodes {
        vertices.push(Vertex {
            id: VertexId(n.field("id")?.u64()?),
            point: Point3::new(n.field("x")?.f64()?, n.field("y")?.f64()?, n.field("z")?.f64()?),
        });
    }
    let lookup = |node: &Node| -> Result<Point3, SchemaError> {
        let id = VertexId(node.u64()?);
        vertices.iter().find(|v| v.id == id).map(|v| v.point).ok_or_else(|| node.err(format!("unknown vertex {id}")))
    };

    let mut edges = Vec::with_capacity(edge_nodes.len());
    for n in &edge_nodes {
        let id = EdgeId(n.field("id")?.u64()?);
        let start_node = n.field("start")?;
        let end_node = n.field("end")?;
        let c = n.field("curve")?;
        let kind = c.field("kind")?;
        let curve = match kind.str()? {
            "line" => {
                let point = match c.opt_field("point")? {
                    Some(p) => p.point()?,
                    None => lookup(&start_node)?,
                };
                let dir = match c.opt_field("dir")? {
                    Some(d) => d.direction()?,
                    None => (lookup(&end_node)? - lookup(&start_node)?)
                        .normalized()
                        .ok_or_else(|| c.err("line endpoints coincide and no dir given"))?,
                };
                CurveGeometry::Line { point, dir }
            }
            "circle" => CurveGeometry::Circle {
                center: c.field("center")?.point()?,
                axis: c.field("axis")?.direction()?,
                radius: c.field("radius")?.positive()?,
            },
            other => return Err(kind.err(format!("unsupported curve kind {other:?} (expected \"line\" or \"circle\")"))),
        };
        edges.push(Edge { id, curve, start: VertexId(start_node.u64()?), end: VertexId(end_node.u64()?) });
    }

    let mut loops = Vec::with_capacity(loop_nodes.len());
    for n in &loop_nodes {
        let id = LoopId(n.field("id")?.u64()?);
        let list = n.field("oriented_edges")?;
        let mut oes = Vec::new();
        for oe in list.items()? {
            oes.push(OrientedEdge { edge: EdgeId(oe.field("edge")?.u64()?), sense: oe.field("sense")?.bool()? });
        }
        if oes.is_empty() {
            return Err(list.err("loop has no edges"));
        }
        loops.push(Loop { id, edges: oes });
    }

    let mut faces = Vec::with_capacity(face_nodes.len());
    for n in &face_nodes {
        let id = FaceId(n.field("id")?.u64()?);
        let s = n.field("surface")?;
        let kind = s.field("kind")?;
        let surface = match kind.str()? {
            "plane" => SurfaceGeometry::Plane { origin: s.field("origin")?.point()?, normal: s.field("normal")?.direction()? },
            "cylinder" => SurfaceGeometry::Cylinder {
                axis_point: s.field("axis_point")?.point()?,
                axis_dir: s.field("axis_dir")?.direction()?,
                radius: s.field("radius")?.positive()?,
            },
            other => return Err(kind.err(format!("unsupported surface kind {other:?} (expected \"plane\" or \"cylinder\")"))),
        };
        let same_sense = n.field("same_sense")?.bool()?;
        let mut bounds = Vec::new();
        for b in n.field("bounds")?.items()? {
            bounds.push(FaceBound { loop_id: LoopId(b.field("loop")?.u64()?), outer: b.field("outer")?.bool()? });
        }
        faces.push(Face { id, surface, same_sense, bounds });
    }

    let position = |kind: &str, id: u64| -> String {
        let (key, nodes) = match kind {
            "vertex" => ("vertices", &vertex_nodes),
            "edge" => ("edges", &edge_nodes),
            "loop" => ("loops", &loop_nodes),
            _ => ("faces", &face_nodes),
        };
        nodes
            .iter()
            .position(|n| n.value.get("id").and_then(Value::as_u64) == Some(id))
            .map(|i| format!("/{key}/{i}"))
            .unwrap_or_else(|| format!("/{key}"))
    };

    Solid::new(name, vertices, edges, loops, faces).map_err(|e| {
        let path = match &e {
            BrepError::DuplicateId { kind, id } | BrepError::InvalidGeometry { kind, id, .. } => position(kind, *id),
            BrepError::MissingReference { from_kind, from, .. } => position(from_kind, *from),
            BrepError::SharedLoop { loop_id } => position("loop", loop_id.0),
            _ => String::new(),
        };
        SchemaError::new(path, e.to_string())
    })
}

#[derive(Serialize)]
struct DocOut<'a> {
    name: &'a str,
    vertices: Vec<VertexOut>,
    edges: Vec<EdgeOut>,
    loops: Vec<LoopOut>,
    faces: Vec<FaceOut>,
}

#[derive(Serialize)]
struct VertexOut {
    id: u64,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum CurveOut {
    Line { point: [f64; 3], dir: [f64; 3] },
    Circle { center: [f64; 3], axis: [f64; 3], radius: f64 },
}

#[derive(Serialize)]
struct EdgeOut {
    id: u64,
    curve: CurveOut,
    start: u64,
    end: u64,
}

#[derive(Serialize)]
struct OrientedOut {
    edge: u64,
    sense: bool,
}

#[derive(Serialize)]
struct LoopOut {
    id: u64,
    oriented_edges: Vec<OrientedOut>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SurfaceOut {
    Plane { origin: [f64; 3], normal: [f64; 3] },
    Cylinder { axis_point: [f64; 3], axis_dir: [f64; 3], radius: f64 },
}

#[derive(Serialize)]
struct BoundOut {
    #[serde(rename = "loop")]
    loop_id: u64,
    outer: bool,
}

#[derive(Serialize)]
struct FaceOut {
    id: u64,
    surface: SurfaceOut,
    same_sense: bool,
    bounds: Vec<BoundOut>,
}

/// Serializes a solid in the native interchange format (pretty-printed).
pub fn to_brep_json(solid: &Solid) -> String {
    let doc = DocOut {
        name: solid.name(),
        vertices: solid.vertices().map(|v| VertexOut { id: v.id.0, x: v.point.x, y: v.point.y, z: v.point.z }).collect(),
        edges: solid
            .edges()
            .map(|e| EdgeOut {
                id: e.id.0,
                curve: match e.curve {
                    CurveGeometry::Line { point, dir } => CurveOut::Line { point: point.to_array(), dir: dir.to_array() },
                    CurveGeometry::Circle { center, axis, radius } => {
                        CurveOut::Circle { center: center.to_array(), axis: axis.to_array(), radius }
                    }
                },
                start: e.start.0,
                end: e.end.0,
            })
            .collect(),
        loops: solid
            .loops()
            .map(|l| LoopOut {
                id: l.id.0,
                oriented_edges: l.edges.iter().map(|oe| OrientedOut { edge: oe.edge.0, sense: oe.sense }).collect(),
            })
            .collect(),
        faces: solid
            .faces()
            .map(|f| FaceOut {
                id: f.id.0,
                surface: match f.surface {
                    SurfaceGeometry::Plane { origin, normal } => {
                        SurfaceOut::Plane { origin: origin.to_array(), normal: normal.to_array() }
                    }
                    SurfaceGeometry::Cylinder { axis_point, axis_dir, radius } => {
                        SurfaceOut::Cylinder { axis_point: axis_point.to_array(), axis_dir: axis_dir.to_array(), radius }
                    }
                },
                same_sense: f.same_sense,
                bounds: f.bounds.iter().map(|b| BoundOut { loop_id: b.loop_id.0, outer: b.outer }).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}
