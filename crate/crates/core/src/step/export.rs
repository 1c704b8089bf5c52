use std::collections::BTreeMap;

use super::{Entity, ExchangeStructure, Header, Parameter, Record};
use crate::brep::{CurveGeometry, EdgeId, Point3, Solid, SurfaceGeometry, UnitVector, VertexId};

struct Builder {
    entities: BTreeMap<u64, Entity>,
    next: u64,
}

fn s(text: &str) -> Parameter {
    Parameter::String(text.replace('\'', "''"))
}

fn r(id: u64) -> Parameter {
    Parameter::Reference(id)
}

fn flag(b: bool) -> Parameter {
    Parameter::Enumeration(if b { "T" } else { "F" }.into())
}

fn reals(v: [f64; 3]) -> Parameter {
    Parameter::List(v.iter().map(|&x| Parameter::Real(x)).collect())
}

impl Builder {
    fn add(&mut self, keyword: &str, params: Vec<Parameter>) -> u64 {
        let id = self.next;
        self.next += 1;
        self.entities.insert(id, Entity::Simple(Record { keyword: keyword.into(), params }));
        id
    }

    fn point(&mut self, p: Point3) -> u64 {
        self.add("CARTESIAN_POINT", vec![s(""), reals(p.to_array())])
    }

    fn direction(&mut self, d: UnitVector) -> u64 {
        self.add("DIRECTION", vec![s(""), reals(d.to_array())])
    }

    fn placement(&mut self, origin: Point3, axis: UnitVector) -> u64 {
        let p = self.point(origin);
        let a = self.direction(axis);
        let x = self.direction(axis.any_perpendicular());
        self.add("AXIS2_PLACEMENT_3D", vec![s(""), r(p), r(a), r(x)])
    }
}

/// Encodes `solid` as an AP-203 exchange file with fresh instance ids.
pub fn export_solid(solid: &Solid) -> String {
    let mut b = Builder { entities: BTreeMap::new(), next: 1 };

    let mut vertex_ids: BTreeMap<VertexId, u64> = BTreeMap::new();
    for v in solid.vertices() {
        let p = b.point(v.point);
        vertex_ids.insert(v.id, b.add("VERTEX_POINT", vec![s(""), r(p)]));
    }
    let mut edge_ids: BTreeMap<EdgeId, u64> = BTreeMap::new();
    for e in solid.edges() {
        let curve = match e.curve {
            CurveGeometry::Line { point, dir } => {
                let p = b.point(point);
                let d = b.direction(dir);
                let v = b.add("VECTOR", vec![s(""), r(d), Parameter::Real(1.0)]);
                b.add("LINE", vec![s(""), r(p), r(v)])
            }
            CurveGeometry::Circle { center, axis, radius } => {
                let a = b.placement(center, axis);
                b.add("CIRCLE", vec![s(""), r(a), Parameter::Real(radius)])
            }
        };
        let id = b.add(
            "EDGE_CURVE",
            vec![s(""), r(vertex_ids[&e.start]), r(vertex_ids[&e.end]), r(curve), flag(true)],
        );
        edge_ids.insert(e.id, id);
    }

    let mut faces = Vec::new();
    for f in solid.faces() {
        let mut bounds = Vec::new();
        for bound in &f.bounds {
            let l = solid.get_loop(bound.loop_id).expect("bound loops exist");
            let oes: Vec<Parameter> = l
                .edges
                .iter()
                .map(|oe| r(b.add("ORIENTED_EDGE", vec![s(""), Parameter::Derived, Parameter::Derived, r(edge_ids[&oe.edge]), flag(oe.sense)])))
                .collect();
            let lp = b.add("EDGE_LOOP", vec![s(""), Parameter::List(oes)]);
            let keyword = if bound.outer { "FACE_OUTER_BOUND" } else { "FACE_BOUND" };
            bounds.push(r(b.add(keyword, vec![s(""), r(lp), flag(true)])));
        }
        let surface = match f.surface {
            SurfaceGeometry::Plane { origin, normal } => {
                let a = b.placement(origin, normal);
                b.add("PLANE", vec![s(""), r(a)])
            }
            SurfaceGeometry::Cylinder { axis_point, axis_dir, radius } => {
                let a = b.placement(axis_point, axis_dir);
                b.add("CYLINDRICAL_SURFACE", vec![s(""), r(a), Parameter::Real(radius)])
            }
        };
        faces.push(r(b.add("ADVANCED_FACE", vec![s(""), Parameter::List(bounds), r(surface), flag(f.same_sense)])));
    }
    let shell = b.add("CLOSED_SHELL", vec![s(""), Parameter::List(faces)]);
    b.add("MANIFOLD_SOLID_BREP", vec![s(solid.name()), r(shell)]);

    let header_records = vec![
        Record {
            keyword: "FILE_DESCRIPTION".into(),
            params: vec![Parameter::List(vec![s("sheet metal part")]), s("2;1")],
        },
        Record {
            keyword: "FILE_NAME".into(),
            params: vec![
                s(solid.name()),
                s(""),
                Parameter::List(vec![s("")]),
                Parameter::List(vec![s("")]),
                s(""),
                s("sheetproc"),
                s(""),
            ],
        },
        Record {
            keyword: "FILE_SCHEMA".into(),
            params: vec![Parameter::List(vec![s("CONFIG_CONTROL_DESIGN")])],
        },
    ];
    let xs = ExchangeStructure {
        header: Header {
            description: vec!["sheet metal part".into()],
            file_name: solid.name().to_string(),
            schema: vec!["CONFIG_CONTROL_DESIGN".into()],
            records: header_records,
        },
        entities: b.entities,
    };
    xs.to_part21()
}
