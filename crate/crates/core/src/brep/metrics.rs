use std::f64::consts::TAU;

use super::{
    signed_angle, BrepError, CurveGeometry, Edge, EdgeId, Face, FaceId, LoopId, OrientedEdge, PlaneFrame, Point3,
    Solid, SurfaceGeometry, UnitVector, Vec3, LINEAR_TOLERANCE,
};

/// Angle subtended by a circular edge, counter-clockwise about the curve
/// axis from start to end, in `(0, 2π]`. Coincident endpoints give `2π`.
pub(crate) fn arc_angle(center: Point3, axis: UnitVector, start: Point3, end: Point3) -> f64 {
    if start.coincident(&end) {
        return TAU;
    }
    let a = start - center;
    let b = end - center;
    let mut theta = signed_angle(&a, &b, &axis);
    if theta <= 0.0 {
        theta += TAU;
    }
    theta
}

/// Point on a circle at `angle` radians counter-clockwise about `axis`,
/// measured from the direction of `reference` (a point on the circle).
pub(crate) fn rotate_about(center: Point3, axis: UnitVector, reference: Point3, angle: f64) -> Point3 {
    let r = reference - center;
    let k = axis.to_vec();
    let (s, c) = angle.sin_cos();
    // Rodrigues
    center + (r * c + k.cross(&r) * s + k * (k.dot(&r) * (1.0 - c)))
}

impl Solid {
    pub fn edge_length(&self, id: EdgeId) -> Result<f64, BrepError> {
        let e = self.edge(id)?;
        self.length_of(e)
    }

    pub(crate) fn length_of(&self, e: &Edge) -> Result<f64, BrepError> {
        let p0 = self.point(e.start);
        let p1 = self.point(e.end);
        match e.curve {
            CurveGeometry::Line { .. } => {
                let d = p0.distance(&p1);
                if d <= LINEAR_TOLERANCE {
                    return Err(BrepError::DegenerateEdge { edge: e.id });
                }
                Ok(d)
            }
            CurveGeometry::Circle { center, axis, radius } => Ok(radius * arc_angle(center, axis, p0, p1)),
        }
    }

    /// Subtended angle of a circular edge; `None` for lines.
    pub fn arc_angle(&self, id: EdgeId) -> Result<Option<f64>, BrepError> {
        let e = self.edge(id)?;
        Ok(match e.curve {
            CurveGeometry::Circle { center, axis, .. } => Some(arc_angle(center, axis, self.point(e.start), self.point(e.end))),
            CurveGeometry::Line { .. } => None,
        })
    }

    pub fn face_normal(&self, id: FaceId) -> Result<UnitVector, BrepError> {
        self.face(id)?.normal()
    }

    pub(crate) fn face_frame(&self, f: &Face) -> Result<PlaneFrame, BrepError> {
        match f.surface {
            SurfaceGeometry::Plane { origin, .. } => Ok(PlaneFrame::new(origin, f.normal()?)),
            _ => Err(BrepError::NonPlanarFace { face: f.id }),
        }
    }

    /// Signed area enclosed by a loop, projected into the plane of `face`,
    /// positive when counter-clockwise about the face's outward normal.
    pub(crate) fn loop_signed_area(&self, face: &Face, loop_id: LoopId) -> Result<f64, BrepError> {
        let frame = self.face_frame(face)?;
        let l = self.get_loop(loop_id)?;
        self.check_closed(loop_id)?;
        let mut twice = 0.0;
        for oe in &l.edges {
            twice += self.green_term(&frame, face.id, oe)?;
        }
        Ok(0.5 * twice)
    }

    // ∮ (x dy − y dx) along one oriented edge in frame coordinates.
    fn green_term(&self, frame: &PlaneFrame, face: FaceId, oe: &OrientedEdge) -> Result<f64, BrepError> {
        let e = &self.edges[&oe.edge];
        let (a, b) = self.traversal(oe);
        let [x0, y0] = frame.project(&self.point(a));
        match e.curve {
            CurveGeometry::Line { .. } => {
                let [x1, y1] = frame.project(&self.point(b));
                Ok(x0 * y1 - x1 * y0)
            }
            CurveGeometry::Circle { center, axis, radius } => {
                let orientation = if axis.is_parallel(&frame.normal) {
                    1.0
                } else if axis.is_anti_parallel(&frame.normal) {
                    -1.0
                } else {
                    return Err(BrepError::CurveNotInPlane { edge: e.id, face });
                };
                let theta = arc_angle(center, axis, self.point(e.start), self.point(e.end));
                let dphi = orientation * if oe.sense { theta } else { -theta };
                let [cx, cy] = frame.project(&center);
                let phi0 = (y0 - cy).atan2(x0 - cx);
                let phi1 = phi0 + dphi;
                Ok(radius * cx * (phi1.sin() - phi0.sin()) - radius * cy * (phi1.cos() - phi0.cos()) + radius * radius * dphi)
            }
        }
    }

    pub(crate) fn check_closed(&self, loop_id: LoopId) -> Result<(), BrepError> {
        let l = self.get_loop(loop_id)?;
        if l.edges.is_empty() {
            return Err(BrepError::OpenLoop { loop_id });
        }
        for (i, oe) in l.edges.iter().enumerate() {
            let next = &l.edges[(i + 1) % l.edges.len()];
            if self.traversal(oe).1 != self.traversal(next).0 {
                return Err(BrepError::OpenLoop { loop_id });
            }
        }
        Ok(())
    }

    /// Area of a planar face: outer loop area minus the hole areas.
    pub fn face_area(&self, id: FaceId) -> Result<f64, BrepError> {
        let f = self.face(id)?;
        if !f.is_planar() {
            return Err(BrepError::NonPlanarFace { face: id });
        }
        let mut area = 0.0;
        for b in &f.bounds {
            let a = self.loop_signed_area(f, b.loop_id)?.abs();
            area += if b.outer { a } else { -a };
        }
        Ok(area.max(0.0))
    }

    /// Area enclosed by a single loop of a planar face, ignoring the other
    /// bounds.
    pub fn loop_area(&self, face: FaceId, loop_id: LoopId) -> Result<f64, BrepError> {
        let f = self.face(face)?;
        Ok(self.loop_signed_area(f, loop_id)?.abs())
    }

    /// Area of a planar or cylindrical face. Cylindrical faces must be
    /// bounded by axial lines and coaxial circles; `None` otherwise.
    pub fn surface_area(&self, id: FaceId) -> Result<Option<f64>, BrepError> {
        let f = self.face(id)?;
        match f.surface {
            SurfaceGeometry::Plane { .. } => self.face_area(id).map(Some),
            SurfaceGeometry::Cylinder { axis_point, axis_dir, radius } => {
                // unrolled Green: area = |Σ ∮ w ds|, w axial, s arc length
                let mut total = 0.0;
                for b in &f.bounds {
                    self.check_closed(b.loop_id)?;
                    for oe in &self.get_loop(b.loop_id)?.edges {
                        let e = &self.edges[&oe.edge];
                        match e.curve {
                            CurveGeometry::Line { dir, .. } => {
                                if !(dir.is_parallel(&axis_dir) || dir.is_anti_parallel(&axis_dir)) {
                                    return Ok(None);
                                }
                            }
                            CurveGeometry::Circle { center, axis, radius: r } => {
                                let off = center - axis_point;
                                let radial = off - axis_dir * off.dot(&axis_dir.to_vec());
                                let sign = if axis.is_parallel(&axis_dir) {
                                    1.0
                                } else if axis.is_anti_parallel(&axis_dir) {
                                    -1.0
                                } else {
                                    return Ok(None);
                                };
                                if radial.norm() > LINEAR_TOLERANCE || (r - radius).abs() > LINEAR_TOLERANCE {
                                    return Ok(None);
                                }
                                let theta = arc_angle(center, axis, self.point(e.start), self.point(e.end));
                                let ds = sign * radius * if oe.sense { theta } else { -theta };
                                total += off.dot(&axis_dir.to_vec()) * ds;
                            }
                        }
                    }
                }
                Ok(Some(total.abs()))
            }
        }
    }

    /// Points along a loop in traversal order (closing point omitted).
    /// Circular edges are subdivided into `arc_segments` pieces per full turn,
    /// with at least two pieces per arc.
    pub fn loop_polyline(&self, loop_id: LoopId, arc_segments: usize) -> Result<Vec<Point3>, BrepError> {
        let l = self.get_loop(loop_id)?;
        let mut pts = Vec::new();
        for oe in &l.edges {
            let e = &self.edges[&oe.edge];
            let (a, _) = self.traversal(oe);
            let pa = self.point(a);
            pts.push(pa);
            if let CurveGeometry::Circle { center, axis, .. } = e.curve {
                let theta = arc_angle(center, axis, self.point(e.start), self.point(e.end));
                let n = ((theta / TAU * arc_segments as f64).ceil() as usize).max(2);
                let step = if oe.sense { theta } else { -theta } / n as f64;
                for i in 1..n {
                    pts.push(rotate_about(center, axis, pa, step * i as f64));
                }
            }
        }
        Ok(pts)
    }

    /// Distance from a point to an edge's underlying curve.
    pub(crate) fn distance_to_curve(&self, e: &Edge, p: Point3) -> f64 {
        match e.curve {
            CurveGeometry::Line { point, dir } => {
                let d: Vec3 = p - point;
                let along = dir.to_vec() * d.dot(&dir.to_vec());
                (d - along).norm()
            }
            CurveGeometry::Circle { center, axis, radius } => {
                let d = p - center;
                let h = d.dot(&axis.to_vec());
                let radial = (d - axis.to_vec() * h).norm();
                ((radial - radius).powi(2) + h * h).sqrt()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::{FaceBound, Loop, Vertex, VertexId};
    use std::f64::consts::PI;

    fn line(id: u64, s: u64, e: u64) -> Edge {
        Edge { id: EdgeId(id), curve: CurveGeometry::Line { point: Point3::ORIGIN, dir: UnitVector::X }, start: VertexId(s), end: VertexId(e) }
    }

    fn single_face(points: &[(f64, f64)], holes: Vec<(Vec<Edge>, Vec<Vertex>)>) -> Solid {
        let mut vertices: Vec<Vertex> = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Vertex { id: VertexId(i as u64 + 1), point: Point3::new(x, y, 0.0) })
            .collect();
        let n = points.len() as u64;
        let mut edges: Vec<Edge> = (0..n).map(|i| line(i + 1, i + 1, (i + 1) % n + 1)).collect();
        let mut loops = vec![Loop { id: LoopId(1), edges: edges.iter().map(|e| OrientedEdge { edge: e.id, sense: true }).collect() }];
        let mut bounds = vec![FaceBound { loop_id: LoopId(1), outer: true }];
        for (i, (hole_edges, hole_vertices)) in holes.into_iter().enumerate() {
            let lid = LoopId(i as u64 + 2);
            loops.push(Loop { id: lid, edges: hole_edges.iter().map(|e| OrientedEdge { edge: e.id, sense: true }).collect() });
            bounds.push(FaceBound { loop_id: lid, outer: false });
            edges.extend(hole_edges);
            vertices.extend(hole_vertices);
        }
        let face = Face {
            id: FaceId(1),
            surface: SurfaceGeometry::Plane { origin: Point3::ORIGIN, normal: UnitVector::Z },
            same_sense: true,
            bounds,
        };
        Solid::new("t", vertices, edges, loops, vec![face]).unwrap()
    }

    fn circle_hole(id: u64, cx: f64, cy: f64, r: f64) -> (Vec<Edge>, Vec<Vertex>) {
        let v = Vertex { id: VertexId(id), point: Point3::new(cx + r, cy, 0.0) };
        let e = Edge {
            id: EdgeId(id),
            curve: CurveGeometry::Circle { center: Point3::new(cx, cy, 0.0), axis: UnitVector::Z, radius: r },
            start: VertexId(id),
            end: VertexId(id),
        };
        (vec![e], vec![v])
    }

    #[test]
    fn line_length_345() {
        let s = single_face(&[(0.0, 0.0), (3.0, 4.0), (0.0, 4.0)], vec![]);
        assert!((s.edge_length(EdgeId(1)).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn full_circle_length() {
        let s = single_face(&[(-50.0, -50.0), (50.0, -50.0), (50.0, 50.0), (-50.0, 50.0)], vec![circle_hole(100, 0.0, 0.0, 10.0)]);
        let len = s.edge_length(EdgeId(100)).unwrap();
        assert!((len - 62.831_853_071_795_86).abs() < 1e-9, "{len}");
    }

    #[test]
    fn quarter_arc_length() {
        let c = Point3::ORIGIN;
        let theta = arc_angle(c, UnitVector::Z, Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0));
        assert!((2.0 * theta - PI).abs() < 1e-12);
        // reversed axis takes the long way round
        let long = arc_angle(c, -UnitVector::Z, Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0));
        assert!((long - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn unit_square_area() {
        let s = single_face(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], vec![]);
        assert!((s.face_area(FaceId(1)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clockwise_outer_loop_is_reoriented() {
        let s = single_face(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)], vec![]);
        let f = s.face(FaceId(1)).unwrap();
        assert!(s.loop_signed_area(f, LoopId(1)).unwrap() > 0.0);
        assert!((s.face_area(FaceId(1)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l_hexagon_area() {
        let s = single_face(&[(0.0, 0.0), (4.0, 0.0), (4.0, 2.0), (2.0, 2.0), (2.0, 4.0), (0.0, 4.0)], vec![]);
        assert!((s.face_area(FaceId(1)).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn rectangle_with_circular_hole() {
        // 8000 − π·100
        let s = single_face(&[(0.0, 0.0), (100.0, 0.0), (100.0, 80.0), (0.0, 80.0)], vec![circle_hole(100, 50.0, 40.0, 10.0)]);
        let area = s.face_area(FaceId(1)).unwrap();
        assert!((area - (8000.0 - PI * 100.0)).abs() < 1e-9, "{area}");
        assert!((area - 7685.841).abs() < 1e-3);
    }

    #[test]
    fn area_rejects_open_loop_and_cylinder() {
        let mut s = single_face(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], vec![]);
        s.loops.get_mut(&LoopId(1)).unwrap().edges.pop();
        assert_eq!(s.face_area(FaceId(1)), Err(BrepError::OpenLoop { loop_id: LoopId(1) }));
        s.faces.get_mut(&FaceId(1)).unwrap().surface =
            SurfaceGeometry::Cylinder { axis_point: Point3::ORIGIN, axis_dir: UnitVector::Z, radius: 1.0 };
        assert_eq!(s.face_area(FaceId(1)), Err(BrepError::NonPlanarFace { face: FaceId(1) }));
    }

    #[test]
    fn degenerate_line_is_reported() {
        let mut s = single_face(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)], vec![]);
        s.vertices.get_mut(&VertexId(2)).unwrap().point = Point3::ORIGIN;
        assert_eq!(s.edge_length(EdgeId(1)), Err(BrepError::DegenerateEdge { edge: EdgeId(1) }));
    }

    #[test]
    fn rotation_helper() {
        let p = rotate_about(Point3::ORIGIN, UnitVector::Z, Point3::new(1.0, 0.0, 0.0), PI / 2.0);
        assert!(p.distance(&Point3::new(0.0, 1.0, 0.0)) < 1e-12);
    }
}
