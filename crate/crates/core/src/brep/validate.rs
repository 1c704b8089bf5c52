use std::fmt;

use serde::Serialize;

use super::{BrepError, CurveGeometry, EdgeId, FaceId, LoopId, PlaneFrame, Solid, SurfaceGeometry, VertexId, LINEAR_TOLERANCE};

/// One defect found by [`Solid::validate_manifold`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonManifoldEdge { edge: EdgeId, uses: usize },
    OpenLoop { loop_id: LoopId },
    DegenerateEdge { edge: EdgeId },
    VertexOffCurve { edge: EdgeId, vertex: VertexId, distance: f64 },
    VertexOffSurface { face: FaceId, vertex: VertexId, distance: f64 },
    OuterBoundCount { face: FaceId, count: usize },
    HoleOutsideOuter { face: FaceId, loop_id: LoopId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonManifoldEdge { edge, uses } => write!(f, "edge {edge} is used {uses} times (expected 2)"),
            Violation::OpenLoop { loop_id } => write!(f, "loop {loop_id} does not close"),
            Violation::DegenerateEdge { edge } => write!(f, "edge {edge} has coincident endpoints on a line"),
            Violation::VertexOffCurve { edge, vertex, distance } => {
                write!(f, "vertex {vertex} lies {distance:.3e} mm off the curve of edge {edge}")
            }
            Violation::VertexOffSurface { face, vertex, distance } => {
                write!(f, "vertex {vertex} lies {distance:.3e} mm off the surface of face {face}")
            }
            Violation::OuterBoundCount { face, count } => write!(f, "face {face} has {count} outer bounds (expected 1)"),
            Violation::HoleOutsideOuter { face, loop_id } => {
                write!(f, "inner loop {loop_id} of face {face} is not inside its outer bound")
            }
        }
    }
}

// Winding-number point-in-polygon test.
pub(crate) fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut winding = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                winding += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

impl Solid {
    /// Lists every manifold and incidence defect. An empty report means every
    /// edge bounds exactly two face uses, every loop closes, and every vertex
    /// lies on the curves and surfaces that reference it.
    pub fn validate_manifold(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        for (edge, uses) in &self.edge_uses {
            if uses.len() != 2 {
                out.push(Violation::NonManifoldEdge { edge: *edge, uses: uses.len() });
            }
        }

        for e in self.edges.values() {
            if let CurveGeometry::Line { .. } = e.curve {
                if self.point(e.start).coincident(&self.point(e.end)) {
                    out.push(Violation::DegenerateEdge { edge: e.id });
                }
            }
            for v in [e.start, e.end] {
                let d = self.distance_to_curve(e, self.point(v));
                if d > LINEAR_TOLERANCE {
                    out.push(Violation::VertexOffCurve { edge: e.id, vertex: v, distance: d });
                }
            }
        }

        for l in self.loops.values() {
            if self.check_closed(l.id).is_err() {
                out.push(Violation::OpenLoop { loop_id: l.id });
            }
        }

        for f in self.faces.values() {
            let outer: Vec<LoopId> = f.outer_loops().collect();
            if outer.len() != 1 {
                out.push(Violation::OuterBoundCount { face: f.id, count: outer.len() });
            }
            let mut seen = std::collections::BTreeSet::new();
            for b in &f.bounds {
                for oe in &self.loops[&b.loop_id].edges {
                    let e = &self.edges[&oe.edge];
                    for v in [e.start, e.end] {
                        if !seen.insert(v) {
                            continue;
                        }
                        let d = surface_distance(&f.surface, self.point(v));
                        if d > LINEAR_TOLERANCE {
                            out.push(Violation::VertexOffSurface { face: f.id, vertex: v, distance: d });
                        }
                    }
                }
            }
            if f.is_planar() && outer.len() == 1 {
                out.extend(self.holes_outside(f.id, outer[0]).unwrap_or_default());
            }
        }
        out
    }

    fn holes_outside(&self, face: FaceId, outer: LoopId) -> Result<Vec<Violation>, BrepError> {
        let f = self.face(face)?;
        let frame: PlaneFrame = self.face_frame(f)?;
        let poly: Vec<[f64; 2]> = self.loop_polyline(outer, 256)?.iter().map(|p| frame.project(p)).collect();
        let mut out = Vec::new();
        for hole in f.inner_loops() {
            if self.check_closed(hole).is_err() {
                continue;
            }
            let pts = self.loop_polyline(hole, 256)?;
            // midpoint of the first sampled chord, clear of shared vertices
            let probe = if pts.len() >= 2 {
                let a = frame.project(&pts[0]);
                let b = frame.project(&pts[1]);
                [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
            } else {
                frame.project(&pts[0])
            };
            if !point_in_polygon(probe, &poly) {
                out.push(Violation::HoleOutsideOuter { face, loop_id: hole });
            }
        }
        Ok(out)
    }
}

fn surface_distance(s: &SurfaceGeometry, p: super::Point3) -> f64 {
    match *s {
        SurfaceGeometry::Plane { origin, normal } => (p - origin).dot(&normal.to_vec()).abs(),
        SurfaceGeometry::Cylinder { axis_point, axis_dir, radius } => {
            let d = p - axis_point;
            let radial = d - axis_dir.to_vec() * d.dot(&axis_dir.to_vec());
            (radial.norm() - radius).abs()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_number_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(point_in_polygon([0.5, 0.5], &sq));
        assert!(!point_in_polygon([1.5, 0.5], &sq));
        let mut cw = sq;
        cw.reverse();
        assert!(point_in_polygon([0.5, 0.5], &cw));
    }
}
