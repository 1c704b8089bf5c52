#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::Rng;
use sheetproc::build::{Formation, Layout, Side};
use sheetproc::classify::EdgeClassTotals;

pub const T: f64 = 2.0;

/// Steps of 0.5 mm in `[lo, hi]`.
fn half(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let steps = ((hi - lo) * 2.0) as u32;
    lo + rng.gen_range(0..=steps) as f64 * 0.5
}

fn side(rng: &mut impl Rng) -> Side {
    if rng.gen_bool(0.5) {
        Side::Low
    } else {
        Side::High
    }
}

/// A random sheet laid out as a grid of 70 × 60 slots, each holding at most
/// one formation, plus optional flanges on the two x edges. Returns the
/// layout and the reference-face class totals it must produce, worked out
/// from the formation dimensions alone.
pub fn random_sheet(rng: &mut impl Rng) -> (Layout, EdgeClassTotals, usize) {
    let (nx, ny) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
    let (length, width) = (60.0 + 70.0 * nx as f64, 10.0 + 60.0 * ny as f64);
    let mut layout = Layout::new(length, width, T);
    let mut exp = EdgeClassTotals::default();
    let iee = |exp: &mut EdgeClassTotals, len: f64| exp.add(sheetproc::classify::EdgeClass::Iee, len);
    let add = |exp: &mut EdgeClassTotals, cie: &[f64], iie: &[f64]| {
        for &l in cie {
            exp.add(sheetproc::classify::EdgeClass::Cie, l);
        }
        for &l in iie {
            exp.add(sheetproc::classify::EdgeClass::Iie, l);
        }
    };
    let mut features = 0;

    // a partial flange gets relief notches either side, so the sheet edge
    // beside it is set back from the flange face
    let mut notched = 0.0;
    for edge in [Side::Low, Side::High] {
        if !rng.gen_bool(0.35) {
            iee(&mut exp, width);
            continue;
        }
        let height = half(rng, 6.0, 30.0);
        let lip = rng.gen_bool(0.5).then(|| half(rng, 4.0, 20.0));
        let (from, to) = if rng.gen_bool(0.5) {
            (0.0, width)
        } else {
            let a = half(rng, 5.0, width / 2.0 - 5.0);
            let b = half(rng, width / 2.0 + 5.0, width - 5.0);
            let r = half(rng, 3.0, 8.0);
            let x = match edge {
                Side::Low => 0.0,
                Side::High => length - r,
            };
            layout = layout
                .with(Formation::Opening { x, y: 0.0, length: r, width: a })
                .with(Formation::Opening { x, y: b, length: r, width: width - b });
            for l in [a, width - b, r, r] {
                iee(&mut exp, l);
            }
            notched += r;
            (a, b)
        };
        layout = layout.with(Formation::EdgeFlange { edge, from, to, height, lip });
        exp.add(sheetproc::classify::EdgeClass::Cee, to - from);
        features += 1;
    }
    iee(&mut exp, length - notched);
    iee(&mut exp, length - notched);

    for i in 0..nx {
        for j in 0..ny {
            let (sx, sy) = (30.0 + 70.0 * i as f64, 5.0 + 60.0 * j as f64);
            let (x, y) = (sx + 10.0, sy + 8.0);
            let (cx, cy) = (sx + 35.0, sy + 30.0);
            let f = match rng.gen_range(0..8) {
                0 => continue,
                1 => {
                    let (l, w) = (half(rng, 5.0, 45.0), half(rng, 5.0, 40.0));
                    add(&mut exp, &[], &[l, l, w, w]);
                    Formation::Opening { x, y, length: l, width: w }
                }
                2 => {
                    let r = half(rng, 2.0, 20.0);
                    add(&mut exp, &[], &[TAU * r]);
                    Formation::Hole { x: cx, y: cy, radius: r }
                }
                3 => {
                    let r = half(rng, 3.0, 18.0);
                    add(&mut exp, &[TAU * r / 2.0, TAU * r / 2.0], &[]);
                    Formation::Cup { x: cx, y: cy, radius: r, height: half(rng, 4.0, 20.0) }
                }
                4 => {
                    let (l, w) = (half(rng, 10.0, 45.0), half(rng, 5.0, 40.0));
                    add(&mut exp, &[w], &[l, l, w]);
                    let plate_length = half(rng, 5.0, l);
                    Formation::Tab { x, y, length: l, width: w, height: half(rng, 4.0, 20.0), plate_length, leg: side(rng) }
                }
                5 => {
                    let (l, w) = (half(rng, 10.0, 45.0), half(rng, 5.0, 40.0));
                    add(&mut exp, &[w, w], &[l, l]);
                    Formation::Bridge { x, y, length: l, width: w, height: half(rng, 4.0, 20.0) }
                }
                6 => {
                    let (l, d) = (half(rng, 10.0, 45.0), half(rng, 5.0, 38.0));
                    add(&mut exp, &[d, d, l], &[l]);
                    Formation::Hood { x, y, length: l, depth: d, height: half(rng, 4.0, 20.0) }
                }
                _ => {
                    let (l, w) = (half(rng, 10.0, 45.0), half(rng, 5.0, 40.0));
                    add(&mut exp, &[w], &[l, l, w]);
                    Formation::Flap { x, y, length: l, width: w, height: half(rng, 4.0, 30.0), side: side(rng) }
                }
            };
            layout = layout.with(f);
            features += 1;
        }
    }
    (layout, exp, features)
}

/// Whether two totals agree: counts exactly, lengths to `tol`.
pub fn totals_match(a: &EdgeClassTotals, b: &EdgeClassTotals, tol: f64) -> bool {
    (a.n_cee, a.n_iee, a.n_cie, a.n_iie) == (b.n_cee, b.n_iee, b.n_cie, b.n_iie)
        && [(a.tl_cee, b.tl_cee), (a.tl_iee, b.tl_iee), (a.tl_cie, b.tl_cie), (a.tl_iie, b.tl_iie)]
            .iter()
            .all(|(x, y)| (x - y).abs() <= tol)
}

/// A planar region: a star-shaped outer polygon with disjoint circular and
/// polygonal holes, all in the z = 0 plane.
#[derive(Debug, Clone)]
pub struct Region {
    pub outer: Vec<[f64; 2]>,
    pub polygons: Vec<Vec<[f64; 2]>>,
    pub circles: Vec<([f64; 2], f64)>,
}

pub fn random_region(rng: &mut impl Rng) -> Region {
    let n = rng.gen_range(6..=12);
    let step = TAU / n as f64;
    let outer = (0..n)
        .map(|k| {
            let a = (k as f64 + rng.gen_range(-0.2..0.2)) * step;
            let r = rng.gen_range(60.0..100.0);
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let phase = rng.gen_range(0.0..TAU);
    let mut polygons = Vec::new();
    let mut circles = Vec::new();
    for k in 0..rng.gen_range(0..=3) {
        let a = phase + k as f64 * TAU / 3.0;
        let c = [28.0 * a.cos(), 28.0 * a.sin()];
        if rng.gen_bool(0.5) {
            circles.push((c, rng.gen_range(3.0..10.0)));
        } else {
            let m = rng.gen_range(3..=6);
            let rot = rng.gen_range(0.0..TAU);
            polygons.push(
                (0..m)
                    .map(|i| {
                        let t = rot + i as f64 * TAU / m as f64;
                        let r = rng.gen_range(4.0..10.0);
                        [c[0] + r * t.cos(), c[1] + r * t.sin()]
                    })
                    .collect(),
            );
        }
    }
    Region { outer, polygons, circles }
}

fn shoelace(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i][0] * p[(i + 1) % n][1] - p[(i + 1) % n][0] * p[i][1]).sum::<f64>() / 2.0
}

impl Region {
    /// Exact area, for reference only; the oracle is [`Region::grid_area`].
    pub fn exact_area(&self) -> f64 {
        shoelace(&self.outer).abs()
            - self.polygons.iter().map(|p| shoelace(p).abs()).sum::<f64>()
            - self.circles.iter().map(|(_, r)| std::f64::consts::PI * r * r).sum::<f64>()
    }

    /// Counts points of an `n × n` lattice over the bounding square, rotated
    /// by `theta` and shifted by `offset` cells, that fall inside the region.
    /// Each lattice row is scanned by intersecting it with the boundaries.
    pub fn grid_area(&self, n: usize, theta: f64, offset: [f64; 2]) -> f64 {
        let (s, c) = theta.sin_cos();
        let rot = |p: [f64; 2]| [c * p[0] - s * p[1], s * p[0] + c * p[1]];
        let outer: Vec<_> = self.outer.iter().map(|&p| rot(p)).collect();
        let polys: Vec<Vec<_>> = self.polygons.iter().map(|q| q.iter().map(|&p| rot(p)).collect()).collect();
        let circles: Vec<_> = self.circles.iter().map(|&(p, r)| (rot(p), r)).collect();

        let half_span = 110.0;
        let h = 2.0 * half_span / n as f64;
        let coord = |i: f64, o: f64| -half_span + (i + o) * h;
        // lattice points with coord(i) in [a, b)
        let count = |a: f64, b: f64, o: f64| -> i64 {
            let lo = ((a + half_span) / h - o).ceil() as i64;
            let hi = ((b + half_span) / h - o).ceil() as i64;
            (hi - lo).max(0)
        };
        let crossings = |poly: &[[f64; 2]], y: f64| {
            let mut xs = Vec::new();
            for i in 0..poly.len() {
                let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
                if (p[1] <= y) != (q[1] <= y) {
                    xs.push(p[0] + (y - p[1]) / (q[1] - p[1]) * (q[0] - p[0]));
                }
            }
            xs.sort_by(f64::total_cmp);
            xs
        };
        let mut inside: i64 = 0;
        for j in 0..n {
            let y = coord(j as f64, offset[1]);
            let spans = |xs: Vec<f64>| xs.chunks(2).map(|p| count(p[0], p[1], offset[0])).sum::<i64>();
            inside += spans(crossings(&outer, y));
            for p in &polys {
                inside -= spans(crossings(p, y));
            }
            for &(cc, r) in &circles {
                let dy = y - cc[1];
                if dy.abs() < r {
                    let dx = (r * r - dy * dy).sqrt();
                    inside -= count(cc[0] - dx, cc[0] + dx, offset[0]);
                }
            }
        }
        inside as f64 * h * h
    }
}

/// The region as the single planar face of an (open) solid.
pub fn region_solid(region: &Region) -> (sheetproc::brep::Solid, sheetproc::brep::FaceId) {
    use sheetproc::brep::{Point3, UnitVector};
    use sheetproc::build::{full_circle, polygon, SolidBuilder};
    let pts = |p: &[[f64; 2]]| p.iter().map(|q| Point3::new(q[0], q[1], 0.0)).collect::<Vec<_>>();
    let mut holes: Vec<_> = region.polygons.iter().map(|p| polygon(&pts(p))).collect();
    holes.extend(
        region.circles.iter().map(|&(c, r)| full_circle(Point3::new(c[0], c[1], 0.0), UnitVector::Z, r, UnitVector::X)),
    );
    let mut b = SolidBuilder::new("region");
    let face = b.plane(UnitVector::Z, &polygon(&pts(&region.outer)), &holes).expect("region face");
    (b.build().expect("region builds"), face)
}

/// Rotation by `angle` about the unit axis `k` (Rodrigues).
pub fn rotation(k: [f64; 3], angle: f64) -> impl Fn(sheetproc::brep::Point3) -> sheetproc::brep::Point3 {
    let (s, c) = angle.sin_cos();
    move |p| {
        let v = [p.x, p.y, p.z];
        let kv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
        let cross = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
        let r: Vec<f64> = (0..3).map(|i| v[i] * c + cross[i] * s + k[i] * kv * (1.0 - c)).collect();
        sheetproc::brep::Point3::new(r[0], r[1], r[2])
    }
}

pub fn random_axis(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0f64..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
