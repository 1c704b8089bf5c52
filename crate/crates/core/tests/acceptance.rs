//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! cargo test -p sheetproc --test acceptance

mod common;

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheetproc::brep::EdgeId;
use sheetproc::classify::{EdgeClass, EdgeClassTotals};
use sheetproc::params::{build_report, compute_process_parameters, ProcessParameters, Settings};
use sheetproc::pipeline::{analyze, load_model, InputFormat};
use sheetproc::resources::{MaterialDb, MaterialSpec, ToolDb};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn steel() -> MaterialSpec {
    MaterialSpec { name: "low_carbon_steel".into(), shear_stress: 100.0, yield_stress: 210.0 }
}

/// One printed row of the worked example table.
struct Row {
    file: &'static str,
    t: f64,
    n_cee: usize,
    n_cie: usize,
    n_iie: usize,
    tl_iie: f64,
    tl_cie: f64,
    tl_cee: f64,
    h: f64,
    fs: f64,
    fd: f64,
    fh: f64,
    h1: f64,
    h2: f64,
    /// Relative tolerance on Fd and Fh; `None` means 1 N absolute.
    rel: Option<f64>,
}

const ROWS: [Row; 4] = [
    Row {
        file: "row1_offset_tab.json",
        t: 2.0,
        n_cee: 0,
        n_cie: 1,
        n_iie: 3,
        tl_iie: 130.0,
        tl_cie: 30.0,
        tl_cee: 0.0,
        h: 10.0,
        fs: 26000.0,
        fd: 4200.0,
        fh: 5200.0,
        h1: 0.667,
        h2: 9.334,
        rel: None,
    },
    Row {
        file: "row2_drawn_cup.json",
        t: 2.0,
        n_cee: 0,
        n_cie: 2,
        n_iie: 0,
        tl_iie: 0.0,
        tl_cie: 62.83,
        tl_cee: 0.0,
        h: 10.0,
        fs: 0.0,
        fd: 8800.0,
        fh: 1760.0,
        h1: 0.0,
        h2: 10.0,
        rel: Some(0.005),
    },
    Row {
        file: "row3_hood.json",
        t: 2.0,
        n_cee: 0,
        n_cie: 3,
        n_iie: 1,
        tl_iie: 50.0,
        tl_cie: 71.0,
        tl_cee: 0.0,
        h: 10.0,
        fs: 10000.0,
        fd: 9940.0,
        fh: 2000.0,
        h1: 0.667,
        h2: 9.334,
        rel: None,
    },
    Row {
        file: "row4_bridge.json",
        t: 2.0,
        n_cee: 0,
        n_cie: 2,
        n_iie: 2,
        tl_iie: 100.0,
        tl_cie: 60.0,
        tl_cee: 0.0,
        h: 10.0,
        fs: 20000.0,
        fd: 8400.0,
        fh: 4000.0,
        h1: 0.667,
        h2: 9.334,
        rel: None,
    },
];

fn params_match(p: &ProcessParameters, row: &Row) -> Result<(), String> {
    let force = |name: &str, got: f64, want: f64, rel: Option<f64>| {
        let ok = match rel {
            Some(r) => (got - want).abs() <= r * want.abs().max(1.0),
            None => (got - want).abs() <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{} {name} {got:.3} vs {want}", row.file))
        }
    };
    force("Fs", p.fs, row.fs, None)?;
    force("Fd", p.fd, row.fd, row.rel)?;
    force("Fh", p.fh, row.fh, row.rel)?;
    for (name, got, want) in [("H1", p.h1, row.h1), ("H2", p.h2, row.h2)] {
        if (got - want).abs() > 0.002 {
            return Err(format!("{} {name} {got:.4} vs {want}", row.file));
        }
    }
    Ok(())
}

fn table_formula() -> Result<String, String> {
    let start = Instant::now();
    for row in &ROWS {
        let tot = EdgeClassTotals {
            n_cee: row.n_cee,
            n_cie: row.n_cie,
            n_iie: row.n_iie,
            tl_iie: row.tl_iie,
            tl_cie: row.tl_cie,
            tl_cee: row.tl_cee,
            ..Default::default()
        };
        let p = compute_process_parameters(&tot, row.t, row.h, &steel(), 1.0 / 3.0).map_err(|e| e.to_string())?;
        params_match(&p, row)?;
    }
    Ok(format!("4 rows in {:.2} ms", start.elapsed().as_secs_f64() * 1e3))
}

fn end_to_end() -> Result<String, String> {
    let start = Instant::now();
    let mat = MaterialDb::builtin().get("low_carbon_steel").map_err(|e| e.to_string())?.clone();
    let tool = ToolDb::builtin().get("punching_press").map_err(|e| e.to_string())?.clone();
    for row in &ROWS {
        let path = fixtures().join("table1").join(row.file);
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let model = load_model(&text, InputFormat::BrepJson).map_err(|e| e.to_string())?;
        let a = analyze(&model.solid).map_err(|e| e.to_string())?;
        if a.features.len() != 1 {
            return Err(format!("{}: {} features", row.file, a.features.len()));
        }
        let f = &a.features[0];
        let tot = f.totals;
        // the cup's rim is a full circle of radius 10; the printed 62.83 is rounded
        let tl_cie = if row.n_iie == 0 { TAU * 10.0 } else { row.tl_cie };
        let counts = (tot.n_cee, tot.n_cie, tot.n_iie) == (row.n_cee, row.n_cie, row.n_iie);
        let lengths = [(tot.tl_iie, row.tl_iie), (tot.tl_cie, tl_cie), (tot.tl_cee, row.tl_cee)]
            .iter()
            .all(|(g, w)| (g - w).abs() <= 1e-6);
        let h = f.height.clone().map_err(|e| e.to_string())?;
        if !counts || !lengths || (a.metrics.thickness - row.t).abs() > 1e-6 || (h - row.h).abs() > 1e-6 {
            return Err(format!("{}: extracted {:?}, t {}, h {}", row.file, tot, a.metrics.thickness, h));
        }
        let reports = build_report(&a.feature_inputs(), &a.metrics, &mat, &tool, &Settings::default());
        let p = reports[0].result.as_ref().map_err(|e| e.to_string())?;
        params_match(p, row)?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 1.0 {
        return Err(format!("took {elapsed:.3} s"));
    }
    Ok(format!("4 fixtures in {:.1} ms", elapsed * 1e3))
}

fn step_flat_sheet() -> Result<String, String> {
    let path = fixtures().join("flat_sheet.step");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let model = load_model(&text, InputFormat::Step).map_err(|e| e.to_string())?;
    let violations = model.solid.validate_manifold();
    if !violations.is_empty() {
        return Err(format!("{} manifold violations", violations.len()));
    }
    let a = analyze(&model.solid).map_err(|e| e.to_string())?;
    let area = model.solid.face_area(a.metrics.reference_face).map_err(|e| e.to_string())?;
    let classes: Vec<EdgeClass> = a.classification.edges.values().copied().collect();
    if (a.metrics.thickness - 2.0).abs() > 1e-6 || (area - 8000.0).abs() > 1e-6 {
        return Err(format!("t {} area {}", a.metrics.thickness, area));
    }
    if classes != [EdgeClass::Iee; 4] {
        return Err(format!("classes {classes:?}"));
    }
    Ok(format!("t {} area {} 4 IEE", a.metrics.thickness, area))
}

fn partition() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
    let models = 220;
    let mut violations = Vec::new();
    let mut edges_seen = 0;
    for m in 0..models {
        let (layout, expected, _) = common::random_sheet(&mut rng);
        let solid = match layout.build(format!("random_{m}")) {
            Ok(s) => s,
            Err(e) => {
                violations.push(format!("model {m}: build {e}"));
                continue;
            }
        };
        let a = match analyze(&solid) {
            Ok(a) => a,
            Err(e) => {
                violations.push(format!("model {m}: {e}"));
                continue;
            }
        };
        let rf = solid.face(a.metrics.reference_face).map_err(|e| e.to_string())?;
        let mut rf_edges: Vec<EdgeId> = Vec::new();
        for b in &rf.bounds {
            rf_edges.extend(solid.get_loop(b.loop_id).map_err(|e| e.to_string())?.edges.iter().map(|oe| oe.edge));
        }
        edges_seen += rf_edges.len();
        let distinct: BTreeSet<EdgeId> = rf_edges.iter().copied().collect();
        let classified: BTreeSet<EdgeId> = a.classification.edges.keys().copied().collect();
        let mut got = EdgeClassTotals::default();
        for (&e, &c) in &a.classification.edges {
            got.add(c, solid.edge_length(e).map_err(|e| e.to_string())?);
        }
        let mut owned: Vec<EdgeId> = a.classification.by_feature.values().flatten().map(|&(e, _)| e).collect();
        let owned_len = owned.len();
        owned.sort();
        owned.dedup();
        if distinct.len() != rf_edges.len() || distinct != classified || got.count() != rf_edges.len() {
            violations.push(format!("model {m}: {} edges, {} classified", rf_edges.len(), got.count()));
        } else if owned.len() != owned_len {
            violations.push(format!("model {m}: an edge belongs to two features"));
        } else if !common::totals_match(&got, &expected, 1e-6) {
            violations.push(format!("model {m}: {got:?} expected {expected:?}"));
        }
    }
    if violations.is_empty() {
        Ok(format!("{models} models, {edges_seen} edges, 0 violations"))
    } else {
        Err(format!("{} violation(s); first: {}", violations.len(), violations[0]))
    }
}

fn area_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
    let mut worst: f64 = 0.0;
    let mut circles = 0;
    for i in 0..100 {
        let region = common::random_region(&mut rng);
        circles += region.circles.len();
        let (solid, face) = common::region_solid(&region);
        let solid = solid.transformed(common::rotation(common::random_axis(&mut rng), rng.gen_range(0.0..TAU)));
        let area = solid.face_area(face).map_err(|e| e.to_string())?;
        let theta = rng.gen_range(0.0..TAU);
        let oracle = region.grid_area(1000, theta, [rng.gen(), rng.gen()]);
        let rel = (area - oracle).abs() / oracle;
        worst = worst.max(rel);
        if rel > 1e-3 {
            return Err(format!("region {i}: face_area {area:.3} vs grid {oracle:.3}"));
        }
    }
    Ok(format!("100 regions ({circles} circular holes), worst {:.4}%", worst * 100.0))
}

fn formula_properties() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
    let rel_eq = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let mut violations = Vec::new();
    for i in 0..1000 {
        let n_iie = rng.gen_range(0..4usize);
        let n_cie = rng.gen_range(0..4usize);
        let n_cee = rng.gen_range(0..3usize);
        let mut len = |n: usize| (0..n).map(|_| rng.gen_range(1.0..200.0)).sum::<f64>();
        let tot = EdgeClassTotals { n_iie, n_cie, n_cee, tl_iie: len(n_iie), tl_cie: len(n_cie), tl_cee: len(n_cee), ..Default::default() };
        let t = rng.gen_range(0.3..6.0);
        let h = rng.gen_range(t..60.0);
        let mat = MaterialSpec { name: "m".into(), shear_stress: rng.gen_range(50.0..600.0), yield_stress: rng.gen_range(100.0..900.0) };
        let kd = rng.gen_range(0.1..1.0);
        let k = rng.gen_range(0.1..10.0);
        let run = |tot: &EdgeClassTotals, t: f64| compute_process_parameters(tot, t, h, &mat, kd);
        let p = match run(&tot, t) {
            Ok(p) => p,
            Err(e) => {
                violations.push(format!("set {i}: {e}"));
                continue;
            }
        };
        let scaled = EdgeClassTotals { tl_iie: k * tot.tl_iie, tl_cie: k * tot.tl_cie, tl_cee: k * tot.tl_cee, ..tot };
        let by_len = run(&scaled, t).map_err(|e| e.to_string())?;
        let by_t = run(&tot, k * t);
        let mut check = |ok: bool, what: &str| {
            if !ok {
                violations.push(format!("set {i}: {what}"));
            }
        };
        check(p.fh == 0.2 * p.fs.max(p.fd), "Fh");
        check(n_iie == 0 || rel_eq(p.h1 + p.h2, h), "H1 + H2");
        check(rel_eq(by_len.fs, k * p.fs) && rel_eq(by_len.fd, k * p.fd), "homogeneous in lengths");
        // scaling t can push H1 past h; only the forces matter here
        let (fs_t, fd_t) = match by_t {
            Ok(q) => (q.fs, q.fd),
            Err(_) => (mat.shear_stress * k * t * tot.tl_iie, kd * mat.yield_stress * k * t * (tot.tl_cie + tot.tl_cee)),
        };
        check(rel_eq(fs_t, k * p.fs) && rel_eq(fd_t, k * p.fd), "homogeneous in t");
        check((n_iie == 0) == (p.fs == 0.0) && (p.fs == 0.0) == (p.h1 == 0.0), "branch");
    }
    if violations.is_empty() {
        Ok("1000 sets, 0 violations".into())
    } else {
        Err(format!("{} violation(s); first: {}", violations.len(), violations[0]))
    }
}

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 6] = [
        ("table 1 formula reproduction", table_formula),
        ("table 1 end-to-end fixtures", end_to_end),
        ("STEP flat sheet ingestion", step_flat_sheet),
        ("edge class partition", partition),
        ("face area vs grid oracle", area_oracle),
        ("formula properties", formula_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
