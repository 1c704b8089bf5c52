//! Regenerates the JSON fixtures in `fixtures/` from the reference parts.
//!
//! cargo run -p sheetproc --example write_fixtures

use std::path::Path;

use sheetproc::brep::to_brep_json;
use sheetproc::build::parts::fixture_parts;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for (file, solid) in fixture_parts() {
        let path = dir.join(file);
        std::fs::create_dir_all(path.parent().expect("fixture paths have a parent"))?;
        std::fs::write(path, to_brep_json(&solid))?;
    }
    Ok(())
}
