//! Regenerates the bundled optima tables under `data/optima/`.

use std::path::PathBuf;

use ceda2_core::benchmarks::optima::{file_name, format_table, generate, STORED_IDS};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/optima");
    for id in STORED_IDS {
        let rows = generate(id).expect("stored id has a generator");
        std::fs::write(dir.join(file_name(id)), format_table(&rows))?;
        println!("f{id}: {} optima", rows.len());
    }
    Ok(())
}
