//! Regenerates the bundled `data/` directory.
//!
//! cargo run -p punforge-core --example write_fixtures [-- OUT_DIR]

use std::path::PathBuf;

fn main() -> punforge_core::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    punforge_core::fixtures::write_all(&dir)?;
    println!("wrote {}", dir.display());
    Ok(())
}
