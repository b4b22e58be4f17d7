//! Regenerates the bundled maps and scenario configs.
//!
//! ```text
//! cargo run --example generate_maps [-- <dir>]
//! ```

use std::path::PathBuf;

use explora::scenarios::{bundled_dir, write_bundled, BUNDLED_RESOLUTION};

fn main() -> explora::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(bundled_dir);
    for cfg in write_bundled(&dir, BUNDLED_RESOLUTION)? {
        println!("{}", cfg.display());
    }
    Ok(())
}
