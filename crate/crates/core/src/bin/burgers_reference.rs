//! Regenerates `data/burgers_reference.csv`.
//!
//! Usage: `burgers_reference [output-path]`

use std::io::BufWriter;
use std::path::PathBuf;

use pimwnn::reference::{default_viscosity, reference_grid, ReferenceTable, REFERENCE_TIMES};

fn main() -> pimwnn::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/burgers_reference.csv"));
    let table = ReferenceTable::generate(&REFERENCE_TIMES, &reference_grid(), default_viscosity());
    table.write_csv(BufWriter::new(std::fs::File::create(&path)?))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
