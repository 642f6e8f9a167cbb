//! Reading input documents and writing CSV tables.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use timtin_core::{ChannelSpec, Decomposition, DecompositionDoc, TxConfig};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_channel(path: &Path) -> Result<ChannelSpec> {
    ChannelSpec::from_json(&read_text(path)?).with_context(|| format!("{}", path.display()))
}

pub fn read_tx(path: &Path) -> Result<TxConfig> {
    TxConfig::from_json(&read_text(path)?).with_context(|| format!("{}", path.display()))
}

pub fn read_decomposition(path: &Path) -> Result<(ChannelSpec, Decomposition)> {
    let doc = DecompositionDoc::from_json(&read_text(path)?).with_context(|| format!("{}", path.display()))?;
    doc.into_parts().with_context(|| format!("{}", path.display()))
}

/// Serializes `rows` as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn write_csv_to<T: Serialize>(rows: &[T], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            write_csv(rows, std::io::BufWriter::new(file))
        }
        None => write_csv(rows, std::io::stdout().lock()),
    }
}
