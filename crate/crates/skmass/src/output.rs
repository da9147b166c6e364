use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use crate::config::Format;

/// Rows as a JSON array of objects or as CSV with the struct fields as columns.
pub fn write_rows<R: Serialize, W: Write>(rows: &[R], format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
