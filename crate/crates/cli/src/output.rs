use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;

/// Seventeen significant digits, independent of locale.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cplx(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

/// Renders a header and rows as RFC 4180 CSV.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().context("flushing CSV")
}

/// Writes to `path` through a sibling temporary file and a rename, or to stdout.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(p).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}
