use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

pub use armax_core::io::{fmt_float, fmt_opt};

/// Stdout when `path` is `None`.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?,
            ))
        }
        None => Box::new(io::stdout().lock()),
    })
}

/// `out.csv` -> `out<suffix>`, e.g. `out.json` or `out_runs.csv`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn write_table(path: Option<&Path>, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    let io_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut w = sink(Some(path))?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Joins flags with `;`, `ok` when there are none.
pub fn flag_cell(flags: &[String]) -> String {
    if flags.is_empty() {
        "ok".to_string()
    } else {
        flags.join(";")
    }
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar(Path::new("a/b/path.csv"), ".json"), PathBuf::from("a/b/path.json"));
        assert_eq!(sidecar(Path::new("x.csv"), "_runs.csv"), PathBuf::from("x_runs.csv"));
    }

    #[test]
    fn flags() {
        assert_eq!(flag_cell(&[]), "ok");
        assert_eq!(flag_cell(&["a".into(), "b".into()]), "a;b");
    }
}
