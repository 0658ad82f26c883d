use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::failure::Failure;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("configuration blocks serialize")
}

/// `path` with its extension replaced, e.g. `run.csv` -> `run.json`.
pub fn sidecar(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

/// CSV with `# key: value` metadata lines above a fixed header.
pub struct CsvWriter {
    out: BufWriter<File>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, meta: &[(String, String)], header: &[&str]) -> Result<Self, Failure> {
        let file = File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        for (key, value) in meta {
            writeln!(out, "# {key}: {value}")?;
        }
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter { out, columns: header.len() })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), Failure> {
        debug_assert_eq!(fields.len(), self.columns);
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), Failure> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn sidecar_replaces_extension() {
        assert_eq!(sidecar(Path::new("out/run.csv"), "json"), Path::new("out/run.json"));
        assert_eq!(sidecar(Path::new("diagram.csv"), "leaves.csv"), Path::new("diagram.leaves.csv"));
    }
}
