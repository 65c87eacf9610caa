//! Text rendering helpers and the run manifest.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Quotes a field for comma-delimited output when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn trim_decimal(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Fixed decimals with trailing zeros trimmed; never prints `-0`.
pub fn format_fixed(x: f64, decimals: usize) -> String {
    trim_decimal(format!("{x:.decimals$}"))
}

/// `digits` significant digits, plain (non-exponent) notation, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format_fixed(x, decimals)
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Every artifact written by a run, in write order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path,bytes,sha256\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(&e.path),
                e.bytes,
                e.sha256
            ));
        }
        out
    }

    pub fn contains(&self, path: &str) -> bool {
        self.entries.iter().any(|e| e.path == path)
    }
}

/// Writes artifacts under one directory and records them in a manifest.
pub struct ArtifactWriter {
    root: PathBuf,
    manifest: Manifest,
}

impl ArtifactWriter {
    pub fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(ArtifactWriter {
            root: root.to_path_buf(),
            manifest: Manifest::default(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, relative: &str, contents: &str) -> Result<()> {
        let path = self.root.join(relative);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.manifest.entries.push(ManifestEntry {
            path: relative.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    /// Writes `manifest.csv` (not listed in itself) and returns the manifest.
    pub fn finish(self) -> Result<Manifest> {
        let path = self.root.join("manifest.csv");
        std::fs::write(&path, self.manifest.to_csv()).map_err(|e| Error::io(&path, e))?;
        Ok(self.manifest)
    }
}
