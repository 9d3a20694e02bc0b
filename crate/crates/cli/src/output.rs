//! Output files and the manifest each of them carries.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Relative output paths are resolved against this directory when it is set.
pub const OUT_DIR_ENV: &str = "WALKSCALE_OUT_DIR";

/// Invalid combination of command-line flags.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    /// SHA-256 of the compact JSON of `config`.
    pub config_hash: String,
}

impl Manifest {
    pub fn new(command: &impl Serialize, seed: u64) -> Result<Manifest> {
        let config = serde_json::to_value(command)?;
        let digest = Sha256::digest(serde_json::to_string(&config)?.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Manifest { tool: "walkscale", version: env!("CARGO_PKG_VERSION"), seed, config, config_hash })
    }

    fn one_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Destination of one output document: a file or standard output.
pub struct Output(Option<PathBuf>);

impl Output {
    pub fn from(path: &Option<PathBuf>) -> Output {
        Output(path.as_ref().map(resolve))
    }

    pub fn file(path: impl AsRef<Path>) -> Output {
        Output(Some(resolve(path)))
    }

    fn write(&self, body: &str) -> Result<()> {
        match &self.0 {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                std::fs::write(p, body).with_context(|| format!("writing {}", p.display()))
            }
            None => {
                std::io::stdout().lock().write_all(body.as_bytes())?;
                Ok(())
            }
        }
    }

    /// `{"manifest": …, "result": …}`, pretty-printed.
    pub fn write_json(&self, m: &Manifest, result: &impl Serialize) -> Result<()> {
        let doc = serde_json::json!({ "manifest": m, "result": result });
        self.write(&(serde_json::to_string_pretty(&doc)? + "\n"))
    }

    /// Edge list preceded by a `#` manifest line.
    pub fn write_edges(&self, m: &Manifest, edges: &str) -> Result<()> {
        self.write(&format!("# {}\n{edges}", m.one_line()?))
    }

    /// CSV preceded by a `#` manifest line.
    pub fn write_csv(&self, m: &Manifest, csv: &str) -> Result<()> {
        self.write(&format!("# {}\n{csv}", m.one_line()?))
    }

    /// SVG with the manifest as a comment after the root element opens.
    pub fn write_svg(&self, m: &Manifest, svg: &str) -> Result<()> {
        let comment = format!("<!-- {} -->\n", m.one_line()?.replace("--", "- -"));
        let body = match svg.find('\n') {
            Some(i) => format!("{}{comment}{}", &svg[..=i], &svg[i + 1..]),
            None => format!("{svg}\n{comment}"),
        };
        self.write(&body)
    }
}

fn resolve(path: impl AsRef<Path>) -> PathBuf {
    let path = path.as_ref();
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}
