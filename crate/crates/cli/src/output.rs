//! Report files: every file carries the resolved configuration and a SHA-256
//! of its content, and is written through a temporary file and a rename.

use crate::error::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "BTH_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "bth-out";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Body<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    result: &'a R,
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    #[serde(flatten)]
    body: Body<'a, C, R>,
    /// SHA-256 of the compact JSON of the other fields.
    content_sha256: String,
}

/// Where a command writes.
#[derive(Clone, Debug)]
pub struct Sink {
    pub dir: PathBuf,
}

impl Sink {
    /// `--out-dir`, else `$BTH_OUT_DIR`, else `./bth-out`.
    pub fn resolve(flag: Option<PathBuf>) -> Sink {
        let dir = flag
            .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        Sink { dir }
    }

    fn write_atomic(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| io_at(&self.dir, e))?;
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes).map_err(|e| io_at(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io_at(&path, e))?;
        Ok(path)
    }

    /// Writes `{command, version, config, result, content_sha256}` as pretty JSON.
    pub fn json<C: Serialize, R: Serialize>(
        &self,
        name: &str,
        command: &str,
        config: &C,
        result: &R,
    ) -> Result<PathBuf, CliError> {
        let body = Body { command, version: env!("CARGO_PKG_VERSION"), config, result };
        let content_sha256 = sha256_hex(&serde_json::to_vec(&body)?);
        let mut text = serde_json::to_string_pretty(&Document { body, content_sha256 })?;
        text.push('\n');
        self.write_atomic(name, text.as_bytes())
    }

    /// Writes a CSV preceded by `#` lines holding the configuration and the
    /// SHA-256 of the data rows. Returns the path and that hash.
    pub fn csv<C: Serialize>(&self, name: &str, command: &str, config: &C, data: &str) -> Result<(PathBuf, String), CliError> {
        let hash = sha256_hex(data.as_bytes());
        let header = format!(
            "# command: {command}\n# version: {}\n# config: {}\n# content_sha256: {hash}\n",
            env!("CARGO_PKG_VERSION"),
            serde_json::to_string(config)?
        );
        let path = self.write_atomic(name, format!("{header}{data}").as_bytes())?;
        Ok((path, hash))
    }
}

fn io_at(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Reads a file, treating an empty file as unparsable.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_at(path, e))?;
    if text.trim().is_empty() {
        return Err(CliError::Io(format!("{}: file is empty", path.display())));
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_hash_covers_the_rows() {
        let dir = tempfile::TempDir::new().unwrap();
        let sink = Sink { dir: dir.path().to_path_buf() };
        let (path, hash) = sink.csv("a.csv", "cmd", &serde_json::json!({"k": 1}), "t\n0\n").unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.contains(&format!("# content_sha256: {hash}\n")));
        let rows: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert_eq!(sha256_hex(rows.as_bytes()), hash);
        assert!(!dir.path().join(".a.csv.tmp").exists());
    }

    #[test]
    fn empty_inputs_are_io_errors() {
        let dir = tempfile::TempDir::new().unwrap();
        let f = dir.path().join("e");
        fs::write(&f, "  \n").unwrap();
        assert!(matches!(read_input(&f), Err(CliError::Io(_))));
    }
}
