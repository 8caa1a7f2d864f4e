//! Atomic artifact writes and machine-readable run manifests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use monopsono::{Error, Result};
use serde_json::json;
use sha2::{Digest, Sha256};

/// Write via a temporary file in the same directory, then rename, so a
/// crashed run never leaves a truncated artifact behind.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(&buf)?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Inputs, parameters, and outputs of one subcommand run. Deliberately
/// carries no timestamps: identical runs produce identical manifests.
pub struct RunManifest {
    subcommand: &'static str,
    parameters: BTreeMap<String, String>,
    inputs: Vec<(PathBuf, String)>,
    outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str) -> RunManifest {
        RunManifest {
            subcommand,
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_owned(), value.to_string());
    }

    pub fn parameters(&mut self, entries: &BTreeMap<String, String>) {
        for (k, v) in entries {
            self.parameters.insert(k.clone(), v.clone());
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push((path.to_owned(), sha256_file(path)?));
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_owned());
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let doc = json!({
            "subcommand": self.subcommand,
            "version": env!("CARGO_PKG_VERSION"),
            "parameters": self.parameters,
            "inputs": self.inputs.iter().map(|(p, h)| json!({
                "path": p.display().to_string(),
                "sha256": h,
            })).collect::<Vec<_>>(),
            "outputs": self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        });
        let path = out_dir.join(format!("manifest_{}.json", self.subcommand));
        write_atomic(&path, |buf| {
            buf.extend_from_slice(serde_json::to_string_pretty(&doc).unwrap().as_bytes());
            buf.push(b'\n');
            Ok(())
        })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_tmp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_atomic(&path, |buf| {
            buf.extend_from_slice(b"a,b\n1,2\n");
            Ok(())
        })
        .unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        assert!(!path.with_extension("tmp").exists());
    }

    #[test]
    fn manifest_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        std::fs::write(&input, "x\n1\n").unwrap();

        let render = || {
            let mut m = RunManifest::new("synth");
            m.parameter("seed", 7);
            m.input(&input).unwrap();
            m.output(&dir.path().join("out.csv"));
            let path = m.write(dir.path()).unwrap();
            std::fs::read_to_string(path).unwrap()
        };
        assert_eq!(render(), render());
    }
}
