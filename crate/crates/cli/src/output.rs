use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use nsreg::spectral_field::snapshot::write_atomic;
use serde_json::{json, Value};

use crate::error::CliError;

pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("JSON values always serialize");
    bytes.push(b'\n');
    bytes
}

/// An output directory whose files are each written atomically and listed
/// in `index.json`, which is written last.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Mutex<Vec<String>>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Mutex::new(Vec::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Write `bytes` at `rel` (which may contain subdirectories).
    pub fn write(&self, rel: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        write_atomic(&path, bytes)?;
        self.files.lock().expect("file list lock").push(rel.to_string());
        Ok(())
    }

    pub fn write_json(&self, rel: &str, v: &Value) -> Result<(), CliError> {
        self.write(rel, &json_bytes(v))
    }

    /// Write `index.json` listing every file in sorted order.
    pub fn finish(self, command: &str, exit_code: i32, summary: Value) -> Result<(), CliError> {
        let mut files = self.files.into_inner().expect("file list lock");
        files.sort();
        let index = json!({
            "command": command,
            "exit_code": exit_code,
            "files": files,
            "summary": summary,
        });
        write_atomic(&self.root.join("index.json"), &json_bytes(&index))?;
        Ok(())
    }
}
