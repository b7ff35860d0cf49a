//! Output files: every CSV starts with `# tool_version=` and `# config=` lines,
//! every JSON document carries `tool_version` and `config` fields.

use std::fs;
use std::path::{Path, PathBuf};

use geodesic_lab::TOOL_VERSION;
use serde::Serialize;

use crate::config::RunConfig;
use crate::Failure;

pub fn config_json(cfg: &RunConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))
}

pub fn path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        ensure_dir(dir)?;
    }
    fs::write(path, bytes).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// CSV with provenance lines, then `extra` metadata, then the body.
pub fn csv_file(
    path: &Path,
    cfg: &RunConfig,
    extra: &[(String, String)],
    body: impl FnOnce(&mut Vec<u8>) -> geodesic_lab::Result<()>,
) -> Result<(), Failure> {
    let mut buf = format!("# tool_version={TOOL_VERSION}\n# config={}\n", config_json(cfg)).into_bytes();
    for (k, v) in extra {
        buf.extend_from_slice(format!("# {k}={v}\n").as_bytes());
    }
    body(&mut buf)?;
    write(path, &buf)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool_version: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json_file<T: Serialize>(path: &Path, cfg: &RunConfig, body: &T) -> Result<(), Failure> {
    let env = Envelope { tool_version: TOOL_VERSION, config: cfg, body };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| Failure::runtime(e.to_string()))?;
    text.push('\n');
    write(path, text.as_bytes())
}
