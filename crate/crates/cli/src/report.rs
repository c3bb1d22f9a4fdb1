use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::RunConfig;

pub const SCHEMA: &str = "bscope/1";

/// The report envelope. Everything except `sidecar` is a pure function of
/// the config and the tool version.
pub fn envelope(cfg: &RunConfig, result: Value, status: &str) -> Value {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "schema": SCHEMA,
        "tool": "bscope",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command,
        "status": status,
        "config": cfg,
        "result": result,
        "sidecar": {"generated_unix": now},
    })
}

/// Writes to `out` through a temporary file in the same directory, or to
/// stdout when no path is given.
pub fn write_output(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
