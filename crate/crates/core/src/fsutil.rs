use std::io::Write;
use std::path::Path;

use crate::Result;

/// Writes `bytes` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never observe a partially written file.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Decodes a JSON document carrying a top-level `format_version`, rejecting
/// versions other than `expected` before looking at the rest of the body.
pub(crate) fn decode_versioned<T: serde::de::DeserializeOwned>(
    bytes: &[u8],
    expected: u64,
) -> Result<T> {
    let value: serde_json::Value = serde_json::from_slice(bytes)?;
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| crate::Error::Malformed("missing integer `format_version`".into()))?;
    if found != expected {
        return Err(crate::Error::FormatVersion { found, expected });
    }
    Ok(serde_json::from_value(value)?)
}
