//! Merging of command-line flags with an optional TOML config file. Keys in
//! the file override flags; unknown keys are rejected.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub fn merge<T: Serialize + DeserializeOwned>(flags: T, file: Option<&Path>) -> Result<T> {
    let Some(path) = file else {
        return Ok(flags);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let overrides: toml::Table =
        toml::from_str(&text).with_context(|| format!("invalid TOML in {}", path.display()))?;
    let mut merged = toml::Table::try_from(&flags).context("cannot serialize flags")?;
    for (k, v) in overrides {
        merged.insert(k, v);
    }
    let de = toml::Value::Table(merged);
    serde_path_to_error::deserialize(de)
        .map_err(|e| {
            let msg = e.inner().to_string();
            let first = msg.lines().next().unwrap_or_default().to_string();
            anyhow!("config {}: at '{}': {}", path.display(), e.path(), first)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;
    use std::io::Write;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Flags {
        a: f64,
        b: usize,
        c: Option<String>,
    }

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn file_keys_override_flags() {
        let flags = Flags { a: 1.0, b: 2, c: None };
        let f = file("b = 7\nc = \"x\"\n");
        let merged = merge(flags, Some(f.path())).unwrap();
        assert_eq!(merged, Flags { a: 1.0, b: 7, c: Some("x".into()) });
    }

    #[test]
    fn unknown_and_mistyped_keys_are_rejected_with_their_path() {
        let err = merge(Flags { a: 1.0, b: 2, c: None }, Some(file("z = 1\n").path())).unwrap_err();
        assert!(err.to_string().contains("'z'"), "{err}");
        let err = merge(Flags { a: 1.0, b: 2, c: None }, Some(file("b = -1.5\n").path())).unwrap_err();
        assert!(err.to_string().contains("'b'"), "{err}");
    }
}
