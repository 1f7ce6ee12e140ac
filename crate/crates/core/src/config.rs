//! Experiment configuration: plain-text key=value files, overridable by
//! command-line flags of the same names; a single environment variable may
//! override the output directory.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Environment variable overriding the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "CUSPED_OUT";

/// Raw key=value configuration, last write wins.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct KeyValues(pub BTreeMap<String, String>);

impl KeyValues {
    /// Parse `key = value` lines; '#' starts a comment, blank lines are
    /// skipped.
    pub fn parse(text: &str) -> Result<KeyValues, String> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got {raw:?}", lineno + 1))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(KeyValues(map))
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.0.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    pub fn get_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| format!("bad value for {key}: {s:?}")),
        }
    }

    pub fn require_num<T: std::str::FromStr>(&self, key: &str) -> Result<T, String> {
        self.parse_num(key)?
            .ok_or_else(|| format!("missing required key {key}"))
    }

    /// Output directory: flag/config value, overridden by the environment.
    /// A flag set after `apply_env` still wins because flags are applied
    /// last by the CLI.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                self.set("out", dir);
            }
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get_or("out", "."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let kv = KeyValues::parse("family = free\n# comment\nradius=4 # trailing\n").unwrap();
        assert_eq!(kv.get("family"), Some("free"));
        assert_eq!(kv.get("radius"), Some("4"));
        assert_eq!(kv.require_num::<u32>("radius").unwrap(), 4);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(KeyValues::parse("radius 4").is_err());
        let kv = KeyValues::parse("radius=x").unwrap();
        assert!(kv.parse_num::<u32>("radius").is_err());
    }
}
