//! Run configuration: command-line flags over environment over an optional
//! `key=value` file over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Keys accepted in a configuration file.
pub const KEYS: [&str; 3] = ["digits", "workers", "format"];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FileConfig {
    pub values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key=value", i + 1);
            };
            let k = k.trim();
            if !KEYS.contains(&k) {
                bail!("line {}: unknown key `{k}`", i + 1);
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = FileConfig::parse("# defaults\ndigits = 80\n\nworkers=4\n").unwrap();
        assert_eq!(c.get::<u32>("digits").unwrap(), Some(80));
        assert_eq!(c.get::<usize>("workers").unwrap(), Some(4));
        assert_eq!(c.get::<String>("format").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(FileConfig::parse("digits").is_err());
        assert!(FileConfig::parse("colour=red").is_err());
        assert!(FileConfig::parse("digits=abc").unwrap().get::<u32>("digits").is_err());
    }
}
