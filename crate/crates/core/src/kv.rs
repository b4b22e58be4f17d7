//! Line-oriented `key = value` text with `#` comments.

use std::path::Path;

use crate::{Error, Result};

#[derive(Clone, Debug, Default)]
pub(crate) struct KvFile {
    pub entries: Vec<(String, String)>,
}

impl KvFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    msg: format!("line {}: expected `key = value`", lineno + 1),
                });
            };
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse_field<T: std::str::FromStr>(&self, key: &str, path: &Path) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| Error::Config {
                path: path.to_path_buf(),
                field: key.to_string(),
                msg: format!("cannot parse `{v}`"),
            }),
        }
    }
}
