//! INI-style configuration: `[section]` headers over flat `key = value`
//! lines. Comments start with `#` or `;`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use monopsono::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct IniConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl IniConfig {
    pub fn load(path: &Path) -> Result<IniConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        IniConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<IniConfig> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(Error::Parse {
                        row: i + 1,
                        column: "section".into(),
                        message: format!("unterminated section header `{line}`"),
                    });
                }
                current = line[1..line.len() - 1].trim().to_owned();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                row: i + 1,
                column: "line".into(),
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            sections
                .entry(current.clone())
                .or_default()
                .insert(key.trim().to_owned(), value.trim().to_owned());
        }
        Ok(IniConfig { sections })
    }

    pub fn section(&self, name: &str) -> Section<'_> {
        Section {
            name: name.to_owned(),
            values: self.sections.get(name),
        }
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }
}

/// View over one section with typed accessors.
pub struct Section<'a> {
    name: String,
    values: Option<&'a BTreeMap<String, String>>,
}

impl<'a> Section<'a> {
    pub fn get(&self, key: &str) -> Option<&'a str> {
        self.values.and_then(|m| m.get(key)).map(String::as_str)
    }

    pub fn get_path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::domain(format!(
                    "[{}] {key}: invalid value `{raw}`",
                    self.name
                ))
            }),
        }
    }

    pub fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    /// Comma-separated f64 list.
    pub fn parse_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map(Some)
                .map_err(|_| {
                    Error::domain(format!("[{}] {key}: invalid list `{raw}`", self.name))
                }),
        }
    }

    /// All key-value pairs, for the run manifest.
    pub fn entries(&self) -> BTreeMap<String, String> {
        self.values.cloned().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_values() {
        let cfg = IniConfig::parse(
            "# comment\n[synth]\nseed = 7\nn_zones=50\n\n[spec.custom]\noutcome = emp_ft\n",
        )
        .unwrap();
        assert_eq!(cfg.section("synth").get("seed"), Some("7"));
        assert_eq!(cfg.section("synth").parse_or("n_zones", 0usize).unwrap(), 50);
        assert_eq!(cfg.section("spec.custom").get("outcome"), Some("emp_ft"));
        assert_eq!(cfg.section("missing").get("x"), None);
        assert!(cfg.has_section("spec.custom"));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(IniConfig::parse("[open\n").is_err());
        assert!(IniConfig::parse("no equals sign\n").is_err());
    }

    #[test]
    fn parses_lists() {
        let cfg = IniConfig::parse("[x]\ngrid = 0.0, 0.5,1.0\n").unwrap();
        assert_eq!(
            cfg.section("x").parse_list("grid").unwrap().unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        let bad = IniConfig::parse("[x]\ngrid = a,b\n").unwrap();
        assert!(bad.section("x").parse_list("grid").is_err());
    }
}
