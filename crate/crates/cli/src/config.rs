//! Flat `key = value` experiment configuration with strict key checking.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(k) = &self.key {
            write!(f, "key '{k}': ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: Option<usize>,
}

/// Parsed configuration: defaults for a subcommand overlaid with file values.
#[derive(Debug, Clone)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

impl Config {
    /// Defaults only.
    pub fn from_defaults(defaults: &[(&str, &str)]) -> Self {
        let entries = defaults
            .iter()
            .map(|&(k, v)| {
                (
                    k.to_string(),
                    Entry {
                        value: v.to_string(),
                        line: None,
                    },
                )
            })
            .collect();
        Self { entries }
    }

    /// Overlays `text` on `defaults`; keys outside `defaults` are rejected.
    pub fn parse(text: &str, defaults: &[(&str, &str)]) -> Result<Self, ConfigError> {
        let mut cfg = Self::from_defaults(defaults);
        let mut seen = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    key: None,
                    message: format!("expected 'key = value', got '{content}'"),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            let err = |message: String| ConfigError {
                line: Some(line),
                key: Some(k.to_string()),
                message,
            };
            if k.is_empty() {
                return Err(ConfigError {
                    line: Some(line),
                    key: None,
                    message: "empty key".into(),
                });
            }
            if v.is_empty() {
                return Err(err("empty value".into()));
            }
            let Some(entry) = cfg.entries.get_mut(k) else {
                return Err(err("unknown key".into()));
            };
            if let Some(prev) = seen.insert(k.to_string(), line) {
                return Err(err(format!("duplicate key (first set on line {prev})")));
            }
            entry.value = v.to_string();
            entry.line = Some(line);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path, defaults: &[(&str, &str)]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, defaults)
    }

    pub fn set(&mut self, key: &str, value: String) {
        if let Some(e) = self.entries.get_mut(key) {
            e.value = value;
            e.line = None;
        }
    }

    fn entry(&self, key: &str) -> &Entry {
        self.entries
            .get(key)
            .unwrap_or_else(|| panic!("config key '{key}' missing from the defaults table"))
    }

    fn error(&self, key: &str, message: String) -> ConfigError {
        ConfigError {
            line: self.entry(key).line,
            key: Some(key.to_string()),
            message,
        }
    }

    pub fn str(&self, key: &str) -> &str {
        &self.entry(key).value
    }

    pub fn get<V: FromStr>(&self, key: &str) -> Result<V, ConfigError> {
        let raw = self.str(key);
        raw.parse()
            .map_err(|_| self.error(key, format!("cannot parse '{raw}' as {}", short_type::<V>())))
    }

    /// Comma-separated list; empty items are rejected.
    pub fn list<V: FromStr>(&self, key: &str) -> Result<Vec<V>, ConfigError> {
        self.str(key)
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse()
                    .map_err(|_| self.error(key, format!("cannot parse list item '{item}' as {}", short_type::<V>())))
            })
            .collect()
    }

    /// `None` when the value is `auto`.
    pub fn auto_or<V: FromStr>(&self, key: &str) -> Result<Option<V>, ConfigError> {
        if self.str(key).eq_ignore_ascii_case("auto") {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    /// One of `choices`, case-insensitively.
    pub fn choice(&self, key: &str, choices: &[&'static str]) -> Result<&'static str, ConfigError> {
        let raw = self.str(key);
        choices
            .iter()
            .find(|c| c.eq_ignore_ascii_case(raw))
            .copied()
            .ok_or_else(|| self.error(key, format!("'{raw}' is not one of {}", choices.join(", "))))
    }

    pub fn choices(&self, key: &str, choices: &[&'static str]) -> Result<Vec<&'static str>, ConfigError> {
        self.str(key)
            .split(',')
            .map(|item| {
                let item = item.trim();
                choices
                    .iter()
                    .find(|c| c.eq_ignore_ascii_case(item))
                    .copied()
                    .ok_or_else(|| self.error(key, format!("'{item}' is not one of {}", choices.join(", "))))
            })
            .collect()
    }

    /// Positive value, or a config error naming the key.
    pub fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.get(key)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.error(key, format!("must be positive, got {v}")))
        }
    }
}

fn short_type<V>() -> &'static str {
    let full = std::any::type_name::<V>();
    full.rsplit("::").next().unwrap_or(full)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULTS: &[(&str, &str)] = &[("solver.tol", "1e-6"), ("solver.methods", "tstmr"), ("illposed.mu", "auto")];

    #[test]
    fn overlay_and_comments() {
        let c = Config::parse("# header\nsolver.tol = 1e-8   # tighter\n\n", DEFAULTS).unwrap();
        assert_eq!(c.get::<f64>("solver.tol").unwrap(), 1e-8);
        assert_eq!(c.str("solver.methods"), "tstmr");
        assert_eq!(c.auto_or::<f64>("illposed.mu").unwrap(), None);
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = Config::parse("solver.tol = 1\nsolver.tl = 2\n", DEFAULTS).unwrap_err();
        assert_eq!(e.line, Some(2));
        assert_eq!(e.key.as_deref(), Some("solver.tl"));
        assert!(e.to_string().contains("unknown key"));
    }

    #[test]
    fn malformed_and_duplicate_lines() {
        assert_eq!(Config::parse("solver.tol 1e-6", DEFAULTS).unwrap_err().line, Some(1));
        let e = Config::parse("solver.tol = 1\nsolver.tol = 2", DEFAULTS).unwrap_err();
        assert!(e.message.contains("line 1"));
        assert!(Config::parse("solver.tol =", DEFAULTS).is_err());
    }

    #[test]
    fn typed_errors_carry_context() {
        let c = Config::parse("\nsolver.tol = fast", DEFAULTS).unwrap();
        let e = c.get::<f64>("solver.tol").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.to_string().starts_with("line 2: key 'solver.tol'"));
        assert!(c.positive("solver.tol").is_err());
    }

    #[test]
    fn lists_and_choices() {
        let c = Config::parse("solver.methods = tstmr, MSHSS", DEFAULTS).unwrap();
        assert_eq!(c.choices("solver.methods", &["tstmr", "mshss"]).unwrap(), vec!["tstmr", "mshss"]);
        assert!(c.choices("solver.methods", &["tstmr"]).is_err());
        let c = Config::parse("solver.methods = 1, 2,3", DEFAULTS).unwrap();
        assert_eq!(c.list::<u32>("solver.methods").unwrap(), vec![1, 2, 3]);
    }
}
