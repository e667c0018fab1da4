//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`, `#` starts a comment. Keys are either global
//! (`seed`, `tolerance`, `experiments`) or scoped by a kind prefix such as
//! `meyer.t_min`. A scoped `tolerance` or `seed` overrides the global one.

use super::ExperimentKind;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("unknown experiment kind `{0}`")]
    UnknownKind(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Invalid { key: String, value: String, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

const GLOBAL_KEYS: [&str; 3] = ["seed", "tolerance", "experiments"];

/// A parsed configuration file, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: Vec<(String, String)>,
}

impl FromStr for ConfigFile {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ConfigFile::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.trim().into() });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.trim().into() });
            }
            if cfg.get(k).is_some() {
                return Err(ConfigError::Duplicate { line: i + 1, key: k.into() });
            }
            cfg.entries.push((k.into(), v.into()));
        }
        Ok(cfg)
    }
}

impl ConfigFile {
    pub fn read(path: &std::path::Path) -> Result<Self, ConfigError> {
        std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?.parse()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Sets `key`, replacing an earlier value.
    pub fn set(&mut self, key: &str, value: &str) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value.into(),
            None => self.entries.push((key.into(), value.into())),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    /// Rejects keys that belong to no kind or are not declared by theirs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for key in self.keys() {
            match key.split_once('.') {
                None if GLOBAL_KEYS.contains(&key) => {}
                None => return Err(ConfigError::UnknownKey(key.into())),
                Some((prefix, rest)) => {
                    let kind: ExperimentKind =
                        prefix.parse().map_err(|_| ConfigError::UnknownKey(key.into()))?;
                    if !kind.accepts(rest) {
                        return Err(ConfigError::UnknownKey(key.into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Kinds listed under `experiments`, or every kind of the acceptance battery.
    pub fn experiments(&self) -> Result<Vec<ExperimentKind>, ConfigError> {
        match self.get("experiments") {
            None => Ok(ExperimentKind::BATTERY.to_vec()),
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| ConfigError::UnknownKind(s.into())))
                .collect(),
        }
    }

    /// The effective configuration of one experiment.
    pub fn experiment(&self, kind: ExperimentKind) -> Result<ExperimentConfig, ConfigError> {
        self.validate()?;
        let mut params = BTreeMap::new();
        for &(key, default) in kind.all_keys() {
            params.insert(key.to_string(), default.to_string());
        }
        for (k, v) in &self.entries {
            if GLOBAL_KEYS[..2].contains(&k.as_str()) && !self.entries.iter().any(|(o, _)| *o == format!("{kind}.{k}")) {
                params.insert(k.clone(), v.clone());
            }
            if let Some(rest) = k.strip_prefix(kind.name()).and_then(|r| r.strip_prefix('.')) {
                params.insert(rest.to_string(), v.clone());
            }
        }
        let cfg = ExperimentConfig { kind, params };
        cfg.tolerance()?;
        cfg.seed()?;
        Ok(cfg)
    }
}

/// Kind plus its full key table after defaults and overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        ConfigFile::default().experiment(kind).expect("defaults are valid")
    }

    fn raw(&self, key: &str) -> &str {
        self.params.get(key).map(String::as_str).unwrap_or_else(|| panic!("undeclared key {key}"))
    }

    fn invalid(&self, key: &str, reason: impl fmt::Display) -> ConfigError {
        ConfigError::Invalid {
            key: format!("{}.{key}", self.kind),
            value: self.raw(key).into(),
            reason: reason.to_string(),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key).parse().map_err(|e| self.invalid(key, e))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| self.invalid(key, e)))
            .collect()
    }

    /// `;`-separated groups of whitespace-separated entries.
    pub fn groups<T: FromStr>(&self, key: &str, width: usize) -> Result<Vec<Vec<T>>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|g| {
                let row: Vec<T> = g.split_whitespace().map(|s| s.parse().map_err(|e| self.invalid(key, e))).collect::<Result<_, _>>()?;
                if row.len() != width {
                    return Err(self.invalid(key, format!("groups need {width} entries, `{g}` has {}", row.len())));
                }
                Ok(row)
            })
            .collect()
    }

    /// A value that must satisfy `ok`.
    pub fn checked<T: FromStr>(&self, key: &str, ok: impl Fn(&T) -> bool, what: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let v: T = self.get(key)?;
        if ok(&v) {
            Ok(v)
        } else {
            Err(self.invalid(key, what))
        }
    }

    pub fn tolerance(&self) -> Result<f64, ConfigError> {
        self.checked("tolerance", |t: &f64| *t > 0.0, "must be > 0")
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.get("seed")
    }

    pub fn error(&self, key: &str, reason: impl fmt::Display) -> ConfigError {
        self.invalid(key, reason)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_scopes() {
        let cfg: ConfigFile = "# header\nseed = 7\nmeyer.t_min=0.02  # inline\n\n".parse().unwrap();
        let m = cfg.experiment(ExperimentKind::Meyer).unwrap();
        assert_eq!(m.get::<f64>("t_min").unwrap(), 0.02);
        assert_eq!(m.seed().unwrap(), 7);
    }

    #[test]
    fn scoped_tolerance_overrides_global() {
        let cfg: ConfigFile = "tolerance = 0.5\nsmoothing.tolerance = 0.01".parse().unwrap();
        assert_eq!(cfg.experiment(ExperimentKind::SmoothingRate).unwrap().tolerance().unwrap(), 0.01);
        assert_eq!(cfg.experiment(ExperimentKind::Meyer).unwrap().tolerance().unwrap(), 0.5);
    }

    #[test]
    fn unknown_keys_are_named() {
        for text in ["meyer.t_mni = 1", "bogus = 1", "nokind.x = 1"] {
            let cfg: ConfigFile = text.parse().unwrap();
            let key = text.split('=').next().unwrap().trim();
            assert_eq!(cfg.validate(), Err(ConfigError::UnknownKey(key.into())));
        }
    }

    #[test]
    fn syntax_and_duplicates() {
        assert!(matches!("just text".parse::<ConfigFile>(), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!("a=1\na=2".parse::<ConfigFile>(), Err(ConfigError::Duplicate { line: 2, .. })));
    }

    #[test]
    fn bad_values_name_the_key() {
        let cfg: ConfigFile = "density.tolerance = -1".parse().unwrap();
        match cfg.experiment(ExperimentKind::DensityBound) {
            Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, "density.tolerance"),
            other => panic!("{other:?}"),
        }
    }
}
