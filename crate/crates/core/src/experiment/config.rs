//! Flat `key = value` experiment files.
//!
//! ```text
//! # comment
//! kind = verify-martingale
//! mu.a = 0.5
//! mu.b = 0.5
//! alpha.a = 0
//! alpha.b = -1
//! gamma = -1
//! t_grid = 10, 100, 1000
//! ```
//!
//! Branch maps use dotted keys (`mu.<label>`, `alpha.<label>`,
//! `lambda.<label>`); branches are ordered as the `mu.*` lines appear.
//! Every error names the offending line or keys.

use std::path::Path;

use crate::error::{Error, Result};
use crate::space::{BranchSpace, PenaltyParams};

/// Scalar keys understood by some experiment kind.
const SCALAR_KEYS: &[&str] = &[
    "kind", "gamma", "n", "step", "t_end", "s", "s_grid", "t_grid", "x", "x_grid", "branch", "seed", "tol",
    "abs_tol", "band", "beta", "case", "paths", "functional", "tuples", "sets", "threads", "inner", "bins", "l_grid",
];
const MAP_PREFIXES: &[&str] = &["mu", "alpha", "lambda"];

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    key: String,
    value: String,
    /// 1-based; 0 for values set programmatically.
    line: usize,
}

/// A parsed experiment file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    entries: Vec<Entry>,
}

fn at(line: usize) -> String {
    if line == 0 {
        "override".to_string()
    } else {
        format!("line {line}")
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config(format!("line {line}: expected `key = value`, got `{content}`")));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!("line {line}: empty key or value in `{content}`")));
            }
            let known = match key.split_once('.') {
                Some((prefix, label)) => MAP_PREFIXES.contains(&prefix) && !label.is_empty(),
                None => SCALAR_KEYS.contains(&key),
            };
            if !known {
                return Err(Error::Config(format!("line {line}: unknown key `{key}`")));
            }
            if let Some(prev) = cfg.entries.iter().find(|e| e.key == key) {
                return Err(Error::Config(format!(
                    "line {line}: `{key}` already set on line {}",
                    prev.line
                )));
            }
            cfg.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Set or replace a value (command-line overrides).
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => {
                e.value = value;
                e.line = 0;
            }
            None => self.entries.push(Entry {
                key: key.to_string(),
                value,
                line: 0,
            }),
        }
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.retain(|e| e.key != key);
    }

    fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entry(key).is_some()
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    fn parse_f64(e: &Entry) -> Result<f64> {
        let v: f64 = e
            .value
            .parse()
            .map_err(|_| Error::Config(format!("{}: `{}` is not a number ({})", at(e.line), e.value, e.key)))?;
        if !v.is_finite() {
            return Err(Error::Config(format!("{}: `{}` must be finite", at(e.line), e.key)));
        }
        Ok(v)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.entry(key).map_or(Ok(default), Self::parse_f64)
    }

    pub fn positive_f64_or(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64_or(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            let line = self.entry(key).map_or(0, |e| e.line);
            Err(Error::Config(format!("{}: `{key}` must be > 0, got {v}", at(line))))
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.entry(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| {
                Error::Config(format!("{}: `{}` is not a nonnegative integer ({})", at(e.line), e.value, e.key))
            }),
        }
    }

    pub fn count_or(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let v = self.u64_or(key, default as u64)? as usize;
        if v < min {
            let line = self.entry(key).map_or(0, |e| e.line);
            return Err(Error::Config(format!("{}: `{key}` must be >= {min}, got {v}", at(line))));
        }
        Ok(v)
    }

    /// Comma-separated numbers.
    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let Some(e) = self.entry(key) else {
            return Ok(default.to_vec());
        };
        e.value
            .split(',')
            .map(|part| {
                Self::parse_f64(&Entry {
                    key: e.key.clone(),
                    value: part.trim().to_string(),
                    line: e.line,
                })
            })
            .collect()
    }

    fn map(&self, prefix: &str) -> Vec<(&str, &Entry)> {
        self.entries
            .iter()
            .filter_map(|e| {
                e.key
                    .split_once('.')
                    .filter(|(p, _)| *p == prefix)
                    .map(|(_, label)| (label, e))
            })
            .collect()
    }

    /// Branch space from the `mu.*` keys, `None` when there are none.
    ///
    /// Weights must be positive and sum to 1 within `1e-9`; they are then
    /// renormalized exactly.
    pub fn branch_space(&self) -> Result<Option<BranchSpace>> {
        let map = self.map("mu");
        if map.is_empty() {
            return Ok(None);
        }
        let mut weights = Vec::with_capacity(map.len());
        for (label, e) in &map {
            let w = Self::parse_f64(e)?;
            if !(w > 0.0) {
                return Err(Error::Config(format!("{}: weight mu.{label} must be > 0, got {w}", at(e.line))));
            }
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            let keys: Vec<String> = map.iter().map(|(l, e)| format!("mu.{l} ({})", at(e.line))).collect();
            return Err(Error::Config(format!(
                "weights {} sum to {total}, expected 1",
                keys.join(", ")
            )));
        }
        let entries = map.iter().zip(&weights).map(|((l, _), w)| (l.to_string(), w / total));
        BranchSpace::new(entries).map(Some).map_err(|e| Error::Config(e.to_string()))
    }

    /// Values of `prefix.<label>` for every branch of `space`, `None` when
    /// no such key is present.
    pub fn per_branch(&self, prefix: &str, space: &BranchSpace) -> Result<Option<Vec<f64>>> {
        let map = self.map(prefix);
        if map.is_empty() {
            return Ok(None);
        }
        for (label, e) in &map {
            if space.branch(label).is_none() {
                return Err(Error::Config(format!(
                    "{}: `{prefix}.{label}` names a branch without a weight",
                    at(e.line)
                )));
            }
        }
        space
            .labels()
            .iter()
            .map(|label| {
                map.iter()
                    .find(|(l, _)| l == label)
                    .ok_or_else(|| Error::Config(format!("missing `{prefix}.{label}`")))
                    .and_then(|(_, e)| Self::parse_f64(e))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// `alpha.*` and `gamma` on `space`, `None` when neither is given.
    pub fn penalty(&self, space: &BranchSpace) -> Result<Option<PenaltyParams>> {
        let alpha = self.per_branch("alpha", space)?;
        if alpha.is_none() && !self.contains("gamma") {
            return Ok(None);
        }
        let alpha = alpha.unwrap_or_else(|| vec![0.0; space.len()]);
        let gamma = self.f64_or("gamma", 0.0)?;
        PenaltyParams::new(space, alpha, gamma).map(Some).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two branches
kind = verify-martingale
mu.a = 0.5
mu.b = 0.5   # trailing comment
alpha.a = 0
alpha.b = -1
gamma = -1
t_grid = 10, 100,1000
";

    #[test]
    fn parses_scalars_maps_and_lists() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.str("kind"), Some("verify-martingale"));
        let space = c.branch_space().unwrap().unwrap();
        assert_eq!(space.labels(), ["a", "b"]);
        let p = c.penalty(&space).unwrap().unwrap();
        assert_eq!(p.alpha(), [0.0, -1.0]);
        assert_eq!(p.gamma(), -1.0);
        assert_eq!(c.list_or("t_grid", &[]).unwrap(), [10.0, 100.0, 1000.0]);
        assert_eq!(c.f64_or("step", 1e-3).unwrap(), 1e-3);
    }

    #[test]
    fn errors_point_at_lines() {
        let e = ExperimentConfig::parse("mu.a = 1\nbogus = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = ExperimentConfig::parse("mu.a = 1\nno equals sign\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let c = ExperimentConfig::parse("n = ten\n").unwrap();
        assert!(c.u64_or("n", 1).unwrap_err().to_string().contains("line 1"));
        let e = ExperimentConfig::parse("gamma = 1\ngamma = 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2") && e.to_string().contains("line 1"));
    }

    #[test]
    fn bad_weights_name_their_keys() {
        let c = ExperimentConfig::parse("mu.a = 0.5\nmu.b = 0.4\n").unwrap();
        let msg = c.branch_space().unwrap_err().to_string();
        assert!(msg.contains("mu.a") && msg.contains("mu.b") && msg.contains("0.9"), "{msg}");
        let c = ExperimentConfig::parse("mu.a = 1\nalpha.z = 1\n").unwrap();
        let space = c.branch_space().unwrap().unwrap();
        assert!(c.penalty(&space).unwrap_err().to_string().contains("alpha.z"));
    }

    #[test]
    fn overrides_replace_values() {
        let mut c = ExperimentConfig::parse("seed = 1\n").unwrap();
        c.set("seed", 9);
        assert_eq!(c.u64_or("seed", 0).unwrap(), 9);
    }
}
