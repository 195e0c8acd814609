use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};

/// Typed reads from a command's key-value map. Every problem is collected so
/// one validation error can name all offending keys.
pub(crate) struct Params<'a> {
    map: &'a BTreeMap<String, Value>,
    command: &'static str,
    errors: Vec<String>,
}

fn as_count(v: &Value) -> Option<u64> {
    v.as_u64().or_else(|| {
        let f = v.as_f64()?;
        (f >= 0.0 && f.fract() == 0.0 && f < 1.8e19).then_some(f as u64)
    })
}

impl<'a> Params<'a> {
    pub fn new(command: &'static str, map: &'a BTreeMap<String, Value>, allowed: &[&str]) -> Self {
        let errors = map
            .keys()
            .filter(|k| !allowed.contains(&k.as_str()))
            .map(|k| format!("unknown key \"{k}\" for {command}"))
            .collect();
        Self {
            map,
            command,
            errors,
        }
    }

    fn missing(&mut self, key: &str) {
        self.errors
            .push(format!("missing required key \"{key}\" for {}", self.command));
    }

    fn bad(&mut self, key: &str, want: &str, v: &Value) {
        self.errors.push(format!("key \"{key}\": expected {want}, got {v}"));
    }

    pub fn f64(&mut self, key: &str) -> Option<f64> {
        let v = self.map.get(key)?;
        match v.as_f64() {
            Some(x) => Some(x),
            None => {
                self.bad(key, "a number", v);
                None
            }
        }
    }

    pub fn u64(&mut self, key: &str) -> Option<u64> {
        let v = self.map.get(key)?;
        match as_count(v) {
            Some(x) => Some(x),
            None => {
                self.bad(key, "a non-negative integer", v);
                None
            }
        }
    }

    pub fn usize(&mut self, key: &str) -> Option<usize> {
        self.u64(key).map(|x| x as usize)
    }

    pub fn bool(&mut self, key: &str) -> Option<bool> {
        let v = self.map.get(key)?;
        match v.as_bool() {
            Some(x) => Some(x),
            None => {
                self.bad(key, "true or false", v);
                None
            }
        }
    }

    pub fn json<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        let v = self.map.get(key)?;
        match serde_json::from_value(v.clone()) {
            Ok(x) => Some(x),
            Err(e) => {
                self.errors.push(format!("key \"{key}\": {e}"));
                None
            }
        }
    }

    pub fn req_f64(&mut self, key: &str) -> f64 {
        if !self.map.contains_key(key) {
            self.missing(key);
        }
        self.f64(key).unwrap_or(f64::NAN)
    }

    pub fn req_usize(&mut self, key: &str) -> usize {
        if !self.map.contains_key(key) {
            self.missing(key);
        }
        self.usize(key).unwrap_or(0)
    }

    pub fn req_json<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        if !self.map.contains_key(key) {
            self.missing(key);
        }
        self.json(key)
    }

    pub fn error(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    /// Fails with every collected problem. Values read so far are only
    /// meaningful when this returns `Ok`.
    pub fn finish(self) -> Result<()> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self.errors))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn lists_every_unknown_key() {
        let map: BTreeMap<String, Value> =
            serde_json::from_value(json!({"epsilonn": 0.1, "nn": 2, "n": 2})).unwrap();
        let mut p = Params::new("shatter", &map, &["n", "m"]);
        assert_eq!(p.req_usize("n"), 2);
        p.req_usize("m");
        let Err(Error::Validation(errs)) = p.finish() else {
            panic!("expected validation error");
        };
        assert_eq!(errs.len(), 3);
        assert!(errs.iter().any(|e| e.contains("epsilonn")));
        assert!(errs.iter().any(|e| e.contains("\"nn\"")));
        assert!(errs.iter().any(|e| e.contains("missing required key \"m\"")));
    }

    #[test]
    fn integral_floats_are_counts() {
        let map: BTreeMap<String, Value> =
            serde_json::from_value(json!({"a": 1e4, "b": 2.5})).unwrap();
        let mut p = Params::new("x", &map, &["a", "b"]);
        assert_eq!(p.u64("a"), Some(10_000));
        assert_eq!(p.u64("b"), None);
        assert!(p.finish().is_err());
    }
}
