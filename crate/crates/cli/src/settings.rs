//! Flat `key = value` settings with `#` comments, layered so that command
//! line flags override a config file, which overrides values carried in a
//! checkpoint, which override built-in defaults.

use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::Context;

/// Invalid invocation or configuration; reported with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvMap {
    entries: Vec<(String, String)>,
}

impl KvMap {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut map = KvMap::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected key = value, got '{}'", n + 1, raw.trim())))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(usage(format!("line {}: empty key", n + 1)));
            }
            map.set(key, v.trim());
        }
        Ok(map)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Settings sources in priority order.
#[derive(Debug, Clone, Default)]
pub struct Layers {
    layers: Vec<KvMap>,
    resolved: KvMap,
}

impl Layers {
    pub fn new(layers: Vec<KvMap>) -> Self {
        Layers {
            layers,
            resolved: KvMap::default(),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.layers.iter().find_map(|m| m.get(key))
    }

    pub fn opt<T>(&mut self, key: &str) -> anyhow::Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => {
                let v = s.parse::<T>().map_err(|e| usage(format!("invalid value '{s}' for {key}: {e}")))?;
                self.resolved.set(key, &v);
                Ok(Some(v))
            }
        }
    }

    pub fn get<T>(&mut self, key: &str, default: T) -> anyhow::Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.opt(key)?.unwrap_or(default);
        self.resolved.set(key, &v);
        Ok(v)
    }

    /// Every value looked up so far, in lookup order.
    pub fn resolved(&self) -> &KvMap {
        &self.resolved
    }
}
