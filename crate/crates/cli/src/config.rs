//! Layered configuration (defaults, then config file, then flags), the run
//! manifest, and atomic artifact writes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Bad flags or configuration; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Model selection for `fit` and tuning for `simulate poly`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Cv { folds: usize, repeats: usize },
    Bic,
    Aic,
}

impl FromStr for Selection {
    type Err = String;

    /// `cv`, `cv:k`, `cv:k:r`, `bic` or `aic`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| format!("bad number '{p}' in '{s}'"))
        };
        match parts.as_slice() {
            ["bic"] => Ok(Self::Bic),
            ["aic"] => Ok(Self::Aic),
            ["cv"] => Ok(Self::Cv {
                folds: 10,
                repeats: 1,
            }),
            ["cv", k] => Ok(Self::Cv {
                folds: num(k)?,
                repeats: 1,
            }),
            ["cv", k, r] => Ok(Self::Cv {
                folds: num(k)?,
                repeats: num(r)?,
            }),
            _ => Err(format!(
                "unknown selection '{s}' (expected cv[:k[:r]], bic or aic)"
            )),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cv { folds, repeats } => write!(f, "cv:{folds}:{repeats}"),
            Self::Bic => f.write_str("bic"),
            Self::Aic => f.write_str("aic"),
        }
    }
}

impl Serialize for Selection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A penalty weight that may be infinite; JSON carries infinity as `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight(pub f64);

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.collect_str(&self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Weight(v)),
            Raw::Str(s) => s
                .parse()
                .map(Weight)
                .map_err(|_| serde::de::Error::custom(format!("bad weight '{s}'"))),
        }
    }
}

/// Recursively overlay `patch` onto `base`. Every key in `patch` must already
/// exist in `base`, so typos in config files are caught.
pub fn merge(base: &mut Value, patch: Value, path: &str) -> Result<()> {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                let sub = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v, &sub)?,
                    Some(slot) => *slot = v,
                    None => return usage(format!("unknown config key '{sub}'")),
                }
            }
            Ok(())
        }
        (b, p) => {
            *b = p;
            Ok(())
        }
    }
}

/// Flag overrides as a JSON object; `None` entries are skipped.
pub fn flags(entries: Vec<(&str, Option<Value>)>) -> Value {
    Value::Object(
        entries
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_owned(), v)))
            .collect::<Map<_, _>>(),
    )
}

pub fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("config values serialize")
}

/// Read a config file. A manifest from an earlier run is accepted in place
/// of a plain config, provided it was written by the same command.
pub fn load_config_file(path: &Path, command: &str) -> Result<Value> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return usage(format!("config {} is not valid JSON: {e}", path.display())),
    };
    let Value::Object(mut obj) = value else {
        return usage(format!("config {} must be a JSON object", path.display()));
    };
    if obj.contains_key("command") && obj.contains_key("config") {
        let found = obj
            .get("command")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_owned();
        if found != command {
            return usage(format!(
                "manifest {} was written by '{found}', not '{command}'",
                path.display()
            ));
        }
        return Ok(obj.remove("config").expect("checked above"));
    }
    Ok(Value::Object(obj))
}

/// defaults, overlaid by the config file, overlaid by flags.
pub fn resolve<T: Serialize + DeserializeOwned>(
    defaults: &T,
    file: Option<Value>,
    flag_values: Value,
) -> Result<T> {
    let mut merged = to_value(defaults);
    if let Some(file) = file {
        merge(&mut merged, file, "")?;
    }
    merge(&mut merged, flag_values, "")?;
    match serde_json::from_value(merged) {
        Ok(v) => Ok(v),
        Err(e) => usage(format!("invalid configuration: {e}")),
    }
}

/// Provenance record written next to every set of artifacts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub threads: usize,
    pub started_at: String,
    pub finished_at: String,
    pub elapsed_seconds: f64,
    /// Fully merged configuration; pass this file to `--config` to rerun.
    pub config: Value,
    pub outputs: Vec<PathBuf>,
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Collects output paths and timing for the manifest.
pub struct Run {
    command: String,
    out: PathBuf,
    started: chrono::DateTime<chrono::Utc>,
    outputs: Vec<PathBuf>,
}

impl Run {
    pub fn start(command: &str, out: &Path) -> Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
        Ok(Self {
            command: command.into(),
            out: out.to_path_buf(),
            started: chrono::Utc::now(),
            outputs: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.path(name);
        write_atomic(&path, bytes)?;
        self.outputs.push(path);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        write_json(&path, value)?;
        self.outputs.push(path);
        Ok(())
    }

    pub fn finish(self, seed: Option<u64>, config: Value) -> Result<()> {
        let finished = chrono::Utc::now();
        let manifest = RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: self.command,
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            threads: rayon::current_num_threads(),
            started_at: self.started.to_rfc3339(),
            finished_at: finished.to_rfc3339(),
            elapsed_seconds: (finished - self.started).num_milliseconds() as f64 / 1000.0,
            config,
            outputs: self.outputs,
        };
        let path = self.out.join(MANIFEST_FILE);
        write_json(&path, &manifest)?;
        log::info!("wrote {}", path.display());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn selection_round_trip() {
        for s in ["cv:10:1", "cv:5:3", "bic", "aic"] {
            assert_eq!(s.parse::<Selection>().unwrap().to_string(), s);
        }
        assert_eq!(
            "cv".parse::<Selection>().unwrap(),
            Selection::Cv {
                folds: 10,
                repeats: 1
            }
        );
        assert!("cv:x".parse::<Selection>().is_err());
        assert!("loo".parse::<Selection>().is_err());
    }

    #[test]
    fn infinite_weight_survives_json() {
        let w = vec![Weight(1.0), Weight(f64::INFINITY)];
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"[1.0,"inf"]"#);
        let back: Vec<Weight> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn precedence_is_flags_then_file_then_defaults() {
        let mut base = json!({"a": 1, "b": 2, "nested": {"x": 1, "y": 2}});
        merge(&mut base, json!({"a": 10, "nested": {"x": 10}}), "").unwrap();
        merge(&mut base, json!({"a": 100}), "").unwrap();
        assert_eq!(base, json!({"a": 100, "b": 2, "nested": {"x": 10, "y": 2}}));
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let mut base = json!({"nested": {"x": 1}});
        let err = merge(&mut base, json!({"nested": {"z": 1}}), "").unwrap_err();
        assert!(err
            .downcast_ref::<UsageError>()
            .unwrap()
            .0
            .contains("nested.z"));
    }
}
