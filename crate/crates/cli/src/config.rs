//! Experiment configuration files.
//!
//! An experiment file is a JSON object holding every [`TrainConfig`] field
//! (all optional, defaults apply) plus three orchestration keys:
//!
//! ```json
//! {
//!   "dataset": "swissroll",
//!   "critic_hidden": [64, 64, 64],
//!   "regularizer": {"kind": "lp", "lambda": 10},
//!   "iterations": 300,
//!   "seed": 1,
//!   "num_seeds": 5,
//!   "out_dir": "runs/lp10"
//! }
//! ```
//!
//! `seeds` is an explicit list; without it `num_seeds` expands to
//! `seed, seed + 1, ...`, and without either the sweep is the single `seed`.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use wganlab_core::training::TrainConfig;

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "WGANLAB_SEED";

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    pub out_dir: Option<PathBuf>,
    /// Explicit seed list, if given.
    pub seed_list: Option<Vec<u64>>,
    pub num_seeds: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: format!("cannot read: {e}"),
        })?;
        Self::parse(&text).map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Parses and validates; the error string names the offending field and,
    /// where it can be located, its line.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let value: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
        let Value::Object(mut map) = value else {
            return Err("top level must be a JSON object".into());
        };
        let out_dir = take(&mut map, "out_dir", text, |v| v.as_str().map(PathBuf::from), "a string")?;
        let num_seeds = take(
            &mut map,
            "num_seeds",
            text,
            |v| v.as_u64().filter(|&n| n >= 1).map(|n| n as usize),
            "an integer >= 1",
        )?;
        let seed_list = take(
            &mut map,
            "seeds",
            text,
            |v| {
                let items = v.as_array()?;
                let seeds: Option<Vec<u64>> = items.iter().map(Value::as_u64).collect();
                seeds.filter(|s| !s.is_empty())
            },
            "a non-empty list of non-negative integers",
        )?;
        if let (Some(list), Some(n)) = (&seed_list, num_seeds) {
            if list.len() != n {
                return Err(located(
                    text,
                    "num_seeds",
                    format!("num_seeds = {n} but seeds lists {} entries", list.len()),
                ));
            }
        }

        let train: TrainConfig = serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner().to_string();
            let key = unknown_field(&inner).or_else(|| path.rsplit('.').next().map(str::to_string));
            let message = if path == "." {
                inner
            } else {
                format!("field `{path}`: {inner}")
            };
            match key {
                Some(k) => located(text, &k, message),
                None => message,
            }
        })?;
        train.validate().map_err(|e| {
            let message = format!("invalid configuration: {e}");
            match validation_key(&e.to_string()) {
                Some(k) => located(text, &k, message),
                None => message,
            }
        })?;

        Ok(ExperimentConfig {
            train,
            out_dir,
            seed_list,
            num_seeds,
        })
    }

    /// Applies a seed override (usually from the environment) to `seed`.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.train.seed = s;
        }
        self
    }

    /// Seeds of a sweep: the explicit list, else `num_seeds` consecutive
    /// seeds starting at `seed`, else just `seed`.
    pub fn seeds(&self) -> Vec<u64> {
        match (&self.seed_list, self.num_seeds) {
            (Some(list), _) => list.clone(),
            (None, Some(n)) => (0..n as u64).map(|i| self.train.seed.wrapping_add(i)).collect(),
            (None, None) => vec![self.train.seed],
        }
    }

    /// The training config of one seed.
    pub fn for_seed(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            seed,
            ..self.train.clone()
        }
    }

    /// `--out` wins over the file's `out_dir`.
    pub fn resolve_out(&self, flag: Option<&Path>) -> Result<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.out_dir.clone())
            .ok_or_else(|| CliError::Input("no output directory: pass --out or set out_dir in the config".into()))
    }
}

/// Reads the seed override from [`SEED_ENV`].
pub fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{SEED_ENV}={s:?} is not a non-negative integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Input(format!("{SEED_ENV}: {e}"))),
    }
}

fn take<T>(
    map: &mut Map<String, Value>,
    key: &str,
    text: &str,
    convert: impl Fn(&Value) -> Option<T>,
    expected: &str,
) -> std::result::Result<Option<T>, String> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => convert(&v)
            .map(Some)
            .ok_or_else(|| located(text, key, format!("field `{key}` must be {expected}, got {v}"))),
    }
}

fn unknown_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// Leading field name of a validation message such as
/// `invalid argument: latent.dim must be >= 1`.
fn validation_key(message: &str) -> Option<String> {
    let rest = message.strip_prefix("invalid argument: ").unwrap_or(message);
    let key: String = rest
        .chars()
        .take_while(|c| c.is_alphanumeric() || *c == '_' || *c == '.')
        .collect();
    key.rsplit('.').next().filter(|k| !k.is_empty()).map(str::to_string)
}

/// Prefixes `message` with the line of the first occurrence of `"key"`.
fn located(text: &str, key: &str, message: String) -> String {
    let needle = format!("\"{key}\"");
    match text.lines().position(|l| l.contains(&needle)) {
        Some(i) => format!("line {}: {message}", i + 1),
        None => message,
    }
}
