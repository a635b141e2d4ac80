//! Flat `key = value` config files.
//!
//! Schema (training):
//!   dataset = synth | cifar10 | cifar100 | dirs
//!   synth_n, synth_h, synth_w, synth_c, synth_k, synth_label_noise
//!   data_dir, train_limit, test_limit          (cifar*)
//!   train_dir, test_dir                        (dirs)
//!   policy, alpha, param.<name> = <value>
//!   epochs, batch_size, learning_rate, seed, eval_every, hidden_dim,
//!   flip_augment, median_last_k
//! Benchmark configs add:
//!   policies = mixup,cutmix,...   alphas = 0.1,0.2,...   trials = 3
//! `#` starts a comment; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;

use mixforge_core::{PolicyConfig, PolicyKind};

use crate::data::{CifarVariant, SynthSpec};
use crate::error::{DeskError, Result};
use crate::train::{DatasetRef, TrainConfig};

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Strips comments and blank lines, trims around `=`, sorts by key. The
/// config hash is FNV-1a of this canonical text, so formatting and key
/// order do not change identity.
pub fn canonicalize(text: &str) -> String {
    let mut lines: Vec<String> = text
        .lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(|line| match line.split_once('=') {
            Some((k, v)) => format!("{}={}", k.trim(), v.trim()),
            None => line.to_string(),
        })
        .collect();
    lines.sort();
    lines.join("\n")
}

pub fn config_hash(text: &str) -> u64 {
    fnv1a64(canonicalize(text).as_bytes())
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            DeskError::Config(format!("line {}: expected key = value, got '{line}'", lineno + 1))
        })?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(DeskError::Config(format!("duplicate key '{key}'")));
        }
    }
    Ok(map)
}

const TRAIN_KEYS: &[&str] = &[
    "dataset",
    "synth_n",
    "synth_h",
    "synth_w",
    "synth_c",
    "synth_k",
    "synth_label_noise",
    "data_dir",
    "train_limit",
    "test_limit",
    "train_dir",
    "test_dir",
    "policy",
    "alpha",
    "epochs",
    "batch_size",
    "learning_rate",
    "seed",
    "eval_every",
    "hidden_dim",
    "flip_augment",
    "median_last_k",
];
const BENCH_KEYS: &[&str] = &["policies", "alphas", "trials"];

struct Fields {
    map: BTreeMap<String, String>,
}

impl Fields {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| DeskError::Config(format!("invalid value '{raw}' for '{key}'"))),
        }
    }

    fn parse_opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| DeskError::Config(format!("invalid value '{raw}' for '{key}'"))),
        }
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| DeskError::Config(format!("missing required key '{key}'")))
    }
}

fn check_keys(map: &BTreeMap<String, String>, allow_bench: bool) -> Result<()> {
    for key in map.keys() {
        let known = TRAIN_KEYS.contains(&key.as_str())
            || key.starts_with("param.")
            || (allow_bench && BENCH_KEYS.contains(&key.as_str()));
        if !known {
            return Err(DeskError::Config(format!("unknown config key '{key}'")));
        }
    }
    Ok(())
}

fn dataset_ref(fields: &Fields) -> Result<DatasetRef> {
    match fields.parse::<String>("dataset", "synth".into())?.as_str() {
        "synth" => Ok(DatasetRef::Synth(SynthSpec {
            n: fields.parse("synth_n", 256)?,
            h: fields.parse("synth_h", 8)?,
            w: fields.parse("synth_w", 8)?,
            c: fields.parse("synth_c", 3)?,
            k: fields.parse("synth_k", 2)?,
            label_noise: fields.parse("synth_label_noise", 0.0)?,
        })),
        variant @ ("cifar10" | "cifar100") => Ok(DatasetRef::Cifar {
            variant: CifarVariant::parse(variant)?,
            dir: PathBuf::from(fields.require("data_dir")?),
            train_limit: fields.parse_opt("train_limit")?,
            test_limit: fields.parse_opt("test_limit")?,
        }),
        "dirs" => Ok(DatasetRef::Dirs {
            train: PathBuf::from(fields.require("train_dir")?),
            test: PathBuf::from(fields.require("test_dir")?),
        }),
        other => Err(DeskError::Config(format!("unknown dataset '{other}'"))),
    }
}

fn policy_params(map: &BTreeMap<String, String>, kind: &str) -> Result<Vec<(String, String)>> {
    let parsed = PolicyKind::parse(kind)?;
    Ok(map
        .iter()
        .filter_map(|(k, v)| k.strip_prefix("param.").map(|name| (name.to_string(), v.clone())))
        .filter(|(name, _)| parsed.allowed_keys().contains(&name.as_str()))
        .collect())
}

fn base_config(fields: &Fields, map: &BTreeMap<String, String>) -> Result<TrainConfig> {
    let policy_name = fields.parse::<String>("policy", "vanilla".into())?;
    let alpha = fields.parse("alpha", 1.0)?;
    // Keys under param. that the policy does not accept are rejected here
    // for train configs; bench configs filter per policy instead.
    let kind = PolicyKind::parse(&policy_name)?;
    let all_params: Vec<(String, String)> = map
        .iter()
        .filter_map(|(k, v)| k.strip_prefix("param.").map(|n| (n.to_string(), v.clone())))
        .collect();
    for (name, _) in &all_params {
        if !kind.allowed_keys().contains(&name.as_str()) {
            return Err(DeskError::Config(format!(
                "policy '{policy_name}' does not accept parameter '{name}'"
            )));
        }
    }
    let policy = PolicyConfig::from_kv(&policy_name, alpha, &all_params)?;
    Ok(TrainConfig {
        dataset: dataset_ref(fields)?,
        policy,
        epochs: fields.parse("epochs", 10)?,
        batch_size: fields.parse("batch_size", 64)?,
        learning_rate: fields.parse("learning_rate", 0.1)?,
        seed: fields.parse("seed", 0)?,
        eval_every: fields.parse("eval_every", 0)?,
        hidden_dim: fields.parse("hidden_dim", 256)?,
        flip_augment: fields.parse("flip_augment", true)?,
        median_last_k: fields.parse("median_last_k", 0)?,
    })
}

/// Parses a training config.
pub fn parse_train_config(text: &str) -> Result<TrainConfig> {
    let map = parse_pairs(text)?;
    check_keys(&map, false)?;
    let fields = Fields { map: map.clone() };
    base_config(&fields, &map)
}

/// A benchmark sweep: the cross product of policies and alphas over a base
/// training config.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub configs: Vec<TrainConfig>,
    pub trials: usize,
}

pub fn parse_bench_config(text: &str) -> Result<BenchSpec> {
    let map = parse_pairs(text)?;
    check_keys(&map, true)?;
    let fields = Fields { map: map.clone() };
    let base = {
        // The base policy key is optional for sweeps; default it.
        base_config(&Fields { map: {
            let mut m = map.clone();
            m.retain(|k, _| !k.starts_with("param."));
            m
        } }, &BTreeMap::new())?
    };
    let policies: Vec<String> = fields
        .parse::<String>("policies", fields.parse::<String>("policy", "vanilla".into())?)?
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let alphas: Vec<f64> = fields
        .parse::<String>("alphas", format!("{}", base.policy.alpha))?
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| DeskError::Config(format!("invalid alpha '{s}' in alphas")))
        })
        .collect::<Result<_>>()?;
    if policies.is_empty() || alphas.is_empty() {
        return Err(DeskError::Config("policies and alphas must be non-empty".into()));
    }
    let mut configs = Vec::new();
    for policy in &policies {
        for &alpha in &alphas {
            let params = policy_params(&map, policy)?;
            let mut cfg = base.clone();
            cfg.policy = PolicyConfig::from_kv(policy, alpha, &params)?;
            configs.push(cfg);
        }
    }
    Ok(BenchSpec { configs, trials: fields.parse("trials", 1)? })
}
