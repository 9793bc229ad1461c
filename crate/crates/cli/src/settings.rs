use std::path::{Path, PathBuf};

use anyhow::Context;
use qwalk_core::mlp::Interval;
use serde::{Deserialize, Serialize};

/// Every setting a command can take. Values come from an optional JSON file
/// and are then overridden by whatever was given on the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_epochs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_weight_range: Option<Interval<f64>>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident: $($field:ident),*) => {
        $(if $src.$field.is_some() { $dst.$field = $src.$field.clone(); })*
    };
}

impl Settings {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Replaces every field that `top` sets.
    pub fn overlay(&mut self, top: &Settings) {
        overlay!(self, top: steps, n, k, l, tmax, seed, dp, window, margin, runs, out, threads, learning_rate, max_epochs, fixed_weight_range);
    }
}
