use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    TwirlCheck,
    Decouple,
    RateRegion,
    EntGen,
    Entropy,
    /// List the builtin channels and states.
    Catalog,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::TwirlCheck => "twirl-check",
            Mode::Decouple => "decouple",
            Mode::RateRegion => "rate-region",
            Mode::EntGen => "ent-gen",
            Mode::Entropy => "entropy",
            Mode::Catalog => "catalog",
        }
    }

    /// Fields that must be present, after command-line overrides.
    fn required(self) -> &'static [&'static str] {
        match self {
            Mode::TwirlCheck => &["samples", "seed"],
            Mode::Decouple => &["channel", "state", "delta", "samples", "seed"],
            Mode::RateRegion => &["channel", "delta"],
            Mode::EntGen => &["channel", "delta", "epsilon"],
            Mode::Entropy => &["state", "delta"],
            Mode::Catalog => &[],
        }
    }
}

/// Experiment description. Channels and states are either a builtin name
/// (`"depolarizing"`, `"random(7)"`), an object `{"builtin": name, ...}`
/// with parameters, or explicit matrices.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<String>,
    pub channel: Option<Value>,
    pub state: Option<Value>,
    /// Control states of a QMAC code; defaults to maximally entangled.
    pub control: Option<Value>,
    /// Sender dimensions; defaults to qubits.
    pub dims: Option<Vec<usize>>,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub e_a: Option<f64>,
    pub e_b: Option<f64>,
    /// Conditioning systems for `entropy`; defaults to the reference.
    pub cond: Option<Vec<String>>,
    /// Number of random operators for `twirl-check`.
    pub operators: Option<usize>,
    /// Output directory used when `--out` is absent.
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("config `{}`: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::invalid(format!("config `{}`: {e}", path.display())))
    }

    fn has(&self, field: &str) -> bool {
        match field {
            "channel" => self.channel.is_some(),
            "state" => self.state.is_some(),
            "delta" => self.delta.is_some(),
            "epsilon" => self.epsilon.is_some(),
            "samples" => self.samples.is_some(),
            "seed" => self.seed.is_some(),
            _ => true,
        }
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self, mode: Mode) -> CliResult<()> {
        if let Some(m) = &self.mode {
            if m != mode.name() {
                return Err(CliError::invalid(format!(
                    "mode: config is for `{m}` but `{}` was requested",
                    mode.name()
                )));
            }
        }
        for f in mode.required() {
            if !self.has(f) {
                return Err(CliError::invalid(format!(
                    "{f}: missing, required by mode `{}`",
                    mode.name()
                )));
            }
        }
        if let Some(d) = self.delta {
            if !(0.0..1.0).contains(&d) {
                return Err(CliError::invalid(format!("delta: must lie in [0, 1), got {d}")));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return Err(CliError::invalid(format!("epsilon: must lie in (0, 1], got {e}")));
            }
        }
        match (mode, self.samples) {
            (Mode::Decouple, Some(n)) if n < 2 => {
                return Err(CliError::invalid(
                    "samples: at least 2 are needed for an error bar",
                ));
            }
            (_, Some(0)) => return Err(CliError::invalid("samples: must be positive")),
            _ => {}
        }
        for (name, v) in [("e_a", self.e_a), ("e_b", self.e_b)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(CliError::invalid(format!(
                        "{name}: must be non-negative, got {v}"
                    )));
                }
            }
        }
        if self.operators == Some(0) {
            return Err(CliError::invalid("operators: must be positive"));
        }
        let dims = self.sender_dims()?;
        if matches!(mode, Mode::RateRegion | Mode::EntGen) && dims.len() != 2 {
            return Err(CliError::invalid(format!(
                "dims: a multiple access channel has two senders, got {}",
                dims.len()
            )));
        }
        Ok(())
    }

    /// `dims`, or `k` qubits, or two qubits.
    pub fn sender_dims(&self) -> CliResult<Vec<usize>> {
        let dims = match (&self.dims, self.k) {
            (Some(d), Some(k)) if d.len() != k => {
                return Err(CliError::invalid(format!(
                    "k: {k} disagrees with the {} entries of `dims`",
                    d.len()
                )))
            }
            (Some(d), _) => d.clone(),
            (None, Some(k)) => vec![2; k],
            (None, None) => vec![2, 2],
        };
        if dims.is_empty() {
            return Err(CliError::invalid("dims: at least one sender is needed"));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(CliError::invalid(format!("dims: entry {i} is zero")));
        }
        Ok(dims)
    }
}
