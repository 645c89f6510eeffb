use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named tensor factor with its Hilbert-space dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemLabel {
    name: String,
    dim: usize,
}

impl SystemLabel {
    /// Panics if `dim == 0`; see [`SystemLabel::try_new`].
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self::try_new(name, dim).expect("system dimension must be positive")
    }

    pub fn try_new(name: impl Into<String>, dim: usize) -> Result<Self> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::ZeroDimension { name, dim });
        }
        Ok(Self { name, dim })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Isomorphic copy named `<name>'`.
    pub fn primed(&self) -> Self {
        Self {
            name: format!("{}'", self.name),
            dim: self.dim,
        }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            dim: self.dim,
        }
    }
}

impl fmt::Display for SystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.dim)
    }
}

pub(crate) fn total_dim(systems: &[SystemLabel]) -> usize {
    systems.iter().map(SystemLabel::dim).product()
}

pub(crate) fn check_unique(systems: &[SystemLabel]) -> Result<()> {
    let mut seen = HashSet::with_capacity(systems.len());
    for s in systems {
        if !seen.insert(s.name()) {
            return Err(Error::SystemClash(s.name().to_owned()));
        }
    }
    Ok(())
}

pub(crate) fn position(systems: &[SystemLabel], name: &str) -> Result<usize> {
    systems
        .iter()
        .position(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownSystem(name.to_owned()))
}

/// Row-major strides: the first system is the most significant digit.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * dims[i + 1];
    }
    out
}

/// Offsets into the full index space spanned by the digits at `positions`,
/// enumerated in row-major order over those positions.
pub(crate) fn offsets(dims: &[usize], positions: &[usize]) -> Vec<usize> {
    let full = strides(dims);
    let sub: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
    let n: usize = sub.iter().product();
    let mut out = Vec::with_capacity(n);
    let mut digits = vec![0usize; positions.len()];
    for _ in 0..n {
        out.push(positions.iter().zip(&digits).map(|(&p, &d)| d * full[p]).sum());
        for j in (0..digits.len()).rev() {
            digits[j] += 1;
            if digits[j] < sub[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    out
}
