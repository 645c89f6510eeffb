//! Spectral routines on Hermitian operators: pseudoinverse powers, the
//! δ-truncation primitive, Schatten norms and purification.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operator::MultipartiteOperator;
use super::state::PureState;
use super::system::SystemLabel;
use super::C64;
use crate::error::{Error, Result};

/// Eigendecomposition of the Hermitian part of a matrix.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: DMatrix<C64>,
}

impl HermitianSpectrum {
    pub fn of(m: &DMatrix<C64>) -> Self {
        let herm = (m + m.adjoint()).scale(0.5);
        let eig = herm.symmetric_eigen();
        Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Rank cutoff: `side * eps * lambda_max`.
    pub fn cutoff(&self) -> f64 {
        self.values.len() as f64 * f64::EPSILON * self.max().max(0.0)
    }

    pub fn rank(&self) -> usize {
        let tol = self.cutoff();
        self.values.iter().filter(|&&v| v > tol).count()
    }

    /// `sum_i f(lambda_i) |v_i><v_i|`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let n = self.vectors.nrows();
        let mut out = DMatrix::zeros(n, n);
        for (i, &v) in self.values.iter().enumerate() {
            let w = f(v);
            if w == 0.0 {
                continue;
            }
            let col = self.vectors.column(i);
            out += (col * col.adjoint()).scale(w);
        }
        out
    }

    /// Indices sorted by ascending eigenvalue, ties broken by index.
    pub fn ascending_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| {
            self.values[a]
                .partial_cmp(&self.values[b])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }
}

/// Negative powers supported by [`pseudo_inverse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativePower {
    MinusOne,
    MinusHalf,
    MinusQuarter,
}

impl NegativePower {
    pub fn exponent(self) -> f64 {
        match self {
            NegativePower::MinusOne => -1.0,
            NegativePower::MinusHalf => -0.5,
            NegativePower::MinusQuarter => -0.25,
        }
    }
}

/// Moore-Penrose power: `lambda^p` on the support, zero elsewhere.
/// Eigenvalues below `side * eps * lambda_max` count as zero.
pub fn pseudo_inverse(s: &MultipartiteOperator, power: NegativePower) -> Result<MultipartiteOperator> {
    s.ensure_psd()?;
    Ok(s.with_matrix(pseudo_power_matrix(s.matrix(), power.exponent())))
}

pub(crate) fn pseudo_power_matrix(m: &DMatrix<C64>, exponent: f64) -> DMatrix<C64> {
    let spec = HermitianSpectrum::of(m);
    let tol = spec.cutoff();
    spec.rebuild(|v| if v > tol { v.powf(exponent) } else { 0.0 })
}

/// Projector onto the support (eigenvalues above the rank cutoff).
pub(crate) fn support_projector(m: &DMatrix<C64>) -> DMatrix<C64> {
    let spec = HermitianSpectrum::of(m);
    let tol = spec.cutoff();
    spec.rebuild(|v| if v > tol { 1.0 } else { 0.0 })
}

/// Outcome of [`delta_truncate_detailed`].
#[derive(Debug, Clone)]
pub struct Truncation {
    pub operator: MultipartiteOperator,
    /// Eigenvalue mass that was zeroed out.
    pub removed_mass: f64,
    /// Number of positive eigenvalues that survive.
    pub kept_rank: usize,
}

/// Zeroes the longest ascending run of smallest eigenvalues whose sum does
/// not exceed `delta`, keeping the original eigenbasis.
pub fn delta_truncate(rho: &MultipartiteOperator, delta: f64) -> Result<MultipartiteOperator> {
    delta_truncate_detailed(rho, delta).map(|t| t.operator)
}

pub fn delta_truncate_detailed(rho: &MultipartiteOperator, delta: f64) -> Result<Truncation> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidDelta(delta));
    }
    rho.ensure_psd()?;
    let spec = HermitianSpectrum::of(rho.matrix());
    let tol = spec.cutoff();
    let clamped: Vec<f64> = spec.values.iter().map(|&v| v.max(0.0)).collect();

    let mut removed = vec![false; clamped.len()];
    let mut mass = 0.0;
    for i in spec.ascending_order() {
        let next = mass + clamped[i];
        if next > delta {
            break;
        }
        mass = next;
        removed[i] = true;
    }
    let kept_rank = clamped
        .iter()
        .zip(&removed)
        .filter(|(&v, &r)| !r && v > tol)
        .count();
    let touched = clamped.iter().zip(&removed).any(|(&v, &r)| r && v > 0.0);
    let operator = if touched {
        let n = clamped.len();
        let mut m = DMatrix::zeros(n, n);
        for i in (0..n).filter(|&i| !removed[i] && clamped[i] > 0.0) {
            let col = spec.vectors.column(i);
            m += (col * col.adjoint()).scale(clamped[i]);
        }
        rho.with_matrix(m)
    } else {
        rho.clone()
    };
    Ok(Truncation {
        operator,
        removed_mass: mass,
        kept_rank,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schatten {
    One,
    Two,
}

pub fn schatten_norm(x: &MultipartiteOperator, p: Schatten) -> f64 {
    match p {
        Schatten::One => x.matrix().clone().singular_values().iter().sum(),
        Schatten::Two => x.matrix().norm(),
    }
}

/// Trace norm of a Hermitian matrix as the absolute eigenvalue sum.
pub fn trace_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    HermitianSpectrum::of(m).values.iter().map(|v| v.abs()).sum()
}

/// `Tr[M^2]` for Hermitian `M`, i.e. the squared Frobenius norm.
pub fn purity(x: &MultipartiteOperator) -> f64 {
    x.matrix().norm_squared()
}

/// Rotates a vector so its largest-magnitude entry is real and positive.
pub(crate) fn canonical_phase(v: &mut DVector<C64>) {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Spectral purification `sum_i sqrt(lambda_i) |v_i>|i>` with eigenvalues in
/// descending order and each eigenvector phase-fixed.
pub fn purify(rho: &MultipartiteOperator, purifier: &SystemLabel) -> Result<PureState> {
    if !rho.is_density() {
        rho.ensure_psd()?;
        return Err(Error::InvalidArgument(format!(
            "purify needs a unit-trace state, trace is {}",
            rho.trace().re
        )));
    }
    let spec = HermitianSpectrum::of(rho.matrix());
    let rank = spec.rank();
    if purifier.dim() < rank {
        return Err(Error::PurifierTooSmall {
            rank,
            dim: purifier.dim(),
        });
    }
    let mut order = spec.ascending_order();
    order.reverse();
    let d = rho.side();
    let p = purifier.dim();
    let mut amps = DVector::zeros(d * p);
    let tol = spec.cutoff();
    for (slot, &i) in order.iter().take(p).enumerate() {
        let lambda = spec.values[i];
        if lambda <= tol {
            continue;
        }
        let mut v: DVector<C64> = spec.vectors.column(i).into_owned();
        canonical_phase(&mut v);
        let w = lambda.sqrt();
        for r in 0..d {
            amps[r * p + slot] += v[r] * w;
        }
    }
    let mut systems = rho.systems().to_vec();
    systems.push(purifier.clone());
    PureState::normalized(systems, amps)
}

/// Root fidelity `Tr sqrt(sqrt(rho) sigma sqrt(rho))`.
pub fn fidelity(rho: &MultipartiteOperator, sigma: &MultipartiteOperator) -> Result<f64> {
    let sigma = sigma.reorder(&rho.names())?;
    // eigenvalues under the rank cutoff are zeroed so that their rounding
    // noise is not amplified by the square roots
    let s = pseudo_power_matrix(rho.matrix(), 0.5);
    let inner = &s * sigma.matrix() * &s;
    let spec = HermitianSpectrum::of(&inner);
    let tol = spec.cutoff();
    Ok(spec
        .values
        .iter()
        .map(|&v| if v > tol { v.sqrt() } else { 0.0 })
        .sum())
}

pub(crate) fn c(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}
