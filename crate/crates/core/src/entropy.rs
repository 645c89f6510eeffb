//! One-shot entropies in bits.
//!
//! The δ-tilde conditional 2-entropy weights `rho^{AB}` by the quarter
//! power of the δ-truncated conditioning marginal on both sides:
//!
//! `H = -log2 Tr[(W rho W)^2]`, `W = I^A ⊗ (rho^B_δ)^{-1/4}`,
//!
//! which equals `-log2 Tr[((I ⊗ rho_δ^{-1/2}) rho)^2]` for Hermitian `rho`.
//! Components of `rho` outside the support of `rho^B_δ` are annihilated by
//! the pseudoinverse.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::spectral::{pseudo_power_matrix, support_projector, HermitianSpectrum};
use crate::tensor::{delta_truncate_detailed, MultipartiteOperator, SystemLabel, DENSITY_TRACE_TOL};

/// Entropy value with the truncation data behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub value: f64,
    pub delta: f64,
    pub truncated_mass: f64,
    pub support_rank: usize,
}

fn check_state(rho: &MultipartiteOperator) -> Result<()> {
    rho.ensure_psd()?;
    let t = rho.trace().re;
    if t > 1.0 + DENSITY_TRACE_TOL {
        return Err(Error::InvalidArgument(format!("trace {t} exceeds 1")));
    }
    Ok(())
}

fn check_cond<S: AsRef<str>>(rho: &MultipartiteOperator, cond: &[S]) -> Result<()> {
    for s in cond {
        rho.system(s.as_ref())?;
    }
    let distinct = rho
        .names()
        .iter()
        .filter(|n| cond.iter().any(|c| c.as_ref() == **n))
        .count();
    if distinct == rho.systems().len() {
        return Err(Error::InvalidArgument(
            "conditioning on every system leaves nothing to measure".into(),
        ));
    }
    Ok(())
}

/// `Tr[(W rho W)^2]` with `W = I ⊗ weight^{-1/4}` (pseudoinverse power).
fn weighted_collision(rho: &MultipartiteOperator, weight: &MultipartiteOperator) -> Result<f64> {
    let w = weight.with_matrix(pseudo_power_matrix(weight.matrix(), -0.25));
    let w = w.extend_to(rho.systems())?;
    let x = w.matrix() * rho.matrix() * w.matrix();
    Ok(x.iter().map(|z| z.norm_sqr()).sum())
}

fn neg_log2(q: f64) -> Result<f64> {
    if q > 0.0 && q.is_finite() {
        Ok(-q.log2())
    } else {
        Err(Error::EmptySupport)
    }
}

/// `H̃_{2,δ}(A|B)`; `cond` names the systems `B`. An empty `cond`
/// conditions on a trivial system: `-log2 (Tr[rho^2] / Tr[rho])`.
pub fn tilde_h2_cond<S: AsRef<str>>(
    rho: &MultipartiteOperator,
    cond: &[S],
    delta: f64,
) -> Result<EntropyReport> {
    check_state(rho)?;
    check_cond(rho, cond)?;
    let marginal = rho.partial_trace(cond)?;
    let trunc = delta_truncate_detailed(&marginal, delta)?;
    if trunc.kept_rank == 0 {
        return Err(Error::EmptySupport);
    }
    let q = weighted_collision(rho, &trunc.operator)?;
    Ok(EntropyReport {
        value: neg_log2(q)?,
        delta,
        truncated_mass: trunc.removed_mass,
        support_rank: trunc.kept_rank,
    })
}

/// `H̃_2(A)` of the whole operator, i.e. conditioning on nothing.
pub fn tilde_h2(rho: &MultipartiteOperator, delta: f64) -> Result<EntropyReport> {
    tilde_h2_cond::<&str>(rho, &[], delta)
}

/// Reserved for the ε-smoothed variant; no algorithm is provided.
pub fn tilde_h2_cond_smooth<S: AsRef<str>>(
    _rho: &MultipartiteOperator,
    _cond: &[S],
    _delta: f64,
    _epsilon: f64,
) -> Result<EntropyReport> {
    Err(Error::Unimplemented(
        "epsilon-smoothed tilde conditional 2-entropy",
    ))
}

/// `log2 ‖(rho_δ)^{-1}‖_∞`, minus the log of the smallest surviving eigenvalue.
pub fn tilde_hmax_delta(rho: &MultipartiteOperator, delta: f64) -> Result<f64> {
    rho.ensure_psd()?;
    let trunc = delta_truncate_detailed(rho, delta)?;
    if trunc.kept_rank == 0 {
        return Err(Error::EmptySupport);
    }
    let spec = HermitianSpectrum::of(trunc.operator.matrix());
    let tol = spec.cutoff();
    let smallest = spec
        .values
        .iter()
        .copied()
        .filter(|&v| v > tol)
        .fold(f64::INFINITY, f64::min);
    neg_log2(smallest)
}

/// `2 log2 Tr[sqrt(rho)]`, the unsmoothed max entropy. Eigenvalues under
/// the rank cutoff count as zero.
pub fn hmax(rho: &MultipartiteOperator) -> Result<f64> {
    rho.ensure_psd()?;
    let s = pseudo_power_matrix(rho.matrix(), 0.5).trace().re;
    if s <= 0.0 {
        return Err(Error::EmptySupport);
    }
    Ok(2.0 * s.log2())
}

/// Reserved for the ε-smoothed max entropy.
pub fn hmax_smooth(_rho: &MultipartiteOperator, _epsilon: f64) -> Result<f64> {
    Err(Error::Unimplemented("epsilon-smoothed max entropy"))
}

fn check_weight<S: AsRef<str>>(
    rho: &MultipartiteOperator,
    cond: &[S],
    weight: &MultipartiteOperator,
) -> Result<MultipartiteOperator> {
    check_cond(rho, cond)?;
    weight.ensure_psd()?;
    let marginal = rho.partial_trace(cond)?;
    let same = weight.systems().len() == marginal.systems().len()
        && weight
            .systems()
            .iter()
            .all(|s| marginal.systems().iter().any(|m| m == s));
    if !same {
        return Err(Error::DimensionMismatch(format!(
            "weight lives on {:?}, conditioning systems are {:?}",
            weight.names(),
            marginal.names()
        )));
    }
    let names = marginal.names();
    weight.reorder(&names)
}

/// `-2 log2 ‖(weight ⊗ I)^{-1/4} rho (weight ⊗ I)^{-1/4}‖_2` for a fixed
/// weight on the conditioning systems. The support of the weight must
/// contain the support of `rho^B`.
pub fn h2_cond_fixed<S: AsRef<str>>(
    rho: &MultipartiteOperator,
    cond: &[S],
    weight: &MultipartiteOperator,
) -> Result<f64> {
    rho.ensure_psd()?;
    let weight = check_weight(rho, cond, weight)?;
    let marginal = rho.partial_trace(cond)?;
    let p = support_projector(weight.matrix());
    let leak = (marginal.matrix() - &p * marginal.matrix() * &p).norm();
    if leak > 1e-10 * marginal.matrix().norm().max(1.0) {
        return Err(Error::SupportMismatch(leak));
    }
    neg_log2(weighted_collision(rho, &weight)?)
}

/// As [`h2_cond_fixed`] but parts of `rho` outside the weight's support are
/// dropped instead of rejected.
pub fn h2_cond_weighted<S: AsRef<str>>(
    rho: &MultipartiteOperator,
    cond: &[S],
    weight: &MultipartiteOperator,
) -> Result<f64> {
    rho.ensure_psd()?;
    let weight = check_weight(rho, cond, weight)?;
    neg_log2(weighted_collision(rho, &weight)?)
}

/// Label helper: the systems of `rho` not listed in `cond`.
pub fn complement<S: AsRef<str>>(rho: &MultipartiteOperator, cond: &[S]) -> Vec<SystemLabel> {
    rho.systems()
        .iter()
        .filter(|s| !cond.iter().any(|c| c.as_ref() == s.name()))
        .cloned()
        .collect()
}
