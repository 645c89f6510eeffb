use serde::Serialize;

use super::{term_norms, DecouplingExperiment, TermNorms};
use crate::channels::CompressionProjector;
use crate::entropy::tilde_h2_cond;
use crate::error::{Error, Result};
use crate::tensor::MultipartiteOperator;
use crate::twirl::bit;

fn check_dims(dims: &[usize]) -> Result<()> {
    match dims.iter().position(|&d| d < 2) {
        Some(i) => Err(Error::DegenerateSender(format!("sender {i}"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSenderBound {
    /// The 1-norm bound.
    pub value: f64,
    /// The quantity under the square root.
    pub squared: f64,
    /// Squared weighted 2-distance as it comes out of the twirl, before the
    /// `‖ρ̃^R‖²‖ω̃^E‖² / (|A_2|²-1)` term is traded for `δ`.
    pub proof_squared: f64,
    /// Whether the first sender was the larger one and the roles were swapped.
    pub relabeled: bool,
}

pub fn two_sender_from_norms(n: &TermNorms) -> Result<TwoSenderBound> {
    if n.k() != 2 {
        return Err(Error::InvalidArgument("two-sender bound needs k = 2".into()));
    }
    check_dims(&n.dims)?;
    let big = n.dims[0].max(n.dims[1]) as f64;
    let c = big * big / (big * big - 1.0);
    let terms: f64 = (1..4).map(|b| n.rho[b] * n.omega[b]).sum();
    let squared = n.delta + c * terms;
    Ok(TwoSenderBound {
        value: squared.sqrt(),
        squared,
        proof_squared: n.rho[0] * n.omega[0] / (big * big - 1.0) + c * terms,
        relabeled: n.dims[0] > n.dims[1],
    })
}

pub fn rhs_two_sender(exp: &DecouplingExperiment) -> Result<TwoSenderBound> {
    two_sender_from_norms(&term_norms(exp)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropicBound {
    /// `δ + 2 Σ_b 2^{-H(A^b|R)-H(A'^b|E)}` as stated, without a root.
    pub value: f64,
    /// `max(value, sqrt(value))`, the larger of the two readings.
    pub conservative: f64,
    /// `(H(A^b|R)_ρ, H(A'^b|E)_ω)` for `b = 01, 10, 11`.
    pub entropies: Vec<(f64, f64)>,
}

pub fn rhs_entropic(exp: &DecouplingExperiment) -> Result<EntropicBound> {
    if exp.k() != 2 {
        return Err(Error::InvalidArgument("entropic bound needs k = 2".into()));
    }
    check_dims(&exp.sender_dims())?;
    let r = exp.reference_names();
    let choi = exp.channel.choi()?;
    let outputs: Vec<String> = choi.outputs.iter().map(|s| s.name().to_owned()).collect();
    let mut entropies = Vec::with_capacity(3);
    for b in 1..4 {
        let chosen: Vec<usize> = (0..2).filter(|&i| bit(b, i, 2)).collect();
        let mut keep: Vec<String> = chosen
            .iter()
            .map(|&i| exp.senders()[i].name().to_owned())
            .collect();
        keep.extend(r.iter().cloned());
        let h_rho = tilde_h2_cond(&exp.input.partial_trace(&keep)?, &r, exp.delta)?.value;
        let mirrors: Vec<&str> = chosen.iter().map(|&i| choi.mirrors[i].name()).collect();
        let h_omega = tilde_h2_cond(&choi.marginal(&mirrors)?, &outputs, exp.delta)?.value;
        entropies.push((h_rho, h_omega));
    }
    let sum: f64 = entropies.iter().map(|(a, b)| (-a - b).exp2()).sum();
    let value = exp.delta + 2.0 * sum;
    Ok(EntropicBound {
        value,
        conservative: value.max(value.sqrt()),
        entropies,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSenderBound {
    /// The 1-norm bound, `sqrt(squared)`.
    pub value: f64,
    /// Bound on the squared weighted 2-distance.
    pub squared: f64,
    /// Index of the sender playing the role of the smallest one.
    pub smallest: usize,
}

pub fn k_sender_from_norms(n: &TermNorms) -> Result<KSenderBound> {
    let k = n.k();
    if k < 2 {
        return Err(Error::InvalidArgument("k-sender bound needs k >= 2".into()));
    }
    check_dims(&n.dims)?;
    let small = (0..k).min_by_key(|&i| (n.dims[i], i)).unwrap_or(0);
    let f: Vec<f64> = n.dims.iter().map(|&d| d as f64).collect();
    let rest = (0..k).filter(|&i| i != small);
    let rest_ratio: f64 = rest.map(|i| f[i] * f[i] / (f[i] * f[i] - 1.0)).product();
    let all_ratio: f64 = f.iter().map(|d| d * d / (d * d - 1.0)).product();
    let pow = (1u64 << k) as f64;
    let tail: f64 = (1..1usize << k)
        .map(|b| n.omega[b] * (n.rho[b] * pow + n.rho[0]))
        .sum();
    let squared = (rest_ratio - 1.0) * n.omega[0] * n.rho[0] + all_ratio * tail;
    Ok(KSenderBound {
        value: squared.sqrt(),
        squared,
        smallest: small,
    })
}

pub fn rhs_k_sender(exp: &DecouplingExperiment) -> Result<KSenderBound> {
    k_sender_from_norms(&term_norms(exp)?)
}

/// `sqrt(δ + 2 Σ_{b≠0} |E^b| 2^{-H(A^b|R)})` for compression to the
/// projector ranks; senders are the projector inputs, the rest of `rho` is `R`.
pub fn rhs_buscemi(
    projectors: &[CompressionProjector],
    rho: &MultipartiteOperator,
    delta: f64,
) -> Result<f64> {
    let k = projectors.len();
    if k == 0 {
        return Err(Error::InvalidArgument(
            "at least one projector is required".into(),
        ));
    }
    let senders: Vec<&str> = projectors.iter().map(|p| p.input.name()).collect();
    let r: Vec<&str> = rho.names().into_iter().filter(|n| !senders.contains(n)).collect();
    let mut sum = 0.0;
    for b in 1..1usize << k {
        let mut keep: Vec<&str> = Vec::new();
        let mut e_dim = 1.0;
        for (i, p) in projectors.iter().enumerate() {
            if bit(b, i, k) {
                keep.push(p.input.name());
                e_dim *= p.output.dim() as f64;
            }
        }
        keep.extend(r.iter().copied());
        let h = tilde_h2_cond(&rho.partial_trace(&keep)?, &r, delta)?.value;
        sum += e_dim * (-h).exp2();
    }
    Ok((delta + 2.0 * sum).sqrt())
}
