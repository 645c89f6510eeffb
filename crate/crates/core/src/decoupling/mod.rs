//! Tensor-product decoupling: the Haar-averaged trace distance
//! `E ‖T((⊗ U_i) ρ (⊗ U_i)^dag) - ω^E ⊗ ρ^R‖₁` by Monte Carlo, and the
//! analytic upper bounds built from weighted 2-norms.
//!
//! Senders are the channel inputs, in channel order; bit strings over them
//! use the same most-significant-first convention as [`crate::twirl`].
//! Every other system of the input state is the reference `R`.

mod bounds;

pub use bounds::{
    k_sender_from_norms, rhs_buscemi, rhs_entropic, rhs_k_sender, rhs_two_sender, two_sender_from_norms,
    EntropicBound, KSenderBound, TwoSenderBound,
};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{ChoiState, QuantumChannel};
use crate::error::{Error, Result};
use crate::random::{haar_unitary, stream_rng};
use crate::tensor::spectral::pseudo_power_matrix;
use crate::tensor::{delta_truncate_detailed, trace_norm_hermitian, MultipartiteOperator, SystemLabel, C64};
use crate::twirl::{bit, bit_label, CHUNK};

#[derive(Debug, Clone)]
pub struct DecouplingExperiment {
    pub channel: QuantumChannel,
    pub input: MultipartiteOperator,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
}

impl DecouplingExperiment {
    pub fn new(
        channel: QuantumChannel,
        input: MultipartiteOperator,
        delta: f64,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidDelta(delta));
        }
        input.ensure_psd()?;
        if !input.is_density() {
            return Err(Error::InvalidArgument(format!(
                "input must have unit trace, got {}",
                input.trace().re
            )));
        }
        for s in channel.inputs() {
            let found = input.system(s.name())?;
            if found.dim() != s.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "sender `{}` has dimension {} in the state but {} in the channel",
                    s.name(),
                    found.dim(),
                    s.dim()
                )));
            }
        }
        let exp = Self {
            channel,
            input,
            delta,
            samples,
            seed,
        };
        for o in exp.channel.outputs() {
            if exp.reference().iter().any(|r| r.name() == o.name()) {
                return Err(Error::SystemClash(o.name().to_owned()));
            }
        }
        Ok(exp)
    }

    pub fn senders(&self) -> &[SystemLabel] {
        self.channel.inputs()
    }

    pub fn k(&self) -> usize {
        self.senders().len()
    }

    pub fn sender_dims(&self) -> Vec<usize> {
        self.senders().iter().map(SystemLabel::dim).collect()
    }

    /// Systems of the input that the channel does not touch.
    pub fn reference(&self) -> Vec<SystemLabel> {
        self.input
            .systems()
            .iter()
            .filter(|s| !self.senders().iter().any(|a| a.name() == s.name()))
            .cloned()
            .collect()
    }

    pub fn reference_names(&self) -> Vec<String> {
        self.reference().iter().map(|s| s.name().to_owned()).collect()
    }

    /// `ω^E`, the output marginal of the Choi state.
    pub fn omega_e(&self) -> Result<MultipartiteOperator> {
        self.channel.choi()?.output_marginal()
    }

    pub fn rho_r(&self) -> Result<MultipartiteOperator> {
        self.input.partial_trace(&self.reference_names())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LhsEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Per-sample trace distances in sample order.
pub fn lhs_samples(exp: &DecouplingExperiment) -> Result<Vec<f64>> {
    let prepared = exp.channel.prepare(exp.input.systems())?;
    let x = prepared.align(&exp.input)?;
    let target = exp.omega_e()?.tensor_product(&exp.rho_r()?)?;
    let out_names: Vec<&str> = prepared.output_layout().iter().map(SystemLabel::name).collect();
    let target = target.reorder(&out_names)?.into_matrix();
    let dims = exp.sender_dims();
    let d_r: usize = exp.reference().iter().map(SystemLabel::dim).product();
    let eye_r = DMatrix::<C64>::identity(d_r, d_r);
    let (samples, seed) = (exp.samples, exp.seed);
    let chunks = samples.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(samples))
                .map(|s| {
                    let mut rng = stream_rng(seed, s as u64);
                    let mut w = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
                    for &d in &dims {
                        w = w.kronecker(&haar_unitary(d, &mut rng));
                    }
                    let w = w.kronecker(&eye_r);
                    let y = &w * &x * w.adjoint();
                    trace_norm_hermitian(&(prepared.act(&y) - &target))
                })
                .collect()
        })
        .collect();
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Sample mean of the trace distance with its standard error.
pub fn lhs_estimate(exp: &DecouplingExperiment) -> Result<LhsEstimate> {
    if exp.samples < 2 {
        return Err(Error::InvalidArgument(
            "lhs_estimate needs at least 2 samples".into(),
        ));
    }
    let v = lhs_samples(exp)?;
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok(LhsEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples: v.len(),
    })
}

/// The weighted objects behind every bound.
#[derive(Debug, Clone)]
pub struct TildeTriple {
    pub sigma_e: MultipartiteOperator,
    pub zeta_r: MultipartiteOperator,
    pub tilde_channel: QuantumChannel,
    pub tilde_rho: MultipartiteOperator,
    pub tilde_omega: ChoiState,
    senders: Vec<SystemLabel>,
    reference: Vec<String>,
}

/// Squared 2-norms `‖ρ̃^{A^b R}‖₂²` and `‖ω̃^{A'^b E}‖₂²`, indexed by bit string.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermNorms {
    pub dims: Vec<usize>,
    pub delta: f64,
    pub labels: Vec<String>,
    pub rho: Vec<f64>,
    pub omega: Vec<f64>,
}

impl TermNorms {
    pub fn k(&self) -> usize {
        self.dims.len()
    }
}

pub fn tilde_objects(exp: &DecouplingExperiment) -> Result<TildeTriple> {
    let sigma = delta_truncate_detailed(&exp.omega_e()?, exp.delta)?;
    let zeta = delta_truncate_detailed(&exp.rho_r()?, exp.delta)?;
    if sigma.kept_rank == 0 || zeta.kept_rank == 0 {
        return Err(Error::EmptySupport);
    }
    let sigma_e = sigma.operator;
    let zeta_r = zeta.operator;
    let tilde_channel = exp
        .channel
        .then_conjugate(&pseudo_power_matrix(sigma_e.matrix(), -0.25))?;
    let w = zeta_r.with_matrix(pseudo_power_matrix(zeta_r.matrix(), -0.25));
    let w = w.extend_to(exp.input.systems())?;
    let tilde_rho = exp
        .input
        .with_matrix(w.matrix() * exp.input.matrix() * w.matrix());
    let tilde_omega = tilde_channel.choi()?;
    Ok(TildeTriple {
        sigma_e,
        zeta_r,
        tilde_channel,
        tilde_rho,
        tilde_omega,
        senders: exp.senders().to_vec(),
        reference: exp.reference_names(),
    })
}

impl TildeTriple {
    fn chosen(&self, b: usize) -> Vec<usize> {
        let k = self.senders.len();
        (0..k).filter(|&i| bit(b, i, k)).collect()
    }

    pub fn rho_norm(&self, b: usize) -> Result<f64> {
        let mut keep: Vec<String> = self
            .chosen(b)
            .into_iter()
            .map(|i| self.senders[i].name().to_owned())
            .collect();
        keep.extend(self.reference.iter().cloned());
        Ok(self.tilde_rho.partial_trace(&keep)?.matrix().norm_squared())
    }

    pub fn omega_norm(&self, b: usize) -> Result<f64> {
        let mirrors: Vec<&str> = self
            .chosen(b)
            .into_iter()
            .map(|i| self.tilde_omega.mirrors[i].name())
            .collect();
        Ok(self.tilde_omega.marginal(&mirrors)?.matrix().norm_squared())
    }

    pub fn norms(&self, delta: f64) -> Result<TermNorms> {
        let k = self.senders.len();
        let all = 0..1usize << k;
        Ok(TermNorms {
            dims: self.senders.iter().map(SystemLabel::dim).collect(),
            delta,
            labels: all.clone().map(|b| bit_label(b, k)).collect(),
            rho: all.clone().map(|b| self.rho_norm(b)).collect::<Result<_>>()?,
            omega: all.map(|b| self.omega_norm(b)).collect::<Result<_>>()?,
        })
    }
}

pub fn term_norms(exp: &DecouplingExperiment) -> Result<TermNorms> {
    tilde_objects(exp)?.norms(exp.delta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermNorm {
    pub bits: String,
    pub rho: f64,
    pub omega: f64,
}

/// Both sides of the inequality for one experiment. Bounds that do not
/// apply to the sender count are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecouplingReport {
    pub lhs_mean: f64,
    pub lhs_stderr: f64,
    pub rhs_thm1: Option<f64>,
    pub rhs_cor1: Option<f64>,
    pub rhs_thm3: Option<f64>,
    pub per_term_norms: Vec<TermNorm>,
    pub rhs_cor1_conservative: Option<f64>,
    pub rhs_thm3_squared: Option<f64>,
    pub relabeled: bool,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
}

impl DecouplingReport {
    /// The tightest 1-norm bound on offer, capped at 2.
    pub fn best_bound(&self) -> f64 {
        [self.rhs_thm1, self.rhs_thm3]
            .into_iter()
            .flatten()
            .fold(2.0, f64::min)
    }
}

pub fn run_experiment(exp: &DecouplingExperiment) -> Result<DecouplingReport> {
    let lhs = lhs_estimate(exp)?;
    let norms = term_norms(exp)?;
    let k = norms.k();
    let (mut thm1, mut cor1, mut cor1c, mut relabeled) = (None, None, None, false);
    if k == 2 {
        let t = two_sender_from_norms(&norms)?;
        relabeled = t.relabeled;
        thm1 = Some(t.value);
        let e = rhs_entropic(exp)?;
        cor1 = Some(e.value);
        cor1c = Some(e.conservative);
    }
    let (thm3, thm3_sq) = if k >= 2 {
        let t = k_sender_from_norms(&norms)?;
        (Some(t.value), Some(t.squared))
    } else {
        (None, None)
    };
    Ok(DecouplingReport {
        lhs_mean: lhs.mean,
        lhs_stderr: lhs.stderr,
        rhs_thm1: thm1,
        rhs_cor1: cor1,
        rhs_thm3: thm3,
        per_term_norms: norms
            .labels
            .iter()
            .zip(norms.rho.iter().zip(&norms.omega))
            .map(|(l, (&r, &o))| TermNorm {
                bits: l.clone(),
                rho: r,
                omega: o,
            })
            .collect(),
        rhs_cor1_conservative: cor1c,
        rhs_thm3_squared: thm3_sq,
        relabeled,
        delta: exp.delta,
        samples: exp.samples,
        seed: exp.seed,
    })
}
