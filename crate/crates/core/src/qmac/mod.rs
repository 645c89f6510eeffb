//! One-shot coding over a two-sender quantum multiple access channel
//! `N: A'B' -> C`: control states, the error ledger of an
//! entanglement-assisted code, inner-bound rate regions, and decoders
//! extracted from Uhlmann's theorem.

mod region;
mod uhlmann;

pub use region::{ent_gen_region, rate_region, EntGenRegion, RateConstraint, RateQuadruple, RateRegion};
pub use uhlmann::{uhlmann_isometry, UhlmannDecoder};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::channels::QuantumChannel;
use crate::decoupling::{lhs_estimate, DecouplingExperiment, LhsEstimate};
use crate::entropy::{hmax, tilde_h2, tilde_h2_cond};
use crate::error::{Error, Result};
use crate::tensor::{PureState, SystemLabel, C64};

/// Name of the Stinespring environment of the channel.
pub const ENVIRONMENT: &str = "E";

/// `ω^{A''B''CE} = (I ⊗ V_N)(Ω^{A''A'} ⊗ Δ^{B''B'})`.
#[derive(Debug, Clone)]
pub struct ControlState {
    /// Systems in the order `A'', B'', C..., E`.
    pub omega: PureState,
    pub omega_in: PureState,
    pub delta_in: PureState,
    pub channel: QuantumChannel,
    a2: SystemLabel,
    b2: SystemLabel,
}

/// The partner of `input` in a two-system pure state.
fn partner(state: &PureState, input: &SystemLabel) -> Result<SystemLabel> {
    if state.systems().len() != 2 {
        return Err(Error::DimensionMismatch(
            "control inputs must be pure states on exactly two systems".into(),
        ));
    }
    let pos = state
        .systems()
        .iter()
        .position(|s| s.name() == input.name())
        .ok_or_else(|| Error::UnknownSystem(input.name().to_owned()))?;
    if state.systems()[pos].dim() != input.dim() {
        return Err(Error::DimensionMismatch(format!(
            "`{}` has dimension {} in the control state but {} in the channel",
            input.name(),
            state.systems()[pos].dim(),
            input.dim()
        )));
    }
    Ok(state.systems()[1 - pos].clone())
}

pub fn control_state(
    channel: &QuantumChannel,
    omega_in: &PureState,
    delta_in: &PureState,
) -> Result<ControlState> {
    if channel.inputs().len() != 2 {
        return Err(Error::DimensionMismatch("a QMAC has exactly two inputs".into()));
    }
    channel.ensure_tp()?;
    let (a1, b1) = (&channel.inputs()[0], &channel.inputs()[1]);
    let a2 = partner(omega_in, a1)?;
    let b2 = partner(delta_in, b1)?;
    let v = channel.stinespring_with(ENVIRONMENT)?;
    let joint = omega_in.tensor_product(delta_in)?;
    let mut outs = channel.outputs().to_vec();
    outs.push(v.environment().clone());
    let out = joint.apply(v.matrix(), &[a1.name(), b1.name()], outs.clone())?;
    let mut order = vec![a2.name().to_owned(), b2.name().to_owned()];
    order.extend(outs.iter().map(|s| s.name().to_owned()));
    Ok(ControlState {
        omega: out.reorder(&order)?,
        omega_in: omega_in.clone(),
        delta_in: delta_in.clone(),
        channel: channel.clone(),
        a2,
        b2,
    })
}

impl ControlState {
    pub fn a2(&self) -> &SystemLabel {
        &self.a2
    }

    pub fn b2(&self) -> &SystemLabel {
        &self.b2
    }

    pub fn environment(&self) -> &SystemLabel {
        self.omega
            .systems()
            .last()
            .expect("environment is always present")
    }

    /// `H̃_{2,δ}(X|E)` of `ω` for `X` a subset of `{A'', B''}`.
    pub fn h_given_e(&self, x: &[&SystemLabel], delta: f64) -> Result<f64> {
        let e = self.environment().name();
        let mut keep: Vec<&str> = x.iter().map(|s| s.name()).collect();
        keep.push(e);
        Ok(tilde_h2_cond(&self.omega.marginal(&keep)?, &[e], delta)?.value)
    }

    pub fn h_unconditioned(&self, x: &SystemLabel, delta: f64) -> Result<f64> {
        Ok(tilde_h2(&self.omega.marginal(&[x.name()])?, delta)?.value)
    }

    /// `T(X) = |A''B''| N^c(op(Ω) ⊗ op(Δ) X (...)^dag)` on fresh inputs named
    /// `a` and `b`, where `op(Ω)[a', a''] = Ω[a'', a']`. Its Choi state on
    /// mirrors `A''B''` is `ω^{A''B''E}`.
    pub fn transmission_map(&self, a: &str, b: &str) -> Result<QuantumChannel> {
        let comp = self.channel.complementary_with(ENVIRONMENT)?;
        let (op_a, _, _) = self.omega_in.split(&[self.a2.name()])?;
        let (op_b, _, _) = self.delta_in.split(&[self.b2.name()])?;
        let scale = ((self.a2.dim() * self.b2.dim()) as f64).sqrt();
        let pre: DMatrix<C64> = op_a.transpose().kronecker(&op_b.transpose()) * C64::new(scale, 0.0);
        comp.precompose(&pre, vec![self.a2.renamed(a), self.b2.renamed(b)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntropies {
    pub h_a2b2_given_e: f64,
    pub h_a2_given_e: f64,
    pub h_b2_given_e: f64,
    pub h_a_given_r1: f64,
    pub h_b_given_r2: f64,
    pub hmax_a: f64,
    pub hmax_b: f64,
    pub h_a2: f64,
    pub h_b2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorLedger {
    pub delta: f64,
    pub delta1_squared: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    /// Set when `δ₂` or `δ₃` exceeds 1: the source is too large for the
    /// control state and the encoder terms dominate.
    pub encoder_mismatch: bool,
    pub entropies: LedgerEntropies,
}

fn conditional_on_rest(state: &PureState, x: &str, delta: f64) -> Result<f64> {
    let rest: Vec<&str> = state.names().into_iter().filter(|n| *n != x).collect();
    Ok(tilde_h2_cond(&state.density(), &rest, delta)?.value)
}

/// Error terms for sources `ψ^{A R₁}` and `φ^{B R₂}`; `a` and `b` name the
/// source systems and every other system is the respective reference.
pub fn error_ledger(
    cs: &ControlState,
    psi: &PureState,
    a: &str,
    phi: &PureState,
    b: &str,
    delta: f64,
) -> Result<ErrorLedger> {
    let (a2, b2) = (cs.a2.clone(), cs.b2.clone());
    let ent = LedgerEntropies {
        h_a2b2_given_e: cs.h_given_e(&[&a2, &b2], delta)?,
        h_a2_given_e: cs.h_given_e(&[&a2], delta)?,
        h_b2_given_e: cs.h_given_e(&[&b2], delta)?,
        h_a_given_r1: conditional_on_rest(psi, a, delta)?,
        h_b_given_r2: conditional_on_rest(phi, b, delta)?,
        hmax_a: hmax(&psi.marginal(&[a])?)?,
        hmax_b: hmax(&phi.marginal(&[b])?)?,
        h_a2: cs.h_unconditioned(&a2, delta)?,
        h_b2: cs.h_unconditioned(&b2, delta)?,
    };
    let d1sq = delta
        + (-ent.h_a2b2_given_e - ent.h_a_given_r1 - ent.h_b_given_r2).exp2()
        + (-ent.h_b2_given_e - ent.h_b_given_r2).exp2()
        + (-ent.h_a2_given_e - ent.h_a_given_r1).exp2();
    let d1 = d1sq.sqrt();
    let d2 = (0.5 * (ent.hmax_a - ent.h_a2)).exp2();
    let d3 = (0.5 * (ent.hmax_b - ent.h_b2)).exp2();
    Ok(ErrorLedger {
        delta,
        delta1_squared: d1sq,
        delta1: d1,
        delta2: d2,
        delta3: d3,
        delta4: d1 + 4.0 * d2.sqrt() + 4.0 * d3.sqrt() + 12.0 * (d2 * d3).sqrt(),
        encoder_mismatch: d2 > 1.0 || d3 > 1.0,
        entropies: ent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingCheck {
    pub lhs: LhsEstimate,
    pub ledger: ErrorLedger,
    pub passes: bool,
}

/// Names of the code spaces fed to the transmission map.
pub const CODE_A: &str = "Acode";
pub const CODE_B: &str = "Bcode";

/// `|x> -> |x>` from `from` into the first basis vectors of `to`.
fn coordinate_embedding(from: usize, to: usize) -> Result<DMatrix<C64>> {
    if from > to {
        return Err(Error::Infeasible(format!(
            "source of dimension {from} does not embed into dimension {to}"
        )));
    }
    Ok(DMatrix::from_fn(to, from, |r, c| {
        C64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
    }))
}

fn source_dim(state: &PureState, name: &str) -> Result<usize> {
    state
        .systems()
        .iter()
        .find(|s| s.name() == name)
        .map(SystemLabel::dim)
        .ok_or_else(|| Error::UnknownSystem(name.to_owned()))
}

/// Monte-Carlo check of the decoupling premise of the code: the sources are
/// embedded into the code spaces, scrambled by independent Haar unitaries
/// and sent through the transmission map; the averaged distance to
/// `ω^E ⊗ ψ^{R₁} ⊗ φ^{R₂}` is compared with `δ₁`.
#[allow(clippy::too_many_arguments)]
pub fn decoupling_check_for_encoding(
    cs: &ControlState,
    psi: &PureState,
    a: &str,
    phi: &PureState,
    b: &str,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<EncodingCheck> {
    let ledger = error_ledger(cs, psi, a, phi, b, delta)?;
    let t = cs.transmission_map(CODE_A, CODE_B)?;
    let wa = coordinate_embedding(source_dim(psi, a)?, cs.a2.dim())?;
    let wb = coordinate_embedding(source_dim(phi, b)?, cs.b2.dim())?;
    let pa = psi.apply(&wa, &[a], vec![cs.a2.renamed(CODE_A)])?;
    let pb = phi.apply(&wb, &[b], vec![cs.b2.renamed(CODE_B)])?;
    let input = pa.tensor_product(&pb)?.density();
    let exp = DecouplingExperiment::new(t, input, delta, samples, seed)?;
    let lhs = lhs_estimate(&exp)?;
    Ok(EncodingCheck {
        passes: lhs.mean <= ledger.delta1 + 3.0 * lhs.stderr,
        lhs,
        ledger,
    })
}
