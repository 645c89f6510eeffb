//! Completely positive maps in Kraus form.
//!
//! A channel acts on the named input systems of a larger operator and
//! leaves every other system untouched; wiring is always by system name.

mod catalog;
mod dilation;
mod json;

pub use catalog::{
    dephasing, depolarizing, erasure, identity, projector_compression, random_channel, unitary_channel,
    CompressionProjector,
};
pub use dilation::{ChoiState, StinespringIsometry};
pub use json::ChannelJson;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::{total_dim, HermitianSpectrum, MultipartiteOperator, SystemLabel, C64};

/// Deviation from `sum K^dag K = I` below which a map counts as trace preserving.
pub const TP_TOL: f64 = 1e-10;

/// CP map `X -> sum_k K_k X K_k^dag` from `inputs` to `outputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    inputs: Vec<SystemLabel>,
    outputs: Vec<SystemLabel>,
    kraus: Vec<DMatrix<C64>>,
    tp: bool,
}

impl QuantumChannel {
    /// Any completely positive map; `tp` is derived from the Kraus family.
    pub fn new(
        inputs: Vec<SystemLabel>,
        outputs: Vec<SystemLabel>,
        kraus: Vec<DMatrix<C64>>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus family".into()));
        }
        crate::tensor::MultipartiteOperator::identity(inputs.clone())?;
        crate::tensor::MultipartiteOperator::identity(outputs.clone())?;
        let (din, dout) = (total_dim(&inputs), total_dim(&outputs));
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let tp = tp_deviation(&kraus, din) <= TP_TOL;
        Ok(Self {
            inputs,
            outputs,
            kraus,
            tp,
        })
    }

    /// Like [`QuantumChannel::new`] but rejects maps that are not trace preserving.
    pub fn cptp(
        inputs: Vec<SystemLabel>,
        outputs: Vec<SystemLabel>,
        kraus: Vec<DMatrix<C64>>,
    ) -> Result<Self> {
        let ch = Self::new(inputs, outputs, kraus)?;
        ch.ensure_tp()?;
        Ok(ch)
    }

    pub fn inputs(&self) -> &[SystemLabel] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[SystemLabel] {
        &self.outputs
    }

    pub fn kraus(&self) -> &[DMatrix<C64>] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        total_dim(&self.inputs)
    }

    pub fn output_dim(&self) -> usize {
        total_dim(&self.outputs)
    }

    pub fn is_tp(&self) -> bool {
        self.tp
    }

    pub fn tp_deviation(&self) -> f64 {
        tp_deviation(&self.kraus, self.input_dim())
    }

    pub fn ensure_tp(&self) -> Result<()> {
        if self.tp {
            Ok(())
        } else {
            Err(Error::NotTracePreserving(self.tp_deviation()))
        }
    }

    /// Largest eigenvalue of `sum K^dag K`.
    pub fn kraus_norm(&self) -> f64 {
        HermitianSpectrum::of(&kraus_sum(&self.kraus, self.input_dim())).max()
    }

    pub fn is_trace_non_increasing(&self) -> bool {
        self.kraus_norm() <= 1.0 + TP_TOL
    }

    pub fn with_inputs(&self, inputs: Vec<SystemLabel>) -> Result<Self> {
        if inputs.iter().map(SystemLabel::dim).collect::<Vec<_>>()
            != self.inputs.iter().map(SystemLabel::dim).collect::<Vec<_>>()
        {
            return Err(Error::DimensionMismatch(
                "input relabeling changes dimensions".into(),
            ));
        }
        Self::new(inputs, self.outputs.clone(), self.kraus.clone())
    }

    pub fn with_outputs(&self, outputs: Vec<SystemLabel>) -> Result<Self> {
        if total_dim(&outputs) != self.output_dim() {
            return Err(Error::DimensionMismatch(
                "output relabeling changes dimension".into(),
            ));
        }
        Self::new(self.inputs.clone(), outputs, self.kraus.clone())
    }

    /// `X -> A T(X) A^dag`, i.e. every Kraus operator becomes `A K`.
    pub fn then_conjugate(&self, a: &DMatrix<C64>) -> Result<Self> {
        if a.ncols() != self.output_dim() || a.nrows() != self.output_dim() {
            return Err(Error::DimensionMismatch(
                "post-conjugation must act on the output space".into(),
            ));
        }
        Self::new(
            self.inputs.clone(),
            self.outputs.clone(),
            self.kraus.iter().map(|k| a * k).collect(),
        )
    }

    /// `X -> T(B X B^dag)` for an operator `B` from `new_inputs` into this
    /// channel's input space.
    pub fn precompose(&self, b: &DMatrix<C64>, new_inputs: Vec<SystemLabel>) -> Result<Self> {
        if b.nrows() != self.input_dim() || b.ncols() != total_dim(&new_inputs) {
            return Err(Error::DimensionMismatch(
                "pre-composition operator does not match the input space".into(),
            ));
        }
        Self::new(
            new_inputs,
            self.outputs.clone(),
            self.kraus.iter().map(|k| k * b).collect(),
        )
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor < 0.0 {
            return Err(Error::InvalidArgument("CP maps need a nonnegative scale".into()));
        }
        let s = factor.sqrt();
        Self::new(
            self.inputs.clone(),
            self.outputs.clone(),
            self.kraus.iter().map(|k| k.scale(s)).collect(),
        )
    }

    /// Kraus operators `K_a ⊗ L_b` on the concatenated systems.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs.extend(other.inputs.iter().cloned());
        let mut outputs = self.outputs.clone();
        outputs.extend(other.outputs.iter().cloned());
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b)))
            .collect();
        Self::new(inputs, outputs, kraus)
    }

    /// Precomputes the Kraus operators widened by the identity on the
    /// spectator systems of `layout`.
    pub fn prepare(&self, layout: &[SystemLabel]) -> Result<PreparedAction> {
        PreparedAction::new(self, layout, false)
    }

    /// `(T ⊗ id)(rho)`; outputs take the place of the first input system.
    pub fn apply(&self, rho: &MultipartiteOperator) -> Result<MultipartiteOperator> {
        let action = self.prepare(rho.systems())?;
        let out = action.act(&action.align(rho)?);
        let natural = MultipartiteOperator::new(action.output_layout().to_vec(), out)?;
        natural.reorder(&placed_order(rho.systems(), &self.inputs, &self.outputs))
    }

    /// `(T^dag ⊗ id)(x)` with `T^dag(Y) = sum K^dag Y K`.
    pub fn adjoint_apply(&self, x: &MultipartiteOperator) -> Result<MultipartiteOperator> {
        let action = PreparedAction::new(self, x.systems(), true)?;
        let out = action.act(&action.align(x)?);
        let natural = MultipartiteOperator::new(action.output_layout().to_vec(), out)?;
        natural.reorder(&placed_order(x.systems(), &self.outputs, &self.inputs))
    }
}

fn kraus_sum(kraus: &[DMatrix<C64>], din: usize) -> DMatrix<C64> {
    kraus
        .iter()
        .fold(DMatrix::zeros(din, din), |acc, k| acc + k.adjoint() * k)
}

fn tp_deviation(kraus: &[DMatrix<C64>], din: usize) -> f64 {
    (kraus_sum(kraus, din) - DMatrix::identity(din, din))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Final system order: `to` replaces the block `from` at the position of the
/// first `from` system; all other systems keep their order.
fn placed_order(layout: &[SystemLabel], from: &[SystemLabel], to: &[SystemLabel]) -> Vec<String> {
    let mut order = Vec::new();
    let mut placed = false;
    for s in layout {
        if from.iter().any(|f| f.name() == s.name()) {
            if !placed {
                order.extend(to.iter().map(|t| t.name().to_owned()));
                placed = true;
            }
        } else {
            order.push(s.name().to_owned());
        }
    }
    order
}

/// A channel specialized to one operator layout, for repeated application.
#[derive(Debug, Clone)]
pub struct PreparedAction {
    /// Input order expected by [`PreparedAction::act`]: channel inputs, then spectators.
    input_layout: Vec<SystemLabel>,
    output_layout: Vec<SystemLabel>,
    wide: Vec<DMatrix<C64>>,
}

impl PreparedAction {
    fn new(ch: &QuantumChannel, layout: &[SystemLabel], adjoint: bool) -> Result<Self> {
        let (from, to) = if adjoint {
            (&ch.outputs, &ch.inputs)
        } else {
            (&ch.inputs, &ch.outputs)
        };
        for f in from {
            let s = layout
                .iter()
                .find(|s| s.name() == f.name())
                .ok_or_else(|| Error::UnknownSystem(f.name().to_owned()))?;
            if s.dim() != f.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "system `{}` has dimension {} but the channel expects {}",
                    f.name(),
                    s.dim(),
                    f.dim()
                )));
            }
        }
        let rest: Vec<SystemLabel> = layout
            .iter()
            .filter(|s| !from.iter().any(|f| f.name() == s.name()))
            .cloned()
            .collect();
        for t in to {
            if rest.iter().any(|r| r.name() == t.name()) {
                return Err(Error::SystemClash(t.name().to_owned()));
            }
        }
        let eye: DMatrix<C64> = DMatrix::identity(total_dim(&rest), total_dim(&rest));
        let wide = ch
            .kraus
            .iter()
            .map(|k| {
                let k = if adjoint { k.adjoint() } else { k.clone() };
                k.kronecker(&eye)
            })
            .collect();
        let mut input_layout = from.clone();
        input_layout.extend(rest.iter().cloned());
        let mut output_layout = to.clone();
        output_layout.extend(rest);
        Ok(Self {
            input_layout,
            output_layout,
            wide,
        })
    }

    pub fn input_layout(&self) -> &[SystemLabel] {
        &self.input_layout
    }

    pub fn output_layout(&self) -> &[SystemLabel] {
        &self.output_layout
    }

    pub fn align(&self, x: &MultipartiteOperator) -> Result<DMatrix<C64>> {
        let names: Vec<&str> = self.input_layout.iter().map(SystemLabel::name).collect();
        Ok(x.reorder(&names)?.into_matrix())
    }

    /// Applies the map to a matrix already in `input_layout` order.
    pub fn act(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let n = self.wide[0].nrows();
        let mut out = DMatrix::zeros(n, n);
        for k in &self.wide {
            let kx = k * x;
            out.gemm(C64::new(1.0, 0.0), &kx, &k.adjoint(), C64::new(1.0, 0.0));
        }
        out
    }
}

#[cfg(test)]
mod tests;
