use nalgebra::DMatrix;

use super::QuantumChannel;
use crate::error::{Error, Result};
use crate::tensor::{total_dim, MultipartiteOperator, SystemLabel, C64};

/// `V = sum_k K_k ⊗ |k>` mapping the inputs to outputs ⊗ environment.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringIsometry {
    matrix: DMatrix<C64>,
    inputs: Vec<SystemLabel>,
    outputs: Vec<SystemLabel>,
    environment: SystemLabel,
}

impl StinespringIsometry {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn inputs(&self) -> &[SystemLabel] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[SystemLabel] {
        &self.outputs
    }

    pub fn environment(&self) -> &SystemLabel {
        &self.environment
    }

    /// `max |V^dag V - I|` entrywise.
    pub fn isometry_deviation(&self) -> f64 {
        let n = self.matrix.ncols();
        (self.matrix.adjoint() * &self.matrix - DMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// The isometry as a one-Kraus channel onto outputs followed by the environment.
    pub fn as_channel(&self) -> Result<QuantumChannel> {
        let mut outs = self.outputs.clone();
        outs.push(self.environment.clone());
        QuantumChannel::new(self.inputs.clone(), outs, vec![self.matrix.clone()])
    }
}

/// `(id ⊗ T)` applied to one maximally entangled pair per input, mirrors first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    pub state: MultipartiteOperator,
    pub mirrors: Vec<SystemLabel>,
    pub outputs: Vec<SystemLabel>,
}

impl ChoiState {
    /// Marginal on a subset of mirrors together with all outputs.
    pub fn marginal<S: AsRef<str>>(&self, mirrors: &[S]) -> Result<MultipartiteOperator> {
        let mut keep: Vec<&str> = mirrors.iter().map(AsRef::as_ref).collect();
        keep.extend(self.outputs.iter().map(SystemLabel::name));
        self.state.partial_trace(&keep)
    }

    pub fn output_marginal(&self) -> Result<MultipartiteOperator> {
        self.marginal::<&str>(&[])
    }
}

impl QuantumChannel {
    /// Stinespring dilation with environment `E` of dimension equal to the Kraus count.
    pub fn stinespring(&self) -> Result<StinespringIsometry> {
        self.stinespring_with("E")
    }

    pub fn stinespring_with(&self, environment: &str) -> Result<StinespringIsometry> {
        self.ensure_tp()?;
        let r = self.kraus().len();
        let env = SystemLabel::try_new(environment, r)?;
        if self.outputs().iter().any(|o| o.name() == environment) {
            return Err(Error::SystemClash(environment.to_owned()));
        }
        let (din, dout) = (self.input_dim(), self.output_dim());
        let mut v = DMatrix::zeros(dout * r, din);
        for (k, kr) in self.kraus().iter().enumerate() {
            for o in 0..dout {
                for i in 0..din {
                    v[(o * r + k, i)] = kr[(o, i)];
                }
            }
        }
        Ok(StinespringIsometry {
            matrix: v,
            inputs: self.inputs().to_vec(),
            outputs: self.outputs().to_vec(),
            environment: env,
        })
    }

    /// Channel to the environment `E`: `F_o[k, i] = K_k[o, i]`, environment
    /// basis in Kraus order.
    pub fn complementary(&self) -> Result<QuantumChannel> {
        self.complementary_with("E")
    }

    pub fn complementary_with(&self, environment: &str) -> Result<QuantumChannel> {
        self.ensure_tp()?;
        let r = self.kraus().len();
        let env = SystemLabel::try_new(environment, r)?;
        let (din, dout) = (self.input_dim(), self.output_dim());
        let kraus = (0..dout)
            .map(|o| DMatrix::from_fn(r, din, |k, i| self.kraus()[k][(o, i)]))
            .collect();
        QuantumChannel::new(self.inputs().to_vec(), vec![env], kraus)
    }

    /// Choi state with mirrors named by priming each input.
    pub fn choi(&self) -> Result<ChoiState> {
        let mirrors = self.inputs().iter().map(SystemLabel::primed).collect();
        self.choi_with_mirrors(mirrors)
    }

    pub fn choi_with_mirrors(&self, mirrors: Vec<SystemLabel>) -> Result<ChoiState> {
        if mirrors.iter().map(SystemLabel::dim).collect::<Vec<_>>()
            != self.inputs().iter().map(SystemLabel::dim).collect::<Vec<_>>()
        {
            return Err(Error::DimensionMismatch(
                "mirror systems must match the input dimensions".into(),
            ));
        }
        let (din, dout) = (total_dim(&mirrors), self.output_dim());
        let n = din * dout;
        // column c holds sum_i |i> ⊗ K_c|i>
        let mut w = DMatrix::<C64>::zeros(n, self.kraus().len());
        for (c, k) in self.kraus().iter().enumerate() {
            for idx in 0..n {
                w[(idx, c)] = k[(idx % dout, idx / dout)];
            }
        }
        let m = (&w * w.adjoint()).unscale(din as f64);
        let mut systems = mirrors.clone();
        systems.extend(self.outputs().iter().cloned());
        Ok(ChoiState {
            state: MultipartiteOperator::new(systems, m)?,
            mirrors,
            outputs: self.outputs().to_vec(),
        })
    }
}
