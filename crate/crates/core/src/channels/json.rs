use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::QuantumChannel;
use crate::error::{Error, Result};
use crate::tensor::{SystemLabel, C64};

/// Wire format: input dimensions, total output dimension and each Kraus
/// operator as a row-major list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub inputs: Vec<usize>,
    pub output: usize,
    /// Factorization of `output` when the channel has several output systems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<usize>>,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl ChannelJson {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        let outputs = (ch.outputs().len() > 1).then(|| ch.outputs().iter().map(SystemLabel::dim).collect());
        let kraus = ch
            .kraus()
            .iter()
            .map(|k| {
                let mut flat = Vec::with_capacity(k.len());
                for r in 0..k.nrows() {
                    for c in 0..k.ncols() {
                        flat.push([k[(r, c)].re, k[(r, c)].im]);
                    }
                }
                flat
            })
            .collect();
        Self {
            inputs: ch.inputs().iter().map(SystemLabel::dim).collect(),
            output: ch.output_dim(),
            outputs,
            kraus,
        }
    }

    /// Default names: inputs `A1..Ak`, output `E` (or `E1..Em`).
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let inputs = self
            .inputs
            .iter()
            .enumerate()
            .map(|(i, &d)| SystemLabel::try_new(format!("A{}", i + 1), d))
            .collect::<Result<Vec<_>>>()?;
        let outputs = match &self.outputs {
            None => vec![SystemLabel::try_new("E", self.output)?],
            Some(dims) => {
                if dims.iter().product::<usize>() != self.output {
                    return Err(Error::DimensionMismatch(
                        "`outputs` does not multiply to `output`".into(),
                    ));
                }
                dims.iter()
                    .enumerate()
                    .map(|(i, &d)| SystemLabel::try_new(format!("E{}", i + 1), d))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        self.to_channel_named(inputs, outputs)
    }

    pub fn to_channel_named(
        &self,
        inputs: Vec<SystemLabel>,
        outputs: Vec<SystemLabel>,
    ) -> Result<QuantumChannel> {
        let din: usize = inputs.iter().map(SystemLabel::dim).product();
        let dout: usize = outputs.iter().map(SystemLabel::dim).product();
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, flat)| {
                if flat.len() != din * dout {
                    return Err(Error::DimensionMismatch(format!(
                        "Kraus operator {i} has {} entries, expected {}",
                        flat.len(),
                        din * dout
                    )));
                }
                Ok(DMatrix::from_fn(dout, din, |r, c| {
                    let [re, im] = flat[r * din + c];
                    C64::new(re, im)
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(inputs, outputs, kraus)
    }
}

impl QuantumChannel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ChannelJson::from_channel(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<ChannelJson>(s)?.to_channel()
    }
}
