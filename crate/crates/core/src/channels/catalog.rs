use nalgebra::DMatrix;

use super::QuantumChannel;
use crate::error::{Error, Result};
use crate::random::{haar_isometry, seeded_rng};
use crate::tensor::{total_dim, HermitianSpectrum, SystemLabel, C64};

fn single_output(inputs: &[SystemLabel], output: &SystemLabel, want: usize) -> Result<()> {
    if output.dim() != want {
        return Err(Error::DimensionMismatch(format!(
            "output `{}` must have dimension {want} for inputs of total dimension {}",
            output.name(),
            total_dim(inputs)
        )));
    }
    Ok(())
}

/// Identity map onto a single output of the same total dimension.
pub fn identity(inputs: Vec<SystemLabel>, output: SystemLabel) -> Result<QuantumChannel> {
    let d = total_dim(&inputs);
    single_output(&inputs, &output, d)?;
    QuantumChannel::new(inputs, vec![output], vec![DMatrix::identity(d, d)])
}

/// Replacement by `pi^E`: Kraus `|e><a| / sqrt|E|`, `|E||A|` operators.
pub fn depolarizing(inputs: Vec<SystemLabel>, output: SystemLabel) -> Result<QuantumChannel> {
    let (din, dout) = (total_dim(&inputs), output.dim());
    let s = C64::new(1.0 / (dout as f64).sqrt(), 0.0);
    let mut kraus = Vec::with_capacity(din * dout);
    for e in 0..dout {
        for a in 0..din {
            let mut k = DMatrix::zeros(dout, din);
            k[(e, a)] = s;
            kraus.push(k);
        }
    }
    QuantumChannel::new(inputs, vec![output], kraus)
}

/// Complete dephasing in the joint computational basis.
pub fn dephasing(inputs: Vec<SystemLabel>, output: SystemLabel) -> Result<QuantumChannel> {
    let d = total_dim(&inputs);
    single_output(&inputs, &output, d)?;
    let kraus = (0..d)
        .map(|i| {
            let mut k = DMatrix::zeros(d, d);
            k[(i, i)] = C64::new(1.0, 0.0);
            k
        })
        .collect();
    QuantumChannel::new(inputs, vec![output], kraus)
}

/// With probability `p` the input is replaced by the flag state `|d>` of a
/// `(d + 1)`-dimensional output.
pub fn erasure(inputs: Vec<SystemLabel>, output: SystemLabel, p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "erasure probability {p} outside [0, 1]"
        )));
    }
    let d = total_dim(&inputs);
    single_output(&inputs, &output, d + 1)?;
    let mut keep = DMatrix::zeros(d + 1, d);
    for i in 0..d {
        keep[(i, i)] = C64::new((1.0 - p).sqrt(), 0.0);
    }
    let mut kraus = vec![keep];
    for a in 0..d {
        let mut k = DMatrix::zeros(d + 1, d);
        k[(d, a)] = C64::new(p.sqrt(), 0.0);
        kraus.push(k);
    }
    QuantumChannel::new(inputs, vec![output], kraus)
}

pub fn unitary_channel(
    inputs: Vec<SystemLabel>,
    output: SystemLabel,
    u: DMatrix<C64>,
) -> Result<QuantumChannel> {
    QuantumChannel::cptp(inputs, vec![output], vec![u])
}

/// Kraus operators sliced from a Haar isometry `inputs -> output ⊗ env`.
pub fn random_channel(
    inputs: Vec<SystemLabel>,
    output: SystemLabel,
    env: usize,
    seed: u64,
) -> Result<QuantumChannel> {
    let (din, dout) = (total_dim(&inputs), output.dim());
    if env == 0 || env * dout < din {
        return Err(Error::Infeasible(format!(
            "isometry from dimension {din} into {dout} x {env} does not exist"
        )));
    }
    let v = haar_isometry(dout * env, din, &mut seeded_rng(seed));
    let kraus = (0..env)
        .map(|k| DMatrix::from_fn(dout, din, |o, i| v[(o * env + k, i)]))
        .collect();
    QuantumChannel::new(inputs, vec![output], kraus)
}

/// Compression of one sender onto a subspace, stored as the `|E| x |A|`
/// co-isometry `P` with `P P^dag = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionProjector {
    pub input: SystemLabel,
    pub output: SystemLabel,
    pub matrix: DMatrix<C64>,
}

impl CompressionProjector {
    pub fn new(input: SystemLabel, output: SystemLabel, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != output.dim() || matrix.ncols() != input.dim() {
            return Err(Error::DimensionMismatch(format!(
                "projector is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                output.dim(),
                input.dim()
            )));
        }
        let e = output.dim();
        let dev = (&matrix * matrix.adjoint() - DMatrix::<C64>::identity(e, e))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::NotProjector(format!("P P^dag deviates from I by {dev:e}")));
        }
        Ok(Self {
            input,
            output,
            matrix,
        })
    }

    /// Projection onto the first `output.dim()` basis vectors.
    pub fn coordinate(input: SystemLabel, output: SystemLabel) -> Result<Self> {
        if output.dim() > input.dim() {
            return Err(Error::Infeasible(format!(
                "cannot compress dimension {} onto {}",
                input.dim(),
                output.dim()
            )));
        }
        let m = DMatrix::from_fn(output.dim(), input.dim(), |r, c| {
            C64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
        });
        Self::new(input, output, m)
    }

    /// From an orthogonal projector on the input; the output dimension is its rank.
    pub fn from_projector(input: SystemLabel, output_name: &str, p: &DMatrix<C64>) -> Result<Self> {
        let d = input.dim();
        if p.nrows() != d || p.ncols() != d {
            return Err(Error::DimensionMismatch("projector must act on the input".into()));
        }
        let idem = (p * p - p).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let herm = (p - p.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if idem > 1e-10 || herm > 1e-10 {
            return Err(Error::NotProjector(format!(
                "idempotency defect {idem:e}, hermiticity defect {herm:e}"
            )));
        }
        let spec = HermitianSpectrum::of(p);
        let cols: Vec<usize> = (0..d).filter(|&j| spec.values[j] > 0.5).collect();
        if cols.is_empty() {
            return Err(Error::NotProjector("rank 0".into()));
        }
        let m = DMatrix::from_fn(cols.len(), d, |r, c| spec.vectors[(c, cols[r])].conj());
        Self::new(input, SystemLabel::try_new(output_name, cols.len())?, m)
    }
}

/// `X -> prod_i (|A_i|/|E_i|) (⊗P_i) X (⊗P_i)^dag`; CP, generally not trace preserving.
pub fn projector_compression(projectors: &[CompressionProjector]) -> Result<QuantumChannel> {
    if projectors.is_empty() {
        return Err(Error::InvalidArgument("no projectors given".into()));
    }
    let mut k = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    let mut scale = 1.0;
    for p in projectors {
        k = k.kronecker(&p.matrix);
        scale *= p.input.dim() as f64 / p.output.dim() as f64;
    }
    QuantumChannel::new(
        projectors.iter().map(|p| p.input.clone()).collect(),
        projectors.iter().map(|p| p.output.clone()).collect(),
        vec![k.scale(scale.sqrt())],
    )
}
