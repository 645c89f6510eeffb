//! Second-moment Haar twirls `E[(⊗_i U_i ⊗ U_i) M (⊗_i U_i ⊗ U_i)^dag]`
//! for independent unitaries on each sender pair `(A_i, A_i')`.

mod bounds;
mod kmatrix;
mod montecarlo;

pub use bounds::{
    alpha_bounds_check, k_sender_alpha_bounds, swap_pullback, two_sender_alpha_bounds, AlphaBound,
    AlphaReport,
};
pub use kmatrix::{bit, bit_label, k_inverse, k_matrix};
pub use montecarlo::{monte_carlo_twirl, sample_haar, CHUNK};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{strides, MultipartiteOperator, SystemLabel, C64};

/// A sender `A` together with its copy `A'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenderPair {
    pub system: SystemLabel,
    pub copy: SystemLabel,
}

impl SenderPair {
    pub fn dim(&self) -> usize {
        self.system.dim()
    }
}

/// One commutant basis element `⊗_i (F^{A_i A_i'})^{a_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantBasisElement {
    pub bits: Vec<bool>,
    pub operator: MultipartiteOperator,
}

/// Exact twirl: coefficients over the commutant basis, the moments they
/// were solved from, and the reconstructed operator in the input's system order.
#[derive(Debug, Clone)]
pub struct TwirlResult {
    pub pairs: Vec<SenderPair>,
    pub alphas: Vec<C64>,
    pub moments: Vec<C64>,
    pub reconstructed: MultipartiteOperator,
}

impl TwirlResult {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.pairs.iter().map(SenderPair::dim).collect()
    }

    pub fn label(&self, a: usize) -> String {
        bit_label(a, self.k())
    }
}

/// Resolves and validates the sender pairs of `m`; every system of `m`
/// must belong to exactly one pair.
pub(crate) fn resolve_pairs<S: AsRef<str>>(
    m: &MultipartiteOperator,
    pairs: &[(S, S)],
) -> Result<Vec<SenderPair>> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one sender pair is required".into(),
        ));
    }
    let mut out = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let (sa, sb) = (m.system(a.as_ref())?.clone(), m.system(b.as_ref())?.clone());
        if sa.dim() != sb.dim() {
            return Err(Error::DimensionMismatch(format!(
                "pair ({}, {}) has unequal dimensions",
                sa, sb
            )));
        }
        out.push(SenderPair { system: sa, copy: sb });
    }
    if 2 * out.len() != m.systems().len() {
        return Err(Error::DimensionMismatch(
            "sender pairs must cover every system of the operator exactly once".into(),
        ));
    }
    crate::tensor::MultipartiteOperator::identity(canonical_systems(&out))?;
    Ok(out)
}

/// Layout `A_0, A_0', A_1, A_1', ...`.
pub(crate) fn canonical_systems(pairs: &[SenderPair]) -> Vec<SystemLabel> {
    pairs
        .iter()
        .flat_map(|p| [p.system.clone(), p.copy.clone()])
        .collect()
}

/// `sigma_a(y)`: the flat index after swapping each pair with `a_i = 1`, in
/// the canonical layout. `F_a[x][y] = 1` iff `x = sigma_a(y)`.
pub(crate) fn swap_permutation(dims: &[usize], a: usize) -> Vec<usize> {
    let k = dims.len();
    let full: Vec<usize> = dims.iter().flat_map(|&d| [d, d]).collect();
    let st = strides(&full);
    let n: usize = full.iter().product();
    (0..n)
        .map(|y| {
            let mut x = y;
            for i in 0..k {
                if bit(a, i, k) {
                    let (s0, s1) = (st[2 * i], st[2 * i + 1]);
                    let (u, v) = ((y / s0) % dims[i], (y / s1) % dims[i]);
                    x = x - u * s0 - v * s1 + v * s0 + u * s1;
                }
            }
            x
        })
        .collect()
}

/// The basis element for `a` on the canonical layout.
pub fn commutant_element(pairs: &[SenderPair], a: usize) -> Result<CommutantBasisElement> {
    let dims: Vec<usize> = pairs.iter().map(SenderPair::dim).collect();
    let perm = swap_permutation(&dims, a);
    let n = perm.len();
    let mut m = DMatrix::zeros(n, n);
    for (y, &x) in perm.iter().enumerate() {
        m[(x, y)] = C64::new(1.0, 0.0);
    }
    Ok(CommutantBasisElement {
        bits: (0..dims.len()).map(|i| bit(a, i, dims.len())).collect(),
        operator: MultipartiteOperator::new(canonical_systems(pairs), m)?,
    })
}

/// `m_b = Tr[F_b M]` for every bit string, `M` in canonical layout.
pub(crate) fn moments(dims: &[usize], m: &DMatrix<C64>) -> Vec<C64> {
    (0..1usize << dims.len())
        .map(|b| {
            swap_permutation(dims, b)
                .iter()
                .enumerate()
                .map(|(y, &x)| m[(y, x)])
                .sum()
        })
        .collect()
}

/// `sum_a alpha_a F_a` on the canonical layout.
pub(crate) fn reconstruct(dims: &[usize], alphas: &[C64]) -> DMatrix<C64> {
    let n: usize = dims.iter().map(|d| d * d).product();
    let mut r = DMatrix::zeros(n, n);
    for (a, &alpha) in alphas.iter().enumerate() {
        if alpha == C64::new(0.0, 0.0) {
            continue;
        }
        for (y, x) in swap_permutation(dims, a).into_iter().enumerate() {
            r[(x, y)] += alpha;
        }
    }
    r
}

/// Exact twirl over `k` sender pairs via moments and the closed-form
/// inverse of the Gram matrix.
pub fn twirl2_tensor<S: AsRef<str>>(m: &MultipartiteOperator, pairs: &[(S, S)]) -> Result<TwirlResult> {
    let pairs = resolve_pairs(m, pairs)?;
    let dims: Vec<usize> = pairs.iter().map(SenderPair::dim).collect();
    let layout = canonical_systems(&pairs);
    let names: Vec<&str> = layout.iter().map(SystemLabel::name).collect();
    let mc = m.reorder(&names)?;
    let moments = moments(&dims, mc.matrix());
    let mut alphas = moments.clone();
    kmatrix::apply_k_inverse(&dims, &mut alphas);
    let r = MultipartiteOperator::new(layout, reconstruct(&dims, &alphas))?;
    let reconstructed = r.reorder(&m.names())?;
    Ok(TwirlResult {
        pairs,
        alphas,
        moments,
        reconstructed,
    })
}

/// Single-pair twirl `alpha I + beta F` of an operator on `A ⊗ A'`.
pub fn twirl2_single(m: &MultipartiteOperator) -> Result<TwirlResult> {
    if m.systems().len() != 2 {
        return Err(Error::DimensionMismatch(
            "single twirl needs an operator on exactly two systems".into(),
        ));
    }
    let names = m.names();
    twirl2_tensor(m, &[(names[0], names[1])])
}
