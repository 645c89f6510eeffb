use nalgebra::DMatrix;
use serde::Serialize;

use super::{bit, bit_label, TwirlResult};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::tensor::{MultipartiteOperator, SystemLabel, C64};

/// `(T^dag ⊗ T^dag)(F^{EE'})` on `A_0, A_0', A_1, A_1', ...`, copies named by
/// priming. Returns the operator and the sender pairs by name.
pub fn swap_pullback(ch: &QuantumChannel) -> Result<(MultipartiteOperator, Vec<(String, String)>)> {
    let (din, dout) = (ch.input_dim(), ch.output_dim());
    let n = din * din;
    let mut m = DMatrix::<C64>::zeros(n, n);
    // G_{ef}[i][j] = sum_k conj(K_k[e][i]) K_k[f][j]
    let g = |e: usize, f: usize| {
        let mut out = DMatrix::<C64>::zeros(din, din);
        for k in ch.kraus() {
            let (re, rf) = (k.row(e), k.row(f));
            out += re.adjoint() * rf;
        }
        out
    };
    let gs: Vec<Vec<DMatrix<C64>>> = (0..dout).map(|e| (0..dout).map(|f| g(e, f)).collect()).collect();
    for e in 0..dout {
        for f in 0..dout {
            m += gs[e][f].kronecker(&gs[f][e]);
        }
    }
    let mut systems: Vec<SystemLabel> = ch.inputs().to_vec();
    systems.extend(ch.inputs().iter().map(SystemLabel::primed));
    let flat = MultipartiteOperator::new(systems, m)?;
    let pairs: Vec<(String, String)> = ch
        .inputs()
        .iter()
        .map(|s| (s.name().to_owned(), s.primed().name().to_owned()))
        .collect();
    let order: Vec<&str> = pairs.iter().flat_map(|(a, b)| [a.as_str(), b.as_str()]).collect();
    Ok((flat.reorder(&order)?, pairs))
}

fn check_senders(dims: &[usize], norms: &[f64]) -> Result<()> {
    if norms.len() != 1 << dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} norms for {} senders, got {}",
            1usize << dims.len(),
            dims.len(),
            norms.len()
        )));
    }
    if let Some(i) = dims.iter().position(|&d| d < 2) {
        return Err(Error::DegenerateSender(format!("sender {i}")));
    }
    Ok(())
}

/// Two senders: `alpha_a <= |A_big|^2 / (|A_big|^2 - 1) * norms[a]`.
pub fn two_sender_alpha_bounds(dims: &[usize], norms: &[f64]) -> Result<Vec<f64>> {
    if dims.len() != 2 {
        return Err(Error::InvalidArgument("two-sender bounds need k = 2".into()));
    }
    check_senders(dims, norms)?;
    let big = dims[0].max(dims[1]) as f64;
    let c = big * big / (big * big - 1.0);
    Ok(norms.iter().map(|n| c * n).collect())
}

/// `k` senders. With `A_0` the smallest sender:
/// `alpha_0 <= n_0 |A_{rest}|^2 / prod_rest (d^2-1)
///   + sum_{c != 0, c_0 = 0} n_c prod_{i != 0} d_i^{2 - c_i} / prod_rest (d^2-1)`,
/// and `alpha_a <= |A|^2 / prod (d^2-1) * n_a * 2^k` otherwise.
pub fn k_sender_alpha_bounds(dims: &[usize], norms: &[f64]) -> Result<Vec<f64>> {
    check_senders(dims, norms)?;
    let k = dims.len();
    let small = (0..k).min_by_key(|&i| (dims[i], i)).unwrap_or(0);
    let f: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
    let total_sq: f64 = f.iter().map(|d| d * d).product();
    let denom_all: f64 = f.iter().map(|d| d * d - 1.0).product();
    let rest = || (0..k).filter(move |&i| i != small);
    let rest_sq: f64 = rest().map(|i| f[i] * f[i]).product();
    let denom_rest: f64 = rest().map(|i| f[i] * f[i] - 1.0).product();
    let pow = (1usize << k) as f64;
    Ok((0..1usize << k)
        .map(|a| {
            if a != 0 {
                return total_sq / denom_all * norms[a] * pow;
            }
            let mut b0 = norms[0] * rest_sq / denom_rest;
            for c in 1..1usize << k {
                if bit(c, small, k) {
                    continue;
                }
                let w: f64 = rest()
                    .map(|i| if bit(c, i, k) { f[i] } else { f[i] * f[i] })
                    .product();
                b0 += norms[c] * w / denom_rest;
            }
            b0
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBound {
    pub bits: String,
    pub alpha: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaReport {
    pub entries: Vec<AlphaBound>,
    /// Bit strings whose coefficient exceeds its bound.
    pub violations: Vec<String>,
}

impl AlphaReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares exact coefficients with their bounds; `choi_norms[b]` is the
/// squared 2-norm of the weighted Choi marginal on mirrors `b` and the output.
/// Two senders use the sharper two-sender constants.
pub fn alpha_bounds_check(tw: &TwirlResult, choi_norms: &[f64]) -> Result<AlphaReport> {
    let dims = tw.dims();
    let bounds = match dims.len() {
        2 => two_sender_alpha_bounds(&dims, choi_norms)?,
        k if k >= 3 => k_sender_alpha_bounds(&dims, choi_norms)?,
        _ => return Err(Error::InvalidArgument("coefficient bounds need k >= 2".into())),
    };
    let k = dims.len();
    let entries: Vec<AlphaBound> = tw
        .alphas
        .iter()
        .zip(&bounds)
        .enumerate()
        .map(|(a, (alpha, &bound))| AlphaBound {
            bits: bit_label(a, k),
            alpha: alpha.re,
            bound,
            slack: bound - alpha.re,
        })
        .collect();
    let violations = entries
        .iter()
        .filter(|e| e.slack < -1e-9 * e.bound.abs().max(1.0))
        .map(|e| e.bits.clone())
        .collect();
    Ok(AlphaReport { entries, violations })
}
