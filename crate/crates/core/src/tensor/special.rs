use nalgebra::{DMatrix, DVector};

use super::operator::MultipartiteOperator;
use super::spectral::c;
use super::state::PureState;
use super::system::SystemLabel;
use super::C64;
use crate::error::{Error, Result};

/// Swap `F|i>|j> = |j>|i>` on `a ⊗ copy`.
pub fn swap_operator(a: &SystemLabel, copy: &SystemLabel) -> Result<MultipartiteOperator> {
    if a.dim() != copy.dim() {
        return Err(Error::DimensionMismatch(format!(
            "swap needs equal dimensions, got {} and {}",
            a.dim(),
            copy.dim()
        )));
    }
    MultipartiteOperator::new(vec![a.clone(), copy.clone()], swap_matrix(a.dim()))
}

pub(crate) fn swap_matrix(d: usize) -> DMatrix<C64> {
    let mut f = DMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = c(1.0);
        }
    }
    f
}

/// `(1/sqrt d) sum_i |i>|i>`.
pub fn max_entangled(a: &SystemLabel, a_prime: &SystemLabel) -> Result<PureState> {
    if a.dim() != a_prime.dim() {
        return Err(Error::DimensionMismatch(format!(
            "maximally entangled pair needs equal dimensions, got {} and {}",
            a.dim(),
            a_prime.dim()
        )));
    }
    let d = a.dim();
    let mut v = DVector::zeros(d * d);
    let amp = c(1.0 / (d as f64).sqrt());
    for i in 0..d {
        v[i * d + i] = amp;
    }
    PureState::new(vec![a.clone(), a_prime.clone()], v)
}
