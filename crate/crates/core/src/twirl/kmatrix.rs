//! The Gram matrix of the commutant basis and its closed-form inverse.
//!
//! With `F_a = ⊗_i (F^{A_i A_i'})^{a_i}`, `K[b][a] = Tr[F_b F_a]` factorizes
//! into 2x2 blocks `d (d 1; 1 d)`, so the inverse is the tensor product of
//! `(d 1; 1 d)^{-1} / d = (d -1; -1 d) / (d (d^2 - 1))`.
//! Bit strings index rows and columns with sender 0 as the most significant bit.

use nalgebra::DMatrix;

use crate::tensor::C64;

fn kron_blocks(blocks: impl Iterator<Item = [[f64; 2]; 2]>) -> DMatrix<f64> {
    let mut out = DMatrix::from_element(1, 1, 1.0);
    for b in blocks {
        let m = DMatrix::from_row_slice(2, 2, &[b[0][0], b[0][1], b[1][0], b[1][1]]);
        out = out.kronecker(&m);
    }
    out
}

fn block(d: usize) -> [[f64; 2]; 2] {
    let d = d as f64;
    [[d * d, d], [d, d * d]]
}

fn inverse_block(d: usize) -> [[f64; 2]; 2] {
    let d = d as f64;
    let s = 1.0 / (d * (d * d - 1.0));
    [[d * s, -s], [-s, d * s]]
}

/// `K[b][a] = prod_i d_i^{2 if a_i = b_i else 1}`.
pub fn k_matrix(dims: &[usize]) -> DMatrix<f64> {
    kron_blocks(dims.iter().map(|&d| block(d)))
}

/// Dense closed-form inverse; every `d_i` must be at least 2.
pub fn k_inverse(dims: &[usize]) -> DMatrix<f64> {
    kron_blocks(dims.iter().map(|&d| inverse_block(d)))
}

/// Applies the inverse one sender axis at a time. A sender of dimension 1
/// has `F = I`, so its `a_i = 1` coefficient is pinned to zero.
pub(crate) fn apply_k_inverse(dims: &[usize], v: &mut [C64]) {
    let k = dims.len();
    debug_assert_eq!(v.len(), 1 << k);
    for (i, &d) in dims.iter().enumerate() {
        let bit = 1usize << (k - 1 - i);
        let blk = if d >= 2 { Some(inverse_block(d)) } else { None };
        for idx in 0..v.len() {
            if idx & bit != 0 {
                continue;
            }
            let (x0, x1) = (v[idx], v[idx | bit]);
            match blk {
                Some(b) => {
                    v[idx] = x0 * b[0][0] + x1 * b[0][1];
                    v[idx | bit] = x0 * b[1][0] + x1 * b[1][1];
                }
                None => {
                    v[idx] = x0;
                    v[idx | bit] = C64::new(0.0, 0.0);
                }
            }
        }
    }
}

/// Bit `i` (sender `i`) of the basis index `a`.
pub fn bit(a: usize, i: usize, k: usize) -> bool {
    a >> (k - 1 - i) & 1 == 1
}

/// `"101"`-style label of a basis index.
pub fn bit_label(a: usize, k: usize) -> String {
    (0..k).map(|i| if bit(a, i, k) { '1' } else { '0' }).collect()
}
