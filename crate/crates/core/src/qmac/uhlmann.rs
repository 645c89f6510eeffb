use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::{PureState, SystemLabel, C64};

/// Partial isometry `V: Y -> Z` maximizing `|<ψ|(I ⊗ V)|φ>|`.
#[derive(Debug, Clone, PartialEq)]
pub struct UhlmannDecoder {
    /// `|Z| x |Y|` matrix.
    pub isometry: DMatrix<C64>,
    /// The achieved overlap, equal to the root fidelity of the `X` marginals.
    pub fidelity: f64,
    pub y: Vec<SystemLabel>,
    pub z: Vec<SystemLabel>,
}

impl UhlmannDecoder {
    /// `|<ψ|(I ⊗ V)|φ>|`, evaluated directly from the amplitudes.
    pub fn overlap<S: AsRef<str>>(&self, phi: &PureState, psi: &PureState, x: &[S]) -> Result<f64> {
        let (p, _, _) = phi.split(x)?;
        let (q, _, _) = psi.split(x)?;
        let image = p * self.isometry.transpose();
        Ok(q.iter()
            .zip(image.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm())
    }
}

/// Decoder between purifications `φ^{XY}` and `ψ^{XZ}` of two states on
/// the shared systems `x`.
///
/// With `Φ`, `Ψ` the amplitude matrices (rows `X`), the overlap of `V` is
/// `Tr[V^T conj(M)]` for `M = Ψ^T conj(Φ)`; with `M = W Σ Q^dag` the optimum
/// is `V = W Q^dag` restricted to the nonzero singular values, achieving
/// the nuclear norm of `M`.
pub fn uhlmann_isometry<S: AsRef<str>>(phi: &PureState, psi: &PureState, x: &[S]) -> Result<UhlmannDecoder> {
    let (p, xp, y) = phi.split(x)?;
    let (q, xq, z) = psi.split(x)?;
    let dims = |s: &[SystemLabel]| s.iter().map(SystemLabel::dim).collect::<Vec<_>>();
    if dims(&xp) != dims(&xq) {
        return Err(Error::DimensionMismatch(format!(
            "shared systems have dimensions {:?} and {:?}",
            dims(&xp),
            dims(&xq)
        )));
    }
    let m = q.transpose() * p.map(|c| c.conj());
    let (rows, cols) = m.shape();
    let svd = m.svd(true, true);
    let (w, qt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let tol = 1e-12 * smax.max(1.0) * rows.max(cols) as f64;
    let mut v = DMatrix::<C64>::zeros(rows, cols);
    let mut fidelity = 0.0;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        fidelity += s;
        if s > tol {
            v += w.column(i) * qt.row(i);
        }
    }
    Ok(UhlmannDecoder {
        isometry: v,
        fidelity,
        y,
        z,
    })
}
