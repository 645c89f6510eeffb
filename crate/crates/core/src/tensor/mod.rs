//! Multipartite dense linear algebra.

mod operator;
mod special;
pub mod spectral;
mod state;
mod system;

pub use operator::MultipartiteOperator;
pub use special::{max_entangled, swap_operator};
pub use spectral::{
    delta_truncate, delta_truncate_detailed, fidelity, pseudo_inverse, purify, purity, schatten_norm,
    trace_norm_hermitian, HermitianSpectrum, NegativePower, Schatten, Truncation,
};
pub use state::PureState;
pub use system::SystemLabel;

pub(crate) use system::{strides, total_dim};

pub type C64 = num_complex::Complex64;

/// Tolerance on the minimum eigenvalue (relative to `max(1, ‖X‖₂)`) when
/// deciding positivity.
pub const PSD_TOL: f64 = 1e-9;
/// Unit-trace tolerance for density matrices.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Unit-norm tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;
