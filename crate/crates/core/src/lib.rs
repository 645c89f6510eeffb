//! Numerical laboratory for multi-sender decoupling.
//!
//! The crate evaluates both sides of tensor-product decoupling inequalities
//! for independent Haar-random unitaries on several senders: the averaged
//! trace distance by Monte Carlo, and the analytic bounds built from exact
//! second-moment twirls and δ-truncated Rényi-2 quantities. On top of that
//! sits a one-shot coding layer for the quantum multiple access channel.
//!
//! Modules, bottom up:
//! - [`tensor`]: labeled multipartite operators, partial traces, spectral
//!   helpers, δ-truncation.
//! - [`channels`]: Kraus maps with Stinespring, complementary and Choi views.
//! - [`entropy`]: δ-tilde conditional 2-entropy and max entropies.
//! - [`twirl`]: Haar sampling and the exact `U⊗U` twirl over `k` senders.
//! - [`decoupling`]: Monte-Carlo left-hand sides and the analytic bounds.
//! - [`qmac`]: control states, error ledger, rate regions, Uhlmann decoders.

pub mod channels;
pub mod decoupling;
pub mod entropy;
mod error;
pub mod qmac;
pub mod random;
pub mod tensor;
pub mod twirl;

pub use error::{Error, Result};
pub use tensor::{MultipartiteOperator, PureState, SystemLabel, C64};
