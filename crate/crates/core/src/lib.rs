//! Epstein surfaces of conformal metrics in hyperbolic 3-space, Newton
//! continuation of k-surface and constant-mean-curvature foliations of a
//! hyperbolic end, and the asymptotics of their fundamental forms.

// `!(x > 0.0)` guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Node loops index several parallel per-node arrays at once.
#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod conformal;
pub mod epstein;
pub mod error;
pub mod exec;
pub mod foliation;
pub mod hyp3;

pub use error::{Error, Result};
pub use exec::Exec;
