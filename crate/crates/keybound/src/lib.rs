//! Upper bounds on the secret-key-agreement capacity of thermal bosonic
//! channels, from the asymptotic relative-entropy bound down to second-order
//! (finite blocklength) expansions built on finite-energy teleportation
//! resource states.
//!
//! Covariance matrices use the `(q1, .., qm, p1, .., pm)` ordering with unit
//! vacuum variance. Entropies and divergences are in bits.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channels;
pub mod divergences;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod rci;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
