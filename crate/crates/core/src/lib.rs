//! Probabilistic COLREGs risk assessment for vessel encounters.
//!
//! Uncertain vessel states are sampled around their estimates, each sample is
//! classified by closest point of approach and COLREGs situation, and the
//! resulting distributions are summarised either by kernel density estimates
//! ([`estimator::assess_kde`]) or by counting the output strings of a
//! stochastic discrete-event automaton ([`estimator::assess_des`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod automaton;
pub mod colregs;
pub mod density;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod kinematics;
pub mod sampling;

pub use error::{Error, Result};
pub use exec::Exec;
