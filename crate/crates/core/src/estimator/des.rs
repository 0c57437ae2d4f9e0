//! Discrete-event pipeline: every paired sample is run through the
//! understanding automaton and the emitted strings are counted.

use crate::automaton::{estimate_probabilities, AutomatonConfig, RunString, UnderstandingAutomaton};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sampling::{Perturber, SampleBatch};

use super::RiskAssessment;

/// Run strings for `n` paired draws of `seed`, in sample order.
pub fn run_strings(
    j: &Perturber,
    k: &Perturber,
    cfg: &AutomatonConfig,
    n: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<RunString>> {
    let batch = SampleBatch::draw(j, k, n, seed, exec)?;
    let automaton = UnderstandingAutomaton::new(*cfg);
    exec.map_indexed(n, |i| automaton.run(&batch.states_j[i], &batch.states_k[i]))
        .into_iter()
        .collect()
}

/// Automaton-based risk assessment. Uses the same draws as the density
/// pipeline for the same seed.
pub fn assess_des(
    j: &Perturber,
    k: &Perturber,
    cfg: &AutomatonConfig,
    n: usize,
    seed: u64,
    exec: Exec,
) -> Result<RiskAssessment> {
    if n == 0 {
        return Err(Error::InvalidCount(0));
    }
    let strings = run_strings(j, k, cfg, n, seed, exec)?;
    let mut r = estimate_probabilities(&strings)?;
    r.seed = seed;
    Ok(r)
}
