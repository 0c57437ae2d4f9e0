//! End-to-end collision-risk and give-way estimation for one vessel pair.
//!
//! Two pipelines share the same paired Monte-Carlo draws:
//! [`assess_kde`] fits kernel densities to the sampled CPA and bearing
//! quantities and integrates them, [`assess_des`] runs every sample through
//! the understanding automaton and counts the emitted words.

mod des;
mod kde;
mod propagation;

pub use des::assess_des;
pub use kde::{assess_kde, assess_kde_with, KdeBuffers, KdeOptions, SituationDistribution};
pub use propagation::{nominal_pair, propagation_study, PropagationBuffers, PropagationSetup};

use std::fmt;

use crate::colregs::{Obligation, Rule, SituationOutcome};

/// Minimum sample count for the density pipeline.
pub const KDE_MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Kde,
    Des,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Kde => "KDE",
            Method::Des => "DES",
        })
    }
}

/// Probability of each `(rule, obligation)` outcome, indexed
/// `[rule][obligation]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RuleProbabilities {
    cells: [[f64; 2]; 4],
}

impl RuleProbabilities {
    pub fn add(&mut self, outcome: SituationOutcome, p: f64) {
        self.cells[outcome.rule as usize][outcome.obligation as usize] += p;
    }

    pub fn outcome(&self, rule: Rule, obligation: Obligation) -> f64 {
        self.cells[rule as usize][obligation as usize]
    }

    /// Probability of `rule` with either obligation.
    pub fn rule(&self, rule: Rule) -> f64 {
        let [a, b] = self.cells[rule as usize];
        a + b
    }

    pub fn obligation(&self, obligation: Obligation) -> f64 {
        Rule::ALL.iter().map(|&r| self.outcome(r, obligation)).sum()
    }

    pub fn total(&self) -> f64 {
        Rule::ALL.iter().map(|&r| self.rule(r)).sum()
    }
}

/// Result of one pipeline for one vessel pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskAssessment {
    /// `P(DCPA <= d_act)`.
    pub p_risk: f64,
    /// `P(0 <= TCPA <= t_aware)`.
    pub p_tcpa_window: f64,
    pub p_rule: RuleProbabilities,
    /// Give-way probability of the acting vessel, scaled by the risk.
    pub p_give_way: f64,
    /// `1 - p_give_way`.
    pub p_stand_on: f64,
    pub method: Method,
    pub n_samples: usize,
    pub seed: u64,
}

impl RiskAssessment {
    /// Every reported probability, labelled, in table order.
    pub fn probabilities(&self) -> [(&'static str, f64); 7] {
        [
            ("p_risk", self.p_risk),
            ("p_tcpa_window", self.p_tcpa_window),
            ("p_R0", self.p_rule.rule(Rule::R0)),
            ("p_R13", self.p_rule.rule(Rule::R13)),
            ("p_R14", self.p_rule.rule(Rule::R14)),
            ("p_R15", self.p_rule.rule(Rule::R15)),
            ("p_give_way", self.p_give_way),
        ]
    }
}
