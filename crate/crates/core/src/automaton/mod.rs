//! Stochastic discrete-event automata without inputs.
//!
//! A [`StochasticAutomaton`] is the tuple `(Z, W, L, p0)` plus a set of
//! marked states, where `L(z', w | z)` is the probability of moving from `z`
//! to `z'` while emitting `w` (`None` is the empty word). The behavior can be
//! given explicitly or estimated from observed runs with
//! [`estimate_behavioral_relation`].

mod understanding;

pub use understanding::{
    estimate_probabilities, indicator, run_once, write_trace, AutomatonConfig, Event, RunString, RunTrace, UState,
    UnderstandingAutomaton, Word,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use crate::error::{Error, Result};

/// Tolerance for the row-sum check on explicitly supplied behaviors.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// `(z, w, z')`: source state, emitted word (or `None`), target state.
pub type Transition<S, W> = (S, Option<W>, S);

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticAutomaton<S: Ord, W: Ord> {
    states: BTreeSet<S>,
    alphabet: BTreeSet<W>,
    behavior: BTreeMap<Transition<S, W>, f64>,
    initial: BTreeMap<S, f64>,
    marked: BTreeSet<S>,
}

impl<S, W> StochasticAutomaton<S, W>
where
    S: Copy + Ord + Debug,
    W: Copy + Ord + Debug,
{
    /// Builds and validates an automaton. Every probability must lie in
    /// `[0, 1]`, every state's outgoing mass must sum to one and the initial
    /// distribution must sum to one.
    pub fn new(
        behavior: BTreeMap<Transition<S, W>, f64>,
        initial: BTreeMap<S, f64>,
        marked: BTreeSet<S>,
    ) -> Result<Self> {
        let mut states: BTreeSet<S> = behavior.keys().flat_map(|&(z, _, z2)| [z, z2]).collect();
        states.extend(initial.keys().copied());
        states.extend(marked.iter().copied());
        let alphabet = behavior.keys().filter_map(|&(_, w, _)| w).collect();
        let a = Self {
            states,
            alphabet,
            behavior,
            initial,
            marked,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        if let Some((t, p)) = self.behavior.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidState(format!("L{t:?} = {p} outside [0, 1]")));
        }
        for z in &self.states {
            let sum = self.row_sum(*z);
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidState(format!("outgoing mass of {z:?} is {sum}")));
            }
        }
        let p0: f64 = self.initial.values().sum();
        if (p0 - 1.0).abs() > ROW_SUM_TOL || self.initial.values().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidState(format!("initial distribution sums to {p0}")));
        }
        Ok(())
    }

    pub fn states(&self) -> &BTreeSet<S> {
        &self.states
    }

    pub fn alphabet(&self) -> &BTreeSet<W> {
        &self.alphabet
    }

    pub fn initial(&self) -> &BTreeMap<S, f64> {
        &self.initial
    }

    pub fn marked(&self) -> &BTreeSet<S> {
        &self.marked
    }

    /// `L(z', w | z)`, zero for transitions not in the relation.
    pub fn behavior(&self, to: S, word: Option<W>, from: S) -> f64 {
        self.behavior.get(&(from, word, to)).copied().unwrap_or(0.0)
    }

    /// `sum over z', w of L(z', w | z)`.
    pub fn row_sum(&self, from: S) -> f64 {
        self.outgoing(from).map(|(_, p)| p).sum()
    }

    /// State transition marginal `G(z' | z) = sum_w L(z', w | z)`.
    pub fn transition(&self, to: S, from: S) -> f64 {
        self.outgoing(from)
            .filter(|((_, _, z2), _)| *z2 == to)
            .map(|(_, p)| p)
            .sum()
    }

    /// Output marginal `H(w | z) = sum_z' L(z', w | z)`.
    pub fn output(&self, word: Option<W>, from: S) -> f64 {
        self.outgoing(from)
            .filter(|((_, w, _), _)| *w == word)
            .map(|(_, p)| p)
            .sum()
    }

    fn outgoing(&self, from: S) -> impl Iterator<Item = (&Transition<S, W>, &f64)> {
        self.behavior.iter().filter(move |((z, _, _), _)| *z == from)
    }
}

/// Empirical behavior `L(z', w | z) = count(z -> z' emitting w) / visits(z)`
/// estimated from aligned state and word trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralRelation<S: Ord, W: Ord> {
    counts: BTreeMap<Transition<S, W>, u64>,
    visits: BTreeMap<S, u64>,
    starts: BTreeMap<S, u64>,
    runs: u64,
}

impl<S, W> BehavioralRelation<S, W>
where
    S: Copy + Ord + Debug,
    W: Copy + Ord + Debug,
{
    /// States left at least once.
    pub fn visited(&self) -> impl Iterator<Item = S> + '_ {
        self.visits.keys().copied()
    }

    pub fn visits(&self, state: S) -> u64 {
        self.visits.get(&state).copied().unwrap_or(0)
    }

    pub fn count(&self, to: S, word: Option<W>, from: S) -> u64 {
        self.counts.get(&(from, word, to)).copied().unwrap_or(0)
    }

    pub fn probability(&self, to: S, word: Option<W>, from: S) -> f64 {
        match self.visits(from) {
            0 => 0.0,
            v => self.count(to, word, from) as f64 / v as f64,
        }
    }

    /// Outgoing mass of a visited state, computed from the integer counts so
    /// it is exactly one by construction. Unvisited states have mass zero.
    pub fn row_sum(&self, from: S) -> f64 {
        let total: u64 = self
            .counts
            .iter()
            .filter(|((z, _, _), _)| *z == from)
            .map(|(_, c)| c)
            .sum();
        match self.visits(from) {
            0 => 0.0,
            v => total as f64 / v as f64,
        }
    }

    /// `G(z' | z)`.
    pub fn transition(&self, to: S, from: S) -> f64 {
        let c: u64 = self
            .counts
            .iter()
            .filter(|((z, _, z2), _)| *z == from && *z2 == to)
            .map(|(_, c)| c)
            .sum();
        match self.visits(from) {
            0 => 0.0,
            v => c as f64 / v as f64,
        }
    }

    /// `H(w | z)`.
    pub fn output(&self, word: Option<W>, from: S) -> f64 {
        let c: u64 = self
            .counts
            .iter()
            .filter(|((z, w, _), _)| *z == from && *w == word)
            .map(|(_, c)| c)
            .sum();
        match self.visits(from) {
            0 => 0.0,
            v => c as f64 / v as f64,
        }
    }

    /// All `(transition, probability)` pairs with nonzero count.
    pub fn entries(&self) -> impl Iterator<Item = (Transition<S, W>, f64)> + '_ {
        self.counts
            .keys()
            .map(|&(z, w, z2)| ((z, w, z2), self.probability(z2, w, z)))
    }

    /// The estimated automaton with the empirical start distribution.
    pub fn to_automaton(&self, marked: BTreeSet<S>) -> Result<StochasticAutomaton<S, W>> {
        let behavior = self.entries().collect();
        let initial = self
            .starts
            .iter()
            .map(|(&z, &c)| (z, c as f64 / self.runs as f64))
            .collect();
        StochasticAutomaton::new(behavior, initial, marked)
    }
}

/// Estimates `L` from runs given as `(states, words)` with
/// `states.len() == words.len() + 1`; `words[i]` is emitted on the move from
/// `states[i]` to `states[i + 1]`.
pub fn estimate_behavioral_relation<'a, S, W, I>(runs: I) -> Result<BehavioralRelation<S, W>>
where
    S: Copy + Ord + Debug + 'a,
    W: Copy + Ord + Debug + 'a,
    I: IntoIterator<Item = (&'a [S], &'a [Option<W>])>,
{
    let mut rel = BehavioralRelation {
        counts: BTreeMap::new(),
        visits: BTreeMap::new(),
        starts: BTreeMap::new(),
        runs: 0,
    };
    for (states, words) in runs {
        if states.len() != words.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "trajectory with {} states and {} words is not aligned",
                states.len(),
                words.len()
            )));
        }
        rel.runs += 1;
        *rel.starts.entry(states[0]).or_default() += 1;
        for (step, w) in states.windows(2).zip(words) {
            *rel.visits.entry(step[0]).or_default() += 1;
            *rel.counts.entry((step[0], *w, step[1])).or_default() += 1;
        }
    }
    if rel.runs == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(rel)
}
