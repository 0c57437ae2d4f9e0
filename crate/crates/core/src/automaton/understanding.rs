//! The understanding automaton: a 13-state loop that turns one sampled
//! vessel pair into a string of output words.
//!
//! Only five states carry semantics. U1 and U2 test awareness distance and
//! time, U4 maps the mutual bearings to a COLREGs situation word, U8 tests the
//! action distance and U9 the action time. All other states pass through
//! silently. Every run starts and ends in the marked state U1.

use std::fmt;
use std::io::{self, Write};

use crate::colregs::{g1, g2_with, ComfortZone, Obligation, Rule, SituationOutcome, SituationTable, TABLE_I};
use crate::error::{Error, Result};
use crate::estimator::{Method, RiskAssessment, RuleProbabilities};
use crate::kinematics::{self, VesselState};

/// State `U1` to `U13`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UState(u8);

impl UState {
    pub const COUNT: u8 = 13;
    pub const U1: UState = UState(1);

    pub fn new(index: u8) -> Option<Self> {
        (1..=Self::COUNT).contains(&index).then_some(Self(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    fn next(self) -> Self {
        Self(self.0 % Self::COUNT + 1)
    }
}

impl fmt::Display for UState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Word {
    /// DCPA within the awareness distance (U1).
    AwareDistance,
    /// TCPA within the awareness horizon (U2).
    AwareTime,
    /// Rule 13, stand-on.
    U4,
    /// Rule 13, give-way.
    U5,
    /// Rule 14, give-way.
    U6,
    /// Rule 15, stand-on.
    U7,
    /// Rule 15, give-way.
    U8,
    /// DCPA within the action distance (U8).
    U15,
    /// TCPA within the action horizon (U9).
    ActTime,
}

impl Word {
    pub const SITUATION: [Word; 5] = [Word::U4, Word::U5, Word::U6, Word::U7, Word::U8];

    pub fn as_str(self) -> &'static str {
        match self {
            Word::AwareDistance => "w_aware_d",
            Word::AwareTime => "w_aware_t",
            Word::U4 => "u4",
            Word::U5 => "u5",
            Word::U6 => "u6",
            Word::U7 => "u7",
            Word::U8 => "u8",
            Word::U15 => "u15",
            Word::ActTime => "w_act_t",
        }
    }

    /// Situation word for a table outcome; `None` when no rule applies.
    pub fn for_outcome(outcome: SituationOutcome) -> Option<Word> {
        match (outcome.rule, outcome.obligation) {
            (Rule::R0, _) => None,
            (Rule::R13, Obligation::StandOn) => Some(Word::U4),
            (Rule::R13, Obligation::GiveWay) => Some(Word::U5),
            (Rule::R14, _) => Some(Word::U6),
            (Rule::R15, Obligation::StandOn) => Some(Word::U7),
            (Rule::R15, Obligation::GiveWay) => Some(Word::U8),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Distance and time thresholds of the automaton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomatonConfig {
    pub d_aware: f64,
    pub d_act: f64,
    pub t_aware: f64,
    pub t_act: f64,
}

impl AutomatonConfig {
    pub fn new(d_aware: f64, d_act: f64, t_aware: f64, t_act: f64) -> Result<Self> {
        if !(d_act > 0.0 && d_aware >= d_act && d_aware.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need d_aware >= d_act > 0, got d_aware={d_aware}, d_act={d_act}"
            )));
        }
        if !(t_act > 0.0 && t_aware >= t_act && t_aware.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need t_aware >= t_act > 0, got t_aware={t_aware}, t_act={t_act}"
            )));
        }
        Ok(Self {
            d_aware,
            d_act,
            t_aware,
            t_act,
        })
    }

    /// Defaults for a comfort zone: `d_aware = 2 d_act`, `t_act = t_aware`.
    pub fn from_zone(zone: &ComfortZone) -> Self {
        Self {
            d_aware: 2.0 * zone.d_act,
            d_act: zone.d_act,
            t_aware: zone.t_aware,
            t_act: zone.t_aware,
        }
    }
}

/// Words emitted during one loop through the automaton.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunString {
    words: Vec<Word>,
}

impl RunString {
    pub fn new(words: Vec<Word>) -> Self {
        Self { words }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn contains(&self, w: Word) -> bool {
        self.words.contains(&w)
    }
}

impl fmt::Display for RunString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(w.as_str())?;
        }
        Ok(())
    }
}

/// Full trajectory of one run: the visited states (U1 ... U13, U1) and the
/// word emitted on each of the 13 transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub states: Vec<UState>,
    pub words: Vec<Option<Word>>,
}

impl RunTrace {
    pub fn string(&self) -> RunString {
        RunString::new(self.words.iter().flatten().copied().collect())
    }
}

/// The automaton with its thresholds and situation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnderstandingAutomaton {
    pub config: AutomatonConfig,
    pub table: SituationTable,
}

/// Quantities the semantic states inspect, computed once per run.
struct Observation {
    dcpa: f64,
    tcpa: f64,
    outcome: SituationOutcome,
}

impl UnderstandingAutomaton {
    pub fn new(config: AutomatonConfig) -> Self {
        Self { config, table: TABLE_I }
    }

    pub fn with_table(mut self, table: SituationTable) -> Self {
        self.table = table;
        self
    }

    fn observe(&self, j: &VesselState, k: &VesselState) -> Result<Observation> {
        let beta_j = kinematics::relative_bearing(j, k)?;
        let beta_k = kinematics::relative_bearing(k, j)?;
        let (dcpa, tcpa) = match kinematics::cpa(j, k) {
            Ok(c) => (c.dcpa, c.tcpa),
            // no relative motion: the separation never changes
            Err(Error::DegenerateRelativeMotion { .. }) => (kinematics::separation(j, k), f64::INFINITY),
            Err(e) => return Err(e),
        };
        let outcome = g2_with(
            &self.table,
            g1(beta_j, j.course, k.course),
            g1(beta_k, k.course, j.course),
        );
        Ok(Observation { dcpa, tcpa, outcome })
    }

    fn emit(&self, state: UState, obs: &Observation) -> Option<Word> {
        let cfg = &self.config;
        match state.index() {
            1 => (obs.dcpa <= cfg.d_aware).then_some(Word::AwareDistance),
            2 => (0.0..=cfg.t_aware).contains(&obs.tcpa).then_some(Word::AwareTime),
            4 => Word::for_outcome(obs.outcome),
            8 => (obs.dcpa <= cfg.d_act).then_some(Word::U15),
            9 => (0.0..=cfg.t_act).contains(&obs.tcpa).then_some(Word::ActTime),
            _ => None,
        }
    }

    /// One full loop with the visited states recorded.
    pub fn trace(&self, j: &VesselState, k: &VesselState) -> Result<RunTrace> {
        let obs = self.observe(j, k)?;
        let mut states = Vec::with_capacity(UState::COUNT as usize + 1);
        let mut words = Vec::with_capacity(UState::COUNT as usize);
        let mut z = UState::U1;
        states.push(z);
        for _ in 0..UState::COUNT {
            words.push(self.emit(z, &obs));
            z = z.next();
            states.push(z);
        }
        Ok(RunTrace { states, words })
    }

    pub fn run(&self, j: &VesselState, k: &VesselState) -> Result<RunString> {
        let obs = self.observe(j, k)?;
        let mut z = UState::U1;
        let mut words = Vec::new();
        for _ in 0..UState::COUNT {
            words.extend(self.emit(z, &obs));
            z = z.next();
        }
        Ok(RunString::new(words))
    }
}

/// Runs the standard automaton (Table I) once on a state pair.
pub fn run_once(j: &VesselState, k: &VesselState, cfg: &AutomatonConfig) -> Result<RunString> {
    UnderstandingAutomaton::new(*cfg).run(j, k)
}

/// Events whose indicator functions drive the probability estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// DCPA within the action distance.
    RiskAct,
    /// No rule applies (counted as give-way).
    R0GiveWay,
    R13StandOn,
    R13GiveWay,
    R14GiveWay,
    R15StandOn,
    R15GiveWay,
}

impl Event {
    pub const SITUATIONS: [Event; 6] = [
        Event::R0GiveWay,
        Event::R13StandOn,
        Event::R13GiveWay,
        Event::R14GiveWay,
        Event::R15StandOn,
        Event::R15GiveWay,
    ];

    pub fn outcome(self) -> Option<SituationOutcome> {
        use Obligation::*;
        let (r, o) = match self {
            Event::RiskAct => return None,
            Event::R0GiveWay => (Rule::R0, GiveWay),
            Event::R13StandOn => (Rule::R13, StandOn),
            Event::R13GiveWay => (Rule::R13, GiveWay),
            Event::R14GiveWay => (Rule::R14, GiveWay),
            Event::R15StandOn => (Rule::R15, StandOn),
            Event::R15GiveWay => (Rule::R15, GiveWay),
        };
        Some(SituationOutcome::new(r, o))
    }
}

/// Membership test behind each event.
pub fn indicator(s: &RunString, event: Event) -> bool {
    match event {
        Event::RiskAct => s.contains(Word::U15),
        Event::R0GiveWay => !Word::SITUATION.iter().any(|&w| s.contains(w)),
        Event::R13StandOn => s.contains(Word::U4),
        Event::R13GiveWay => s.contains(Word::U5),
        Event::R14GiveWay => s.contains(Word::U6),
        Event::R15StandOn => s.contains(Word::U7),
        Event::R15GiveWay => s.contains(Word::U8),
    }
}

/// The single situation counter a string increments, checking the situation
/// words in a fixed order.
fn situation_of(s: &RunString) -> Event {
    [
        (Word::U4, Event::R13StandOn),
        (Word::U5, Event::R13GiveWay),
        (Word::U6, Event::R14GiveWay),
        (Word::U7, Event::R15StandOn),
        (Word::U8, Event::R15GiveWay),
    ]
    .into_iter()
    .find(|(w, _)| s.contains(*w))
    .map_or(Event::R0GiveWay, |(_, e)| e)
}

/// Empirical probabilities over a set of run strings. The give-way
/// probability is the fraction of give-way situations times the risk
/// probability. The result carries `seed = 0`; callers that know the seed
/// overwrite it.
pub fn estimate_probabilities(strings: &[RunString]) -> Result<RiskAssessment> {
    if strings.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut risk = 0u64;
    let mut window = 0u64;
    let mut counts = [0u64; 6];
    for s in strings {
        risk += u64::from(indicator(s, Event::RiskAct));
        window += u64::from(s.contains(Word::AwareTime));
        let e = situation_of(s);
        let slot = Event::SITUATIONS.iter().position(|&x| x == e).expect("situation event");
        counts[slot] += 1;
    }
    let n = strings.len() as f64;
    let mut p_rule = RuleProbabilities::default();
    let mut give_way = 0u64;
    for (e, &c) in Event::SITUATIONS.iter().zip(&counts) {
        let outcome = e.outcome().expect("situation event");
        p_rule.add(outcome, c as f64 / n);
        if outcome.obligation == Obligation::GiveWay {
            give_way += c;
        }
    }
    let p_risk = risk as f64 / n;
    let p_give_way = give_way as f64 / n * p_risk;
    Ok(RiskAssessment {
        p_risk,
        p_tcpa_window: window as f64 / n,
        p_rule,
        p_give_way,
        p_stand_on: 1.0 - p_give_way,
        method: Method::Des,
        n_samples: strings.len(),
        seed: 0,
    })
}

/// Writes one line per run with the comma-separated words.
pub fn write_trace<W: Write>(out: &mut W, strings: &[RunString]) -> io::Result<()> {
    for s in strings {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::estimate_behavioral_relation;
    use crate::colregs::classify_sample;
    use proptest::prelude::*;

    fn st(n: f64, e: f64, c: f64, u: f64) -> VesselState {
        VesselState::new(n, e, c, u).unwrap()
    }

    fn cfg() -> AutomatonConfig {
        AutomatonConfig::from_zone(&ComfortZone::new(150.0, 600.0).unwrap())
    }

    #[test]
    fn scenario_strings() {
        let os = st(0.0, 0.0, 0.0, 10.0);
        let s2 = run_once(&os, &st(995.40, -95.85, 174.5, 10.0), &cfg()).unwrap();
        assert!(s2.contains(Word::U15) && s2.contains(Word::U7), "{s2}");
        let s1 = run_once(&os, &st(1250.0, 1000.0, 270.0, 10.0), &cfg()).unwrap();
        assert!(s1.contains(Word::U8) && !s1.contains(Word::U15), "{s1}");
    }

    #[test]
    fn distant_diagonal_pair_is_r0() {
        // each vessel sees the other on its starboard side, far away
        let os = st(0.0, 0.0, 0.0, 10.0);
        let tv = st(0.0, 1e6, 240.0, 10.0);
        let s = run_once(&os, &tv, &cfg()).unwrap();
        assert!(!s.contains(Word::U15));
        assert!(Word::SITUATION.iter().all(|&w| !s.contains(w)), "{s}");
        assert!(indicator(&s, Event::R0GiveWay));
    }

    #[test]
    fn indicator_examples() {
        let s = RunString::new(vec![Word::U15, Word::U7]);
        assert!(indicator(&s, Event::RiskAct));
        assert!(indicator(&s, Event::R15StandOn));
        assert!(!indicator(&s, Event::R0GiveWay));
        assert!(indicator(&RunString::default(), Event::R0GiveWay));
        assert_eq!(s.to_string(), "u15,u7");
    }

    #[test]
    fn all_give_way_r14() {
        let strings = vec![RunString::new(vec![Word::U6, Word::U15]); 10];
        let r = estimate_probabilities(&strings).unwrap();
        assert_eq!(r.p_risk, 1.0);
        assert_eq!(r.p_rule.rule(Rule::R14), 1.0);
        assert_eq!(r.p_give_way, 1.0);
        assert_eq!(r.p_stand_on, 0.0);
        assert_eq!(estimate_probabilities(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn trace_is_a_full_loop() {
        let a = UnderstandingAutomaton::new(cfg());
        let t = a
            .trace(&st(0.0, 0.0, 0.0, 10.0), &st(995.40, -95.85, 174.5, 10.0))
            .unwrap();
        assert_eq!(t.states.len(), 14);
        assert_eq!(t.states[0], UState::U1);
        assert_eq!(t.states[13], UState::U1);
        assert_eq!(
            t.string(),
            a.run(&st(0.0, 0.0, 0.0, 10.0), &st(995.40, -95.85, 174.5, 10.0))
                .unwrap()
        );
        let rel = estimate_behavioral_relation([(&t.states[..], &t.words[..])]).unwrap();
        assert_eq!(rel.visited().count(), 13);
        assert_eq!(rel.output(Some(Word::U15), UState::new(8).unwrap()), 1.0);
    }

    #[test]
    fn coincident_rejected() {
        let a = st(5.0, 5.0, 0.0, 1.0);
        assert_eq!(run_once(&a, &a, &cfg()), Err(Error::CoincidentPositions));
    }

    #[test]
    fn config_validation() {
        assert!(AutomatonConfig::new(100.0, 150.0, 600.0, 600.0).is_err());
        assert!(AutomatonConfig::new(300.0, 150.0, 600.0, 700.0).is_err());
        assert!(AutomatonConfig::new(300.0, 150.0, 600.0, 300.0).is_ok());
    }

    #[test]
    fn trace_dump() {
        let mut out = Vec::new();
        write_trace(
            &mut out,
            &[
                RunString::new(vec![Word::AwareDistance, Word::U8]),
                RunString::default(),
            ],
        )
        .unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "w_aware_d,u8\n\n");
    }

    proptest! {
        #[test]
        fn agrees_with_classification(
            n in -2000.0..2000.0f64, e in -2000.0..2000.0f64,
            cj in 0.0..360.0f64, ck in 0.0..360.0f64,
            uj in 0.0..20.0f64, uk in 0.0..20.0f64,
        ) {
            let j = st(0.0, 0.0, cj, uj);
            let k = st(n, e, ck, uk);
            prop_assume!(n.hypot(e) > 1e-6);
            let zone = ComfortZone::new(150.0, 600.0).unwrap();
            let s = run_once(&j, &k, &AutomatonConfig::from_zone(&zone)).unwrap();
            let c = classify_sample(&j, &k, &zone).unwrap();
            prop_assert_eq!(s.contains(Word::U15), c.dcpa_within);
            prop_assert_eq!(s.contains(Word::AwareTime), c.tcpa_within);
            prop_assert!(Word::SITUATION.iter().filter(|&&w| s.contains(w)).count() <= 1);
            prop_assert_eq!(situation_of(&s).outcome().unwrap(), c.outcome);
            prop_assert_eq!(
                Event::SITUATIONS.iter().filter(|&&ev| indicator(&s, ev)).count(), 1
            );
        }
    }
}
