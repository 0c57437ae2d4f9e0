//! `selftest`: deterministic invariant checks on the geometry, the situation
//! table, the bundled scenarios and the automaton.

use std::io::{self, Write};

use colreg_risk::automaton::{AutomatonConfig, UnderstandingAutomaton, Word};
use colreg_risk::colregs::{
    classify_sample, g2_with, give_way_set_of, ComfortZone, Obligation, RegionLabel, SituationTable,
};
use colreg_risk::estimator::{assess_des, nominal_pair};
use colreg_risk::kinematics::{cpa, relative_bearing, VesselState};
use colreg_risk::Exec;

use crate::config::ScenarioConfig;

pub const BUNDLED: [(&str, &str); 3] = [
    ("scenario1.json", include_str!("../scenarios/scenario1.json")),
    ("scenario2.json", include_str!("../scenarios/scenario2.json")),
    ("scenario3.json", include_str!("../scenarios/scenario3.json")),
];

/// The situation table written out independently of the library constant,
/// rows are the acting vessel's region (HO, SB, OT, PS), columns the target's.
const EXPECTED_TABLE: [&str; 4] = [
    "R14,1 R15,0 R13,1 R15,1",
    "R15,1 R0,1 R13,1 R15,1",
    "R13,0 R13,0 R0,1 R13,0",
    "R15,0 R15,0 R13,1 R0,1",
];

struct Report<'a, W: Write> {
    out: &'a mut W,
    failures: usize,
}

impl<W: Write> Report<'_, W> {
    fn check(&mut self, name: &str, ok: bool, detail: String) -> io::Result<()> {
        if !ok {
            self.failures += 1;
        }
        writeln!(self.out, "{} {name}: {detail}", if ok { "PASS" } else { "FAIL" })
    }
}

fn state(n: f64, e: f64, c: f64, u: f64) -> VesselState {
    VesselState::new(n, e, c, u).expect("valid built-in state")
}

/// Runs every check against `table`, printing one line each. Returns whether
/// all passed.
pub fn run<W: Write>(out: &mut W, table: &SituationTable) -> io::Result<bool> {
    let mut r = Report { out, failures: 0 };
    let own = state(0.0, 0.0, 0.0, 10.0);

    let d1 = cpa(&own, &state(1250.0, 1000.0, 270.0, 10.0))
        .map(|c| c.dcpa)
        .unwrap_or(f64::NAN);
    r.check(
        "dcpa scenario 1",
        (d1 - 176.78).abs() < 0.01,
        format!("DCPA(scenario 1) = {d1:.2} m"),
    )?;
    let d2 = cpa(&own, &state(995.40, -95.85, 174.5, 10.0))
        .map(|c| c.dcpa)
        .unwrap_or(f64::NAN);
    r.check(
        "dcpa scenario 2",
        (d2 - 47.98).abs() < 0.01,
        format!("DCPA(scenario 2) = {d2:.2} m"),
    )?;
    let t0 = nominal_pair(0.0, 1000.0, 10.0)
        .ok()
        .and_then(|(a, b)| cpa(&a, &b).ok())
        .map_or(f64::NAN, |c| c.tcpa);
    r.check("head-on closure", (t0 - 50.0).abs() < 1e-9, format!("TCPA = {t0:.3} s"))?;

    let mut mismatches = Vec::new();
    for (a, row) in RegionLabel::ALL.iter().zip(EXPECTED_TABLE) {
        for (b, cell) in RegionLabel::ALL.iter().zip(row.split(' ')) {
            let got = g2_with(table, *a, *b);
            let got = format!("{},{}", got.rule, got.obligation as u8);
            if got != cell {
                mismatches.push(format!("({a},{b}) = {got}, expected {cell}"));
            }
        }
    }
    r.check(
        "situation table",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "16 cells match".into()
        } else {
            mismatches.join("; ")
        },
    )?;
    let gw = give_way_set_of(table);
    let reciprocal = g2_with(table, RegionLabel::HeadOn, RegionLabel::Starboard).obligation == Obligation::StandOn
        && g2_with(table, RegionLabel::Starboard, RegionLabel::HeadOn).obligation == Obligation::GiveWay;
    r.check(
        "give-way set",
        gw.len() == 10 && gw.contains(&(RegionLabel::Starboard, RegionLabel::Port)) && reciprocal,
        format!("{} give-way pairs", gw.len()),
    )?;

    for (name, text) in BUNDLED {
        bundled_checks(&mut r, name, text)?;
    }

    let zone = ComfortZone::new(150.0, 600.0).expect("valid zone");
    let automaton = UnderstandingAutomaton::new(AutomatonConfig::from_zone(&zone)).with_table(*table);
    let mut pairs = 0;
    let mut disagree = 0;
    for b in (0..360).step_by(15) {
        for c in (0..360).step_by(30) {
            let rad = f64::from(b).to_radians();
            let k = state(400.0 * rad.cos(), 400.0 * rad.sin(), f64::from(c), 7.0);
            let (Ok(s), Ok(cl)) = (automaton.run(&own, &k), classify_sample(&own, &k, &zone)) else {
                disagree += 1;
                continue;
            };
            pairs += 1;
            let word = Word::for_outcome(g2_with(table, cl.region_j, cl.region_k));
            let situation = Word::SITUATION.iter().copied().find(|&w| s.contains(w));
            if s.contains(Word::U15) != cl.dcpa_within || situation != word {
                disagree += 1;
            }
        }
    }
    r.check(
        "automaton agreement",
        disagree == 0,
        format!("{pairs} pairs, {disagree} disagreements"),
    )?;

    let ok = r.failures == 0;
    writeln!(r.out, "{}", if ok { "selftest passed" } else { "selftest FAILED" })?;
    Ok(ok)
}

fn bundled_checks<W: Write>(r: &mut Report<'_, W>, name: &str, text: &str) -> io::Result<()> {
    let cfg = match ScenarioConfig::from_json(text) {
        Ok(c) => c,
        Err(e) => return r.check(&format!("{name} parses"), false, e.message),
    };
    let (Ok(own), Ok(target)) = (cfg.own_state(), cfg.target_state()) else {
        return r.check(&format!("{name} states"), false, "invalid nominal states".into());
    };
    let c = cpa(&own, &target).ok();
    let (ok, detail) = match name {
        "scenario1.json" => {
            let d = c.map_or(f64::NAN, |c| c.dcpa);
            ((d - 176.78).abs() < 0.01, format!("nominal DCPA {d:.2} m"))
        }
        "scenario2.json" => {
            let d = c.map_or(f64::NAN, |c| c.dcpa);
            ((d - 47.98).abs() < 0.01, format!("nominal DCPA {d:.2} m"))
        }
        _ => {
            // own ship sits just inside the target's starboard sector, half a
            // degree from the overtaking border
            let b = relative_bearing(&target, &own).unwrap_or(f64::NAN);
            ((b - 112.0).abs() < 0.01, format!("bearing from target {b:.2} deg"))
        }
    };
    r.check(&format!("{name} nominal geometry"), ok, detail)?;

    // risk is bounded by DCPA, so the awareness horizon must not matter
    let mut longer = cfg.clone();
    longer.t_aware_s *= 2.0;
    let run = |c: &ScenarioConfig| {
        let (j, k) = c.perturbers(1.0).ok()?;
        let a = c.automaton().ok()?;
        assess_des(&j, &k, &a, 2000, c.seed, Exec::default()).ok()
    };
    let (a, b) = (run(&cfg), run(&longer));
    let same = match (a, b) {
        (Some(a), Some(b)) => a.p_risk == b.p_risk && a.p_rule == b.p_rule && a.p_give_way == b.p_give_way,
        _ => false,
    };
    r.check(
        &format!("{name} t_aware insensitivity"),
        same,
        format!("t_aware {} s vs {} s", cfg.t_aware_s, longer.t_aware_s),
    )
}
