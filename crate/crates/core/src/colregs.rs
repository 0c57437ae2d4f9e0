//! COLREGs situation classification for a pair of vessels.
//!
//! Each vessel maps the other into one of four regions (head-on, starboard,
//! overtaking, port) from the relative bearing and the reciprocal course
//! difference. The pair of regions is then mapped to the applicable rule
//! (13, 14, 15 or none) and the acting vessel's obligation.

use std::fmt;

use crate::error::{Error, Result};
use crate::kinematics::{self, VesselState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionLabel {
    HeadOn,
    Starboard,
    Overtaking,
    Port,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 4] = [
        RegionLabel::HeadOn,
        RegionLabel::Starboard,
        RegionLabel::Overtaking,
        RegionLabel::Port,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            RegionLabel::HeadOn => "HO",
            RegionLabel::Starboard => "SB",
            RegionLabel::Overtaking => "OT",
            RegionLabel::Port => "PS",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

/// COLREGs rule applicable to an encounter. `R0` means none of rules 13-15.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    R0,
    R13,
    R14,
    R15,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::R0, Rule::R13, Rule::R14, Rule::R15];
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::R0 => "R0",
            Rule::R13 => "R13",
            Rule::R14 => "R14",
            Rule::R15 => "R15",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Obligation {
    StandOn = 0,
    GiveWay = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SituationOutcome {
    pub rule: Rule,
    pub obligation: Obligation,
}

impl SituationOutcome {
    pub const fn new(rule: Rule, obligation: Obligation) -> Self {
        Self { rule, obligation }
    }
}

impl fmt::Display for SituationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rule, self.obligation as u8)
    }
}

/// Mutual mapping table, indexed `[acting][target]` in [`RegionLabel::ALL`]
/// order. Diagonal crossing cells have no applicable rule and are treated as
/// give-way.
pub type SituationTable = [[SituationOutcome; 4]; 4];

const fn so(rule: Rule, obligation: Obligation) -> SituationOutcome {
    SituationOutcome::new(rule, obligation)
}

use Obligation::{GiveWay as GW, StandOn as SO};

pub const TABLE_I: SituationTable = [
    // target:  HO              SB              OT              PS
    [
        so(Rule::R14, GW),
        so(Rule::R15, SO),
        so(Rule::R13, GW),
        so(Rule::R15, GW),
    ], // HO
    [
        so(Rule::R15, GW),
        so(Rule::R0, GW),
        so(Rule::R13, GW),
        so(Rule::R15, GW),
    ], // SB
    [
        so(Rule::R13, SO),
        so(Rule::R13, SO),
        so(Rule::R0, GW),
        so(Rule::R13, SO),
    ], // OT
    [
        so(Rule::R15, SO),
        so(Rule::R15, SO),
        so(Rule::R13, GW),
        so(Rule::R0, GW),
    ], // PS
];

/// Comfort-zone thresholds for collision risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComfortZone {
    /// Action distance (comfort-zone radius), meters.
    pub d_act: f64,
    /// Awareness horizon, seconds.
    pub t_aware: f64,
}

impl ComfortZone {
    pub fn new(d_act: f64, t_aware: f64) -> Result<Self> {
        if !(d_act > 0.0 && d_act.is_finite()) {
            return Err(Error::InvalidParameter(format!("d_act must be > 0, got {d_act}")));
        }
        if !(t_aware > 0.0) {
            return Err(Error::InvalidParameter(format!("t_aware must be > 0, got {t_aware}")));
        }
        Ok(Self { d_act, t_aware })
    }
}

/// Half-width of the head-on sector and of the course-reciprocity band, degrees.
pub const HEAD_ON_HALF_WIDTH: f64 = 5.0;
pub const STARBOARD_LIMIT: f64 = 112.5;
pub const OVERTAKING_LIMIT: f64 = 247.5;
pub const PORT_LIMIT: f64 = 355.0;

/// Region of `beta` from the bearing alone, ignoring the course test.
pub fn bearing_band(beta: f64) -> RegionLabel {
    if beta <= HEAD_ON_HALF_WIDTH || beta > PORT_LIMIT {
        RegionLabel::HeadOn
    } else if beta <= STARBOARD_LIMIT {
        RegionLabel::Starboard
    } else if beta <= OVERTAKING_LIMIT {
        RegionLabel::Overtaking
    } else {
        RegionLabel::Port
    }
}

/// Bearing mapping: relative bearing and the two courses to a region.
///
/// Head-on fires on the bearing sector or on nearly reciprocal courses
/// (`|dpsi| <= 5`); otherwise the bearing band decides.
pub fn g1(beta: f64, psi_j: f64, psi_k: f64) -> RegionLabel {
    let beta = kinematics::wrap_360(beta);
    let dpsi = kinematics::reciprocal_course(psi_j, psi_k);
    if dpsi.abs() <= HEAD_ON_HALF_WIDTH {
        RegionLabel::HeadOn
    } else {
        bearing_band(beta)
    }
}

/// Mutual bearing mapping using the standard table.
pub fn g2(acting: RegionLabel, target: RegionLabel) -> SituationOutcome {
    g2_with(&TABLE_I, acting, target)
}

pub fn g2_with(table: &SituationTable, acting: RegionLabel, target: RegionLabel) -> SituationOutcome {
    table[acting.index()][target.index()]
}

/// Region pairs that oblige the acting vessel to give way, derived from the table.
pub fn give_way_set() -> Vec<(RegionLabel, RegionLabel)> {
    give_way_set_of(&TABLE_I)
}

pub fn give_way_set_of(table: &SituationTable) -> Vec<(RegionLabel, RegionLabel)> {
    let mut out = Vec::new();
    for a in RegionLabel::ALL {
        for b in RegionLabel::ALL {
            if g2_with(table, a, b).obligation == Obligation::GiveWay {
                out.push((a, b));
            }
        }
    }
    out
}

/// Classification of one deterministic state pair from `j`'s point of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleClassification {
    /// `None` when the relative motion is degenerate.
    pub cpa: Option<kinematics::CpaResult>,
    /// DCPA, or the current separation for degenerate relative motion.
    pub dcpa: f64,
    /// TCPA, `+inf` for degenerate relative motion.
    pub tcpa: f64,
    pub bearing_j: f64,
    pub bearing_k: f64,
    pub dpsi: f64,
    pub region_j: RegionLabel,
    pub region_k: RegionLabel,
    /// `DCPA <= d_act`.
    pub dcpa_within: bool,
    /// `0 <= TCPA <= t_aware`.
    pub tcpa_within: bool,
    pub outcome: SituationOutcome,
}

impl SampleClassification {
    /// Full collision-risk conjunction: DCPA inside the comfort zone and CPA
    /// within the awareness horizon. Degenerate relative motion counts as a
    /// risk only if the vessels are already inside the comfort zone.
    pub fn risk(&self) -> bool {
        if self.cpa.is_none() {
            self.dcpa_within
        } else {
            self.dcpa_within && self.tcpa_within
        }
    }
}

/// Geometry and COLREGs outcome for one state pair.
pub fn classify_sample(j: &VesselState, k: &VesselState, zone: &ComfortZone) -> Result<SampleClassification> {
    let bearing_j = kinematics::relative_bearing(j, k)?;
    let bearing_k = kinematics::relative_bearing(k, j)?;
    let (cpa, dcpa, tcpa) = match kinematics::cpa(j, k) {
        Ok(r) => (Some(r), r.dcpa, r.tcpa),
        Err(Error::DegenerateRelativeMotion { .. }) => (None, kinematics::separation(j, k), f64::INFINITY),
        Err(e) => return Err(e),
    };
    let region_j = g1(bearing_j, j.course, k.course);
    let region_k = g1(bearing_k, k.course, j.course);
    Ok(SampleClassification {
        cpa,
        dcpa,
        tcpa,
        bearing_j,
        bearing_k,
        dpsi: kinematics::reciprocal_course(j.course, k.course),
        region_j,
        region_k,
        dcpa_within: dcpa <= zone.d_act,
        tcpa_within: (0.0..=zone.t_aware).contains(&tcpa),
        outcome: g2(region_j, region_k),
    })
}
