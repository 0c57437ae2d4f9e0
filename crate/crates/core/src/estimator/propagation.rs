//! Uncertainty propagation study: a target placed at several bearings on a
//! circle around own ship, both vessels perturbed, with the resulting TCPA,
//! DCPA and bearing samples kept for export.

use crate::colregs::{classify_sample, ComfortZone};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kinematics::{wrap_360, VesselState};
use crate::sampling::{make_uncertainty, Interpretation, Perturber, SampleBatch};

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationSetup {
    pub bearings: Vec<f64>,
    pub range_m: f64,
    pub n: usize,
    pub seed: u64,
    /// Dispersion of north, east, course and speed for both vessels.
    pub diag: [f64; 4],
    /// How `diag` is read. The study writes it as a covariance, hence the
    /// variance default.
    pub interpretation: Interpretation,
    pub speed: f64,
}

impl Default for PropagationSetup {
    fn default() -> Self {
        Self {
            bearings: vec![0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0],
            range_m: 1000.0,
            n: 10_000,
            seed: 0,
            diag: [10.0, 10.0, 2.0, 2.0],
            interpretation: Interpretation::Variance,
            speed: 10.0,
        }
    }
}

/// Samples for one target bearing.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationBuffers {
    pub bearing: f64,
    /// TCPA of every sample with relative motion, negative values included.
    pub tcpa: Vec<f64>,
    pub dcpa: Vec<f64>,
    /// Relative bearing of the target seen from own ship.
    pub relative_bearing: Vec<f64>,
}

/// Nominal own ship and target for one bearing: own ship at the origin
/// heading north, the target `range` away on course `180 - bearing`. At
/// bearing 0 that is a head-on closure; at 180 both vessels steer the same
/// course.
pub fn nominal_pair(bearing: f64, range: f64, speed: f64) -> Result<(VesselState, VesselState)> {
    let b = bearing.to_radians();
    let os = VesselState::new(0.0, 0.0, 0.0, speed)?;
    let tv = VesselState::new(range * b.cos(), range * b.sin(), wrap_360(180.0 - bearing), speed)?;
    Ok((os, tv))
}

/// Runs the study. Every bearing reuses the same random streams, so the
/// buffers differ only through geometry.
pub fn propagation_study(setup: &PropagationSetup, exec: Exec) -> Result<Vec<PropagationBuffers>> {
    if setup.n == 0 {
        return Err(Error::InvalidCount(0));
    }
    if let Some(b) = setup.bearings.iter().find(|b| !(0.0..360.0).contains(*b)) {
        return Err(Error::InvalidParameter(format!("bearing {b} outside [0, 360)")));
    }
    if !(setup.range_m > 0.0 && setup.range_m.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "range {} must be positive",
            setup.range_m
        )));
    }
    let unc = make_uncertainty(setup.diag, 1.0, setup.interpretation)?;
    // the zone only feeds flags this study does not report
    let zone = ComfortZone::new(1.0, 1.0)?;
    setup
        .bearings
        .iter()
        .map(|&bearing| {
            let (os, tv) = nominal_pair(bearing, setup.range_m, setup.speed)?;
            let batch = SampleBatch::draw(
                &Perturber::new(os, unc),
                &Perturber::new(tv, unc),
                setup.n,
                setup.seed,
                exec,
            )?;
            let c: Vec<_> = exec
                .map_indexed(setup.n, |i| {
                    classify_sample(&batch.states_j[i], &batch.states_k[i], &zone)
                })
                .into_iter()
                .collect::<Result<_>>()?;
            Ok(PropagationBuffers {
                bearing,
                tcpa: c.iter().map(|s| s.tcpa).filter(|t| t.is_finite()).collect(),
                dcpa: c.iter().map(|s| s.dcpa).collect(),
                relative_bearing: c.iter().map(|s| s.bearing_j).collect(),
            })
        })
        .collect()
}
