//! Density pipeline: fit kernel densities to the sampled TCPA, DCPA, mutual
//! bearings and course difference, then integrate them over the comfort zone
//! and the bearing sectors.

use crate::colregs::{
    classify_sample, g2, give_way_set, ComfortZone, RegionLabel, SampleClassification, HEAD_ON_HALF_WIDTH,
    OVERTAKING_LIMIT, PORT_LIMIT, STARBOARD_LIMIT,
};
use crate::density::{fit_with_selector, BandwidthSelector, DensityEstimate, Topology};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sampling::{Perturber, SampleBatch};

use super::{Method, RiskAssessment, RuleProbabilities, KDE_MIN_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KdeOptions {
    pub selector: BandwidthSelector,
    pub exec: Exec,
}

/// Per-sample quantities gathered from one paired batch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KdeBuffers {
    /// Finite TCPA values; samples without relative motion are left out.
    pub tcpa: Vec<f64>,
    pub dcpa: Vec<f64>,
    pub bearing_j: Vec<f64>,
    pub bearing_k: Vec<f64>,
    pub dpsi: Vec<f64>,
    /// Number of paired samples the buffers came from.
    pub n: usize,
}

impl KdeBuffers {
    pub fn from_classifications(c: &[SampleClassification]) -> Self {
        Self {
            tcpa: c.iter().map(|s| s.tcpa).filter(|t| t.is_finite()).collect(),
            dcpa: c.iter().map(|s| s.dcpa).collect(),
            bearing_j: c.iter().map(|s| s.bearing_j).collect(),
            bearing_k: c.iter().map(|s| s.bearing_k).collect(),
            dpsi: c.iter().map(|s| s.dpsi).collect(),
            n: c.len(),
        }
    }

    pub fn draw(j: &Perturber, k: &Perturber, zone: &ComfortZone, n: usize, seed: u64, exec: Exec) -> Result<Self> {
        let batch = SampleBatch::draw(j, k, n, seed, exec)?;
        Ok(Self::from_classifications(&classify_batch(&batch, zone, exec)?))
    }
}

pub(super) fn classify_batch(batch: &SampleBatch, zone: &ComfortZone, exec: Exec) -> Result<Vec<SampleClassification>> {
    exec.map_indexed(batch.n, |i| {
        classify_sample(&batch.states_j[i], &batch.states_k[i], zone)
    })
    .into_iter()
    .collect()
}

/// Region probabilities of both vessels and their joint table, indexed in
/// [`RegionLabel::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SituationDistribution {
    pub region_j: [f64; 4],
    pub region_k: [f64; 4],
    /// `joint[a][b] = P(v_j = a, v_k = b)`.
    pub joint: [[f64; 4]; 4],
}

impl SituationDistribution {
    /// Joint table as the product of the marginals.
    pub fn independent(region_j: [f64; 4], region_k: [f64; 4]) -> Self {
        let mut joint = [[0.0; 4]; 4];
        for (a, row) in joint.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                *cell = region_j[a] * region_k[b];
            }
        }
        Self {
            region_j,
            region_k,
            joint,
        }
    }

    pub fn pair(&self, a: RegionLabel, b: RegionLabel) -> f64 {
        self.joint[a.index()][b.index()]
    }
}

fn fit(samples: &[f64], topology: Topology, opts: &KdeOptions) -> Result<DensityEstimate> {
    fit_with_selector(samples, topology, opts.selector, opts.exec).map(|(d, _)| d)
}

/// Sector probabilities from a bearing density, with the head-on sector
/// widened by the course-reciprocity test: a vessel is head-on if its bearing
/// is in the head-on sector or the courses are within the reciprocity band.
fn region_marginals(bearing: &DensityEstimate, p_reciprocal: f64) -> Result<[f64; 4]> {
    let p_ho = bearing.integrate(360.0 - HEAD_ON_HALF_WIDTH, HEAD_ON_HALF_WIDTH)?;
    let p_sb = bearing.integrate(HEAD_ON_HALF_WIDTH, STARBOARD_LIMIT)?;
    let p_ot = bearing.integrate(STARBOARD_LIMIT, OVERTAKING_LIMIT)?;
    let p_ps = bearing.integrate(OVERTAKING_LIMIT, PORT_LIMIT)?;
    let keep = 1.0 - p_reciprocal;
    Ok([
        p_ho + p_reciprocal - p_ho * p_reciprocal,
        p_sb * keep,
        p_ot * keep,
        p_ps * keep,
    ])
}

/// Density pipeline with ISJ bandwidths and the default executor.
pub fn assess_kde(j: &Perturber, k: &Perturber, zone: &ComfortZone, n: usize, seed: u64) -> Result<RiskAssessment> {
    assess_kde_with(j, k, zone, n, seed, &KdeOptions::default()).map(|(r, _)| r)
}

pub fn assess_kde_with(
    j: &Perturber,
    k: &Perturber,
    zone: &ComfortZone,
    n: usize,
    seed: u64,
    opts: &KdeOptions,
) -> Result<(RiskAssessment, SituationDistribution)> {
    if n < KDE_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: KDE_MIN_SAMPLES,
            got: n,
        });
    }
    let buf = KdeBuffers::draw(j, k, zone, n, seed, opts.exec)?;

    let f_dcpa = fit(&buf.dcpa, Topology::Line, opts)?;
    let p_risk = f_dcpa.integrate(0.0, zone.d_act)?.clamp(0.0, 1.0);

    let p_tcpa_window = if buf.tcpa.len() >= 2 {
        let f_tcpa = fit(&buf.tcpa, Topology::Line, opts)?;
        let finite = buf.tcpa.len() as f64 / n as f64;
        (f_tcpa.integrate(0.0, zone.t_aware)? * finite).clamp(0.0, 1.0)
    } else {
        0.0
    };

    let f_dpsi = fit(&buf.dpsi, Topology::Line, opts)?;
    let p_reciprocal = f_dpsi
        .integrate(-HEAD_ON_HALF_WIDTH, HEAD_ON_HALF_WIDTH)?
        .clamp(0.0, 1.0);
    let f_bj = fit(&buf.bearing_j, Topology::Circle360, opts)?;
    let f_bk = fit(&buf.bearing_k, Topology::Circle360, opts)?;
    let situations = SituationDistribution::independent(
        region_marginals(&f_bj, p_reciprocal)?,
        region_marginals(&f_bk, p_reciprocal)?,
    );

    let mut p_rule = RuleProbabilities::default();
    for a in RegionLabel::ALL {
        for b in RegionLabel::ALL {
            p_rule.add(g2(a, b), situations.pair(a, b));
        }
    }
    let give_way: f64 = give_way_set().iter().map(|&(a, b)| situations.pair(a, b)).sum();
    let p_give_way = (p_risk * give_way).clamp(0.0, 1.0);
    let assessment = RiskAssessment {
        p_risk,
        p_tcpa_window,
        p_rule,
        p_give_way,
        p_stand_on: 1.0 - p_give_way,
        method: Method::Kde,
        n_samples: n,
        seed,
    };
    Ok((assessment, situations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colregs::Rule;
    use crate::kinematics::VesselState;
    use crate::sampling::{make_uncertainty, Interpretation, StateUncertainty};

    fn pair(alpha: f64) -> (Perturber, Perturber) {
        let os = Perturber::new(VesselState::new(0.0, 0.0, 0.0, 10.0).unwrap(), StateUncertainty::ZERO);
        let unc = make_uncertainty([10.0, 10.0, 2.0, 2.0], alpha, Interpretation::StdDev).unwrap();
        let tv = Perturber::new(VesselState::new(1250.0, 1000.0, 270.0, 10.0).unwrap(), unc);
        (os, tv)
    }

    #[test]
    fn deterministic_limit() {
        let (os, tv) = pair(0.0);
        let zone = ComfortZone::new(150.0, 600.0).unwrap();
        let r = assess_kde(&os, &tv, &zone, 2000, 1).unwrap();
        assert_eq!(r.p_risk, 0.0);
        assert_eq!(r.p_give_way, 0.0);
        assert_eq!(r.p_stand_on, 1.0);
        assert!((r.p_rule.rule(Rule::R15) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_samples() {
        let (os, tv) = pair(1.0);
        let zone = ComfortZone::new(150.0, 600.0).unwrap();
        assert!(matches!(
            assess_kde(&os, &tv, &zone, 999, 1),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn distribution_sums() {
        let (os, tv) = pair(1.0);
        let zone = ComfortZone::new(150.0, 600.0).unwrap();
        let (r, s) = assess_kde_with(&os, &tv, &zone, 5000, 3, &KdeOptions::default()).unwrap();
        assert!((s.region_j.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((s.region_k.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((s.joint.iter().flatten().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((r.p_rule.total() - 1.0).abs() < 1e-9);
        assert_eq!(r.p_give_way + r.p_stand_on, 1.0);
    }

    #[test]
    fn exec_independent() {
        let (os, tv) = pair(1.0);
        let zone = ComfortZone::new(150.0, 600.0).unwrap();
        let seq = KdeOptions {
            exec: Exec::Sequential,
            ..KdeOptions::default()
        };
        let a = assess_kde_with(&os, &tv, &zone, 3000, 9, &seq).unwrap();
        let b = assess_kde_with(&os, &tv, &zone, 3000, 9, &KdeOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
