//! Gaussian kernel density estimation over scalar samples.
//!
//! Estimates live either on the real line or on the 360° circle. On the
//! circle each kernel is wrapped by summing its images at `x ± 360 m`, so
//! sectors that straddle 0°/360° (the head-on sector) get their full mass.
//! Interval probabilities are exact per-kernel normal CDF differences.

mod bandwidth;
mod cv;
mod ks;

use std::io::{self, Write};

pub use bandwidth::{
    isj, select_bandwidth, silverman, BandwidthReport, BandwidthSelector, SelectedBandwidth, ISJ_GRID_SIZE,
    ISJ_MIN_SAMPLES,
};
pub use cv::{grid_cv, grid_cv_scores, GridSearch};
pub use ks::{kolmogorov_survival, ks_normality, KsResult};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kinematics::wrap_360;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Beyond this many bandwidths a kernel's CDF is exactly 0 or 1 in f64.
const KERNEL_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    #[default]
    Line,
    /// Angles in degrees with period 360.
    Circle360,
}

/// A fitted, immutable kernel density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    samples: Vec<f64>,
    bandwidth: f64,
    topology: Topology,
    /// Number of kernel images on each side for [`Topology::Circle360`].
    images: i32,
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// `Phi(b) - Phi(a)` for `a <= b`, computed on the tail side that keeps
/// precision.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= KERNEL_CUTOFF || b <= -KERNEL_CUTOFF {
        return 0.0;
    }
    if a > 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

impl DensityEstimate {
    pub fn fit(samples: &[f64], bandwidth: f64, topology: Topology) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::NonpositiveBandwidth(bandwidth));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("density samples"));
        }
        let (samples, images) = match topology {
            Topology::Line => (samples.to_vec(), 0),
            Topology::Circle360 => {
                let images = 1 + (KERNEL_CUTOFF * bandwidth / 360.0).ceil() as i32;
                (samples.iter().map(|&x| wrap_360(x)).collect(), images)
            }
        };
        Ok(Self {
            samples,
            bandwidth,
            topology,
            images,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    fn image_offsets(&self) -> impl Iterator<Item = f64> {
        (-self.images..=self.images).map(|m| 360.0 * m as f64)
    }

    /// Density at `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let kernel = |d: f64| {
            let z = d / h;
            if z.abs() > KERNEL_CUTOFF {
                0.0
            } else {
                (-0.5 * z * z).exp()
            }
        };
        let sum: f64 = match self.topology {
            Topology::Line => self.samples.iter().map(|&xi| kernel(x - xi)).sum(),
            Topology::Circle360 => {
                let x = wrap_360(x);
                self.samples
                    .iter()
                    .map(|&xi| self.image_offsets().map(|o| kernel(x - xi + o)).sum::<f64>())
                    .sum()
            }
        };
        sum * FRAC_1_SQRT_2PI / (h * self.samples.len() as f64)
    }

    /// Probability mass on `[lo, hi]`.
    ///
    /// On the line `lo <= hi` is required and infinite limits are allowed. On
    /// the circle the arc runs clockwise from `lo` to `hi`; `lo > hi` is the arc
    /// through 0° and a span of 360° or more is the whole circle.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::NonFinite("integration limits"));
        }
        let h = self.bandwidth;
        let n = self.samples.len() as f64;
        let mass = match self.topology {
            Topology::Line => {
                if lo > hi {
                    return Err(Error::InvalidParameter(format!("lo {lo} > hi {hi}")));
                }
                self.samples
                    .iter()
                    .map(|&xi| normal_mass((lo - xi) / h, (hi - xi) / h))
                    .sum::<f64>()
            }
            Topology::Circle360 => {
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(Error::NonFinite("circular arc limits"));
                }
                let span = if hi >= lo { hi - lo } else { hi - lo + 360.0 };
                if span >= 360.0 {
                    return Ok(1.0);
                }
                let a = wrap_360(lo);
                let b = a + span;
                self.samples
                    .iter()
                    .map(|&xi| {
                        self.image_offsets()
                            .map(|o| normal_mass((a - xi + o) / h, (b - xi + o) / h))
                            .sum::<f64>()
                    })
                    .sum::<f64>()
            }
        };
        Ok((mass / n).clamp(0.0, 1.0))
    }

    /// Writes `(x, f_hat)` rows on `points` evenly spaced nodes of `[lo, hi]`.
    pub fn write_csv<W: Write>(&self, out: &mut W, lo: f64, hi: f64, points: usize) -> io::Result<()> {
        writeln!(out, "x,f_hat")?;
        let points = points.max(2);
        for i in 0..points {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            writeln!(out, "{},{}", x, self.evaluate(x))?;
        }
        Ok(())
    }
}

/// Circular mean of angles in degrees, in `[0, 360)`.
pub fn circular_mean(angles: &[f64]) -> f64 {
    let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), a| {
        let (sa, ca) = a.to_radians().sin_cos();
        (s + sa, c + ca)
    });
    wrap_360(s.atan2(c).to_degrees())
}

/// Re-expresses angles in the half-open window `[m - 180, m + 180)` around
/// their circular mean `m`, so linear statistics see one cluster.
pub fn unwrap_around_mean(angles: &[f64]) -> Vec<f64> {
    let m = circular_mean(angles);
    angles.iter().map(|&a| m + wrap_360(a - m + 180.0) - 180.0).collect()
}

/// Selects a bandwidth and fits. Angles on the circle are unwrapped around
/// their circular mean for bandwidth selection, so a cluster straddling
/// 0/360 is not mistaken for two modes.
pub fn fit_with_selector(
    samples: &[f64],
    topology: Topology,
    selector: BandwidthSelector,
    exec: Exec,
) -> Result<(DensityEstimate, SelectedBandwidth)> {
    let h = match topology {
        Topology::Line => select_bandwidth(samples, selector, exec)?,
        Topology::Circle360 => select_bandwidth(&unwrap_around_mean(samples), selector, exec)?,
    };
    Ok((DensityEstimate::fit(samples, h.h, topology)?, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, StandardNormal};

    fn normals(n: usize, mu: f64, sd: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Normal::new(mu, sd).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    // Double-loop reference with explicit image sums.
    fn brute_density(samples: &[f64], h: f64, x: f64, circle: bool) -> f64 {
        let mut s = 0.0;
        for &xi in samples {
            let shifts: &[f64] = if circle {
                &[-720.0, -360.0, 0.0, 360.0, 720.0]
            } else {
                &[0.0]
            };
            for &o in shifts {
                let xi = if circle { wrap_360(xi) } else { xi };
                let z = (if circle { wrap_360(x) } else { x } - xi + o) / h;
                s += (-0.5 * z * z).exp() / (h * (2.0 * std::f64::consts::PI).sqrt());
            }
        }
        s / samples.len() as f64
    }

    fn trapezoid(d: &DensityEstimate, lo: f64, hi: f64, nodes: usize) -> f64 {
        let step = (hi - lo) / (nodes - 1) as f64;
        let mut s = 0.0;
        for i in 0..nodes {
            let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
            s += w * d.evaluate(lo + step * i as f64);
        }
        s * step
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            DensityEstimate::fit(&[5.0], 1.0, Topology::Line),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            DensityEstimate::fit(&[1.0, 2.0], 0.0, Topology::Line),
            Err(Error::NonpositiveBandwidth(_))
        ));
    }

    #[test]
    fn point_mass_peak() {
        let d = DensityEstimate::fit(&[0.0; 100], 1.0, Topology::Line).unwrap();
        assert!((d.evaluate(0.0) - FRAC_1_SQRT_2PI).abs() < 1e-15);
        assert!((d.evaluate(0.0) - 0.3989).abs() < 1e-4);
    }

    #[test]
    fn far_tail_vanishes() {
        let s = normals(200, 0.0, 1.0, 1);
        let d = DensityEstimate::fit(&s, 0.3, Topology::Line).unwrap();
        let max = s.iter().cloned().fold(f64::MIN, f64::max);
        assert!(d.evaluate(max + 100.0 * 0.3) < 1e-30);
    }

    #[test]
    fn symmetric_data() {
        let d = DensityEstimate::fit(&[-2.0, 2.0], 0.7, Topology::Line).unwrap();
        for x in [0.1, 0.5, 1.3, 3.0] {
            assert!((d.evaluate(x) - d.evaluate(-x)).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_brute_force() {
        let s = normals(300, 10.0, 4.0, 2);
        let d = DensityEstimate::fit(&s, 1.1, Topology::Line).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let z: f64 = StandardNormal.sample(&mut rng);
            let x = 10.0 + 8.0 * z;
            assert!((d.evaluate(x) - brute_density(&s, 1.1, x, false)).abs() < 1e-12);
        }
        let s: Vec<f64> = normals(300, 0.0, 20.0, 3).into_iter().map(wrap_360).collect();
        let d = DensityEstimate::fit(&s, 7.0, Topology::Circle360).unwrap();
        for i in 0..100 {
            let x = i as f64 * 3.6;
            assert!((d.evaluate(x) - brute_density(&s, 7.0, x, true)).abs() < 1e-12);
        }
    }

    #[test]
    fn wrapped_cluster() {
        let s: Vec<f64> = (0..50).flat_map(|_| [359.5, 0.5]).collect();
        let d = DensityEstimate::fit(&s, 1.0, Topology::Circle360).unwrap();
        assert!(d.evaluate(0.0) > d.evaluate(180.0));
        // oracle: the two clusters sit symmetrically 0.5° either side of 0
        let expected = FRAC_1_SQRT_2PI * (-0.5f64 * 0.25).exp();
        assert!((d.evaluate(0.0) - expected).abs() < 1e-12);
        // each cluster loses only its tails beyond 4.5 and 5.5 bandwidths
        let ho = d.integrate(355.0, 5.0).unwrap();
        let expected = normal_cdf(4.5) - normal_cdf(-5.5);
        assert!((ho - expected).abs() < 1e-12, "{ho}");
        let line = DensityEstimate::fit(&s, 1.0, Topology::Line).unwrap();
        let leak = line.integrate(0.0, 5.0).unwrap() + line.integrate(355.0, 360.0).unwrap();
        assert!(leak < 0.75);
    }

    #[test]
    fn normalization_and_half_mass() {
        let s = normals(1000, 3.0, 2.0, 4);
        let d = DensityEstimate::fit(&s, 0.4, Topology::Line).unwrap();
        assert!((d.integrate(f64::NEG_INFINITY, f64::INFINITY).unwrap() - 1.0).abs() < 1e-9);
        let d = DensityEstimate::fit(&[5.0, 5.0], 1.0, Topology::Line).unwrap();
        assert!((d.integrate(5.0, f64::INFINITY).unwrap() - 0.5).abs() < 1e-15);
        assert!(d.integrate(6.0, 5.0).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let s = normals(500, 50.0, 10.0, 5);
        let d = DensityEstimate::fit(&s, 2.0, Topology::Line).unwrap();
        for (lo, hi) in [(30.0, 55.0), (0.0, 150.0), (49.0, 51.0)] {
            let exact = d.integrate(lo, hi).unwrap();
            assert!((exact - trapezoid(&d, lo, hi, 10_000)).abs() < 1e-4);
        }
        let s: Vec<f64> = normals(500, 2.0, 6.0, 6).into_iter().map(wrap_360).collect();
        let d = DensityEstimate::fit(&s, 1.5, Topology::Circle360).unwrap();
        assert!((d.integrate(0.0, 360.0).unwrap() - trapezoid(&d, 0.0, 360.0, 10_000)).abs() < 1e-4);
        assert!((d.integrate(0.0, 5.0).unwrap() - trapezoid(&d, 0.0, 5.0, 10_000)).abs() < 1e-4);
    }

    #[test]
    fn arc_and_complement() {
        let s: Vec<f64> = normals(400, 350.0, 15.0, 7).into_iter().map(wrap_360).collect();
        let d = DensityEstimate::fit(&s, 4.0, Topology::Circle360).unwrap();
        for (a, b) in [(5.0, 112.5), (355.0, 5.0), (247.5, 355.0), (10.0, 10.5)] {
            let arc = d.integrate(a, b).unwrap();
            let rest = d.integrate(b, a).unwrap();
            assert!((arc + rest - 1.0).abs() < 1e-9, "{a}-{b}: {arc} + {rest}");
        }
        // the four colregs sectors partition the circle
        let total: f64 = [(355.0, 5.0), (5.0, 112.5), (112.5, 247.5), (247.5, 355.0)]
            .iter()
            .map(|&(a, b)| d.integrate(a, b).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unwrap_keeps_cluster_together() {
        let a = [359.0, 1.0, 358.0, 2.0];
        let u = unwrap_around_mean(&a);
        let spread = u.iter().cloned().fold(f64::MIN, f64::max) - u.iter().cloned().fold(f64::MAX, f64::min);
        assert!((spread - 4.0).abs() < 1e-9);
        assert!(circular_mean(&a) < 1e-9 || circular_mean(&a) > 360.0 - 1e-9);
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let d = DensityEstimate::fit(&[0.0, 1.0], 1.0, Topology::Line).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf, -1.0, 2.0, 4).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,f_hat");
        assert_eq!(lines.len(), 5);
        assert!(!text.contains('\r'));
    }
}
