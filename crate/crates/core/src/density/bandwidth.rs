//! Bandwidth selectors: Silverman's rule of thumb and the Improved
//! Sheather-Jones plug-in.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::cv::{grid_cv, GridSearch};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Number of histogram bins for ISJ.
pub const ISJ_GRID_SIZE: usize = 1 << 14;
pub const ISJ_MIN_SAMPLES: usize = 50;
/// Order of the functional the fixed-point recursion starts from.
const ISJ_STAGES: i32 = 7;
const ROOT_TOL: f64 = 1e-12;

fn sample_std(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Linear-interpolated quantile of sorted data (type 7).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Silverman's rule: `0.9 min(sd, IQR/1.34) n^(-1/5)`.
///
/// Falls back to the standard deviation alone when the IQR is zero.
pub fn silverman(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("bandwidth samples"));
    }
    let sd = sample_std(samples);
    if !(sd > 0.0) {
        return Err(Error::ZeroDispersion);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (samples.len() as f64).powf(-0.2))
}

/// DCT-II scaled as `a_k = 2 sum_j x_j cos(pi k (2j + 1) / 2n)`, via one
/// complex FFT of the even/odd reordered input.
pub(crate) fn dct2(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|i| {
            let src = if i < n.div_ceil(2) { 2 * i } else { 2 * (n - i) - 1 };
            Complex::new(x[src], 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter()
        .enumerate()
        .map(|(k, v)| {
            let w = Complex::from_polar(2.0, -PI * k as f64 / (2.0 * n as f64));
            (w * v).re
        })
        .collect()
}

/// Precomputed spectral data for the ISJ fixed-point equation.
struct IsjSpectrum {
    /// `k^2` for k = 1..n-1.
    k_sq: Vec<f64>,
    /// `(a_k / 2)^2`.
    a_sq: Vec<f64>,
    n_samples: f64,
}

impl IsjSpectrum {
    /// `2 pi^(2s) sum k^(2s) (a_k/2)^2 exp(-k^2 pi^2 t)`: the estimate of the
    /// squared norm of the s-th density derivative at smoothing time `t`.
    fn functional(&self, s: i32, t: f64) -> f64 {
        let sum: f64 = self
            .k_sq
            .iter()
            .zip(&self.a_sq)
            .map(|(&i, &a)| i.powi(s) * a * (-i * PI * PI * t).exp())
            .sum();
        2.0 * PI.powi(2 * s) * sum
    }

    /// `t - xi gamma^[l](t)`; its root is the squared bandwidth in units of
    /// the data range.
    fn fixed_point(&self, t: f64) -> f64 {
        let n = self.n_samples;
        let mut f = self.functional(ISJ_STAGES, t);
        for s in (2..ISJ_STAGES).rev() {
            let k0 = (1..=2 * s - 1).step_by(2).map(f64::from).product::<f64>() / (2.0 * PI).sqrt();
            let c = (1.0 + 0.5f64.powf(s as f64 + 0.5)) / 3.0;
            let time = (2.0 * c * k0 / (n * f)).powf(2.0 / (3.0 + 2.0 * s as f64));
            f = self.functional(s, time);
        }
        t - (2.0 * n * PI.sqrt() * f).powf(-0.4)
    }
}

/// Brent's method on a bracket with `f(a) < 0 < f(b)` (or opposite signs).
fn brent_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, tol: f64) -> Option<f64> {
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return None;
        }
    }
    None
}

/// Improved Sheather-Jones plug-in bandwidth.
///
/// The data are binned on a `2^14` grid spanning `[min - 3 h0, max + 3 h0]`
/// (h0 is the Silverman pilot), the histogram is cosine-transformed, and the
/// fixed point `t = xi gamma^[7](t)` is solved by bracketed root finding.
/// The bandwidth is `sqrt(t)` times the grid span.
pub fn isj(samples: &[f64]) -> Result<f64> {
    if samples.len() < ISJ_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: ISJ_MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let pilot = silverman(samples)?;
    let (min, max) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    let lo = min - 3.0 * pilot;
    let range = (max + 3.0 * pilot) - lo;

    let m = ISJ_GRID_SIZE;
    let dx = range / m as f64;
    let mut hist = vec![0.0; m];
    for &x in samples {
        let i = (((x - lo) / dx) as usize).min(m - 1);
        hist[i] += 1.0;
    }
    let total = samples.len() as f64;
    hist.iter_mut().for_each(|c| *c /= total);

    let a = dct2(&hist);
    let spectrum = IsjSpectrum {
        k_sq: (1..m).map(|k| (k * k) as f64).collect(),
        a_sq: a[1..].iter().map(|v| (v / 2.0).powi(2)).collect(),
        n_samples: total,
    };
    let f = |t: f64| spectrum.fixed_point(t);

    // initial bracket as in the reference implementation, widened until the
    // fixed-point residual changes sign
    let n_clamped = total.clamp(50.0, 1050.0);
    let mut upper = 1e-12 + 0.01 * (n_clamped - 50.0) / 1000.0;
    let f0 = f(0.0);
    if !(f0 < 0.0) {
        return Err(Error::FixedPointFailure);
    }
    loop {
        let fu = f(upper);
        if fu.is_finite() && fu > 0.0 {
            let t = brent_root(f, 0.0, upper, f0, fu, ROOT_TOL).ok_or(Error::FixedPointFailure)?;
            if !(t > 0.0) {
                return Err(Error::FixedPointFailure);
            }
            return Ok(t.sqrt() * range);
        }
        if upper >= 0.1 {
            return Err(Error::FixedPointFailure);
        }
        upper = (upper * 2.0).min(0.1);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BandwidthSelector {
    Silverman,
    #[default]
    Isj,
    Grid(GridSearch),
}

/// Which selector produced a bandwidth, after fallbacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedBandwidth {
    pub h: f64,
    pub selector: BandwidthSelector,
    /// The requested selector failed and Silverman was used instead.
    pub fell_back: bool,
    /// Zero-dispersion data, fitted as a near point mass.
    pub degenerate: bool,
}

/// Runs `selector`, falling back to Silverman if ISJ fails and to a near
/// point-mass bandwidth for zero-dispersion data.
pub fn select_bandwidth(samples: &[f64], selector: BandwidthSelector, exec: Exec) -> Result<SelectedBandwidth> {
    let attempt = match selector {
        BandwidthSelector::Silverman => silverman(samples),
        BandwidthSelector::Isj => isj(samples),
        BandwidthSelector::Grid(g) => grid_cv(samples, &g, exec),
    };
    let ok = |h, selector, fell_back| SelectedBandwidth {
        h,
        selector,
        fell_back,
        degenerate: false,
    };
    match attempt {
        Ok(h) => Ok(ok(h, selector, false)),
        Err(Error::ZeroDispersion) => {
            let scale = samples.first().map_or(1.0, |x| x.abs().max(1.0));
            Ok(SelectedBandwidth {
                h: 1e-9 * scale,
                selector,
                fell_back: false,
                degenerate: true,
            })
        }
        Err(e @ (Error::FixedPointFailure | Error::TooFewSamples { .. }))
            if selector != BandwidthSelector::Silverman =>
        {
            log::warn!("{e}; falling back to Silverman's rule");
            silverman(samples).map(|h| ok(h, BandwidthSelector::Silverman, true))
        }
        Err(e) => Err(e),
    }
}

/// All three bandwidths for one data set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthReport {
    pub h_silverman: f64,
    pub h_isj: Option<f64>,
    pub h_grid: Option<f64>,
    pub selected: f64,
}

impl BandwidthReport {
    pub fn compute(
        samples: &[f64],
        grid: Option<&GridSearch>,
        selector: BandwidthSelector,
        exec: Exec,
    ) -> Result<Self> {
        let h_silverman = silverman(samples)?;
        let h_isj = isj(samples).ok();
        let h_grid = match (grid, selector) {
            (_, BandwidthSelector::Grid(g)) => Some(grid_cv(samples, &g, exec)?),
            (Some(g), _) => Some(grid_cv(samples, g, exec)?),
            (None, _) => None,
        };
        let selected = match selector {
            BandwidthSelector::Silverman => h_silverman,
            BandwidthSelector::Isj => h_isj.unwrap_or(h_silverman),
            BandwidthSelector::Grid(_) => h_grid.unwrap_or(h_silverman),
        };
        Ok(Self {
            h_silverman,
            h_isj,
            h_grid,
            selected,
        })
    }
}
