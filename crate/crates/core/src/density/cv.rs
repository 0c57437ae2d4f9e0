//! Likelihood cross-validation over a bandwidth grid.
//!
//! Held-out densities are computed on a fine binned grid: training points are
//! linearly binned, convolved with the Gaussian kernel in the Fourier domain and
//! interpolated back at the held-out points. With the bin width at most an
//! eighth of the smallest candidate bandwidth the binning error is far below
//! the differences between neighbouring grid scores.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::exec::Exec;

const MAX_BINS: usize = 1 << 21;
const DENSITY_FLOOR: f64 = 1e-300;

/// Candidate bandwidths `lo, lo + step, ..., <= hi` scored by `folds`-fold
/// cross-validated log-likelihood. `seed` fixes the fold assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub folds: usize,
    pub seed: u64,
}

impl Default for GridSearch {
    fn default() -> Self {
        Self {
            lo: 0.05,
            hi: 12.0,
            step: 0.05,
            folds: 5,
            seed: 0,
        }
    }
}

impl GridSearch {
    pub fn new(lo: f64, hi: f64, step: f64, folds: usize) -> Result<Self> {
        let g = Self {
            lo,
            hi,
            step,
            folds,
            seed: 0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid lower bound {} must be positive",
                self.lo
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid step {} must be positive",
                self.step
            )));
        }
        if self.folds < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 folds, got {}",
                self.folds
            )));
        }
        if !(self.hi >= self.lo) {
            return Err(Error::EmptyGrid);
        }
        Ok(())
    }

    /// The candidate bandwidths in increasing order.
    pub fn candidates(&self) -> Result<Vec<f64>> {
        self.validate()?;
        // small slack so that `hi` itself survives rounding in `lo + i*step`
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.lo + i as f64 * self.step).collect())
    }
}

/// Random partition of `0..n` into `folds` nearly equal parts.
pub(crate) fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / folds, n % folds);
    let mut parts = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        parts.push(idx[start..start + len].to_vec());
        start += len;
    }
    parts
}

struct Fold {
    /// Transform of the binned training density.
    spectrum: Vec<Complex<f64>>,
    /// Bin index and interpolation weight of each held-out point.
    held_out: Vec<(usize, f64)>,
}

struct BinnedGrid {
    lo: f64,
    width: f64,
    bins: usize,
}

impl BinnedGrid {
    fn locate(&self, x: f64) -> (usize, f64) {
        let pos = (x - self.lo) / self.width;
        let i = (pos.floor() as usize).min(self.bins - 2);
        (i, pos - i as f64)
    }

    fn frequency(&self, k: usize) -> f64 {
        let k = if k <= self.bins / 2 {
            k as f64
        } else {
            k as f64 - self.bins as f64
        };
        k / (self.bins as f64 * self.width)
    }
}

/// Sum over folds of held-out log-likelihood for every candidate, divided by
/// the sample count.
pub fn grid_cv_scores(samples: &[f64], grid: &GridSearch, exec: Exec) -> Result<Vec<(f64, f64)>> {
    let hs = grid.candidates()?;
    if samples.len() < grid.folds {
        return Err(Error::TooFewSamples {
            needed: grid.folds,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("bandwidth samples"));
    }
    let h_min = hs[0];
    let h_max = hs[hs.len() - 1];
    let (min, max) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    // padding keeps the circular convolution from wrapping kernel mass
    let lo = min - 10.0 * h_max;
    let span = (max + 10.0 * h_max) - lo;
    let bins = ((span / (h_min / 8.0)).log2().ceil().max(4.0) as u32).min(MAX_BINS.trailing_zeros());
    let bins = 1usize << bins;
    let grid_pts = BinnedGrid {
        lo,
        width: span / bins as f64,
        bins,
    };

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(bins);
    let inverse = planner.plan_fft_inverse(bins);

    let parts = fold_assignment(samples.len(), grid.folds, grid.seed);
    let mut held = vec![false; samples.len()];
    let folds: Vec<Fold> = parts
        .iter()
        .map(|part| {
            part.iter().for_each(|&i| held[i] = true);
            let n_train = samples.len() - part.len();
            let mut buf = vec![Complex::new(0.0, 0.0); bins];
            for (x, _) in samples.iter().zip(&held).filter(|(_, &h)| !h) {
                let (i, w) = grid_pts.locate(*x);
                buf[i].re += 1.0 - w;
                buf[i + 1].re += w;
            }
            forward.process(&mut buf);
            let norm = 1.0 / (bins as f64 * grid_pts.width * n_train as f64);
            buf.iter_mut().for_each(|c| *c *= norm);
            part.iter().for_each(|&i| held[i] = false);
            Fold {
                spectrum: buf,
                held_out: part.iter().map(|&i| grid_pts.locate(samples[i])).collect(),
            }
        })
        .collect();

    let n = samples.len() as f64;
    let score = |h: &f64| -> f64 {
        let mut total = 0.0;
        for fold in &folds {
            let f = smoothed(&fold.spectrum, *h, &grid_pts, &inverse);
            total += fold
                .held_out
                .iter()
                .map(|&(i, w)| (f[i] * (1.0 - w) + f[i + 1] * w).max(DENSITY_FLOOR).ln())
                .sum::<f64>();
        }
        total / n
    };
    let scores = exec.map_slice(&hs, score);
    Ok(hs.into_iter().zip(scores).collect())
}

fn smoothed(spectrum: &[Complex<f64>], h: f64, grid: &BinnedGrid, inverse: &Arc<dyn Fft<f64>>) -> Vec<f64> {
    let c = -2.0 * PI * PI * h * h;
    let mut buf: Vec<Complex<f64>> = spectrum
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let f = grid.frequency(k);
            s * (c * f * f).exp()
        })
        .collect();
    inverse.process(&mut buf);
    buf.into_iter().map(|v| v.re).collect()
}

/// Bandwidth with the best cross-validated score; ties go to the smaller one.
pub fn grid_cv(samples: &[f64], grid: &GridSearch, exec: Exec) -> Result<f64> {
    let scores = grid_cv_scores(samples, grid, exec)?;
    let mut best = scores[0];
    for &(h, s) in &scores[1..] {
        if s > best.1 {
            best = (h, s);
        }
    }
    Ok(best.0)
}
