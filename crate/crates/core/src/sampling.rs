//! Gaussian perturbation of vessel states.
//!
//! Every draw comes from its own counter-derived ChaCha8 substream keyed by
//! `(seed, stream, index)`, so a batch is bit-identical whether it is produced
//! serially, in parallel, or piecewise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kinematics::{wrap_360, VesselState};

/// Words of ChaCha output reserved per sample index. Four normals need a
/// handful of words; the ziggurat rejection path never comes close to this.
const WORDS_PER_SAMPLE: u128 = 1 << 16;

/// How the configured diagonal entries are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpretation {
    /// Entries are standard deviations.
    #[default]
    StdDev,
    /// Entries are variances.
    Variance,
}

/// What to do with a sampled speed below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpeedPolicy {
    /// Keep the Gaussian draw as is; a negative speed reverses the velocity
    /// while the course (and hence every bearing test) stays as drawn.
    #[default]
    Signed,
    /// Clamp at zero.
    ClampZero,
}

/// Per-component standard deviations of the state estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateUncertainty {
    pub sigma_north: f64,
    pub sigma_east: f64,
    /// Degrees.
    pub sigma_course: f64,
    pub sigma_speed: f64,
}

impl StateUncertainty {
    pub const ZERO: StateUncertainty = StateUncertainty {
        sigma_north: 0.0,
        sigma_east: 0.0,
        sigma_course: 0.0,
        sigma_speed: 0.0,
    };

    pub fn new(sigma_north: f64, sigma_east: f64, sigma_course: f64, sigma_speed: f64) -> Result<Self> {
        let u = Self {
            sigma_north,
            sigma_east,
            sigma_course,
            sigma_speed,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.sigma_north, "sigma_north"),
            (self.sigma_east, "sigma_east"),
            (self.sigma_course, "sigma_course"),
            (self.sigma_speed, "sigma_speed"),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
            if v < 0.0 {
                return Err(Error::NegativeInput(name));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }
}

/// Scales a `[north, east, course, speed]` diagonal by `alpha` and converts
/// it to standard deviations.
pub fn make_uncertainty(diag: [f64; 4], alpha: f64, interpretation: Interpretation) -> Result<StateUncertainty> {
    if !(alpha >= 0.0) {
        return Err(Error::NegativeInput("alpha"));
    }
    if diag.iter().any(|d| !(*d >= 0.0)) {
        return Err(Error::NegativeInput("diag"));
    }
    let s = diag.map(|d| match interpretation {
        Interpretation::StdDev => alpha * d,
        Interpretation::Variance => (alpha * d).sqrt(),
    });
    StateUncertainty::new(s[0], s[1], s[2], s[3])
}

/// Identifies a random substream: a user seed plus a stream id (one per
/// vessel in a pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub stream: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    fn rng_for(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(index as u128 * WORDS_PER_SAMPLE);
        rng
    }
}

/// A nominal state together with its error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturber {
    pub mean: VesselState,
    pub uncertainty: StateUncertainty,
    pub speed_policy: SpeedPolicy,
}

impl Perturber {
    pub fn new(mean: VesselState, uncertainty: StateUncertainty) -> Self {
        Self {
            mean,
            uncertainty,
            speed_policy: SpeedPolicy::default(),
        }
    }

    pub fn with_speed_policy(mut self, policy: SpeedPolicy) -> Self {
        self.speed_policy = policy;
        self
    }

    /// The `index`-th draw of `key`'s substream.
    pub fn sample(&self, key: StreamKey, index: usize) -> VesselState {
        if self.uncertainty.is_zero() {
            return self.mean;
        }
        let mut rng = key.rng_for(index);
        let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
        let u = &self.uncertainty;
        let north = self.mean.north + u.sigma_north * z();
        let east = self.mean.east + u.sigma_east * z();
        let course = wrap_360(self.mean.course + u.sigma_course * z());
        let mut speed = self.mean.speed + u.sigma_speed * z();
        if self.speed_policy == SpeedPolicy::ClampZero {
            speed = speed.max(0.0);
        }
        VesselState {
            north,
            east,
            course,
            speed,
        }
    }

    pub fn draw(&self, n: usize, key: StreamKey, exec: Exec) -> Result<Vec<VesselState>> {
        if n == 0 {
            return Err(Error::InvalidCount(0));
        }
        self.uncertainty.validate()?;
        Ok(exec.map_indexed(n, |i| self.sample(key, i)))
    }
}

/// `n` independent draws around `mean` on stream 0 of `stream_seed`, with
/// the default speed policy.
pub fn draw(mean: &VesselState, unc: &StateUncertainty, n: usize, stream_seed: u64) -> Result<Vec<VesselState>> {
    Perturber::new(*mean, *unc).draw(n, StreamKey::new(stream_seed, 0), Exec::default())
}

/// Paired draws for two vessels; vessel `j` uses stream 0 and `k` stream 1
/// of the same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub states_j: Vec<VesselState>,
    pub states_k: Vec<VesselState>,
    pub seed: u64,
    pub n: usize,
}

impl SampleBatch {
    pub fn draw(j: &Perturber, k: &Perturber, n: usize, seed: u64, exec: Exec) -> Result<Self> {
        let states_j = j.draw(n, StreamKey::new(seed, 0), exec)?;
        let states_k = k.draw(n, StreamKey::new(seed, 1), exec)?;
        Ok(Self {
            states_j,
            states_k,
            seed,
            n,
        })
    }
}
