//! Monte Carlo emulation of the two-receiver experiment.
//!
//! Every pulse carries one of the two signals; a copy goes to each
//! receiver. The homodyne receiver records a Gaussian quadrature sample and
//! the PNR receiver a (capped) Poisson photon count, both with the
//! imperfection models of [`crate::receivers`]. Trials are generated in
//! fixed-size shards, each with its own ChaCha stream derived from the run
//! seed, so serial and parallel generation produce identical records.

mod estimate;
mod records;

pub use estimate::{
    estimate_rates, inefficiency_correct, wilson_interval, EstimationContext, RateEstimate,
    Receiver, WILSON_Z_95,
};
pub use records::{read_records_csv, write_records_csv, CSV_HEADER};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::receivers::{
    homodyne_receiver, pnr_receiver, HomodyneReceiverConfig, PnrReceiverConfig,
};
use crate::signal::{DiscriminationResult, Hypothesis, SignalEnsemble};

/// Trials per RNG shard.
pub const SHARD_SIZE: u64 = 1 << 16;

/// A receiver verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Minus,
    Plus,
    Inconclusive,
}

impl Decision {
    pub fn from_guess(guess: Option<Hypothesis>) -> Self {
        match guess {
            Some(Hypothesis::Minus) => Decision::Minus,
            Some(Hypothesis::Plus) => Decision::Plus,
            None => Decision::Inconclusive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Minus => "minus",
            Decision::Plus => "plus",
            Decision::Inconclusive => "inconclusive",
        }
    }

    pub fn is_error(self, truth: Hypothesis) -> bool {
        matches!(
            (self, truth),
            (Decision::Minus, Hypothesis::Plus) | (Decision::Plus, Hypothesis::Minus)
        )
    }
}

/// Full description of an emulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: f64,
    #[serde(default = "half")]
    pub prior_minus: f64,
    #[serde(default = "default_homodyne")]
    pub homodyne: HomodyneReceiverConfig,
    #[serde(default = "default_pnr")]
    pub pnr: PnrReceiverConfig,
    #[serde(default = "default_trials")]
    pub n_trials: u64,
    #[serde(default)]
    pub rng_seed: u64,
}

fn half() -> f64 {
    0.5
}

fn default_homodyne() -> HomodyneReceiverConfig {
    HomodyneReceiverConfig::experimental(0.0)
}

fn default_pnr() -> PnrReceiverConfig {
    PnrReceiverConfig::experimental(1.0, 0)
}

fn default_trials() -> u64 {
    100_000
}

impl ExperimentConfig {
    /// Laboratory defaults: 85.8 % homodyne efficiency with electronic noise
    /// 23 dB below shot noise, 55 % PNR efficiency and a 1/700 extinction
    /// ratio.
    pub fn experimental(alpha: f64, threshold_b: f64, beta: f64, m: u32) -> Self {
        Self {
            alpha,
            prior_minus: 0.5,
            homodyne: HomodyneReceiverConfig::experimental(threshold_b),
            pnr: PnrReceiverConfig::experimental(beta, m),
            n_trials: default_trials(),
            rng_seed: 0,
        }
    }

    /// Noise-free receivers.
    pub fn ideal(alpha: f64, threshold_b: f64, beta: f64, m: u32) -> Self {
        Self {
            homodyne: HomodyneReceiverConfig::ideal(threshold_b),
            pnr: PnrReceiverConfig::ideal(beta, m),
            ..Self::experimental(alpha, threshold_b, beta, m)
        }
    }

    pub fn with_trials(self, n_trials: u64, rng_seed: u64) -> Self {
        Self {
            n_trials,
            rng_seed,
            ..self
        }
    }

    pub fn ensemble(&self) -> Result<SignalEnsemble> {
        SignalEnsemble::with_prior_minus(self.alpha, self.prior_minus)
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble()?;
        self.homodyne.validate()?;
        self.pnr.validate()?;
        if self.n_trials == 0 {
            return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Closed-form rates the emulation should reproduce.
    pub fn analytic_rates(&self) -> Result<(DiscriminationResult, DiscriminationResult)> {
        let ensemble = self.ensemble()?;
        Ok((
            homodyne_receiver(&ensemble, &self.homodyne)?,
            pnr_receiver(&ensemble, &self.pnr)?,
        ))
    }

    pub fn shard_count(&self) -> u64 {
        self.n_trials.div_ceil(SHARD_SIZE)
    }
}

/// One emulated pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub true_state: Hypothesis,
    pub x: f64,
    pub n: u32,
    pub hd_decision: Decision,
    pub pnr_decision: Decision,
}

impl TrialRecord {
    pub fn decision(&self, receiver: Receiver) -> Decision {
        match receiver {
            Receiver::Homodyne => self.hd_decision,
            Receiver::Pnr => self.pnr_decision,
        }
    }
}

/// Decision of the homodyne receiver for quadrature `x`.
pub fn homodyne_decision(x: f64, threshold_b: f64) -> Decision {
    if x >= threshold_b {
        Decision::Plus
    } else if x <= -threshold_b {
        Decision::Minus
    } else {
        Decision::Inconclusive
    }
}

/// Poisson draw by CDF inversion, capped at `cap`.
fn sample_capped_poisson<R: Rng>(rng: &mut R, mean: f64, cap: u32) -> u32 {
    let u: f64 = rng.random();
    let mut pmf = (-mean).exp();
    let mut cdf = pmf;
    let mut n = 0;
    while u >= cdf && n < cap {
        n += 1;
        pmf *= mean / f64::from(n);
        cdf += pmf;
    }
    n
}

struct Sampler {
    config: ExperimentConfig,
    quad: [Normal<f64>; 2],
    counts: [f64; 2],
}

impl Sampler {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let sd = config.homodyne.quadrature_sd();
        let normal = |h: Hypothesis| {
            Normal::new(config.homodyne.quadrature_mean(config.alpha, h), sd)
                .map_err(|e| Error::InvalidConfig(e.to_string()))
        };
        Ok(Self {
            config: *config,
            quad: [normal(Hypothesis::Minus)?, normal(Hypothesis::Plus)?],
            counts: [
                config.pnr.detected_mean(config.alpha, Hypothesis::Minus),
                config.pnr.detected_mean(config.alpha, Hypothesis::Plus),
            ],
        })
    }

    fn shard(&self, shard: u64) -> Vec<TrialRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.rng_seed);
        rng.set_stream(shard);
        let start = shard * SHARD_SIZE;
        let end = (start + SHARD_SIZE).min(self.config.n_trials);
        let povm = self.config.pnr.povm();
        (start..end)
            .map(|index| {
                let truth = if rng.random::<f64>() < self.config.prior_minus {
                    Hypothesis::Minus
                } else {
                    Hypothesis::Plus
                };
                let slot = usize::from(truth == Hypothesis::Plus);
                let x = self.quad[slot].sample(&mut rng);
                let n =
                    sample_capped_poisson(&mut rng, self.counts[slot], self.config.pnr.count_cap);
                TrialRecord {
                    index,
                    true_state: truth,
                    x,
                    n,
                    hd_decision: homodyne_decision(x, self.config.homodyne.threshold_b),
                    pnr_decision: Decision::from_guess(povm.decide(n)),
                }
            })
            .collect()
    }
}

/// Records of one shard; shard `k` covers trial indices
/// `k * SHARD_SIZE .. (k + 1) * SHARD_SIZE`.
pub fn simulate_shard(config: &ExperimentConfig, shard: u64) -> Result<Vec<TrialRecord>> {
    if shard >= config.shard_count() {
        return Err(Error::InvalidConfig(format!("shard {shard} out of range")));
    }
    Ok(Sampler::new(config)?.shard(shard))
}

/// Lazily generated record stream, shard by shard.
pub fn trials(config: &ExperimentConfig) -> Result<impl Iterator<Item = TrialRecord>> {
    let sampler = Sampler::new(config)?;
    Ok((0..config.shard_count()).flat_map(move |s| sampler.shard(s)))
}

/// All records, generated serially.
pub fn simulate(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    Ok(trials(config)?.collect())
}

/// All records, shards generated in parallel and concatenated in index
/// order.
pub fn simulate_parallel(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let sampler = Sampler::new(config)?;
    let shards: Vec<Vec<TrialRecord>> = (0..config.shard_count())
        .into_par_iter()
        .map(|s| sampler.shard(s))
        .collect();
    Ok(shards.into_iter().flatten().collect())
}
