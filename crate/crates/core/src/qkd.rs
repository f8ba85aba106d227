//! Secret key rate of binary coherent-state key distribution over a pure
//! loss channel with direct reconciliation, and its optimization over the
//! signal amplitude and receiver settings.
//!
//! Bob receives `|+-sqrt(eta) a>`; the eavesdropper holds the reflected
//! modes `|+-sqrt(1 - eta) a>`. The rate per channel pulse is
//! `G = (1 - p_inc) (I_B - I_E)` with `I_B = 1 - H(p_err)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_probability, Error, Result};
use crate::optimize::{golden_section, scan_then_refine};
use crate::receivers::{
    homodyne_receiver, pnr_receiver, HomodyneReceiverConfig, PnrReceiverConfig,
};
use crate::signal::{DiscriminationResult, SignalEnsemble};
use crate::special::binary_entropy_unchecked;

/// Lossy bosonic channel without excess noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    transmittance: f64,
}

impl ChannelModel {
    pub fn new(transmittance: f64) -> Result<Self> {
        check_probability("transmittance", transmittance)?;
        Ok(Self { transmittance })
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }
}

/// Holevo information of the eavesdropper's tapped states about Alice's bit
/// when `|-a>` has probability `prior_minus`.
pub fn eve_holevo_information(alpha: f64, transmittance: f64, prior_minus: f64) -> f64 {
    let overlap = (-2.0 * (1.0 - transmittance) * alpha * alpha).exp();
    let q = prior_minus.clamp(0.0, 1.0);
    let disc = (1.0 - 4.0 * q * (1.0 - q) * (1.0 - overlap * overlap)).max(0.0);
    binary_entropy_unchecked(0.5 * (1.0 - disc.sqrt()))
}

/// Holevo information of the tapped ensemble for equal priors,
/// `H((1 - exp(-2 (1 - eta) a^2)) / 2)`.
pub fn eve_information(alpha: f64, transmittance: f64) -> Result<f64> {
    check_non_negative("alpha", alpha)?;
    check_probability("transmittance", transmittance)?;
    Ok(eve_holevo_information(alpha, transmittance, 0.5))
}

/// How the eavesdropper's information is charged against the kept pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveModel {
    /// Holevo information of the tapped ensemble with the sender's priors,
    /// ignoring which pulses Bob keeps.
    #[default]
    Unconditioned,
    /// Holevo information of the tapped ensemble restricted to the pulses
    /// Bob keeps: the sender's priors are replaced by their posterior given
    /// that Bob's outcome was conclusive (announced publicly). Optimistic:
    /// it can exceed the repeaterless capacity of the channel.
    Postselected,
}

impl EveModel {
    pub fn as_str(self) -> &'static str {
        match self {
            EveModel::Unconditioned => "unconditioned",
            EveModel::Postselected => "postselected",
        }
    }
}

/// Receiver family taking part in the optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    Pnr,
    Homodyne,
}

impl ReceiverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReceiverKind::Pnr => "pnr",
            ReceiverKind::Homodyne => "homodyne",
        }
    }
}

/// A concrete ideal receiver setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReceiverSetting {
    Pnr { beta: f64, m: u32 },
    Homodyne { b: f64 },
}

impl ReceiverSetting {
    pub fn kind(&self) -> ReceiverKind {
        match self {
            ReceiverSetting::Pnr { .. } => ReceiverKind::Pnr,
            ReceiverSetting::Homodyne { .. } => ReceiverKind::Homodyne,
        }
    }

    fn rates(&self, received: &SignalEnsemble) -> Result<DiscriminationResult> {
        match *self {
            ReceiverSetting::Pnr { beta, m } => {
                pnr_receiver(received, &PnrReceiverConfig::ideal(beta, m))
            }
            ReceiverSetting::Homodyne { b } => {
                homodyne_receiver(received, &HomodyneReceiverConfig::ideal(b))
            }
        }
    }
}

/// Key rate and its ingredients for one parameter choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateEvaluation {
    /// Raw rate in bits per pulse; negative when no key can be distilled.
    pub g: f64,
    pub p_err: Option<f64>,
    pub p_inc: f64,
    pub i_b: f64,
    pub i_e: f64,
}

/// Key rate for amplitude `alpha`, an ideal receiver and channel
/// transmittance `eta`, with equal priors.
pub fn key_rate(
    alpha: f64,
    receiver: &ReceiverSetting,
    channel: &ChannelModel,
    eve: EveModel,
) -> Result<KeyRateEvaluation> {
    check_non_negative("alpha", alpha)?;
    let eta = channel.transmittance();
    let received = SignalEnsemble::symmetric(eta.sqrt() * alpha)?;
    let rates = receiver.rates(&received)?;
    let eve_prior = match eve {
        EveModel::Unconditioned => 0.5,
        EveModel::Postselected => rates.conclusive_prior_minus.unwrap_or(0.5),
    };
    let i_e = eve_holevo_information(alpha, eta, eve_prior);
    let (i_b, g) = match rates.p_err {
        Some(p_err) => {
            let i_b = 1.0 - binary_entropy_unchecked(p_err);
            (i_b, rates.p_conclusive * (i_b - i_e))
        }
        None => (0.0, 0.0),
    };
    Ok(KeyRateEvaluation {
        g,
        p_err: rates.p_err,
        p_inc: rates.p_inc,
        i_b,
        i_e,
    })
}

/// Optimized key rate at one transmittance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRatePoint {
    pub eta: f64,
    pub receiver: ReceiverKind,
    /// Raw optimized rate; may be non-positive.
    pub g: f64,
    pub alpha_opt: f64,
    /// Displacement for PNR, threshold `B` for homodyne.
    pub beta_opt: Option<f64>,
    pub threshold_opt: Option<f64>,
    pub m_opt: Option<u32>,
    pub p_err: Option<f64>,
    pub p_inc: f64,
    pub i_b: f64,
    pub i_e: f64,
}

impl KeyRatePoint {
    /// Rate clipped at zero, as reported in tables.
    pub fn g_clipped(&self) -> f64 {
        self.g.max(0.0)
    }

    /// Whether a positive key rate was found.
    pub fn is_positive(&self) -> bool {
        self.g > 0.0
    }
}

/// Search settings for [`optimize_key_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateOptions {
    pub m_cap: u32,
    pub eve: EveModel,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    /// Samples in each inner scan (displacement or threshold).
    pub inner_points: usize,
    pub refine_steps: usize,
}

impl Default for KeyRateOptions {
    fn default() -> Self {
        Self {
            m_cap: 10,
            eve: EveModel::default(),
            alpha_min: 0.05,
            alpha_max: 3.0,
            alpha_points: 60,
            inner_points: 120,
            refine_steps: 40,
        }
    }
}

/// Largest homodyne threshold considered.
const THRESHOLD_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    setting: ReceiverSetting,
    eval: KeyRateEvaluation,
}

fn best_setting(
    alpha: f64,
    kind: ReceiverKind,
    channel: &ChannelModel,
    options: &KeyRateOptions,
) -> Result<Candidate> {
    let evaluate = |setting: ReceiverSetting| key_rate(alpha, &setting, channel, options.eve);
    let neg_g = |setting: ReceiverSetting| evaluate(setting).map(|e| -e.g).unwrap_or(f64::INFINITY);
    let mut best: Option<Candidate> = None;
    let mut consider = |setting: ReceiverSetting| -> Result<()> {
        let eval = evaluate(setting)?;
        if best.is_none_or(|b| eval.g > b.eval.g) {
            best = Some(Candidate { setting, eval });
        }
        Ok(())
    };
    match kind {
        ReceiverKind::Pnr => {
            let beta_max = channel.transmittance().sqrt() * alpha + 5.0;
            for m in 0..=options.m_cap {
                let found = scan_then_refine(
                    |beta| neg_g(ReceiverSetting::Pnr { beta, m }),
                    0.0,
                    beta_max,
                    options.inner_points,
                    options.refine_steps,
                    1e-9,
                );
                consider(ReceiverSetting::Pnr { beta: found.x, m })?;
            }
        }
        ReceiverKind::Homodyne => {
            let found = scan_then_refine(
                |b| neg_g(ReceiverSetting::Homodyne { b }),
                0.0,
                THRESHOLD_MAX,
                options.inner_points * 2,
                options.refine_steps,
                1e-9,
            );
            consider(ReceiverSetting::Homodyne { b: found.x })?;
        }
    }
    best.ok_or_else(|| Error::Numerical("empty receiver search".into()))
}

/// Key rate maximized over the amplitude and the receiver settings.
///
/// The amplitude is scanned on a grid over `[alpha_min, alpha_max]` and the
/// best grid point refined by golden-section search; each amplitude
/// evaluation optimizes the displacement for every `m <= m_cap` (PNR) or the
/// threshold (homodyne). Deterministic; ties go to the smaller parameter.
pub fn optimize_key_rate(
    channel: &ChannelModel,
    kind: ReceiverKind,
    options: &KeyRateOptions,
) -> Result<KeyRatePoint> {
    if channel.transmittance() <= 0.0 {
        return Err(Error::Domain {
            name: "transmittance",
            value: channel.transmittance(),
            expected: "(0, 1]",
        });
    }
    if !(options.alpha_min >= 0.0 && options.alpha_max > options.alpha_min) {
        return Err(Error::InvalidConfig("empty amplitude range".into()));
    }
    let points = options.alpha_points.max(3);
    let step = (options.alpha_max - options.alpha_min) / (points - 1) as f64;
    let grid: Vec<(f64, Candidate)> = (0..points)
        .into_par_iter()
        .map(|i| {
            let alpha = options.alpha_min + step * i as f64;
            best_setting(alpha, kind, channel, options).map(|c| (alpha, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_i, _) = grid
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, (_, c))| {
            if c.eval.g > acc.1 {
                (i, c.eval.g)
            } else {
                acc
            }
        });
    let (mut alpha, mut cand) = grid[best_i];

    let lo = (alpha - step).max(options.alpha_min);
    let hi = (alpha + step).min(options.alpha_max);
    let refined = golden_section(
        |a| {
            best_setting(a, kind, channel, options)
                .map(|c| -c.eval.g)
                .unwrap_or(f64::INFINITY)
        },
        lo,
        hi,
        options.refine_steps,
        1e-7,
    );
    let refined_cand = best_setting(refined.x, kind, channel, options)?;
    if refined_cand.eval.g > cand.eval.g {
        alpha = refined.x;
        cand = refined_cand;
    }

    let (beta_opt, threshold_opt, m_opt) = match cand.setting {
        ReceiverSetting::Pnr { beta, m } => (Some(beta), None, Some(m)),
        ReceiverSetting::Homodyne { b } => (None, Some(b), None),
    };
    Ok(KeyRatePoint {
        eta: channel.transmittance(),
        receiver: kind,
        g: cand.eval.g,
        alpha_opt: alpha,
        beta_opt,
        threshold_opt,
        m_opt,
        p_err: cand.eval.p_err,
        p_inc: cand.eval.p_inc,
        i_b: cand.eval.i_b,
        i_e: cand.eval.i_e,
    })
}

/// [`optimize_key_rate`] over several transmittances, in input order.
pub fn key_rate_sweep(
    etas: &[f64],
    kind: ReceiverKind,
    options: &KeyRateOptions,
) -> Result<Vec<KeyRatePoint>> {
    etas.par_iter()
        .map(|&eta| optimize_key_rate(&ChannelModel::new(eta)?, kind, options))
        .collect()
}
