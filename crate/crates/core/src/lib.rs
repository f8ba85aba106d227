//! Discrimination of the binary coherent-state alphabet `{|-a>, |+a>}`.
//!
//! Two receivers are modelled: a postselected homodyne receiver with a
//! symmetric inconclusive band and a displacement receiver with a
//! photon-number-resolving detector. Around them sit the quantum bounds
//! (Helstrom, unambiguous discrimination, the optimal intermediate
//! measurement), error/inconclusive tradeoff curves, a Monte Carlo emulator
//! of the two-receiver experiment and a key-rate model for binary
//! phase-shift-keyed QKD over a lossy channel.

pub mod bounds;
pub mod emulator;
mod error;
pub mod optimize;
pub mod qkd;
pub mod receivers;
pub mod signal;
pub mod special;
pub mod tradeoff;

pub use error::{Error, Result};
pub use receivers::{homodyne_receiver, pnr_receiver, HomodyneReceiverConfig, PnrReceiverConfig};
pub use signal::{DiscriminationResult, Hypothesis, OutcomeProbabilities, SignalEnsemble};
