//! Desk-scale simulator for a cascade cipher: a keyed stream cipher whose
//! ciphertext is physically randomized so that an eavesdropper's observation
//! is noisier than the legitimate receiver's.
//!
//! The crate splits into four layers:
//!
//! - [`cipher`]: the mathematical encryption box (LFSR keystreams, one-time
//!   pad mode, XOR encryption);
//! - [`metrics`]: exact enumeration-based guessing-probability metrics,
//!   perfect-secrecy verification and the QKD key-guessing bound;
//! - [`channel`]: quantum-illumination error-probability formulas, the
//!   eavesdropper/legitimate error-ratio optimization, and Monte Carlo
//!   binary-symmetric-channel transmission;
//! - [`protocol`]: end-to-end sessions and the brute-force attack harness
//!   that measures the guessing-probability gap between the two receivers.
//!
//! All stochastic operations take explicit seeded random sources; identical
//! seeds give bit-identical results.

pub mod bits;
pub mod channel;
pub mod cipher;
pub mod error;
pub mod metrics;
pub mod protocol;

pub use bits::BitSequence;
pub use channel::{
    alice_error_probability, error_ratio, eve_error_probability, optimize_eta, sweep_eta,
    transmit_bsc, ChannelObservation, EtaReport, ParamRange, QiGrid, QiParams, Receiver,
};
pub use cipher::{
    decrypt, encrypt, expand_keystream, generate_key, KeyPrior, KeystreamMode, KeystreamSpec,
    SecretKey,
};
pub use error::{Error, Result};
pub use metrics::{
    average_guessing_probability, guess_from_posterior, posterior_over_keys,
    posterior_over_messages, qkd_guessing_bound, verify_perfect_secrecy, GuessReport, MessagePrior,
    PosteriorTable, SecrecyReport,
};
pub use protocol::{
    advantage_holds, brute_force_attack, measure_advantage, run_session, run_session_trial,
    AdvantageReport, AttackReport, ChannelModel, SessionConfig, SessionTranscript, TrialRecord,
};
