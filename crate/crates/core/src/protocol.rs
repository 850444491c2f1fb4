//! End-to-end cipher sessions over the asymmetric channel, plus the
//! brute-force attack harness that turns the channel error gap into measured
//! guessing probabilities.
//!
//! A session: sample a key, expand it to a keystream, encrypt a plaintext,
//! then deliver the ciphertext to the legitimate receiver and the
//! eavesdropper over binary symmetric channels with their respective
//! crossover probabilities. Every random draw comes from a stream derived
//! from `(master_seed, purpose, trial)` so runs are bit-reproducible and
//! trials are independent.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::bits::BitSequence;
use crate::channel::{
    alice_error_probability, error_ratio, eve_error_probability, transmit_bsc, ChannelObservation,
    QiParams, Receiver,
};
use crate::cipher::{encrypt, expand_keystream, generate_key, KeyPrior, KeystreamMode, KeystreamSpec, SecretKey};
use crate::error::{Error, Result};
use crate::metrics::{guess_from_posterior, posterior_over_keys, GuessReport, MAX_ENUM_KEY_BITS};

/// Seed-stream purposes; trial index is folded in separately.
mod purpose {
    pub const KEY: u64 = 0;
    pub const PLAINTEXT: u64 = 1;
    pub const ALICE_CHANNEL: u64 = 2;
    pub const EVE_CHANNEL: u64 = 3;
}

/// Derives an independent random stream from (master_seed, purpose, trial).
fn derive_rng(master_seed: u64, purpose: u64, trial: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&purpose.to_le_bytes());
    seed[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha12Rng::from_seed(seed)
}

/// How the two receivers' crossover probabilities are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelModel {
    /// Derived from the quantum-illumination closed forms.
    QuantumIllumination(QiParams),
    /// Directly specified crossover probabilities.
    Fixed { p_alice: f64, p_eve: f64 },
}

impl ChannelModel {
    pub fn crossover_probabilities(&self) -> Result<(f64, f64)> {
        match self {
            Self::QuantumIllumination(params) => Ok((
                alice_error_probability(params)?,
                eve_error_probability(params)?,
            )),
            Self::Fixed { p_alice, p_eve } => {
                for &p in [p_alice, p_eve] {
                    if !(0.0..=0.5).contains(&p) {
                        return Err(Error::Domain(format!("crossover probability {p} outside [0, 0.5]")));
                    }
                }
                Ok((*p_alice, *p_eve))
            }
        }
    }
}

/// Full description of one simulated session.
#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub key_bits: usize,
    pub keystream_spec: KeystreamSpec,
    pub channel: ChannelModel,
    pub plaintext_len: usize,
    pub known_plaintext_len: usize,
    pub master_seed: u64,
    /// When set, Alice's and Eve's flip streams share one seed; useful for
    /// paired-comparison variance reduction. Default is independent channels.
    pub paired_channel_seeds: bool,
    /// Fixed plaintext instead of a uniform draw.
    pub fixed_plaintext: Option<BitSequence>,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.key_bits == 0 || self.key_bits > MAX_ENUM_KEY_BITS {
            return Err(Error::Config(format!(
                "key_bits {} outside 1..={MAX_ENUM_KEY_BITS}",
                self.key_bits
            )));
        }
        if self.plaintext_len == 0 {
            return Err(Error::Config("plaintext_len must be at least 1".into()));
        }
        if self.known_plaintext_len > self.plaintext_len {
            return Err(Error::Config(format!(
                "known_plaintext_len {} exceeds plaintext_len {}",
                self.known_plaintext_len, self.plaintext_len
            )));
        }
        self.keystream_spec.validate_for(self.key_bits)?;
        if self.keystream_spec.output_len < self.plaintext_len {
            return Err(Error::Config(format!(
                "keystream of {} bits cannot cover a {}-bit plaintext",
                self.keystream_spec.output_len, self.plaintext_len
            )));
        }
        if let Some(m) = &self.fixed_plaintext {
            if m.len() != self.plaintext_len {
                return Err(Error::Config(format!(
                    "fixed plaintext of {} bits does not match plaintext_len {}",
                    m.len(),
                    self.plaintext_len
                )));
            }
        }
        if let ChannelModel::QuantumIllumination(params) = &self.channel {
            params.validate()?;
        }
        Ok(())
    }
}

/// Everything observable (and hidden) in one session.
#[derive(Clone, Debug, Serialize)]
pub struct SessionTranscript {
    pub true_key: SecretKey,
    pub plaintext: BitSequence,
    pub ciphertext: BitSequence,
    pub alice_obs: ChannelObservation,
    pub eve_obs: ChannelObservation,
    pub p_alice: f64,
    pub p_eve: f64,
}

fn sample_plaintext(len: usize, rng: &mut ChaCha12Rng) -> Result<BitSequence> {
    use rand::Rng;
    BitSequence::new((0..len).map(|_| u8::from(rng.random_bool(0.5))).collect())
}

/// Runs one session with streams derived for `trial` index 0.
pub fn run_session(config: &SessionConfig) -> Result<SessionTranscript> {
    run_session_trial(config, 0)
}

/// Runs one session with per-trial derived random streams.
pub fn run_session_trial(config: &SessionConfig, trial: u64) -> Result<SessionTranscript> {
    config.validate()?;
    let (p_alice, p_eve) = config.channel.crossover_probabilities()?;

    let mut key_rng = derive_rng(config.master_seed, purpose::KEY, trial);
    let mut true_key = generate_key(config.key_bits, &KeyPrior::Uniform, &mut key_rng)?;
    if config.keystream_spec.mode == KeystreamMode::Lfsr {
        // Rejection-sample away the degenerate all-zero seed.
        while true_key.bits().is_all_zero() {
            true_key = generate_key(config.key_bits, &KeyPrior::Uniform, &mut key_rng)?;
        }
    }

    let plaintext = match &config.fixed_plaintext {
        Some(m) => m.clone(),
        None => {
            let mut rng = derive_rng(config.master_seed, purpose::PLAINTEXT, trial);
            sample_plaintext(config.plaintext_len, &mut rng)?
        }
    };

    let spec = config.keystream_spec.with_output_len(match config.keystream_spec.mode {
        KeystreamMode::Lfsr => config.plaintext_len,
        KeystreamMode::Otp => config.keystream_spec.output_len,
    });
    let keystream = expand_keystream(&true_key, &spec)?;
    let ciphertext = encrypt(&plaintext, &keystream)?;

    let mut alice_rng = derive_rng(config.master_seed, purpose::ALICE_CHANNEL, trial);
    let eve_purpose = if config.paired_channel_seeds { purpose::ALICE_CHANNEL } else { purpose::EVE_CHANNEL };
    let mut eve_rng = derive_rng(config.master_seed, eve_purpose, trial);
    let alice_obs = transmit_bsc(&ciphertext, p_alice, &mut alice_rng, Receiver::Alice)?;
    let eve_obs = transmit_bsc(&ciphertext, p_eve, &mut eve_rng, Receiver::Eve)?;

    Ok(SessionTranscript { true_key, plaintext, ciphertext, alice_obs, eve_obs, p_alice, p_eve })
}

/// Outcome of a brute-force key search against one observation.
#[derive(Clone, Debug, Serialize)]
pub struct AttackReport {
    pub attacker: Receiver,
    pub guess: GuessReport,
    /// True iff the true key was supplied, is the unique argmax, and there are
    /// no ties.
    pub key_recovered: bool,
    pub posterior_entropy_bits: f64,
    pub keys_tried: u64,
    pub observed_bits: usize,
}

/// Exhaustive Bayesian key search: posterior over all keys given the observed
/// ciphertext prefix and the matching known plaintext, at the observation's
/// crossover probability.
pub fn brute_force_attack(
    obs: &ChannelObservation,
    known_plaintext: &BitSequence,
    spec: &KeystreamSpec,
    key_prior: &KeyPrior,
    true_key: Option<&SecretKey>,
) -> Result<AttackReport> {
    let n = known_plaintext.len();
    if n == 0 || n > obs.bits.len() {
        return Err(Error::Length(format!(
            "known plaintext of {n} bits does not align with a {}-bit observation",
            obs.bits.len()
        )));
    }
    let observed = obs.bits.prefix(n)?;
    let posterior =
        posterior_over_keys(&observed, Some(known_plaintext), None, key_prior, spec, obs.crossover_p)?;
    let guess = guess_from_posterior(&posterior)?;
    let key_recovered = match true_key {
        Some(k) => guess.multiplicity == 1 && guess.argmax_set[0] == *k.bits(),
        None => false,
    };
    Ok(AttackReport {
        attacker: obs.receiver,
        key_recovered,
        posterior_entropy_bits: posterior.entropy_bits(),
        keys_tried: 1u64 << posterior.domain_bits(),
        observed_bits: n,
        guess,
    })
}

/// One trial of the advantage measurement.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub pg_eve: f64,
    pub pg_legit: f64,
    pub eve_recovered: bool,
    pub alice_recovered: bool,
    pub flip_count_eve: usize,
    pub flip_count_alice: usize,
}

/// Trial-averaged guessing probabilities for both receivers.
#[derive(Clone, Debug, Serialize)]
pub struct AdvantageReport {
    pub pg_eve: f64,
    pub pg_legit: f64,
    pub eta_ideal_empirical: f64,
    /// 2^-key_bits, the ideal-randomization value.
    pub eta_ideal_target: f64,
    pub eve_recovery_rate: f64,
    pub alice_recovery_rate: f64,
    pub trials: u64,
}

fn kahan_mean(values: impl Iterator<Item = f64>, count: f64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum / count
}

/// Runs independent sessions and attacks both receivers' observations with
/// the shared known plaintext, reporting mean posterior-maximum probabilities
/// and their ratio.
pub fn measure_advantage(
    config: &SessionConfig,
    trials: u64,
) -> Result<(AdvantageReport, Vec<TrialRecord>)> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    config.validate()?;
    if config.known_plaintext_len == 0 {
        return Err(Error::Config("measure_advantage needs known_plaintext_len >= 1".into()));
    }
    let mut records = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let transcript = run_session_trial(config, trial)?;
        let known = transcript.plaintext.prefix(config.known_plaintext_len)?;
        let spec = config.keystream_spec.with_output_len(config.known_plaintext_len);
        let eve = brute_force_attack(
            &transcript.eve_obs,
            &known,
            &spec,
            &KeyPrior::Uniform,
            Some(&transcript.true_key),
        )?;
        let alice = brute_force_attack(
            &transcript.alice_obs,
            &known,
            &spec,
            &KeyPrior::Uniform,
            Some(&transcript.true_key),
        )?;
        records.push(TrialRecord {
            trial,
            pg_eve: eve.guess.p_guess,
            pg_legit: alice.guess.p_guess,
            eve_recovered: eve.key_recovered,
            alice_recovered: alice.key_recovered,
            flip_count_eve: transcript.eve_obs.flip_count,
            flip_count_alice: transcript.alice_obs.flip_count,
        });
    }
    let n = trials as f64;
    let pg_eve = kahan_mean(records.iter().map(|r| r.pg_eve), n);
    let pg_legit = kahan_mean(records.iter().map(|r| r.pg_legit), n);
    let report = AdvantageReport {
        pg_eve,
        pg_legit,
        eta_ideal_empirical: pg_eve / pg_legit,
        eta_ideal_target: 0.5f64.powi(config.key_bits as i32),
        eve_recovery_rate: records.iter().filter(|r| r.eve_recovered).count() as f64 / n,
        alice_recovery_rate: records.iter().filter(|r| r.alice_recovered).count() as f64 / n,
        trials,
    };
    Ok((report, records))
}

/// Eq.-10-style feasibility check: does the physical layer give at least a
/// `threshold`-fold error advantage?
pub fn advantage_holds(qi_params: &QiParams, threshold: f64) -> Result<bool> {
    if !(threshold > 1.0) {
        return Err(Error::Domain(format!("advantage threshold {threshold} must exceed 1")));
    }
    let report = error_ratio(qi_params)?;
    // Fall back to log domain when eta overflows f64.
    if report.eta.is_finite() {
        Ok(report.eta >= threshold)
    } else {
        Ok(report.ln_eta >= threshold.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lfsr_config(master_seed: u64) -> SessionConfig {
        SessionConfig {
            key_bits: 4,
            keystream_spec: KeystreamSpec::lfsr(vec![4, 3], 15),
            channel: ChannelModel::Fixed { p_alice: 0.0, p_eve: 0.5 },
            plaintext_len: 15,
            known_plaintext_len: 15,
            master_seed,
            paired_channel_seeds: false,
            fixed_plaintext: None,
        }
    }

    #[test]
    fn sessions_are_deterministic_in_the_master_seed() {
        let a = run_session(&lfsr_config(99)).unwrap();
        let b = run_session(&lfsr_config(99)).unwrap();
        assert_eq!(a.true_key, b.true_key);
        assert_eq!(a.plaintext, b.plaintext);
        assert_eq!(a.ciphertext, b.ciphertext);
        assert_eq!(a.alice_obs.bits, b.alice_obs.bits);
        assert_eq!(a.eve_obs.bits, b.eve_obs.bits);
        let c = run_session(&lfsr_config(100)).unwrap();
        assert!(a.plaintext != c.plaintext || a.true_key != c.true_key);
    }

    #[test]
    fn zero_brightness_puts_both_receivers_at_half() {
        let mut config = lfsr_config(5);
        config.channel =
            ChannelModel::QuantumIllumination(QiParams::from_reduced(1e6, 0.5, 0.0).unwrap());
        let t = run_session(&config).unwrap();
        assert_eq!(t.p_alice, 0.5);
        assert_eq!(t.p_eve, 0.5);
        assert_eq!(t.alice_obs.crossover_p, 0.5);
        assert_eq!(t.eve_obs.crossover_p, 0.5);
    }

    #[test]
    fn near_noiseless_legitimate_channel_delivers_the_ciphertext() {
        let mut config = lfsr_config(5);
        config.channel =
            ChannelModel::QuantumIllumination(QiParams::from_reduced(1e6, 1.0, 0.1).unwrap());
        let t = run_session(&config).unwrap();
        assert!(t.p_alice < 1e-12);
        assert_eq!(t.alice_obs.bits, t.ciphertext);
    }

    #[test]
    fn noiseless_known_plaintext_attack_recovers_the_key() {
        let config = lfsr_config(7);
        let t = run_session(&config).unwrap();
        let report = brute_force_attack(
            &t.alice_obs,
            &t.plaintext,
            &config.keystream_spec,
            &KeyPrior::Uniform,
            Some(&t.true_key),
        )
        .unwrap();
        assert!(report.key_recovered);
        assert!((report.guess.p_guess - 1.0).abs() < 1e-12);
        assert_eq!(report.keys_tried, 16);
    }

    #[test]
    fn half_crossover_observation_learns_nothing() {
        let config = lfsr_config(7);
        let t = run_session(&config).unwrap();
        let report = brute_force_attack(
            &t.eve_obs,
            &t.plaintext,
            &config.keystream_spec,
            &KeyPrior::Uniform,
            Some(&t.true_key),
        )
        .unwrap();
        assert_eq!(report.guess.p_guess, 0.0625);
        assert!((report.posterior_entropy_bits - 4.0).abs() < 1e-9);
        assert!(!report.key_recovered);
    }

    #[test]
    fn ideal_advantage_hits_the_two_to_minus_k_ratio() {
        let config = lfsr_config(11);
        let (report, records) = measure_advantage(&config, 20).unwrap();
        assert_eq!(report.pg_eve, 0.0625);
        assert!((report.pg_legit - 1.0).abs() < 1e-12);
        assert!((report.eta_ideal_empirical - 0.0625).abs() < 1e-12);
        assert_eq!(report.eta_ideal_target, 0.0625);
        assert_eq!(report.alice_recovery_rate, 1.0);
        assert_eq!(records.len(), 20);
        assert!(
            (report.eta_ideal_empirical - report.pg_eve / report.pg_legit).abs() < 1e-12
        );
    }

    #[test]
    fn paired_seeds_make_equal_channels_identical() {
        let mut config = lfsr_config(13);
        config.channel = ChannelModel::Fixed { p_alice: 0.2, p_eve: 0.2 };
        config.paired_channel_seeds = true;
        let (report, records) = measure_advantage(&config, 10).unwrap();
        for r in &records {
            assert_eq!(r.pg_eve, r.pg_legit);
            assert_eq!(r.flip_count_eve, r.flip_count_alice);
        }
        assert_eq!(report.eta_ideal_empirical, 1.0);
    }

    #[test]
    fn advantage_threshold_boundary_is_inclusive() {
        let params = QiParams::from_reduced(1e6, 0.2, 0.005).unwrap();
        // ln eta = 20 here.
        let eta = error_ratio(&params).unwrap().eta;
        assert!(advantage_holds(&params, 1e3).unwrap());
        assert!(advantage_holds(&params, eta).unwrap());
        assert!(!advantage_holds(&params, eta * 1.001).unwrap());
        let flat = QiParams::from_reduced(1e6, 0.5, 0.0).unwrap();
        assert!(!advantage_holds(&flat, 1.0001).unwrap());
        assert!(advantage_holds(&flat, 1.0).is_err());
    }

    #[test]
    fn invalid_session_configs_are_rejected() {
        let mut config = lfsr_config(0);
        config.known_plaintext_len = 20;
        assert!(config.validate().is_err());
        let mut config = lfsr_config(0);
        config.key_bits = 0;
        assert!(config.validate().is_err());
        let mut config = lfsr_config(0);
        config.fixed_plaintext = Some(BitSequence::zeros(3));
        assert!(config.validate().is_err());
    }
}
