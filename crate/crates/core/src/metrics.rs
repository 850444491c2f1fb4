//! Enumeration-based guessing-probability metrics.
//!
//! Everything here is exact at desk scale: posteriors over keys or messages
//! are computed by exhaustive enumeration of the hypothesis space, in log
//! domain with log-sum-exp normalization so that likelihoods like 0.001^64
//! survive. Hard ceilings keep enumeration to a few seconds.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bits::BitSequence;
use crate::cipher::{keystream_for_key_int, KeyPrior, KeystreamMode, KeystreamSpec};
use crate::error::{Error, Result};

/// Largest key space accepted for exhaustive enumeration.
pub const MAX_ENUM_KEY_BITS: usize = 24;
/// Largest message space accepted for exhaustive enumeration.
pub const MAX_ENUM_MESSAGE_BITS: usize = 20;
/// Largest joint (message, key) space accepted.
pub const MAX_ENUM_JOINT_BITS: usize = 24;

/// Relative tolerance for reporting posterior-argmax ties.
const TIE_RELATIVE_TOL: f64 = 1e-12;

/// Distribution over a finite message set {0,1}^m, indexed by the big-endian
/// message integer.
#[derive(Clone, Debug, PartialEq)]
pub struct MessagePrior {
    weights: Vec<f64>,
    message_bits: usize,
}

impl MessagePrior {
    pub fn uniform(message_bits: usize) -> Result<Self> {
        check_message_bits(message_bits)?;
        let n = 1usize << message_bits;
        Ok(Self { weights: vec![1.0 / n as f64; n], message_bits })
    }

    /// Explicit weights; the length must be a power of two.
    pub fn explicit(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || !weights.len().is_power_of_two() {
            return Err(Error::Config(format!(
                "message prior length {} is not a power of two",
                weights.len()
            )));
        }
        let message_bits = weights.len().trailing_zeros() as usize;
        check_message_bits(message_bits)?;
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Config("message prior has a negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "message prior sums to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(Self { weights, message_bits })
    }

    pub fn message_bits(&self) -> usize {
        self.message_bits
    }

    pub fn weight(&self, message: u64) -> f64 {
        self.weights[message as usize]
    }
}

fn check_message_bits(message_bits: usize) -> Result<()> {
    if message_bits == 0 || message_bits > MAX_ENUM_MESSAGE_BITS {
        return Err(Error::EnumerationCeiling(format!(
            "message space of 2^{message_bits} outside 1..=2^{MAX_ENUM_MESSAGE_BITS}"
        )));
    }
    Ok(())
}

fn check_key_bits(key_bits: usize) -> Result<()> {
    if key_bits == 0 || key_bits > MAX_ENUM_KEY_BITS {
        return Err(Error::EnumerationCeiling(format!(
            "key space of 2^{key_bits} outside 1..=2^{MAX_ENUM_KEY_BITS}"
        )));
    }
    Ok(())
}

fn check_joint_bits(message_bits: usize, key_bits: usize) -> Result<()> {
    if message_bits + key_bits > MAX_ENUM_JOINT_BITS {
        return Err(Error::EnumerationCeiling(format!(
            "joint space of 2^{} exceeds 2^{MAX_ENUM_JOINT_BITS}",
            message_bits + key_bits
        )));
    }
    Ok(())
}

/// Fixed-order log-sum-exp; returns -inf when every input is -inf.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Log-likelihood of observing a sequence at Hamming distance `dist` over a
/// memoryless binary symmetric channel with crossover probability `p`.
fn bsc_log_likelihood(dist: usize, len: usize, p: f64) -> f64 {
    if p == 0.0 {
        return if dist == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    dist as f64 * p.ln() + (len - dist) as f64 * (1.0 - p).ln()
}

/// Log-domain posterior over an enumerated hypothesis space of keys or
/// messages, indexed by the big-endian integer encoding.
#[derive(Clone, Debug)]
pub struct PosteriorTable {
    log_weights: Vec<f64>,
    domain_bits: usize,
    normalized: bool,
}

impl PosteriorTable {
    pub fn from_log_weights(log_weights: Vec<f64>, domain_bits: usize) -> Result<Self> {
        if log_weights.len() != 1usize << domain_bits {
            return Err(Error::Config(format!(
                "{} log weights for a 2^{domain_bits} domain",
                log_weights.len()
            )));
        }
        Ok(Self { log_weights, domain_bits, normalized: false })
    }

    pub fn domain_bits(&self) -> usize {
        self.domain_bits
    }

    pub fn domain_size(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Log-sum-exp normalization. Fails when every hypothesis has zero weight,
    /// which can only happen for impossible observations at channel_p = 0.
    pub fn normalize(&mut self) -> Result<()> {
        let lse = log_sum_exp(&self.log_weights);
        if lse == f64::NEG_INFINITY {
            return Err(Error::InconsistentEvidence);
        }
        for w in &mut self.log_weights {
            *w -= lse;
        }
        self.normalized = true;
        Ok(())
    }

    /// Linear-domain probabilities, computed stably relative to the maximum.
    pub fn probabilities(&self) -> Vec<f64> {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let denom: f64 = self.log_weights.iter().map(|&w| (w - max).exp()).sum();
        self.log_weights.iter().map(|&w| (w - max).exp() / denom).collect()
    }

    /// Shannon entropy of the posterior in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.probabilities()
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    /// CSV dump, one hypothesis per row: bit string, posterior probability.
    pub fn to_csv(&self, label: &str) -> String {
        let probs = self.probabilities();
        let mut out = format!("{label},probability\n");
        for (i, p) in probs.iter().enumerate() {
            let bits = BitSequence::from_int(i as u64, self.domain_bits).expect("domain index fits");
            let _ = writeln!(out, "{bits},{p}");
        }
        out
    }
}

/// Maximum a-posteriori guessing report.
#[derive(Clone, Debug, Serialize)]
pub struct GuessReport {
    pub p_guess: f64,
    /// Every hypothesis within relative tolerance 1e-12 of the maximum,
    /// sorted ascending; the first entry is the canonical representative.
    pub argmax_set: Vec<BitSequence>,
    pub multiplicity: usize,
    pub domain_bits: usize,
}

/// MAP guessing probability and argmax set of a normalized posterior.
pub fn guess_from_posterior(posterior: &PosteriorTable) -> Result<GuessReport> {
    if !posterior.is_normalized() {
        return Err(Error::Config("guess_from_posterior requires a normalized posterior".into()));
    }
    let lw = posterior.log_weights();
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // p_guess via 1 / sum exp(lw - max): exact 2^-k on uniform posteriors.
    let denom: f64 = lw.iter().map(|&w| (w - max).exp()).sum();
    let p_guess = 1.0 / denom;
    let tie_floor = max + (1.0 - TIE_RELATIVE_TOL).ln();
    let argmax_set: Vec<BitSequence> = lw
        .iter()
        .enumerate()
        .filter(|(_, &w)| w >= tie_floor)
        .map(|(i, _)| BitSequence::from_int(i as u64, posterior.domain_bits()).expect("index fits"))
        .collect();
    let multiplicity = argmax_set.len();
    Ok(GuessReport { p_guess, argmax_set, multiplicity, domain_bits: posterior.domain_bits() })
}

/// Keystream prefix, as a big-endian integer, for every key in the space.
/// The all-zero key is kept as a hypothesis; in LFSR mode its keystream is the
/// constant zero sequence.
fn keystream_ints(key_bits: usize, spec: &KeystreamSpec, len: usize) -> Result<Vec<u64>> {
    if spec.mode == KeystreamMode::Otp && len > spec.output_len {
        return Err(Error::Length(format!(
            "otp keystream of {} bits cannot cover {len} observed bits",
            spec.output_len
        )));
    }
    let eval_spec = match spec.mode {
        KeystreamMode::Lfsr => spec.with_output_len(len),
        KeystreamMode::Otp => spec.clone(),
    };
    (0..1u64 << key_bits)
        .map(|k| {
            let ks = keystream_for_key_int(k, key_bits, &eval_spec)?;
            Ok(ks[..len].iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
        })
        .collect()
}

/// Posterior over the key space given an observed (possibly noisy) ciphertext.
///
/// With `known_plaintext` present the message sum collapses to the single
/// known message; otherwise a `message_prior` over {0,1}^n is required and the
/// likelihood marginalizes over it. `channel_p = 0` is the noiseless setting.
pub fn posterior_over_keys(
    observed: &BitSequence,
    known_plaintext: Option<&BitSequence>,
    message_prior: Option<&MessagePrior>,
    key_prior: &KeyPrior,
    spec: &KeystreamSpec,
    channel_p: f64,
) -> Result<PosteriorTable> {
    let key_bits = spec.key_bits()?;
    check_key_bits(key_bits)?;
    key_prior.validate_for(key_bits)?;
    if !(0.0..=0.5).contains(&channel_p) {
        return Err(Error::Domain(format!("channel_p {channel_p} outside [0, 0.5]")));
    }
    let n = observed.len();
    if n == 0 {
        return Err(Error::Length("observed ciphertext is empty".into()));
    }
    let obs_int = observed.to_int()?;

    let keystreams = keystream_ints(key_bits, spec, n)?;
    let mut log_weights = Vec::with_capacity(keystreams.len());
    match known_plaintext {
        Some(m) => {
            if m.len() != n {
                return Err(Error::Length(format!(
                    "known plaintext of {} bits does not match the {n}-bit observation",
                    m.len()
                )));
            }
            let m_int = m.to_int()?;
            for (k, &ks) in keystreams.iter().enumerate() {
                let predicted = m_int ^ ks;
                let dist = (predicted ^ obs_int).count_ones() as usize;
                let ll = bsc_log_likelihood(dist, n, channel_p);
                log_weights.push(key_prior.log_weight(k as u64, key_bits) + ll);
            }
        }
        None => {
            let prior = message_prior.ok_or_else(|| {
                Error::Config("ciphertext-only attack needs a message prior".into())
            })?;
            if prior.message_bits() != n {
                return Err(Error::Config(format!(
                    "message prior over {} bits does not match the {n}-bit observation",
                    prior.message_bits()
                )));
            }
            check_joint_bits(n, key_bits)?;
            let mut terms = Vec::with_capacity(1 << n);
            for (k, &ks) in keystreams.iter().enumerate() {
                terms.clear();
                for m_int in 0..1u64 << n {
                    let pm = prior.weight(m_int);
                    if pm == 0.0 {
                        continue;
                    }
                    let dist = ((m_int ^ ks) ^ obs_int).count_ones() as usize;
                    terms.push(pm.ln() + bsc_log_likelihood(dist, n, channel_p));
                }
                let ll = log_sum_exp(&terms);
                log_weights.push(key_prior.log_weight(k as u64, key_bits) + ll);
            }
        }
    }

    let mut table = PosteriorTable::from_log_weights(log_weights, key_bits)?;
    table.normalize()?;
    Ok(table)
}

/// Per-key prior mass grouped by keystream prefix. Returns (dense table
/// indexed by keystream integer, list of occupied keystream integers).
fn keystream_mass(key_bits: usize, spec: &KeystreamSpec, len: usize, key_prior: &KeyPrior) -> Result<(Vec<f64>, Vec<u64>)> {
    let keystreams = keystream_ints(key_bits, spec, len)?;
    let mut mass = vec![0.0f64; 1 << len];
    let mut occupied = Vec::new();
    for (k, &ks) in keystreams.iter().enumerate() {
        let w = key_prior.weight(k as u64, key_bits);
        if w > 0.0 {
            if mass[ks as usize] == 0.0 {
                occupied.push(ks);
            }
            mass[ks as usize] += w;
        }
    }
    occupied.sort_unstable();
    Ok((mass, occupied))
}

/// Posterior over messages given a noiselessly observed ciphertext.
///
/// `known_positions` optionally pins individual plaintext bits (position,
/// value), the known-plaintext variant of the ciphertext-only attack.
pub fn posterior_over_messages(
    ciphertext: &BitSequence,
    message_prior: &MessagePrior,
    key_prior: &KeyPrior,
    spec: &KeystreamSpec,
    known_positions: &[(usize, u8)],
) -> Result<PosteriorTable> {
    let key_bits = spec.key_bits()?;
    check_key_bits(key_bits)?;
    key_prior.validate_for(key_bits)?;
    let n = ciphertext.len();
    if message_prior.message_bits() != n {
        return Err(Error::Config(format!(
            "message prior over {} bits does not match the {n}-bit ciphertext",
            message_prior.message_bits()
        )));
    }
    check_joint_bits(n, key_bits)?;
    for &(pos, val) in known_positions {
        if pos >= n || val > 1 {
            return Err(Error::Config(format!("invalid known position ({pos}, {val})")));
        }
    }
    let c_int = ciphertext.to_int()?;
    let (mass, _) = keystream_mass(key_bits, spec, n, key_prior)?;

    let log_weights = (0..1u64 << n)
        .map(|m_int| {
            let consistent = known_positions
                .iter()
                .all(|&(pos, val)| ((m_int >> (n - 1 - pos)) & 1) as u8 == val);
            if !consistent {
                return f64::NEG_INFINITY;
            }
            let w = message_prior.weight(m_int) * mass[(c_int ^ m_int) as usize];
            w.ln()
        })
        .collect();

    let mut table = PosteriorTable::from_log_weights(log_weights, n)?;
    table.normalize()?;
    Ok(table)
}

/// Average guessing probability over the ciphertext distribution:
/// sum over C of P(C) max_M P(M|C), by exhaustive enumeration.
pub fn average_guessing_probability(
    message_prior: &MessagePrior,
    key_prior: &KeyPrior,
    spec: &KeystreamSpec,
) -> Result<f64> {
    let key_bits = spec.key_bits()?;
    check_key_bits(key_bits)?;
    key_prior.validate_for(key_bits)?;
    let n = message_prior.message_bits();
    check_joint_bits(n, key_bits)?;
    let (mass, occupied) = keystream_mass(key_bits, spec, n, key_prior)?;

    // P(C) max_M P(M|C) equals max_M P(M, C); accumulate the per-ciphertext
    // maximum of the joint and sum with compensation.
    let mut best = vec![0.0f64; 1 << n];
    for m_int in 0..1u64 << n {
        let pm = message_prior.weight(m_int);
        if pm == 0.0 {
            continue;
        }
        for &ks in &occupied {
            let c = (m_int ^ ks) as usize;
            let joint = pm * mass[ks as usize];
            if joint > best[c] {
                best[c] = joint;
            }
        }
    }
    Ok(kahan_sum(&best))
}

fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Outcome of a perfect-secrecy check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SecrecyReport {
    pub holds: bool,
    pub max_deviation: f64,
}

/// Exhaustive perfect-secrecy verification: max over reachable (M, C) of
/// |P(M|C) - P(M)|, compared against `tolerance`.
pub fn verify_perfect_secrecy(
    message_prior: &MessagePrior,
    key_prior: &KeyPrior,
    spec: &KeystreamSpec,
    tolerance: f64,
) -> Result<SecrecyReport> {
    let key_bits = spec.key_bits()?;
    check_key_bits(key_bits)?;
    key_prior.validate_for(key_bits)?;
    let n = message_prior.message_bits();
    check_joint_bits(n, key_bits)?;
    if 2 * n > MAX_ENUM_JOINT_BITS {
        return Err(Error::EnumerationCeiling(format!(
            "secrecy check enumerates 2^{} (message, ciphertext) pairs, ceiling 2^{MAX_ENUM_JOINT_BITS}",
            2 * n
        )));
    }
    let (mass, _) = keystream_mass(key_bits, spec, n, key_prior)?;

    let mut max_deviation = 0.0f64;
    for c_int in 0..1u64 << n {
        let joints: Vec<f64> = (0..1u64 << n)
            .map(|m_int| message_prior.weight(m_int) * mass[(c_int ^ m_int) as usize])
            .collect();
        let total = kahan_sum(&joints);
        if total == 0.0 {
            // Unreachable ciphertext: the posterior is undefined.
            continue;
        }
        for (m_int, &joint) in joints.iter().enumerate() {
            let dev = (joint / total - message_prior.weight(m_int as u64)).abs();
            if dev > max_deviation {
                max_deviation = dev;
            }
        }
    }
    Ok(SecrecyReport { holds: max_deviation <= tolerance, max_deviation })
}

/// Upper bound on the average guessing probability of a QKD-distributed key:
/// 2^-key_bits + trace_distance, clamped to 1.
pub fn qkd_guessing_bound(key_bits: usize, trace_distance: f64) -> Result<f64> {
    if key_bits == 0 {
        return Err(Error::Domain("key_bits must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&trace_distance) {
        return Err(Error::Domain(format!("trace distance {trace_distance} outside [0, 1]")));
    }
    Ok((0.5f64.powi(key_bits as i32) + trace_distance).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{encrypt, expand_keystream, SecretKey};

    fn uniform_key() -> KeyPrior {
        KeyPrior::Uniform
    }

    #[test]
    fn noiseless_known_plaintext_pins_the_key() {
        let spec = KeystreamSpec::lfsr(vec![4, 3], 15);
        let key = SecretKey::from_int(0b0110, 4).unwrap();
        let ks = expand_keystream(&key, &spec).unwrap();
        let m = BitSequence::from_int(0b101_1100_0101_0011, 15).unwrap();
        let c = encrypt(&m, &ks).unwrap();
        let post = posterior_over_keys(&c, Some(&m), None, &uniform_key(), &spec, 0.0).unwrap();
        let report = guess_from_posterior(&post).unwrap();
        assert_eq!(report.multiplicity, 1);
        assert_eq!(report.argmax_set[0].to_int().unwrap(), 0b0110);
        assert!((report.p_guess - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_crossover_returns_the_prior_exactly() {
        let spec = KeystreamSpec::lfsr(vec![4, 3], 15);
        let c = BitSequence::from_int(0b1010, 4).unwrap();
        let post = posterior_over_keys(&c, Some(&BitSequence::zeros(4)), None, &uniform_key(), &spec, 0.5)
            .unwrap();
        let report = guess_from_posterior(&post).unwrap();
        assert_eq!(report.p_guess, 0.0625);
        assert_eq!(report.multiplicity, 16);
        for (k, p) in post.probabilities().iter().enumerate() {
            assert_eq!(*p, uniform_key().weight(k as u64, 4));
        }
        assert!((post.entropy_bits() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_key_prior_dominates() {
        let spec = KeystreamSpec::lfsr(vec![4, 3], 15);
        let mut w = vec![0.0; 16];
        w[0b0111] = 1.0;
        let prior = KeyPrior::explicit(w).unwrap();
        let c = BitSequence::from_int(0b1100, 4).unwrap();
        let post =
            posterior_over_keys(&c, Some(&BitSequence::zeros(4)), None, &prior, &spec, 0.1).unwrap();
        let report = guess_from_posterior(&post).unwrap();
        assert_eq!(report.argmax_set[0].to_int().unwrap(), 0b0111);
        assert!((report.p_guess - 1.0).abs() < 1e-12);
    }

    #[test]
    fn impossible_noiseless_observation_is_inconsistent() {
        // OTP with a point-mass key prior: only one ciphertext is possible.
        let spec = KeystreamSpec::otp(4);
        let mut w = vec![0.0; 16];
        w[0b1111] = 1.0;
        let prior = KeyPrior::explicit(w).unwrap();
        let m = BitSequence::zeros(4);
        let c = BitSequence::from_int(0b0001, 4).unwrap();
        // True ciphertext under key 1111 and zero plaintext is 1111, not 0001.
        let err = posterior_over_keys(&c, Some(&m), None, &prior, &spec, 0.0).unwrap_err();
        assert!(matches!(err, Error::InconsistentEvidence));
    }

    #[test]
    fn guessing_a_plain_distribution() {
        let lw = vec![0.5f64.ln(), 0.3f64.ln(), 0.2f64.ln(), f64::NEG_INFINITY];
        let mut table = PosteriorTable::from_log_weights(lw, 2).unwrap();
        table.normalize().unwrap();
        let report = guess_from_posterior(&table).unwrap();
        assert!((report.p_guess - 0.5).abs() < 1e-12);
        assert_eq!(report.multiplicity, 1);
        assert_eq!(report.argmax_set[0].to_int().unwrap(), 0);
    }

    #[test]
    fn point_mass_posterior_guesses_with_certainty() {
        let mut lw = vec![f64::NEG_INFINITY; 8];
        lw[5] = 0.0;
        let mut table = PosteriorTable::from_log_weights(lw, 3).unwrap();
        table.normalize().unwrap();
        let report = guess_from_posterior(&table).unwrap();
        assert_eq!(report.p_guess, 1.0);
        assert_eq!(report.multiplicity, 1);
        assert_eq!(report.argmax_set[0].to_int().unwrap(), 5);
    }

    #[test]
    fn otp_posterior_over_messages_equals_the_prior() {
        let spec = KeystreamSpec::otp(3);
        let prior = MessagePrior::explicit(vec![0.4, 0.1, 0.05, 0.05, 0.1, 0.1, 0.1, 0.1]).unwrap();
        for c_int in 0..8u64 {
            let c = BitSequence::from_int(c_int, 3).unwrap();
            let post = posterior_over_messages(&c, &prior, &uniform_key(), &spec, &[]).unwrap();
            for (m, p) in post.probabilities().iter().enumerate() {
                assert!((p - prior.weight(m as u64)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_key_space_determines_the_message() {
        let spec = KeystreamSpec::otp(2);
        let mut w = vec![0.0; 4];
        w[0b10] = 1.0;
        let prior = KeyPrior::explicit(w).unwrap();
        let c = BitSequence::from_int(0b11, 2).unwrap();
        let post = posterior_over_messages(
            &c,
            &MessagePrior::uniform(2).unwrap(),
            &prior,
            &spec,
            &[],
        )
        .unwrap();
        let report = guess_from_posterior(&post).unwrap();
        assert_eq!(report.multiplicity, 1);
        // Dec(10, 11) = 01.
        assert_eq!(report.argmax_set[0].to_int().unwrap(), 0b01);
        assert_eq!(report.p_guess, 1.0);
    }

    #[test]
    fn known_positions_constrain_the_message_posterior() {
        let spec = KeystreamSpec::otp(2);
        let c = BitSequence::from_int(0b00, 2).unwrap();
        let post = posterior_over_messages(
            &c,
            &MessagePrior::uniform(2).unwrap(),
            &uniform_key(),
            &spec,
            &[(0, 1)],
        )
        .unwrap();
        let probs = post.probabilities();
        assert_eq!(probs[0b00], 0.0);
        assert_eq!(probs[0b01], 0.0);
        assert!((probs[0b10] - 0.5).abs() < 1e-12);
        assert!((probs[0b11] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn one_bit_otp_average_guessing_probability() {
        let spec = KeystreamSpec::otp(1);
        let prior = MessagePrior::explicit(vec![0.7, 0.3]).unwrap();
        let avg = average_guessing_probability(&prior, &uniform_key(), &spec).unwrap();
        assert!((avg - 0.7).abs() < 1e-12);
    }

    #[test]
    fn known_key_makes_guessing_certain_on_average() {
        let spec = KeystreamSpec::otp(2);
        let mut w = vec![0.0; 4];
        w[0b01] = 1.0;
        let prior = KeyPrior::explicit(w).unwrap();
        let avg =
            average_guessing_probability(&MessagePrior::uniform(2).unwrap(), &prior, &spec).unwrap();
        assert!((avg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn otp_with_uniform_keys_has_perfect_secrecy() {
        let spec = KeystreamSpec::otp(4);
        let prior = MessagePrior::explicit(
            (0..16).map(|i| (i + 1) as f64 / 136.0).collect(),
        )
        .unwrap();
        let report = verify_perfect_secrecy(&prior, &uniform_key(), &spec, 1e-12).unwrap();
        assert!(report.holds, "max deviation {}", report.max_deviation);
    }

    #[test]
    fn skewed_key_prior_breaks_perfect_secrecy() {
        let spec = KeystreamSpec::otp(2);
        let mut w = vec![0.1 / 3.0; 4];
        w[0] = 0.9;
        let prior = KeyPrior::explicit(w).unwrap();
        let report =
            verify_perfect_secrecy(&MessagePrior::uniform(2).unwrap(), &prior, &spec, 1e-12).unwrap();
        assert!(!report.holds);
        assert!(report.max_deviation > 0.1);
    }

    #[test]
    fn small_lfsr_key_cannot_hide_longer_messages() {
        let spec = KeystreamSpec::lfsr(vec![2, 1], 4);
        let report =
            verify_perfect_secrecy(&MessagePrior::uniform(4).unwrap(), &uniform_key(), &spec, 1e-12)
                .unwrap();
        assert!(!report.holds);
    }

    #[test]
    fn qkd_bound_arithmetic() {
        assert_eq!(qkd_guessing_bound(8, 0.0).unwrap(), 0.00390625);
        assert!((qkd_guessing_bound(8, 0.01).unwrap() - 0.01390625).abs() < 1e-15);
        assert_eq!(qkd_guessing_bound(1, 1.0).unwrap(), 1.0);
        assert!(qkd_guessing_bound(8, 1.5).is_err());
        assert!(qkd_guessing_bound(8, -0.1).is_err());
    }

    #[test]
    fn enumeration_ceiling_is_enforced() {
        let spec = KeystreamSpec::lfsr(vec![25, 3], 25);
        let c = BitSequence::zeros(25);
        let err = posterior_over_keys(&c, Some(&BitSequence::zeros(25)), None, &uniform_key(), &spec, 0.0)
            .unwrap_err();
        assert!(matches!(err, Error::EnumerationCeiling(_)));
    }
}
