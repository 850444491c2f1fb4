//! The mathematical encryption box: key generation, keystream expansion via a
//! configurable PRNG, and XOR stream encryption/decryption.
//!
//! Two keystream modes are supported. `Lfsr` expands a short secret key with a
//! Fibonacci linear-feedback shift register; `Otp` uses the key verbatim, once,
//! which is the ideal one-time-pad setting. Register bit 1 is the output end:
//! the first `key_bits` output bits are the key itself in transmission order,
//! after which each new bit is the XOR of the bits emitted `t` steps earlier
//! for every tap `t`. Taps `{4,3}` therefore realize the recurrence
//! `a[n] = a[n-4] ^ a[n-3]`, a maximal-length register of period 15.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitSequence;
use crate::error::{Error, Result};

/// Secret key of the mathematical encryption box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretKey {
    bits: BitSequence,
}

impl SecretKey {
    pub fn new(bits: BitSequence) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Config("key must be at least 1 bit".into()));
        }
        Ok(Self { bits })
    }

    pub fn from_int(value: u64, key_bits: usize) -> Result<Self> {
        Self::new(BitSequence::from_int(value, key_bits)?)
    }

    pub fn key_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &BitSequence {
        &self.bits
    }

    pub fn to_int(&self) -> u64 {
        // key_bits <= 64 is enforced at construction sites; keys are short.
        self.bits.to_int().expect("key fits in 64 bits")
    }
}

/// Distribution over the key space {0,1}^key_bits.
#[derive(Clone, Debug, PartialEq)]
pub enum KeyPrior {
    /// Every key has probability 2^-key_bits.
    Uniform,
    /// Explicit probability per key, indexed by the big-endian key integer.
    Explicit(Vec<f64>),
}

impl KeyPrior {
    /// Validates an explicit weight vector: non-negative, sums to 1 within 1e-12.
    pub fn explicit(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Config("explicit key prior has a negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "explicit key prior sums to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(Self::Explicit(weights))
    }

    pub fn validate_for(&self, key_bits: usize) -> Result<()> {
        if let Self::Explicit(w) = self {
            let expected = 1usize << key_bits;
            if w.len() != expected {
                return Err(Error::Config(format!(
                    "explicit key prior has {} entries, expected {expected} for {key_bits}-bit keys",
                    w.len()
                )));
            }
        }
        Ok(())
    }

    pub fn weight(&self, key: u64, key_bits: usize) -> f64 {
        match self {
            Self::Uniform => 0.5f64.powi(key_bits as i32),
            Self::Explicit(w) => w[key as usize],
        }
    }

    pub fn log_weight(&self, key: u64, key_bits: usize) -> f64 {
        match self {
            Self::Uniform => -(key_bits as f64) * std::f64::consts::LN_2,
            Self::Explicit(w) => w[key as usize].ln(),
        }
    }
}

/// Keystream PRNG selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeystreamMode {
    Lfsr,
    Otp,
}

/// Definition of the keystream expansion applied to a key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeystreamSpec {
    pub mode: KeystreamMode,
    /// Tap delays for LFSR mode; `max(taps)` must equal the key length.
    #[serde(default)]
    pub taps: Vec<usize>,
    pub output_len: usize,
}

impl KeystreamSpec {
    pub fn lfsr(taps: Vec<usize>, output_len: usize) -> Self {
        Self { mode: KeystreamMode::Lfsr, taps, output_len }
    }

    pub fn otp(key_bits: usize) -> Self {
        Self { mode: KeystreamMode::Otp, taps: Vec::new(), output_len: key_bits }
    }

    /// Key length implied by the spec: `max(taps)` for LFSR, `output_len` for OTP.
    pub fn key_bits(&self) -> Result<usize> {
        match self.mode {
            KeystreamMode::Lfsr => self
                .taps
                .iter()
                .max()
                .copied()
                .ok_or_else(|| Error::Config("lfsr mode requires a non-empty tap set".into())),
            KeystreamMode::Otp => Ok(self.output_len),
        }
    }

    pub fn validate_for(&self, key_bits: usize) -> Result<()> {
        match self.mode {
            KeystreamMode::Lfsr => {
                if self.taps.is_empty() {
                    return Err(Error::Config("lfsr mode requires a non-empty tap set".into()));
                }
                if self.taps.iter().any(|&t| t == 0) {
                    return Err(Error::Config("tap positions are 1-based; 0 is invalid".into()));
                }
                let max = *self.taps.iter().max().unwrap();
                if max != key_bits {
                    return Err(Error::Config(format!(
                        "max tap {max} must equal key length {key_bits}"
                    )));
                }
            }
            KeystreamMode::Otp => {
                if self.output_len != key_bits {
                    return Err(Error::Config(format!(
                        "otp keystream length {} must equal key length {key_bits}",
                        self.output_len
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn with_output_len(&self, output_len: usize) -> Self {
        Self { output_len, ..self.clone() }
    }
}

/// Samples a key from the prior. Deterministic given the rng state.
pub fn generate_key<R: Rng + ?Sized>(
    key_bits: usize,
    prior: &KeyPrior,
    rng: &mut R,
) -> Result<SecretKey> {
    if key_bits == 0 {
        return Err(Error::Config("key_bits must be at least 1".into()));
    }
    prior.validate_for(key_bits)?;
    match prior {
        KeyPrior::Uniform => {
            let bits: Vec<u8> = (0..key_bits).map(|_| u8::from(rng.random_bool(0.5))).collect();
            SecretKey::new(BitSequence::new(bits)?)
        }
        KeyPrior::Explicit(weights) => {
            // Inverse-CDF draw over the enumerated key space.
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (key, &w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    return SecretKey::from_int(key as u64, key_bits);
                }
            }
            // Rounding at the top of the CDF: fall back to the last positive cell.
            let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1);
            SecretKey::from_int(last as u64, key_bits)
        }
    }
}

/// Raw LFSR stream from an arbitrary seed window, with no zero-seed check.
/// Used directly by exhaustive enumeration, where the all-zero key is a valid
/// hypothesis whose keystream is the constant zero sequence.
pub(crate) fn lfsr_stream_unchecked(seed: &BitSequence, taps: &[usize], output_len: usize) -> Vec<u8> {
    let n = seed.len();
    // Ring buffer over the last n emitted bits; head indexes the oldest.
    let mut window: Vec<u8> = seed.as_slice().to_vec();
    let mut head = 0usize;
    let mut out = Vec::with_capacity(output_len);
    for _ in 0..output_len {
        let oldest = window[head];
        out.push(oldest);
        let mut feedback = 0u8;
        for &t in taps {
            // Delay t references the bit emitted t steps before the next one.
            feedback ^= window[(head + n - t) % n];
        }
        window[head] = feedback;
        head = (head + 1) % n;
    }
    out
}

pub(crate) fn keystream_for_key_int(key: u64, key_bits: usize, spec: &KeystreamSpec) -> Result<Vec<u8>> {
    let seed = BitSequence::from_int(key, key_bits)?;
    match spec.mode {
        KeystreamMode::Lfsr => Ok(lfsr_stream_unchecked(&seed, &spec.taps, spec.output_len)),
        KeystreamMode::Otp => Ok(seed.as_slice().to_vec()),
    }
}

/// Expands a key into a keystream of `spec.output_len` bits.
pub fn expand_keystream(key: &SecretKey, spec: &KeystreamSpec) -> Result<BitSequence> {
    spec.validate_for(key.key_bits())?;
    match spec.mode {
        KeystreamMode::Lfsr => {
            if key.bits().is_all_zero() {
                return Err(Error::DegenerateSeed);
            }
            BitSequence::new(lfsr_stream_unchecked(key.bits(), &spec.taps, spec.output_len))
        }
        KeystreamMode::Otp => Ok(key.bits().clone()),
    }
}

/// XOR stream encryption: C[i] = M[i] ^ ks[i].
pub fn encrypt(plaintext: &BitSequence, keystream: &BitSequence) -> Result<BitSequence> {
    if keystream.len() < plaintext.len() {
        return Err(Error::Length(format!(
            "keystream of {} bits cannot cover a {}-bit plaintext",
            keystream.len(),
            plaintext.len()
        )));
    }
    plaintext.xor(&keystream.prefix(plaintext.len())?)
}

/// XOR stream decryption; the exact inverse of [`encrypt`].
pub fn decrypt(ciphertext: &BitSequence, keystream: &BitSequence) -> Result<BitSequence> {
    encrypt(ciphertext, keystream)
}
