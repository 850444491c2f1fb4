//! The physical randomization layer: quantum-illumination error-probability
//! formulas, the eavesdropper/legitimate error-ratio and its constrained grid
//! maximization, and Monte Carlo binary-symmetric-channel transmission.
//!
//! The two closed-form error probabilities are
//!
//! ```text
//! P_e(Eve)   = exp(-4 W kappa_s G_B N_S^2 / (R N_B)) / 2
//! P_e(Alice) = exp(-W kappa_s^3 G_B N_S / (R N_B)) / 2
//! ```
//!
//! Both depend on the six physical parameters only through the dimensionless
//! group `A = W G_B / (R N_B)` together with `kappa_s` and `N_S`. All
//! exponents are carried in log domain; the ratio is exponentiated only at
//! the reporting boundary so that magnitudes like e^20 survive.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitSequence;
use crate::error::{Error, Result};

/// Physical parameters of the quantum-illumination link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiParams {
    /// Bandwidth W in Hz.
    #[serde(rename = "W")]
    pub bandwidth: f64,
    /// Bit rate R in bit/s.
    #[serde(rename = "R")]
    pub bit_rate: f64,
    /// Channel transmissivity kappa_s in (0, 1].
    pub kappa_s: f64,
    /// Amplifier gain G_B >= 1.
    #[serde(rename = "G_B")]
    pub gain: f64,
    /// Source brightness N_S, mean photons per mode, >= 0.
    #[serde(rename = "N_S")]
    pub source_brightness: f64,
    /// Amplifier noise photons N_B > 0.
    #[serde(rename = "N_B")]
    pub noise_photons: f64,
}

impl QiParams {
    pub fn new(
        bandwidth: f64,
        bit_rate: f64,
        kappa_s: f64,
        gain: f64,
        source_brightness: f64,
        noise_photons: f64,
    ) -> Result<Self> {
        let p = Self { bandwidth, bit_rate, kappa_s, gain, source_brightness, noise_photons };
        p.validate()?;
        Ok(p)
    }

    /// Reduced parameterization through the dimensionless group
    /// `A = W G_B / (R N_B)`: realized as W = A with R, G_B, N_B all 1.
    pub fn from_reduced(dimensionless_gain: f64, kappa_s: f64, source_brightness: f64) -> Result<Self> {
        Self::new(dimensionless_gain, 1.0, kappa_s, 1.0, source_brightness, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.bandwidth > 0.0, format!("W must be > 0, got {}", self.bandwidth)),
            (self.bit_rate > 0.0, format!("R must be > 0, got {}", self.bit_rate)),
            (
                self.kappa_s > 0.0 && self.kappa_s <= 1.0,
                format!("kappa_s must be in (0, 1], got {}", self.kappa_s),
            ),
            (self.gain >= 1.0, format!("G_B must be >= 1, got {}", self.gain)),
            (
                self.source_brightness >= 0.0,
                format!("N_S must be >= 0, got {}", self.source_brightness),
            ),
            (self.noise_photons > 0.0, format!("N_B must be > 0, got {}", self.noise_photons)),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::Config(msg));
            }
        }
        if [self.bandwidth, self.bit_rate, self.kappa_s, self.gain, self.source_brightness, self.noise_photons]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(Error::Config("QI parameters must be finite".into()));
        }
        Ok(())
    }

    /// The group A = W G_B / (R N_B) that, with kappa_s and N_S, fully
    /// determines both error probabilities.
    pub fn dimensionless_gain(&self) -> f64 {
        self.bandwidth * self.gain / (self.bit_rate * self.noise_photons)
    }

    /// Modes per bit W/R; values below 1 are physically suspect.
    pub fn modes_per_bit(&self) -> f64 {
        self.bandwidth / self.bit_rate
    }

    /// Non-fatal sanity warnings.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.modes_per_bit() < 1.0 {
            out.push(format!("W/R = {} is below 1 mode per bit", self.modes_per_bit()));
        }
        out
    }

    /// ln(2 P_e(Eve)) = -4 A kappa_s N_S^2.
    pub fn eve_log_error_doubled(&self) -> f64 {
        let a = self.dimensionless_gain();
        -4.0 * a * self.kappa_s * self.source_brightness * self.source_brightness
    }

    /// ln(2 P_e(Alice)) = -A kappa_s^3 N_S.
    pub fn alice_log_error_doubled(&self) -> f64 {
        let a = self.dimensionless_gain();
        -a * self.kappa_s.powi(3) * self.source_brightness
    }
}

/// Eavesdropper bit-error probability; 0.5 exactly when N_S = 0.
pub fn eve_error_probability(params: &QiParams) -> Result<f64> {
    params.validate()?;
    Ok(0.5 * params.eve_log_error_doubled().exp())
}

/// Legitimate (entanglement-assisted) receiver bit-error probability.
pub fn alice_error_probability(params: &QiParams) -> Result<f64> {
    params.validate()?;
    Ok(0.5 * params.alice_log_error_doubled().exp())
}

/// Error-advantage ratio at one parameter point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EtaReport {
    pub eta: f64,
    pub ln_eta: f64,
    pub p_eve: f64,
    pub p_alice: f64,
    pub params: QiParams,
}

/// Ratio P_e(Eve) / P_e(Alice), computed from the log-domain difference of the
/// two exponents: ln eta = A kappa_s N_S (kappa_s^2 - 4 N_S).
pub fn error_ratio(params: &QiParams) -> Result<EtaReport> {
    params.validate()?;
    let a = params.dimensionless_gain();
    let k = params.kappa_s;
    let ns = params.source_brightness;
    let ln_eta = a * k * ns * (k * k - 4.0 * ns);
    Ok(EtaReport {
        eta: ln_eta.exp(),
        ln_eta,
        p_eve: 0.5 * params.eve_log_error_doubled().exp(),
        p_alice: 0.5 * params.alice_log_error_doubled().exp(),
        params: *params,
    })
}

/// Inclusive linear range with a fixed number of samples.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ParamRange {
    pub fn fixed(value: f64) -> Self {
        Self { min: value, max: value, steps: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("range needs at least 1 step".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(Error::Config(format!(
                "invalid range [{}, {}]",
                self.min, self.max
            )));
        }
        if self.steps == 1 && self.min != self.max {
            return Err(Error::Config(format!(
                "single-step range must have min == max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + step * i as f64).collect()
    }
}

/// Grid of QI parameter ranges, swept in lexicographic order
/// (W, R, kappa_s, G_B, N_S, N_B).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QiGrid {
    #[serde(rename = "W")]
    pub bandwidth: ParamRange,
    #[serde(rename = "R")]
    pub bit_rate: ParamRange,
    pub kappa_s: ParamRange,
    #[serde(rename = "G_B")]
    pub gain: ParamRange,
    #[serde(rename = "N_S")]
    pub source_brightness: ParamRange,
    #[serde(rename = "N_B")]
    pub noise_photons: ParamRange,
}

impl QiGrid {
    pub fn validate(&self) -> Result<()> {
        for r in [
            &self.bandwidth,
            &self.bit_rate,
            &self.kappa_s,
            &self.gain,
            &self.source_brightness,
            &self.noise_photons,
        ] {
            r.validate()?;
        }
        Ok(())
    }

    /// Every grid point, in the deterministic sweep order.
    pub fn points(&self) -> Result<Vec<QiParams>> {
        self.validate()?;
        let mut out = Vec::new();
        for &w in &self.bandwidth.values() {
            for &r in &self.bit_rate.values() {
                for &k in &self.kappa_s.values() {
                    for &g in &self.gain.values() {
                        for &ns in &self.source_brightness.values() {
                            for &nb in &self.noise_photons.values() {
                                out.push(QiParams::new(w, r, k, g, ns, nb)?);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Evaluates the ratio at every grid point, in sweep order.
pub fn sweep_eta(grid: &QiGrid) -> Result<Vec<EtaReport>> {
    grid.points()?.iter().map(error_ratio).collect()
}

/// Exhaustive constrained maximization of eta over the grid, keeping only
/// points with p_alice <= `constraint_p_alice_max`. Ties resolve to the first
/// point in sweep order, i.e. lexicographic parameter order.
pub fn optimize_eta(grid: &QiGrid, constraint_p_alice_max: f64) -> Result<EtaReport> {
    if !(0.0..0.5).contains(&constraint_p_alice_max) || constraint_p_alice_max == 0.0 {
        return Err(Error::Domain(format!(
            "p_alice constraint {constraint_p_alice_max} outside (0, 0.5)"
        )));
    }
    let mut best: Option<EtaReport> = None;
    let mut min_p_alice = f64::INFINITY;
    for params in grid.points()? {
        let report = error_ratio(&params)?;
        if report.p_alice > constraint_p_alice_max {
            min_p_alice = min_p_alice.min(report.p_alice);
            continue;
        }
        match &best {
            Some(b) if report.ln_eta <= b.ln_eta => {}
            _ => best = Some(report),
        }
    }
    best.ok_or_else(|| {
        Error::NoFeasiblePoint(format!(
            "every grid point has p_alice > {constraint_p_alice_max}; closest was {min_p_alice}"
        ))
    })
}

/// Receiver tag for channel observations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Receiver {
    Alice,
    Eve,
    BobIdeal,
}

/// A received bit sequence tagged with the crossover probability that
/// produced it.
#[derive(Clone, Debug, Serialize)]
pub struct ChannelObservation {
    pub bits: BitSequence,
    pub crossover_p: f64,
    pub flip_count: usize,
    pub receiver: Receiver,
}

/// Memoryless binary-symmetric-channel transmission: each bit independently
/// flipped with probability `crossover_p`. Deterministic given the rng state.
pub fn transmit_bsc<R: Rng + ?Sized>(
    sent: &BitSequence,
    crossover_p: f64,
    rng: &mut R,
    receiver: Receiver,
) -> Result<ChannelObservation> {
    if !(0.0..=0.5).contains(&crossover_p) {
        return Err(Error::Domain(format!("crossover_p {crossover_p} outside [0, 0.5]")));
    }
    let mut flip_count = 0;
    let bits: Vec<u8> = sent
        .as_slice()
        .iter()
        .map(|&b| {
            if rng.random_bool(crossover_p) {
                flip_count += 1;
                b ^ 1
            } else {
                b
            }
        })
        .collect();
    Ok(ChannelObservation {
        bits: BitSequence::new(bits)?,
        crossover_p,
        flip_count,
        receiver,
    })
}
