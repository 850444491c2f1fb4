//! Experiment configuration: JSON ingestion, validation with field-path
//! diagnostics, and documented defaults.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use qec_core::{
    ChannelModel, KeystreamMode, KeystreamSpec, ParamRange, QiGrid, QiParams, SessionConfig,
};

/// A configuration problem, reported with the JSON field path it concerns.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// Standard maximal-length tap sets, keyed by register length.
pub fn default_taps(key_bits: usize) -> Option<Vec<usize>> {
    let taps: &[usize] = match key_bits {
        2 => &[2, 1],
        3 => &[3, 2],
        4 => &[4, 3],
        5 => &[5, 3],
        6 => &[6, 5],
        7 => &[7, 6],
        8 => &[8, 6, 5, 4],
        10 => &[10, 7],
        12 => &[12, 11, 10, 4],
        16 => &[16, 14, 13, 11],
        20 => &[20, 17],
        24 => &[24, 23, 22, 17],
        _ => return None,
    };
    Some(taps.to_vec())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    cipher: Option<RawCipher>,
    qi: Option<RawQi>,
    channel: Option<RawChannel>,
    attack: Option<RawAttack>,
    sweep: Option<RawSweep>,
    seed: Option<u64>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCipher {
    key_bits: usize,
    mode: Option<KeystreamMode>,
    taps: Option<Vec<usize>>,
    plaintext_len: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQi {
    #[serde(rename = "W")]
    bandwidth: Option<f64>,
    #[serde(rename = "R")]
    bit_rate: Option<f64>,
    kappa_s: Option<f64>,
    #[serde(rename = "G_B")]
    gain: Option<f64>,
    #[serde(rename = "N_S")]
    source_brightness: Option<f64>,
    #[serde(rename = "N_B")]
    noise_photons: Option<f64>,
    #[serde(rename = "A")]
    dimensionless_gain: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    p_alice: f64,
    p_eve: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttack {
    known_plaintext_len: Option<usize>,
    trials: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(rename = "W")]
    bandwidth: Option<ParamRange>,
    #[serde(rename = "R")]
    bit_rate: Option<ParamRange>,
    kappa_s: Option<ParamRange>,
    #[serde(rename = "G_B")]
    gain: Option<ParamRange>,
    #[serde(rename = "N_S")]
    source_brightness: Option<ParamRange>,
    #[serde(rename = "N_B")]
    noise_photons: Option<ParamRange>,
    p_alice_max: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<OutputFormat>,
    path: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Cipher settings with defaults filled in.
#[derive(Clone, Debug)]
pub struct CipherConfig {
    pub key_bits: usize,
    pub mode: KeystreamMode,
    pub taps: Vec<usize>,
    pub plaintext_len: usize,
}

impl CipherConfig {
    pub fn keystream_spec(&self, output_len: usize) -> KeystreamSpec {
        match self.mode {
            KeystreamMode::Lfsr => KeystreamSpec::lfsr(self.taps.clone(), output_len),
            KeystreamMode::Otp => KeystreamSpec::otp(self.key_bits),
        }
    }
}

/// Fully validated experiment configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub cipher: CipherConfig,
    pub qi: Option<QiParams>,
    pub fixed_channel: Option<(f64, f64)>,
    pub known_plaintext_len: usize,
    pub trials: u64,
    pub sweep: Option<SweepConfig>,
    pub seed: u64,
    pub format: OutputFormat,
    pub output_path: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub grid: QiGrid,
    pub p_alice_max: f64,
}

impl ExperimentConfig {
    /// The physical parameters, required by formula-level subcommands.
    pub fn qi_params(&self) -> Result<QiParams> {
        self.qi.ok_or_else(|| ConfigError("qi: section required for this subcommand".into()))
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        match (self.qi, self.fixed_channel) {
            (_, Some((p_alice, p_eve))) => Ok(ChannelModel::Fixed { p_alice, p_eve }),
            (Some(params), None) => Ok(ChannelModel::QuantumIllumination(params)),
            (None, None) => err("one of qi or channel is required for this subcommand"),
        }
    }

    pub fn session_config(&self) -> Result<SessionConfig> {
        let plaintext_len = self.cipher.plaintext_len;
        let config = SessionConfig {
            key_bits: self.cipher.key_bits,
            keystream_spec: self.cipher.keystream_spec(plaintext_len),
            channel: self.channel_model()?,
            plaintext_len,
            known_plaintext_len: self.known_plaintext_len,
            master_seed: self.seed,
            paired_channel_seeds: false,
            fixed_plaintext: None,
        };
        config.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(config)
    }

    pub fn sweep(&self) -> Result<&SweepConfig> {
        self.sweep
            .as_ref()
            .ok_or_else(|| ConfigError("sweep: section required for the optimize subcommand".into()))
    }
}

/// Loads and validates a config file, naming every invalid field.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig = serde_json::from_str(&text).map_err(|e| {
        ConfigError(format!(
            "{} is not valid config JSON at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<ExperimentConfig> {
    let cipher = validate_cipher(raw.cipher)?;
    let qi = raw.qi.map(validate_qi).transpose()?;
    let fixed_channel = raw.channel.map(validate_channel).transpose()?;
    if qi.is_some() && fixed_channel.is_some() {
        return err("qi and channel are mutually exclusive; give one");
    }

    let attack = raw.attack.unwrap_or(RawAttack { known_plaintext_len: None, trials: None });
    let known_plaintext_len = attack.known_plaintext_len.unwrap_or(cipher.plaintext_len);
    if known_plaintext_len > cipher.plaintext_len {
        return err(format!(
            "attack.known_plaintext_len {known_plaintext_len} exceeds cipher.plaintext_len {}",
            cipher.plaintext_len
        ));
    }
    let trials = attack.trials.unwrap_or(100);
    if trials == 0 {
        return err("attack.trials must be at least 1");
    }

    let sweep = match raw.sweep {
        Some(s) => Some(validate_sweep(s, qi.as_ref())?),
        None => None,
    };

    let output = raw.output.unwrap_or(RawOutput { format: None, path: None });

    Ok(ExperimentConfig {
        cipher,
        qi,
        fixed_channel,
        known_plaintext_len,
        trials,
        sweep,
        seed: raw.seed.unwrap_or(0),
        format: output.format.unwrap_or(OutputFormat::Json),
        output_path: output.path,
    })
}

fn validate_cipher(raw: Option<RawCipher>) -> Result<CipherConfig> {
    let raw = match raw {
        Some(c) => c,
        None => return err("cipher: section is required"),
    };
    if raw.key_bits == 0 || raw.key_bits > 24 {
        return err(format!("cipher.key_bits {} outside 1..=24", raw.key_bits));
    }
    let mode = raw.mode.unwrap_or(KeystreamMode::Lfsr);
    let taps = match (mode, raw.taps) {
        (KeystreamMode::Otp, Some(_)) => return err("cipher.taps is meaningless in otp mode"),
        (KeystreamMode::Otp, None) => Vec::new(),
        (KeystreamMode::Lfsr, Some(taps)) => {
            if taps.is_empty() {
                return err("cipher.taps must be non-empty in lfsr mode");
            }
            if taps.iter().max() != Some(&raw.key_bits) {
                return err(format!(
                    "cipher.taps: max tap must equal key_bits {}",
                    raw.key_bits
                ));
            }
            if taps.iter().any(|&t| t == 0) {
                return err("cipher.taps: tap positions are 1-based");
            }
            taps
        }
        (KeystreamMode::Lfsr, None) => default_taps(raw.key_bits).ok_or_else(|| {
            ConfigError(format!(
                "cipher.taps: no default tap set for key_bits {}; specify taps explicitly",
                raw.key_bits
            ))
        })?,
    };
    let plaintext_len = raw.plaintext_len.unwrap_or(match mode {
        KeystreamMode::Lfsr => 4 * raw.key_bits,
        KeystreamMode::Otp => raw.key_bits,
    });
    if plaintext_len == 0 {
        return err("cipher.plaintext_len must be at least 1");
    }
    if mode == KeystreamMode::Otp && plaintext_len > raw.key_bits {
        return err(format!(
            "cipher.plaintext_len {plaintext_len} exceeds the {}-bit one-time pad",
            raw.key_bits
        ));
    }
    Ok(CipherConfig { key_bits: raw.key_bits, mode, taps, plaintext_len })
}

fn validate_qi(raw: RawQi) -> Result<QiParams> {
    let full = [raw.bandwidth, raw.bit_rate, raw.gain, raw.noise_photons];
    let reduced = raw.dimensionless_gain;
    let params = match (full.iter().any(Option::is_some), reduced) {
        (true, Some(_)) => {
            return err("qi: give either {W, R, G_B, N_B} or the reduced {A}, not both")
        }
        (false, None) => return err("qi: one of {W, R, G_B, N_B} or {A} is required"),
        (true, None) => {
            let get = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| ConfigError(format!("qi.{name} is required in the full form")))
            };
            QiParams::new(
                get(raw.bandwidth, "W")?,
                get(raw.bit_rate, "R")?,
                require_field(raw.kappa_s, "qi.kappa_s")?,
                get(raw.gain, "G_B")?,
                require_field(raw.source_brightness, "qi.N_S")?,
                get(raw.noise_photons, "N_B")?,
            )
        }
        (false, Some(a)) => QiParams::from_reduced(
            a,
            require_field(raw.kappa_s, "qi.kappa_s")?,
            require_field(raw.source_brightness, "qi.N_S")?,
        ),
    };
    params.map_err(|e| ConfigError(format!("qi: {e}")))
}

fn require_field(value: Option<f64>, name: &str) -> Result<f64> {
    value.ok_or_else(|| ConfigError(format!("{name} is required")))
}

fn validate_channel(raw: RawChannel) -> Result<(f64, f64)> {
    for (name, p) in [("p_alice", raw.p_alice), ("p_eve", raw.p_eve)] {
        if !(0.0..=0.5).contains(&p) {
            return err(format!("channel.{name} {p} outside [0, 0.5]"));
        }
    }
    Ok((raw.p_alice, raw.p_eve))
}

fn validate_sweep(raw: RawSweep, qi: Option<&QiParams>) -> Result<SweepConfig> {
    // Unswept fields stay fixed at their qi values.
    let fixed = |swept: Option<ParamRange>, base: Option<f64>, name: &str| match (swept, base) {
        (Some(range), _) => Ok(range),
        (None, Some(v)) => Ok(ParamRange::fixed(v)),
        (None, None) => err(format!("sweep.{name} missing and no qi.{name} value to fix it at")),
    };
    let grid = QiGrid {
        bandwidth: fixed(raw.bandwidth, qi.map(|p| p.bandwidth), "W")?,
        bit_rate: fixed(raw.bit_rate, qi.map(|p| p.bit_rate), "R")?,
        kappa_s: fixed(raw.kappa_s, qi.map(|p| p.kappa_s), "kappa_s")?,
        gain: fixed(raw.gain, qi.map(|p| p.gain), "G_B")?,
        source_brightness: fixed(raw.source_brightness, qi.map(|p| p.source_brightness), "N_S")?,
        noise_photons: fixed(raw.noise_photons, qi.map(|p| p.noise_photons), "N_B")?,
    };
    grid.validate().map_err(|e| ConfigError(format!("sweep: {e}")))?;
    let p_alice_max = raw.p_alice_max.unwrap_or(0.49);
    if !(0.0 < p_alice_max && p_alice_max < 0.5) {
        return err(format!("sweep.p_alice_max {p_alice_max} outside (0, 0.5)"));
    }
    Ok(SweepConfig { grid, p_alice_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn load_str(json: &str) -> Result<ExperimentConfig> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(json.as_bytes()).unwrap();
        load_config(f.path())
    }

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let cfg = load_str(r#"{"cipher": {"key_bits": 8}}"#).unwrap();
        assert_eq!(cfg.cipher.taps, vec![8, 6, 5, 4]);
        assert_eq!(cfg.cipher.plaintext_len, 32);
        assert_eq!(cfg.known_plaintext_len, 32);
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn out_of_range_transmissivity_names_the_field() {
        let e = load_str(
            r#"{"cipher": {"key_bits": 8}, "qi": {"A": 1e6, "kappa_s": 1.5, "N_S": 0.01}}"#,
        )
        .unwrap_err();
        assert!(e.0.contains("kappa_s"), "{e}");
    }

    #[test]
    fn full_and_reduced_qi_are_mutually_exclusive() {
        let e = load_str(
            r#"{"cipher": {"key_bits": 8},
                "qi": {"A": 1e6, "W": 1e9, "kappa_s": 0.2, "N_S": 0.01}}"#,
        )
        .unwrap_err();
        assert!(e.0.contains("not both"), "{e}");
    }

    #[test]
    fn qi_and_fixed_channel_are_mutually_exclusive() {
        let e = load_str(
            r#"{"cipher": {"key_bits": 8},
                "qi": {"A": 1e6, "kappa_s": 0.2, "N_S": 0.01},
                "channel": {"p_alice": 0.001, "p_eve": 0.49}}"#,
        )
        .unwrap_err();
        assert!(e.0.contains("mutually exclusive"), "{e}");
    }

    #[test]
    fn parse_errors_carry_a_position() {
        let e = load_str("{not json").unwrap_err();
        assert!(e.0.contains("line 1"), "{e}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = load_str(r#"{"cipher": {"key_bits": 8, "bogus": 1}}"#).unwrap_err();
        assert!(e.0.contains("bogus"), "{e}");
    }

    #[test]
    fn sweep_fixes_unswept_fields_at_qi_values() {
        let cfg = load_str(
            r#"{"cipher": {"key_bits": 8},
                "qi": {"A": 1e6, "kappa_s": 0.2, "N_S": 0.01},
                "sweep": {"N_S": {"min": 0.002, "max": 0.01, "steps": 3}}}"#,
        )
        .unwrap();
        let sweep = cfg.sweep().unwrap();
        assert_eq!(sweep.grid.source_brightness.steps, 3);
        assert_eq!(sweep.grid.kappa_s.min, 0.2);
        assert_eq!(sweep.grid.kappa_s.steps, 1);
    }
}
