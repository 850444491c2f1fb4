//! Batch front-end for the cipher simulator.
//!
//! One declarative JSON config plus a subcommand per experiment; every
//! stochastic output is fully determined by `--seed` (or the config seed).

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use qec_core::{
    advantage_holds, brute_force_attack, decrypt, encrypt, error_ratio, expand_keystream,
    generate_key, measure_advantage, optimize_eta, run_session, sweep_eta, verify_perfect_secrecy,
    BitSequence, Error as CoreError, KeyPrior, KeystreamMode, MessagePrior, SecretKey,
};

use config::{load_config, ConfigError, ExperimentConfig, OutputFormat};

/// Environment variable naming the default output directory for relative paths.
const OUT_DIR_ENV: &str = "QEC_OUT_DIR";

#[derive(Parser)]
#[command(name = "qec", about = "Quantum enigma cipher simulator", version)]
struct Cli {
    /// Experiment configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format override.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Trial-count override for simulate.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Error-advantage threshold for the eta feasibility check.
    #[arg(long, global = true, default_value_t = 1e3)]
    threshold: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a secret key from the uniform prior.
    Keygen,
    /// Encrypt a bit-string message with an explicit key.
    Encrypt {
        /// Plaintext as a '0'/'1' string.
        #[arg(long)]
        message: String,
        /// Key as a '0'/'1' string.
        #[arg(long, conflicts_with = "key_hex")]
        key: Option<String>,
        /// Key as hexadecimal; bit length comes from cipher.key_bits.
        #[arg(long)]
        key_hex: Option<String>,
    },
    /// Decrypt a bit-string ciphertext with an explicit key.
    Decrypt {
        /// Ciphertext as a '0'/'1' string.
        #[arg(long)]
        message: String,
        #[arg(long, conflicts_with = "key_hex")]
        key: Option<String>,
        #[arg(long)]
        key_hex: Option<String>,
    },
    /// Bit-error probabilities of both receivers from the QI parameters.
    Ber,
    /// Error-advantage ratio at the configured parameter point.
    Eta,
    /// Constrained grid maximization of the error-advantage ratio.
    Optimize,
    /// One session plus brute-force key attacks on both observations.
    Attack,
    /// Trial-averaged guessing-probability advantage measurement.
    Simulate,
    /// Exhaustive perfect-secrecy verification of the configured cipher.
    Secrecy,
}

enum AppError {
    /// Bad configuration or usage: exit 2.
    Config(String),
    /// Valid configuration but a domain failure: exit 1.
    Domain(String),
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e.to_string())
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(_) => AppError::Config(e.to_string()),
            _ => AppError::Domain(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| AppError::Config("--config <path> is required".into()))?;
    let mut config = load_config(config_path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let format = cli.format.unwrap_or(config.format);

    let subcommand_name = match &cli.command {
        Command::Keygen => "keygen",
        Command::Encrypt { .. } => "encrypt",
        Command::Decrypt { .. } => "decrypt",
        Command::Ber => "ber",
        Command::Eta => "eta",
        Command::Optimize => "optimize",
        Command::Attack => "attack",
        Command::Simulate => "simulate",
        Command::Secrecy => "secrecy",
    };

    let report = match &cli.command {
        Command::Keygen => cmd_keygen(&config),
        Command::Encrypt { message, key, key_hex } => {
            cmd_crypt(&config, message, key.as_deref(), key_hex.as_deref(), true)
        }
        Command::Decrypt { message, key, key_hex } => {
            cmd_crypt(&config, message, key.as_deref(), key_hex.as_deref(), false)
        }
        Command::Ber => cmd_ber(&config),
        Command::Eta => cmd_eta(&config, cli.threshold),
        Command::Optimize => cmd_optimize(&config, format),
        Command::Attack => cmd_attack(&config),
        Command::Simulate => cmd_simulate(&config, cli.trials, format),
        Command::Secrecy => cmd_secrecy(&config),
    }?;

    let path = resolve_out_path(cli.out, &config, subcommand_name, format);
    std::fs::write(&path, &report)
        .map_err(|e| AppError::Domain(format!("cannot write {}: {e}", path.display())))?;
    print!("{report}");
    eprintln!("report written to {}", path.display());
    Ok(())
}

fn resolve_out_path(
    cli_out: Option<PathBuf>,
    config: &ExperimentConfig,
    subcommand: &str,
    format: OutputFormat,
) -> PathBuf {
    let ext = match format {
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
    };
    let path = cli_out
        .or_else(|| config.output_path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{subcommand}.{ext}")));
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return Path::new(&dir).join(path);
        }
    }
    path
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_keygen(config: &ExperimentConfig) -> Result<String, AppError> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(config.seed);
    let key = generate_key(config.cipher.key_bits, &KeyPrior::Uniform, &mut rng)?;
    Ok(to_json(&json!({
        "key_bits": key.key_bits(),
        "bits": key.bits().to_string(),
        "hex": key.bits().to_hex()?,
    })))
}

use rand_chacha::rand_core::SeedableRng as _;

fn parse_key(
    config: &ExperimentConfig,
    key: Option<&str>,
    key_hex: Option<&str>,
) -> Result<SecretKey, AppError> {
    let bits = match (key, key_hex) {
        (Some(bits), None) => bits.parse::<BitSequence>()?,
        (None, Some(hex)) => BitSequence::from_hex(hex, config.cipher.key_bits)?,
        _ => return Err(AppError::Config("exactly one of --key or --key-hex is required".into())),
    };
    if bits.len() != config.cipher.key_bits {
        return Err(AppError::Config(format!(
            "key of {} bits does not match cipher.key_bits {}",
            bits.len(),
            config.cipher.key_bits
        )));
    }
    Ok(SecretKey::new(bits)?)
}

fn cmd_crypt(
    config: &ExperimentConfig,
    message: &str,
    key: Option<&str>,
    key_hex: Option<&str>,
    encrypting: bool,
) -> Result<String, AppError> {
    let secret = parse_key(config, key, key_hex)?;
    let input = message.parse::<BitSequence>()?;
    let spec = config.cipher.keystream_spec(input.len());
    let keystream = expand_keystream(&secret, &spec)?;
    let output = if encrypting {
        encrypt(&input, &keystream)?
    } else {
        decrypt(&input, &keystream)?
    };
    let (in_label, out_label) =
        if encrypting { ("plaintext", "ciphertext") } else { ("ciphertext", "plaintext") };
    Ok(to_json(&json!({
        in_label: input.to_string(),
        out_label: output.to_string(),
        "key": secret.bits().to_string(),
        "mode": if config.cipher.mode == KeystreamMode::Lfsr { "lfsr" } else { "otp" },
    })))
}

fn cmd_ber(config: &ExperimentConfig) -> Result<String, AppError> {
    let params = config.qi_params()?;
    let report = error_ratio(&params)?;
    Ok(to_json(&json!({
        "p_eve": report.p_eve,
        "p_alice": report.p_alice,
    })))
}

fn cmd_eta(config: &ExperimentConfig, threshold: f64) -> Result<String, AppError> {
    let params = config.qi_params()?;
    let report = error_ratio(&params)?;
    let holds = advantage_holds(&params, threshold)?;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["advantage_threshold"] = json!(threshold);
    value["advantage_holds"] = json!(holds);
    Ok(to_json(&value))
}

fn cmd_optimize(config: &ExperimentConfig, format: OutputFormat) -> Result<String, AppError> {
    let sweep = config.sweep()?;
    match format {
        OutputFormat::Json => {
            let best = optimize_eta(&sweep.grid, sweep.p_alice_max)?;
            let mut value = serde_json::to_value(&best).expect("report serializes");
            value["p_alice_max"] = json!(sweep.p_alice_max);
            Ok(to_json(&value))
        }
        OutputFormat::Csv => {
            let mut out =
                String::from("W,R,kappa_s,G_B,N_S,N_B,A,p_eve,p_alice,ln_eta,eta,feasible\n");
            for r in sweep_eta(&sweep.grid)? {
                let p = r.params;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    p.bandwidth,
                    p.bit_rate,
                    p.kappa_s,
                    p.gain,
                    p.source_brightness,
                    p.noise_photons,
                    p.dimensionless_gain(),
                    r.p_eve,
                    r.p_alice,
                    r.ln_eta,
                    r.eta,
                    r.p_alice <= sweep.p_alice_max,
                );
            }
            Ok(out)
        }
    }
}

fn cmd_attack(config: &ExperimentConfig) -> Result<String, AppError> {
    let session = config.session_config()?;
    let transcript = run_session(&session)?;
    let known = transcript.plaintext.prefix(config.known_plaintext_len)?;
    let spec = session.keystream_spec.with_output_len(config.known_plaintext_len);
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
    Ok(to_json(&json!({
        "session": {
            "true_key": transcript.true_key.bits().to_string(),
            "plaintext": transcript.plaintext.to_string(),
            "ciphertext": transcript.ciphertext.to_string(),
            "p_alice": transcript.p_alice,
            "p_eve": transcript.p_eve,
            "flip_count_alice": transcript.alice_obs.flip_count,
            "flip_count_eve": transcript.eve_obs.flip_count,
        },
        "alice": serde_json::to_value(&alice).expect("report serializes"),
        "eve": serde_json::to_value(&eve).expect("report serializes"),
    })))
}

fn cmd_simulate(
    config: &ExperimentConfig,
    trials_override: Option<u64>,
    format: OutputFormat,
) -> Result<String, AppError> {
    let session = config.session_config()?;
    let trials = trials_override.unwrap_or(config.trials);
    let (report, records) = measure_advantage(&session, trials)?;
    match format {
        OutputFormat::Json => {
            Ok(to_json(&serde_json::to_value(&report).expect("report serializes")))
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "trial,pg_eve,pg_legit,eve_recovered,alice_recovered,flip_count_eve,flip_count_alice\n",
            );
            for r in &records {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.trial,
                    r.pg_eve,
                    r.pg_legit,
                    r.eve_recovered,
                    r.alice_recovered,
                    r.flip_count_eve,
                    r.flip_count_alice
                );
            }
            Ok(out)
        }
    }
}

fn cmd_secrecy(config: &ExperimentConfig) -> Result<String, AppError> {
    let m = config.cipher.plaintext_len;
    if m > 12 {
        return Err(AppError::Config(format!(
            "secrecy enumerates all (message, ciphertext) pairs; cipher.plaintext_len {m} exceeds 12"
        )));
    }
    let prior = MessagePrior::uniform(m)?;
    let spec = config.cipher.keystream_spec(m);
    let report = verify_perfect_secrecy(&prior, &KeyPrior::Uniform, &spec, 1e-12)?;
    Ok(to_json(&json!({
        "holds": report.holds,
        "max_deviation": report.max_deviation,
        "message_bits": m,
        "mode": if config.cipher.mode == KeystreamMode::Lfsr { "lfsr" } else { "otp" },
    })))
}
