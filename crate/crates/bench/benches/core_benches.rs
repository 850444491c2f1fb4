use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use qec_core::{
    brute_force_attack, expand_keystream, run_session, transmit_bsc, BitSequence, ChannelModel,
    KeyPrior, KeystreamSpec, Receiver, SecretKey, SessionConfig,
};

fn bench_lfsr_keystream(c: &mut Criterion) {
    let key = SecretKey::from_int(0xACE1, 16).unwrap();
    let spec = KeystreamSpec::lfsr(vec![16, 14, 13, 11], 65536);
    c.bench_function("lfsr_keystream_64k_bits", |b| {
        b.iter(|| expand_keystream(&key, &spec).unwrap())
    });
}

fn bench_bsc_transmission(c: &mut Criterion) {
    let sent = BitSequence::zeros(100_000);
    c.bench_function("bsc_transmit_100k_bits", |b| {
        b.iter_batched(
            || ChaCha12Rng::seed_from_u64(42),
            |mut rng| transmit_bsc(&sent, 0.1, &mut rng, Receiver::Eve).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_brute_force_attack(c: &mut Criterion) {
    let config = SessionConfig {
        key_bits: 12,
        keystream_spec: KeystreamSpec::lfsr(vec![12, 11, 10, 4], 64),
        channel: ChannelModel::Fixed { p_alice: 1e-3, p_eve: 0.45 },
        plaintext_len: 64,
        known_plaintext_len: 64,
        master_seed: 7,
        paired_channel_seeds: false,
        fixed_plaintext: None,
    };
    let transcript = run_session(&config).unwrap();
    let known = transcript.plaintext.prefix(64).unwrap();
    c.bench_function("brute_force_attack_12bit_key_64_bits", |b| {
        b.iter(|| {
            brute_force_attack(
                &transcript.eve_obs,
                &known,
                &config.keystream_spec,
                &KeyPrior::Uniform,
                Some(&transcript.true_key),
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_lfsr_keystream,
    bench_bsc_transmission,
    bench_brute_force_attack
);
criterion_main!(benches);
