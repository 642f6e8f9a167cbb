//! Shared fixtures for the criterion benchmarks and the acceptance gate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timtin_core::linalg::random_unit_vector;
use timtin_core::{gen_cyclic_random, ChannelSpec, TxConfig, TxStream};

/// Cyclic network with `k` users at spread 0.5.
pub fn cyclic(k: usize, seed: u64) -> ChannelSpec {
    gen_cyclic_random(k, 0.5, seed).expect("valid generator parameters")
}

/// Random configuration with `b` streams per user over `n` channel uses.
pub fn random_config(k: usize, n: usize, b: usize, seed: u64) -> TxConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = (0..k)
        .map(|_| (0..b).map(|_| TxStream { v: random_unit_vector(n, &mut rng), r: -rng.gen::<f64>() }).collect())
        .collect();
    TxConfig::new(n, users).expect("valid configuration")
}
