//! Small hand-checked networks and configurations used as regression
//! fixtures by the tests, benchmarks and CLI.

use crate::channel::ChannelSpec;
use crate::linalg::planar;
use crate::scheme::{TxConfig, TxStream};

fn matrix(k: usize, entries: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut alpha = vec![vec![0.0; k]; k];
    for (i, row) in alpha.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for &(rx, tx, a) in entries {
        alpha[rx][tx] = a;
    }
    alpha
}

/// Three fully connected users with unit strengths; users 0 and 1 send two
/// streams, user 2 sends one, and at receiver 0 the first stream of user 1
/// arrives aligned with user 2's stream.
pub fn aligned_pair_network() -> (ChannelSpec, TxConfig) {
    let spec = ChannelSpec::new(vec![vec![1.0; 3]; 3]).expect("valid network");
    let aligned = planar(1.2);
    let tx = TxConfig::new(
        2,
        vec![
            vec![TxStream { v: planar(0.0), r: 0.0 }, TxStream { v: planar(0.5), r: -0.1 }],
            vec![TxStream { v: aligned.clone(), r: -0.5 }, TxStream { v: planar(2.1), r: -0.6 }],
            vec![TxStream { v: aligned, r: -0.3 }],
        ],
    )
    .expect("valid configuration");
    (spec, tx)
}

/// Five users with strong (exponent 1) and medium (exponent 1/2) cross links.
pub fn two_level_network() -> ChannelSpec {
    let strong = [(0, 3), (1, 0), (2, 1), (2, 4), (3, 0), (4, 3)];
    let medium = [(0, 1), (1, 2), (1, 4), (2, 3), (3, 4)];
    let entries: Vec<_> = strong
        .iter()
        .map(|&(r, t)| (r, t, 1.0))
        .chain(medium.iter().map(|&(r, t)| (r, t, 0.5)))
        .collect();
    ChannelSpec::new(matrix(5, &entries)).expect("valid network")
}

/// Strong links of [`two_level_network`].
pub fn two_level_strong_links() -> Vec<(usize, usize)> {
    vec![(0, 3), (1, 0), (2, 1), (2, 4), (3, 0), (4, 3)]
}

/// Symmetric 0.3-per-user scheme on [`two_level_network`]: two channel
/// uses, users 1 and 4 share a beamformer, staggered powers.
pub fn two_level_scheme() -> TxConfig {
    let (a, b, c, d) = (planar(0.0), planar(0.8), planar(1.7), planar(2.5));
    TxConfig::single_stream(2, vec![a, b.clone(), c, d, b], &[0.0, -0.1, -0.2, -0.3, -0.4])
        .expect("valid configuration")
}

/// Beamformers over two channel uses that let every receiver of
/// [`two_level_network`] null its strong interferers and the medium
/// link from user 2 into receiver 1.
pub fn two_level_improved_vectors() -> Vec<crate::linalg::CVector> {
    let (a, b, c) = (planar(0.0), planar(0.8), planar(1.7));
    vec![a.clone(), b.clone(), a, c, b]
}

/// Five users, unit link strengths, with the interferer sets
/// `{2,3}, {2,3}, {0,4}, {0,4}, {3}` at receivers 0..4.
pub fn unit_five_user_network() -> ChannelSpec {
    let sets: [&[usize]; 5] = [&[2, 3], &[2, 3], &[0, 4], &[0, 4], &[3]];
    let entries: Vec<_> = sets
        .iter()
        .enumerate()
        .flat_map(|(rx, s)| s.iter().map(move |&tx| (rx, tx, 1.0)))
        .collect();
    ChannelSpec::new(matrix(5, &entries)).expect("valid network")
}

/// Starting configuration for [`unit_five_user_network`] with generic
/// beamformers over two channel uses.
pub fn unit_five_user_start() -> TxConfig {
    let vectors = [0.1, 0.7, 1.3, 1.9, 2.5].iter().map(|&t| planar(t)).collect();
    TxConfig::single_stream(2, vectors, &[-0.1, -0.3, -0.7, -0.4, -0.2]).expect("valid configuration")
}
