use timtin_core::{catalog, finite_snr_rates, gdof_of_config, ChannelSpec, TxConfig};

/// Per-user rate slope against log2 P between two power levels.
fn slopes(spec: &ChannelSpec, tx: &TxConfig, low: f64, high: f64) -> Vec<f64> {
    let a = finite_snr_rates(spec, tx, low).unwrap();
    let b = finite_snr_rates(spec, tx, high).unwrap();
    a.iter().zip(&b).map(|(x, y)| (y - x) / (high / low).log2()).collect()
}

fn check_slopes(spec: ChannelSpec, tx: TxConfig) {
    let spec = spec.with_random_phases(9);
    let d = gdof_of_config(&spec, &tx).unwrap();
    let s = slopes(&spec, &tx, 1e6, 1e8);
    println!("gdof {:?}\nslope {s:?}", d.0);
    for (x, y) in s.iter().zip(&d.0) {
        assert!((x - y).abs() < 0.05, "slope {x} against {y}");
    }
}

#[test]
fn two_level_scheme_slope_matches_gdof() {
    check_slopes(catalog::two_level_network(), catalog::two_level_scheme());
}

#[test]
fn aligned_pair_slope_matches_gdof() {
    let (spec, tx) = catalog::aligned_pair_network();
    check_slopes(spec, tx);
}

#[test]
fn silenced_transmitter_has_vanishing_rate() {
    let spec = catalog::two_level_network().with_random_phases(4);
    let mut tx = catalog::two_level_scheme();
    tx.users[0][0].r = -60.0;
    let rates = finite_snr_rates(&spec, &tx, 1e4).unwrap();
    assert!(rates[0] < 1e-9, "{rates:?}");
}
