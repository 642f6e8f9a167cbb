use timtin_core::catalog;
use timtin_core::{gdof_of_config, lexicographic_order, run_zest_from, stream_gdof, zest_iterate, zfsc_receivers, ZestState};

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
}

#[test]
fn unit_five_user_first_cycle() {
    let spec = catalog::unit_five_user_network();
    let state = ZestState::from_tx(&spec, catalog::unit_five_user_start()).unwrap();
    let next = zest_iterate(&state, &spec).unwrap();
    let row = &next.trace.rows[0];
    println!("{row:?}");
    assert!(close(&row.forward.0, &[0.3, 0.2, 0.0, 0.0, 0.4]));
    assert!(close(&row.switch_reciprocal.0, &[0.35, 0.35, 0.0, 0.1, 0.4]));
    assert!(close(&row.reciprocal.0, &[0.35, 0.35, 0.1, 0.1, 0.5]));
    assert!(close(&row.switch_forward.0, &[0.5; 5]));
    let run = run_zest_from(&spec, state, 100, 1e-6).unwrap();
    assert!((run.sum_gdof() - 2.5).abs() < 1e-9);
    assert!(run.converged);
}

#[test]
fn two_level_scheme_gives_point_three() {
    let spec = catalog::two_level_network();
    let tx = catalog::two_level_scheme();
    assert!(close(&gdof_of_config(&spec, &tx).unwrap().0, &[0.3; 5]));
    let rx = zfsc_receivers(&spec, &tx, &lexicographic_order(&tx.stream_counts())).unwrap();
    let per: Vec<f64> = stream_gdof(&spec, &tx, &rx).unwrap().iter().map(|s| s.iter().sum()).collect();
    assert!(close(&per, &[0.3; 5]));
}

#[test]
fn aligned_pair_receiver_zero() {
    let (spec, tx) = catalog::aligned_pair_network();
    let d = gdof_of_config(&spec, &tx).unwrap();
    assert!((d.0[0] - 0.4).abs() < 1e-9);
    for order in [vec![vec![0, 1], vec![0, 1], vec![0]], vec![vec![1, 0], vec![1, 0], vec![0]]] {
        let rx = zfsc_receivers(&spec, &tx, &order).unwrap();
        let s = stream_gdof(&spec, &tx, &rx).unwrap();
        println!("{s:?}");
        assert!((s[0].iter().sum::<f64>() - 0.4).abs() < 1e-9);
    }
}

#[test]
fn two_level_decompositions() {
    use timtin_core::{factor_bound, Decomposition, QuantizationScheme, TimTopology, tin_optimality_check, tin_symmetric_gdof};
    let spec = catalog::two_level_network();
    let q = QuantizationScheme::new(vec![0.0, 0.5]).unwrap();
    let plain = Decomposition::by_threshold(&spec, 0.5);
    assert!(tin_optimality_check(&plain.tin_component(&spec)));
    let (d, _) = tin_symmetric_gdof(&plain.tin_component(&spec), 1e-9).unwrap();
    assert!((d - 0.6).abs() < 1e-6, "{d}");
    let scheme_vectors = catalog::two_level_scheme().users.iter().map(|s| s[0].v.clone()).collect();
    let r = factor_bound(&spec, &q, &plain, &TimTopology::Explicit { n: 2, vectors: scheme_vectors }).unwrap();
    println!("{r:?}");
    assert!((r.factor - 5.0 / 3.0).abs() < 1e-6 && r.verified);

    let mut tim: Vec<_> = plain.tim_links().iter().copied().collect();
    tim.push((1, 2));
    let tin: Vec<_> = plain.tin_links().iter().copied().filter(|&l| l != (1, 2)).collect();
    let improved = Decomposition::new(&spec, tim, tin).unwrap();
    let (d, _) = tin_symmetric_gdof(&improved.tin_component(&spec), 1e-9).unwrap();
    assert!((d - 2.0 / 3.0).abs() < 1e-6, "{d}");
    let r = factor_bound(&spec, &q, &improved, &TimTopology::Explicit { n: 2, vectors: catalog::two_level_improved_vectors() }).unwrap();
    println!("{r:?}");
    assert!((r.factor - 1.5).abs() < 1e-6 && r.verified);
}
