use spexp::channels::{expansion_ratio, BistochasticTuple, Subspace};
use spexp::graphs::{build_complete, build_cycle, build_hypercube, decompose_permutations, edge_expansion_bruteforce};
use spexp::numlin::{gaussian_matrix, haar_unitary, Complex64};
use spexp::rng::substream;
use spexp::search::{
    descend, estimate, estimate_h, minimize_coordinate, objective_and_gradient, objective_and_gradient_at, Mode,
    SearchConfig, Strategy, Witness,
};
use spexp::Error;

fn cycle_tuple(n: usize) -> BistochasticTuple {
    let fwd: Vec<usize> = (0..n).map(|j| (j + 1) % n).collect();
    let back: Vec<usize> = (0..n).map(|j| (j + n - 1) % n).collect();
    BistochasticTuple::from_permutations(&[fwd, back]).unwrap()
}

fn mixed_tuple(n: usize, d: usize, seed: u64) -> BistochasticTuple {
    BistochasticTuple::random_unitary(n, d, seed)
        .unwrap()
        .mixed(&haar_unitary(d, seed + 1000).unwrap())
        .unwrap()
}

/// Central difference of `f` along a random direction against `Re Tr[G* E]`.
fn fd_relative_error(t: &BistochasticTuple, k: usize, p: f64, eps: f64, seed: u64) -> f64 {
    let n = t.n();
    let q = Subspace::haar(n, k, seed).unwrap();
    let (_, g) = objective_and_gradient(t, &q, p, eps).unwrap();
    let mut rng = substream(seed, 99);
    let dir = gaussian_matrix(n, k, &mut rng);
    let dir = dir.scale_real(1.0 / dir.frobenius_norm());
    let h = 1e-5;
    let shifted = |s: f64| {
        let mut m = q.basis().clone();
        m.axpy(Complex64::new(s, 0.0), &dir);
        objective_and_gradient_at(t, &m, p, eps).unwrap().0
    };
    let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
    let analytic = g.real_inner(&dir);
    (fd - analytic).abs() / analytic.abs().max(1e-8)
}

#[test]
fn coordinate_examples() {
    let c8 = minimize_coordinate(&cycle_tuple(8), 2.0, Mode::Sp, None).unwrap();
    assert_eq!(c8.value, 0.25);
    assert_eq!(c8.witness, Witness::Subset { vertices: vec![0, 1, 2, 3] });

    let k4 = build_complete(4).unwrap();
    let t = BistochasticTuple::from_permutations(&decompose_permutations(&k4).unwrap()).unwrap();
    let est = minimize_coordinate(&t, 2.0, Mode::Q, None).unwrap();
    assert!((est.value - 2.0 / 3.0).abs() < 1e-12);

    let id = minimize_coordinate(&BistochasticTuple::identity(6, 3).unwrap(), 1.0, Mode::Sp, None).unwrap();
    assert_eq!(id.value, 0.0);
    assert_eq!(id.witness, Witness::Subset { vertices: vec![0] });
}

#[test]
fn permutation_tuples_recover_edge_expansion() {
    for g in [build_cycle(8).unwrap(), build_complete(5).unwrap(), build_hypercube(3).unwrap()] {
        let h = edge_expansion_bruteforce(&g).unwrap().value;
        let t = BistochasticTuple::from_permutations(&decompose_permutations(&g).unwrap()).unwrap();
        for (mode, p) in [(Mode::Sp, 1.0), (Mode::Sp, 2.0), (Mode::Sp, 3.5), (Mode::Q, 2.0)] {
            let est = minimize_coordinate(&t, p, mode, None).unwrap();
            assert!((est.value - h).abs() < 1e-12, "{mode:?} p={p}: {} vs {h}", est.value);
        }
    }
}

#[test]
fn coordinate_rejects_large_instances() {
    let t = BistochasticTuple::identity(25, 1).unwrap();
    assert!(matches!(
        minimize_coordinate(&t, 2.0, Mode::Sp, None),
        Err(Error::InstanceTooLarge { n: 25, .. })
    ));
}

#[test]
fn witnesses_recompute_exactly() {
    let t = mixed_tuple(6, 3, 4);
    for strategy in [Strategy::CoordinateExhaustive, Strategy::RandomSample, Strategy::Riemannian] {
        for (mode, p) in [(Mode::Sp, 1.5), (Mode::Sp, 3.0), (Mode::Q, 2.0), (Mode::Dim, 1.0)] {
            if strategy == Strategy::Riemannian && mode == Mode::Dim {
                continue;
            }
            let cfg = SearchConfig {
                strategy,
                samples: 20,
                restarts: 2,
                max_iters: 40,
                seed: 11,
                ..SearchConfig::default()
            };
            let est = estimate(&t, mode, p, &cfg).unwrap();
            let again = est.recompute(&t).unwrap();
            assert!(
                (again - est.value).abs() <= 1e-9 * est.value.abs().max(1e-12),
                "{strategy:?} {mode:?}: {} vs {again}",
                est.value
            );
        }
    }
}

#[test]
fn random_sampling_is_prefix_monotone_and_deterministic() {
    let t = cycle_tuple(4);
    let mut cfg = SearchConfig {
        strategy: Strategy::RandomSample,
        k: Some(2),
        samples: 100,
        seed: 3,
        ..SearchConfig::default()
    };
    let small = estimate_h(&t, 2.0, &cfg).unwrap();
    assert_eq!(small, estimate_h(&t, 2.0, &cfg).unwrap());
    cfg.samples = 1000;
    let large = estimate_h(&t, 2.0, &cfg).unwrap();
    assert!(large.value <= small.value);
    assert!(small.value >= 0.0);

    let id = estimate_h(&BistochasticTuple::identity(5, 2).unwrap(), 2.0, &cfg).unwrap();
    assert!(id.value.abs() < 1e-24);
}

#[test]
fn gradient_matches_finite_differences() {
    for seed in 0..10 {
        let t = mixed_tuple(6, 3, seed);
        let err2 = fd_relative_error(&t, 2, 2.0, 0.0, seed);
        assert!(err2 < 1e-5, "p=2 seed {seed}: {err2}");
        let err15 = fd_relative_error(&t, 2, 1.5, 1e-8, seed);
        assert!(err15 < 1e-4, "p=1.5 seed {seed}: {err15}");
        let err3 = fd_relative_error(&t, 3, 3.0, 0.0, seed);
        assert!(err3 < 1e-5, "p=3 seed {seed}: {err3}");
    }
}

#[test]
fn nonsmooth_configuration_is_rejected() {
    let t = cycle_tuple(4);
    let q = Subspace::coordinate(4, &[0]).unwrap();
    assert_eq!(
        objective_and_gradient(&t, &q, 1.0, 0.0).unwrap_err(),
        Error::NonSmoothConfiguration { p: 1.0 }
    );
    let cfg = SearchConfig {
        strategy: Strategy::Riemannian,
        epsilon: 0.0,
        ..SearchConfig::default()
    };
    assert!(matches!(estimate_h(&t, 1.2, &cfg), Err(Error::NonSmoothConfiguration { .. })));
}

#[test]
fn identity_objective_is_pure_smoothing() {
    let t = BistochasticTuple::identity(5, 2).unwrap();
    let q = Subspace::haar(5, 2, 1).unwrap();
    let (value, g) = objective_and_gradient(&t, &q, 1.0, 1e-8).unwrap();
    assert!(value <= 2.0 * 5.0 * 1e-4 * (1.0 + 1e-9));
    assert!(g.is_finite());
}

#[test]
fn descent_traces_are_nonincreasing() {
    let cfg = SearchConfig {
        strategy: Strategy::Riemannian,
        max_iters: 60,
        ..SearchConfig::default()
    };
    for seed in 0..4 {
        let t = mixed_tuple(8, 3, seed);
        for (p, eps) in [(2.0, 0.0), (1.3, 1e-10), (4.0, 0.0)] {
            let start = Subspace::haar(8, 3, seed + 50).unwrap();
            let run = descend(&t, p, eps, &start, &cfg, 0).unwrap();
            assert!(run.objective_trace.windows(2).all(|w| w[1] <= w[0]));
            assert!(run.objective_trace.last() < run.objective_trace.first());
        }
    }
}

#[test]
fn riemannian_examples() {
    let cfg = SearchConfig {
        strategy: Strategy::Riemannian,
        restarts: 8,
        k: Some(2),
        seed: 5,
        ..SearchConfig::default()
    };
    let c4 = estimate_h(&cycle_tuple(4), 2.0, &cfg).unwrap();
    assert!(c4.value <= 0.5 + 1e-6);

    let cfg = SearchConfig {
        restarts: 16,
        k: None,
        ..cfg
    };
    let c8 = estimate_h(&cycle_tuple(8), 2.0, &cfg).unwrap();
    assert!(c8.value <= 0.25 + 1e-6, "{}", c8.value);

    let id = estimate_h(&BistochasticTuple::identity(6, 2).unwrap(), 2.0, &cfg).unwrap();
    assert!(id.value < 1e-9);

    assert!(matches!(
        estimate(&cycle_tuple(6), Mode::Dim, 1.0, &cfg),
        Err(Error::InfeasibleConfiguration(_))
    ));
}

#[test]
fn riemannian_beats_coordinates_on_a_cycle() {
    // the shift has Fourier eigenvectors; an invariant subspace has ratio 0
    let cfg = SearchConfig {
        strategy: Strategy::Riemannian,
        restarts: 4,
        k: Some(2),
        seed: 1,
        ..SearchConfig::default()
    };
    let est = estimate_h(&cycle_tuple(6), 2.0, &cfg).unwrap();
    let coord = minimize_coordinate(&cycle_tuple(6), 2.0, Mode::Sp, Some(2)).unwrap();
    assert!(est.value < coord.value);
}

#[test]
fn shared_candidates_respect_exponent_comparison() {
    // the same Haar candidates under p and q: per-candidate inequalities lift
    // to the minima
    let t = mixed_tuple(8, 3, 9);
    let (p, q) = (3.0, 1.5);
    let d = t.d() as f64;
    let cfg = SearchConfig {
        strategy: Strategy::RandomSample,
        samples: 50,
        seed: 2,
        ..SearchConfig::default()
    };
    let ep = estimate_h(&t, p, &cfg).unwrap().value;
    let eq = estimate_h(&t, q, &cfg).unwrap().value;
    assert!(ep <= d.powf((p - q) / 2.0) * eq + 1e-9);
    assert!(eq <= ep.powf(q / p) + 1e-9);
}

#[test]
fn estimate_json_carries_the_basis() {
    let cfg = SearchConfig {
        strategy: Strategy::RandomSample,
        samples: 5,
        ..SearchConfig::default()
    };
    let est = estimate_h(&cycle_tuple(4), 2.0, &cfg).unwrap();
    let json = serde_json::to_string(&est).unwrap();
    let back: spexp::search::ExpansionEstimate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, est);
    let v = expansion_ratio(&cycle_tuple(4), &back.witness_subspace(4).unwrap(), back.mode.ratio_kind(back.p)).unwrap();
    assert!((v.value - est.value).abs() < 1e-12);
}
