use spexp::embedlab::{
    distortion, embedding_ratio, lp_expansion_estimate, sp_expansion_estimate, DistortionReport, EmbedConfig,
    VertexEmbedding,
};
use spexp::graphs::{
    build_complete, build_cycle, build_hypercube, cut_oracle_l1, metric_ratio_r, random_regular,
    shortest_path_metric, spectral_l2_expansion, RegularGraph,
};
use spexp::numlin::gaussian_matrix;
use spexp::rng::{real_normal, substream};

fn small_builder_graphs() -> Vec<(String, RegularGraph)> {
    let mut out = Vec::new();
    for n in 3..=10 {
        out.push((format!("C{n}"), build_cycle(n).unwrap()));
    }
    for n in 2..=10 {
        out.push((format!("K{n}"), build_complete(n).unwrap()));
    }
    for k in 1..=3 {
        out.push((format!("Q{k}"), build_hypercube(k).unwrap()));
    }
    out
}

fn random_vectors(n: usize, m: usize, p: f64, seed: u64) -> VertexEmbedding {
    let mut rng = substream(seed, 0);
    VertexEmbedding::vectors(p, (0..n).map(|_| (0..m).map(|_| real_normal(&mut rng)).collect()).collect()).unwrap()
}

fn random_matrices(n: usize, m: usize, p: f64, seed: u64) -> VertexEmbedding {
    let mut rng = substream(seed, 1);
    VertexEmbedding::matrices(p, (0..n).map(|_| gaussian_matrix(m, m, &mut rng)).collect()).unwrap()
}

#[test]
fn lp_estimates_bracket_the_exact_values() {
    let cfg = EmbedConfig::default();
    for (name, g) in small_builder_graphs() {
        let n = g.n();
        let l1 = cut_oracle_l1(&g).unwrap().value;
        let e1 = lp_expansion_estimate(&g, 1.0, n, &cfg).unwrap();
        assert!(e1.value >= l1 - 1e-9 && e1.value <= 1.15 * l1, "{name} p=1: {} vs {l1}", e1.value);
        let l2 = spectral_l2_expansion(&g).unwrap();
        let e2 = lp_expansion_estimate(&g, 2.0, n, &cfg).unwrap();
        assert!(e2.value >= l2 - 1e-9 && e2.value <= 1.05 * l2, "{name} p=2: {} vs {l2}", e2.value);
        for e in [&e1, &e2] {
            let again = embedding_ratio(&g, &e.witness).unwrap();
            assert!((again - e.value).abs() <= 1e-9 * e.value);
        }
    }
}

#[test]
fn complete_graphs_have_constant_ratio() {
    for n in [4, 5, 6] {
        let g = build_complete(n).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let expected = (n as f64 / (n as f64 - 1.0)).powf(1.0 / p);
            for seed in 0..20 {
                for f in [random_vectors(n, 3, p, seed), random_matrices(n, 2, p, seed)] {
                    assert!((embedding_ratio(&g, &f).unwrap() - expected).abs() < 1e-12);
                }
            }
            let est = lp_expansion_estimate(&g, p, n, &EmbedConfig::default()).unwrap();
            assert!((est.value - expected).abs() < 1e-6);
        }
    }
}

#[test]
fn sp_estimates_do_not_exceed_lp() {
    let cfg = EmbedConfig {
        restarts: 2,
        max_iters: 60,
        ..EmbedConfig::default()
    };
    let k4 = build_complete(4).unwrap();
    for p in [1.0, 2.0, 3.0] {
        let est = sp_expansion_estimate(&k4, p, 3, &cfg).unwrap();
        assert!((est.value - (4.0f64 / 3.0).powf(1.0 / p)).abs() < 1e-6);
    }
    let c4 = build_cycle(4).unwrap();
    let s2 = sp_expansion_estimate(&c4, 2.0, 4, &cfg).unwrap();
    assert!((s2.value - 1.0).abs() <= 0.05);
    for (g, p) in [(build_cycle(6).unwrap(), 1.5), (build_hypercube(3).unwrap(), 3.0), (c4, 1.0)] {
        let lp = lp_expansion_estimate(&g, p, 4, &cfg).unwrap();
        let sp = sp_expansion_estimate(&g, p, 4, &cfg).unwrap();
        assert!(sp.value <= lp.value + 1e-6, "{} vs {}", sp.value, lp.value);
        assert!((embedding_ratio(&g, &sp.witness).unwrap() - sp.value).abs() <= 1e-9 * sp.value);
    }
}

#[test]
fn identity_like_embedding_matches_distance_matrix() {
    let g = build_cycle(8).unwrap();
    let images: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let f = VertexEmbedding::vectors(2.0, images).unwrap();
    // independent pipeline: all off-diagonal squared distances are 2
    let edge_avg = 2.0;
    let pair_avg = 2.0 * 56.0 / 64.0;
    let expected: f64 = (edge_avg / pair_avg as f64).sqrt();
    assert!((embedding_ratio(&g, &f).unwrap() - expected).abs() < 1e-14);
}

#[test]
fn embedding_ratio_is_bounded_by_distortion_times_metric_ratio() {
    for seed in 0..30 {
        let g = random_regular(10, 3, seed).unwrap();
        if !g.is_connected() {
            continue;
        }
        let rho = shortest_path_metric(&g).unwrap();
        for p in [1.0, 2.0, 2.5] {
            let f = if seed % 2 == 0 { random_vectors(10, 4, p, seed) } else { random_matrices(10, 2, p, seed) };
            let DistortionReport::Finite { distortion: d, .. } = distortion(&f, &rho).unwrap() else {
                panic!("random images coincide");
            };
            assert!(d >= 1.0);
            let ratio = embedding_ratio(&g, &f).unwrap();
            let r = metric_ratio_r(&g, &rho, p).unwrap();
            assert!(ratio <= d * r + 1e-9, "seed {seed} p {p}");
            let scaled = distortion(&f.scaled(17.0), &rho).unwrap().value();
            assert!((scaled - d).abs() <= 1e-12 * d);
        }
    }
}

#[test]
fn disconnected_graphs_are_rejected() {
    let mut a = vec![vec![0u32; 4]; 4];
    a[0][1] = 1;
    a[1][0] = 1;
    a[2][3] = 1;
    a[3][2] = 1;
    let g = RegularGraph::from_adjacency(a, true).unwrap();
    assert_eq!(
        lp_expansion_estimate(&g, 2.0, 2, &EmbedConfig::default()).unwrap_err(),
        spexp::Error::DisconnectedGraph
    );
}
