use std::collections::{BTreeMap, BTreeSet};

use hiernet_core::analysis::{self, FitKind};
use hiernet_core::graphstats::{self, PathOptions};
use hiernet_core::{netgen, rng, CrossLayerRule, Graph, HierarchyConfig, Mode, NrHistogram, Skeleton};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

/// Counts every word drawn from the wrapped generator.
struct Counting<R> {
    inner: R,
    words: u64,
}

impl<R: RngCore> RngCore for Counting<R> {
    fn next_u32(&mut self) -> u32 {
        self.words += 1;
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.words += 1;
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.words += dst.len().div_ceil(8) as u64;
        self.inner.fill_bytes(dst)
    }
}

/// Ancestors of `v` from `v` upwards, by walking parent pointers.
fn chain(sk: &Skeleton, v: usize) -> Vec<usize> {
    let mut out = vec![v];
    while let Some(p) = sk.parent_of(*out.last().unwrap()) {
        out.push(p);
    }
    out
}

/// Height of the deepest common ancestor, `l + 1` without one.
fn brute_distance(sk: &Skeleton, i: usize, j: usize) -> usize {
    let l = sk.n_layers();
    let cj = chain(sk, j);
    chain(sk, i)
        .into_iter()
        .filter(|a| cj.contains(a))
        .map(|a| l - sk.layer_of(a) + 1)
        .min()
        .unwrap_or(l + 1)
}

/// Every eligible pair (upper node second for cross pairs) with its
/// probability, straight from the formulas.
fn brute_pairs(cfg: &HierarchyConfig, sk: &Skeleton) -> BTreeMap<(usize, usize), f64> {
    let l = sk.n_layers();
    let big_h = (l * (l + 1) / 2) as f64;
    let mut out = BTreeMap::new();
    for i in 0..sk.node_count() {
        for j in 0..sk.node_count() {
            let (di, dj) = (sk.layer_of(i), sk.layer_of(j));
            let x = if i == j { 0 } else { brute_distance(sk, i, j) } as f64;
            if di == dj && i < j {
                out.insert((i, j), cfg.c1 * (-cfg.alpha * x).exp());
            } else if dj < di {
                let weight = (l - dj + 1) as f64 / big_h;
                match cfg.cross_layer_rule {
                    CrossLayerRule::AllUpper => {
                        out.insert((i, j), weight * (-cfg.alpha * x).exp());
                    }
                    CrossLayerRule::AncestorsOnly => {
                        if chain(sk, i).contains(&j) {
                            out.insert((i, j), weight);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Two roots, four layers, twenty nodes.
fn toy_skeleton() -> Skeleton {
    let parents = vec![
        None,
        None,
        Some(0),
        Some(0),
        Some(0),
        Some(1),
        Some(1),
        Some(2),
        Some(2),
        Some(3),
        Some(4),
        Some(5),
        Some(5),
        Some(6),
        Some(7),
        Some(7),
        Some(9),
        Some(11),
        Some(12),
        Some(12),
    ];
    Skeleton::from_parents(parents).unwrap()
}

#[test]
fn brute_distance_matches_skeleton() {
    let sk = toy_skeleton();
    for i in 0..20 {
        for j in 0..20 {
            if i != j {
                assert_eq!(sk.social_distance(i, j).unwrap(), brute_distance(&sk, i, j), "{i} {j}");
            }
        }
    }
}

#[test]
fn offers_each_eligible_pair_once_with_formula_probability() {
    let sk = toy_skeleton();
    for rule in [CrossLayerRule::AllUpper, CrossLayerRule::AncestorsOnly] {
        let mut cfg = HierarchyConfig::statistical(20);
        cfg.c1 = 0.6;
        cfg.alpha = 0.3;
        cfg.cross_layer_rule = rule;
        let expected = brute_pairs(&cfg, &sk);
        let mut seen = BTreeMap::new();
        netgen::offer_shortcuts(&cfg, &sk, |u, v, p| {
            assert!(seen.insert((u, v), p).is_none(), "pair {u} {v} offered twice");
        });
        assert_eq!(seen.len(), expected.len());
        for (pair, p) in &expected {
            let got = seen[pair];
            assert!((got - p).abs() < 1e-12, "{pair:?}: {got} vs {p}");
        }
    }
}

#[test]
fn one_uniform_draw_per_eligible_pair() {
    for (n, mode) in [(300, Mode::Statistical), (400, Mode::Propagation)] {
        let cfg = HierarchyConfig { m: 4, ..HierarchyConfig::statistical(n) }.with_mode(mode).with_seed(3);
        let sk = netgen::allocate_layers(&cfg, &mut rng::seeded(1)).unwrap();
        let mut counting = Counting { inner: rng::seeded(2), words: 0 };
        netgen::sample_shortcuts(&cfg, &sk, &mut counting);
        assert_eq!(counting.words, brute_pairs(&cfg, &sk).len() as u64, "{mode}");
    }
}

#[test]
fn edge_frequencies_match_formula() {
    let sk = toy_skeleton();
    let mut cfg = HierarchyConfig::statistical(20);
    cfg.c1 = 0.6;
    cfg.alpha = 0.3;
    let expected = brute_pairs(&cfg, &sk);
    let runs = 10_000u32;
    let mut hits: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for s in 0..runs {
        for pair in netgen::sample_shortcuts(&cfg, &sk, &mut rng::stream(77, s as u64)) {
            *hits.entry(pair).or_default() += 1;
        }
    }
    for (pair, &p) in &expected {
        let f = hits.get(pair).copied().unwrap_or(0) as f64 / runs as f64;
        let sigma = (p * (1.0 - p) / runs as f64).sqrt();
        assert!((f - p).abs() <= 3.0 * sigma, "{pair:?}: frequency {f}, probability {p}");
    }
    assert!(hits.keys().all(|k| expected.contains_key(k)));
}

fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.node_count();
    let inf = u32::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
        for &j in g.neighbors(i) {
            row[j] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[test]
fn bfs_matches_floyd_warshall() {
    let mut graphs: Vec<Graph> = (0..12).map(|s| random_graph(5 + 5 * s as usize, 0.02 + 0.02 * s as f64, s)).collect();
    for s in 0..6 {
        graphs.push(netgen::generate(&HierarchyConfig::statistical(20 + 8 * s).with_seed(s as u64)).unwrap().graph().clone());
    }
    for g in &graphs {
        let d = floyd_warshall(g);
        let n = g.node_count();
        let inf = u32::MAX / 2;
        let (mut sum, mut pairs, mut diam) = (0u64, 0u64, 0u32);
        for i in 0..n {
            for j in i + 1..n {
                if d[i][j] < inf {
                    sum += d[i][j] as u64;
                    pairs += 1;
                    diam = diam.max(d[i][j]);
                }
            }
        }
        let pm = graphstats::path_metrics(g);
        assert_eq!(pm.n_connected_pairs, pairs);
        assert_eq!(pm.diameter, diam as usize);
        let apl = if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 };
        assert!((pm.avg_path_length - apl).abs() < 1e-12);
        let mut reps = BTreeSet::new();
        for i in 0..n {
            reps.insert((0..n).find(|&j| d[i][j] < inf).unwrap());
        }
        assert_eq!(pm.n_components, reps.len());
    }
}

#[test]
fn clustering_matches_brute_force() {
    for s in 0..6 {
        let g = random_graph(40, 0.15, 100 + s);
        for i in 0..g.node_count() {
            let nb = g.neighbors(i);
            let k = nb.len();
            let mut links = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if g.has_edge(nb[a], nb[b]) {
                        links += 1;
                    }
                }
            }
            let c = if k < 2 { 0.0 } else { 2.0 * links as f64 / (k * (k - 1)) as f64 };
            assert!((graphstats::local_clustering(&g, i) - c).abs() < 1e-12);
        }
    }
}

#[test]
fn sampled_path_length_is_close_to_exact() {
    let net = netgen::generate(&HierarchyConfig::statistical(2000).with_seed(4)).unwrap();
    let exact = graphstats::path_metrics(net.graph());
    let opts = PathOptions { sample_cutoff: 1000, sample_sources: 1000 };
    let sampled = graphstats::path_metrics_with(net.graph(), &opts, &mut rng::seeded(9));
    assert_eq!(sampled.sampled_sources, Some(1000));
    let rel = (sampled.avg_path_length - exact.avg_path_length).abs() / exact.avg_path_length;
    assert!(rel < 0.05, "sampled {} exact {}", sampled.avg_path_length, exact.avg_path_length);
    assert!(sampled.diameter <= exact.diameter);
}

fn gaussian_histogram(n: usize, mean: f64, sd: f64, draws: u64, seed: u64) -> NrHistogram {
    let normal = Normal::new(mean, sd).unwrap();
    let mut r = rng::seeded(seed);
    let mut h = NrHistogram::new(n);
    for _ in 0..draws {
        h.record(normal.sample(&mut r).round().clamp(0.0, n as f64) as usize);
    }
    h
}

#[test]
fn gaussian_fit_recovers_parameters() {
    let h = gaussian_histogram(10_000, 7900.0, 120.0, 100_000, 5);
    let fit = analysis::fit_gaussian(&h, 0, 10_000).unwrap();
    let FitKind::Gaussian { mean, stddev } = fit.kind else { panic!() };
    assert!((mean - 7900.0).abs() <= 5.0, "mean {mean}");
    assert!((stddev - 120.0).abs() <= 5.0, "stddev {stddev}");
}

#[test]
fn split_modes_separates_power_law_from_bump() {
    let mut h = gaussian_histogram(10_000, 7900.0, 120.0, 7000, 6);
    // discrete power law with exponent 3, 3000 realizations in total
    let zeta3 = 1.202_056_903;
    let mut r = rng::seeded(7);
    for _ in 0..3000 {
        let u: f64 = r.random();
        let mut acc = 0.0;
        let mut k = 1;
        loop {
            acc += (k as f64).powi(-3) / zeta3;
            if acc >= u || k == 5000 {
                break;
            }
            k += 1;
        }
        h.record(k);
    }
    let split = analysis::split_modes(&h).unwrap();
    assert!(split.bimodal);
    assert!(split.threshold > 50 && split.threshold < 7000, "threshold {}", split.threshold);
    let mass = h.mass_below(split.threshold);
    assert!((mass - 0.3).abs() < 0.01, "mass {mass}");
    let fit = analysis::fit_power_law(&h, 1, split.threshold - 1).unwrap();
    let FitKind::PowerLaw { exponent, .. } = fit.kind else { panic!() };
    assert!(exponent > 2.0 && exponent < 4.0, "exponent {exponent}");
}

#[test]
fn random_baseline_clustering_falls_like_one_over_n() {
    let sizes = [500usize, 1000, 2000, 4000];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        // ring with mean degree 10, then the G(N, M) counterpart
        let ring = Graph::from_edges(n, (0..n).flat_map(|v| (1..=5).map(move |s| (v, (v + s) % n))));
        let mut c = 0.0;
        for s in 0..4 {
            c += graphstats::average_clustering(&graphstats::random_counterpart(&ring, &mut rng::seeded(10 * i as u64 + s)));
        }
        xs.push((n as f64).ln());
        ys.push((c / 4.0).ln());
    }
    let slope = analysis::linear_fit(&xs, &ys).unwrap().slope;
    assert!(slope < -0.8 && slope > -1.2, "slope {slope}");
}
