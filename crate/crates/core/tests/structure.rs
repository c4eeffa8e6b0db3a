use discourse_core::graph::{InteractionGraph, TimeWindow};
use discourse_core::structure::{
    leading_eigenpair, louvain, modularity, netshield, EigenOptions, EigenPair,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> InteractionGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    InteractionGraph::from_index_edges(n, &edges)
}

fn dense(g: &InteractionGraph) -> DMatrix<f64> {
    let n = g.node_count();
    DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 })
}

fn sv(g: &InteractionGraph, eig: &EigenPair, set: &[usize]) -> f64 {
    let u = &eig.vector;
    let mut v: f64 = set.iter().map(|&i| 2.0 * eig.lambda * u[i] * u[i]).sum();
    for &i in set {
        for &j in set {
            if g.has_edge(i, j) {
                v -= u[i] * u[j];
            }
        }
    }
    v
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Best modularity over all set partitions (restricted growth strings).
fn exhaustive_q(g: &InteractionGraph) -> f64 {
    let n = g.node_count();
    let mut labels = vec![0usize; n];
    let mut best = f64::MIN;
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, g: &InteractionGraph, best: &mut f64) {
        if i == labels.len() {
            *best = best.max(modularity(g, labels));
            return;
        }
        for c in 0..=max + 1 {
            labels[i] = c;
            rec(i + 1, max.max(c), labels, g, best);
        }
    }
    if n == 0 {
        return 0.0;
    }
    rec(1, 0, &mut labels, g, &mut best);
    best
}

#[test]
fn eigenpair_matches_dense_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 40 {
        let n = rng.gen_range(2..30);
        let g = random_graph(&mut rng, n, 0.3);
        // connected graphs only: the Perron vector is unique there
        if !is_connected(&g) {
            continue;
        }
        let eig = leading_eigenpair(&g, EigenOptions::default()).unwrap();
        let sym = dense(&g).symmetric_eigen();
        let (imax, lmax) = sym
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
        assert!(
            (eig.lambda - lmax).abs() < 1e-8,
            "lambda {} vs {}",
            eig.lambda,
            lmax
        );
        let mut v: Vec<f64> = sym.eigenvectors.column(imax).iter().copied().collect();
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for (a, b) in eig.vector.iter().zip(&v) {
            assert!((a - b).abs() < 1e-6);
        }
        checked += 1;
    }
}

fn is_connected(g: &InteractionGraph) -> bool {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for &j in g.neighbors(i) {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[test]
fn star_against_dense_oracle() {
    let g = InteractionGraph::from_index_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
    let sym = dense(&g).symmetric_eigen();
    let lmax = sym.eigenvalues.iter().copied().fold(f64::MIN, f64::max);
    assert!((lmax - 2.0).abs() < 1e-12);
    let eig = leading_eigenpair(&g, EigenOptions::default()).unwrap();
    assert!((eig.lambda - lmax).abs() < 1e-9);
}

#[test]
fn netshield_single_pick_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let g = random_graph(&mut rng, n, 0.4);
        let r = netshield(&g, 1).unwrap();
        let eig = leading_eigenpair(&g, EigenOptions::default()).unwrap();
        let best = (0..n).map(|i| sv(&g, &eig, &[i])).fold(f64::MIN, f64::max);
        assert!(best - sv(&g, &eig, &r.selected_indices) < 1e-9);
    }
}

#[test]
fn netshield_each_pick_is_the_marginal_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.gen_range(3..=10);
        let g = random_graph(&mut rng, n, 0.4);
        let k = rng.gen_range(1..=3.min(n));
        let r = netshield(&g, k).unwrap();
        let eig = leading_eigenpair(&g, EigenOptions::default()).unwrap();
        let mut chosen: Vec<usize> = Vec::new();
        for (step, &pick) in r.selected_indices.iter().enumerate() {
            let base = sv(&g, &eig, &chosen);
            let gain = |i: usize| {
                let mut s = chosen.clone();
                s.push(i);
                sv(&g, &eig, &s) - base
            };
            let best = (0..n)
                .filter(|i| !chosen.contains(i))
                .map(gain)
                .fold(f64::MIN, f64::max);
            assert!(best - gain(pick) < 1e-9);
            assert!((r.shield_scores[step] - gain(pick)).abs() < 1e-9);
            chosen.push(pick);
        }
    }
}

#[test]
fn netshield_within_greedy_bound_of_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let n = rng.gen_range(3..=10);
        let g = random_graph(&mut rng, n, 0.4);
        let k = rng.gen_range(1..=3.min(n));
        let r = netshield(&g, k).unwrap();
        let eig = leading_eigenpair(&g, EigenOptions::default()).unwrap();
        let opt = subsets(n, k)
            .iter()
            .map(|s| sv(&g, &eig, s))
            .fold(f64::MIN, f64::max);
        let got = sv(&g, &eig, &r.selected_indices);
        assert!(got >= (1.0 - (-1f64).exp()) * opt - 1e-9, "{got} vs {opt}");
    }
}

#[test]
fn louvain_never_beats_exhaustive_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let n = rng.gen_range(1..=8);
        let g = random_graph(&mut rng, n, 0.4);
        let p = louvain(&g);
        assert!((p.modularity - modularity(&g, &p.membership)).abs() < 1e-12);
        assert!(p.modularity <= exhaustive_q(&g) + 1e-12);
        assert_eq!(p.sizes.iter().sum::<usize>(), n);
    }
}

#[test]
fn two_triangles_reach_exhaustive_optimum() {
    let g =
        InteractionGraph::from_index_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
    let best = exhaustive_q(&g);
    assert!((best - 0.5).abs() < 1e-12);
    assert!((louvain(&g).modularity - best).abs() < 1e-12);
}

proptest! {
    #[test]
    fn disjoint_cliques_are_recovered(sizes in prop::collection::vec(3usize..=6, 2..=4)) {
        let mut edges = Vec::new();
        let mut base = 0;
        for &s in &sizes {
            for i in 0..s {
                for j in i + 1..s {
                    edges.push((base + i, base + j));
                }
            }
            base += s;
        }
        let g = InteractionGraph::from_index_edges(base, &edges);
        let p = louvain(&g);
        prop_assert_eq!(p.community_count(), sizes.len());
        let mut start = 0;
        for &s in &sizes {
            let c = p.membership[start];
            prop_assert!((start..start + s).all(|i| p.membership[i] == c));
            start += s;
        }
        prop_assert!((p.modularity - modularity(&g, &p.membership)).abs() < 1e-12);
    }

    #[test]
    fn order_preserving_relabel_gives_same_result(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=12);
        let g = random_graph(&mut rng, n, 0.35);
        let name = |i: usize| format!("user_{:03}", i * 7 + 1);
        let h = InteractionGraph::from_edges(
            TimeWindow::unbounded(),
            (0..n).map(name),
            g.edges().map(|(i, j)| (name(i), name(j))),
        );
        let (a, b) = (louvain(&g), louvain(&h));
        prop_assert_eq!(&a.membership, &b.membership);
        prop_assert_eq!(a.modularity, b.modularity);
        let k = 3.min(n);
        prop_assert_eq!(
            netshield(&g, k).unwrap().selected_indices,
            netshield(&h, k).unwrap().selected_indices
        );
    }

    #[test]
    fn reversed_ids_keep_eigenvalue_and_shield_value(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=12);
        let g = random_graph(&mut rng, n, 0.35);
        let rev: Vec<(usize, usize)> = g.edges().map(|(i, j)| (n - 1 - i, n - 1 - j)).collect();
        let h = InteractionGraph::from_index_edges(n, &rev);
        let (rg, rh) = (netshield(&g, 2).unwrap(), netshield(&h, 2).unwrap());
        prop_assert!((rg.lambda - rh.lambda).abs() < 1e-9);
        prop_assert!((rg.shield_value() - rh.shield_value()).abs() < 1e-8);
        let flipped: Vec<usize> = (0..n).map(|i| louvain(&g).membership[n - 1 - i]).collect();
        prop_assert!((louvain(&g).modularity - modularity(&h, &flipped)).abs() < 1e-12);
    }
}
