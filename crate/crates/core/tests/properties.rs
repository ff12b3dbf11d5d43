use genmod::generators::{self, model_panel};
use genmod::partition::{ssgb, SsgbParams};
use genmod::spectral::{eigen_decomposition, leading_eigenpair, symmetric_eigenvalues};
use genmod::{Graph, ModularityMatrix, NodeSet, SolverOptions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, 0.0f64..0.8, any::<u64>()).prop_map(|(n, density, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        generators::random_connected(&mut rng, n, density, 2.0)
    })
}

fn subset_of(n: usize, bits: u64) -> NodeSet {
    NodeSet::new(n, (0..n).filter(|i| bits >> i & 1 == 1)).unwrap()
}

fn models(g: &Graph) -> Vec<ModularityMatrix> {
    model_panel(g).iter().map(|m| m.build(g).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_readback_is_symmetrized_sum(
        n in 1usize..8,
        raw in prop::collection::vec((0usize..8, 0usize..8, 0.0f64..3.0), 0..30),
    ) {
        let entries: Vec<_> = raw.into_iter().map(|(i, j, w)| (i % n, j % n, w)).collect();
        let g = Graph::from_edges(n, entries.clone()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let ws: Vec<f64> = entries
                    .iter()
                    .filter(|&&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i))
                    .map(|e| e.2)
                    .collect();
                let expected: f64 = ws.iter().sum();
                if ws.len() <= 2 {
                    prop_assert_eq!(g.weight(i, j), expected);
                } else {
                    prop_assert!((g.weight(i, j) - expected).abs() <= 1e-12 * expected.max(1.0));
                }
            }
        }
        let vol: f64 = g.degrees().iter().sum();
        prop_assert!((vol - g.volume()).abs() <= 1e-12 * vol.max(1.0));
    }

    #[test]
    fn modularity_is_additive(g in graph_strategy(10), a in any::<u64>(), b in any::<u64>()) {
        let n = g.n();
        let s = subset_of(n, a);
        let t = subset_of(n, b & !a);
        let union = subset_of(n, a | (b & !a));
        for m in models(&g) {
            let lhs = m.modularity(&union).unwrap().q_value;
            let rhs = m.modularity(&s).unwrap().q_value + m.modularity(&t).unwrap().q_value
                + 2.0 * m.joint_modularity(&s, &t).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * m.frobenius_norm() * n as f64);
        }
    }

    #[test]
    fn ng_modularity_is_complement_symmetric(g in graph_strategy(10), bits in any::<u64>()) {
        let m = ModularityMatrix::ng(&g).unwrap();
        let s = subset_of(g.n(), bits);
        let q = m.modularity(&s).unwrap().q_value;
        let qc = m.modularity(&s.complement()).unwrap().q_value;
        prop_assert!((q - qc).abs() <= 1e-10 * g.volume());
        prop_assert!(m.modularity(&NodeSet::full(g.n())).unwrap().q_value.abs() <= 1e-10 * g.volume());
    }

    #[test]
    fn factored_apply_matches_dense(g in graph_strategy(16), x in prop::collection::vec(-1.0f64..1.0, 16)) {
        let x = &x[..g.n()];
        for m in models(&g) {
            let dense = m.dense().unwrap();
            let y = m.apply(x).unwrap();
            let scale = m.frobenius_norm() * x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            for i in 0..g.n() {
                let expected: f64 = (0..g.n()).map(|j| dense[(i, j)] * x[j]).sum();
                prop_assert!((y[i] - expected).abs() <= 1e-12 * scale.max(1e-300));
            }
            prop_assert!((dense.norm() - m.frobenius_norm()).abs() <= 1e-10 * dense.norm().max(1.0));
        }
    }

    #[test]
    fn relative_modularity_is_bounded_by_leading_eigenvalue(g in graph_strategy(10), bits in 1u64..) {
        let s = subset_of(g.n(), bits);
        prop_assume!(!s.is_empty());
        for m in models(&g) {
            let lead = leading_eigenpair(&m, &SolverOptions::default()).unwrap();
            let q = m.modularity(&s).unwrap().q_value;
            prop_assert!(q / s.len() as f64 <= lead.value + 1e-9);
        }
    }

    #[test]
    fn weyl_shift_one_interlacing(g in graph_strategy(12)) {
        let opts = SolverOptions::default();
        for m in models(&g) {
            let base = symmetric_eigenvalues(m.dense_base_capped(usize::MAX).unwrap());
            let full = eigen_decomposition(&m, &opts).unwrap().values;
            for i in 0..full.len() {
                prop_assert!(full[i] <= base[i] + 1e-9);
                if i + 1 < base.len() {
                    prop_assert!(base[i + 1] <= full[i] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn cauchy_interlacing_on_principal_submatrices(g in graph_strategy(12), bits in 1u64..) {
        let n = g.n();
        let s = subset_of(n, bits);
        prop_assume!(!s.is_empty());
        let m = ModularityMatrix::ng(&g).unwrap();
        let dense = m.dense().unwrap();
        let big = symmetric_eigenvalues(dense.clone());
        let keep = s.members();
        let k = keep.len();
        let sub = genmod::nalgebra::DMatrix::from_fn(k, k, |a, b| dense[(keep[a], keep[b])]);
        let small = symmetric_eigenvalues(sub);
        for i in 0..k {
            prop_assert!(small[i] <= big[i] + 1e-9);
            prop_assert!(big[i + n - k] <= small[i] + 1e-9);
        }
    }

    #[test]
    fn leading_vector_is_oriented(g in graph_strategy(12)) {
        for m in models(&g) {
            let lead = leading_eigenpair(&m, &SolverOptions::default()).unwrap();
            let dot: f64 = lead.vector.iter().zip(m.rank_one_vector()).map(|(a, b)| a * b).sum();
            prop_assert!(dot >= -1e-12);
            let norm: f64 = lead.vector.iter().map(|a| a * a).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn ssgb_leaves_partition_the_nodes(g in graph_strategy(20)) {
        for model in model_panel(&g) {
            let d = ssgb(&g, model, &SsgbParams::default()).unwrap();
            let labels = d.labels();
            prop_assert!(labels.iter().all(|&l| l < d.leaves().len()));
            let covered: usize = d.communities().iter().map(NodeSet::len).sum();
            prop_assert_eq!(covered, g.n());
        }
    }
}
