//! Strategies and property checks shared by the invariant tests and the
//! acceptance suite.

#![allow(dead_code)]

use pgee::eval::crossval::{fold_features, stratified_folds};
use pgee::graph::invert_permutation;
use pgee::models::SbmSpec;
use pgee::principal::{principal_set, SmallClassPolicy, VarianceEstimator};
use pgee::{
    community_scores, embed, embed_dense_oracle, fit_transform, normalize_rows, permute_vertices,
    Graph, LabelVector, PrincipalConfig,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random labeled graph.
#[derive(Debug, Clone)]
pub struct Case {
    pub graph: Graph,
    pub labels: LabelVector,
    pub seed: u64,
}

/// `n` vertices, `k` classes, Erdos-Renyi edges with probability `p`. When
/// `scored` is set the first `2k` vertices cycle through the classes so that
/// every class has at least two members; otherwise about a fifth of the
/// vertices are unlabeled.
pub fn build_case(n: usize, k: usize, p: f64, directed: bool, scored: bool, seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (directed || i < j) && rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let (graph, _) = Graph::from_edges(n, edges, directed).unwrap();
    let labels: Vec<usize> = (0..n)
        .map(|v| {
            if scored && v < 2 * k {
                v % k + 1
            } else if v == 0 {
                1
            } else if !scored && rng.random::<f64>() < 0.2 {
                0
            } else {
                rng.random_range(1..=k)
            }
        })
        .collect();
    let labels = LabelVector::with_num_classes(labels, k).unwrap();
    Case {
        graph,
        labels,
        seed,
    }
}

/// Graphs for the sparse/dense oracle: any shape up to 200 vertices.
pub fn oracle_case() -> impl Strategy<Value = Case> {
    (
        1usize..=200,
        1usize..=8,
        0.0f64..0.3,
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(|(n, k, p, directed, seed)| build_case(n, k, p, directed, false, seed))
}

/// Undirected graphs where every class can be scored.
pub fn scored_case() -> impl Strategy<Value = Case> {
    (2usize..=8, 0usize..=80, 0.02f64..0.5, any::<u64>())
        .prop_map(|(k, extra, p, seed)| build_case(2 * k + extra, k, p, false, true, seed))
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9));
    perm
}

fn close(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

pub fn check_sparse_dense(case: &Case) -> Result<f64, TestCaseError> {
    let sparse = embed(&case.graph, &case.labels).unwrap();
    let dense = embed_dense_oracle(&case.graph, &case.labels).unwrap();
    let diff = (sparse.values() - dense.values())
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    prop_assert!(diff <= 1e-12, "max abs diff {diff}");
    prop_assert!(sparse.values().iter().all(|&z| (0.0..=1.0).contains(&z)));
    Ok(diff)
}

pub fn check_normalization(case: &Case) -> Result<(), TestCaseError> {
    let z = normalize_rows(&embed(&case.graph, &case.labels).unwrap());
    for norm in z.row_norms() {
        prop_assert!(
            norm == 0.0 || (norm - 1.0).abs() <= 1e-12,
            "row norm {norm}"
        );
    }
    Ok(())
}

pub fn check_vertex_permutation(case: &Case) -> Result<(), TestCaseError> {
    let perm = random_permutation(case.graph.n(), case.seed);
    let (g2, y2) = permute_vertices(&case.graph, &case.labels, &perm).unwrap();
    let z = embed(&case.graph, &case.labels).unwrap();
    let z2 = embed(&g2, &y2).unwrap();
    for (old, &new) in perm.iter().enumerate() {
        prop_assert_eq!(z.row(old), z2.row(new));
    }
    let config = PrincipalConfig::default();
    let a = fit_transform(&case.graph, &case.labels, &config)
        .unwrap()
        .report;
    let b = fit_transform(&g2, &y2, &config).unwrap().report;
    for (x, y) in a.lambda_hat.iter().zip(&b.lambda_hat) {
        prop_assert!(close(*x, *y), "{x} vs {y}");
    }
    prop_assert_eq!(a.principal_set, b.principal_set);
    // and back again
    let inverse = invert_permutation(&perm).unwrap();
    let (g3, y3) = permute_vertices(&g2, &y2, &inverse).unwrap();
    prop_assert_eq!(&g3, &case.graph);
    prop_assert_eq!(&y3, &case.labels);
    Ok(())
}

pub fn check_label_permutation(case: &Case) -> Result<(), TestCaseError> {
    let k = case.labels.num_classes();
    let rho = random_permutation(k, case.seed);
    // class c becomes rho[c - 1] + 1
    let map: Vec<usize> = rho.iter().map(|r| r + 1).collect();
    let relabeled = case.labels.relabel_classes(&map).unwrap();
    let config = PrincipalConfig::default();
    let a = fit_transform(&case.graph, &case.labels, &config)
        .unwrap()
        .report;
    let b = fit_transform(&case.graph, &relabeled, &config)
        .unwrap()
        .report;
    // row norms sum squares in column order, so scores agree to rounding
    for c in 0..k {
        let (x, y) = (a.lambda_hat[c], b.lambda_hat[map[c] - 1]);
        prop_assert!(close(x, y), "{x} vs {y}");
    }
    let mut mapped: Vec<usize> = a.principal_set.iter().map(|&c| map[c - 1]).collect();
    mapped.sort_unstable();
    prop_assert_eq!(mapped, b.principal_set);
    Ok(())
}

pub fn check_threshold_membership(case: &Case) -> Result<(), TestCaseError> {
    let fit = fit_transform(&case.graph, &case.labels, &PrincipalConfig::default()).unwrap();
    let report = &fit.report;
    for (c, &score) in report.lambda_hat.iter().enumerate() {
        prop_assert!(score >= 0.0);
        prop_assert_eq!(report.is_principal(c + 1), score > report.epsilon);
    }
    prop_assert!(report.epsilon >= 0.7);
    prop_assert_eq!(fit.principal.n(), case.graph.n());
    prop_assert_eq!(report.fell_back, report.principal_set.is_empty());
    // raising the threshold can only shrink the set
    let higher = principal_set(&report.lambda_hat, report.epsilon + 0.5);
    prop_assert!(higher.iter().all(|c| report.principal_set.contains(c)));
    Ok(())
}

pub fn check_unknown_neutrality(case: &Case) -> Result<(), TestCaseError> {
    let n = case.graph.n();
    let bigger = case.graph.with_vertex_count(n + 1).unwrap();
    let mut labels = case.labels.to_vec();
    labels.push(0);
    let y = LabelVector::with_num_classes(labels, case.labels.num_classes()).unwrap();
    let z = embed(&case.graph, &case.labels).unwrap();
    let z2 = embed(&bigger, &y).unwrap();
    for v in 0..n {
        prop_assert_eq!(z.row(v), z2.row(v));
    }
    prop_assert!(z2.row(n).iter().all(|&x| x == 0.0));
    Ok(())
}

pub fn check_fold_masking(case: &Case) -> Result<(), TestCaseError> {
    let config = PrincipalConfig {
        small_classes: SmallClassPolicy::Drop,
        ..PrincipalConfig::default()
    };
    let folds = stratified_folds(&case.labels, 3, case.seed).unwrap();
    let k = case.labels.num_classes();
    for test in &folds {
        let fit = fold_features(&case.graph, &case.labels, test, &config).unwrap();
        // recompute from labels with the test vertices literally zeroed
        let mut zeroed = case.labels.to_vec();
        for &v in test {
            zeroed[v] = 0;
        }
        let zeroed = LabelVector::with_num_classes(zeroed, k).unwrap();
        let direct = fit_transform(&case.graph, &zeroed, &config).unwrap();
        prop_assert_eq!(&fit.full, &direct.full);
        prop_assert_eq!(&fit.principal, &direct.principal);
        // scrambling the hidden labels changes nothing
        let mut scrambled = case.labels.to_vec();
        for (i, &v) in test.iter().enumerate() {
            scrambled[v] = (scrambled[v] + i) % k + 1;
        }
        let scrambled = LabelVector::with_num_classes(scrambled, k).unwrap();
        let again = fold_features(&case.graph, &scrambled, test, &config).unwrap();
        prop_assert_eq!(&again.full, &fit.full);
        prop_assert_eq!(&again.principal, &fit.principal);
    }
    Ok(())
}

pub fn check_score_determinism(case: &Case) -> Result<(), TestCaseError> {
    let z = normalize_rows(&embed(&case.graph, &case.labels).unwrap());
    let run = || {
        community_scores(
            &z,
            &case.labels,
            VarianceEstimator::Moment,
            SmallClassPolicy::Error,
        )
        .unwrap()
        .lambda_hat
    };
    let a = run();
    let b = run();
    prop_assert_eq!(
        a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        b.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
    Ok(())
}

/// Random block model with `k` classes, no tiny class, and column `c` forced
/// constant.
pub fn forced_constant_sbm(n: usize, seed: u64) -> (SbmSpec, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(3..=6);
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(1.0..2.0)).collect();
    let total: f64 = w.iter().sum();
    let mut priors: Vec<f64> = w.iter().map(|x| x / total).collect();
    let drift: f64 = 1.0 - priors.iter().sum::<f64>();
    priors[0] += drift;
    let mut block = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in a..k {
            let p = rng.random_range(0.05..0.35);
            block[a][b] = p;
            block[b][a] = p;
        }
    }
    let c = rng.random_range(0..k);
    let p = rng.random_range(0.05..0.35);
    for l in 0..k {
        block[l][c] = p;
        block[c][l] = p;
    }
    (
        SbmSpec {
            n,
            priors,
            block,
            directed: false,
        },
        c + 1,
    )
}
