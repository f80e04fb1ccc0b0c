mod common;

use common::*;
use pgee::io::{
    load_edge_list, load_embedding, load_labeled_graph, load_labels, parse_scores_csv,
    save_edge_list, save_embedding, save_labels, write_scores_csv, IdBase,
};
use pgee::{embed, fit_transform, normalize_rows, PrincipalConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn edge_list_round_trip(case in oracle_case(), one_based in any::<bool>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        let base = if one_based { IdBase::One } else { IdBase::Zero };
        save_edge_list(&case.graph, &path, base).unwrap();
        let first = load_edge_list(&path, case.graph.is_directed()).unwrap();
        prop_assert_eq!(&first.graph, &case.graph);
        prop_assert_eq!(first.base, base);
        save_edge_list(&first.graph, &path, first.base).unwrap();
        let second = load_edge_list(&path, case.graph.is_directed()).unwrap();
        prop_assert_eq!(second.graph, first.graph);
    }

    #[test]
    fn degrees_match_endpoint_counts(case in scored_case()) {
        let mut count = vec![0usize; case.graph.n()];
        for &(i, j) in case.graph.edges() {
            count[i as usize] += 1;
            count[j as usize] += 1;
        }
        for (v, &c) in count.iter().enumerate() {
            prop_assert_eq!(case.graph.degree(v), c);
        }
    }

    #[test]
    fn labels_round_trip(case in oracle_case()) {
        // a plain label file carries no K, so gaps cannot survive it
        prop_assume!(case.labels.class_counts().iter().all(|&c| c > 0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.txt");
        save_labels(&case.labels, &path).unwrap();
        let back = load_labels(&path, case.labels.len()).unwrap();
        prop_assert_eq!(back.to_vec(), case.labels.to_vec());
    }

    #[test]
    fn embedding_round_trip_is_exact(case in oracle_case()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.csv");
        let z = normalize_rows(&embed(&case.graph, &case.labels).unwrap());
        save_embedding(&z, &case.labels, &path, IdBase::Zero).unwrap();
        let (back, meta) = load_embedding(&path).unwrap();
        prop_assert_eq!(&back, &z);
        prop_assert_eq!(meta.class_counts, case.labels.class_counts().to_vec());
    }

    #[test]
    fn scores_table_round_trip(case in scored_case()) {
        let fit = fit_transform(&case.graph, &case.labels, &PrincipalConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_scores_csv(&fit.report, &mut buf).unwrap();
        let table = parse_scores_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(table.epsilon, fit.report.epsilon);
        prop_assert_eq!(table.epsilon_elbow, fit.report.epsilon_elbow);
        for (c, lambda, principal) in table.rows {
            prop_assert_eq!(lambda, fit.report.lambda_hat[c - 1]);
            prop_assert_eq!(principal, fit.report.is_principal(c));
        }
    }
}

#[test]
fn label_file_sets_the_vertex_count() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels) = (dir.path().join("e.txt"), dir.path().join("y.txt"));
    std::fs::write(&edges, "1 2\n2 3\n").unwrap();
    std::fs::write(&labels, "vertex,label\n1,1\n2,2\n3,1\n4,0\n5,2\n").unwrap();
    let (file, y) = load_labeled_graph(&edges, &labels, false).unwrap();
    assert_eq!(file.base, IdBase::One);
    assert_eq!(file.graph.n(), 5);
    assert_eq!(file.graph.degree(4), 0);
    assert_eq!(y.to_vec(), vec![1, 2, 1, 0, 2]);

    std::fs::write(&labels, "1\n2\n").unwrap();
    assert!(load_labeled_graph(&edges, &labels, false).is_err());
}
