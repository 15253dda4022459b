//! Metrics against brute-force oracles and their algebraic properties.

mod common;

use common::oracles::{cluster_distances_brute, edit_distance_exhaustive};
use mtrnn::metrics::{cluster_distances, d_avg, d_rel, dist, edit_distance, f1_word, mixed, two_sample_t};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

fn word_string() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..=12)
}

fn labelled_set() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>)> {
    (2usize..5, 1usize..4).prop_flat_map(|(clusters, dim)| {
        prop::collection::vec((prop::collection::vec(-3.0f64..3.0, dim), 0..clusters), clusters * 2..24)
            .prop_filter("every label needs a pair", move |v| {
                (0..clusters).all(|c| v.iter().filter(|(_, l)| *l == c).count() >= 2)
            })
            .prop_map(|v| v.into_iter().unzip())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn edit_distance_matches_exhaustive_oracle(a in word_string(), b in word_string()) {
        prop_assert_eq!(edit_distance(&a, &b), edit_distance_exhaustive(&a, &b));
    }

    #[test]
    fn edit_distance_is_a_metric(a in word_string(), b in word_string(), c in word_string()) {
        prop_assert_eq!(edit_distance(&a, &a), 0);
        prop_assert_eq!(edit_distance(&a, &b), edit_distance(&b, &a));
        prop_assert!(edit_distance(&a, &c) <= edit_distance(&a, &b) + edit_distance(&b, &c));
        prop_assert_eq!(edit_distance(&a, &b) == 0, a == b);
    }

    #[test]
    fn word_f1_is_bounded_and_rewards_hits(t in prop::collection::vec(0u8..6, 1..8), extra in 0u8..6) {
        let words: Vec<String> = t.iter().map(|w| format!("w{w}")).collect();
        prop_assert_eq!(f1_word(&words, &words), 1.0);
        let mut more = words.clone();
        more.push(format!("x{extra}"));
        let f = f1_word(&more, &words);
        prop_assert!(f > 0.0 && f < 1.0);
        // Restoring a missing hit never lowers the score.
        let mut fewer = words[1..].to_vec();
        fewer.push(format!("x{extra}"));
        prop_assert!(f1_word(&fewer, &words) <= f);
    }

    #[test]
    fn distance_is_symmetric(a in prop::collection::vec(-5.0f64..5.0, 3), b in prop::collection::vec(-5.0f64..5.0, 3)) {
        prop_assert_eq!(dist(&a, &b).unwrap(), dist(&b, &a).unwrap());
        prop_assert!(dist(&a, &b).unwrap() >= 0.0);
    }

    #[test]
    fn relative_distance_is_scale_free_and_at_most_one(
        points in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 2..10),
        scale in 0.01f64..100.0,
    ) {
        let r = d_rel(&points).unwrap();
        prop_assume!(!r.degenerate);
        prop_assert!(r.value > 0.0 && r.value <= 1.0 + 1e-12);
        let scaled: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|x| x * scale).collect()).collect();
        prop_assert!((d_rel(&scaled).unwrap().value - r.value).abs() < 1e-9);
        prop_assert!((d_avg(&scaled).unwrap() - scale * d_avg(&points).unwrap()).abs() < 1e-9 * scale.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cluster_distances_match_brute_force((patterns, labels) in labelled_set()) {
        let c = cluster_distances(&patterns, &labels).unwrap();
        let (inter, intra) = cluster_distances_brute(&patterns, &labels);
        prop_assert!((c.d_inter - inter).abs() < 1e-12);
        prop_assert!((c.d_intra - intra).abs() < 1e-12);
    }
}

#[test]
fn word_scores_by_hand() {
    let target = ["push", "the", "red", "apple", "."];
    let produced = ["push", "the", "red", "apple", ".", "the"];
    assert!((f1_word(&produced, &target) - 10.0 / 11.0).abs() < 1e-15);
    assert_eq!(f1_word::<&str>(&[], &target), 0.0);
    assert!((mixed(0.984, 0.638) - 0.811).abs() < 1e-12);
}

#[test]
fn singleton_clusters_are_skipped() {
    let patterns = vec![vec![0.0], vec![2.0], vec![10.0]];
    let c = cluster_distances(&patterns, &["a", "a", "b"]).unwrap();
    assert_eq!((c.d_inter, c.d_intra, c.skipped), (2.0, 9.0, 1));
}

#[test]
fn welch_p_value_matches_student_distribution() {
    let a = [2.1, 3.4, 1.9, 2.8, 3.0, 2.2];
    let b = [3.9, 2.7, 4.4, 3.8, 5.1];
    let r = two_sample_t(&a, &b).unwrap();
    let p = 2.0 * StudentsT::new(0.0, 1.0, r.df).unwrap().cdf(-r.t.abs());
    assert!((r.p - p).abs() < 1e-10, "{} vs {p}", r.p);
}
