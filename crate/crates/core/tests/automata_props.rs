mod common;

use common::{all_words, reference_accepts};
use proptest::prelude::*;
use weaver_core::testgen::{random_afa, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_matches_reference(seed in any::<u64>()) {
        let a = random_afa(&mut rng(seed), 4, 2, 0.5);
        for w in all_words(2, 5) {
            prop_assert_eq!(a.accepts(&w), reference_accepts(&a, &w));
        }
    }

    #[test]
    fn epsilon_elimination_and_complement(seed in any::<u64>()) {
        let a = random_afa(&mut rng(seed), 4, 2, 0.5);
        let e = a.eliminate_epsilon();
        prop_assert!(!e.has_epsilon());
        let c = e.complement().unwrap();
        for w in all_words(2, 5) {
            prop_assert_eq!(e.accepts(&w), a.accepts(&w));
            prop_assert_ne!(c.accepts(&w), a.accepts(&w));
        }
    }

    #[test]
    fn subset_construction_keeps_language(seed in any::<u64>()) {
        let a = random_afa(&mut rng(seed), 4, 2, 0.3).eliminate_epsilon();
        let (n, macros) = a.to_nfa(10_000).unwrap();
        prop_assert_eq!(n.num_states(), macros.len());
        let t = a.trim();
        for w in all_words(2, 5) {
            prop_assert_eq!(n.accepts(&w), a.accepts(&w));
            prop_assert_eq!(t.accepts(&w), a.accepts(&w));
        }
    }

    #[test]
    fn accepted_words_are_accepted_and_complete(seed in any::<u64>()) {
        let a = random_afa(&mut rng(seed), 3, 2, 0.3);
        let listed = a.accepted_words(4, usize::MAX, usize::MAX);
        let expected: Vec<Vec<usize>> = all_words(2, 4).into_iter().filter(|w| a.accepts(w)).collect();
        prop_assert_eq!(listed, expected);
    }

    #[test]
    fn intersection_with_complement_is_empty(seed in any::<u64>()) {
        let a = random_afa(&mut rng(seed), 3, 2, 0.3);
        let c = a.eliminate_epsilon().complement().unwrap();
        prop_assert!(a.intersect(&c).unwrap().eliminate_epsilon().is_empty(100_000).unwrap());
    }
}
