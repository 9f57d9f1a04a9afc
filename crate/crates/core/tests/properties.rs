//! Randomized invariants. Seeds drive the generators in `common`, so a
//! failing case is reproduced by its seed alone.

mod common;

use proptest::prelude::*;

use saturachase::egraph::EGraph;
use saturachase::term::{parse_term_infer, parse_trs, write_trs};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn homomorphisms_are_unique(seed in any::<u64>()) {
        common::check_hom_uniqueness(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn homomorphisms_transport_terms(seed in any::<u64>()) {
        common::check_hom_transport(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn rebuild_is_idempotent_and_order_free(seed in any::<u64>()) {
        common::check_rebuild(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn homomorphisms_do_not_raise_rank(seed in any::<u64>()) {
        common::check_rank_decrease(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn pcr_matches_congruence_closure(seed in any::<u64>()) {
        common::check_pcr_oracle(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn chase_result_is_universal(seed in any::<u64>()) {
        common::check_chase_universal(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn tm_rewriting_tracks_the_machine(seed in any::<u64>()) {
        common::check_tm_trace(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn terms_print_and_parse(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = common::sig(&[("a", 0), ("f", 1), ("g", 2)]);
        let t = common::random_term(&mut r, &s, 12);
        let (back, _) = parse_term_infer(&t.to_string()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn trs_files_round_trip(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let trs = common::random_vp_trs(&mut r);
        let back = parse_trs(&write_trs(&trs)).unwrap();
        prop_assert_eq!(back.rules(), trs.rules());
        prop_assert_eq!(back.signature(), trs.signature());
    }

    #[test]
    fn term_graph_accepts_exactly_its_subterms(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = common::sig(&[("a", 0), ("b", 0), ("f", 1), ("g", 2)]);
        let t = common::random_term(&mut r, &s, 9);
        let (g, root) = EGraph::from_term_with(s.clone(), &t).unwrap();
        prop_assert_eq!(g.accepts(&t), Some(root));
        prop_assert_eq!(g.class_count(), t.subterms().len());
        prop_assert_eq!(g.enumerate_terms(root, t.size()).len(), 1);
    }
}
