mod common;

use common::{perturbed_pair_strategy, robust_matchings};
use popmatch::enumerate::all_matchings;
use popmatch::popularity::edge_label;
use popmatch::twosided::{build_hybrid, find_popular, popular_with_agent_unmatched, RobustRoute};
use popmatch::{generate, is_popular, perturb_agent, robust_multi, robust_two_sided, GenConfig, Model, DEFAULT_CAP};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn hybrid_popularity_matches_both_instances((i, j, a) in perturbed_pair_strategy(Model::TwoSidedOneTie, 4)) {
        for b in i.agent_prefs(a).item_set() {
            let h = build_hybrid(&i, &j, a, b).unwrap();
            for m in all_matchings(&i).into_iter().filter(|m| m.contains(a, b)) {
                let in_hybrid = is_popular(&h, &m).unwrap().is_popular();
                let in_both = is_popular(&i, &m).unwrap().is_popular() && is_popular(&j, &m).unwrap().is_popular();
                prop_assert_eq!(in_hybrid, in_both);
            }
        }
    }

    #[test]
    fn unmatched_agent_popularity_is_order_free((i, j, a) in perturbed_pair_strategy(Model::TwoSidedOneTie, 4)) {
        for m in all_matchings(&i).into_iter().filter(|m| m.job_of(a).is_none()) {
            prop_assert_eq!(is_popular(&i, &m).unwrap().is_popular(), is_popular(&j, &m).unwrap().is_popular());
        }
    }

    #[test]
    fn robust_agrees_with_enumeration((i, j, a) in perturbed_pair_strategy(Model::TwoSidedOneTie, 4)) {
        let expected = robust_matchings(&[&i, &j]);
        let found = robust_two_sided(&i, &j, DEFAULT_CAP).unwrap();
        prop_assert_eq!(found.is_some(), !expected.is_empty());
        if let Some(r) = found {
            prop_assert!(expected.contains(&r.matching));
            match r.route {
                RobustRoute::AgentUnmatched => prop_assert_eq!(r.matching.job_of(a), None),
                RobustRoute::Edge { agent, job } => prop_assert!(agent == a && r.matching.contains(a, job)),
                RobustRoute::Unperturbed => prop_assert_eq!(&i, &j),
            }
        }
    }

    #[test]
    fn matched_edges_have_zero_job_label((i, _, _) in perturbed_pair_strategy(Model::TwoSidedOneTie, 4)) {
        for m in all_matchings(&i) {
            for (a, b) in i.edges() {
                if !m.contains(a, b) && m.job_of(a).is_some() && m.agent_of(b).is_some() {
                    let l = edge_label(&i, &m, a, b);
                    prop_assert_eq!(l.beta, 0);
                    prop_assert!(l.alpha == 1 || l.alpha == -1);
                }
            }
        }
    }
}

#[test]
fn multi_instance_robust_agrees_with_enumeration() {
    for seed in 0..200u64 {
        let i = generate(&GenConfig::new(Model::TwoSidedOneTie, 4, 4, 0.6, seed)).unwrap();
        let a = (seed % 4) as usize;
        let copies: Vec<_> = (0..3).map(|s| perturb_agent(&i, a, seed * 11 + s).unwrap()).collect();
        let all: Vec<_> = std::iter::once(&i).chain(copies.iter()).collect();
        let expected = robust_matchings(&all);
        let found = robust_multi(&all, DEFAULT_CAP).unwrap();
        assert_eq!(found.is_some(), !expected.is_empty(), "seed {seed}");
        if let Some(r) = found {
            assert!(expected.contains(&r.matching));
        }
    }
}

#[test]
fn popular_matchings_exist_in_one_tie_model() {
    for seed in 0..200u64 {
        let i = generate(&GenConfig::new(Model::TwoSidedOneTie, 4, 4, 0.5, seed)).unwrap();
        let m = find_popular(&i, DEFAULT_CAP).unwrap().expect("stable matchings are popular");
        assert!(is_popular(&i, &m).unwrap().is_popular());
    }
}

#[test]
fn unmatched_search_is_exact() {
    for seed in 0..200u64 {
        let i = generate(&GenConfig::new(Model::TwoSidedOneTie, 4, 3, 0.6, seed)).unwrap();
        for a in 0..4 {
            let exists = all_matchings(&i)
                .iter()
                .any(|m| m.job_of(a).is_none() && is_popular(&i, m).unwrap().is_popular());
            assert_eq!(popular_with_agent_unmatched(&i, a, DEFAULT_CAP).unwrap().is_some(), exists);
        }
    }
}

#[test]
fn cap_rejects_large_instances() {
    let i = generate(&GenConfig::new(Model::TwoSidedOneTie, 9, 9, 0.5, 1)).unwrap();
    assert!(matches!(robust_two_sided(&i, &i, DEFAULT_CAP), Err(popmatch::Error::SizeLimit { .. })));
}
