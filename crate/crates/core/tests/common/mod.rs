#![allow(dead_code)]

use popmatch::enumerate::all_matchings;
use popmatch::{generate, is_popular, perturb_agent, GenConfig, Instance, Matching, Model};
use proptest::prelude::*;

pub fn model_strategy() -> impl Strategy<Value = Model> {
    prop_oneof![
        Just(Model::OneSided),
        Just(Model::TwoSidedOneTie),
        (1usize..=3).prop_map(|k| Model::TwoSidedTies { k }),
    ]
}

/// Seeded random instances with at most `max_n` vertices per side.
pub fn instance_strategy(model: impl Strategy<Value = Model>, max_n: usize) -> impl Strategy<Value = Instance> {
    (model, 1..=max_n, 1..=max_n, 1u32..=10, any::<u64>()).prop_map(|(model, na, nb, d, seed)| {
        generate(&GenConfig::new(model, na, nb, d as f64 / 10.0, seed)).unwrap()
    })
}

/// A pair of instances differing in the order of one agent.
pub fn perturbed_pair_strategy(model: Model, max_n: usize) -> impl Strategy<Value = (Instance, Instance, usize)> {
    (instance_strategy(Just(model), max_n), any::<u64>(), any::<prop::sample::Index>()).prop_map(|(i, seed, idx)| {
        let a = idx.index(i.num_agents());
        let j = perturb_agent(&i, a, seed).unwrap();
        (i, j, a)
    })
}

/// Matchings popular in every instance, by enumeration.
pub fn robust_matchings(instances: &[&Instance]) -> Vec<Matching> {
    all_matchings(instances[0])
        .into_iter()
        .filter(|m| instances.iter().all(|i| is_popular(i, m).unwrap().is_popular()))
        .collect()
}
