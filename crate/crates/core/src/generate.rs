//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, Model, PreferenceList};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub model: Model,
    pub n_agents: usize,
    pub n_jobs: usize,
    /// Probability that each agent–job pair is an edge, in `(0, 1]`.
    pub density: f64,
    /// Largest tie; must be 1 unless the model has job lists, where it is
    /// also the model's `k`.
    pub tie_max: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(model: Model, n_agents: usize, n_jobs: usize, density: f64, seed: u64) -> Self {
        let tie_max = match model {
            Model::TwoSidedTies { k } => k,
            _ => 1,
        };
        GenConfig {
            model,
            n_agents,
            n_jobs,
            density,
            tie_max,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidArgument(format!("density {} is not in (0, 1]", self.density)));
        }
        match self.model {
            Model::TwoSidedTies { k } if k != self.tie_max || k == 0 => Err(Error::InvalidArgument(format!(
                "tie_max {} must equal the model's k={k} (at least 1)",
                self.tie_max
            ))),
            Model::OneSided | Model::TwoSidedOneTie if self.tie_max != 1 => Err(Error::InvalidArgument(format!(
                "tie_max must be 1 for model {}",
                self.model
            ))),
            _ => Ok(()),
        }
    }
}

/// Shuffles `items` and cuts them into consecutive groups of random sizes
/// between 1 and `tie_max`.
fn random_list(rng: &mut ChaCha8Rng, mut items: Vec<usize>, tie_max: usize) -> PreferenceList {
    items.shuffle(rng);
    let mut groups = Vec::new();
    let mut rest = &items[..];
    while !rest.is_empty() {
        let size = rng.gen_range(1..=tie_max.min(rest.len()));
        let (head, tail) = rest.split_at(size);
        groups.push(head.to_vec());
        rest = tail;
    }
    PreferenceList::new(groups).expect("groups partition distinct items")
}

pub fn generate(config: &GenConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut neighbours = vec![Vec::new(); config.n_agents];
    let mut job_neighbours = vec![Vec::new(); config.n_jobs];
    for (a, list) in neighbours.iter_mut().enumerate() {
        for (b, back) in job_neighbours.iter_mut().enumerate() {
            if rng.gen_bool(config.density) {
                list.push(b);
                back.push(a);
            }
        }
    }
    let agent_prefs = neighbours
        .into_iter()
        .map(|items| random_list(&mut rng, items, config.tie_max))
        .collect();
    let job_prefs = config.model.has_job_lists().then(|| {
        job_neighbours
            .into_iter()
            .map(|items| random_list(&mut rng, items, config.tie_max))
            .collect()
    });
    Instance::new(
        config.model,
        (1..=config.n_agents).map(|i| format!("a{i}")).collect(),
        (1..=config.n_jobs).map(|j| format!("b{j}")).collect(),
        agent_prefs,
        job_prefs,
    )
}

/// A copy of `instance` in which `agent`'s list is randomly reordered with
/// the same neighbours and tie sizes drawn anew (strict when the model
/// requires it).
pub fn perturb_agent(instance: &Instance, agent: usize, seed: u64) -> Result<Instance> {
    if agent >= instance.num_agents() {
        return Err(Error::InvalidArgument(format!("agent index {agent} out of range")));
    }
    let tie_max = match instance.model() {
        Model::TwoSidedTies { k } => k,
        _ => 1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list = random_list(&mut rng, instance.agent_prefs(agent).item_set().collect(), tie_max);
    instance.with_agent_prefs(agent, list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::serialize_instance;

    #[test]
    fn same_seed_same_instance() {
        let c = GenConfig::new(Model::TwoSidedTies { k: 3 }, 6, 5, 0.5, 42);
        assert_eq!(
            serialize_instance(&generate(&c).unwrap()),
            serialize_instance(&generate(&c).unwrap())
        );
    }

    #[test]
    fn full_density_is_complete() {
        let c = GenConfig::new(Model::OneSided, 4, 3, 1.0, 7);
        let i = generate(&c).unwrap();
        assert_eq!(i.num_edges(), 12);
        assert!((0..4).all(|a| i.agent_prefs(a).is_strict()));
    }

    #[test]
    fn ties_respect_bound() {
        let c = GenConfig::new(Model::TwoSidedTies { k: 3 }, 8, 8, 1.0, 1);
        let i = generate(&c).unwrap();
        assert!((0..8).all(|v| i.agent_prefs(v).max_tie() <= 3 && i.job_prefs(v).max_tie() <= 3));
    }

    #[test]
    fn bad_configs_rejected() {
        let mut c = GenConfig::new(Model::OneSided, 2, 2, 0.5, 0);
        c.tie_max = 2;
        assert!(generate(&c).is_err());
        let c = GenConfig::new(Model::OneSided, 2, 2, 0.0, 0);
        assert!(generate(&c).is_err());
    }

    #[test]
    fn perturbation_keeps_neighbours() {
        let i = generate(&GenConfig::new(Model::TwoSidedOneTie, 4, 4, 0.8, 3)).unwrap();
        let j = perturb_agent(&i, 1, 9).unwrap();
        assert!(j.agent_prefs(1).item_set().eq(i.agent_prefs(1).item_set()));
        assert!(j.agent_prefs(1).is_strict());
        assert!((0..4).filter(|&a| a != 1).all(|a| i.agent_prefs(a) == j.agent_prefs(a)));
    }
}
