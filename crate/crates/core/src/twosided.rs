//! Matchings that stay popular when one agent changes its preference order,
//! in the two-sided model where every job is indifferent among its
//! neighbours.
//!
//! For an edge `e = (a, b)` of the perturbed agent, the hybrid instance ranks
//! everything `a` prefers to `b` in some input instance above `b` and the
//! remaining neighbours below it. A matching containing `e` is popular in the
//! hybrid instance iff it is popular in every input instance, and a matching
//! leaving `a` unmatched is popular in one input instance iff it is popular
//! in all of them. Popular matchings with a prescribed edge are found by
//! enumeration checked with the polynomial verifier, so these searches are
//! guarded by a vertex cap.

use std::ops::ControlFlow;

use crate::diff::common_perturbed_agent;
use crate::enumerate::{for_each_matching, Pin};
use crate::error::{Error, Result};
use crate::instance::{Instance, Model, PreferenceList};
use crate::matching::Matching;
use crate::popularity::is_popular;

/// The perturbed agent's list in a hybrid instance, split around the job of
/// the chosen edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridSpec {
    pub agent: usize,
    pub job: usize,
    /// Jobs preferred to `job` in at least one instance, by index.
    pub upper: Vec<usize>,
    /// The remaining neighbours, by index.
    pub lower: Vec<usize>,
}

impl HybridSpec {
    pub fn preference_list(&self) -> PreferenceList {
        PreferenceList::strict(self.upper.iter().copied().chain([self.job]).chain(self.lower.iter().copied()))
            .expect("tiers are disjoint")
    }
}

fn check_edge(instance: &Instance, agent: usize, job: usize) -> Result<()> {
    if agent >= instance.num_agents() || job >= instance.num_jobs() || !instance.has_edge(agent, job) {
        return Err(Error::InvalidArgument(format!("({agent}, {job}) is not an edge")));
    }
    Ok(())
}

/// The hybrid split of `agent`'s neighbours around `job` over all
/// `instances`, which must differ from the first at most in `agent`'s order.
pub fn hybrid_spec(instances: &[&Instance], agent: usize, job: usize) -> Result<HybridSpec> {
    if let Some(p) = common_perturbed_agent(instances)? {
        if p != agent {
            return Err(Error::InvalidArgument(format!(
                "the edge must be incident to the perturbed agent {}",
                instances[0].agent_names()[p]
            )));
        }
    }
    let base = instances[0];
    check_edge(base, agent, job)?;
    let preferred = |z: usize| {
        instances.iter().any(|i| {
            let l = i.agent_prefs(agent);
            l.rank(z) < l.rank(job)
        })
    };
    let (upper, lower) = base
        .agent_prefs(agent)
        .item_set()
        .filter(|&z| z != job)
        .partition(|&z| preferred(z));
    Ok(HybridSpec {
        agent,
        job,
        upper,
        lower,
    })
}

/// The hybrid instance of the pair for edge `(agent, job)`; all other lists
/// are copied from `first`.
pub fn build_hybrid(first: &Instance, second: &Instance, agent: usize, job: usize) -> Result<Instance> {
    build_hybrid_multi(&[first, second], agent, job)
}

pub fn build_hybrid_multi(instances: &[&Instance], agent: usize, job: usize) -> Result<Instance> {
    let spec = hybrid_spec(instances, agent, job)?;
    instances[0].with_agent_prefs(agent, spec.preference_list())
}

fn search_popular(instance: &Instance, pins: &[Option<Pin>], cap: usize) -> Result<Option<Matching>> {
    instance.check_cap(cap)?;
    let found = for_each_matching(instance, pins, |m| {
        if is_maximal(instance, m) && is_popular(instance, m).expect("enumerated matchings are valid").is_popular() {
            ControlFlow::Break(m.clone())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found)
}

// Adding an edge between two unmatched vertices gains at least one vote and
// loses none, so popular matchings are maximal.
fn is_maximal(instance: &Instance, m: &Matching) -> bool {
    instance
        .edges()
        .into_iter()
        .all(|(a, b)| m.job_of(a).is_some() || m.agent_of(b).is_some())
}

/// The first popular matching in enumeration order, if any.
pub fn find_popular(instance: &Instance, cap: usize) -> Result<Option<Matching>> {
    search_popular(instance, &vec![None; instance.num_agents()], cap)
}

/// A popular matching containing `(agent, job)`, if any.
pub fn popular_with_forced_edge(instance: &Instance, agent: usize, job: usize, cap: usize) -> Result<Option<Matching>> {
    instance.check_cap(cap)?;
    check_edge(instance, agent, job)?;
    let mut pins = vec![None; instance.num_agents()];
    pins[agent] = Some(Pin::Job(job));
    search_popular(instance, &pins, cap)
}

/// A popular matching leaving `agent` unmatched, if any.
pub fn popular_with_agent_unmatched(instance: &Instance, agent: usize, cap: usize) -> Result<Option<Matching>> {
    instance.check_cap(cap)?;
    if agent >= instance.num_agents() {
        return Err(Error::InvalidArgument(format!("agent index {agent} out of range")));
    }
    let mut pins = vec![None; instance.num_agents()];
    pins[agent] = Some(Pin::Unmatched);
    search_popular(instance, &pins, cap)
}

/// How a robust matching was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustRoute {
    /// The instances are identical.
    Unperturbed,
    /// The perturbed agent is unmatched.
    AgentUnmatched,
    /// Through the hybrid instance of this edge of the perturbed agent.
    Edge { agent: usize, job: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustMatching {
    pub matching: Matching,
    pub route: RobustRoute,
}

/// A matching popular in both instances of the two-sided one-tie model that
/// differ in at most one agent's preference order.
///
/// First a popular matching leaving the perturbed agent unmatched is sought;
/// then, for each of its edges in job order, a popular matching of the
/// edge's hybrid instance containing the edge.
pub fn robust_two_sided(first: &Instance, second: &Instance, cap: usize) -> Result<Option<RobustMatching>> {
    robust_multi(&[first, second], cap)
}

/// A matching popular in every instance; all must differ from the first in
/// the preference order of the same single agent.
pub fn robust_multi(instances: &[&Instance], cap: usize) -> Result<Option<RobustMatching>> {
    let agent = common_perturbed_agent(instances)?;
    let base = instances[0];
    base.require_model(base.model() == Model::TwoSidedOneTie, "two-sided-one-tie")?;
    base.check_cap(cap)?;
    let Some(a) = agent else {
        return Ok(find_popular(base, cap)?.map(|matching| RobustMatching {
            matching,
            route: RobustRoute::Unperturbed,
        }));
    };
    if let Some(matching) = popular_with_agent_unmatched(base, a, cap)? {
        return Ok(Some(RobustMatching {
            matching,
            route: RobustRoute::AgentUnmatched,
        }));
    }
    for b in base.agent_prefs(a).item_set() {
        let hybrid = build_hybrid_multi(instances, a, b)?;
        if let Some(matching) = popular_with_forced_edge(&hybrid, a, b, cap)? {
            return Ok(Some(RobustMatching {
                matching,
                route: RobustRoute::Edge { agent: a, job: b },
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;
    use crate::popularity::DEFAULT_CAP;

    fn inst(t: &str) -> Instance {
        parse_instance(t).unwrap()
    }

    const I: &str = "model two-sided-one-tie\nagents a\njobs b1 b2 b3\na : b1 > b2 > b3\n";
    const J: &str = "model two-sided-one-tie\nagents a\njobs b1 b2 b3\na : b3 > b1 > b2\n";

    #[test]
    fn hybrid_places_union_above_the_edge_job() {
        let (i, j) = (inst(I), inst(J));
        let spec = hybrid_spec(&[&i, &j], 0, 1).unwrap();
        assert_eq!(spec.upper, vec![0, 2]);
        assert!(spec.lower.is_empty());
        let h = build_hybrid(&i, &j, 0, 1).unwrap();
        assert_eq!(h.agent_prefs(0), &PreferenceList::strict([0, 2, 1]).unwrap());
    }

    #[test]
    fn hybrid_of_identical_instances_keeps_tiers() {
        let i = inst(I);
        let h = build_hybrid(&i, &i, 0, 1).unwrap();
        assert_eq!(h.agent_prefs(0), i.agent_prefs(0));
        let h = build_hybrid(&i, &i, 0, 0).unwrap();
        assert_eq!(h.agent_prefs(0).items().next(), Some(0));
    }

    #[test]
    fn hybrid_rejects_edges_of_other_agents() {
        let i = inst("model two-sided-one-tie\nagents a1 a2\njobs b1 b2\na1 : b1 > b2\na2 : b1\n");
        let j = inst("model two-sided-one-tie\nagents a1 a2\njobs b1 b2\na1 : b2 > b1\na2 : b1\n");
        assert!(build_hybrid(&i, &j, 1, 0).is_err());
        assert!(build_hybrid(&i, &j, 1, 1).is_err());
    }

    #[test]
    fn forced_edge_search() {
        let i = inst("model two-sided-one-tie\nagents a1\njobs b1\na1 : b1\n");
        assert!(popular_with_forced_edge(&i, 0, 0, DEFAULT_CAP).unwrap().unwrap().contains(0, 0));
        let i = inst("model two-sided-one-tie\nagents a1 a2\njobs b1 b2\na1 : b1 > b2\na2 : b1 > b2\n");
        let m = popular_with_forced_edge(&i, 0, 1, DEFAULT_CAP).unwrap().unwrap();
        assert!(m.contains(0, 1) && m.contains(1, 0));
    }

    #[test]
    fn unmatched_search() {
        let i = inst("model two-sided-one-tie\nagents a1 a2\njobs b1\na1 : b1\na2 : b1\n");
        let m = popular_with_agent_unmatched(&i, 0, DEFAULT_CAP).unwrap().unwrap();
        assert!(m.contains(1, 0));
        let i = inst("model two-sided-one-tie\nagents a1\njobs b1\na1 : b1\n");
        assert_eq!(popular_with_agent_unmatched(&i, 0, DEFAULT_CAP), Ok(None));
    }

    #[test]
    fn identical_pair_returns_a_popular_matching() {
        let i = inst("model two-sided-one-tie\nagents a1 a2\njobs b1 b2\na1 : b1 > b2\na2 : b1 > b2\n");
        let r = robust_two_sided(&i, &i, DEFAULT_CAP).unwrap().unwrap();
        assert_eq!(r.route, RobustRoute::Unperturbed);
        assert!(is_popular(&i, &r.matching).unwrap().is_popular());
    }

    #[test]
    fn wrong_model_rejected() {
        let i = inst("model one-sided\nagents a1\njobs b1\na1 : b1\n");
        assert!(matches!(
            robust_two_sided(&i, &i, DEFAULT_CAP),
            Err(Error::InvalidModel { .. })
        ));
    }
}
