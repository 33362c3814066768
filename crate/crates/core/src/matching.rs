use crate::error::{Error, Result};
use crate::instance::{Instance, Side, VertexId};

/// A set of disjoint agent–job pairs with constant-time partner lookup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    agent_job: Vec<Option<usize>>,
    job_agent: Vec<Option<usize>>,
}

impl Matching {
    pub fn new(num_agents: usize, num_jobs: usize) -> Self {
        Matching {
            agent_job: vec![None; num_agents],
            job_agent: vec![None; num_jobs],
        }
    }

    pub fn empty_for(instance: &Instance) -> Self {
        Self::new(instance.num_agents(), instance.num_jobs())
    }

    /// Builds a matching of `instance` from `(agent, job)` pairs.
    pub fn from_pairs<I>(instance: &Instance, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Self::empty_for(instance);
        for (a, b) in pairs {
            if !instance.has_edge(a, b) {
                return Err(Error::InvalidMatching(format!("({a}, {b}) is not an edge")));
            }
            m.insert(a, b)?;
        }
        Ok(m)
    }

    pub fn num_agents(&self) -> usize {
        self.agent_job.len()
    }

    pub fn num_jobs(&self) -> usize {
        self.job_agent.len()
    }

    pub fn job_of(&self, a: usize) -> Option<usize> {
        self.agent_job[a]
    }

    pub fn agent_of(&self, b: usize) -> Option<usize> {
        self.job_agent[b]
    }

    pub fn partner(&self, v: VertexId) -> Option<usize> {
        match v.side {
            Side::Agent => self.agent_job[v.index],
            Side::Job => self.job_agent[v.index],
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.agent_job[a] == Some(b)
    }

    pub fn len(&self) -> usize {
        self.agent_job.iter().filter(|x| x.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.agent_job.iter().all(Option::is_none)
    }

    /// Pairs in agent order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.agent_job
            .iter()
            .enumerate()
            .filter_map(|(a, b)| b.map(|b| (a, b)))
    }

    /// Adds `(a, b)`; both must currently be unmatched.
    pub fn insert(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.num_agents() || b >= self.num_jobs() {
            return Err(Error::InvalidMatching(format!("({a}, {b}) out of range")));
        }
        if self.agent_job[a].is_some() || self.job_agent[b].is_some() {
            return Err(Error::InvalidMatching(format!(
                "({a}, {b}) shares an endpoint with another pair"
            )));
        }
        self.link(a, b);
        Ok(())
    }

    pub fn remove_agent(&mut self, a: usize) -> Option<usize> {
        let b = self.agent_job[a].take()?;
        self.job_agent[b] = None;
        Some(b)
    }

    pub fn remove_job(&mut self, b: usize) -> Option<usize> {
        let a = self.job_agent[b].take()?;
        self.agent_job[a] = None;
        Some(a)
    }

    /// Sets `a`'s partner to `b` without touching previous partners; callers
    /// keep the two directions consistent (augmenting-path flips).
    pub(crate) fn link(&mut self, a: usize, b: usize) {
        self.agent_job[a] = Some(b);
        self.job_agent[b] = Some(a);
    }

    /// Checks that the matching fits `instance` and uses only its edges.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.num_agents() != instance.num_agents() || self.num_jobs() != instance.num_jobs() {
            return Err(Error::InvalidMatching(
                "matching dimensions differ from the instance".into(),
            ));
        }
        for (a, b) in self.pairs() {
            if self.job_agent[b] != Some(a) {
                return Err(Error::InvalidMatching("inconsistent partner table".into()));
            }
            if !instance.has_edge(a, b) {
                return Err(Error::InvalidMatching(format!(
                    "({}, {}) is not an edge",
                    instance.agent_names()[a],
                    instance.job_names()[b]
                )));
            }
        }
        Ok(())
    }
}

/// Δ(M, M'): votes for `m` minus votes for `other` over all vertices.
pub fn popularity_margin(instance: &Instance, m: &Matching, other: &Matching) -> Result<i64> {
    m.validate(instance)?;
    other.validate(instance)?;
    Ok(margin_unchecked(instance, m, other))
}

pub(crate) fn margin_unchecked(instance: &Instance, m: &Matching, other: &Matching) -> i64 {
    let agents: i64 = (0..instance.num_agents())
        .map(|a| instance.agent_vote(a, m.job_of(a), other.job_of(a)) as i64)
        .sum();
    let jobs: i64 = (0..instance.num_jobs())
        .map(|b| instance.job_vote(b, m.agent_of(b), other.agent_of(b)) as i64)
        .sum();
    agents + jobs
}

/// φ(M, N): the number of vertices that prefer `m` to `other`.
pub fn preference_count(instance: &Instance, m: &Matching, other: &Matching) -> u64 {
    let agents = (0..instance.num_agents())
        .filter(|&a| instance.agent_vote(a, m.job_of(a), other.job_of(a)) > 0)
        .count();
    let jobs = (0..instance.num_jobs())
        .filter(|&b| instance.job_vote(b, m.agent_of(b), other.agent_of(b)) > 0)
        .count();
    (agents + jobs) as u64
}
