//! Preference instances: the bipartite graph, per-vertex ranked lists and the
//! voting model that determines how each side compares two partners.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Agent,
    Job,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Agent => Side::Job,
            Side::Job => Side::Agent,
        }
    }
}

/// A vertex of the bipartite graph. Ordering is by `(side, index)`, which is
/// the tie-breaking order used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub side: Side,
    pub index: usize,
}

impl VertexId {
    pub fn agent(index: usize) -> Self {
        VertexId {
            side: Side::Agent,
            index,
        }
    }

    pub fn job(index: usize) -> Self {
        VertexId {
            side: Side::Job,
            index,
        }
    }
}

/// A weak order over neighbours: an ordered sequence of indifference groups.
///
/// Items are indices into the opposite side. Each group is kept sorted by
/// index so that two lists describing the same order compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PreferenceList {
    groups: Vec<Vec<usize>>,
    // (item, group position), sorted by item
    ranks: Vec<(usize, usize)>,
}

impl PreferenceList {
    pub fn new(groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut ranks = Vec::new();
        let mut normalized = Vec::with_capacity(groups.len());
        for (pos, mut group) in groups.into_iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidArgument("empty indifference group".into()));
            }
            group.sort_unstable();
            ranks.extend(group.iter().map(|&item| (item, pos)));
            normalized.push(group);
        }
        ranks.sort_unstable();
        if ranks.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(
                "item listed more than once in a preference list".into(),
            ));
        }
        Ok(PreferenceList {
            groups: normalized,
            ranks,
        })
    }

    /// A strict list in the given order.
    pub fn strict<I: IntoIterator<Item = usize>>(items: I) -> Result<Self> {
        Self::new(items.into_iter().map(|x| vec![x]).collect())
    }

    /// All items in one indifference group (empty list when `items` is empty).
    pub fn single_tie<I: IntoIterator<Item = usize>>(items: I) -> Result<Self> {
        let group: Vec<usize> = items.into_iter().collect();
        if group.is_empty() {
            Ok(Self::default())
        } else {
            Self::new(vec![group])
        }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Position of the group containing `item`; 0 is the most preferred.
    pub fn rank(&self, item: usize) -> Option<usize> {
        self.ranks
            .binary_search_by_key(&item, |&(x, _)| x)
            .ok()
            .map(|i| self.ranks[i].1)
    }

    pub fn contains(&self, item: usize) -> bool {
        self.rank(item).is_some()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn is_strict(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }

    pub fn max_tie(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Items in preference order, ties broken by index.
    pub fn items(&self) -> impl Iterator<Item = usize> + '_ {
        self.groups.iter().flatten().copied()
    }

    /// Items sorted by index (the neighbour set).
    pub fn item_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranks.iter().map(|&(x, _)| x)
    }

    /// The unique most preferred item, if the first group is a singleton.
    pub fn top(&self) -> Option<usize> {
        match self.groups.first() {
            Some(g) if g.len() == 1 => Some(g[0]),
            _ => None,
        }
    }

    /// Compares two options, `None` being the unmatched state.
    /// Both options must be members of the list (or `None`).
    pub fn compare(&self, x: Option<usize>, y: Option<usize>) -> i8 {
        match (x, y) {
            (None, None) => 0,
            (Some(_), None) => 1,
            (None, Some(_)) => -1,
            (Some(x), Some(y)) => {
                let rx = self.rank(x).expect("item not in preference list");
                let ry = self.rank(y).expect("item not in preference list");
                match rx.cmp(&ry) {
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => -1,
                }
            }
        }
    }
}

/// Which side votes and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Only agents rank; jobs never vote.
    OneSided,
    /// Agents rank; every job is indifferent among its neighbours but prefers
    /// being matched to being unmatched.
    TwoSidedOneTie,
    /// Both sides rank with ties of length at most `k`.
    TwoSidedTies { k: usize },
}

impl Model {
    pub fn has_job_lists(self) -> bool {
        matches!(self, Model::TwoSidedTies { .. })
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::OneSided => f.write_str("one-sided"),
            Model::TwoSidedOneTie => f.write_str("two-sided-one-tie"),
            Model::TwoSidedTies { k } => write!(f, "two-sided-ties k={k}"),
        }
    }
}

/// An immutable preference instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    model: Model,
    agent_names: Vec<String>,
    job_names: Vec<String>,
    agent_prefs: Vec<PreferenceList>,
    job_prefs: Vec<PreferenceList>,
    names: HashMap<String, VertexId>,
}

impl Instance {
    /// Builds and validates an instance.
    ///
    /// `job_prefs` must be given exactly when the model has job lists
    /// (`TwoSidedTies`); otherwise every job gets a single tie over its
    /// neighbours.
    pub fn new(
        model: Model,
        agent_names: Vec<String>,
        job_names: Vec<String>,
        agent_prefs: Vec<PreferenceList>,
        job_prefs: Option<Vec<PreferenceList>>,
    ) -> Result<Self> {
        let mut names = HashMap::new();
        for (i, name) in agent_names.iter().enumerate() {
            if names.insert(name.clone(), VertexId::agent(i)).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        for (j, name) in job_names.iter().enumerate() {
            if names.insert(name.clone(), VertexId::job(j)).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if agent_prefs.len() != agent_names.len() {
            return Err(Error::InvalidInstance(
                "one preference list per agent required".into(),
            ));
        }
        let n_jobs = job_names.len();
        let mut neighbors = vec![Vec::new(); n_jobs];
        for (a, list) in agent_prefs.iter().enumerate() {
            for b in list.item_set() {
                if b >= n_jobs {
                    return Err(Error::InvalidInstance(format!(
                        "agent {} lists a job index out of range",
                        agent_names[a]
                    )));
                }
                neighbors[b].push(a);
            }
        }

        let job_prefs = match (model, job_prefs) {
            (Model::TwoSidedTies { k }, Some(lists)) => {
                if k == 0 {
                    return Err(Error::InvalidInstance("tie bound k must be at least 1".into()));
                }
                if lists.len() != n_jobs {
                    return Err(Error::InvalidInstance(
                        "one preference list per job required".into(),
                    ));
                }
                for (b, list) in lists.iter().enumerate() {
                    if !list.item_set().eq(neighbors[b].iter().copied()) {
                        return Err(Error::InvalidInstance(format!(
                            "preference list of job {} does not match its neighbour set",
                            job_names[b]
                        )));
                    }
                }
                let too_long = agent_prefs
                    .iter()
                    .zip(&agent_names)
                    .chain(lists.iter().zip(&job_names))
                    .find(|(l, _)| l.max_tie() > k);
                if let Some((_, name)) = too_long {
                    return Err(Error::InvalidInstance(format!(
                        "vertex {name} has a tie longer than k={k}"
                    )));
                }
                lists
            }
            (Model::TwoSidedTies { .. }, None) => {
                return Err(Error::InvalidInstance(
                    "two-sided-ties model needs job preference lists".into(),
                ))
            }
            (_, Some(_)) => {
                return Err(Error::InvalidInstance(format!(
                    "jobs carry no preference lists under model {model}"
                )))
            }
            (_, None) => neighbors
                .into_iter()
                .map(PreferenceList::single_tie)
                .collect::<Result<_>>()?,
        };

        Ok(Instance {
            model,
            agent_names,
            job_names,
            agent_prefs,
            job_prefs,
            names,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn num_agents(&self) -> usize {
        self.agent_names.len()
    }

    pub fn num_jobs(&self) -> usize {
        self.job_names.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_agents() + self.num_jobs()
    }

    pub fn num_edges(&self) -> usize {
        self.agent_prefs.iter().map(PreferenceList::len).sum()
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agent_names
    }

    pub fn job_names(&self) -> &[String] {
        &self.job_names
    }

    pub fn name(&self, v: VertexId) -> &str {
        match v.side {
            Side::Agent => &self.agent_names[v.index],
            Side::Job => &self.job_names[v.index],
        }
    }

    pub fn lookup(&self, name: &str) -> Option<VertexId> {
        self.names.get(name).copied()
    }

    pub fn agent_by_name(&self, name: &str) -> Result<usize> {
        match self.lookup(name) {
            Some(VertexId {
                side: Side::Agent,
                index,
            }) => Ok(index),
            _ => Err(Error::UnknownVertex(name.to_string())),
        }
    }

    pub fn job_by_name(&self, name: &str) -> Result<usize> {
        match self.lookup(name) {
            Some(VertexId {
                side: Side::Job,
                index,
            }) => Ok(index),
            _ => Err(Error::UnknownVertex(name.to_string())),
        }
    }

    pub fn agent_prefs(&self, a: usize) -> &PreferenceList {
        &self.agent_prefs[a]
    }

    pub fn job_prefs(&self, b: usize) -> &PreferenceList {
        &self.job_prefs[b]
    }

    pub fn prefs(&self, v: VertexId) -> &PreferenceList {
        match v.side {
            Side::Agent => &self.agent_prefs[v.index],
            Side::Job => &self.job_prefs[v.index],
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_agents() && self.agent_prefs[a].contains(b)
    }

    /// All edges `(agent, job)` sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.agent_prefs
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.item_set().map(move |b| (a, b)))
            .collect()
    }

    /// A new instance in which `agent` ranks its (unchanged) neighbour set by
    /// `list`.
    pub fn with_agent_prefs(&self, agent: usize, list: PreferenceList) -> Result<Instance> {
        if agent >= self.num_agents() {
            return Err(Error::InvalidArgument(format!("agent index {agent} out of range")));
        }
        if !list.item_set().eq(self.agent_prefs[agent].item_set()) {
            return Err(Error::InvalidArgument(format!(
                "new list of agent {} changes its neighbour set",
                self.agent_names[agent]
            )));
        }
        if let Model::TwoSidedTies { k } = self.model {
            if list.max_tie() > k {
                return Err(Error::InvalidArgument(format!("tie longer than k={k}")));
            }
        }
        let mut out = self.clone();
        out.agent_prefs[agent] = list;
        Ok(out)
    }

    /// `v`'s vote between partners `x` and `y` (`None` = unmatched): +1 if it
    /// prefers `x`, -1 if it prefers `y`, 0 otherwise.
    pub fn vote(&self, v: VertexId, x: Option<usize>, y: Option<usize>) -> Result<i8> {
        let bound = match v.side {
            Side::Agent => self.num_agents(),
            Side::Job => self.num_jobs(),
        };
        if v.index >= bound {
            return Err(Error::InvalidArgument(format!("vertex {v:?} out of range")));
        }
        let list = self.prefs(v);
        for z in [x, y].into_iter().flatten() {
            if !list.contains(z) {
                return Err(Error::InvalidArgument(format!(
                    "{z} is not a neighbour of {}",
                    self.name(v)
                )));
            }
        }
        Ok(self.vote_unchecked(v, x, y))
    }

    pub(crate) fn vote_unchecked(&self, v: VertexId, x: Option<usize>, y: Option<usize>) -> i8 {
        match v.side {
            Side::Agent => self.agent_prefs[v.index].compare(x, y),
            Side::Job if self.model == Model::OneSided => 0,
            Side::Job => self.job_prefs[v.index].compare(x, y),
        }
    }

    pub(crate) fn agent_vote(&self, a: usize, x: Option<usize>, y: Option<usize>) -> i8 {
        self.vote_unchecked(VertexId::agent(a), x, y)
    }

    pub(crate) fn job_vote(&self, b: usize, x: Option<usize>, y: Option<usize>) -> i8 {
        self.vote_unchecked(VertexId::job(b), x, y)
    }

    pub(crate) fn require_model(&self, ok: bool, expected: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel {
                expected: expected.to_string(),
                found: self.model.to_string(),
            })
        }
    }

    pub(crate) fn check_cap(&self, cap: usize) -> Result<()> {
        if self.num_vertices() > cap {
            Err(Error::SizeLimit {
                vertices: self.num_vertices(),
                cap,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn preference_list_rejects_duplicates_and_empty_groups() {
        assert!(PreferenceList::new(vec![vec![0], vec![0]]).is_err());
        assert!(PreferenceList::new(vec![vec![]]).is_err());
        let l = PreferenceList::new(vec![vec![2, 0], vec![1]]).unwrap();
        assert_eq!(l.groups(), &[vec![0, 2], vec![1]]);
        assert_eq!(l.rank(2), Some(0));
        assert_eq!(l.rank(1), Some(1));
        assert_eq!(l.compare(Some(0), Some(2)), 0);
        assert_eq!(l.compare(Some(1), None), 1);
        assert!(!l.is_strict());
        assert_eq!(l.max_tie(), 2);
    }

    #[test]
    fn job_lists_are_derived_without_job_preferences() {
        let agents = vec![
            PreferenceList::strict([0, 1]).unwrap(),
            PreferenceList::strict([0]).unwrap(),
        ];
        let inst = Instance::new(Model::TwoSidedOneTie, names("a", 2), names("b", 2), agents, None)
            .unwrap();
        assert_eq!(inst.job_prefs(0).groups(), &[vec![0, 1]]);
        assert_eq!(inst.job_prefs(1).groups(), &[vec![0]]);
        assert_eq!(inst.num_edges(), 3);
        assert_eq!(inst.edges(), vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn duplicate_names_across_sides_rejected() {
        let err = Instance::new(
            Model::OneSided,
            vec!["x".into()],
            vec!["x".into()],
            vec![PreferenceList::default()],
            None,
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateName("x".into()));
    }

    #[test]
    fn vote_conventions_per_model() {
        let agents = vec![PreferenceList::strict([0, 1]).unwrap()];
        let one_tie =
            Instance::new(Model::TwoSidedOneTie, names("a", 1), names("b", 2), agents.clone(), None)
                .unwrap();
        let one_sided =
            Instance::new(Model::OneSided, names("a", 1), names("b", 2), agents, None).unwrap();

        assert_eq!(one_tie.vote(VertexId::job(0), Some(0), None), Ok(1));
        assert_eq!(one_tie.vote(VertexId::job(0), None, Some(0)), Ok(-1));
        assert_eq!(one_sided.vote(VertexId::job(0), Some(0), None), Ok(0));
        assert_eq!(one_sided.vote(VertexId::agent(0), Some(1), Some(0)), Ok(-1));
        assert_eq!(one_sided.vote(VertexId::agent(0), Some(0), Some(0)), Ok(0));
        assert!(one_sided.vote(VertexId::agent(0), Some(5), None).is_err());
    }

    #[test]
    fn perturbation_must_keep_neighbour_set() {
        let agents = vec![PreferenceList::strict([0, 1]).unwrap()];
        let inst =
            Instance::new(Model::OneSided, names("a", 1), names("b", 2), agents, None).unwrap();
        assert!(inst
            .with_agent_prefs(0, PreferenceList::strict([1, 0]).unwrap())
            .is_ok());
        assert!(inst
            .with_agent_prefs(0, PreferenceList::strict([1]).unwrap())
            .is_err());
    }
}
