//! Popular matchings when only agents vote.
//!
//! With strict agent lists, M is popular iff every top-choice job ("f-job")
//! is matched to an agent ranking it first and every agent is matched to its
//! first choice `f` or to its best non-f-job `r` (unmatched only when `r`
//! does not exist). All solvers here search for matchings meeting these
//! conditions, possibly in several instances at once.

use std::fmt;

use crate::diff::{common_perturbed_agent, diff_instances, PerturbationDiff};
use crate::enumerate::Pin;
use crate::error::{Error, Result};
use crate::graph::{max_weight_perfect_matching, WeightedAugmentedGraph};
use crate::instance::{Instance, Model};
use crate::matching::Matching;

/// Top choices and best non-top-choice jobs of every agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrStructure {
    /// `None` for agents without neighbours.
    pub f: Vec<Option<usize>>,
    /// `None` stands for ∞: every neighbour is an f-job.
    pub r: Vec<Option<usize>>,
    /// Whether each job is some agent's first choice.
    pub is_f_job: Vec<bool>,
}

impl FrStructure {
    pub fn f_jobs(&self) -> impl Iterator<Item = usize> + '_ {
        self.is_f_job.iter().enumerate().filter(|(_, &x)| x).map(|(b, _)| b)
    }

    /// Whether `a` may be assigned `target` (`None` = unmatched) in a popular
    /// matching.
    pub fn allows(&self, a: usize, target: Option<usize>) -> bool {
        match target {
            None => self.r[a].is_none(),
            Some(b) => self.f[a] == Some(b) || self.r[a] == Some(b),
        }
    }
}

fn require_strict_one_sided(instance: &Instance) -> Result<()> {
    instance.require_model(instance.model() == Model::OneSided, "one-sided")?;
    let strict = (0..instance.num_agents()).all(|a| instance.agent_prefs(a).is_strict());
    instance.require_model(strict, "one-sided with strict agent lists")
}

pub fn fr_structure(instance: &Instance) -> Result<FrStructure> {
    require_strict_one_sided(instance)?;
    let f: Vec<Option<usize>> = (0..instance.num_agents())
        .map(|a| instance.agent_prefs(a).items().next())
        .collect();
    let mut is_f_job = vec![false; instance.num_jobs()];
    for &b in f.iter().flatten() {
        is_f_job[b] = true;
    }
    let r = (0..instance.num_agents())
        .map(|a| instance.agent_prefs(a).items().find(|&b| !is_f_job[b]))
        .collect();
    Ok(FrStructure { f, r, is_f_job })
}

/// The first way in which a matching breaks the popularity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrViolation {
    FJobUnmatched { job: usize },
    FJobHeldByOther { job: usize, agent: usize },
    AgentOutsideFr { agent: usize },
    AgentUnmatched { agent: usize },
}

impl fmt::Display for FrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrViolation::FJobUnmatched { job } => write!(f, "f-job {job} is unmatched"),
            FrViolation::FJobHeldByOther { job, agent } => {
                write!(f, "f-job {job} is held by agent {agent}, which ranks another job first")
            }
            FrViolation::AgentOutsideFr { agent } => {
                write!(f, "agent {agent} holds neither its f-job nor its r-job")
            }
            FrViolation::AgentUnmatched { agent } => {
                write!(f, "agent {agent} is unmatched although its r-job exists")
            }
        }
    }
}

/// `None` when `m` meets both conditions, i.e. is popular.
pub fn fr_violation(instance: &Instance, m: &Matching) -> Result<Option<FrViolation>> {
    let fr = fr_structure(instance)?;
    m.validate(instance)?;
    Ok(violation_with(&fr, m))
}

pub fn satisfies_fr_conditions(instance: &Instance, m: &Matching) -> Result<bool> {
    Ok(fr_violation(instance, m)?.is_none())
}

fn violation_with(fr: &FrStructure, m: &Matching) -> Option<FrViolation> {
    for job in fr.f_jobs() {
        match m.agent_of(job) {
            None => return Some(FrViolation::FJobUnmatched { job }),
            Some(agent) if fr.f[agent] != Some(job) => {
                return Some(FrViolation::FJobHeldByOther { job, agent })
            }
            Some(_) => {}
        }
    }
    for agent in 0..m.num_agents() {
        let target = m.job_of(agent);
        if !fr.allows(agent, target) {
            return Some(match target {
                None => FrViolation::AgentUnmatched { agent },
                Some(_) => FrViolation::AgentOutsideFr { agent },
            });
        }
    }
    None
}

/// A matching meeting the conditions in every instance of `frs` at once,
/// with `pin` constraining one agent.
///
/// Agent `a` may use job `p` only if `p` is `f` or `r` of `a` in every
/// instance and `a` ranks `p` first wherever `p` is an f-job; it may stay
/// unmatched only if `r` is ∞ everywhere. A valid matching must cover every
/// f-job of every instance and every agent that may not stay unmatched; one
/// is found by maximizing the number of covered required vertices.
fn solve_joint(frs: &[FrStructure], num_agents: usize, num_jobs: usize, pin: Option<(usize, Pin)>) -> Option<Matching> {
    let required_job: Vec<bool> = (0..num_jobs)
        .map(|b| frs.iter().any(|fr| fr.is_f_job[b]))
        .collect();
    let mut required_agent = vec![false; num_agents];
    let mut edges = Vec::new();
    for a in 0..num_agents {
        let mut may_unmatch = frs.iter().all(|fr| fr.r[a].is_none());
        let mut candidates: Vec<usize> = frs[0].f[a].into_iter().chain(frs[0].r[a]).collect();
        candidates.retain(|&p| {
            frs.iter()
                .all(|fr| fr.allows(a, Some(p)) && (!fr.is_f_job[p] || fr.f[a] == Some(p)))
        });
        match pin {
            Some((pa, Pin::Job(b))) if pa == a => {
                candidates.retain(|&p| p == b);
                may_unmatch = false;
            }
            Some((pa, Pin::Unmatched)) if pa == a => {
                if !may_unmatch {
                    return None;
                }
                candidates.clear();
            }
            _ => {}
        }
        if !may_unmatch && candidates.is_empty() {
            return None;
        }
        required_agent[a] = !may_unmatch;
        edges.extend(candidates.into_iter().map(|p| (a, p)));
    }
    let goal = required_agent.iter().filter(|&&x| x).count() + required_job.iter().filter(|&&x| x).count();
    let g = WeightedAugmentedGraph {
        num_agents,
        num_jobs,
        edges: edges
            .iter()
            .map(|&(a, p)| (a, p, required_agent[a] as i64 + required_job[p] as i64))
            .collect(),
        agent_dummy_weight: vec![0; num_agents],
        job_dummy_weight: vec![0; num_jobs],
    };
    let sol = max_weight_perfect_matching(&g);
    (sol.weight == goal as i64).then_some(sol.matching)
}

/// A popular matching of a one-sided instance, or `None` if none exists.
pub fn solve_one_sided(instance: &Instance) -> Result<Option<Matching>> {
    let fr = fr_structure(instance)?;
    Ok(solve_joint(&[fr], instance.num_agents(), instance.num_jobs(), None))
}

/// A popular matching in which `agent` holds `job` (or is unmatched for
/// `None`). The requested assignment must itself be allowed by the
/// conditions, otherwise the forcing is rejected.
pub fn solve_one_sided_forced(instance: &Instance, agent: usize, job: Option<usize>) -> Result<Option<Matching>> {
    let fr = fr_structure(instance)?;
    if agent >= instance.num_agents() {
        return Err(Error::InvalidArgument(format!("agent index {agent} out of range")));
    }
    if !fr.allows(agent, job) {
        let name = &instance.agent_names()[agent];
        return Err(Error::InvalidForcing(match job {
            Some(b) => format!(
                "{} is neither the f-job nor the r-job of {name}",
                instance.job_names()[b]
            ),
            None => format!("{name} has an r-job and cannot be left unmatched"),
        }));
    }
    let pin = match job {
        Some(b) => Pin::Job(b),
        None => Pin::Unmatched,
    };
    Ok(solve_joint(&[fr], instance.num_agents(), instance.num_jobs(), Some((agent, pin))))
}

/// A matching popular in both instances, which must differ in at most one
/// agent's preference order.
///
/// Every assignment of the perturbed agent allowed in both instances is tried
/// in turn (its `f` and `r` in the first instance, then unmatched), each
/// solved jointly over the two instances.
pub fn robust_one_sided(first: &Instance, second: &Instance) -> Result<Option<Matching>> {
    let fr1 = fr_structure(first)?;
    let fr2 = fr_structure(second)?;
    let Some(diff) = diff_instances(first, second)? else {
        return solve_one_sided(first);
    };
    let a = diff.agent;
    let frs = [fr1, fr2];
    let (na, nb) = (first.num_agents(), first.num_jobs());
    let mut candidates: Vec<Pin> = frs[0].f[a]
        .into_iter()
        .chain(frs[0].r[a])
        .filter(|&b| frs[1].allows(a, Some(b)))
        .map(Pin::Job)
        .collect();
    if frs.iter().all(|fr| fr.allows(a, None)) {
        candidates.push(Pin::Unmatched);
    }
    Ok(candidates
        .into_iter()
        .find_map(|pin| solve_joint(&frs, na, nb, Some((a, pin)))))
}

/// A matching popular in every instance; all must differ from the first in
/// the preference order of the same single agent.
pub fn robust_one_sided_multi(instances: &[&Instance]) -> Result<Option<Matching>> {
    common_perturbed_agent(instances)?;
    let frs = instances.iter().map(|i| fr_structure(i)).collect::<Result<Vec<_>>>()?;
    let first = instances[0];
    Ok(solve_joint(&frs, first.num_agents(), first.num_jobs(), None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationCase {
    /// First choice changed; the agent holds its r-job (or nothing).
    Case1a,
    /// First choice changed; the agent holds its f-job.
    Case1b,
    /// First choice unchanged; the agent holds its r-job (or nothing).
    Case2a,
    /// First choice unchanged; the agent holds its f-job.
    Case2b,
}

impl fmt::Display for PerturbationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbationCase::Case1a => "1a",
            PerturbationCase::Case1b => "1b",
            PerturbationCase::Case2a => "2a",
            PerturbationCase::Case2b => "2b",
        })
    }
}

/// Which case a popular matching of the first instance falls into for a
/// perturbation, with every sub-condition the case analysis refers to.
///
/// `condition_met` is the case's stated condition for robustness (the whole
/// disjunction for 1a, `r_unchanged` for 2a, always true for 2b);
/// `robust` is the ground truth, whether M is also popular in the second
/// instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RobustCaseTag {
    pub case: PerturbationCase,
    pub f_changed: bool,
    pub r_unchanged: bool,
    /// f in the second instance equals r in the first.
    pub new_f_is_old_r: bool,
    /// f in the first instance equals r in the second.
    pub old_f_is_new_r: bool,
    /// Some other agent whose first choice is the perturbed agent's new first
    /// choice in both instances holds that job.
    pub new_f_held_by_other: bool,
    pub condition_met: bool,
    pub robust: bool,
}

pub fn classify_perturbation_case(
    first: &Instance,
    second: &Instance,
    diff: &PerturbationDiff,
    m: &Matching,
) -> Result<RobustCaseTag> {
    let fr1 = fr_structure(first)?;
    let fr2 = fr_structure(second)?;
    m.validate(first)?;
    match diff_instances(first, second)? {
        Some(d) if d == *diff => {}
        _ => {
            return Err(Error::InvalidArgument(
                "diff does not describe the instance pair".into(),
            ))
        }
    }
    if let Some(v) = violation_with(&fr1, m) {
        return Err(Error::InvalidArgument(format!(
            "matching is not popular in the first instance: {v}"
        )));
    }
    let a1 = diff.agent;
    let f_changed = fr1.f[a1] != fr2.f[a1];
    let r_unchanged = fr1.r[a1] == fr2.r[a1];
    let new_f_is_old_r = fr2.f[a1].is_some() && fr2.f[a1] == fr1.r[a1];
    let old_f_is_new_r = fr1.f[a1].is_some() && fr1.f[a1] == fr2.r[a1];
    let new_f_held_by_other = fr2.f[a1].is_some_and(|target| {
        (0..first.num_agents()).any(|a| {
            a != a1
                && fr1.f[a] == Some(target)
                && fr2.f[a] == Some(target)
                && m.job_of(a) == Some(target)
        })
    });
    let holds_f = m.job_of(a1).is_some() && m.job_of(a1) == fr1.f[a1];
    let (case, condition_met) = match (f_changed, holds_f) {
        (true, false) => (
            PerturbationCase::Case1a,
            new_f_is_old_r || (r_unchanged && new_f_held_by_other),
        ),
        (true, true) => (PerturbationCase::Case1b, old_f_is_new_r && new_f_held_by_other),
        (false, false) => (PerturbationCase::Case2a, r_unchanged),
        (false, true) => (PerturbationCase::Case2b, true),
    };
    Ok(RobustCaseTag {
        case,
        f_changed,
        r_unchanged,
        new_f_is_old_r,
        old_f_is_new_r,
        new_f_held_by_other,
        condition_met,
        robust: violation_with(&fr2, m).is_none(),
    })
}
