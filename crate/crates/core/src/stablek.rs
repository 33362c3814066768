//! Stable matchings under two-sided ties of length at most `k` whose
//! unpopularity factor is bounded by `k`.
//!
//! Every real agent `a` gets a private dummy job `d(a)` it ranks last and
//! every real job `b` a private dummy agent `d'(b)` it ranks last. Agent ties
//! are broken by index. In the proposal phase an even agent of the proposal
//! graph G' with fewer than `k` edges proposes to its next neighbour. A job
//! keeps only its best proposers, comparing first by its own preference level
//! and then by `rank_{G'}`, the position of the job among the proposer's
//! current G' neighbours. When no even agent can propose, a maximum matching
//! of G' of minimum total rank is taken and its dummy edges dropped.
//!
//! The bound `u(M) <= k` holds when agents rank strictly; agent-side ties can
//! exceed it because the tie-breaking hides votes that `M` would receive.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{augment_once, dm_labels_with, min_cost_maximum_matching, BipartiteGraph, DmLabel, DmLabels};
use crate::instance::{Instance, Model};
use crate::matching::Matching;
use crate::popularity::alternating_components;
use crate::instance::{Side, VertexId};

/// The instance with dummies and strict agent lists.
///
/// Extended agents are the real agents `0..num_agents` followed by `d'(b)` at
/// `num_agents + b`; extended jobs are the real jobs followed by `d(a)` at
/// `num_jobs + a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedInstance {
    pub num_agents: usize,
    pub num_jobs: usize,
    pub k: usize,
    /// Strict list of every extended agent, in extended job ids.
    pub agent_lists: Vec<Vec<usize>>,
    // (job, position in the agent's list), sorted by job
    positions: Vec<Vec<(usize, usize)>>,
    /// Preference level of each neighbour of every extended job (0 = best).
    job_levels: Vec<Vec<(usize, usize)>>,
}

impl ExtendedInstance {
    pub fn total_agents(&self) -> usize {
        self.agent_lists.len()
    }

    pub fn total_jobs(&self) -> usize {
        self.job_levels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.agent_lists.iter().map(Vec::len).sum()
    }

    pub fn dummy_agent(&self, job: usize) -> usize {
        self.num_agents + job
    }

    pub fn dummy_job(&self, agent: usize) -> usize {
        self.num_jobs + agent
    }

    pub fn is_dummy_agent(&self, a: usize) -> bool {
        a >= self.num_agents
    }

    pub fn is_dummy_job(&self, b: usize) -> bool {
        b >= self.num_jobs
    }

    /// `job`'s preference level of `agent`; lower is better.
    pub fn job_level(&self, job: usize, agent: usize) -> Option<usize> {
        let levels = &self.job_levels[job];
        levels
            .binary_search_by_key(&agent, |&(x, _)| x)
            .ok()
            .map(|i| levels[i].1)
    }

    /// 0-based position of `job` in `agent`'s strict list.
    pub fn position(&self, agent: usize, job: usize) -> Option<usize> {
        let pos = &self.positions[agent];
        pos.binary_search_by_key(&job, |&(b, _)| b).ok().map(|i| pos[i].1)
    }
}

fn tie_bound(instance: &Instance) -> Result<usize> {
    match instance.model() {
        Model::TwoSidedTies { k } => Ok(k),
        _ => Err(Error::InvalidModel {
            expected: "two-sided-ties".into(),
            found: instance.model().to_string(),
        }),
    }
}

pub fn build_extended(instance: &Instance) -> Result<ExtendedInstance> {
    let k = tie_bound(instance)?;
    let (na, nb) = (instance.num_agents(), instance.num_jobs());
    let mut agent_lists: Vec<Vec<usize>> = (0..na)
        .map(|a| instance.agent_prefs(a).items().chain([nb + a]).collect())
        .collect();
    agent_lists.extend((0..nb).map(|b| vec![b]));
    let positions = agent_lists
        .iter()
        .map(|list| {
            let mut pos: Vec<(usize, usize)> = list.iter().enumerate().map(|(p, &b)| (b, p)).collect();
            pos.sort_unstable();
            pos
        })
        .collect();
    let mut job_levels: Vec<Vec<(usize, usize)>> = (0..nb)
        .map(|b| {
            let prefs = instance.job_prefs(b);
            let mut levels: Vec<(usize, usize)> = prefs
                .item_set()
                .map(|a| (a, prefs.rank(a).expect("member")))
                .collect();
            levels.push((na + b, prefs.groups().len()));
            levels
        })
        .collect();
    job_levels.extend((0..na).map(|a| vec![(a, 0)]));
    Ok(ExtendedInstance {
        num_agents: na,
        num_jobs: nb,
        k,
        agent_lists,
        positions,
        job_levels,
    })
}

/// State of the proposal phase at termination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposalOutcome {
    /// The proposal graph G' over extended vertices.
    pub graph: BipartiteGraph,
    /// Number of proposals each extended agent made; it proposed to exactly
    /// the first `cursor[a]` entries of its list.
    pub cursor: Vec<usize>,
    /// Maximum matching of G' of minimum total rank.
    pub m0: Matching,
    pub labels: DmLabels,
    pub proposals: usize,
    /// Largest agent degree in G' at the end of any proposal.
    pub max_degree: usize,
}

impl ProposalOutcome {
    /// `rank_{G'}(agent, job)`: one plus the number of G' neighbours of
    /// `agent` it strictly prefers to `job`. `None` if `agent` never proposed
    /// to `job`.
    pub fn rank(&self, ext: &ExtendedInstance, agent: usize, job: usize) -> Option<usize> {
        let p = ext.position(agent, job)?;
        if p >= self.cursor[agent] {
            return None;
        }
        let better = self
            .graph
            .neighbors(agent)
            .iter()
            .filter(|&&b| ext.position(agent, b).expect("edge of G'") < p)
            .count();
        Some(better + 1)
    }
}

type Key = (usize, usize);

struct ProposalState<'a> {
    ext: &'a ExtendedInstance,
    graph: BipartiteGraph,
    // positions of each agent's G' neighbours, ascending
    held_pos: Vec<Vec<usize>>,
    // G' neighbours of each job; doubles as the right adjacency of `graph`
    held: Vec<Vec<usize>>,
    // agents that proposed to each job and are not held by it
    rejected: Vec<Vec<usize>>,
    last_key: Vec<Option<Key>>,
    m: Matching,
    cursor: Vec<usize>,
    dirty_agents: VecDeque<usize>,
    dirty_jobs: VecDeque<usize>,
    queued_agent: Vec<bool>,
    queued_job: Vec<bool>,
}

impl ProposalState<'_> {
    fn can_propose(&self, a: usize) -> bool {
        self.graph.degree(a) < self.ext.k && self.cursor[a] < self.ext.agent_lists[a].len()
    }

    fn rank_at(&self, a: usize, p: usize) -> usize {
        1 + self.held_pos[a].partition_point(|&q| q < p)
    }

    fn key(&self, b: usize, a: usize) -> Key {
        let p = self.ext.position(a, b).expect("proposal along an edge");
        (self.ext.job_level(b, a).expect("proposal along an edge"), self.rank_at(a, p))
    }

    fn job_key(&self, b: usize) -> Option<Key> {
        self.held[b].iter().map(|&x| self.key(b, x)).min()
    }

    fn mark_agent(&mut self, a: usize) {
        if !self.queued_agent[a] {
            self.queued_agent[a] = true;
            self.dirty_agents.push_back(a);
        }
    }

    fn mark_job(&mut self, b: usize) {
        if !self.queued_job[b] {
            self.queued_job[b] = true;
            self.dirty_jobs.push_back(b);
        }
    }

    fn accept(&mut self, a: usize, b: usize) {
        let p = self.ext.position(a, b).expect("proposal along an edge");
        let at = self.held_pos[a].partition_point(|&q| q < p);
        self.held_pos[a].insert(at, p);
        self.held[b].push(a);
        self.rejected[b].retain(|&x| x != a);
        self.graph.add_edge(a, b);
        self.mark_job(b);
        self.mark_agent(a);
    }

    fn drop_edge(&mut self, a: usize, b: usize) {
        let p = self.ext.position(a, b).expect("edge of G'");
        self.held_pos[a].retain(|&q| q != p);
        self.held[b].retain(|&x| x != a);
        self.rejected[b].push(a);
        self.graph.remove_edge(a, b);
        if self.m.contains(a, b) {
            self.m.remove_agent(a);
        }
        self.mark_agent(a);
    }

    // The job keeps only its proposers of least key.
    fn settle_job(&mut self, b: usize) {
        let Some(best) = self.job_key(b) else { return };
        let worse: Vec<usize> = self.held[b].iter().copied().filter(|&x| self.key(b, x) > best).collect();
        for x in worse {
            self.drop_edge(x, b);
        }
        if self.last_key[b].is_some_and(|old| best > old) {
            for x in self.rejected[b].clone() {
                self.mark_agent(x);
            }
        }
        self.last_key[b] = Some(best);
    }

    // Ranks of the agent may have changed: its held jobs re-compare it, and
    // the first job that rejected it but would now take it accepts it.
    fn settle_agent(&mut self, a: usize) {
        for &p in &self.held_pos[a].clone() {
            self.mark_job(self.ext.agent_lists[a][p]);
        }
        for p in 0..self.cursor[a] {
            let b = self.ext.agent_lists[a][p];
            if self.held_pos[a].binary_search(&p).is_ok() {
                continue;
            }
            if self.job_key(b).is_none_or(|current| self.key(b, a) <= current) {
                self.accept(a, b);
                return;
            }
        }
    }

    fn settle(&mut self) {
        loop {
            if let Some(b) = self.dirty_jobs.pop_front() {
                self.queued_job[b] = false;
                self.settle_job(b);
            } else if let Some(a) = self.dirty_agents.pop_front() {
                self.queued_agent[a] = false;
                self.settle_agent(a);
            } else {
                break;
            }
        }
    }

    fn propose(&mut self, a: usize) {
        let b = self.ext.agent_lists[a][self.cursor[a]];
        self.cursor[a] += 1;
        self.rejected[b].push(a);
        self.mark_agent(a);
        self.settle();
        while augment_once(&self.graph, &mut self.m) {}
    }
}

/// Runs the proposal phase on `ext`.
///
/// A job compares proposers by its own preference level and then by
/// `rank_{G'}`, which shifts as the proposer gains or loses edges; the phase
/// keeps every job holding exactly its least proposers, re-admitting earlier
/// proposers whose rank has improved.
pub fn propose_phase(ext: &ExtendedInstance) -> ProposalOutcome {
    let (na0, nb0) = (ext.total_agents(), ext.total_jobs());
    let mut st = ProposalState {
        ext,
        graph: BipartiteGraph::new(na0, nb0),
        held_pos: vec![Vec::new(); na0],
        held: vec![Vec::new(); nb0],
        rejected: vec![Vec::new(); nb0],
        last_key: vec![None; nb0],
        m: Matching::new(na0, nb0),
        cursor: vec![0; na0],
        dirty_agents: VecDeque::new(),
        dirty_jobs: VecDeque::new(),
        queued_agent: vec![false; na0],
        queued_job: vec![false; nb0],
    };
    let mut proposals = 0;
    let mut max_degree = 0;
    loop {
        let labels = dm_labels_with(&st.graph, &st.held, &st.m);
        let next = (0..na0).find(|&a| labels.agents[a] == DmLabel::Even && st.can_propose(a));
        let Some(a) = next else { break };
        st.propose(a);
        proposals += 1;
        max_degree = max_degree.max((0..na0).map(|x| st.graph.degree(x)).max().unwrap_or(0));
    }
    let rank_of = |a: usize, b: usize| {
        let p = ext.position(a, b).expect("edge of G'");
        st.rank_at(a, p) as i64
    };
    let m0 = min_cost_maximum_matching(&st.graph, rank_of);
    debug_assert_eq!(m0.len(), st.m.len());
    let labels = dm_labels_with(&st.graph, &st.held, &m0);
    ProposalOutcome {
        graph: st.graph,
        cursor: st.cursor,
        m0,
        labels,
        proposals,
        max_degree,
    }
}

/// The real edges of `m0`.
pub fn restrict_to_real(ext: &ExtendedInstance, m0: &Matching) -> Matching {
    let mut m = Matching::new(ext.num_agents, ext.num_jobs);
    for (a, b) in m0.pairs() {
        if !ext.is_dummy_agent(a) && !ext.is_dummy_job(b) {
            m.link(a, b);
        }
    }
    m
}

/// A stable matching with unpopularity factor at most `k`.
pub fn stable_k(instance: &Instance) -> Result<Matching> {
    Ok(stable_k_traced(instance)?.0)
}

/// [`stable_k`] together with the extended instance and the proposal phase.
pub fn stable_k_traced(instance: &Instance) -> Result<(Matching, ExtendedInstance, ProposalOutcome)> {
    let ext = build_extended(instance)?;
    let outcome = propose_phase(&ext);
    let m = restrict_to_real(&ext, &outcome.m0);
    Ok((m, ext, outcome))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockingPair {
    pub agent: usize,
    pub job: usize,
}

/// Every edge outside `m` whose endpoints both strictly prefer each other to
/// their partners in `m`.
pub fn check_stability(instance: &Instance, m: &Matching) -> Result<Vec<BlockingPair>> {
    m.validate(instance)?;
    Ok(instance
        .edges()
        .into_iter()
        .filter(|&(a, b)| {
            !m.contains(a, b)
                && instance.agent_vote(a, Some(b), m.job_of(a)) > 0
                && instance.job_vote(b, Some(a), m.agent_of(b)) > 0
        })
        .map(|(agent, job)| BlockingPair { agent, job })
        .collect())
}

/// A maximal run of consecutive N-edges labelled (+1, 0), oriented so that
/// each edge `(a_i, b_{i+1})` is followed by `a_{i+1} = M(b_{i+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRun {
    pub edges: Vec<(usize, usize)>,
    /// `M(b)` for the job of every edge.
    pub next_agents: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentReport {
    pub runs: Vec<LabelRun>,
    /// N-edges labelled (+1, +1).
    pub double_gains: Vec<(usize, usize)>,
    pub longest_run: usize,
}

impl SegmentReport {
    pub fn holds(&self, k: usize) -> bool {
        self.double_gains.is_empty() && self.longest_run < k.max(1)
    }
}

/// Labels the N-edges of M ⊕ N and collects the maximal runs of (+1, 0)
/// labels along every path and cycle.
pub fn segment_runs(instance: &Instance, m: &Matching, n: &Matching) -> Result<SegmentReport> {
    m.validate(instance)?;
    n.validate(instance)?;
    let mut runs = Vec::new();
    let mut double_gains = Vec::new();
    for c in alternating_components(m, n) {
        // orient so N-edges go from agent to job
        let mut walk = c.vertices.clone();
        let len = walk.len();
        let n_edge_forward = |w: &[VertexId], i: usize| {
            let (u, v) = (w[i], w[(i + 1) % w.len()]);
            u.side == Side::Agent && n.agent_of(v.index) == Some(u.index) && !m.contains(u.index, v.index)
        };
        let forward = (0..len.saturating_sub(if c.is_cycle { 0 } else { 1 })).any(|i| n_edge_forward(&walk, i));
        if !forward {
            walk.reverse();
        }
        let steps = if c.is_cycle { len } else { len.saturating_sub(1) };
        let n_edges: Vec<(usize, usize)> = (0..steps)
            .filter(|&i| n_edge_forward(&walk, i))
            .map(|i| (walk[i].index, walk[(i + 1) % len].index))
            .collect();
        let good: Vec<bool> = n_edges
            .iter()
            .map(|&(a, b)| {
                let alpha = instance.agent_vote(a, Some(b), m.job_of(a));
                let beta = instance.job_vote(b, Some(a), m.agent_of(b));
                if alpha > 0 && beta > 0 {
                    double_gains.push((a, b));
                }
                alpha > 0 && beta == 0
            })
            .collect();
        let t = n_edges.len();
        if t == 0 {
            continue;
        }
        let make_run = |idx: &[usize]| LabelRun {
            edges: idx.iter().map(|&i| n_edges[i]).collect(),
            next_agents: idx
                .iter()
                .map(|&i| m.agent_of(n_edges[i].1).expect("(+1, 0) job is matched"))
                .collect(),
        };
        if c.is_cycle && good.iter().all(|&g| g) {
            runs.push(make_run(&(0..t).collect::<Vec<_>>()));
            continue;
        }
        // on a cycle start right after a non-run edge so runs do not wrap
        let offset = if c.is_cycle {
            (good.iter().position(|&g| !g).expect("some edge breaks the run") + 1) % t
        } else {
            0
        };
        let mut cur = Vec::new();
        for j in 0..t {
            let i = (offset + j) % t;
            if good[i] {
                cur.push(i);
            } else if !cur.is_empty() {
                runs.push(make_run(&cur));
                cur.clear();
            }
        }
        if !cur.is_empty() {
            runs.push(make_run(&cur));
        }
    }
    let longest_run = runs.iter().map(|r| r.edges.len()).max().unwrap_or(0);
    Ok(SegmentReport {
        runs,
        double_gains,
        longest_run,
    })
}

/// Whether every maximal (+1, 0) run of N-edges against `m` is shorter than
/// `k` and no N-edge is labelled (+1, +1).
pub fn check_segment_lemma(instance: &Instance, m: &Matching, n: &Matching) -> Result<bool> {
    let k = tie_bound(instance)?;
    Ok(segment_runs(instance, m, n)?.holds(k))
}

/// Runs along which the ranks of the `m0` edges of consecutive agents fail
/// to decrease strictly. `m` must be the real part of `outcome.m0`.
pub fn rank_chain_violations(
    ext: &ExtendedInstance,
    outcome: &ProposalOutcome,
    report: &SegmentReport,
) -> Vec<LabelRun> {
    let m0_rank = |a: usize| {
        outcome
            .m0
            .job_of(a)
            .and_then(|b| outcome.rank(ext, a, b))
            .unwrap_or(usize::MAX)
    };
    report
        .runs
        .iter()
        .filter(|run| {
            run.edges
                .iter()
                .zip(&run.next_agents)
                .any(|(&(a, _), &next)| m0_rank(next) >= m0_rank(a))
        })
        .cloned()
        .collect()
}

/// Agent-proposing deferred acceptance on lists with ties broken by index.
pub fn gale_shapley_baseline(instance: &Instance) -> Result<Matching> {
    instance.require_model(instance.model().has_job_lists() || instance.model() == Model::TwoSidedOneTie, "a model with job preferences")?;
    let (na, nb) = (instance.num_agents(), instance.num_jobs());
    let lists: Vec<Vec<usize>> = (0..na).map(|a| instance.agent_prefs(a).items().collect()).collect();
    let key = |b: usize, a: usize| (instance.job_prefs(b).rank(a).expect("member"), a);
    let mut next = vec![0usize; na];
    let mut holder: Vec<Option<usize>> = vec![None; nb];
    let mut free: VecDeque<usize> = (0..na).collect();
    while let Some(a) = free.pop_front() {
        let Some(&b) = lists[a].get(next[a]) else { continue };
        next[a] += 1;
        match holder[b] {
            None => holder[b] = Some(a),
            Some(h) if key(b, a) < key(b, h) => {
                holder[b] = Some(a);
                free.push_back(h);
            }
            Some(_) => free.push_back(a),
        }
    }
    let mut m = Matching::new(na, nb);
    for (b, h) in holder.iter().enumerate() {
        if let Some(a) = *h {
            m.link(a, b);
        }
    }
    Ok(m)
}
