//! Popularity: an exhaustive oracle, a polynomial verifier based on a
//! maximum-weight perfect matching, an independent structural checker over
//! alternating paths and cycles, and the unpopularity factor.

use std::cmp::Ordering;
use std::fmt;
use std::ops::ControlFlow;

use crate::enumerate::for_each_matching;
use crate::error::Result;
use crate::graph::{max_weight_perfect_matching, WeightedAugmentedGraph};
use crate::instance::{Instance, Model, Side, VertexId};
use crate::matching::{margin_unchecked, preference_count, Matching};

/// Default limit on `|A| + |B|` for exhaustive routines.
pub const DEFAULT_CAP: usize = 16;

/// Votes of the endpoints of a non-matching edge `(a, b)` for the edge over
/// their partners in the fixed matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeLabel {
    pub alpha: i8,
    pub beta: i8,
}

impl EdgeLabel {
    pub fn gain(self) -> i64 {
        (self.alpha + self.beta) as i64
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}, {:+})", self.alpha, self.beta)
    }
}

/// Label of edge `(a, b)` with respect to `m`: `alpha` is the agent's vote
/// between `b` and `M(a)`, `beta` the job's vote between `a` and `M(b)`.
pub fn edge_label(instance: &Instance, m: &Matching, a: usize, b: usize) -> EdgeLabel {
    EdgeLabel {
        alpha: instance.agent_vote(a, Some(b), m.job_of(a)),
        beta: instance.job_vote(b, Some(a), m.agent_of(b)),
    }
}

/// Shape of an alternating structure along which switching gains votes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolatedCondition {
    /// An alternating cycle.
    AlternatingCycle,
    /// An alternating path with at least one endpoint unmatched in M.
    PathFromUnmatched,
    /// An alternating path whose two terminal edges both belong to M.
    PathBetweenMatched,
    /// Classification is only given for the two-sided model with one-sided ties.
    NotApplicable,
}

impl fmt::Display for ViolatedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolatedCondition::AlternatingCycle => "alternating-cycle",
            ViolatedCondition::PathFromUnmatched => "path-from-unmatched",
            ViolatedCondition::PathBetweenMatched => "path-between-matched",
            ViolatedCondition::NotApplicable => "not-applicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopularityWitness {
    /// A matching that wins the vote against M.
    pub better: Matching,
    /// Δ(better, M), always positive.
    pub margin: i64,
    pub violated_condition: ViolatedCondition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Popular,
    NotPopular(PopularityWitness),
}

impl Verdict {
    pub fn is_popular(&self) -> bool {
        matches!(self, Verdict::Popular)
    }

    pub fn witness(&self) -> Option<&PopularityWitness> {
        match self {
            Verdict::Popular => None,
            Verdict::NotPopular(w) => Some(w),
        }
    }
}

/// A connected component of M ⊕ N, listed as a walk. Consecutive vertices are
/// joined alternately by M- and N-edges; for a cycle the last vertex is
/// adjacent to the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingComponent {
    pub vertices: Vec<VertexId>,
    pub is_cycle: bool,
}

fn vertex(side: Side, index: usize) -> VertexId {
    VertexId { side, index }
}

fn in_difference(m: &Matching, n: &Matching, v: VertexId) -> bool {
    m.partner(v) != n.partner(v)
}

/// Components of M ⊕ N. Paths start at their smallest endpoint, cycles at
/// their smallest vertex and leave it along its M-edge.
pub fn alternating_components(m: &Matching, n: &Matching) -> Vec<AlternatingComponent> {
    let all: Vec<VertexId> = (0..m.num_agents())
        .map(VertexId::agent)
        .chain((0..m.num_jobs()).map(VertexId::job))
        .collect();
    let mut seen_a = vec![false; m.num_agents()];
    let mut seen_b = vec![false; m.num_jobs()];
    let mut out = Vec::new();
    let degree = |v: VertexId| {
        if !in_difference(m, n, v) {
            0
        } else {
            m.partner(v).is_some() as usize + n.partner(v).is_some() as usize
        }
    };
    let seen = |sa: &[bool], sb: &[bool], v: VertexId| match v.side {
        Side::Agent => sa[v.index],
        Side::Job => sb[v.index],
    };
    // paths first from their endpoints, then the remaining cycles
    for pass_cycles in [false, true] {
        for &s in &all {
            let d = degree(s);
            if d == 0 || seen(&seen_a, &seen_b, s) || (d == 1) == pass_cycles {
                continue;
            }
            let mut use_m = m.partner(s).is_some();
            let mut walk = vec![s];
            let mut cur = s;
            let mut is_cycle = false;
            loop {
                let next = if use_m { m.partner(cur) } else { n.partner(cur) };
                let Some(next) = next else { break };
                let nv = vertex(cur.side.opposite(), next);
                if nv == s {
                    is_cycle = true;
                    break;
                }
                walk.push(nv);
                cur = nv;
                use_m = !use_m;
                if !in_difference(m, n, cur) {
                    break;
                }
            }
            for v in &walk {
                match v.side {
                    Side::Agent => seen_a[v.index] = true,
                    Side::Job => seen_b[v.index] = true,
                }
            }
            if !is_cycle {
                let (first, last) = (walk[0], *walk.last().unwrap());
                if last < first {
                    walk.reverse();
                }
            }
            out.push(AlternatingComponent {
                vertices: walk,
                is_cycle,
            });
        }
    }
    out
}

/// Sum of the votes of the component's vertices for N over M.
pub fn component_margin(instance: &Instance, m: &Matching, n: &Matching, c: &AlternatingComponent) -> i64 {
    c.vertices
        .iter()
        .map(|&v| instance.vote_unchecked(v, n.partner(v), m.partner(v)) as i64)
        .sum()
}

fn component_condition(m: &Matching, n: &Matching, c: &AlternatingComponent) -> ViolatedCondition {
    if c.is_cycle {
        return ViolatedCondition::AlternatingCycle;
    }
    let ends = [c.vertices[0], *c.vertices.last().unwrap()];
    // an endpoint whose component edge comes from N is unmatched in M
    if ends.iter().any(|&v| m.partner(v).is_none() && n.partner(v).is_some()) {
        ViolatedCondition::PathFromUnmatched
    } else {
        ViolatedCondition::PathBetweenMatched
    }
}

fn condition_priority(c: ViolatedCondition) -> u8 {
    match c {
        ViolatedCondition::PathFromUnmatched => 0,
        ViolatedCondition::AlternatingCycle => 1,
        ViolatedCondition::PathBetweenMatched => 2,
        ViolatedCondition::NotApplicable => 3,
    }
}

/// The condition exhibited by `better`: among the components of M ⊕ better
/// with a positive margin, the first in the order path-from-unmatched, cycle,
/// path-between-matched. Only defined for the two-sided one-tie model.
pub fn classify_witness(instance: &Instance, m: &Matching, better: &Matching) -> ViolatedCondition {
    if instance.model() != Model::TwoSidedOneTie {
        return ViolatedCondition::NotApplicable;
    }
    alternating_components(m, better)
        .iter()
        .filter(|c| component_margin(instance, m, better, c) > 0)
        .map(|c| component_condition(m, better, c))
        .min_by_key(|&c| condition_priority(c))
        .unwrap_or(ViolatedCondition::NotApplicable)
}

fn witness(instance: &Instance, m: &Matching, better: Matching, margin: i64) -> PopularityWitness {
    let violated_condition = classify_witness(instance, m, &better);
    PopularityWitness {
        better,
        margin,
        violated_condition,
    }
}

/// Brute force over every matching. The witness maximizes Δ(N, M); among
/// maximizers the first in enumeration order is returned.
pub fn is_popular_oracle(instance: &Instance, m: &Matching, cap: usize) -> Result<Verdict> {
    instance.check_cap(cap)?;
    m.validate(instance)?;
    let mut best: Option<(i64, Matching)> = None;
    let pins = vec![None; instance.num_agents()];
    for_each_matching::<(), _>(instance, &pins, |n| {
        let d = margin_unchecked(instance, n, m);
        if d > 0 && best.as_ref().is_none_or(|(bd, _)| d > *bd) {
            best = Some((d, n.clone()));
        }
        ControlFlow::Continue(())
    })?;
    Ok(match best {
        None => Verdict::Popular,
        Some((d, n)) => Verdict::NotPopular(witness(instance, m, n, d)),
    })
}

/// The augmented graph whose maximum perfect-matching weight is
/// max over N of Δ(N, M).
pub fn verifier_graph(instance: &Instance, m: &Matching) -> WeightedAugmentedGraph {
    let edges = instance
        .edges()
        .into_iter()
        .map(|(a, b)| {
            let w = if m.contains(a, b) {
                0
            } else {
                edge_label(instance, m, a, b).gain()
            };
            (a, b, w)
        })
        .collect();
    WeightedAugmentedGraph {
        num_agents: instance.num_agents(),
        num_jobs: instance.num_jobs(),
        edges,
        agent_dummy_weight: (0..instance.num_agents())
            .map(|a| instance.agent_vote(a, None, m.job_of(a)) as i64)
            .collect(),
        job_dummy_weight: (0..instance.num_jobs())
            .map(|b| instance.job_vote(b, None, m.agent_of(b)) as i64)
            .collect(),
    }
}

/// Polynomial popularity test: M is popular iff no matching gains a positive
/// margin over it, decided by one maximum-weight perfect matching.
pub fn is_popular(instance: &Instance, m: &Matching) -> Result<Verdict> {
    m.validate(instance)?;
    let sol = max_weight_perfect_matching(&verifier_graph(instance, m));
    if sol.weight <= 0 {
        return Ok(Verdict::Popular);
    }
    debug_assert_eq!(margin_unchecked(instance, &sol.matching, m), sol.weight);
    Ok(Verdict::NotPopular(witness(instance, m, sol.matching, sol.weight)))
}

/// Outcome of the structural search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuralCheck {
    Holds,
    Violated(StructuralViolation),
}

impl StructuralCheck {
    pub fn holds(&self) -> bool {
        matches!(self, StructuralCheck::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralViolation {
    pub condition: ViolatedCondition,
    /// Vertices along the path or cycle; consecutive vertices alternate
    /// between non-matching and matching edges.
    pub walk: Vec<VertexId>,
    /// Margin gained by switching M along the walk.
    pub gain: i64,
}

/// Searches simple M-alternating paths and cycles for one along which
/// switching gains a positive margin:
///
/// * a path with an endpoint unmatched in M,
/// * a cycle whose (+1, 0) edges outnumber its (−1, 0) edges,
/// * a path whose terminal edges are both in M and whose non-matching edges
///   gain more than the two votes lost at its endpoints.
///
/// The gain of a walk sums the labels of its non-matching edges and charges
/// each endpoint left unmatched by the switch its vote for being unmatched.
/// Reports the first violation in the order path-from-unmatched, cycle,
/// path-between-matched. The search is exponential and guarded by `cap`.
pub fn check_structural_conditions(instance: &Instance, m: &Matching, cap: usize) -> Result<StructuralCheck> {
    instance.check_cap(cap)?;
    m.validate(instance)?;
    let mut s = Search {
        instance,
        m,
        visited_a: vec![false; instance.num_agents()],
        visited_b: vec![false; instance.num_jobs()],
        path: Vec::new(),
        found: [None, None, None],
    };
    let starts = (0..instance.num_agents())
        .map(VertexId::agent)
        .chain((0..instance.num_jobs()).map(VertexId::job));
    for v in starts {
        s.start(v);
        if s.found[0].is_some() {
            break;
        }
    }
    Ok(match s.found.into_iter().flatten().next() {
        Some(v) => StructuralCheck::Violated(v),
        None => StructuralCheck::Holds,
    })
}

struct Search<'a> {
    instance: &'a Instance,
    m: &'a Matching,
    visited_a: Vec<bool>,
    visited_b: Vec<bool>,
    path: Vec<VertexId>,
    // indexed by report priority
    found: [Option<StructuralViolation>; 3],
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.found[0].is_some()
    }

    fn set_visited(&mut self, v: VertexId, val: bool) {
        match v.side {
            Side::Agent => self.visited_a[v.index] = val,
            Side::Job => self.visited_b[v.index] = val,
        }
    }

    fn visited(&self, v: VertexId) -> bool {
        match v.side {
            Side::Agent => self.visited_a[v.index],
            Side::Job => self.visited_b[v.index],
        }
    }

    fn push(&mut self, v: VertexId) {
        self.path.push(v);
        self.set_visited(v, true);
    }

    fn pop(&mut self) {
        let v = self.path.pop().expect("non-empty path");
        self.set_visited(v, false);
    }

    /// Vote lost by `v` when its matching edge is removed.
    fn unmatch_cost(&self, v: VertexId) -> i64 {
        self.instance.vote_unchecked(v, None, self.m.partner(v)) as i64
    }

    fn gain(&self, u: VertexId, w: VertexId) -> i64 {
        let (a, b) = if u.side == Side::Agent {
            (u.index, w.index)
        } else {
            (w.index, u.index)
        };
        edge_label(self.instance, self.m, a, b).gain()
    }

    fn record(&mut self, condition: ViolatedCondition, gain: i64, closing: Option<VertexId>) {
        if gain <= 0 {
            return;
        }
        let slot = condition_priority(condition) as usize;
        if self.found[slot].is_none() {
            let mut walk = self.path.clone();
            walk.extend(closing);
            self.found[slot] = Some(StructuralViolation {
                condition,
                walk,
                gain,
            });
        }
    }

    fn neighbors(&self, v: VertexId) -> Vec<usize> {
        self.instance.prefs(v).item_set().collect()
    }

    fn start(&mut self, s: VertexId) {
        self.push(s);
        match self.m.partner(s) {
            None => {
                for w in self.neighbors(s) {
                    let w = vertex(s.side.opposite(), w);
                    let g = self.gain(s, w);
                    self.push(w);
                    self.after_non_matching(w, g, None);
                    self.pop();
                    if self.done() {
                        break;
                    }
                }
            }
            Some(p) => {
                let p = vertex(s.side.opposite(), p);
                self.push(p);
                self.after_matching(p, 0, Some(s));
                self.pop();
            }
        }
        self.pop();
    }

    /// `v` was reached along a matching edge; `matched_start` is the first
    /// vertex when the walk began with a matching edge.
    fn after_matching(&mut self, v: VertexId, sum: i64, matched_start: Option<VertexId>) {
        let end_cost = self.unmatch_cost(v);
        match matched_start {
            None => self.record(ViolatedCondition::PathFromUnmatched, sum + end_cost, None),
            Some(s) => {
                let start_cost = self.unmatch_cost(s);
                self.record(ViolatedCondition::PathBetweenMatched, sum + end_cost + start_cost, None);
                if self.path.len() >= 4 && self.instance.prefs(v).contains(s.index) {
                    let g = sum + self.gain(v, s);
                    self.record(ViolatedCondition::AlternatingCycle, g, None);
                }
            }
        }
        let partner = self.m.partner(v);
        for w in self.neighbors(v) {
            if self.done() {
                return;
            }
            let wv = vertex(v.side.opposite(), w);
            if Some(w) == partner || self.visited(wv) {
                continue;
            }
            let g = self.gain(v, wv);
            self.push(wv);
            self.after_non_matching(wv, sum + g, matched_start);
            self.pop();
        }
    }

    fn after_non_matching(&mut self, w: VertexId, sum: i64, matched_start: Option<VertexId>) {
        match self.m.partner(w) {
            None => {
                let start_cost = matched_start.map_or(0, |s| self.unmatch_cost(s));
                self.record(ViolatedCondition::PathFromUnmatched, sum + start_cost, None);
            }
            Some(p) => {
                let p = vertex(w.side.opposite(), p);
                if self.visited(p) {
                    return;
                }
                self.push(p);
                self.after_matching(p, sum, matched_start);
                self.pop();
            }
        }
    }
}

/// An unpopularity factor: a non-negative rational or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    Finite { num: u64, den: u64 },
    Infinite,
}

impl Factor {
    pub fn ratio(num: u64, den: u64) -> Factor {
        if den == 0 {
            return Factor::Infinite;
        }
        let g = gcd(num, den);
        Factor::Finite {
            num: num / g,
            den: den / g,
        }
    }

    pub fn one() -> Factor {
        Factor::Finite { num: 1, den: 1 }
    }

    /// Whether the factor is at most the integer `k`.
    pub fn at_most(self, k: u64) -> bool {
        self <= Factor::ratio(k, 1)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Factor::Infinite, Factor::Infinite) => Ordering::Equal,
            (Factor::Infinite, _) => Ordering::Greater,
            (_, Factor::Infinite) => Ordering::Less,
            (Factor::Finite { num: a, den: b }, Factor::Finite { num: c, den: d }) => {
                (*a as u128 * *d as u128).cmp(&(*c as u128 * *b as u128))
            }
        }
    }
}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Infinite => f.write_str("inf"),
            Factor::Finite { num, den: 1 } => write!(f, "{num}"),
            Factor::Finite { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

/// λ(M, N): votes for N over votes for M, 1 when nobody prefers either,
/// infinite when only N gets votes.
pub fn lambda(instance: &Instance, m: &Matching, n: &Matching) -> Factor {
    let for_m = preference_count(instance, m, n);
    let for_n = preference_count(instance, n, m);
    match (for_n, for_m) {
        (0, 0) => Factor::one(),
        (_, 0) => Factor::Infinite,
        (x, y) => Factor::ratio(x, y),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnpopularityReport {
    pub factor: Factor,
    /// A matching attaining the factor when it exceeds 1.
    pub argmax: Option<Matching>,
}

/// u(M) = max over N of λ(M, N), by brute force.
pub fn unpopularity_factor(instance: &Instance, m: &Matching, cap: usize) -> Result<UnpopularityReport> {
    instance.check_cap(cap)?;
    m.validate(instance)?;
    let mut best = (Factor::one(), None::<Matching>);
    let pins = vec![None; instance.num_agents()];
    for_each_matching(instance, &pins, |n| {
        let l = lambda(instance, m, n);
        if l > best.0 {
            best = (l, Some(n.clone()));
            if l == Factor::Infinite {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(UnpopularityReport {
        factor: best.0,
        argmax: best.1,
    })
}
