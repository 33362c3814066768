//! Matching primitives on bipartite graphs: maximum-cardinality matching,
//! alternating reachability, the Dulmage–Mendelsohn even/odd/unreachable
//! partition and the weighted matchings used by the popularity verifier and
//! the proposal phase of `stablek`.
//!
//! Left vertices play the role of agents and right vertices the role of jobs,
//! so results are expressed with [`Matching`] and [`VertexId`].

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::instance::{Instance, Side, VertexId};
use crate::matching::Matching;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            adj: vec![Vec::new(); left],
        }
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(left: usize, right: usize, edges: I) -> Self {
        let mut g = Self::new(left, right);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn from_instance(instance: &Instance) -> Self {
        Self::from_edges(instance.num_agents(), instance.num_jobs(), instance.edges())
    }

    /// Adds `u`–`v`; neighbour lists stay sorted and duplicate-free.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.left && v < self.right, "edge out of range");
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if let Ok(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].remove(pos);
        }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Neighbour lists of right vertices.
    pub fn right_adjacency(&self) -> Vec<Vec<usize>> {
        let mut radj = vec![Vec::new(); self.right];
        for (u, v) in self.edges() {
            radj[v].push(u);
        }
        radj
    }

    fn check_matching(&self, m: &Matching) -> Result<()> {
        if m.num_agents() != self.left || m.num_jobs() != self.right {
            return Err(Error::InvalidArgument("matching dimensions differ from graph".into()));
        }
        match m.pairs().find(|&(u, v)| !self.has_edge(u, v)) {
            Some((u, v)) => Err(Error::InvalidArgument(format!("({u}, {v}) is not an edge"))),
            None => Ok(()),
        }
    }
}

const UNSEEN: usize = usize::MAX;

/// Maximum-cardinality matching by phased shortest augmenting paths
/// (Hopcroft–Karp). Deterministic for a given edge order.
pub fn maximum_matching(graph: &BipartiteGraph) -> Matching {
    let mut m = Matching::new(graph.left, graph.right);
    let mut dist = vec![UNSEEN; graph.left];
    while hk_layers(graph, &m, &mut dist) {
        let mut next = vec![0usize; graph.left];
        for u in 0..graph.left {
            if m.job_of(u).is_none() {
                hk_augment(graph, &mut m, &mut dist, &mut next, u);
            }
        }
    }
    m
}

fn hk_layers(graph: &BipartiteGraph, m: &Matching, dist: &mut [usize]) -> bool {
    let mut queue = VecDeque::new();
    for u in 0..graph.left {
        if m.job_of(u).is_none() {
            dist[u] = 0;
            queue.push_back(u);
        } else {
            dist[u] = UNSEEN;
        }
    }
    let mut found = false;
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            match m.agent_of(v) {
                None => found = true,
                Some(w) if dist[w] == UNSEEN => {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
                Some(_) => {}
            }
        }
    }
    found
}

fn hk_augment(
    graph: &BipartiteGraph,
    m: &mut Matching,
    dist: &mut [usize],
    next: &mut [usize],
    u: usize,
) -> bool {
    while next[u] < graph.degree(u) {
        let v = graph.neighbors(u)[next[u]];
        next[u] += 1;
        let ok = match m.agent_of(v) {
            None => true,
            Some(w) => dist[w] == dist[u] + 1 && hk_augment(graph, m, dist, next, w),
        };
        if ok {
            m.link(u, v);
            return true;
        }
    }
    dist[u] = UNSEEN;
    false
}

/// One breadth-first search for an augmenting path from any free left vertex;
/// flips it and returns `true` if one exists. `m` need not be maximum.
pub fn augment_once(graph: &BipartiteGraph, m: &mut Matching) -> bool {
    let mut parent = vec![UNSEEN; graph.right];
    let mut seen_left = vec![false; graph.left];
    let mut queue = VecDeque::new();
    for u in 0..graph.left {
        if m.job_of(u).is_none() {
            seen_left[u] = true;
            queue.push_back(u);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if parent[v] != UNSEEN {
                continue;
            }
            parent[v] = u;
            match m.agent_of(v) {
                Some(w) => {
                    if !seen_left[w] {
                        seen_left[w] = true;
                        queue.push_back(w);
                    }
                }
                None => {
                    let mut v = v;
                    loop {
                        let u = parent[v];
                        let prev = m.job_of(u);
                        m.link(u, v);
                        match prev {
                            Some(pv) => v = pv,
                            None => return true,
                        }
                    }
                }
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DmLabel {
    Even,
    Odd,
    Unreachable,
}

/// Even/odd/unreachable classification of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmLabels {
    pub agents: Vec<DmLabel>,
    pub jobs: Vec<DmLabel>,
}

impl DmLabels {
    pub fn label(&self, v: VertexId) -> DmLabel {
        match v.side {
            Side::Agent => self.agents[v.index],
            Side::Job => self.jobs[v.index],
        }
    }

    pub fn count(&self, label: DmLabel) -> usize {
        self.agents.iter().chain(&self.jobs).filter(|&&l| l == label).count()
    }
}

/// Parities of alternating paths that reach a vertex from a source set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Parity {
    pub even: bool,
    pub odd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reachability {
    pub agents: Vec<Parity>,
    pub jobs: Vec<Parity>,
}

impl Reachability {
    pub fn get(&self, v: VertexId) -> Parity {
        match v.side {
            Side::Agent => self.agents[v.index],
            Side::Job => self.jobs[v.index],
        }
    }
}

/// For every vertex, the parities of `m`-alternating paths starting at one of
/// `sources` (which must be unmatched) that end at it.
pub fn alternating_reachable(
    graph: &BipartiteGraph,
    m: &Matching,
    sources: &[VertexId],
) -> Result<Reachability> {
    graph.check_matching(m)?;
    if let Some(s) = sources.iter().find(|&&s| m.partner(s).is_some()) {
        return Err(Error::InvalidArgument(format!("source {s:?} is matched")));
    }
    Ok(reachability(graph, &graph.right_adjacency(), m, sources))
}

fn reachability(
    graph: &BipartiteGraph,
    radj: &[Vec<usize>],
    m: &Matching,
    sources: &[VertexId],
) -> Reachability {
    let mut r = Reachability {
        agents: vec![Parity::default(); graph.left],
        jobs: vec![Parity::default(); graph.right],
    };
    let mut queue = VecDeque::new();
    let mark = |r: &mut Reachability, v: VertexId, even: bool, q: &mut VecDeque<(VertexId, bool)>| {
        let p = match v.side {
            Side::Agent => &mut r.agents[v.index],
            Side::Job => &mut r.jobs[v.index],
        };
        let slot = if even { &mut p.even } else { &mut p.odd };
        if !*slot {
            *slot = true;
            q.push_back((v, even));
        }
    };
    for &s in sources {
        mark(&mut r, s, true, &mut queue);
    }
    while let Some((v, even)) = queue.pop_front() {
        let partner = m.partner(v);
        if even {
            // leave along non-matching edges
            let nbrs: &[usize] = match v.side {
                Side::Agent => graph.neighbors(v.index),
                Side::Job => &radj[v.index],
            };
            for &w in nbrs {
                if Some(w) != partner {
                    let w = VertexId {
                        side: v.side.opposite(),
                        index: w,
                    };
                    mark(&mut r, w, false, &mut queue);
                }
            }
        } else if let Some(p) = partner {
            let w = VertexId {
                side: v.side.opposite(),
                index: p,
            };
            mark(&mut r, w, true, &mut queue);
        }
    }
    r
}

fn free_vertices(m: &Matching) -> Vec<VertexId> {
    (0..m.num_agents())
        .filter(|&a| m.job_of(a).is_none())
        .map(VertexId::agent)
        .chain(
            (0..m.num_jobs())
                .filter(|&b| m.agent_of(b).is_none())
                .map(VertexId::job),
        )
        .collect()
}

pub(crate) fn dm_labels_with(graph: &BipartiteGraph, radj: &[Vec<usize>], m: &Matching) -> DmLabels {
    let r = reachability(graph, radj, m, &free_vertices(m));
    let label = |p: &Parity| match (p.even, p.odd) {
        (true, _) => DmLabel::Even,
        (false, true) => DmLabel::Odd,
        (false, false) => DmLabel::Unreachable,
    };
    DmLabels {
        agents: r.agents.iter().map(label).collect(),
        jobs: r.jobs.iter().map(label).collect(),
    }
}

/// Dulmage–Mendelsohn labels with respect to a maximum matching `m`.
pub fn dm_decomposition(graph: &BipartiteGraph, m: &Matching) -> Result<DmLabels> {
    graph.check_matching(m)?;
    if m.len() != maximum_matching(graph).len() {
        return Err(Error::InvalidArgument("matching is not maximum".into()));
    }
    Ok(dm_labels_with(graph, &graph.right_adjacency(), m))
}

/// The verifier's augmented graph: real vertices, each with a private dummy
/// partner, and integer weights on real edges and on (vertex, dummy) edges.
///
/// The assignment formulation also joins every agent dummy to every job dummy
/// with weight 0, so a perfect matching always exists and unused dummies pair
/// among themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAugmentedGraph {
    pub num_agents: usize,
    pub num_jobs: usize,
    pub edges: Vec<(usize, usize, i64)>,
    pub agent_dummy_weight: Vec<i64>,
    pub job_dummy_weight: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedSolution {
    /// Real edges of the optimum; real vertices not covered here sit with
    /// their dummies.
    pub matching: Matching,
    pub weight: i64,
}

/// Maximum-weight perfect matching of the augmented graph.
pub fn max_weight_perfect_matching(g: &WeightedAugmentedGraph) -> AugmentedSolution {
    let (na, nb) = (g.num_agents, g.num_jobs);
    let n = na + nb;
    // rows: agents, then job dummies; columns: jobs, then agent dummies
    let mut w: Vec<Vec<Option<i64>>> = vec![vec![None; n]; n];
    for &(a, b, wt) in &g.edges {
        w[a][b] = Some(wt);
    }
    for a in 0..na {
        w[a][nb + a] = Some(g.agent_dummy_weight[a]);
    }
    for b in 0..nb {
        w[na + b][b] = Some(g.job_dummy_weight[b]);
        for a in 0..na {
            w[na + b][nb + a] = Some(0);
        }
    }
    let (assignment, weight) = max_weight_assignment(&w);
    let mut matching = Matching::new(na, nb);
    for (a, &col) in assignment.iter().enumerate().take(na) {
        if col < nb {
            matching.link(a, col);
        }
    }
    AugmentedSolution { matching, weight }
}

/// Dense maximum-weight assignment over a square matrix; `None` entries are
/// forbidden. At least one perfect assignment over allowed entries must exist.
/// Returns the column of every row and the total weight.
pub fn max_weight_assignment(weights: &[Vec<Option<i64>>]) -> (Vec<usize>, i64) {
    let n = weights.len();
    if n == 0 {
        return (Vec::new(), 0);
    }
    let max_abs = weights
        .iter()
        .flatten()
        .flatten()
        .map(|w| w.abs())
        .max()
        .unwrap_or(0);
    let forbidden = 2 * (n as i64) * (max_abs + 1) + 1;
    let cost = |i: usize, j: usize| weights[i][j].map_or(forbidden, |w| -w);

    // Shortest augmenting path Hungarian method with row/column potentials
    // (1-based, column 0 is the virtual start).
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| weights[i][j].expect("no perfect assignment over allowed entries"))
        .sum();
    (assignment, total)
}

/// Among maximum-cardinality matchings, one of minimum total cost
/// (successive shortest augmenting paths with Dijkstra and vertex potentials).
/// `cost(u, v)` must be non-negative for every edge.
pub fn min_cost_maximum_matching<F>(graph: &BipartiteGraph, cost: F) -> Matching
where
    F: Fn(usize, usize) -> i64,
{
    let (nl, nr) = (graph.left, graph.right);
    let mut m = Matching::new(nl, nr);
    // potentials: left 0..nl, right nl..nl+nr
    let mut pot = vec![0i64; nl + nr];
    let inf = i64::MAX / 4;
    loop {
        let mut dist = vec![inf; nl + nr];
        let mut parent = vec![UNSEEN; nr];
        let mut heap = BinaryHeap::new();
        for u in 0..nl {
            if m.job_of(u).is_none() {
                dist[u] = 0;
                heap.push(Reverse((0i64, u)));
            }
        }
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            if x < nl {
                for &v in graph.neighbors(x) {
                    if m.job_of(x) == Some(v) {
                        continue;
                    }
                    let nd = d + cost(x, v) + pot[x] - pot[nl + v];
                    if nd < dist[nl + v] {
                        dist[nl + v] = nd;
                        parent[v] = x;
                        heap.push(Reverse((nd, nl + v)));
                    }
                }
            } else if let Some(u) = m.agent_of(x - nl) {
                let nd = d - cost(u, x - nl) + pot[x] - pot[u];
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        // real path length to a free right vertex is dist + its potential
        let target = (0..nr)
            .filter(|&v| m.agent_of(v).is_none() && dist[nl + v] < inf)
            .min_by_key(|&v| (dist[nl + v] + pot[nl + v], v));
        let Some(target) = target else {
            break;
        };
        let reach = dist.iter().copied().filter(|&d| d < inf).max().unwrap_or(0);
        for (p, d) in pot.iter_mut().zip(&dist) {
            *p += if *d < inf { *d } else { reach };
        }
        let mut v = target;
        loop {
            let u = parent[v];
            let prev = m.job_of(u);
            m.link(u, v);
            match prev {
                Some(pv) => v = pv,
                None => break,
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(g: &BipartiteGraph) -> DmLabels {
        dm_decomposition(g, &maximum_matching(g)).unwrap()
    }

    #[test]
    fn maximum_matching_small_cases() {
        assert!(maximum_matching(&BipartiteGraph::new(0, 0)).is_empty());
        assert_eq!(maximum_matching(&BipartiteGraph::from_edges(1, 1, [(0, 0)])).len(), 1);
        assert_eq!(
            maximum_matching(&BipartiteGraph::from_edges(2, 1, [(0, 0), (1, 0)])).len(),
            1
        );
        // needs an augmenting path through a matched vertex
        let g = BipartiteGraph::from_edges(3, 3, [(0, 0), (0, 1), (1, 0), (2, 1), (2, 2)]);
        assert_eq!(maximum_matching(&g).len(), 3);
    }

    #[test]
    fn star_labels() {
        let g = BipartiteGraph::from_edges(2, 1, [(0, 0), (1, 0)]);
        let m = {
            let mut m = Matching::new(2, 1);
            m.link(0, 0);
            m
        };
        let l = dm_decomposition(&g, &m).unwrap();
        assert_eq!(l.agents, vec![DmLabel::Even, DmLabel::Even]);
        assert_eq!(l.jobs, vec![DmLabel::Odd]);
    }

    #[test]
    fn perfect_edge_is_unreachable_and_isolated_is_even() {
        let l = labels(&BipartiteGraph::from_edges(1, 1, [(0, 0)]));
        assert_eq!(l.agents, vec![DmLabel::Unreachable]);
        assert_eq!(l.jobs, vec![DmLabel::Unreachable]);
        let l = labels(&BipartiteGraph::new(1, 0));
        assert_eq!(l.agents, vec![DmLabel::Even]);
    }

    #[test]
    fn non_maximum_matching_rejected() {
        let g = BipartiteGraph::from_edges(1, 1, [(0, 0)]);
        assert!(dm_decomposition(&g, &Matching::new(1, 1)).is_err());
    }

    #[test]
    fn reachability_parities() {
        // path a0 - b0 = a1 - b1 with (a1, b0) matched
        let g = BipartiteGraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1)]);
        let mut m = Matching::new(2, 2);
        m.link(1, 0);
        let r = alternating_reachable(&g, &m, &[VertexId::agent(0)]).unwrap();
        assert_eq!(r.agents[0], Parity { even: true, odd: false });
        assert_eq!(r.jobs[0], Parity { even: false, odd: true });
        assert_eq!(r.agents[1], Parity { even: true, odd: false });
        assert_eq!(r.jobs[1], Parity { even: false, odd: true });
        assert!(alternating_reachable(&g, &m, &[VertexId::agent(1)]).is_err());
    }

    #[test]
    fn assignment_weights() {
        let g = WeightedAugmentedGraph {
            num_agents: 1,
            num_jobs: 1,
            edges: vec![(0, 0, 0)],
            agent_dummy_weight: vec![0],
            job_dummy_weight: vec![0],
        };
        assert_eq!(max_weight_perfect_matching(&g).weight, 0);
        let g = WeightedAugmentedGraph {
            edges: vec![(0, 0, 1)],
            ..g
        };
        let s = max_weight_perfect_matching(&g);
        assert_eq!(s.weight, 1);
        assert!(s.matching.contains(0, 0));
    }

    #[test]
    fn min_cost_prefers_cheap_edges_at_full_cardinality() {
        let g = BipartiteGraph::from_edges(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]);
        let cost = |u: usize, v: usize| if u == v { 5 } else { 1 };
        let m = min_cost_maximum_matching(&g, cost);
        assert!(m.contains(0, 1) && m.contains(1, 0));
        // cardinality beats cost
        let g = BipartiteGraph::from_edges(2, 2, [(0, 0), (0, 1), (1, 0)]);
        let m = min_cost_maximum_matching(&g, |u, v| if (u, v) == (0, 0) { 0 } else { 9 });
        assert_eq!(m.len(), 2);
    }
}
