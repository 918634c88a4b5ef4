//! (A,B)-linkage search, partial linkages of sequence-pair families, the
//! two-phase multi-round linking schedule, and the correspondence between
//! linkages and good copies of the contracted multigraph `Q`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::{iter_bits, VertexSet};
use crate::error::{invalid, Result};
use crate::graph::SimpleGraph;
use crate::multigraph::{Label, LabeledMultigraph, PLAIN};
use crate::power::{Linkage, VertexSeq};
use crate::randgen::ExposurePlan;
use crate::seed::{derive, rng_from};

pub use crate::multigraph::build_contracted_q;

/// Why a linkage search came back empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkFailure {
    /// The node budget ran out before the search space was exhausted.
    BudgetExhausted { expanded: u64 },
    /// The whole search space was explored: no linkage exists.
    NoLinkage { expanded: u64 },
    Invalid(String),
}

impl std::fmt::Display for LinkFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinkFailure::BudgetExhausted { expanded } => write!(f, "budget exhausted after {expanded} expansions"),
            LinkFailure::NoLinkage { expanded } => write!(f, "no linkage exists ({expanded} expansions)"),
            LinkFailure::Invalid(m) => write!(f, "invalid request: {m}"),
        }
    }
}

/// Parameters of one linkage search.
#[derive(Clone, Debug)]
pub struct LinkRequest<'a> {
    pub host: &'a SimpleGraph,
    pub a: &'a [usize],
    pub b: &'a [usize],
    /// Total vertex count of the linkage, endsequences included.
    pub s: usize,
    pub budget: u64,
    /// Vertices allowed in the interior; `None` means every vertex.
    pub pool: Option<&'a VertexSet>,
    /// Optional per-position pools for interior positions `k..s−k`.
    pub positions: Option<&'a [VertexSet]>,
    pub seed: u64,
}

impl<'a> LinkRequest<'a> {
    pub fn new(host: &'a SimpleGraph, a: &'a [usize], b: &'a [usize], s: usize, budget: u64, seed: u64) -> Self {
        LinkRequest {
            host,
            a,
            b,
            s,
            budget,
            pool: None,
            positions: None,
            seed,
        }
    }

    pub fn with_pool(mut self, pool: &'a VertexSet) -> Self {
        self.pool = Some(pool);
        self
    }
}

struct Search<'a> {
    req: &'a LinkRequest<'a>,
    k: usize,
    free: VertexSet,
    expanded: u64,
    rng: Option<ChaCha8Rng>,
    scratch: Vec<u64>,
}

enum Flow {
    Stop,
    Continue,
    OutOfBudget,
}

impl Search<'_> {
    fn candidates(&mut self, order: &[usize]) -> Vec<usize> {
        let (k, s) = (self.k, self.req.s);
        let host = self.req.host;
        let i = order.len();
        self.scratch.clear();
        self.scratch.extend_from_slice(self.free.words());
        let acc = &mut self.scratch;
        if let Some(pp) = self.req.positions {
            for (w, x) in acc.iter_mut().zip(pp[i - k].words()) {
                *w &= x;
            }
        }
        for &u in &order[i.saturating_sub(k)..] {
            for (w, x) in acc.iter_mut().zip(host.row(u)) {
                *w &= x;
            }
        }
        // B_j sits at position s−k+j and must be within k of every
        // interior vertex close enough to it.
        for (j, &bj) in self.req.b.iter().enumerate() {
            if s - k + j - i <= k {
                for (w, x) in acc.iter_mut().zip(host.row(bj)) {
                    *w &= x;
                }
            }
        }
        let mut c: Vec<usize> = iter_bits(acc).collect();
        if let Some(rng) = self.rng.as_mut() {
            c.shuffle(rng);
        }
        c
    }

    fn dfs(&mut self, order: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> Flow {
        let (k, s) = (self.k, self.req.s);
        if order.len() == s - k {
            let mut full = order.clone();
            full.extend_from_slice(self.req.b);
            return if visit(&full) { Flow::Stop } else { Flow::Continue };
        }
        if self.expanded >= self.req.budget {
            return Flow::OutOfBudget;
        }
        self.expanded += 1;
        for x in self.candidates(order) {
            self.free.remove(x);
            order.push(x);
            let f = self.dfs(order, visit);
            order.pop();
            self.free.insert(x);
            match f {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }
}

fn validate_request(req: &LinkRequest<'_>) -> std::result::Result<usize, LinkFailure> {
    let k = req.a.len();
    let n = req.host.n();
    let bad = |m: String| Err(LinkFailure::Invalid(m));
    if k == 0 || req.b.len() != k {
        return bad(format!("endsequences have lengths {} and {}", req.a.len(), req.b.len()));
    }
    if req.s < 2 * k {
        return bad(format!("s = {} is below 2k = {}", req.s, 2 * k));
    }
    let mut seen = BTreeSet::new();
    for &x in req.a.iter().chain(req.b) {
        if x >= n {
            return bad(format!("vertex {x} out of range"));
        }
        if !seen.insert(x) {
            return bad(format!("vertex {x} repeated in the endsequences"));
        }
    }
    if let Some(pp) = req.positions {
        if pp.len() != req.s - 2 * k {
            return bad(format!("{} position pools for {} interior positions", pp.len(), req.s - 2 * k));
        }
    }
    Ok(k)
}

/// Run the search, calling `visit` on every complete order found until it
/// returns `true`.
fn search(req: &LinkRequest<'_>, shuffle: bool, visit: &mut dyn FnMut(&[usize]) -> bool) -> std::result::Result<(Flow, u64), LinkFailure> {
    let k = validate_request(req)?;
    let n = req.host.n();
    let s = req.s;
    // Pairs between A and B at distance ≤ k are required edges.
    for (i, &ai) in req.a.iter().enumerate() {
        for (j, &bj) in req.b.iter().enumerate() {
            if s - k + j - i <= k && !req.host.has_edge(ai, bj) {
                return Ok((Flow::Continue, 0));
            }
        }
    }
    let mut free = match req.pool {
        Some(p) if p.capacity() == n => p.clone(),
        Some(_) => return Err(LinkFailure::Invalid("pool capacity differs from host size".into())),
        None => VertexSet::full(n),
    };
    for &x in req.a.iter().chain(req.b) {
        free.remove(x);
    }
    let mut st = Search {
        req,
        k,
        free,
        expanded: 0,
        rng: shuffle.then(|| rng_from(req.seed)),
        scratch: Vec::new(),
    };
    let mut order = req.a.to_vec();
    let flow = st.dfs(&mut order, visit);
    Ok((flow, st.expanded))
}

/// Depth-first search for an (A,B)-linkage on `s` vertices.
pub fn find_linkage(req: &LinkRequest<'_>) -> std::result::Result<Linkage, LinkFailure> {
    let mut found = None;
    let (flow, expanded) = search(req, true, &mut |o| {
        found = Some(o.to_vec());
        true
    })?;
    match (flow, found) {
        (_, Some(order)) => Linkage::new(order, req.a.len()).map_err(|e| LinkFailure::Invalid(e.to_string())),
        (Flow::OutOfBudget, None) => Err(LinkFailure::BudgetExhausted { expanded }),
        (_, None) => Err(LinkFailure::NoLinkage { expanded }),
    }
}

/// Every linkage satisfying the request, in search order. Fails if the
/// budget runs out first.
pub fn enumerate_linkages(req: &LinkRequest<'_>) -> std::result::Result<Vec<Vec<usize>>, LinkFailure> {
    let mut out = Vec::new();
    let (flow, expanded) = search(req, false, &mut |o| {
        out.push(o.to_vec());
        false
    })?;
    match flow {
        Flow::OutOfBudget => Err(LinkFailure::BudgetExhausted { expanded }),
        _ => Ok(out),
    }
}

/// Pairwise disjoint `k`-sequence pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePairFamily {
    pairs: Vec<(VertexSeq, VertexSeq)>,
}

impl SequencePairFamily {
    pub fn new(pairs: Vec<(VertexSeq, VertexSeq)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let k = pairs.first().map(|p| p.0.k());
        for (a, b) in &pairs {
            if Some(a.k()) != k || Some(b.k()) != k {
                return Err(invalid("all sequences must have the same length"));
            }
            for &x in a.as_slice().iter().chain(b.as_slice()) {
                if !seen.insert(x) {
                    return Err(invalid(format!("vertex {x} appears in two sequences")));
                }
            }
        }
        Ok(SequencePairFamily { pairs })
    }

    /// From raw lines of `2k` ids each: `A` then `B`.
    pub fn from_rows(rows: &[Vec<usize>], k: usize) -> Result<Self> {
        let mut pairs = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != 2 * k {
                return Err(invalid(format!("pair line has {} ids, expected {}", r.len(), 2 * k)));
            }
            pairs.push((VertexSeq::new(r[..k].to_vec(), k)?, VertexSeq::new(r[k..].to_vec(), k)?));
        }
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[(VertexSeq, VertexSeq)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn k(&self) -> Option<usize> {
        self.pairs.first().map(|p| p.0.k())
    }

    pub fn sequence_vertices(&self) -> Vec<usize> {
        self.pairs
            .iter()
            .flat_map(|(a, b)| a.as_slice().iter().chain(b.as_slice()).copied())
            .collect()
    }
}

/// Linkages for a subset of a family's pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialLinkage {
    pub linkages: Vec<Linkage>,
    /// `linked_indices[i]` is the pair linked by `linkages[i]`.
    pub linked_indices: Vec<usize>,
}

impl PartialLinkage {
    /// Checks disjointness, sizes, endsequences, avoidance of other pairs'
    /// sequences, and every linkage edge against `host`.
    pub fn audit(&self, host: &SimpleGraph, family: &SequencePairFamily, s: usize) -> std::result::Result<(), String> {
        audit_linkages(host, family, s, &self.linkages, &self.linked_indices)
    }
}

pub(crate) fn audit_linkages(
    host: &SimpleGraph,
    family: &SequencePairFamily,
    s: usize,
    linkages: &[Linkage],
    indices: &[usize],
) -> std::result::Result<(), String> {
    if linkages.len() != indices.len() {
        return Err("linkage and index lists differ in length".into());
    }
    let owner: std::collections::HashMap<usize, usize> = family
        .pairs()
        .iter()
        .enumerate()
        .flat_map(|(i, (a, b))| a.as_slice().iter().chain(b.as_slice()).map(move |&x| (x, i)))
        .collect();
    let mut used = BTreeSet::new();
    let mut linked = BTreeSet::new();
    for (l, &j) in linkages.iter().zip(indices) {
        let (a, b) = family.pairs().get(j).ok_or_else(|| format!("pair index {j} out of range"))?;
        if !linked.insert(j) {
            return Err(format!("pair {j} linked twice"));
        }
        if l.len() != s {
            return Err(format!("linkage for pair {j} has {} vertices, expected {s}", l.len()));
        }
        if l.start() != a.as_slice() || l.end() != b.as_slice() {
            return Err(format!("linkage for pair {j} has the wrong endsequences"));
        }
        for &x in l.order() {
            if !used.insert(x) {
                return Err(format!("vertex {x} used by two linkages"));
            }
        }
        for &x in l.interior() {
            if let Some(&o) = owner.get(&x) {
                return Err(format!("linkage for pair {j} passes through a sequence of pair {o}"));
            }
        }
        if !l.verify_in(host) {
            return Err(format!("linkage for pair {j} uses a non-edge"));
        }
    }
    Ok(())
}

/// Greedily link the family's pairs in random order, each linkage drawing
/// its interior from a shrinking pool that excludes every sequence vertex.
pub fn find_partial_linkage(
    host: &SimpleGraph,
    family: &SequencePairFamily,
    s: usize,
    per_pair_budget: u64,
    pool: &VertexSet,
    seed: u64,
) -> PartialLinkage {
    let indices: Vec<usize> = (0..family.len()).collect();
    partial_over(host, family, &indices, s, per_pair_budget, &mut pool.clone(), seed)
}

fn partial_over(
    host: &SimpleGraph,
    family: &SequencePairFamily,
    indices: &[usize],
    s: usize,
    budget: u64,
    pool: &mut VertexSet,
    seed: u64,
) -> PartialLinkage {
    for x in family.sequence_vertices() {
        pool.remove(x);
    }
    let mut order = indices.to_vec();
    order.shuffle(&mut rng_from(derive(&[seed, 0x7061_7274])));
    let mut out = PartialLinkage {
        linkages: Vec::new(),
        linked_indices: Vec::new(),
    };
    for j in order {
        let (a, b) = &family.pairs()[j];
        let req = LinkRequest {
            pool: Some(pool),
            ..LinkRequest::new(host, a.as_slice(), b.as_slice(), s, budget, derive(&[seed, j as u64]))
        };
        if let Ok(l) = find_linkage(&req) {
            for &x in l.interior() {
                pool.remove(x);
            }
            out.linkages.push(l);
            out.linked_indices.push(j);
        }
    }
    out
}

/// Exposure rounds handed out on demand.
pub trait RoundSupply {
    /// Number of rounds available.
    fn available(&self) -> usize;
    fn round(&mut self, i: usize) -> Result<&SimpleGraph>;
}

impl RoundSupply for Vec<SimpleGraph> {
    fn available(&self) -> usize {
        self.len()
    }

    fn round(&mut self, i: usize) -> Result<&SimpleGraph> {
        self.get(i).ok_or_else(|| invalid(format!("round {i} does not exist")))
    }
}

/// Rounds of an exposure plan, sampled the first time they are requested.
pub struct LazyRounds {
    n: usize,
    plan: ExposurePlan,
    base_seed: u64,
    cache: Vec<Option<SimpleGraph>>,
}

impl LazyRounds {
    pub fn new(n: usize, plan: ExposurePlan, base_seed: u64) -> Self {
        let cache = vec![None; plan.rounds];
        LazyRounds {
            n,
            plan,
            base_seed,
            cache,
        }
    }

    pub fn sampled(&self) -> usize {
        self.cache.iter().filter(|c| c.is_some()).count()
    }

    pub fn plan(&self) -> &ExposurePlan {
        &self.plan
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    /// The rounds sampled so far, by index.
    pub fn sampled_rounds(&self) -> impl Iterator<Item = (usize, &SimpleGraph)> {
        self.cache.iter().enumerate().filter_map(|(i, g)| g.as_ref().map(|g| (i, g)))
    }
}

impl RoundSupply for LazyRounds {
    fn available(&self) -> usize {
        self.plan.rounds
    }

    fn round(&mut self, i: usize) -> Result<&SimpleGraph> {
        if i >= self.plan.rounds {
            return Err(invalid(format!("round {i} does not exist")));
        }
        if self.cache[i].is_none() {
            self.cache[i] = Some(self.plan.sample_round(self.n, self.base_seed, i)?);
        }
        Ok(self.cache[i].as_ref().expect("just sampled"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundPolicy {
    /// Below this many unlinked pairs, rounds link one pair each.
    pub singleton_threshold: usize,
    /// Cap on the number of rounds consumed.
    pub max_rounds: usize,
    pub per_pair_budget: u64,
}

impl RoundPolicy {
    /// Threshold `⌈ln² n⌉` and the given round cap.
    pub fn for_n(n: usize, max_rounds: usize, per_pair_budget: u64) -> Self {
        let l = (n.max(2) as f64).ln();
        RoundPolicy {
            singleton_threshold: (l * l).ceil() as usize,
            max_rounds,
            per_pair_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkAllOutcome {
    /// One linkage per pair, in family order.
    pub linkages: Vec<Linkage>,
    /// The round each linkage's edges came from.
    pub round_of: Vec<usize>,
    pub rounds_used: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkAllFailure {
    pub round: usize,
    pub unlinked: Vec<usize>,
    pub linked: usize,
    /// Linkages found before giving up: `(pair index, linkage, round)`.
    pub found: Vec<(usize, Linkage, usize)>,
}

/// Link every pair of the family using fresh rounds: partial linkages while
/// many pairs remain, then one pair per round. Each round's linkages use
/// only that round's edges and only vertices still in `pool`.
pub fn link_all(
    rounds: &mut dyn RoundSupply,
    family: &SequencePairFamily,
    s: usize,
    policy: RoundPolicy,
    pool: &VertexSet,
    seed: u64,
) -> std::result::Result<LinkAllOutcome, LinkAllFailure> {
    let f = family.len();
    let mut slots: Vec<Option<(Linkage, usize)>> = vec![None; f];
    let mut free = pool.clone();
    for x in family.sequence_vertices() {
        free.remove(x);
    }
    let cap = policy.max_rounds.min(rounds.available());
    let mut r = 0;
    let unlinked = |slots: &[Option<(Linkage, usize)>]| -> Vec<usize> {
        (0..slots.len()).filter(|&i| slots[i].is_none()).collect()
    };
    let found = |slots: &[Option<(Linkage, usize)>]| -> Vec<(usize, Linkage, usize)> {
        slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|(l, r)| (i, l.clone(), *r)))
            .collect()
    };
    loop {
        let open = unlinked(&slots);
        if open.is_empty() {
            break;
        }
        if r >= cap {
            return Err(LinkAllFailure {
                round: r,
                linked: f - open.len(),
                unlinked: open,
                found: found(&slots),
            });
        }
        let host = match rounds.round(r) {
            Ok(h) => h,
            Err(_) => {
                return Err(LinkAllFailure {
                    round: r,
                    linked: f - open.len(),
                    unlinked: open,
                    found: found(&slots),
                })
            }
        };
        let batch: Vec<usize> = if open.len() >= policy.singleton_threshold {
            open
        } else {
            vec![open[0]]
        };
        let part = partial_over(host, family, &batch, s, policy.per_pair_budget, &mut free, derive(&[seed, r as u64]));
        for (l, j) in part.linkages.into_iter().zip(part.linked_indices) {
            slots[j] = Some((l, r));
        }
        r += 1;
    }
    let (linkages, round_of) = slots.into_iter().map(|s| s.expect("all linked")).unzip();
    Ok(LinkAllOutcome {
        linkages,
        round_of,
        rounds_used: r,
    })
}

/// The host `K`'s random subgraph from the linking construction: class 0
/// holds one vertex `y_i` per pair (the contraction of `A_i ∪ B_i`), and
/// `classes[m−1]` lists the host vertices forming `V_m`. An edge from `y_i`
/// to `x ∈ V_m` labelled `j ∈ [k]` stands for the host edge from the `j`th
/// vertex of `A_i` to `x`; label `−j` stands for the edge from the
/// `(k+1−j)`th vertex of `B_i`. Edges are present exactly when the host has
/// the corresponding edge.
///
/// Returns the multigraph and the host vertex behind each of its vertices
/// (`usize::MAX` for the `y_i`).
pub fn linking_host(
    host: &SimpleGraph,
    family: &SequencePairFamily,
    classes: &[Vec<usize>],
) -> Result<(LabeledMultigraph, Vec<usize>)> {
    let k = family.k().ok_or_else(|| invalid("empty family"))?;
    let f = family.len();
    let mut class_of = vec![0; f];
    let mut back = vec![usize::MAX; f];
    for (m, c) in classes.iter().enumerate() {
        for &x in c {
            class_of.push(m + 1);
            back.push(x);
        }
    }
    let mut g = LabeledMultigraph::new(k, classes.len() + 1, class_of)?;
    for (i, (a, b)) in family.pairs().iter().enumerate() {
        for (id, &x) in back.iter().enumerate().skip(f) {
            for j in 1..=k {
                if host.has_edge(a.as_slice()[j - 1], x) {
                    g.add_edge(i, id, j as Label)?;
                }
                if host.has_edge(b.as_slice()[k - j], x) {
                    g.add_edge(i, id, -(j as Label))?;
                }
            }
        }
    }
    for u in f..back.len() {
        for v in u + 1..back.len() {
            if g.class_of(u) != g.class_of(v) && host.has_edge(back[u], back[v]) {
                g.add_edge(u, v, PLAIN)?;
            }
        }
    }
    Ok((g, back))
}

/// All good copies of `pattern` in `host`: class-respecting injective maps
/// under which every pattern edge lands on a host edge with the same label.
pub fn enumerate_good_copies(pattern: &LabeledMultigraph, host: &LabeledMultigraph) -> Vec<Vec<usize>> {
    let pv = pattern.vertex_count();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); host.class_count()];
    for v in 0..host.vertex_count() {
        by_class[host.class_of(v)].push(v);
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; pv];
    let mut used = vec![false; host.vertex_count()];
    fn rec(
        i: usize,
        pattern: &LabeledMultigraph,
        host: &LabeledMultigraph,
        by_class: &[Vec<usize>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == pattern.vertex_count() {
            out.push(map.clone());
            return;
        }
        let c = pattern.class_of(i);
        let Some(cands) = by_class.get(c) else { return };
        for &x in cands {
            if used[x] {
                continue;
            }
            map[i] = x;
            let ok = pattern.edges().iter().all(|e| {
                let (u, v) = (e.u, e.v);
                if u.max(v) != i {
                    return true;
                }
                host.has_edge(map[u], map[v], e.label)
            });
            if ok {
                used[x] = true;
                rec(i + 1, pattern, host, by_class, map, used, out);
                used[x] = false;
            }
            map[i] = usize::MAX;
        }
    }
    rec(0, pattern, host, &by_class, &mut map, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::{join, make_path_power, PathPower};

    fn seq(v: &[usize]) -> VertexSeq {
        VertexSeq::new(v.to_vec(), v.len()).unwrap()
    }

    #[test]
    fn complete_host_always_links() {
        let g = SimpleGraph::complete(20);
        for s in [4, 6, 9] {
            let req = LinkRequest::new(&g, &[0, 1], &[2, 3], s, 1000, 3);
            let l = find_linkage(&req).unwrap();
            assert_eq!(l.len(), s);
            assert!(l.verify_in(&g));
        }
    }

    #[test]
    fn single_candidate_without_edges_is_no_linkage() {
        // Interior of size one, only vertex 4 available, and 4 is isolated.
        let mut g = SimpleGraph::complete(5);
        for x in 0..4 {
            g.remove_edge(x, 4);
        }
        let req = LinkRequest::new(&g, &[0, 1], &[2, 3], 5, 1000, 1);
        assert!(matches!(find_linkage(&req), Err(LinkFailure::NoLinkage { .. })));
    }

    #[test]
    fn budget_is_reported() {
        let mut h = SimpleGraph::new(30);
        h.add_edge(0, 1).unwrap();
        let k30 = SimpleGraph::complete(30);
        let req = LinkRequest::new(&k30, &[0, 1], &[2, 3], 12, 100, 1);
        assert!(find_linkage(&req).is_ok());
        let req = LinkRequest::new(&h, &[0, 1], &[2, 3], 12, 0, 1);
        assert!(matches!(find_linkage(&req), Err(LinkFailure::BudgetExhausted { .. })));
    }

    #[test]
    fn linkage_joins_two_paths() {
        let g = SimpleGraph::complete(16);
        let left = PathPower::new((0..6).collect(), 2).unwrap();
        let right = PathPower::new((6..12).collect(), 2).unwrap();
        let mut pool = VertexSet::full(16);
        for x in 0..12 {
            pool.remove(x);
        }
        let req = LinkRequest::new(&g, left.final_seq(), right.initial(), 8, 100, 5).with_pool(&pool);
        let l = find_linkage(&req).unwrap();
        let joined = join(&left, &l, &right).unwrap();
        assert_eq!(joined.len(), 16);
        assert!(joined.verify_in(&g).unwrap());
    }

    #[test]
    fn partial_linkage_on_complete_and_empty_hosts() {
        let fam = SequencePairFamily::new(vec![(seq(&[0, 1]), seq(&[2, 3])), (seq(&[4, 5]), seq(&[6, 7]))]).unwrap();
        let g = SimpleGraph::complete(30);
        let pool = VertexSet::full(30);
        let part = find_partial_linkage(&g, &fam, 8, 1000, &pool, 1);
        assert_eq!(part.linkages.len(), 2);
        part.audit(&g, &fam, 8).unwrap();
        let empty = SimpleGraph::new(30);
        assert!(find_partial_linkage(&empty, &fam, 8, 1000, &pool, 1).linkages.is_empty());
    }

    #[test]
    fn link_all_trivial_cases() {
        let fam = SequencePairFamily::new(vec![(seq(&[0, 1]), seq(&[2, 3]))]).unwrap();
        let mut rounds = vec![SimpleGraph::complete(20); 3];
        let policy = RoundPolicy {
            singleton_threshold: 4,
            max_rounds: 3,
            per_pair_budget: 100,
        };
        let pool = VertexSet::full(20);
        let out = link_all(&mut rounds, &fam, 6, policy, &pool, 2).unwrap();
        assert_eq!(out.rounds_used, 1);
        assert_eq!(out.round_of, vec![0]);
        let none = SequencePairFamily::new(vec![]).unwrap();
        assert!(link_all(&mut rounds, &none, 6, policy, &pool, 2).unwrap().linkages.is_empty());
        let mut empty = vec![SimpleGraph::new(20); 2];
        let fail = link_all(&mut empty, &fam, 6, policy, &pool, 2).unwrap_err();
        assert_eq!(fail.unlinked, vec![0]);
    }

    #[test]
    fn minimal_linkage_checks_cross_edges() {
        let g = make_path_power(4, 2).unwrap();
        let req = LinkRequest::new(&g, &[0, 1], &[2, 3], 4, 10, 0);
        let l = find_linkage(&req).unwrap();
        assert_eq!(l.order(), &[0, 1, 2, 3]);
        let mut h = g.clone();
        h.remove_edge(1, 3);
        let req = LinkRequest::new(&h, &[0, 1], &[2, 3], 4, 10, 0);
        assert!(matches!(find_linkage(&req), Err(LinkFailure::NoLinkage { .. })));
    }
}
