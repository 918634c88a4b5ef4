//! Randomised backtracking embeddings: single copies, disjoint packings,
//! and exact covers by powers of paths.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::{iter_bits, VertexSet};
use crate::error::{invalid, Result};
use crate::graph::SimpleGraph;
use crate::power::PathPower;
use crate::seed::{derive, rng_from};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingBudget {
    /// DFS expansions allowed per attempt.
    pub max_nodes: u64,
    pub restarts: u32,
    pub seed: u64,
}

impl EmbeddingBudget {
    pub fn new(max_nodes: u64, restarts: u32, seed: u64) -> Result<Self> {
        if max_nodes == 0 || restarts == 0 {
            return Err(invalid("budget fields must be positive"));
        }
        Ok(EmbeddingBudget {
            max_nodes,
            restarts,
            seed,
        })
    }

    fn reseeded(&self, salt: u64) -> Self {
        EmbeddingBudget {
            seed: derive(&[self.seed, salt]),
            ..*self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbedFailure {
    BudgetExhausted { expanded: u64 },
    NoEmbedding { expanded: u64 },
}

/// Core numbers by repeated removal of a minimum-degree vertex.
fn core_numbers(g: &SimpleGraph) -> Vec<usize> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut gone = vec![false; n];
    let mut core = vec![0; n];
    let mut k = 0;
    for _ in 0..n {
        let v = (0..n).filter(|&v| !gone[v]).min_by_key(|&v| (deg[v], v)).unwrap();
        k = k.max(deg[v]);
        core[v] = k;
        gone[v] = true;
        for u in g.neighbors(v) {
            if !gone[u] {
                deg[u] -= 1;
            }
        }
    }
    core
}

/// Pattern order: start at a vertex of maximum core number, then always
/// take the vertex with the most already-ordered neighbours.
pub fn embedding_order(pattern: &SimpleGraph) -> Vec<usize> {
    let n = pattern.n();
    let core = core_numbers(pattern);
    let mut placed = vec![false; n];
    let mut back = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (back[v], core[v], pattern.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        placed[v] = true;
        order.push(v);
        for u in pattern.neighbors(v) {
            back[u] += 1;
        }
    }
    order
}

struct Embedder<'a> {
    host: &'a SimpleGraph,
    order: Vec<usize>,
    /// Earlier positions adjacent to each position.
    back: Vec<Vec<usize>>,
    pdeg: Vec<usize>,
    hdeg: Vec<usize>,
    avail: VertexSet,
    image: Vec<usize>,
    expanded: u64,
    limit: u64,
    rng: ChaCha8Rng,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Embedder<'_> {
    fn dfs(&mut self, i: usize) -> Step {
        if i == self.order.len() {
            return Step::Found;
        }
        if self.expanded >= self.limit {
            return Step::OutOfBudget;
        }
        self.expanded += 1;
        let mut acc = self.avail.words().to_vec();
        for &j in &self.back[i] {
            for (w, x) in acc.iter_mut().zip(self.host.row(self.image[j])) {
                *w &= x;
            }
        }
        let need = self.pdeg[i];
        let mut cands: Vec<usize> = iter_bits(&acc).filter(|&x| self.hdeg[x] >= need).collect();
        cands.shuffle(&mut self.rng);
        for x in cands {
            self.image[i] = x;
            self.avail.remove(x);
            let r = self.dfs(i + 1);
            self.avail.insert(x);
            match r {
                Step::Exhausted => {}
                other => return other,
            }
        }
        Step::Exhausted
    }
}

/// Injective adjacency-preserving map of `pattern` into `host` avoiding
/// `forbidden`; `result[v]` is the image of pattern vertex `v`.
pub fn embed_copy(
    host: &SimpleGraph,
    pattern: &SimpleGraph,
    forbidden: &VertexSet,
    budget: &EmbeddingBudget,
) -> std::result::Result<Vec<usize>, EmbedFailure> {
    let order = embedding_order(pattern);
    let mut pos = vec![0; pattern.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| pattern.neighbors(v).map(|u| pos[u]).filter(|&j| j < i).collect())
        .collect();
    let pdeg: Vec<usize> = order.iter().map(|&v| pattern.degree(v)).collect();
    let mut avail = VertexSet::full(host.n());
    avail.difference_with(forbidden);
    let hdeg: Vec<usize> = (0..host.n()).map(|v| host.degree_in(v, &avail)).collect();
    let mut total = 0;
    for attempt in 0..budget.restarts {
        let mut e = Embedder {
            host,
            order: order.clone(),
            back: back.clone(),
            pdeg: pdeg.clone(),
            hdeg: hdeg.clone(),
            avail: avail.clone(),
            image: vec![usize::MAX; pattern.n()],
            expanded: 0,
            limit: budget.max_nodes,
            rng: rng_from(derive(&[budget.seed, attempt as u64])),
        };
        let r = e.dfs(0);
        total += e.expanded;
        match r {
            Step::Found => {
                let mut map = vec![0; pattern.n()];
                for (i, &v) in e.order.iter().enumerate() {
                    map[v] = e.image[i];
                }
                return Ok(map);
            }
            Step::Exhausted => return Err(EmbedFailure::NoEmbedding { expanded: total }),
            Step::OutOfBudget => {}
        }
    }
    Err(EmbedFailure::BudgetExhausted { expanded: total })
}

/// Whether `map` is an injective, adjacency-preserving map avoiding
/// `forbidden`.
pub fn audit_embedding(host: &SimpleGraph, pattern: &SimpleGraph, map: &[usize], forbidden: &VertexSet) -> bool {
    if map.len() != pattern.n() {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    map.iter().all(|&x| x < host.n() && !forbidden.contains(x) && seen.insert(x))
        && pattern.edges().all(|(u, v)| host.has_edge(map[u], map[v]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointCopies {
    pub mappings: Vec<Vec<usize>>,
    pub target: usize,
    /// `target − mappings.len()`.
    pub shortfall: usize,
}

/// Greedy packing of pairwise disjoint copies, each found with restarts.
pub fn find_disjoint_copies(
    host: &SimpleGraph,
    pattern: &SimpleGraph,
    count: usize,
    budget: &EmbeddingBudget,
    forbidden: &VertexSet,
) -> Result<DisjointCopies> {
    if count * pattern.n() > host.n() {
        return Err(invalid(format!(
            "{count} copies of a {}-vertex pattern exceed {} host vertices",
            pattern.n(),
            host.n()
        )));
    }
    let mut blocked = forbidden.clone();
    let mut mappings = Vec::new();
    let mut misses = 0;
    while mappings.len() < count && misses < budget.restarts {
        let b = budget.reseeded((mappings.len() as u64) << 16 | misses as u64);
        match embed_copy(host, pattern, &blocked, &b) {
            Ok(map) => {
                for &x in &map {
                    blocked.insert(x);
                }
                mappings.push(map);
            }
            Err(EmbedFailure::NoEmbedding { .. }) => break,
            Err(EmbedFailure::BudgetExhausted { .. }) => misses += 1,
        }
    }
    Ok(DisjointCopies {
        shortfall: count - mappings.len(),
        target: count,
        mappings,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorFailure {
    pub residue: Vec<usize>,
    pub covered: usize,
    pub repairs: u32,
}

/// Grow one `k`th power of a path on `r` vertices from `start`, inside
/// `avail`. Candidates are tried in order of fewest remaining neighbours.
fn grow_piece(
    host: &SimpleGraph,
    avail: &VertexSet,
    start: usize,
    r: usize,
    k: usize,
    limit: u64,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    fn rec(
        host: &SimpleGraph,
        free: &mut VertexSet,
        order: &mut Vec<usize>,
        r: usize,
        k: usize,
        left: &mut u64,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        if order.len() == r {
            return true;
        }
        if *left == 0 {
            return false;
        }
        *left -= 1;
        let mut acc = free.words().to_vec();
        for &u in &order[order.len().saturating_sub(k)..] {
            for (w, x) in acc.iter_mut().zip(host.row(u)) {
                *w &= x;
            }
        }
        let mut c: Vec<(usize, u64, usize)> = iter_bits(&acc)
            .map(|x| (host.degree_in(x, free), rng.gen(), x))
            .collect();
        c.sort_unstable();
        for (_, _, x) in c {
            free.remove(x);
            order.push(x);
            if rec(host, free, order, r, k, left, rng) {
                return true;
            }
            order.pop();
            free.insert(x);
        }
        false
    }
    let mut free = avail.clone();
    free.remove(start);
    let mut order = vec![start];
    let mut left = limit;
    rec(host, &mut free, &mut order, r, k, &mut left, rng).then_some(order)
}

/// Exact cover of `within` by vertex-disjoint copies of `P^k_r` in `host`:
/// greedy growth from low-degree vertices, with dismantle-and-retry repair
/// around any vertex that cannot be covered.
pub fn find_path_power_factor(
    host: &SimpleGraph,
    within: &VertexSet,
    r: usize,
    k: usize,
    budget: &EmbeddingBudget,
) -> Result<std::result::Result<Vec<PathPower>, FactorFailure>> {
    if r == 0 || k == 0 {
        return Err(invalid("piece size and power must be positive"));
    }
    if within.capacity() != host.n() {
        return Err(invalid("vertex set capacity differs from host size"));
    }
    let total = within.len();
    if !total.is_multiple_of(r) {
        return Err(invalid(format!("{total} vertices are not divisible by piece size {r}")));
    }
    let mut rng = rng_from(budget.seed);
    let mut avail = within.clone();
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut repairs = 0;
    while !avail.is_empty() {
        // Lowest remaining degree first, ties broken at random.
        let start = avail
            .iter()
            .map(|x| (host.degree_in(x, &avail), rng.gen::<u64>(), x))
            .min()
            .map(|t| t.2)
            .unwrap();
        if let Some(p) = grow_piece(host, &avail, start, r, k, budget.max_nodes, &mut rng) {
            for &x in &p {
                avail.remove(x);
            }
            pieces.push(p);
            continue;
        }
        if repairs >= budget.restarts || pieces.is_empty() {
            return Ok(Err(FactorFailure {
                residue: avail.to_vec(),
                covered: total - avail.len(),
                repairs,
            }));
        }
        repairs += 1;
        // Release the pieces holding most neighbours of the stuck vertex
        // (or random pieces if it has none), then retry.
        let mut scored: Vec<(usize, u64, usize)> = pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let near = p.iter().filter(|&&x| host.has_edge(x, start)).count();
                (near, rng.gen(), i)
            })
            .collect();
        scored.sort_unstable_by(|a, b| b.cmp(a));
        let release = 2.min(scored.len());
        let mut drop: Vec<usize> = scored[..release].iter().map(|t| t.2).collect();
        drop.sort_unstable_by(|a, b| b.cmp(a));
        for i in drop {
            for x in pieces.swap_remove(i) {
                avail.insert(x);
            }
        }
    }
    let out = pieces
        .into_iter()
        .map(|p| PathPower::new(p, k.min(r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ok(out))
}

/// Whether `pieces` partition `within` and each is a `k`th power of a path
/// on `r` vertices in `host`.
pub fn audit_factor(host: &SimpleGraph, within: &VertexSet, pieces: &[PathPower], r: usize, k: usize) -> bool {
    let mut seen = VertexSet::new(host.n());
    for p in pieces {
        if p.len() != r || !crate::power::verify_path_power_in(host, p.order(), k).unwrap_or(false) {
            return false;
        }
        for &x in p.order() {
            if !within.contains(x) || !seen.insert(x) {
                return false;
            }
        }
    }
    seen == *within
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::{make_cycle_power, make_path_power};

    fn budget() -> EmbeddingBudget {
        EmbeddingBudget::new(10_000, 4, 7).unwrap()
    }

    #[test]
    fn single_edge_and_impossible_k4() {
        let edge = SimpleGraph::from_edges(2, [(0, 1)]).unwrap();
        let host = SimpleGraph::from_edges(5, [(3, 4)]).unwrap();
        let none = VertexSet::new(5);
        let m = embed_copy(&host, &edge, &none, &budget()).unwrap();
        assert!(audit_embedding(&host, &edge, &m, &none));

        let c10 = make_cycle_power(10, 1).unwrap();
        let k4 = SimpleGraph::complete(4);
        assert!(matches!(
            embed_copy(&c10, &k4, &VertexSet::new(10), &budget()),
            Err(EmbedFailure::NoEmbedding { .. })
        ));
    }

    #[test]
    fn disjoint_copies_in_complete_host() {
        let host = SimpleGraph::complete(30);
        let pat = make_path_power(6, 2).unwrap();
        let none = VertexSet::new(30);
        let d = find_disjoint_copies(&host, &pat, 5, &budget(), &none).unwrap();
        assert_eq!(d.mappings.len(), 5);
        assert_eq!(d.shortfall, 0);
        assert!(find_disjoint_copies(&host, &pat, 0, &budget(), &none).unwrap().mappings.is_empty());
        assert!(find_disjoint_copies(&host, &pat, 6, &budget(), &none).is_err());
    }

    #[test]
    fn factor_of_complete_graph() {
        let r = 5;
        let host = SimpleGraph::complete(3 * r);
        let all = VertexSet::full(3 * r);
        let f = find_path_power_factor(&host, &all, r, 2, &budget()).unwrap().unwrap();
        assert_eq!(f.len(), 3);
        assert!(audit_factor(&host, &all, &f, r, 2));
        let singles = find_path_power_factor(&host, &all, 1, 2, &budget()).unwrap().unwrap();
        assert_eq!(singles.len(), 15);
        assert!(find_path_power_factor(&host, &all, 4, 2, &budget()).is_err());
    }

    #[test]
    fn factor_of_cycle_power() {
        let host = make_cycle_power(40, 2).unwrap();
        let all = VertexSet::full(40);
        let f = find_path_power_factor(&host, &all, 8, 2, &budget()).unwrap().unwrap();
        assert!(audit_factor(&host, &all, &f, 8, 2));
    }

    #[test]
    fn order_starts_in_densest_core() {
        let mut g = SimpleGraph::complete(4);
        let mut big = SimpleGraph::new(7);
        for (u, v) in g.edges().collect::<Vec<_>>() {
            big.add_edge(u + 3, v + 3).unwrap();
        }
        big.add_edge(0, 1).unwrap();
        big.add_edge(1, 2).unwrap();
        big.add_edge(2, 3).unwrap();
        g = big;
        let o = embedding_order(&g);
        assert!(o[0] >= 3);
        assert_eq!(o.len(), 7);
    }
}
