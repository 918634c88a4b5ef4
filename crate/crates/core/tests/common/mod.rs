//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use kpower_core::density::{MomentModel, PhiVariant};
use kpower_core::{LabeledMultigraph, SimpleGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(n: usize, p: f64, r: &mut ChaCha8Rng) -> SimpleGraph {
    let mut g = SimpleGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < p {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Edge set of the kth power of the path or cycle through `order`.
pub fn power_edges(order: &[usize], k: usize, cyclic: bool) -> BTreeSet<(usize, usize)> {
    let n = order.len();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for d in 1..=k {
            let j = if cyclic { (i + d) % n } else { i + d };
            if j >= n || j == i {
                continue;
            }
            let (a, b) = (order[i], order[j]);
            out.insert((a.min(b), a.max(b)));
        }
    }
    out
}

pub fn contains_all(host: &SimpleGraph, edges: &BTreeSet<(usize, usize)>) -> bool {
    edges.iter().all(|&(u, v)| host.has_edge(u, v))
}

fn permutations(n: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(a: &mut Vec<usize>, i: usize, visit: &mut dyn FnMut(&[usize])) {
        if i == a.len() {
            visit(a);
            return;
        }
        for j in i..a.len() {
            a.swap(i, j);
            rec(a, i + 1, visit);
            a.swap(i, j);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    rec(&mut a, 0, visit);
}

/// Distinct `C^k_n` edge sets inside `host`, by enumerating every
/// permutation (n ≤ 9).
pub fn brute_count_copies(host: &SimpleGraph, k: usize) -> usize {
    let mut seen: HashSet<BTreeSet<(usize, usize)>> = HashSet::new();
    permutations(host.n(), &mut |perm| {
        let e = power_edges(perm, k, true);
        if contains_all(host, &e) {
            seen.insert(e);
        }
    });
    seen.len()
}

/// Number of Hamilton cycles of `K_n`'s subgraph `host`, by permutations.
pub fn brute_hamilton_cycles(host: &SimpleGraph) -> usize {
    brute_count_copies(host, 1)
}

/// Max over vertex subsets `S` with `|S| > shift` of `e(S)/(|S| − shift)`,
/// weights included, as a reduced fraction.
pub fn brute_max_density(n: usize, pairs: &[(usize, usize, u64)], shift: usize) -> (u64, u64) {
    assert!(n <= 20);
    let mut best = (0u64, 1u64);
    for mask in 1u32..(1u32 << n) {
        let v = mask.count_ones() as usize;
        if v <= shift {
            continue;
        }
        let e: u64 = pairs
            .iter()
            .filter(|(a, b, _)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
            .map(|p| p.2)
            .sum();
        let d = (v - shift) as u64;
        if e * best.1 > best.0 * d {
            best = (e, d);
        }
    }
    let g = gcd(best.0, best.1);
    (best.0 / g, best.1 / g)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn log_falling(size: usize, c: usize) -> f64 {
    if c > size {
        return f64::NEG_INFINITY;
    }
    (0..c).map(|i| ((size - i) as f64).ln()).sum()
}

/// Log of the expected number of good copies of the subpattern with
/// vertex mask `vm` and edge mask `em`.
pub fn log_expectation(pattern: &LabeledMultigraph, model: &MomentModel, vm: u32, em: u64) -> f64 {
    let mut counts = vec![0usize; pattern.class_count()];
    for v in 0..pattern.vertex_count() {
        if vm >> v & 1 == 1 {
            counts[pattern.class_of(v)] += 1;
        }
    }
    let size = |i: usize| match i {
        0 => model.n0,
        i if i <= model.t => model.n,
        _ => 0,
    };
    let e = em.count_ones() as f64;
    let pe = if e == 0.0 {
        0.0
    } else if model.p == 0.0 {
        f64::NEG_INFINITY
    } else {
        e * model.p.ln()
    };
    pe + counts.iter().enumerate().map(|(i, &c)| log_falling(size(i), c)).sum::<f64>()
}

/// `Φ` from its definition: minimum over every (vertex set, edge set)
/// subpattern of the expected count.
pub fn brute_phi(pattern: &LabeledMultigraph, model: &MomentModel, variant: PhiVariant) -> f64 {
    let v = pattern.vertex_count();
    let edges = pattern.edges();
    assert!(v <= 16 && edges.len() <= 20);
    let mut best = f64::INFINITY;
    for vm in 1u32..(1u32 << v) {
        let inside: Vec<usize> = (0..edges.len())
            .filter(|&i| vm >> edges[i].u & 1 == 1 && vm >> edges[i].v & 1 == 1)
            .collect();
        for sub in 0u64..(1u64 << inside.len()) {
            if variant == PhiVariant::Edge && sub == 0 {
                continue;
            }
            let mut em = 0u64;
            for (b, &i) in inside.iter().enumerate() {
                if sub >> b & 1 == 1 {
                    em |= 1 << i;
                }
            }
            best = best.min(log_expectation(pattern, model, vm, em));
        }
    }
    best
}

/// A random labelled pattern with classes `0..=t`: each vertex gets a
/// class, class-0 pairs get random distinct labels, other cross-class
/// pairs a plain edge with probability `q`.
pub fn random_pattern(v: usize, t: usize, k: usize, q: f64, max_edges: usize, r: &mut ChaCha8Rng) -> LabeledMultigraph {
    let class_of: Vec<usize> = (0..v).map(|i| if i < t + 1 { i } else { r.gen_range(0..=t) }).collect();
    let mut g = LabeledMultigraph::new(k, t + 1, class_of.clone()).unwrap();
    let mut pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    pairs.shuffle(r);
    for (a, b) in pairs {
        if g.edge_count() >= max_edges {
            break;
        }
        let (ca, cb) = (class_of[a], class_of[b]);
        if ca == cb || r.gen::<f64>() >= q {
            continue;
        }
        if ca == 0 || cb == 0 {
            let mut labels: Vec<i32> = (1..=k as i32).flat_map(|l| [l, -l]).collect();
            labels.shuffle(r);
            let m = r.gen_range(1..=2.min(labels.len()));
            for &l in &labels[..m] {
                if g.edge_count() < max_edges {
                    g.add_edge(a, b, l).unwrap();
                }
            }
        } else {
            g.add_edge(a, b, 0).unwrap();
        }
    }
    g
}
