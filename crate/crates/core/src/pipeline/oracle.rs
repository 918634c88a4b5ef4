//! Certificate checking and exhaustive small-n ground truth.

use crate::error::{invalid, Error, Result};
use crate::graph::SimpleGraph;
use crate::power::HamiltonPowerCertificate;

/// Largest host accepted by [`oracle_contains`].
pub const ORACLE_LIMIT: usize = 14;
/// Largest host accepted by [`count_copies`].
pub const COUNT_LIMIT: usize = 12;

/// Whether every pair at cyclic distance at most `k` in the certificate's
/// order is an edge of `host`.
pub fn verify_certificate(host: &SimpleGraph, cert: &HamiltonPowerCertificate) -> Result<bool> {
    let n = host.n();
    let order = &cert.cyclic_order;
    if order.len() != n {
        return Err(invalid(format!(
            "certificate lists {} vertices, host has {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::DuplicateVertex(v));
        }
    }
    if cert.k == 0 {
        return Err(invalid("k must be positive"));
    }
    let reach = cert.k.min(n / 2);
    Ok((0..n).all(|i| (1..=reach).all(|d| host.has_edge(order[i], order[(i + d) % n]))))
}

fn masks(host: &SimpleGraph) -> Vec<u32> {
    (0..host.n())
        .map(|u| host.neighbors(u).fold(0u32, |m, v| m | 1 << v))
        .collect()
}

/// Positions an entry at position `i` of a cyclic order on `n` vertices
/// must be adjacent to, among positions `0..i`.
fn required(i: usize, n: usize, k: usize) -> u32 {
    let mut m = 0u32;
    for j in 0..i {
        let d = (i - j).min(n - (i - j));
        if d <= k {
            m |= 1 << j;
        }
    }
    m
}

/// Depth-first search over cyclic orders with vertex 0 first that witness
/// `C^k_n`. Counts them all, or stops at the first and leaves it in `order`.
fn count_orders(adj: &[u32], k: usize, first_only: bool, order: &mut [usize]) -> u64 {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    let need: Vec<u32> = (0..n).map(|i| required(i, n, k)).collect();
    fn rec(i: usize, used: u32, order: &mut [usize], adj: &[u32], need: &[u32], first_only: bool) -> u64 {
        let n = adj.len();
        if i == n {
            return 1;
        }
        let mut cand = !used & ((1u32 << n) - 1);
        let mut req = need[i];
        while req != 0 {
            let j = req.trailing_zeros() as usize;
            req &= req - 1;
            cand &= adj[order[j]];
        }
        let mut total = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            order[i] = v;
            total += rec(i + 1, used | 1 << v, order, adj, need, first_only);
            if first_only && total > 0 {
                return total;
            }
        }
        total
    }
    order[0] = 0;
    rec(1, 1, order, adj, &need, first_only)
}

fn min_degree_ok(host: &SimpleGraph, k: usize) -> bool {
    let n = host.n();
    let want = (2 * k).min(n.saturating_sub(1));
    (0..n).all(|v| host.degree(v) >= want)
}

/// Exhaustive search for the kth power of a Hamilton cycle.
pub fn oracle_contains(host: &SimpleGraph, k: usize) -> Result<bool> {
    oracle_certificate(host, k).map(|c| c.is_some())
}

/// Like [`oracle_contains`], returning the first witness found.
pub fn oracle_certificate(host: &SimpleGraph, k: usize) -> Result<Option<HamiltonPowerCertificate>> {
    let n = host.n();
    if n > ORACLE_LIMIT {
        return Err(Error::SizeLimit {
            what: "oracle host",
            actual: n,
            limit: ORACLE_LIMIT,
        });
    }
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if n == 0 || !min_degree_ok(host, k) {
        return Ok(None);
    }
    let mut order = vec![0; n];
    Ok((count_orders(&masks(host), k, true, &mut order) > 0).then_some(HamiltonPowerCertificate { cyclic_order: order, k }))
}

/// Number of distinct subgraphs of `host` isomorphic to `C^k_n`.
pub fn count_copies(host: &SimpleGraph, k: usize) -> Result<u64> {
    let n = host.n();
    if n > COUNT_LIMIT {
        return Err(Error::SizeLimit {
            what: "counting host",
            actual: n,
            limit: COUNT_LIMIT,
        });
    }
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if n == 0 || !min_degree_ok(host, k) {
        return Ok(0);
    }
    let mut order = vec![0; n];
    let hits = count_orders(&masks(host), k, false, &mut order);
    // Each copy is hit once per automorphism fixing vertex 0's image, and
    // that number is the pattern's own count.
    let pattern: Vec<u32> = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && (u.abs_diff(v)).min(n - u.abs_diff(v)) <= k)
                .fold(0u32, |m, v| m | 1 << v)
        })
        .collect();
    Ok(hits / count_orders(&pattern, k, false, &mut order))
}

/// Natural log of `(n!/(2n))·p^{kn}`.
pub fn log_expected_copy_count(n: usize, k: usize, p: f64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if n < 2 * k + 3 {
        return Err(invalid(format!(
            "n = {n} is below 2k+3 = {}, where the symmetry count is not dihedral",
            2 * k + 3
        )));
    }
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} is not a probability")));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let log_fact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
    Ok(log_fact - (2.0 * n as f64).ln() + (k * n) as f64 * p.ln())
}

pub fn expected_copy_count(n: usize, k: usize, p: f64) -> Result<f64> {
    log_expected_copy_count(n, k, p).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::make_cycle_power;

    #[test]
    fn certificate_checks() {
        let g = make_cycle_power(20, 2).unwrap();
        let cert = HamiltonPowerCertificate {
            cyclic_order: (0..20).collect(),
            k: 2,
        };
        assert!(verify_certificate(&g, &cert).unwrap());
        let mut h = g.clone();
        h.remove_edge(3, 5);
        assert!(!verify_certificate(&h, &cert).unwrap());
        let bad = HamiltonPowerCertificate {
            cyclic_order: vec![0; 20],
            k: 2,
        };
        assert!(verify_certificate(&g, &bad).is_err());
        let kn = SimpleGraph::complete(9);
        let perm = HamiltonPowerCertificate {
            cyclic_order: vec![4, 2, 7, 0, 8, 1, 3, 6, 5],
            k: 3,
        };
        assert!(verify_certificate(&kn, &perm).unwrap());
    }

    #[test]
    fn oracle_small_cases() {
        assert!(oracle_contains(&make_cycle_power(10, 2).unwrap(), 2).unwrap());
        assert!(!oracle_contains(&make_cycle_power(10, 1).unwrap(), 2).unwrap());
        let mut g = SimpleGraph::complete(7);
        for v in 1..7 {
            g.remove_edge(0, v);
        }
        assert!(!oracle_contains(&g, 2).unwrap());
        assert!(oracle_contains(&SimpleGraph::new(15), 2).is_err());
        let h = crate::randgen::sample_gnp(11, 0.8, 5).unwrap();
        if let Some(c) = oracle_certificate(&h, 2).unwrap() {
            assert!(verify_certificate(&h, &c).unwrap());
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count_copies(&SimpleGraph::complete(7), 2).unwrap(), 360);
        assert_eq!(count_copies(&make_cycle_power(9, 2).unwrap(), 2).unwrap(), 1);
        assert_eq!(count_copies(&SimpleGraph::new(8), 2).unwrap(), 0);
        assert_eq!(count_copies(&SimpleGraph::complete(5), 2).unwrap(), 1);
        assert!((expected_copy_count(7, 2, 1.0).unwrap() - 360.0).abs() < 1e-6);
        assert_eq!(expected_copy_count(10, 2, 0.0).unwrap(), 0.0);
        assert!(expected_copy_count(6, 2, 0.5).is_err());
    }
}
