//! Gray-code enumeration of vertex subsets, split into independent chunks by
//! the high bits of the subset mask.

use rayon::prelude::*;

use super::{ratio, DensityResult};

#[derive(Clone, Copy)]
struct Best {
    e: u64,
    size: u32,
    mask: u64,
}

/// Larger density first; ties go to larger sets, then to smaller masks.
fn better(a: Best, b: Best, shift: u32) -> Best {
    let lhs = a.e as u128 * (b.size - shift) as u128;
    let rhs = b.e as u128 * (a.size - shift) as u128;
    match lhs.cmp(&rhs).then(a.size.cmp(&b.size)).then(b.mask.cmp(&a.mask)) {
        std::cmp::Ordering::Less => b,
        _ => a,
    }
}

fn merge(a: Option<Best>, b: Option<Best>, shift: u32) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => Some(better(x, y, shift)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn weight_into(adj: &[Vec<(usize, u64)>], x: usize, mask: u64) -> u64 {
    adj[x]
        .iter()
        .filter(|&&(y, _)| (mask >> y) & 1 == 1)
        .map(|&(_, w)| w)
        .sum()
}

fn scan_chunk(high: u64, low: usize, adj: &[Vec<(usize, u64)>], shift: u32) -> Option<Best> {
    let mut mask = high << low;
    let mut e: u64 = 0;
    let mut seen = 0u64;
    for x in 0..adj.len() {
        if (mask >> x) & 1 == 1 {
            e += weight_into(adj, x, seen);
            seen |= 1 << x;
        }
    }
    let mut size = mask.count_ones();
    let mut best = None;
    for i in 0u64..1 << low {
        if i > 0 {
            let x = i.trailing_zeros() as usize;
            let bit = 1u64 << x;
            if mask & bit == 0 {
                e += weight_into(adj, x, mask);
                mask |= bit;
                size += 1;
            } else {
                mask &= !bit;
                e -= weight_into(adj, x, mask);
                size -= 1;
            }
        }
        if size > shift {
            best = merge(best, Some(Best { e, size, mask }), shift);
        }
    }
    best
}

pub(super) fn max_density(v: usize, pairs: &[(usize, usize, u64)], shift: usize) -> DensityResult {
    let mut adj = vec![Vec::new(); v];
    for &(a, b, w) in pairs {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let low = v.min(14);
    let shift32 = shift as u32;
    let best = (0..1u64 << (v - low))
        .into_par_iter()
        .map(|h| scan_chunk(h, low, &adj, shift32))
        .reduce(|| None, |a, b| merge(a, b, shift32))
        .expect("at least one subset is large enough");
    DensityResult {
        value: ratio(best.e, (best.size - shift32) as u64),
        witness: (0..v).filter(|&x| (best.mask >> x) & 1 == 1).collect(),
    }
}
