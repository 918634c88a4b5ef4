//! Dinkelbach iteration over Goldberg's min-cut construction.
//!
//! Given a current ratio `g = a/b` attained by some set, the network
//! `s → x` (capacity `M`), `x → t` (capacity `M + 2a − b·d(x)`) and
//! `x ↔ y` (capacity `b·w(x,y)`) has minimum cut `M·v − 2·max_S (b·e(S) − a|S|)`
//! over source sides `S`. Forcing a seed set into `S` with infinite source
//! capacity and testing `b·e(S) − a(|S| − shift) > 0` decides whether some
//! set containing the seed beats `g`. For `d₁` single seeds suffice because a
//! singleton scores exactly zero; for `d₂` seeds are triples.

use rayon::prelude::*;

use super::flow::{FlowNetwork, INF};
use super::{ratio, DensityResult};

struct Instance {
    v: usize,
    pairs: Vec<(usize, usize, u64)>,
    degree: Vec<u64>,
}

impl Instance {
    fn weight(&self, set: &[bool]) -> u64 {
        self.pairs
            .iter()
            .filter(|&&(x, y, _)| set[x] && set[y])
            .map(|p| p.2)
            .sum()
    }

    /// `max_{S ⊇ seed} (b·e(S) − a|S|)` and a maximising `S`.
    fn best_containing(&self, seed: &[usize], a: i64, b: i64) -> (i64, Vec<bool>) {
        let v = self.v;
        let (s, t) = (v, v + 1);
        let maxdeg = self.degree.iter().copied().max().unwrap_or(0) as i64;
        let m = b * maxdeg;
        let mut net = FlowNetwork::new(v + 2);
        for x in 0..v {
            let src = if seed.contains(&x) { INF } else { m };
            net.add(s, x, src, 0);
            net.add(x, t, m + 2 * a - b * self.degree[x] as i64, 0);
        }
        for &(x, y, w) in &self.pairs {
            let c = b * w as i64;
            net.add(x, y, c, c);
        }
        let cut = net.max_flow(s, t);
        let side = net.source_side(s);
        let value = (m * v as i64 - cut) / 2;
        (value, side[..v].to_vec())
    }
}

fn seeds(v: usize, shift: usize) -> Vec<Vec<usize>> {
    if shift == 1 {
        (0..v).map(|x| vec![x]).collect()
    } else {
        let mut out = Vec::new();
        for x in 0..v {
            for y in x + 1..v {
                for z in y + 1..v {
                    out.push(vec![x, y, z]);
                }
            }
        }
        out
    }
}

pub(super) fn max_density(v: usize, pairs: &[(usize, usize, u64)], shift: usize) -> DensityResult {
    let mut degree = vec![0u64; v];
    for &(x, y, w) in pairs {
        degree[x] += w;
        degree[y] += w;
    }
    let inst = Instance {
        v,
        pairs: pairs.to_vec(),
        degree,
    };
    let seeds = seeds(v, shift);
    let mut best = vec![true; v];
    let mut a = inst.weight(&best) as i64;
    let mut b = (v - shift) as i64;
    loop {
        let lift = a * shift as i64;
        let candidate = seeds
            .par_iter()
            .map(|seed| inst.best_containing(seed, a, b))
            .filter(|(val, _)| val + lift > 0)
            .max_by(|x, y| {
                let key = |s: &(i64, Vec<bool>)| (ratio_key(&inst, &s.1, shift), s.1.iter().filter(|&&q| q).count());
                let (kx, ky) = (key(x), key(y));
                cmp_ratio(kx.0, ky.0).then(kx.1.cmp(&ky.1)).then_with(|| y.1.cmp(&x.1))
            });
        match candidate {
            None => break,
            Some((_, set)) => {
                let size = set.iter().filter(|&&q| q).count();
                let (na, nb) = (inst.weight(&set) as i64, (size - shift) as i64);
                debug_assert!(na as i128 * b as i128 > a as i128 * nb as i128);
                best = set;
                a = na;
                b = nb;
            }
        }
    }
    DensityResult {
        value: ratio(a as u64, b as u64),
        witness: (0..v).filter(|&x| best[x]).collect(),
    }
}

fn ratio_key(inst: &Instance, set: &[bool], shift: usize) -> (u64, u64) {
    let size = set.iter().filter(|&&q| q).count();
    (inst.weight(set), (size - shift) as u64)
}

fn cmp_ratio(x: (u64, u64), y: (u64, u64)) -> std::cmp::Ordering {
    (x.0 as u128 * y.1 as u128).cmp(&(y.0 as u128 * x.1 as u128))
}
