//! Independent re-check of a trace: every structure is tested against the
//! round it claims to come from, regenerated from the seed.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Exposure, RoundTag, Stage, TaggedLinkage, Trace};
use crate::absorber::build_absorber;
use crate::bitset::VertexSet;
use crate::error::Result;
use crate::factor::audit_factor;
use crate::graph::SimpleGraph;
use crate::power::{Linkage, PathPower};
use crate::randgen::union_of;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceReport {
    pub checks: Vec<AuditCheck>,
}

impl ProvenanceReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    fn push(&mut self, name: &str, result: std::result::Result<(), String>) {
        let (passed, detail) = match result {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e),
        };
        self.checks.push(AuditCheck {
            name: name.into(),
            passed,
            detail,
        });
    }
}

struct Rounds {
    exposure: Exposure,
    cache: BTreeMap<RoundTag, SimpleGraph>,
    sampled: BTreeSet<RoundTag>,
}

impl Rounds {
    fn get(&mut self, tag: RoundTag) -> std::result::Result<&SimpleGraph, String> {
        if !self.sampled.contains(&tag) {
            return Err(format!("round {tag:?} is used but was never exposed"));
        }
        if !self.cache.contains_key(&tag) {
            let g = self.exposure.round(tag).map_err(|e| e.to_string())?;
            self.cache.insert(tag, g);
        }
        Ok(&self.cache[&tag])
    }
}

fn set(n: usize, v: &[usize]) -> VertexSet {
    VertexSet::from_iter_with(n, v.iter().copied())
}

fn same(name: &str, got: &[usize], want: &VertexSet) -> std::result::Result<(), String> {
    if got == want.to_vec().as_slice() {
        Ok(())
    } else {
        Err(format!("{name} differs from its definition"))
    }
}

fn check_links(
    rounds: &mut Rounds,
    links: &[TaggedLinkage],
    ends: &[(Vec<usize>, Vec<usize>)],
    k: usize,
    allowed_round: impl Fn(usize) -> bool,
    pool: &VertexSet,
) -> std::result::Result<(), String> {
    if links.len() != ends.len() {
        return Err(format!("{} linkages for {} pairs", links.len(), ends.len()));
    }
    let mut used = BTreeSet::new();
    for (i, (t, (a, b))) in links.iter().zip(ends).enumerate() {
        if !allowed_round(t.tag.round) || t.tag.sub.is_none() {
            return Err(format!("linkage {i} is tagged with round {:?}", t.tag));
        }
        let l = Linkage::new(t.order.clone(), k).map_err(|e| e.to_string())?;
        if l.start() != a.as_slice() || l.end() != b.as_slice() {
            return Err(format!("linkage {i} has the wrong endsequences"));
        }
        if !l.verify_in(rounds.get(t.tag)?) {
            return Err(format!("linkage {i} is not present in round {:?}", t.tag));
        }
        for &x in l.interior() {
            if !pool.contains(x) || !used.insert(x) {
                return Err(format!("linkage {i} uses vertex {x} outside its pool or twice"));
            }
        }
    }
    Ok(())
}

/// Regenerate the exposure and check every recorded structure and set.
pub fn audit_provenance(trace: &Trace) -> Result<ProvenanceReport> {
    let (n, cfg) = (trace.n, &trace.config);
    let k = cfg.k;
    let exposure = Exposure::new(n, trace.p, cfg)?;
    let mut rep = ProvenanceReport::default();
    let mut rounds = Rounds {
        exposure,
        cache: BTreeMap::new(),
        sampled: trace.sampled.iter().copied().collect(),
    };
    let mains = cfg.main_rounds();
    rep.push(
        "rounds-valid",
        trace
            .sampled
            .iter()
            .find(|t| t.round == 0 || t.round > mains || t.sub.is_some_and(|s| s >= cfg.link_subrounds))
            .map_or(Ok(()), |t| Err(format!("round {t:?} does not exist"))),
    );
    if trace.absorbers.is_empty() && !trace.reached(Stage::Absorbers) {
        return Ok(rep);
    }

    let template = build_absorber(cfg.absorber_params()?)?;
    let absorbers = &trace.absorbers;
    rep.push("absorbers-round-1", {
        let mut seen = VertexSet::new(n);
        let r: std::result::Result<(), String> = (|| {
            let g1 = rounds.get(RoundTag::main(1))?;
            for (i, a) in absorbers.iter().enumerate() {
                let map = a.mapping();
                if map.len() != template.params.vertex_count() || map.iter().any(|&x| x >= n) {
                    return Err(format!("absorber {i} has a malformed mapping"));
                }
                for &x in &map {
                    if !seen.insert(x) {
                        return Err(format!("absorbers overlap at vertex {x}"));
                    }
                }
                if template.graph.edges().any(|(u, v)| !g1.has_edge(map[u], map[v])) {
                    return Err(format!("absorber {i} is not present in round 1"));
                }
                let aug: Vec<usize> = template.augmented_order.iter().map(|&x| map[x]).collect();
                if aug != a.augmented {
                    return Err(format!("absorber {i} has a wrong augmented path"));
                }
            }
            Ok(())
        })();
        r
    });
    let mut covered = VertexSet::new(n);
    let a_set = set(n, &absorbers.iter().map(|a| a.v).collect::<Vec<_>>());
    for a in absorbers {
        for &x in a.spine.iter().chain([&a.v]) {
            covered.insert(x);
        }
    }
    let mut s_set = VertexSet::full(n);
    s_set.difference_with(&covered);
    rep.push("set-a", same("A", &trace.sets.a, &a_set));
    rep.push("set-s", same("S", &trace.sets.s, &s_set));
    if !trace.reached(Stage::Absorbers) {
        return Ok(rep);
    }

    let len = template.params.spine_len();
    let spine_ends: Vec<(Vec<usize>, Vec<usize>)> = absorbers
        .windows(2)
        .map(|w| (w[0].spine[len - k..].to_vec(), w[1].spine[..k].to_vec()))
        .collect();
    let mut s_star = s_set.clone();
    for (x, y) in &spine_ends {
        for &v in x.iter().chain(y) {
            s_star.insert(v);
        }
    }
    if !trace.sets.s_star.is_empty() || trace.reached(Stage::SpineLinking) {
        rep.push("set-s-star", same("S*", &trace.sets.s_star, &s_star));
    }
    if !trace.reached(Stage::SpineLinking) {
        return Ok(rep);
    }
    rep.push(
        "spine-links-round-2",
        check_links(&mut rounds, &trace.spine_links, &spine_ends, k, |r| r == 2, &s_set),
    );
    let mut q_a = absorbers[0].spine.clone();
    for (l, a) in trace.spine_links.iter().zip(&absorbers[1..]) {
        q_a.extend_from_slice(&l.order[k.min(l.order.len())..l.order.len().saturating_sub(k)]);
        q_a.extend_from_slice(&a.spine);
    }
    rep.push(
        "q-a",
        if q_a == trace.q_a {
            Ok(())
        } else {
            Err("Q_A is not the spines joined by their linkages".into())
        },
    );
    let mut s_prime = VertexSet::full(n);
    for &x in q_a.iter().chain(&trace.sets.a) {
        s_prime.remove(x);
    }
    rep.push("set-s-prime", same("S'", &trace.sets.s_prime, &s_prime));
    if !trace.reached(Stage::Transfer) {
        return Ok(rep);
    }
    let a_prime = set(n, &trace.sets.a_prime);
    rep.push("transfer", {
        let moved: Vec<usize> = trace.sets.a.iter().copied().filter(|&x| !a_prime.contains(x)).collect();
        let mut s_dprime = s_prime.clone();
        for &x in &moved {
            s_dprime.insert(x);
        }
        if trace.sets.a_prime.iter().any(|&x| !a_set.contains(x)) {
            Err("A' is not inside A".into())
        } else if moved.len() != trace.transfer {
            Err(format!("moved {} vertices, trace says {}", moved.len(), trace.transfer))
        } else {
            same("S''", &trace.sets.s_dprime, &s_dprime)
        }
    });
    if !trace.reached(Stage::Factor) {
        return Ok(rep);
    }
    rep.push("factor-round-3", {
        let r: std::result::Result<(), String> = (|| {
            if trace.pieces.is_empty() {
                return if trace.sets.s_dprime.is_empty() {
                    Ok(())
                } else {
                    Err("no pieces for a non-empty S''".into())
                };
            }
            let size = trace.piece_size.ok_or("pieces without a piece size")?;
            let pieces = trace
                .pieces
                .iter()
                .map(|p| PathPower::new(p.clone(), k.min(size)))
                .collect::<crate::error::Result<Vec<_>>>()
                .map_err(|e| e.to_string())?;
            let within = set(n, &trace.sets.s_dprime);
            let g3 = rounds.get(RoundTag::main(3))?;
            if audit_factor(g3, &within, &pieces, size, k) {
                Ok(())
            } else {
                Err("pieces do not form a path-power factor of S'' in round 3".into())
            }
        })();
        r
    });
    let mut blocks = trace.pieces.clone();
    blocks.push(q_a.clone());
    let b = blocks.len();
    let closing_ends: Vec<(Vec<usize>, Vec<usize>)> = (0..b)
        .map(|i| {
            let (x, y) = (&blocks[i], &blocks[(i + 1) % b]);
            (x[x.len() - k..].to_vec(), y[..k].to_vec())
        })
        .collect();
    let mut a_star = a_prime.clone();
    for (x, y) in &closing_ends {
        for &v in x.iter().chain(y) {
            a_star.insert(v);
        }
    }
    if (!trace.sets.a_star.is_empty() || trace.reached(Stage::Closing)) && !blocks.is_empty() {
        rep.push("set-a-star", same("A*", &trace.sets.a_star, &a_star));
    }
    if !trace.reached(Stage::Closing) {
        return Ok(rep);
    }
    rep.push(
        "closing-links-round-4",
        check_links(&mut rounds, &trace.closing_links, &closing_ends, k, |r| r >= 4 && r <= mains, &a_prime),
    );
    let mut a_dprime = a_prime.clone();
    for l in &trace.closing_links {
        for &x in &l.order {
            a_dprime.remove(x);
        }
    }
    rep.push("set-a-double-prime", same("A''", &trace.sets.a_dprime, &a_dprime));
    Ok(rep)
}

/// Union of every round the trace records as exposed.
pub fn exposed_union(trace: &Trace) -> Result<SimpleGraph> {
    let exposure = Exposure::new(trace.n, trace.p, &trace.config)?;
    let graphs = trace
        .sampled
        .iter()
        .map(|&t| exposure.round(t))
        .collect::<Result<Vec<_>>>()?;
    if graphs.is_empty() {
        return Ok(SimpleGraph::new(trace.n));
    }
    union_of(&graphs)
}
