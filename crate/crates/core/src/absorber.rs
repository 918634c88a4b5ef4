//! The (j,ℓ,k)-absorber: a spine power-path `P^k` together with the power
//! `(P')^k` of an augmented path that visits one extra vertex.
//!
//! Spine vertices are numbered `0..s` in path order and the absorption
//! vertex is `s`, where `s = j(2ℓ+4)+ℓ`. Segment `S_i` (1-based) starts at
//! `(i−1)(2ℓ+4)`; its junctions `a_{i,1}, a_{i,2}, b_{i,1}, b_{i,2}` sit at
//! offsets `ℓ, ℓ+1, 2ℓ+2, 2ℓ+3`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{content_lines, parse_usizes, read_graph_lines, SimpleGraph};
use crate::power::{make_path_power, PathPower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbsorberParams {
    pub j: usize,
    pub l: usize,
    pub k: usize,
}

impl AbsorberParams {
    pub fn new(j: usize, l: usize, k: usize) -> Result<Self> {
        let p = AbsorberParams { j, l, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(invalid(format!("absorber needs k >= 2, got {}", self.k)));
        }
        if self.j < 3 {
            return Err(invalid(format!("absorber needs j >= 3, got {}", self.j)));
        }
        if self.l < 2 * self.k {
            return Err(invalid(format!(
                "absorber needs l >= 2k = {}, got {}",
                2 * self.k,
                self.l
            )));
        }
        Ok(())
    }

    /// Spine length `s = j(2ℓ+4)+ℓ`.
    pub fn spine_len(&self) -> usize {
        self.j * (2 * self.l + 4) + self.l
    }

    pub fn vertex_count(&self) -> usize {
        self.spine_len() + 1
    }

    /// `e(P^k) + 2j·C(k+1,2) + k`.
    pub fn expected_edge_count(&self) -> usize {
        path_power_edges(self.spine_len(), self.k) + 2 * self.j * binom2(self.k + 1) + self.k
    }

    /// Spine index of a junction; `segment` is 1-based.
    pub fn junction_position(&self, segment: usize, role: JunctionRole) -> usize {
        let start = (segment - 1) * (2 * self.l + 4);
        start
            + match role {
                JunctionRole::A1 => self.l,
                JunctionRole::A2 => self.l + 1,
                JunctionRole::B1 => 2 * self.l + 2,
                JunctionRole::B2 => 2 * self.l + 3,
            }
    }
}

pub(crate) fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Edge count of `P^k_n`.
pub(crate) fn path_power_edges(n: usize, k: usize) -> usize {
    (1..=k).map(|d| n.saturating_sub(d)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JunctionRole {
    A1,
    A2,
    B1,
    B2,
}

impl JunctionRole {
    pub const ALL: [JunctionRole; 4] = [JunctionRole::A1, JunctionRole::A2, JunctionRole::B1, JunctionRole::B2];

    pub fn as_str(self) -> &'static str {
        match self {
            JunctionRole::A1 => "a1",
            JunctionRole::A2 => "a2",
            JunctionRole::B1 => "b1",
            JunctionRole::B2 => "b2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

/// Which structure an edge of `E(A) ∖ E(P^k)` is associated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Association {
    /// Index into [`Absorber::junction_edges`].
    JunctionEdge(usize),
    Absorption,
}

pub type Edge = (usize, usize);

#[derive(Clone, Debug)]
pub struct Absorber {
    pub params: AbsorberParams,
    pub spine: PathPower,
    pub v: usize,
    pub junctions: BTreeMap<(usize, JunctionRole), usize>,
    /// Edges added to the spine to form the skeleton (the two edges at `v`
    /// and the `2j−1` junction edges).
    pub skeleton_edges: Vec<(usize, usize)>,
    pub augmented_order: Vec<usize>,
    /// Junction edges oriented `(a, b)` with `a` preceding `b` on `P'`.
    pub junction_edges: Vec<(usize, usize)>,
    /// Keyed by `(min, max)`.
    pub association: BTreeMap<(usize, usize), Association>,
    pub graph: SimpleGraph,
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Skeleton edges beyond the spine, in the order they are introduced.
fn skeleton_edges(p: &AbsorberParams, v: usize) -> Vec<(usize, usize)> {
    use JunctionRole::*;
    let at = |i, r| p.junction_position(i, r);
    let j = p.j;
    let mut e = vec![(at(1, A1), v), (v, at(1, B2))];
    for i in 1..=j - 2 {
        e.push((at(i, A2), at(i + 1, B2)));
        e.push((at(i, B1), at(i + 1, A1)));
    }
    e.push((at(j, A2), at(j, B2)));
    e.push((at(j - 1, A2), at(j, A1)));
    e.push((at(j - 1, B1), at(j, B1)));
    e
}

/// Walk the augmented path: spine edges minus `a_{i,1}a_{i,2}` and
/// `b_{i,1}b_{i,2}`, plus the skeleton edges. Fails unless the result is a
/// spanning path from the first to the last spine vertex.
fn walk_augmented(
    p: &AbsorberParams,
    junctions: &BTreeMap<(usize, JunctionRole), usize>,
    skeleton: &[(usize, usize)],
) -> std::result::Result<Vec<usize>, String> {
    use JunctionRole::*;
    let s = p.spine_len();
    let nv = s + 1;
    let mut removed = BTreeSet::new();
    for i in 1..=p.j {
        let get = |r| junctions.get(&(i, r)).copied();
        match (get(A1), get(A2), get(B1), get(B2)) {
            (Some(a1), Some(a2), Some(b1), Some(b2)) => {
                removed.insert(norm(a1, a2));
                removed.insert(norm(b1, b2));
            }
            _ => return Err(format!("segment {i} is missing a junction")),
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for u in 0..s.saturating_sub(1) {
        if !removed.contains(&(u, u + 1)) {
            adj[u].push(u + 1);
            adj[u + 1].push(u);
        }
    }
    for &(a, b) in skeleton {
        if a >= nv || b >= nv || a == b {
            return Err(format!("skeleton edge ({a},{b}) out of range"));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    for (u, nb) in adj.iter().enumerate() {
        let want = if u == 0 || u == s - 1 { 1 } else { 2 };
        if nb.len() != want {
            return Err(format!("vertex {u} has degree {} in P', expected {want}", nb.len()));
        }
    }
    let mut order = Vec::with_capacity(nv);
    let (mut prev, mut cur) = (usize::MAX, 0usize);
    loop {
        order.push(cur);
        if order.len() > nv {
            return Err("walk does not terminate".into());
        }
        match adj[cur].iter().copied().find(|&x| x != prev) {
            Some(next) if cur != s - 1 || order.len() == 1 => {
                prev = cur;
                cur = next;
            }
            _ => break,
        }
    }
    if order.len() != nv || *order.last().unwrap() != s - 1 {
        return Err(format!(
            "P' is not a spanning path (walk covers {} of {nv} vertices)",
            order.len()
        ));
    }
    Ok(order)
}

fn power_of_order(nv: usize, order: &[usize], k: usize, g: &mut SimpleGraph) -> Result<()> {
    debug_assert!(order.iter().all(|&x| x < nv));
    for j in 1..order.len() {
        for i in j.saturating_sub(k)..j {
            g.add_edge(order[i], order[j])?;
        }
    }
    Ok(())
}

/// Positions of each vertex in an order (`usize::MAX` when absent).
fn positions(nv: usize, order: &[usize]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; nv];
    for (i, &x) in order.iter().enumerate() {
        if x < nv {
            pos[x] = i;
        }
    }
    pos
}

fn dist(a: usize, b: usize) -> usize {
    if a == usize::MAX || b == usize::MAX {
        usize::MAX
    } else {
        a.abs_diff(b)
    }
}

/// Derived anatomy: oriented junction edges, Acc sets and the constructive
/// association map.
struct Anatomy {
    junction_edges: Vec<(usize, usize)>,
    association: BTreeMap<(usize, usize), Association>,
}

fn access_from_orders(k: usize, v: usize, junction: usize, aug_pos: &[usize], s: usize) -> Vec<usize> {
    let lo = junction.saturating_sub(k - 1);
    let hi = (junction + k - 1).min(s - 1);
    (lo..=hi)
        .filter(|&w| w != v && dist(aug_pos[w], aug_pos[junction]) < k)
        .collect()
}

fn derive_anatomy(
    p: &AbsorberParams,
    v: usize,
    junctions: &BTreeMap<(usize, JunctionRole), usize>,
    skeleton: &[(usize, usize)],
    augmented: &[usize],
) -> Anatomy {
    let s = p.spine_len();
    let k = p.k;
    let aug_pos = positions(s + 1, augmented);
    let mut acc = HashMap::new();
    for &x in junctions.values() {
        if x < s {
            acc.insert(x, access_from_orders(k, v, x, &aug_pos, s));
        }
    }
    let junction_edges: Vec<(usize, usize)> = skeleton
        .iter()
        .filter(|&&(a, b)| a != v && b != v)
        .map(|&(a, b)| if aug_pos[a] <= aug_pos[b] { (a, b) } else { (b, a) })
        .collect();

    let mut association = BTreeMap::new();
    let empty = Vec::new();
    // For a junction edge ab, x ∈ Acc(a) at distance dx from a and y ∈ Acc(b)
    // at distance dy from b are joined in (P')^k iff dx + 1 + dy ≤ k.
    for (idx, &(a, b)) in junction_edges.iter().enumerate() {
        for &x in acc.get(&a).unwrap_or(&empty) {
            for &y in acc.get(&b).unwrap_or(&empty) {
                let dx = dist(aug_pos[x], aug_pos[a]);
                let dy = dist(aug_pos[y], aug_pos[b]);
                if dx.saturating_add(dy) < k {
                    association.insert(norm(x, y), Association::JunctionEdge(idx));
                }
            }
        }
    }
    // Edges through v: sides Acc(a_{1,1}) ∪ {v} and Acc(b_{1,2}) ∪ {v}, with
    // v at distance 0 and the junction at distance 1 from v.
    let a11 = junctions.get(&(1, JunctionRole::A1)).copied();
    let b12 = junctions.get(&(1, JunctionRole::B2)).copied();
    if let (Some(a11), Some(b12)) = (a11, b12) {
        let side = |j: usize| -> Vec<(usize, usize)> {
            let mut out = vec![(v, 0)];
            for &x in acc.get(&j).unwrap_or(&empty) {
                out.push((x, dist(aug_pos[x], aug_pos[j]).saturating_add(1)));
            }
            out
        };
        for (x, dx) in side(a11) {
            for &(y, dy) in &side(b12) {
                if x != y && dx.saturating_add(dy) <= k {
                    association.insert(norm(x, y), Association::Absorption);
                }
            }
        }
    }
    Anatomy {
        junction_edges,
        association,
    }
}

/// Construct `A_{j,ℓ,k}` with canonical vertex ids.
pub fn build_absorber(params: AbsorberParams) -> Result<Absorber> {
    params.validate()?;
    let s = params.spine_len();
    let v = s;
    let mut junctions = BTreeMap::new();
    for i in 1..=params.j {
        for r in JunctionRole::ALL {
            junctions.insert((i, r), params.junction_position(i, r));
        }
    }
    let skeleton = skeleton_edges(&params, v);
    let augmented = walk_augmented(&params, &junctions, &skeleton).map_err(invalid)?;
    let mut graph = make_path_power(s, params.k)?;
    let mut big = SimpleGraph::new(s + 1);
    for (a, b) in graph.edges() {
        big.add_edge(a, b)?;
    }
    power_of_order(s + 1, &augmented, params.k, &mut big)?;
    graph = big;
    let anatomy = derive_anatomy(&params, v, &junctions, &skeleton, &augmented);
    Ok(Absorber {
        params,
        spine: PathPower::new((0..s).collect(), params.k)?,
        v,
        junctions,
        skeleton_edges: skeleton,
        augmented_order: augmented,
        junction_edges: anatomy.junction_edges,
        association: anatomy.association,
        graph,
    })
}

impl Absorber {
    /// The order of `P'` as a power-path.
    pub fn augmented_path(&self) -> Result<PathPower> {
        PathPower::new(self.augmented_order.clone(), self.params.k)
    }

    pub fn junction(&self, segment: usize, role: JunctionRole) -> Option<usize> {
        self.junctions.get(&(segment, role)).copied()
    }

    pub fn is_junction(&self, x: usize) -> bool {
        self.junctions.values().any(|&y| y == x)
    }

    /// `Acc(junction)`: the junction and the vertices within distance `k−1`
    /// of it on both `P` and `P'`.
    pub fn access_set(&self, junction: usize) -> Result<Vec<usize>> {
        if !self.is_junction(junction) {
            return Err(invalid(format!("vertex {junction} is not a junction")));
        }
        let s = self.params.spine_len();
        let pos = positions(s + 1, &self.augmented_order);
        Ok(access_from_orders(self.params.k, self.v, junction, &pos, s))
    }

    /// Edges associated with each junction edge (by index) and with `v`.
    pub fn association_classes(&self) -> (Vec<Vec<Edge>>, Vec<Edge>) {
        let mut per_edge = vec![Vec::new(); self.junction_edges.len()];
        let mut at_v = Vec::new();
        for (&e, &a) in &self.association {
            match a {
                Association::JunctionEdge(i) if i < per_edge.len() => per_edge[i].push(e),
                Association::JunctionEdge(_) => {}
                Association::Absorption => at_v.push(e),
            }
        }
        (per_edge, at_v)
    }

    /// Serialise as the graph format followed by labelled role lines.
    pub fn to_text(&self) -> String {
        let mut s = self.graph.to_text();
        let p = &self.params;
        let _ = writeln!(s, "absorber {} {} {}", p.j, p.l, p.k);
        let _ = writeln!(s, "spine {}", join_ids(self.spine.order()));
        let _ = writeln!(s, "absorption {}", self.v);
        for (&(i, r), &x) in &self.junctions {
            let _ = writeln!(s, "junction {i} {} {x}", r.as_str());
        }
        for &(a, b) in &self.skeleton_edges {
            let _ = writeln!(s, "skeleton {a} {b}");
        }
        let _ = writeln!(s, "augmented {}", join_ids(&self.augmented_order));
        s
    }

    pub fn from_text(text: &str) -> Result<Absorber> {
        Self::read_from(text.as_bytes())
    }

    /// Parse the serialised form without re-deriving anything from the
    /// parameters, so that the result can be validated independently.
    pub fn read_from(r: impl BufRead) -> Result<Absorber> {
        let mut lines = content_lines(r);
        let (graph, mut last) = read_graph_lines(&mut lines)?;
        let mut params = None;
        let mut spine = None;
        let mut v = None;
        let mut junctions = BTreeMap::new();
        let mut skeleton = Vec::new();
        let mut augmented = None;
        for item in lines {
            let (ln, line) = item?;
            last = ln;
            let (tag, rest) = line.split_once(char::is_whitespace).unwrap_or((line.as_str(), ""));
            let bad = |msg: &str| Error::Parse {
                line: ln,
                msg: msg.to_string(),
            };
            match tag {
                "absorber" => {
                    let x = parse_usizes(ln, rest)?;
                    if x.len() != 3 {
                        return Err(bad("expected `absorber j l k`"));
                    }
                    params = Some(AbsorberParams::new(x[0], x[1], x[2])?);
                }
                "spine" => spine = Some(parse_usizes(ln, rest)?),
                "absorption" => {
                    let x = parse_usizes(ln, rest)?;
                    if x.len() != 1 {
                        return Err(bad("expected `absorption v`"));
                    }
                    v = Some(x[0]);
                }
                "junction" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(bad("expected `junction i role vertex`"));
                    }
                    let i = parts[0].parse().map_err(|_| bad("bad segment index"))?;
                    let r = JunctionRole::parse(parts[1]).ok_or_else(|| bad("bad junction role"))?;
                    let x = parts[2].parse().map_err(|_| bad("bad vertex id"))?;
                    junctions.insert((i, r), x);
                }
                "skeleton" => {
                    let x = parse_usizes(ln, rest)?;
                    if x.len() != 2 {
                        return Err(bad("expected `skeleton u v`"));
                    }
                    skeleton.push((x[0], x[1]));
                }
                "augmented" => augmented = Some(parse_usizes(ln, rest)?),
                other => return Err(bad(&format!("unknown role line `{other}`"))),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: last,
            msg: format!("missing `{what}` line"),
        };
        let params = params.ok_or_else(|| missing("absorber"))?;
        let spine = spine.ok_or_else(|| missing("spine"))?;
        let v = v.ok_or_else(|| missing("absorption"))?;
        let augmented = augmented.ok_or_else(|| missing("augmented"))?;
        let anatomy = derive_anatomy(&params, v, &junctions, &skeleton, &augmented);
        Ok(Absorber {
            params,
            spine: PathPower::new(spine, params.k)?,
            v,
            junctions,
            skeleton_edges: skeleton,
            augmented_order: augmented,
            junction_edges: anatomy.junction_edges,
            association: anatomy.association,
            graph,
        })
    }
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// One named structural check.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbsorberReport {
    pub checks: Vec<Check>,
}

impl AbsorberReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn passed(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.passed)
    }
}

struct Recorder(Vec<Check>);

impl Recorder {
    fn check(&mut self, name: &'static str, result: std::result::Result<(), String>) {
        let (passed, detail) = match result {
            Ok(()) => (true, String::new()),
            Err(d) => (false, d),
        };
        self.0.push(Check { name, passed, detail });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Check every structural property of an absorber, independently of how it
/// was built.
pub fn verify_absorber(a: &Absorber) -> AbsorberReport {
    use JunctionRole::*;
    let mut rec = Recorder(Vec::new());
    let p = a.params;
    rec.check("params", p.validate().map_err(|e| e.to_string()));
    if p.validate().is_err() {
        return AbsorberReport { checks: rec.0 };
    }
    let (s, k, l, v) = (p.spine_len(), p.k, p.l, a.v);
    let nv = s + 1;

    rec.check(
        "vertex-count",
        ensure(
            a.graph.n() == nv && a.spine.order() == (0..s).collect::<Vec<_>>().as_slice() && v == s,
            || format!("graph has {} vertices, spine {} entries, v = {v}; expected s = {s}", a.graph.n(), a.spine.len()),
        ),
    );

    let mut bad_junctions = Vec::new();
    for i in 1..=p.j {
        for r in JunctionRole::ALL {
            if a.junction(i, r) != Some(p.junction_position(i, r)) {
                bad_junctions.push(format!("{}({i})", r.as_str()));
            }
        }
    }
    rec.check(
        "junction-positions",
        ensure(bad_junctions.is_empty() && a.junctions.len() == 4 * p.j, || {
            format!("misplaced junctions: {}", bad_junctions.join(", "))
        }),
    );

    let walked = walk_augmented(&p, &a.junctions, &a.skeleton_edges);
    rec.check(
        "augmented-path",
        match &walked {
            Err(e) => Err(e.clone()),
            Ok(order) => ensure(order == &a.augmented_order, || "stored augmented order differs from the skeleton walk".into()),
        },
    );

    let aug = &a.augmented_order;
    rec.check(
        "endsequences",
        ensure(
            aug.len() == nv && aug[..k] == a.spine.order()[..k] && aug[nv - k..] == a.spine.order()[s - k..],
            || "augmented path endsequences differ from the spine's".into(),
        ),
    );

    let aug_pos = positions(nv, aug);
    let acc_of = |x: usize| access_from_orders(k, v, x, &aug_pos, s);

    // Q_x must be a run of consecutive spine vertices and Acc(x) the vertices
    // of Q_x within distance k−1 of x.
    let side_ok = |x: usize, forward: bool| -> std::result::Result<(), String> {
        let px = aug_pos[x];
        if px == usize::MAX {
            return Err(format!("junction {x} missing from P'"));
        }
        let q: Vec<usize> = if forward {
            if px + l >= aug.len() {
                return Err(format!("Q_{x} runs past the end of P'"));
            }
            aug[px..=px + l].to_vec()
        } else {
            if px < l {
                return Err(format!("Q_{x} runs past the start of P'"));
            }
            aug[px - l..=px].iter().rev().copied().collect()
        };
        if q.contains(&v) {
            return Err(format!("Q_{x} contains the absorption vertex"));
        }
        let step = q[1] as isize - q[0] as isize;
        if step.abs() != 1 || q.windows(2).any(|w| w[1] as isize - w[0] as isize != step) {
            return Err(format!("Q_{x} is not a subpath of the spine"));
        }
        let mut want: Vec<usize> = q[..k].to_vec();
        want.sort_unstable();
        let got = acc_of(x);
        ensure(got == want, || format!("Acc({x}) = {got:?}, expected {want:?}"))
    };

    let a11 = a.junction(1, A1).unwrap_or(usize::MAX);
    let b12 = a.junction(1, B2).unwrap_or(usize::MAX);
    let mut a1_errors = Vec::new();
    for &(x, y) in &a.junction_edges {
        if let Err(e) = side_ok(x, false).and_then(|_| side_ok(y, true)) {
            a1_errors.push(e);
        }
    }
    rec.check(
        "A1",
        ensure(a1_errors.is_empty() && a.junction_edges.len() == 2 * p.j - 1, || {
            format!("{} junction edges; {}", a.junction_edges.len(), a1_errors.join("; "))
        }),
    );

    let a2 = (|| {
        let pv = aug_pos.get(v).copied().unwrap_or(usize::MAX);
        ensure(
            pv != usize::MAX && pv >= 1 && pv + 1 < aug.len() && aug[pv - 1] == a11 && aug[pv + 1] == b12,
            || "a_{1,1} v b_{1,2} is not a subpath of P'".into(),
        )?;
        side_ok(a11, false)?;
        side_ok(b12, true)
    })();
    rec.check("A2", a2);

    let mut acc_errors = Vec::new();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for &x in a.junctions.values() {
        let acc = acc_of(x);
        if acc.len() != k || !acc.contains(&x) {
            acc_errors.push(format!("|Acc({x})| = {}", acc.len()));
        }
        for w in acc {
            if let Some(o) = owner.insert(w, x) {
                acc_errors.push(format!("Acc({o}) and Acc({x}) share {w}"));
            }
        }
    }
    rec.check(
        "access-sets",
        ensure(acc_errors.is_empty(), || acc_errors.join("; ")),
    );

    rec.check("A3-cycle", check_a3(a));

    // Association partition: the stored classes must cover E(A) ∖ E(P^k)
    // exactly, and each such edge must meet exactly one defining condition.
    let spine_only = |x: usize, y: usize| x < s && y < s && x.abs_diff(y) <= k;
    let outside: BTreeSet<(usize, usize)> = a.graph.edges().filter(|&(x, y)| !spine_only(x, y)).collect();
    let keys: BTreeSet<(usize, usize)> = a.association.keys().copied().collect();
    let acc_sets: HashMap<usize, Vec<usize>> = a.junctions.values().map(|&x| (x, acc_of(x))).collect();
    let empty = Vec::new();
    let in_acc = |set: usize, w: usize| acc_sets.get(&set).unwrap_or(&empty).contains(&w);
    let partition = (|| {
        ensure(outside == keys, || {
            let extra: Vec<_> = keys.difference(&outside).take(5).collect();
            let miss: Vec<_> = outside.difference(&keys).take(5).collect();
            format!("association keys differ from E(A)∖E(P^k): extra {extra:?}, missing {miss:?}")
        })?;
        for &(x, y) in &outside {
            let mut hits = 0;
            for &(ja, jb) in &a.junction_edges {
                if (in_acc(ja, x) && in_acc(jb, y)) || (in_acc(ja, y) && in_acc(jb, x)) {
                    hits += 1;
                }
            }
            let side_a = |w: usize| w == v || in_acc(a11, w);
            let side_b = |w: usize| w == v || in_acc(b12, w);
            if (side_a(x) && side_b(y)) || (side_a(y) && side_b(x)) {
                hits += 1;
            }
            if hits != 1 {
                return Err(format!("edge ({x},{y}) satisfies {hits} association conditions"));
            }
        }
        Ok(())
    })();
    rec.check("association-partition", partition);

    let (per_edge, at_v) = a.association_classes();
    let per = binom2(k + 1);
    rec.check(
        "association-sizes",
        ensure(
            per_edge.len() == 2 * p.j - 1 && per_edge.iter().all(|c| c.len() == per) && at_v.len() == per + k,
            || {
                let sizes: Vec<usize> = per_edge.iter().map(Vec::len).collect();
                format!("junction classes {sizes:?} (want {per} each), v class {} (want {})", at_v.len(), per + k)
            },
        ),
    );

    rec.check(
        "edge-count",
        ensure(a.graph.edge_count() == p.expected_edge_count(), || {
            format!("{} edges, expected {}", a.graph.edge_count(), p.expected_edge_count())
        }),
    );

    let edge_set = (|| {
        let mut want = SimpleGraph::new(nv);
        power_of_order(nv, a.spine.order(), k, &mut want).map_err(|e| e.to_string())?;
        if aug.iter().any(|&x| x >= nv) {
            return Err("augmented order out of range".into());
        }
        power_of_order(nv, aug, k, &mut want).map_err(|e| e.to_string())?;
        ensure(want == a.graph, || "graph differs from P^k ∪ (P')^k".into())
    })();
    rec.check("edge-set", edge_set);

    AbsorberReport { checks: rec.0 }
}

/// The junction edges, the path `a_{1,1} v b_{1,2}` and the edges
/// `a_{i,1}a_{i,2}`, `b_{i,1}b_{i,2}` must form one cycle; contracting the
/// junction pairs must leave a cycle on `2j+1` vertices.
fn check_a3(a: &Absorber) -> std::result::Result<(), String> {
    use JunctionRole::*;
    let p = a.params;
    let v = a.v;
    let mut edges: Vec<(usize, usize)> = a.skeleton_edges.clone();
    let mut pairs = Vec::new();
    for i in 1..=p.j {
        let get = |r| a.junction(i, r).ok_or_else(|| format!("segment {i} lacks {}", r.as_str()));
        let (a1, a2, b1, b2) = (get(A1)?, get(A2)?, get(B1)?, get(B2)?);
        edges.push((a1, a2));
        edges.push((b1, b2));
        pairs.push((a1, a2));
        pairs.push((b1, b2));
    }
    let mut verts: BTreeSet<usize> = a.junctions.values().copied().collect();
    verts.insert(v);
    if !is_single_cycle(&verts, &edges) {
        return Err(format!("auxiliary graph on {} vertices with {} edges is not a single cycle", verts.len(), edges.len()));
    }
    // Contract each junction pair into its first element.
    let rep: HashMap<usize, usize> = pairs.iter().flat_map(|&(x, y)| [(x, x), (y, x)]).collect();
    let cverts: BTreeSet<usize> = verts.iter().map(|x| *rep.get(x).unwrap_or(x)).collect();
    let cedges: Vec<(usize, usize)> = a
        .skeleton_edges
        .iter()
        .map(|&(x, y)| (*rep.get(&x).unwrap_or(&x), *rep.get(&y).unwrap_or(&y)))
        .collect();
    if cverts.len() != 2 * p.j + 1 || !is_single_cycle(&cverts, &cedges) {
        return Err(format!("contracted graph has {} vertices or is not a cycle", cverts.len()));
    }
    Ok(())
}

fn is_single_cycle(verts: &BTreeSet<usize>, edges: &[(usize, usize)]) -> bool {
    if edges.len() != verts.len() || verts.len() < 3 {
        return false;
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(x, y) in edges {
        if x == y || !verts.contains(&x) || !verts.contains(&y) {
            return false;
        }
        adj.entry(x).or_default().push(y);
        adj.entry(y).or_default().push(x);
    }
    if verts.iter().any(|x| adj.get(x).map_or(0, Vec::len) != 2) {
        return false;
    }
    let start = *verts.iter().next().unwrap();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[&x] {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len() == verts.len()
}
