//! The full construction: absorbers from round 1, spines linked in round 2,
//! the remainder covered by path powers in round 3, everything closed into
//! one cycle power through absorption vertices in round 4, and leftovers
//! absorbed by spine swaps.

mod audit;
mod oracle;
mod swap;

use serde::{Deserialize, Serialize};

use crate::absorber::{build_absorber, Absorber, AbsorberParams};
use crate::bitset::VertexSet;
use crate::error::{invalid, Error, Result};
use crate::factor::{find_disjoint_copies, find_path_power_factor, EmbeddingBudget};
use crate::graph::SimpleGraph;
use crate::linker::{link_all, LazyRounds, RoundPolicy, SequencePairFamily};
use crate::power::{HamiltonPowerCertificate, VertexSeq};
use crate::randgen::{split_rounds, union_of, ExposurePlan};
use crate::seed::derive;

pub use audit::{audit_provenance, exposed_union, AuditCheck, ProvenanceReport};
pub use oracle::{
    count_copies, expected_copy_count, log_expected_copy_count, oracle_certificate, oracle_contains, verify_certificate, COUNT_LIMIT,
    ORACLE_LIMIT,
};
pub use swap::{absorb_leftovers, PlacedAbsorber};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

const STAGE_TAG: u64 = 0x73_7461_6765;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageBudgets {
    /// Search nodes per absorber embedding attempt.
    pub absorber_nodes: u64,
    pub absorber_restarts: u32,
    /// Search nodes per linkage attempt, in both linking stages.
    pub link_nodes: u64,
    /// Search nodes per path-power piece.
    pub factor_nodes: u64,
    pub factor_repairs: u32,
}

impl Default for StageBudgets {
    fn default() -> Self {
        StageBudgets {
            absorber_nodes: 200_000,
            absorber_restarts: 4,
            link_nodes: 50_000,
            factor_nodes: 20_000,
            factor_repairs: 8,
        }
    }
}

/// Solver parameters with desk-scale defaults.
///
/// The asymptotic proof works with `ε* ≤ 1/(10⁴k)`, absorbers with
/// `ℓ = max(ℓ₀, ⌈1/ε*²⌉)`, pieces of `s²` vertices and linkages of up to
/// `⌈90k/ε*⌉` vertices (see [`proof_constants`]). None of these fit in
/// memory, so the defaults are far smaller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema_version: u32,
    pub k: usize,
    pub j: usize,
    /// Absorber segment parameter; `2k` when absent.
    pub l: Option<usize>,
    /// Fraction of vertices to cover by absorbers.
    pub absorber_fraction: f64,
    /// Piece size of the path-power factor; derived from the absorber
    /// supply when absent.
    pub r: Option<usize>,
    /// Interior size of every linkage; `2k + 4` when absent.
    pub s_link: Option<usize>,
    /// Sub-rounds each linking round is split into.
    pub link_subrounds: usize,
    /// Extra exposure rounds reserved for retrying the closing stage.
    pub retry_rounds: usize,
    /// Absorbers required beyond the closing pairs.
    pub safety_margin: usize,
    /// Below this many open pairs, a sub-round links one pair only;
    /// `⌈ln² n⌉` when absent.
    pub singleton_threshold: Option<usize>,
    pub budgets: StageBudgets,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            schema_version: CONFIG_SCHEMA_VERSION,
            k: 2,
            j: 3,
            l: None,
            absorber_fraction: 1.0 / 3.0,
            r: None,
            s_link: None,
            link_subrounds: 2,
            retry_rounds: 1,
            safety_margin: 1,
            singleton_threshold: Some(1),
            budgets: StageBudgets::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn absorber_params(&self) -> Result<AbsorberParams> {
        AbsorberParams::new(self.j, self.l.unwrap_or(2 * self.k), self.k)
    }

    pub fn link_interior(&self) -> usize {
        self.s_link.unwrap_or(2 * self.k + 4)
    }

    /// Full linkage length, endsequences included.
    pub fn link_len(&self) -> usize {
        self.link_interior() + 2 * self.k
    }

    /// Main exposure rounds: four stages plus the closing retries.
    pub fn main_rounds(&self) -> usize {
        4 + self.retry_rounds
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::VersionMismatch {
                found: self.schema_version,
                expected: CONFIG_SCHEMA_VERSION,
            });
        }
        self.absorber_params()?;
        let f = self.absorber_fraction;
        if !(f > 0.0 && f <= 0.5) {
            return Err(invalid(format!("absorber fraction {f} is outside (0, 1/2]")));
        }
        if let Some(r) = self.r {
            if r < 2 * self.k {
                return Err(invalid(format!("piece size {r} is below 2k = {}", 2 * self.k)));
            }
        }
        if self.link_subrounds == 0 {
            return Err(invalid("need at least one linking sub-round"));
        }
        if self.singleton_threshold == Some(0) {
            return Err(invalid("singleton threshold must be positive"));
        }
        let b = &self.budgets;
        if b.absorber_nodes == 0 || b.absorber_restarts == 0 || b.link_nodes == 0 || b.factor_nodes == 0 {
            return Err(invalid("stage budgets must be positive"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Constants of the asymptotic argument for a given `k`, with `ℓ₀`
/// replaced by its lower bound `2k` and `j = 3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProofConstants {
    pub eps_star: f64,
    pub l: u128,
    pub s: u128,
    pub piece_size: u128,
    pub max_link_len: u128,
}

pub fn proof_constants(k: usize) -> ProofConstants {
    let eps_star = 1.0 / (1e4 * k as f64);
    let l = ((1.0 / (eps_star * eps_star)).ceil() as u128).max(2 * k as u128);
    let s = 3 * (2 * l + 4) + l;
    ProofConstants {
        eps_star,
        l,
        s,
        piece_size: s * s,
        max_link_len: (90.0 * k as f64 / eps_star).ceil() as u128,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Absorbers,
    SpineLinking,
    Transfer,
    Factor,
    Closing,
    Absorption,
    Verification,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Absorbers,
        Stage::SpineLinking,
        Stage::Transfer,
        Stage::Factor,
        Stage::Closing,
        Stage::Absorption,
        Stage::Verification,
    ];

    /// 1-based position in the construction.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Absorbers => "absorbers",
            Stage::SpineLinking => "spine-linking",
            Stage::Transfer => "transfer",
            Stage::Factor => "factor",
            Stage::Closing => "closing",
            Stage::Absorption => "absorption",
            Stage::Verification => "verification",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Self::ALL.into_iter().find(|st| st.name() == s)
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An exposure round (1-based) and, for linking rounds, its sub-round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RoundTag {
    pub round: usize,
    pub sub: Option<usize>,
}

impl RoundTag {
    pub fn main(round: usize) -> Self {
        RoundTag { round, sub: None }
    }

    pub fn sub(round: usize, sub: usize) -> Self {
        RoundTag { round, sub: Some(sub) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedLinkage {
    pub order: Vec<usize>,
    pub tag: RoundTag,
}

/// The vertex sets of the construction, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetBook {
    /// Vertices outside all absorbers.
    pub s: Vec<usize>,
    /// `S` plus the endsequences linked in round 2.
    pub s_star: Vec<usize>,
    /// Vertices outside `Q_𝒜` and `A`.
    pub s_prime: Vec<usize>,
    /// `S′` plus the vertices moved over from `A`.
    pub s_dprime: Vec<usize>,
    /// Absorption vertices.
    pub a: Vec<usize>,
    /// `A` minus the vertices moved to `S″`.
    pub a_prime: Vec<usize>,
    /// `A′` plus the endsequences linked in round 4.
    pub a_star: Vec<usize>,
    /// Vertices of `A′` left uncovered by the closed cycle.
    pub a_dprime: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: Stage,
    pub succeeded: bool,
    /// Vertices covered by the structure built so far.
    pub covered: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub n: usize,
    pub p: f64,
    pub config: PipelineConfig,
    pub per_round_p: f64,
    pub sub_round_p: f64,
    pub absorber_target: usize,
    pub absorbers: Vec<PlacedAbsorber>,
    pub spine_links: Vec<TaggedLinkage>,
    pub q_a: Vec<usize>,
    pub piece_size: Option<usize>,
    pub transfer: usize,
    pub pieces: Vec<Vec<usize>>,
    pub closing_links: Vec<TaggedLinkage>,
    pub sets: SetBook,
    /// Every round sampled, in order of first use.
    pub sampled: Vec<RoundTag>,
    pub stages: Vec<StageStats>,
}

impl Trace {
    pub fn reached(&self, stage: Stage) -> bool {
        self.stages.iter().any(|s| s.stage == stage && s.succeeded)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Success { certificate: HamiltonPowerCertificate },
    Failure { stage: Stage, diagnostics: String },
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success { .. })
    }

    pub fn failed_stage(&self) -> Option<Stage> {
        match self {
            Outcome::Failure { stage, .. } => Some(*stage),
            Outcome::Success { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub outcome: Outcome,
    pub trace: Trace,
}

/// The exposure rounds of one run, regenerated on demand from the seed.
#[derive(Clone, Debug)]
pub struct Exposure {
    n: usize,
    seed: u64,
    main: ExposurePlan,
    sub: ExposurePlan,
}

impl Exposure {
    pub fn new(n: usize, p: f64, cfg: &PipelineConfig) -> Result<Self> {
        let main = split_rounds(p, cfg.main_rounds())?;
        let sub = split_rounds(main.per_round_p, cfg.link_subrounds)?;
        Ok(Exposure {
            n,
            seed: cfg.seed,
            main,
            sub,
        })
    }

    pub fn main_plan(&self) -> &ExposurePlan {
        &self.main
    }

    pub fn sub_plan(&self) -> &ExposurePlan {
        &self.sub
    }

    pub fn round(&self, tag: RoundTag) -> Result<SimpleGraph> {
        if tag.round == 0 || tag.round > self.main.rounds {
            return Err(invalid(format!("round {} does not exist", tag.round)));
        }
        match tag.sub {
            None => self.main.sample_round(self.n, self.seed, tag.round - 1),
            Some(j) if j < self.sub.rounds => {
                self.sub.sample_round(self.n, self.main.round_seed(self.seed, tag.round - 1), j)
            }
            Some(j) => Err(invalid(format!("sub-round {j} does not exist"))),
        }
    }

    /// Sub-rounds of a linking round, sampled lazily.
    pub fn lazy(&self, round: usize) -> LazyRounds {
        LazyRounds::new(self.n, self.sub.clone(), self.main.round_seed(self.seed, round - 1))
    }
}

fn sorted(set: &VertexSet) -> Vec<usize> {
    set.to_vec()
}

struct Run<'a> {
    n: usize,
    cfg: &'a PipelineConfig,
    template: Absorber,
    exposure: Exposure,
    trace: Trace,
    /// Graphs of all sampled rounds, for the final check.
    exposed: Vec<SimpleGraph>,
}

enum Step<T> {
    Next(T),
    Stop(Outcome),
}

use Step::{Next, Stop};

impl Run<'_> {
    fn log(&mut self, stage: Stage, succeeded: bool, covered: usize, detail: String) {
        self.trace.stages.push(StageStats {
            stage,
            succeeded,
            covered,
            detail,
        });
    }

    fn fail<T>(&mut self, stage: Stage, covered: usize, detail: String) -> Step<T> {
        self.log(stage, false, covered, detail.clone());
        Stop(Outcome::Failure {
            stage,
            diagnostics: detail,
        })
    }

    fn sample(&mut self, tag: RoundTag) -> Result<SimpleGraph> {
        let g = self.exposure.round(tag)?;
        self.trace.sampled.push(tag);
        self.exposed.push(g.clone());
        Ok(g)
    }

    fn absorb_lazy(&mut self, round: usize, lazy: &LazyRounds) {
        for (i, g) in lazy.sampled_rounds() {
            self.trace.sampled.push(RoundTag::sub(round, i));
            self.exposed.push(g.clone());
        }
    }

    fn policy(&self) -> RoundPolicy {
        let b = &self.cfg.budgets;
        let mut pol = RoundPolicy::for_n(self.n, self.cfg.link_subrounds, b.link_nodes);
        if let Some(t) = self.cfg.singleton_threshold {
            pol.singleton_threshold = t;
        }
        pol
    }

    fn stage_seed(&self, parts: &[u64]) -> u64 {
        let mut v = vec![self.cfg.seed, STAGE_TAG];
        v.extend_from_slice(parts);
        derive(&v)
    }

    fn absorbers(&mut self) -> Result<Step<()>> {
        let n = self.n;
        let g1 = self.sample(RoundTag::main(1))?;
        let b = self.cfg.budgets;
        let budget = EmbeddingBudget::new(b.absorber_nodes, b.absorber_restarts, self.stage_seed(&[1]))?;
        let found = find_disjoint_copies(
            &g1,
            &self.template.graph,
            self.trace.absorber_target,
            &budget,
            &VertexSet::new(n),
        )?;
        let absorbers: Vec<PlacedAbsorber> = found
            .mappings
            .iter()
            .map(|m| PlacedAbsorber::from_mapping(&self.template, m))
            .collect();
        let mut covered = VertexSet::new(n);
        let mut a = VertexSet::new(n);
        for x in &absorbers {
            a.insert(x.v);
            for &y in x.spine.iter().chain([&x.v]) {
                covered.insert(y);
            }
        }
        let mut s = VertexSet::full(n);
        s.difference_with(&covered);
        self.trace.sets.a = sorted(&a);
        self.trace.sets.s = sorted(&s);
        let count = absorbers.len();
        self.trace.absorbers = absorbers;
        let detail = format!("placed {count} of {} absorbers", self.trace.absorber_target);
        if count <= self.cfg.safety_margin {
            return Ok(self.fail(Stage::Absorbers, covered.len(), format!("{detail}; need more than {}", self.cfg.safety_margin)));
        }
        self.log(Stage::Absorbers, true, covered.len(), detail);
        Ok(Next(()))
    }

    fn spine_linking(&mut self) -> Result<Step<()>> {
        let (n, k) = (self.n, self.cfg.k);
        let absorbers = self.trace.absorbers.clone();
        let len = absorbers[0].spine.len();
        let pairs = absorbers
            .windows(2)
            .map(|w| {
                Ok((
                    VertexSeq::new(w[0].spine[len - k..].to_vec(), k)?,
                    VertexSeq::new(w[1].spine[..k].to_vec(), k)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let family = SequencePairFamily::new(pairs)?;
        let pool = VertexSet::from_iter_with(n, self.trace.sets.s.iter().copied());
        let mut s_star = pool.clone();
        for x in family.sequence_vertices() {
            s_star.insert(x);
        }
        self.trace.sets.s_star = sorted(&s_star);
        let mut lazy = self.exposure.lazy(2);
        let res = link_all(
            &mut lazy,
            &family,
            self.cfg.link_len(),
            self.policy(),
            &pool,
            self.stage_seed(&[2]),
        );
        self.absorb_lazy(2, &lazy);
        let out = match res {
            Ok(o) => o,
            Err(f) => {
                let detail = format!(
                    "linked {} of {} spine pairs in {} sub-rounds",
                    f.linked,
                    family.len(),
                    f.round
                );
                return Ok(self.fail(Stage::SpineLinking, 0, detail));
            }
        };
        let mut q_a = absorbers[0].spine.clone();
        for (i, (l, r)) in out.linkages.iter().zip(&out.round_of).enumerate() {
            q_a.extend_from_slice(l.interior());
            q_a.extend_from_slice(&absorbers[i + 1].spine);
            self.trace.spine_links.push(TaggedLinkage {
                order: l.order().to_vec(),
                tag: RoundTag::sub(2, *r),
            });
        }
        let covered = q_a.len() + absorbers.len();
        self.trace.q_a = q_a;
        self.log(
            Stage::SpineLinking,
            true,
            covered,
            format!("linked {} spine pairs using {} sub-rounds", family.len(), out.rounds_used),
        );
        Ok(Next(()))
    }

    /// Piece size, piece count and transfer size for `m` uncovered vertices.
    fn plan_pieces(&self, m: usize) -> std::result::Result<(usize, usize, usize), String> {
        let cfg = self.cfg;
        let a = self.trace.absorbers.len();
        let s_link = cfg.link_interior();
        let r = match cfg.r {
            Some(r) => r,
            None => {
                let most = a.saturating_sub(cfg.safety_margin + s_link) / (s_link + 1);
                if most == 0 {
                    return Err(format!("{a} absorbers cannot pay for linking even one piece"));
                }
                m.div_ceil(most).max(2 * cfg.k)
            }
        };
        let transfer = (r - m % r) % r;
        let pieces = (m + transfer) / r;
        if transfer > a {
            return Err(format!("transfer of {transfer} exceeds the {a} absorption vertices"));
        }
        if a <= pieces + 1 + cfg.safety_margin {
            return Err(format!(
                "{a} absorbers do not exceed {} closing pairs plus margin {}",
                pieces + 1,
                cfg.safety_margin
            ));
        }
        Ok((r, pieces, transfer))
    }

    fn transfer(&mut self) -> Result<Step<SimpleGraph>> {
        let n = self.n;
        let mut s_prime = VertexSet::full(n);
        for &x in self.trace.q_a.iter().chain(&self.trace.sets.a) {
            s_prime.remove(x);
        }
        self.trace.sets.s_prime = sorted(&s_prime);
        let g3 = self.sample(RoundTag::main(3))?;
        let m = s_prime.len();
        let (r, pieces, transfer) = if m == 0 {
            (0, 0, 0)
        } else {
            match self.plan_pieces(m) {
                Ok(t) => t,
                Err(msg) => return Ok(self.fail(Stage::Transfer, 0, msg)),
            }
        };
        let mut ranked: Vec<(usize, usize)> = self
            .trace
            .sets
            .a
            .iter()
            .map(|&x| (g3.degree_in(x, &s_prime), x))
            .collect();
        ranked.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        let mut s_dprime = s_prime.clone();
        let mut a_prime = VertexSet::from_iter_with(n, self.trace.sets.a.iter().copied());
        for &(_, x) in &ranked[..transfer] {
            s_dprime.insert(x);
            a_prime.remove(x);
        }
        self.trace.sets.s_dprime = sorted(&s_dprime);
        self.trace.sets.a_prime = sorted(&a_prime);
        self.trace.piece_size = (m > 0).then_some(r);
        self.trace.transfer = transfer;
        self.log(
            Stage::Transfer,
            true,
            0,
            format!("{m} uncovered vertices, moved {transfer}; {pieces} pieces of {r}"),
        );
        Ok(Next(g3))
    }

    fn factor(&mut self, g3: &SimpleGraph) -> Result<Step<()>> {
        let within = VertexSet::from_iter_with(self.n, self.trace.sets.s_dprime.iter().copied());
        if within.is_empty() {
            self.log(Stage::Factor, true, 0, "nothing to cover".into());
            return Ok(Next(()));
        }
        let r = self.trace.piece_size.expect("piece size set with a non-empty remainder");
        let b = self.cfg.budgets;
        let budget = EmbeddingBudget::new(b.factor_nodes, b.factor_repairs.max(1), self.stage_seed(&[4]))?;
        match find_path_power_factor(g3, &within, r, self.cfg.k, &budget)? {
            Ok(pieces) => {
                self.trace.pieces = pieces.into_iter().map(|p| p.into_order()).collect();
                let detail = format!("{} pieces of {r}", self.trace.pieces.len());
                self.log(Stage::Factor, true, within.len(), detail);
                Ok(Next(()))
            }
            Err(f) => {
                let detail = format!(
                    "covered {} of {} vertices after {} repairs",
                    f.covered,
                    within.len(),
                    f.repairs
                );
                Ok(self.fail(Stage::Factor, f.covered, detail))
            }
        }
    }

    fn closing(&mut self) -> Result<Step<Vec<usize>>> {
        let (n, k) = (self.n, self.cfg.k);
        let mut blocks = self.trace.pieces.clone();
        blocks.push(self.trace.q_a.clone());
        let b = blocks.len();
        let pairs = (0..b)
            .map(|i| {
                let (x, y) = (&blocks[i], &blocks[(i + 1) % b]);
                Ok((VertexSeq::new(x[x.len() - k..].to_vec(), k)?, VertexSeq::new(y[..k].to_vec(), k)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut a_star = VertexSet::from_iter_with(n, self.trace.sets.a_prime.iter().copied());
        for (x, y) in &pairs {
            for &v in x.as_slice().iter().chain(y.as_slice()) {
                a_star.insert(v);
            }
        }
        self.trace.sets.a_star = sorted(&a_star);
        let mut pool = VertexSet::from_iter_with(n, self.trace.sets.a_prime.iter().copied());
        let mut slots: Vec<Option<TaggedLinkage>> = vec![None; b];
        let mut open: Vec<usize> = (0..b).collect();
        let policy = self.policy();
        let mut attempts = 0;
        for attempt in 0..=self.cfg.retry_rounds {
            if open.is_empty() {
                break;
            }
            attempts += 1;
            let round = 4 + attempt;
            let family = SequencePairFamily::new(open.iter().map(|&i| pairs[i].clone()).collect())?;
            let mut lazy = self.exposure.lazy(round);
            let res = link_all(
                &mut lazy,
                &family,
                self.cfg.link_len(),
                policy,
                &pool,
                self.stage_seed(&[5, attempt as u64]),
            );
            self.absorb_lazy(round, &lazy);
            let found: Vec<(usize, crate::power::Linkage, usize)> = match res {
                Ok(o) => o
                    .linkages
                    .into_iter()
                    .zip(o.round_of)
                    .enumerate()
                    .map(|(i, (l, r))| (i, l, r))
                    .collect(),
                Err(f) => f.found,
            };
            let mut done = Vec::new();
            for (i, l, r) in found {
                for &x in l.interior() {
                    pool.remove(x);
                }
                slots[open[i]] = Some(TaggedLinkage {
                    order: l.order().to_vec(),
                    tag: RoundTag::sub(round, r),
                });
                done.push(open[i]);
            }
            open.retain(|i| !done.contains(i));
        }
        let linked = b - open.len();
        self.trace.closing_links = slots.iter().flatten().cloned().collect();
        if !open.is_empty() {
            let detail = format!("linked {linked} of {b} closing pairs in {attempts} rounds");
            return Ok(self.fail(Stage::Closing, 0, detail));
        }
        let mut cycle = Vec::with_capacity(n);
        for (block, link) in blocks.iter().zip(slots.iter().flatten()) {
            cycle.extend_from_slice(block);
            cycle.extend_from_slice(&link.order[k..link.order.len() - k]);
        }
        let mut a_dprime = pool;
        for &x in &cycle {
            a_dprime.remove(x);
        }
        self.trace.sets.a_dprime = sorted(&a_dprime);
        let cov = cycle.len();
        self.log(Stage::Closing, true, cov, format!("closed {b} pairs in {attempts} rounds"));
        Ok(Next(cycle))
    }

    fn absorption(&mut self, cycle: Vec<usize>) -> Step<Vec<usize>> {
        let leftover = self.trace.sets.a_dprime.clone();
        match absorb_leftovers(&cycle, &self.trace.absorbers, &leftover) {
            Ok(c) if c.len() == self.n => {
                self.log(Stage::Absorption, true, c.len(), format!("absorbed {}", leftover.len()));
                Next(c)
            }
            Ok(c) => {
                let detail = format!("cycle covers {} of {} vertices", c.len(), self.n);
                self.fail(Stage::Absorption, c.len(), detail)
            }
            Err(e) => self.fail(Stage::Absorption, cycle.len(), e.to_string()),
        }
    }

    fn verification(&mut self, cycle: Vec<usize>) -> Result<Outcome> {
        let union = union_of(&self.exposed)?;
        let certificate = HamiltonPowerCertificate {
            cyclic_order: cycle,
            k: self.cfg.k,
        };
        let n = self.n;
        match verify_certificate(&union, &certificate) {
            Ok(true) => {
                self.log(Stage::Verification, true, n, format!("verified against {} rounds", self.exposed.len()));
                Ok(Outcome::Success { certificate })
            }
            other => {
                let diagnostics = match other {
                    Err(e) => e.to_string(),
                    Ok(_) => "certificate misses an edge".into(),
                };
                self.log(Stage::Verification, false, n, diagnostics.clone());
                Ok(Outcome::Failure {
                    stage: Stage::Verification,
                    diagnostics,
                })
            }
        }
    }

    fn run(&mut self) -> Result<Outcome> {
        macro_rules! step {
            ($e:expr) => {
                match $e {
                    Next(v) => v,
                    Stop(o) => return Ok(o),
                }
            };
        }
        step!(self.absorbers()?);
        step!(self.spine_linking()?);
        let g3 = step!(self.transfer()?);
        step!(self.factor(&g3)?);
        drop(g3);
        let cycle = step!(self.closing()?);
        let cycle = step!(self.absorption(cycle));
        self.verification(cycle)
    }
}

/// Run the whole construction on `G(n,p)` as sampled from `cfg.seed`.
pub fn solve(n: usize, p: f64, cfg: &PipelineConfig) -> Result<PipelineResult> {
    cfg.validate()?;
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} is not a probability")));
    }
    let template = build_absorber(cfg.absorber_params()?)?;
    let size = template.params.vertex_count();
    let target = (cfg.absorber_fraction * n as f64 / size as f64).floor() as usize;
    if target == 0 {
        return Err(invalid(format!(
            "n = {n} leaves no room for one absorber on {size} vertices at fraction {}",
            cfg.absorber_fraction
        )));
    }
    let exposure = Exposure::new(n, p, cfg)?;
    let trace = Trace {
        n,
        p,
        config: cfg.clone(),
        per_round_p: exposure.main.per_round_p,
        sub_round_p: exposure.sub.per_round_p,
        absorber_target: target,
        absorbers: Vec::new(),
        spine_links: Vec::new(),
        q_a: Vec::new(),
        piece_size: None,
        transfer: 0,
        pieces: Vec::new(),
        closing_links: Vec::new(),
        sets: SetBook::default(),
        sampled: Vec::new(),
        stages: Vec::new(),
    };
    let mut run = Run {
        n,
        cfg,
        template,
        exposure,
        trace,
        exposed: Vec::new(),
    };
    let outcome = run.run()?;
    Ok(PipelineResult {
        outcome,
        trace: run.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PipelineConfig {
        PipelineConfig {
            absorber_fraction: 0.5,
            s_link: Some(2),
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn complete_host_succeeds() {
        let cfg = small().with_seed(3);
        let res = solve(500, 1.0, &cfg).unwrap();
        assert!(res.outcome.is_success(), "{:?}", res.trace.stages);
        let report = audit_provenance(&res.trace).unwrap();
        assert!(report.all_passed(), "{:?}", report.failed());
    }

    #[test]
    fn empty_host_fails_first() {
        let res = solve(500, 0.0, &small()).unwrap();
        assert_eq!(res.outcome.failed_stage(), Some(Stage::Absorbers));
        assert!(audit_provenance(&res.trace).unwrap().all_passed());
    }

    #[test]
    fn config_round_trip_and_validation() {
        let cfg = PipelineConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(PipelineConfig::from_json(&text).unwrap(), cfg);
        assert!(PipelineConfig::from_json(r#"{"absorber_fraction": 0.7}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"schema_version": 9}"#).is_err());
        assert!(solve(20, 0.5, &cfg).is_err());
    }

    #[test]
    fn proof_constants_are_huge() {
        let c = proof_constants(2);
        assert_eq!(c.l, 400_000_000);
        assert!(c.piece_size > 1_000_000_000_000_000);
    }
}
