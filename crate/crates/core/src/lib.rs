//! Constructive machinery for embedding the kth power of a Hamilton cycle
//! into a binomial random graph by the absorbing method.

pub mod absorber;
pub mod bitset;
pub mod density;
pub mod error;
pub mod factor;
pub mod graph;
pub mod harness;
pub mod linker;
pub mod multigraph;
pub mod pipeline;
pub mod power;
pub mod randgen;
pub mod seed;

pub use absorber::{build_absorber, verify_absorber, Absorber, AbsorberParams, AbsorberReport, JunctionRole};
pub use bitset::VertexSet;
pub use error::{Error, Result};
pub use graph::SimpleGraph;
pub use power::{join, make_cycle_power, make_path_power, verify_path_power_in, HamiltonPowerCertificate, Linkage, PathPower, VertexSeq};
pub use density::{d1, d1_max, d2, d2_max, DensityResult, Method, MomentModel, PhiVariant, SubPattern, WeightedGraph};
pub use multigraph::{build_contracted_q, LabeledEdge, LabeledMultigraph, Label, PLAIN};
pub use randgen::{sample_gnp, sample_multipartite, split_rounds, ExposurePlan};
pub use linker::{find_linkage, find_partial_linkage, link_all, LinkFailure, LinkRequest, PartialLinkage, RoundPolicy, SequencePairFamily};
pub use factor::{embed_copy, find_disjoint_copies, find_path_power_factor, EmbedFailure, EmbeddingBudget};
pub use pipeline::{
    absorb_leftovers, audit_provenance, count_copies, expected_copy_count, oracle_contains, solve, verify_certificate,
    Outcome, PipelineConfig, PipelineResult, PlacedAbsorber, Stage, Trace,
};
pub use harness::{replay, run_sweep, Mode, PGrid, SweepSpec, TrialRecord};
