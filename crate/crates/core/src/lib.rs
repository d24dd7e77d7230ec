//! Shape approximation with swarms of conditional polytopes.
//!
//! A [`Swarm`] is the conjunction of many base shapes, each the implication
//! "inside the condition polytope means inside the consequent polytope".
//! [`fit`] draws base shapes at random so that every training point is a
//! member. On top of membership the crate offers anomaly scores,
//! classification, abstraction of the swarm's logic into a small union of
//! polytopes, exact one-dimensional range queries, sampling from the learned
//! shape and clustering.
//!
//! Everything is generic over the scalar type; [`Swarm64`] and friends fix
//! it to `f64`.

pub mod abstraction;
pub mod error;
pub mod generator;
pub mod geometry;
pub mod inference;
pub mod interval;
pub mod logic;
pub mod lp;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod tasks;
pub mod training;
pub mod viou;

pub use abstraction::{
    abstract_lp, abstract_sampling, abstract_swarm, abstract_tree, estimate_volume, rangefinder, substitute, AbstractConfig,
    AbstractionOutcome, Abstractor, Backend,
};
pub use error::{PolyraError, Result};
pub use generator::{generate, ray_sections, GenConfig, SegmentWeighting};
pub use geometry::{BaseShape, BoundingBox, Halfspace, Polytope, Swarm};
pub use inference::{
    classify, classify_with_score_fallback, score_conditional, score_mean, ClassOutcome, ClassifierBundle, ConditionalScore,
    OutcomeKind,
};
pub use interval::{Interval, IntervalSet};
pub use logic::{simplify, simplify_with, swarm_to_tree, DnfForm, LogicNode};
pub use scalar::Scalar;
pub use tasks::{cluster, cluster_swarm, range_query, Clustering, RangeQuery};
pub use training::{fit, fit_with_report, Dataset, FitConfig, FitReport};
pub use viou::{viou, TruthShape};

pub type Halfspace64 = Halfspace<f64>;
pub type Polytope64 = Polytope<f64>;
pub type Swarm64 = Swarm<f64>;
pub type Dataset64 = Dataset<f64>;
pub type DnfForm64 = DnfForm<f64>;
pub type LogicNode64 = LogicNode<f64>;

pub type Halfspace32 = Halfspace<f32>;
pub type Polytope32 = Polytope<f32>;
pub type Swarm32 = Swarm<f32>;
pub type Dataset32 = Dataset<f32>;
pub type DnfForm32 = DnfForm<f32>;
pub type LogicNode32 = LogicNode<f32>;
