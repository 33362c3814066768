//! Popular matchings in bipartite preference instances.
//!
//! The crate covers popularity verification, popular matchings in the
//! one-sided model, matchings that stay popular when one agent changes its
//! preference order, and stable matchings with bounded two-sided ties whose
//! unpopularity factor is bounded by the tie length.

pub mod diff;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod matching;
pub mod onesided;
pub mod popularity;
pub mod stablek;
pub mod twosided;

pub use diff::{common_perturbed_agent, diff_instances, PerturbationDiff};
pub use error::{Error, Result};
pub use format::{parse_instance, parse_matching, serialize_instance, serialize_matching};
pub use graph::{DmLabel, DmLabels};
pub use instance::{Instance, Model, PreferenceList, Side, VertexId};
pub use matching::{popularity_margin, preference_count, Matching};
pub use popularity::{
    is_popular, is_popular_oracle, unpopularity_factor, Factor, PopularityWitness, Verdict,
    ViolatedCondition, DEFAULT_CAP,
};
pub use generate::{generate, perturb_agent, GenConfig};
pub use onesided::{robust_one_sided, solve_one_sided};
pub use stablek::{check_stability, stable_k, BlockingPair};
pub use twosided::{robust_multi, robust_two_sided};
