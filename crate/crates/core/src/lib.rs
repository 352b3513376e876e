//! Friendship-graph reconstruction and hidden-attribute inference over
//! simulated social network snapshots.
//!
//! The pipeline for one victim:
//!
//! 1. [`socialspy::socialspy_s4`] recovers friends from likes and comments on
//!    the victim's public pictures, verified through the MCP oracle.
//! 2. [`twohop::collect_2hop`] repeats recovery on every recovered friend and
//!    records the mutual friends of each resulting pair.
//! 3. [`twohop::build_graph`] assembles the 2-hop friendship graph and
//!    [`twohop::prune_single_edge`] drops 2-hop ids that share only one
//!    friend with the victim.
//! 4. [`attrs::extract_rates`] builds education / hometown / current-city
//!    rate tables from the recovered friends; [`attrs::rank_guesses`] ranks
//!    them as guesses of the victim's own attributes.
//! 5. [`scoring::score_candidates`] gives every remaining 2-hop id an
//!    information score and a normalized edge score, and
//!    [`scoring::classify`] applies the two-threshold FRIEND rule.
//! 6. [`eval`] compares everything against the snapshot's ground truth.
//!
//! Analysis code only ever sees the snapshot through
//! [`oracle::OracleHandle`].

pub mod attrs;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod generate;
pub mod model;
pub mod oracle;
pub mod output;
pub mod rational;
pub mod run;
pub mod scoring;
pub mod socialspy;
pub mod twohop;

pub use error::{Error, Result};
pub use eval::{run_experiment, ConfusionMatrix, ExperimentConfig, Metrics};
pub use generate::{generate_synthetic, ingest_edge_list, GeneratorConfig};
pub use model::{load_snapshot, Feature, Label, OsnSnapshot, UserId};
pub use oracle::OracleHandle;
pub use rational::Rational;
pub use scoring::{Thresholds, Verdict};
