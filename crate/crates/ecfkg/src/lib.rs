//! Explainable recommendation over a heterogeneous user–item knowledge graph.
//!
//! The crate builds a typed graph out of purchases, review words, brands,
//! categories, and item-to-item links, learns one embedding space for all
//! entities and relations by translation (`head + relation ≈ tail`) with
//! negative-sampling SGD, ranks unseen items for each user, and explains a
//! recommendation with the most probable entity path connecting the user to
//! the item.
//!
//! The library is the primary interface; each major capability has a runnable
//! example:
//!
//! | capability | run |
//! |---|---|
//! | Parse a triplet file into a graph | `cargo run --example build_graph` |
//! | Build a graph from reviews + metadata | `cargo run --example reviews_to_graph` |
//! | Generate a clustered synthetic graph | `cargo run --example synthetic_graph` |
//! | Train embeddings and checkpoint them | `cargo run --example train_embeddings` |
//! | Rank items for a user | `cargo run --example recommend_top_n` |
//! | Explain a recommendation | `cargo run --example explain_paths` |
//! | Split, evaluate, and test significance | `cargo run --example evaluate_metrics` |
//! | Compare relation subsets | `cargo run --example relation_ablation` |
//!
//! A thin `ecfkg` binary wraps the same functionality as subcommands
//! (`ingest`, `synth`, `train`, `recommend`, `explain`, `evaluate`, `ablate`).

pub mod cli;
pub mod eval;
pub mod explain;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod recommend;
pub mod seeds;

pub use graph::{EntityId, EntityType, Graph, GraphError, RelationType, SplitResult, Triplet};
pub use model::{EmbeddingModel, Hyperparams, TrainReport};
