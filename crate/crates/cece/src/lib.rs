//! Cluster-Explore-Classify-Exploit: the four pluggable algorithm slots,
//! their concrete instances, and the mini-batch orchestrator.

pub mod classify;
pub mod cluster;
pub mod config;
pub mod error;
pub mod exploit;
pub mod explore;
pub mod kmeans;
pub mod orchestrator;
pub mod slots;

pub use classify::{classify_with, min_l1_classify, min_l1_sum_classify, L1Aggregate};
pub use cluster::{
    exhaustive_cluster, for_each_partition, partition_score, pool_clusters, ClusterAssignment,
    EXHAUSTIVE_LIMIT,
};
pub use config::{
    CeceConfig, ClassifierSlot, ClustererSlot, ExploiterSlot, Exploration, MinibatchSchedule,
};
pub use error::{CeceError, Result};
pub use exploit::{dp_exploit, qlearning_exploit, QLearningParams, QTable};
pub use explore::uniform_explore;
pub use kmeans::{kmeans_cluster, kmeans_cluster_with, KMeans};
pub use orchestrator::{run_cece, run_cece_with_outcomes, EpisodeOutcome};
pub use slots::{
    Classifier, Clusterer, DpExploiter, ExhaustiveClusterer, Exploiter, Explorer,
    KMeansClusterer, MinL1Classifier, OracleClusterer, QLearningExploiter, UniformExplorer,
};
