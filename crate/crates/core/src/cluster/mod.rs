//! K-means clustering with k-means++ seeding, elbow selection of k and the
//! daily cluster report.

mod ari;
mod elbow;
mod kmeans;
mod report;

pub use ari::adjusted_rand_index;
pub use elbow::{choose_elbow, elbow, ElbowCurve, DEFAULT_K_MAX, ELBOW_TIE_TOLERANCE};
pub use kmeans::{
    kmeans_fit, kmeans_fit_with, kmeans_runs, wcss, ClusterModel, KMeansConfig, DEFAULT_MAX_ITERATIONS,
    DEFAULT_RESTARTS, WCSS_MONOTONE_RTOL,
};
pub use report::{cluster_report, ClusterOptions, ClusterReport};
pub(crate) use kmeans::sq_dist;
