//! Analysis side: Csc-space distances and cluster statistics, utterance
//! scoring, PCA projection and Welch's t-test.

mod distance;
mod pca;
mod scoring;
mod stats;

pub use distance::{cluster_distances, d_avg, d_inter, d_intra, d_rel, dist, ClusterDistances, RelativeDistance};
pub use pca::{pca_project, Projection};
pub use scoring::{edit_distance, f1_word, mean_f1, mixed, normalised_edit_distance};
pub use stats::{mean_and_se, two_sample_t, TTest};
