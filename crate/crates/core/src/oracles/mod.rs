//! Exact ground truths on small graphs.

pub mod atlas;
pub mod bottleneck;
pub mod complete_graph;
pub mod enumerate;
pub mod graph;
pub mod linalg;
pub mod resistance;

pub use atlas::{check_excess_diameter_bound, connected_graphs, excess_diameter_bound, ExcessDiameterReport};
pub use bottleneck::{balanced_ratio, bottleneck_ratio_exact};
pub use complete_graph::{km_distance_tail, km_expected_distance, laplacian_walk_sample, laplacian_walk_sample_with_rng};
pub use enumerate::{
    enumerate_spanning_trees, for_each_spanning_tree, matrix_tree_determinant, matrix_tree_determinant_exact,
    partition_function_exact, TreeEnumeration,
};
pub use graph::SmallWeightedGraph;
pub use resistance::{
    effective_resistance, effective_resistance_exact, ust_edge_probability, ust_edge_probability_exact, EdgeProbability,
};
