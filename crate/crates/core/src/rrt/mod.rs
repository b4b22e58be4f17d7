//! RRT-based frontier search.
//!
//! Trees grow with an expansion step that shrinks near obstacles, accept only
//! edges that keep the robot's clearance and never connect two unknown
//! points. A node reached across the known/unknown boundary is a frontier.
//! Local searches are rooted at the robot and stop on coverage or on enough
//! frontiers; the global tree lives for the whole mission and is pruned on
//! every map revision.

mod prune;
mod search;
mod tree;

pub use prune::{prune_global, PruneStats};
pub use search::{
    adaptive_expand_dist, expand_and_search, expand_dist_for_clearance, exploration_completed,
    extend_point, rrt_coverage, uniform_downsample, FrontierPoint, FrontierSearch, Rejection,
    SamplingBoundary, SearchMode, SearchParams, SearchResult, SearchStatus, StepOutcome,
};
pub use tree::{nearest_node, NodeId, RrtNode, RrtTree};

#[cfg(test)]
mod tests;
