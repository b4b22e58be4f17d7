use super::search::FrontierPoint;
use super::tree::RrtTree;
use crate::grid::MapSnapshot;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PruneStats {
    /// Frontiers whose cell became known.
    pub explored: usize,
    /// Frontiers whose parent edge stopped being traversable.
    pub blocked: usize,
    /// Frontiers dropped because their node went away with a pruned branch.
    pub orphaned: usize,
    pub nodes_removed: usize,
}

/// Drops explored and unreachable global frontiers and the tree branches
/// that led to them.
///
/// A frontier in a known cell is removed together with its node. A frontier
/// whose parent edge fails the traversability check is removed, and the
/// chain above it is cut back edge by edge until an edge passes or the root
/// is reached. Finally every remaining edge is rechecked so the tree only
/// keeps traversable edges; removing a node always removes its subtree.
pub fn prune_global(
    frontiers: &mut Vec<FrontierPoint>,
    tree: &mut RrtTree,
    map: &MapSnapshot,
    r_robot: f64,
) -> Result<PruneStats> {
    if let Some(f) = frontiers.iter().find(|f| !tree.contains(f.node)) {
        return Err(Error::Consistency(format!(
            "frontier at {} refers to missing node {:?}",
            f.position, f.node
        )));
    }
    let mut stats = PruneStats::default();
    let mut keep = Vec::with_capacity(frontiers.len());
    for f in frontiers.drain(..) {
        if !tree.contains(f.node) {
            stats.orphaned += 1;
            continue;
        }
        if map.state_at(f.position).is_known() {
            stats.explored += 1;
            stats.nodes_removed += tree.remove_subtree(f.node);
            continue;
        }
        let Some(parent) = tree.parent(f.node).copied() else {
            keep.push(f);
            continue;
        };
        let node_pos = tree.get(f.node).map(|n| n.position).unwrap_or(f.position);
        if map.traversable(parent.position, node_pos, r_robot) {
            keep.push(f);
            continue;
        }
        stats.blocked += 1;
        let mut cur = f.node;
        while let Some(p) = tree.parent(cur).copied() {
            let cur_pos = tree.get(cur).expect("walk stays on live nodes").position;
            if map.traversable(p.position, cur_pos, r_robot) {
                break;
            }
            stats.nodes_removed += tree.remove_subtree(cur);
            cur = p.id;
        }
    }

    // Sweep the remaining edges; parents come before children in id order so
    // a failed edge takes its whole subtree with it.
    let failing: Vec<_> = tree
        .edges()
        .filter(|(p, c)| !map.traversable(p.position, c.position, r_robot))
        .map(|(_, c)| c.id)
        .collect();
    for id in failing {
        stats.nodes_removed += tree.remove_subtree(id);
    }

    for f in keep {
        if tree.contains(f.node) {
            frontiers.push(f);
        } else {
            stats.orphaned += 1;
        }
    }
    Ok(stats)
}
