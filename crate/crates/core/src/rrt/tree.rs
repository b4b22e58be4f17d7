use std::collections::HashMap;
use std::fmt::Write as _;

use crate::geometry::Point;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RrtNode {
    pub id: NodeId,
    pub position: Point,
    pub parent: Option<NodeId>,
}

/// Spatial hash over node positions for nearest-neighbour queries.
#[derive(Clone, Debug)]
struct BucketIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<NodeId>>,
    // Bucket-coordinate bounding box of everything ever inserted.
    lo: (i64, i64),
    hi: (i64, i64),
}

impl BucketIndex {
    fn new(cell: f64) -> Self {
        Self {
            cell,
            buckets: HashMap::new(),
            lo: (i64::MAX, i64::MAX),
            hi: (i64::MIN, i64::MIN),
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
        )
    }

    fn insert(&mut self, id: NodeId, p: Point) {
        let k = self.key(p);
        self.lo = (self.lo.0.min(k.0), self.lo.1.min(k.1));
        self.hi = (self.hi.0.max(k.0), self.hi.1.max(k.1));
        self.buckets.entry(k).or_default().push(id);
    }

    fn remove(&mut self, id: NodeId, p: Point) {
        let k = self.key(p);
        if let Some(v) = self.buckets.get_mut(&k) {
            v.retain(|&x| x != id);
            if v.is_empty() {
                self.buckets.remove(&k);
            }
        }
    }
}

/// Rooted tree of sampled positions. Node ids are never reused.
#[derive(Clone, Debug)]
pub struct RrtTree {
    slots: Vec<Option<RrtNode>>,
    children: Vec<Vec<NodeId>>,
    root: Option<NodeId>,
    live: usize,
    index: BucketIndex,
}

impl RrtTree {
    /// Empty tree; the first inserted node becomes the root. `bucket` is the
    /// spatial-hash pitch in meters.
    pub fn new(bucket: f64) -> Self {
        Self {
            slots: Vec::new(),
            children: Vec::new(),
            root: None,
            live: 0,
            index: BucketIndex::new(bucket.max(1e-6)),
        }
    }

    pub fn with_root(root: Point, bucket: f64) -> Self {
        let mut t = Self::new(bucket);
        t.slots.push(Some(RrtNode {
            id: NodeId(0),
            position: root,
            parent: None,
        }));
        t.children.push(Vec::new());
        t.root = Some(NodeId(0));
        t.live = 1;
        t.index.insert(NodeId(0), root);
        t
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    /// Number of live nodes.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn get(&self, id: NodeId) -> Option<&RrtNode> {
        self.slots.get(id.0 as usize).and_then(|s| s.as_ref())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.get(id).is_some()
    }

    pub fn parent(&self, id: NodeId) -> Option<&RrtNode> {
        self.get(id)
            .and_then(|n| n.parent)
            .and_then(|p| self.get(p))
    }

    /// Live nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &RrtNode> {
        self.slots.iter().flatten()
    }

    /// Live (parent, child) edges in child-id order.
    pub fn edges(&self) -> impl Iterator<Item = (&RrtNode, &RrtNode)> {
        self.nodes()
            .filter_map(move |n| n.parent.and_then(|p| self.get(p)).map(|p| (p, n)))
    }

    /// Adds a node. With `parent = None` the tree must be empty (new root).
    pub fn add(&mut self, position: Point, parent: Option<NodeId>) -> Result<NodeId> {
        match parent {
            None if self.root.is_some() => {
                return Err(Error::State("tree already has a root".into()));
            }
            Some(p) if !self.contains(p) => {
                return Err(Error::Consistency(format!("parent {p:?} not in tree")));
            }
            _ => {}
        }
        let id = NodeId(self.slots.len() as u32);
        self.slots.push(Some(RrtNode {
            id,
            position,
            parent,
        }));
        self.children.push(Vec::new());
        match parent {
            Some(p) => self.children[p.0 as usize].push(id),
            None => self.root = Some(id),
        }
        self.live += 1;
        self.index.insert(id, position);
        Ok(id)
    }

    /// Removes `id` and every descendant. The root cannot be removed.
    /// Returns the number of nodes removed.
    pub fn remove_subtree(&mut self, id: NodeId) -> usize {
        if Some(id) == self.root || !self.contains(id) {
            return 0;
        }
        if let Some(p) = self.get(id).and_then(|n| n.parent) {
            self.children[p.0 as usize].retain(|&c| c != id);
        }
        let mut stack = vec![id];
        let mut removed = 0;
        while let Some(n) = stack.pop() {
            if let Some(node) = self.slots[n.0 as usize].take() {
                self.index.remove(n, node.position);
                removed += 1;
                stack.append(&mut self.children[n.0 as usize]);
            }
        }
        self.live -= removed;
        removed
    }

    /// Node closest to `p`; ties go to the lowest id.
    pub fn nearest(&self, p: Point) -> Result<&RrtNode> {
        if self.live == 0 {
            return Err(Error::State("nearest node of an empty tree".into()));
        }
        let idx = &self.index;
        let (qx, qy) = idx.key(p);
        let (lo, hi) = (idx.lo, idx.hi);
        let gap = |q: i64, a: i64, b: i64| {
            if q < a {
                a - q
            } else if q > b {
                q - b
            } else {
                0
            }
        };
        let r_min = gap(qx, lo.0, hi.0).max(gap(qy, lo.1, hi.1));
        let r_max = (qx - lo.0)
            .abs()
            .max((qx - hi.0).abs())
            .max((qy - lo.1).abs())
            .max((qy - hi.1).abs());
        let mut best: Option<(f64, NodeId)> = None;
        let visit = |bx: i64, by: i64, best: &mut Option<(f64, NodeId)>| {
            if let Some(ids) = idx.buckets.get(&(bx, by)) {
                for &id in ids {
                    let d = self.slots[id.0 as usize]
                        .as_ref()
                        .map_or(f64::INFINITY, |n| n.position.dist_sq(p));
                    let better = match *best {
                        None => true,
                        Some((bd, bid)) => d < bd || (d == bd && id < bid),
                    };
                    if better {
                        *best = Some((d, id));
                    }
                }
            }
        };
        for r in r_min..=r_max {
            let (x0, x1) = ((qx - r).max(lo.0), (qx + r).min(hi.0));
            let (y0, y1) = ((qy - r).max(lo.1), (qy + r).min(hi.1));
            if r == 0 {
                visit(qx, qy, &mut best);
            } else {
                for bx in x0..=x1 {
                    if qy - r >= lo.1 {
                        visit(bx, qy - r, &mut best);
                    }
                    if qy + r <= hi.1 {
                        visit(bx, qy + r, &mut best);
                    }
                }
                for by in (qy - r + 1).max(y0)..=(qy + r - 1).min(y1) {
                    if qx - r >= lo.0 {
                        visit(qx - r, by, &mut best);
                    }
                    if qx + r <= hi.0 {
                        visit(qx + r, by, &mut best);
                    }
                }
            }
            if let Some((bd, _)) = best {
                let reach = r as f64 * idx.cell;
                if bd < reach * reach {
                    break;
                }
            }
        }
        let (_, id) =
            best.ok_or_else(|| Error::Consistency("spatial index lost all nodes".into()))?;
        Ok(self.get(id).expect("indexed node is live"))
    }

    /// Every live node reaches the root through live parents.
    pub fn is_connected(&self) -> bool {
        let Some(root) = self.root else {
            return self.live == 0;
        };
        self.nodes().all(|n| {
            let mut cur = n.id;
            let mut steps = 0;
            while cur != root {
                match self.get(cur).and_then(|x| x.parent) {
                    Some(p) if self.contains(p) => cur = p,
                    _ => return false,
                }
                steps += 1;
                if steps > self.slots.len() {
                    return false;
                }
            }
            true
        })
    }

    /// Plain-text edge list, one node per line: `id parent x y`, root first
    /// with parent `-1`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let mut line = |n: &RrtNode| {
            let parent = n.parent.map_or(-1, |p| p.0 as i64);
            let _ = writeln!(
                s,
                "{} {} {:.6} {:.6}",
                n.id.0, parent, n.position.x, n.position.y
            );
        };
        if let Some(r) = self.root.and_then(|r| self.get(r)) {
            line(r);
        }
        for n in self.nodes().filter(|n| Some(n.id) != self.root) {
            line(n);
        }
        s
    }
}

/// Node of `tree` closest to `p` in Euclidean distance; ties go to the lowest id.
pub fn nearest_node(tree: &RrtTree, p: Point) -> Result<&RrtNode> {
    tree.nearest(p)
}
