use super::{dist, Point};

const LEAF_SIZE: usize = 16;
/// Pruning slack. A subtree is skipped only when its box distance exceeds the
/// bound by this relative margin, so the minimum found equals the brute-force
/// minimum over the same per-pair distances bit for bit.
const PRUNE_SLACK: f64 = 1e-12;

struct Node {
    lo: Point,
    hi: Point,
    start: usize,
    end: usize,
    /// Child node indices; `None` for leaves.
    children: Option<(usize, usize)>,
}

/// Static k-d tree over a borrowed point slice.
pub(crate) struct KdTree<'a> {
    points: &'a [Point],
    order: Vec<usize>,
    nodes: Vec<Node>,
}

fn box_distance(q: &Point, lo: &Point, hi: &Point) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let d = if q[a] < lo[a] {
            lo[a] - q[a]
        } else if q[a] > hi[a] {
            q[a] - hi[a]
        } else {
            0.0
        };
        s += d * d;
    }
    s.sqrt()
}

impl<'a> KdTree<'a> {
    pub(crate) fn new(points: &'a [Point]) -> Self {
        let mut tree = KdTree {
            points,
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build(0, points.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.order[start..end] {
            for a in 0..3 {
                lo[a] = lo[a].min(self.points[i][a]);
                hi[a] = hi[a].max(self.points[i][a]);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            start,
            end,
            children: None,
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let axis = (0..3)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let pts = self.points;
        self.order[start..end]
            .select_nth_unstable_by(mid - start, |&i, &j| pts[i][axis].total_cmp(&pts[j][axis]));
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    /// Distance from `q` to the nearest point; `INFINITY` for an empty tree.
    pub(crate) fn nearest(&self, q: &Point) -> f64 {
        let mut best = f64::INFINITY;
        if !self.nodes.is_empty() {
            self.nearest_in(0, q, &mut best);
        }
        best
    }

    fn nearest_in(&self, id: usize, q: &Point, best: &mut f64) {
        let node = &self.nodes[id];
        if box_distance(q, &node.lo, &node.hi) > *best * (1.0 + PRUNE_SLACK) {
            return;
        }
        match node.children {
            None => {
                for &i in &self.order[node.start..node.end] {
                    let d = dist(q, &self.points[i]);
                    if d < *best {
                        *best = d;
                    }
                }
            }
            Some((l, r)) => {
                let dl = box_distance(q, &self.nodes[l].lo, &self.nodes[l].hi);
                let dr = box_distance(q, &self.nodes[r].lo, &self.nodes[r].hi);
                let (first, second) = if dl <= dr { (l, r) } else { (r, l) };
                self.nearest_in(first, q, best);
                self.nearest_in(second, q, best);
            }
        }
    }

    /// Whether some point lies within `radius` of `q` (inclusive).
    pub(crate) fn any_within(&self, q: &Point, radius: f64) -> bool {
        !self.nodes.is_empty() && self.any_within_in(0, q, radius)
    }

    fn any_within_in(&self, id: usize, q: &Point, radius: f64) -> bool {
        let node = &self.nodes[id];
        if box_distance(q, &node.lo, &node.hi) > radius * (1.0 + PRUNE_SLACK) {
            return false;
        }
        match node.children {
            None => self.order[node.start..node.end]
                .iter()
                .any(|&i| dist(q, &self.points[i]) <= radius),
            Some((l, r)) => self.any_within_in(l, q, radius) || self.any_within_in(r, q, radius),
        }
    }
}
