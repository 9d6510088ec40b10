//! Broad phase: per-axis static interval trees over face bounding boxes.

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Aabb {
        let mut b = Aabb { min: [f64::INFINITY; 3], max: [f64::NEG_INFINITY; 3] };
        for p in points {
            for k in 0..3 {
                b.min[k] = b.min[k].min(p[k]);
                b.max[k] = b.max[k].max(p[k]);
            }
        }
        b
    }

    pub fn inflated(&self, pad: f64) -> Aabb {
        Aabb { min: self.min.map(|x| x - pad), max: self.max.map(|x| x + pad) }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] && other.min[k] <= self.max[k])
    }
}

/// Static interval tree: intervals sorted by lower end, stored as an
/// implicit balanced tree with the largest upper end of every subtree.
#[derive(Clone, Debug)]
pub struct IntervalTree {
    lo: Vec<f64>,
    hi: Vec<f64>,
    id: Vec<usize>,
    max_hi: Vec<f64>,
}

impl IntervalTree {
    pub fn new(intervals: &[(f64, f64)]) -> Self {
        let mut order: Vec<usize> = (0..intervals.len()).collect();
        order.sort_by(|&a, &b| intervals[a].0.total_cmp(&intervals[b].0).then(a.cmp(&b)));
        let lo: Vec<f64> = order.iter().map(|&i| intervals[i].0).collect();
        let hi: Vec<f64> = order.iter().map(|&i| intervals[i].1).collect();
        let mut tree = IntervalTree { lo, hi, id: order, max_hi: Vec::new() };
        tree.max_hi = vec![f64::NEG_INFINITY; 4 * tree.lo.len().max(1)];
        if !tree.lo.is_empty() {
            tree.fill(1, 0, tree.lo.len());
        }
        tree
    }

    fn fill(&mut self, node: usize, l: usize, r: usize) -> f64 {
        let mid = (l + r) / 2;
        let mut m = self.hi[mid];
        if l < mid {
            m = m.max(self.fill(2 * node, l, mid));
        }
        if mid + 1 < r {
            m = m.max(self.fill(2 * node + 1, mid + 1, r));
        }
        self.max_hi[node] = m;
        m
    }

    /// Ids of the intervals meeting `[a, b]`, unordered.
    pub fn query(&self, a: f64, b: f64, out: &mut Vec<usize>) {
        if !self.lo.is_empty() {
            self.visit(1, 0, self.lo.len(), a, b, out);
        }
    }

    fn visit(&self, node: usize, l: usize, r: usize, a: f64, b: f64, out: &mut Vec<usize>) {
        if l >= r || self.max_hi[node] < a {
            return;
        }
        let mid = (l + r) / 2;
        self.visit(2 * node, l, mid, a, b, out);
        if self.lo[mid] > b {
            return;
        }
        if self.hi[mid] >= a {
            out.push(self.id[mid]);
        }
        self.visit(2 * node + 1, mid + 1, r, a, b, out);
    }
}

/// Candidate sets Σ(σ): faces whose boxes overlap σ's box on all three axes.
#[derive(Clone, Debug)]
pub struct CandidateIndex {
    boxes: Vec<Aabb>,
    trees: [IntervalTree; 3],
}

impl CandidateIndex {
    pub fn new(boxes: Vec<Aabb>) -> Self {
        let tree = |k: usize| IntervalTree::new(&boxes.iter().map(|b| (b.min[k], b.max[k])).collect::<Vec<_>>());
        let trees = [tree(0), tree(1), tree(2)];
        CandidateIndex { boxes, trees }
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn bbox(&self, i: usize) -> &Aabb {
        &self.boxes[i]
    }

    /// Sorted candidate ids for box `sigma`, `sigma` itself excluded.
    pub fn query(&self, sigma: usize) -> Vec<usize> {
        let b = self.boxes[sigma];
        let mut sets: Vec<Vec<usize>> = (0..3)
            .map(|k| {
                let mut v = Vec::new();
                self.trees[k].query(b.min[k], b.max[k], &mut v);
                v.sort_unstable();
                v
            })
            .collect();
        sets.sort_by_key(|s| s.len());
        let mut out = std::mem::take(&mut sets[0]);
        for other in &sets[1..] {
            out.retain(|i| other.binary_search(i).is_ok());
        }
        out.retain(|&i| i != sigma);
        out
    }
}
