//! Weak connectivity via union-find.

use crate::graph::ValuedGraph;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    largest: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            largest: usize::from(n > 0),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets holding `a` and `b`; returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.largest = self.largest.max(self.size[ra]);
        true
    }

    pub fn largest(&self) -> usize {
        self.largest
    }
}

/// Component label per node, treating any positive weight in either
/// direction as a link. Labels are assigned in order of first node.
pub fn weak_components(g: &ValuedGraph) -> Vec<usize> {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && g.weight(i, j) > 0.0 {
                uf.union(i, j);
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut root_label = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        let r = uf.find(i);
        if root_label[r] == usize::MAX {
            root_label[r] = next;
            next += 1;
        }
        label[i] = root_label[r];
    }
    label
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_tracks_largest() {
        let mut uf = UnionFind::new(5);
        assert_eq!(uf.largest(), 1);
        uf.union(0, 1);
        uf.union(3, 4);
        uf.union(1, 4);
        assert_eq!(uf.largest(), 4);
        assert!(!uf.union(0, 3));
    }

    #[test]
    fn weak_components_follow_arcs_both_ways() {
        let mut g = ValuedGraph::empty(4, true, "u");
        g.set_weight(0, 1, 1.0);
        g.set_weight(3, 2, 1.0);
        assert_eq!(weak_components(&g), vec![0, 0, 1, 1]);
    }
}
