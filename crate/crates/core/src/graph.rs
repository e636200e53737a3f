//! Connectivity helpers shared by validation, the flow solver and the
//! contingency filters.

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` if the two elements were in different sets.
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
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Builds the component structure of `n` nodes joined by `edges`.
pub fn components<I>(n: usize, edges: I) -> DisjointSet
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut set = DisjointSet::new(n);
    for (a, b) in edges {
        set.union(a, b);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_find() {
        let mut set = DisjointSet::new(5);
        assert!(set.union(0, 1));
        assert!(set.union(3, 4));
        assert!(!set.union(1, 0));
        assert!(set.same(0, 1));
        assert!(!set.same(1, 3));
        set.union(1, 4);
        assert!(set.same(0, 3));
        assert!(!set.same(2, 0));
    }

    #[test]
    fn components_from_edges() {
        let mut set = components(4, [(0, 1), (2, 3)]);
        assert!(set.same(0, 1));
        assert!(!set.same(1, 2));
    }
}
