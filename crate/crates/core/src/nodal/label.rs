use crate::sampler::GridSpec;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

/// Node adjacency of a grid: axis-aligned neighbours, wrapped on periodic
/// axes. Sphere rows `0` and `n_theta - 1` also connect each node to the node
/// half a turn away, which is its neighbour across the pole.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Topology {
    pub shape: [usize; 3],
    pub wrap: [bool; 3],
    pub dims: usize,
    pub polar: bool,
}

impl Topology {
    pub fn of(grid: &GridSpec) -> Self {
        let s = grid.shape();
        match grid {
            GridSpec::PlanarWindow { .. } => Self { shape: [s[0], s[1], 1], wrap: [false; 3], dims: 2, polar: false },
            GridSpec::Torus { dim, .. } => Self {
                shape: [s[0], s[1], if *dim == 3 { s[2] } else { 1 }],
                wrap: [true, true, *dim == 3],
                dims: *dim,
                polar: false,
            },
            GridSpec::LatLongSphere { .. } => {
                Self { shape: [s[0], s[1], 1], wrap: [true, false, false], dims: 2, polar: true }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let [nx, ny, _] = self.shape;
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        (c[2] * self.shape[1] + c[1]) * self.shape[0] + c[0]
    }

    /// Neighbour one step forward along `axis`, if any.
    pub fn forward(&self, c: [usize; 3], axis: usize) -> Option<[usize; 3]> {
        let n = self.shape[axis];
        let mut next = c;
        if c[axis] + 1 < n {
            next[axis] += 1;
        } else if self.wrap[axis] && n > 1 {
            next[axis] = 0;
        } else {
            return None;
        }
        Some(next)
    }

    /// Every undirected adjacency exactly once, in raster order.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize)) {
        let [nx, ny, _] = self.shape;
        for idx in 0..self.len() {
            let c = self.coords(idx);
            for axis in 0..self.dims {
                if let Some(next) = self.forward(c, axis) {
                    let j = self.index(next);
                    // a wrapped axis of length 2 would list the pair twice
                    if self.shape[axis] == 2 && next[axis] == 0 {
                        continue;
                    }
                    f(idx, j);
                }
            }
            if self.polar && (c[1] == 0 || c[1] == ny - 1) && c[0] < nx / 2 {
                f(idx, self.index([c[0] + nx / 2, c[1], 0]));
            }
        }
    }

    /// Whether a node lies on the edge of a non-periodic window.
    pub fn on_window_edge(&self, c: [usize; 3]) -> bool {
        (0..self.dims).any(|a| !self.wrap[a] && (c[a] == 0 || c[a] + 1 == self.shape[a])) && !self.polar
    }
}

/// Zero counts as positive.
pub fn is_positive(v: f64) -> bool {
    v >= 0.0
}

/// Connected components of equal sign. Labels are numbered from 0 in the
/// order their first node appears in a raster scan.
pub(crate) fn component_labels(values: &[f64], topo: &Topology) -> (Vec<u32>, usize) {
    let mut sets = DisjointSet::new(values.len());
    topo.for_each_edge(|a, b| {
        if is_positive(values[a]) == is_positive(values[b]) {
            sets.union(a as u32, b as u32);
        }
    });
    let mut root_label = vec![u32::MAX; values.len()];
    let mut labels = vec![0u32; values.len()];
    let mut next = 0u32;
    for (idx, label) in labels.iter_mut().enumerate() {
        let root = sets.find(idx as u32) as usize;
        if root_label[root] == u32::MAX {
            root_label[root] = next;
            next += 1;
        }
        *label = root_label[root];
    }
    (labels, next as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_reports_new_joins() {
        let mut s = DisjointSet::new(4);
        assert!(s.union(0, 1));
        assert!(s.union(2, 3));
        assert!(!s.union(1, 0));
        assert!(s.union(1, 3));
        assert_eq!(s.find(0), s.find(2));
    }

    #[test]
    fn pole_pairs_listed_once() {
        let grid = GridSpec::sphere(4, 8).unwrap();
        let topo = Topology::of(&grid);
        let mut count = 0;
        topo.for_each_edge(|_, _| count += 1);
        // 8 phi edges per row, 3 theta gaps of 8 edges, 4 pole pairs per cap
        assert_eq!(count, 4 * 8 + 3 * 8 + 2 * 4);
    }
}
