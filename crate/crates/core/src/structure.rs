//! Strong components, condensation, undominated knots and the `K⁺` sets.

use std::collections::BTreeSet;

use crate::digraph::WeightedDigraph;

/// Structural summary every forest computation starts from.
///
/// Components and knots are sorted internally and ordered by their smallest
/// vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureDecomposition {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// Arcs between distinct components, as component index pairs.
    pub condensation: BTreeSet<(usize, usize)>,
    pub knots: Vec<Vec<usize>>,
    pub knot_of: Vec<Option<usize>>,
    /// Per knot: vertices reachable from it and from no other knot.
    pub k_plus: Vec<Vec<usize>>,
    /// `reach[i][j]`: `j` is reachable from `i`.
    pub reach: Vec<Vec<bool>>,
}

impl StructureDecomposition {
    /// Forest dimension `v`: the number of undominated knots.
    pub fn forest_dimension(&self) -> usize {
        self.knots.len()
    }

    pub fn in_knot_union(&self, v: usize) -> bool {
        self.knot_of[v].is_some()
    }

    pub fn knot_union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.knots.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// Knots from which `v` is reachable.
    pub fn knots_reaching(&self, v: usize) -> Vec<usize> {
        (0..self.knots.len())
            .filter(|&k| self.reach[self.knots[k][0]][v])
            .collect()
    }

    /// Nonzero pattern of the normalized maximum-forest matrix:
    /// `(i, j)` is set iff `j` lies in a knot and `i` is reachable from `j`.
    pub fn jbar_support(&self) -> Vec<Vec<bool>> {
        let n = self.component_of.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.in_knot_union(j) && self.reach[j][i]).collect())
            .collect()
    }
}

pub fn decompose(g: &WeightedDigraph) -> StructureDecomposition {
    let n = g.n();
    let adjacency: Vec<Vec<usize>> = (0..n).map(|v| g.out_arcs(v).map(|a| a.head).collect()).collect();
    let mut components = tarjan_scc(&adjacency);
    for c in &mut components {
        c.sort_unstable();
    }
    components.sort();

    let mut component_of = vec![0; n];
    for (c, verts) in components.iter().enumerate() {
        for &v in verts {
            component_of[v] = c;
        }
    }
    let condensation: BTreeSet<(usize, usize)> = g
        .arcs()
        .iter()
        .map(|a| (component_of[a.tail], component_of[a.head]))
        .filter(|(a, b)| a != b)
        .collect();
    let mut dominated = vec![false; components.len()];
    for &(_, b) in &condensation {
        dominated[b] = true;
    }
    let knots: Vec<Vec<usize>> = components
        .iter()
        .zip(&dominated)
        .filter(|(_, &d)| !d)
        .map(|(c, _)| c.clone())
        .collect();
    let mut knot_of = vec![None; n];
    for (k, verts) in knots.iter().enumerate() {
        for &v in verts {
            knot_of[v] = Some(k);
        }
    }

    let reach = g.reachability();
    let k_plus = (0..knots.len())
        .map(|k| {
            (0..n)
                .filter(|&v| {
                    reach[knots[k][0]][v]
                        && (0..knots.len()).all(|o| o == k || !reach[knots[o][0]][v])
                })
                .collect()
        })
        .collect();

    StructureDecomposition {
        components,
        component_of,
        condensation,
        knots,
        knot_of,
        k_plus,
        reach,
    }
}

/// Number of weakly connected components (union-find over arcs).
pub fn weak_component_count(g: &WeightedDigraph) -> usize {
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut parent: Vec<usize> = (0..g.n()).collect();
    let mut count = g.n();
    for a in g.arcs() {
        let (x, y) = (find(&mut parent, a.tail), find(&mut parent, a.head));
        if x != y {
            parent[x] = y;
            count -= 1;
        }
    }
    count
}

/// Iterative Tarjan; components come out in reverse topological order.
pub fn tarjan_scc(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    // (vertex, next neighbor position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adjacency[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}
