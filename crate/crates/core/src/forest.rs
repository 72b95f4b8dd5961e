//! Spanning diverging forests: validity, brute-force enumeration and the
//! forest weight tables the closed-form routes are checked against.

use std::collections::BTreeSet;

use crate::digraph::WeightedDigraph;
use crate::error::{ForestMatError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Default cap on the number of candidate forests an enumeration may visit.
pub const DEFAULT_MAX_FORESTS: u128 = 10_000_000;

/// Spanning diverging forest, stored as each vertex's incoming arc tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Forest {
    // Field order drives the derived ordering: the sorted arc list first.
    arcs: Vec<(usize, usize)>,
    parent: Vec<Option<usize>>,
}

impl Forest {
    /// Caller guarantees the parent map is acyclic.
    pub(crate) fn from_parent(parent: Vec<Option<usize>>) -> Self {
        let mut arcs: Vec<(usize, usize)> = parent
            .iter()
            .enumerate()
            .filter_map(|(head, p)| p.map(|tail| (tail, head)))
            .collect();
        arcs.sort_unstable();
        Forest { arcs, parent }
    }

    pub(crate) fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let mut parent = vec![None; n];
        for &(t, h) in arcs {
            debug_assert!(parent[h].is_none(), "indegree above one");
            parent[h] = Some(t);
        }
        Self::from_parent(parent)
    }

    /// Arcs sorted by `(tail, head)`.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&v| self.parent[v].is_none()).collect()
    }

    /// Root of the tree containing `v`.
    pub fn root_of(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v] {
            v = p;
        }
        v
    }

    /// Whether `to` lies in the subtree of `from`.
    pub fn reaches(&self, from: usize, mut to: usize) -> bool {
        loop {
            if to == from {
                return true;
            }
            match self.parent[to] {
                Some(p) => to = p,
                None => return false,
            }
        }
    }

    pub fn contains(&self, tail: usize, head: usize) -> bool {
        self.parent[head] == Some(tail)
    }

    /// Product of arc weights; the arcless forest weighs one.
    pub fn weight<T: Scalar>(&self, g: &WeightedDigraph) -> T {
        self.arcs.iter().fold(T::one(), |acc, &(t, h)| {
            acc * g.arc(t, h).expect("forest arc in digraph").weight.as_scalar::<T>()
        })
    }
}

/// All spanning diverging forests with `k` arcs, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestFamily {
    pub k: usize,
    pub members: Vec<Forest>,
}

impl ForestFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sum of member weights; zero for the empty family.
    pub fn total_weight<T: Scalar>(&self, g: &WeightedDigraph) -> T {
        self.members
            .iter()
            .fold(T::zero(), |acc, f| acc + f.weight::<T>(g))
    }

    pub fn arc_sets(&self) -> BTreeSet<Vec<(usize, usize)>> {
        self.members.iter().map(|f| f.arcs.to_vec()).collect()
    }
}

/// Indegree at most one everywhere and no circuit.
pub fn is_diverging_forest(g: &WeightedDigraph, arcs: &[(usize, usize)]) -> Result<bool> {
    let mut parent = vec![None; g.n()];
    for &(tail, head) in arcs {
        if !g.has_arc(tail, head) {
            return Err(ForestMatError::ArcNotInDigraph { tail, head });
        }
        if parent[head].is_some() {
            return Ok(false);
        }
        parent[head] = Some(tail);
    }
    Ok((0..g.n()).all(|v| !on_cycle(&parent, v)))
}

fn on_cycle(parent: &[Option<usize>], start: usize) -> bool {
    let mut v = start;
    for _ in 0..parent.len() {
        match parent[v] {
            Some(p) if p == start => return true,
            Some(p) => v = p,
            None => return false,
        }
    }
    false
}

/// Depth-first search over "each node picks one incoming option or none".
///
/// Nodes live in a search graph that may differ from the digraph (contracted
/// blocks); every option carries the node it comes from plus an opaque
/// payload reported back to the visitor.
pub(crate) struct ParentSearch<'a> {
    pub options: &'a [Vec<(usize, usize)>],
    pub root_allowed: &'a [bool],
    pub roots: Option<usize>,
    pub arcs: Option<usize>,
}

/// One parent choice per vertex; `None` makes the vertex a root.
type Choice = Option<(usize, usize)>;

impl ParentSearch<'_> {
    pub fn run(&self, visit: &mut dyn FnMut(&[Choice])) {
        let nodes = self.options.len();
        let mut choice = vec![None; nodes];
        self.descend(0, 0, 0, &mut choice, visit);
    }

    fn descend(
        &self,
        node: usize,
        roots: usize,
        arcs: usize,
        choice: &mut Vec<Choice>,
        visit: &mut dyn FnMut(&[Choice]),
    ) {
        let nodes = self.options.len();
        let remaining = nodes - node;
        if let Some(r) = self.roots {
            if roots > r || roots + remaining < r {
                return;
            }
        }
        if let Some(k) = self.arcs {
            if arcs > k || arcs + remaining < k {
                return;
            }
        }
        if node == nodes {
            visit(choice);
            return;
        }
        if self.root_allowed[node] {
            choice[node] = None;
            self.descend(node + 1, roots + 1, arcs, choice, visit);
        }
        for &(from, payload) in &self.options[node] {
            if closes_cycle(choice, from, node) {
                continue;
            }
            choice[node] = Some((from, payload));
            self.descend(node + 1, roots, arcs + 1, choice, visit);
        }
        choice[node] = None;
    }
}

/// Would giving `node` the parent `from` close a circuit? Unassigned nodes
/// (index >= `node`) have no parent yet.
fn closes_cycle(choice: &[Option<(usize, usize)>], mut from: usize, node: usize) -> bool {
    loop {
        if from == node {
            return true;
        }
        if from > node {
            return false;
        }
        match choice[from] {
            Some((p, _)) => from = p,
            None => return false,
        }
    }
}

/// Brute-force enumerator with an explosion guard.
#[derive(Clone, Debug)]
pub struct ForestEnumerator<'g> {
    g: &'g WeightedDigraph,
    cap: u128,
}

impl<'g> ForestEnumerator<'g> {
    pub fn new(g: &'g WeightedDigraph) -> Self {
        ForestEnumerator {
            g,
            cap: DEFAULT_MAX_FORESTS,
        }
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    /// Size of the search space, `prod (indegree + 1)`.
    pub fn estimate(&self) -> u128 {
        (0..self.g.n()).fold(1u128, |acc, v| {
            acc.saturating_mul(self.g.in_degree(v) as u128 + 1)
        })
    }

    fn guard(&self) -> Result<()> {
        let estimate = self.estimate();
        if estimate > self.cap {
            return Err(ForestMatError::ExplosionGuard {
                estimate,
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn search(&self, arcs: Option<usize>, visit: &mut dyn FnMut(Forest)) -> Result<()> {
        self.guard()?;
        let n = self.g.n();
        let options: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|v| self.g.in_arcs(v).map(|a| (a.tail, a.tail)).collect())
            .collect();
        let root_allowed = vec![true; n];
        ParentSearch {
            options: &options,
            root_allowed: &root_allowed,
            roots: None,
            arcs,
        }
        .run(&mut |choice| {
            visit(Forest::from_parent(choice.iter().map(|c| c.map(|(p, _)| p)).collect()))
        });
        Ok(())
    }

    /// Every spanning diverging forest, grouped by arc count `0..n`.
    pub fn all(&self) -> Result<Vec<ForestFamily>> {
        let n = self.g.n();
        let mut families: Vec<ForestFamily> = (0..n)
            .map(|k| ForestFamily {
                k,
                members: Vec::new(),
            })
            .collect();
        self.search(None, &mut |f| families[f.arc_count()].members.push(f))?;
        for fam in &mut families {
            fam.members.sort();
        }
        Ok(families)
    }

    pub fn forests(&self, k: usize) -> Result<ForestFamily> {
        let mut members = Vec::new();
        if k < self.g.n() {
            self.search(Some(k), &mut |f| members.push(f))?;
        }
        members.sort();
        Ok(ForestFamily { k, members })
    }

    /// Entry `(i, j)`: weight of `k`-arc forests in which `i` belongs to the
    /// tree diverging from `j`.
    pub fn weight_table<T: Scalar>(&self, k: usize) -> Result<Matrix<T>> {
        Ok(weight_table(self.g, &self.forests(k)?))
    }

    /// Weight of the forests whose root set is exactly `roots`.
    pub fn rooted_weight<T: Scalar>(&self, roots: &[usize]) -> Result<T> {
        let n = self.g.n();
        let mut wanted = roots.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        if wanted.is_empty() {
            return Ok(T::zero());
        }
        self.guard()?;
        let options: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|v| {
                if wanted.binary_search(&v).is_ok() {
                    Vec::new()
                } else {
                    self.g.in_arcs(v).map(|a| (a.tail, a.tail)).collect()
                }
            })
            .collect();
        let root_allowed: Vec<bool> = (0..n).map(|v| wanted.binary_search(&v).is_ok()).collect();
        let mut total = T::zero();
        ParentSearch {
            options: &options,
            root_allowed: &root_allowed,
            roots: Some(wanted.len()),
            arcs: None,
        }
        .run(&mut |choice| {
            let f = Forest::from_parent(choice.iter().map(|c| c.map(|(p, _)| p)).collect());
            total = total.clone() + f.weight::<T>(self.g);
        });
        Ok(total)
    }
}

/// Membership table of a family: entry `(i, j)` sums the weights of members
/// where `i` hangs below root `j`.
pub fn weight_table<T: Scalar>(g: &WeightedDigraph, family: &ForestFamily) -> Matrix<T> {
    let n = g.n();
    let mut table = Matrix::<T>::zeros(n, n);
    for f in &family.members {
        let w: T = f.weight(g);
        for i in 0..n {
            let j = f.root_of(i);
            table[(i, j)] = table[(i, j)].clone() + w.clone();
        }
    }
    table
}

pub fn enumerate_forests(g: &WeightedDigraph, k: usize) -> Result<ForestFamily> {
    ForestEnumerator::new(g).forests(k)
}

pub fn forest_weight_table<T: Scalar>(g: &WeightedDigraph, k: usize) -> Result<Matrix<T>> {
    ForestEnumerator::new(g).weight_table(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use num_rational::BigRational;

    #[test]
    fn validity_examples() {
        let g = fixtures::unit_two_cycle();
        assert!(is_diverging_forest(&g, &[(0, 1)]).unwrap());
        assert!(!is_diverging_forest(&g, &[(0, 1), (1, 0)]).unwrap());
        assert!(is_diverging_forest(&g, &[]).unwrap());
        assert_eq!(
            is_diverging_forest(&fixtures::single_arc("1"), &[(1, 0)]),
            Err(ForestMatError::ArcNotInDigraph { tail: 1, head: 0 })
        );
    }

    #[test]
    fn indegree_two_is_not_a_forest() {
        let g = fixtures::two_sources();
        assert!(!is_diverging_forest(&g, &[(0, 2), (1, 2)]).unwrap());
    }

    #[test]
    fn two_cycle_families() {
        let g = fixtures::unit_two_cycle();
        let one = enumerate_forests(&g, 1).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!(one.members[0].arcs(), &[(0, 1)]);
        assert_eq!(one.members[1].arcs(), &[(1, 0)]);
        assert_eq!(one.total_weight::<f64>(&g), 2.0);
        let two = enumerate_forests(&g, 2).unwrap();
        assert!(two.is_empty());
        assert_eq!(two.total_weight::<f64>(&g), 0.0);
    }

    #[test]
    fn two_sources_one_arc() {
        let g = fixtures::two_sources();
        let fam = enumerate_forests(&g, 1).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.total_weight::<f64>(&g), 2.0);
    }

    #[test]
    fn weight_tables() {
        let g = fixtures::unit_two_cycle();
        let t = forest_weight_table::<f64>(&g, 1).unwrap();
        assert_eq!(t.to_rows(), vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let t0 = forest_weight_table::<BigRational>(&fixtures::example13(), 0).unwrap();
        assert_eq!(t0, Matrix::identity(13));

        // Forests {(1,3)} and {(2,3)}: roots {1,2} and {2,1} with 3 hanging below.
        let t = forest_weight_table::<f64>(&fixtures::two_sources(), 1).unwrap();
        assert_eq!(
            t.to_rows(),
            vec![vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![1.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn rooted_weight_matches_filtering() {
        let g = fixtures::two_sources();
        let en = ForestEnumerator::new(&g);
        assert_eq!(en.rooted_weight::<f64>(&[0, 1]).unwrap(), 2.0);
        assert_eq!(en.rooted_weight::<f64>(&[0]).unwrap(), 0.0);
        assert_eq!(en.rooted_weight::<f64>(&[0, 1, 2]).unwrap(), 1.0);
    }

    #[test]
    fn explosion_guard_trips() {
        let g = fixtures::example13();
        let err = ForestEnumerator::new(&g).with_cap(10).forests(3).unwrap_err();
        assert!(matches!(err, ForestMatError::ExplosionGuard { cap: 10, .. }));
    }
}
