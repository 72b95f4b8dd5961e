//! Block construction of all maximum out forests, without enumerating the
//! whole forest space.
//!
//! 1. find the undominated knots `K_i` and the sets `K_i⁺`;
//! 2. span every `K_i⁺` by a diverging tree rooted inside `K_i`;
//! 3. split the remaining vertices into strong components `T_1..T_s`;
//! 4. for each `T_i`, draw external arcs into a nonempty set of distinct
//!    entry vertices;
//! 5. span `T_i` by a forest rooted exactly at those vertices, found by
//!    contracting them into one root and growing a tree from it;
//! 6. take the union of everything drawn.

use std::collections::BTreeSet;

use crate::digraph::WeightedDigraph;
use crate::error::{ForestMatError, Result};
use crate::forest::{enumerate_forests, Forest, ForestFamily, ParentSearch, DEFAULT_MAX_FORESTS};
use crate::scalar::Scalar;
use crate::structure::{decompose, tarjan_scc};

type ArcSet = Vec<(usize, usize)>;

pub fn max_out_forests_block(g: &WeightedDigraph) -> Result<ForestFamily> {
    max_out_forests_block_capped(g, DEFAULT_MAX_FORESTS)
}

pub fn max_out_forests_block_capped(g: &WeightedDigraph, cap: u128) -> Result<ForestFamily> {
    let n = g.n();
    let d = decompose(g);
    let mut blocks: Vec<Vec<ArcSet>> = Vec::new();

    // Step 2.
    let mut covered = vec![false; n];
    for (knot, plus) in d.knots.iter().zip(&d.k_plus) {
        for &v in plus {
            covered[v] = true;
        }
        blocks.push(rooted_trees(g, plus, knot, cap)?);
    }

    // Step 3.
    let rest: Vec<usize> = (0..n).filter(|&v| !covered[v]).collect();
    let mut local = vec![usize::MAX; n];
    for (k, &v) in rest.iter().enumerate() {
        local[v] = k;
    }
    let adjacency: Vec<Vec<usize>> = rest
        .iter()
        .map(|&v| {
            g.out_arcs(v)
                .filter(|a| !covered[a.head])
                .map(|a| local[a.head])
                .collect()
        })
        .collect();
    let mut strong: Vec<Vec<usize>> = tarjan_scc(&adjacency)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|k| rest[k]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    strong.sort();

    // Steps 4 and 5a.
    for component in &strong {
        blocks.push(entered_component_forests(g, component, cap)?);
    }

    // Step 6.
    let estimate = blocks
        .iter()
        .fold(1u128, |acc, b| acc.saturating_mul(b.len() as u128));
    if estimate > cap {
        return Err(ForestMatError::ExplosionGuard { estimate, cap });
    }
    let mut members = vec![ArcSet::new()];
    for block in &blocks {
        let mut next = Vec::with_capacity(members.len() * block.len());
        for base in &members {
            for extra in block {
                let mut arcs = base.clone();
                arcs.extend_from_slice(extra);
                next.push(arcs);
            }
        }
        members = next;
    }
    let mut members: Vec<Forest> = members.iter().map(|arcs| Forest::from_arcs(n, arcs)).collect();
    members.sort();
    members.dedup();
    Ok(ForestFamily {
        k: n - d.forest_dimension(),
        members,
    })
}

/// Spanning diverging trees of the restriction to `span` whose root lies in `roots`.
fn rooted_trees(g: &WeightedDigraph, span: &[usize], roots: &[usize], cap: u128) -> Result<Vec<ArcSet>> {
    let position = |v: usize| span.binary_search(&v).ok();
    let options: Vec<Vec<(usize, usize)>> = span
        .iter()
        .map(|&v| {
            g.in_arcs(v)
                .filter_map(|a| position(a.tail).map(|p| (p, a.tail)))
                .collect()
        })
        .collect();
    let root_allowed: Vec<bool> = span.iter().map(|v| roots.contains(v)).collect();
    collect_bounded(
        &ParentSearch {
            options: &options,
            root_allowed: &root_allowed,
            roots: Some(1),
            arcs: None,
        },
        span,
        cap,
    )
}

/// Runs a search over nodes that map onto `heads` and returns the arc sets.
fn collect_bounded(search: &ParentSearch<'_>, heads: &[usize], cap: u128) -> Result<Vec<ArcSet>> {
    let mut out = Vec::new();
    let mut overflow = false;
    search.run(&mut |choice| {
        if overflow {
            return;
        }
        if out.len() as u128 >= cap {
            overflow = true;
            return;
        }
        let arcs: ArcSet = choice
            .iter()
            .zip(heads)
            .filter_map(|(c, &h)| c.map(|(_, tail)| (tail, h)))
            .collect();
        out.push(arcs);
    });
    if overflow {
        return Err(ForestMatError::ExplosionGuard {
            estimate: cap + 1,
            cap,
        });
    }
    Ok(out)
}

/// Steps 4 and 5a for one remaining strong component.
fn entered_component_forests(g: &WeightedDigraph, component: &[usize], cap: u128) -> Result<Vec<ArcSet>> {
    let inside = |v: usize| component.binary_search(&v).is_ok();
    let entries: Vec<usize> = component
        .iter()
        .copied()
        .filter(|&v| g.in_arcs(v).any(|a| !inside(a.tail)))
        .collect();
    if entries.len() >= 63 {
        return Err(ForestMatError::ExplosionGuard {
            estimate: u128::MAX,
            cap,
        });
    }
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << entries.len()) {
        let chosen: Vec<usize> = (0..entries.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| entries[b])
            .collect();
        let inner = contracted_trees(g, component, &chosen, cap)?;
        if inner.is_empty() {
            continue;
        }
        for external in external_choices(g, component, &chosen) {
            for tree in &inner {
                let mut arcs = external.clone();
                arcs.extend_from_slice(tree);
                out.push(arcs);
                if out.len() as u128 > cap {
                    return Err(ForestMatError::ExplosionGuard {
                        estimate: out.len() as u128,
                        cap,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// One external arc into each chosen vertex, all combinations.
fn external_choices(g: &WeightedDigraph, component: &[usize], chosen: &[usize]) -> Vec<ArcSet> {
    let inside = |v: usize| component.binary_search(&v).is_ok();
    let mut combos = vec![ArcSet::new()];
    for &v in chosen {
        let tails: Vec<usize> = g.in_arcs(v).map(|a| a.tail).filter(|&t| !inside(t)).collect();
        let mut next = Vec::with_capacity(combos.len() * tails.len());
        for base in &combos {
            for &t in &tails {
                let mut arcs = base.clone();
                arcs.push((t, v));
                next.push(arcs);
            }
        }
        combos = next;
    }
    combos
}

/// Forests of the component rooted exactly at `chosen`: identify `chosen`
/// into one node `t*` (node 0), grow diverging trees from it, and map arcs
/// leaving `t*` back to the vertex they came from.
fn contracted_trees(g: &WeightedDigraph, component: &[usize], chosen: &[usize], cap: u128) -> Result<Vec<ArcSet>> {
    let others: Vec<usize> = component
        .iter()
        .copied()
        .filter(|v| !chosen.contains(v))
        .collect();
    let node_of = |v: usize| -> Option<usize> {
        if chosen.contains(&v) {
            Some(0)
        } else {
            others.binary_search(&v).ok().map(|k| k + 1)
        }
    };
    let mut options: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for &v in &others {
        options.push(
            g.in_arcs(v)
                .filter_map(|a| node_of(a.tail).map(|node| (node, a.tail)))
                .collect(),
        );
    }
    let mut root_allowed = vec![false; others.len() + 1];
    root_allowed[0] = true;
    let mut heads = vec![usize::MAX];
    heads.extend_from_slice(&others);
    collect_bounded(
        &ParentSearch {
            options: &options,
            root_allowed: &root_allowed,
            roots: Some(1),
            arcs: None,
        },
        &heads,
        cap,
    )
}

/// Checks `F_{n-v} = T ⊙ P` for an undominated knot `K`, where `T` are the
/// spanning trees of the knot and `P` the maximum out forests of the digraph
/// with the knot's internal arcs removed, together with
/// `ε(F_{n-v}) = ε(T)·ε(P)`.
pub fn decompose_check<T: Scalar>(g: &WeightedDigraph, knot: &[usize]) -> Result<bool> {
    let d = decompose(g);
    let mut knot_sorted = knot.to_vec();
    knot_sorted.sort_unstable();
    knot_sorted.dedup();
    if !d.knots.contains(&knot_sorted) {
        return Err(ForestMatError::NotAKnot);
    }
    let n = g.n();
    let maximum = enumerate_forests(g, n - d.forest_dimension())?;

    let trees = rooted_trees(g, &knot_sorted, &knot_sorted, DEFAULT_MAX_FORESTS)?;
    let outside = g.without_arcs_within(&knot_sorted);
    let rest = max_out_forests_block(&outside)?;

    let combined: BTreeSet<ArcSet> = trees
        .iter()
        .flat_map(|t| {
            rest.members.iter().map(move |p| {
                let mut arcs = t.clone();
                arcs.extend_from_slice(p.arcs());
                arcs.sort_unstable();
                arcs
            })
        })
        .collect();
    if combined != maximum.arc_sets() || combined.len() != trees.len() * rest.len() {
        return Ok(false);
    }

    let tree_weight = trees.iter().fold(T::zero(), |acc, arcs| {
        acc + Forest::from_arcs(n, arcs).weight::<T>(g)
    });
    let lhs: T = maximum.total_weight(g);
    let rhs = tree_weight * rest.total_weight::<T>(&outside);
    let scale = lhs.to_f64().abs().max(rhs.to_f64().abs());
    Ok((lhs - rhs).near_zero(1e-9 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use num_rational::BigRational;

    #[test]
    fn path_has_single_tree() {
        let fam = max_out_forests_block(&fixtures::unit_path(3)).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.members[0].arcs(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn two_sources_and_two_cycle() {
        let fam = max_out_forests_block(&fixtures::two_sources()).unwrap();
        assert_eq!(fam.k, 1);
        assert_eq!(fam.arc_sets(), BTreeSet::from([vec![(0, 2)], vec![(1, 2)]]));
        let fam = max_out_forests_block(&fixtures::unit_two_cycle()).unwrap();
        assert_eq!(fam.arc_sets(), BTreeSet::from([vec![(0, 1)], vec![(1, 0)]]));
    }

    #[test]
    fn block_matches_enumeration_on_example13() {
        let g = fixtures::example13();
        let block = max_out_forests_block(&g).unwrap();
        let brute = enumerate_forests(&g, 11).unwrap();
        assert_eq!(block, brute);
    }

    #[test]
    fn decomposition_examples() {
        assert!(decompose_check::<f64>(&fixtures::unit_two_cycle(), &[0, 1]).unwrap());
        assert!(decompose_check::<BigRational>(&fixtures::two_sources(), &[0]).unwrap());
        assert!(decompose_check::<BigRational>(&fixtures::example13(), &[2, 5, 9]).unwrap());
        assert_eq!(
            decompose_check::<f64>(&fixtures::two_sources(), &[2]),
            Err(ForestMatError::NotAKnot)
        );
    }
}
