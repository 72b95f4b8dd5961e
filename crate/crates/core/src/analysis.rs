//! Structure read off the normalized maximum-forest matrix: knots, block
//! form, thresholded zero patterns and algebraic reachability.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::digraph::WeightedDigraph;
use crate::error::{ForestMatError, Result};
use crate::matrix::Matrix;
use crate::polynomial::{jbar, q_tau, JBarMatrix};
use crate::scalar::Scalar;

/// Entries of `(I + τL)⁻¹` above this count as nonzero in [`reachability_matrix`].
pub const REACH_TOL: f64 = 1e-12;

/// Largest `det(I + L)` handled on the float path of [`pattern_by_threshold`].
pub const THRESHOLD_FLOAT_LIMIT: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Index into the report's knot list.
    Knot(usize),
    /// Knot indices the vertex is reachable from.
    ReachableFrom(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport<T> {
    pub knots: Vec<Vec<usize>>,
    /// `permutation[a]` is the vertex placed at position `a`.
    pub permutation: Vec<usize>,
    pub jbar: JBarMatrix<T>,
    /// `Ĵ` with rows and columns in `permutation` order.
    pub jbar_blocked: Matrix<T>,
    pub membership: Vec<Membership>,
    pub reachability: Matrix<bool>,
    pub mutual_reachability: Matrix<bool>,
}

impl<T: Scalar> StructureReport<T> {
    pub fn knot_sizes(&self) -> Vec<usize> {
        self.knots.iter().map(Vec::len).collect()
    }

    /// Strong components as read from the mutual reachability rows.
    pub fn strong_components(&self) -> Vec<Vec<usize>> {
        mutual_classes(&self.mutual_reachability)
    }
}

pub fn structure_report<T: Scalar>(g: &WeightedDigraph) -> Result<StructureReport<T>> {
    let j = jbar::<T>(g)?;
    let n = g.n();

    // Columns of the certified pattern: nonzero ones mark the knot union, and
    // two such columns belong to one knot iff their supports coincide.
    let mut by_column: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for col in 0..n {
        let pattern = j.support.column(col);
        if pattern.iter().any(|&b| b) {
            by_column.entry(pattern).or_default().push(col);
        }
    }
    let mut knots: Vec<Vec<usize>> = by_column.into_values().collect();
    knots.sort();
    if knots != j.structure.knots {
        return Err(ForestMatError::StructureMismatch(format!(
            "column pattern gives knots {:?}, decomposition gives {:?}",
            one_based(&knots),
            one_based(&j.structure.knots)
        )));
    }

    let mut knot_of = vec![None; n];
    for (k, members) in knots.iter().enumerate() {
        for &v in members {
            knot_of[v] = Some(k);
        }
    }
    let membership: Vec<Membership> = (0..n)
        .map(|v| match knot_of[v] {
            Some(k) => Membership::Knot(k),
            None => Membership::ReachableFrom(
                (0..knots.len())
                    .filter(|&k| j.support[(v, knots[k][0])])
                    .collect(),
            ),
        })
        .collect();

    let mut permutation: Vec<usize> = knots.iter().flatten().copied().collect();
    let mut rest: Vec<(usize, Vec<usize>, usize)> = membership
        .iter()
        .enumerate()
        .filter_map(|(v, m)| match m {
            Membership::ReachableFrom(from) => Some((from.len(), from.clone(), v)),
            Membership::Knot(_) => None,
        })
        .collect();
    rest.sort();
    permutation.extend(rest.into_iter().map(|(_, _, v)| v));

    let jbar_blocked = j.entries.permuted(&permutation);
    let reachability = reachability_matrix(g)?;
    let mutual_reachability =
        Matrix::from_fn(n, n, |a, b| reachability[(a, b)] && reachability[(b, a)]);
    Ok(StructureReport {
        knots,
        permutation,
        jbar: j,
        jbar_blocked,
        membership,
        reachability,
        mutual_reachability,
    })
}

fn one_based(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    sets.iter().map(|s| s.iter().map(|v| v + 1).collect()).collect()
}

/// Checks the block shape of a permuted `Ĵ`: columns past the knot union
/// vanish, and the leading square block is block diagonal with strictly
/// positive diagonal blocks of the given sizes.
pub fn is_block_form<T: Scalar>(blocked: &Matrix<T>, knot_sizes: &[usize]) -> bool {
    let n = blocked.rows();
    let head: usize = knot_sizes.iter().sum();
    if !blocked.is_square() || head > n {
        return false;
    }
    let mut block_of = Vec::with_capacity(head);
    for (b, &size) in knot_sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, size));
    }
    for r in 0..n {
        for c in 0..n {
            let x = &blocked[(r, c)];
            let ok = if c >= head {
                x.is_zero()
            } else if r < head {
                if block_of[r] == block_of[c] {
                    *x > T::zero()
                } else {
                    x.is_zero()
                }
            } else {
                *x >= T::zero()
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Positions of the entries of `(I + f²L)⁻¹` exceeding `1/f`, with
/// `f = det(I + L)`; these are exactly the nonzero entries of `Ĵ` for
/// digraphs with unit weights.
pub fn pattern_by_threshold(g: &WeightedDigraph) -> Result<Matrix<bool>> {
    if let Some(a) = g.arcs().iter().find(|a| !a.weight.is_unit()) {
        return Err(ForestMatError::NonUnitWeights {
            tail: a.tail,
            head: a.head,
        });
    }
    let n = g.n();
    let l = g.kirchhoff::<BigRational>();
    let f = Matrix::identity(n).add(&l).determinant();
    if f.is_one() {
        // No arcs: (I + τL)⁻¹ = I sits exactly on the threshold.
        return Ok(Matrix::from_fn(n, n, |i, j| i == j));
    }
    let f_float = ToPrimitive::to_f64(&f).unwrap_or(f64::INFINITY);
    if f_float <= THRESHOLD_FLOAT_LIMIT {
        if let Some(pattern) = float_threshold(g, f_float) {
            return Ok(pattern);
        }
    }
    let tau = f.clone() * f.clone();
    let q = q_tau(&l, &tau)?;
    let cut = BigRational::one() / f;
    Ok(q.map(|x| *x > cut))
}

/// Float evaluation; `None` when an entry lands too close to the cut to
/// trust its side.
fn float_threshold(g: &WeightedDigraph, f: f64) -> Option<Matrix<bool>> {
    let n = g.n();
    let tau = f * f;
    let l = g.kirchhoff::<f64>();
    let q = q_tau(&l, &tau).ok()?;
    let max_diag = (0..n).map(|i| l[(i, i)]).fold(0.0, f64::max);
    let band = 4.0 * n as f64 * (1.0 + 2.0 * tau * max_diag) * f64::EPSILON;
    let cut = 1.0 / f;
    let mut out = Matrix::filled(n, n, false);
    for i in 0..n {
        for j in 0..n {
            let gap = q[(i, j)] - cut;
            if gap.abs() <= band {
                return None;
            }
            out[(i, j)] = gap > 0.0;
        }
    }
    Some(out)
}

/// `r[(i, j)]`: `j` is reachable from `i`, read off `(I + L)⁻¹` transposed.
pub fn reachability_matrix(g: &WeightedDigraph) -> Result<Matrix<bool>> {
    reachability_matrix_at(g, 1.0)
}

pub fn reachability_matrix_at(g: &WeightedDigraph, tau: f64) -> Result<Matrix<bool>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ForestMatError::DimensionMismatch(format!("τ = {tau} must be positive")));
    }
    let q = q_tau(&g.kirchhoff::<f64>(), &tau)?;
    Ok(q.transpose().map(|&x| x > REACH_TOL))
}

pub fn mutual_reachability_matrix(g: &WeightedDigraph) -> Result<Matrix<bool>> {
    let r = reachability_matrix(g)?;
    let n = r.rows();
    Ok(Matrix::from_fn(n, n, |i, j| r[(i, j)] && r[(j, i)]))
}

/// Classes of a symmetric reflexive relation, each sorted, ordered by
/// smallest member.
pub fn mutual_classes(m: &Matrix<bool>) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| m[(i, j)]).collect();
        for &j in &class {
            seen[j] = true;
        }
        classes.push(class);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Weight;
    use crate::fixtures;

    fn bools(rows: &[&[u8]]) -> Matrix<bool> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect())
    }

    #[test]
    fn example13_report() {
        let r = structure_report::<f64>(&fixtures::example13()).unwrap();
        assert_eq!(r.knots, vec![vec![2, 5, 9], vec![3, 6, 10, 12]]);
        let one_based: Vec<usize> = r.permutation.iter().map(|v| v + 1).collect();
        assert_eq!(one_based, vec![3, 6, 10, 4, 7, 11, 13, 2, 8, 12, 1, 5, 9]);
        for v in [0, 4, 8] {
            assert_eq!(r.membership[v], Membership::ReachableFrom(vec![0, 1]));
        }
        for v in [1, 7, 11] {
            assert_eq!(r.membership[v], Membership::ReachableFrom(vec![1]));
        }
        assert!(is_block_form(&r.jbar_blocked, &r.knot_sizes()));
        assert_eq!(
            r.strong_components(),
            vec![vec![0, 4, 8], vec![1, 7, 11], vec![2, 5, 9], vec![3, 6, 10, 12]]
        );
    }

    #[test]
    fn small_reports() {
        let r = structure_report::<BigRational>(&WeightedDigraph::edgeless(3).unwrap()).unwrap();
        assert_eq!(r.knots, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(r.jbar_blocked, Matrix::identity(3));
        let r = structure_report::<f64>(&fixtures::single_arc("1")).unwrap();
        assert_eq!(r.knots, vec![vec![0]]);
        assert_eq!(r.membership[1], Membership::ReachableFrom(vec![0]));
    }

    #[test]
    fn block_form_rejects_bad_shapes() {
        let good = Matrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert!(is_block_form(&good, &[1]));
        assert!(!is_block_form(&good, &[2]));
        let leak = Matrix::from_rows(vec![vec![1.0, 0.1], vec![1.0, 0.0]]);
        assert!(!is_block_form(&leak, &[1]));
    }

    #[test]
    fn threshold_examples() {
        let p = pattern_by_threshold(&fixtures::unit_path(3)).unwrap();
        assert_eq!(p, bools(&[&[1, 0, 0], &[1, 0, 0], &[1, 0, 0]]));
        let p = pattern_by_threshold(&fixtures::unit_two_cycle()).unwrap();
        assert_eq!(p, Matrix::filled(2, 2, true));
        let p = pattern_by_threshold(&WeightedDigraph::edgeless(2).unwrap()).unwrap();
        assert_eq!(p, bools(&[&[1, 0], &[0, 1]]));
        assert!(matches!(
            pattern_by_threshold(&fixtures::single_arc("2")),
            Err(ForestMatError::NonUnitWeights { tail: 0, head: 1 })
        ));
    }

    #[test]
    fn threshold_exact_path_agrees() {
        // Complete unit digraph on 8 vertices behind a source, with a pendant.
        let mut arcs: Vec<(usize, usize, Weight)> = Vec::new();
        for a in 0..8 {
            for b in 0..8 {
                if a != b {
                    arcs.push((a, b, Weight::unit()));
                }
            }
        }
        arcs.push((8, 0, Weight::unit()));
        arcs.push((3, 9, Weight::unit()));
        let g = WeightedDigraph::new(10, arcs).unwrap();
        let f = Matrix::identity(10)
            .add(&g.kirchhoff::<BigRational>())
            .determinant();
        assert!(ToPrimitive::to_f64(&f).unwrap() > THRESHOLD_FLOAT_LIMIT);
        let p = pattern_by_threshold(&g).unwrap();
        assert_eq!(p, jbar::<BigRational>(&g).unwrap().support);
    }

    #[test]
    fn reachability_examples() {
        let r = reachability_matrix(&fixtures::unit_path(3)).unwrap();
        assert_eq!(r, bools(&[&[1, 1, 1], &[0, 1, 1], &[0, 0, 1]]));
        let r = reachability_matrix(&fixtures::unit_two_cycle()).unwrap();
        assert_eq!(r, Matrix::filled(2, 2, true));
        let r = reachability_matrix(&fixtures::two_sources()).unwrap();
        assert_eq!(r, bools(&[&[1, 0, 1], &[0, 1, 1], &[0, 0, 1]]));
    }
}
