mod common;

use common::{digraphs, Weights};
use forestmat::{decompose, jbar, Matrix, Weight, WeightedDigraph};
use num_rational::BigRational;
use proptest::prelude::*;

const TOL: f64 = 1e-8;

fn stacked(l: &Matrix<f64>, j: &Matrix<f64>) -> Matrix<f64> {
    let n = l.rows();
    let jt = j.transpose();
    Matrix::from_fn(2 * n, n, |r, c| if r < n { l[(r, c)] } else { jt[(r - n, c)] })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stochastic_with_reachability_pattern(g in digraphs(7, Weights::Decimal)) {
        let j = jbar::<f64>(&g).unwrap();
        let d = decompose(&g);
        let n = g.n();
        for i in 0..n {
            let row = j.entries.row(i);
            prop_assert!(row.iter().all(|&x| x >= 0.0));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            for c in 0..n {
                let expected = d.in_knot_union(c) && d.reach[c][i];
                prop_assert_eq!(j.support[(i, c)], expected);
                prop_assert_eq!(j.entries[(i, c)] > 0.0, expected);
            }
        }
    }

    #[test]
    fn knot_columns(g in digraphs(7, Weights::Decimal)) {
        let j = jbar::<f64>(&g).unwrap();
        let d = &j.structure;
        for (k, knot) in d.knots.iter().enumerate() {
            let diag: f64 = knot.iter().map(|&v| j.entries[(v, v)]).sum();
            prop_assert!((diag - 1.0).abs() <= 1e-9);
            for &c in knot {
                for &i in &d.k_plus[k] {
                    prop_assert!((j.entries[(i, c)] - j.entries[(c, c)]).abs() <= TOL);
                }
            }
            // Columns of one knot are proportional.
            let a = knot[0];
            for &b in knot {
                for i in 0..g.n() {
                    let cross = j.entries[(i, a)] * j.entries[(b, b)] - j.entries[(i, b)] * j.entries[(a, a)];
                    prop_assert!(cross.abs() <= TOL);
                }
            }
        }
    }

    #[test]
    fn diagonal_dominates_columns(g in digraphs(7, Weights::Decimal)) {
        let j = jbar::<f64>(&g).unwrap().entries;
        let n = g.n();
        for c in 0..n {
            for i in 0..n {
                prop_assert!(j[(c, c)] >= j[(i, c)] - TOL);
                if j[(c, i)] > TOL {
                    prop_assert!((j[(c, c)] - j[(i, c)]).abs() <= TOL);
                }
            }
        }
    }

    #[test]
    fn idempotent_and_annihilates_kirchhoff(g in digraphs(7, Weights::Decimal)) {
        let j = jbar::<f64>(&g).unwrap().entries;
        let l = g.kirchhoff::<f64>();
        prop_assert!(j.matmul(&j).max_abs_diff(&j) <= TOL);
        prop_assert!(l.matmul(&j).max_abs() <= TOL);
        prop_assert!(j.matmul(&l).max_abs() <= TOL);
    }

    #[test]
    fn exact_identities(g in digraphs(6, Weights::Integer)) {
        let j = jbar::<BigRational>(&g).unwrap().entries;
        let l = g.kirchhoff::<BigRational>();
        let zero = Matrix::zeros(g.n(), g.n());
        prop_assert_eq!(j.matmul(&j), j.clone());
        prop_assert_eq!(l.matmul(&j), zero.clone());
        prop_assert_eq!(j.matmul(&l), zero);
    }

    #[test]
    fn ranks_split_the_space(g in digraphs(7, Weights::Decimal)) {
        let j = jbar::<f64>(&g).unwrap();
        let l = g.kirchhoff::<f64>();
        let n = g.n();
        let v = j.forest_dimension();
        prop_assert_eq!(l.numerical_rank(1e-7), n - v);
        prop_assert_eq!(j.entries.numerical_rank(1e-7), v);
        prop_assert_eq!(stacked(&l, &j.entries).numerical_rank(1e-7), n);
    }

    #[test]
    fn invariant_under_uniform_scaling(g in digraphs(7, Weights::Decimal), k in 1u32..50) {
        let factor = Weight::new(BigRational::new(k.into(), 7.into())).unwrap();
        let a = jbar::<BigRational>(&g).unwrap().entries;
        let b = jbar::<BigRational>(&g.scaled(&factor)).unwrap().entries;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn edgeless_gives_identity() {
    for n in 2..6 {
        let j = jbar::<f64>(&WeightedDigraph::edgeless(n).unwrap()).unwrap();
        assert_eq!(j.entries, Matrix::identity(n));
        assert_eq!(j.forest_dimension(), n);
    }
}
