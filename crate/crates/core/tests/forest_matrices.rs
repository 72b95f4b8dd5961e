mod common;

use common::{digraphs, Weights};
use forestmat::fixtures::{self, EXAMPLE13_JBAR};
use forestmat::{
    decompose, forest_minor_weight, forest_polynomial, forest_weight_table, jbar, jbar_via_limit,
    q_tau, ForestEnumerator, ForestPolynomial, Matrix, WeightedDigraph,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn proper_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n) - 1).map(move |mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect())
}

#[test]
fn example13_matches_reference_matrix() {
    let j = jbar::<f64>(&fixtures::example13()).unwrap();
    for (i, row) in EXAMPLE13_JBAR.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            let got = j.entries[(i, c)];
            assert!((got - want).abs() <= 5e-4, "({}, {}): {got} vs {want}", i + 1, c + 1);
        }
    }
    assert_eq!(j.forest_dimension(), 2);
}

#[test]
fn example13_exact_and_float_agree() {
    let g = fixtures::example13();
    let exact = jbar::<BigRational>(&g).unwrap();
    let float = jbar::<f64>(&g).unwrap();
    let gap = exact.entries.to_f64().max_abs_diff(&float.entries);
    assert!(gap < 1e-9, "gap {gap:e}");
    assert_eq!(exact.support, float.support);
}

#[test]
fn example13_limit_route_agrees() {
    let g = fixtures::example13();
    let limit = jbar_via_limit(&g.kirchhoff::<f64>()).unwrap();
    let direct = jbar::<f64>(&g).unwrap().entries;
    assert!(limit.max_abs_diff(&direct) < 1e-6);
}

#[test]
fn example13_polynomial_matches_enumeration() {
    let g = fixtures::example13();
    let p = forest_polynomial::<BigRational>(&g).unwrap();
    let top = g.n() - p.v;
    assert_eq!(p.maximum(), &forest_weight_table::<BigRational>(&g, top).unwrap());
}

#[test]
fn tail_of_polynomial_vanishes() {
    let g = WeightedDigraph::edgeless(4).unwrap();
    let p = forest_polynomial::<f64>(&g).unwrap();
    assert_eq!(p.sigma, vec![1.0, 0.0, 0.0, 0.0]);
    assert!(p.q[1..].iter().all(|q| *q == Matrix::zeros(4, 4)));
}

#[test]
fn wrong_dimension_is_detected() {
    let l = fixtures::example13().kirchhoff::<BigRational>();
    assert!(ForestPolynomial::from_kirchhoff(&l, 1).is_err());
    assert!(ForestPolynomial::from_kirchhoff(&l, 3).is_err());
    assert!(ForestPolynomial::from_kirchhoff(&l, 2).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn polynomial_equals_enumeration(g in digraphs(6, Weights::Integer)) {
        let p = forest_polynomial::<BigRational>(&g).unwrap();
        let e = ForestEnumerator::new(&g);
        for (k, family) in e.all().unwrap().iter().enumerate() {
            if k >= g.n() {
                prop_assert!(family.is_empty());
                continue;
            }
            prop_assert_eq!(&p.sigma[k], &family.total_weight::<BigRational>(&g));
            prop_assert_eq!(&p.q[k], &e.weight_table::<BigRational>(k).unwrap());
        }
    }

    #[test]
    fn float_polynomial_tracks_exact(g in digraphs(7, Weights::Decimal)) {
        let exact = forest_polynomial::<BigRational>(&g).unwrap();
        let float = forest_polynomial::<f64>(&g).unwrap();
        for (qe, qf) in exact.q.iter().zip(&float.q) {
            let qe = qe.to_f64();
            let scale = qe.max_abs().max(1.0);
            prop_assert!(qe.max_abs_diff(qf) <= 1e-9 * scale);
        }
        let sigma = exact.sigma.iter().map(forestmat::Scalar::to_f64);
        for (se, sf) in sigma.zip(&float.sigma) {
            prop_assert!((se - sf).abs() <= 1e-9 * se.abs().max(1.0));
        }
    }

    #[test]
    fn polynomial_coefficients_are_nonnegative(g in digraphs(7, Weights::Decimal)) {
        let p = forest_polynomial::<BigRational>(&g).unwrap();
        let zero = BigRational::from_integer(0.into());
        prop_assert!(p.sigma.iter().all(|s| *s >= zero));
        prop_assert!(p.q.iter().all(|q| q.iter().all(|x| *x >= zero)));
        prop_assert!(p.sigma_max() > &zero);
        prop_assert_eq!(p.v, decompose(&g).forest_dimension());
    }

    #[test]
    fn minor_counts_rooted_forests(g in digraphs(6, Weights::Integer)) {
        let l = g.kirchhoff::<BigRational>();
        let e = ForestEnumerator::new(&g);
        for phi in proper_subsets(g.n()) {
            prop_assert_eq!(
                forest_minor_weight(&l, &phi).unwrap(),
                e.rooted_weight::<BigRational>(&phi).unwrap()
            );
        }
    }

    #[test]
    fn resolvent_matches_polynomial_ratio(g in digraphs(7, Weights::Decimal), tau in 0.05f64..20.0) {
        let l = g.kirchhoff::<f64>();
        let direct = q_tau(&l, &tau).unwrap();
        let ratio = forest_polynomial::<f64>(&g).unwrap().evaluate(&tau);
        prop_assert!(direct.max_abs_diff(&ratio) <= 1e-9);
        let near_zero = q_tau(&l, &1e-9).unwrap();
        prop_assert!(near_zero.max_abs_diff(&Matrix::identity(g.n())) < 1e-7);
    }

    #[test]
    fn limit_route_matches_closed_form(g in digraphs(7, Weights::Decimal)) {
        let limit = jbar_via_limit(&g.kirchhoff::<f64>()).unwrap();
        let direct = jbar::<f64>(&g).unwrap().entries;
        prop_assert!(limit.max_abs_diff(&direct) < 1e-5);
    }
}
