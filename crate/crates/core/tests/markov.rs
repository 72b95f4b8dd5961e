mod common;

use common::{digraphs, Weights};
use forestmat::markov::chain_resolvent;
use forestmat::{
    cesaro_limit, cesaro_partial, chain_period, decompose, digraph_from_chain, jbar, q1_chain,
    related_chain, Matrix, MarkovChain, WeightedDigraph,
};
use num_rational::BigRational;
use proptest::prelude::*;

const TOL: f64 = 1e-8;

fn alpha_bound(g: &WeightedDigraph) -> f64 {
    let l = g.kirchhoff::<f64>();
    let top = (0..g.n()).map(|i| l[(i, i)]).fold(0.0, f64::max);
    if top == 0.0 {
        1.0
    } else {
        1.0 / top
    }
}

/// `2‖D‖∞ / k` with `D = (I − P + B)⁻¹ − B`: since `B(k) − B = (I − Pᵏ)D / k`,
/// this bounds every entry of the averaging error.
fn partial_error_bound(chain: &MarkovChain<f64>, b: &Matrix<f64>, k: u64) -> f64 {
    let n = chain.n();
    let d = Matrix::identity(n).sub(chain.p()).add(b).inverse().unwrap().sub(b);
    let norm = (0..n).map(|i| d.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    2.0 * norm / k as f64 + 1e-9
}

/// Subsequence-average limit: `(1/m) Σ_{j<m} lim_i P^{im+j}` with `m` the period.
fn subsequence_average(chain: &MarkovChain<f64>) -> Matrix<f64> {
    let m = chain_period(chain);
    let n = chain.n();
    let p = chain.p();
    let mut pm = Matrix::identity(n);
    for _ in 0..m {
        pm = pm.matmul(p);
    }
    // P^m is aperiodic on every closed class; square it to convergence,
    // renormalizing rows so rounding drift in the row sums cannot compound.
    let mut limit = pm;
    for _ in 0..60 {
        limit = limit.matmul(&limit);
        for i in 0..n {
            let s: f64 = (0..n).map(|j| limit[(i, j)]).sum();
            for j in 0..n {
                limit[(i, j)] /= s;
            }
        }
    }
    let mut sum = Matrix::zeros(n, n);
    let mut shift = limit;
    for _ in 0..m {
        sum = sum.add(&shift);
        shift = shift.matmul(p);
    }
    sum.scale(&(1.0 / m as f64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cesaro_limit_is_jbar(g in digraphs(7, Weights::Decimal), s in 0.1f64..0.9) {
        let alpha = s * alpha_bound(&g);
        let chain = related_chain(&g, alpha).unwrap();
        let j = jbar::<f64>(&g).unwrap().entries;
        let bound = partial_error_bound(&chain, &j, 100_000);
        prop_assert!(cesaro_partial(&chain, 100_000).max_abs_diff(&j) <= bound);
        let bundle = cesaro_limit(&chain).unwrap();
        prop_assert!(bundle.b_resolvent.max_abs_diff(&j) <= 1e-6);
        prop_assert!(bundle.b_jbar.max_abs_diff(&j) <= 1e-10);
        prop_assert!(bundle.gap_jbar_resolvent <= 1e-6);
    }

    #[test]
    fn limit_absorbs_the_chain(g in digraphs(7, Weights::Decimal), s in 0.1f64..0.9) {
        let chain = related_chain(&g, s * alpha_bound(&g)).unwrap();
        let b = cesaro_limit(&chain).unwrap().b_jbar;
        let p = chain.p();
        let l = g.kirchhoff::<f64>();
        prop_assert!(p.matmul(&b).max_abs_diff(&b) <= TOL);
        prop_assert!(b.matmul(p).max_abs_diff(&b) <= TOL);
        prop_assert!(b.matmul(&b).max_abs_diff(&b) <= TOL);
        prop_assert!(b.matmul(&l).max_abs() <= TOL);
        prop_assert!(l.matmul(&b).max_abs() <= TOL);
    }

    #[test]
    fn step_size_does_not_matter(g in digraphs(7, Weights::Decimal), a in 0.05f64..0.95, b in 0.05f64..0.95) {
        let bound = alpha_bound(&g);
        let first = cesaro_limit(&related_chain(&g, a * bound).unwrap()).unwrap().b_jbar;
        let second = cesaro_limit(&related_chain(&g, b * bound).unwrap()).unwrap().b_jbar;
        prop_assert!(first.max_abs_diff(&second) <= 1e-10);
    }

    #[test]
    fn essential_states_are_the_knots(g in digraphs(7, Weights::Decimal)) {
        let chain = related_chain(&g, 0.5 * alpha_bound(&g)).unwrap();
        let b = cesaro_limit(&chain).unwrap().b_jbar;
        let d = decompose(&g);
        for c in 0..g.n() {
            let nonzero = b.column(c).iter().any(|&x| x != 0.0);
            prop_assert_eq!(nonzero, d.in_knot_union(c));
        }
    }

    #[test]
    fn inverse_map_round_trips(g in digraphs(7, Weights::Integer), s in 1u32..9) {
        let top = g.kirchhoff::<BigRational>();
        let max = (0..g.n()).map(|i| top[(i, i)].clone()).max().unwrap();
        let bound = if max == BigRational::from_integer(0.into()) { BigRational::from_integer(1.into()) } else { BigRational::from_integer(1.into()) / max };
        let alpha = bound * BigRational::new(s.into(), 10.into());
        let chain = related_chain(&g, alpha.clone()).unwrap();
        prop_assert_eq!(digraph_from_chain(&chain, &alpha).unwrap(), g);
    }

    #[test]
    fn first_step_chain_is_related(g in digraphs(7, Weights::Integer)) {
        prop_assume!(g.arc_count() > 0);
        let chain = q1_chain::<BigRational>(&g).unwrap();
        let alpha = chain.alpha().unwrap().clone();
        prop_assert_eq!(digraph_from_chain(&chain, &alpha).unwrap(), g.clone());
        let diag_max = (0..g.n()).map(|i| g.kirchhoff::<BigRational>()[(i, i)].clone()).max().unwrap();
        prop_assert_eq!(chain.at_boundary(), diag_max == g.total_weight::<BigRational>());
    }

    #[test]
    fn partial_average_matches_subsequence_limit(
        rows in proptest::collection::vec(proptest::collection::vec(0u8..3, 4), 4)
    ) {
        // Sparse 0/1 transition patterns, normalized; includes periodic chains.
        let p = Matrix::from_rows(rows.iter().enumerate().map(|(i, r)| {
            let mut r: Vec<f64> = r.iter().map(|&x| if x == 2 { 1.0 } else { 0.0 }).collect();
            if r.iter().all(|&x| x == 0.0) {
                r[(i + 1) % 4] = 1.0;
            }
            let s: f64 = r.iter().sum();
            r.into_iter().map(|x| x / s).collect()
        }).collect());
        let chain = MarkovChain::new(p).unwrap();
        let oracle = subsequence_average(&chain);
        let bundle = cesaro_limit(&chain).unwrap();
        prop_assert!(bundle.b_jbar.max_abs_diff(&oracle) <= 1e-9);
        prop_assert!(bundle.b_resolvent.max_abs_diff(&oracle) <= 1e-6);
        let bound = partial_error_bound(&chain, &oracle, 100_000);
        prop_assert!(cesaro_partial(&chain, 100_000).max_abs_diff(&oracle) <= bound);
    }
}

#[test]
fn swap_chain_on_every_route() {
    let chain = MarkovChain::new(Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
    let half = Matrix::filled(2, 2, 0.5);
    assert_eq!(chain_period(&chain), 2);
    let b = cesaro_limit(&chain).unwrap();
    assert!(b.b_jbar.max_abs_diff(&half) <= 1e-9);
    assert!(b.b_partial.max_abs_diff(&half) <= 1e-9);
    assert!(b.b_resolvent.max_abs_diff(&half) <= 1e-6);
    assert!(subsequence_average(&chain).max_abs_diff(&half) <= 1e-12);
    let r = chain_resolvent(&chain, &1.0).unwrap();
    assert!(r.max_abs_diff(&Matrix::from_rows(vec![vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]])) < 1e-12);
}
