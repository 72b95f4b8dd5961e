//! Markov chains related to a weighted digraph and their Cesàro limits.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::digraph::{Weight, WeightedDigraph};
use crate::error::{ForestMatError, Result};
use crate::matrix::Matrix;
use crate::polynomial::{jbar, q_tau, resolvent_limit, LimitLadder};
use crate::scalar::Scalar;
use crate::structure::tarjan_scc;

/// Row-sum tolerance for float chains.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Stop rule for the averaged-power route.
pub const PARTIAL_TOL: f64 = 1e-6;

/// Largest `k` tried by the averaged-power route.
pub const PARTIAL_MAX_K: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain<T> {
    p: Matrix<T>,
    alpha: Option<T>,
    at_boundary: bool,
}

impl<T: Scalar> MarkovChain<T> {
    /// Wraps a transition matrix, checking it with [`STOCHASTIC_TOL`].
    pub fn new(p: Matrix<T>) -> Result<Self> {
        Self::with_tolerance(p, STOCHASTIC_TOL)
    }

    pub fn with_tolerance(p: Matrix<T>, tol: f64) -> Result<Self> {
        check_stochastic(&p, tol)?;
        Ok(MarkovChain {
            p,
            alpha: None,
            at_boundary: false,
        })
    }

    pub fn p(&self) -> &Matrix<T> {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.p.rows()
    }

    /// Step size used to build the chain from a digraph, if any.
    pub fn alpha(&self) -> Option<&T> {
        self.alpha.as_ref()
    }

    /// Set when `α · max ℓ_ii = 1`, so some state has no holding probability.
    pub fn at_boundary(&self) -> bool {
        self.at_boundary
    }
}

fn check_stochastic<T: Scalar>(p: &Matrix<T>, tol: f64) -> Result<()> {
    if !p.is_square() || p.rows() == 0 {
        return Err(ForestMatError::NotStochastic(format!(
            "{}x{} is not a square transition matrix",
            p.rows(),
            p.cols()
        )));
    }
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            if p[(i, j)] < T::zero() {
                return Err(ForestMatError::NotStochastic(format!(
                    "entry ({}, {}) is negative",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    for (i, s) in p.row_sums().into_iter().enumerate() {
        if !(s - T::one()).near_zero(tol) {
            return Err(ForestMatError::NotStochastic(format!("row {} does not sum to 1", i + 1)));
        }
    }
    Ok(())
}

fn max_diagonal(g: &WeightedDigraph) -> BigRational {
    (0..g.n())
        .map(|v| g.in_arcs(v).fold(BigRational::zero(), |s, a| s + a.weight.value()))
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// `P = I − αL`, valid for `0 < α < 1 / max ℓ_ii`.
pub fn related_chain<T: Scalar>(g: &WeightedDigraph, alpha: T) -> Result<MarkovChain<T>> {
    let top = max_diagonal(g);
    let out_of_range = || ForestMatError::AlphaOutOfRange {
        alpha: alpha.to_f64(),
        bound: if top.is_zero() {
            f64::INFINITY
        } else {
            1.0 / top.to_f64()
        },
    };
    if alpha <= T::zero() {
        return Err(out_of_range());
    }
    if !top.is_zero() && alpha.clone() * T::from_rational(&top) >= T::one() {
        return Err(out_of_range());
    }
    let n = g.n();
    let p = Matrix::identity(n).sub(&g.kirchhoff::<T>().scale(&alpha));
    check_stochastic(&p, STOCHASTIC_TOL)?;
    Ok(MarkovChain {
        p,
        alpha: Some(alpha),
        at_boundary: false,
    })
}

/// Digraph with Kirchhoff matrix `(I − P) / α`: arc `j → i` of weight `p_ij / α`.
pub fn digraph_from_chain<T: Scalar>(chain: &MarkovChain<T>, alpha: &T) -> Result<WeightedDigraph> {
    let bad_alpha = || ForestMatError::AlphaOutOfRange {
        alpha: alpha.to_f64(),
        bound: f64::INFINITY,
    };
    if *alpha <= T::zero() {
        return Err(bad_alpha());
    }
    let alpha = alpha.to_rational().ok_or_else(bad_alpha)?;
    let p = chain.p();
    let n = p.rows();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || p[(i, j)].is_zero() {
                continue;
            }
            let value = p[(i, j)]
                .to_rational()
                .ok_or_else(|| ForestMatError::NotStochastic(format!("entry ({}, {}) is not finite", i + 1, j + 1)))?;
            let weight = Weight::new(value / &alpha).expect("positive entry over positive step");
            arcs.push((j, i, weight));
        }
    }
    WeightedDigraph::new(n, arcs)
}

/// `B(k) = (1/k) Σ_{t<k} Pᵗ`.
pub fn cesaro_partial<T: Scalar>(chain: &MarkovChain<T>, k: u64) -> Matrix<T> {
    let k = k.max(1);
    let (sum, _) = power_sum(chain.p(), k);
    sum.scale(&(T::one() / T::from_rational(&BigRational::from_integer(k.into()))))
}

/// Returns `(Σ_{t<k} Pᵗ, Pᵏ)` using `O(log k)` products.
fn power_sum<T: Scalar>(p: &Matrix<T>, k: u64) -> (Matrix<T>, Matrix<T>) {
    let n = p.rows();
    let identity = Matrix::identity(n);
    let mut sum = Matrix::zeros(n, n);
    let mut power = identity.clone();
    for bit in (0..64 - k.leading_zeros()).rev() {
        sum = sum.add(&power.matmul(&sum));
        power = power.matmul(&power);
        if k >> bit & 1 == 1 {
            sum = identity.add(&p.matmul(&sum));
            power = p.matmul(&power);
        }
    }
    (sum, power)
}

/// The three routes to the Cesàro limit and how far apart they landed.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitBundle {
    /// `Ĵ` of the digraph with Kirchhoff matrix `I − P`.
    pub b_jbar: Matrix<f64>,
    /// `lim (I − τ(P − I))⁻¹` along the τ ladder.
    pub b_resolvent: Matrix<f64>,
    /// `B(k)` at `k = k_used`.
    pub b_partial: Matrix<f64>,
    pub k_used: u64,
    /// Whether successive `B(k)` met [`PARTIAL_TOL`] before [`PARTIAL_MAX_K`].
    pub partial_converged: bool,
    /// τ at which the resolvent ladder stopped.
    pub tau_used: f64,
    pub gap_jbar_resolvent: f64,
    pub gap_jbar_partial: f64,
    pub gap_resolvent_partial: f64,
}

impl LimitBundle {
    pub fn max_gap(&self) -> f64 {
        self.gap_jbar_resolvent
            .max(self.gap_jbar_partial)
            .max(self.gap_resolvent_partial)
    }
}

/// Evaluates all three routes concurrently.
pub fn cesaro_limit(chain: &MarkovChain<f64>) -> Result<LimitBundle> {
    let p = chain.p();
    let n = p.rows();
    let generator = Matrix::identity(n).sub(p);
    let (jbar_route, resolvent_route, partial_route) = std::thread::scope(|s| {
        let a = s.spawn(|| -> Result<Matrix<f64>> {
            let g = digraph_from_chain(chain, &1.0)?;
            Ok(jbar::<f64>(&g)?.entries)
        });
        let b = s.spawn(|| resolvent_limit(&generator, &LimitLadder::default()));
        let c = s.spawn(|| partial_limit(p));
        (
            a.join().expect("jbar route panicked"),
            b.join().expect("resolvent route panicked"),
            c.join().expect("partial route panicked"),
        )
    });
    let b_jbar = jbar_route?;
    let (b_resolvent, tau_used) = resolvent_route?;
    let (b_partial, k_used, partial_converged) = partial_route;
    Ok(LimitBundle {
        gap_jbar_resolvent: b_jbar.max_abs_diff(&b_resolvent),
        gap_jbar_partial: b_jbar.max_abs_diff(&b_partial),
        gap_resolvent_partial: b_resolvent.max_abs_diff(&b_partial),
        b_jbar,
        b_resolvent,
        b_partial,
        k_used,
        partial_converged,
        tau_used,
    })
}

/// Doubles `k` until `B(k)` and `B(2k)` agree to [`PARTIAL_TOL`].
fn partial_limit(p: &Matrix<f64>) -> (Matrix<f64>, u64, bool) {
    let mut k = 1u64;
    let mut sum = Matrix::identity(p.rows());
    let mut power = p.clone();
    let mut previous = sum.clone();
    while k < PARTIAL_MAX_K {
        sum = sum.add(&power.matmul(&sum));
        power = power.matmul(&power);
        k *= 2;
        let current = sum.scale(&(1.0 / k as f64));
        if current.max_abs_diff(&previous) < PARTIAL_TOL {
            return (current, k, true);
        }
        previous = current;
    }
    (previous, k, false)
}

/// Resolvent `(I − τ(P − I))⁻¹` at a single τ.
pub fn chain_resolvent<T: Scalar>(chain: &MarkovChain<T>, tau: &T) -> Result<Matrix<T>> {
    let n = chain.n();
    q_tau(&Matrix::identity(n).sub(chain.p()), tau)
}

/// `P₁ = I − α₁L` with `α₁ = 1 / Σ ε`.
pub fn q1_chain<T: Scalar>(g: &WeightedDigraph) -> Result<MarkovChain<T>> {
    if g.arc_count() == 0 {
        return Err(ForestMatError::NoArcs);
    }
    let total = g.total_weight::<BigRational>();
    let alpha = BigRational::one() / &total;
    let at_boundary = max_diagonal(g) == total;
    let alpha_t = T::from_rational(&alpha);
    let p = Matrix::identity(g.n()).sub(&g.kirchhoff::<T>().scale(&alpha_t));
    check_stochastic(&p, STOCHASTIC_TOL)?;
    Ok(MarkovChain {
        p,
        alpha: Some(alpha_t),
        at_boundary,
    })
}

/// Period of the chain: lcm over closed classes of each class's period.
pub fn chain_period<T: Scalar>(chain: &MarkovChain<T>) -> usize {
    let p = chain.p();
    let n = p.rows();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| !p[(i, j)].is_zero()).collect())
        .collect();
    let components = tarjan_scc(&adjacency);
    let mut class_of = vec![0; n];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            class_of[v] = c;
        }
    }
    let mut period = 1;
    for (c, members) in components.iter().enumerate() {
        let closed = members
            .iter()
            .all(|&v| adjacency[v].iter().all(|&w| class_of[w] == c));
        if closed {
            period = lcm(period, class_period(&adjacency, members, &class_of, c));
        }
    }
    period
}

fn class_period(adjacency: &[Vec<usize>], members: &[usize], class_of: &[usize], c: usize) -> usize {
    let mut level = vec![usize::MAX; adjacency.len()];
    let start = members[0];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut d = 0usize;
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[u] {
            if class_of[w] != c {
                continue;
            }
            if level[w] == usize::MAX {
                level[w] = level[u] + 1;
                queue.push_back(w);
            } else {
                d = gcd(d, (level[u] + 1).abs_diff(level[w]));
            }
        }
    }
    d.max(1)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
