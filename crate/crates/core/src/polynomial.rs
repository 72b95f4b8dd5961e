//! Forest matrices in closed form.
//!
//! `(I + τL)⁻¹ = (Σ τᵏ Q_k) / (Σ τᵏ σ_k)` where `Q_k` holds the weights of
//! `k`-arc forests by root membership and `σ_k` their total weight. The
//! coefficients come from a trace recurrence:
//!
//! ```text
//! Q_0 = I,  σ_k = tr(L·Q_{k-1}) / k,  Q_k = σ_k·I − L·Q_{k-1}
//! ```

use crate::digraph::WeightedDigraph;
use crate::error::{ForestMatError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::structure::{decompose, StructureDecomposition};

/// Relative size below which a float `σ_k` counts as vanished.
pub const SIGMA_TAIL_TOL: f64 = 1e-8;

/// Entries of a float normalized matrix whose magnitude stays below this are
/// treated as structural zeros when certifying the support.
pub const SUPPORT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ForestPolynomial<T> {
    /// `Q_0 .. Q_{n-1}`.
    pub q: Vec<Matrix<T>>,
    /// `σ_0 .. σ_{n-1}`.
    pub sigma: Vec<T>,
    /// Forest dimension.
    pub v: usize,
}

impl<T: Scalar> ForestPolynomial<T> {
    /// Runs the recurrence on a Kirchhoff matrix with known forest dimension.
    pub fn from_kirchhoff(l: &Matrix<T>, v: usize) -> Result<Self> {
        let n = l.rows();
        if !l.is_square() || v == 0 || v > n {
            return Err(ForestMatError::DimensionMismatch(format!(
                "{}x{} Kirchhoff matrix with forest dimension {v}",
                l.rows(),
                l.cols()
            )));
        }
        let identity = Matrix::identity(n);
        let mut q = vec![identity.clone()];
        let mut sigma = vec![T::one()];
        for k in 1..n {
            let lq = l.matmul(&q[k - 1]);
            let s = lq.trace() / T::from_usize(k);
            q.push(identity.scale(&s).sub(&lq));
            sigma.push(s);
        }

        let top = n - v;
        if sigma[top].partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
            return Err(ForestMatError::InconsistentDimension(format!(
                "σ_{top} vanishes for forest dimension {v}"
            )));
        }
        // Compare coefficients after the substitution τ -> τ/c with
        // c = σ_top^(1/top), so the zero test does not depend on the weight scale.
        let log_c = if top == 0 { 0.0 } else { sigma[top].to_f64().ln() / top as f64 };
        let log_largest = sigma
            .iter()
            .enumerate()
            .filter(|(_, s)| s.to_f64() != 0.0)
            .map(|(k, s)| s.to_f64().abs().ln() - k as f64 * log_c)
            .fold(f64::NEG_INFINITY, f64::max);
        let tol = |k: usize| (SIGMA_TAIL_TOL.ln() + log_largest + k as f64 * log_c).exp();
        if sigma[top].near_zero(tol(top)) {
            return Err(ForestMatError::InconsistentDimension(format!(
                "σ_{top} vanishes for forest dimension {v}"
            )));
        }
        for k in top + 1..n {
            if !sigma[k].near_zero(tol(k)) {
                return Err(ForestMatError::InconsistentDimension(format!(
                    "σ_{k} = {:e} should vanish beyond n - v = {top}",
                    sigma[k].to_f64()
                )));
            }
            sigma[k] = T::zero();
            q[k] = Matrix::zeros(n, n);
        }
        Ok(ForestPolynomial { q, sigma, v })
    }

    /// Matrix of maximum out forests, `Q_{n-v}`.
    pub fn maximum(&self) -> &Matrix<T> {
        &self.q[self.q.len() - self.v]
    }

    pub fn sigma_max(&self) -> &T {
        &self.sigma[self.sigma.len() - self.v]
    }

    /// `Σ τᵏ Q_k / Σ τᵏ σ_k`, the polynomial-ratio form of `(I + τL)⁻¹`.
    pub fn evaluate(&self, tau: &T) -> Matrix<T> {
        let n = self.q[0].rows();
        let mut num = Matrix::zeros(n, n);
        let mut den = T::zero();
        let mut power = T::one();
        for (qk, sk) in self.q.iter().zip(&self.sigma) {
            num = num.add(&qk.scale(&power));
            den = den + sk.clone() * power.clone();
            power = power * tau.clone();
        }
        num.scale(&(T::one() / den))
    }
}

pub fn forest_polynomial<T: Scalar>(g: &WeightedDigraph) -> Result<ForestPolynomial<T>> {
    let d = decompose(g);
    ForestPolynomial::from_kirchhoff(&g.kirchhoff(), d.forest_dimension())
}

/// `(I + τL)⁻¹`.
pub fn q_tau<T: Scalar>(l: &Matrix<T>, tau: &T) -> Result<Matrix<T>> {
    let n = l.rows();
    Matrix::identity(n)
        .add(&l.scale(tau))
        .inverse()
        .ok_or(ForestMatError::SingularMatrix)
}

/// Normalized matrix of maximum out forests with its certified support.
#[derive(Clone, Debug, PartialEq)]
pub struct JBarMatrix<T> {
    pub entries: Matrix<T>,
    /// Total weight of the maximum out forests.
    pub sigma: T,
    /// `support[(i, j)]`: entry is nonzero.
    pub support: Matrix<bool>,
    pub structure: StructureDecomposition,
}

impl<T: Scalar> JBarMatrix<T> {
    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn forest_dimension(&self) -> usize {
        self.structure.forest_dimension()
    }
}

/// `Q_{n-v} / σ_{n-v}`, with the zero pattern checked against reachability.
pub fn jbar<T: Scalar>(g: &WeightedDigraph) -> Result<JBarMatrix<T>> {
    let structure = decompose(g);
    let poly = ForestPolynomial::from_kirchhoff(&g.kirchhoff::<T>(), structure.forest_dimension())?;
    let sigma = poly.sigma_max().clone();
    let raw = poly.maximum().scale(&(T::one() / sigma.clone()));
    certify(raw, sigma, structure)
}

/// Builds the normalized matrix from any route's raw values.
pub(crate) fn certify<T: Scalar>(
    raw: Matrix<T>,
    sigma: T,
    structure: StructureDecomposition,
) -> Result<JBarMatrix<T>> {
    let n = raw.rows();
    let predicate = structure.jbar_support();
    let mut entries = raw;
    for i in 0..n {
        for j in 0..n {
            let x = &entries[(i, j)];
            if predicate[i][j] {
                if x.near_zero(SUPPORT_TOL) || *x < T::zero() {
                    return Err(ForestMatError::PatternViolation { row: i, col: j });
                }
            } else if x.near_zero(SUPPORT_TOL) {
                entries[(i, j)] = T::zero();
            } else {
                return Err(ForestMatError::PatternViolation { row: i, col: j });
            }
        }
    }
    let support = Matrix::from_fn(n, n, |i, j| predicate[i][j]);
    Ok(JBarMatrix {
        entries,
        sigma,
        support,
        structure,
    })
}

/// Stop rule and ladder for [`jbar_via_limit`].
#[derive(Clone, Debug, PartialEq)]
pub struct LimitLadder {
    pub start: f64,
    pub factor: f64,
    pub max_tau: f64,
    pub tol: f64,
    /// Combine neighbouring rungs to cancel the `1/τ` term of the error.
    pub extrapolate: bool,
}

impl Default for LimitLadder {
    fn default() -> Self {
        // Roundoff in (I + τL)⁻¹ grows like τ·eps while the truncation error
        // shrinks like 1/τ, so the ladder climbs by decades and extrapolates.
        LimitLadder {
            start: 1e3,
            factor: 10.0,
            max_tau: 1e13,
            tol: 1e-7,
            extrapolate: true,
        }
    }
}

/// `lim_{τ→∞} (I + τL)⁻¹` evaluated numerically.
pub fn jbar_via_limit(l: &Matrix<f64>) -> Result<Matrix<f64>> {
    jbar_via_limit_with(l, &LimitLadder::default())
}

pub fn jbar_via_limit_with(l: &Matrix<f64>, ladder: &LimitLadder) -> Result<Matrix<f64>> {
    resolvent_limit(l, ladder).map(|(m, _)| m)
}

/// Returns the last iterate and the τ it was taken at.
///
/// With extrapolation the iterates are `(f·Q(fτ) − Q(τ)) / (f − 1)`, which
/// agree with the limit up to `O(1/τ²)`.
pub(crate) fn resolvent_limit(l: &Matrix<f64>, ladder: &LimitLadder) -> Result<(Matrix<f64>, f64)> {
    let f = ladder.factor;
    let mut tau = ladder.start;
    let mut raw = q_tau(l, &tau)?;
    let mut previous: Option<Matrix<f64>> = (!ladder.extrapolate).then(|| raw.clone());
    let mut last_gap = f64::INFINITY;
    while tau * f <= ladder.max_tau {
        tau *= f;
        let next = q_tau(l, &tau)?;
        let current = if ladder.extrapolate {
            next.scale(&(f / (f - 1.0))).sub(&raw.scale(&(1.0 / (f - 1.0))))
        } else {
            next.clone()
        };
        raw = next;
        if let Some(prev) = &previous {
            last_gap = current.max_abs_diff(prev);
            if last_gap < ladder.tol {
                return Ok((current, tau));
            }
        }
        previous = Some(current);
    }
    Err(ForestMatError::NoConvergence(format!(
        "resolvent ladder reached τ = {tau:e}, last step moved {last_gap:e}"
    )))
}

/// `det L₋φ`: the weight of spanning diverging forests rooted exactly at `φ`.
pub fn forest_minor_weight<T: Scalar>(l: &Matrix<T>, phi: &[usize]) -> Result<T> {
    let n = l.rows();
    let mut phi = phi.to_vec();
    phi.sort_unstable();
    phi.dedup();
    if phi.is_empty() {
        return Err(ForestMatError::EmptySubset);
    }
    if let Some(&v) = phi.iter().find(|&&v| v >= n) {
        return Err(ForestMatError::VertexOutOfRange { vertex: v + 1, n });
    }
    if phi.len() == n {
        return Err(ForestMatError::FullSubset);
    }
    Ok(l.without(&phi).determinant())
}
