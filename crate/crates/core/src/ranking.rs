//! Score systems `Lᵀx = 0` solved through `Ĵ`, and an audit of `Ĵᵀ` as a
//! vertex proximity index.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::{Weight, WeightedDigraph};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::polynomial::{forest_minor_weight, jbar};
use crate::scalar::Scalar;

/// Scores closer than this share a tie group.
pub const TIE_TOL: f64 = 1e-10;

/// Tolerance for every comparison made by [`proximity_audit`].
pub const AUDIT_TOL: f64 = 1e-10;

/// Largest digraph audited over all vertex triples.
pub const EXHAUSTIVE_LIMIT: usize = 25;

pub const SAMPLED_TRIPLES: usize = 10_000;

/// Witnesses kept per condition; covers every triple of an exhaustive scan.
pub const WITNESS_CAP: usize = 16_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DanielsBasis<T> {
    pub knots: Vec<Vec<usize>>,
    /// One nonnegative solution of `Lᵀx = 0` per knot.
    pub basis: Vec<Vec<T>>,
    /// Per knot, the weight of spanning trees of the knot rooted at each of
    /// its vertices (in knot order).
    pub tree_weights: Vec<Vec<T>>,
    /// `max |Lᵀx|` over the basis.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankingResult<T> {
    pub basis: DanielsBasis<T>,
    /// Mean of the rows of `Ĵ`.
    pub aggregate: Vec<T>,
    /// Vertices by decreasing aggregate score, ties by vertex id.
    pub order: Vec<usize>,
    /// `order` cut into groups of equal scores.
    pub tie_groups: Vec<Vec<usize>>,
}

pub fn daniels_basis<T: Scalar>(g: &WeightedDigraph) -> Result<DanielsBasis<T>> {
    let j = jbar::<T>(g)?;
    let l = g.kirchhoff::<T>();
    let lt = l.transpose();
    let knots = j.structure.knots.clone();
    let mut basis = Vec::with_capacity(knots.len());
    let mut tree_weights = Vec::with_capacity(knots.len());
    let mut residual = 0.0f64;
    for knot in &knots {
        let x = j.entries.row(knot[0]).to_vec();
        for r in lt.mul_vec(&x) {
            residual = residual.max(r.to_f64().abs());
        }
        // Inside a knot the principal submatrix of L is the knot's own
        // Kirchhoff matrix.
        let local = l.principal(knot);
        let total = if knot.len() == 1 {
            T::one()
        } else {
            (0..knot.len()).try_fold(T::zero(), |s, r| Ok::<_, crate::error::ForestMatError>(s + forest_minor_weight(&local, &[r])?))?
        };
        tree_weights.push(knot.iter().map(|&r| j.entries[(r, r)].clone() * total.clone()).collect());
        basis.push(x);
    }
    Ok(DanielsBasis {
        knots,
        basis,
        tree_weights,
        residual,
    })
}

/// `x = (1/n) Σ_i Ĵ_{i·}`.
pub fn aggregate_score<T: Scalar>(g: &WeightedDigraph) -> Result<Vec<T>> {
    Ok(mean_row(&jbar::<T>(g)?.entries))
}

fn mean_row<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let n = m.rows();
    let inv = T::one() / T::from_usize(n);
    (0..m.cols())
        .map(|c| (0..n).fold(T::zero(), |s, r| s + m[(r, c)].clone()) * inv.clone())
        .collect()
}

pub fn rank<T: Scalar>(g: &WeightedDigraph) -> Result<RankingResult<T>> {
    let basis = daniels_basis::<T>(g)?;
    let aggregate = aggregate_score::<T>(g)?;
    let (order, tie_groups) = order_scores(&aggregate);
    Ok(RankingResult {
        basis,
        aggregate,
        order,
        tie_groups,
    })
}

/// Sorts vertices by decreasing score and groups near-equal neighbours.
pub fn order_scores<T: Scalar>(scores: &[T]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let x: Vec<f64> = scores.iter().map(Scalar::to_f64).collect();
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        if (x[a] - x[b]).abs() <= TIE_TOL {
            a.cmp(&b)
        } else {
            x[b].total_cmp(&x[a])
        }
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match groups.last_mut() {
            Some(group) if (x[group[0]] - x[v]).abs() <= TIE_TOL => group.push(v),
            _ => groups.push(vec![v]),
        }
    }
    for group in &mut groups {
        group.sort_unstable();
    }
    let order = groups.iter().flatten().copied().collect();
    (order, groups)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Nonnegativity,
    Reversal,
    DiagonalMaximality,
    TriangleInequality,
    MetricRepresentability,
    /// Unreachable implies zero proximity.
    DisconnectionIf,
    /// Zero proximity implies unreachable.
    DisconnectionOnlyIf,
    Transit,
    /// Raising arc `(k, t)` does not lower `p_kt`.
    MonotonicityGain,
    /// Raising arc `(k, t)` changes `p_kt` more than any other entry.
    MonotonicityDominance,
    /// Raising arc `(k, t)` helps `p_it` at least as much as `p_ik` when `k`
    /// separates `i` from `t`.
    MonotonicityPaths,
}

impl Condition {
    pub const ALL: [Condition; 11] = [
        Condition::Nonnegativity,
        Condition::Reversal,
        Condition::DiagonalMaximality,
        Condition::TriangleInequality,
        Condition::MetricRepresentability,
        Condition::DisconnectionIf,
        Condition::DisconnectionOnlyIf,
        Condition::Transit,
        Condition::MonotonicityGain,
        Condition::MonotonicityDominance,
        Condition::MonotonicityPaths,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Nonnegativity => "nonnegativity",
            Condition::Reversal => "reversal",
            Condition::DiagonalMaximality => "diagonal_maximality",
            Condition::TriangleInequality => "triangle_inequality",
            Condition::MetricRepresentability => "metric_representability",
            Condition::DisconnectionIf => "disconnection_if",
            Condition::DisconnectionOnlyIf => "disconnection_only_if",
            Condition::Transit => "transit",
            Condition::MonotonicityGain => "monotonicity_1_gain",
            Condition::MonotonicityDominance => "monotonicity_1_dominance",
            Condition::MonotonicityPaths => "monotonicity_2",
        }
    }

    /// The behaviour proven for limiting accessibilities.
    pub fn expected(self) -> Expectation {
        match self {
            Condition::Nonnegativity | Condition::DisconnectionIf => Expectation::Satisfied,
            Condition::DiagonalMaximality
            | Condition::Transit
            | Condition::MonotonicityGain
            | Condition::MonotonicityPaths => Expectation::SatisfiedNonstrict,
            Condition::Reversal
            | Condition::TriangleInequality
            | Condition::MetricRepresentability
            | Condition::DisconnectionOnlyIf
            | Condition::MonotonicityDominance => Expectation::NotSatisfied,
        }
    }

    /// Whether the condition has a strict form distinct from its relaxation.
    fn has_strict_form(self) -> bool {
        matches!(
            self,
            Condition::DiagonalMaximality
                | Condition::TriangleInequality
                | Condition::Transit
                | Condition::MonotonicityGain
                | Condition::MonotonicityDominance
                | Condition::MonotonicityPaths
        )
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Satisfied,
    SatisfiedNonstrict,
    NotSatisfied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    HoldsNonstrict,
    Fails,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsNonstrict => "holds-nonstrict",
            Verdict::Fails => "fails",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// 0-based vertices instantiating the condition.
    pub vertices: Vec<usize>,
    /// Perturbed arc, for the monotonicity conditions.
    pub arc: Option<(usize, usize)>,
    /// The violated inequality with values filled in (1-based ids).
    pub detail: String,
    /// Only the strict form is violated (the two sides agree within tolerance).
    pub equality: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    /// Instances violating the condition, equality cases included.
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    /// Triples were sampled rather than exhausted.
    pub sampled: bool,
}

impl ConditionReport {
    /// Agreement with [`Condition::expected`].
    pub fn consistent(&self) -> bool {
        match self.condition.expected() {
            Expectation::Satisfied => self.verdict == Verdict::Holds,
            Expectation::SatisfiedNonstrict => self.verdict != Verdict::Fails,
            Expectation::NotSatisfied => self.verdict == Verdict::Holds || !self.witnesses.is_empty(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProximityAudit {
    /// `p = Ĵᵀ`.
    pub proximity: Matrix<f64>,
    pub reports: Vec<ConditionReport>,
}

impl ProximityAudit {
    pub fn report(&self, c: Condition) -> &ConditionReport {
        self.reports
            .iter()
            .find(|r| r.condition == c)
            .expect("every condition is audited")
    }

    pub fn consistent(&self) -> bool {
        self.reports.iter().all(ConditionReport::consistent)
    }
}

struct Tally {
    condition: Condition,
    violations: usize,
    broken: bool,
    witnesses: Vec<Witness>,
    sampled: bool,
}

impl Tally {
    fn new(condition: Condition) -> Self {
        Tally {
            condition,
            violations: 0,
            broken: false,
            witnesses: Vec::new(),
            sampled: false,
        }
    }

    /// Records `lhs > rhs` (strict) or `lhs >= rhs` (relaxed) for one instance.
    fn greater(&mut self, lhs: f64, rhs: f64, witness: impl FnOnce(bool) -> (Vec<usize>, Option<(usize, usize)>, String)) {
        let equality = (lhs - rhs).abs() <= AUDIT_TOL;
        if lhs - rhs > AUDIT_TOL {
            return;
        }
        if !equality || !self.condition.has_strict_form() {
            self.broken = true;
        }
        self.push(equality && self.condition.has_strict_form(), witness);
    }

    /// Records `lhs <= rhs` with no strict form.
    fn at_most(&mut self, lhs: f64, rhs: f64, witness: impl FnOnce(bool) -> (Vec<usize>, Option<(usize, usize)>, String)) {
        if lhs - rhs > AUDIT_TOL {
            self.broken = true;
            self.push(false, witness);
        }
    }

    fn fail(&mut self, vertices: Vec<usize>, detail: String) {
        self.broken = true;
        self.push(false, |_| (vertices, None, detail));
    }

    fn push(&mut self, equality: bool, witness: impl FnOnce(bool) -> (Vec<usize>, Option<(usize, usize)>, String)) {
        self.violations += 1;
        if self.witnesses.len() < WITNESS_CAP {
            let (vertices, arc, detail) = witness(equality);
            self.witnesses.push(Witness {
                vertices,
                arc,
                detail,
                equality,
            });
        }
    }

    fn finish(mut self) -> ConditionReport {
        let verdict = if self.violations == 0 {
            Verdict::Holds
        } else if self.broken {
            Verdict::Fails
        } else {
            Verdict::HoldsNonstrict
        };
        // Put genuine failures ahead of equality cases.
        self.witnesses.sort_by_key(|w| w.equality);
        ConditionReport {
            condition: self.condition,
            verdict,
            violations: self.violations,
            witnesses: self.witnesses,
            sampled: self.sampled,
        }
    }
}

fn rel(equality: bool) -> &'static str {
    if equality {
        "="
    } else {
        "<"
    }
}

/// Vertex triples to scan: all of them for small digraphs, a seeded sample
/// otherwise.
fn triples(n: usize, seed: u64) -> (Vec<[usize; 3]>, bool) {
    if n <= EXHAUSTIVE_LIMIT {
        let mut all = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    all.push([i, j, k]);
                }
            }
        }
        (all, false)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = (0..SAMPLED_TRIPLES)
            .map(|_| [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)])
            .collect();
        (sample, true)
    }
}

fn proximity(g: &WeightedDigraph) -> Result<Matrix<f64>> {
    Ok(jbar::<f64>(g)?.entries.transpose())
}

/// Evaluates every proximity condition on `p = Ĵᵀ`.
///
/// `seed` drives triple sampling on digraphs beyond [`EXHAUSTIVE_LIMIT`].
pub fn proximity_audit(g: &WeightedDigraph, seed: u64) -> Result<ProximityAudit> {
    let n = g.n();
    let p = proximity(g)?;
    let reach = g.reachability();
    let (tuples, sampled) = triples(n, seed);

    let mut nonneg = Tally::new(Condition::Nonnegativity);
    let mut diag = Tally::new(Condition::DiagonalMaximality);
    let mut dis_if = Tally::new(Condition::DisconnectionIf);
    let mut dis_only_if = Tally::new(Condition::DisconnectionOnlyIf);
    for i in 0..n {
        for j in 0..n {
            let pij = p[(i, j)];
            nonneg.at_most(0.0, pij, |_| (vec![i, j], None, format!("p[{},{}] = {pij:.6e} < 0", i + 1, j + 1)));
            if i != j {
                let pii = p[(i, i)];
                diag.greater(pii, pij, |eq| {
                    (vec![i, j], None, format!("p[{0},{0}] = {pii:.6} {1} p[{0},{2}] = {pij:.6}", i + 1, rel(eq), j + 1))
                });
            }
            let zero = pij.abs() <= AUDIT_TOL;
            if !reach[i][j] && !zero {
                dis_if.fail(vec![i, j], format!("p[{},{}] = {pij:.6} although {} is unreachable from {}", i + 1, j + 1, j + 1, i + 1));
            }
            if reach[i][j] && zero {
                dis_only_if.fail(vec![i, j], format!("p[{},{}] = 0 although {} is reachable from {}", i + 1, j + 1, j + 1, i + 1));
            }
        }
    }

    let mut reversal = Tally::new(Condition::Reversal);
    let pr = proximity(&g.reversed())?;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (pr[(i, j)], p[(j, i)]);
            if (a - b).abs() > AUDIT_TOL {
                reversal.fail(
                    vec![i, j],
                    format!("reversed p[{0},{1}] = {a:.6} but p[{1},{0}] = {b:.6}", i + 1, j + 1),
                );
            }
        }
    }

    let d = Matrix::from_fn(n, n, |i, j| p[(i, i)] + p[(j, j)] - p[(i, j)] - p[(j, i)]);
    let mut triangle = Tally::new(Condition::TriangleInequality);
    let mut metric = Tally::new(Condition::MetricRepresentability);
    let mut transit = Tally::new(Condition::Transit);
    triangle.sampled = sampled;
    metric.sampled = sampled;
    transit.sampled = sampled;
    for i in 0..n {
        for j in 0..n {
            if i != j && d[(i, j)] <= AUDIT_TOL {
                let dij = d[(i, j)];
                metric.fail(vec![i, j], format!("d[{},{}] = {dij:.6e} for distinct vertices", i + 1, j + 1));
            }
        }
    }
    let avoiding: Vec<Vec<Vec<bool>>> = (0..n)
        .map(|k| (0..n).map(|i| g.reachable_avoiding(i, Some(k))).collect())
        .collect();
    for &[i, j, k] in &tuples {
        let lhs = p[(i, j)] + p[(i, k)] - p[(j, k)];
        let pii = p[(i, i)];
        let strict = j == k && i != j;
        let witness = |eq: bool| {
            (
                vec![i, j, k],
                None,
                format!(
                    "p[{i1},{j1}] + p[{i1},{k1}] - p[{j1},{k1}] = {lhs:.6} {r} p[{i1},{i1}] = {pii:.6}",
                    i1 = i + 1,
                    j1 = j + 1,
                    k1 = k + 1,
                    r = if eq { "=" } else { ">" }
                ),
            )
        };
        if strict {
            triangle.greater(pii, lhs, witness);
        } else {
            triangle.at_most(lhs, pii, witness);
        }

        let (dij, djk, dik) = (d[(i, j)], d[(j, k)], d[(i, k)]);
        metric.at_most(dik, dij + djk, |_| {
            (
                vec![i, j, k],
                None,
                format!("d[{},{}] = {dik:.6} > d[{},{}] + d[{},{}] = {:.6}", i + 1, k + 1, i + 1, j + 1, j + 1, k + 1, dij + djk),
            )
        });

        // Transit, reading the triple as (i, k, t).
        let (k, t) = (j, k);
        if i != k && k != t && i != t && reach[i][k] && !avoiding[k][i][t] {
            let (pik, pit) = (p[(i, k)], p[(i, t)]);
            transit.greater(pik, pit, |eq| {
                (
                    vec![i, k, t],
                    None,
                    format!("p[{0},{1}] = {pik:.6} {3} p[{0},{2}] = {pit:.6}", i + 1, k + 1, t + 1, rel(eq)),
                )
            });
        }
    }

    let mut gain = Tally::new(Condition::MonotonicityGain);
    let mut dominance = Tally::new(Condition::MonotonicityDominance);
    let mut paths = Tally::new(Condition::MonotonicityPaths);
    let bump = Weight::new(num_rational::BigRational::new(11.into(), 10.into())).expect("positive");
    for arc in g.arcs() {
        let (k, t) = (arc.tail, arc.head);
        let raised = g.with_weight(k, t, Weight::new(arc.weight.value() * bump.value()).expect("positive"))?;
        let delta = proximity(&raised)?.sub(&p);
        let dkt = delta[(k, t)];
        gain.greater(dkt, 0.0, |eq| (vec![k, t], Some((k, t)), format!("Δp[{},{}] = {dkt:.6e} {} 0", k + 1, t + 1, rel(eq))));
        for i in 0..n {
            for j in 0..n {
                if (i, j) == (k, t) {
                    continue;
                }
                let dij = delta[(i, j)];
                dominance.greater(dkt, dij, |eq| {
                    (
                        vec![i, j],
                        Some((k, t)),
                        format!("Δp[{},{}] = {dkt:.6e} {} Δp[{},{}] = {dij:.6e}", k + 1, t + 1, rel(eq), i + 1, j + 1),
                    )
                });
            }
            let separated = i == k || !avoiding[k][i][t];
            if reach[i][k] && separated {
                let (dit, dik) = (delta[(i, t)], delta[(i, k)]);
                paths.greater(dit, dik, |eq| {
                    (
                        vec![i],
                        Some((k, t)),
                        format!("Δp[{0},{2}] = {dit:.6e} {3} Δp[{0},{1}] = {dik:.6e}", i + 1, k + 1, t + 1, rel(eq)),
                    )
                });
            }
        }
    }

    let reports = vec![
        nonneg.finish(),
        reversal.finish(),
        diag.finish(),
        triangle.finish(),
        metric.finish(),
        dis_if.finish(),
        dis_only_if.finish(),
        transit.finish(),
        gain.finish(),
        dominance.finish(),
        paths.finish(),
    ];
    debug_assert!(reports.iter().map(|r| r.condition).eq(Condition::ALL));
    Ok(ProximityAudit { proximity: p, reports })
}
