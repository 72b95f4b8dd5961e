//! Weighted digraphs without loops and their Kirchhoff matrices.
//!
//! Vertices are `0..n` inside the crate. [`WeightedDigraph::from_one_based`]
//! accepts the 1-based ids used by files and reports.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{ForestMatError, Result};
use crate::matrix::Matrix;
use crate::scalar::{f64_to_rational, rational_to_f64, Scalar};

/// Strictly positive arc weight, stored exactly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(BigRational);

impl Weight {
    pub fn new(value: BigRational) -> Option<Self> {
        value.is_positive().then_some(Weight(value))
    }

    /// Exact value of a finite positive double.
    pub fn from_f64(x: f64) -> Option<Self> {
        f64_to_rational(x).and_then(Weight::new)
    }

    pub fn from_integer(k: i64) -> Option<Self> {
        Weight::new(BigRational::from_integer(k.into()))
    }

    pub fn unit() -> Self {
        Weight(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    pub fn as_scalar<T: Scalar>(&self) -> T {
        T::from_rational(&self.0)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_one()
    }
}

impl FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let r = parse_exact(s).ok_or_else(|| format!("invalid weight `{s}`"))?;
        Weight::new(r).ok_or_else(|| format!("weight `{s}` is not positive"))
    }
}

/// Canonical text: the exact decimal expansion when it terminates, `p/q` otherwise.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_exact(&self.0))
    }
}

/// Parses `[-]digits[.digits][e[+-]digits]` or `p/q` into an exact rational.
pub fn parse_exact(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent as i64 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= BigRational::from_integer(Pow::pow(&ten, scale as u64));
    } else {
        value /= BigRational::from_integer(Pow::pow(&ten, (-scale) as u64));
    }
    Some(if negative { -value } else { value })
}

/// Inverse of [`parse_exact`] for canonical output.
pub fn format_exact(r: &BigRational) -> String {
    let mut denom = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u64, 0u64);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    if places == 0 {
        return r.numer().to_string();
    }
    let scaled = r * BigRational::from_integer(Pow::pow(&BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let places = places as usize;
    let digits = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if r.is_negative() { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub weight: Weight,
}

/// Loopless digraph with at most one positively weighted arc per ordered pair.
///
/// Arcs are kept sorted by `(tail, head)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightedDigraph {
    n: usize,
    arcs: Vec<Arc>,
    slot: Vec<Option<usize>>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl WeightedDigraph {
    /// Validates 0-based arcs. Parallel arcs are rejected; see
    /// [`WeightedDigraph::merging_parallel`] for multidigraph input.
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize, Weight)>) -> Result<Self> {
        if n < 2 {
            return Err(ForestMatError::TooFewVertices { n });
        }
        let mut seen = BTreeMap::new();
        for (tail, head, weight) in arcs {
            for v in [tail, head] {
                if v >= n {
                    return Err(ForestMatError::VertexOutOfRange { vertex: v + 1, n });
                }
            }
            if tail == head {
                return Err(ForestMatError::LoopArc { vertex: tail });
            }
            if seen.insert((tail, head), weight).is_some() {
                return Err(ForestMatError::DuplicateArc { tail, head });
            }
        }
        Ok(Self::assemble(n, seen))
    }

    /// `build_digraph` over 1-based ids, with weights as doubles.
    pub fn from_one_based(n: usize, arcs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut converted = Vec::with_capacity(arcs.len());
        for &(t, h, w) in arcs {
            for v in [t, h] {
                if v == 0 || v > n {
                    return Err(ForestMatError::VertexOutOfRange { vertex: v, n });
                }
            }
            let weight = Weight::from_f64(w).ok_or(ForestMatError::NonpositiveWeight {
                tail: t - 1,
                head: h - 1,
            })?;
            converted.push((t - 1, h - 1, weight));
        }
        Self::new(n, converted)
    }

    /// Multidigraph ingestion: parallel arcs are replaced by one arc carrying
    /// the summed weight.
    pub fn merging_parallel(
        n: usize,
        arcs: impl IntoIterator<Item = (usize, usize, Weight)>,
    ) -> Result<Self> {
        let mut summed: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (t, h, w) in arcs {
            *summed.entry((t, h)).or_insert_with(BigRational::zero) += w.value();
        }
        Self::new(
            n,
            summed
                .into_iter()
                .map(|((t, h), w)| (t, h, Weight::new(w).expect("sum of positives"))),
        )
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    fn assemble(n: usize, sorted: BTreeMap<(usize, usize), Weight>) -> Self {
        let mut g = WeightedDigraph {
            n,
            arcs: Vec::with_capacity(sorted.len()),
            slot: vec![None; n * n],
            incoming: vec![Vec::new(); n],
            outgoing: vec![Vec::new(); n],
        };
        for ((tail, head), weight) in sorted {
            let id = g.arcs.len();
            g.slot[tail * n + head] = Some(id);
            g.incoming[head].push(id);
            g.outgoing[tail].push(id);
            g.arcs.push(Arc { tail, head, weight });
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, tail: usize, head: usize) -> Option<&Arc> {
        if tail >= self.n || head >= self.n {
            return None;
        }
        self.slot[tail * self.n + head].map(|id| &self.arcs[id])
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.arc(tail, head).is_some()
    }

    pub fn in_arcs(&self, v: usize) -> impl Iterator<Item = &Arc> + '_ {
        self.incoming[v].iter().map(|&id| &self.arcs[id])
    }

    pub fn out_arcs(&self, v: usize) -> impl Iterator<Item = &Arc> + '_ {
        self.outgoing[v].iter().map(|&id| &self.arcs[id])
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.incoming[v].len()
    }

    /// Kirchhoff matrix: `L[i][j] = -w(j -> i)` off the diagonal, zero row sums,
    /// so `L[i][i]` is the total weight entering `i`.
    pub fn kirchhoff<T: Scalar>(&self) -> Matrix<T> {
        let mut l = Matrix::<T>::zeros(self.n, self.n);
        for arc in &self.arcs {
            let w: T = arc.weight.as_scalar();
            l[(arc.head, arc.tail)] = l[(arc.head, arc.tail)].clone() - w.clone();
            l[(arc.head, arc.head)] = l[(arc.head, arc.head)].clone() + w;
        }
        l
    }

    /// Vertices reachable from `from` (itself included), as a membership mask.
    pub fn reachable_mask(&self, from: usize) -> Vec<bool> {
        self.reachable_avoiding(from, None)
    }

    /// Reachability with one vertex deleted from the digraph.
    pub fn reachable_avoiding(&self, from: usize, avoid: Option<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        if Some(from) == avoid {
            return seen;
        }
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for arc in self.out_arcs(u) {
                if !seen[arc.head] && Some(arc.head) != avoid {
                    seen[arc.head] = true;
                    queue.push_back(arc.head);
                }
            }
        }
        seen
    }

    /// `reachable` with a range check on a 0-based vertex.
    pub fn reachable(&self, from: usize) -> Result<BTreeSet<usize>> {
        if from >= self.n {
            return Err(ForestMatError::VertexOutOfRange {
                vertex: from + 1,
                n: self.n,
            });
        }
        Ok(self
            .reachable_mask(from)
            .into_iter()
            .enumerate()
            .filter_map(|(v, r)| r.then_some(v))
            .collect())
    }

    /// `reach[i][j]`: `j` is reachable from `i`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        (0..self.n).map(|v| self.reachable_mask(v)).collect()
    }

    /// Same vertex set, every arc with both ends in `set` removed.
    pub fn without_arcs_within(&self, set: &[usize]) -> WeightedDigraph {
        let inside = |v: usize| set.contains(&v);
        let kept = self
            .arcs
            .iter()
            .filter(|a| !(inside(a.tail) && inside(a.head)))
            .map(|a| ((a.tail, a.head), a.weight.clone()))
            .collect();
        Self::assemble(self.n, kept)
    }

    pub fn reversed(&self) -> WeightedDigraph {
        let arcs = self
            .arcs
            .iter()
            .map(|a| ((a.head, a.tail), a.weight.clone()))
            .collect();
        Self::assemble(self.n, arcs)
    }

    pub fn with_unit_weights(&self) -> WeightedDigraph {
        let arcs = self.arcs.iter().map(|a| ((a.tail, a.head), Weight::unit())).collect();
        Self::assemble(self.n, arcs)
    }

    /// Copy with the weight of one existing arc replaced.
    pub fn with_weight(&self, tail: usize, head: usize, weight: Weight) -> Result<WeightedDigraph> {
        if !self.has_arc(tail, head) {
            return Err(ForestMatError::ArcNotInDigraph { tail, head });
        }
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                let w = if (a.tail, a.head) == (tail, head) {
                    weight.clone()
                } else {
                    a.weight.clone()
                };
                ((a.tail, a.head), w)
            })
            .collect();
        Ok(Self::assemble(self.n, arcs))
    }

    pub fn scaled(&self, factor: &Weight) -> WeightedDigraph {
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                let w = Weight::new(a.weight.value() * factor.value()).expect("positive");
                ((a.tail, a.head), w)
            })
            .collect();
        Self::assemble(self.n, arcs)
    }

    pub fn total_weight<T: Scalar>(&self) -> T {
        self.arcs
            .iter()
            .fold(T::zero(), |acc, a| acc + a.weight.as_scalar::<T>())
    }
}

impl fmt::Debug for WeightedDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightedDigraph(n={}; ", self.n)?;
        for (k, a) in self.arcs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}:{}", a.tail + 1, a.head + 1, a.weight)?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_normalizes_arc_order() {
        let g = WeightedDigraph::from_one_based(3, &[(2, 3, 1.0), (1, 2, 2.0), (1, 3, 1.0)]).unwrap();
        let pairs: Vec<_> = g.arcs().iter().map(|a| (a.tail, a.head)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn build_edge_cases() {
        assert_eq!(WeightedDigraph::from_one_based(2, &[]).unwrap().arc_count(), 0);
        let cycle = WeightedDigraph::from_one_based(2, &[(1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(cycle.arc_count(), 2);
        assert_eq!(
            WeightedDigraph::from_one_based(2, &[(1, 2, 1.0), (1, 2, 2.0)]),
            Err(ForestMatError::DuplicateArc { tail: 0, head: 1 })
        );
        assert_eq!(
            WeightedDigraph::from_one_based(2, &[(1, 1, 1.0)]),
            Err(ForestMatError::LoopArc { vertex: 0 })
        );
        assert_eq!(
            WeightedDigraph::from_one_based(2, &[(1, 2, 0.0)]),
            Err(ForestMatError::NonpositiveWeight { tail: 0, head: 1 })
        );
        assert_eq!(
            WeightedDigraph::from_one_based(2, &[(1, 3, 1.0)]),
            Err(ForestMatError::VertexOutOfRange { vertex: 3, n: 2 })
        );
        assert_eq!(
            WeightedDigraph::edgeless(1),
            Err(ForestMatError::TooFewVertices { n: 1 })
        );
    }

    #[test]
    fn parallel_arcs_are_summed_on_request() {
        let w = |s: &str| s.parse::<Weight>().unwrap();
        let g = WeightedDigraph::merging_parallel(2, vec![(0, 1, w("1")), (0, 1, w("0.5"))]).unwrap();
        assert_eq!(g.arc(0, 1).unwrap().weight, w("1.5"));
    }

    #[test]
    fn kirchhoff_examples() {
        let cycle = WeightedDigraph::from_one_based(2, &[(1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(cycle.kirchhoff::<f64>().to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let single = WeightedDigraph::from_one_based(2, &[(1, 2, 2.5)]).unwrap();
        assert_eq!(single.kirchhoff::<f64>().to_rows(), vec![vec![0.0, 0.0], vec![-2.5, 2.5]]);
        let path = WeightedDigraph::from_one_based(3, &[(1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(
            path.kirchhoff::<f64>().to_rows(),
            vec![vec![0.0, 0.0, 0.0], vec![-1.0, 1.0, 0.0], vec![0.0, -1.0, 1.0]]
        );
    }

    #[test]
    fn reachable_examples() {
        let path = WeightedDigraph::from_one_based(3, &[(1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(path.reachable(0).unwrap(), BTreeSet::from([0, 1, 2]));
        assert_eq!(path.reachable(2).unwrap(), BTreeSet::from([2]));
        assert_eq!(
            path.reachable(3),
            Err(ForestMatError::VertexOutOfRange { vertex: 4, n: 3 })
        );
        let empty = WeightedDigraph::edgeless(2).unwrap();
        assert_eq!(empty.reachable(0).unwrap(), BTreeSet::from([0]));
    }

    #[test]
    fn decimal_parsing_is_exact() {
        let r = parse_exact("1.33").unwrap();
        assert_eq!(r, BigRational::new(133.into(), 100.into()));
        assert_eq!(parse_exact("2.5e-1").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_exact("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_exact(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_exact("1..2").is_none());
        assert!(parse_exact("abc").is_none());
        assert!(parse_exact("1/0").is_none());
        assert!("0".parse::<Weight>().is_err());
        assert!("-1".parse::<Weight>().is_err());
    }

    #[test]
    fn canonical_weight_text() {
        for s in ["1.33", "0.000125", "12", "1/3", "0.1"] {
            let w: Weight = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        let w: Weight = "2.50".parse().unwrap();
        assert_eq!(w.to_string(), "2.5");
    }
}
