//! Small named digraphs used throughout the tests and the CLI examples.

use crate::digraph::{Weight, WeightedDigraph};

fn build(n: usize, arcs: &[(usize, usize, &str)]) -> WeightedDigraph {
    WeightedDigraph::new(
        n,
        arcs.iter()
            .map(|&(t, h, w)| (t - 1, h - 1, w.parse::<Weight>().expect("fixture weight"))),
    )
    .expect("fixture digraph")
}

/// 1 -> 2 -> 1 with unit weights.
pub fn unit_two_cycle() -> WeightedDigraph {
    build(2, &[(1, 2, "1"), (2, 1, "1")])
}

/// The single arc 1 -> 2 with weight `w`.
pub fn single_arc(w: &str) -> WeightedDigraph {
    build(2, &[(1, 2, w)])
}

/// Unit path 1 -> 2 -> ... -> n.
pub fn unit_path(n: usize) -> WeightedDigraph {
    let arcs: Vec<(usize, usize, &str)> = (1..n).map(|v| (v, v + 1, "1")).collect();
    build(n, &arcs)
}

/// Two sources feeding one sink: 1 -> 3 and 2 -> 3.
pub fn two_sources() -> WeightedDigraph {
    build(3, &[(1, 3, "1"), (2, 3, "1")])
}

/// Arc list of the 13-vertex example digraph (1-based, decimal weights).
///
/// Thirteen arcs carry listed non-unit weights; the eight unit arcs were
/// recovered by a search constrained to the strong components
/// {3,6,10}, {4,7,11,13}, {1,5,9}, {2,8,12} and matched against the
/// reference normalized forest matrix.
pub const EXAMPLE13_ARCS: [(usize, usize, &str); 21] = [
    (2, 12, "1.33"),
    (8, 2, "1.5"),
    (13, 8, "0.9"),
    (11, 8, "1.1"),
    (7, 4, "0.95"),
    (7, 5, "1.3"),
    (7, 9, "1.4"),
    (5, 9, "1.6"),
    (6, 9, "1.25"),
    (6, 3, "1.7"),
    (3, 10, "1.67"),
    (4, 13, "1.2"),
    (13, 5, "1.2"),
    (10, 6, "1"),
    (11, 7, "1"),
    (13, 11, "1"),
    (12, 8, "1"),
    (1, 5, "1"),
    (9, 1, "1"),
    (3, 5, "1"),
    (3, 9, "1"),
];

pub fn example13() -> WeightedDigraph {
    build(13, &EXAMPLE13_ARCS)
}

/// The reference four-decimal normalized forest matrix of [`example13`].
pub const EXAMPLE13_JBAR: [[f64; 13]; 13] = [
    [0.0, 0.0, 0.1432, 0.1267, 0.0, 0.2434, 0.1203, 0.0, 0.0, 0.1458, 0.1203, 0.0, 0.1003],
    [0.0, 0.0, 0.0, 0.2709, 0.0, 0.0, 0.2573, 0.0, 0.0, 0.0, 0.2573, 0.0, 0.2144],
    [0.0, 0.0, 0.2690, 0.0, 0.0, 0.4572, 0.0, 0.0, 0.0, 0.2738, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.2709, 0.0, 0.0, 0.2573, 0.0, 0.0, 0.0, 0.2573, 0.0, 0.2144],
    [0.0, 0.0, 0.0916, 0.1786, 0.0, 0.1557, 0.1697, 0.0, 0.0, 0.0932, 0.1697, 0.0, 0.1414],
    [0.0, 0.0, 0.2690, 0.0, 0.0, 0.4572, 0.0, 0.0, 0.0, 0.2738, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.2709, 0.0, 0.0, 0.2573, 0.0, 0.0, 0.0, 0.2573, 0.0, 0.2144],
    [0.0, 0.0, 0.0, 0.2709, 0.0, 0.0, 0.2573, 0.0, 0.0, 0.0, 0.2573, 0.0, 0.2144],
    [0.0, 0.0, 0.1432, 0.1267, 0.0, 0.2434, 0.1203, 0.0, 0.0, 0.1458, 0.1203, 0.0, 0.1003],
    [0.0, 0.0, 0.2690, 0.0, 0.0, 0.4572, 0.0, 0.0, 0.0, 0.2738, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.2709, 0.0, 0.0, 0.2573, 0.0, 0.0, 0.0, 0.2573, 0.0, 0.2144],
    [0.0, 0.0, 0.0, 0.2709, 0.0, 0.0, 0.2573, 0.0, 0.0, 0.0, 0.2573, 0.0, 0.2144],
    [0.0, 0.0, 0.0, 0.2709, 0.0, 0.0, 0.2573, 0.0, 0.0, 0.0, 0.2573, 0.0, 0.2144],
];

/// The reference four-decimal mean-row scores of [`example13`].
pub const EXAMPLE13_SCORES: [f64; 13] = [
    0.0, 0.0, 0.0911, 0.1791, 0.0, 0.1549, 0.1701, 0.0, 0.0, 0.0928, 0.1701, 0.0, 0.1418,
];
