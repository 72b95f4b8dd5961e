#![allow(dead_code)]

use forestmat::{Weight, WeightedDigraph};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

/// Arc weights drawn for random digraphs.
#[derive(Clone, Copy, Debug)]
pub enum Weights {
    /// Two-decimal values in `[0.1, 2]`.
    Decimal,
    /// Integers `1..=5`.
    Integer,
    Unit,
}

fn weight(kind: Weights, raw: u32) -> Weight {
    let value = match kind {
        Weights::Decimal => BigRational::new((10 + raw % 191).into(), 100.into()),
        Weights::Integer => BigRational::from_integer((1 + raw % 5).into()),
        Weights::Unit => BigRational::from_integer(1.into()),
    };
    Weight::new(value).unwrap()
}

fn assemble(n: usize, cells: &[Option<u32>], kind: Weights) -> WeightedDigraph {
    let mut arcs = Vec::new();
    for t in 0..n {
        for h in 0..n {
            if t != h {
                if let Some(raw) = cells[t * n + h] {
                    arcs.push((t, h, weight(kind, raw)));
                }
            }
        }
    }
    WeightedDigraph::new(n, arcs).unwrap()
}

/// Digraphs on `2..=max_n` vertices with arc density drawn per case.
pub fn digraphs(max_n: usize, kind: Weights) -> impl Strategy<Value = WeightedDigraph> {
    (2..=max_n, 0.1f64..0.6).prop_flat_map(move |(n, density)| {
        proptest::collection::vec(proptest::option::weighted(density, any::<u32>()), n * n)
            .prop_map(move |cells| assemble(n, &cells, kind))
    })
}

/// Seeded counterpart of [`digraphs`] for fixed-size sweeps.
pub fn random_digraph(rng: &mut impl Rng, max_n: usize, kind: Weights) -> WeightedDigraph {
    let n = rng.gen_range(2..=max_n);
    let density = rng.gen_range(0.1..0.6);
    let cells: Vec<Option<u32>> = (0..n * n)
        .map(|_| rng.gen_bool(density).then(|| rng.gen()))
        .collect();
    assemble(n, &cells, kind)
}

/// Same arcs, weights redrawn.
pub fn reweighted(g: &WeightedDigraph, rng: &mut impl Rng, kind: Weights) -> WeightedDigraph {
    let arcs = g.arcs().iter().map(|a| (a.tail, a.head, weight(kind, rng.gen())));
    WeightedDigraph::new(g.n(), arcs).unwrap()
}

/// Strongly connected digraphs: a Hamiltonian cycle plus random chords.
pub fn strong_digraphs(max_n: usize) -> impl Strategy<Value = WeightedDigraph> {
    (2..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<u32>(), n),
            proptest::collection::vec(proptest::option::weighted(0.3, any::<u32>()), n * n),
        )
            .prop_map(move |(ring, mut cells)| {
                for v in 0..n {
                    cells[v * n + (v + 1) % n] = Some(ring[v]);
                }
                assemble(n, &cells, Weights::Decimal)
            })
    })
}
