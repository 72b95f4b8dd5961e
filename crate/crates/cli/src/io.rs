//! Text formats.
//!
//! Digraph files start with `n <count>` and list one arc per line as
//! `tail head weight` with 1-based ids. Transition matrices start with
//! `matrix <count>` followed by one row per line. Weights and entries are
//! decimals or `p/q` and are read exactly. Blank lines and lines starting
//! with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use forestmat::digraph::parse_exact;
use forestmat::{Matrix, Weight, WeightedDigraph};
use num_rational::BigRational;

use crate::error::CliError;

/// Row sums of a transition-matrix file must be within this of 1.
pub const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum Input {
    Digraph(WeightedDigraph),
    Matrix(Matrix<BigRational>),
}

fn parse_error(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        message: message.into(),
    }
}

/// Numbered lines that carry content.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_input(text: &str, merge_parallel: bool) -> Result<Input, CliError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_error(1, "empty input"))?;
    let mut words = header.split_whitespace();
    let kind = words.next().unwrap_or_default();
    let count = match (words.next(), words.next()) {
        (Some(c), None) => c
            .parse::<usize>()
            .map_err(|_| parse_error(line, format!("invalid vertex count `{c}`")))?,
        _ => return Err(parse_error(line, "expected header `n <count>` or `matrix <count>`")),
    };
    match kind {
        "n" => parse_arcs(count, line, lines, merge_parallel).map(Input::Digraph),
        "matrix" => parse_rows(count, line, lines).map(Input::Matrix),
        other => Err(parse_error(line, format!("unknown header `{other}`"))),
    }
}

#[cfg(test)]
pub fn parse_digraph(text: &str, merge_parallel: bool) -> Result<WeightedDigraph, CliError> {
    match parse_input(text, merge_parallel)? {
        Input::Digraph(g) => Ok(g),
        Input::Matrix(_) => Err(parse_error(1, "expected a digraph file, found a matrix")),
    }
}

fn parse_arcs<'a>(
    n: usize,
    header_line: usize,
    lines: impl Iterator<Item = (usize, &'a str)>,
    merge_parallel: bool,
) -> Result<WeightedDigraph, CliError> {
    if n < 2 {
        return Err(parse_error(header_line, format!("a digraph needs at least two vertices, got {n}")));
    }
    let mut arcs: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [tail, head, weight] = fields[..] else {
            return Err(parse_error(line, format!("expected `tail head weight`, found `{text}`")));
        };
        let vertex = |s: &str| -> Result<usize, CliError> {
            match s.parse::<usize>() {
                Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                Ok(v) => Err(parse_error(line, format!("vertex {v} is outside 1..={n}"))),
                Err(_) => Err(parse_error(line, format!("invalid vertex `{s}`"))),
            }
        };
        let (t, h) = (vertex(tail)?, vertex(head)?);
        if t == h {
            return Err(parse_error(line, format!("loop arc at vertex {}", t + 1)));
        }
        let w: Weight = weight.parse().map_err(|e: String| parse_error(line, e))?;
        match arcs.get_mut(&(t, h)) {
            Some(sum) if merge_parallel => *sum += w.value(),
            Some(_) => {
                return Err(parse_error(
                    line,
                    format!("duplicate arc ({}, {}); pass --merge-parallel to sum weights", t + 1, h + 1),
                ))
            }
            None => {
                arcs.insert((t, h), w.value().clone());
            }
        }
    }
    let arcs = arcs
        .into_iter()
        .map(|((t, h), w)| (t, h, Weight::new(w).expect("positive weights sum to a positive weight")));
    Ok(WeightedDigraph::new(n, arcs)?)
}

fn parse_rows<'a>(
    n: usize,
    header_line: usize,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Matrix<BigRational>, CliError> {
    if n == 0 {
        return Err(parse_error(header_line, "matrix must have at least one row"));
    }
    let mut rows = Vec::with_capacity(n);
    let mut last = header_line;
    for (line, text) in lines {
        last = line;
        if rows.len() == n {
            return Err(parse_error(line, format!("more than {n} rows")));
        }
        let row = text
            .split_whitespace()
            .map(|s| parse_exact(s).ok_or_else(|| parse_error(line, format!("invalid entry `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(parse_error(line, format!("expected {n} entries, found {}", row.len())));
        }
        if row.iter().any(|x| *x < BigRational::from_integer(0.into())) {
            return Err(parse_error(line, "negative transition probability"));
        }
        let sum: f64 = row.iter().map(forestmat::Scalar::to_f64).sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(parse_error(line, format!("row sums to {sum}, not 1")));
        }
        rows.push(row);
    }
    if rows.len() < n {
        return Err(parse_error(last, format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(Matrix::from_rows(rows))
}

/// Canonical digraph text: arcs sorted by `(tail, head)`, exact weights.
pub fn write_digraph(g: &WeightedDigraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for a in g.arcs() {
        let _ = writeln!(out, "{} {} {}", a.tail + 1, a.head + 1, a.weight);
    }
    out
}

pub fn write_matrix(m: &Matrix<BigRational>) -> String {
    let mut out = format!("matrix {}\n", m.rows());
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(forestmat::digraph::format_exact).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
