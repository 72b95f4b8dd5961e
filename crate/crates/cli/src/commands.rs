use forestmat::digraph::parse_exact;
use forestmat::forest::weight_table;
use forestmat::markov::chain_period;
use forestmat::{
    cesaro_limit, decompose, digraph_from_chain, forest_polynomial, is_block_form, jbar, jbar_via_limit,
    mutual_reachability_matrix, proximity_audit, rank, reachability_matrix, reachability_matrix_at,
    related_chain, structure_report, Expectation, ForestEnumerator, LimitBundle, MarkovChain, Matrix,
    Membership, WeightedDigraph, DEFAULT_MAX_FORESTS,
};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::io::{Input, ROW_SUM_TOL};
use crate::report::{bool_matrix, float, float_matrix, id_groups, ids, matrix, vector, Emit};

/// Environment variable overriding the enumeration cap.
pub const MAX_FORESTS_VAR: &str = "FORESTMAT_MAX_FORESTS";

/// Witnesses printed per audited condition.
pub const PRINTED_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Polynomial,
    Limit,
    Enumerate,
}

pub fn forest_cap() -> Result<u128, CliError> {
    match std::env::var(MAX_FORESTS_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_FORESTS_VAR}={s} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_MAX_FORESTS),
    }
}

fn enumerator(g: &WeightedDigraph) -> Result<ForestEnumerator<'_>, CliError> {
    Ok(ForestEnumerator::new(g).with_cap(forest_cap()?))
}

pub fn jbar_cmd<T: Emit>(g: &WeightedDigraph, method: Method) -> Result<Value, CliError> {
    let d = decompose(g);
    let v = d.forest_dimension();
    let (entries, sigma): (Value, Value) = match method {
        Method::Polynomial => {
            let p = forest_polynomial::<T>(g)?;
            (matrix(&jbar::<T>(g)?.entries), vector(&p.sigma))
        }
        Method::Limit => {
            let limit = jbar_via_limit(&g.kirchhoff::<f64>())?;
            (float_matrix(&limit), vector(&forest_polynomial::<f64>(g)?.sigma))
        }
        Method::Enumerate => {
            let families = enumerator(g)?.all()?;
            let sigma: Vec<T> = families.iter().map(|f| f.total_weight::<T>(g)).collect();
            let top = &families[g.n() - v];
            let table = weight_table::<T>(g, top);
            let inv = T::one() / sigma[g.n() - v].clone();
            (matrix(&table.scale(&inv)), vector(&sigma))
        }
    };
    Ok(json!({
        "method": format!("{method:?}").to_lowercase(),
        "jbar": entries,
        "sigma": sigma,
        "forest_dimension": v,
        "knots": id_groups(&d.knots),
    }))
}

fn limit_fields(out: &mut Map<String, Value>, bundle: &LimitBundle) {
    out.insert(
        "limit".into(),
        json!({
            "jbar": float_matrix(&bundle.b_jbar),
            "resolvent": float_matrix(&bundle.b_resolvent),
            "partial": float_matrix(&bundle.b_partial),
        }),
    );
    out.insert(
        "gaps".into(),
        json!({
            "jbar_resolvent": float(bundle.gap_jbar_resolvent),
            "jbar_partial": float(bundle.gap_jbar_partial),
            "resolvent_partial": float(bundle.gap_resolvent_partial),
            "max": float(bundle.max_gap()),
        }),
    );
    out.insert("k_used".into(), json!(bundle.k_used));
    out.insert("partial_converged".into(), json!(bundle.partial_converged));
    out.insert("tau_used".into(), float(bundle.tau_used));
}

fn chain_fields(out: &mut Map<String, Value>, chain: &MarkovChain<f64>) -> Result<(), CliError> {
    let period = chain_period(chain);
    out.insert("transition".into(), float_matrix(chain.p()));
    out.insert("period".into(), json!(period));
    out.insert("periodic".into(), json!(period > 1));
    limit_fields(out, &cesaro_limit(chain)?);
    Ok(())
}

pub fn markov_cmd(input: &Input, alpha: Option<&str>, exact: bool) -> Result<Value, CliError> {
    let mut out = Map::new();
    match input {
        Input::Digraph(g) => {
            let l = g.kirchhoff::<BigRational>();
            let max_diag = (0..g.n()).map(|i| l[(i, i)].clone()).max().expect("n >= 2");
            let alpha = match alpha {
                Some(s) => parse_exact(s).ok_or_else(|| CliError::Usage(format!("invalid --alpha `{s}`")))?,
                // Half the admissible range keeps the chain aperiodic.
                None if max_diag > BigRational::from_integer(0.into()) => {
                    BigRational::new(1.into(), 2.into()) / max_diag
                }
                None => BigRational::new(1.into(), 2.into()),
            };
            let exact_chain = related_chain::<BigRational>(g, alpha.clone())?;
            let chain = MarkovChain::new(exact_chain.p().to_f64())?;
            out.insert("alpha".into(), alpha.emit());
            out.insert("at_boundary".into(), json!(exact_chain.at_boundary()));
            chain_fields(&mut out, &chain)?;
            if exact {
                out.insert("exact_limit".into(), matrix(&jbar::<BigRational>(g)?.entries));
            }
        }
        Input::Matrix(p) => {
            if alpha.is_some() {
                return Err(CliError::Usage("--alpha applies to digraph input only".into()));
            }
            let chain = MarkovChain::with_tolerance(p.to_f64(), ROW_SUM_TOL)?;
            chain_fields(&mut out, &chain)?;
            if exact {
                let exact_chain = MarkovChain::new(p.clone())?;
                let one = BigRational::from_integer(1.into());
                let g = digraph_from_chain(&exact_chain, &one)?;
                out.insert("exact_limit".into(), matrix(&jbar::<BigRational>(&g)?.entries));
            }
        }
    }
    Ok(Value::Object(out))
}

pub fn structure_cmd<T: Emit>(g: &WeightedDigraph) -> Result<Value, CliError> {
    let r = structure_report::<T>(g)?;
    let membership: Vec<Value> = r
        .membership
        .iter()
        .enumerate()
        .map(|(v, m)| match m {
            Membership::Knot(k) => json!({"vertex": v + 1, "knot": k + 1}),
            Membership::ReachableFrom(ks) => json!({"vertex": v + 1, "reachable_from": ids(ks)}),
        })
        .collect();
    Ok(json!({
        "knots": id_groups(&r.knots),
        "forest_dimension": r.knots.len(),
        "permutation": ids(&r.permutation),
        "jbar": matrix(&r.jbar.entries),
        "jbar_blocked": matrix(&r.jbar_blocked),
        "block_form": is_block_form(&r.jbar_blocked, &r.knot_sizes()),
        "membership": membership,
        "reachability": bool_matrix(&r.reachability),
        "mutual_reachability": bool_matrix(&r.mutual_reachability),
        "strong_components": id_groups(&r.strong_components()),
    }))
}

pub fn rank_cmd<T: Emit>(g: &WeightedDigraph) -> Result<Value, CliError> {
    let r = rank::<T>(g)?;
    let basis: Vec<Value> = r
        .basis
        .knots
        .iter()
        .zip(&r.basis.basis)
        .zip(&r.basis.tree_weights)
        .map(|((knot, x), t)| json!({"knot": ids(knot), "scores": vector(x), "tree_weights": vector(t)}))
        .collect();
    Ok(json!({
        "basis": basis,
        "residual": float(r.basis.residual),
        "aggregate": vector(&r.aggregate),
        "order": ids(&r.order),
        "tie_groups": id_groups(&r.tie_groups),
    }))
}

pub fn forests_cmd<T: Emit>(g: &WeightedDigraph, k: Option<usize>) -> Result<Value, CliError> {
    let v = decompose(g).forest_dimension();
    let k = k.unwrap_or(g.n() - v);
    let family = enumerator(g)?.forests(k)?;
    let forests: Vec<Value> = family
        .members
        .iter()
        .map(|f| {
            let arcs: Vec<[usize; 2]> = f.arcs().iter().map(|&(t, h)| [t + 1, h + 1]).collect();
            json!({"arcs": arcs, "roots": ids(&f.roots()), "weight": f.weight::<T>(g).emit()})
        })
        .collect();
    Ok(json!({
        "k": k,
        "maximum_k": g.n() - v,
        "count": family.len(),
        "total_weight": family.total_weight::<T>(g).emit(),
        "forests": forests,
    }))
}

pub fn reach_cmd(g: &WeightedDigraph, tau: Option<f64>) -> Result<Value, CliError> {
    let r = match tau {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(CliError::Usage(format!("--tau must be a positive number, got {t}")))
        }
        Some(t) => reachability_matrix_at(g, t)?,
        None => reachability_matrix(g)?,
    };
    let n = g.n();
    let mutual = match tau {
        Some(_) => Matrix::from_fn(n, n, |i, j| r[(i, j)] && r[(j, i)]),
        None => mutual_reachability_matrix(g)?,
    };
    Ok(json!({
        "tau": tau.map_or(json!(1), float),
        "reachability": bool_matrix(&r),
        "mutual_reachability": bool_matrix(&mutual),
        "classes": id_groups(&forestmat::analysis::mutual_classes(&mutual)),
    }))
}

fn expectation_name(e: Expectation) -> &'static str {
    match e {
        Expectation::Satisfied => "satisfied",
        Expectation::SatisfiedNonstrict => "satisfied-nonstrict",
        Expectation::NotSatisfied => "not-satisfied",
    }
}

pub fn audit_cmd(g: &WeightedDigraph, seed: u64) -> Result<Value, CliError> {
    let audit = proximity_audit(g, seed)?;
    let conditions: Vec<Value> = audit
        .reports
        .iter()
        .map(|r| {
            let witnesses: Vec<Value> = r
                .witnesses
                .iter()
                .take(PRINTED_WITNESSES)
                .map(|w| {
                    json!({
                        "vertices": ids(&w.vertices),
                        "arc": w.arc.map(|(t, h)| [t + 1, h + 1]),
                        "inequality": w.detail,
                        "equality": w.equality,
                    })
                })
                .collect();
            json!({
                "condition": r.condition.name(),
                "expected": expectation_name(r.condition.expected()),
                "verdict": r.verdict.name(),
                "consistent": r.consistent(),
                "violations": r.violations,
                "witnesses": witnesses,
                "sampled": r.sampled,
            })
        })
        .collect();
    Ok(json!({
        "seed": seed,
        "proximity": float_matrix(&audit.proximity),
        "conditions": conditions,
        "consistent": audit.consistent(),
    }))
}

