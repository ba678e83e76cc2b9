//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Each export takes plain values and returns a JSON string; the page
//! renders it. The `*_json` functions hold the logic so they can be
//! tested natively.

use naetree::analysis::{f_large, f_small, global_bound_check, small_regime, QSqrt6};
use naetree::generators::GenSpec;
use naetree::oracle::{brute_force, ORACLE_MAX_VARS};
use naetree::{enumerate, Formula, OrderingSource};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Solutions listed in the response; the count is always complete.
pub const MAX_LISTED: usize = 200;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Parses `dimacs`, optionally closes it under negation, and enumerates
/// the weight-`t` solutions. `t < 0` means the oracle's τ.
pub fn enumerate_json(
    dimacs: &str,
    t: i64,
    seed: Option<u64>,
    close: bool,
) -> Result<Value, String> {
    let mut f = Formula::parse_dimacs(dimacs).map_err(err)?;
    if close {
        f = f.negation_closure();
    }
    let small = f.num_vars() <= ORACLE_MAX_VARS;
    let t = if t >= 0 {
        t as usize
    } else if small {
        brute_force(&f, None)
            .map_err(err)?
            .tau
            .ok_or("formula is unsatisfiable")?
    } else {
        return Err(format!(
            "automatic t needs at most {ORACLE_MAX_VARS} variables"
        ));
    };
    let ord = seed.map_or(OrderingSource::Fixed, OrderingSource::Seeded);
    let mut sols = Vec::new();
    let stats = enumerate(&f, t, ord, &mut |a| sols.push(a.clone())).map_err(err)?;
    let expected = if small {
        Some(
            brute_force(&f, Some(t))
                .map_err(err)?
                .weight_t_solutions
                .len(),
        )
    } else {
        None
    };
    sols.sort();
    let listed: Vec<Vec<u32>> = sols
        .iter()
        .take(MAX_LISTED)
        .map(|a| a.ones().collect())
        .collect();
    Ok(json!({
        "n": f.num_vars(),
        "clauses": f.clauses().len(),
        "t": t,
        "count": sols.len(),
        "oracle_count": expected,
        "solutions": listed,
        "route": stats.route,
        "t0": stats.t0,
        "nodes_visited": stats.nodes_visited,
        "leaves_visited": stats.leaves_visited,
        "superfluous_skips": stats.superfluous_skips,
        "resets": stats.resets,
        "claim_violations": stats.claim_violations,
    }))
}

/// Generates an instance from a JSON spec such as
/// `{"family":"maj","n":12,"k":3,"m":0,"seed":0}` and returns DIMACS.
pub fn generate_text(spec: &str) -> Result<String, String> {
    let spec: GenSpec = serde_json::from_str(spec).map_err(err)?;
    let f = spec.generate().map_err(err)?;
    Ok(f.to_dimacs(&[&spec.comment()]))
}

/// `F(w,d)`, or `F(w,d,h)` with its piece when `h` is given, plus the
/// global check for `n` when `n > 0`.
pub fn bound_json(w: i64, d: i64, h: Option<i64>, n: u32) -> Result<Value, String> {
    let mut out = match h {
        None => {
            let v = QSqrt6::from(f_large(w, d));
            json!({ "F": v.to_string(), "approx": v.to_f64() })
        }
        Some(h) => {
            let v = f_small(w, d, h);
            json!({ "F": v.to_string(), "approx": v.to_f64(), "piece": small_regime(w, d, h) })
        }
    };
    if n > 0 {
        let report = global_bound_check(n as usize, None).map_err(err)?;
        out["global"] = serde_json::to_value(report).map_err(err)?;
    }
    Ok(out)
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = enumerateDimacs)]
pub fn enumerate_dimacs(
    dimacs: &str,
    t: i32,
    seed: Option<f64>,
    close: bool,
) -> Result<String, JsError> {
    to_js(enumerate_json(
        dimacs,
        t as i64,
        seed.map(|s| s as u64),
        close,
    ))
}

#[wasm_bindgen]
pub fn generate(spec: &str) -> Result<String, JsError> {
    generate_text(spec).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bound(w: i32, d: i32, h: Option<i32>, n: u32) -> Result<String, JsError> {
    to_js(bound_json(w as i64, d as i64, h.map(i64::from), n))
}
