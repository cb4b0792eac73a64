//! Oracles shared by the integration suites. None of these call into the
//! library code paths they are used to check.

#![allow(dead_code)]

use serde_json::Value;

/// Upper `1 - alpha` quantile of chi-square with `k` degrees of freedom via
/// the Wilson–Hilferty cube approximation; `z` is the matching normal quantile.
pub fn chi_square_critical(k: usize, z: f64) -> f64 {
    let k = k as f64;
    let h = 2.0 / (9.0 * k);
    k * (1.0 - h + z * h.sqrt()).powi(3)
}

/// Normal quantile for upper tail 0.001.
pub const Z_999: f64 = 3.090_232_306_167_813_5;

/// Degrees of the irreducible factors of a monic polynomial over `F_q`
/// (`q` small prime), found by trial division with every monic polynomial
/// of increasing degree. Ascending order, with multiplicity.
pub fn exhaustive_factor_degrees(f: &[u64], q: u64) -> Vec<usize> {
    let mut f = f.to_vec();
    let mut out = Vec::new();
    let mut d = 1;
    while f.len() > 1 {
        let deg = f.len() - 1;
        if 2 * d > deg {
            out.push(deg);
            break;
        }
        let mut found = false;
        for g in monic_of_degree(d, q) {
            if let Some(quot) = divide_exact(&f, &g, q) {
                out.push(d);
                f = quot;
                found = true;
                break;
            }
        }
        if !found {
            d += 1;
        }
    }
    out.sort_unstable();
    out
}

/// Every monic polynomial of degree `d` over `F_q`, constant term first.
pub fn monic_of_degree(d: usize, q: u64) -> impl Iterator<Item = Vec<u64>> {
    let count = q.pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push(idx % q);
            idx /= q;
        }
        v.push(1);
        v
    })
}

/// `f / g` when `g` (monic) divides `f` exactly.
fn divide_exact(f: &[u64], g: &[u64], q: u64) -> Option<Vec<u64>> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    if r.len() < g.len() {
        return None;
    }
    let mut quot = vec![0u64; r.len() - dg];
    for i in (0..quot.len()).rev() {
        let c = r[i + dg] % q;
        quot[i] = c;
        for (j, &gj) in g.iter().enumerate() {
            r[i + j] = (r[i + j] + q * q - c * gj % q) % q;
        }
    }
    r[..dg].iter().all(|&c| c == 0).then_some(quot)
}

/// Multiplicity-free check by brute force: no monic factor of degree
/// `<= deg/2` divides `f` twice.
pub fn is_squarefree_brute(f: &[u64], q: u64) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for g in monic_of_degree(d, q) {
            if let Some(once) = divide_exact(f, &g, q) {
                if divide_exact(&once, &g, q).is_some() {
                    return false;
                }
            }
        }
    }
    true
}

/// Validates `value` against the subset of JSON Schema the shipped schema
/// uses: `type`, `enum`, `required`, `properties`, `additionalProperties`,
/// `items`, `minItems`, `maxItems`, `minimum`, `oneOf`.
pub fn validate_schema(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    let Some(obj) = schema.as_object() else {
        return Ok(());
    };
    if let Some(t) = obj.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: bad type keyword")),
        };
        if !types.iter().any(|t| type_matches(t, value)) {
            return Err(format!("{path}: expected {types:?}, got {value}"));
        }
    }
    if let Some(Value::Array(options)) = obj.get("enum") {
        if !options.contains(value) {
            return Err(format!("{path}: {value} not in enum"));
        }
    }
    if let Some(Value::Array(options)) = obj.get("oneOf") {
        let hits = options
            .iter()
            .filter(|s| validate_schema(s, value, path).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("{path}: matched {hits} oneOf branches"));
        }
    }
    if let (Some(min), Some(v)) = (obj.get("minimum").and_then(Value::as_f64), value.as_f64()) {
        if v < min {
            return Err(format!("{path}: {v} below minimum {min}"));
        }
    }
    if let Value::Object(map) = value {
        if let Some(Value::Array(req)) = obj.get("required") {
            for k in req.iter().filter_map(Value::as_str) {
                if !map.contains_key(k) {
                    return Err(format!("{path}: missing {k}"));
                }
            }
        }
        let props = obj.get("properties").and_then(Value::as_object);
        for (k, v) in map {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => validate_schema(sub, v, &format!("{path}.{k}"))?,
                None if obj.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{path}: unexpected property {k}"));
                }
                None => {}
            }
        }
    }
    if let Value::Array(items) = value {
        if let Some(min) = obj.get("minItems").and_then(Value::as_u64) {
            if (items.len() as u64) < min {
                return Err(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(max) = obj.get("maxItems").and_then(Value::as_u64) {
            if (items.len() as u64) > max {
                return Err(format!("{path}: more than {max} items"));
            }
        }
        if let Some(sub) = obj.get("items") {
            for (i, v) in items.iter().enumerate() {
                validate_schema(sub, v, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        "string" => v.is_string(),
        "array" => v.is_array(),
        "object" => v.is_object(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}
