//! JSON forms of complexes, A∞-structures, morphisms, modules and reports.
//!
//! Every document carries `"schema": "koszul-ainfty/1"`. Coefficients are
//! residues in `[0, p)`; basis vectors are `[degree, index]`. Object keys are
//! sorted, so serialization is deterministic.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::ainfinity::{BasisRef, CheckReport, ModuleTable, MorphismTable, OperationTable, TableAInfinity, Violation};
use crate::error::{Error, Result};
use crate::fp::{FpMatrix, Prime};
use crate::graded::{CochainComplex, GradedSpace};
use crate::sparse::SparseVec;

pub const SCHEMA: &str = "koszul-ainfty/1";

fn parse_err(at: &str, what: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{at}: {what}"))
}

/// A document skeleton with the schema and kind fields.
pub fn document(kind: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("kind".into(), json!(kind));
    m
}

/// Pretty JSON followed by a newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn check_schema(v: &Value, at: &str) -> Result<()> {
    match v.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => Ok(()),
        Some(other) => Err(parse_err(at, format!("unsupported schema {other:?}"))),
        None => Err(parse_err(at, "missing \"schema\"")),
    }
}

fn space_fields(space: &GradedSpace, out: &mut Map<String, Value>) {
    let dims: Map<String, Value> = space.degrees().map(|d| (d.to_string(), json!(space.dim(d)))).collect();
    out.insert("dims".into(), Value::Object(dims));
    if space.is_bigraded() {
        let internal: Map<String, Value> =
            space.degrees().map(|d| (d.to_string(), json!(space.internal_degrees(d)))).collect();
        out.insert("internal_degrees".into(), Value::Object(internal));
    }
}

fn get<'a>(v: &'a Value, key: &str, at: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(at, format!("missing {key:?}")))
}

fn as_i64(v: &Value, at: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| parse_err(at, "expected an integer"))
}

fn as_usize(v: &Value, at: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| parse_err(at, "expected a non-negative integer"))
}

fn parse_prime(v: &Value, at: &str) -> Result<Prime> {
    let p = as_i64(get(v, "p", at)?, &format!("{at}.p"))?;
    let p = u32::try_from(p).map_err(|_| parse_err(&format!("{at}.p"), "out of range"))?;
    Prime::new(p).map_err(|e| parse_err(&format!("{at}.p"), e))
}

fn degree_map<'a>(v: &'a Value, at: &str) -> Result<BTreeMap<i32, &'a Value>> {
    let obj = v.as_object().ok_or_else(|| parse_err(at, "expected an object keyed by degree"))?;
    obj.iter()
        .map(|(k, x)| k.parse::<i32>().map(|d| (d, x)).map_err(|_| parse_err(at, format!("bad degree key {k:?}"))))
        .collect()
}

fn parse_space(v: &Value, at: &str) -> Result<GradedSpace> {
    let dims = degree_map(get(v, "dims", at)?, &format!("{at}.dims"))?;
    let internal = match v.get("internal_degrees") {
        Some(x) => Some(degree_map(x, &format!("{at}.internal_degrees"))?),
        None => None,
    };
    let (Some(&lo), Some(&hi)) = (dims.keys().next(), dims.keys().last()) else {
        return Ok(GradedSpace::zero());
    };
    let mut sizes = Vec::new();
    let mut ws = Vec::new();
    for d in lo..=hi {
        let n = match dims.get(&d) {
            Some(x) => as_usize(x, &format!("{at}.dims.{d}"))?,
            None => 0,
        };
        sizes.push(n);
        if let Some(internal) = &internal {
            let here = format!("{at}.internal_degrees.{d}");
            let list: Vec<i32> = match internal.get(&d) {
                Some(x) => x
                    .as_array()
                    .ok_or_else(|| parse_err(&here, "expected a list"))?
                    .iter()
                    .map(|w| as_i64(w, &here).map(|w| w as i32))
                    .collect::<Result<_>>()?,
                None => Vec::new(),
            };
            if list.len() != n {
                return Err(parse_err(&here, format!("expected {n} entries")));
            }
            ws.push(list);
        }
    }
    Ok(if internal.is_some() { GradedSpace::bigraded(lo, ws) } else { GradedSpace::new(lo, &sizes) })
}

fn basis_ref_json(r: BasisRef) -> Value {
    json!([r.0, r.1])
}

fn parse_basis_ref(v: &Value, space: &GradedSpace, at: &str) -> Result<BasisRef> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| parse_err(at, "expected [degree, index]"))?;
    let d = as_i64(&pair[0], at)? as i32;
    let i = as_usize(&pair[1], at)?;
    if i >= space.dim(d) {
        return Err(parse_err(at, format!("no basis vector {i} in degree {d}")));
    }
    Ok((d, i))
}

/// Nonzero constants of a table: `{"in": [...], "out": [deg, idx], "c": coeff}`.
fn table_json(table: &BTreeMap<Vec<BasisRef>, SparseVec>, out_degree: impl Fn(&[BasisRef]) -> i32) -> Value {
    let mut list = Vec::new();
    for (inputs, value) in table {
        let deg = out_degree(inputs);
        for (&i, &c) in value.iter() {
            list.push(json!({
                "in": inputs.iter().map(|&r| basis_ref_json(r)).collect::<Vec<_>>(),
                "out": [deg, i],
                "c": c,
            }));
        }
    }
    Value::Array(list)
}

fn parse_table(
    v: &Value,
    p: Prime,
    input_spaces: &[&GradedSpace],
    output_space: &GradedSpace,
    arity: usize,
    out_degree: &dyn Fn(&[BasisRef]) -> i64,
    at: &str,
) -> Result<BTreeMap<Vec<BasisRef>, SparseVec>> {
    let list = v.as_array().ok_or_else(|| parse_err(at, "expected a list of constants"))?;
    let mut table: BTreeMap<Vec<BasisRef>, SparseVec> = BTreeMap::new();
    for (k, entry) in list.iter().enumerate() {
        let here = format!("{at}[{k}]");
        let inputs = get(entry, "in", &here)?
            .as_array()
            .ok_or_else(|| parse_err(&here, "\"in\" must be a list"))?
            .iter()
            .enumerate()
            .map(|(j, r)| parse_basis_ref(r, input_spaces[j.min(input_spaces.len() - 1)], &format!("{here}.in[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        if inputs.len() != arity {
            return Err(parse_err(&here, format!("expected {arity} inputs")));
        }
        let out = parse_basis_ref(get(entry, "out", &here)?, output_space, &format!("{here}.out"))?;
        if out.0 as i64 != out_degree(&inputs) {
            return Err(parse_err(&here, format!("output degree must be {}", out_degree(&inputs))));
        }
        let c = as_i64(get(entry, "c", &here)?, &format!("{here}.c"))?;
        table.entry(inputs).or_default().add_term(out.1, p.reduce(c), p);
    }
    table.retain(|_, v| !v.is_zero());
    Ok(table)
}

fn arity_key(prefix: &str, key: &str, at: &str) -> Result<usize> {
    key.strip_prefix(prefix)
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_err(at, format!("bad map name {key:?}, expected {prefix}<n>")))
}

fn degree_sum(x: &[BasisRef]) -> i64 {
    x.iter().map(|r| r.0 as i64).sum()
}

// ---------------------------------------------------------------------------
// complexes

pub fn complex_to_json(c: &CochainComplex) -> Value {
    let mut doc = document("complex");
    doc.insert("p".into(), json!(c.prime().value()));
    let space = c.space();
    space_fields(space, &mut doc);
    let diffs: Map<String, Value> = space
        .degrees()
        .filter(|&d| space.dim(d) > 0 && space.dim(d + 1) > 0)
        .map(|d| (d.to_string(), json!(c.differential(d).to_rows())))
        .collect();
    doc.insert("differentials".into(), Value::Object(diffs));
    Value::Object(doc)
}

pub fn complex_from_json(v: &Value) -> Result<CochainComplex> {
    check_schema(v, "$")?;
    let p = parse_prime(v, "$")?;
    let space = parse_space(v, "$")?;
    let mut full = BTreeMap::new();
    if let Some(diffs) = v.get("differentials") {
        for (d, m) in degree_map(diffs, "$.differentials")? {
            let at = format!("$.differentials.{d}");
            let rows: Vec<Vec<i64>> = serde_json::from_value(m.clone()).map_err(|e| parse_err(&at, e))?;
            let (r, c) = (space.dim(d + 1), space.dim(d));
            if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                return Err(parse_err(&at, format!("expected a {r}x{c} matrix")));
            }
            full.insert(d, FpMatrix::from_rows(&rows, c, p).map_err(|e| parse_err(&at, e))?);
        }
    }
    CochainComplex::from_full(p, space, &full)
}

// ---------------------------------------------------------------------------
// A∞-structures

pub fn ainfinity_to_json(a: &TableAInfinity) -> Value {
    let mut doc = document("ainfinity");
    doc.insert("p".into(), json!(a.p.value()));
    space_fields(&a.space, &mut doc);
    doc.insert("n_max".into(), json!(a.n_max));
    doc.insert("unit".into(), a.unit.map_or(Value::Null, basis_ref_json));
    doc.insert("certified_window".into(), a.certified.map_or(Value::Null, |(lo, hi)| json!([lo, hi])));
    let maps: Map<String, Value> = a
        .maps
        .iter()
        .map(|(&n, t)| (format!("m{n}"), table_json(t, |x| (degree_sum(x) + 2 - n as i64) as i32)))
        .collect();
    doc.insert("maps".into(), Value::Object(maps));
    Value::Object(doc)
}

pub fn ainfinity_from_json(v: &Value) -> Result<TableAInfinity> {
    ainfinity_at(v, "$")
}

fn ainfinity_at(v: &Value, at: &str) -> Result<TableAInfinity> {
    check_schema(v, at)?;
    let p = parse_prime(v, at)?;
    let space = parse_space(v, at)?;
    let n_max = as_usize(get(v, "n_max", at)?, &format!("{at}.n_max"))?;
    let mut a = TableAInfinity::new(p, space, n_max);
    a.unit = match v.get("unit") {
        None | Some(Value::Null) => None,
        Some(u) => Some(parse_basis_ref(u, &a.space, &format!("{at}.unit"))?),
    };
    if a.unit.is_some_and(|u| u.0 != 0) {
        return Err(parse_err(&format!("{at}.unit"), "the unit must sit in degree 0"));
    }
    a.certified = match v.get("certified_window") {
        None | Some(Value::Null) => None,
        Some(w) => {
            let pair: (i32, i32) = serde_json::from_value(w.clone()).map_err(|e| parse_err(&format!("{at}.certified_window"), e))?;
            Some(pair)
        }
    };
    if let Some(maps) = v.get("maps") {
        let obj = maps.as_object().ok_or_else(|| parse_err(&format!("{at}.maps"), "expected an object"))?;
        for (key, list) in obj {
            let here = format!("{at}.maps.{key}");
            let n = arity_key("m", key, &here)?;
            if n > n_max {
                return Err(parse_err(&here, format!("arity {n} exceeds n_max = {n_max}")));
            }
            let space = a.space.clone();
            let table = parse_table(list, p, &[&space], &space, n, &|x| degree_sum(x) + 2 - n as i64, &here)?;
            if !table.is_empty() {
                a.maps.insert(n, table);
            }
        }
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// morphisms and modules

pub fn morphism_to_json(source: &TableAInfinity, target: &TableAInfinity, f: &MorphismTable) -> Value {
    let mut doc = document("morphism");
    doc.insert("source".into(), ainfinity_to_json(source));
    doc.insert("target".into(), ainfinity_to_json(target));
    doc.insert("n_max".into(), json!(f.n_max));
    let maps: Map<String, Value> = f
        .maps
        .iter()
        .map(|(&n, t)| (format!("f{n}"), table_json(t, |x| (degree_sum(x) + 1 - n as i64) as i32)))
        .collect();
    doc.insert("maps".into(), Value::Object(maps));
    Value::Object(doc)
}

pub fn morphism_from_json(v: &Value) -> Result<(TableAInfinity, TableAInfinity, MorphismTable)> {
    check_schema(v, "$")?;
    let source = ainfinity_at(get(v, "source", "$")?, "$.source")?;
    let target = ainfinity_at(get(v, "target", "$")?, "$.target")?;
    let n_max = as_usize(get(v, "n_max", "$")?, "$.n_max")?;
    let mut f = MorphismTable::new(n_max);
    if let Some(maps) = v.get("maps") {
        let obj = maps.as_object().ok_or_else(|| parse_err("$.maps", "expected an object"))?;
        for (key, list) in obj {
            let here = format!("$.maps.{key}");
            let n = arity_key("f", key, &here)?;
            let table = parse_table(list, source.p, &[&source.space], &target.space, n, &|x| degree_sum(x) + 1 - n as i64, &here)?;
            if !table.is_empty() {
                f.maps.insert(n, table);
            }
        }
    }
    Ok((source, target, f))
}

pub fn module_to_json(algebra: &TableAInfinity, m: &ModuleTable) -> Value {
    let mut doc = document("module");
    doc.insert("algebra".into(), ainfinity_to_json(algebra));
    space_fields(&m.space, &mut doc);
    doc.insert("n_max".into(), json!(m.n_max));
    let maps: Map<String, Value> = m
        .maps
        .iter()
        .map(|(&n, t)| (format!("nu{n}"), table_json(t, |x| (degree_sum(x) + 2 - n as i64) as i32)))
        .collect();
    doc.insert("maps".into(), Value::Object(maps));
    Value::Object(doc)
}

/// In `nu<n>` entries the last input is the module element.
pub fn module_from_json(v: &Value) -> Result<(TableAInfinity, ModuleTable)> {
    check_schema(v, "$")?;
    let algebra = ainfinity_at(get(v, "algebra", "$")?, "$.algebra")?;
    let space = parse_space(v, "$")?;
    let n_max = as_usize(get(v, "n_max", "$")?, "$.n_max")?;
    let mut m = ModuleTable::new(space, n_max);
    if let Some(maps) = v.get("maps") {
        let obj = maps.as_object().ok_or_else(|| parse_err("$.maps", "expected an object"))?;
        for (key, list) in obj {
            let here = format!("$.maps.{key}");
            let n = arity_key("nu", key, &here)?;
            let mut spaces = vec![&algebra.space; n - 1];
            spaces.push(&m.space);
            let table = parse_table(list, algebra.p, &spaces, &m.space, n, &|x| degree_sum(x) + 2 - n as i64, &here)?;
            if !table.is_empty() {
                m.maps.insert(n, table);
            }
        }
    }
    Ok((algebra, m))
}

// ---------------------------------------------------------------------------
// reports

pub fn violation_to_json(v: &Violation) -> Value {
    json!({
        "arity": v.arity,
        // the unit inside a unitality witness is written as [0, "unit"]
        "inputs": v.inputs.iter().map(|&(d, i)| if i == usize::MAX { json!([d, "unit"]) } else { json!([d, i]) }).collect::<Vec<_>>(),
        "degree": v.degree,
        "residual": v.residual.iter().map(|(&i, &c)| json!([i, c])).collect::<Vec<_>>(),
    })
}

pub fn report_to_json(r: &CheckReport) -> Value {
    json!({
        "passed": r.passed,
        "tensors_checked": r.tensors_checked,
        "violation_count": r.violation_count,
        "violations": r.violations.iter().map(violation_to_json).collect::<Vec<_>>(),
    })
}

/// Structure constants of one operation, for tables embedded in larger documents.
pub fn operation_table_json(table: &OperationTable, out_degree: impl Fn(&[BasisRef]) -> i32) -> Value {
    table_json(table, out_degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn complex_round_trip() {
        let space = GradedSpace::new(-1, &[1, 2, 1]);
        let full = BTreeMap::from([
            (-1, FpMatrix::from_rows(&[[1], [0]], 1, pr(5)).unwrap()),
            (0, FpMatrix::from_rows(&[[0, 3]], 2, pr(5)).unwrap()),
        ]);
        let c = CochainComplex::from_full(pr(5), space, &full).unwrap();
        let v = complex_to_json(&c);
        let back = complex_from_json(&v).unwrap();
        assert_eq!(to_string(&complex_to_json(&back)), to_string(&v));
    }

    #[test]
    fn ainfinity_round_trip_and_errors() {
        let p = pr(3);
        let mut a = TableAInfinity::new(p, GradedSpace::bigraded(0, vec![vec![0], vec![-1], vec![-3]]), 3);
        a.set(vec![(1, 0), (1, 0), (1, 0)], SparseVec::from_pairs([(0, -1)], p)).unwrap();
        a.unit = Some((0, 0));
        a.certified = Some((0, 2));
        let v = ainfinity_to_json(&a);
        assert_eq!(ainfinity_from_json(&v).unwrap(), a);
        let mut bad = v.clone();
        bad["maps"]["m3"][0]["out"] = json!([1, 0]);
        let err = ainfinity_from_json(&bad).unwrap_err().to_string();
        assert!(err.contains("$.maps.m3[0]"), "{err}");
        let mut bad = v;
        bad["schema"] = json!("other/2");
        assert!(ainfinity_from_json(&bad).is_err());
    }
}
