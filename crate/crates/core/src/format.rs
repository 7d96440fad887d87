//! JSON structure-constant files and the bundled algebras.
//!
//! ```json
//! { "name": "sl2", "n": 3, "field": "rational",
//!   "sigma": [[i, j, k, l, "scalar"], ...],
//!   "c": [[i, j, k, "scalar"], ...],
//!   "grading": [[i, j, "scalar"], ...] }
//! ```
//!
//! Indices are 1-based; unlisted components are zero.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linop::{digits, LinOp};
use crate::qlie::{ScalarField, StructureConstants};
use crate::scalar::Scalar;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: String,
    n: usize,
    field: ScalarField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    properties: Vec<String>,
    sigma: Vec<Vec<Value>>,
    c: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grading: Option<Vec<Vec<Value>>>,
}

pub const BUNDLED: [&str; 4] = ["abelian1", "gl11", "hecke2", "sl2"];

pub fn bundled_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "sl2" => include_str!("../data/sl2.json"),
        "gl11" => include_str!("../data/gl11.json"),
        "hecke2" => include_str!("../data/hecke2.json"),
        "abelian1" => include_str!("../data/abelian1.json"),
        _ => return None,
    })
}

/// Loads one of [`BUNDLED`].
pub fn bundled(name: &str) -> Result<StructureConstants> {
    let src = bundled_source(name).ok_or_else(|| Error::Format(format!("no bundled algebra `{name}`")))?;
    parse(src)
}

fn fill(
    op: &mut LinOp,
    entries: &[Vec<Value>],
    what: &str,
    n: usize,
    field: ScalarField,
    in_legs: usize,
) -> Result<()> {
    let arity = op.in_legs() + op.out_legs();
    let mut seen = BTreeSet::new();
    for (pos, e) in entries.iter().enumerate() {
        let here = |msg: String| Error::Format(format!("{what} entry {}: {msg}", pos + 1));
        if e.len() != arity + 1 {
            return Err(here(format!("expected {} indices and a scalar", arity)));
        }
        let mut idx = Vec::with_capacity(arity);
        for v in &e[..arity] {
            let i = v
                .as_u64()
                .filter(|&i| i >= 1 && i as usize <= n)
                .ok_or_else(|| here(format!("index {v} is not in 1..={n}")))?;
            idx.push(i as usize - 1);
        }
        let text = match &e[arity] {
            Value::String(s) => s.clone(),
            Value::Number(x) => x.to_string(),
            other => return Err(here(format!("scalar must be a string, found {other}"))),
        };
        let s: Scalar = text.parse().map_err(|err| here(format!("{err}")))?;
        if field == ScalarField::Rational && s.is_laurent() {
            return Err(here(format!("`{text}` uses q in a rational-field file")));
        }
        if !seen.insert(idx.clone()) {
            return Err(here("duplicate component".into()));
        }
        let (out, inn) = idx.split_at(arity - in_legs);
        op.set(out, inn, s);
    }
    Ok(())
}

pub fn parse(src: &str) -> Result<StructureConstants> {
    let raw: RawFile = serde_json::from_str(src).map_err(|e| Error::Format(e.to_string()))?;
    let n = raw.n;
    if n == 0 {
        return Err(Error::Format("n must be positive".into()));
    }
    let mut sigma = LinOp::zeros(n, 2, 2);
    fill(&mut sigma, &raw.sigma, "sigma", n, raw.field, 2)?;
    let mut c = LinOp::zeros(n, 1, 2);
    fill(&mut c, &raw.c, "c", n, raw.field, 1)?;
    let mut sc = StructureConstants::new(raw.name, sigma, c)?;
    sc.field = raw.field;
    sc.properties = raw.properties;
    if let Some(g) = raw.grading {
        let mut d = LinOp::zeros(n, 1, 1);
        fill(&mut d, &g, "grading", n, raw.field, 1)?;
        sc = sc.with_grading(d)?;
    }
    Ok(sc)
}

fn entries(op: &LinOp) -> Vec<Vec<Value>> {
    let d = op.dim();
    op.nonzeros()
        .map(|(r, c, v)| {
            let mut e: Vec<Value> = digits(r, op.out_legs(), d)
                .into_iter()
                .chain(digits(c, op.in_legs(), d))
                .map(|i| Value::from(i + 1))
                .collect();
            e.push(Value::String(v.to_string()));
            e
        })
        .collect()
}

/// Serializes back to the file format.
pub fn to_json(sc: &StructureConstants) -> String {
    let raw = RawFile {
        name: sc.name.clone(),
        n: sc.n(),
        field: sc.field,
        comment: None,
        properties: sc.properties.clone(),
        sigma: entries(&sc.sigma),
        c: entries(&sc.c),
        grading: sc.grading.as_ref().map(entries),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_load() {
        for name in BUNDLED {
            let sc = bundled(name).unwrap();
            assert_eq!(sc.name, name);
        }
        let sl2 = bundled("sl2").unwrap();
        assert_eq!(sl2.c.get(&[1, 2], &[0]), &Scalar::from(1));
        assert_eq!(sl2.sigma.get(&[0, 1], &[1, 0]), &Scalar::one());
        assert_eq!(bundled("hecke2").unwrap().field, ScalarField::Laurent);
        assert!(bundled("gl11").unwrap().grading.is_some());
    }

    #[test]
    fn round_trip() {
        for name in BUNDLED {
            let sc = bundled(name).unwrap();
            assert_eq!(parse(&to_json(&sc)).unwrap(), sc);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bad_scalar = r#"{"name":"x","n":1,"field":"rational","sigma":[[1,1,1,1,"1 +* q"]],"c":[]}"#;
        let err = parse(bad_scalar).unwrap_err().to_string();
        assert!(err.contains("sigma entry 1"), "{err}");
        let bad_index = r#"{"name":"x","n":1,"field":"rational","sigma":[[1,2,1,1,"1"]],"c":[]}"#;
        assert!(parse(bad_index).is_err());
        let q_in_rational = r#"{"name":"x","n":1,"field":"rational","sigma":[[1,1,1,1,"q"]],"c":[]}"#;
        assert!(parse(q_in_rational).is_err());
        let dup = r#"{"name":"x","n":1,"field":"rational","sigma":[[1,1,1,1,"1"],[1,1,1,1,"1"]],"c":[]}"#;
        assert!(parse(dup).is_err());
        assert!(parse("{").is_err());
    }
}
