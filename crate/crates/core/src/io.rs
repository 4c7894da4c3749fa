//! File formats: polytope JSON, polynomial coefficient files and potential
//! spec strings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Term};
use crate::polytope::{Facet, LabelledPolytope};
use crate::potential::PotentialKind;
use crate::rational;

#[derive(Debug, Deserialize)]
struct RawFacet {
    normal: Vec<i64>,
    offset: Value,
}

#[derive(Debug, Deserialize)]
struct RawPolytope {
    dim: usize,
    facets: Vec<RawFacet>,
}

fn offset_from(v: &Value, facet: usize) -> Result<rational::Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(Error::Parse(format!("facet {facet}: offset must be a number or string, got {other}"))),
    };
    rational::parse(&text).map_err(|e| Error::Parse(format!("facet {facet}: {e}")))
}

/// Parses `{"dim": n, "facets": [{"normal": [...], "offset": ...}]}` and
/// validates the polytope.
pub fn polytope_from_json(text: &str) -> Result<LabelledPolytope> {
    let raw: RawPolytope = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let facets = raw
        .facets
        .iter()
        .enumerate()
        .map(|(i, f)| Ok(Facet::new(f.normal.clone(), offset_from(&f.offset, i)?)))
        .collect::<Result<Vec<_>>>()?;
    LabelledPolytope::new(raw.dim, facets)
}

pub fn read_polytope(path: &Path) -> Result<LabelledPolytope> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    polytope_from_json(&text)
}

/// Canonical JSON: integer offsets as numbers, others as reduced `"p/q"`.
pub fn polytope_to_json(p: &LabelledPolytope) -> Value {
    let facets: Vec<Value> = p
        .facets()
        .iter()
        .map(|f| {
            let off = if f.offset.is_integer() {
                let s = rational::format(&f.offset);
                s.parse::<i64>().map(Value::from).unwrap_or(Value::String(s))
            } else {
                Value::String(rational::format(&f.offset))
            };
            json!({ "normal": f.normal, "offset": off })
        })
        .collect();
    json!({ "dim": p.dim(), "facets": facets })
}

#[derive(Debug, Serialize, Deserialize)]
struct RawTerm {
    exponents: Vec<u32>,
    coef: f64,
}

/// Reads `[{"exponents": [..], "coef": c}, ...]`.
pub fn read_polynomial(path: &Path, dim: usize) -> Result<Polynomial> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    polynomial_from_json(&text, dim)
}

pub fn polynomial_from_json(text: &str, dim: usize) -> Result<Polynomial> {
    let raw: Vec<RawTerm> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some((i, t)) = raw.iter().enumerate().find(|(_, t)| t.exponents.len() != dim) {
        return Err(Error::Parse(format!("term {i}: {} exponents for dimension {dim}", t.exponents.len())));
    }
    Ok(Polynomial::new(dim, raw.into_iter().map(|t| Term { exponents: t.exponents, coef: t.coef }).collect()))
}

/// A potential as named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Guillemin,
    Uc { axis: usize, c: f64 },
    Dilation { s: f64 },
    Poly(PathBuf),
}

fn kv<'a>(body: &'a str, key: &str) -> Result<&'a str> {
    body.split(',')
        .filter_map(|part| part.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
        .ok_or_else(|| Error::Parse(format!("missing `{key}=` in potential spec {body:?}")))
}

fn float(s: &str, what: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("bad {what} value {s:?}")))
}

impl PotentialSpec {
    /// `guillemin`, `uc:i=<axis>,c=<float>`, `dilation:s=<float>` or `poly:<file>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, body) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "guillemin" if body.is_empty() => Ok(Self::Guillemin),
            "uc" => {
                let axis = kv(body, "i")?.parse().map_err(|_| Error::Parse(format!("bad axis in {s:?}")))?;
                Ok(Self::Uc { axis, c: float(kv(body, "c")?, "c")? })
            }
            "dilation" => Ok(Self::Dilation { s: float(kv(body, "s")?, "s")? }),
            "poly" if !body.is_empty() => Ok(Self::Poly(PathBuf::from(body))),
            _ => Err(Error::Parse(format!("unknown potential spec {s:?}"))),
        }
    }

    pub fn to_kind(&self, dim: usize) -> Result<PotentialKind> {
        Ok(match self {
            Self::Guillemin => PotentialKind::Guillemin,
            Self::Uc { axis, c } => PotentialKind::QuadraticPerturbed { axis: *axis, c: *c },
            Self::Dilation { s } => PotentialKind::Dilation { s: *s },
            Self::Poly(path) => PotentialKind::GuilleminPlusPoly { poly: read_polynomial(path, dim)? },
        })
    }
}

impl std::fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Guillemin => write!(f, "guillemin"),
            Self::Uc { axis, c } => write!(f, "uc:i={axis},c={c}"),
            Self::Dilation { s } => write!(f, "dilation:s={s}"),
            Self::Poly(p) => write!(f, "poly:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polytope_round_trip() {
        let text = r#"{"dim":1,"facets":[{"normal":[1],"offset":0},{"normal":[-1],"offset":"1/3"}]}"#;
        let p = polytope_from_json(text).unwrap();
        let v: Value = serde_json::from_str(text).unwrap();
        assert_eq!(polytope_to_json(&p), v);
        let q = polytope_from_json(r#"{"dim":1,"facets":[{"normal":[1],"offset":"0.0"},{"normal":[-1],"offset":"2/6"}]}"#).unwrap();
        assert_eq!(polytope_to_json(&q), v);
        let r = polytope_from_json(r#"{"dim":1,"facets":[{"normal":[1],"offset":0},{"normal":[-1],"offset":1.5}]}"#).unwrap();
        assert_eq!(polytope_to_json(&r)["facets"][1]["offset"], "3/2");
    }

    #[test]
    fn rejects_non_primitive_with_index() {
        let text = r#"{"dim":2,"facets":[{"normal":[1,0],"offset":0},{"normal":[0,2],"offset":0},{"normal":[-1,-1],"offset":1}]}"#;
        match polytope_from_json(text) {
            Err(Error::NonPrimitiveNormal { facet, .. }) => assert_eq!(facet, 1),
            other => panic!("{other:?}"),
        }
        assert!(matches!(polytope_from_json("{"), Err(Error::Parse(_))));
        let bad = r#"{"dim":1,"facets":[{"normal":[1],"offset":"x"},{"normal":[-1],"offset":1}]}"#;
        assert!(polytope_from_json(bad).unwrap_err().to_string().contains("facet 0"));
    }

    #[test]
    fn potential_specs() {
        assert_eq!(PotentialSpec::parse("guillemin").unwrap(), PotentialSpec::Guillemin);
        assert_eq!(PotentialSpec::parse("uc:i=1,c=2.5").unwrap(), PotentialSpec::Uc { axis: 1, c: 2.5 });
        assert_eq!(PotentialSpec::parse("dilation:s=1.5").unwrap(), PotentialSpec::Dilation { s: 1.5 });
        assert_eq!(PotentialSpec::parse("poly:v.json").unwrap(), PotentialSpec::Poly("v.json".into()));
        for bad in ["", "uc:c=1", "dilation", "foo", "guillemin:x", "uc:i=a,c=1"] {
            assert!(PotentialSpec::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(PotentialSpec::parse("uc:i=0,c=5").unwrap().to_string(), "uc:i=0,c=5");
    }

    #[test]
    fn polynomial_file() {
        let p = polynomial_from_json(r#"[{"exponents":[2],"coef":-10.0}]"#, 1).unwrap();
        assert_eq!(p.degree(), 2);
        assert!(polynomial_from_json(r#"[{"exponents":[2,1],"coef":1.0}]"#, 1).is_err());
    }
}
