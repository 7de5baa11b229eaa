//! Body specs, query batches and disc/certificate files.
//!
//! Body and query files are TOML, or JSON when the path ends in `.json`.
//! Complex numbers are written as `[re, im]` pairs.
//!
//! ```toml
//! kind = "complex_ellipsoid"
//! dim = 2
//! exponents = [1.0, 2.0]
//! radii = [1.0, 1.0]
//! ```
//!
//! ```toml
//! [[query]]
//! type = "metric"
//! a = [[0.0, 0.0], [0.1, 0.0]]
//! v = [[1.0, 0.0], [0.0, 0.0]]
//! tol = 1e-4
//! ```

use crate::disc::DiscPoly;
use crate::dual::DualElement;
use crate::error::{Error, Result};
use crate::gauge::ConvexBody;
use crate::C;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str, format: Format) -> Result<T> {
    match format {
        Format::Toml => toml::from_str(text).map_err(|e| Error::Parse(e.to_string())),
        Format::Json => serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string())),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn to_c(v: &[[f64; 2]]) -> Vec<C> {
    v.iter().map(|p| C::new(p[0], p[1])).collect()
}

fn from_c(v: &[C]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

/// Domain specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub kind: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparability_c: Option<f64>,
}

impl BodySpec {
    pub fn parse(text: &str, format: Format) -> Result<Self> {
        parse(text, format)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?, Format::from_path(path)).map_err(|e| with_path(path, e))
    }

    pub fn build(&self) -> Result<ConvexBody> {
        let n = self.dim;
        let need = |field: &Option<Vec<f64>>, name: &str| -> Result<Vec<f64>> {
            match field {
                Some(v) if v.len() == n => Ok(v.clone()),
                Some(v) => Err(Error::DimensionMismatch { expected: n, got: v.len() }),
                None => Err(Error::InvalidBody(format!("{} requires `{name}`", self.kind))),
            }
        };
        let radii = || match &self.radii {
            None => Ok(vec![1.0; n]),
            Some(_) => need(&self.radii, "radii"),
        };
        let body = match self.kind.as_str() {
            "ball" => ConvexBody::ball(n)?,
            "disc" | "unit_disc" if n == 1 => ConvexBody::unit_disc(),
            "polydisc" => ConvexBody::polydisc(radii()?)?,
            "complex_ellipsoid" => ConvexBody::complex_ellipsoid(need(&self.exponents, "exponents")?, radii()?)?,
            "polyhedral" => {
                let Some(fs) = &self.functionals else {
                    return Err(Error::InvalidBody("polyhedral requires `functionals`".into()));
                };
                let fs: Vec<Vec<C>> = fs.iter().map(|w| to_c(w)).collect();
                if let Some(w) = fs.iter().find(|w| w.len() != n) {
                    return Err(Error::DimensionMismatch { expected: n, got: w.len() });
                }
                ConvexBody::polyhedral(fs)?
            }
            "oracle" => {
                return Err(Error::InvalidBody("oracle bodies are only available through the library".into()))
            }
            other => return Err(Error::InvalidBody(format!("unknown kind `{other}`"))),
        };
        if body.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: body.dim() });
        }
        Ok(body)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryType {
    Metric,
    Distance,
    CkCheck,
}

impl QueryType {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryType::Metric => "metric",
            QueryType::Distance => "distance",
            QueryType::CkCheck => "ck_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(rename = "type")]
    pub kind: QueryType,
    pub a: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// A validated query.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub id: String,
    pub kind: QueryType,
    pub a: Vec<C>,
    /// Tangent vector (metric, ck_check) or target point (distance).
    pub second: Vec<C>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    pub query: Vec<QuerySpec>,
}

impl QueryFile {
    pub fn parse(text: &str, format: Format) -> Result<Self> {
        parse(text, format)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?, Format::from_path(path)).map_err(|e| with_path(path, e))
    }

    /// Checks field presence, dimensions and tolerances; ids default to the
    /// 1-based position in the file.
    pub fn queries(&self, dim: usize) -> Result<Vec<Query>> {
        let mut out = Vec::with_capacity(self.query.len());
        for (i, q) in self.query.iter().enumerate() {
            let id = q.id.clone().unwrap_or_else(|| (i + 1).to_string());
            let ctx = |m: &str| Error::Parse(format!("query {id}: {m}"));
            let second = match (q.kind, &q.v, &q.b) {
                (QueryType::Distance, _, Some(b)) => b,
                (QueryType::Distance, _, None) => return Err(ctx("distance query requires `b`")),
                (_, Some(v), _) => v,
                (_, None, _) => return Err(ctx("metric query requires `v`")),
            };
            if q.a.len() != dim || second.len() != dim {
                return Err(ctx(&format!("expected vectors of dimension {dim}")));
            }
            if let Some(t) = q.tol {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(ctx("tol must be positive"));
                }
            }
            out.push(Query { id, kind: q.kind, a: to_c(&q.a), second: to_c(second), tol: q.tol });
        }
        Ok(out)
    }
}

/// Writes `value` as pretty JSON.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse(&read(path)?, Format::Json).map_err(|e| with_path(path, e))
}

pub fn save_disc(path: &Path, f: &DiscPoly) -> Result<()> {
    save_json(path, f)
}

pub fn load_disc(path: &Path) -> Result<DiscPoly> {
    load_json(path)
}

pub fn save_dual(path: &Path, h: &DualElement) -> Result<()> {
    save_json(path, h)
}

pub fn load_dual(path: &Path) -> Result<DualElement> {
    load_json(path)
}

/// Converts a complex vector to `[re, im]` pairs.
pub fn pairs(v: &[C]) -> Vec<[f64; 2]> {
    from_c(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_kinds_parse() {
        let b = BodySpec::parse("kind = \"complex_ellipsoid\"\ndim = 2\nexponents = [1.0, 2.0]\n", Format::Toml)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(b.kind_name(), "complex_ellipsoid");
        let b = BodySpec::parse(r#"{"kind": "ball", "dim": 3}"#, Format::Json).unwrap().build().unwrap();
        assert_eq!(b.dim(), 3);
    }

    #[test]
    fn bad_specs_rejected() {
        let err = BodySpec::parse("kind = \"ball\"\ndim = ", Format::Toml).unwrap_err();
        assert!(matches!(err, Error::Parse(m) if m.contains("line")));
        let err = BodySpec::parse("kind = \"ball\"\ndim = 2\nradius = 1.0\n", Format::Toml).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let spec = BodySpec::parse("kind = \"polydisc\"\ndim = 2\nradii = [1.0]\n", Format::Toml).unwrap();
        assert!(spec.build().is_err());
        let spec = BodySpec::parse("kind = \"oracle\"\ndim = 2\n", Format::Toml).unwrap();
        assert!(spec.build().is_err());
    }

    #[test]
    fn queries_validate() {
        let text = "[[query]]\ntype = \"distance\"\na = [[0.0, 0.0]]\nb = [[0.5, 0.0]]\n\n[[query]]\nid = \"m\"\ntype = \"metric\"\na = [[0.0, 0.0]]\nv = [[1.0, 0.0]]\n";
        let qs = QueryFile::parse(text, Format::Toml).unwrap().queries(1).unwrap();
        assert_eq!(qs[0].id, "1");
        assert_eq!(qs[1].id, "m");
        assert_eq!(qs[0].second, vec![C::new(0.5, 0.0)]);
        let bad = "[[query]]\ntype = \"distance\"\na = [[0.0, 0.0]]\nv = [[0.5, 0.0]]\n";
        assert!(QueryFile::parse(bad, Format::Toml).unwrap().queries(1).is_err());
    }
}
