//! Version 1 group files: a torus complex structure and a list of
//! automorphisms, as JSON with rationals written `"p"` or `"p/q"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gallery::{CaseGroup, GalleryCase};
use crate::matrix::QMatrix;
use crate::rational::Rational;
use crate::torus::{TorusAutomorphism, TorusModel};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTorus {
    n: usize,
    j: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    matrix: Vec<Vec<i64>>,
    #[serde(default)]
    translation: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: u64,
    torus: RawTorus,
    generators: Vec<RawGenerator>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct GroupFile {
    pub torus: TorusModel,
    pub generators: Vec<TorusAutomorphism>,
    pub metadata: BTreeMap<String, String>,
}

fn parse_rational(s: &str, what: &str) -> Result<Rational> {
    s.parse().map_err(|_| Error::Parse(format!("{what}: not a rational \"p/q\": {s:?}")))
}

fn square_rows<T>(rows: &[Vec<T>], size: usize, what: &str) -> Result<()> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(Error::Parse(format!("{what} must be {size}x{size}")));
    }
    Ok(())
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", raw.schema_version)));
        }
        let n = raw.torus.n;
        if n == 0 {
            return Err(Error::Parse("torus.n must be positive".into()));
        }
        let size = 2 * n;
        square_rows(&raw.torus.j, size, "torus.j")?;
        let j = QMatrix::from_rows(
            raw.torus
                .j
                .iter()
                .map(|r| r.iter().map(|s| parse_rational(s, "torus.j")).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        );
        let torus = TorusModel::new(j)?;
        let mut generators = Vec::with_capacity(raw.generators.len());
        for (i, g) in raw.generators.iter().enumerate() {
            let tag = |e: Error| match e {
                Error::Invariant { invariant, .. } => Error::Invariant { generator: Some(i), invariant },
                other => other,
            };
            square_rows(&g.matrix, size, &format!("generators[{i}].matrix"))?;
            let m = QMatrix::from_rows(g.matrix.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect());
            torus.validate_automorphism(&m).map_err(tag)?;
            let aut = match &g.translation {
                None => TorusAutomorphism::new(m),
                Some(t) => {
                    if t.len() != size {
                        return Err(Error::Parse(format!("generators[{i}].translation must have length {size}")));
                    }
                    let t = t.iter().map(|s| parse_rational(s, "translation")).collect::<Result<Vec<_>>>()?;
                    TorusAutomorphism::with_translation(m, t)
                }
            };
            generators.push(aut);
        }
        Ok(GroupFile { torus, generators, metadata: raw.metadata })
    }

    /// Canonical text: fixed key order, one matrix row per line.
    pub fn to_canonical(&self) -> String {
        let q = |s: &str| serde_json::to_string(s).expect("strings serialize");
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"schema_version\": {SCHEMA_VERSION},");
        out.push_str("  \"torus\": {\n");
        let _ = writeln!(out, "    \"n\": {},", self.torus.n());
        out.push_str("    \"j\": [\n");
        let j = self.torus.j();
        let rows: Vec<String> = (0..j.rows())
            .map(|r| format!("      [{}]", j.row(r).iter().map(|x| q(&x.to_string())).collect::<Vec<_>>().join(", ")))
            .collect();
        out.push_str(&rows.join(",\n"));
        out.push_str("\n    ]\n  },\n");
        out.push_str("  \"generators\": [");
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| {
                let mut s = String::from("\n    {\n      \"matrix\": [\n");
                let rows: Vec<String> = (0..g.m.rows())
                    .map(|r| format!("        [{}]", g.m.row(r).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
                    .collect();
                s.push_str(&rows.join(",\n"));
                s.push_str("\n      ]");
                if let Some(t) = &g.t {
                    let _ = write!(
                        s,
                        ",\n      \"translation\": [{}]",
                        t.iter().map(|x| q(&x.to_string())).collect::<Vec<_>>().join(", ")
                    );
                }
                s.push_str("\n    }");
                s
            })
            .collect();
        out.push_str(&gens.join(","));
        out.push_str(if gens.is_empty() { "],\n" } else { "\n  ],\n" });
        out.push_str("  \"metadata\": {");
        let meta: Vec<String> = self.metadata.iter().map(|(k, v)| format!("\n    {}: {}", q(k), q(v))).collect();
        out.push_str(&meta.join(","));
        out.push_str(if meta.is_empty() { "}\n" } else { "\n  }\n" });
        out.push_str("}\n");
        out
    }

    /// Affine cases are written through their block embedding.
    pub fn from_case(case: &GalleryCase) -> Self {
        let mut metadata = case.metadata.clone();
        metadata.insert("name".into(), case.name.clone());
        if let CaseGroup::Affine(a) = &case.group {
            metadata.insert("representation".into(), "affine block embedding [[A,b],[0,1]]".into());
            metadata.insert("affine_linear_dim".into(), a.linear_dim().to_string());
        }
        for e in &case.expected {
            metadata.insert(format!("expected.{}", e.name), e.value.to_string());
        }
        GroupFile { torus: case.torus.clone(), generators: case.automorphisms(), metadata }
    }

    pub fn n(&self) -> usize {
        self.torus.n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{affine_example, u_n_on_torus};

    #[test]
    fn round_trip_is_byte_identical() {
        for case in [u_n_on_torus(3).unwrap(), affine_example(4, 2).unwrap()] {
            let text = GroupFile::from_case(&case).to_canonical();
            let back = GroupFile::parse(&text).unwrap();
            assert_eq!(back.to_canonical(), text);
            assert_eq!(back.generators, case.automorphisms());
        }
    }

    #[test]
    fn translation_round_trip() {
        let mut f = GroupFile::from_case(&u_n_on_torus(2).unwrap());
        f.generators[0] = TorusAutomorphism::with_translation(f.generators[0].m.clone(), vec![Rational::new(1, 2), Rational::new(5, 3), Rational::ZERO, Rational::ZERO]);
        let text = f.to_canonical();
        assert!(text.contains("\"2/3\""));
        assert_eq!(GroupFile::parse(&text).unwrap().to_canonical(), text);
    }

    const BASE: &str = r#"{"schema_version": 1, "torus": {"n": 1, "j": [["0","-1"],["1","0"]]},
        "generators": [{"matrix": MAT}], "metadata": {}}"#;

    fn with(mat: &str) -> Result<GroupFile> {
        GroupFile::parse(&BASE.replace("MAT", mat))
    }

    #[test]
    fn structured_errors() {
        assert!(with("[[1,0],[0,1]]").is_ok());
        let e = with("[[2,0],[0,2]]").unwrap_err();
        assert_eq!(e, Error::Invariant { generator: Some(0), invariant: "determinant ±1".into() });
        let e = with("[[1,1],[0,1]]").unwrap_err();
        assert_eq!(e, Error::Invariant { generator: Some(0), invariant: "MJ = JM".into() });
        assert!(matches!(with("[[1,0]]"), Err(Error::Parse(_))));
        assert!(matches!(GroupFile::parse("{"), Err(Error::Parse(_))));
        let bad_j = BASE.replace("\"-1\"", "\"-0.5\"").replace("MAT", "[[1,0],[0,1]]");
        assert!(matches!(GroupFile::parse(&bad_j), Err(Error::Parse(_))));
        let not_complex = BASE.replace("[\"0\",\"-1\"],[\"1\",\"0\"]", "[\"1\",\"0\"],[\"0\",\"1\"]").replace("MAT", "[[1,0],[0,1]]");
        assert!(matches!(GroupFile::parse(&not_complex), Err(Error::BadComplexStructure(_))));
    }
}
