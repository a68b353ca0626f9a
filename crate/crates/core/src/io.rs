//! JSON interchange.
//!
//! Complex numbers are `[re, im]` pairs; plain numbers are accepted on input
//! as real values. Schemas:
//!
//! - symbol: `{"kind": "schur" | "general", "dims": [d1,d2,d3], "entries": [...]}`
//!   with entries row-major in `(t1,t2,t3)` or `(a1,b1,a2,b2,a3,b3)`;
//! - matrix: `{"rows": r, "cols": c, "entries": [...]}` or nested rows;
//! - pair symbol: `{"dims": [da, db], "entries": [...]}` in `(p,q,r,s)` order;
//! - factor family: `{"count": m, "a": [pair...], "b": [pair...]}`;
//! - algebra generators: `{"dim": d, "generators": [matrix...]}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::MatrixAlgebra;
use crate::error::{Error, Result};
use crate::factorize::FactorFamily;
use crate::linalg::CMatrix;
use crate::multiplier::{OpLeg, PairSymbol};
use crate::symbols::{SchurSymbol, Symbol3};

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Num {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Num> for Complex64 {
    fn from(n: Num) -> Self {
        match n {
            Num::Pair([re, im]) => Complex64::new(re, im),
            Num::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

fn to_complex(v: Vec<Num>) -> Vec<Complex64> {
    v.into_iter().map(Complex64::from).collect()
}

fn pairs(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Reads a file, reporting failures as parse errors.
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let p = path.as_ref();
    std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolInput {
    Schur(SchurSymbol),
    General(Symbol3),
}

impl SymbolInput {
    pub fn dims(&self) -> [usize; 3] {
        match self {
            SymbolInput::Schur(s) => s.dims(),
            SymbolInput::General(p) => p.dims(),
        }
    }
}

#[derive(Deserialize)]
struct SymbolJson {
    kind: String,
    dims: Vec<usize>,
    entries: Vec<Num>,
}

fn dims3(d: &[usize]) -> Result<[usize; 3]> {
    <[usize; 3]>::try_from(d)
        .map_err(|_| Error::Parse(format!("symbol dims must have 3 entries, got {}", d.len())))
}

pub fn parse_symbol(text: &str) -> Result<SymbolInput> {
    let raw: SymbolJson = serde_json::from_str(text).map_err(parse_err)?;
    let dims = dims3(&raw.dims)?;
    let entries = to_complex(raw.entries);
    match raw.kind.as_str() {
        "schur" => SchurSymbol::from_vec(dims, entries).map(SymbolInput::Schur),
        "general" => Symbol3::from_vec(dims, entries).map(SymbolInput::General),
        other => Err(Error::Parse(format!("unknown symbol kind '{other}'"))),
    }
}

pub fn schur_to_json(s: &SchurSymbol) -> Value {
    json!({"kind": "schur", "dims": s.dims(), "entries": pairs(s.data())})
}

pub fn symbol_to_json(phi: &Symbol3) -> Value {
    json!({"kind": "general", "dims": phi.dims(), "entries": pairs(phi.data())})
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixJson {
    Flat {
        rows: usize,
        cols: usize,
        entries: Vec<Num>,
    },
    Nested(Vec<Vec<Num>>),
}

fn matrix_from_json(m: MatrixJson) -> Result<CMatrix> {
    match m {
        MatrixJson::Flat {
            rows,
            cols,
            entries,
        } => CMatrix::from_vec(rows, cols, to_complex(entries)),
        MatrixJson::Nested(rows) => {
            let r = rows.len();
            let c = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|row| row.len() != c) {
                return Err(Error::Parse("ragged matrix rows".into()));
            }
            CMatrix::from_vec(r, c, to_complex(rows.into_iter().flatten().collect()))
        }
    }
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let raw: MatrixJson = serde_json::from_str(text).map_err(parse_err)?;
    matrix_from_json(raw)
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    json!({"rows": m.rows(), "cols": m.cols(), "entries": pairs(m.data())})
}

#[derive(Deserialize)]
struct PairJson {
    dims: [usize; 2],
    entries: Vec<Num>,
}

#[derive(Deserialize)]
struct FamilyJson {
    count: usize,
    a: Vec<PairJson>,
    b: Vec<PairJson>,
}

pub fn parse_family(text: &str) -> Result<FactorFamily> {
    let raw: FamilyJson = serde_json::from_str(text).map_err(parse_err)?;
    if raw.a.len() != raw.count || raw.b.len() != raw.count {
        return Err(Error::Parse(format!(
            "family count {} but {} a-terms and {} b-terms",
            raw.count,
            raw.a.len(),
            raw.b.len()
        )));
    }
    let conv = |op: OpLeg, list: Vec<PairJson>| {
        list.into_iter()
            .map(|p| PairSymbol::from_vec(op, p.dims, to_complex(p.entries)))
            .collect::<Result<Vec<_>>>()
    };
    FactorFamily::new(conv(OpLeg::Second, raw.a)?, conv(OpLeg::First, raw.b)?)
}

pub fn pair_to_json(p: &PairSymbol) -> Value {
    json!({"dims": p.dims(), "entries": pairs(p.data())})
}

pub fn family_to_json(f: &FactorFamily) -> Value {
    json!({
        "count": f.count,
        "a": f.a_list.iter().map(pair_to_json).collect::<Vec<_>>(),
        "b": f.b_list.iter().map(pair_to_json).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
struct GeneratorsJson {
    dim: usize,
    generators: Vec<MatrixJson>,
}

/// Algebra generated by the matrices in a generator file.
pub fn parse_generators(text: &str) -> Result<MatrixAlgebra> {
    let raw: GeneratorsJson = serde_json::from_str(text).map_err(parse_err)?;
    let gens = raw
        .generators
        .into_iter()
        .map(matrix_from_json)
        .collect::<Result<Vec<_>>>()?;
    MatrixAlgebra::generate(raw.dim, gens)
}

/// Serializable view of a value used in reports.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorize::{schur_s1_factorize, to_weak_factorization, VectorField};

    #[test]
    fn schur_symbol_round_trip() {
        let s = SchurSymbol::random([2, 3, 1], 4);
        let back = parse_symbol(&schur_to_json(&s).to_string()).unwrap();
        assert_eq!(back, SymbolInput::Schur(s));
    }

    #[test]
    fn general_symbol_round_trip() {
        let phi = crate::symbols::embed_schur(&SchurSymbol::random([2, 1, 2], 1));
        let back = parse_symbol(&symbol_to_json(&phi).to_string()).unwrap();
        assert_eq!(back, SymbolInput::General(phi));
    }

    #[test]
    fn real_entries_accepted() {
        let s = parse_symbol(r#"{"kind":"schur","dims":[1,1,2],"entries":[1, [0, 2]]}"#).unwrap();
        let SymbolInput::Schur(s) = s else { panic!() };
        assert_eq!(s.get(0, 0, 1), Complex64::new(0.0, 2.0));
    }

    #[test]
    fn matrix_forms() {
        let a = parse_matrix(r#"[[1, 2], [3, [4, 1]]]"#).unwrap();
        let b = parse_matrix(r#"{"rows":2,"cols":2,"entries":[1,2,3,[4,1]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_matrix(&matrix_to_json(&a).to_string()).unwrap(), a);
        assert!(parse_matrix("[[1,2],[3]]").is_err());
    }

    #[test]
    fn bad_input_is_parse_error_with_position() {
        let e = parse_symbol("{\"kind\": \"schur\",\n \"dims\": [1,1,").unwrap_err();
        assert_eq!(e.code(), "parse");
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_symbol(r#"{"kind":"schur","dims":[1,1,2],"entries":[1]}"#).unwrap_err();
        assert_eq!(e.code(), "shape");
    }

    #[test]
    fn family_round_trip() {
        let s = SchurSymbol::random([2, 2, 2], 3);
        let (a, b) = schur_s1_factorize(&s, 1e-8).unwrap();
        let f = to_weak_factorization(&a, &b).unwrap();
        let back = parse_family(&family_to_json(&f).to_string()).unwrap();
        assert_eq!(back, f);
        let v: VectorField = serde_json::from_value(to_value(&a)).unwrap();
        assert_eq!(v, a);
    }

    #[test]
    fn generator_file() {
        let alg = parse_generators(r#"{"dim":2,"generators":[[[1,0],[0,-1]]]}"#).unwrap();
        assert_eq!(alg.size(), 2);
    }
}
