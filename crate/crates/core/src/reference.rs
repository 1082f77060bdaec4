//! Embedded reference data: the `p = 7`, `σ = 1` worked example and the six
//! explicit vectors for `p = 17389`, `σ = 10`.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::io::{parse_int_matrix, parse_int_vector, IntLike};
use crate::lattice::LatticeVector;
use crate::linalg::IntMatrix;
use crate::poly::{IntPolynomial, PolyJson};

const X7_JSON: &str = include_str!("../data/x7_example.json");
const P17389_JSON: &str = include_str!("../data/p17389_sigma10.json");

#[derive(Deserialize)]
struct RawPolarization {
    h: Vec<IntLike>,
    singularities: String,
    matrix: Vec<Vec<IntLike>>,
}

#[derive(Deserialize)]
struct RawX7 {
    p: i64,
    sigma: u32,
    h_gram: Vec<Vec<IntLike>>,
    h0: Vec<IntLike>,
    polarizations: Vec<RawPolarization>,
    r_h0_count: usize,
    charpoly_desc: Vec<String>,
    lambda_approx: String,
}

#[derive(Clone, Debug)]
pub struct ReferencePolarization {
    pub h: LatticeVector,
    pub singularities: String,
    pub matrix: IntMatrix,
}

#[derive(Clone, Debug)]
pub struct X7Reference {
    pub p: i64,
    pub sigma: u32,
    pub h_gram: IntMatrix,
    pub h0: LatticeVector,
    pub polarizations: Vec<ReferencePolarization>,
    pub r_h0_count: usize,
    pub charpoly: IntPolynomial,
    pub lambda: f64,
}

pub fn x7_reference() -> Result<X7Reference> {
    let raw: RawX7 = serde_json::from_str(X7_JSON)?;
    Ok(X7Reference {
        p: raw.p,
        sigma: raw.sigma,
        h_gram: parse_int_matrix(&raw.h_gram)?,
        h0: parse_int_vector(&raw.h0)?,
        polarizations: raw
            .polarizations
            .iter()
            .map(|r| {
                Ok(ReferencePolarization {
                    h: parse_int_vector(&r.h)?,
                    singularities: r.singularities.clone(),
                    matrix: parse_int_matrix(&r.matrix)?,
                })
            })
            .collect::<Result<_>>()?,
        r_h0_count: raw.r_h0_count,
        charpoly: IntPolynomial::try_from(&PolyJson { coeffs_desc: raw.charpoly_desc })?,
        lambda: parse_f64(&raw.lambda_approx)?,
    })
}

/// `(a, v)` describing `a·u₁ + u₂ + v` with `v` in the rank-4 summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma10Vector {
    pub a: i64,
    pub v: [i64; 4],
}

#[derive(Deserialize)]
struct RawVector {
    a: IntLike,
    v: Vec<IntLike>,
}

#[derive(Deserialize)]
struct RawVectors {
    vectors: Vec<RawVector>,
}

#[derive(Deserialize)]
struct RawP17389 {
    p: i64,
    h_gram: Vec<Vec<IntLike>>,
    lambda_approx: String,
}

#[derive(Clone, Debug)]
pub struct Sigma10Reference {
    pub p: i64,
    pub h_gram: IntMatrix,
    pub vectors: Vec<Sigma10Vector>,
    pub lambda: f64,
}

/// Reads `{"vectors": [{"a": .., "v": [4 entries]}, ...]}`.
pub fn parse_sigma10_vectors(json: &str) -> Result<Vec<Sigma10Vector>> {
    let raw: RawVectors = serde_json::from_str(json)?;
    raw.vectors
        .iter()
        .map(|r| {
            let a = parse_int_vector(std::slice::from_ref(&r.a))?.0[0];
            let v = parse_int_vector(&r.v)?;
            let v: [i64; 4] =
                v.0.try_into().map_err(|_| Error::Format("each vector needs exactly 4 entries".into()))?;
            Ok(Sigma10Vector { a, v })
        })
        .collect()
}

pub fn p17389_reference() -> Result<Sigma10Reference> {
    let raw: RawP17389 = serde_json::from_str(P17389_JSON)?;
    Ok(Sigma10Reference {
        p: raw.p,
        h_gram: parse_int_matrix(&raw.h_gram)?,
        vectors: parse_sigma10_vectors(P17389_JSON)?,
        lambda: parse_f64(&raw.lambda_approx)?,
    })
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Format(format!("not a number: {s}")))
}
