//! JSON form of an [`Observable`].
//!
//! ```json
//! {"n": 1, "generators": [{"k": [1], "U_basis": [[1.0]], "xi": [0.0],
//!   "terms": [{"coeff_re": 1.0, "coeff_im": 0.0, "poly": {"0": [1.0, 0.0]},
//!              "Q": [[1.0]], "b": [0.0], "center": [0.0]}]}]}
//! ```
//!
//! Polynomial keys are comma-separated exponents, `""` when `dim U = 0`.
//! `center` is optional and defaults to the origin.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Generator, MomentumSymbol, Observable, Poly, Subspace, SymbolTerm};
use crate::error::{Error, Result};
use crate::lattice::IntVector;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservableJson {
    n: usize,
    generators: Vec<GeneratorJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    k: Vec<i64>,
    #[serde(rename = "U_basis")]
    u_basis: Vec<Vec<f64>>,
    xi: Vec<f64>,
    terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    coeff_re: f64,
    coeff_im: f64,
    poly: BTreeMap<String, [f64; 2]>,
    #[serde(rename = "Q")]
    q: Vec<Vec<f64>>,
    b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<Vec<f64>>,
}

fn poly_key(idx: &[u32]) -> String {
    idx.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn parse_key(key: &str, d: usize) -> Result<Vec<u32>> {
    if key.is_empty() {
        return if d == 0 { Ok(vec![]) } else { Err(Error::InvalidSymbol(format!("empty multi-index for d={d}"))) };
    }
    let idx: Vec<u32> = key
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| Error::InvalidSymbol(format!("bad multi-index '{key}'"))))
        .collect::<Result<_>>()?;
    if idx.len() != d {
        return Err(Error::InvalidSymbol(format!("multi-index '{key}' has length {}, expected {d}", idx.len())));
    }
    Ok(idx)
}

impl Observable {
    pub fn to_json_value(&self) -> serde_json::Value {
        let generators = self
            .generators()
            .iter()
            .map(|g| GeneratorJson {
                k: g.k.as_slice().to_vec(),
                u_basis: g.h.subspace().basis().to_vec(),
                xi: g.h.xi().to_vec(),
                terms: g
                    .h
                    .terms()
                    .iter()
                    .map(|t| TermJson {
                        coeff_re: t.coeff().re,
                        coeff_im: t.coeff().im,
                        poly: t.poly().terms().map(|(k, c)| (poly_key(k), [c.re, c.im])).collect(),
                        q: t.quad().to_vec(),
                        b: t.phase().to_vec(),
                        center: Some(t.center().to_vec()),
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_value(ObservableJson { n: self.dim(), generators }).expect("plain data serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("plain data serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ObservableJson = serde_json::from_str(s)?;
        Self::from_raw(raw)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let raw: ObservableJson = serde_json::from_value(v)?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: ObservableJson) -> Result<Self> {
        let n = raw.n;
        if n == 0 {
            return Err(Error::InvalidSymbol("n must be at least 1".into()));
        }
        let mut gens = Vec::with_capacity(raw.generators.len());
        for g in raw.generators {
            let sub = Subspace::from_orthonormal(n, g.u_basis)?;
            let d = sub.dim();
            let mut terms = Vec::with_capacity(g.terms.len());
            for t in g.terms {
                let mut entries = Vec::with_capacity(t.poly.len());
                for (key, [re, im]) in t.poly {
                    entries.push((parse_key(&key, d)?, Complex64::new(re, im)));
                }
                let poly = Poly::from_terms(d, entries);
                let center = t.center.unwrap_or_else(|| vec![0.0; d]);
                terms.push(SymbolTerm::new(Complex64::new(t.coeff_re, t.coeff_im), poly, t.q, center, t.b)?);
            }
            let h = MomentumSymbol::new(sub, g.xi, terms)?;
            gens.push(Generator::new(IntVector::new(g.k)?, h)?);
        }
        Observable::from_generators(n, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::isotropic_gaussian;

    #[test]
    fn roundtrip_is_bit_stable_after_canonicalization() {
        let l = Subspace::span(2, &[vec![0.3, 0.7]]).unwrap();
        let f = Observable::single(IntVector::new(vec![1, -2]).unwrap(), isotropic_gaussian(l, 0.9, vec![0.1]).unwrap())
            .unwrap()
            .add(&Observable::sine(2, 0.3))
            .unwrap();
        let g = f.multiply(&f.conjugate()).unwrap().canonicalize().unwrap();
        let s1 = g.to_json_string();
        let back = Observable::from_json_str(&s1).unwrap().canonicalize().unwrap();
        assert_eq!(s1, back.to_json_string());
    }

    #[test]
    fn center_defaults_to_origin() {
        let s = r#"{"n":1,"generators":[{"k":[0],"U_basis":[[1.0]],"xi":[0.0],
            "terms":[{"coeff_re":1.0,"coeff_im":0.0,"poly":{"0":[1.0,0.0]},"Q":[[1.0]],"b":[0.0]}]}]}"#;
        let f = Observable::from_json_str(s).unwrap();
        assert!((f.eval(&[0.0], &[0.0]).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_xi_inside_subspace() {
        let s = r#"{"n":1,"generators":[{"k":[0],"U_basis":[[1.0]],"xi":[0.5],
            "terms":[{"coeff_re":1.0,"coeff_im":0.0,"poly":{"0":[1.0,0.0]},"Q":[[1.0]],"b":[0.0]}]}]}"#;
        assert!(Observable::from_json_str(s).is_err());
    }

    #[test]
    fn rejects_indefinite_form() {
        let s = r#"{"n":1,"generators":[{"k":[0],"U_basis":[[1.0]],"xi":[0.0],
            "terms":[{"coeff_re":1.0,"coeff_im":0.0,"poly":{"0":[1.0,0.0]},"Q":[[-1.0]],"b":[0.0]}]}]}"#;
        assert!(Observable::from_json_str(s).is_err());
    }
}
