//! Polynomial JSON: `{"vars": [...], "terms": [[e1, ..., "coeff"], ...]}`.
//!
//! Coefficients are decimal strings since they routinely exceed 64 bits.
//! Terms are emitted in increasing monomial order.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{BivarPoly, IntPoly, TrivarPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniJson {
    pub vars: Vec<String>,
    pub terms: Vec<(u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BivarJson {
    pub vars: Vec<String>,
    pub terms: Vec<(u32, u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivarJson {
    pub vars: Vec<String>,
    pub terms: Vec<(u32, u32, u32, String)>,
}

fn parse_coeff(s: &str, index: usize) -> Result<BigInt> {
    s.parse().map_err(|_| Error::Parse {
        location: format!("terms[{index}]"),
        message: format!("`{s}` is not a decimal integer"),
    })
}

pub fn uni_to_json(p: &IntPoly, var: &str) -> UniJson {
    UniJson {
        vars: vec![var.to_string()],
        terms: p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(i, c)| (i as u32, c.to_string()))
            .collect(),
    }
}

pub fn uni_from_json(j: &UniJson) -> Result<IntPoly> {
    let mut out = IntPoly::zero();
    for (idx, (e, c)) in j.terms.iter().enumerate() {
        out = &out + &IntPoly::monomial(parse_coeff(c, idx)?, *e as usize);
    }
    Ok(out)
}

pub fn bivar_to_json(p: &BivarPoly, vars: [&str; 2]) -> BivarJson {
    BivarJson {
        vars: vars.iter().map(|v| v.to_string()).collect(),
        terms: p.terms().map(|(a, b, c)| (a, b, c.to_string())).collect(),
    }
}

pub fn bivar_from_json(j: &BivarJson) -> Result<BivarPoly> {
    if j.vars.len() != 2 {
        return Err(Error::Parse {
            location: "vars".into(),
            message: format!("expected two variables, found {}", j.vars.len()),
        });
    }
    let mut out = BivarPoly::zero();
    for (idx, (a, b, c)) in j.terms.iter().enumerate() {
        out.add_term(*a, *b, parse_coeff(c, idx)?);
    }
    Ok(out)
}

pub fn trivar_to_json(p: &TrivarPoly) -> TrivarJson {
    TrivarJson {
        vars: vec!["q".into(), "U".into(), "V".into()],
        terms: p.terms().map(|(a, b, c, k)| (a, b, c, k.to_string())).collect(),
    }
}
