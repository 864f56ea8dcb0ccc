use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::uni::forward_owned_binop;
use super::{BivarPoly, IntPoly};

/// Sparse polynomial in `(q, U, V)` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TrivarPoly {
    terms: BTreeMap<(u32, u32, u32), BigInt>,
}

impl TrivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: impl Into<BigInt>, q_exp: u32, u_exp: u32, v_exp: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(q_exp, u_exp, v_exp, c.into());
        p
    }

    pub fn u() -> Self {
        Self::monomial(1, 0, 1, 0)
    }

    pub fn v() -> Self {
        Self::monomial(1, 0, 0, 1)
    }

    pub fn q() -> Self {
        Self::monomial(1, 1, 0, 0)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0, 0)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, u32, i64)>) -> Self {
        let mut p = Self::zero();
        for (a, b, c, k) in terms {
            p.add_term(a, b, c, BigInt::from(k));
        }
        p
    }

    pub fn add_term(&mut self, q_exp: u32, u_exp: u32, v_exp: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((q_exp, u_exp, v_exp)).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(q_exp, u_exp, v_exp));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, u32, &BigInt)> {
        self.terms.iter().map(|(&(a, b, c), k)| (a, b, c, k))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// True iff every term has total `(U, V)`-degree exactly `degree`.
    pub fn is_homogeneous_uv(&self, degree: u32) -> bool {
        self.terms.keys().all(|&(_, b, c)| b + c == degree)
    }

    /// Groups terms by `U` power: entry `i` is the `Z[q]` coefficient of `U^i V^(d-i)`.
    /// Only meaningful for polynomials homogeneous of degree `d` in `(U, V)`.
    pub fn homogeneous_coeffs(&self, degree: u32) -> Vec<IntPoly> {
        let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(); degree as usize + 1];
        for (&(a, b, c), k) in &self.terms {
            debug_assert_eq!(b + c, degree, "not homogeneous");
            let row = &mut rows[b as usize];
            if row.len() <= a as usize {
                row.resize(a as usize + 1, BigInt::zero());
            }
            row[a as usize] += k;
        }
        rows.into_iter().map(IntPoly::from_coeffs).collect()
    }

    /// Sets `U = y`, `V = 1`.
    pub fn dehomogenize(&self) -> BivarPoly {
        BivarPoly::from_big_terms(self.terms.iter().map(|(&(a, b, _), k)| (a, b, k.clone())))
    }

    /// `self(q, u(q), v(q))` for univariate substitutions.
    pub fn substitute_uni(&self, u: &IntPoly, v: &IntPoly) -> IntPoly {
        let mut acc = IntPoly::zero();
        let max_u = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let max_v = self.terms.keys().map(|k| k.2).max().unwrap_or(0);
        let u_pows = powers(u, max_u);
        let v_pows = powers(v, max_v);
        // Collect the q-coefficient of each (U, V) monomial first.
        let mut grouped: BTreeMap<(u32, u32), Vec<BigInt>> = BTreeMap::new();
        for (&(a, b, c), k) in &self.terms {
            let row = grouped.entry((b, c)).or_default();
            if row.len() <= a as usize {
                row.resize(a as usize + 1, BigInt::zero());
            }
            row[a as usize] += k;
        }
        for ((b, c), row) in grouped {
            let coeff = IntPoly::from_coeffs(row);
            let term = &(&coeff * &u_pows[b as usize]) * &v_pows[c as usize];
            acc = &acc + &term;
        }
        acc
    }

    /// `self(q, u(q, y), v(q, y))`.
    pub fn substitute_bivar(&self, u: &BivarPoly, v: &BivarPoly) -> BivarPoly {
        let max_u = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let max_v = self.terms.keys().map(|k| k.2).max().unwrap_or(0);
        let mut u_pows = vec![BivarPoly::one()];
        for i in 0..max_u as usize {
            u_pows.push(&u_pows[i] * u);
        }
        let mut v_pows = vec![BivarPoly::one()];
        for i in 0..max_v as usize {
            v_pows.push(&v_pows[i] * v);
        }
        let mut acc = BivarPoly::zero();
        for (&(a, b, c), k) in &self.terms {
            let mono = BivarPoly::monomial(k.clone(), a, 0);
            acc = &acc + &(&(&mono * &u_pows[b as usize]) * &v_pows[c as usize]);
        }
        acc
    }

    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (&(a, b, c), k) in self.terms.iter().rev() {
            let negative = k.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut parts = vec![k.abs().to_string()];
            for (name, e) in [("q", a), ("U", b), ("V", c)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            if parts.len() > 1 && parts[0] == "1" {
                parts.remove(0);
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

fn powers(p: &IntPoly, max: u32) -> Vec<IntPoly> {
    let mut out = vec![IntPoly::one()];
    for i in 0..max as usize {
        out.push(&out[i] * p);
    }
    out
}

impl fmt::Display for TrivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl<'a> Add<&'a TrivarPoly> for &'a TrivarPoly {
    type Output = TrivarPoly;
    fn add(self, rhs: &TrivarPoly) -> TrivarPoly {
        let mut out = self.clone();
        for (&(a, b, c), k) in &rhs.terms {
            out.add_term(a, b, c, k.clone());
        }
        out
    }
}

impl<'a> Sub<&'a TrivarPoly> for &'a TrivarPoly {
    type Output = TrivarPoly;
    fn sub(self, rhs: &TrivarPoly) -> TrivarPoly {
        let mut out = self.clone();
        for (&(a, b, c), k) in &rhs.terms {
            out.add_term(a, b, c, -k);
        }
        out
    }
}

impl<'a> Mul<&'a TrivarPoly> for &'a TrivarPoly {
    type Output = TrivarPoly;
    fn mul(self, rhs: &TrivarPoly) -> TrivarPoly {
        let mut out = TrivarPoly::zero();
        for (&(a1, b1, c1), k1) in &self.terms {
            for (&(a2, b2, c2), k2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 + c2, k1 * k2);
            }
        }
        out
    }
}

forward_owned_binop!(Add, add, TrivarPoly);
forward_owned_binop!(Sub, sub, TrivarPoly);
forward_owned_binop!(Mul, mul, TrivarPoly);
