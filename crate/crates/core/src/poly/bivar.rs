use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::gcd::gcd as gcd_uni;
use super::uni::forward_owned_binop;
use super::IntPoly;

/// Sparse polynomial in `(q, y)` with integer coefficients.
///
/// Keys are `(q exponent, y exponent)`; the `BTreeMap` order is the
/// `(q, y)`-lexicographic monomial order, so the last entry is the leading term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn q() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn monomial(c: impl Into<BigInt>, q_exp: u32, y_exp: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(q_exp, y_exp, c.into());
        p
    }

    /// Builds from `(q exponent, y exponent, coefficient)` triples; repeated
    /// monomials are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, i64)>) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in terms {
            p.add_term(a, b, BigInt::from(c));
        }
        p
    }

    pub fn from_big_terms(terms: impl IntoIterator<Item = (u32, u32, BigInt)>) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn add_term(&mut self, q_exp: u32, y_exp: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((q_exp, y_exp)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn from_q_poly(p: &IntPoly) -> Self {
        Self::from_y_coeffs(std::slice::from_ref(p))
    }

    /// `Σ coeffs[j](q) y^j`.
    pub fn from_y_coeffs(coeffs: &[IntPoly]) -> Self {
        let mut out = Self::zero();
        for (j, c) in coeffs.iter().enumerate() {
            for (i, a) in c.coeffs().iter().enumerate() {
                out.add_term(i as u32, j as u32, a.clone());
            }
        }
        out
    }

    /// Coefficients as a polynomial in `y` over `Z[q]`; index is the `y` power.
    pub fn to_y_coeffs(&self) -> Vec<IntPoly> {
        let Some(dy) = self.degree_y() else {
            return Vec::new();
        };
        let mut dense: Vec<Vec<BigInt>> = vec![Vec::new(); dy + 1];
        for (&(a, b), c) in &self.terms {
            let row = &mut dense[b as usize];
            if row.len() <= a as usize {
                row.resize(a as usize + 1, BigInt::zero());
            }
            row[a as usize] = c.clone();
        }
        dense.into_iter().map(IntPoly::from_coeffs).collect()
    }

    /// Coefficients as a polynomial in `q` over `Z[y]`; index is the `q` power.
    pub fn to_q_coeffs(&self) -> Vec<IntPoly> {
        let swapped = BivarPoly {
            terms: self.terms.iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect(),
        };
        swapped.to_y_coeffs()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> {
        self.terms.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn coeff(&self, q_exp: u32, y_exp: u32) -> BigInt {
        self.terms.get(&(q_exp, y_exp)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn degree_y(&self) -> Option<usize> {
        self.terms.keys().map(|&(_, b)| b as usize).max()
    }

    pub fn degree_q(&self) -> Option<usize> {
        self.terms.keys().map(|&(a, _)| a as usize).max()
    }

    /// Leading coefficient in the `(q, y)`-lexicographic order.
    pub fn lex_leading_coeff(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative_y(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if b > 0 {
                out.add_term(a, b - 1, c * BigInt::from(b));
            }
        }
        out
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive integer coefficients with positive `(q, y)`-lex leading coefficient.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.lex_leading_coeff().unwrap().is_negative() {
            c = -c;
        }
        BivarPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v / &c)).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&k| k == (0, 0))
    }

    /// Substitutes a polynomial in `q` for `y`.
    pub fn substitute_y(&self, y: &IntPoly) -> IntPoly {
        let mut acc = IntPoly::zero();
        for c in self.to_y_coeffs().iter().rev() {
            acc = &(&acc * y) + c;
        }
        acc
    }

    /// `self(q, inner(q, y))`.
    pub fn compose_y(&self, inner: &BivarPoly) -> BivarPoly {
        let mut acc = BivarPoly::zero();
        for c in self.to_y_coeffs().iter().rev() {
            acc = &(&acc * inner) + &BivarPoly::from_q_poly(c);
        }
        acc
    }

    /// Specializes `q` to an integer, leaving a polynomial in `y`.
    pub fn specialize_q(&self, q: &BigInt) -> IntPoly {
        let coeffs: Vec<BigInt> = self.to_y_coeffs().iter().map(|c| c.eval_big(q)).collect();
        IntPoly::from_coeffs(coeffs)
    }

    pub fn eval_rational(&self, q: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.to_y_coeffs().iter().rev() {
            acc = acc * y + c.eval_rational(q);
        }
        acc
    }

    /// Horner evaluation in double precision, coefficients converted on the fly.
    pub fn eval_complex(&self, q: Complex64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for row in self.to_y_coeffs().iter().rev() {
            let mut c = Complex64::new(0.0, 0.0);
            for a in row.coeffs().iter().rev() {
                c = c * q + a.to_f64().unwrap_or(f64::NAN);
            }
            acc = acc * y + c;
        }
        acc
    }

    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (&(a, b), c) in self.terms.iter().rev() {
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut mono = Vec::new();
            match a {
                0 => {}
                1 => mono.push("q".to_string()),
                _ => mono.push(format!("q^{a}")),
            }
            match b {
                0 => {}
                1 => mono.push("y".to_string()),
                _ => mono.push(format!("y^{b}")),
            }
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{mag}*{}", mono.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl<'a> Add<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl<'a> Mul<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, -v)).collect(),
        }
    }
}

forward_owned_binop!(Add, add, BivarPoly);
forward_owned_binop!(Sub, sub, BivarPoly);
forward_owned_binop!(Mul, mul, BivarPoly);

// ---------------------------------------------------------------------------
// Polynomials in y over Z[q], used by gcd and resultant.

type YPoly = Vec<IntPoly>;

fn ytrim(mut p: YPoly) -> YPoly {
    while p.last().is_some_and(IntPoly::is_zero) {
        p.pop();
    }
    p
}

fn ydeg(p: &YPoly) -> Option<usize> {
    p.len().checked_sub(1)
}

/// Primitive gcd over `Z[q]` of the `y`-coefficients.
fn ycontent(p: &YPoly) -> IntPoly {
    let mut g = IntPoly::zero();
    for c in p {
        g = gcd_uni(&g, c);
        if g.is_constant() && !g.is_zero() {
            return IntPoly::one();
        }
    }
    g
}

fn ydiv_q(p: &YPoly, d: &IntPoly) -> YPoly {
    p.iter()
        .map(|c| c.div_exact(d).expect("content divides every coefficient"))
        .collect()
}

fn yprimitive(p: &YPoly) -> YPoly {
    if p.is_empty() {
        return Vec::new();
    }
    let c = ycontent(p);
    ydiv_q(p, &c)
}

fn yscale(p: &YPoly, c: &IntPoly) -> YPoly {
    ytrim(p.iter().map(|a| a * c).collect())
}

/// Pseudo-remainder of `a` by `b` in `y`.
fn yprem(a: &YPoly, b: &YPoly) -> YPoly {
    let db = ydeg(b).expect("pseudo-division by zero");
    let lead = b[db].clone();
    let mut r = a.clone();
    while let Some(dr) = ydeg(&r) {
        if dr < db {
            break;
        }
        let top = r[dr].clone();
        let mut next = yscale(&r, &lead);
        if next.len() < dr + 1 {
            next.resize(dr + 1, IntPoly::zero());
        }
        for (j, bj) in b.iter().enumerate() {
            next[dr - db + j] = &next[dr - db + j] - &(&top * bj);
        }
        r = ytrim(next);
    }
    r
}

/// Greatest common divisor in `Q[q, y]`, normalized to primitive integer
/// coefficients with positive `(q, y)`-lex leading coefficient.
///
/// Content in `Z[q]` is handled by univariate gcds; the primitive parts go
/// through a primitive pseudo-remainder sequence in `y`.
pub fn gcd_bivar(p1: &BivarPoly, p2: &BivarPoly) -> BivarPoly {
    if p1.is_zero() {
        return p2.normalized();
    }
    if p2.is_zero() {
        return p1.normalized();
    }
    let a = p1.to_y_coeffs();
    let b = p2.to_y_coeffs();
    let ca = ycontent(&a);
    let cb = ycontent(&b);
    let content = gcd_uni(&ca, &cb);
    let mut a = ydiv_q(&a, &ca);
    let mut b = ydiv_q(&b, &cb);
    if ydeg(&a) < ydeg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = yprimitive(&yprem(&a, &b));
        a = b;
        b = r;
    }
    let g = if ydeg(&a) == Some(0) {
        vec![content]
    } else {
        yscale(&a, &content)
    };
    BivarPoly::from_y_coeffs(&g).normalized()
}

/// Exact quotient in `Z[q, y]`, or `None` if `d` does not divide `p`.
pub fn div_exact_bivar(p: &BivarPoly, d: &BivarPoly) -> Option<BivarPoly> {
    let dd = d.to_y_coeffs();
    let ddeg = ydeg(&dd)?;
    let mut r = p.to_y_coeffs();
    let Some(rdeg) = ydeg(&r) else {
        return Some(BivarPoly::zero());
    };
    if rdeg < ddeg {
        return None;
    }
    let mut quot = vec![IntPoly::zero(); rdeg - ddeg + 1];
    for k in (0..=rdeg - ddeg).rev() {
        if r.len() <= k + ddeg || r[k + ddeg].is_zero() {
            continue;
        }
        let qk = r[k + ddeg].div_exact(&dd[ddeg])?;
        for (j, dj) in dd.iter().enumerate() {
            r[k + j] = &r[k + j] - &(&qk * dj);
        }
        quot[k] = qk;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(BivarPoly::from_y_coeffs(&quot))
}

/// Fraction-free (Bareiss) determinant over `Z[q]`.
fn det_bareiss(mut m: Vec<Vec<IntPoly>>) -> IntPoly {
    let n = m.len();
    if n == 0 {
        return IntPoly::one();
    }
    let mut negate = false;
    let mut prev = IntPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return IntPoly::zero();
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Sylvester resultant in `y`, treating `p1` and `p2` as having formal
/// degrees `m` and `n` (leading coefficients may vanish).
pub fn resultant_y_formal(p1: &BivarPoly, m: usize, p2: &BivarPoly, n: usize) -> IntPoly {
    let a = p1.to_y_coeffs();
    let b = p2.to_y_coeffs();
    assert!(a.len() <= m + 1 && b.len() <= n + 1, "formal degree below actual degree");
    let size = m + n;
    if size == 0 {
        return IntPoly::one();
    }
    let coeff = |p: &YPoly, i: usize| p.get(i).cloned().unwrap_or_default();
    let mut rows = Vec::with_capacity(size);
    for r in 0..n {
        let mut row = vec![IntPoly::zero(); size];
        for k in 0..=m {
            row[r + k] = coeff(&a, m - k);
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![IntPoly::zero(); size];
        for k in 0..=n {
            row[r + k] = coeff(&b, n - k);
        }
        rows.push(row);
    }
    det_bareiss(rows)
}

/// Resultant with respect to `y` at the actual `y`-degrees.
pub fn resultant_y(p1: &BivarPoly, p2: &BivarPoly) -> IntPoly {
    let m = p1.degree_y().unwrap_or(0);
    let n = p2.degree_y().unwrap_or(0);
    resultant_y_formal(p1, m, p2, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(c: i64) -> BivarPoly {
        // y + c*(q - 1)
        BivarPoly::from_terms([(0, 1, 1), (1, 0, c), (0, 0, -c)])
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        // y^2 - (1 - q)^2 and y - (1 - q)
        let c = BivarPoly::from_terms([(0, 0, 1), (1, 0, -1)]);
        let a = &BivarPoly::y().pow(2) - &c.pow(2);
        let b = &BivarPoly::y() - &c;
        assert_eq!(gcd_bivar(&a, &b), lin(1));
        assert_eq!(gcd_bivar(&a, &BivarPoly::one()), BivarPoly::one());
    }

    #[test]
    fn gcd_picks_up_q_content() {
        let a = &BivarPoly::from_terms([(1, 0, 1), (0, 0, -2)]) * &lin(1);
        let b = &BivarPoly::from_terms([(1, 0, 3), (0, 0, -6)]) * &BivarPoly::y();
        assert_eq!(gcd_bivar(&a, &b), BivarPoly::from_terms([(1, 0, 1), (0, 0, -2)]));
    }

    #[test]
    fn exact_bivariate_division() {
        let a = &lin(1) * &lin(2);
        assert_eq!(div_exact_bivar(&a, &lin(2)), Some(lin(1)));
        assert_eq!(div_exact_bivar(&lin(1), &lin(2)), None);
    }

    #[test]
    fn resultants() {
        let yq = BivarPoly::from_terms([(0, 1, 1), (1, 0, -1)]);
        let yq2 = BivarPoly::from_terms([(0, 1, 1), (1, 0, 1)]);
        assert_eq!(resultant_y(&yq, &yq2).primitive_part(), IntPoly::from_i64(&[0, 1]));
        assert_eq!(resultant_y(&yq, &yq2).coeffs()[1].abs(), BigInt::from(2));
        let y2 = BivarPoly::y().pow(2);
        let ym1 = BivarPoly::from_terms([(0, 1, 1), (0, 0, -1)]);
        assert_eq!(resultant_y(&y2, &ym1), IntPoly::one());
    }

    #[test]
    fn substitution_and_eval() {
        let p = &BivarPoly::q() * &lin(1);
        assert_eq!(
            p.eval_complex(Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)),
            Complex64::new(6.0, 0.0)
        );
        assert_eq!(p.substitute_y(&IntPoly::zero()), IntPoly::from_i64(&[0, -1, 1]));
    }
}
