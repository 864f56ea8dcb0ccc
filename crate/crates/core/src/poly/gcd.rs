//! Univariate gcd over the rationals by multi-modular reconstruction.
//!
//! Images modulo word-sized primes are combined by Chinese remaindering; a
//! candidate is accepted only once it is stable across two primes and
//! divides both inputs exactly over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::IntPoly;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Descending primes below `2^62`.
struct Primes {
    next: u64,
}

impl Primes {
    fn new() -> Self {
        Primes { next: (1 << 62) - 1 }
    }
}

impl Iterator for Primes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.next > 3 {
            let candidate = self.next;
            self.next -= 2;
            if is_prime(candidate) {
                return Some(candidate);
            }
        }
        None
    }
}

fn reduce(c: &BigInt, m: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

fn reduce_poly(p: &IntPoly, m: u64) -> Vec<u64> {
    let mut out: Vec<u64> = p.coeffs().iter().map(|c| reduce(c, m)).collect();
    trim(&mut out);
    out
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `a mod b` over `Z/m`, `b` nonzero.
fn rem_mod(mut a: Vec<u64>, b: &[u64], m: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv_lead = inv_mod(b[db], m);
    while a.len() > db {
        let top = *a.last().unwrap();
        if top != 0 {
            let f = mul_mod(top, inv_lead, m);
            let off = a.len() - 1 - db;
            for (j, &bj) in b.iter().enumerate() {
                let t = mul_mod(f, bj, m);
                a[off + j] = (a[off + j] + m - t) % m;
            }
        }
        a.pop();
        trim(&mut a);
    }
    a
}

/// Monic gcd over `Z/m`.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, m: u64) -> Vec<u64> {
    while !b.is_empty() {
        let r = rem_mod(a, &b, m);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, m);
        for c in &mut a {
            *c = mul_mod(*c, inv, m);
        }
    }
    a
}

/// Greatest common divisor in `Q[x]`, returned primitive with positive
/// leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    let a = a.primitive_part();
    let b = b.primitive_part();
    if a.is_constant() || b.is_constant() {
        return IntPoly::one();
    }
    if a == b {
        return a;
    }
    let lead_a = a.leading_coeff().unwrap().clone();
    let lead_b = b.leading_coeff().unwrap().clone();
    let gamma = lead_a.gcd(&lead_b);

    let mut best_degree = usize::MAX;
    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = Vec::new();
    let mut previous: Option<IntPoly> = None;

    for p in Primes::new() {
        if reduce(&lead_a, p) == 0 || reduce(&lead_b, p) == 0 {
            continue;
        }
        let image = gcd_mod(reduce_poly(&a, p), reduce_poly(&b, p), p);
        let degree = image.len() - 1;
        if degree == 0 {
            return IntPoly::one();
        }
        if degree > best_degree {
            continue;
        }
        let g = reduce(&gamma, p);
        let image: Vec<u64> = image.iter().map(|&c| mul_mod(c, g, p)).collect();
        if degree < best_degree {
            best_degree = degree;
            modulus = BigInt::from(p);
            residues = image.iter().map(|&c| BigInt::from(c)).collect();
            previous = None;
        } else {
            let pm = BigInt::from(p);
            let m_inv = inv_mod(reduce(&modulus, p), p);
            for (r, &s) in residues.iter_mut().zip(&image) {
                let diff = (s + p - reduce(r, p)) % p;
                let k = mul_mod(diff, m_inv, p);
                *r += &modulus * BigInt::from(k);
            }
            modulus *= pm;
        }

        let half: BigInt = &modulus >> 1usize;
        let lifted: Vec<BigInt> = residues
            .iter()
            .map(|r| if r > &half { r - &modulus } else { r.clone() })
            .collect();
        let candidate = IntPoly::from_coeffs(lifted).primitive_part();
        if previous.as_ref() == Some(&candidate)
            && a.div_exact(&candidate).is_some()
            && b.div_exact(&candidate).is_some()
        {
            return candidate;
        }
        previous = Some(candidate);
    }
    unreachable!("prime supply exhausted")
}

/// Reference Euclidean gcd by primitive pseudo-remainder sequence. Kept for
/// cross-checking the modular routine on small inputs.
pub fn gcd_prs(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let (mut a, mut b) = (a.primitive_part(), b.primitive_part());
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = a.pseudo_rem(&b).primitive_part();
        a = b;
        b = r;
    }
    if a.is_constant() && !a.is_zero() {
        return IntPoly::one();
    }
    a.primitive_part()
}

/// Sign-normalized check used by tests: is `d` a divisor of `p` in `Q[x]`?
pub fn divides(d: &IntPoly, p: &IntPoly) -> bool {
    if d.is_zero() {
        return p.is_zero();
    }
    p.div_exact(&d.primitive_part()).is_some()
}
