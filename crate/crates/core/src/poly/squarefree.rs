use num_bigint::BigInt;

use super::gcd::gcd;
use super::IntPoly;

/// `p = unit * Π factor^multiplicity`, factors primitive, square-free,
/// pairwise coprime, with positive leading coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: BigInt,
    pub factors: Vec<(IntPoly, u32)>,
}

impl SquarefreeDecomposition {
    pub fn reconstruct(&self) -> IntPoly {
        let mut acc = IntPoly::constant(self.unit.clone());
        for (f, m) in &self.factors {
            acc = &acc * &f.pow(*m);
        }
        acc
    }
}

/// Yun's square-free decomposition over the integers.
pub fn squarefree_decompose(p: &IntPoly) -> SquarefreeDecomposition {
    assert!(!p.is_zero(), "square-free decomposition of the zero polynomial");
    let f = p.primitive_part();
    // p = ±content * f
    let unit = p.leading_coeff().unwrap() / f.leading_coeff().unwrap();
    let mut factors = Vec::new();
    if f.is_constant() {
        return SquarefreeDecomposition { unit, factors };
    }
    let df = f.derivative();
    let g = gcd(&f, &df);
    let mut a = f.div_exact(&g).expect("gcd divides f");
    let mut b = df.div_exact(&g).expect("gcd divides f'");
    let mut c = &b - &a.derivative();
    let mut multiplicity = 1u32;
    while !a.is_constant() {
        let d = gcd(&a, &c);
        if !d.is_constant() {
            factors.push((d.clone(), multiplicity));
        }
        a = a.div_exact(&d).expect("d divides a");
        b = c.div_exact(&d).expect("d divides c");
        c = &b - &a.derivative();
        multiplicity += 1;
    }
    SquarefreeDecomposition { unit, factors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn yun_examples() {
        // q (q - 1)^2
        let d = squarefree_decompose(&p(&[0, 1, -2, 1]));
        assert_eq!(d.factors, vec![(p(&[0, 1]), 1), (p(&[-1, 1]), 2)]);

        let d = squarefree_decompose(&p(&[3, -3, 1]));
        assert_eq!(d.factors, vec![(p(&[3, -3, 1]), 1)]);

        // (q - 1)^4 + (q - 1) = q (q - 1)(q^2 - 3q + 3)
        let c4 = &p(&[-1, 1]).pow(4) + &p(&[-1, 1]);
        let d = squarefree_decompose(&c4);
        assert_eq!(d.factors, vec![(c4.clone(), 1)]);
        assert_eq!(d.reconstruct(), c4);
    }

    #[test]
    fn keeps_the_unit() {
        let f = p(&[0, -6, 12, -6]); // -6 q (q - 1)^2
        let d = squarefree_decompose(&f);
        assert_eq!(d.unit, BigInt::from(-6));
        assert_eq!(d.reconstruct(), f);
    }
}
