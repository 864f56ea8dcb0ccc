//! Exact integer polynomial arithmetic in one, two and three variables.

mod bivar;
pub mod gcd;
pub mod json;
mod squarefree;
mod trivar;
mod uni;

pub use bivar::{div_exact_bivar, gcd_bivar, resultant_y, resultant_y_formal, BivarPoly};
pub use gcd::gcd;
pub use squarefree::{squarefree_decompose, SquarefreeDecomposition};
pub use trivar::TrivarPoly;
pub use uni::IntPoly;

use num_bigint::BigInt;
use num_traits::One;

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal() {
        let row: Vec<i64> = binomial_row(4).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(row, vec![1, 4, 6, 4, 1]);
    }
}
