//! Renormalization: the homogeneous recursion template of a generating
//! graph and the reduced rational map `r_q(y) = N(q, y) / D(q, y)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::{generators, MarkedGraph};
use crate::poly::{
    binomial_row, div_exact_bivar, gcd, gcd_bivar, resultant_y_formal, squarefree_decompose,
    BivarPoly, IntPoly, TrivarPoly,
};
use crate::potts::{subset_stats, ConditionalPair, SubsetStats};

/// `(U', V')` as polynomials in `(q, U, V)`, homogeneous of degree `|E|`
/// in `(U, V)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionTemplate {
    pub u_next: TrivarPoly,
    pub v_next: TrivarPoly,
    pub edge_count: usize,
    pub vertex_count: usize,
}

impl RecursionTemplate {
    /// Conditional partition functions of the generator: `(U, V) = (y, 1)`.
    pub fn specialize(&self) -> ConditionalPair {
        ConditionalPair {
            u: self.u_next.dehomogenize(),
            v: self.v_next.dehomogenize(),
        }
    }

    /// One recursion step on univariate states.
    pub fn apply_uni(&self, u: &IntPoly, v: &IntPoly) -> (IntPoly, IntPoly) {
        (self.u_next.substitute_uni(u, v), self.v_next.substitute_uni(u, v))
    }

    /// One recursion step on bivariate states.
    pub fn apply(&self, pair: &ConditionalPair) -> ConditionalPair {
        ConditionalPair {
            u: self.u_next.substitute_bivar(&pair.u, &pair.v),
            v: self.v_next.substitute_bivar(&pair.u, &pair.v),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.edge_count as u32;
        self.u_next.is_homogeneous_uv(d) && self.v_next.is_homogeneous_uv(d)
    }
}

/// `(U - V)^j V^(e - j)` expanded.
fn edge_weight_power(j: usize, e: usize) -> TrivarPoly {
    let mut out = TrivarPoly::zero();
    for (i, c) in binomial_row(j).into_iter().enumerate() {
        let c = if (j - i).is_multiple_of(2) { c } else { -c };
        out.add_term(0, i as u32, (e - i) as u32, c);
    }
    out
}

pub fn template_from_stats(stats: &SubsetStats) -> RecursionTemplate {
    let e = stats.edge_count;
    let weights: Vec<TrivarPoly> = (0..=e).map(|j| edge_weight_power(j, e)).collect();
    let mut u_next = TrivarPoly::zero();
    let mut v_next = TrivarPoly::zero();
    for (key, &count) in &stats.counts {
        let f = SubsetStats::free_components(key) as u32;
        let term = &TrivarPoly::monomial(BigInt::from(count), f, 0, 0) * &weights[key.0];
        if !key.2 {
            v_next = &v_next + &term;
        }
        u_next = &u_next + &term;
    }
    RecursionTemplate {
        u_next,
        v_next,
        edge_count: e,
        vertex_count: stats.vertex_count,
    }
}

/// Replaces every edge weight `y` of the generator by the ratio `U / V` of a
/// glued copy, cleared of denominators.
pub fn derive_template(generator: &MarkedGraph, budgets: &Budgets) -> Result<RecursionTemplate> {
    if generator.edge_count() == 0 {
        return Err(Error::InvalidGraph("generator has no edges".into()));
    }
    Ok(template_from_stats(&subset_stats(generator, budgets)?))
}

// ---------------------------------------------------------------------------
// Reduced map

/// Reduced map `r_q(y) = N / D` with `gcd(N, D) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenormMap {
    pub numerator: BivarPoly,
    pub denominator: BivarPoly,
    /// Common factor removed from the unreduced pair.
    pub common_factor: BivarPoly,
    pub generic_degree: usize,
    /// Degree of the unreduced pair (the edge count for derived maps).
    pub template_degree: usize,
    pub degree_dropped: bool,
    /// Square-free factors of `Z[q]` whose roots are the finite parameters
    /// where the degree of `r_q` drops. Rational roots appear as linear factors.
    pub v_deg_finite: Vec<IntPoly>,
    pub v_deg_contains_infinity: bool,
}

/// Divides out the common integer content and makes the denominator's
/// lex-leading coefficient positive.
fn normalize_pair(n: BivarPoly, d: BivarPoly) -> (BivarPoly, BivarPoly) {
    let c = n.content().gcd(&d.content());
    let (mut n, mut d) = if c.is_zero() || c.is_one() {
        (n, d)
    } else {
        let inv = |p: &BivarPoly| {
            BivarPoly::from_big_terms(p.terms().map(|(a, b, k)| (a, b, k / &c)))
        };
        (inv(&n), inv(&d))
    };
    let negative = d
        .lex_leading_coeff()
        .or(n.lex_leading_coeff())
        .is_some_and(Signed::is_negative);
    if negative {
        n = -&n;
        d = -&d;
    }
    (n, d)
}

/// Square-free factors of `p`, rational roots pulled out as linear factors.
fn degenerate_factors(p: &IntPoly) -> Vec<IntPoly> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    let mut linear = Vec::new();
    let mut rest = Vec::new();
    for (f, _) in squarefree_decompose(p).factors {
        let mut f = f;
        for r in f.rational_roots() {
            let lin = IntPoly::linear(r.denom().clone(), -r.numer().clone());
            f = f.div_exact(&lin).expect("rational root divides");
            linear.push((r, lin));
        }
        if !f.is_constant() {
            rest.push(f.with_positive_lead());
        }
    }
    linear.sort_by(|a, b| a.0.cmp(&b.0));
    linear.into_iter().map(|(_, l)| l).chain(rest).collect()
}

/// Coefficients of `y^0..=y^d` as polynomials in `q`, zero-padded.
fn padded_y_coeffs(p: &BivarPoly, d: usize) -> Vec<IntPoly> {
    let mut c = p.to_y_coeffs();
    c.resize(d + 1, IntPoly::zero());
    c
}

impl RenormMap {
    /// Reduces an arbitrary fraction of polynomials in `(q, y)`.
    pub fn from_fraction(numerator: &BivarPoly, denominator: &BivarPoly) -> Result<Self> {
        let d = numerator.degree_y().unwrap_or(0).max(denominator.degree_y().unwrap_or(0));
        Self::reduce(numerator, denominator, d)
    }

    fn reduce(numerator: &BivarPoly, denominator: &BivarPoly, template_degree: usize) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = gcd_bivar(numerator, denominator);
        let n = div_exact_bivar(numerator, &g).expect("gcd divides numerator");
        let dd = div_exact_bivar(denominator, &g).expect("gcd divides denominator");
        let (n, dd) = normalize_pair(n, dd);
        let generic_degree = n.degree_y().unwrap_or(0).max(dd.degree_y().unwrap_or(0));

        let v_deg_finite = if generic_degree == 0 {
            Vec::new()
        } else {
            let res = resultant_y_formal(&n, generic_degree, &dd, generic_degree);
            degenerate_factors(&res)
        };

        // Degree of r_q as q -> ∞: keep the top q-power of each side.
        let top = n.degree_q().unwrap_or(0).max(dd.degree_q().unwrap_or(0));
        let n0 = n.to_q_coeffs().get(top).cloned().unwrap_or_default();
        let d0 = dd.to_q_coeffs().get(top).cloned().unwrap_or_default();
        let at_infinity = if n0.is_zero() || d0.is_zero() {
            // one side is identically zero at infinity: constant limit map
            0
        } else {
            let h = gcd(&n0, &d0);
            let dn = n0.div_exact(&h).unwrap().degree().unwrap_or(0);
            let dd0 = d0.div_exact(&h).unwrap().degree().unwrap_or(0);
            dn.max(dd0)
        };

        Ok(RenormMap {
            numerator: n,
            denominator: dd,
            common_factor: g,
            generic_degree,
            template_degree,
            degree_dropped: generic_degree < template_degree,
            v_deg_finite,
            v_deg_contains_infinity: at_infinity < generic_degree,
        })
    }

    /// The identity map `y`.
    pub fn identity() -> Self {
        Self::from_fraction(&BivarPoly::y(), &BivarPoly::one()).expect("identity map")
    }

    /// `(N_i)`, `(D_i)`: coefficients of `y^i` for `i = 0..=generic_degree`.
    pub fn forms(&self) -> (Vec<IntPoly>, Vec<IntPoly>) {
        (
            padded_y_coeffs(&self.numerator, self.generic_degree),
            padded_y_coeffs(&self.denominator, self.generic_degree),
        )
    }

    /// `r_q(y)` for `y = value(q)`, as an unreduced fraction in `q`.
    pub fn eval_at(&self, y: &IntPoly) -> (IntPoly, IntPoly) {
        (self.numerator.substitute_y(y), self.denominator.substitute_y(y))
    }

    /// `r_q(1) = 1` identically.
    pub fn fixes_one(&self) -> bool {
        let (n, d) = self.eval_at(&IntPoly::one());
        n == d
    }

    /// `y = 1` is fixed with `r_q'(1) = 0` for every `q`.
    pub fn superattracting_at_one(&self) -> bool {
        if !self.fixes_one() {
            return false;
        }
        let wronskian = &(&self.numerator.derivative_y() * &self.denominator)
            - &(&self.numerator * &self.denominator.derivative_y());
        wronskian.substitute_y(&IntPoly::one()).is_zero()
    }

    /// `y = ∞` is fixed with local degree at least two for generic `q`.
    pub fn superattracting_at_infinity(&self) -> bool {
        let dn = self.numerator.degree_y().unwrap_or(0);
        let dd = self.denominator.degree_y().unwrap_or(0);
        !self.numerator.is_zero() && dn >= dd + 2
    }
}

/// Reduces `(u_next, v_next)` at `(U, V) = (y, 1)`.
pub fn reduce_map(t: &RecursionTemplate) -> Result<RenormMap> {
    let pair = t.specialize();
    RenormMap::reduce(&pair.u, &pair.v, t.edge_count)
}

/// Map of `k` parallel paths of length two.
pub fn kfold_dhl_map(k: usize, budgets: &Budgets) -> Result<RenormMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("k-fold lattice needs k >= 1".into()));
    }
    reduce_map(&derive_template(&generators::kfold_dhl(k), budgets)?)
}

/// `Σ c_i(q) a^i b^(d - i)` over `Z[q, y]`.
pub(crate) fn apply_form_bivar(coeffs: &[IntPoly], a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    let d = coeffs.len() - 1;
    let mut a_pows = vec![BivarPoly::one()];
    let mut b_pows = vec![BivarPoly::one()];
    for i in 0..d {
        a_pows.push(&a_pows[i] * a);
        b_pows.push(&b_pows[i] * b);
    }
    let mut acc = BivarPoly::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = &(&BivarPoly::from_q_poly(c) * &a_pows[i]) * &b_pows[d - i];
        acc = &acc + &term;
    }
    acc
}

/// `Σ c_i(q) a^i b^(d - i)` over `Z[q]`.
pub(crate) fn apply_form_uni(coeffs: &[IntPoly], a: &IntPoly, b: &IntPoly) -> IntPoly {
    let d = coeffs.len() - 1;
    let mut a_pows = vec![IntPoly::one()];
    let mut b_pows = vec![IntPoly::one()];
    for i in 0..d {
        a_pows.push(&a_pows[i] * a);
        b_pows.push(&b_pows[i] * b);
    }
    let mut acc = IntPoly::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &(&(c * &a_pows[i]) * &b_pows[d - i]);
        }
    }
    acc
}

/// `outer ∘ inner` as an unreduced pair of forms of degree
/// `outer.generic_degree * inner.generic_degree` in `y`.
pub fn compose(outer: &RenormMap, inner: &RenormMap) -> (BivarPoly, BivarPoly) {
    let (on, od) = outer.forms();
    let (a, b) = (&inner.numerator, &inner.denominator);
    (apply_form_bivar(&on, a, b), apply_form_bivar(&od, a, b))
}

/// `m ∘ s = s ∘ m` as rational functions in `y` over `Q(q)`.
pub fn commutation_check(m: &RenormMap, s: &RenormMap) -> bool {
    let (n1, d1) = compose(m, s);
    let (n2, d2) = compose(s, m);
    &n1 * &d2 == &n2 * &d1
}

/// Whether `b(q) = 1 - q` is persistently exceptional, i.e. its full
/// preimage under the second iterate is `b` alone. This covers both a
/// totally ramified fixed point and a totally ramified two-cycle.
pub fn exceptional_check(m: &RenormMap) -> Result<bool> {
    let d = m.generic_degree;
    if d < 2 {
        return Err(Error::DegenerateMap(d));
    }
    let (n2, d2) = compose(m, m);
    let dd = d * d;
    let b_point = BivarPoly::from_terms([(0, 0, 1), (1, 0, -1)]);
    // Pullback of y = b as a form of degree d² (missing top degree = root at ∞).
    let pullback = &n2 - &(&b_point * &d2);
    let top = padded_y_coeffs(&pullback, dd).pop().unwrap();
    if top.is_zero() {
        return Ok(false);
    }
    let linear = BivarPoly::from_terms([(0, 1, 1), (1, 0, 1), (0, 0, -1)]);
    Ok(pullback == &BivarPoly::from_q_poly(&top) * &linear.pow(dd as u32))
}

/// The map `C_q(y) = ((y + q - 1) / (y - 1))^2`.
pub fn dhl_symmetry() -> RenormMap {
    let n = BivarPoly::from_terms([(0, 1, 1), (1, 0, 1), (0, 0, -1)]).pow(2);
    let d = BivarPoly::from_terms([(0, 1, 1), (0, 0, -1)]).pow(2);
    RenormMap::from_fraction(&n, &d).expect("nonzero denominator")
}

/// Checks that the degree of the map's orbit polynomials fits the budget.
pub(crate) fn check_composition_degree(d: usize, n: usize, budgets: &Budgets) -> Result<()> {
    let total = (d as u128).checked_pow(n as u32);
    match total {
        Some(t) if t <= budgets.composition_degree as u128 => Ok(()),
        _ => Err(Error::budget(
            "composition degree",
            format!("{d}^{n}"),
            budgets.composition_degree,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use crate::potts::conditional_uv;

    fn b() -> Budgets {
        Budgets::default()
    }

    fn bi(terms: &[(u32, u32, i64)]) -> BivarPoly {
        BivarPoly::from_terms(terms.iter().copied())
    }

    fn tri(terms: &[(u32, u32, u32, i64)]) -> TrivarPoly {
        TrivarPoly::from_terms(terms.iter().copied())
    }

    fn map_of(g: &MarkedGraph) -> RenormMap {
        reduce_map(&derive_template(g, &b()).unwrap()).unwrap()
    }

    /// `y^2 + q - 1` and `2y + q - 2`.
    fn chain_parts() -> (BivarPoly, BivarPoly) {
        (bi(&[(0, 2, 1), (1, 0, 1), (0, 0, -1)]), bi(&[(0, 1, 2), (1, 0, 1), (0, 0, -2)]))
    }

    #[test]
    fn single_edge_template_is_identity() {
        let t = derive_template(&MarkedGraph::single_edge(), &b()).unwrap();
        assert_eq!(t.u_next, TrivarPoly::u());
        assert_eq!(t.v_next, TrivarPoly::v());
    }

    #[test]
    fn dhl_template() {
        let t = derive_template(&dhl(), &b()).unwrap();
        // U^2 + (q - 1) V^2 and 2UV + (q - 2) V^2
        let a = tri(&[(0, 2, 0, 1), (1, 0, 2, 1), (0, 0, 2, -1)]);
        let c = tri(&[(0, 1, 1, 2), (1, 0, 2, 1), (0, 0, 2, -2)]);
        assert_eq!(t.u_next, a.pow(2));
        assert_eq!(t.v_next, c.pow(2));
        assert!(t.is_homogeneous());
    }

    #[test]
    fn tripod_template_and_drop() {
        let t = derive_template(&tripod(), &b()).unwrap();
        let f = tri(&[(0, 1, 0, 1), (1, 0, 1, 1), (0, 0, 1, -1)]);
        let a = tri(&[(0, 2, 0, 1), (1, 0, 2, 1), (0, 0, 2, -1)]);
        let c = tri(&[(0, 1, 1, 2), (1, 0, 2, 1), (0, 0, 2, -2)]);
        assert_eq!(t.u_next, &f * &a);
        assert_eq!(t.v_next, &f * &c);
        let m = reduce_map(&t).unwrap();
        let (n, d) = chain_parts();
        assert_eq!((m.numerator, m.denominator), (n, d));
        assert_eq!(m.common_factor, bi(&[(0, 1, 1), (1, 0, 1), (0, 0, -1)]));
        assert_eq!(m.generic_degree, 2);
        assert!(m.degree_dropped);
    }

    #[test]
    fn template_specializes_to_conditional_pair() {
        for g in [dhl(), triangle(), tripod(), split_diamond(), linear_chain(), kfold_dhl(3)] {
            let t = derive_template(&g, &b()).unwrap();
            assert_eq!(t.specialize(), conditional_uv(&g, &b()).unwrap());
            assert!(t.is_homogeneous());
        }
    }

    #[test]
    fn one_step_consistency() {
        for g in [dhl(), triangle(), tripod(), linear_chain()] {
            let t = derive_template(&g, &b()).unwrap();
            let level1 = crate::graph::substitute(&g, 1, &b()).unwrap();
            let level2 = crate::graph::substitute(&g, 2, &b()).unwrap();
            let got = t.apply(&conditional_uv(&level1, &b()).unwrap());
            assert_eq!(got, conditional_uv(&level2, &b()).unwrap());
        }
    }

    #[test]
    fn dhl_map() {
        let m = map_of(&dhl());
        let (n, d) = chain_parts();
        assert_eq!(m.numerator, n.pow(2));
        assert_eq!(m.denominator, d.pow(2));
        assert_eq!(m.generic_degree, 4);
        assert!(!m.degree_dropped);
        assert_eq!(m.v_deg_finite, vec![IntPoly::x()]);
        assert!(m.v_deg_contains_infinity);
    }

    #[test]
    fn kfold_maps() {
        let (n, d) = chain_parts();
        for k in 1..=3 {
            let m = kfold_dhl_map(k, &b()).unwrap();
            assert_eq!(m.numerator, n.pow(k as u32));
            assert_eq!(m.denominator, d.pow(k as u32));
        }
    }

    #[test]
    fn triangle_map() {
        let m = map_of(&triangle());
        assert_eq!(m.numerator, bi(&[(0, 3, 1), (1, 1, 1), (0, 1, -1)]));
        assert_eq!(m.denominator, chain_parts().1);
        assert_eq!(m.generic_degree, 3);
        assert_eq!(m.v_deg_finite, vec![IntPoly::x(), IntPoly::linear(1, -2)]);
        assert!(m.v_deg_contains_infinity);
    }

    #[test]
    fn split_diamond_map() {
        let m = map_of(&split_diamond());
        let n = bi(&[(0, 5, 1), (1, 2, 2), (0, 2, -2), (1, 1, 1), (0, 1, -1), (2, 0, 1), (1, 0, -3), (0, 0, 2)]);
        let d = bi(&[(0, 3, 2), (0, 2, 2), (1, 1, 5), (0, 1, -10), (2, 0, 1), (1, 0, -5), (0, 0, 6)]);
        assert_eq!((m.numerator.clone(), m.denominator.clone()), (n, d));
        assert_eq!(m.generic_degree, 5);
        assert!(!m.degree_dropped);
        assert!(m.superattracting_at_one() && m.superattracting_at_infinity());
    }

    #[test]
    fn superattracting_points() {
        for g in [dhl(), kfold_dhl(3)] {
            let m = map_of(&g);
            assert!(m.superattracting_at_one(), "{}", m.numerator);
            assert!(m.superattracting_at_infinity());
        }
        // r_q'(1) = 1 for the triangle
        let tri = map_of(&triangle());
        assert!(tri.fixes_one() && !tri.superattracting_at_one());
        // r_q(y) ~ y / 2 near infinity
        let chain = map_of(&linear_chain());
        assert!(chain.superattracting_at_one() && !chain.superattracting_at_infinity());
    }

    #[test]
    fn exceptional() {
        assert!(exceptional_check(&map_of(&linear_chain())).unwrap());
        for g in [dhl(), kfold_dhl(3), triangle(), split_diamond()] {
            assert!(!exceptional_check(&map_of(&g)).unwrap());
        }
        let identity = RenormMap::identity();
        assert!(matches!(exceptional_check(&identity), Err(Error::DegenerateMap(1))));
    }

    #[test]
    fn commutation() {
        let m = map_of(&dhl());
        let c = dhl_symmetry();
        assert!(commutation_check(&m, &c));
        assert!(commutation_check(&m, &RenormMap::identity()));
        assert!(!commutation_check(&m, &map_of(&triangle())));
        let one_minus_q = IntPoly::linear(-1, 1);
        let (n, d) = c.eval_at(&one_minus_q);
        assert!(n.is_zero() && !d.is_zero());
        let (n, d) = c.eval_at(&IntPoly::zero());
        assert_eq!(n, &d * &one_minus_q.pow(2));
    }

    #[test]
    fn composition_budget() {
        assert!(check_composition_degree(4, 6, &b()).is_ok());
        assert!(check_composition_degree(4, 7, &b()).unwrap_err().is_budget());
    }
}
