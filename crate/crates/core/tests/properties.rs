use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;

use hierlat::graph::generators;
use hierlat::poly::{gcd, squarefree_decompose, BivarPoly, IntPoly};
use hierlat::render::{Classifier, RenderConfig};
use hierlat::renorm::{derive_template, reduce_map, RenormMap};
use hierlat::zeros::find_roots;
use hierlat::Budgets;

fn poly(max_len: usize, bound: i64) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-bound..=bound, 0..max_len).prop_map(|c| IntPoly::from_i64(&c))
}

fn big_poly() -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(any::<i64>(), 0..6).prop_map(|c| {
        let big: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x) * BigInt::from(x) * BigInt::from(x)).collect();
        IntPoly::from_coeffs(big)
    })
}

fn bivar() -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((0u32..4, 0u32..4, -9i64..=9), 0..6).prop_map(BivarPoly::from_terms)
}

fn map(g: &hierlat::graph::MarkedGraph) -> RenormMap {
    reduce_map(&derive_template(g, &Budgets::default()).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn ring_axioms(a in big_poly(), b in big_poly(), c in big_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &IntPoly::zero()), &a);
        let copy = a.clone();
        prop_assert!((&a - &copy).is_zero());
        prop_assert_eq!(&(&a - &b) + &b, a);
    }

    #[test]
    fn bivariate_ring_axioms(a in bivar(), b in bivar(), c in bivar()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let copy = a.clone();
        prop_assert!((&a - &copy).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(8, 50), b in poly(8, 50), x in -30i64..30) {
        let x = BigInt::from(x);
        prop_assert_eq!((&a * &b).eval_big(&x), a.eval_big(&x) * b.eval_big(&x));
        prop_assert_eq!((&a + &b).eval_big(&x), a.eval_big(&x) + b.eval_big(&x));
    }

    #[test]
    fn gcd_divides_and_is_greatest(a in poly(6, 30), b in poly(6, 30), c in poly(5, 30)) {
        let (x, y) = (&a * &c, &b * &c);
        prop_assume!(!x.is_zero() || !y.is_zero());
        let g = gcd(&x, &y);
        prop_assert!(x.div_exact(&g).is_some());
        prop_assert!(y.div_exact(&g).is_some());
        if !c.is_zero() {
            prop_assert!(g.div_exact(&c.primitive_part()).is_some());
        }
    }

    #[test]
    fn squarefree_reconstructs(a in poly(4, 9), b in poly(4, 9), k in 1u32..4) {
        let p = &a * &b.pow(k);
        prop_assume!(!p.is_zero());
        let d = squarefree_decompose(&p);
        prop_assert_eq!(d.reconstruct(), p);
        for (f, _) in &d.factors {
            prop_assert!(gcd(f, &f.derivative()).is_constant());
        }
    }

    #[test]
    fn roots_of_products(r in prop::collection::vec(-6i64..=6, 1..8)) {
        let p = r.iter().fold(IntPoly::one(), |acc, &x| &acc * &IntPoly::linear(1, -x));
        let z = find_roots(&p, 1e-12, &Budgets::default()).unwrap();
        prop_assert_eq!(z.total_multiplicity(), r.len());
        for (root, m) in &z.roots {
            let exact = root.re.round();
            prop_assert!((root - Complex64::new(exact, 0.0)).norm() < 1e-9);
            prop_assert_eq!(*m as usize, r.iter().filter(|&&x| x as f64 == exact).count());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classify_conjugation_symmetry(re in -2.0f64..5.0, im in -3.0f64..3.0) {
        let cfg = RenderConfig::default();
        let q = Complex64::new(re, im);
        for g in [generators::dhl(), generators::split_diamond(), generators::triangle()] {
            let k = Classifier::new(&map(&g), &Budgets::default()).unwrap();
            prop_assert_eq!(k.classify(q, &cfg), k.classify(q.conj(), &cfg));
        }
    }

    #[test]
    fn classify_monotone_in_iterations(re in -2.0f64..4.0, im in -3.0f64..3.0) {
        let k = Classifier::new(&map(&generators::dhl()), &Budgets::default()).unwrap();
        let q = Complex64::new(re, im);
        let short = RenderConfig { max_iters: 100, ..RenderConfig::default() };
        let long = RenderConfig { max_iters: 200, ..RenderConfig::default() };
        let verdict = k.classify(q, &short);
        if verdict != hierlat::render::PixelClass::Bounded {
            prop_assert_eq!(verdict, k.classify(q, &long));
        }
    }
}
