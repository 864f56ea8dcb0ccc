//! Simultaneous root finding (Aberth-Ehrlich) for integer polynomials.
//!
//! Coefficients of high-level chromatic polynomials overflow `f64`, so
//! evaluation runs in an extended-range representation: a complex mantissa
//! with a separate binary exponent.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::poly::{squarefree_decompose, IntPoly};

pub const MAX_SWEEPS: usize = 200;

/// `m * 2^e`.
#[derive(Clone, Copy, Debug)]
struct Ext {
    m: Complex64,
    e: i64,
}

const RESCALE_HI: f64 = 1e120;
const RESCALE_LO: f64 = 1e-120;

impl Ext {
    const ZERO: Ext = Ext {
        m: Complex64::new(0.0, 0.0),
        e: 0,
    };

    fn new(m: Complex64, e: i64) -> Ext {
        let s = m.re.abs().max(m.im.abs());
        if s == 0.0 || !s.is_finite() {
            return Ext { m, e: if s == 0.0 { 0 } else { e } };
        }
        if (RESCALE_LO..=RESCALE_HI).contains(&s) {
            return Ext { m, e };
        }
        let k = s.log2().floor() as i64;
        Ext {
            m: m * pow2(-k),
            e: e + k,
        }
    }

    fn from_big(c: &BigInt) -> Ext {
        let shift = c.bits().saturating_sub(60);
        let top = (c >> shift as usize).to_f64().unwrap_or(0.0);
        Ext::new(Complex64::new(top, 0.0), shift as i64)
    }

    fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    fn scale(self, z: Complex64) -> Ext {
        Ext::new(self.m * z, self.e)
    }

    fn add(self, o: Ext) -> Ext {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let diff = big.e - small.e;
        if diff > 2000 {
            return big;
        }
        Ext::new(big.m + small.m * pow2(-diff), big.e)
    }

    fn abs(self) -> Ext {
        Ext::new(Complex64::new(self.m.norm(), 0.0), self.e)
    }

    /// `self / o` as an ordinary complex number (may be infinite).
    fn ratio(self, o: Ext) -> Complex64 {
        (self.m / o.m) * pow2(self.e - o.e)
    }

    fn log2_abs(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.norm().log2() + self.e as f64
        }
    }
}

fn pow2(k: i64) -> f64 {
    let k = k.clamp(-2000, 2000);
    if k.abs() <= 1000 {
        2f64.powi(k as i32)
    } else {
        2f64.powi((k / 2) as i32) * 2f64.powi((k - k / 2) as i32)
    }
}

/// `x = m 2^e` with integer `m`.
fn decode(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1 << 52) - 1);
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
    let m = BigInt::from(m);
    (if x < 0.0 { -m } else { m }, e)
}

/// `z = (a + b i) 2^(-k)` with integers `a, b` and `k ≥ 0`.
fn dyadic(z: Complex64) -> (BigInt, BigInt, u64) {
    let (a, ea) = decode(z.re);
    let (b, eb) = decode(z.im);
    let e = ea.min(eb).min(0);
    ((a << (ea - e) as usize), (b << (eb - e) as usize), (-e) as u64)
}

fn ext_from_gaussian(re: &BigInt, im: &BigInt, exp: i64) -> Ext {
    let bits = re.bits().max(im.bits());
    let shift = bits.saturating_sub(60);
    let r = (re >> shift as usize).to_f64().unwrap_or(0.0);
    let i = (im >> shift as usize).to_f64().unwrap_or(0.0);
    Ext::new(Complex64::new(r, i), shift as i64 + exp)
}

/// Exact Horner evaluation at the dyadic point `z`.
fn eval_exact(coeffs: &[BigInt], z: Complex64) -> Ext {
    let n = coeffs.len() - 1;
    let (a, b, k) = dyadic(z);
    let (mut re, mut im) = (coeffs[n].clone(), BigInt::zero());
    for i in (0..n).rev() {
        let next_re = &re * &a - &im * &b + (&coeffs[i] << (k as usize * (n - i)));
        im = &re * &b + &im * &a;
        re = next_re;
    }
    ext_from_gaussian(&re, &im, -((k * n as u64) as i64))
}

/// A polynomial prepared for evaluation: extended-range floating Horner
/// with a running error bound, falling back to exact evaluation when the
/// bound does not certify a single correct bit.
struct ExtPoly {
    exact: Vec<BigInt>,
    coeffs: Vec<Ext>,
}

impl ExtPoly {
    fn new(p: &IntPoly) -> Self {
        ExtPoly {
            exact: p.coeffs().to_vec(),
            coeffs: p.coeffs().iter().map(Ext::from_big).collect(),
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn eval(&self, z: Complex64) -> Ext {
        let r = Complex64::new(z.norm(), 0.0);
        let mut p = Ext::ZERO;
        let mut bound = Ext::ZERO;
        for c in self.coeffs.iter().rev() {
            p = p.scale(z).add(*c);
            bound = bound.scale(r).add(p.abs());
        }
        let noise = bound.log2_abs() + ((4 * self.coeffs.len() + 4) as f64 * f64::EPSILON).log2();
        if p.log2_abs() > noise + 4.0 {
            p
        } else {
            eval_exact(&self.exact, z)
        }
    }
}

/// Value and derivative of one polynomial.
struct Evaluator {
    p: ExtPoly,
    dp: ExtPoly,
}

impl Evaluator {
    fn new(p: &IntPoly) -> Self {
        Evaluator {
            p: ExtPoly::new(p),
            dp: ExtPoly::new(&p.derivative()),
        }
    }

    /// Newton correction `p(z) / p'(z)`; zero at an exact root.
    fn newton(&self, z: Complex64) -> Complex64 {
        let p = self.p.eval(z);
        if p.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let dp = self.dp.eval(z);
        if dp.is_zero() {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        p.ratio(dp)
    }
}

/// Residual used for convergence: the Newton step relative to `max(1, |z|)`.
fn step_residual(w: Complex64, z: Complex64) -> f64 {
    w.norm() / z.norm().max(1.0)
}

/// `8^n p((s + x) / 8)`: the polynomial recentred at `s / 8`, with the
/// variable scaled by 8, so everything stays integral.
fn recentre(p: &IntPoly, s: i64) -> IntPoly {
    let n = p.degree().unwrap_or(0);
    let eight = BigInt::from(8);
    let mut c: Vec<BigInt> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| a * eight.pow((n - i) as u32))
        .collect();
    if s != 0 {
        let s = BigInt::from(s);
        for i in 0..n {
            for j in (i..n).rev() {
                let t = &c[j + 1] * &s;
                c[j] += t;
            }
        }
    }
    IntPoly::from_coeffs(c)
}

/// Starting points on circles read off the Newton polygon of `log |b_i|`.
fn initial_points(p: &ExtPoly) -> Vec<Complex64> {
    let n = p.degree();
    let logs: Vec<f64> = p.coeffs.iter().map(|c| c.log2_abs()).collect();
    // Upper convex hull over indices with nonzero coefficients.
    let mut hull: Vec<usize> = Vec::new();
    for i in (0..=n).filter(|&i| logs[i].is_finite()) {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (logs[b] - logs[a]) * (i - a) as f64 - (logs[i] - logs[a]) * (b - a) as f64;
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut points = Vec::with_capacity(n);
    for k in 0..hull[0] {
        let theta = std::f64::consts::TAU * k as f64 / hull[0] as f64 + 0.4;
        points.push(Complex64::from_polar(1e-3, theta));
    }
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let count = j - i;
        let radius = ((logs[i] - logs[j]) / count as f64).exp2();
        for k in 0..count {
            let theta = std::f64::consts::TAU * k as f64 / count as f64 + 0.4 + 0.7 * i as f64 / n as f64;
            points.push(Complex64::from_polar(radius, theta));
        }
    }
    points
}

/// A function of one complex variable: a Newton correction `f / f'` or a
/// log-derivative `f' / f`.
pub type Newton<'a> = dyn Fn(Complex64) -> Complex64 + Sync + 'a;

/// Evaluation of a factor recentred at its root centroid: `x = 8 (z - c)`.
struct Recentred {
    center: Complex64,
    eval: Evaluator,
}

impl Recentred {
    fn new(p: &IntPoly) -> Self {
        let n = p.degree().expect("nonzero polynomial");
        let lead = Ext::from_big(&p.coeff(n));
        let centroid = if n == 0 { 0.0 } else { -Ext::from_big(&p.coeff(n - 1)).ratio(lead).re / n as f64 };
        let s = if centroid.is_finite() { (centroid * 8.0).round().clamp(-1e9, 1e9) as i64 } else { 0 };
        Recentred {
            center: Complex64::new(s as f64 / 8.0, 0.0),
            eval: Evaluator::new(&recentre(p, s)),
        }
    }

    fn newton(&self, z: Complex64) -> Complex64 {
        self.eval.newton((z - self.center) * 8.0) / 8.0
    }

    fn initial_points(&self) -> Vec<Complex64> {
        initial_points(&self.eval.p).into_iter().map(|x| self.center + x / 8.0).collect()
    }
}

/// Number of roots inside the circle `|z - c| = r` by the argument
/// principle, from `m` samples of the log-derivative.
fn winding_count(newton: &Newton, c: Complex64, r: f64, m: usize) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let e = Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / m as f64);
        acc += e / newton(c + e * r);
    }
    (acc * r / m as f64).re
}

/// Starting points on the smallest circle (in a doubling sequence) that
/// provably encloses all roots according to the argument principle; falls
/// back to the Newton polygon radii.
fn start_points(start: &Recentred, newton: &Newton, n: usize) -> Vec<Complex64> {
    let polygon = start.initial_points();
    let c = start.center;
    let mut radii: Vec<f64> = polygon.iter().map(|z| (z - c).norm()).collect();
    radii.sort_by(f64::total_cmp);
    let mut r = radii[radii.len() / 2].max(1e-6);
    for _ in 0..60 {
        let count = winding_count(newton, c, r, 4 * n + 16);
        if (count - n as f64).abs() < 0.25 {
            let r_in = r * 0.75;
            let inner = winding_count(newton, c, r_in, 4 * n + 16);
            if (inner - n as f64).abs() >= 0.25 {
                return rings(newton, c, r, n);
            }
            r = r_in;
            continue;
        }
        r *= 2.0;
    }
    polygon
}

/// Places points on concentric rings inside radius `r`, each annulus
/// receiving as many points as the argument principle counts roots in it.
fn rings(newton: &Newton, c: Complex64, r: f64, n: usize) -> Vec<Complex64> {
    const RATIO: f64 = 0.9;
    let m = 4 * n + 16;
    let mut radii = vec![r];
    let mut counts = vec![n];
    let mut rho = r;
    while rho > r * 1e-6 {
        rho *= RATIO;
        let k = winding_count(newton, c, rho, m).round().clamp(0.0, *counts.last().unwrap() as f64) as usize;
        radii.push(rho);
        counts.push(k);
        if k == 0 {
            break;
        }
    }
    if *counts.last().unwrap() > 0 {
        radii.push(0.0);
        counts.push(0);
    }
    let mut z = Vec::with_capacity(n);
    for i in 0..radii.len() - 1 {
        let k = counts[i] - counts[i + 1];
        let mid = (radii[i] + radii[i + 1]) / 2.0;
        let phase = 0.7 * i as f64 + 0.3;
        z.extend((0..k).map(|t| c + Complex64::from_polar(mid, std::f64::consts::TAU * t as f64 / k as f64 + phase)));
    }
    z
}

/// Roots of a square-free integer polynomial of degree ≥ 1.
fn aberth(p: &IntPoly, start: &Recentred, newton: &Newton, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree().expect("nonzero polynomial");
    if n == 1 {
        let root = -Ext::from_big(&p.coeff(0)).ratio(Ext::from_big(&p.coeff(1)));
        return Ok(vec![root]);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut z = start_points(start, newton, n);
    let mut done = vec![false; n];
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && done.iter().any(|d| !d) {
        sweeps += 1;
        // Gauss-Seidel: each update sees the freshest positions.
        for i in 0..n {
            if done[i] {
                continue;
            }
            let w = newton(z[i]);
            if step_residual(w, z[i]) <= tol {
                z[i] -= w;
                done[i] = true;
                continue;
            }
            let zi = z[i];
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| (zi - z[j]).inv()).sum();
            let step = w / (one - w * sum);
            if step.is_finite() {
                z[i] -= step;
            } else {
                z[i] += Complex64::new(1e-3, 1e-3) * (1.0 + zi.norm());
            }
        }
    }
    // Polish with one Newton step, keeping it only if the residual improves.
    let roots: Vec<(Complex64, f64)> = z
        .par_iter()
        .map(|&zi| {
            let w = newton(zi);
            let r = step_residual(w, zi);
            let polished = zi - w;
            if polished.is_finite() {
                let r2 = step_residual(newton(polished), polished);
                if r2 <= r {
                    return (polished, r2);
                }
            }
            (zi, r)
        })
        .collect();
    let unconverged = roots.iter().filter(|r| !(r.1 <= tol)).count();
    if unconverged > 0 {
        return Err(Error::NonConvergence {
            unconverged,
            degree: n,
            sweeps,
        });
    }
    Ok(roots.into_iter().map(|r| r.0).collect())
}

/// Roots with exact multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSet {
    pub roots: Vec<(Complex64, u32)>,
    /// Degree of the polynomial whose roots these are.
    pub source_degree: usize,
    /// Whether a simple root at `0` was divided out beforehand.
    pub excluded_origin: bool,
}

impl ZeroSet {
    pub fn empty() -> Self {
        ZeroSet {
            roots: Vec::new(),
            source_degree: 0,
            excluded_origin: false,
        }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|&(_, m)| m as usize).sum()
    }
}

/// All complex roots of `p`, each paired with its multiplicity.
pub fn find_roots(p: &IntPoly, tol: f64, budgets: &Budgets) -> Result<ZeroSet> {
    find_roots_with(p, tol, budgets, None)
}

/// Factors above this degree use the caller's log-derivative when one is given.
const DIRECT_DEGREE: usize = 32;

/// Like [`find_roots`], with an optional evaluator of `p'(z) / p(z)` for
/// polynomials whose monomial coefficients are too ill-conditioned to
/// evaluate directly.
pub fn find_roots_with(
    p: &IntPoly,
    tol: f64,
    budgets: &Budgets,
    log_derivative: Option<&Newton>,
) -> Result<ZeroSet> {
    let Some(degree) = p.degree() else {
        return Err(Error::InvalidArgument("roots of the zero polynomial".into()));
    };
    if degree > budgets.root_degree {
        return Err(Error::budget("root-finding degree", degree, budgets.root_degree));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let factors = if degree == 0 {
        Vec::new()
    } else {
        squarefree_decompose(p).factors
    };
    let evals: Vec<Recentred> = factors.par_iter().map(|(f, _)| Recentred::new(f)).collect();
    let per_factor: Vec<Vec<(Complex64, u32)>> = (0..factors.len())
        .into_par_iter()
        .map(|j| {
            let (f, m) = &factors[j];
            let direct = |z: Complex64| evals[j].newton(z);
            let from_whole = |z: Complex64| {
                let whole = log_derivative.expect("log-derivative present");
                let mut s = whole(z);
                for (k, (_, mk)) in factors.iter().enumerate() {
                    if k != j {
                        s -= *mk as f64 / evals[k].newton(z);
                    }
                }
                let w = *m as f64 / s;
                if w.is_finite() {
                    w
                } else {
                    evals[j].newton(z)
                }
            };
            let newton: &Newton = match log_derivative {
                Some(_) if f.degree().unwrap_or(0) > DIRECT_DEGREE => &from_whole,
                _ => &direct,
            };
            Ok(aberth(f, &evals[j], newton, tol)?.into_iter().map(|z| (z, *m)).collect())
        })
        .collect::<Result<_>>()?;
    let mut roots: Vec<(Complex64, u32)> = per_factor.into_iter().flatten().collect();
    roots.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)).then(a.1.cmp(&b.1)));
    Ok(ZeroSet {
        roots,
        source_degree: degree,
        excluded_origin: false,
    })
}

/// Roots of a chromatic polynomial with its simple root at `q = 0` removed.
pub fn chromatic_zeros(p: &IntPoly, tol: f64, budgets: &Budgets) -> Result<ZeroSet> {
    if p.is_zero() || !p.coeff(0).is_zero() {
        return Err(Error::InvalidArgument("expected a polynomial vanishing at q = 0".into()));
    }
    let reduced = IntPoly::from_coeffs(p.coeffs()[1..].to_vec());
    let mut z = find_roots(&reduced, tol, budgets)?;
    z.excluded_origin = true;
    Ok(z)
}

/// `|p(z) / p'(z)| / max(1, |z|)`: the relative size of the Newton step
/// at `z`, with `p` evaluated exactly where floating point cannot certify it.
/// Zero at an exact root.
pub fn relative_residual(p: &IntPoly, z: Complex64) -> f64 {
    step_residual(Evaluator::new(p).newton(z), z)
}

/// `log2 |p(z)|`.
pub fn log2_abs_value(p: &IntPoly, z: Complex64) -> f64 {
    ExtPoly::new(p).eval(z).log2_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, eps: f64) -> bool {
        (a - b).norm() < eps
    }

    #[test]
    fn ext_arithmetic() {
        let big = Ext::from_big(&(BigInt::from(3) << 3000usize));
        let small = Ext::from_big(&(BigInt::from(1) << 2999usize));
        let sum = big.add(small);
        assert!((sum.log2_abs() - (3.5f64.log2() + 3000.0)).abs() < 1e-12);
        assert!((big.ratio(small).re - 6.0).abs() < 1e-12);
        let z = Ext::new(Complex64::new(0.0, 2.0), 0);
        let one = Ext::new(Complex64::new(1.0, 0.0), 0);
        assert!(close(z.scale(Complex64::new(0.0, 2.0)).ratio(one), Complex64::new(-4.0, 0.0), 1e-15));
    }

    #[test]
    fn c4_roots() {
        let p = IntPoly::from_i64(&[0, -3, 6, -4, 1]);
        let z = find_roots(&p, 1e-12, &Budgets::default()).unwrap();
        let s3 = 3f64.sqrt() / 2.0;
        let expect = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.5, -s3),
            Complex64::new(1.5, s3),
        ];
        assert_eq!(z.roots.len(), 4);
        for ((r, m), e) in z.roots.iter().zip(expect) {
            assert!(close(*r, e, 1e-12), "{r} vs {e}");
            assert_eq!(*m, 1);
        }
    }

    #[test]
    fn tree_multiplicity() {
        let p = &IntPoly::x() * &IntPoly::linear(1, -1).pow(6);
        let z = find_roots(&p, 1e-12, &Budgets::default()).unwrap();
        assert_eq!(z.roots.len(), 2);
        assert_eq!(z.roots[1].1, 6);
        assert!(close(z.roots[1].0, Complex64::new(1.0, 0.0), 1e-14));
        assert_eq!(z.total_multiplicity(), 7);
    }

    #[test]
    fn imaginary_pair() {
        let z = find_roots(&IntPoly::from_i64(&[1, 0, 1]), 1e-12, &Budgets::default()).unwrap();
        assert!(close(z.roots[0].0, Complex64::new(0.0, -1.0), 1e-14));
        assert!(close(z.roots[1].0, Complex64::new(0.0, 1.0), 1e-14));
    }

    #[test]
    fn huge_coefficients() {
        // (q - 2)^3 (q^2 + 1) (q + 1/3) scaled by 10^400
        let scale = IntPoly::constant(BigInt::from(10).pow(400));
        let p = &(&(&IntPoly::linear(1, -2).pow(3) * &IntPoly::from_i64(&[1, 0, 1])) * &IntPoly::linear(3, 1)) * &scale;
        let z = find_roots(&p, 1e-12, &Budgets::default()).unwrap();
        assert_eq!(z.total_multiplicity(), 6);
        assert!(z.roots.iter().any(|&(r, m)| m == 3 && close(r, Complex64::new(2.0, 0.0), 1e-12)));
        assert!(z.roots.iter().any(|&(r, _)| close(r, Complex64::new(-1.0 / 3.0, 0.0), 1e-12)));
    }

    #[test]
    fn degree_two_hundred() {
        // q^200 - 1
        let mut c = vec![0i64; 201];
        c[0] = -1;
        c[200] = 1;
        let p = IntPoly::from_i64(&c);
        let z = find_roots(&p, 1e-12, &Budgets::default()).unwrap();
        assert_eq!(z.roots.len(), 200);
        for (r, _) in &z.roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!(relative_residual(&p, *r) < 1e-12);
        }
    }

    #[test]
    fn budget_and_errors() {
        let tight = Budgets {
            root_degree: 3,
            ..Budgets::default()
        };
        assert!(find_roots(&IntPoly::x().pow(4), 1e-12, &tight).unwrap_err().is_budget());
        assert!(find_roots(&IntPoly::zero(), 1e-12, &Budgets::default()).is_err());
        assert!(chromatic_zeros(&IntPoly::from_i64(&[1, 1]), 1e-12, &Budgets::default()).is_err());
    }
}
