//! Level-`n` chromatic polynomials and their zeros.
//!
//! The exact recursion iterates the template on `(u, v) = (U_n, V_n)|_{y=0}`
//! without cancelling common factors, so multiplicities over degenerate
//! parameters survive. The reduced-map orbit of `y = 0` is available for
//! cross-checks.

mod measure;
mod roots;

pub use measure::{empirical_measure, measure_summary, EmpiricalMeasure, MeasureSummary};
pub use roots::{
    chromatic_zeros, find_roots, find_roots_with, log2_abs_value, relative_residual, Newton, ZeroSet,
    MAX_SWEEPS,
};

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::renorm::{apply_form_uni, check_composition_degree, RecursionTemplate, RenormMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactLevelState {
    pub level: usize,
    pub u: IntPoly,
    pub v: IntPoly,
    /// `|V_level|` of the lattice this state describes.
    pub vertex_count: u128,
}

impl ExactLevelState {
    /// The single edge at `y = 0`: `(U, V) = (0, 1)`.
    pub fn initial() -> Self {
        ExactLevelState {
            level: 0,
            u: IntPoly::zero(),
            v: IntPoly::one(),
            vertex_count: 2,
        }
    }

    pub fn decimal_digits(&self) -> u64 {
        self.u.decimal_digits() + self.v.decimal_digits()
    }
}

/// One substitution step.
pub fn exact_step(t: &RecursionTemplate, s: &ExactLevelState) -> ExactLevelState {
    let (u, v) = t.apply_uni(&s.u, &s.v);
    ExactLevelState {
        level: s.level + 1,
        u,
        v,
        vertex_count: t.vertex_count as u128 + t.edge_count as u128 * (s.vertex_count - 2),
    }
}

/// States for levels `0..=n`.
pub fn exact_levels(t: &RecursionTemplate, n: usize, budgets: &Budgets) -> Result<Vec<ExactLevelState>> {
    let mut states = vec![ExactLevelState::initial()];
    for _ in 0..n {
        let current = states.last().unwrap();
        // Degrees grow by a factor |E| and so, at least, does the total size.
        let predicted = current.decimal_digits().saturating_mul(t.edge_count as u64);
        if predicted > budgets.coefficient_digits {
            return Err(Error::LevelBudget {
                level: current.level,
                message: format!(
                    "level {} needs at least {predicted} coefficient digits, limit {}",
                    current.level + 1,
                    budgets.coefficient_digits
                ),
            });
        }
        let next = exact_step(t, current);
        let digits = next.decimal_digits();
        if digits > budgets.coefficient_digits {
            return Err(Error::LevelBudget {
                level: next.level - 1,
                message: format!(
                    "level {} needs {digits} coefficient digits, limit {}",
                    next.level, budgets.coefficient_digits
                ),
            });
        }
        states.push(next);
    }
    Ok(states)
}

pub fn exact_iterate(t: &RecursionTemplate, n: usize, budgets: &Budgets) -> Result<ExactLevelState> {
    Ok(exact_levels(t, n, budgets)?.pop().unwrap())
}

/// `P_n(q) = q (u_n + (q - 1) v_n)`, checked against `deg P_n = |V_n|`.
pub fn level_chromatic_poly(s: &ExactLevelState) -> Result<IntPoly> {
    let q = IntPoly::x();
    let p = &q * &(&s.u + &(&IntPoly::linear(1, -1) * &s.v));
    let degree = p.degree().unwrap_or(0);
    if degree as u128 != s.vertex_count {
        return Err(Error::DegreeMismatch {
            actual: degree,
            expected: s.vertex_count,
        });
    }
    Ok(p)
}

/// Value and first derivative in `q`.
#[derive(Clone, Copy, Debug)]
struct Dual {
    v: Complex64,
    d: Complex64,
}

impl Dual {
    fn constant(v: Complex64) -> Self {
        Dual {
            v,
            d: Complex64::new(0.0, 0.0),
        }
    }

    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }

    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }

    fn scale(self, c: f64) -> Dual {
        Dual {
            v: self.v * c,
            d: self.d * c,
        }
    }
}

fn powers(x: Dual, n: usize) -> Vec<Dual> {
    let mut out = vec![Dual::constant(Complex64::new(1.0, 0.0))];
    for i in 0..n {
        out.push(out[i].mul(x));
    }
    out
}

/// `P_n'(q) / P_n(q)` by running the recursion in floating point.
///
/// Each level is rescaled by a constant, which leaves the log-derivative
/// unchanged. This is far better conditioned than Horner evaluation of the
/// expanded polynomial, whose coefficients cancel massively near the roots.
pub fn level_log_derivative(t: &RecursionTemplate, level: usize, q: Complex64) -> Complex64 {
    let terms = |p: &crate::poly::TrivarPoly| -> Vec<(usize, usize, usize, f64)> {
        p.terms()
            .map(|(a, b, c, k)| (a as usize, b as usize, c as usize, k.to_f64().unwrap_or(f64::NAN)))
            .collect()
    };
    let (tu, tv) = (terms(&t.u_next), terms(&t.v_next));
    let max_q = tu.iter().chain(&tv).map(|x| x.0).max().unwrap_or(0);
    let qd = Dual {
        v: q,
        d: Complex64::new(1.0, 0.0),
    };
    let qp = powers(qd, max_q);
    let mut u = Dual::constant(Complex64::new(0.0, 0.0));
    let mut v = Dual::constant(Complex64::new(1.0, 0.0));
    let e = t.edge_count;
    for _ in 0..level {
        let (up, vp) = (powers(u, e), powers(v, e));
        let apply = |ts: &[(usize, usize, usize, f64)]| {
            ts.iter().fold(Dual::constant(Complex64::new(0.0, 0.0)), |acc, &(a, b, c, k)| {
                acc.add(qp[a].mul(up[b]).mul(vp[c]).scale(k))
            })
        };
        let (nu, nv) = (apply(&tu), apply(&tv));
        let s = nu.v.norm().max(nv.v.norm());
        let s = if s > 0.0 && s.is_finite() { 1.0 / s } else { 1.0 };
        u = nu.scale(s);
        v = nv.scale(s);
    }
    let q_minus_one = Dual {
        v: q - 1.0,
        d: Complex64::new(1.0, 0.0),
    };
    let p = qd.mul(u.add(q_minus_one.mul(v)));
    p.d / p.v
}

/// Chromatic zeros of a level, origin excluded, using the recursion to
/// evaluate the large factors.
pub fn level_zeros(
    t: &RecursionTemplate,
    s: &ExactLevelState,
    tol: f64,
    budgets: &Budgets,
) -> Result<ZeroSet> {
    let p = level_chromatic_poly(s)?;
    let reduced = IntPoly::from_coeffs(p.coeffs()[1..].to_vec());
    let level = s.level;
    let log_derivative = move |q: Complex64| level_log_derivative(t, level, q) - q.inv();
    let mut z = find_roots_with(&reduced, tol, budgets, Some(&log_derivative))?;
    z.excluded_origin = true;
    Ok(z)
}

/// Projective orbit `(Y_j, Z_j)` of `y = 0` under the reduced map, `j = 0..=n`.
pub fn reduced_orbit(m: &RenormMap, n: usize, budgets: &Budgets) -> Result<Vec<(IntPoly, IntPoly)>> {
    check_composition_degree(m.generic_degree, n, budgets)?;
    let (num, den) = m.forms();
    let mut orbit = vec![(IntPoly::zero(), IntPoly::one())];
    for _ in 0..n {
        let (y, z) = orbit.last().unwrap();
        let next = (apply_form_uni(&num, y, z), apply_form_uni(&den, y, z));
        orbit.push(next);
    }
    Ok(orbit)
}

/// `q (Y_n + (q - 1) Z_n)` from the reduced orbit. Agrees with the exact
/// level polynomial when no factor was cancelled in the reduction.
pub fn reduced_level_polynomial(m: &RenormMap, n: usize, budgets: &Budgets) -> Result<IntPoly> {
    let orbit = reduced_orbit(m, n, budgets)?;
    let (y, z) = orbit.last().unwrap();
    Ok(&IntPoly::x() * &(y + &(&IntPoly::linear(1, -1) * z)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoniterateReport {
    /// No identity `r_q^n(0) ≡ 1 - q` for `n ≤ n_max`, and the orbit is not
    /// persistently preperiodic.
    pub holds: bool,
    /// Levels `n` at which `r_q^n(0) ≡ 1 - q`.
    pub identities: Vec<usize>,
    /// `(i, j)` with `r_q^i(0) ≡ r_q^j(0)`, if any.
    pub preperiodic: Option<(usize, usize)>,
}

pub fn noniterate_report(m: &RenormMap, n_max: usize, budgets: &Budgets) -> Result<NoniterateReport> {
    let orbit = reduced_orbit(m, n_max, budgets)?;
    let q_minus_one = IntPoly::linear(1, -1);
    let identities: Vec<usize> = orbit
        .iter()
        .enumerate()
        .filter(|(_, (y, z))| (y + &(&q_minus_one * z)).is_zero())
        .map(|(n, _)| n)
        .collect();
    let mut preperiodic = None;
    'outer: for j in 1..orbit.len() {
        for i in 0..j {
            let (yi, zi) = &orbit[i];
            let (yj, zj) = &orbit[j];
            if (yi * zj) == (yj * zi) {
                preperiodic = Some((i, j));
                break 'outer;
            }
        }
    }
    Ok(NoniterateReport {
        holds: identities.is_empty() && preperiodic.is_none(),
        identities,
        preperiodic,
    })
}

pub fn noniterate_check(m: &RenormMap, n_max: usize, budgets: &Budgets) -> Result<bool> {
    Ok(noniterate_report(m, n_max, budgets)?.holds)
}
