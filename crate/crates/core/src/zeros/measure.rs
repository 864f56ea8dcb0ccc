//! Empirical root-counting measures.

use num_complex::Complex64;
use serde::Serialize;

use super::roots::ZeroSet;

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    /// `(location, weight)` with weight `multiplicity / vertex_count`.
    pub atoms: Vec<(Complex64, f64)>,
    pub vertex_count: u128,
}

impl EmpiricalMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// Weights each root by `multiplicity / vertex_count`. With `include_origin`
/// the atom at `q = 0` dropped by [`super::chromatic_zeros`] is put back.
pub fn empirical_measure(z: &ZeroSet, vertex_count: u128, include_origin: bool) -> EmpiricalMeasure {
    let n = vertex_count.max(1) as f64;
    let mut atoms: Vec<(Complex64, f64)> = z.roots.iter().map(|&(r, m)| (r, m as f64 / n)).collect();
    if include_origin && z.excluded_origin {
        atoms.push((Complex64::new(0.0, 0.0), 1.0 / n));
        atoms.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    }
    EmpiricalMeasure { atoms, vertex_count }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureSummary {
    pub mass_within: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub max_distance: f64,
}

/// Mass in the closed disk, weighted mean location, and the largest atom
/// distance from `center`.
pub fn measure_summary(m: &EmpiricalMeasure, center: Complex64, radius: f64) -> MeasureSummary {
    let total = m.total_mass();
    let mut within = 0.0;
    let mut mean = Complex64::new(0.0, 0.0);
    let mut max_distance: f64 = 0.0;
    for &(z, w) in &m.atoms {
        let d = (z - center).norm();
        if d <= radius {
            within += w;
        }
        mean += z * w;
        max_distance = max_distance.max(d);
    }
    if total > 0.0 {
        mean /= total;
    }
    MeasureSummary {
        mass_within: within,
        mean_re: mean.re,
        mean_im: mean.im,
        max_distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zs(roots: &[(f64, f64, u32)], excluded_origin: bool) -> ZeroSet {
        let roots: Vec<_> = roots.iter().map(|&(a, b, m)| (Complex64::new(a, b), m)).collect();
        let source_degree = roots.iter().map(|r| r.1 as usize).sum();
        ZeroSet {
            roots,
            source_degree,
            excluded_origin,
        }
    }

    #[test]
    fn c4_measure() {
        let s3 = 3f64.sqrt() / 2.0;
        let z = zs(&[(1.0, 0.0, 1), (1.5, -s3, 1), (1.5, s3, 1)], true);
        let m = empirical_measure(&z, 4, true);
        assert_eq!(m.atoms.len(), 4);
        assert!(m.atoms.iter().all(|a| a.1 == 0.25));
        let s = measure_summary(&m, Complex64::new(0.0, 0.0), 10.0);
        assert_eq!(s.mass_within, 1.0);
        assert!((s.mean_re - 1.0).abs() < 1e-15 && s.mean_im.abs() < 1e-15);
        let without = empirical_measure(&z, 4, false);
        assert_eq!(without.total_mass(), 0.75);
    }

    #[test]
    fn dirac_at_one() {
        let m = empirical_measure(&zs(&[(1.0, 0.0, 9)], true), 10, false);
        let s = measure_summary(&m, Complex64::new(1.0, 0.0), 0.01);
        assert!((s.mass_within - 0.9).abs() < 1e-15);
        assert_eq!(s.max_distance, 0.0);
    }

    #[test]
    fn empty() {
        let m = empirical_measure(&ZeroSet::empty(), 5, true);
        assert!(m.atoms.is_empty());
        let s = measure_summary(&m, Complex64::new(0.0, 0.0), 1.0);
        assert_eq!((s.mass_within, s.mean_re, s.max_distance), (0.0, 0.0, 0.0));
    }
}
