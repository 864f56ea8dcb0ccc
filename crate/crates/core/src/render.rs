//! Parameter-plane classification by the orbit of `y = 0`.
//!
//! Each pixel `q` is classified by iterating `y -> r_q(y)` in projective
//! coordinates: to the superattracting fixed point `y = 1` (white), to
//! `y = infinity` (blue), neither within the iteration limit (black), or
//! a degenerate parameter where the map drops degree (red).

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::renorm::RenormMap;
use crate::zeros::{find_roots, ZeroSet};

/// Distance below which a parameter is treated as a degree-drop value.
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub width: usize,
    pub height: usize,
    pub max_iters: usize,
    pub basin_radius_one: f64,
    pub escape_radius: f64,
    pub persistence_steps: usize,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            re_min: -2.0,
            re_max: 4.0,
            im_min: -3.0,
            im_max: 3.0,
            width: 256,
            height: 256,
            max_iters: 200,
            basin_radius_one: 1e-3,
            escape_radius: 1e6,
            persistence_steps: 5,
        }
    }
}

impl RenderConfig {
    pub fn with_region(mut self, region: [f64; 4]) -> Self {
        [self.re_min, self.re_max, self.im_min, self.im_max] = region;
        self
    }

    pub fn with_size(mut self, width: usize, height: usize) -> Self {
        self.width = width;
        self.height = height;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::InvalidArgument(format!(
                "region [{}, {}] x [{}, {}] is empty or not finite",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if self.persistence_steps < 1 || self.max_iters < self.persistence_steps {
            return Err(Error::InvalidArgument(format!(
                "need max_iters >= persistence_steps >= 1, got {} and {}",
                self.max_iters, self.persistence_steps
            )));
        }
        if !(self.basin_radius_one > 0.0) || !(self.escape_radius > 0.0) {
            return Err(Error::InvalidArgument("basin radii must be positive".into()));
        }
        Ok(())
    }

    fn pixel_size(&self) -> (f64, f64) {
        (
            (self.re_max - self.re_min) / self.width as f64,
            (self.im_max - self.im_min) / self.height as f64,
        )
    }

    /// Parameter at the centre of pixel `(i, j)`, row `j = 0` on top.
    pub fn pixel_center(&self, i: usize, j: usize) -> Complex64 {
        let (dx, dy) = self.pixel_size();
        Complex64::new(self.re_min + (i as f64 + 0.5) * dx, self.im_max - (j as f64 + 0.5) * dy)
    }

    /// Pixel containing `z`, if it lies in the region.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let (dx, dy) = self.pixel_size();
        let x = ((z.re - self.re_min) / dx).floor();
        let y = ((self.im_max - z.im) / dy).floor();
        if x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64 {
            Some((x as usize, y as usize))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PixelClass {
    ToOne,
    ToInfinity,
    Bounded,
    Degenerate,
}

impl PixelClass {
    pub fn color(self) -> [u8; 3] {
        match self {
            PixelClass::ToOne => [255, 255, 255],
            PixelClass::ToInfinity => [0, 0, 255],
            PixelClass::Bounded => [0, 0, 0],
            PixelClass::Degenerate => [255, 0, 0],
        }
    }
}

/// A map prepared for repeated classification: its coefficient forms and the
/// complex degree-drop parameters.
#[derive(Clone, Debug)]
pub struct Classifier {
    numerator: Vec<crate::poly::IntPoly>,
    denominator: Vec<crate::poly::IntPoly>,
    degenerate: Vec<Complex64>,
}

impl Classifier {
    pub fn new(m: &RenormMap, budgets: &Budgets) -> Result<Self> {
        let (numerator, denominator) = m.forms();
        let mut degenerate = Vec::new();
        for f in &m.v_deg_finite {
            degenerate.extend(find_roots(f, 1e-14, budgets)?.roots.into_iter().map(|r| r.0));
        }
        Ok(Classifier {
            numerator,
            denominator,
            degenerate,
        })
    }

    /// Degree-drop parameters this classifier marks as degenerate.
    pub fn degenerate_points(&self) -> &[Complex64] {
        &self.degenerate
    }

    pub fn classify(&self, q: Complex64, cfg: &RenderConfig) -> PixelClass {
        if self.degenerate.iter().any(|&r| (q - r).norm() < DEGENERATE_TOLERANCE) {
            return PixelClass::Degenerate;
        }
        let n: Vec<Complex64> = self.numerator.iter().map(|c| c.eval_complex(q)).collect();
        let d: Vec<Complex64> = self.denominator.iter().map(|c| c.eval_complex(q)).collect();
        let (mut y, mut z) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let (mut near_one, mut near_infinity) = (0, 0);
        for _ in 0..cfg.max_iters {
            let (ny, nz) = (homogeneous(&n, y, z), homogeneous(&d, y, z));
            let s = ny.norm().max(nz.norm());
            if !(s > 0.0) || !s.is_finite() {
                return PixelClass::Degenerate;
            }
            (y, z) = (ny / s, nz / s);
            if (y - z).norm() < cfg.basin_radius_one * z.norm() {
                near_one += 1;
            } else {
                near_one = 0;
            }
            if y.norm() > cfg.escape_radius * z.norm() {
                near_infinity += 1;
            } else {
                near_infinity = 0;
            }
            if near_one >= cfg.persistence_steps {
                return PixelClass::ToOne;
            }
            if near_infinity >= cfg.persistence_steps {
                return PixelClass::ToInfinity;
            }
        }
        PixelClass::Bounded
    }
}

/// `sum c_i y^i z^(d-i)` with `d = c.len() - 1`, evaluated in the better
/// scaled affine chart.
fn homogeneous(c: &[Complex64], y: Complex64, z: Complex64) -> Complex64 {
    let d = c.len() as i32 - 1;
    if z.norm() >= y.norm() {
        let t = y / z;
        c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * t + a) * z.powi(d)
    } else {
        let t = z / y;
        c.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * t + a) * y.powi(d)
    }
}

/// Classifies a single parameter.
pub fn classify(m: &RenormMap, q: Complex64, cfg: &RenderConfig) -> Result<PixelClass> {
    Ok(Classifier::new(m, &Budgets::default())?.classify(q, cfg))
}

/// Per-pixel classes, row-major with row 0 on top.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassGrid {
    pub width: usize,
    pub height: usize,
    pub classes: Vec<PixelClass>,
}

impl ClassGrid {
    pub fn get(&self, i: usize, j: usize) -> PixelClass {
        self.classes[j * self.width + i]
    }

    pub fn contains(&self, c: PixelClass) -> bool {
        self.classes.contains(&c)
    }

    /// Whether a 4-neighbour of `(i, j)` has a different class.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        let c = self.get(i, j);
        let (w, h) = (self.width, self.height);
        (i > 0 && self.get(i - 1, j) != c)
            || (i + 1 < w && self.get(i + 1, j) != c)
            || (j > 0 && self.get(i, j - 1) != c)
            || (j + 1 < h && self.get(i, j + 1) != c)
    }

    /// Whether a boundary pixel lies within Euclidean pixel distance `radius`.
    pub fn near_boundary(&self, i: usize, j: usize, radius: usize) -> bool {
        let r = radius as isize;
        for dj in -r..=r {
            for di in -r..=r {
                if di * di + dj * dj > r * r {
                    continue;
                }
                let (x, y) = (i as isize + di, j as isize + dj);
                if x >= 0
                    && y >= 0
                    && (x as usize) < self.width
                    && (y as usize) < self.height
                    && self.is_boundary(x as usize, y as usize)
                {
                    return true;
                }
            }
        }
        false
    }

    /// Fraction of the roots inside the region that lie within `radius`
    /// pixels of a class boundary; `None` when no root is inside.
    pub fn boundary_fraction(&self, z: &ZeroSet, cfg: &RenderConfig, radius: usize) -> Option<f64> {
        let (mut inside, mut near) = (0usize, 0usize);
        for &(r, _) in &z.roots {
            if let Some((i, j)) = cfg.pixel_of(r) {
                inside += 1;
                if self.near_boundary(i, j, radius) {
                    near += 1;
                }
            }
        }
        (inside > 0).then(|| near as f64 / inside as f64)
    }

    pub fn to_image(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            pixels: self.classes.iter().map(|c| c.color()).collect(),
        }
    }
}

/// Classifies every pixel of the configured region.
pub fn classify_grid(m: &RenormMap, cfg: &RenderConfig, budgets: &Budgets) -> Result<ClassGrid> {
    cfg.validate()?;
    let pixels = (cfg.width as u128) * (cfg.height as u128);
    if pixels > budgets.pixels as u128 {
        return Err(Error::budget("pixel", pixels, budgets.pixels));
    }
    let classifier = Classifier::new(m, budgets)?;
    let classes = (0..cfg.height)
        .into_par_iter()
        .flat_map_iter(|j| {
            let classifier = &classifier;
            (0..cfg.width).map(move |i| classifier.classify(cfg.pixel_center(i, j), cfg))
        })
        .collect();
    Ok(ClassGrid {
        width: cfg.width,
        height: cfg.height,
        classes,
    })
}

/// 8-bit RGB raster, row-major with row 0 on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl Image {
    pub fn get(&self, i: usize, j: usize) -> [u8; 3] {
        self.pixels[j * self.width + i]
    }

    /// Binary PPM (P6) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_ppm())?;
        Ok(())
    }
}

pub fn render_image(m: &RenormMap, cfg: &RenderConfig, budgets: &Budgets) -> Result<Image> {
    Ok(classify_grid(m, cfg, budgets)?.to_image())
}

pub const MARKER_COLOR: [u8; 3] = [255, 0, 255];

/// Stamps a plus-shaped marker at every root inside the region.
pub fn overlay_zeros(image: &mut Image, z: &ZeroSet, cfg: &RenderConfig) -> Result<()> {
    if image.width != cfg.width || image.height != cfg.height {
        return Err(Error::InvalidArgument(format!(
            "image is {}x{} but config is {}x{}",
            image.width, image.height, cfg.width, cfg.height
        )));
    }
    for &(r, _) in &z.roots {
        let Some((i, j)) = cfg.pixel_of(r) else {
            continue;
        };
        for (di, dj) in [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (x, y) = (i as isize + di, j as isize + dj);
            if x >= 0 && y >= 0 && (x as usize) < image.width && (y as usize) < image.height {
                image.pixels[y as usize * image.width + x as usize] = MARKER_COLOR;
            }
        }
    }
    Ok(())
}
