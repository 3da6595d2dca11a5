//! Square images, gradient fields, and the forward-difference gradient /
//! divergence pair used by total-variation denoising.
//!
//! Pixel `(k, l)` is row `k`, column `l`, stored row-major at `k * n + l`
//! (0-based). The first gradient component differences along rows (`k`),
//! the second along columns (`l`). The last row of the first component and
//! the last column of the second component are zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Result};
use crate::linop::LinearMap;

#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    n: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(n: usize, pixels: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("image side must be positive"));
        }
        check_len(n * n, pixels.len())?;
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(invalid("pixels must be finite"));
        }
        Ok(Self { n, pixels })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(n, vec![value; n * n])
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                pixels.push(f(k, l));
            }
        }
        Self::new(n, pixels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.pixels[k * self.n + l]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradField {
    n: usize,
    comp1: Vec<f64>,
    comp2: Vec<f64>,
}

impl GradField {
    pub fn new(n: usize, comp1: Vec<f64>, comp2: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("field side must be positive"));
        }
        check_len(n * n, comp1.len())?;
        check_len(n * n, comp2.len())?;
        if comp1.iter().chain(&comp2).any(|p| !p.is_finite()) {
            return Err(invalid("field entries must be finite"));
        }
        Ok(Self { n, comp1, comp2 })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            comp1: vec![0.0; n * n],
            comp2: vec![0.0; n * n],
        }
    }

    /// Splits a flat `[comp1 | comp2]` vector of length `2n²`.
    pub fn from_flat(n: usize, flat: &[f64]) -> Result<Self> {
        check_len(2 * n * n, flat.len())?;
        let (a, b) = flat.split_at(n * n);
        Self::new(n, a.to_vec(), b.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.comp1.len());
        out.extend_from_slice(&self.comp1);
        out.extend_from_slice(&self.comp2);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn comp1(&self) -> &[f64] {
        &self.comp1
    }

    pub fn comp2(&self) -> &[f64] {
        &self.comp2
    }

    /// `(η⁽¹⁾, η⁽²⁾)` at pixel `(k, l)`.
    pub fn pair(&self, k: usize, l: usize) -> (f64, f64) {
        let i = k * self.n + l;
        (self.comp1[i], self.comp2[i])
    }

    pub fn inner(&self, other: &GradField) -> f64 {
        crate::space::dot(&self.comp1, &other.comp1) + crate::space::dot(&self.comp2, &other.comp2)
    }
}

/// Forward differences with zero last row/column, written into a flat
/// `[comp1 | comp2]` buffer.
pub(crate) fn gradient_into(n: usize, x: &[f64], out: &mut [f64]) {
    let (g1, g2) = out.split_at_mut(n * n);
    for k in 0..n {
        for l in 0..n {
            let i = k * n + l;
            g1[i] = if k + 1 < n { x[i + n] - x[i] } else { 0.0 };
            g2[i] = if l + 1 < n { x[i + 1] - x[i] } else { 0.0 };
        }
    }
}

/// Backward differences with the boundary rules that make `-div` the exact
/// adjoint of the gradient.
pub(crate) fn divergence_into(n: usize, y: &[f64], out: &mut [f64]) {
    let (g1, g2) = y.split_at(n * n);
    if n == 1 {
        out[0] = 0.0;
        return;
    }
    for k in 0..n {
        for l in 0..n {
            let i = k * n + l;
            let d1 = if k == 0 {
                g1[i]
            } else if k + 1 < n {
                g1[i] - g1[i - n]
            } else {
                -g1[i - n]
            };
            let d2 = if l == 0 {
                g2[i]
            } else if l + 1 < n {
                g2[i] - g2[i - 1]
            } else {
                -g2[i - 1]
            };
            out[i] = d1 + d2;
        }
    }
}

pub fn discrete_gradient(x: &ImageGrid) -> GradField {
    let n = x.n;
    let mut flat = vec![0.0; 2 * n * n];
    gradient_into(n, &x.pixels, &mut flat);
    let comp2 = flat.split_off(n * n);
    GradField {
        n,
        comp1: flat,
        comp2,
    }
}

pub fn discrete_divergence(y: &GradField) -> ImageGrid {
    let n = y.n;
    let mut out = vec![0.0; n * n];
    divergence_into(n, &y.to_flat(), &mut out);
    ImageGrid { n, pixels: out }
}

/// `μ∇` as a linear map `ℝ^{n²} → ℝ^{2n²}`; its adjoint is `−μ div`.
#[derive(Debug, Clone, Copy)]
pub struct GradientMap {
    n: usize,
    scale: f64,
}

impl GradientMap {
    pub fn new(n: usize, scale: f64) -> Self {
        Self { n, scale }
    }
}

impl LinearMap for GradientMap {
    fn dim_in(&self) -> usize {
        self.n * self.n
    }
    fn dim_out(&self) -> usize {
        2 * self.n * self.n
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        gradient_into(self.n, x, out);
        if self.scale != 1.0 {
            out.iter_mut().for_each(|v| *v *= self.scale);
        }
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        divergence_into(self.n, y, out);
        let s = -self.scale;
        out.iter_mut().for_each(|v| *v *= s);
    }
    fn norm_hint(&self) -> Option<f64> {
        // ‖∇‖² ≤ 8
        Some(2.0 * core::f64::consts::SQRT_2 * self.scale.abs())
    }
}

/// The exponent `p` of the pixelwise norm in `tv_p`. Only the three values
/// whose dual-ball projections are exact are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TvNorm {
    /// Anisotropic: `|η⁽¹⁾| + |η⁽²⁾|`, dual ball is the unit ℓ∞ square.
    One,
    /// Isotropic: `√(η⁽¹⁾² + η⁽²⁾²)`, dual ball is the unit disc.
    Two,
    /// `max(|η⁽¹⁾|, |η⁽²⁾|)`, dual ball is the unit ℓ¹ diamond.
    Inf,
}

impl TvNorm {
    pub fn from_p(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(TvNorm::One)
        } else if p == 2.0 {
            Ok(TvNorm::Two)
        } else if p == f64::INFINITY {
            Ok(TvNorm::Inf)
        } else {
            Err(crate::Error::Catalog(alloc::format!(
                "no exact pair projection for p = {p}; use 1, 2 or inf"
            )))
        }
    }

    pub fn pair_norm(self, a: f64, b: f64) -> f64 {
        match self {
            TvNorm::One => a.abs() + b.abs(),
            TvNorm::Two => libm::hypot(a, b),
            TvNorm::Inf => a.abs().max(b.abs()),
        }
    }

    /// Projection of `(a, b)` onto the closed unit ball of the dual norm.
    /// Pairs already on the sphere up to rounding are returned unchanged, so
    /// projecting twice is exact.
    pub fn project_pair(self, a: f64, b: f64) -> (f64, f64) {
        let (c, d) = self.project_pair_raw(a, b);
        let moved = (a - c).abs().max((b - d).abs());
        if moved <= 4.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            (a, b)
        } else {
            (c, d)
        }
    }

    fn project_pair_raw(self, a: f64, b: f64) -> (f64, f64) {
        match self {
            TvNorm::One => (a / a.abs().max(1.0), b / b.abs().max(1.0)),
            TvNorm::Two => {
                let s = libm::hypot(a, b).max(1.0);
                (a / s, b / s)
            }
            TvNorm::Inf => {
                let (ua, ub) = (a.abs(), b.abs());
                if ua + ub <= 1.0 {
                    return (a, b);
                }
                // Two-entry sort-and-threshold.
                let (hi, lo) = if ua >= ub { (ua, ub) } else { (ub, ua) };
                let theta = if hi - lo >= 1.0 {
                    hi - 1.0
                } else {
                    (hi + lo - 1.0) / 2.0
                };
                let sa = (ua - theta).max(0.0).copysign(a);
                let sb = (ub - theta).max(0.0).copysign(b);
                (sa, sb)
            }
        }
    }
}

/// `tv_p(x) = Σ_{k,l} |(∇x)_{k,l}|_p`.
pub fn total_variation(x: &ImageGrid, p: TvNorm) -> f64 {
    let g = discrete_gradient(x);
    g.comp1
        .iter()
        .zip(&g.comp2)
        .map(|(a, b)| p.pair_norm(*a, *b))
        .sum()
}
