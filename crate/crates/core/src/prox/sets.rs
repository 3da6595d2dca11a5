//! Closed convex sets with exact projectors and support functions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, invalid, Error, Result};
use crate::image::TvNorm;
use crate::space::{dist, dot, norm, norm_sq, sq};

/// Relative tolerance used for membership tests and for the finite/infinite
/// decision in support functions of unbounded sets.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

fn rel_tol(scale: f64) -> f64 {
    MEMBERSHIP_TOL * scale.max(1.0)
}

/// `{x : A x = c}` with `A` of full row rank. The Cholesky factor of `A Aᵀ`
/// is computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSet {
    rows: Vec<Vec<f64>>,
    c: Vec<f64>,
    chol: DMatrix<f64>,
}

impl AffineSet {
    pub fn new(rows: Vec<Vec<f64>>, c: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid("affine set needs at least one equation"));
        }
        check_len(rows.len(), c.len())?;
        let n = rows[0].len();
        if n == 0 {
            return Err(invalid("affine set in a zero-dimensional space"));
        }
        for r in &rows {
            check_len(n, r.len())?;
        }
        if rows.iter().flatten().chain(&c).any(|v| !v.is_finite()) {
            return Err(invalid("affine set data must be finite"));
        }
        let m = rows.len();
        let gram = DMatrix::from_fn(m, m, |i, j| dot(&rows[i], &rows[j]));
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::Structural("affine set: A has dependent rows".into()))?;
        let l = chol.l();
        let diag: Vec<f64> = (0..m).map(|i| l[(i, i)] * l[(i, i)]).collect();
        let dmax = diag.iter().cloned().fold(0.0, f64::max);
        let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(dmin > 1e-12 * dmax) {
            return Err(Error::Structural(format!(
                "affine set: A is numerically rank deficient (pivot ratio {:e})",
                dmin / dmax
            )));
        }
        Ok(Self { rows, c, chol: l })
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.c
    }

    /// Solves `(A Aᵀ) y = b` with the stored factor.
    fn gram_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = DVector::from_column_slice(b);
        self.chol.solve_lower_triangular_mut(&mut y);
        self.chol.tr_solve_lower_triangular_mut(&mut y);
        y.iter().cloned().collect()
    }

    fn project_into(&self, x: &[f64], out: &mut [f64]) {
        let resid: Vec<f64> = self
            .rows
            .iter()
            .zip(&self.c)
            .map(|(r, c)| dot(r, x) - c)
            .collect();
        let y = self.gram_solve(&resid);
        out.copy_from_slice(x);
        for (r, yi) in self.rows.iter().zip(&y) {
            crate::space::axpy(-yi, r, out);
        }
    }

    /// `σ(u) = ⟨x₀, u⟩` when `u ∈ range Aᵀ`, `+∞` otherwise.
    fn support(&self, u: &[f64]) -> f64 {
        let au: Vec<f64> = self.rows.iter().map(|r| dot(r, u)).collect();
        let y = self.gram_solve(&au);
        let mut back = vec![0.0; u.len()];
        for (r, yi) in self.rows.iter().zip(&y) {
            crate::space::axpy(*yi, r, &mut back);
        }
        if dist(&back, u) <= rel_tol(norm(u)) {
            dot(&y, &self.c)
        } else {
            f64::INFINITY
        }
    }
}

/// Span of orthonormal vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSet {
    dim: usize,
    basis: Vec<Vec<f64>>,
}

impl SubspaceSet {
    pub fn new(dim: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("subspace of a zero-dimensional space"));
        }
        for b in &basis {
            check_len(dim, b.len())?;
        }
        check_orthonormal(&basis)?;
        Ok(Self { dim, basis })
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }
}

pub(crate) fn check_orthonormal(basis: &[Vec<f64>]) -> Result<()> {
    for (i, a) in basis.iter().enumerate() {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(invalid("basis vectors must be finite"));
        }
        for (j, b) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            let defect = (dot(a, b) - target).abs();
            if defect > 1e-10 {
                return Err(Error::Structural(format!(
                    "basis is not orthonormal: <o{i}, o{j}> off by {defect:e}"
                )));
            }
        }
    }
    Ok(())
}

const SNAP: f64 = 16.0 * f64::EPSILON;

/// Nonempty closed convex subsets of `ℝ^d` with exact projectors.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    /// `[lo, hi] ⊂ ℝ`; endpoints may be infinite.
    Interval {
        lo: f64,
        hi: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `{x : ⟨x, u⟩ ≤ eta}` with `u ≠ 0`.
    Halfspace {
        u: Vec<f64>,
        eta: f64,
    },
    Affine(AffineSet),
    L2Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Centered at the origin.
    LinfBall {
        dim: usize,
        radius: f64,
    },
    /// Centered at the origin.
    L1Ball {
        dim: usize,
        radius: f64,
    },
    Subspace(SubspaceSet),
    Whole {
        dim: usize,
    },
    Singleton {
        c: Vec<f64>,
    },
    NonnegOrthant {
        dim: usize,
    },
    /// Product over the `n²` pixels of unit balls of the norm dual to `norm`
    /// on pixel pairs. Vectors use the flat `[comp1 | comp2]` layout.
    PairBall {
        n: usize,
        norm: TvNorm,
    },
}

impl ConvexSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        let s = ConvexSet::Interval { lo, hi };
        s.validate()?;
        Ok(s)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let s = ConvexSet::Box { lo, hi };
        s.validate()?;
        Ok(s)
    }

    pub fn halfspace(u: Vec<f64>, eta: f64) -> Result<Self> {
        let s = ConvexSet::Halfspace { u, eta };
        s.validate()?;
        Ok(s)
    }

    pub fn affine(rows: Vec<Vec<f64>>, c: Vec<f64>) -> Result<Self> {
        Ok(ConvexSet::Affine(AffineSet::new(rows, c)?))
    }

    pub fn l2_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let s = ConvexSet::L2Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn linf_ball(dim: usize, radius: f64) -> Result<Self> {
        let s = ConvexSet::LinfBall { dim, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn l1_ball(dim: usize, radius: f64) -> Result<Self> {
        let s = ConvexSet::L1Ball { dim, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn subspace(dim: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        Ok(ConvexSet::Subspace(SubspaceSet::new(dim, basis)?))
    }

    pub fn whole(dim: usize) -> Result<Self> {
        let s = ConvexSet::Whole { dim };
        s.validate()?;
        Ok(s)
    }

    pub fn singleton(c: Vec<f64>) -> Result<Self> {
        let s = ConvexSet::Singleton { c };
        s.validate()?;
        Ok(s)
    }

    pub fn nonneg_orthant(dim: usize) -> Result<Self> {
        let s = ConvexSet::NonnegOrthant { dim };
        s.validate()?;
        Ok(s)
    }

    pub fn pair_ball(n: usize, norm: TvNorm) -> Result<Self> {
        let s = ConvexSet::PairBall { n, norm };
        s.validate()?;
        Ok(s)
    }

    /// Checks nonemptiness and parameter ranges. The constructors call this;
    /// it is public because the variants can also be built directly.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ConvexSet::Interval { lo, hi } => {
                if lo.is_nan()
                    || hi.is_nan()
                    || lo > hi
                    || *lo == f64::INFINITY
                    || *hi == f64::NEG_INFINITY
                {
                    return Err(invalid(format!("empty or malformed interval [{lo}, {hi}]")));
                }
            }
            ConvexSet::Box { lo, hi } => {
                if lo.is_empty() {
                    return Err(invalid("box in a zero-dimensional space"));
                }
                check_len(lo.len(), hi.len())?;
                for (a, b) in lo.iter().zip(hi) {
                    ConvexSet::Interval { lo: *a, hi: *b }.validate()?;
                }
            }
            ConvexSet::Halfspace { u, eta } => {
                if u.is_empty() || !finite(u) || !eta.is_finite() {
                    return Err(invalid("halfspace data must be finite and nonempty"));
                }
                if norm_sq(u) == 0.0 {
                    return Err(invalid("halfspace normal must be nonzero"));
                }
            }
            ConvexSet::Affine(_) | ConvexSet::Subspace(_) => {}
            ConvexSet::L2Ball { center, radius } => {
                if center.is_empty() || !finite(center) {
                    return Err(invalid("ball center must be finite and nonempty"));
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(invalid("ball radius must be finite and non-negative"));
                }
            }
            ConvexSet::LinfBall { dim, radius } | ConvexSet::L1Ball { dim, radius } => {
                if *dim == 0 {
                    return Err(invalid("ball in a zero-dimensional space"));
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(invalid("ball radius must be finite and non-negative"));
                }
            }
            ConvexSet::Whole { dim } | ConvexSet::NonnegOrthant { dim } => {
                if *dim == 0 {
                    return Err(invalid("set in a zero-dimensional space"));
                }
            }
            ConvexSet::Singleton { c } => {
                if c.is_empty() || !finite(c) {
                    return Err(invalid("singleton point must be finite and nonempty"));
                }
            }
            ConvexSet::PairBall { n, .. } => {
                if *n == 0 {
                    return Err(invalid("pair ball over an empty image"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Interval { .. } => 1,
            ConvexSet::Box { lo, .. } => lo.len(),
            ConvexSet::Halfspace { u, .. } => u.len(),
            ConvexSet::Affine(a) => a.dim(),
            ConvexSet::L2Ball { center, .. } => center.len(),
            ConvexSet::LinfBall { dim, .. }
            | ConvexSet::L1Ball { dim, .. }
            | ConvexSet::Whole { dim }
            | ConvexSet::NonnegOrthant { dim } => *dim,
            ConvexSet::Subspace(s) => s.dim,
            ConvexSet::Singleton { c } => c.len(),
            ConvexSet::PairBall { n, .. } => 2 * n * n,
        }
    }

    /// Writes `P_C x` into `out`. Both slices must have length `dim()`.
    ///
    /// A result within a few ulps of `x` is replaced by `x` itself, so that
    /// projecting twice gives bitwise the same point.
    pub fn project_into(&self, x: &[f64], out: &mut [f64]) {
        self.project_raw(x, out);
        // max-norms, which cannot overflow
        let moved = x
            .iter()
            .zip(out.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let size = x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if moved <= SNAP * (1.0 + size) {
            out.copy_from_slice(x);
        }
    }

    fn project_raw(&self, x: &[f64], out: &mut [f64]) {
        match self {
            ConvexSet::Interval { lo, hi } => out[0] = x[0].clamp(*lo, *hi),
            ConvexSet::Box { lo, hi } => {
                for i in 0..x.len() {
                    out[i] = x[i].clamp(lo[i], hi[i]);
                }
            }
            ConvexSet::Halfspace { u, eta } => {
                let excess = dot(x, u) - eta;
                out.copy_from_slice(x);
                if excess > 0.0 {
                    crate::space::axpy(-excess / norm_sq(u), u, out);
                }
            }
            ConvexSet::Affine(a) => a.project_into(x, out),
            ConvexSet::L2Ball { center, radius } => {
                let d = dist(x, center);
                if d <= *radius {
                    out.copy_from_slice(x);
                } else {
                    let s = radius / d;
                    for i in 0..x.len() {
                        out[i] = center[i] + s * (x[i] - center[i]);
                    }
                }
            }
            ConvexSet::LinfBall { radius, .. } => {
                for i in 0..x.len() {
                    out[i] = x[i].clamp(-radius, *radius);
                }
            }
            ConvexSet::L1Ball { radius, .. } => project_l1_ball(x, *radius, out),
            ConvexSet::Subspace(s) => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for o in &s.basis {
                    crate::space::axpy(dot(x, o), o, out);
                }
            }
            ConvexSet::Whole { .. } => out.copy_from_slice(x),
            ConvexSet::Singleton { c } => out.copy_from_slice(c),
            ConvexSet::NonnegOrthant { .. } => {
                for i in 0..x.len() {
                    out[i] = x[i].max(0.0);
                }
            }
            ConvexSet::PairBall { n, norm } => {
                let m = n * n;
                for i in 0..m {
                    let (a, b) = norm.project_pair(x[i], x[m + i]);
                    out[i] = a;
                    out[m + i] = b;
                }
            }
        }
    }

    pub fn project_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.project_into(x, &mut out);
        out
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            ConvexSet::Whole { .. } => 0.0,
            ConvexSet::Singleton { c } => dist(x, c),
            _ => dist(x, &self.project_vec(x)),
        }
    }

    /// Membership up to `tol` in the Euclidean distance.
    pub fn contains_tol(&self, x: &[f64], tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Membership up to the default relative tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_tol(x, rel_tol(norm(x)))
    }

    /// `σ_C(u) = sup_{x ∈ C} ⟨x, u⟩`, possibly `+∞`.
    pub fn support(&self, u: &[f64]) -> f64 {
        let nu = norm(u);
        let tol = rel_tol(nu);
        match self {
            ConvexSet::Interval { lo, hi } => interval_support(*lo, *hi, u[0]),
            ConvexSet::Box { lo, hi } => (0..u.len())
                .map(|i| interval_support(lo[i], hi[i], u[i]))
                .sum(),
            ConvexSet::Halfspace { u: a, eta } => {
                let t = dot(u, a) / norm_sq(a);
                let mut resid = u.to_vec();
                crate::space::axpy(-t, a, &mut resid);
                if norm(&resid) <= tol && t >= -tol {
                    eta * t.max(0.0)
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet::Affine(a) => a.support(u),
            ConvexSet::L2Ball { center, radius } => dot(center, u) + radius * nu,
            ConvexSet::LinfBall { radius, .. } => radius * u.iter().map(|v| v.abs()).sum::<f64>(),
            ConvexSet::L1Ball { radius, .. } => {
                radius * u.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
            }
            ConvexSet::Subspace(s) => {
                let inside: f64 = s.basis.iter().map(|o| sq(dot(u, o))).sum();
                if libm::sqrt(inside) <= tol {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet::Whole { .. } => {
                if nu <= MEMBERSHIP_TOL {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet::Singleton { c } => dot(c, u),
            ConvexSet::NonnegOrthant { .. } => {
                if u.iter().all(|v| *v <= tol) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet::PairBall { n, norm } => {
                let m = n * n;
                (0..m).map(|i| norm.pair_norm(u[i], u[m + i])).sum()
            }
        }
    }

    /// `γ C` for `γ > 0`. `PairBall` has no scaled representation and is
    /// returned as is; check `is_scale_exact` first.
    pub(crate) fn scaled(&self, g: f64) -> ConvexSet {
        let sv = |v: &[f64]| v.iter().map(|a| a * g).collect::<Vec<_>>();
        match self {
            ConvexSet::Interval { lo, hi } => ConvexSet::Interval {
                lo: lo * g,
                hi: hi * g,
            },
            ConvexSet::Box { lo, hi } => ConvexSet::Box {
                lo: sv(lo),
                hi: sv(hi),
            },
            ConvexSet::Halfspace { u, eta } => ConvexSet::Halfspace {
                u: u.clone(),
                eta: eta * g,
            },
            ConvexSet::Affine(a) => ConvexSet::Affine(AffineSet {
                rows: a.rows.clone(),
                c: sv(&a.c),
                chol: a.chol.clone(),
            }),
            ConvexSet::L2Ball { center, radius } => ConvexSet::L2Ball {
                center: sv(center),
                radius: radius * g,
            },
            ConvexSet::LinfBall { dim, radius } => ConvexSet::LinfBall {
                dim: *dim,
                radius: radius * g,
            },
            ConvexSet::L1Ball { dim, radius } => ConvexSet::L1Ball {
                dim: *dim,
                radius: radius * g,
            },
            ConvexSet::Singleton { c } => ConvexSet::Singleton { c: sv(c) },
            ConvexSet::Subspace(_)
            | ConvexSet::Whole { .. }
            | ConvexSet::NonnegOrthant { .. }
            | ConvexSet::PairBall { .. } => self.clone(),
        }
    }

    pub(crate) fn is_scale_exact(&self) -> bool {
        !matches!(self, ConvexSet::PairBall { .. })
    }

    /// `P_{γC} x`, computed exactly.
    pub(crate) fn project_scaled_into(&self, g: f64, x: &[f64], out: &mut [f64]) {
        if g == 1.0 {
            self.project_into(x, out);
        } else if self.is_scale_exact() {
            self.scaled(g).project_into(x, out);
        } else {
            let xs: Vec<f64> = x.iter().map(|v| v / g).collect();
            self.project_into(&xs, out);
            out.iter_mut().for_each(|v| *v *= g);
        }
    }
}

fn interval_support(lo: f64, hi: f64, u: f64) -> f64 {
    if u > 0.0 {
        hi * u
    } else if u < 0.0 {
        lo * u
    } else {
        0.0
    }
}

/// Euclidean projection onto `{x : ‖x‖₁ ≤ radius}` by sorting magnitudes and
/// finding the soft-threshold level.
pub fn project_l1_ball(x: &[f64], radius: f64, out: &mut [f64]) {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        out.copy_from_slice(x);
        return;
    }
    if radius == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, m) in mags.iter().enumerate() {
        cum += m;
        let t = (cum - radius) / (j + 1) as f64;
        if *m > t {
            theta = t;
        } else {
            break;
        }
    }
    for (o, v) in out.iter_mut().zip(x) {
        *o = (v.abs() - theta).max(0.0).copysign(*v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_ball_radial_scaling() {
        let c = ConvexSet::l2_ball(vec![0.0, 0.0], 1.0).unwrap();
        let p = c.project_vec(&[3.0, 4.0]);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn interval_clamps() {
        let c = ConvexSet::interval(-1.0, 1.0).unwrap();
        assert_eq!(c.project_vec(&[-7.0]), vec![-1.0]);
    }

    #[test]
    fn l1_ball_symmetric_case() {
        let c = ConvexSet::l1_ball(2, 1.0).unwrap();
        let p = c.project_vec(&[0.8, 0.8]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn l1_ball_sparse_case() {
        let mut out = [0.0; 3];
        project_l1_ball(&[3.0, -0.2, 0.1], 1.0, &mut out);
        assert_eq!(out, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn halfspace_projection() {
        let c = ConvexSet::halfspace(vec![1.0, 1.0], 0.0).unwrap();
        assert_eq!(c.project_vec(&[1.0, 1.0]), vec![0.0, 0.0]);
        assert_eq!(c.project_vec(&[-1.0, 0.5]), vec![-1.0, 0.5]);
    }

    #[test]
    fn affine_projection_and_rank_check() {
        let a = ConvexSet::affine(vec![vec![1.0, 1.0, 0.0]], vec![1.0]).unwrap();
        let p = a.project_vec(&[0.0, 0.0, 5.0]);
        assert!((p[0] - 0.5).abs() < 1e-14 && (p[1] - 0.5).abs() < 1e-14 && p[2] == 5.0);
        let bad = ConvexSet::affine(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![0.0, 0.0]);
        assert!(matches!(bad, Err(Error::Structural(_))));
    }

    #[test]
    fn support_functions() {
        let i = ConvexSet::interval(-1.0, 2.0).unwrap();
        assert_eq!(i.support(&[3.0]), 6.0);
        assert_eq!(i.support(&[-3.0]), 3.0);
        let h = ConvexSet::halfspace(vec![1.0, 0.0], 2.0).unwrap();
        assert_eq!(h.support(&[3.0, 0.0]), 6.0);
        assert_eq!(h.support(&[0.0, 1.0]), f64::INFINITY);
        assert_eq!(h.support(&[-1.0, 0.0]), f64::INFINITY);
        let o = ConvexSet::nonneg_orthant(2).unwrap();
        assert_eq!(o.support(&[-1.0, 0.0]), 0.0);
        assert_eq!(o.support(&[1.0, 0.0]), f64::INFINITY);
        let a = ConvexSet::affine(vec![vec![1.0, 1.0]], vec![2.0]).unwrap();
        assert!((a.support(&[3.0, 3.0]) - 6.0).abs() < 1e-12);
        assert_eq!(a.support(&[1.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn scaled_projection_matches_rescaling() {
        let sets = [
            ConvexSet::l2_ball(vec![1.0, -1.0], 0.5).unwrap(),
            ConvexSet::halfspace(vec![1.0, 2.0], 0.3).unwrap(),
            ConvexSet::affine(vec![vec![1.0, 2.0]], vec![0.7]).unwrap(),
            ConvexSet::pair_ball(1, TvNorm::Two).unwrap(),
        ];
        let x = [0.9, 2.3];
        for s in &sets {
            let mut a = [0.0; 2];
            s.project_scaled_into(2.5, &x, &mut a);
            let b: Vec<f64> = s
                .project_vec(&[x[0] / 2.5, x[1] / 2.5])
                .iter()
                .map(|v| v * 2.5)
                .collect();
            assert!(dist(&a, &b) < 1e-14, "{s:?}");
        }
    }

    #[test]
    fn empty_sets_are_rejected() {
        assert!(ConvexSet::interval(1.0, 0.0).is_err());
        assert!(ConvexSet::halfspace(vec![0.0, 0.0], 1.0).is_err());
        assert!(ConvexSet::l2_ball(vec![0.0], -1.0).is_err());
    }
}
