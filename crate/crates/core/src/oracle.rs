//! Brute-force and closed-form references for checking the solvers on small
//! instances.
//!
//! The grid oracles scan a box, then zoom in around the winner: each round
//! divides the step by 8 and rescans `±window` old steps around the current
//! best point. After `rounds` rounds the point is within `step / 8^rounds`
//! of the grid minimizer for convex objectives. Scalar scans finish with a
//! ternary search on the last cell.
//!
//! The other references are deliberately written without reusing the
//! solver's building blocks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, invalid, Error, Result};
use crate::image::ImageGrid;
use crate::prox::{ProxFunction, ScalarFun};
use crate::solver::ProblemInstance;
use crate::space::{Space, VecR};

pub const MAX_GRID_DIM: usize = 3;
pub const MAX_GRID_POINTS: usize = 10_000_000;
/// Refinement factor per round.
pub const ZOOM: f64 = 8.0;

/// A box `[lower, upper]` scanned at `step`, followed by `rounds` zoom
/// rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub step: f64,
    pub rounds: usize,
    /// Half-width of each zoom window, in steps of the previous level.
    pub window: usize,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, step: f64) -> Result<Self> {
        let gs = Self {
            lower,
            upper,
            step,
            rounds: 3,
            window: 2,
        };
        gs.validate()?;
        Ok(gs)
    }

    pub fn interval(lo: f64, hi: f64, step: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi], step)
    }

    pub fn cube(dim: usize, lo: f64, hi: f64, step: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], step)
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Spacing of the last zoom level.
    pub fn precision(&self) -> f64 {
        self.step / libm::pow(ZOOM, self.rounds as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.lower.len();
        if d == 0 || d > MAX_GRID_DIM {
            return Err(invalid(format!(
                "grid dimension must be 1..={MAX_GRID_DIM}, got {d}"
            )));
        }
        check_len(d, self.upper.len())?;
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(invalid("grid step must be positive"));
        }
        if self.window == 0 {
            return Err(invalid("zoom window must be positive"));
        }
        let mut total = 1usize;
        for (lo, hi) in self.lower.iter().zip(&self.upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!("bad grid range [{lo}, {hi}]")));
            }
            total = total.saturating_mul(axis_count(*lo, *hi, self.step));
        }
        if total > MAX_GRID_POINTS {
            return Err(invalid(format!(
                "grid has {total} points, the limit is {MAX_GRID_POINTS}"
            )));
        }
        Ok(())
    }
}

fn axis_count(lo: f64, hi: f64, step: f64) -> usize {
    libm::floor((hi - lo) / step + 1e-9) as usize + 1
}

/// Scans the lattice `lo + i·h` (clipped to `hi`) in lexicographic order and
/// returns the first point with the smallest value.
fn scan(
    obj: &mut impl FnMut(&[f64], f64) -> Result<f64>,
    lo: &[f64],
    hi: &[f64],
    h: f64,
    tol: f64,
) -> Result<(Vec<usize>, Vec<f64>, f64, Vec<usize>)> {
    let d = lo.len();
    let counts: Vec<usize> = (0..d).map(|i| axis_count(lo[i], hi[i], h)).collect();
    let mut idx = vec![0usize; d];
    let mut pt = lo.to_vec();
    let mut best = (idx.clone(), pt.clone(), f64::INFINITY);
    loop {
        for i in 0..d {
            pt[i] = (lo[i] + idx[i] as f64 * h).min(hi[i]);
        }
        let val = obj(&pt, tol)?;
        if val < best.2 {
            best = (idx.clone(), pt.clone(), val);
        }
        // odometer increment, last axis fastest
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok((best.0, best.1, best.2, counts));
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

const MAX_RECENTRE: usize = 256;

/// Scans the lattice of spacing `h` within `w` of `center`, clipped to the
/// grid box. The flag reports a winner on an unclipped window edge.
fn scan_around(
    obj: &mut impl FnMut(&[f64], f64) -> Result<f64>,
    gs: &GridSpec,
    center: &[f64],
    w: f64,
    h: f64,
    sd: f64,
) -> Result<(Vec<f64>, f64, bool)> {
    let d = center.len();
    let lo: Vec<f64> = (0..d).map(|i| (center[i] - w).max(gs.lower[i])).collect();
    let hi: Vec<f64> = (0..d).map(|i| (center[i] + w).min(gs.upper[i])).collect();
    let (idx, b, v, counts) = scan(obj, &lo, &hi, h, h * sd)?;
    let edge = (0..d).any(|i| {
        (idx[i] == 0 && lo[i] > gs.lower[i]) || (idx[i] + 1 == counts[i] && hi[i] < gs.upper[i])
    });
    Ok((b, v, edge))
}

/// Grid argmin of `obj(x, tol)` over the box of `gs`, where `tol` is the
/// current half-cell diagonal that indicator terms should accept as slack.
pub fn grid_argmin(
    gs: &GridSpec,
    mut obj: impl FnMut(&[f64], f64) -> Result<f64>,
) -> Result<Vec<f64>> {
    gs.validate()?;
    let d = gs.dim();
    let sd = libm::sqrt(d as f64);
    let (idx, mut best, mut val, counts) =
        scan(&mut obj, &gs.lower, &gs.upper, gs.step, gs.step * sd)?;
    if !val.is_finite() {
        return Err(invalid("the objective is infinite on the whole grid"));
    }
    for i in 0..d {
        if idx[i] == 0 || idx[i] + 1 == counts[i] {
            return Err(Error::RangeTooSmall { dim: i });
        }
    }
    let mut h = gs.step;
    for _ in 0..gs.rounds {
        let hf = h / ZOOM;
        let mut w = gs.window as f64 * h;
        // a finer level uses a tighter slack, so the old winner may lose its
        // value; widen the window until the fine lattice sees a feasible point
        let (mut b, mut v) = loop {
            let (b, v, _) = scan_around(&mut obj, gs, &best, w, hf, sd)?;
            if v.is_finite() || w >= 4.0 * gs.window as f64 * h * ZOOM {
                break (b, v);
            }
            w *= 2.0;
        };
        // follow narrow valleys: re-centre while the winner sits on the
        // window edge and strictly improves
        for _ in 0..MAX_RECENTRE {
            let (b2, v2, edge) =
                scan_around(&mut obj, gs, &b, gs.window as f64 * hf * ZOOM, hf, sd)?;
            let moved = v2 < v;
            if moved {
                b = b2;
                v = v2;
            }
            if !(moved && edge) {
                break;
            }
        }
        h = hf;
        best = b;
        val = v;
    }
    if !val.is_finite() {
        return Err(invalid("the zoomed grid lost every feasible point"));
    }
    polish(&mut obj, gs, best, val, h * sd)
}

const POLISH_RESTARTS: usize = 30;

/// Nelder–Mead from the grid winner, restarted until a restart stops
/// helping. A reshaping simplex can run along kinks that no lattice or axis
/// direction lines up with. Only strict improvements replace the winner.
fn polish(
    obj: &mut impl FnMut(&[f64], f64) -> Result<f64>,
    gs: &GridSpec,
    mut x: Vec<f64>,
    mut val: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let d = x.len();
    let mut eval = |p: &[f64]| -> Result<f64> {
        if (0..d).any(|i| p[i] < gs.lower[i] || p[i] > gs.upper[i]) {
            return Ok(f64::INFINITY);
        }
        obj(p, tol)
    };
    let mut size = gs.step;
    for _ in 0..POLISH_RESTARTS {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x.clone(), val)];
        for i in 0..d {
            let mut p = x.clone();
            p[i] += size;
            let v = eval(&p)?;
            simplex.push((p, v));
        }
        for _ in 0..400 * d {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[1..]
                .iter()
                .map(|(p, _)| dist_inf(p, &simplex[0].0))
                .fold(0.0, f64::max);
            let scale = 1.0
                + simplex[0]
                    .0
                    .iter()
                    .map(|t| libm::fabs(*t))
                    .fold(0.0, f64::max);
            if spread <= 1e-15 * scale {
                break;
            }
            let mut c = vec![0.0; d];
            for (p, _) in &simplex[..d] {
                for i in 0..d {
                    c[i] += p[i] / d as f64;
                }
            }
            let worst = simplex[d].clone();
            let along =
                |t: f64| -> Vec<f64> { (0..d).map(|i| c[i] + t * (worst.0[i] - c[i])).collect() };
            let r = along(-1.0);
            let fr = eval(&r)?;
            if fr < simplex[0].1 {
                let e = along(-2.0);
                let fe = eval(&e)?;
                simplex[d] = if fe < fr { (e, fe) } else { (r, fr) };
            } else if fr < simplex[d - 1].1 {
                simplex[d] = (r, fr);
            } else {
                let k = if fr < worst.1 {
                    along(-0.5)
                } else {
                    along(0.5)
                };
                let fk = eval(&k)?;
                if fk < fr.min(worst.1) {
                    simplex[d] = (k, fk);
                } else {
                    let best = simplex[0].0.clone();
                    for (p, v) in simplex.iter_mut().skip(1) {
                        for i in 0..d {
                            p[i] = 0.5 * (p[i] + best[i]);
                        }
                        *v = eval(p)?;
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (p, v) = simplex.swap_remove(0);
        if !(v < val) {
            break;
        }
        size = (2.0 * dist_inf(&p, &x)).max(gs.precision());
        x = p;
        val = v;
    }
    Ok(x)
}

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| libm::fabs(x - y))
        .fold(0.0, f64::max)
}

/// `argmin_y γφ(y) + ½(y − ξ)²` by grid search plus a final ternary search.
pub fn grid_argmin_scalar(phi: &ScalarFun, gamma: f64, xi: f64, gs: &GridSpec) -> Result<f64> {
    phi.validate()?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid("step must be positive"));
    }
    check_len(1, gs.dim())?;
    let obj = |y: f64| {
        let v = phi.value(y);
        if v == f64::INFINITY {
            v
        } else {
            gamma * v + 0.5 * (y - xi) * (y - xi)
        }
    };
    let best = grid_argmin(gs, |p, _| Ok(obj(p[0])))?[0];
    // ternary search on the last cell
    let h = gs.precision();
    let (mut a, mut b) = ((best - h).max(gs.lower[0]), (best + h).min(gs.upper[0]));
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        let (f1, f2) = (obj(m1), obj(m2));
        if f1.is_infinite() && f2.is_infinite() {
            break;
        }
        if f1 > f2 {
            a = m1;
        } else {
            b = m2;
        }
    }
    let polished = 0.5 * (a + b);
    Ok(if obj(polished) <= obj(best) {
        polished
    } else {
        best
    })
}

/// Grid argmin of `f(x) + g(Lx − r) + ½‖x − z‖²`. Indicator terms accept
/// points within the current cell diagonal (scaled by `‖L‖` for `g`).
pub fn primal_grid_oracle(p: &ProblemInstance, gs: &GridSpec) -> Result<VecR> {
    p.validate()?;
    let n = p.dim_primal();
    if n > MAX_GRID_DIM {
        return Err(invalid(format!(
            "the grid oracle handles at most {MAX_GRID_DIM} dimensions"
        )));
    }
    check_len(n, gs.dim())?;
    let lb = p.l.norm_bound();
    let z = p.z.as_slice();
    let r = p.r.as_slice();
    let mut w = vec![0.0; p.dim_dual()];
    let x = grid_argmin(gs, |x, tol| {
        p.l.apply(x, &mut w);
        for (wi, ri) in w.iter_mut().zip(r) {
            *wi -= ri;
        }
        let fx = p.f.value_tol(x, tol)?;
        if fx == f64::INFINITY {
            return Ok(fx);
        }
        let gx = p.g.value_tol(&w, tol * lb)?;
        let q: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok(fx + gx + 0.5 * q)
    })?;
    VecR::new(Space::Primal, x)
}

/// One step of the reference Dykstra-like scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct DykstraStep {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

/// The Dykstra-like scheme for `prox_{f+g}(z)`:
///
/// ```text
/// y₀ = z, q₀ = 0, p₀ = 0
/// xₙ   = prox_f(yₙ + qₙ)
/// qₙ₊₁ = yₙ + qₙ − xₙ
/// yₙ₊₁ = prox_g(xₙ + pₙ)
/// pₙ₊₁ = xₙ + pₙ − yₙ₊₁
/// ```
///
/// Returns `(xₙ, pₙ)` for `n = 0, …, iters − 1`.
pub fn dykstra_reference(
    f: &ProxFunction,
    g: &ProxFunction,
    z: &VecR,
    iters: usize,
) -> Result<Vec<DykstraStep>> {
    let n = z.len();
    check_len(n, f.dim())?;
    check_len(n, g.dim())?;
    let mut y = z.as_slice().to_vec();
    let mut q = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut out = Vec::with_capacity(iters);
    for _ in 0..iters {
        let yq: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let x = f.prox_vec(1.0, &yq)?;
        out.push(DykstraStep {
            x: x.clone(),
            p: p.clone(),
        });
        for i in 0..n {
            q[i] = yq[i] - x[i];
        }
        let xp: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        y = g.prox_vec(1.0, &xp)?;
        for i in 0..n {
            p[i] = xp[i] - y[i];
        }
    }
    Ok(out)
}

fn rows_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    if m == 0 {
        return Err(invalid("at least one row is required"));
    }
    let n = rows[0].len();
    for row in rows {
        check_len(n, row.len())?;
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

/// Solves `(S Sᵀ) y = b` by Cholesky, rejecting numerically singular Gram
/// matrices.
fn gram_solve(s: &DMatrix<f64>, b: &[f64]) -> Result<DVector<f64>> {
    let gram = s * s.transpose();
    let chol = nalgebra::linalg::Cholesky::new(gram)
        .ok_or_else(|| Error::Rank("the rows are linearly dependent".into()))?;
    let l = chol.l();
    let diag: Vec<f64> = (0..l.nrows()).map(|i| l[(i, i)]).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(dmin > 1e-7 * dmax) {
        return Err(Error::Rank("the rows are numerically dependent".into()));
    }
    Ok(chol.solve(&DVector::from_row_slice(b)))
}

/// `L*(LL*)⁻¹ρ` for `L x = (⟨x, sᵢ⟩)ᵢ`: the minimum-norm solution of
/// `⟨x, sᵢ⟩ = ρᵢ`.
pub fn min_norm_closed_form(s: &[Vec<f64>], rho: &[f64]) -> Result<VecR> {
    let sm = rows_matrix(s)?;
    check_len(sm.nrows(), rho.len())?;
    let y = gram_solve(&sm, rho)?;
    let x = sm.transpose() * y;
    VecR::new(Space::Primal, x.iter().cloned().collect())
}

/// Projection of `z` onto `{x : A x = c}`.
pub fn affine_projection(rows: &[Vec<f64>], c: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    let a = rows_matrix(rows)?;
    check_len(a.nrows(), c.len())?;
    check_len(a.ncols(), z.len())?;
    let zv = DVector::from_row_slice(z);
    let res: Vec<f64> = (&a * &zv).iter().zip(c).map(|(p, q)| p - q).collect();
    let y = gram_solve(&a, &res)?;
    let x = zv - a.transpose() * y;
    Ok(x.iter().cloned().collect())
}

/// Projection of `z` onto `{x : A x = c, ⟨x, u⟩ ≤ η}`: the affine projection
/// if it satisfies the inequality, otherwise the projection onto the affine
/// set with the inequality made active.
pub fn halfspace_affine_projection(
    u: &[f64],
    eta: f64,
    rows: &[Vec<f64>],
    c: &[f64],
    z: &[f64],
) -> Result<Vec<f64>> {
    let x = affine_projection(rows, c, z)?;
    let ux: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
    if ux <= eta {
        return Ok(x);
    }
    let mut all = rows.to_vec();
    all.push(u.to_vec());
    let mut rhs = c.to_vec();
    rhs.push(eta);
    affine_projection(&all, &rhs, z)
}

/// The fixed-point loop for isotropic TV denoising with no extra term,
/// written directly on `N×N` arrays:
///
/// ```text
/// x = z + μ div v
/// ζ = v + τ ∇x
/// v ← ζ / max{1, |ζ|₂}     (per pixel)
/// ```
///
/// Returns the dual iterates `v₁, …, v_iters`, each flattened as all first
/// components row by row followed by all second components.
pub fn chambolle_reference(z: &ImageGrid, mu: f64, tau: f64, iters: usize) -> Vec<Vec<f64>> {
    let n = z.n();
    let mut v1 = vec![vec![0.0; n]; n];
    let mut v2 = vec![vec![0.0; n]; n];
    let mut out = Vec::with_capacity(iters);
    for _ in 0..iters {
        // x = z + μ div v
        let mut x = vec![vec![0.0; n]; n];
        for k in 0..n {
            for l in 0..n {
                let d1 = if n == 1 {
                    0.0
                } else if k == 0 {
                    v1[k][l]
                } else if k == n - 1 {
                    -v1[k - 1][l]
                } else {
                    v1[k][l] - v1[k - 1][l]
                };
                let d2 = if n == 1 {
                    0.0
                } else if l == 0 {
                    v2[k][l]
                } else if l == n - 1 {
                    -v2[k][l - 1]
                } else {
                    v2[k][l] - v2[k][l - 1]
                };
                x[k][l] = z.get(k, l) + mu * (d1 + d2);
            }
        }
        for k in 0..n {
            for l in 0..n {
                let g1 = if k + 1 < n {
                    x[k + 1][l] - x[k][l]
                } else {
                    0.0
                };
                let g2 = if l + 1 < n {
                    x[k][l + 1] - x[k][l]
                } else {
                    0.0
                };
                let a = v1[k][l] + tau * g1;
                let b = v2[k][l] + tau * g2;
                let s = libm::sqrt(a * a + b * b).max(1.0);
                v1[k][l] = a / s;
                v2[k][l] = b / s;
            }
        }
        let mut flat = Vec::with_capacity(2 * n * n);
        flat.extend(v1.iter().flatten());
        flat.extend(v2.iter().flatten());
        out.push(flat);
    }
    out
}
