//! Linear operators between coordinate spaces, with adjoints and operator
//! norm bounds.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, invalid, Error, Result};
use crate::space::{dot, norm, norm_sq};

/// Safety factor applied on top of a power-iteration estimate.
pub const OPNORM_SAFETY: f64 = 1.05;

const DEFAULT_POWER_ITERS: usize = 200;
const DEFAULT_POWER_SEED: u64 = 0x5eed_0f_1ea5;

/// A linear map `ℝ^dim_in → ℝ^dim_out` together with its adjoint.
///
/// Implementations write into caller-provided buffers of exactly
/// `dim_out` (forward) and `dim_in` (adjoint) entries.
pub trait LinearMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]);

    /// An analytic upper bound on the operator norm, if one is known.
    fn norm_hint(&self) -> Option<f64> {
        None
    }

    /// Structural self-check. Maps built from user closures override this to
    /// verify that forward and adjoint produce vectors of the declared sizes.
    fn validate(&self) -> Result<()> {
        Ok(())
    }
}

/// A linear map paired with an upper bound on its norm.
#[derive(Clone)]
pub struct LinOp {
    map: Arc<dyn LinearMap>,
    norm_bound: f64,
}

impl fmt::Debug for LinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinOp")
            .field("dim_in", &self.dim_in())
            .field("dim_out", &self.dim_out())
            .field("norm_bound", &self.norm_bound)
            .finish()
    }
}

impl LinOp {
    /// Wraps `map`, taking the analytic norm hint when the map has one and a
    /// seeded power-iteration estimate otherwise.
    pub fn new<M: LinearMap + 'static>(map: M) -> Self {
        let norm_bound = match map.norm_hint() {
            Some(b) => b,
            None => estimate_opnorm(&map, DEFAULT_POWER_ITERS, DEFAULT_POWER_SEED),
        };
        Self {
            map: Arc::new(map),
            norm_bound,
        }
    }

    pub fn with_norm_bound<M: LinearMap + 'static>(map: M, norm_bound: f64) -> Result<Self> {
        if !(norm_bound.is_finite() && norm_bound >= 0.0) {
            return Err(invalid("norm bound must be finite and non-negative"));
        }
        Ok(Self {
            map: Arc::new(map),
            norm_bound,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Identity(n))
    }

    pub fn diagonal(d: Vec<f64>) -> Self {
        Self::new(Diagonal(d))
    }

    /// Dense operator whose rows are the given vectors, i.e.
    /// `x ↦ (⟨x, row_i⟩)_i`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::new(DenseMatrix::from_rows(rows)?))
    }

    pub fn map(&self) -> &dyn LinearMap {
        &*self.map
    }

    pub fn dim_in(&self) -> usize {
        self.map.dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.map.dim_out()
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.map.apply(x, out)
    }

    pub fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        self.map.apply_adjoint(y, out)
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_out()];
        self.map.apply(x, &mut out);
        out
    }

    pub fn adjoint_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_in()];
        self.map.apply_adjoint(y, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearMap for Identity {
    fn dim_in(&self) -> usize {
        self.0
    }
    fn dim_out(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
    fn norm_hint(&self) -> Option<f64> {
        Some(if self.0 == 0 { 0.0 } else { 1.0 })
    }
}

#[derive(Debug, Clone)]
pub struct Diagonal(pub Vec<f64>);

impl LinearMap for Diagonal {
    fn dim_in(&self) -> usize {
        self.0.len()
    }
    fn dim_out(&self) -> usize {
        self.0.len()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), d) in out.iter_mut().zip(x).zip(&self.0) {
            *o = d * xi;
        }
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        self.apply(y, out)
    }
    fn norm_hint(&self) -> Option<f64> {
        Some(self.0.iter().fold(0.0, |m, d| f64::max(m, d.abs())))
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len(cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }
}

impl LinearMap for DenseMatrix {
    fn dim_in(&self) -> usize {
        self.cols
    }
    fn dim_out(&self) -> usize {
        self.rows
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, yi) in y.iter().enumerate() {
            crate::space::axpy(*yi, self.row(i), out);
        }
    }
    fn norm_hint(&self) -> Option<f64> {
        Some(self.frobenius())
    }
}

type VecFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A map given by a pair of closures. Nothing ties the two closures together;
/// [`adjoint_consistency_check`] is the way to test that they are adjoint.
#[derive(Clone)]
pub struct FnMap {
    dim_in: usize,
    dim_out: usize,
    forward: Arc<VecFn>,
    adjoint: Arc<VecFn>,
}

impl FnMap {
    pub fn new<F, G>(dim_in: usize, dim_out: usize, forward: F, adjoint: G) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            dim_in,
            dim_out,
            forward: Arc::new(forward),
            adjoint: Arc::new(adjoint),
        }
    }
}

impl LinearMap for FnMap {
    fn dim_in(&self) -> usize {
        self.dim_in
    }
    fn dim_out(&self) -> usize {
        self.dim_out
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&(self.forward)(x));
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&(self.adjoint)(y));
    }
    fn validate(&self) -> Result<()> {
        let fwd = (self.forward)(&vec![0.0; self.dim_in]).len();
        if fwd != self.dim_out {
            return Err(Error::Structural(format!(
                "forward map returns {fwd} entries, declared {}",
                self.dim_out
            )));
        }
        let adj = (self.adjoint)(&vec![0.0; self.dim_out]).len();
        if adj != self.dim_in {
            return Err(Error::Structural(format!(
                "adjoint map returns {adj} entries, declared {}",
                self.dim_in
            )));
        }
        Ok(())
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Plain power iteration on `T*T`, returning `‖T x_k‖` for the final unit
/// iterate. The value is a Rayleigh-type lower estimate: it never exceeds
/// the true norm.
pub fn power_iteration_norm(t: &dyn LinearMap, iterations: usize, seed: u64) -> f64 {
    let n = t.dim_in();
    if n == 0 || t.dim_out() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_vec(&mut rng, n);
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut y = vec![0.0; t.dim_out()];
    let mut w = vec![0.0; n];
    for _ in 0..iterations.max(1) {
        t.apply(&x, &mut y);
        t.apply_adjoint(&y, &mut w);
        let nw = norm(&w);
        if nw == 0.0 || !nw.is_finite() {
            break;
        }
        for (xi, wi) in x.iter_mut().zip(&w) {
            *xi = wi / nw;
        }
    }
    t.apply(&x, &mut y);
    norm(&y)
}

/// Deterministic estimate of `‖T‖`: power iteration times
/// [`OPNORM_SAFETY`]. A zero operator yields 0, which the solver rejects.
pub fn estimate_opnorm(t: &dyn LinearMap, iterations: usize, seed: u64) -> f64 {
    power_iteration_norm(t, iterations, seed) * OPNORM_SAFETY
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointReport {
    /// `max |⟨Tx,y⟩ − ⟨x,T*y⟩| / (1 + ‖x‖‖y‖)` over all sampled pairs.
    pub max_defect: f64,
    pub pairs_checked: usize,
}

/// Samples `trials` seeded random pairs (plus all basis-vector pairs when the
/// spaces are small) and reports the worst adjointness defect.
pub fn adjoint_consistency_check(
    t: &dyn LinearMap,
    trials: usize,
    seed: u64,
) -> Result<AdjointReport> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    t.validate()?;
    let (n, m) = (t.dim_in(), t.dim_out());
    let mut tx = vec![0.0; m];
    let mut ty = vec![0.0; n];
    let mut worst = 0.0_f64;
    let mut pairs = 0;
    let mut check = |x: &[f64], y: &[f64], tx: &mut [f64], ty: &mut [f64]| {
        t.apply(x, tx);
        t.apply_adjoint(y, ty);
        let defect = (dot(tx, y) - dot(x, ty)).abs() / (1.0 + libm::sqrt(norm_sq(x) * norm_sq(y)));
        worst = worst.max(defect);
    };
    if n * m <= 64 {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; m];
        for i in 0..n {
            x.fill(0.0);
            x[i] = 1.0;
            for j in 0..m {
                y.fill(0.0);
                y[j] = 1.0;
                check(&x, &y, &mut tx, &mut ty);
                pairs += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x = random_vec(&mut rng, n);
        let y = random_vec(&mut rng, m);
        check(&x, &y, &mut tx, &mut ty);
        pairs += 1;
    }
    Ok(AdjointReport {
        max_defect: worst,
        pairs_checked: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm_estimate() {
        let est = estimate_opnorm(&Identity(5), 50, 1);
        assert!((1.0..=1.05 + 1e-12).contains(&est), "{est}");
    }

    #[test]
    fn diagonal_norm_estimate() {
        let est = estimate_opnorm(&Diagonal(vec![3.0, 1.0]), 100, 7);
        assert!((3.0 - 1e-9..=3.15 + 1e-12).contains(&est), "{est}");
    }

    #[test]
    fn zero_operator_estimates_zero() {
        let z = DenseMatrix::new(2, 3, vec![0.0; 6]).unwrap();
        assert_eq!(estimate_opnorm(&z, 10, 3), 0.0);
    }

    #[test]
    fn identity_is_self_adjoint() {
        let r = adjoint_consistency_check(&Identity(4), 20, 9).unwrap();
        assert_eq!(r.max_defect, 0.0);
    }

    #[test]
    fn dense_adjoint_is_transpose() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 0.5], vec![-1.0, 0.0, 4.0]]).unwrap();
        let r = adjoint_consistency_check(&a, 50, 2).unwrap();
        assert!(r.max_defect < 1e-14);
    }

    #[test]
    fn detects_wrong_adjoint() {
        let bad = FnMap::new(
            2,
            2,
            |x: &[f64]| vec![x[0], 2.0 * x[1]],
            |y: &[f64]| vec![y[0], 3.0 * y[1]],
        );
        let r = adjoint_consistency_check(&bad, 10, 4).unwrap();
        // On (e2, e2): |2 - 3| / (1 + 1) = 0.5.
        assert!(r.max_defect >= 0.2, "{}", r.max_defect);
    }

    #[test]
    fn mismatched_closure_dims_are_structural_errors() {
        let bad = FnMap::new(2, 3, |x: &[f64]| x.to_vec(), |y: &[f64]| y.to_vec());
        assert!(matches!(
            adjoint_consistency_check(&bad, 1, 0),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn estimate_never_exceeds_true_norm() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        // eigenvalues 3 and 1
        let raw = power_iteration_norm(&a, 100, 11);
        assert!(raw <= 3.0 + 1e-12 && raw > 2.999);
    }
}
