//! Total-variation denoising of square images:
//!
//! ```text
//! minimize f(x) + μ tv_p(x) + ½‖x − z‖²,   p ∈ {1, 2, ∞}
//! ```
//!
//! The dual variable is a gradient field constrained pixelwise to the unit
//! ball of the dual pair norm. In the generic form `L = μ∇`, `g = σ_{D_p}`,
//! and the step `τₙ` of the loop below is `μγₙ`.

use alloc::format;
use alloc::vec;

use crate::error::{check_len, invalid, Error, Result};
use crate::image::{
    divergence_into, gradient_into, total_variation, GradField, GradientMap, ImageGrid, TvNorm,
};
use crate::linop::LinOp;
use crate::prox::{ConvexSet, ProxFunction};
use crate::solver::{monitor_row, DualFBConfig, IterView, Monitor, ProblemInstance, SolveResult};
use crate::space::{all_finite, dist, norm, sq, Space, VecR};

use super::initial_dual;

#[derive(Debug, Clone)]
pub struct TvModel {
    pub z: ImageGrid,
    pub f: ProxFunction,
    pub mu: f64,
    pub p: TvNorm,
    problem: ProblemInstance,
}

impl TvModel {
    /// `p` must be 1, 2 or `f64::INFINITY`.
    pub fn new(z: ImageGrid, f: ProxFunction, mu: f64, p: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(invalid(format!("mu must be positive, got {mu}")));
        }
        let p = TvNorm::from_p(p)?;
        let n = z.n();
        check_len(n * n, f.dim())?;
        let l = LinOp::new(GradientMap::new(n, mu));
        let problem = ProblemInstance::new(
            f.clone(),
            ProxFunction::support(ConvexSet::pair_ball(n, p)?),
            l,
            VecR::primal(z.pixels().to_vec())?,
            VecR::zeros(Space::Dual, 2 * n * n),
        )?;
        Ok(Self {
            z,
            f,
            mu,
            p,
            problem,
        })
    }

    pub fn n(&self) -> usize {
        self.z.n()
    }

    /// `L = μ∇` with bound `2√2μ`, `g = σ_{D_p}`, `r = 0`.
    pub fn to_problem(&self) -> ProblemInstance {
        self.problem.clone()
    }

    /// `τ = 0.95·μ⁻¹/4` (stored as `γ = τ/μ`), `ε = 0.05·min{1, μ⁻¹/8}`,
    /// `λ = 1`.
    pub fn default_config(&self) -> DualFBConfig {
        let mu = self.mu;
        let mut cfg = DualFBConfig::new(&self.problem).with_gamma(0.95 / (4.0 * mu * mu));
        cfg.epsilon = 0.05 * (1.0f64).min(1.0 / (8.0 * mu));
        cfg
    }

    /// Checks `ε ∈ ]0, min{1, μ⁻¹/8}[`, `τₙ = μγₙ ∈ [ε, μ⁻¹/4 − ε]`,
    /// `λₙ ∈ [ε, 1]`.
    pub fn validate_config(&self, cfg: &DualFBConfig) -> Result<()> {
        let mu = self.mu;
        let eps = cfg.epsilon;
        let cap = (1.0f64).min(1.0 / (8.0 * mu));
        if !(eps > 0.0 && eps < cap) {
            return Err(Error::InvalidConfig(format!(
                "epsilon = {eps} must lie in ]0, {cap}["
            )));
        }
        let n = self.n();
        cfg.validate_common(n * n, 2 * n * n)?;
        cfg.gamma.check_box(
            "gamma",
            eps / mu,
            (1.0 / (4.0 * mu) - eps) / mu,
            cfg.max_iter,
        )?;
        cfg.lambda.check_box("lambda", eps, 1.0, cfg.max_iter)
    }
}

/// Pixelwise projection onto the unit ball of the dual pair norm.
pub fn project_dp(p: f64, y: &GradField) -> Result<GradField> {
    let norm = TvNorm::from_p(p)?;
    let (c1, c2): (alloc::vec::Vec<f64>, alloc::vec::Vec<f64>) = y
        .comp1()
        .iter()
        .zip(y.comp2())
        .map(|(a, b)| norm.project_pair(*a, *b))
        .unzip();
    GradField::new(y.n(), c1, c2)
}

/// `f(x) + μ tv_p(x) + ½‖x − z‖²`.
pub fn tv_objective(m: &TvModel, x: &ImageGrid) -> Result<f64> {
    check_len(m.n(), x.n())?;
    let fx = m.f.value(x.pixels())?;
    Ok(fx + m.mu * total_variation(x, m.p) + 0.5 * sq(dist(x.pixels(), m.z.pixels())))
}

pub fn tv_denoise(m: &TvModel, cfg: &DualFBConfig) -> Result<SolveResult> {
    tv_denoise_observed(m, cfg, |_| {})
}

/// ```text
/// xₙ   = prox_f(z + μ div vₙ) + bₙ
/// ζₙ   = vₙ + τₙ ∇xₙ
/// vₙ₊₁ = vₙ + λₙ(π_p(ζₙ) + aₙ − vₙ)
/// ```
///
/// with `π_p` the pixelwise projection and `τₙ = μγₙ`.
pub fn tv_denoise_observed(
    m: &TvModel,
    cfg: &DualFBConfig,
    mut observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    m.validate_config(cfg)?;
    let p = &m.problem;
    let n = m.n();
    let (nd, md) = (n * n, 2 * n * n);
    let mu = m.mu;
    let z = m.z.pixels();

    let mut v = initial_dual(cfg, md);
    let mut v_next = vec![0.0; md];
    let mut div = vec![0.0; nd];
    let mut u = vec![0.0; nd];
    let mut x_hat = vec![0.0; nd];
    let mut x = vec![0.0; nd];
    let mut grad = vec![0.0; md];
    let mut lx_hat = vec![0.0; md];
    let mut err = vec![0.0; md];
    let mut monitoring = cfg.monitor_objectives;
    let mut mon = Monitor::new(cfg);

    let mut it = 0;
    let termination = loop {
        let tau = mu * cfg.gamma.at(it);
        let lambda = cfg.lambda.at(it);
        divergence_into(n, &v, &mut div);
        for i in 0..nd {
            u[i] = z[i] + mu * div[i];
        }
        m.f.prox_into(1.0, &u, &mut x_hat)?;
        x.copy_from_slice(&x_hat);
        let perturbed = cfg.b_seq.is_active(it);
        cfg.b_seq.add_to(it, &mut x);
        if !all_finite(&x) {
            return Err(mon.diverged(it));
        }
        gradient_into(n, &x, &mut grad);
        err.iter_mut().for_each(|a| *a = 0.0);
        cfg.a_seq.add_to(it, &mut err);
        for i in 0..nd {
            let j = i + nd;
            let (q1, q2) = m.p.project_pair(v[i] + tau * grad[i], v[j] + tau * grad[j]);
            v_next[i] = v[i] + lambda * (q1 + err[i] - v[i]);
            v_next[j] = v[j] + lambda * (q2 + err[j] - v[j]);
        }
        if !all_finite(&v_next) {
            return Err(mon.diverged(it));
        }

        let change = dist(&v_next, &v);
        if monitoring {
            if perturbed {
                gradient_into(n, &x_hat, &mut lx_hat);
            } else {
                lx_hat.copy_from_slice(&grad);
            }
            lx_hat.iter_mut().for_each(|a| *a *= mu);
        }
        let row = monitor_row(&mut monitoring, p, &u, &x_hat, &lx_hat, &v, it, change)?;
        observer(&IterView {
            n: it,
            x: &x,
            v: &v,
            v_next: &v_next,
            row: &row,
        });
        let stop = mon.record(row, norm(&v));
        core::mem::swap(&mut v, &mut v_next);
        it += 1;
        if let Some(t) = stop {
            break t;
        }
    };

    divergence_into(n, &v, &mut div);
    for i in 0..nd {
        u[i] = z[i] + mu * div[i];
    }
    m.f.prox_into(1.0, &u, &mut x)?;
    Ok(mon.finish(
        VecR::from_raw(Space::Primal, x),
        VecR::from_raw(Space::Dual, v),
        termination,
    ))
}
