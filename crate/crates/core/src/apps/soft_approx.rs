//! Soft best approximation, where both constraints become penalties on the
//! distance to the set:
//!
//! ```text
//! minimize φ(d_C(x)) + ψ(d_D(Lx − r)) + ½‖x − z‖²
//! ```

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Error, Result};
use crate::linop::LinOp;
use crate::prox::{ConvexSet, ProxFunction, ScalarFun};
use crate::solver::{
    monitor_row, solve_dual_fb, DualFBConfig, IterView, Monitor, ProblemInstance, SolveResult,
};
use crate::space::{all_finite, dist, norm, norm_sq, Space, VecR};

use super::initial_dual;

#[derive(Debug, Clone)]
pub struct SoftApproxModel {
    pub c: ConvexSet,
    pub d: ConvexSet,
    pub l: LinOp,
    pub r: VecR,
    pub z: VecR,
    pub phi: ScalarFun,
    pub psi: ScalarFun,
    problem: ProblemInstance,
}

fn check_penalty(name: &str, f: &ScalarFun) -> Result<f64> {
    f.validate()?;
    if !f.is_even() {
        return Err(Error::Catalog(format!("{name} must be even")));
    }
    if f.is_zero_indicator() {
        return Err(Error::Catalog(format!(
            "{name} must not be the indicator of {{0}}"
        )));
    }
    f.max_subdiff_at_zero()
}

impl SoftApproxModel {
    /// `φ` and `ψ` must be even and not `ι_{0}`. The caller asserts the
    /// qualification condition.
    pub fn new(
        c: ConvexSet,
        d: ConvexSet,
        l: LinOp,
        r: VecR,
        z: VecR,
        phi: ScalarFun,
        psi: ScalarFun,
    ) -> Result<Self> {
        check_penalty("phi", &phi)?;
        check_penalty("psi", &psi)?;
        let problem = ProblemInstance::new(
            ProxFunction::phi_of_dist(phi.clone(), c.clone())?,
            ProxFunction::phi_of_dist(psi.clone(), d.clone())?,
            l.clone(),
            z.clone(),
            r.clone(),
        )?;
        Ok(Self {
            c,
            d,
            l,
            r,
            z,
            phi,
            psi,
            problem,
        })
    }

    /// `f = φ ∘ d_C`, `g = ψ ∘ d_D`.
    pub fn to_problem(&self) -> ProblemInstance {
        self.problem.clone()
    }
}

pub fn soft_best_approx(m: &SoftApproxModel, cfg: &DualFBConfig) -> Result<SolveResult> {
    soft_best_approx_observed(m, cfg, |_| {})
}

/// `prox_{φ∘d_C}(y)` with `max ∂φ(0) = m_phi`.
fn prox_phi_dist(c: &ConvexSet, phi: &ScalarFun, m_phi: f64, y: &[f64], out: &mut [f64]) {
    c.project_into(y, out);
    let d = dist(y, out);
    if d > m_phi {
        // prox_{φ*}(d) / d
        let t = (d - phi.prox_raw(1.0, d)) / d;
        for (o, yi) in out.iter_mut().zip(y) {
            *o = yi + t * (*o - yi);
        }
    } else if d == 0.0 {
        out.copy_from_slice(y);
    }
}

/// ```text
/// yₙ = z − L*vₙ
/// xₙ = yₙ + (prox_{φ*}(d_C(yₙ)) / d_C(yₙ)) (P_C yₙ − yₙ) + bₙ   if d_C(yₙ) > max ∂φ(0)
///      P_C yₙ + bₙ                                                 otherwise
/// wₙ = vₙ/γₙ + L xₙ − r
/// pₙ = (prox_{(ψ/γₙ)*}(d_D(wₙ)) / d_D(wₙ)) (wₙ − P_D wₙ)          if d_D(wₙ) > max ∂ψ(0)/γₙ
///      wₙ − P_D wₙ                                                  otherwise
/// vₙ₊₁ = vₙ + λₙ(γₙ pₙ + aₙ − vₙ)
/// ```
pub fn soft_best_approx_observed(
    m: &SoftApproxModel,
    cfg: &DualFBConfig,
    mut observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    let p = &m.problem;
    cfg.validate(p)?;
    let (nd, md) = (p.dim_primal(), p.dim_dual());
    let (z, r) = (m.z.as_slice(), m.r.as_slice());
    let m_phi = m.phi.max_subdiff_at_zero()?;
    let m_psi = m.psi.max_subdiff_at_zero()?;

    let mut v = initial_dual(cfg, md);
    let mut v_next = vec![0.0; md];
    let mut y = vec![0.0; nd];
    let mut x_hat = vec![0.0; nd];
    let mut x = vec![0.0; nd];
    let mut lx = vec![0.0; md];
    let mut lx_hat = vec![0.0; md];
    let mut w = vec![0.0; md];
    let mut pw = vec![0.0; md];
    let mut monitoring = cfg.monitor_objectives;
    let mut mon = Monitor::new(cfg);

    let mut it = 0;
    let termination = loop {
        let gamma = cfg.gamma.at(it);
        let lambda = cfg.lambda.at(it);
        m.l.apply_adjoint(&v, &mut y);
        for (yi, zi) in y.iter_mut().zip(z) {
            *yi = zi - *yi;
        }
        prox_phi_dist(&m.c, &m.phi, m_phi, &y, &mut x_hat);
        x.copy_from_slice(&x_hat);
        let perturbed = cfg.b_seq.is_active(it);
        cfg.b_seq.add_to(it, &mut x);
        if !all_finite(&x) {
            return Err(mon.diverged(it));
        }
        m.l.apply(&x, &mut lx);
        for i in 0..md {
            w[i] = v[i] / gamma + lx[i] - r[i];
        }
        m.d.project_into(&w, &mut pw);
        let dd = dist(&w, &pw);
        let s = if dd > m_psi / gamma {
            (dd - m.psi.prox_raw(1.0 / gamma, dd)) / dd
        } else {
            1.0
        };
        for i in 0..md {
            v_next[i] = gamma * s * (w[i] - pw[i]);
        }
        cfg.a_seq.add_to(it, &mut v_next);
        for i in 0..md {
            v_next[i] = v[i] + lambda * (v_next[i] - v[i]);
        }
        if !all_finite(&v_next) {
            return Err(mon.diverged(it));
        }

        let change = dist(&v_next, &v);
        let lxh: &[f64] = if perturbed && monitoring {
            m.l.apply(&x_hat, &mut lx_hat);
            &lx_hat
        } else {
            &lx
        };
        let row = monitor_row(&mut monitoring, p, &y, &x_hat, lxh, &v, it, change)?;
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

    m.l.apply_adjoint(&v, &mut y);
    for (yi, zi) in y.iter_mut().zip(z) {
        *yi = zi - *yi;
    }
    prox_phi_dist(&m.c, &m.phi, m_phi, &y, &mut x);
    Ok(mon.finish(
        VecR::from_raw(Space::Primal, x),
        VecR::from_raw(Space::Dual, v),
        termination,
    ))
}

/// The soft problem with `φ = α|·|^{4/3}`, `ψ = β|·|` and `D = {0}`:
///
/// ```text
/// minimize α d_C(x)^{4/3} + β‖Lx − r‖ + ½‖x − z‖²
/// ```
///
/// Its loop runs with `γ = λ = 1` and needs `‖L‖ ≤ 1`.
#[derive(Debug, Clone)]
pub struct FourThirdsModel {
    pub c: ConvexSet,
    pub l: LinOp,
    pub r: VecR,
    pub z: VecR,
    pub alpha: f64,
    pub beta: f64,
}

impl FourThirdsModel {
    pub fn new(c: ConvexSet, l: LinOp, r: VecR, z: VecR, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(invalid("alpha and beta must be positive"));
        }
        if l.norm_bound() > 1.0 {
            return Err(invalid(format!(
                "this loop needs ‖L‖ ≤ 1, bound is {}",
                l.norm_bound()
            )));
        }
        check_len(l.dim_out(), r.len())?;
        Ok(Self {
            c,
            l,
            r,
            z,
            alpha,
            beta,
        })
    }

    pub fn to_soft_model(&self) -> Result<SoftApproxModel> {
        SoftApproxModel::new(
            self.c.clone(),
            ConvexSet::singleton(vec![0.0; self.l.dim_out()])?,
            self.l.clone(),
            self.r.clone(),
            self.z.clone(),
            ScalarFun::power(4.0 / 3.0, self.alpha)?,
            ScalarFun::power(1.0, self.beta)?,
        )
    }

    /// The matching generic configuration: `γ = λ = 1`, no errors.
    pub fn config(&self, max_iter: usize, tol: f64) -> Result<DualFBConfig> {
        let p = self.to_soft_model()?.to_problem();
        Ok(DualFBConfig::new(&p)
            .with_gamma(1.0)
            .with_max_iter(max_iter)
            .with_tol(tol))
    }

    pub fn solve(&self, max_iter: usize, tol: f64) -> Result<SolveResult> {
        self.solve_observed(max_iter, tol, |_| {})
    }

    /// ```text
    /// τ = 3/(2α·4^{1/3}),  σ = 256α³/729
    /// yₙ = z − L*vₙ
    /// xₙ = yₙ + ((|√(d²+σ) + d|^{1/3} − |√(d²+σ) − d|^{1/3}) / (τd)) (P_C yₙ − yₙ),  d = d_C(yₙ) > 0
    ///      yₙ                                                                      if yₙ ∈ C
    /// wₙ = vₙ + L xₙ − r
    /// vₙ₊₁ = β wₙ/‖wₙ‖ if ‖wₙ‖ > β, else wₙ
    /// ```
    pub fn solve_observed(
        &self,
        max_iter: usize,
        tol: f64,
        mut observer: impl FnMut(&IterView<'_>),
    ) -> Result<SolveResult> {
        let soft = self.to_soft_model()?;
        let p = &soft.problem;
        let cfg = self.config(max_iter, tol)?;
        cfg.validate(p)?;
        let (nd, md) = (p.dim_primal(), p.dim_dual());
        let (z, r) = (self.z.as_slice(), self.r.as_slice());
        let tau = 3.0 / (2.0 * self.alpha * libm::cbrt(4.0));
        let sigma = 256.0 * (self.alpha * self.alpha * self.alpha) / 729.0;
        let beta = self.beta;

        let step = |y: &[f64], pc: &mut Vec<f64>, x: &mut [f64]| {
            self.c.project_into(y, pc);
            let d = dist(y, pc);
            if d > 0.0 {
                let rho = libm::sqrt(d * d + sigma);
                let t = (libm::cbrt((rho + d).abs()) - libm::cbrt((rho - d).abs())) / (tau * d);
                for i in 0..y.len() {
                    x[i] = y[i] + t * (pc[i] - y[i]);
                }
            } else {
                x.copy_from_slice(y);
            }
        };

        let mut v = vec![0.0; md];
        let mut v_next = vec![0.0; md];
        let mut y = vec![0.0; nd];
        let mut pc = vec![0.0; nd];
        let mut x = vec![0.0; nd];
        let mut lx = vec![0.0; md];
        let mut monitoring = cfg.monitor_objectives;
        let mut mon = Monitor::new(&cfg);

        let mut it = 0;
        let termination = loop {
            self.l.apply_adjoint(&v, &mut y);
            for (yi, zi) in y.iter_mut().zip(z) {
                *yi = zi - *yi;
            }
            step(&y, &mut pc, &mut x);
            self.l.apply(&x, &mut lx);
            for i in 0..md {
                v_next[i] = v[i] + lx[i] - r[i];
            }
            let nw = libm::sqrt(norm_sq(&v_next));
            if nw > beta {
                let s = beta / nw;
                v_next.iter_mut().for_each(|a| *a *= s);
            }
            if !all_finite(&v_next) || !all_finite(&x) {
                return Err(mon.diverged(it));
            }
            let change = dist(&v_next, &v);
            let row = monitor_row(&mut monitoring, p, &y, &x, &lx, &v, it, change)?;
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

        self.l.apply_adjoint(&v, &mut y);
        for (yi, zi) in y.iter_mut().zip(z) {
            *yi = zi - *yi;
        }
        step(&y, &mut pc, &mut x);
        Ok(mon.finish(
            VecR::from_raw(Space::Primal, x),
            VecR::from_raw(Space::Dual, v),
            termination,
        ))
    }
}

/// Builds the relaxed recovery problem
///
/// ```text
/// minimize φ(d_C(x)) + α max_i |⟨x, sᵢ⟩ − ρᵢ| + ½‖x‖²
/// ```
///
/// as `f = φ ∘ d_C`, `g = α‖·‖_∞`, `L x = (⟨x, sᵢ⟩)ᵢ`, `r = ρ`, `z = 0`.
/// `g*` is the indicator of the ℓ¹ ball of radius `α`.
pub fn linf_relaxed_problem(
    c: ConvexSet,
    phi: ScalarFun,
    s: &[Vec<f64>],
    rho: &[f64],
    alpha: f64,
) -> Result<ProblemInstance> {
    check_penalty("phi", &phi)?;
    if s.is_empty() {
        return Err(invalid("at least one measurement vector is required"));
    }
    check_len(s.len(), rho.len())?;
    let total: f64 = s.iter().map(|si| norm_sq(si)).sum();
    if total > 1.0 + 1e-12 {
        return Err(invalid(format!(
            "the measurement vectors must satisfy Σ‖sᵢ‖² ≤ 1, got {total}"
        )));
    }
    let l = LinOp::from_rows(s)?;
    let n = l.dim_in();
    ProblemInstance::new(
        ProxFunction::phi_of_dist(phi, c)?,
        ProxFunction::support(ConvexSet::l1_ball(s.len(), alpha)?),
        l,
        VecR::zeros(Space::Primal, n),
        VecR::dual(rho.to_vec())?,
    )
}

pub fn linf_relaxed_recovery(
    c: ConvexSet,
    phi: ScalarFun,
    s: &[Vec<f64>],
    rho: &[f64],
    alpha: f64,
    cfg: &DualFBConfig,
) -> Result<SolveResult> {
    let p = linf_relaxed_problem(c, phi, s, rho, alpha)?;
    solve_dual_fb(&p, cfg)
}
