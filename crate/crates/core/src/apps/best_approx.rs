//! Best approximation from `C ∩ L⁻¹(r + D)`:
//!
//! ```text
//! minimize ½‖x − z‖²  subject to  x ∈ C,  Lx − r ∈ D
//! ```

use alloc::vec;

use crate::error::{check_len, Result};
use crate::linop::LinOp;
use crate::prox::{ConvexSet, ProxFunction};
use crate::solver::{monitor_row, DualFBConfig, IterView, Monitor, ProblemInstance, SolveResult};
use crate::space::{all_finite, dist, norm, Space, VecR};

use super::initial_dual;

#[derive(Debug, Clone)]
pub struct BestApproxModel {
    pub c: ConvexSet,
    pub d: ConvexSet,
    pub l: LinOp,
    pub r: VecR,
    pub z: VecR,
    problem: ProblemInstance,
}

impl BestApproxModel {
    /// The caller asserts `r ∈ sri(L(C) − D)`.
    pub fn new(c: ConvexSet, d: ConvexSet, l: LinOp, r: VecR, z: VecR) -> Result<Self> {
        let problem = ProblemInstance::new(
            ProxFunction::indicator(c.clone()),
            ProxFunction::indicator(d.clone()),
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
            problem,
        })
    }

    /// `f = ι_C`, `g = ι_D`.
    pub fn to_problem(&self) -> ProblemInstance {
        self.problem.clone()
    }
}

pub fn best_feasible_approx(m: &BestApproxModel, cfg: &DualFBConfig) -> Result<SolveResult> {
    best_feasible_approx_observed(m, cfg, |_| {})
}

/// ```text
/// xₙ   = P_C(z − L*vₙ) + bₙ
/// vₙ₊₁ = vₙ + λₙ(γₙ(L xₙ − r − P_D(vₙ/γₙ + L xₙ − r)) + aₙ)
/// ```
pub fn best_feasible_approx_observed(
    m: &BestApproxModel,
    cfg: &DualFBConfig,
    mut observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    let p = &m.problem;
    cfg.validate(p)?;
    let (nd, md) = (p.dim_primal(), p.dim_dual());
    check_len(md, m.d.dim())?;
    let (z, r) = (m.z.as_slice(), m.r.as_slice());

    let mut v = initial_dual(cfg, md);
    let mut v_next = vec![0.0; md];
    let mut u = vec![0.0; nd];
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
        m.l.apply_adjoint(&v, &mut u);
        for (ui, zi) in u.iter_mut().zip(z) {
            *ui = zi - *ui;
        }
        m.c.project_into(&u, &mut x_hat);
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
        for i in 0..md {
            v_next[i] = gamma * (lx[i] - r[i] - pw[i]);
        }
        cfg.a_seq.add_to(it, &mut v_next);
        for i in 0..md {
            v_next[i] = v[i] + lambda * v_next[i];
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
        let row = monitor_row(&mut monitoring, p, &u, &x_hat, lxh, &v, it, change)?;
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

    m.l.apply_adjoint(&v, &mut u);
    for (ui, zi) in u.iter_mut().zip(z) {
        *ui = zi - *ui;
    }
    m.c.project_into(&u, &mut x);
    Ok(mon.finish(
        VecR::from_raw(Space::Primal, x),
        VecR::from_raw(Space::Dual, v),
        termination,
    ))
}
