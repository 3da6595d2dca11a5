//! Minimum-norm recovery from linear measurements with a convex prior:
//!
//! ```text
//! minimize ‖x‖  subject to  x ∈ C,  ⟨x, sᵢ⟩ = ρᵢ  (1 ≤ i ≤ N)
//! ```
//!
//! The loop is written in the variable `w = −v`, which is what the
//! specialized routine updates and what `SolveResult::v` reports.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Result};
use crate::linop::LinOp;
use crate::prox::{ConvexSet, ProxFunction};
use crate::solver::{monitor_row, DualFBConfig, IterView, Monitor, ProblemInstance, SolveResult};
use crate::space::{all_finite, dist, norm, norm_sq, Space, VecR};

use super::initial_dual;

#[derive(Debug, Clone)]
pub struct PotterArunModel {
    pub c: ConvexSet,
    pub s: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    problem: ProblemInstance,
}

impl PotterArunModel {
    /// Requires `Σ‖sᵢ‖² ≤ 1`. The caller asserts `ρ ∈ ri L(C)`.
    pub fn new(c: ConvexSet, s: Vec<Vec<f64>>, rho: Vec<f64>) -> Result<Self> {
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
        let l = LinOp::from_rows(&s)?;
        let n = l.dim_in();
        let problem = ProblemInstance::new(
            ProxFunction::indicator(c.clone()),
            ProxFunction::indicator(ConvexSet::singleton(vec![0.0; s.len()])?),
            l,
            VecR::zeros(Space::Primal, n),
            VecR::dual(rho.clone())?,
        )?;
        Ok(Self { c, s, rho, problem })
    }

    /// `f = ι_C`, `g = ι_{0}`, `L x = (⟨x, sᵢ⟩)ᵢ`, `r = ρ`, `z = 0`.
    pub fn to_problem(&self) -> ProblemInstance {
        self.problem.clone()
    }

    /// `‖L P_C(L*w) − ρ‖`, zero exactly at a dual solution.
    pub fn residual(&self, w: &[f64]) -> f64 {
        let l = &self.problem.l;
        let y = self.c.project_vec(&l.adjoint_vec(w));
        let mut ly = l.apply_vec(&y);
        for (a, b) in ly.iter_mut().zip(&self.rho) {
            *a -= b;
        }
        norm(&ly)
    }
}

pub fn potter_arun(m: &PotterArunModel, cfg: &DualFBConfig) -> Result<SolveResult> {
    potter_arun_observed(m, cfg, |_| {})
}

/// ```text
/// xₙ   = P_C(L*wₙ) + bₙ
/// wₙ₊₁ = wₙ + λₙ(γₙ(ρ − L xₙ) − aₙ)
/// ```
///
/// `cfg.v0`, when given, is the starting `w₀`, and the observer sees `w`.
pub fn potter_arun_observed(
    m: &PotterArunModel,
    cfg: &DualFBConfig,
    mut observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    let p = &m.problem;
    cfg.validate(p)?;
    let l = &p.l;
    let (nd, md) = (p.dim_primal(), p.dim_dual());

    let mut w = initial_dual(cfg, md);
    let mut w_next = vec![0.0; md];
    let mut u = vec![0.0; nd];
    let mut x_hat = vec![0.0; nd];
    let mut x = vec![0.0; nd];
    let mut lx = vec![0.0; md];
    let mut lx_hat = vec![0.0; md];
    let mut neg_w = vec![0.0; md];
    let mut monitoring = cfg.monitor_objectives;
    let mut mon = Monitor::new(cfg);

    let mut it = 0;
    let termination = loop {
        let gamma = cfg.gamma.at(it);
        let lambda = cfg.lambda.at(it);
        l.apply_adjoint(&w, &mut u);
        m.c.project_into(&u, &mut x_hat);
        x.copy_from_slice(&x_hat);
        let perturbed = cfg.b_seq.is_active(it);
        cfg.b_seq.add_to(it, &mut x);
        if !all_finite(&x) {
            return Err(mon.diverged(it));
        }
        l.apply(&x, &mut lx);
        for i in 0..md {
            w_next[i] = gamma * (m.rho[i] - lx[i]);
        }
        if cfg.a_seq.is_active(it) {
            neg_w.iter_mut().for_each(|a| *a = 0.0);
            cfg.a_seq.add_to(it, &mut neg_w);
            for i in 0..md {
                w_next[i] -= neg_w[i];
            }
        }
        for i in 0..md {
            w_next[i] = w[i] + lambda * w_next[i];
        }
        if !all_finite(&w_next) {
            return Err(mon.diverged(it));
        }

        let change = dist(&w_next, &w);
        let lxh: &[f64] = if perturbed && monitoring {
            l.apply(&x_hat, &mut lx_hat);
            &lx_hat
        } else {
            &lx
        };
        for i in 0..md {
            neg_w[i] = -w[i];
        }
        let row = monitor_row(&mut monitoring, p, &u, &x_hat, lxh, &neg_w, it, change)?;
        observer(&IterView {
            n: it,
            x: &x,
            v: &w,
            v_next: &w_next,
            row: &row,
        });
        let stop = mon.record(row, norm(&w));
        core::mem::swap(&mut w, &mut w_next);
        it += 1;
        if let Some(t) = stop {
            break t;
        }
    };

    l.apply_adjoint(&w, &mut u);
    m.c.project_into(&u, &mut x);
    Ok(mon.finish(
        VecR::from_raw(Space::Primal, x),
        VecR::from_raw(Space::Dual, w),
        termination,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_dual_fb_observed;

    fn solve(m: &PotterArunModel) -> SolveResult {
        let cfg = DualFBConfig::new(&m.to_problem())
            .with_max_iter(50_000)
            .with_tol(1e-14);
        potter_arun(m, &cfg).unwrap()
    }

    #[test]
    fn single_unit_measurement() {
        let m = PotterArunModel::new(
            ConvexSet::whole(2).unwrap(),
            vec![vec![0.6, 0.8]],
            vec![1.0],
        )
        .unwrap();
        let res = solve(&m);
        assert!(dist(res.x.as_slice(), &[0.6, 0.8]) < 1e-9);
    }

    #[test]
    fn orthant_with_active_bound() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let m = PotterArunModel::new(
            ConvexSet::nonneg_orthant(2).unwrap(),
            vec![vec![h, -h]],
            vec![h],
        )
        .unwrap();
        let res = solve(&m);
        assert!(dist(res.x.as_slice(), &[1.0, 0.0]) < 1e-6, "{:?}", res.x);
        assert!(m.residual(res.v.as_slice()) < 1e-5);
    }

    #[test]
    fn rejects_large_measurement_energy() {
        let r = PotterArunModel::new(
            ConvexSet::whole(2).unwrap(),
            vec![vec![1.0, 0.5]],
            vec![1.0],
        );
        assert!(r.is_err());
    }

    #[test]
    fn dual_is_negated_generic_dual() {
        let m = PotterArunModel::new(
            ConvexSet::boxed(vec![-1.0, 0.0, -0.5], vec![1.0, 2.0, 0.5]).unwrap(),
            vec![vec![0.3, 0.4, 0.1], vec![-0.2, 0.5, 0.3]],
            vec![0.2, 0.3],
        )
        .unwrap();
        let cfg = DualFBConfig::new(&m.to_problem())
            .with_max_iter(200)
            .with_tol(0.0);
        let mut special: Vec<Vec<f64>> = Vec::new();
        potter_arun_observed(&m, &cfg, |it| {
            special.push(it.v_next.iter().map(|a| -a).collect())
        })
        .unwrap();
        let mut gen: Vec<Vec<f64>> = Vec::new();
        solve_dual_fb_observed(&m.to_problem(), &cfg, |it| gen.push(it.v_next.to_vec())).unwrap();
        for (a, b) in special.iter().zip(&gen) {
            assert!(dist(a, b) <= 1e-10);
        }
    }
}
