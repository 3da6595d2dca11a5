//! Denoising with a penalty on dictionary coefficients:
//!
//! ```text
//! minimize f(x) + Σ_k φ_k(⟨x, e_k⟩) + ½‖x − z‖²
//! ```
//!
//! where the unit vectors `e_k` form a frame with upper bound `δ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Error, Result};
use crate::linop::{estimate_opnorm, power_iteration_norm, DenseMatrix, LinOp};
use crate::prox::{ProxFunction, ScalarFun};
use crate::solver::{monitor_row, DualFBConfig, IterView, Monitor, ProblemInstance, SolveResult};
use crate::space::{all_finite, dist, dot, norm, Space, VecR};

use super::initial_dual;

const FRAME_SEED: u64 = 0xd1c7;
const FRAME_ITERS: usize = 500;

#[derive(Debug, Clone)]
pub struct DictModel {
    pub e: Vec<Vec<f64>>,
    pub delta: f64,
    pub phis: Vec<ScalarFun>,
    pub f: ProxFunction,
    pub z: VecR,
    problem: ProblemInstance,
}

impl DictModel {
    /// Checks `‖e_k‖ = 1`, `φ_k ≥ φ_k(0) = 0`, and that `δ` is at least the
    /// power-iteration estimate of the largest frame-operator eigenvalue.
    pub fn new(
        e: Vec<Vec<f64>>,
        delta: f64,
        phis: Vec<ScalarFun>,
        f: ProxFunction,
        z: VecR,
    ) -> Result<Self> {
        if e.is_empty() {
            return Err(invalid("the dictionary is empty"));
        }
        check_len(e.len(), phis.len())?;
        for (k, ek) in e.iter().enumerate() {
            let nk = norm(ek);
            if (nk - 1.0).abs() > 1e-10 {
                return Err(Error::Structural(format!(
                    "dictionary vector {k} has norm {nk}, not 1"
                )));
            }
        }
        for (k, phi) in phis.iter().enumerate() {
            phi.validate()?;
            let zero_ok = phi.value(0.0) == 0.0;
            let min_ok = matches!(phi.subdiff_at_zero(), Some((lo, hi)) if lo <= 0.0 && hi >= 0.0);
            if !(zero_ok && min_ok) {
                return Err(Error::Catalog(format!(
                    "phi_{k} must satisfy phi_k ≥ phi_k(0) = 0"
                )));
            }
        }
        let dm = DenseMatrix::from_rows(&e)?;
        let est = power_iteration_norm(&dm, FRAME_ITERS, FRAME_SEED);
        if !(delta.is_finite() && est * est <= delta * (1.0 + 1e-9)) {
            return Err(Error::Structural(format!(
                "frame bound {delta} is below the largest frame eigenvalue estimate {}",
                est * est
            )));
        }
        let l = LinOp::with_norm_bound(dm, libm::sqrt(delta))?;
        let g = ProxFunction::scalar_lift_each(phis.clone())?;
        let r = VecR::zeros(Space::Dual, e.len());
        let problem = ProblemInstance::new(f.clone(), g, l, z.clone(), r)?;
        Ok(Self {
            e,
            delta,
            phis,
            f,
            z,
            problem,
        })
    }

    /// A safe frame bound: the squared power-iteration estimate with the
    /// usual safety factor.
    pub fn estimate_frame_bound(e: &[Vec<f64>]) -> Result<f64> {
        let dm = DenseMatrix::from_rows(e)?;
        let b = estimate_opnorm(&dm, FRAME_ITERS, FRAME_SEED);
        Ok(b * b)
    }

    /// `L x = (⟨x, e_k⟩)_k` with bound `√δ`, `g = Σ_k φ_k`, `r = 0`.
    pub fn to_problem(&self) -> ProblemInstance {
        self.problem.clone()
    }
}

pub fn dict_denoise(m: &DictModel, cfg: &DualFBConfig) -> Result<SolveResult> {
    dict_denoise_observed(m, cfg, |_| {})
}

/// ```text
/// xₙ     = prox_f(z − Σ_k νₙ,ₖ e_k) + bₙ
/// νₙ₊₁,ₖ = νₙ,ₖ + λₙ(prox_{γₙφ_k*}(νₙ,ₖ + γₙ⟨xₙ, e_k⟩) + aₙ,ₖ − νₙ,ₖ)
/// ```
pub fn dict_denoise_observed(
    m: &DictModel,
    cfg: &DualFBConfig,
    mut observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    let p = &m.problem;
    cfg.validate(p)?;
    let nd = p.dim_primal();
    let kd = m.e.len();
    let z = m.z.as_slice();

    let synth = |nu: &[f64], out: &mut [f64]| {
        out.copy_from_slice(z);
        for (ek, nk) in m.e.iter().zip(nu) {
            for (o, e) in out.iter_mut().zip(ek) {
                *o -= nk * e;
            }
        }
    };

    let mut nu = initial_dual(cfg, kd);
    let mut nu_next = vec![0.0; kd];
    let mut u = vec![0.0; nd];
    let mut x_hat = vec![0.0; nd];
    let mut x = vec![0.0; nd];
    let mut coef = vec![0.0; kd];
    let mut coef_hat = vec![0.0; kd];
    let mut err = vec![0.0; kd];
    let mut monitoring = cfg.monitor_objectives;
    let mut mon = Monitor::new(cfg);

    let mut it = 0;
    let termination = loop {
        let gamma = cfg.gamma.at(it);
        let lambda = cfg.lambda.at(it);
        synth(&nu, &mut u);
        m.f.prox_into(1.0, &u, &mut x_hat)?;
        x.copy_from_slice(&x_hat);
        let perturbed = cfg.b_seq.is_active(it);
        cfg.b_seq.add_to(it, &mut x);
        if !all_finite(&x) {
            return Err(mon.diverged(it));
        }
        err.iter_mut().for_each(|a| *a = 0.0);
        cfg.a_seq.add_to(it, &mut err);
        for k in 0..kd {
            coef[k] = dot(&x, &m.e[k]);
            let q = m.phis[k].prox_conj_raw(gamma, nu[k] + gamma * coef[k]);
            nu_next[k] = nu[k] + lambda * (q + err[k] - nu[k]);
        }
        if !all_finite(&nu_next) {
            return Err(mon.diverged(it));
        }

        let change = dist(&nu_next, &nu);
        if perturbed && monitoring {
            for k in 0..kd {
                coef_hat[k] = dot(&x_hat, &m.e[k]);
            }
        }
        let lxh = if perturbed { &coef_hat } else { &coef };
        let row = monitor_row(&mut monitoring, p, &u, &x_hat, lxh, &nu, it, change)?;
        observer(&IterView {
            n: it,
            x: &x,
            v: &nu,
            v_next: &nu_next,
            row: &row,
        });
        let stop = mon.record(row, norm(&nu));
        core::mem::swap(&mut nu, &mut nu_next);
        it += 1;
        if let Some(t) = stop {
            break t;
        }
    };

    synth(&nu, &mut u);
    m.f.prox_into(1.0, &u, &mut x)?;
    Ok(mon.finish(
        VecR::from_raw(Space::Primal, x),
        VecR::from_raw(Space::Dual, nu),
        termination,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_dual_fb_observed;

    fn run(m: &DictModel) -> SolveResult {
        let cfg = DualFBConfig::new(&m.to_problem())
            .with_max_iter(20_000)
            .with_tol(1e-14);
        dict_denoise(m, &cfg).unwrap()
    }

    #[test]
    fn orthonormal_soft_threshold() {
        let m = DictModel::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            1.0,
            vec![ScalarFun::power(1.0, 1.0).unwrap(); 2],
            ProxFunction::zero(2),
            VecR::primal(vec![3.0, 0.5]).unwrap(),
        )
        .unwrap();
        let x = run(&m).x;
        assert!(dist(x.as_slice(), &[2.0, 0.0]) < 1e-10);
    }

    #[test]
    fn zero_penalties_return_z() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let e = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![h, h]];
        let m = DictModel::new(
            e,
            2.0,
            vec![ScalarFun::Zero; 3],
            ProxFunction::zero(2),
            VecR::primal(vec![0.3, -4.0]).unwrap(),
        )
        .unwrap();
        let x = run(&m).x;
        assert!(dist(x.as_slice(), &[0.3, -4.0]) < 1e-12);
    }

    #[test]
    fn rejects_small_bound_and_bad_penalty() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let e = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![h, h]];
        let z = VecR::primal(vec![0.0, 0.0]).unwrap();
        let phis = vec![ScalarFun::Zero; 3];
        assert!(DictModel::new(e.clone(), 1.5, phis, ProxFunction::zero(2), z.clone()).is_err());
        let neg = vec![ScalarFun::neg_log(1.0).unwrap(); 3];
        assert!(DictModel::new(e, 2.0, neg, ProxFunction::zero(2), z).is_err());
    }

    #[test]
    fn redundant_frame_bound_estimate() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let e = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![h, h]];
        let d = DictModel::estimate_frame_bound(&e).unwrap();
        // the frame operator has eigenvalues 2 and 1
        assert!(d >= 2.0 && d <= 2.0 * 1.05 * 1.05 + 1e-12);
    }

    #[test]
    fn matches_generic_iterates() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let e = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![h, h]];
        let m = DictModel::new(
            e,
            2.0,
            vec![
                ScalarFun::power(1.0, 0.3).unwrap(),
                ScalarFun::huber(0.5, 1.0).unwrap(),
                ScalarFun::power(2.0, 0.7).unwrap(),
            ],
            ProxFunction::indicator(crate::prox::ConvexSet::l2_ball(vec![0.0, 0.0], 2.0).unwrap()),
            VecR::primal(vec![2.5, -1.0]).unwrap(),
        )
        .unwrap();
        let cfg = DualFBConfig::new(&m.to_problem())
            .with_max_iter(300)
            .with_tol(0.0)
            .with_lambda(0.9);
        let mut a: Vec<Vec<f64>> = Vec::new();
        dict_denoise_observed(&m, &cfg, |it| a.push(it.v_next.to_vec())).unwrap();
        let mut g: Vec<Vec<f64>> = Vec::new();
        solve_dual_fb_observed(&m.to_problem(), &cfg, |it| g.push(it.v_next.to_vec())).unwrap();
        for (x, y) in a.iter().zip(&g) {
            assert!(dist(x, y) <= 1e-10);
        }
    }
}
