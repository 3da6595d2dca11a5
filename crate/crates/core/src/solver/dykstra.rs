//! The dual iteration with `L = Id`, `r = 0`, `γ = λ = 1`, which becomes a
//! Dykstra-like scheme converging to `prox_{f+g}(z)`.

use alloc::vec;

use crate::error::{check_len, Error, Result};
use crate::linop::LinOp;
use crate::prox::ProxFunction;
use crate::space::{dist, norm, Space, VecR};

use super::{monitor_row, DualFBConfig, IterView, Monitor, ProblemInstance, SolveResult};

/// ```text
/// v₀ = 0
/// xₙ   = prox_f(z − vₙ)
/// vₙ₊₁ = xₙ + vₙ − prox_g(xₙ + vₙ)
/// ```
pub fn solve_dykstra_mode(
    f: &ProxFunction,
    g: &ProxFunction,
    z: &VecR,
    max_iter: usize,
    tol: f64,
) -> Result<SolveResult> {
    solve_dykstra_mode_observed(f, g, z, max_iter, tol, |_| {})
}

pub fn solve_dykstra_mode_observed(
    f: &ProxFunction,
    g: &ProxFunction,
    z: &VecR,
    max_iter: usize,
    tol: f64,
    mut observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    let n = z.len();
    check_len(n, f.dim())?;
    check_len(n, g.dim())?;
    if z.space() != Space::Primal {
        return Err(Error::SpaceMismatch);
    }
    let p = ProblemInstance::new(
        f.clone(),
        g.clone(),
        LinOp::identity(n),
        z.clone(),
        VecR::zeros(Space::Dual, n),
    )?;
    let cfg = DualFBConfig::new(&p)
        .with_gamma(1.0)
        .with_max_iter(max_iter)
        .with_tol(tol);
    cfg.validate(&p)?;
    let zs = z.as_slice();

    let mut v = vec![0.0; n];
    let mut v_next = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut pg = vec![0.0; n];
    let mut monitoring = cfg.monitor_objectives;
    let mut mon = Monitor::new(&cfg);

    let mut it = 0;
    let termination = loop {
        for i in 0..n {
            u[i] = zs[i] - v[i];
        }
        f.prox_into(1.0, &u, &mut x)?;
        for i in 0..n {
            s[i] = x[i] + v[i];
        }
        g.prox_into(1.0, &s, &mut pg)?;
        for i in 0..n {
            v_next[i] = s[i] - pg[i];
        }
        if !crate::space::all_finite(&v_next) || !crate::space::all_finite(&x) {
            return Err(mon.diverged(it));
        }
        let change = dist(&v_next, &v);
        let row = monitor_row(&mut monitoring, &p, &u, &x, &x, &v, it, change)?;
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
    for i in 0..n {
        u[i] = zs[i] - v[i];
    }
    f.prox_into(1.0, &u, &mut x)?;
    Ok(mon.finish(
        VecR::from_raw(Space::Primal, x),
        VecR::from_raw(Space::Dual, v),
        termination,
    ))
}
