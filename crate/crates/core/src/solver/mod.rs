//! Forward-backward splitting on the dual problem.
//!
//! Given `f`, `g`, `L`, `z`, `r`, the primal problem is
//!
//! ```text
//! minimize  f(x) + g(Lx − r) + ½‖x − z‖²
//! ```
//!
//! and its dual is
//!
//! ```text
//! minimize  f̃*(z − L*v) + g*(v) + ⟨v, r⟩,   f̃*(u) = ½‖u‖² − f̃(u),
//! ```
//!
//! where `f̃` is the Moreau envelope. The dual iteration is
//!
//! ```text
//! xₙ   = prox_f(z − L*vₙ) + bₙ
//! vₙ₊₁ = vₙ + λₙ (prox_{γₙ g*}(vₙ + γₙ(L xₙ − r)) + aₙ − vₙ)
//! ```
//!
//! and the primal solution is recovered as `prox_f(z − L*v)`.

mod config;
mod dykstra;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linop::LinOp;
use crate::prox::ProxFunction;
use crate::space::{axpy, dist, dot, norm, norm_sq, sq, Space, VecR};

pub use config::{DualFBConfig, ErrorSeq, Schedule};
pub use dykstra::{solve_dykstra_mode, solve_dykstra_mode_observed};

/// The data `(f, g, L, z, r)` of one composite problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub f: ProxFunction,
    pub g: ProxFunction,
    pub l: LinOp,
    pub z: VecR,
    pub r: VecR,
    /// The caller's assertion that `r ∈ sri(L(dom f) − dom g)`. The library
    /// cannot check this; solvers refuse to run without it.
    pub qualification_asserted: bool,
}

impl ProblemInstance {
    /// Builds an instance with the qualification condition asserted. Use
    /// `unqualified` to build one without the assertion.
    pub fn new(f: ProxFunction, g: ProxFunction, l: LinOp, z: VecR, r: VecR) -> Result<Self> {
        let p = Self {
            f,
            g,
            l,
            z,
            r,
            qualification_asserted: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn unqualified(
        f: ProxFunction,
        g: ProxFunction,
        l: LinOp,
        z: VecR,
        r: VecR,
    ) -> Result<Self> {
        let p = Self {
            f,
            g,
            l,
            z,
            r,
            qualification_asserted: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn dim_primal(&self) -> usize {
        self.l.dim_in()
    }

    pub fn dim_dual(&self) -> usize {
        self.l.dim_out()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.l.dim_in();
        let m = self.l.dim_out();
        if n == 0 || m == 0 {
            return Err(Error::InvalidProblem(
                "spaces must be nonzero-dimensional".into(),
            ));
        }
        check_len(n, self.f.dim())?;
        check_len(n, self.z.len())?;
        check_len(m, self.g.dim())?;
        check_len(m, self.r.len())?;
        if self.z.space() != Space::Primal || self.r.space() != Space::Dual {
            return Err(Error::SpaceMismatch);
        }
        if !(self.l.norm_bound() > 0.0) {
            return Err(Error::InvalidProblem("L is the zero operator".into()));
        }
        self.f.validate()?;
        self.g.validate()?;
        Ok(())
    }

    /// `‖L‖⁻²` from the stored norm bound.
    pub fn beta(&self) -> f64 {
        1.0 / (self.l.norm_bound() * self.l.norm_bound())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    IterateTol,
    GapTol,
    MaxIter,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::IterateTol => "iterate_tol",
            Termination::GapTol => "gap_tol",
            Termination::MaxIter => "max_iter",
        }
    }
}

/// One iteration's diagnostics. Objectives are evaluated at the pair
/// `(prox_f(z − L*vₙ), vₙ)`; they are `None` when a needed value is not
/// available, and may be `+∞` outside the domains.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    /// `‖vₙ₊₁ − vₙ‖`.
    pub iterate_change: f64,
    pub primal_obj: Option<f64>,
    pub dual_obj: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: VecR,
    pub v: VecR,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
    pub termination: Termination,
    /// Set when the iterate change stalled above tolerance for a whole
    /// stagnation window with no finite gap, which usually means the
    /// problem is infeasible or the qualification condition fails.
    pub suspected_infeasible: bool,
}

/// What an observer sees after each iteration.
#[derive(Debug)]
pub struct IterView<'a> {
    pub n: usize,
    /// `xₙ`, including any injected errors.
    pub x: &'a [f64],
    pub v: &'a [f64],
    pub v_next: &'a [f64],
    pub row: &'a TraceRow,
}

/// Implementation errors for the operator-error variant. `c1, c2` live in
/// the dual space, `d1, d2` in the primal space.
#[derive(Debug, Clone, Default)]
pub struct OperatorErrors {
    pub c1: ErrorSeq,
    pub c2: ErrorSeq,
    pub d1: ErrorSeq,
    pub d2: ErrorSeq,
}

/// Tracks termination and stagnation for every dual-type loop.
pub(crate) struct Monitor {
    pub trace: Vec<TraceRow>,
    tol_iterate: f64,
    tol_gap: Option<f64>,
    max_iter: usize,
    window: usize,
    suspected: bool,
    errors: Vec<ErrorSeq>,
}

impl Monitor {
    pub fn new(cfg: &DualFBConfig) -> Self {
        Self {
            trace: Vec::new(),
            tol_iterate: cfg.tol_iterate,
            tol_gap: cfg.tol_gap,
            max_iter: cfg.max_iter,
            window: cfg.stagnation_window,
            suspected: false,
            errors: vec![cfg.a_seq.clone(), cfg.b_seq.clone()],
        }
    }

    /// Also holds off the iterate test while `seq` is still large.
    pub fn watch(mut self, seq: &ErrorSeq) -> Self {
        self.errors.push(seq.clone());
        self
    }

    /// Records a row; returns the termination reason if the loop should stop.
    pub fn record(&mut self, row: TraceRow, v_norm: f64) -> Option<Termination> {
        let scale = v_norm.max(1.0);
        let rel = row.iterate_change / scale;
        // a step can stall while an injected error is still large; only
        // trust a small change once the errors have faded too
        let err: f64 = self.errors.iter().map(|e| e.norm_at(row.n)).sum();
        let settled = err <= self.tol_iterate * scale;
        let gap = row.gap;
        self.trace.push(row);
        let k = self.trace.len();
        if self.window > 0
            && k > self.window
            && rel > self.tol_iterate
            && !gap.is_some_and(f64::is_finite)
        {
            let start = self.trace[k - 1 - self.window].iterate_change;
            let min = self.trace[k - self.window..]
                .iter()
                .map(|r| r.iterate_change)
                .fold(f64::INFINITY, f64::min);
            if start > 0.0 && min >= 0.99 * start {
                self.suspected = true;
            }
        }
        // the gap is the stronger certificate, so it wins a tie
        if matches!((self.tol_gap, gap), (Some(t), Some(g)) if g <= t) {
            Some(Termination::GapTol)
        } else if rel <= self.tol_iterate && settled {
            Some(Termination::IterateTol)
        } else if k >= self.max_iter {
            Some(Termination::MaxIter)
        } else {
            None
        }
    }

    pub fn diverged(self, iteration: usize) -> Error {
        Error::Divergence {
            iteration,
            trace: self.trace,
        }
    }

    pub fn finish(self, x: VecR, v: VecR, termination: Termination) -> SolveResult {
        SolveResult {
            x,
            v,
            iterations: self.trace.len(),
            trace: self.trace,
            termination,
            suspected_infeasible: self.suspected,
        }
    }
}

/// Primal and dual objective values at `(x̂, v)` with `x̂ = prox_f(u)`,
/// `u = z − L*v`, reusing `x̂` and `L x̂`.
pub(crate) fn objectives_at(
    p: &ProblemInstance,
    u: &[f64],
    x_hat: &[f64],
    lx_hat: &[f64],
    v: &[f64],
) -> Result<(f64, f64)> {
    let fx = p.f.value(x_hat)?;
    let mut w = lx_hat.to_vec();
    axpy(-1.0, p.r.as_slice(), &mut w);
    let primal = fx + p.g.value(&w)? + 0.5 * sq(dist(x_hat, p.z.as_slice()));
    let dual = 0.5 * norm_sq(u) - fx - 0.5 * sq(dist(u, x_hat))
        + p.g.conj_value(v)?
        + dot(v, p.r.as_slice());
    Ok((primal, dual))
}

/// Fills the optional objective columns, switching monitoring off for good
/// once a capability turns out to be missing.
pub(crate) fn monitor_row(
    enabled: &mut bool,
    p: &ProblemInstance,
    u: &[f64],
    x_hat: &[f64],
    lx_hat: &[f64],
    v: &[f64],
    n: usize,
    change: f64,
) -> Result<TraceRow> {
    let mut row = TraceRow {
        n,
        iterate_change: change,
        primal_obj: None,
        dual_obj: None,
        gap: None,
    };
    if *enabled {
        match objectives_at(p, u, x_hat, lx_hat, v) {
            Ok((pr, du)) => {
                row.primal_obj = Some(pr);
                row.dual_obj = Some(du);
                row.gap = Some(pr + du - 0.5 * norm_sq(p.z.as_slice()));
            }
            Err(Error::Capability(_)) => *enabled = false,
            Err(e) => return Err(e),
        }
    }
    Ok(row)
}

fn check_ready(p: &ProblemInstance) -> Result<()> {
    p.validate()?;
    if !p.qualification_asserted {
        return Err(Error::InvalidProblem(
            "the qualification condition must be asserted before solving".into(),
        ));
    }
    Ok(())
}

/// Runs the dual forward-backward iteration.
pub fn solve_dual_fb(p: &ProblemInstance, cfg: &DualFBConfig) -> Result<SolveResult> {
    solve_dual_fb_observed(p, cfg, |_| {})
}

/// As `solve_dual_fb`, calling `observer` after every iteration.
pub fn solve_dual_fb_observed(
    p: &ProblemInstance,
    cfg: &DualFBConfig,
    observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    check_ready(p)?;
    cfg.validate(p)?;
    run(p, cfg, None, observer)
}

/// The iteration with errors in the operator evaluations:
///
/// ```text
/// xₙ   = prox_f(z − L*vₙ − d2ₙ) + d1ₙ
/// vₙ₊₁ = vₙ + λₙ (prox_{γₙ g*}(vₙ + γₙ(L xₙ + c2ₙ − r)) + c1ₙ − vₙ)
/// ```
///
/// The configuration's own `aₙ`, `bₙ` are added on top. With all four
/// sequences zero this performs exactly the arithmetic of `solve_dual_fb`.
pub fn solve_dual_fb_with_operator_errors(
    p: &ProblemInstance,
    cfg: &DualFBConfig,
    errs: &OperatorErrors,
) -> Result<SolveResult> {
    solve_dual_fb_with_operator_errors_observed(p, cfg, errs, |_| {})
}

pub fn solve_dual_fb_with_operator_errors_observed(
    p: &ProblemInstance,
    cfg: &DualFBConfig,
    errs: &OperatorErrors,
    observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    check_ready(p)?;
    cfg.validate(p)?;
    let (n, m) = (p.dim_primal(), p.dim_dual());
    errs.c1.validate(m, "c1")?;
    errs.c2.validate(m, "c2")?;
    errs.d1.validate(n, "d1")?;
    errs.d2.validate(n, "d2")?;
    run(p, cfg, Some(errs), observer)
}

fn run(
    p: &ProblemInstance,
    cfg: &DualFBConfig,
    errs: Option<&OperatorErrors>,
    mut observer: impl FnMut(&IterView<'_>),
) -> Result<SolveResult> {
    let n_dim = p.dim_primal();
    let m_dim = p.dim_dual();
    let z = p.z.as_slice();
    let r = p.r.as_slice();

    let mut v = match &cfg.v0 {
        Some(v0) => v0.as_slice().to_vec(),
        None => vec![0.0; m_dim],
    };
    let mut v_next = vec![0.0; m_dim];
    let mut u = vec![0.0; n_dim];
    let mut x_hat = vec![0.0; n_dim];
    let mut x = vec![0.0; n_dim];
    let mut lx = vec![0.0; m_dim];
    let mut lx_hat = vec![0.0; m_dim];
    let mut w = vec![0.0; m_dim];
    let mut q = vec![0.0; m_dim];
    let mut scratch_n = vec![0.0; n_dim];
    let mut err_n = vec![0.0; n_dim];
    let mut err_m = vec![0.0; m_dim];

    let mut monitoring = cfg.monitor_objectives;
    let mut mon = Monitor::new(cfg);
    if let Some(e) = errs {
        mon = mon.watch(&e.c1).watch(&e.c2).watch(&e.d1).watch(&e.d2);
    }

    let mut it = 0usize;
    let termination = loop {
        let gamma = cfg.gamma.at(it);
        let lambda = cfg.lambda.at(it);

        // u = z − L*vₙ
        p.l.apply_adjoint(&v, &mut u);
        for (ui, zi) in u.iter_mut().zip(z) {
            *ui = zi - *ui;
        }
        p.f.prox_into(1.0, &u, &mut x_hat)?;

        // xₙ with primal-side errors
        let mut perturbed = false;
        match errs {
            Some(e) if e.d2.is_active(it) => {
                scratch_n.copy_from_slice(&u);
                err_n.iter_mut().for_each(|s| *s = 0.0);
                e.d2.add_to(it, &mut err_n);
                axpy(-1.0, &err_n, &mut scratch_n);
                p.f.prox_into(1.0, &scratch_n, &mut x)?;
                perturbed = true;
            }
            _ => x.copy_from_slice(&x_hat),
        }
        if let Some(e) = errs {
            if e.d1.is_active(it) {
                e.d1.add_to(it, &mut x);
                perturbed = true;
            }
        }
        if cfg.b_seq.is_active(it) {
            cfg.b_seq.add_to(it, &mut x);
            perturbed = true;
        }

        p.l.apply(&x, &mut lx);
        if !crate::space::all_finite(&x) {
            return Err(mon.diverged(it));
        }

        // w = vₙ + γ(L xₙ [+ c2] − r)
        match errs {
            Some(e) if e.c2.is_active(it) => {
                err_m.iter_mut().for_each(|s| *s = 0.0);
                e.c2.add_to(it, &mut err_m);
                for i in 0..m_dim {
                    w[i] = v[i] + gamma * (lx[i] + err_m[i] - r[i]);
                }
            }
            _ => {
                for i in 0..m_dim {
                    w[i] = v[i] + gamma * (lx[i] - r[i]);
                }
            }
        }
        p.g.prox_conj_into(gamma, &w, &mut q)?;
        if let Some(e) = errs {
            e.c1.add_to(it, &mut q);
        }
        cfg.a_seq.add_to(it, &mut q);
        for i in 0..m_dim {
            v_next[i] = v[i] + lambda * (q[i] - v[i]);
        }
        if !crate::space::all_finite(&v_next) {
            return Err(mon.diverged(it));
        }

        let change = dist(&v_next, &v);
        let lxh: &[f64] = if perturbed && monitoring {
            p.l.apply(&x_hat, &mut lx_hat);
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
        let v_norm = norm(&v);
        let stop = mon.record(row, v_norm);
        core::mem::swap(&mut v, &mut v_next);
        it += 1;
        if let Some(t) = stop {
            break t;
        }
    };

    let x_final = recover_slice(p, &v)?;
    Ok(mon.finish(
        VecR::from_raw(Space::Primal, x_final),
        VecR::from_raw(Space::Dual, v),
        termination,
    ))
}

fn recover_slice(p: &ProblemInstance, v: &[f64]) -> Result<Vec<f64>> {
    let mut u = p.l.adjoint_vec(v);
    for (ui, zi) in u.iter_mut().zip(p.z.as_slice()) {
        *ui = zi - *ui;
    }
    p.f.prox_vec(1.0, &u)
}

/// `prox_f(z − L*v)`.
pub fn recover_primal(p: &ProblemInstance, v: &VecR) -> Result<VecR> {
    check_len(p.dim_dual(), v.len())?;
    Ok(VecR::from_raw(
        Space::Primal,
        recover_slice(p, v.as_slice())?,
    ))
}

/// `f(x) + g(Lx − r) + ½‖x − z‖²`.
pub fn primal_objective(p: &ProblemInstance, x: &VecR) -> Result<f64> {
    check_len(p.dim_primal(), x.len())?;
    let x = x.as_slice();
    let mut w = p.l.apply_vec(x);
    axpy(-1.0, p.r.as_slice(), &mut w);
    Ok(p.f.value(x)? + p.g.value(&w)? + 0.5 * sq(dist(x, p.z.as_slice())))
}

/// `f̃*(z − L*v) + g*(v) + ⟨v, r⟩` with `f̃*(u) = ½‖u‖² − f(p) − ½‖u − p‖²`,
/// `p = prox_f(u)`.
pub fn dual_objective(p: &ProblemInstance, v: &VecR) -> Result<f64> {
    check_len(p.dim_dual(), v.len())?;
    let v = v.as_slice();
    let mut u = p.l.adjoint_vec(v);
    for (ui, zi) in u.iter_mut().zip(p.z.as_slice()) {
        *ui = zi - *ui;
    }
    let x = p.f.prox_vec(1.0, &u)?;
    let fx = p.f.value(&x)?;
    Ok(0.5 * norm_sq(&u) - fx - 0.5 * sq(dist(&u, &x))
        + p.g.conj_value(v)?
        + dot(v, p.r.as_slice()))
}

/// `‖prox_{γg*}(v + γ(Lx − r)) − v‖` with `x = prox_f(z − L*v)`; zero exactly
/// when `v` solves the dual.
pub fn optimality_residual(p: &ProblemInstance, v: &VecR, gamma: f64) -> Result<f64> {
    let x = recover_primal(p, v)?;
    let lx = p.l.apply_vec(x.as_slice());
    let w: Vec<f64> = v
        .as_slice()
        .iter()
        .zip(&lx)
        .zip(p.r.as_slice())
        .map(|((vi, li), ri)| vi + gamma * (li - ri))
        .collect();
    let q = p.g.prox_conj_vec(gamma, &w)?;
    Ok(dist(&q, v.as_slice()))
}
