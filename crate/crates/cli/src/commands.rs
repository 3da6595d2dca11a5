use std::path::{Path, PathBuf};

use dualfb_core::apps::{
    best_feasible_approx_observed, dict_denoise_observed, potter_arun_observed,
    soft_best_approx_observed, tv_denoise_observed, BestApproxModel, DictModel, PotterArunModel,
    SoftApproxModel, TvModel,
};
use dualfb_core::solver::{IterView, Schedule};
use dualfb_core::{
    ConvexSet, DualFBConfig, ImageGrid, LinOp, ProxFunction, ScalarFun, SolveResult, Termination,
    VecR,
};

use crate::cli::{
    ApproxArgs, DictArgs, PotterArunArgs, ProxEvalArgs, SolveArgs, TvArgs, VerifyArgs,
};
use crate::config::{parse_p, pick, RunConfig, SolverSection};
use crate::csv::{format_vector, read_matrix_csv, read_vector_csv, write_vector_csv};
use crate::error::{usage, CliResult};
use crate::notation::{num, parse_scalar, parse_set};
use crate::pgm::{read_pgm, write_pgm};
use crate::trace::TraceRecorder;
use crate::verify::{run_suite, SUITES};

/// Output verbosity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ctx {
    pub quiet: bool,
    pub verbose: bool,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MAX_ITER: i32 = 2;

fn required<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("missing --{flag} (or the matching config key)")))
}

/// Flags over the `[solver]` section over the model's defaults.
pub fn solver_config(
    mut cfg: DualFBConfig,
    flags: &SolveArgs,
    file: &SolverSection,
) -> DualFBConfig {
    cfg.max_iter = pick(flags.max_iter, file.max_iter, cfg.max_iter);
    cfg.tol_iterate = pick(flags.tol, file.tol, cfg.tol_iterate);
    cfg.tol_gap = flags.tol_gap.or(file.tol_gap).or(cfg.tol_gap);
    if let Some(g) = flags.gamma.or(file.gamma) {
        cfg.gamma = Schedule::Constant(g);
    }
    if let Some(l) = flags.lambda.or(file.lambda) {
        cfg.lambda = Schedule::Constant(l);
    }
    cfg.epsilon = pick(flags.epsilon, file.epsilon, cfg.epsilon);
    cfg
}

struct Run {
    rec: TraceRecorder,
    trace: Option<PathBuf>,
}

impl Run {
    fn new(ctx: Ctx, flags: &SolveArgs, file: &SolverSection) -> Self {
        let trace = flags.trace.clone().or_else(|| file.trace.clone());
        let every = if ctx.verbose { 100 } else { 0 };
        Self {
            rec: TraceRecorder::new(trace.is_some(), every),
            trace,
        }
    }

    fn observer(&mut self) -> impl FnMut(&IterView<'_>) + '_ {
        |it| self.rec.observe(it)
    }

    /// Writes the trace and reports; max_iter without tolerance maps to
    /// exit code 2.
    fn finish(self, ctx: Ctx, res: &SolveResult) -> CliResult<i32> {
        if let Some(p) = &self.trace {
            self.rec.write(p)?;
        }
        if !ctx.quiet {
            let gap = res
                .trace
                .last()
                .and_then(|r| r.gap)
                .map(|g| format!(", gap {g:.3e}"))
                .unwrap_or_default();
            eprintln!(
                "{} after {} iterations{gap}",
                res.termination.as_str(),
                res.iterations
            );
            if res.suspected_infeasible {
                eprintln!("warning: iterates stalled; the problem may be infeasible");
            }
        }
        Ok(match res.termination {
            Termination::MaxIter => EXIT_MAX_ITER,
            Termination::IterateTol | Termination::GapTol => EXIT_OK,
        })
    }
}

fn emit_vector(out: Option<&Path>, v: &[f64]) -> CliResult<()> {
    match out {
        Some(p) => write_vector_csv(p, v),
        None => {
            print!("{}", format_vector(v));
            Ok(())
        }
    }
}

pub fn tv(ctx: Ctx, a: &TvArgs, file: &RunConfig) -> CliResult<i32> {
    let s = &file.tv;
    let input = required(a.input.clone().or_else(|| s.input.clone()), "input")?;
    let output = required(a.output.clone().or_else(|| s.output.clone()), "output")?;
    let mu = pick(a.mu, s.mu, 0.1);
    let p = match (&a.p, &s.p) {
        (Some(t), _) => parse_p(t).map_err(usage)?,
        (None, Some(v)) => v.to_f64()?,
        (None, None) => 2.0,
    };
    let clamp = a.clamp || s.clamp.unwrap_or(false);
    let img = read_pgm(&input)?;
    let z = img.to_grid(&input)?;
    let n = z.n();
    let f = if clamp {
        ProxFunction::indicator(ConvexSet::boxed(vec![0.0; n * n], vec![1.0; n * n])?)
    } else {
        ProxFunction::zero(n * n)
    };
    let model = TvModel::new(z, f, mu, p)?;
    let cfg = solver_config(model.default_config(), &a.solve, &file.solver);
    let mut run = Run::new(ctx, &a.solve, &file.solver);
    let res = tv_denoise_observed(&model, &cfg, run.observer())?;
    let x = ImageGrid::new(n, res.x.as_slice().to_vec())?;
    write_pgm(
        &output,
        &x,
        pick(a.maxval, s.maxval, img.maxval),
        img.format,
    )?;
    run.finish(ctx, &res)
}

pub fn dict(ctx: Ctx, a: &DictArgs, file: &RunConfig) -> CliResult<i32> {
    let s = &file.dict;
    let z = read_vector_csv(&required(
        a.input.clone().or_else(|| s.input.clone()),
        "input",
    )?)?;
    let e = read_matrix_csv(&required(
        a.dictionary.clone().or_else(|| s.dictionary.clone()),
        "dictionary",
    )?)?;
    let phi = parse_scalar(&required(a.phi.clone().or_else(|| s.phi.clone()), "phi")?)?;
    if e[0].len() != z.len() {
        return Err(usage(format!(
            "dictionary vectors have length {}, the input has {}",
            e[0].len(),
            z.len()
        )));
    }
    let f = match a.set.clone().or_else(|| s.set.clone()) {
        Some(text) => ProxFunction::indicator(parse_set(&text, z.len())?),
        None => ProxFunction::zero(z.len()),
    };
    let delta = match a.delta.or(s.delta) {
        Some(d) => d,
        None => DictModel::estimate_frame_bound(&e)?,
    };
    let k = e.len();
    let model = DictModel::new(e, delta, vec![phi; k], f, VecR::primal(z)?)?;
    let cfg = solver_config(
        DualFBConfig::new(&model.to_problem()),
        &a.solve,
        &file.solver,
    );
    let mut run = Run::new(ctx, &a.solve, &file.solver);
    let res = dict_denoise_observed(&model, &cfg, run.observer())?;
    emit_vector(
        a.output.as_deref().or(s.output.as_deref()),
        res.x.as_slice(),
    )?;
    run.finish(ctx, &res)
}

struct ApproxInputs {
    c: ConvexSet,
    d: ConvexSet,
    l: LinOp,
    r: VecR,
    z: VecR,
}

fn approx_inputs(a: &ApproxArgs, s: &crate::config::ApproxSection) -> CliResult<ApproxInputs> {
    let z = read_vector_csv(&required(a.z.clone().or_else(|| s.z.clone()), "z")?)?;
    let n = z.len();
    let l = match a.l.clone().or_else(|| s.l.clone()) {
        Some(p) => LinOp::from_rows(&read_matrix_csv(&p)?)?,
        None => LinOp::identity(n),
    };
    if l.dim_in() != n {
        return Err(usage(format!(
            "L has {} columns, z has {n} entries",
            l.dim_in()
        )));
    }
    let m = l.dim_out();
    let r = match a.r.clone().or_else(|| s.r.clone()) {
        Some(p) => read_vector_csv(&p)?,
        None => vec![0.0; m],
    };
    let c = parse_set(&pick(a.c.clone(), s.c.clone(), "whole".into()), n)?;
    let d = parse_set(&pick(a.d.clone(), s.d.clone(), "whole".into()), m)?;
    Ok(ApproxInputs {
        c,
        d,
        l,
        r: VecR::dual(r)?,
        z: VecR::primal(z)?,
    })
}

pub fn bestapprox(ctx: Ctx, a: &ApproxArgs, file: &RunConfig) -> CliResult<i32> {
    let s = &file.bestapprox;
    if a.phi.is_some() || a.psi.is_some() {
        return Err(usage("--phi and --psi apply to softapprox only"));
    }
    let i = approx_inputs(a, s)?;
    let model = BestApproxModel::new(i.c, i.d, i.l, i.r, i.z)?;
    let cfg = solver_config(
        DualFBConfig::new(&model.to_problem()),
        &a.solve,
        &file.solver,
    );
    let mut run = Run::new(ctx, &a.solve, &file.solver);
    let res = best_feasible_approx_observed(&model, &cfg, run.observer())?;
    emit_vector(
        a.output.as_deref().or(s.output.as_deref()),
        res.x.as_slice(),
    )?;
    run.finish(ctx, &res)
}

pub fn softapprox(ctx: Ctx, a: &ApproxArgs, file: &RunConfig) -> CliResult<i32> {
    let s = &file.softapprox;
    let phi = parse_scalar(&required(a.phi.clone().or_else(|| s.phi.clone()), "phi")?)?;
    let psi = parse_scalar(&required(a.psi.clone().or_else(|| s.psi.clone()), "psi")?)?;
    let i = approx_inputs(a, s)?;
    let model = SoftApproxModel::new(i.c, i.d, i.l, i.r, i.z, phi, psi)?;
    let cfg = solver_config(
        DualFBConfig::new(&model.to_problem()),
        &a.solve,
        &file.solver,
    );
    let mut run = Run::new(ctx, &a.solve, &file.solver);
    let res = soft_best_approx_observed(&model, &cfg, run.observer())?;
    emit_vector(
        a.output.as_deref().or(s.output.as_deref()),
        res.x.as_slice(),
    )?;
    run.finish(ctx, &res)
}

pub fn potter_arun(ctx: Ctx, a: &PotterArunArgs, file: &RunConfig) -> CliResult<i32> {
    let s = &file.potter_arun;
    let rows = read_matrix_csv(&required(a.s.clone().or_else(|| s.s.clone()), "s")?)?;
    let rho = read_vector_csv(&required(a.rho.clone().or_else(|| s.rho.clone()), "rho")?)?;
    let c = parse_set(
        &pick(a.c.clone(), s.c.clone(), "whole".into()),
        rows[0].len(),
    )?;
    let model = PotterArunModel::new(c, rows, rho)?;
    let cfg = solver_config(
        DualFBConfig::new(&model.to_problem()),
        &a.solve,
        &file.solver,
    );
    let mut run = Run::new(ctx, &a.solve, &file.solver);
    let res = potter_arun_observed(&model, &cfg, run.observer())?;
    emit_vector(
        a.output.as_deref().or(s.output.as_deref()),
        res.x.as_slice(),
    )?;
    if ctx.verbose {
        eprintln!("dual residual {:.3e}", model.residual(res.v.as_slice()));
    }
    run.finish(ctx, &res)
}

fn scalar_from_flags(a: &ProxEvalArgs, kind: &str) -> CliResult<ScalarFun> {
    let alpha = || required(a.alpha, "alpha");
    let f = match kind {
        "zero" => ScalarFun::Zero,
        "power" => ScalarFun::power(num(&required(a.p.clone(), "p")?, "p")?, alpha()?)?,
        "neg_log" => ScalarFun::neg_log(alpha()?)?,
        "log_barrier" => ScalarFun::log_barrier(required(a.omega, "omega")?)?,
        "huber" => ScalarFun::huber(required(a.omega, "omega")?, required(a.tau, "tau")?)?,
        k => return Err(usage(format!("unknown function {k:?}"))),
    };
    Ok(f)
}

/// Prints `prox_{γf}(x)` (or the conjugate's) as one comma-separated line.
pub fn prox_eval(_ctx: Ctx, a: &ProxEvalArgs) -> CliResult<i32> {
    let x: Vec<f64> =
        a.x.split(',')
            .map(|t| num(t, "x"))
            .collect::<CliResult<_>>()?;
    let n = x.len();
    let kind = a.fun.replace('-', "_");
    let set = || parse_set(&required(a.set.clone(), "set")?, n);
    let f = match kind.as_str() {
        "indicator" => ProxFunction::indicator(set()?),
        "support" => ProxFunction::support(set()?),
        "dist_sq" => ProxFunction::dist_sq(set()?, required(a.alpha, "alpha")?)?,
        "sq_minus_dist" => ProxFunction::sq_minus_dist(set()?, required(a.alpha, "alpha")?)?,
        "power_of_dist" => ProxFunction::phi_of_dist(scalar_from_flags(a, "power")?, set()?)?,
        k => ProxFunction::scalar_lift(scalar_from_flags(a, k)?, n)?,
    };
    if !(a.gamma.is_finite() && a.gamma > 0.0) {
        return Err(usage(format!("gamma must be positive, got {}", a.gamma)));
    }
    let p = if a.conjugate {
        f.prox_conj_vec(a.gamma, &x)?
    } else {
        f.prox_vec(a.gamma, &x)?
    };
    // `+ 0.0` turns a negative zero into zero
    let line: Vec<String> = p.iter().map(|v| (v + 0.0).to_string()).collect();
    println!("{}", line.join(","));
    Ok(EXIT_OK)
}

/// Exit 0 when every suite passes, 1 otherwise.
pub fn verify(ctx: Ctx, a: &VerifyArgs, file: &RunConfig) -> CliResult<i32> {
    let s = &file.verify;
    let suite = pick(a.suite.clone(), s.suite.clone(), "all".into());
    let cases = pick(a.cases, s.cases, 100);
    let seed = pick(a.seed, s.seed, 0);
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        vec![suite.as_str()]
    };
    let mut ok = true;
    for name in names {
        let rep = run_suite(name, cases, seed)?;
        ok &= rep.passed();
        if !ctx.quiet || !rep.passed() {
            println!("{rep}");
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_INPUT })
}
