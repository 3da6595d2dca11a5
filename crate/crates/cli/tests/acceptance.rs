//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p dualfb --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use dualfb::pgm::{encode_pgm, PgmFormat};
use dualfb::trace::TRACE_HEADER;
use dualfb::verify;
use dualfb_core::apps::{
    best_feasible_approx_observed, dict_denoise_observed, potter_arun, potter_arun_observed,
    soft_best_approx_observed, tv_denoise, tv_denoise_observed, tv_objective, BestApproxModel,
    DictModel, FourThirdsModel, PotterArunModel, TvModel,
};
use dualfb_core::oracle::{
    chambolle_reference, dykstra_reference, min_norm_closed_form, primal_grid_oracle, GridSpec,
};
use dualfb_core::solver::{
    solve_dual_fb_observed, solve_dykstra_mode_observed, ErrorSeq, IterView,
};
use dualfb_core::{
    dual_objective, primal_objective, solve_dual_fb, ConvexSet, DualFBConfig, ImageGrid, LinOp,
    ProblemInstance, ProxFunction, ScalarFun, Termination, VecR,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uvec(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| r.random_range(lo..hi)).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(name: &str, cases: usize, limit: Option<Duration>) -> Outcome {
    let t = Instant::now();
    let rep = ok(verify::run_suite(name, cases, 0x5eed))?;
    let el = t.elapsed();
    ensure(rep.passed(), || rep.to_string())?;
    if let Some(l) = limit {
        ensure(el <= l, || format!("took {el:.1?}, limit {l:?}"))?;
    }
    Ok(format!("{} cases, worst {:.2e}", rep.cases, rep.worst))
}

fn criterion_1() -> Outcome {
    suite("prox-grid", 100, Some(Duration::from_secs(30)))
}

fn criterion_2() -> Outcome {
    suite("moreau", 50, None)
}

fn criterion_3() -> Outcome {
    suite("nonexpansive", 200, None)
}

fn criterion_4() -> Outcome {
    suite("adjoint", 50, None)
}

fn set_kind(r: &mut ChaCha8Rng, d: usize, kind: usize) -> ConvexSet {
    let c = match kind % 7 {
        0 => ConvexSet::boxed(uvec(r, d, -1.5, -0.2), uvec(r, d, 0.2, 1.5)),
        1 => {
            let mut u = uvec(r, d, -1.0, 1.0);
            u[0] += 1.5;
            ConvexSet::halfspace(u, r.random_range(0.2..1.0))
        }
        2 => ConvexSet::l2_ball(uvec(r, d, -0.2, 0.2), r.random_range(0.6..1.5)),
        3 => ConvexSet::l1_ball(d, r.random_range(0.6..1.5)),
        4 => ConvexSet::linf_ball(d, r.random_range(0.6..1.5)),
        5 => ConvexSet::nonneg_orthant(d),
        _ => {
            let mut row = uvec(r, d, -1.0, 1.0);
            row[0] += 1.5;
            ConvexSet::affine(vec![row], vec![r.random_range(-0.5..0.5)])
        }
    };
    c.expect("valid set")
}

/// indicator, support, power lift, power of a distance.
fn function_kind(r: &mut ChaCha8Rng, kind: usize, set_seed: usize) -> ProxFunction {
    let d = 2;
    // sets with interior around the origin keep the instances qualified
    let set_pick = [0, 1, 2, 3, 4][set_seed % 5];
    match kind % 4 {
        0 => ProxFunction::indicator(set_kind(r, d, set_pick)),
        // a support function of an unbounded set is finite on a cone only
        1 => ProxFunction::support(set_kind(r, d, [0, 2, 3, 4][set_seed % 4])),
        2 => {
            let p = [1.0, 4.0 / 3.0, 1.5, 2.0, 3.0, 4.0][set_seed % 6];
            ProxFunction::scalar_lift(ScalarFun::power(p, r.random_range(0.2..1.5)).unwrap(), d)
                .unwrap()
        }
        _ => {
            let phi = ScalarFun::power(
                [1.0, 4.0 / 3.0, 2.0][set_seed % 3],
                r.random_range(0.2..1.5),
            )
            .unwrap();
            ProxFunction::phi_of_dist(phi, set_kind(r, d, set_pick)).unwrap()
        }
    }
}

const KIND_NAMES: [&str; 4] = ["indicator", "support", "power lift", "power of distance"];

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for i in 0..20 {
        let mut r = rng(0xa5 + i as u64);
        let (fk, gk) = if i < 16 {
            (i % 4, i / 4)
        } else {
            (i % 4, (i + 1) % 4)
        };
        let f = function_kind(&mut r, fk, i);
        let g = function_kind(&mut r, gk, i + 2);
        let mut rows = vec![uvec(&mut r, 2, -1.0, 1.0), uvec(&mut r, 2, -1.0, 1.0)];
        rows[0][0] += 1.0;
        rows[1][1] += 1.0;
        let p = ok(ProblemInstance::new(
            f,
            g,
            ok(LinOp::from_rows(&rows))?,
            ok(VecR::primal(uvec(&mut r, 2, -1.5, 1.5)))?,
            ok(VecR::dual(uvec(&mut r, 2, -0.1, 0.1)))?,
        ))?;
        let cfg = DualFBConfig::new(&p).with_max_iter(500_000).with_tol(1e-13);
        let t = Instant::now();
        let res = ok(solve_dual_fb(&p, &cfg))?;
        let el = t.elapsed();
        slowest = slowest.max(el);
        let label = || format!("instance {i} (f {}, g {})", KIND_NAMES[fk], KIND_NAMES[gk]);
        ensure(el <= Duration::from_secs(5), || {
            format!("{}: solve took {el:.1?}", label())
        })?;
        // coarse scan, then a 1e-3 grid around its winner
        let coarse = primal_grid_oracle(&p, &ok(GridSpec::cube(2, -3.5, 3.5, 1e-2))?)
            .map_err(|e| format!("{}: coarse grid: {e}", label()))?;
        let lo: Vec<f64> = coarse.as_slice().iter().map(|v| v - 0.05).collect();
        let hi: Vec<f64> = coarse.as_slice().iter().map(|v| v + 0.05).collect();
        let fine = primal_grid_oracle(&p, &ok(GridSpec::new(lo, hi, 1e-3))?)
            .map_err(|e| format!("{}: fine grid: {e}; solver {:?}", label(), res.x.as_slice()))?;
        let d = dist(res.x.as_slice(), fine.as_slice());
        worst = worst.max(d);
        ensure(d <= 2e-3, || {
            format!(
                "{}: solver {:?} grid {:?}, {:?} after {} iterations, objectives {:?} and {:?}",
                label(),
                res.x.as_slice(),
                fine.as_slice(),
                res.termination,
                res.iterations,
                primal_objective(&p, &res.x),
                primal_objective(&p, &fine)
            )
        })?;
    }
    Ok(format!(
        "20 instances, worst distance {worst:.2e}, slowest solve {slowest:.2?}"
    ))
}

fn criterion_6() -> Outcome {
    let mut r = rng(0xd7);
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let d = 3;
        let f = ProxFunction::indicator(set_kind(&mut r, d, case));
        let g = ProxFunction::indicator(set_kind(&mut r, d, case / 3 + 1));
        let z = ok(VecR::primal(uvec(&mut r, d, -3.0, 3.0)))?;
        let reference = ok(dykstra_reference(&f, &g, &z, 500))?;
        let mut xs: Vec<Vec<f64>> = Vec::new();
        let mut vs: Vec<Vec<f64>> = Vec::new();
        ok(solve_dykstra_mode_observed(&f, &g, &z, 500, 0.0, |it| {
            xs.push(it.x.to_vec());
            vs.push(it.v.to_vec());
        }))?;
        // an early stop means an exact fixed point, which then repeats
        for (n, step) in reference.iter().enumerate() {
            let k = n.min(xs.len() - 1);
            let e = dist(&xs[k], &step.x).max(dist(&vs[k], &step.p));
            worst = worst.max(e);
            ensure(e <= 1e-12, || {
                format!("pair {case}, step {n}: deviation {e:e}")
            })?;
        }
    }
    Ok(format!("20 pairs x 500 steps, worst {worst:.2e}"))
}

fn noisy_image(n: usize, seed: u64) -> ImageGrid {
    let mut r = rng(seed);
    let noise = uvec(&mut r, n * n, -0.1, 0.1);
    let c = n as f64;
    ImageGrid::from_fn(n, |k, l| {
        let inside = (k as f64 - c / 2.0).abs() + (l as f64 - c / 3.0).abs() < c / 3.0;
        (if inside { 0.8 } else { 0.2 }) + noise[k * n + l]
    })
    .unwrap()
}

fn criterion_7() -> Outcome {
    let z = noisy_image(16, 0x16);
    let mu = 0.2;
    let m = ok(TvModel::new(z.clone(), ProxFunction::zero(256), mu, 2.0))?;
    let cfg = m.default_config().with_max_iter(200).with_tol(0.0);
    let tau = mu * cfg.gamma.at(0);
    let mut ours: Vec<Vec<f64>> = Vec::new();
    ok(tv_denoise_observed(&m, &cfg, |it| {
        ours.push(it.v_next.to_vec())
    }))?;
    let reference = chambolle_reference(&z, mu, tau, 200);
    ensure(ours.len() == 200, || format!("ran {} steps", ours.len()))?;
    let mut worst: f64 = 0.0;
    for (n, (a, b)) in ours.iter().zip(&reference).enumerate() {
        let e = dist(a, b);
        worst = worst.max(e);
        ensure(e <= 1e-12, || format!("step {n}: deviation {e:e}"))?;
    }
    Ok(format!("200 steps on 16x16, worst {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let s = vec![
        vec![0.5, 0.1, -0.2, 0.3],
        vec![-0.1, 0.4, 0.3, 0.0],
        vec![0.2, -0.2, 0.1, 0.45],
    ];
    let rho = vec![0.3, -0.2, 0.5];
    let m = ok(PotterArunModel::new(
        ok(ConvexSet::whole(4))?,
        s.clone(),
        rho.clone(),
    ))?;
    let cfg = DualFBConfig::new(&m.to_problem())
        .with_max_iter(1_000_000)
        .with_tol(1e-15);
    let res = ok(potter_arun(&m, &cfg))?;
    let expect = ok(min_norm_closed_form(&s, &rho))?;
    let d1 = ok(res.x.distance(&expect))?;
    let r1 = m.residual(res.v.as_slice());
    ensure(d1 <= 1e-6, || {
        format!("unconstrained: distance {d1:e} to the minimum-norm solution")
    })?;
    ensure(r1 <= 1e-5, || format!("unconstrained: residual {r1:e}"))?;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = ok(PotterArunModel::new(
        ok(ConvexSet::nonneg_orthant(2))?,
        vec![vec![h, -h]],
        vec![h],
    ))?;
    let cfg = DualFBConfig::new(&m.to_problem())
        .with_max_iter(1_000_000)
        .with_tol(1e-15);
    let res = ok(potter_arun(&m, &cfg))?;
    let d2 = dist(res.x.as_slice(), &[1.0, 0.0]);
    let r2 = m.residual(res.v.as_slice());
    ensure(d2 <= 1e-6, || {
        format!("orthant: x = {:?}", res.x.as_slice())
    })?;
    ensure(r2 <= 1e-5, || format!("orthant: residual {r2:e}"))?;
    Ok(format!(
        "distances {d1:.1e}, {d2:.1e}; residuals {r1:.1e}, {r2:.1e}"
    ))
}

fn standard_suite() -> Vec<(&'static str, ProblemInstance)> {
    let mut r = rng(0x5a17e);
    let random_l = |r: &mut ChaCha8Rng| {
        LinOp::from_rows(&[uvec(r, 2, -0.8, 0.8), uvec(r, 2, -0.8, 0.8)]).unwrap()
    };
    let pv = |v: Vec<f64>| VecR::primal(v).unwrap();
    let dv = |v: Vec<f64>| VecR::dual(v).unwrap();
    let l1 = random_l(&mut r);
    let l3 = random_l(&mut r);
    vec![
        (
            "box / l2 support",
            ProblemInstance::new(
                ProxFunction::indicator(
                    ConvexSet::boxed(vec![-1.0, -0.5], vec![0.5, 1.0]).unwrap(),
                ),
                ProxFunction::support(ConvexSet::l2_ball(vec![0.1, 0.0], 0.8).unwrap()),
                l1,
                pv(vec![2.0, -1.5]),
                dv(vec![0.3, -0.1]),
            )
            .unwrap(),
        ),
        (
            "power lift / box constraint",
            ProblemInstance::new(
                ProxFunction::scalar_lift(ScalarFun::power(4.0 / 3.0, 0.5).unwrap(), 2).unwrap(),
                ProxFunction::indicator(
                    ConvexSet::boxed(vec![-0.2, -0.3], vec![0.2, 0.1]).unwrap(),
                ),
                LinOp::from_rows(&[vec![0.9, 0.2], vec![-0.3, 0.7]]).unwrap(),
                pv(vec![1.5, 1.0]),
                dv(vec![0.1, 0.05]),
            )
            .unwrap(),
        ),
        (
            "distance to halfspace / huber lift",
            ProblemInstance::new(
                ProxFunction::phi_of_dist(
                    ScalarFun::power(1.0, 0.6).unwrap(),
                    ConvexSet::halfspace(vec![1.0, 1.0], 0.0).unwrap(),
                )
                .unwrap(),
                ProxFunction::scalar_lift(ScalarFun::huber(0.5, 1.0).unwrap(), 2).unwrap(),
                l3,
                pv(vec![1.0, 2.0]),
                dv(vec![-0.4, 0.2]),
            )
            .unwrap(),
        ),
        (
            "zero / l1 support",
            ProblemInstance::new(
                ProxFunction::zero(2),
                ProxFunction::support(ConvexSet::l1_ball(3, 0.7).unwrap()),
                LinOp::from_rows(&[vec![0.5, 0.1], vec![0.2, -0.6], vec![0.3, 0.3]]).unwrap(),
                pv(vec![-1.0, 0.8]),
                dv(vec![0.0, 0.2, -0.3]),
            )
            .unwrap(),
        ),
    ]
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, p) in standard_suite() {
        let tight = DualFBConfig::new(&p).with_max_iter(200_000).with_tol(1e-13);
        let mut r = rng(0x0a);
        let mut xs = Vec::new();
        for _ in 0..5 {
            let v0 = ok(VecR::dual(uvec(&mut r, p.dim_dual(), -2.0, 2.0)))?;
            let res = ok(solve_dual_fb(&p, &tight.clone().with_v0(v0)))?;
            ensure(res.termination != Termination::MaxIter, || {
                format!("{name}: no convergence")
            })?;
            xs.push(res.x.into_vec());
        }
        let mut u = vec![0.0; p.dim_dual()];
        u[0] = 1.0;
        let mut cfg = tight.clone();
        cfg.a_seq = ErrorSeq::Geometric {
            direction: u,
            ratio: 0.5,
        };
        xs.push(ok(solve_dual_fb(&p, &cfg))?.x.into_vec());
        for a in &xs {
            for b in &xs {
                let d = dist(a, b);
                worst = worst.max(d);
                ensure(d <= 1e-4, || format!("{name}: {a:?} vs {b:?}"))?;
            }
        }
    }
    Ok(format!("4 instances x 6 runs, worst pairwise {worst:.2e}"))
}

type Trace = Vec<Vec<f64>>;

fn collect(into: &mut Trace, negate: bool) -> impl FnMut(&IterView<'_>) + '_ {
    move |it| {
        into.push(
            it.v_next
                .iter()
                .map(|a| if negate { -a } else { *a })
                .collect(),
        )
    }
}

/// Step-by-step agreement; a loop may stop early on an exact fixed point.
fn same_iterates(name: &str, a: &Trace, b: &Trace, min_len: usize) -> Result<f64, String> {
    let k = a.len().min(b.len());
    ensure(k >= min_len, || {
        format!("{name}: only {k} comparable steps")
    })?;
    let mut worst: f64 = 0.0;
    for i in 0..k {
        let e = dist(&a[i], &b[i]);
        worst = worst.max(e);
        ensure(e <= 1e-10, || format!("{name}: step {i} deviation {e:e}"))?;
    }
    // whichever loop ran longer must just repeat the shared fixed point
    let (short, long) = if a.len() == k { (a, b) } else { (b, a) };
    for (i, extra) in long.iter().enumerate().skip(k) {
        let e = dist(extra, &short[k - 1]);
        worst = worst.max(e);
        ensure(e <= 1e-10, || {
            format!("{name}: step {i} moves after the other loop stopped")
        })?;
    }
    Ok(worst)
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    let generic = |p: &ProblemInstance, cfg: &DualFBConfig| -> Result<Trace, String> {
        let mut g = Trace::new();
        ok(solve_dual_fb_observed(p, cfg, collect(&mut g, false)))?;
        Ok(g)
    };

    // best approximation
    let m = ok(BestApproxModel::new(
        ok(ConvexSet::halfspace(vec![1.0, 1.0, 1.0], 0.5))?,
        ok(ConvexSet::boxed(vec![-0.1, -0.2], vec![0.1, 0.0]))?,
        ok(LinOp::from_rows(&[
            vec![0.4, -0.2, 0.1],
            vec![0.3, 0.3, -0.5],
        ]))?,
        ok(VecR::dual(vec![0.2, -0.1]))?,
        ok(VecR::primal(vec![1.0, 2.0, -0.5]))?,
    ))?;
    let cfg = DualFBConfig::new(&m.to_problem())
        .with_max_iter(300)
        .with_tol(0.0)
        .with_lambda(0.8);
    let mut a = Trace::new();
    ok(best_feasible_approx_observed(
        &m,
        &cfg,
        collect(&mut a, false),
    ))?;
    worst = worst.max(same_iterates(
        "best approximation",
        &a,
        &generic(&m.to_problem(), &cfg)?,
        50,
    )?);

    // Potter–Arun; its dual variable is the negated generic one
    let m = ok(PotterArunModel::new(
        ok(ConvexSet::boxed(vec![-1.0, 0.0, -0.5], vec![1.0, 2.0, 0.5]))?,
        vec![vec![0.3, 0.4, 0.1], vec![-0.2, 0.5, 0.3]],
        vec![0.2, 0.3],
    ))?;
    let cfg = DualFBConfig::new(&m.to_problem())
        .with_max_iter(300)
        .with_tol(0.0);
    let mut a = Trace::new();
    ok(potter_arun_observed(&m, &cfg, collect(&mut a, true)))?;
    worst = worst.max(same_iterates(
        "potter-arun",
        &a,
        &generic(&m.to_problem(), &cfg)?,
        50,
    )?);

    // soft best approximation, general loop and the 4/3-power loop
    let l = ok(LinOp::from_rows(&[
        vec![0.3, 0.1, -0.2, 0.4],
        vec![-0.1, 0.35, 0.2, 0.0],
        vec![0.2, -0.3, 0.1, 0.25],
    ]))?;
    let ft = ok(FourThirdsModel::new(
        ok(ConvexSet::halfspace(vec![1.0, -0.5, 0.25, 1.0], -0.3))?,
        l,
        ok(VecR::dual(vec![0.4, -0.2, 0.1]))?,
        ok(VecR::primal(vec![1.5, -0.5, 2.0, 0.7]))?,
        0.8,
        0.3,
    ))?;
    let soft = ok(ft.to_soft_model())?;
    let cfg = ok(ft.config(300, 0.0))?;
    let g = generic(&soft.to_problem(), &cfg)?;
    let mut a = Trace::new();
    ok(soft_best_approx_observed(
        &soft,
        &cfg,
        collect(&mut a, false),
    ))?;
    worst = worst.max(same_iterates("soft approximation", &a, &g, 20)?);
    let mut a = Trace::new();
    ok(ft.solve_observed(300, 0.0, collect(&mut a, false)))?;
    worst = worst.max(same_iterates("4/3-power soft approximation", &a, &g, 20)?);

    // dictionary
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = ok(DictModel::new(
        vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![h, h]],
        2.0,
        vec![
            ok(ScalarFun::power(1.0, 0.3))?,
            ok(ScalarFun::huber(0.5, 1.0))?,
            ok(ScalarFun::power(2.0, 0.7))?,
        ],
        ProxFunction::indicator(ok(ConvexSet::l2_ball(vec![0.0, 0.0], 2.0))?),
        ok(VecR::primal(vec![2.5, -1.0]))?,
    ))?;
    let cfg = DualFBConfig::new(&m.to_problem())
        .with_max_iter(300)
        .with_tol(0.0)
        .with_lambda(0.9);
    let mut a = Trace::new();
    ok(dict_denoise_observed(&m, &cfg, collect(&mut a, false)))?;
    worst = worst.max(same_iterates(
        "dictionary",
        &a,
        &generic(&m.to_problem(), &cfg)?,
        20,
    )?);

    // total variation, every pair norm; the generic loop has its own ε box
    let z = ok(ImageGrid::from_fn(5, |k, l| {
        ((k * 7 + l * 3) % 5) as f64 / 5.0
    }))?;
    for p in [1.0, 2.0, f64::INFINITY] {
        let f = ProxFunction::indicator(ok(ConvexSet::boxed(vec![0.0; 25], vec![0.7; 25]))?);
        let m = ok(TvModel::new(z.clone(), f, 0.5, p))?;
        let cfg = m
            .default_config()
            .with_max_iter(200)
            .with_tol(0.0)
            .with_lambda(0.9);
        let mut a = Trace::new();
        ok(tv_denoise_observed(&m, &cfg, collect(&mut a, false)))?;
        let mut gcfg = cfg.clone();
        gcfg.epsilon = 0.01;
        worst = worst.max(same_iterates(
            &format!("tv p={p}"),
            &a,
            &generic(&m.to_problem(), &gcfg)?,
            200,
        )?);
    }
    Ok(format!(
        "5 routines (tv with p = 1, 2, inf), worst {worst:.2e}"
    ))
}

fn criterion_11() -> Outcome {
    let z = noisy_image(32, 0x32);
    let mut report = Vec::new();
    for p in [1.0, 2.0, f64::INFINITY] {
        let m = ok(TvModel::new(z.clone(), ProxFunction::zero(1024), 0.1, p))?;
        let cfg = m
            .default_config()
            .with_max_iter(100_000)
            .with_tol(0.0)
            .with_tol_gap(1e-5);
        let t = Instant::now();
        let res = ok(tv_denoise(&m, &cfg))?;
        let el = t.elapsed();
        let x = ok(ImageGrid::new(32, res.x.as_slice().to_vec()))?;
        let (at_x, at_z) = (ok(tv_objective(&m, &x))?, ok(tv_objective(&m, &z))?);
        let prob = m.to_problem();
        let gap = ok(primal_objective(&prob, &res.x))? + ok(dual_objective(&prob, &res.v))?
            - 0.5 * prob.z.norm().powi(2);
        ensure(at_x <= at_z, || {
            format!("p={p}: objective {at_x} above {at_z} at the data")
        })?;
        ensure(gap <= 1e-5, || {
            format!("p={p}: gap {gap:e} after {} iterations", res.iterations)
        })?;
        ensure(el <= Duration::from_secs(10), || {
            format!("p={p}: took {el:.1?}")
        })?;
        report.push(format!("p={p}: gap {gap:.1e} in {el:.2?}"));
    }
    Ok(report.join("; "))
}

fn criterion_12() -> Outcome {
    let dir = ok(tempfile::tempdir())?;
    let bin = env!("CARGO_BIN_EXE_dualfb");
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let run = |args: &[&str]| ok(Command::new(bin).args(args).output());

    let constant = encode_pgm(8, 8, &[0.6; 64], 255, PgmFormat::Raw);
    ok(std::fs::write(path("c.pgm"), &constant))?;
    let o = run(&[
        "tv",
        "--input",
        &path("c.pgm"),
        "--output",
        &path("x.pgm"),
        "--mu",
        "0.1",
        "--p",
        "2",
        "--tol",
        "1e-6",
    ])?;
    ensure(o.status.code() == Some(0), || {
        format!("constant image: exit {:?}", o.status.code())
    })?;
    ensure(ok(std::fs::read(path("x.pgm")))? == constant, || {
        "constant image changed".into()
    })?;

    let px: Vec<f64> = (0..64).map(|i| ((i * 7919) % 97) as f64 / 96.0).collect();
    ok(std::fs::write(
        path("n.pgm"),
        encode_pgm(8, 8, &px, 255, PgmFormat::Plain),
    ))?;
    ok(std::fs::write(path("bad.pgm"), b"P2\n8 8\n255\n1 2 3"))?;
    let (n, x, t) = (path("n.pgm"), path("y.pgm"), path("trace.csv"));
    let bad = path("bad.pgm");
    let matrix: [(Vec<&str>, i32); 5] = [
        (
            vec![
                "tv", "--input", &n, "--output", &x, "--tol", "1e-6", "--trace", &t,
            ],
            0,
        ),
        (
            vec![
                "tv",
                "--input",
                &n,
                "--output",
                &x,
                "--max-iter",
                "3",
                "--tol",
                "1e-12",
            ],
            2,
        ),
        (vec!["tv", "--input", &bad, "--output", &x], 1),
        (vec!["tv", "--input", &n, "--output", &x, "--p", "7"], 1),
        (
            vec![
                "prox-eval",
                "--fun",
                "power",
                "--p",
                "1",
                "--alpha",
                "1",
                "--x",
                "2",
            ],
            0,
        ),
    ];
    for (args, want) in &matrix {
        let o = run(args)?;
        ensure(o.status.code() == Some(*want), || {
            format!("{args:?}: exit {:?}, expected {want}", o.status.code())
        })?;
        if *want == 1 {
            ensure(
                String::from_utf8_lossy(&o.stderr).starts_with("error:"),
                || format!("{args:?}: stderr prefix"),
            )?;
        }
    }

    let text = ok(std::fs::read_to_string(&t))?;
    let mut lines = text.lines();
    ensure(lines.next() == Some(TRACE_HEADER), || "trace header".into())?;
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        ensure(f.len() == 6 && f[0] == i.to_string(), || {
            format!("trace row {i}: {line}")
        })?;
        if !f[4].is_empty() {
            let gap: f64 = ok(f[4].parse())?;
            ensure(gap >= -1e-8, || format!("trace row {i}: gap {gap}"))?;
        }
        rows += 1;
    }
    ensure(rows > 0, || "empty trace".into())?;
    Ok(format!(
        "constant round trip, {} exit-code cases, {rows} trace rows",
        matrix.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("scalar proxes agree with the grid oracle", criterion_1),
        ("Moreau decomposition", criterion_2),
        ("firm nonexpansiveness", criterion_3),
        (
            "gradient/divergence adjointness and norm bound",
            criterion_4,
        ),
        ("solver agrees with the grid oracle", criterion_5),
        ("Dykstra-mode equivalence", criterion_6),
        ("Chambolle reduction", criterion_7),
        ("Potter-Arun recovery", criterion_8),
        ("primal uniqueness and error robustness", criterion_9),
        (
            "specialized routines match the generic solver",
            criterion_10,
        ),
        ("TV objective and gap on a 32x32 image", criterion_11),
        ("CLI end to end", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let el = t.elapsed();
        match out {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}) [{el:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} [{el:.2?}]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
