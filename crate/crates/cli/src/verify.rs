//! Seeded self-checks of the prox catalog and the image operators against
//! independent references: the grid oracle, Moreau's decomposition, firm
//! nonexpansiveness and the gradient/divergence adjoint pair.

use std::fmt;

use dualfb_core::image::GradientMap;
use dualfb_core::linop::{power_iteration_norm, DenseMatrix};
use dualfb_core::oracle::{grid_argmin_scalar, GridSpec};
use dualfb_core::prox::{QuadTerm, QuadraticFn, SeparableBasis, SumQuadratics, TightFrame};
use dualfb_core::{
    discrete_divergence, discrete_gradient, scalar_prox, ConvexSet, GradField, ImageGrid, LinOp,
    ProxFunction, ScalarFun,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, CliResult};

pub const SUITES: [&str; 4] = ["prox-grid", "moreau", "nonexpansive", "adjoint"];

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Largest observed violation measure (deviation or residual).
    pub worst: f64,
    pub tol: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            cases: 0,
            worst: 0.0,
            tol,
            failures: Vec::new(),
        }
    }

    /// Records one case whose violation is `err`.
    fn check(&mut self, err: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        if err > self.worst || err.is_nan() {
            self.worst = err;
        }
        if !(err <= self.tol) {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {}: {} cases, worst {:.3e} (tolerance {:.0e})",
            self.name, self.cases, self.worst, self.tol
        )?;
        for m in self.failures.iter().take(5) {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

pub fn run_suite(name: &str, cases: usize, seed: u64) -> CliResult<SuiteReport> {
    match name {
        "prox-grid" => prox_grid(cases, seed),
        "moreau" => moreau(cases, seed),
        "nonexpansive" => nonexpansive(cases, seed),
        "adjoint" => adjoint(cases, seed),
        s => Err(usage(format!(
            "unknown suite {s:?}; expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

/// One function of every scalar kind, with every power exponent.
pub fn scalar_kinds() -> Vec<(String, ScalarFun)> {
    let ok = |r: dualfb_core::Result<ScalarFun>| r.expect("catalog parameters are valid");
    let mut v = vec![("zero".to_string(), ScalarFun::Zero)];
    for (name, p) in [
        ("1", 1.0),
        ("4/3", 4.0 / 3.0),
        ("3/2", 1.5),
        ("2", 2.0),
        ("3", 3.0),
        ("4", 4.0),
    ] {
        v.push((format!("power {name}"), ok(ScalarFun::power(p, 0.7))));
    }
    v.push(("neg_log".into(), ok(ScalarFun::neg_log(0.8))));
    v.push(("log_barrier".into(), ok(ScalarFun::log_barrier(1.5))));
    v.push(("huber".into(), ok(ScalarFun::huber(1.0, 0.5))));
    v.push((
        "plus_support".into(),
        ok(ScalarFun::plus_support(
            ok(ScalarFun::power(2.0, 0.5)),
            -0.3,
            0.6,
        )),
    ));
    v.push((
        "plus_indicator".into(),
        ok(ScalarFun::plus_indicator(
            ok(ScalarFun::power(1.0, 0.4)),
            -1.0,
            2.0,
        )),
    ));
    v
}

fn sets_2d() -> Vec<(&'static str, ConvexSet)> {
    let ok = |r: dualfb_core::Result<ConvexSet>| r.expect("set parameters are valid");
    vec![
        (
            "box",
            ok(ConvexSet::boxed(vec![-1.0, -0.4], vec![0.6, 1.2])),
        ),
        ("halfspace", ok(ConvexSet::halfspace(vec![1.5, -0.5], 0.3))),
        ("l2 ball", ok(ConvexSet::l2_ball(vec![0.2, -0.1], 0.9))),
        ("l1 ball", ok(ConvexSet::l1_ball(2, 1.1))),
        ("linf ball", ok(ConvexSet::linf_ball(2, 0.7))),
        ("orthant", ok(ConvexSet::nonneg_orthant(2))),
        (
            "line",
            ok(ConvexSet::affine(vec![vec![1.2, 0.4]], vec![0.3])),
        ),
        ("point", ok(ConvexSet::singleton(vec![0.4, -0.2]))),
        ("plane", ok(ConvexSet::whole(2))),
    ]
}

fn rotation(t: f64, s: f64) -> Vec<Vec<f64>> {
    vec![
        vec![s * t.cos(), s * t.sin()],
        vec![-s * t.sin(), s * t.cos()],
    ]
}

/// Every vector kind on `ℝ²`.
pub fn vector_kinds() -> Vec<(String, ProxFunction)> {
    fn ok<T>(r: dualfb_core::Result<T>) -> T {
        r.expect("catalog parameters are valid")
    }
    let mut v = vec![("zero".to_string(), ProxFunction::zero(2))];
    for (name, c) in sets_2d() {
        v.push((
            format!("indicator of {name}"),
            ProxFunction::indicator(c.clone()),
        ));
        v.push((
            format!("support of {name}"),
            ProxFunction::support(c.clone()),
        ));
        v.push((
            format!("squared distance to {name}"),
            ok(ProxFunction::dist_sq(c.clone(), 0.7)),
        ));
        v.push((
            format!("quadratic minus distance to {name}"),
            ok(ProxFunction::sq_minus_dist(c.clone(), 1.3)),
        ));
        let phi = ok(ScalarFun::power(4.0 / 3.0, 0.6));
        v.push((
            format!("power of distance to {name}"),
            ok(ProxFunction::phi_of_dist(phi, c)),
        ));
    }
    v.push((
        "support plus norm penalty".into(),
        ok(ProxFunction::support_plus_phi_norm(
            ok(ConvexSet::l2_ball(vec![0.2, -0.1], 0.5)),
            ok(ScalarFun::power(2.0, 0.8)),
        )),
    ));
    let a = ok(LinOp::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]));
    v.push((
        "quadratic".into(),
        ProxFunction::Quadratic(ok(QuadraticFn::new(a, vec![0.3, -0.2], 0.0))),
    ));
    let terms = vec![
        QuadTerm {
            alpha: 0.8,
            t: ok(LinOp::from_rows(&[vec![1.0, 0.3]])),
            r: vec![0.5],
        },
        QuadTerm {
            alpha: 1.5,
            t: LinOp::identity(2),
            r: vec![-0.2, 0.1],
        },
    ];
    v.push((
        "sum of quadratics".into(),
        ProxFunction::SumQuadratics(ok(SumQuadratics::new(terms))),
    ));
    let basis = ok(SeparableBasis::new(
        vec![
            ok(ScalarFun::power(1.0, 0.5)),
            ok(ScalarFun::huber(0.8, 1.0)),
        ],
        rotation(0.4, 1.0),
    ));
    v.push((
        "separable in a basis".into(),
        ProxFunction::SeparableBasis(basis),
    ));
    let m = LinOp::new(ok(DenseMatrix::from_rows(&rotation(0.9, 2.0))));
    let inner = ok(ProxFunction::scalar_lift(ok(ScalarFun::power(1.0, 0.3)), 2));
    v.push((
        "tight frame".into(),
        ProxFunction::TightFrame(ok(TightFrame::new(inner, m, 4.0))),
    ));
    for (name, phi) in scalar_kinds() {
        v.push((
            format!("lift of {name}"),
            ok(ProxFunction::scalar_lift(phi, 2)),
        ));
    }
    v
}

fn point(r: &mut ChaCha8Rng) -> Vec<f64> {
    vec![r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scalar proxes against a grid minimization of `γφ(y) + ½(y − ξ)²` on a
/// `1e-3` grid; agreement to `1e-5`.
pub fn prox_grid(cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rep = SuiteReport::new("prox-grid", 1e-5);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    for (name, phi) in scalar_kinds() {
        for _ in 0..cases {
            let g = r.random_range(0.1..3.0);
            let xi = r.random_range(-4.0..4.0);
            let p = scalar_prox(&phi, g, xi)?;
            let w = xi.abs() + 5.0;
            let o = grid_argmin_scalar(&phi, g, xi, &GridSpec::interval(-w, w, 1e-3)?)?;
            rep.check((p - o).abs(), || {
                format!("{name}: gamma={g} xi={xi}: prox {p} grid {o}")
            });
        }
    }
    Ok(rep)
}

/// `x = prox_{γf}(x) + γ prox_{f*/γ}(x/γ)` for every scalar and vector
/// kind.
pub fn moreau(cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rep = SuiteReport::new("moreau", 1e-10);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let kinds = vector_kinds();
    for _ in 0..cases {
        for (name, f) in &kinds {
            let g = r.random_range(0.1..3.0);
            let x = point(&mut r);
            let p = f.prox_vec(g, &x)?;
            let q = f.prox_conj_vec(1.0 / g, &[x[0] / g, x[1] / g])?;
            let res = ((x[0] - p[0] - g * q[0]).powi(2) + (x[1] - p[1] - g * q[1]).powi(2)).sqrt();
            rep.check(res, || {
                format!("{name}: gamma={g} x={x:?}: residual {res:e}")
            });
        }
    }
    Ok(rep)
}

/// `‖Px − Py‖² ≤ ⟨x − y, Px − Py⟩` for scalar and vector proxes; the
/// recorded violation is the negative slack.
pub fn nonexpansive(cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rep = SuiteReport::new("nonexpansive", 1e-10);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let scalars = scalar_kinds();
    let kinds = vector_kinds();
    for _ in 0..cases {
        for (name, phi) in &scalars {
            let g = r.random_range(0.1..3.0);
            let (x, y) = (r.random_range(-4.0..4.0), r.random_range(-4.0..4.0));
            let d = scalar_prox(phi, g, x)? - scalar_prox(phi, g, y)?;
            let slack = (x - y) * d - d * d;
            rep.check((-slack).max(0.0), || {
                format!("{name}: x={x} y={y}: slack {slack:e}")
            });
        }
        for (name, f) in &kinds {
            let g = r.random_range(0.1..3.0);
            let (x, y) = (point(&mut r), point(&mut r));
            let (p, q) = (f.prox_vec(g, &x)?, f.prox_vec(g, &y)?);
            let d = [p[0] - q[0], p[1] - q[1]];
            let slack = dot(&[x[0] - y[0], x[1] - y[1]], &d) - dot(&d, &d);
            rep.check((-slack).max(0.0), || {
                format!("{name}: x={x:?} y={y:?}: slack {slack:e}")
            });
        }
    }
    Ok(rep)
}

/// `|⟨∇x, y⟩ + ⟨x, div y⟩| ≤ 1e-12·(1 + ‖x‖‖y‖)` on random 8×8 pairs, and
/// the power-iteration estimate of `‖∇‖` stays below `2√2` for
/// `N ∈ {4, 8, 16}`.
pub fn adjoint(cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rep = SuiteReport::new("adjoint", 1e-12);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = 8;
    for _ in 0..cases {
        let x = ImageGrid::new(n, (0..n * n).map(|_| r.random_range(-1.0..1.0)).collect())?;
        let c1 = (0..n * n).map(|_| r.random_range(-1.0..1.0)).collect();
        let c2 = (0..n * n).map(|_| r.random_range(-1.0..1.0)).collect();
        let y = GradField::new(n, c1, c2)?;
        let lhs = discrete_gradient(&x).inner(&y);
        let rhs = dot(x.pixels(), discrete_divergence(&y).pixels());
        let nx = dot(x.pixels(), x.pixels()).sqrt();
        let ny = y.inner(&y).sqrt();
        let rel = (lhs + rhs).abs() / (1.0 + nx * ny);
        rep.check(rel, || format!("⟨∇x,y⟩ = {lhs}, ⟨x,div y⟩ = {rhs}"));
    }
    let bound = 2.0 * std::f64::consts::SQRT_2;
    for n in [4, 8, 16] {
        let est = power_iteration_norm(&GradientMap::new(n, 1.0), 2000, seed ^ n as u64);
        let excess = (est - bound).max(0.0);
        rep.check(excess, || format!("N={n}: estimate {est} exceeds {bound}"));
    }
    Ok(rep)
}
