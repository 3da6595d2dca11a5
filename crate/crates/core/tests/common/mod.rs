#![allow(dead_code)]

use dualfb_core::linop::DenseMatrix;
use dualfb_core::prox::{QuadTerm, QuadraticFn, SeparableBasis, SumQuadratics, TightFrame};
use dualfb_core::{ConvexSet, LinOp, ProxFunction, ScalarFun};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uvec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One representative of every scalar kind, with each power exponent.
pub fn scalar_catalog() -> Vec<(&'static str, ScalarFun)> {
    let mut v = vec![("zero", ScalarFun::Zero)];
    for (name, p) in [
        ("power1", 1.0),
        ("power4/3", 4.0 / 3.0),
        ("power3/2", 1.5),
        ("power2", 2.0),
        ("power3", 3.0),
        ("power4", 4.0),
    ] {
        v.push((name, ScalarFun::power(p, 0.7).unwrap()));
    }
    v.push(("neg_log", ScalarFun::neg_log(0.8).unwrap()));
    v.push(("log_barrier", ScalarFun::log_barrier(1.5).unwrap()));
    v.push(("huber", ScalarFun::huber(1.0, 0.5).unwrap()));
    v.push((
        "plus_support",
        ScalarFun::plus_support(ScalarFun::power(2.0, 0.5).unwrap(), -0.3, 0.6).unwrap(),
    ));
    v.push((
        "plus_indicator",
        ScalarFun::plus_indicator(ScalarFun::power(1.0, 0.4).unwrap(), -1.0, 2.0).unwrap(),
    ));
    v
}

/// A random set of the given kind index (mod 9) in `ℝ^d`, always containing
/// a neighbourhood of a point near the origin unless it is a point or an
/// affine set.
pub fn random_set(rng: &mut ChaCha8Rng, d: usize, kind: usize) -> ConvexSet {
    match kind % 9 {
        0 => {
            let lo = uvec(rng, d, -1.5, -0.1);
            let hi = uvec(rng, d, 0.1, 1.5);
            ConvexSet::boxed(lo, hi).unwrap()
        }
        1 => {
            let mut u = uvec(rng, d, -1.0, 1.0);
            u[0] += 1.5;
            ConvexSet::halfspace(u, rng.random_range(0.1..1.0)).unwrap()
        }
        2 => ConvexSet::l2_ball(uvec(rng, d, -0.3, 0.3), rng.random_range(0.5..1.5)).unwrap(),
        3 => ConvexSet::l1_ball(d, rng.random_range(0.5..1.5)).unwrap(),
        4 => ConvexSet::linf_ball(d, rng.random_range(0.5..1.5)).unwrap(),
        5 => ConvexSet::nonneg_orthant(d).unwrap(),
        6 => {
            let mut row = uvec(rng, d, -1.0, 1.0);
            row[0] += 1.5;
            ConvexSet::affine(vec![row], vec![rng.random_range(-0.5..0.5)]).unwrap()
        }
        7 => ConvexSet::singleton(uvec(rng, d, -0.5, 0.5)).unwrap(),
        _ => ConvexSet::whole(d).unwrap(),
    }
}

fn rotation(theta: f64) -> Vec<Vec<f64>> {
    vec![
        vec![theta.cos(), theta.sin()],
        vec![-theta.sin(), theta.cos()],
    ]
}

/// Every vector kind on `ℝ²` (tight frames and TV balls excluded where
/// they need special shapes).
pub fn vector_catalog(rng: &mut ChaCha8Rng) -> Vec<(String, ProxFunction)> {
    let d = 2;
    let mut v: Vec<(String, ProxFunction)> = vec![("zero".into(), ProxFunction::zero(d))];
    for k in 0..9 {
        let c = random_set(rng, d, k);
        v.push((format!("indicator#{k}"), ProxFunction::indicator(c.clone())));
        v.push((format!("support#{k}"), ProxFunction::support(c.clone())));
        v.push((
            format!("dist_sq#{k}"),
            ProxFunction::dist_sq(c.clone(), 0.7).unwrap(),
        ));
        v.push((
            format!("sq_minus_dist#{k}"),
            ProxFunction::sq_minus_dist(c.clone(), 1.3).unwrap(),
        ));
        v.push((
            format!("phi_of_dist#{k}"),
            ProxFunction::phi_of_dist(ScalarFun::power(4.0 / 3.0, 0.6).unwrap(), c.clone())
                .unwrap(),
        ));
    }
    v.push((
        "support_plus_phi_norm".into(),
        ProxFunction::support_plus_phi_norm(
            ConvexSet::l2_ball(vec![0.2, -0.1], 0.5).unwrap(),
            ScalarFun::power(2.0, 0.8).unwrap(),
        )
        .unwrap(),
    ));
    let a = LinOp::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
    v.push((
        "quadratic".into(),
        ProxFunction::Quadratic(QuadraticFn::new(a, vec![0.3, -0.2], 0.0).unwrap()),
    ));
    let terms = vec![
        QuadTerm {
            alpha: 0.8,
            t: LinOp::from_rows(&[vec![1.0, 0.3]]).unwrap(),
            r: vec![0.5],
        },
        QuadTerm {
            alpha: 1.5,
            t: LinOp::identity(2),
            r: vec![-0.2, 0.1],
        },
    ];
    v.push((
        "sum_quadratics".into(),
        ProxFunction::SumQuadratics(SumQuadratics::new(terms).unwrap()),
    ));
    let basis = SeparableBasis::new(
        vec![
            ScalarFun::power(1.0, 0.5).unwrap(),
            ScalarFun::huber(0.8, 1.0).unwrap(),
        ],
        rotation(0.4),
    )
    .unwrap();
    v.push((
        "separable_basis".into(),
        ProxFunction::SeparableBasis(basis),
    ));
    // two stacked rotations: M M* = 2 Id on ℝ⁴ would need a square frame, so use
    // the scaled rotation with κ = 4
    let m = DenseMatrix::from_rows(
        &rotation(0.9)
            .iter()
            .map(|r| r.iter().map(|x| 2.0 * x).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let tf = TightFrame::new(
        ProxFunction::scalar_lift(ScalarFun::power(1.0, 0.3).unwrap(), 2).unwrap(),
        LinOp::new(m),
        4.0,
    )
    .unwrap();
    v.push(("tight_frame".into(), ProxFunction::TightFrame(tf)));
    for (name, phi) in scalar_catalog() {
        v.push((
            format!("lift:{name}"),
            ProxFunction::scalar_lift(phi, d).unwrap(),
        ));
    }
    v
}

/// Random point, scaled so that barrier-type domains are hit.
pub fn point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    uvec(rng, d, -3.0, 3.0)
}

/// Small well-posed instances shared by the uniqueness and robustness checks.
pub fn standard_suite() -> Vec<(&'static str, dualfb_core::ProblemInstance)> {
    use dualfb_core::{ProblemInstance, VecR};
    let mut r = rng(0x5a17e);
    let l2 = |r: &mut ChaCha8Rng| {
        let rows = vec![uvec(r, 2, -0.8, 0.8), uvec(r, 2, -0.8, 0.8)];
        LinOp::from_rows(&rows).unwrap()
    };
    let mut out = Vec::new();
    let l = l2(&mut r);
    out.push((
        "box / l2 support",
        ProblemInstance::new(
            ProxFunction::indicator(ConvexSet::boxed(vec![-1.0, -0.5], vec![0.5, 1.0]).unwrap()),
            ProxFunction::support(ConvexSet::l2_ball(vec![0.1, 0.0], 0.8).unwrap()),
            l,
            VecR::primal(vec![2.0, -1.5]).unwrap(),
            VecR::dual(vec![0.3, -0.1]).unwrap(),
        )
        .unwrap(),
    ));
    let l = LinOp::from_rows(&[vec![0.9, 0.2], vec![-0.3, 0.7]]).unwrap();
    out.push((
        "power lift / box constraint",
        ProblemInstance::new(
            ProxFunction::scalar_lift(ScalarFun::power(4.0 / 3.0, 0.5).unwrap(), 2).unwrap(),
            ProxFunction::indicator(ConvexSet::boxed(vec![-0.2, -0.3], vec![0.2, 0.1]).unwrap()),
            l,
            VecR::primal(vec![1.5, 1.0]).unwrap(),
            VecR::dual(vec![0.1, 0.05]).unwrap(),
        )
        .unwrap(),
    ));
    let l = l2(&mut r);
    out.push((
        "distance to halfspace / huber lift",
        ProblemInstance::new(
            ProxFunction::phi_of_dist(
                ScalarFun::power(1.0, 0.6).unwrap(),
                ConvexSet::halfspace(vec![1.0, 1.0], 0.0).unwrap(),
            )
            .unwrap(),
            ProxFunction::scalar_lift(ScalarFun::huber(0.5, 1.0).unwrap(), 2).unwrap(),
            l,
            VecR::primal(vec![1.0, 2.0]).unwrap(),
            VecR::dual(vec![-0.4, 0.2]).unwrap(),
        )
        .unwrap(),
    ));
    let l = LinOp::from_rows(&[vec![0.5, 0.1], vec![0.2, -0.6], vec![0.3, 0.3]]).unwrap();
    out.push((
        "zero / l1 support",
        ProblemInstance::new(
            ProxFunction::zero(2),
            ProxFunction::support(ConvexSet::l1_ball(3, 0.7).unwrap()),
            l,
            VecR::primal(vec![-1.0, 0.8]).unwrap(),
            VecR::dual(vec![0.0, 0.2, -0.3]).unwrap(),
        )
        .unwrap(),
    ));
    out
}
