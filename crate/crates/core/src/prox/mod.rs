//! Proximity operators of the closed-form catalog.
//!
//! Every vector kind takes the step `γ` explicitly and folds it into its
//! parameters, so `prox_into(γ, ·)` is `prox_{γF}`. Conjugate proxes go
//! through the Moreau decomposition `prox_{γF*}(x) = x − γ prox_{F/γ}(x/γ)`,
//! except for indicator/support pairs where both sides are projections.

pub mod quadratic;
pub mod scalar;
pub mod sets;

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, invalid, Error, Result};
use crate::linop::LinOp;
use crate::space::{axpy, dist, dot, norm, norm_sq, sq, VecR};

pub use quadratic::{QuadTerm, QuadraticFn, SumQuadratics};
pub use scalar::{soft_interval, PowerExp, ScalarFun};
pub use sets::{project_l1_ball, AffineSet, ConvexSet, SubspaceSet, MEMBERSHIP_TOL};

/// `Σ_k φ_k(⟨x, o_k⟩)` over an orthonormal basis `(o_k)`.
#[derive(Debug, Clone)]
pub struct SeparableBasis {
    phis: Vec<ScalarFun>,
    basis: Vec<Vec<f64>>,
}

impl SeparableBasis {
    pub fn new(phis: Vec<ScalarFun>, basis: Vec<Vec<f64>>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(invalid("separable basis needs at least one vector"));
        }
        check_len(dim, phis.len())?;
        for b in &basis {
            check_len(dim, b.len())?;
        }
        sets::check_orthonormal(&basis)?;
        for phi in &phis {
            phi.validate()?;
        }
        Ok(Self { phis, basis })
    }

    pub fn canonical(phis: Vec<ScalarFun>) -> Result<Self> {
        let n = phis.len();
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        Self::new(phis, basis)
    }

    pub fn phis(&self) -> &[ScalarFun] {
        &self.phis
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    fn coefs(&self, x: &[f64]) -> impl Iterator<Item = f64> + '_ {
        let x = x.to_vec();
        self.basis.iter().map(move |o| dot(&x, o))
    }
}

/// `ψ ∘ M` with `M M* = κ Id`.
#[derive(Debug, Clone)]
pub struct TightFrame {
    psi: Box<ProxFunction>,
    m: LinOp,
    kappa: f64,
}

impl TightFrame {
    pub fn new(psi: ProxFunction, m: LinOp, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("kappa must be positive"));
        }
        check_len(m.dim_out(), psi.dim())?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x7167_4a);
        let k = m.dim_out();
        for _ in 0..8 {
            let y: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mmy = m.apply_vec(&m.adjoint_vec(&y));
            let defect: f64 = dist(&mmy, &y.iter().map(|v| kappa * v).collect::<Vec<_>>());
            if defect > 1e-10 * (1.0 + kappa) * norm(&y) {
                return Err(Error::Structural(format!(
                    "M M* is not kappa Id (defect {defect:e})"
                )));
            }
        }
        Ok(Self {
            psi: Box::new(psi),
            m,
            kappa,
        })
    }

    pub fn op(&self) -> &LinOp {
        &self.m
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// A scalar function applied to each coordinate and summed.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarLift {
    Uniform { phi: ScalarFun, dim: usize },
    PerCoordinate(Vec<ScalarFun>),
}

impl ScalarLift {
    fn dim(&self) -> usize {
        match self {
            ScalarLift::Uniform { dim, .. } => *dim,
            ScalarLift::PerCoordinate(v) => v.len(),
        }
    }

    fn phi(&self, i: usize) -> &ScalarFun {
        match self {
            ScalarLift::Uniform { phi, .. } => phi,
            ScalarLift::PerCoordinate(v) => &v[i],
        }
    }
}

/// A convex function on `ℝ^d` with an exactly computable prox.
#[derive(Debug, Clone)]
pub enum ProxFunction {
    Zero {
        dim: usize,
    },
    Indicator(ConvexSet),
    Support(ConvexSet),
    /// `d_C² / (2 alpha)`.
    DistSq {
        set: ConvexSet,
        alpha: f64,
    },
    /// `(‖·‖² − d_C²) / (2 alpha)`.
    SqMinusDist {
        set: ConvexSet,
        alpha: f64,
    },
    /// `φ ∘ d_C` for even `φ`.
    PhiOfDist {
        phi: ScalarFun,
        set: ConvexSet,
    },
    /// `σ_C + φ ∘ ‖·‖` for even, nonconstant `φ` with bounded minimizers.
    SupportPlusPhiNorm {
        set: ConvexSet,
        phi: ScalarFun,
    },
    Quadratic(QuadraticFn),
    SumQuadratics(SumQuadratics),
    SeparableBasis(SeparableBasis),
    TightFrame(TightFrame),
    ScalarLift(ScalarLift),
}

impl ProxFunction {
    pub fn zero(dim: usize) -> Self {
        ProxFunction::Zero { dim }
    }

    pub fn indicator(set: ConvexSet) -> Self {
        ProxFunction::Indicator(set)
    }

    pub fn support(set: ConvexSet) -> Self {
        ProxFunction::Support(set)
    }

    pub fn dist_sq(set: ConvexSet, alpha: f64) -> Result<Self> {
        let f = ProxFunction::DistSq { set, alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn sq_minus_dist(set: ConvexSet, alpha: f64) -> Result<Self> {
        let f = ProxFunction::SqMinusDist { set, alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn phi_of_dist(phi: ScalarFun, set: ConvexSet) -> Result<Self> {
        let f = ProxFunction::PhiOfDist { phi, set };
        f.validate()?;
        Ok(f)
    }

    pub fn support_plus_phi_norm(set: ConvexSet, phi: ScalarFun) -> Result<Self> {
        let f = ProxFunction::SupportPlusPhiNorm { set, phi };
        f.validate()?;
        Ok(f)
    }

    pub fn scalar_lift(phi: ScalarFun, dim: usize) -> Result<Self> {
        let f = ProxFunction::ScalarLift(ScalarLift::Uniform { phi, dim });
        f.validate()?;
        Ok(f)
    }

    pub fn scalar_lift_each(phis: Vec<ScalarFun>) -> Result<Self> {
        let f = ProxFunction::ScalarLift(ScalarLift::PerCoordinate(phis));
        f.validate()?;
        Ok(f)
    }

    /// Parameter checks for the variants with public fields.
    pub fn validate(&self) -> Result<()> {
        match self {
            ProxFunction::Zero { dim } => {
                if *dim == 0 {
                    return Err(invalid("zero function on a zero-dimensional space"));
                }
            }
            ProxFunction::Indicator(c) | ProxFunction::Support(c) => c.validate()?,
            ProxFunction::DistSq { set, alpha } | ProxFunction::SqMinusDist { set, alpha } => {
                set.validate()?;
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(invalid("alpha must be positive"));
                }
            }
            ProxFunction::PhiOfDist { phi, set } => {
                set.validate()?;
                phi.validate()?;
                if !phi.is_even() {
                    return Err(Error::Catalog("phi of distance needs an even phi".into()));
                }
            }
            ProxFunction::SupportPlusPhiNorm { set, phi } => {
                set.validate()?;
                phi.validate()?;
                if !phi.is_even() {
                    return Err(Error::Catalog(
                        "support plus phi of norm needs an even phi".into(),
                    ));
                }
                if phi.max_argmin().is_none() {
                    return Err(Error::Catalog(
                        "support plus phi of norm needs phi with bounded minimizers".into(),
                    ));
                }
            }
            ProxFunction::Quadratic(_) | ProxFunction::SumQuadratics(_) => {}
            ProxFunction::SeparableBasis(_) | ProxFunction::TightFrame(_) => {}
            ProxFunction::ScalarLift(l) => {
                if l.dim() == 0 {
                    return Err(invalid("scalar lift on a zero-dimensional space"));
                }
                match l {
                    ScalarLift::Uniform { phi, .. } => phi.validate()?,
                    ScalarLift::PerCoordinate(v) => {
                        for phi in v {
                            phi.validate()?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ProxFunction::Zero { dim } => *dim,
            ProxFunction::Indicator(c) | ProxFunction::Support(c) => c.dim(),
            ProxFunction::DistSq { set, .. }
            | ProxFunction::SqMinusDist { set, .. }
            | ProxFunction::PhiOfDist { set, .. }
            | ProxFunction::SupportPlusPhiNorm { set, .. } => set.dim(),
            ProxFunction::Quadratic(q) => q.dim(),
            ProxFunction::SumQuadratics(s) => s.dim(),
            ProxFunction::SeparableBasis(s) => s.basis.len(),
            ProxFunction::TightFrame(t) => t.m.dim_in(),
            ProxFunction::ScalarLift(l) => l.dim(),
        }
    }

    /// Writes `prox_{γF}(x)` into `out`. No argument checks.
    pub fn prox_into(&self, g: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            ProxFunction::Zero { .. } => out.copy_from_slice(x),
            ProxFunction::Indicator(c) => c.project_into(x, out),
            ProxFunction::Support(c) => {
                // x − P_{γC} x
                c.project_scaled_into(g, x, out);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi - *o;
                }
            }
            ProxFunction::DistSq { set, alpha } => {
                set.project_into(x, out);
                let t = 1.0 / (1.0 + alpha / g);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi + t * (*o - xi);
                }
            }
            ProxFunction::SqMinusDist { set, alpha } => {
                let beta = alpha / g;
                let s = beta / (beta + 1.0);
                let xs: Vec<f64> = x.iter().map(|v| s * v).collect();
                set.project_into(&xs, out);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi - *o / beta;
                }
            }
            ProxFunction::PhiOfDist { phi, set } => {
                set.project_into(x, out);
                if phi.is_zero_indicator() {
                    return Ok(());
                }
                let phi_g = phi.scaled(g);
                let m = phi_g.max_subdiff_at_zero()?;
                let d = dist(x, out);
                if d > m {
                    let pc = phi_g.prox_conj_raw(1.0, d);
                    let t = pc / d;
                    for (o, xi) in out.iter_mut().zip(x) {
                        *o = xi + t * (*o - xi);
                    }
                } else if d == 0.0 {
                    out.copy_from_slice(x);
                }
                // otherwise x ∉ C, d ≤ m: P_C x is already in `out`
            }
            ProxFunction::SupportPlusPhiNorm { set, phi } => {
                set.project_scaled_into(g, x, out);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi - *o;
                }
                let d = norm(out);
                let m = phi
                    .max_argmin()
                    .ok_or(Error::Catalog("unbounded minimizers".into()))?;
                if d > m {
                    let t = phi.scaled(g).prox_raw(1.0, d) / d;
                    out.iter_mut().for_each(|o| *o *= t);
                } else if d == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                }
            }
            ProxFunction::Quadratic(q) => out.copy_from_slice(&q.prox(g, x)?),
            ProxFunction::SumQuadratics(s) => out.copy_from_slice(&s.prox(g, x)?),
            ProxFunction::SeparableBasis(s) => {
                out.iter_mut().for_each(|o| *o = 0.0);
                for ((c, o), phi) in s.coefs(x).zip(&s.basis).zip(&s.phis) {
                    axpy(phi.prox_raw(g, c), o, out);
                }
            }
            ProxFunction::TightFrame(t) => {
                let mx = t.m.apply_vec(x);
                let mut p = vec![0.0; mx.len()];
                t.psi.prox_into(t.kappa * g, &mx, &mut p)?;
                for (pi, mi) in p.iter_mut().zip(&mx) {
                    *pi -= mi;
                }
                let back = t.m.adjoint_vec(&p);
                out.copy_from_slice(x);
                axpy(1.0 / t.kappa, &back, out);
            }
            ProxFunction::ScalarLift(l) => match l {
                ScalarLift::Uniform { phi, .. } => {
                    for (o, xi) in out.iter_mut().zip(x) {
                        *o = phi.prox_raw(g, *xi);
                    }
                }
                ScalarLift::PerCoordinate(v) => {
                    for ((o, xi), phi) in out.iter_mut().zip(x).zip(v) {
                        *o = phi.prox_raw(g, *xi);
                    }
                }
            },
        }
        Ok(())
    }

    pub fn prox_vec(&self, g: f64, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        self.prox_into(g, x, &mut out)?;
        Ok(out)
    }

    /// Writes `prox_{γF*}(x)` into `out`. No argument checks.
    pub fn prox_conj_into(&self, g: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            ProxFunction::Zero { .. } => out.iter_mut().for_each(|o| *o = 0.0),
            // F* = σ_C, prox = Id − P_{γC}
            ProxFunction::Indicator(c) => {
                c.project_scaled_into(g, x, out);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi - *o;
                }
            }
            // F* = ι_C
            ProxFunction::Support(c) => c.project_into(x, out),
            ProxFunction::ScalarLift(l) => {
                for (i, (o, xi)) in out.iter_mut().zip(x).enumerate() {
                    *o = l.phi(i).prox_conj_raw(g, *xi);
                }
            }
            _ => {
                let xs: Vec<f64> = x.iter().map(|v| v / g).collect();
                self.prox_into(1.0 / g, &xs, out)?;
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi - g * *o;
                }
            }
        }
        Ok(())
    }

    pub fn prox_conj_vec(&self, g: f64, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        self.prox_conj_into(g, x, &mut out)?;
        Ok(out)
    }

    /// `F(x)`, possibly `+∞`. Indicator-type terms accept points within
    /// `tol` of their set.
    pub fn value_tol(&self, x: &[f64], tol: f64) -> Result<f64> {
        Ok(match self {
            ProxFunction::Zero { .. } => 0.0,
            ProxFunction::Indicator(c) => {
                if c.contains_tol(x, tol) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxFunction::Support(c) => c.support(x),
            ProxFunction::DistSq { set, alpha } => sq(set.distance(x)) / (2.0 * alpha),
            ProxFunction::SqMinusDist { set, alpha } => {
                (norm_sq(x) - sq(set.distance(x))) / (2.0 * alpha)
            }
            ProxFunction::PhiOfDist { phi, set } => phi.value(set.distance(x)),
            ProxFunction::SupportPlusPhiNorm { set, phi } => set.support(x) + phi.value(norm(x)),
            ProxFunction::Quadratic(q) => q.value(x),
            ProxFunction::SumQuadratics(s) => s.value(x),
            ProxFunction::SeparableBasis(s) => {
                s.coefs(x).zip(&s.phis).map(|(c, phi)| phi.value(c)).sum()
            }
            ProxFunction::TightFrame(t) => t.psi.value_tol(&t.m.apply_vec(x), tol)?,
            ProxFunction::ScalarLift(l) => x
                .iter()
                .enumerate()
                .map(|(i, xi)| l.phi(i).value(*xi))
                .sum(),
        })
    }

    /// `F(x)` with the default relative membership tolerance.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.value_tol(x, MEMBERSHIP_TOL * norm(x).max(1.0))
    }

    /// `F*(u)`, possibly `+∞`.
    pub fn conj_value(&self, u: &[f64]) -> Result<f64> {
        let indicator = |inside: bool| if inside { 0.0 } else { f64::INFINITY };
        Ok(match self {
            ProxFunction::Zero { .. } => indicator(norm(u) <= MEMBERSHIP_TOL),
            ProxFunction::Indicator(c) => c.support(u),
            ProxFunction::Support(c) => indicator(c.contains(u)),
            ProxFunction::DistSq { set, alpha } => set.support(u) + 0.5 * alpha * norm_sq(u),
            ProxFunction::SqMinusDist { set, alpha } => {
                let au: Vec<f64> = u.iter().map(|v| alpha * v).collect();
                indicator(set.contains(&au)) + 0.5 * alpha * norm_sq(u)
            }
            ProxFunction::PhiOfDist { phi, set } => set.support(u) + phi.conj_value(norm(u))?,
            ProxFunction::SupportPlusPhiNorm { set, phi } => phi.conj_value(set.distance(u))?,
            ProxFunction::Quadratic(_) => {
                return Err(Error::Capability("conjugate of a quadratic"))
            }
            ProxFunction::SumQuadratics(_) => {
                return Err(Error::Capability("conjugate of a sum of quadratics"))
            }
            ProxFunction::TightFrame(_) => {
                return Err(Error::Capability("conjugate of a tight-frame composite"))
            }
            ProxFunction::SeparableBasis(s) => {
                let mut acc = 0.0;
                for (c, phi) in s.coefs(u).zip(&s.phis) {
                    acc += phi.conj_value(c)?;
                }
                acc
            }
            ProxFunction::ScalarLift(l) => {
                let mut acc = 0.0;
                for (i, ui) in u.iter().enumerate() {
                    acc += l.phi(i).conj_value(*ui)?;
                }
                acc
            }
        })
    }
}

fn check_step(g: f64) -> Result<()> {
    if g.is_finite() && g > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "step must be finite and positive, got {g}"
        )))
    }
}

/// `prox_{γφ}(ξ)`.
pub fn scalar_prox(phi: &ScalarFun, gamma: f64, xi: f64) -> Result<f64> {
    check_step(gamma)?;
    if !xi.is_finite() {
        return Err(invalid("argument must be finite"));
    }
    phi.validate()?;
    Ok(phi.prox_raw(gamma, xi))
}

/// `P_C x`.
pub fn project(c: &ConvexSet, x: &VecR) -> Result<VecR> {
    check_len(c.dim(), x.len())?;
    Ok(VecR::from_raw(x.space(), c.project_vec(x.as_slice())))
}

/// `prox_{γF}(x)`.
pub fn prox_vector(f: &ProxFunction, gamma: f64, x: &VecR) -> Result<VecR> {
    check_step(gamma)?;
    check_len(f.dim(), x.len())?;
    Ok(VecR::from_raw(x.space(), f.prox_vec(gamma, x.as_slice())?))
}

/// `prox_{γF*}(x)`.
pub fn prox_conjugate(f: &ProxFunction, gamma: f64, x: &VecR) -> Result<VecR> {
    check_step(gamma)?;
    check_len(f.dim(), x.len())?;
    Ok(VecR::from_raw(
        x.space(),
        f.prox_conj_vec(gamma, x.as_slice())?,
    ))
}

/// `F̃(x) = F(p) + ½‖x − p‖²` with `p = prox_F(x)`.
pub fn moreau_envelope_value(f: &ProxFunction, x: &VecR) -> Result<f64> {
    check_len(f.dim(), x.len())?;
    let p = f.prox_vec(1.0, x.as_slice())?;
    Ok(f.value(&p)? + 0.5 * sq(dist(x.as_slice(), &p)))
}

/// Envelope of the conjugate, `(F*)̃(x) = F*(q) + ½‖x − q‖²` with
/// `q = prox_{F*}(x)`.
pub fn moreau_envelope_conj_value(f: &ProxFunction, x: &VecR) -> Result<f64> {
    check_len(f.dim(), x.len())?;
    let q = f.prox_conj_vec(1.0, x.as_slice())?;
    Ok(f.conj_value(&q)? + 0.5 * sq(dist(x.as_slice(), &q)))
}
