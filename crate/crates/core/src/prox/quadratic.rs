//! Quadratic functions, whose proxes are linear solves done by conjugate
//! gradients.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, invalid, Error, Result};
use crate::linop::LinOp;
use crate::space::{axpy, dot, norm};

pub const CG_REL_TOL: f64 = 1e-12;

/// `x ↦ ⟨Ax, x⟩/2 + ⟨x, b⟩ + alpha0` with `A` self-adjoint and positive.
#[derive(Debug, Clone)]
pub struct QuadraticFn {
    a: LinOp,
    b: Vec<f64>,
    alpha0: f64,
}

impl QuadraticFn {
    pub fn new(a: LinOp, b: Vec<f64>, alpha0: f64) -> Result<Self> {
        if a.dim_in() != a.dim_out() {
            return Err(Error::Structural("quadratic: A must be square".into()));
        }
        check_len(a.dim_in(), b.len())?;
        if !b.iter().all(|v| v.is_finite()) || !alpha0.is_finite() {
            return Err(invalid("quadratic: b and alpha0 must be finite"));
        }
        check_self_adjoint_positive(&a)?;
        Ok(Self { a, b, alpha0 })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn op(&self) -> &LinOp {
        &self.a
    }

    pub fn linear_term(&self) -> &[f64] {
        &self.b
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(&self.a.apply_vec(x), x) + dot(x, &self.b) + self.alpha0
    }

    /// `(Id + γA)⁻¹(x − γb)`.
    pub fn prox(&self, g: f64, x: &[f64]) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = x.iter().zip(&self.b).map(|(xi, bi)| xi - g * bi).collect();
        let a = &self.a;
        conjugate_gradient(
            |v, out| {
                a.apply(v, out);
                for (o, vi) in out.iter_mut().zip(v) {
                    *o = vi + g * *o;
                }
            },
            &rhs,
            x,
        )
    }
}

/// One term `alpha_i ‖T_i x − r_i‖² / 2`.
#[derive(Debug, Clone)]
pub struct QuadTerm {
    pub alpha: f64,
    pub t: LinOp,
    pub r: Vec<f64>,
}

/// `x ↦ ½ Σ alpha_i ‖T_i x − r_i‖²`.
#[derive(Debug, Clone)]
pub struct SumQuadratics {
    dim: usize,
    terms: Vec<QuadTerm>,
}

impl SumQuadratics {
    pub fn new(terms: Vec<QuadTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| invalid("sum of quadratics needs a term"))?;
        let dim = first.t.dim_in();
        for (i, term) in terms.iter().enumerate() {
            check_len(dim, term.t.dim_in())?;
            check_len(term.t.dim_out(), term.r.len())?;
            if !(term.alpha.is_finite() && term.alpha > 0.0) {
                return Err(invalid(format!("term {i}: alpha must be positive")));
            }
            if !term.r.iter().all(|v| v.is_finite()) {
                return Err(invalid(format!("term {i}: r must be finite")));
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[QuadTerm] {
        &self.terms
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut y = t.t.apply_vec(x);
                axpy(-1.0, &t.r, &mut y);
                0.5 * t.alpha * dot(&y, &y)
            })
            .sum()
    }

    /// `(Id + γ Σ αᵢTᵢ*Tᵢ)⁻¹(x + γ Σ αᵢTᵢ*rᵢ)`.
    pub fn prox(&self, g: f64, x: &[f64]) -> Result<Vec<f64>> {
        let mut rhs = x.to_vec();
        for t in &self.terms {
            axpy(g * t.alpha, &t.t.adjoint_vec(&t.r), &mut rhs);
        }
        let terms = &self.terms;
        conjugate_gradient(
            |v, out| {
                out.copy_from_slice(v);
                for t in terms {
                    let tv = t.t.apply_vec(v);
                    axpy(g * t.alpha, &t.t.adjoint_vec(&tv), out);
                }
            },
            &rhs,
            x,
        )
    }
}

fn check_self_adjoint_positive(a: &LinOp) -> Result<()> {
    let n = a.dim_in();
    let mut rng = ChaCha8Rng::seed_from_u64(0x51f_ad7);
    let scale = a.norm_bound().max(1.0);
    for _ in 0..8 {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ax = a.apply_vec(&x);
        let ay = a.apply_vec(&y);
        let sym = (dot(&ax, &y) - dot(&x, &ay)).abs();
        if sym > 1e-10 * scale * (1.0 + norm(&x) * norm(&y)) {
            return Err(Error::Structural(format!(
                "quadratic: A is not self-adjoint (defect {sym:e})"
            )));
        }
        if dot(&ax, &x) < -1e-10 * scale * dot(&x, &x) {
            return Err(Error::Structural("quadratic: A is not positive".into()));
        }
    }
    Ok(())
}

/// Solves `M y = rhs` for symmetric positive definite `M` given as a
/// matrix-vector product, starting from `y0`. Stops at relative residual
/// `CG_REL_TOL` or after `10·dim` iterations.
pub(crate) fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    rhs: &[f64],
    y0: &[f64],
) -> Result<Vec<f64>> {
    let n = rhs.len();
    let target = CG_REL_TOL * norm(rhs);
    let mut y = y0.to_vec();
    let mut my = vec![0.0; n];
    apply(&y, &mut my);
    let mut r: Vec<f64> = rhs.iter().zip(&my).map(|(a, b)| a - b).collect();
    let mut rr = dot(&r, &r);
    if libm::sqrt(rr) <= target {
        return Ok(y);
    }
    let mut p = r.clone();
    let mut mp = vec![0.0; n];
    for _ in 0..10 * n.max(1) {
        apply(&p, &mut mp);
        let pmp = dot(&p, &mp);
        if !(pmp > 0.0) {
            break;
        }
        let step = rr / pmp;
        axpy(step, &p, &mut y);
        axpy(-step, &mp, &mut r);
        let rr_new = dot(&r, &r);
        if libm::sqrt(rr_new) <= target {
            return Ok(y);
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    // Recompute the true residual before giving up.
    apply(&y, &mut my);
    let res = norm(&rhs.iter().zip(&my).map(|(a, b)| a - b).collect::<Vec<_>>());
    if res <= target {
        Ok(y)
    } else {
        Err(Error::Numerical {
            what: "conjugate gradient",
            residual: res / norm(rhs).max(f64::MIN_POSITIVE),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_quadratic() {
        let q = QuadraticFn::new(LinOp::identity(2), vec![0.0, 0.0], 0.0).unwrap();
        let y = q.prox(1.0, &[2.0, 4.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-14 && (y[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dense_spd_solve() {
        let a = LinOp::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let q = QuadraticFn::new(a, vec![1.0, -1.0], 0.0).unwrap();
        let x = [0.5, 2.0];
        let y = q.prox(0.7, &x).unwrap();
        // y + 0.7 (A y + b) = x
        let ay = q.op().apply_vec(&y);
        for i in 0..2 {
            let lhs = y[i] + 0.7 * (ay[i] + q.linear_term()[i]);
            assert!((lhs - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonsymmetric() {
        let a = LinOp::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            QuadraticFn::new(a, vec![0.0; 2], 0.0),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn sum_of_quadratics_prox() {
        let t = LinOp::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let s = SumQuadratics::new(vec![
            QuadTerm {
                alpha: 2.0,
                t,
                r: vec![1.0],
            },
            QuadTerm {
                alpha: 1.0,
                t: LinOp::identity(2),
                r: vec![0.5, -0.5],
            },
        ])
        .unwrap();
        let x = [1.0, 3.0];
        let y = s.prox(1.0, &x).unwrap();
        // optimality: y − x + Σ αᵢ Tᵢ*(Tᵢ y − rᵢ) = 0
        let g0 = 2.0 * (y[0] + y[1] - 1.0);
        let r0 = y[0] - x[0] + g0 + (y[0] - 0.5);
        let r1 = y[1] - x[1] + g0 + (y[1] + 0.5);
        assert!(r0.abs() < 1e-12 && r1.abs() < 1e-12);
    }
}
