use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::space::{Space, VecR};

use super::ProblemInstance;

/// A step-size or relaxation schedule. A `Sequence` repeats its last entry
/// past its end.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(f64),
    Sequence(Vec<f64>),
}

impl Schedule {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            Schedule::Constant(c) => *c,
            Schedule::Sequence(s) => s[n.min(s.len() - 1)],
        }
    }

    fn values(&self, max_iter: usize) -> &[f64] {
        match self {
            Schedule::Constant(c) => core::slice::from_ref(c),
            Schedule::Sequence(s) => &s[..s.len().min(max_iter.max(1))],
        }
    }

    pub(crate) fn check_box(&self, name: &str, lo: f64, hi: f64, max_iter: usize) -> Result<()> {
        if let Schedule::Sequence(s) = self {
            if s.is_empty() {
                return Err(Error::InvalidConfig(format!("{name} schedule is empty")));
            }
        }
        for (n, v) in self.values(max_iter).iter().enumerate() {
            if !(v.is_finite() && *v >= lo && *v <= hi) {
                return Err(Error::InvalidConfig(format!(
                    "{name}[{n}] = {v} is outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// An error sequence with summable norms.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum ErrorSeq {
    #[default]
    Zero,
    /// `ratio^n · direction`, `0 ≤ ratio < 1`.
    Geometric { direction: Vec<f64>, ratio: f64 },
    /// The listed terms, then zero.
    Finite(Vec<Vec<f64>>),
    /// The same vector at every step. Only the zero vector is summable, so
    /// any other value is rejected by validation.
    Constant(Vec<f64>),
}

impl ErrorSeq {
    pub fn validate(&self, dim: usize, name: &str) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ErrorSeq::Zero => Ok(()),
            ErrorSeq::Geometric { direction, ratio } => {
                check_len(dim, direction.len())?;
                if !finite(direction) {
                    return Err(Error::InvalidConfig(format!(
                        "{name}: direction must be finite"
                    )));
                }
                if !(*ratio >= 0.0 && *ratio < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "{name}: ratio {ratio} gives a non-summable sequence"
                    )));
                }
                Ok(())
            }
            ErrorSeq::Finite(terms) => {
                for t in terms {
                    check_len(dim, t.len())?;
                    if !finite(t) {
                        return Err(Error::InvalidConfig(format!(
                            "{name}: terms must be finite"
                        )));
                    }
                }
                Ok(())
            }
            ErrorSeq::Constant(u) => {
                check_len(dim, u.len())?;
                if u.iter().any(|x| *x != 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "{name}: a nonzero constant error sequence is not summable"
                    )));
                }
                Ok(())
            }
        }
    }

    pub(crate) fn is_active(&self, n: usize) -> bool {
        match self {
            ErrorSeq::Zero | ErrorSeq::Constant(_) => false,
            ErrorSeq::Geometric { .. } => true,
            ErrorSeq::Finite(t) => n < t.len(),
        }
    }

    /// `‖eₙ‖`.
    pub(crate) fn norm_at(&self, n: usize) -> f64 {
        match self {
            ErrorSeq::Zero | ErrorSeq::Constant(_) => 0.0,
            ErrorSeq::Geometric { direction, ratio } => {
                libm::pow(*ratio, n as f64) * crate::space::norm(direction)
            }
            ErrorSeq::Finite(t) => t.get(n).map_or(0.0, |e| crate::space::norm(e)),
        }
    }

    /// `out += eₙ`.
    pub(crate) fn add_to(&self, n: usize, out: &mut [f64]) {
        match self {
            ErrorSeq::Zero | ErrorSeq::Constant(_) => {}
            ErrorSeq::Geometric { direction, ratio } => {
                let s = libm::pow(*ratio, n as f64);
                crate::space::axpy(s, direction, out);
            }
            ErrorSeq::Finite(t) => {
                if let Some(e) = t.get(n) {
                    crate::space::axpy(1.0, e, out);
                }
            }
        }
    }
}

/// Parameters of the dual iteration.
#[derive(Debug, Clone)]
pub struct DualFBConfig {
    /// Margin `ε ∈ ]0, min{1, ‖L‖⁻²}[` defining the admissible boxes.
    pub epsilon: f64,
    /// `γₙ ∈ [ε, 2‖L‖⁻² − ε]`.
    pub gamma: Schedule,
    /// `λₙ ∈ [ε, 1]`.
    pub lambda: Schedule,
    /// Dual-side errors `aₙ`.
    pub a_seq: ErrorSeq,
    /// Primal-side errors `bₙ`.
    pub b_seq: ErrorSeq,
    pub max_iter: usize,
    /// Stop when `‖vₙ₊₁ − vₙ‖ / max(1, ‖vₙ‖)` falls to this value.
    pub tol_iterate: f64,
    /// Stop when the duality gap falls to this value.
    pub tol_gap: Option<f64>,
    /// Starting dual point; zero when `None`.
    pub v0: Option<VecR>,
    /// Evaluate primal/dual objectives every iteration when possible.
    pub monitor_objectives: bool,
    /// Length of the window used to flag stagnation; 0 disables the check.
    pub stagnation_window: usize,
}

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-10;

impl DualFBConfig {
    /// Defaults for `p`: `γ = 1.9‖L‖⁻²`, `ε = 0.05·min{1, ‖L‖⁻²}`, `λ = 1`,
    /// no errors, `v₀ = 0`.
    pub fn new(p: &ProblemInstance) -> Self {
        let beta = p.beta();
        Self {
            epsilon: 0.05 * beta.min(1.0),
            gamma: Schedule::Constant(1.9 * beta),
            lambda: Schedule::Constant(1.0),
            a_seq: ErrorSeq::Zero,
            b_seq: ErrorSeq::Zero,
            max_iter: DEFAULT_MAX_ITER,
            tol_iterate: DEFAULT_TOL,
            tol_gap: None,
            v0: None,
            monitor_objectives: true,
            stagnation_window: 200,
        }
    }

    pub fn with_gamma(mut self, g: f64) -> Self {
        self.gamma = Schedule::Constant(g);
        self
    }

    pub fn with_lambda(mut self, l: f64) -> Self {
        self.lambda = Schedule::Constant(l);
        self
    }

    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_iterate = tol;
        self
    }

    pub fn with_tol_gap(mut self, tol: f64) -> Self {
        self.tol_gap = Some(tol);
        self
    }

    pub fn with_v0(mut self, v0: VecR) -> Self {
        self.v0 = Some(v0);
        self
    }

    /// Checks the admissible boxes against `‖L‖⁻²` of `p`.
    pub fn validate(&self, p: &ProblemInstance) -> Result<()> {
        self.validate_with_beta(p.beta(), p.dim_primal(), p.dim_dual())
    }

    pub(crate) fn validate_with_beta(&self, beta: f64, n: usize, m: usize) -> Result<()> {
        let eps = self.epsilon;
        if !(eps > 0.0 && eps < beta.min(1.0)) {
            return Err(Error::InvalidConfig(format!(
                "epsilon = {eps} must lie in ]0, {}[",
                beta.min(1.0)
            )));
        }
        self.validate_common(n, m)?;
        self.gamma
            .check_box("gamma", eps, 2.0 * beta - eps, self.max_iter)?;
        self.lambda.check_box("lambda", eps, 1.0, self.max_iter)
    }

    pub(crate) fn validate_common(&self, n: usize, m: usize) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.tol_iterate >= 0.0) {
            return Err(Error::InvalidConfig(
                "tol_iterate must be non-negative".into(),
            ));
        }
        if let Some(t) = self.tol_gap {
            if !(t >= 0.0) {
                return Err(Error::InvalidConfig("tol_gap must be non-negative".into()));
            }
        }
        self.a_seq.validate(m, "a")?;
        self.b_seq.validate(n, "b")?;
        if let Some(v0) = &self.v0 {
            check_len(m, v0.len())?;
            if v0.space() != Space::Dual {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(())
    }
}
