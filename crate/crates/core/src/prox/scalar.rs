//! Convex functions on the real line with closed-form proximity operators.
//!
//! Every kind is closed under positive scaling, so `prox_{γφ}` is obtained by
//! folding `γ` into the parameters and applying the unit-step formula:
//!
//! | kind | `γφ` |
//! |---|---|
//! | `Power { p, alpha }` | `alpha → γ·alpha` |
//! | `NegLog { alpha }` | `alpha → γ·alpha` |
//! | `LogBarrier { omega, weight }` | `weight → γ·weight` |
//! | `Huber { omega, tau }` | `omega → omega·√γ`, `tau → γ·tau` |
//! | `PlusSupport { base, lo, hi }` | base folded, `[lo, hi] → [γ·lo, γ·hi]` |
//! | `PlusIndicator { base, lo, hi }` | base folded, interval unchanged |

use alloc::boxed::Box;
use alloc::format;

use crate::error::{invalid, Error, Result};

/// The exponents with closed-form power proxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PowerExp {
    One,
    FourThirds,
    ThreeHalves,
    Two,
    Three,
    Four,
}

impl PowerExp {
    pub fn from_f64(p: f64) -> Result<Self> {
        const TABLE: [(f64, PowerExp); 6] = [
            (1.0, PowerExp::One),
            (4.0 / 3.0, PowerExp::FourThirds),
            (1.5, PowerExp::ThreeHalves),
            (2.0, PowerExp::Two),
            (3.0, PowerExp::Three),
            (4.0, PowerExp::Four),
        ];
        TABLE
            .iter()
            .find(|(v, _)| (v - p).abs() <= 1e-12)
            .map(|(_, e)| *e)
            .ok_or_else(|| {
                Error::Catalog(format!(
                    "no closed-form prox for |x|^{p}; use 1, 4/3, 3/2, 2, 3 or 4"
                ))
            })
    }

    pub fn value(self) -> f64 {
        match self {
            PowerExp::One => 1.0,
            PowerExp::FourThirds => 4.0 / 3.0,
            PowerExp::ThreeHalves => 1.5,
            PowerExp::Two => 2.0,
            PowerExp::Three => 3.0,
            PowerExp::Four => 4.0,
        }
    }
}

/// A function in `Γ₀(ℝ)` from the closed-form catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFun {
    Zero,
    /// `alpha·|ξ|^p`.
    Power {
        p: PowerExp,
        alpha: f64,
    },
    /// `−alpha·ln ξ` on `ξ > 0`.
    NegLog {
        alpha: f64,
    },
    /// `weight·(ln omega − ln(omega − |ξ|))` on `|ξ| < omega`.
    LogBarrier {
        omega: f64,
        weight: f64,
    },
    /// `tau·ξ²` for `|ξ| ≤ omega/√(2tau)`, `omega√(2tau)|ξ| − omega²/2` beyond.
    Huber {
        omega: f64,
        tau: f64,
    },
    /// `base + σ_[lo,hi]`; `base` must be differentiable at 0 with zero slope.
    PlusSupport {
        base: Box<ScalarFun>,
        lo: f64,
        hi: f64,
    },
    /// `base + ι_[lo,hi]`; the interval must meet `dom base`.
    PlusIndicator {
        base: Box<ScalarFun>,
        lo: f64,
        hi: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

impl ScalarFun {
    pub fn power(p: f64, alpha: f64) -> Result<Self> {
        let f = ScalarFun::Power {
            p: PowerExp::from_f64(p)?,
            alpha,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn neg_log(alpha: f64) -> Result<Self> {
        let f = ScalarFun::NegLog { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn log_barrier(omega: f64) -> Result<Self> {
        let f = ScalarFun::LogBarrier { omega, weight: 1.0 };
        f.validate()?;
        Ok(f)
    }

    pub fn huber(omega: f64, tau: f64) -> Result<Self> {
        let f = ScalarFun::Huber { omega, tau };
        f.validate()?;
        Ok(f)
    }

    pub fn plus_support(base: ScalarFun, lo: f64, hi: f64) -> Result<Self> {
        let f = ScalarFun::PlusSupport {
            base: Box::new(base),
            lo,
            hi,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn plus_indicator(base: ScalarFun, lo: f64, hi: f64) -> Result<Self> {
        let f = ScalarFun::PlusIndicator {
            base: Box::new(base),
            lo,
            hi,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarFun::Zero => Ok(()),
            ScalarFun::Power { alpha, .. } | ScalarFun::NegLog { alpha } => {
                positive("alpha", *alpha)
            }
            ScalarFun::LogBarrier { omega, weight } => {
                positive("omega", *omega)?;
                positive("weight", *weight)
            }
            ScalarFun::Huber { omega, tau } => {
                positive("omega", *omega)?;
                positive("tau", *tau)
            }
            ScalarFun::PlusSupport { base, lo, hi } => {
                base.validate()?;
                crate::prox::ConvexSet::interval(*lo, *hi)?;
                if base.subdiff_at_zero() != Some((0.0, 0.0)) {
                    return Err(Error::Catalog(
                        "base + support needs a base differentiable at 0 with zero slope".into(),
                    ));
                }
                Ok(())
            }
            ScalarFun::PlusIndicator { base, lo, hi } => {
                base.validate()?;
                crate::prox::ConvexSet::interval(*lo, *hi)?;
                let (dlo, dhi) = base.domain();
                if lo.max(dlo) > hi.min(dhi)
                    || (hi.min(dhi) == lo.max(dlo) && !base.domain_closed_at(*lo, *hi))
                {
                    return Err(invalid(
                        "interval does not meet the domain of the base function",
                    ));
                }
                Ok(())
            }
        }
    }

    /// Closure of the domain, as an interval.
    fn domain(&self) -> (f64, f64) {
        match self {
            ScalarFun::NegLog { .. } => (0.0, f64::INFINITY),
            ScalarFun::LogBarrier { omega, .. } => (-omega, *omega),
            ScalarFun::PlusIndicator { base, lo, hi } => {
                let (a, b) = base.domain();
                (a.max(*lo), b.min(*hi))
            }
            ScalarFun::PlusSupport { base, .. } => base.domain(),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Whether a degenerate intersection point is actually in the domain.
    fn domain_closed_at(&self, lo: f64, hi: f64) -> bool {
        let (a, b) = self.domain();
        let pt = lo.max(a).min(hi.min(b));
        self.value(pt).is_finite()
    }

    /// `γφ` for `γ > 0`.
    pub fn scaled(&self, g: f64) -> ScalarFun {
        match self {
            ScalarFun::Zero => ScalarFun::Zero,
            ScalarFun::Power { p, alpha } => ScalarFun::Power {
                p: *p,
                alpha: g * alpha,
            },
            ScalarFun::NegLog { alpha } => ScalarFun::NegLog { alpha: g * alpha },
            ScalarFun::LogBarrier { omega, weight } => ScalarFun::LogBarrier {
                omega: *omega,
                weight: g * weight,
            },
            ScalarFun::Huber { omega, tau } => ScalarFun::Huber {
                omega: omega * libm::sqrt(g),
                tau: g * tau,
            },
            ScalarFun::PlusSupport { base, lo, hi } => ScalarFun::PlusSupport {
                base: Box::new(base.scaled(g)),
                lo: g * lo,
                hi: g * hi,
            },
            ScalarFun::PlusIndicator { base, lo, hi } => ScalarFun::PlusIndicator {
                base: Box::new(base.scaled(g)),
                lo: *lo,
                hi: *hi,
            },
        }
    }

    /// `φ(ξ)`, possibly `+∞`.
    pub fn value(&self, xi: f64) -> f64 {
        match self {
            ScalarFun::Zero => 0.0,
            ScalarFun::Power { p, alpha } => {
                let a = xi.abs();
                alpha
                    * match p {
                        PowerExp::One => a,
                        PowerExp::Two => a * a,
                        PowerExp::Three => a * a * a,
                        PowerExp::Four => (a * a) * (a * a),
                        PowerExp::ThreeHalves => a * libm::sqrt(a),
                        PowerExp::FourThirds => a * libm::cbrt(a),
                    }
            }
            ScalarFun::NegLog { alpha } => {
                if xi > 0.0 {
                    -alpha * libm::log(xi)
                } else {
                    f64::INFINITY
                }
            }
            ScalarFun::LogBarrier { omega, weight } => {
                if xi.abs() < *omega {
                    -weight * libm::log1p(-xi.abs() / omega)
                } else {
                    f64::INFINITY
                }
            }
            ScalarFun::Huber { omega, tau } => {
                let s = libm::sqrt(2.0 * tau);
                if xi.abs() <= omega / s {
                    tau * xi * xi
                } else {
                    omega * s * xi.abs() - omega * omega / 2.0
                }
            }
            ScalarFun::PlusSupport { base, lo, hi } => {
                let sig = if xi > 0.0 {
                    hi * xi
                } else if xi < 0.0 {
                    lo * xi
                } else {
                    0.0
                };
                base.value(xi) + sig
            }
            ScalarFun::PlusIndicator { base, lo, hi } => {
                if xi < *lo || xi > *hi {
                    f64::INFINITY
                } else {
                    base.value(xi)
                }
            }
        }
    }

    /// `φ*(u)`, possibly `+∞`. Not available for `PlusIndicator`.
    pub fn conj_value(&self, u: f64) -> Result<f64> {
        let inside = |bound: f64| u.abs() <= bound * (1.0 + 1e-9) + 1e-300;
        Ok(match self {
            ScalarFun::Zero => {
                if u.abs() <= 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ScalarFun::Power { p, alpha } => {
                let pv = p.value();
                if *p == PowerExp::One {
                    if inside(*alpha) {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    let a = u.abs();
                    let x = libm::pow(a / (alpha * pv), 1.0 / (pv - 1.0));
                    (pv - 1.0) / pv * a * x
                }
            }
            ScalarFun::NegLog { alpha } => {
                if u < 0.0 {
                    -alpha + alpha * libm::log(-alpha / u)
                } else {
                    f64::INFINITY
                }
            }
            ScalarFun::LogBarrier { omega, weight } => {
                // (wφ)*(u) = w φ*(u/w)
                let s = u.abs() / weight;
                let inner = if s <= 1.0 / omega {
                    0.0
                } else {
                    omega * s - 1.0 - libm::log(omega * s)
                };
                weight * inner
            }
            ScalarFun::Huber { omega, tau } => {
                if inside(omega * libm::sqrt(2.0 * tau)) {
                    u * u / (4.0 * tau)
                } else {
                    f64::INFINITY
                }
            }
            ScalarFun::PlusSupport { base, lo, hi } => {
                base.conj_value(soft_interval(u, *lo, *hi))?
            }
            ScalarFun::PlusIndicator { .. } => {
                return Err(Error::Capability("conjugate of base + interval indicator"))
            }
        })
    }

    /// `∂φ(0)` as an interval, or `None` when it is empty.
    pub fn subdiff_at_zero(&self) -> Option<(f64, f64)> {
        match self {
            ScalarFun::Zero | ScalarFun::Huber { .. } => Some((0.0, 0.0)),
            ScalarFun::Power {
                p: PowerExp::One,
                alpha,
            } => Some((-alpha, *alpha)),
            ScalarFun::Power { .. } => Some((0.0, 0.0)),
            ScalarFun::NegLog { .. } => None,
            ScalarFun::LogBarrier { omega, weight } => Some((-weight / omega, weight / omega)),
            ScalarFun::PlusSupport { base, lo, hi } => {
                let (a, b) = base.subdiff_at_zero()?;
                Some((a + lo, b + hi))
            }
            ScalarFun::PlusIndicator { base, lo, hi } => {
                if *lo > 0.0 || *hi < 0.0 {
                    return None;
                }
                let (a, b) = base.subdiff_at_zero()?;
                let a = if *lo == 0.0 { f64::NEG_INFINITY } else { a };
                let b = if *hi == 0.0 { f64::INFINITY } else { b };
                Some((a, b))
            }
        }
    }

    /// `max ∂φ(0)`; `+∞` when the subdifferential is unbounded above.
    pub fn max_subdiff_at_zero(&self) -> Result<f64> {
        self.subdiff_at_zero().map(|(_, b)| b).ok_or(Error::Catalog(
            "∂φ(0) is empty (0 is outside the domain)".into(),
        ))
    }

    pub fn is_even(&self) -> bool {
        match self {
            ScalarFun::Zero
            | ScalarFun::Power { .. }
            | ScalarFun::LogBarrier { .. }
            | ScalarFun::Huber { .. } => true,
            ScalarFun::NegLog { .. } => false,
            ScalarFun::PlusSupport { base, lo, hi } | ScalarFun::PlusIndicator { base, lo, hi } => {
                base.is_even() && *lo == -*hi
            }
        }
    }

    /// `φ = ι_{0} + η`, the one case where the distance composite
    /// degenerates to a projection.
    pub fn is_zero_indicator(&self) -> bool {
        match self {
            ScalarFun::PlusIndicator { base, lo, hi } => {
                *lo == 0.0 && *hi == 0.0 && base.value(0.0).is_finite()
            }
            _ => false,
        }
    }

    /// `max Argmin φ` for even `φ`, whose minimizers form `[−m, m]`. `None`
    /// when the set of minimizers is unbounded or `φ` is not even.
    pub fn max_argmin(&self) -> Option<f64> {
        if !self.is_even() {
            return None;
        }
        match self {
            ScalarFun::Zero => None,
            ScalarFun::Power { .. } | ScalarFun::LogBarrier { .. } | ScalarFun::Huber { .. } => {
                Some(0.0)
            }
            ScalarFun::NegLog { .. } => None,
            ScalarFun::PlusSupport { base, hi, .. } => {
                if *hi > 0.0 {
                    Some(0.0)
                } else {
                    base.max_argmin()
                }
            }
            ScalarFun::PlusIndicator { base, hi, .. } => match base.max_argmin() {
                Some(m) => Some(m.min(*hi)),
                None if hi.is_finite() => Some(*hi),
                None => None,
            },
        }
    }

    /// `prox_{γφ}(ξ)` without argument checks.
    pub(crate) fn prox_raw(&self, g: f64, xi: f64) -> f64 {
        match self {
            ScalarFun::Zero => xi,
            ScalarFun::Power { p, alpha } => power_prox(*p, g * alpha, xi),
            ScalarFun::NegLog { alpha } => {
                let a = g * alpha;
                let r = libm::sqrt(xi * xi + 4.0 * a);
                if xi >= 0.0 {
                    (xi + r) / 2.0
                } else {
                    2.0 * a / (r - xi)
                }
            }
            ScalarFun::LogBarrier { omega, weight } => {
                let w = g * weight;
                let a = xi.abs();
                let num = a * omega - w;
                if num <= 0.0 {
                    return 0.0;
                }
                let d = a - omega;
                let y = 2.0 * num / (a + omega + libm::sqrt(d * d + 4.0 * w));
                y.copysign(xi)
            }
            ScalarFun::Huber { .. } => {
                let ScalarFun::Huber { omega, tau } = self.scaled(g) else {
                    unreachable!()
                };
                let s = libm::sqrt(2.0 * tau);
                if xi.abs() <= omega * (2.0 * tau + 1.0) / s {
                    xi / (2.0 * tau + 1.0)
                } else {
                    xi - (omega * s).copysign(xi)
                }
            }
            ScalarFun::PlusSupport { base, lo, hi } => {
                base.prox_raw(g, soft_interval(xi, g * lo, g * hi))
            }
            ScalarFun::PlusIndicator { base, lo, hi } => base.prox_raw(g, xi).clamp(*lo, *hi),
        }
    }

    /// `prox_{γφ*}(ξ) = ξ − γ prox_{φ/γ}(ξ/γ)`.
    pub(crate) fn prox_conj_raw(&self, g: f64, xi: f64) -> f64 {
        xi - g * self.prox_raw(1.0 / g, xi / g)
    }
}

/// `soft_Ω` for `Ω = [lo, hi]`.
pub fn soft_interval(xi: f64, lo: f64, hi: f64) -> f64 {
    if xi < lo {
        xi - lo
    } else if xi > hi {
        xi - hi
    } else {
        0.0
    }
}

/// `prox` of `a·|·|^p` at `ξ`, using cancellation-free rearrangements of the
/// closed forms. All six maps are odd, so they are evaluated at `|ξ|`.
fn power_prox(p: PowerExp, a: f64, xi: f64) -> f64 {
    let x = xi.abs();
    let y = match p {
        PowerExp::One => (x - a).max(0.0),
        PowerExp::Two => x / (1.0 + 2.0 * a),
        PowerExp::Three => 2.0 * x / (libm::sqrt(1.0 + 12.0 * a * x) + 1.0),
        PowerExp::ThreeHalves => {
            // x + 9a²(1 − √(1+t))/8 with t = 16x/(9a²)
            let t = 16.0 * x / (9.0 * a * a);
            x - 9.0 * a * a / 8.0 * t / (1.0 + libm::sqrt(1.0 + t))
        }
        PowerExp::FourThirds => {
            let c = 256.0 * a * a * a / 729.0;
            let rho = libm::sqrt(x * x + c);
            let minus = c / (rho + x);
            let k = 4.0 * a / (3.0 * libm::cbrt(2.0));
            x + k * (libm::cbrt(minus) - libm::cbrt(rho + x))
        }
        PowerExp::Four => {
            let c = 1.0 / (27.0 * a);
            let rho = libm::sqrt(x * x + c);
            let minus = c / (rho + x);
            libm::cbrt((rho + x) / (8.0 * a)) - libm::cbrt(minus / (8.0 * a))
        }
    };
    y.max(0.0).copysign(xi)
}
