//! Dual forward-backward splitting for problems of the form
//!
//! ```text
//! minimize  f(x) + g(Lx - r) + ½‖x - z‖²
//! ```
//!
//! The solver never touches the primal problem directly. It runs a
//! forward-backward iteration on the Fenchel dual
//!
//! ```text
//! minimize  (f*)~(z - L*v) + g*(v) + ⟨v, r⟩
//! ```
//!
//! and reads the unique primal solution off the dual iterates as
//! `prox_f(z - L*v)`. Only `prox_f`, `prox_g` (or `prox_{g*}`), `L` and `L*`
//! are ever evaluated, each at its own step.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, timing and the
//! command-line front end live in the `dualfb` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod apps;
pub mod error;
pub mod image;
pub mod linop;
pub mod oracle;
pub mod prox;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
pub use image::{discrete_divergence, discrete_gradient, GradField, ImageGrid};
pub use linop::{adjoint_consistency_check, estimate_opnorm, LinOp, LinearMap};
pub use prox::{
    moreau_envelope_value, project, prox_conjugate, prox_vector, scalar_prox, ConvexSet,
    ProxFunction, ScalarFun,
};
pub use solver::{
    dual_objective, primal_objective, recover_primal, solve_dual_fb, solve_dykstra_mode,
    DualFBConfig, ProblemInstance, SolveResult, Termination, TraceRow,
};
pub use space::{Space, VecR};
