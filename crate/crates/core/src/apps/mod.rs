//! Packaged recovery problems.
//!
//! Each model knows how to express itself as a generic [`ProblemInstance`]
//! (`to_problem`) and also carries its own specialized loop, written in the
//! variables natural to the application. Both produce the same iterates up to
//! rounding; the specialized loops exist because they avoid building the
//! generic operators and read more like the formulas users know.

mod best_approx;
mod dictionary;
mod potter_arun;
mod soft_approx;
mod tv;

use alloc::vec;
use alloc::vec::Vec;

use crate::solver::DualFBConfig;

pub use best_approx::{best_feasible_approx, best_feasible_approx_observed, BestApproxModel};
pub use dictionary::{dict_denoise, dict_denoise_observed, DictModel};
pub use potter_arun::{potter_arun, potter_arun_observed, PotterArunModel};
pub use soft_approx::{
    linf_relaxed_problem, linf_relaxed_recovery, soft_best_approx, soft_best_approx_observed,
    FourThirdsModel, SoftApproxModel,
};
pub use tv::{project_dp, tv_denoise, tv_denoise_observed, tv_objective, TvModel};

pub(crate) fn initial_dual(cfg: &DualFBConfig, m: usize) -> Vec<f64> {
    match &cfg.v0 {
        Some(v0) => v0.as_slice().to_vec(),
        None => vec![0.0; m],
    }
}
