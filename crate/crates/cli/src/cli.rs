use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "dualfb",
    version,
    about = "Dual forward-backward solvers, prox evaluation and oracle checks"
)]
pub struct Cli {
    /// TOML run configuration; command-line flags take precedence over it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Print nothing but errors.
    #[arg(long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    /// Print a progress row every 100 iterations.
    #[arg(long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total-variation denoising of a square PGM image.
    Tv(TvArgs),
    /// Denoising by penalizing dictionary coefficients.
    Dict(DictArgs),
    /// Best approximation from C ∩ L⁻¹(r + D).
    Bestapprox(ApproxArgs),
    /// Soft best approximation with distance penalties φ(d_C) and ψ(d_D).
    Softapprox(ApproxArgs),
    /// Minimum-norm point of C satisfying ⟨x, s_i⟩ = ρ_i.
    PotterArun(PotterArunArgs),
    /// Evaluate a catalog proximity operator at a point.
    ProxEval(ProxEvalArgs),
    /// Run the oracle self-check suites.
    Verify(VerifyArgs),
}

/// Iteration parameters shared by the solving subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Relative iterate-change tolerance.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Duality-gap tolerance.
    #[arg(long, allow_negative_numbers = true)]
    pub tol_gap: Option<f64>,
    /// Constant dual step γ (for `tv` the step on μ∇ is μγ).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Constant relaxation λ.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Margin ε of the admissible step boxes.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Write a per-iteration CSV trace here.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TvArgs {
    #[arg(long, value_name = "PGM")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "PGM")]
    pub output: Option<PathBuf>,
    /// Regularization weight μ > 0 (default 0.1).
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Pixel pair norm: 1, 2 or inf (default 2).
    #[arg(long)]
    pub p: Option<String>,
    /// Constrain the result to [0, 1].
    #[arg(long)]
    pub clamp: bool,
    /// Output maxval, 255 or 65535 (default: that of the input).
    #[arg(long)]
    pub maxval: Option<u16>,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct DictArgs {
    /// Observed vector z (CSV).
    #[arg(long, value_name = "CSV")]
    pub input: Option<PathBuf>,
    /// Unit-norm dictionary vectors, one per line (CSV).
    #[arg(long, value_name = "CSV")]
    pub dictionary: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    pub output: Option<PathBuf>,
    /// Coefficient penalty applied to every atom, e.g. power:1:0.1.
    #[arg(long)]
    pub phi: Option<String>,
    /// Frame bound δ (default: power-iteration estimate).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Constrain the result to this set, e.g. box:0:1.
    #[arg(long)]
    pub set: Option<String>,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Reference point z (CSV).
    #[arg(long, value_name = "CSV")]
    pub z: Option<PathBuf>,
    /// Linear operator, one row per line (default: identity).
    #[arg(long, value_name = "CSV")]
    pub l: Option<PathBuf>,
    /// Offset r (default: zero).
    #[arg(long, value_name = "CSV")]
    pub r: Option<PathBuf>,
    /// Set C in the primal space (default: whole).
    #[arg(long)]
    pub c: Option<String>,
    /// Set D in the range space (default: whole).
    #[arg(long)]
    pub d: Option<String>,
    /// Penalty on d_C (softapprox only).
    #[arg(long)]
    pub phi: Option<String>,
    /// Penalty on d_D (softapprox only).
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long, value_name = "CSV")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct PotterArunArgs {
    /// Measurement vectors s_i, one per line, with Σ‖s_i‖² ≤ 1.
    #[arg(long, value_name = "CSV")]
    pub s: Option<PathBuf>,
    /// Measurements ρ.
    #[arg(long, value_name = "CSV")]
    pub rho: Option<PathBuf>,
    /// Constraint set C (default: whole).
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long, value_name = "CSV")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct ProxEvalArgs {
    /// zero, power, neg_log, log_barrier, huber (applied coordinatewise), or
    /// indicator, support, dist_sq, sq_minus_dist, power_of_dist (with --set).
    #[arg(long)]
    pub fun: String,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// Set for the set-based kinds, e.g. l2:1.
    #[arg(long)]
    pub set: Option<String>,
    /// Step γ > 0.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Evaluation point, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Evaluate prox of the conjugate instead.
    #[arg(long)]
    pub conjugate: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// prox-grid, moreau, nonexpansive, adjoint or all (default all).
    #[arg(long)]
    pub suite: Option<String>,
    /// Cases per kind (default 100).
    #[arg(long)]
    pub cases: Option<usize>,
    /// Seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
}
