//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "subfrac", version, about = "Stable subordinator densities and fractional diffusion solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a density on an (x, t) grid.
    Density(DensityArgs),
    /// Tabulate the fractional diffusion solution ũ on an (x, t) grid.
    Solve(SolveArgs),
    /// Evaluate Mellin or Laplace transforms in closed form.
    Transform(TransformArgs),
    /// Run acceptance criteria and print a PASS/FAIL table.
    Validate(ValidateArgs),
    /// Draw a reproducible sample batch.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output file; standard output when absent or `-`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Law {
    /// Generalized Gamma g^γ_μ
    G,
    /// Reciprocal generalized Gamma e^γ_μ = g^{−γ}_μ
    E,
    /// Stable subordinator h_ν
    H,
    /// Inverse stable subordinator l_ν
    L,
    /// t⁻¹ r(x/t), the law of τ(L_t)
    R,
    /// t⁻¹ k(x/t), the law of L(τ_t)
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityMethod {
    /// Fastest available form; decimal ν uses the Fox H form
    Auto,
    /// Paired ⋆-chain of generalized Gamma laws (ν = 1/(n+1))
    Chain,
    /// Bessel kernel chain (ν = 1/(2m+1))
    Kernel,
    /// Fox H (Mellin–Barnes) form, any ν
    Fox,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub law: Law,
    /// Stability index, as a fraction `1/3` or a decimal.
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Times: `start:stop:count`, a comma list or one value.
    #[arg(long, default_value = "1")]
    pub t: String,
    /// Points: `start:stop:count`, a comma list or one value.
    #[arg(long)]
    pub x: String,
    /// Space the x grid logarithmically.
    #[arg(long)]
    pub log_x: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: DensityMethod,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    /// Closed Bessel form for ν = 1/(2m+1), composition for other fractions, Fox H for decimals
    Auto,
    Composition,
    Closed,
    Foxh,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub nu: String,
    #[arg(long, default_value = "1")]
    pub t: String,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub log_x: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: SolveMethod,
    /// Relative quadrature tolerance; overrides SUBFRAC_TOL.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    Mellin,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformLaw {
    G,
    E,
    H,
    L,
    /// The solution ũ
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variable {
    X,
    T,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub law: TransformLaw,
    #[arg(long, value_enum, default_value = "mellin")]
    pub kind: TransformKind,
    /// Variable the transform integrates over.
    #[arg(long = "in", value_enum, default_value = "x")]
    pub var: Variable,
    /// Transform arguments (η or λ): `start:stop:count`, a list or one value.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    /// Value of the variable held fixed.
    #[arg(long, default_value_t = 1.0)]
    pub fixed: f64,
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// `all`, or criteria by number or name, comma separated.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Monte Carlo batch size.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    /// τ_t
    Stable,
    /// L_t
    Inverse,
    /// Subordinated generalized Gamma with law ũ
    Subordinated,
    /// τ(L_t)
    Hl,
    /// L(τ_t)
    Lh,
    /// (τ₁/τ₂)^ν
    Ratio,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub kind: SampleKind,
    #[arg(long)]
    pub nu: String,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub out: Output,
}
