//! Subcommand implementations. Each builds its whole output in memory first,
//! so a failure never leaves a truncated file behind.

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use subfrac_core::fracpde::{self, Representation, SolutionSpec};
use subfrac_core::gengamma::{self, ShapeParams};
use subfrac_core::montecarlo;
use subfrac_core::quadrature::QuadratureSpec;
use subfrac_core::specfun;
use subfrac_core::subordinator as sub;
use subfrac_core::validation::{self, Suite, SuiteConfig};

use crate::cli::{
    Command, DensityArgs, DensityMethod, Law, Output, SampleArgs, SampleKind, SolveArgs, SolveMethod, TransformArgs,
    TransformKind, TransformLaw, ValidateArgs, Variable,
};
use crate::grid::{resolve_tol, usage, Grid, NuArg, UsageError};
use crate::table::DensityTable;

/// Environment variable overriding the default relative quadrature tolerance.
pub const TOL_ENV: &str = "SUBFRAC_TOL";

/// Some acceptance criteria failed; maps to exit code 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationFailed(pub Vec<usize>);

impl fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "validation failed for criteria {:?}", self.0)
    }
}

impl std::error::Error for ValidationFailed {}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Density(a) => density(a),
        Command::Solve(a) => solve(a),
        Command::Transform(a) => transform(a),
        Command::Validate(a) => validate(a),
        Command::Sample(a) => sample(a),
    }
}

fn emit(out: &Output, bytes: &[u8]) -> Result<()> {
    match out.output.as_deref() {
        Some(p) if p != Path::new("-") => {
            let mut f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            f.write_all(bytes)?;
            f.flush()?;
        }
        _ => {
            let mut s = io::stdout().lock();
            s.write_all(bytes)?;
            s.flush()?;
        }
    }
    Ok(())
}

fn emit_table(out: &Output, table: &DensityTable) -> Result<()> {
    let text = table.to_csv()?;
    emit(out, text.as_bytes())
}

fn need<T: Copy>(v: Option<T>, name: &str, law: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("--{name} is required for {law}")))
}

fn nu_arg(s: Option<&str>, law: &str) -> Result<NuArg> {
    let s = s.ok_or_else(|| usage(format!("--nu is required for {law}")))?;
    Ok(NuArg::parse(s)?)
}

fn shape(gamma: Option<f64>, mu: Option<f64>, law: &str) -> Result<ShapeParams> {
    let p = ShapeParams::new(need(gamma, "gamma", law)?, need(mu, "mu", law)?).map_err(|e| usage(e.to_string()))?;
    Ok(p)
}

fn grid(s: &str, log: bool) -> Result<Vec<f64>> {
    Ok(Grid::parse(s)?.values(log)?)
}

fn positive(values: &[f64], name: &str) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(usage(format!("{name} values must be positive, got {v}")));
    }
    Ok(())
}

fn law_name(law: Law) -> &'static str {
    match law {
        Law::G => "g",
        Law::E => "e",
        Law::H => "h",
        Law::L => "l",
        Law::R => "r",
        Law::K => "k",
    }
}

type Density = Box<dyn Fn(f64, f64) -> subfrac_core::Result<f64>>;

fn reciprocal_order(nu: &NuArg, what: &str) -> Result<u32> {
    nu.order()
        .ok_or_else(|| usage(format!("{what} needs nu given as a fraction 1/(n+1), got {}", nu.index)))
}

fn odd_order(nu: &NuArg) -> Result<u32> {
    if !nu.exact {
        return Err(usage("kernel chains need nu given as a fraction 1/(2m+1)"));
    }
    nu.index
        .odd_reciprocal()
        .ok_or_else(|| usage(format!("kernel chains need nu = 1/(2m+1), got {}", nu.index)))
}

fn density_fn(a: &DensityArgs) -> Result<(Density, Vec<(&'static str, String)>)> {
    let name = law_name(a.law);
    let mut params = vec![("law", name.to_string())];
    let f: Density = match a.law {
        Law::G | Law::E => {
            if a.method != DensityMethod::Auto {
                return Err(usage("--method applies to h and l only"));
            }
            let p = shape(a.gamma, a.mu, name)?;
            params.push(("gamma", p.gamma().to_string()));
            params.push(("mu", p.mu().to_string()));
            if a.law == Law::G {
                Box::new(move |x, t| gengamma::g_density(p, x, t))
            } else {
                if p.gamma() <= 0.0 {
                    return Err(usage("e needs gamma > 0"));
                }
                Box::new(move |x, t| gengamma::e_density(p, x, t))
            }
        }
        Law::H | Law::L => {
            let nu = nu_arg(a.nu.as_deref(), name)?;
            if nu.index.is_degenerate() {
                return Err(usage(format!("{name}_1 is a point mass and has no density")));
            }
            params.push(("nu", nu.index.to_string()));
            let method = match a.method {
                DensityMethod::Auto if nu.exact => DensityMethod::Auto,
                DensityMethod::Auto => DensityMethod::Fox,
                m => m,
            };
            params.push(("method", format!("{method:?}").to_lowercase()));
            let (idx, v) = (nu.index, nu.nu());
            match (a.law, method) {
                (Law::H, DensityMethod::Auto) => Box::new(move |x, t| sub::h_density(idx, x, t)),
                (Law::L, DensityMethod::Auto) => Box::new(move |x, t| sub::l_density(idx, x, t)),
                (Law::H, DensityMethod::Chain) => {
                    let n = reciprocal_order(&nu, "the chain form")?;
                    Box::new(move |x, t| sub::h_density_chain(n, x, t))
                }
                (Law::L, DensityMethod::Chain) => {
                    let n = reciprocal_order(&nu, "the chain form")?;
                    Box::new(move |x, t| sub::l_density_chain(n, x, t))
                }
                (Law::H, DensityMethod::Kernel) => {
                    let m = odd_order(&nu)?;
                    Box::new(move |x, t| sub::h_density_kernel_chain(m, x, t))
                }
                (Law::L, DensityMethod::Kernel) => {
                    let m = odd_order(&nu)?;
                    Box::new(move |x, t| sub::l_density_q_chain(m, x, t))
                }
                (Law::H, _) => Box::new(move |x, t| sub::h_density_general(v, x, t, None)),
                (_, _) => Box::new(move |x, t| sub::l_density_general(v, x, t, None)),
            }
        }
        Law::R | Law::K => {
            if a.method != DensityMethod::Auto {
                return Err(usage("--method applies to h and l only"));
            }
            let nu = nu_arg(a.nu.as_deref(), name)?;
            let v = nu.nu();
            if !(v < 1.0) {
                return Err(usage(format!("{name} needs nu < 1")));
            }
            params.push(("nu", nu.index.to_string()));
            if a.law == Law::R {
                Box::new(move |x, t| Ok(sub::ratio_density_r(v, x / t)? / t))
            } else {
                Box::new(move |x, t| Ok(sub::ratio_density_k(v, x / t)? / t))
            }
        }
    };
    Ok((f, params))
}

fn density(a: &DensityArgs) -> Result<()> {
    let (f, params) = density_fn(a)?;
    let xs = grid(&a.x, a.log_x)?;
    let ts = grid(&a.t, false)?;
    positive(&xs, "x")?;
    positive(&ts, "t")?;
    let mut table = DensityTable::new();
    for (k, v) in params {
        table.param(k, v);
    }
    table.param("x", &a.x).param("t", &a.t).param("log_x", a.log_x);
    for &t in &ts {
        for &x in &xs {
            let v = f(x, t).with_context(|| format!("evaluating at x={x}, t={t}"))?;
            table.push(x, t, v);
        }
    }
    emit_table(&a.out, &table)
}

fn solve(a: &SolveArgs) -> Result<()> {
    let nu = NuArg::parse(&a.nu)?;
    let spec = SolutionSpec::new(a.gamma, a.mu, nu.index).map_err(|e| usage(e.to_string()))?;
    let env = std::env::var(TOL_ENV).ok();
    let default = fracpde::default_quad().rel_tol;
    let tol = resolve_tol(a.tol, env.as_deref(), default)?;
    let quad = QuadratureSpec::default().with_rel_tol(tol);
    let rep = match a.method {
        SolveMethod::Auto if !nu.exact => Representation::FoxH,
        SolveMethod::Auto if nu.index.odd_reciprocal().is_some() => Representation::Closed,
        SolveMethod::Auto => Representation::Composition,
        SolveMethod::Composition => Representation::Composition,
        SolveMethod::Closed => Representation::Closed,
        SolveMethod::Foxh => Representation::FoxH,
    };
    let xs = grid(&a.x, a.log_x)?;
    let ts = grid(&a.t, false)?;
    positive(&xs, "x")?;
    positive(&ts, "t")?;
    let mut table = DensityTable::new();
    table
        .param("field", "u")
        .param("gamma", a.gamma)
        .param("mu", a.mu)
        .param("nu", nu.index)
        .param("method", rep)
        .param("tol", format!("{tol:e}"))
        .param("x", &a.x)
        .param("t", &a.t)
        .param("log_x", a.log_x);
    for &t in &ts {
        for &x in &xs {
            let v = match rep {
                Representation::Composition => fracpde::u_composition(&spec, x, t, &quad),
                Representation::Closed => fracpde::u_closed(&spec, x, t, &quad),
                Representation::FoxH => fracpde::u_foxh(&spec, x, t, None),
            }
            .with_context(|| format!("evaluating at x={x}, t={t}"))?;
            table.push(x, t, v);
        }
    }
    emit_table(&a.out, &table)
}

fn real(z: subfrac_core::Result<Complex64>) -> subfrac_core::Result<f64> {
    Ok(z?.re)
}

fn transform(a: &TransformArgs) -> Result<()> {
    let args = grid(&a.at, false)?;
    let fixed = a.fixed;
    if !(fixed > 0.0 && fixed.is_finite()) {
        return Err(usage(format!("--fixed must be positive, got {fixed}")));
    }
    let (arg_col, fixed_col) = match (a.kind, a.var) {
        (TransformKind::Mellin, Variable::X) => ("eta", "t"),
        (TransformKind::Mellin, Variable::T) => ("eta", "x"),
        (TransformKind::Laplace, Variable::X) => ("lambda", "t"),
        (TransformKind::Laplace, Variable::T) => ("lambda", "x"),
    };
    let mut table = DensityTable::with_columns([arg_col, fixed_col, "value"]);
    let kind = format!("{:?}", a.kind).to_lowercase();
    let var = format!("{:?}", a.var).to_lowercase();
    table.param("kind", &kind).param("in", &var);
    let unsupported = || usage(format!("no closed {kind} transform in {var} for this law"));
    let eval: Box<dyn Fn(f64) -> subfrac_core::Result<f64>> = match a.law {
        TransformLaw::G | TransformLaw::E => {
            let name = if a.law == TransformLaw::G { "g" } else { "e" };
            let p = shape(a.gamma, a.mu, name)?;
            if a.law == TransformLaw::E && p.gamma() <= 0.0 {
                return Err(usage("e needs gamma > 0"));
            }
            table.param("law", name).param("gamma", p.gamma()).param("mu", p.mu());
            let q = if a.law == TransformLaw::G { p } else { p.reciprocal() };
            match (a.kind, a.var) {
                (TransformKind::Mellin, Variable::X) => {
                    Box::new(move |e| real(gengamma::mellin_g_in_x(q, Complex64::new(e, 0.0), fixed)))
                }
                (TransformKind::Mellin, Variable::T) => {
                    Box::new(move |e| real(gengamma::mellin_g_in_t(q, Complex64::new(e, 0.0), fixed)))
                }
                _ => return Err(unsupported()),
            }
        }
        TransformLaw::H | TransformLaw::L => {
            let name = if a.law == TransformLaw::H { "h" } else { "l" };
            let nu = nu_arg(a.nu.as_deref(), name)?;
            let v = nu.nu();
            if !(v < 1.0) {
                return Err(usage(format!("{name} needs nu < 1")));
            }
            table.param("law", name).param("nu", nu.index);
            match (a.law, a.kind, a.var) {
                (TransformLaw::H, TransformKind::Mellin, Variable::X) => {
                    Box::new(move |e| real(sub::h_mellin_in_x(v, Complex64::new(e, 0.0), fixed)))
                }
                (TransformLaw::H, TransformKind::Mellin, Variable::T) => {
                    Box::new(move |e| real(sub::h_mellin_in_t(v, Complex64::new(e, 0.0), fixed)))
                }
                // e^{−tλ^ν}
                (TransformLaw::H, TransformKind::Laplace, Variable::X) => {
                    Box::new(move |lam| laplace_arg(lam).map(|lam| (-fixed * lam.powf(v)).exp()))
                }
                (TransformLaw::L, TransformKind::Mellin, Variable::X) => {
                    Box::new(move |e| real(sub::l_mellin_in_x(v, Complex64::new(e, 0.0), fixed)))
                }
                // E_ν(−λ t^ν)
                (TransformLaw::L, TransformKind::Laplace, Variable::X) => Box::new(move |lam| {
                    specfun::mittag_leffler_neg(v, laplace_arg(lam)? * fixed.powf(v))
                }),
                // λ^{ν−1} e^{−x λ^ν}
                (TransformLaw::L, TransformKind::Laplace, Variable::T) => Box::new(move |lam| {
                    let lam = laplace_arg(lam)?;
                    Ok(lam.powf(v - 1.0) * (-fixed * lam.powf(v)).exp())
                }),
                _ => return Err(unsupported()),
            }
        }
        TransformLaw::U => {
            let (g, mu) = (need(a.gamma, "gamma", "u")?, need(a.mu, "mu", "u")?);
            let nu = nu_arg(a.nu.as_deref(), "u")?;
            let spec = SolutionSpec::new(g, mu, nu.index).map_err(|e| usage(e.to_string()))?;
            table.param("law", "u").param("gamma", g).param("mu", mu).param("nu", nu.index);
            match (a.kind, a.var) {
                (TransformKind::Mellin, Variable::X) => {
                    Box::new(move |e| real(fracpde::u_mellin(&spec, Complex64::new(e, 0.0), fixed)))
                }
                _ => return Err(unsupported()),
            }
        }
    };
    table.param(fixed_col, fixed).param(arg_col, &a.at);
    for &s in &args {
        let v = eval(s).with_context(|| format!("evaluating the transform at {s}"))?;
        table.push(s, fixed, v);
    }
    emit_table(&a.out, &table)
}

fn laplace_arg(lam: f64) -> subfrac_core::Result<f64> {
    if lam >= 0.0 {
        Ok(lam)
    } else {
        Err(subfrac_core::Error::Domain(format!("Laplace argument must be nonnegative, got {lam}")))
    }
}

fn validate(a: &ValidateArgs) -> Result<()> {
    let suite: Suite = a.suite.parse().map_err(|e: subfrac_core::Error| usage(e.to_string()))?;
    if a.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let cfg = SuiteConfig {
        seed: a.seed,
        samples: a.samples,
    };
    let mut failed = Vec::new();
    let mut out = io::stdout().lock();
    for &id in suite.ids() {
        let r = validation::run_criterion(id, &cfg)?;
        writeln!(out, "{r}")?;
        out.flush()?;
        if !r.passed() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(ValidationFailed(failed).into())
    }
}

fn sample(a: &SampleArgs) -> Result<()> {
    let nu = NuArg::parse(&a.nu)?;
    let v = nu.nu();
    if a.n == 0 {
        return Err(usage("--n must be positive"));
    }
    let batch = match a.kind {
        SampleKind::Stable => montecarlo::sample_stable(v, a.t, a.n, a.seed),
        SampleKind::Inverse => montecarlo::sample_inverse(v, a.t, a.n, a.seed),
        SampleKind::Subordinated => {
            let spec = SolutionSpec::new(need(a.gamma, "gamma", "subordinated")?, need(a.mu, "mu", "subordinated")?, nu.index)
                .map_err(|e| usage(e.to_string()))?;
            montecarlo::sample_subordinated(&spec, a.t, a.n, a.seed)
        }
        SampleKind::Hl => montecarlo::sample_compose_hl(v, a.t, a.n, a.seed),
        SampleKind::Lh => montecarlo::sample_compose_lh(v, a.t, a.n, a.seed),
        SampleKind::Ratio => montecarlo::sample_ratio(v, a.n, a.seed),
    }
    .map_err(|e| match e {
        subfrac_core::Error::Domain(m) => usage(m),
        e => e.into(),
    })?;
    let mut buf = Vec::new();
    batch.write_csv(&mut buf)?;
    emit(&a.out, &buf)
}

/// Process exit code for an error: 2 bad arguments, 3 numerical failure,
/// 4 validation failure, 1 anything else (I/O).
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<ValidationFailed>().is_some() {
            return 4;
        }
        if let Some(e) = cause.downcast_ref::<subfrac_core::Error>() {
            return match e {
                subfrac_core::Error::Io(_) => 1,
                e if e.is_numerical() || matches!(e, subfrac_core::Error::NonMonotoneCdf { .. }) => 3,
                _ => 2,
            };
        }
    }
    1
}
