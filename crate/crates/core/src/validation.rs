//! The acceptance suite: ten numbered checks, each with a tolerance and a
//! runtime budget, shared by the integration tests and the command line.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::foxh::FoxHParams;
use crate::fracpde::{self, ResidualGrid, SolutionSpec};
use crate::gengamma::{self, ShapeParams};
use crate::montecarlo::{self, SampleBatch, TabulatedCdf};
use crate::quadrature::{self, QuadratureSpec, Strip};
use crate::specfun;
use crate::subordinator::{self, FifthPairing, StabilityIndex};

/// Number of acceptance criteria.
pub const CRITERIA: usize = 10;

const NAMES: [&str; CRITERIA] = [
    "laplace functional of h",
    "chain constructions of h and l",
    "representations of u",
    "pde residuals",
    "transform suite",
    "monte carlo concordance",
    "normalization",
    "fox h identities",
    "equivalent pairings",
    "gauss product",
];

const SLUGS: [&str; CRITERIA] = [
    "laplace",
    "chains",
    "representations",
    "pde",
    "transforms",
    "montecarlo",
    "normalization",
    "foxh",
    "pairings",
    "gauss",
];

const BUDGETS_S: [u64; CRITERIA] = [10, 30, 120, 120, 30, 300, 60, 30, 60, 1];

/// Settings shared by the criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Seed for random evaluation points and Monte Carlo batches.
    pub seed: u64,
    /// Draws per Monte Carlo batch.
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            samples: 1_000_000,
        }
    }
}

/// Which criteria to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suite(Vec<usize>);

impl Suite {
    pub fn all() -> Self {
        Suite((1..=CRITERIA).collect())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }
}

impl FromStr for Suite {
    type Err = Error;
    /// `all`, or a comma-separated list of numbers `1..=10` and names such as `pde`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Suite::all());
        }
        let mut ids = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let id = match part.parse::<usize>() {
                Ok(n) if (1..=CRITERIA).contains(&n) => n,
                Ok(n) => return Err(Error::domain(format!("no acceptance criterion {n}"))),
                Err(_) => SLUGS
                    .iter()
                    .position(|&slug| slug.eq_ignore_ascii_case(part))
                    .map(|i| i + 1)
                    .ok_or_else(|| Error::domain(format!("unknown suite {part:?}")))?,
            };
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        if ids.is_empty() {
            return Err(Error::domain("empty suite"));
        }
        Ok(Suite(ids))
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    /// Worst error over the criterion's cases, each divided by its tolerance.
    pub worst_ratio: f64,
    pub elapsed: Duration,
    pub budget: Duration,
    /// One line per case: `label: error (tol …)`.
    pub cases: Vec<String>,
    /// Set when a numerical routine failed outright.
    pub failure: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.worst_ratio <= 1.0 && self.elapsed <= self.budget
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {:>2} {verdict}  {:<32} worst err/tol {:.3e}  {:.2} s (budget {} s)",
            self.id,
            self.name,
            self.worst_ratio,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )?;
        if let Some(e) = &self.failure {
            write!(f, "  error: {e}")?;
        }
        Ok(())
    }
}

// Collects per-case errors against tolerances.
struct Cases {
    worst: f64,
    lines: Vec<String>,
}

impl Cases {
    fn new() -> Self {
        Cases {
            worst: 0.0,
            lines: Vec::new(),
        }
    }

    fn add(&mut self, label: impl Into<String>, err: f64, tol: f64) {
        let ratio = if err.is_nan() { f64::INFINITY } else { err / tol };
        self.worst = self.worst.max(ratio);
        self.lines.push(format!("{}: {err:.3e} (tol {tol:.0e})", label.into()));
    }

    fn rel(&mut self, label: impl Into<String>, got: f64, want: f64, tol: f64) {
        self.add(label, rel_err(got, want), tol);
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, cfg: &SuiteConfig) -> Result<CriterionReport> {
    if !(1..=CRITERIA).contains(&id) {
        return Err(Error::domain(format!("no acceptance criterion {id}")));
    }
    let start = Instant::now();
    let mut cases = Cases::new();
    let outcome = match id {
        1 => laplace_functional(&mut cases),
        2 => chain_constructions(&mut cases, cfg),
        3 => representations(&mut cases),
        4 => pde_residuals(&mut cases),
        5 => transforms(&mut cases),
        6 => monte_carlo(&mut cases, cfg),
        7 => normalization(&mut cases),
        8 => foxh_identities(&mut cases, cfg),
        9 => pairings(&mut cases),
        _ => gauss_product(&mut cases),
    };
    Ok(CriterionReport {
        id,
        name: NAMES[id - 1],
        worst_ratio: cases.worst,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(BUDGETS_S[id - 1]),
        cases: cases.lines,
        failure: outcome.err().map(|e| e.to_string()),
    })
}

/// Runs every criterion of `suite` in order.
pub fn run_suite(suite: &Suite, cfg: &SuiteConfig) -> Vec<CriterionReport> {
    suite
        .ids()
        .iter()
        .map(|&id| run_criterion(id, cfg).expect("suite ids are validated"))
        .collect()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-11)
}

fn integral<F>(f: F, scale: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok(quadrature::try_integrate_semi_infinite_scaled(f, scale, &quad())?.value)
}

// ν = 1/n
fn idx(n: u32) -> StabilityIndex {
    StabilityIndex::reciprocal(n - 1).expect("n >= 1")
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.gen::<f64>()).exp()
}

// ---------------------------------------------------------------- 1

fn laplace_functional(cases: &mut Cases) -> Result<()> {
    for n in [2u32, 3, 4] {
        let nu = 1.0 / f64::from(n);
        for t in [0.5f64, 1.0, 2.0] {
            for lambda in [0.5f64, 1.0, 2.0] {
                let got = integral(
                    |x| Ok((-lambda * x).exp() * subordinator::h_density(idx(n), x, t)?),
                    t.powf(1.0 / nu),
                )?;
                let want = (-t * lambda.powf(nu)).exp();
                cases.add(format!("nu=1/{n} t={t} lambda={lambda}"), (got - want).abs(), 1e-6);
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 2

fn chain_constructions(cases: &mut Cases, cfg: &SuiteConfig) -> Result<()> {
    let mut rng = montecarlo::rng_for(cfg.seed, 102);
    for n in 1..=3u32 {
        for _ in 0..10 {
            let x = log_uniform(&mut rng, 0.25, 4.0);
            let t = log_uniform(&mut rng, 0.25, 4.0);
            let closed = match n {
                1 => subordinator::h_half(x, t)?,
                2 => subordinator::h_third(x, t)?,
                _ => subordinator::h_quarter(x, t)?,
            };
            let chain = subordinator::h_density_chain(n, x, t)?;
            cases.rel(format!("h n={n} x={x:.4} t={t:.4}"), chain, closed, 1e-6);
            let closed = match n {
                1 => subordinator::l_half(x, t)?,
                2 => subordinator::l_third(x, t)?,
                _ => subordinator::l_quarter(x, t)?,
            };
            let chain = subordinator::l_density_chain(n, x, t)?;
            cases.rel(format!("l n={n} x={x:.4} t={t:.4}"), chain, closed, 1e-6);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 3

fn representations(cases: &mut Cases) -> Result<()> {
    let q = fracpde::default_quad();
    for (g, mu, nu) in [(1.0, 1.0, 3u32), (2.0, 0.5, 3), (1.0, 2.0, 2)] {
        let spec = SolutionSpec::new(g, mu, idx(nu))?;
        let closed_ok = spec.index().odd_reciprocal().is_some();
        for x in [0.5, 1.0, 2.0] {
            for t in [0.5, 1.0, 2.0] {
                let label = format!("gamma={g} mu={mu} nu=1/{nu} x={x} t={t}");
                let comp = fracpde::u_composition(&spec, x, t, &q)?;
                let fox = fracpde::u_foxh(&spec, x, t, None)?;
                cases.rel(format!("{label} composition/foxh"), comp, fox, 1e-5);
                if closed_ok {
                    let closed = fracpde::u_closed(&spec, x, t, &q)?;
                    cases.rel(format!("{label} closed/composition"), closed, comp, 1e-5);
                    cases.rel(format!("{label} closed/foxh"), closed, fox, 1e-5);
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 4

fn pde_residuals(cases: &mut Cases) -> Result<()> {
    let grid = ResidualGrid::new((0.5, 3.0), (0.5, 2.0));
    for (g, mu, nu, tol) in [(1.0, 1.0, 0.5, 5e-3), (2.0, 0.5, 1.0 / 3.0, 1e-2), (1.0, 2.0, 1.0, 1e-3)] {
        let spec = SolutionSpec::new(g, mu, StabilityIndex::new(nu)?)?;
        let r = fracpde::pde_residual(&spec, &grid)?;
        cases.add(
            format!("gamma={g} mu={mu} nu={} on {} nodes", spec.index(), r.nodes),
            r.residual,
            tol,
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- 5

fn mellin_case<F, M>(cases: &mut Cases, label: &str, etas: [f64; 5], strip: Strip, scale: f64, f: F, m: M) -> Result<()>
where
    F: Fn(f64) -> Result<f64>,
    M: Fn(Complex64) -> Result<Complex64>,
{
    for eta in etas {
        strip.check(eta)?;
        let got = integral(
            |x| {
                if x == 0.0 {
                    return Ok(0.0);
                }
                // the power may overflow where the density has already underflowed
                let v = f(x)?;
                Ok(if v == 0.0 { 0.0 } else { x.powf(eta - 1.0) * v })
            },
            scale,
        )?;
        let want = m(Complex64::new(eta, 0.0))?.re;
        cases.rel(format!("{label} eta={eta}"), got, want, 1e-6);
    }
    Ok(())
}

fn transforms(cases: &mut Cases) -> Result<()> {
    let g = ShapeParams::new(1.5, 2.0)?;
    let t = 1.3;
    mellin_case(
        cases,
        "g x-mellin",
        [0.0, 0.5, 1.0, 2.0, 3.5],
        gengamma::mellin_g_in_x_strip(g),
        t,
        |x| gengamma::g_density(g, x, t),
        |e| gengamma::mellin_g_in_x(g, e, t),
    )?;
    let x0 = 0.8;
    mellin_case(
        cases,
        "g t-mellin",
        [-1.0, 0.0, 1.0, 2.0, 2.7],
        gengamma::mellin_g_in_t_strip(g),
        x0,
        |s| gengamma::g_density(g, x0, s),
        |e| gengamma::mellin_g_in_t(g, e, x0),
    )?;
    let e_shape = g.reciprocal();
    mellin_case(
        cases,
        "e x-mellin",
        [-1.5, -0.5, 0.5, 1.0, 3.0],
        gengamma::mellin_g_in_x_strip(e_shape),
        t,
        |x| gengamma::e_density(g, x, t),
        |e| gengamma::mellin_g_in_x(e_shape, e, t),
    )?;
    for n in [2u32, 3] {
        let nu = 1.0 / f64::from(n);
        mellin_case(
            cases,
            &format!("h_1/{n} x-mellin"),
            [0.2, 0.5, 0.8, 1.0 + 0.3 * nu, 1.0 + 0.6 * nu],
            subordinator::h_mellin_in_x_strip(nu),
            t.powf(1.0 / nu),
            |x| subordinator::h_density(idx(n), x, t),
            |e| subordinator::h_mellin_in_x(nu, e, t),
        )?;
        mellin_case(
            cases,
            &format!("h_1/{n} t-mellin"),
            [0.3, 0.7, 1.0, 0.5 / nu, 0.8 / nu],
            subordinator::h_mellin_in_t_strip(nu),
            x0.powf(nu),
            |s| subordinator::h_density(idx(n), x0, s),
            |e| subordinator::h_mellin_in_t(nu, e, x0),
        )?;
        mellin_case(
            cases,
            &format!("l_1/{n} x-mellin"),
            [0.3, 0.8, 1.5, 2.0, 3.0],
            subordinator::l_mellin_in_x_strip(),
            t.powf(nu),
            |x| subordinator::l_density(idx(n), x, t),
            |e| subordinator::l_mellin_in_x(nu, e, t),
        )?;
        // t-Laplace: λ^{ν−1} e^{−xλ^ν}; x-Laplace: E_ν(−λ t^ν)
        for lambda in [0.5, 2.0] {
            let got = integral(|s| Ok((-lambda * s).exp() * subordinator::l_density(idx(n), x0, s)?), 1.0)?;
            let want = lambda.powf(nu - 1.0) * (-x0 * lambda.powf(nu)).exp();
            cases.rel(format!("l_1/{n} t-laplace lambda={lambda}"), got, want, 1e-6);
            let got = integral(|x| Ok((-lambda * x).exp() * subordinator::l_density(idx(n), x, t)?), 1.0)?;
            let want = specfun::mittag_leffler_neg(nu, lambda * t.powf(nu))?;
            cases.rel(format!("l_1/{n} x-laplace lambda={lambda}"), got, want, 1e-6);
        }
    }
    let spec = SolutionSpec::new(2.0, 0.5, idx(3))?;
    let q = fracpde::default_quad();
    mellin_case(
        cases,
        "u x-mellin",
        [0.3, 0.8, 1.5, 2.2, 3.0],
        fracpde::u_mellin_strip(&spec),
        1.0,
        |x| fracpde::u_composition(&spec, x, t, &q),
        |e| fracpde::u_mellin(&spec, e, t),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- 6

fn ks_against_density<F>(cases: &mut Cases, label: &str, batch: &SampleBatch, density: F) -> Result<()>
where
    F: FnMut(f64) -> Result<f64>,
{
    let cdf = TabulatedCdf::for_sample(density, batch.values(), 40)?;
    let d = montecarlo::ks_batch(batch, |x| Ok(cdf.eval(x)))?;
    cases.add(format!("{label} ks (n={})", batch.n()), d, 5e-3);
    Ok(())
}

fn monte_carlo(cases: &mut Cases, cfg: &SuiteConfig) -> Result<()> {
    let (n, seed) = (cfg.samples, cfg.seed);
    let t = 1.0;
    let b = montecarlo::sample_stable(0.5, t, n, seed)?;
    ks_against_density(cases, "h_1/2", &b, |x| subordinator::h_half(x, t))?;
    let b = montecarlo::sample_stable(1.0 / 3.0, t, n, seed)?;
    ks_against_density(cases, "h_1/3", &b, |x| subordinator::h_third(x, t))?;
    let b = montecarlo::sample_inverse(0.5, t, n, seed)?;
    ks_against_density(cases, "l_1/2", &b, |x| subordinator::l_half(x, t))?;
    let b = montecarlo::sample_inverse(1.0 / 3.0, t, n, seed)?;
    ks_against_density(cases, "l_1/3", &b, |x| subordinator::l_third(x, t))?;
    for (nu, name) in [(0.5, "1/2"), (1.0 / 3.0, "1/3")] {
        let b = montecarlo::sample_ratio(nu, n, seed)?;
        let d = montecarlo::ks_batch(&b, |y| subordinator::ratio_cdf_k(nu, y))?;
        cases.add(format!("ratio nu={name} ks"), d, 5e-3);
        let b = montecarlo::sample_compose_hl(nu, t, n, seed)?;
        let d = montecarlo::ks_batch(&b, |x| subordinator::ratio_cdf_r(nu, x / t))?;
        cases.add(format!("tau(L) nu={name} ks"), d, 5e-3);
        let b = montecarlo::sample_compose_lh(nu, t, n, seed)?;
        let d = montecarlo::ks_batch(&b, |x| subordinator::ratio_cdf_k(nu, x / t))?;
        cases.add(format!("L(tau) nu={name} ks"), d, 5e-3);
    }
    Ok(())
}

// ---------------------------------------------------------------- 7

fn mass<F>(cases: &mut Cases, label: &str, scale: f64, tol: f64, f: F) -> Result<()>
where
    F: FnMut(f64) -> Result<f64>,
{
    // outer quadrature two orders below the tolerance; chain integrands are only good to ~1e-9
    let spec = QuadratureSpec::default().with_rel_tol(tol * 1e-2);
    let m = quadrature::try_integrate_semi_infinite_scaled(f, scale, &spec)?.value;
    cases.add(format!("{label} mass"), (m - 1.0).abs(), tol);
    Ok(())
}

fn normalization(cases: &mut Cases) -> Result<()> {
    let t = 1.3;
    let g = ShapeParams::new(1.5, 2.0)?;
    mass(cases, "g", t, 1e-6, |x| gengamma::g_density(g, x, t))?;
    mass(cases, "e", t, 1e-6, |x| gengamma::e_density(g, x, t))?;
    mass(cases, "h_1/2", 1.0, 1e-6, |x| subordinator::h_half(x, t))?;
    mass(cases, "h_1/3", 1.0, 1e-6, |x| subordinator::h_third(x, t))?;
    mass(cases, "h_1/4", 1.0, 1e-6, |x| subordinator::h_quarter(x, t))?;
    mass(cases, "h_1/5 adjacent", 1.0, 1e-6, |x| {
        subordinator::h_fifth(FifthPairing::Adjacent, x, t)
    })?;
    mass(cases, "h_1/5 interleaved", 1.0, 1e-6, |x| {
        subordinator::h_fifth(FifthPairing::Interleaved, x, t)
    })?;
    mass(cases, "h_1/5 kernel chain", 1.0, 1e-6, |x| subordinator::h_density_kernel_chain(2, x, t))?;
    mass(cases, "h_1/2 chain", 1.0, 1e-6, |x| subordinator::h_density_chain(1, x, t))?;
    mass(cases, "h_1/3 chain", 1.0, 1e-6, |x| subordinator::h_density_chain(2, x, t))?;
    mass(cases, "h_1/4 three-fold chain", 1.0, 1e-5, |x| subordinator::h_density_chain(3, x, t))?;
    mass(cases, "h_0.7 fox", 1.0, 1e-6, |x| subordinator::h_density_general(0.7, x, t, None))?;
    mass(cases, "l_1/2", 1.0, 1e-6, |x| subordinator::l_half(x, t))?;
    mass(cases, "l_1/3", 1.0, 1e-6, |x| subordinator::l_third(x, t))?;
    mass(cases, "l_1/4", 1.0, 1e-6, |x| subordinator::l_quarter(x, t))?;
    mass(cases, "l_1/5 kernel chain", 1.0, 1e-6, |x| subordinator::l_density_q_chain(2, x, t))?;
    mass(cases, "l_1/4 three-fold chain", 1.0, 1e-5, |x| subordinator::l_density_chain(3, x, t))?;
    mass(cases, "l_0.7 fox", 1.0, 1e-6, |x| subordinator::l_density_general(0.7, x, t, None))?;
    for nu in [0.5, 1.0 / 3.0] {
        mass(cases, &format!("r nu={nu:.4}"), 1.0, 1e-6, |w| subordinator::ratio_density_r(nu, w))?;
        mass(cases, &format!("k nu={nu:.4}"), 1.0, 1e-6, |y| subordinator::ratio_density_k(nu, y))?;
    }
    let spec = SolutionSpec::new(2.0, 0.5, idx(3))?;
    let q = fracpde::default_quad();
    mass(cases, "u composition", 1.0, 1e-6, |x| fracpde::u_composition(&spec, x, t, &q))?;
    mass(cases, "u closed", 1.0, 1e-6, |x| fracpde::u_closed(&spec, x, t, &q))?;
    mass(cases, "u foxh", 1.0, 1e-6, |x| fracpde::u_foxh(&spec, x, t, None))?;
    Ok(())
}

// ---------------------------------------------------------------- 8

fn foxh_identities(cases: &mut Cases, cfg: &SuiteConfig) -> Result<()> {
    let mut rng = montecarlo::rng_for(cfg.seed, 108);
    let instances = [
        ("exponential", FoxHParams::exponential()),
        ("gen gamma mu=0.8", FoxHParams::gen_gamma(0.8)?),
        ("inverse stable nu=0.4", FoxHParams::inverse_stable(0.4)?),
        ("stable nu=0.6", FoxHParams::stable(0.6)?),
        ("fractional solution mu=1.5 nu=0.5", FoxHParams::fractional_solution(1.5, 0.5)?),
    ];
    for (name, h) in &instances {
        for _ in 0..5 {
            let x = log_uniform(&mut rng, 0.3, 3.0);
            // H(x) = c H_c(x^c)
            let c = rng.gen_range(0.5..2.0);
            let lhs = h.eval(x)?;
            let rhs = c * h.rescale_argument(c)?.eval(x.powf(c))?;
            cases.rel(format!("{name} rescale x={x:.4} c={c:.4}"), rhs, lhs, 1e-6);
            // H(x) = x^{−c} H'(x) with shifted parameters
            let c = rng.gen_range(-0.4..0.4);
            let rhs = x.powf(-c) * h.shift_power(c)?.eval(x)?;
            cases.rel(format!("{name} shift x={x:.4} c={c:.4}"), rhs, lhs, 1e-6);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 9

fn pairings(cases: &mut Cases) -> Result<()> {
    for (x, t) in [(0.3, 0.7), (0.8, 1.0), (1.0, 1.0), (2.5, 1.4), (6.0, 2.0)] {
        let a = subordinator::h_fifth(FifthPairing::Adjacent, x, t)?;
        let b = subordinator::h_fifth(FifthPairing::Interleaved, x, t)?;
        cases.rel(format!("x={x} t={t}"), b, a, 1e-5);
    }
    Ok(())
}

// ---------------------------------------------------------------- 10

fn gauss_product(cases: &mut Cases) -> Result<()> {
    for n in 1..=8u32 {
        let lhs = specfun::gamma_fraction_product(n)?;
        let rhs = (2.0 * std::f64::consts::PI).powf(f64::from(n) / 2.0) / f64::from(n + 1).sqrt();
        cases.rel(format!("n={n}"), lhs, rhs, 1e-12);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_parsing() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::all());
        assert_eq!("1, pde,10,1".parse::<Suite>().unwrap().ids(), &[1, 4, 10]);
        assert!("0".parse::<Suite>().is_err());
        assert!("bogus".parse::<Suite>().is_err());
        assert!("".parse::<Suite>().is_err());
    }

    #[test]
    fn cheap_criteria_pass() {
        let cfg = SuiteConfig::default();
        for id in [9, 10] {
            let r = run_criterion(id, &cfg).unwrap();
            assert!(r.passed(), "{r}\n{:#?}", r.cases);
            assert!(r.to_string().contains("PASS"));
        }
        assert!(run_criterion(11, &cfg).is_err());
    }

    #[test]
    fn failing_case_is_reported() {
        let mut c = Cases::new();
        c.rel("x", 1.1, 1.0, 1e-3);
        c.add("nan", f64::NAN, 1.0);
        assert!(c.worst.is_infinite());
        assert_eq!(c.lines.len(), 2);
    }
}
