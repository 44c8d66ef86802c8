//! The solution `ũ^{γ,μ}_ν(x, t)` of `D^ν_t ũ = G_{γ,μ} ũ` in its three
//! representations, the operator `G_{γ,μ}`, discrete fractional derivatives
//! and the residual check that ties them together.
//!
//! `G_{γ,μ} f = γ^{−2} (∂_x x^{2−γ} ∂_x − (γμ − 1) ∂_x x^{1−γ}) f`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::foxh::{self, FoxHParams};
use crate::gengamma::{self, ShapeParams};
use crate::quadrature::{self, ContourSpec, QuadratureSpec, Strip};
use crate::specfun::{gamma_real, ln_gamma, ln_gamma_complex};
use crate::subordinator::{self, StabilityIndex};

/// Parameters `(γ, μ, ν)` of a solution field; `γ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionSpec {
    shape: ShapeParams,
    idx: StabilityIndex,
}

impl SolutionSpec {
    pub fn new(gamma: f64, mu: f64, idx: StabilityIndex) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::domain(format!("solution fields need gamma > 0, got {gamma}")));
        }
        Ok(SolutionSpec {
            shape: ShapeParams::new(gamma, mu)?,
            idx,
        })
    }

    pub fn shape(&self) -> ShapeParams {
        self.shape
    }

    pub fn index(&self) -> StabilityIndex {
        self.idx
    }

    pub fn gamma(&self) -> f64 {
        self.shape.gamma()
    }

    pub fn mu(&self) -> f64 {
        self.shape.mu()
    }

    pub fn nu(&self) -> f64 {
        self.idx.nu()
    }
}

/// Which formula evaluates `ũ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `∫ g^γ_μ(x, s^{1/γ}) l_ν(s, t) ds`
    Composition,
    /// Bessel-kernel form, `ν = 1/(2m+1)` only.
    Closed,
    /// `(γ/x) H^{2,0}_{2,2}[x^γ/t^ν]`
    FoxH,
}

impl FromStr for Representation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "composition" | "comp" => Ok(Representation::Composition),
            "closed" => Ok(Representation::Closed),
            "foxh" | "fox" | "h" => Ok(Representation::FoxH),
            other => Err(Error::domain(format!("unknown representation {other:?}"))),
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Composition => "composition",
            Representation::Closed => "closed",
            Representation::FoxH => "foxh",
        })
    }
}

fn check_xt(x: f64, t: f64) -> Result<()> {
    if x > 0.0 && t > 0.0 && x.is_finite() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("need finite x, t > 0, got ({x}, {t})")))
    }
}

/// `g̃^γ_μ(x, t) = g^γ_μ(x, t^{1/γ})`, the `ν = 1` solution.
pub fn g_tilde(shape: ShapeParams, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    gengamma::g_density(shape, x, (t.ln() / shape.gamma()).exp())
}

fn ln_g_tilde(shape: ShapeParams, x: f64, ln_s: f64) -> Result<f64> {
    // γ x^{γμ−1} s^{−μ} e^{−x^γ/s} / Γ(μ)
    let (g, mu) = (shape.gamma(), shape.mu());
    let ln_xg = g * x.ln();
    Ok(g.ln() + (g * mu - 1.0) * x.ln() - mu * ln_s - (ln_xg - ln_s).exp() - ln_gamma(mu)?)
}

/// `ũ` by the composition integral over the inverse-subordinator time.
pub fn u_composition(spec: &SolutionSpec, x: f64, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_xt(x, t)?;
    if spec.idx.is_degenerate() {
        return g_tilde(spec.shape, x, t);
    }
    let phi = |u: f64| -> Result<f64> {
        let s = u.exp();
        if !(s > 0.0 && s.is_finite()) {
            // g̃ vanishes as s → 0 and l as s → ∞
            return Ok(f64::NEG_INFINITY);
        }
        let l = subordinator::ln_l_density(spec.idx, s, t)?;
        if l == f64::NEG_INFINITY {
            return Ok(l);
        }
        Ok(ln_g_tilde(spec.shape, x, u)? + l + u)
    };
    let guess = 0.5 * (spec.gamma() * x.ln() + spec.nu() * t.ln());
    let l = quadrature::ln_integral_unimodal(phi, guess, quad)?;
    exp_checked(l)
}

/// `ũ` for `ν = 1/(2m+1)` by the Bessel-kernel form
/// `γ x^{γμ−1} ν^{(1−3ν)/(4ν)} / (Γ(μ) (π² t^{3ν})^{(1−ν)/(4ν)}) ∫ s^{1/(4ν) − 1/4 − μ} e^{−x^γ/s} v_ν(s, t) ds`,
/// with `v_ν(s, t) = 𝒬^{∘m}(s, t^ν/ν)`.
pub fn u_closed(spec: &SolutionSpec, x: f64, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_xt(x, t)?;
    if spec.idx.is_degenerate() {
        return g_tilde(spec.shape, x, t);
    }
    let m = spec.idx.odd_reciprocal().ok_or_else(|| {
        Error::domain(format!("closed solution form needs nu = 1/(2m+1), got {}", spec.idx))
    })?;
    let (g, mu, nu) = (spec.gamma(), spec.mu(), spec.nu());
    let big_t = (nu * t.ln()).exp() / nu;
    let ln_xg = g * x.ln();
    let power = 0.25 / nu - 0.25 - mu;
    let phi = |u: f64| -> Result<f64> {
        let s = u.exp();
        if !(s > 0.0 && s.is_finite()) {
            return Ok(f64::NEG_INFINITY);
        }
        let v = subordinator::ln_q_chain(m, s, big_t)?;
        if v == f64::NEG_INFINITY {
            return Ok(v);
        }
        Ok((power + 1.0) * u - (ln_xg - u).exp() + v)
    };
    let ln_pref = g.ln() + (g * mu - 1.0) * x.ln() + (1.0 - 3.0 * nu) / (4.0 * nu) * nu.ln()
        - ln_gamma(mu)?
        - (1.0 - nu) / (4.0 * nu) * (2.0 * PI.ln() + 3.0 * nu * t.ln());
    let guess = 0.5 * (ln_xg + big_t.ln());
    let l = quadrature::ln_integral_unimodal(phi, guess, quad)?;
    exp_checked(ln_pref + l)
}

/// `ũ = (γ/x) H^{2,0}_{2,2}[x^γ/t^ν | (1, ν), (μ, 0); (1, 1), (μ, 1)]`; `contour`, if given, is used for `H`.
pub fn u_foxh(spec: &SolutionSpec, x: f64, t: f64, contour: Option<&ContourSpec>) -> Result<f64> {
    check_xt(x, t)?;
    let (g, mu, nu) = (spec.gamma(), spec.mu(), spec.nu());
    match contour {
        None => foxh::u_density_foxh(g, mu, nu, x, t),
        Some(c) => {
            let h = FoxHParams::fractional_solution(mu, nu)?;
            Ok(g / x * h.eval_with((g * x.ln() - nu * t.ln()).exp(), c)?)
        }
    }
}

/// `ũ` by the chosen representation with default tolerances.
pub fn u_value(spec: &SolutionSpec, rep: Representation, x: f64, t: f64) -> Result<f64> {
    let quad = default_quad();
    match rep {
        Representation::Composition => u_composition(spec, x, t, &quad),
        Representation::Closed => u_closed(spec, x, t, &quad),
        Representation::FoxH => u_foxh(spec, x, t, None),
    }
}

/// Quadrature tolerance used by [`u_value`].
pub fn default_quad() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-9)
}

fn exp_checked(l: f64) -> Result<f64> {
    if l > 709.0 {
        return Err(Error::Overflow("solution field"));
    }
    if l.is_nan() {
        return Err(Error::NaNDetected { at: l });
    }
    Ok(l.exp())
}

/// Convergence strip of [`u_mellin`]: `Re η > 1 − γ min(μ, 1)`.
pub fn u_mellin_strip(spec: &SolutionSpec) -> Strip {
    Strip::new(1.0 - spec.gamma() * spec.mu().min(1.0), f64::INFINITY)
}

/// `∫ x^{η−1} ũ(x, t) dx = Γ((η−1)/γ + μ) Γ((η−1)/γ + 1) / (Γ(μ) Γ((η−1)ν/γ + 1)) t^{(η−1)ν/γ}`.
pub fn u_mellin(spec: &SolutionSpec, eta: Complex64, t: f64) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    u_mellin_strip(spec).check(eta.re)?;
    let (g, mu, nu) = (spec.gamma(), spec.mu(), spec.nu());
    let z = (eta - 1.0) / g;
    let l = ln_gamma_complex(z + mu)? + ln_gamma_complex(z + 1.0)? - ln_gamma(mu)? - ln_gamma_complex(z * nu + 1.0)?
        + z * nu * t.ln();
    Ok(l.exp())
}

// ---------------------------------------------------------------- grids

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("linspace needs n >= 1 and finite ends"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect())
}

/// `n` log-spaced points from `a` to `b` inclusive; `0 < a`, `0 < b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("logspace needs positive ends"));
    }
    let mut v: Vec<f64> = linspace(a.ln(), b.ln(), n)?.into_iter().map(f64::exp).collect();
    v[0] = a;
    if n > 1 {
        v[n - 1] = b;
    }
    Ok(v)
}

/// Values on a tensor grid; `values[it * nx + ix]` belongs to `(x[ix], t[it])`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    x: Vec<f64>,
    t: Vec<f64>,
    values: Vec<f64>,
    one_sided_ends: bool,
}

fn check_nodes(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::domain(format!("{what} nodes are empty")));
    }
    if !v.iter().all(|&a| a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("{what} nodes must be positive and finite")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(format!("{what} nodes must be strictly increasing")));
    }
    Ok(())
}

impl GridField {
    pub fn new(x: Vec<f64>, t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_nodes(&x, "x")?;
        check_nodes(&t, "t")?;
        if values.len() != x.len() * t.len() {
            return Err(Error::domain(format!(
                "grid has {} nodes but {} values",
                x.len() * t.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NaNDetected { at: x[i % x.len()] });
        }
        Ok(GridField {
            x,
            t,
            values,
            one_sided_ends: false,
        })
    }

    /// Tabulates `f(x, t)` on the grid.
    pub fn from_fn<F>(x: Vec<f64>, t: Vec<f64>, mut f: F) -> Result<Self>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        check_nodes(&x, "x")?;
        check_nodes(&t, "t")?;
        let mut values = Vec::with_capacity(x.len() * t.len());
        for &tt in &t {
            for &xx in &x {
                values.push(f(xx, tt)?);
            }
        }
        Self::new(x, t, values)
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, ix: usize, it: usize) -> f64 {
        self.values[it * self.x.len() + ix]
    }

    /// Values at time node `it`.
    pub fn row(&self, it: usize) -> &[f64] {
        let nx = self.x.len();
        &self.values[it * nx..(it + 1) * nx]
    }

    /// True when the first and last x columns come from one-sided stencils.
    pub fn has_one_sided_ends(&self) -> bool {
        self.one_sided_ends
    }
}

// Fornberg weights for derivatives 0..=order at z from nodes xs.
fn fd_weights(z: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

fn generator_row(gamma: f64, mu: f64, x: &[f64], f: &[f64], out: &mut [f64]) {
    let nx = x.len();
    let g2 = gamma * gamma;
    let k = gamma * mu - 1.0;
    let w: Vec<f64> = x.iter().zip(f).map(|(&xi, &fi)| xi.powf(1.0 - gamma) * fi).collect();
    let flux = |i: usize| -> f64 {
        // x^{2−γ} f' at the midpoint of [x_i, x_{i+1}]
        let xm = 0.5 * (x[i] + x[i + 1]);
        xm.powf(2.0 - gamma) * (f[i + 1] - f[i]) / (x[i + 1] - x[i])
    };
    for i in 1..nx - 1 {
        let a = (flux(i) - flux(i - 1)) / (0.5 * (x[i + 1] - x[i - 1]));
        let c = fd_weights(x[i], &x[i - 1..=i + 1], 1);
        let b = c[0][1] * w[i - 1] + c[1][1] * w[i] + c[2][1] * w[i + 1];
        out[i] = (a - k * b) / g2;
    }
    // ends: expanded form with four-point one-sided stencils
    for (i, lo) in [(0usize, 0usize), (nx - 1, nx - 4)] {
        let xs = &x[lo..lo + 4];
        let c = fd_weights(x[i], xs, 2);
        let d1: f64 = (0..4).map(|j| c[j][1] * f[lo + j]).sum();
        let d2: f64 = (0..4).map(|j| c[j][2] * f[lo + j]).sum();
        let xi = x[i];
        let p1 = xi.powf(1.0 - gamma);
        out[i] = (xi.powf(2.0 - gamma) * d2 + (2.0 - gamma) * p1 * d1
            - k * (p1 * d1 + (1.0 - gamma) * xi.powf(-gamma) * f[i]))
            / g2;
    }
}

/// Minimum number of x nodes accepted by [`apply_generator`].
pub const MIN_GENERATOR_NODES: usize = 5;

/// `G_{γ,μ}` applied row by row.
///
/// Interior nodes use the conservative form with midpoint fluxes and a
/// three-point derivative of `x^{1−γ} f`; the two end columns use the expanded
/// form with one-sided stencils and are flagged on the result.
pub fn apply_generator(shape: ShapeParams, field: &GridField) -> Result<GridField> {
    let nx = field.x.len();
    if nx < MIN_GENERATOR_NODES {
        return Err(Error::GridTooCoarse {
            needed: MIN_GENERATOR_NODES,
            got: nx,
        });
    }
    let mut values = vec![0.0; field.values.len()];
    for it in 0..field.t.len() {
        generator_row(
            shape.gamma(),
            shape.mu(),
            &field.x,
            field.row(it),
            &mut values[it * nx..(it + 1) * nx],
        );
    }
    let mut out = GridField::new(field.x.clone(), field.t.clone(), values)?;
    out.one_sided_ends = true;
    Ok(out)
}

// ---------------------------------------------------------------- time derivatives

/// Grünwald–Letnikov weights `w₀ = 1`, `w_k = w_{k−1}(1 − (ν+1)/k)`.
pub fn gl_weights(nu: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    let mut prev = 1.0;
    for k in 0..n {
        if k > 0 {
            prev *= 1.0 - (nu + 1.0) / k as f64;
        }
        w.push(prev);
    }
    w
}

fn check_series(nu: f64, series: &[f64], dt: f64) -> Result<()> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::domain(format!("derivative order must lie in (0, 1], got {nu}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("time step must be positive, got {dt}")));
    }
    if series.is_empty() {
        return Err(Error::domain("empty time series"));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NaNDetected { at: f64::NAN });
    }
    Ok(())
}

/// Riemann–Liouville derivative of order `ν` of samples `series[k] = f(k dt)`, `k ≥ 0`.
///
/// Grünwald–Letnikov sums, first order in `dt`; entry `k` approximates
/// `D^ν f(k dt)` (entry 0 carries no information).
pub fn riemann_liouville_dt(nu: f64, series: &[f64], dt: f64) -> Result<Vec<f64>> {
    check_series(nu, series, dt)?;
    let w = gl_weights(nu, series.len());
    let scale = dt.powf(-nu);
    Ok((0..series.len())
        .map(|k| scale * (0..=k).map(|j| w[j] * series[k - j]).sum::<f64>())
        .collect())
}

/// Caputo derivative: the Riemann–Liouville derivative of `f − f(0)`.
///
/// Equals `D^ν f − f(0) t^{−ν}/Γ(1−ν)` up to the discretization error.
pub fn caputo_dt(nu: f64, series: &[f64], dt: f64) -> Result<Vec<f64>> {
    check_series(nu, series, dt)?;
    let f0 = series[0];
    let shifted: Vec<f64> = series.iter().map(|v| v - f0).collect();
    riemann_liouville_dt(nu, &shifted, dt)
}

/// `f(0) t^{−ν}/Γ(1−ν)`, the gap between the two derivatives.
pub fn initial_value_term(nu: f64, f0: f64, t: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain(format!("derivative order must lie in (0, 1), got {nu}")));
    }
    Ok(f0 * t.powf(-nu) / gamma_real(1.0 - nu)?)
}

// ---------------------------------------------------------------- residual

// Natural cubic spline through (x_i, y_i).
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal solve for second derivatives
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let a = h0 / 6.0;
                let b = (h0 + h1) / 3.0;
                let cc = h1 / 6.0;
                let r = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
                let denom = b - a * c[i - 1];
                c[i] = cc / denom;
                d[i] = (r - a * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        CubicSpline { x, y, m }
    }

    fn eval(&self, z: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= z) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - z) / h;
        let b = (z - self.x[i]) / h;
        a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Nodes and step of a residual check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub x_min: f64,
    pub x_max: f64,
    /// x nodes, log-spaced; the two end nodes only feed stencils.
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Time nodes checked, spread uniformly over `[t_min, t_max]`.
    pub nt: usize,
    /// Step of the sampled time history from 0.
    pub dt: f64,
    pub representation: Representation,
}

impl ResidualGrid {
    pub fn new(x: (f64, f64), t: (f64, f64)) -> Self {
        ResidualGrid {
            x_min: x.0,
            x_max: x.1,
            nx: 61,
            t_min: t.0,
            t_max: t.1,
            nt: 7,
            dt: 1e-3,
            representation: Representation::FoxH,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0 && self.x_max > self.x_min && self.x_max.is_finite()) {
            return Err(Error::domain("residual x range must satisfy 0 < x_min < x_max"));
        }
        if !(self.t_min > 0.0 && self.t_max >= self.t_min && self.t_max.is_finite()) {
            return Err(Error::domain("residual t range must satisfy 0 < t_min <= t_max"));
        }
        if !(self.dt > 0.0 && 2.0 * self.dt < self.t_min) {
            return Err(Error::domain("time step must be positive and below t_min / 2"));
        }
        if self.nt == 0 {
            return Err(Error::domain("need at least one time node"));
        }
        if self.nx < MIN_GENERATOR_NODES {
            return Err(Error::GridTooCoarse {
                needed: MIN_GENERATOR_NODES,
                got: self.nx,
            });
        }
        Ok(())
    }
}

/// Outcome of [`pde_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `max |D^ν_t u − G u| / (max |D^ν_t u| + ε)` over interior nodes.
    pub residual: f64,
    pub max_abs_error: f64,
    pub max_time_derivative: f64,
    pub worst_x: f64,
    pub worst_t: f64,
    pub nodes: usize,
}

/// Regularization of the residual denominator.
pub const RESIDUAL_EPS: f64 = 1e-12;

// ln Φ(ξ) with ũ(x, t) = (γ/x) Φ(x^γ/t^ν), tabulated on a log grid and splined.
struct Profile {
    spline: CubicSpline,
    ln_xi_max: f64,
    gamma: f64,
    nu: f64,
}

// Profile nodes per unit of ln ξ.
const PROFILE_DENSITY: f64 = 64.0;

impl Profile {
    fn build(spec: &SolutionSpec, rep: Representation, ln_xi_lo: f64, ln_xi_hi: f64) -> Result<Self> {
        let (g, nu) = (spec.gamma(), spec.nu());
        let n = ((ln_xi_hi - ln_xi_lo) * PROFILE_DENSITY).ceil() as usize + 1;
        let n = n.max(8);
        let h = (ln_xi_hi - ln_xi_lo) / (n - 1) as f64;
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for i in 0..n {
            let lx = ln_xi_lo + h * i as f64;
            // at t = 1, ξ = x^γ
            let x = (lx / g).exp();
            let u = u_value(spec, rep, x, 1.0)?;
            if !(u > 0.0) {
                break;
            }
            xs.push(lx);
            ys.push((u * x / g).ln());
        }
        if xs.len() < 4 {
            return Err(Error::domain("solution profile vanishes on the residual grid"));
        }
        let ln_xi_max = *xs.last().expect("nonempty");
        Ok(Profile {
            spline: CubicSpline::new(xs, ys),
            ln_xi_max,
            gamma: g,
            nu,
        })
    }

    fn u(&self, x: f64, t: f64) -> f64 {
        let lx = self.gamma * x.ln() - self.nu * t.ln();
        if lx > self.ln_xi_max {
            return 0.0;
        }
        self.gamma / x * self.spline.eval(lx).exp()
    }
}

/// Residual of `D^ν_t u = G_{γ,μ} u` on interior nodes of `grid`.
///
/// For `ν < 1` the time derivative is the Riemann–Liouville derivative of the
/// sampled history from `t = 0`, Richardson-extrapolated from steps `dt` and
/// `2 dt`; the field is evaluated through its similarity profile
/// `ũ(x, t) = (γ/x) Φ(x^γ/t^ν)`, tabulated with the chosen representation and
/// splined in `(ln ξ, ln Φ)`. For `ν = 1` the exact field and a central time
/// difference are used.
pub fn pde_residual(spec: &SolutionSpec, grid: &ResidualGrid) -> Result<ResidualReport> {
    grid.validate()?;
    let x = logspace(grid.x_min, grid.x_max, grid.nx)?;
    let (g, nu) = (spec.gamma(), spec.nu());
    let t_check = if grid.nt == 1 {
        vec![grid.t_min]
    } else {
        linspace(grid.t_min, grid.t_max, grid.nt)?
    };
    // snap check times onto even multiples of dt
    let steps: Vec<usize> = t_check
        .iter()
        .map(|&t| 2 * ((t / (2.0 * grid.dt)).round() as usize).max(1))
        .collect();
    let mut derivative = vec![vec![0.0; x.len()]; steps.len()];
    let mut fields = vec![vec![0.0; x.len()]; steps.len()];

    if spec.idx.is_degenerate() {
        for (r, &k) in steps.iter().enumerate() {
            let t = k as f64 * grid.dt;
            for (i, &xi) in x.iter().enumerate() {
                let up = g_tilde(spec.shape, xi, t + grid.dt)?;
                let down = g_tilde(spec.shape, xi, t - grid.dt)?;
                derivative[r][i] = (up - down) / (2.0 * grid.dt);
                fields[r][i] = g_tilde(spec.shape, xi, t)?;
            }
        }
    } else {
        let k_max = *steps.iter().max().expect("nonempty");
        let ln_lo = g * grid.x_min.ln() - nu * (k_max as f64 * grid.dt).ln() - 0.5;
        let ln_hi = g * grid.x_max.ln() - nu * grid.dt.ln() + 0.5;
        let profile = Profile::build(spec, grid.representation, ln_lo, ln_hi)?;
        let w1 = gl_weights(nu, k_max + 1);
        let w2 = gl_weights(nu, k_max / 2 + 1);
        let (s1, s2) = (grid.dt.powf(-nu), (2.0 * grid.dt).powf(-nu));
        for (i, &xi) in x.iter().enumerate() {
            // u(x, 0⁺) = 0 for x > 0
            let hist: Vec<f64> = (0..=k_max)
                .map(|k| if k == 0 { 0.0 } else { profile.u(xi, k as f64 * grid.dt) })
                .collect();
            for (r, &k) in steps.iter().enumerate() {
                let d1: f64 = s1 * (0..=k).map(|j| w1[j] * hist[k - j]).sum::<f64>();
                let d2: f64 = s2 * (0..=k / 2).map(|j| w2[j] * hist[k - 2 * j]).sum::<f64>();
                derivative[r][i] = 2.0 * d1 - d2;
                fields[r][i] = hist[k];
            }
        }
    }

    let mut gen = vec![0.0; x.len()];
    let (mut max_err, mut max_d) = (0.0f64, 0.0f64);
    let (mut worst_x, mut worst_t) = (f64::NAN, f64::NAN);
    let mut nodes = 0;
    for (r, &k) in steps.iter().enumerate() {
        generator_row(g, spec.mu(), &x, &fields[r], &mut gen);
        for i in 1..x.len() - 1 {
            let e = (derivative[r][i] - gen[i]).abs();
            if !e.is_finite() {
                return Err(Error::NaNDetected { at: x[i] });
            }
            if e > max_err {
                max_err = e;
                worst_x = x[i];
                worst_t = k as f64 * grid.dt;
            }
            max_d = max_d.max(derivative[r][i].abs());
            nodes += 1;
        }
    }
    Ok(ResidualReport {
        residual: max_err / (max_d + RESIDUAL_EPS),
        max_abs_error: max_err,
        max_time_derivative: max_d,
        worst_x,
        worst_t,
        nodes,
    })
}
