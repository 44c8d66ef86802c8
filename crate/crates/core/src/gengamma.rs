//! Generalized Gamma densities `g^γ_μ(x, t)` and their reciprocal
//! counterparts `e^γ_μ = g^{−γ}_μ`, Mellin transforms, closed-form
//! ⋆-convolutions and numerical n-fold ⋆-chains.
//!
//! Throughout, `f₁ ⋆ f₂(x, t) = ∫₀^∞ f₁(x, s) f₂(s, t) ds`.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::quadrature::{self, Kernel, LnKernel, QuadratureSpec, Strip};
use crate::specfun::{self, ln_bessel_k_wide, ln_gamma, log_beta};

/// Shape pair `(γ, μ)` of a generalized Gamma law; `γ < 0` gives the reciprocal law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    gamma: f64,
    mu: f64,
}

impl ShapeParams {
    pub fn new(gamma: f64, mu: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma != 0.0) {
            return Err(Error::domain(format!("shape gamma must be finite and nonzero, got {gamma}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!("shape mu must be positive, got {mu}")));
        }
        Ok(ShapeParams { gamma, mu })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The reciprocal law `(−γ, μ)`.
    pub fn reciprocal(&self) -> Self {
        ShapeParams {
            gamma: -self.gamma,
            mu: self.mu,
        }
    }

    fn require_positive_gamma(&self, what: &str) -> Result<()> {
        if self.gamma > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(format!("{what} needs gamma > 0, got {}", self.gamma)))
        }
    }
}

/// Ordered factors of a ⋆-chain `g^{γ₁}_{μ₁} ⋆ … ⋆ g^{γₙ}_{μₙ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeVector(Vec<ShapeParams>);

impl ShapeVector {
    pub fn new(items: Vec<ShapeParams>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::domain("shape vector must be nonempty"));
        }
        Ok(ShapeVector(items))
    }

    /// `(γ, μ_j)` for every `μ_j` in `mus`.
    pub fn uniform(gamma: f64, mus: &[f64]) -> Result<Self> {
        let items = mus.iter().map(|&m| ShapeParams::new(gamma, m)).collect::<Result<Vec<_>>>()?;
        ShapeVector::new(items)
    }

    pub fn as_slice(&self) -> &[ShapeParams] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and positive, got {v}")))
    }
}

/// `Q^γ_μ(z) = γ z^{γμ−1} e^{−z^γ} / Γ(μ)`, `γ > 0`.
pub fn q_pdf(p: ShapeParams, z: f64) -> Result<f64> {
    p.require_positive_gamma("q_pdf")?;
    check_positive("z", z)?;
    g_density(p, z, 1.0)
}

/// `ln g^γ_μ(x, t)`.
pub fn ln_g_density(p: ShapeParams, x: f64, t: f64) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    ln_g_log(p, x.ln(), t.ln())
}

// ln g^γ_μ with both arguments in log form.
fn ln_g_log(p: ShapeParams, lx: f64, lt: f64) -> Result<f64> {
    let (g, m) = (p.gamma, p.mu);
    let power = (g * (lx - lt)).exp();
    Ok(g.abs().ln() + (g * m - 1.0) * lx - g * m * lt - power - ln_gamma(m)?)
}

/// `g^γ_μ(x, t) = |γ| x^{γμ−1} t^{−γμ} e^{−(x/t)^γ} / Γ(μ)`; covers the
/// reciprocal density for `γ < 0`.
pub fn g_density(p: ShapeParams, x: f64, t: f64) -> Result<f64> {
    let l = ln_g_density(p, x, t)?;
    if l > 709.0 {
        return Err(Error::Overflow("generalized Gamma density"));
    }
    Ok(l.exp())
}

/// `e^γ_μ(x, t) = g^{−γ}_μ(x, t)`, `γ > 0`.
pub fn e_density(p: ShapeParams, x: f64, t: f64) -> Result<f64> {
    p.require_positive_gamma("e_density")?;
    g_density(p.reciprocal(), x, t)
}

/// `Pr{G_t ≤ x}` for the law `g^γ_μ(·, t)`, through the regularized incomplete Gamma function.
pub fn g_cdf(p: ShapeParams, x: f64, t: f64) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    let z = ((x.ln() - t.ln()) * p.gamma).exp();
    let lower = regularized_gamma_p(p.mu, z)?;
    Ok(if p.gamma > 0.0 { lower } else { 1.0 - lower })
}

// P(a, z) by series for z < a + 1 and a continued fraction otherwise.
fn regularized_gamma_p(a: f64, z: f64) -> Result<f64> {
    if z <= 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(1.0);
    }
    let ln_pref = a * z.ln() - z - ln_gamma(a)?;
    if z < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= z / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                return Ok((sum.ln() + ln_pref).exp().min(1.0));
            }
        }
        return Err(Error::NonConvergence {
            what: "incomplete gamma series",
            estimate: sum,
            error: term,
        });
    }
    // Lentz continued fraction for Q(a, z)
    let tiny = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            let q = (h.ln() + ln_pref).exp();
            return Ok((1.0 - q).clamp(0.0, 1.0));
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma continued fraction",
        estimate: h,
        error: f64::NAN,
    })
}

/// Fundamental strip of the x-Mellin transform of `g^γ_μ(·, t)`.
pub fn mellin_g_in_x_strip(p: ShapeParams) -> Strip {
    // Re((η − 1)/γ + μ) > 0
    let edge = 1.0 - p.gamma * p.mu;
    if p.gamma > 0.0 {
        Strip::new(edge, f64::INFINITY)
    } else {
        Strip::new(f64::NEG_INFINITY, edge)
    }
}

/// `∫₀^∞ x^{η−1} g^γ_μ(x, t) dx = Γ((η−1)/γ + μ) t^{η−1} / Γ(μ)`.
pub fn mellin_g_in_x(p: ShapeParams, eta: Complex64, t: f64) -> Result<Complex64> {
    check_positive("t", t)?;
    mellin_g_in_x_strip(p).check(eta.re)?;
    let arg = (eta - 1.0) / p.gamma + p.mu;
    let l = specfun::ln_gamma_complex(arg)? - ln_gamma(p.mu)? + (eta - 1.0) * t.ln();
    Ok(l.exp())
}

/// Fundamental strip of the t-Mellin transform of `g^γ_μ(x, ·)`.
pub fn mellin_g_in_t_strip(p: ShapeParams) -> Strip {
    // Re(μ − η/γ) > 0
    let edge = p.gamma * p.mu;
    if p.gamma > 0.0 {
        Strip::new(f64::NEG_INFINITY, edge)
    } else {
        Strip::new(edge, f64::INFINITY)
    }
}

/// `∫₀^∞ t^{η−1} g^γ_μ(x, t) dt = Γ(μ − η/γ) x^{η−1} / Γ(μ)`.
pub fn mellin_g_in_t(p: ShapeParams, eta: Complex64, x: f64) -> Result<Complex64> {
    check_positive("x", x)?;
    mellin_g_in_t_strip(p).check(eta.re)?;
    let arg = p.mu - eta / p.gamma;
    let l = specfun::ln_gamma_complex(arg)? - ln_gamma(p.mu)? + (eta - 1.0) * x.ln();
    Ok(l.exp())
}

/// x-Mellin transform of a ⋆-chain: `t^{η−1} ∏ Γ((η−1)/γ_j + μ_j)/Γ(μ_j)`.
pub fn mellin_star_in_x(v: &ShapeVector, eta: Complex64, t: f64) -> Result<Complex64> {
    check_positive("t", t)?;
    let mut l = (eta - 1.0) * t.ln();
    for p in v.as_slice() {
        mellin_g_in_x_strip(*p).check(eta.re)?;
        l += specfun::ln_gamma_complex((eta - 1.0) / p.gamma + p.mu)? - ln_gamma(p.mu)?;
    }
    Ok(l.exp())
}

/// `g^γ_{μ₁} ⋆ g^{−γ}_{μ₂}(x, t) = γ x^{γμ₁−1} t^{γμ₂} / (B(μ₁, μ₂)(t^γ + x^γ)^{μ₁+μ₂})`, `γ > 0`.
pub fn conv_opposite_closed(gamma: f64, mu1: f64, mu2: f64, x: f64, t: f64) -> Result<f64> {
    check_positive("gamma", gamma)?;
    check_positive("mu1", mu1)?;
    check_positive("mu2", mu2)?;
    check_positive("x", x)?;
    check_positive("t", t)?;
    Ok(ln_conv_opposite(gamma, mu1, mu2, x.ln(), t.ln())?.exp())
}

fn ln_conv_opposite(gamma: f64, mu1: f64, mu2: f64, lx: f64, lt: f64) -> Result<f64> {
    // (t^γ + x^γ)^{μ₁+μ₂} = t^{γ(μ₁+μ₂)} (1 + r)^{μ₁+μ₂}, r = (x/t)^γ
    let lr = gamma * (lx - lt);
    let ln_one_plus = if lr > 0.0 { lr + (-lr).exp().ln_1p() } else { lr.exp().ln_1p() };
    Ok(gamma.ln() - log_beta(mu1, mu2)? + (gamma * mu1 - 1.0) * lx - gamma * mu1 * lt - (mu1 + mu2) * ln_one_plus)
}

/// `g^{−γ}_{μ₁} ⋆ g^γ_{μ₂}(x, t)`, `γ > 0`: the mirrored Beta-type law.
pub fn conv_opposite_closed_mirrored(gamma: f64, mu1: f64, mu2: f64, x: f64, t: f64) -> Result<f64> {
    conv_opposite_closed(gamma, mu2, mu1, x, t)
}

/// `g^γ_{μ₁} ⋆ g^γ_{μ₂}(x, t) = 2|γ| r^{(μ₁+μ₂)/2} K_{μ₂−μ₁}(2√r) / (x Γ(μ₁)Γ(μ₂))`, `r = (x/t)^γ`.
pub fn conv_same_closed(gamma: f64, mu1: f64, mu2: f64, x: f64, t: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma != 0.0) {
        return Err(Error::domain("gamma must be finite and nonzero"));
    }
    check_positive("mu1", mu1)?;
    check_positive("mu2", mu2)?;
    check_positive("x", x)?;
    check_positive("t", t)?;
    let l = ln_conv_same(gamma, mu1, mu2, x.ln(), t.ln())?;
    if l > 709.0 {
        return Err(Error::Overflow("Bessel-K convolution"));
    }
    Ok(l.exp())
}

fn ln_conv_same(gamma: f64, mu1: f64, mu2: f64, lx: f64, lt: f64) -> Result<f64> {
    let ln_r = gamma * (lx - lt);
    // ln z with z = 2√r
    let ln_z = LN_2 + 0.5 * ln_r;
    Ok((2.0 * gamma.abs()).ln() + 0.5 * (mu1 + mu2) * ln_r + ln_bessel_k_wide(mu2 - mu1, ln_z)?
        - lx
        - ln_gamma(mu1)?
        - ln_gamma(mu2)?)
}

type BoxKernel = Box<dyn Fn(f64, f64) -> Result<f64>>;

fn single_kernel(p: ShapeParams) -> BoxKernel {
    Box::new(move |x, t| g_density(p, x, t))
}

type LnBoxKernel = Box<dyn Fn(f64, f64) -> Result<f64>>;

fn ln_single_kernel(p: ShapeParams) -> LnBoxKernel {
    Box::new(move |lx, lt| ln_g_log(p, lx, lt))
}

fn ln_pair_kernel(a: ShapeParams, b: ShapeParams) -> Option<LnBoxKernel> {
    if a.gamma == b.gamma {
        let (g, m1, m2) = (a.gamma, a.mu, b.mu);
        return Some(Box::new(move |lx, lt| ln_conv_same(g, m1, m2, lx, lt)));
    }
    if a.gamma == -b.gamma {
        let (m1, m2) = (a.mu, b.mu);
        return Some(if a.gamma > 0.0 {
            let g = a.gamma;
            Box::new(move |lx, lt| ln_conv_opposite(g, m1, m2, lx, lt))
        } else {
            let g = b.gamma;
            Box::new(move |lx, lt| ln_conv_opposite(g, m2, m1, lx, lt))
        });
    }
    None
}

fn chain(kernels: &[BoxKernel], x: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    if kernels.len() == 1 {
        return kernels[0](x, t);
    }
    let refs: Vec<Kernel<'_>> = kernels.iter().map(|k| k.as_ref() as Kernel<'_>).collect();
    quadrature::circ_compose(&refs, x, t, spec)
}

/// `ln (g^{γ₁}_{μ₁} ⋆ … ⋆ g^{γₙ}_{μₙ})(x, t)`, with `x` and `t` given as logs.
///
/// Adjacent factors with `γ_{j+1} = ±γ_j` are collapsed greedily, left to
/// right, into their closed forms; the remaining kernels are composed in log
/// space around the located peak of each level, so tails far outside the
/// `f64` range stay accurate.
pub fn ln_star_convolve(v: &ShapeVector, ln_x: f64, ln_t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let items = v.as_slice();
    let mut kernels: Vec<LnBoxKernel> = Vec::with_capacity(items.len());
    let mut i = 0;
    while i < items.len() {
        if i + 1 < items.len() {
            if let Some(k) = ln_pair_kernel(items[i], items[i + 1]) {
                kernels.push(k);
                i += 2;
                continue;
            }
        }
        kernels.push(ln_single_kernel(items[i]));
        i += 1;
    }
    let refs: Vec<LnKernel<'_>> = kernels.iter().map(|k| k.as_ref() as LnKernel<'_>).collect();
    quadrature::ln_compose_unimodal(&refs, ln_x, ln_t, spec)
}

/// `g^{γ₁}_{μ₁} ⋆ … ⋆ g^{γₙ}_{μₙ}(x, t)`; see [`ln_star_convolve`].
pub fn star_convolve(v: &ShapeVector, x: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    let l = ln_star_convolve(v, x.ln(), t.ln(), spec)?;
    if l > 709.0 {
        return Err(Error::Overflow("star convolution"));
    }
    Ok(l.exp())
}

/// [`star_convolve`] without closed-form collapsing: every factor is a quadrature level.
pub fn star_convolve_quadrature(v: &ShapeVector, x: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    let kernels: Vec<BoxKernel> = v.as_slice().iter().map(|&p| single_kernel(p)).collect();
    chain(&kernels, x, t, spec)
}

/// A draw from `g^γ_μ(·, t)`: `t · G^{1/γ}` with `G ~ Gamma(μ, 1)`.
pub fn sample_gengamma<R: Rng + ?Sized>(p: ShapeParams, t: f64, rng: &mut R) -> Result<f64> {
    check_positive("t", t)?;
    let dist = Gamma::new(p.mu, 1.0).map_err(|e| Error::domain(e.to_string()))?;
    let g: f64 = dist.sample(rng);
    Ok(t * g.powf(1.0 / p.gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn sp(g: f64, m: f64) -> ShapeParams {
        ShapeParams::new(g, m).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn x_integral(f: impl Fn(f64) -> Result<f64>, scale: f64) -> f64 {
        quadrature::try_integrate_semi_infinite_scaled(f, scale, &spec()).unwrap().value
    }

    #[test]
    fn shape_validation() {
        assert!(ShapeParams::new(0.0, 1.0).is_err());
        assert!(ShapeParams::new(1.0, 0.0).is_err());
        assert!(ShapeParams::new(f64::NAN, 1.0).is_err());
        assert!(ShapeVector::new(vec![]).is_err());
    }

    #[test]
    fn q_pdf_special_cases() {
        for z in [0.1, 1.0, 3.7] {
            assert_relative_eq!(q_pdf(sp(1.0, 1.0), z).unwrap(), (-z).exp(), max_relative = 1e-14);
            let half_normal = 2.0 / PI.sqrt() * (-z * z).exp();
            assert_relative_eq!(q_pdf(sp(2.0, 0.5), z).unwrap(), half_normal, max_relative = 1e-13);
        }
        assert!(q_pdf(sp(-1.0, 1.0), 1.0).is_err());
        let total = x_integral(|z| q_pdf(sp(2.5, 0.7), z), 1.0);
        assert_relative_eq!(total, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn g_density_values() {
        assert_relative_eq!(g_density(sp(1.0, 1.0), 1.0, 1.0).unwrap(), (-1f64).exp(), max_relative = 1e-14);
        let expect = (-1f64).exp() / PI.sqrt();
        assert_relative_eq!(g_density(sp(1.0, 0.5), 1.0, 1.0).unwrap(), expect, max_relative = 1e-13);
        assert_relative_eq!(e_density(sp(1.0, 0.5), 1.0, 1.0).unwrap(), expect, max_relative = 1e-13);
        for &(x, t) in &[(0.3, 2.0), (4.0, 0.5)] {
            assert_eq!(
                g_density(sp(-1.0, 0.5), x, t).unwrap(),
                e_density(sp(1.0, 0.5), x, t).unwrap()
            );
        }
        assert!(g_density(sp(1.0, 1.0), 0.0, 1.0).is_err());
        assert!(e_density(sp(-1.0, 1.0), 1.0, 1.0).is_err());
        assert!(matches!(g_density(sp(1.0, 0.001), 1e-320, 1.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn densities_integrate_to_one() {
        for &(g, m, t) in &[(1.0, 1.0, 1.0), (2.0, 0.5, 3.0), (0.5, 2.0, 0.2), (-1.0, 0.5, 1.0), (-3.0, 1.7, 2.0)] {
            let total = x_integral(|x| g_density(sp(g, m), x, t), t);
            assert!((total - 1.0).abs() < 1e-9, "g={g} mu={m}: {total}");
        }
    }

    #[test]
    fn first_passage_relation() {
        // Pr{E_t < x} = Pr{G_x > t}
        let p = sp(1.0, 0.5);
        let (x, t) = (1.3, 0.8);
        let lhs = quadrature::try_integrate_interval(|y| e_density(p, y, t), 0.0, x, &spec()).unwrap().value;
        let rhs = quadrature::try_integrate_upper(|s| g_density(p, s, x), t, &spec()).unwrap().value;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        assert_relative_eq!(lhs, 1.0 - g_cdf(p, t, x).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(g_cdf(p.reciprocal(), x, t).unwrap(), lhs, max_relative = 1e-12);
    }

    #[test]
    fn g_cdf_matches_quadrature() {
        for &(g, m, x) in &[(1.0, 3.0, 0.5), (2.0, 0.5, 1.2), (0.7, 8.0, 30.0), (-1.5, 2.0, 0.9)] {
            let p = sp(g, m);
            let q = quadrature::try_integrate_interval(|y| g_density(p, y, 1.0), 0.0, x, &spec()).unwrap().value;
            assert_relative_eq!(g_cdf(p, x, 1.0).unwrap(), q, max_relative = 1e-10);
        }
    }

    #[test]
    fn mellin_in_x_values() {
        let p = sp(1.0, 1.0);
        assert_relative_eq!(mellin_g_in_x(p, Complex64::new(2.0, 0.0), 1.0).unwrap().re, 1.0, max_relative = 1e-13);
        assert_relative_eq!(mellin_g_in_x(p, Complex64::new(3.0, 0.0), 1.0).unwrap().re, 2.0, max_relative = 1e-13);
        for &(g, m, t) in &[(1.0, 0.3, 2.0), (-2.0, 1.5, 0.7)] {
            let v = mellin_g_in_x(sp(g, m), Complex64::new(1.0, 0.0), t).unwrap();
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-13);
        }
        assert!(matches!(
            mellin_g_in_x(sp(1.0, 0.5), Complex64::new(0.4, 0.0), 1.0),
            Err(Error::StripViolation { .. })
        ));
    }

    #[test]
    fn mellin_in_x_against_quadrature() {
        for &(g, m, t, eta) in &[(1.0, 2.0, 1.3, 1.7), (-1.0, 1.5, 0.8, 0.4), (2.0, 0.5, 2.0, 2.5)] {
            let p = sp(g, m);
            let q = x_integral(|x| Ok(x.powf(eta - 1.0) * g_density(p, x, t)?), t);
            let f = mellin_g_in_x(p, Complex64::new(eta, 0.0), t).unwrap().re;
            assert_relative_eq!(q, f, max_relative = 1e-9);
        }
    }

    #[test]
    fn mellin_in_t_against_quadrature() {
        let p = sp(1.0, 2.0);
        let q = x_integral(|t| Ok(t.powf(0.5) * g_density(p, 1.0, t)?), 1.0);
        let f = mellin_g_in_t(p, Complex64::new(1.5, 0.0), 1.0).unwrap().re;
        assert!((q - f).abs() < 1e-8);
        let p = sp(2.0, 1.0);
        let f = mellin_g_in_t(p, Complex64::new(0.5, 0.0), 3.0).unwrap().re;
        let direct = specfun::gamma_real(0.75).unwrap() / 3f64.sqrt();
        assert_relative_eq!(f, direct, max_relative = 1e-13);
        let q = x_integral(|t| Ok(t.powf(-0.5) * g_density(p, 3.0, t)?), 3.0);
        assert_relative_eq!(q, f, max_relative = 1e-9);
        // pole onset at η/γ → μ
        assert!(matches!(
            mellin_g_in_t(p, Complex64::new(2.0, 0.0), 1.0),
            Err(Error::StripViolation { .. })
        ));
        assert!(mellin_g_in_t(sp(-1.0, 1.0), Complex64::new(-0.5, 0.0), 1.0).is_ok());
    }

    #[test]
    fn opposite_closed_forms() {
        for &(x, t) in &[(0.5, 1.0), (2.0, 3.0)] {
            let v = conv_opposite_closed(1.0, 1.0, 1.0, x, t).unwrap();
            assert_relative_eq!(v, t / (t + x).powi(2), max_relative = 1e-13);
        }
        let total = x_integral(|x| conv_opposite_closed(2.0, 0.5, 1.5, x, 1.0), 1.0);
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
        // extreme ratio stays finite in log space
        assert!(conv_opposite_closed(3.0, 2.0, 2.0, 1e80, 1.0).unwrap() >= 0.0);
    }

    #[test]
    fn opposite_closed_matches_quadrature() {
        let pts = [(0.3, 0.5), (0.9, 1.7), (1.0, 1.0), (2.5, 0.4), (5.0, 3.0), (0.05, 0.2), (1.6, 7.0), (0.7, 0.7), (3.3, 1.1), (0.2, 2.2)];
        for &(x, t) in &pts {
            let v = ShapeVector::new(vec![sp(1.5, 0.6), sp(-1.5, 1.4)]).unwrap();
            let q = star_convolve_quadrature(&v, x, t, &spec()).unwrap();
            let c = conv_opposite_closed(1.5, 0.6, 1.4, x, t).unwrap();
            assert!((q - c).abs() <= 1e-7 * c.max(1e-3), "({x},{t}) {q} vs {c}");
            let v = ShapeVector::new(vec![sp(-1.5, 0.6), sp(1.5, 1.4)]).unwrap();
            let q = star_convolve_quadrature(&v, x, t, &spec()).unwrap();
            let c = conv_opposite_closed_mirrored(1.5, 0.6, 1.4, x, t).unwrap();
            assert!((q - c).abs() <= 1e-7 * c.max(1e-3), "mirrored ({x},{t}) {q} vs {c}");
        }
    }

    #[test]
    fn same_closed_forms() {
        // symmetric in (μ₁, μ₂)
        for &(x, t) in &[(0.4, 1.0), (2.0, 0.3)] {
            assert_relative_eq!(
                conv_same_closed(1.0, 0.3, 1.2, x, t).unwrap(),
                conv_same_closed(1.0, 1.2, 0.3, x, t).unwrap(),
                max_relative = 1e-14
            );
        }
        let total = x_integral(|x| conv_same_closed(1.0, 1.0 / 3.0, 2.0 / 3.0, x, 1.0), 1.0);
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
        let total = x_integral(|x| conv_same_closed(-2.0, 0.4, 0.9, x, 1.0), 1.0);
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
        let v = ShapeVector::uniform(1.0, &[0.5, 0.5]).unwrap();
        let q = star_convolve_quadrature(&v, 1.0, 1.0, &spec()).unwrap();
        let c = conv_same_closed(1.0, 0.5, 0.5, 1.0, 1.0).unwrap();
        assert!((q - c).abs() < 1e-7, "{q} vs {c}");
        // two unit exponentials: 2 K₀(2)
        assert_relative_eq!(
            conv_same_closed(1.0, 1.0, 1.0, 1.0, 1.0).unwrap(),
            2.0 * 0.113_893_872_749_533_44,
            max_relative = 1e-10
        );
    }

    #[test]
    fn same_closed_matches_quadrature_both_signs() {
        for &g in &[1.0, -1.0, 3.0, -0.5] {
            for &(x, t) in &[(0.6, 1.0), (1.8, 0.9)] {
                let v = ShapeVector::uniform(g, &[0.7, 1.6]).unwrap();
                let q = star_convolve_quadrature(&v, x, t, &spec()).unwrap();
                let c = conv_same_closed(g, 0.7, 1.6, x, t).unwrap();
                assert!((q - c).abs() <= 1e-7 * c.max(1e-3), "g={g} ({x},{t}) {q} vs {c}");
            }
        }
    }

    #[test]
    fn star_convolve_single_and_pairs() {
        let v = ShapeVector::new(vec![sp(1.5, 0.8)]).unwrap();
        assert_eq!(star_convolve(&v, 0.7, 1.2, &spec()).unwrap(), g_density(sp(1.5, 0.8), 0.7, 1.2).unwrap());
        let v = ShapeVector::new(vec![sp(1.0, 0.5), sp(-1.0, 0.5)]).unwrap();
        assert_eq!(
            star_convolve(&v, 0.7, 1.2, &spec()).unwrap(),
            conv_opposite_closed(1.0, 0.5, 0.5, 0.7, 1.2).unwrap()
        );
    }

    #[test]
    fn star_convolve_mellin_product() {
        // x-Mellin of a 3-chain against the product formula
        let v = ShapeVector::uniform(2.0, &[0.5, 1.0, 1.5]).unwrap();
        let t = 1.4;
        for eta in [1.5, 2.2] {
            let q = x_integral(|x| Ok(x.powf(eta - 1.0) * star_convolve(&v, x, t, &spec())?), t);
            let f = mellin_star_in_x(&v, Complex64::new(eta, 0.0), t).unwrap().re;
            assert!((q - f).abs() <= 1e-6 * f, "eta={eta}: {q} vs {f}");
        }
        // two factors at t^{1/2} each
        let a = sp(1.0, 0.8);
        let b = sp(1.0, 1.7);
        let eta = Complex64::new(1.3, 0.4);
        let prod = mellin_g_in_x(a, eta, t.sqrt()).unwrap() * mellin_g_in_x(b, eta, t.sqrt()).unwrap();
        let v2 = ShapeVector::new(vec![a, b]).unwrap();
        let m = mellin_star_in_x(&v2, eta, t).unwrap();
        assert!((prod - m).norm() < 1e-13 * m.norm());
    }

    #[test]
    fn star_convolve_commutes() {
        let base = [sp(1.0, 0.6), sp(1.0, 1.3), sp(-1.0, 0.9)];
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for &(x, t) in &[(0.8, 1.0), (1.5, 0.6)] {
            let vals: Vec<f64> = perms
                .iter()
                .map(|p| {
                    let v = ShapeVector::new(p.iter().map(|&i| base[i]).collect()).unwrap();
                    star_convolve(&v, x, t, &spec()).unwrap()
                })
                .collect();
            for v in &vals {
                assert!((v - vals[0]).abs() <= 1e-6 * vals[0], "{vals:?}");
            }
        }
    }

    #[test]
    fn sampler_moments_and_law() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let n = 200_000;
        let t = 2.0;
        let p = sp(1.0, 1.0);
        let mean: f64 = (0..n).map(|_| sample_gengamma(p, t, &mut rng).unwrap()).sum::<f64>() / n as f64;
        let sd = t / (n as f64).sqrt();
        assert!((mean - t).abs() < 4.0 * sd, "{mean}");
        // reciprocal of g^γ_μ(·, 1) samples follows e^γ_μ(·, 1)
        let p = sp(2.0, 0.5);
        let mut xs: Vec<f64> = (0..n).map(|_| 1.0 / sample_gengamma(p, 1.0, &mut rng).unwrap()).collect();
        xs.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = g_cdf(p.reciprocal(), x, 1.0).unwrap();
            d = d.max((f - i as f64 / n as f64).abs()).max((f - (i + 1) as f64 / n as f64).abs());
        }
        assert!(d < 1.63 / (n as f64).sqrt(), "KS {d}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn densities_nonnegative(g in prop_oneof![-4.0f64..-0.1, 0.1f64..4.0], m in 0.1f64..5.0, x in 1e-3f64..1e3, t in 1e-3f64..1e3) {
            let v = g_density(sp(g, m), x, t);
            if let Ok(v) = v { prop_assert!(v >= 0.0 && v.is_finite()); }
            prop_assert!(conv_same_closed(g, m, m + 0.3, x, t).map_or(true, |v| v >= 0.0));
            prop_assert!(conv_opposite_closed(g.abs(), m, m + 0.3, x, t).unwrap() >= 0.0);
        }
    }
}
