//! Fox H-functions evaluated from their Mellin multipliers by vertical-line
//! contour sums.
//!
//! `H^{m,n}_{p,q}[x]` has Mellin transform
//! `∏_{j≤m} Γ(b_j + ηβ_j) ∏_{i≤n} Γ(1 − a_i − ηα_i) / (∏_{j>m} Γ(1 − b_j − ηβ_j) ∏_{i>n} Γ(a_i + ηα_i))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{self, ContourResult, ContourSpec, Strip};
use crate::specfun::ln_gamma_complex;

/// Orders and parameter pairs of an H-function.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHParams {
    m: usize,
    n: usize,
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

impl FoxHParams {
    /// `upper` holds the `(a_i, α_i)`, `lower` the `(b_j, β_j)`.
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        if m > lower.len() || n > upper.len() {
            return Err(Error::domain(format!(
                "H orders need m <= q and n <= p, got m={m}, n={n}, p={}, q={}",
                upper.len(),
                lower.len()
            )));
        }
        for &(c, w) in upper.iter().chain(lower.iter()) {
            if !(c.is_finite() && w.is_finite() && w >= 0.0) {
                return Err(Error::domain(format!("invalid H parameter pair ({c}, {w})")));
            }
        }
        Ok(FoxHParams { m, n, upper, lower })
    }

    pub fn orders(&self) -> (usize, usize, usize, usize) {
        (self.m, self.n, self.upper.len(), self.lower.len())
    }

    pub fn upper(&self) -> &[(f64, f64)] {
        &self.upper
    }

    pub fn lower(&self) -> &[(f64, f64)] {
        &self.lower
    }

    /// `H^{1,0}_{0,1}[x | ∅; (0, 1)] = e^{−x}`.
    pub fn exponential() -> Self {
        FoxHParams {
            m: 1,
            n: 0,
            upper: vec![],
            lower: vec![(0.0, 1.0)],
        }
    }

    /// `H^{1,0}_{1,1}[· | (μ, 0); (μ, 1)]`, the kernel of the generalized Gamma laws.
    pub fn gen_gamma(mu: f64) -> Result<Self> {
        FoxHParams::new(1, 0, vec![(mu, 0.0)], vec![(mu, 1.0)])
    }

    /// `H^{1,0}_{1,1}[· | (1 − ν, ν); (0, 1)]`, the kernel of the inverse stable law.
    pub fn inverse_stable(nu: f64) -> Result<Self> {
        FoxHParams::new(1, 0, vec![(1.0 - nu, nu)], vec![(0.0, 1.0)])
    }

    /// `H^{0,1}_{1,1}[· | (−1/ν, 1/ν); (−1, 1)]`, whose multiplier is
    /// `Γ(1 + (1 − η)/ν) / Γ(2 − η)`: the x-Mellin transform of `h_ν(·, 1)`.
    pub fn stable(nu: f64) -> Result<Self> {
        FoxHParams::new(0, 1, vec![(-1.0 / nu, 1.0 / nu)], vec![(-1.0, 1.0)])
    }

    /// `H^{2,0}_{2,2}[· | (1, ν), (μ, 0); (1, 1), (μ, 1)]`, the kernel of the
    /// time-fractional solution field.
    pub fn fractional_solution(mu: f64, nu: f64) -> Result<Self> {
        FoxHParams::new(2, 0, vec![(1.0, nu), (mu, 0.0)], vec![(1.0, 1.0), (mu, 1.0)])
    }

    /// Parameters of `x ↦ H'(x)` with `H(x) = c · H'(x^c)`.
    pub fn rescale_argument(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("rescaling needs c > 0, got {c}")));
        }
        let scale = |v: &Vec<(f64, f64)>| v.iter().map(|&(a, w)| (a, c * w)).collect();
        FoxHParams::new(self.m, self.n, scale(&self.upper), scale(&self.lower))
    }

    /// Parameters of `x ↦ H'(x)` with `H(x) = x^{−c} H'(x)`.
    pub fn shift_power(&self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::domain("power shift must be finite"));
        }
        let shift = |v: &Vec<(f64, f64)>| v.iter().map(|&(a, w)| (a + c * w, w)).collect();
        FoxHParams::new(self.m, self.n, shift(&self.upper), shift(&self.lower))
    }

    /// Maximal strip where every numerator Gamma has an argument of positive real part.
    pub fn fundamental_strip(&self) -> Result<Strip> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for &(b, beta) in &self.lower[..self.m] {
            if beta > 0.0 {
                lo = lo.max(-b / beta);
            } else if b <= 0.0 {
                return Err(Error::EmptyStrip { lo: f64::NAN, hi: f64::NAN });
            }
        }
        for &(a, alpha) in &self.upper[..self.n] {
            if alpha > 0.0 {
                hi = hi.min((1.0 - a) / alpha);
            } else if 1.0 - a <= 0.0 {
                return Err(Error::EmptyStrip { lo: f64::NAN, hi: f64::NAN });
            }
        }
        let s = Strip::new(lo, hi);
        if s.is_empty() {
            return Err(Error::EmptyStrip { lo, hi });
        }
        Ok(s)
    }

    /// Logarithm of the Mellin multiplier; `None` at a zero (denominator pole).
    pub fn ln_mellin_multiplier(&self, eta: Complex64) -> Result<Option<Complex64>> {
        let mut l = Complex64::new(0.0, 0.0);
        for &(b, beta) in &self.lower[..self.m] {
            l += ln_gamma_complex(eta * beta + b)?;
        }
        for &(a, alpha) in &self.upper[..self.n] {
            l += ln_gamma_complex(1.0 - a - eta * alpha)?;
        }
        for &(b, beta) in &self.lower[self.m..] {
            let z = 1.0 - b - eta * beta;
            if is_pole(z) {
                return Ok(None);
            }
            l -= ln_gamma_complex(z)?;
        }
        for &(a, alpha) in &self.upper[self.n..] {
            let z = eta * alpha + a;
            if is_pole(z) {
                return Ok(None);
            }
            l -= ln_gamma_complex(z)?;
        }
        Ok(Some(l))
    }

    /// The Mellin multiplier at `η`.
    pub fn mellin_multiplier(&self, eta: Complex64) -> Result<Complex64> {
        match self.ln_mellin_multiplier(eta)? {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(l) => {
                if l.re > 709.0 {
                    return Err(Error::Overflow("H multiplier"));
                }
                Ok(l.exp())
            }
        }
    }

    /// `H(x)` on a saddle-point contour refined to a relative accuracy of `1e-10`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_adaptive(x, DEFAULT_REL_TOL)?.value)
    }

    /// `H(x)` on the given contour.
    pub fn eval_with(&self, x: f64, contour: &ContourSpec) -> Result<f64> {
        Ok(self.eval_detailed(x, contour)?.value)
    }

    /// Full contour diagnostics; enforces a real result.
    pub fn eval_detailed(&self, x: f64, contour: &ContourSpec) -> Result<ContourResult> {
        let strip = self.fundamental_strip()?;
        let r = quadrature::mellin_invert_log(|eta| self.ln_mellin_multiplier(eta), x, &strip, contour)?;
        real_part(r)
    }

    /// Saddle abscissa with step halving until `rel_tol` is met; enforces a real result.
    pub fn eval_adaptive(&self, x: f64, rel_tol: f64) -> Result<ContourResult> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("H-function argument must be positive, got {x}")));
        }
        self.eval_adaptive_ln(x.ln(), rel_tol)
    }

    /// [`FoxHParams::eval_adaptive`] at `x = e^{ln_x}`.
    pub fn eval_adaptive_ln(&self, ln_x: f64, rel_tol: f64) -> Result<ContourResult> {
        let strip = self.fundamental_strip()?;
        let r = quadrature::mellin_invert_adaptive_ln(|eta| self.ln_mellin_multiplier(eta), ln_x, &strip, rel_tol)?;
        real_part(r)
    }

    /// `H(e^{ln_x})`, for arguments whose exponential leaves the `f64` range.
    pub fn eval_ln(&self, ln_x: f64) -> Result<f64> {
        Ok(self.eval_adaptive_ln(ln_x, DEFAULT_REL_TOL)?.value)
    }
}

/// Relative tolerance used by [`FoxHParams::eval`].
pub const DEFAULT_REL_TOL: f64 = 1e-10;

fn real_part(r: ContourResult) -> Result<ContourResult> {
    if r.imag_residual > 1e-8 * r.value.abs() + 1e-13 * r.magnitude {
        return Err(Error::NonConvergence {
            what: "H-function contour (imaginary residue)",
            estimate: r.value,
            error: r.imag_residual,
        });
    }
    Ok(r)
}

/// `H(x)` for the given parameters and contour.
pub fn eval(params: &FoxHParams, x: f64, contour: &ContourSpec) -> Result<f64> {
    params.eval_with(x, contour)
}

/// See [`FoxHParams::fundamental_strip`].
pub fn fundamental_strip(params: &FoxHParams) -> Result<Strip> {
    params.fundamental_strip()
}

/// See [`FoxHParams::mellin_multiplier`].
pub fn mellin_multiplier(params: &FoxHParams, eta: Complex64) -> Result<Complex64> {
    params.mellin_multiplier(eta)
}

fn check_xt(x: f64, t: f64) -> Result<()> {
    if x > 0.0 && t > 0.0 && x.is_finite() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("need finite x, t > 0, got ({x}, {t})")))
    }
}

/// `e^γ_μ(x, t) = (γ/x) H^{1,0}_{1,1}[(t/x)^γ]`, `γ > 0`.
pub fn e_density_foxh(gamma: f64, mu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if !(gamma > 0.0) {
        return Err(Error::domain("H form of the reciprocal law needs gamma > 0"));
    }
    let h = FoxHParams::gen_gamma(mu)?;
    Ok(gamma / x * h.eval_ln((t.ln() - x.ln()) * gamma)?)
}

/// `g^γ_μ(x, t) = (γ/x) H^{1,0}_{1,1}[(x/t)^γ]`, `γ > 0`.
pub fn g_density_foxh(gamma: f64, mu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if !(gamma > 0.0) {
        return Err(Error::domain("H form of the generalized Gamma law needs gamma > 0"));
    }
    let h = FoxHParams::gen_gamma(mu)?;
    Ok(gamma / x * h.eval_ln((x.ln() - t.ln()) * gamma)?)
}

/// `l_ν(x, t) = t^{−ν} H^{1,0}_{1,1}[x / t^ν | (1 − ν, ν); (0, 1)]`.
pub fn l_density_foxh(nu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain(format!("inverse stable H form needs nu in (0, 1), got {nu}")));
    }
    let ln_tn = nu * t.ln();
    Ok(FoxHParams::inverse_stable(nu)?.eval_ln(x.ln() - ln_tn)? * (-ln_tn).exp())
}

/// `h_ν(x, t) = t^{−1/ν} H^{0,1}_{1,1}[x t^{−1/ν} | (−1/ν, 1/ν); (−1, 1)]`.
pub fn h_density_foxh(nu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain(format!("stable H form needs nu in (0, 1), got {nu}")));
    }
    let ln_s = t.ln() / nu;
    Ok(FoxHParams::stable(nu)?.eval_ln(x.ln() - ln_s)? * (-ln_s).exp())
}

/// `ũ(x, t) = (γ/x) H^{2,0}_{2,2}[x^γ / t^ν | (1, ν), (μ, 0); (1, 1), (μ, 1)]`.
pub fn u_density_foxh(gamma: f64, mu: f64, nu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if !(gamma > 0.0 && mu > 0.0 && nu > 0.0 && nu <= 1.0) {
        return Err(Error::domain("solution H form needs gamma > 0, mu > 0, nu in (0, 1]"));
    }
    let h = FoxHParams::fractional_solution(mu, nu)?;
    Ok(gamma / x * h.eval_ln(gamma * x.ln() - nu * t.ln())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gengamma::{self, ShapeParams};
    use crate::quadrature::QuadratureSpec;
    use crate::specfun::{gamma_complex, gamma_real};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn param_validation() {
        assert!(FoxHParams::new(2, 0, vec![], vec![(0.0, 1.0)]).is_err());
        assert!(FoxHParams::new(0, 1, vec![], vec![]).is_err());
        assert!(FoxHParams::new(1, 0, vec![], vec![(0.0, -1.0)]).is_err());
        assert_eq!(FoxHParams::exponential().orders(), (1, 0, 0, 1));
    }

    #[test]
    fn multipliers() {
        let e = FoxHParams::exponential();
        let eta = c(0.7, 3.1);
        assert!((e.mellin_multiplier(eta).unwrap() - gamma_complex(eta).unwrap()).norm() < 1e-13);
        // inverse stable: Γ(η)/Γ(1 − ν + νη)
        let nu = 0.4;
        let l = FoxHParams::inverse_stable(nu).unwrap();
        let want = gamma_complex(eta).unwrap() / gamma_complex(eta * nu + (1.0 - nu)).unwrap();
        assert!((l.mellin_multiplier(eta).unwrap() - want).norm() < 1e-12 * want.norm());
        // reciprocal generalized Gamma: matches the law's own x-Mellin transform
        let (g, mu) = (1.7, 0.8);
        let h = FoxHParams::gen_gamma(mu).unwrap();
        let eta = c(0.3, -1.2);
        // ∫ x^{η−1} (γ/x) H((t/x)^γ) dx at t = 1 equals M_H((1 − η)/γ)
        let lhs = h.mellin_multiplier((1.0 - eta) / g).unwrap();
        let rhs = gengamma::mellin_g_in_x(ShapeParams::new(-g, mu).unwrap(), eta, 1.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
        // pole in the numerator, zero from the denominator
        assert!(matches!(e.mellin_multiplier(c(-2.0, 0.0)), Err(Error::Pole { .. })));
        let z = FoxHParams::new(0, 0, vec![], vec![(0.0, 1.0)]).unwrap();
        assert_eq!(z.mellin_multiplier(c(2.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn strips() {
        let s = FoxHParams::exponential().fundamental_strip().unwrap();
        assert_eq!((s.lo, s.hi), (0.0, f64::INFINITY));
        let s = FoxHParams::inverse_stable(0.3).unwrap().fundamental_strip().unwrap();
        assert_eq!((s.lo, s.hi), (0.0, f64::INFINITY));
        let s = FoxHParams::stable(0.25).unwrap().fundamental_strip().unwrap();
        assert_eq!(s.lo, f64::NEG_INFINITY);
        assert_relative_eq!(s.hi, 1.25, max_relative = 1e-15);
        // solution kernel: argument η = (η' − 1)/γ maps onto 1 − γ min(μ, 1) < Re η'
        let s = FoxHParams::fractional_solution(0.5, 0.5).unwrap().fundamental_strip().unwrap();
        assert_eq!(s.lo, -0.5);
        let empty = FoxHParams::new(1, 1, vec![(2.0, 1.0)], vec![(0.0, 1.0)]).unwrap();
        assert!(matches!(empty.fundamental_strip(), Err(Error::EmptyStrip { .. })));
    }

    #[test]
    fn exponential_reduction() {
        let e = FoxHParams::exponential();
        for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
            assert!((e.eval(x).unwrap() - (-x).exp()).abs() < 1e-8 * (-x).exp());
        }
        let strip = e.fundamental_strip().unwrap();
        let cs = ContourSpec::auto(&strip, 1.0).unwrap();
        let v = eval(&e, 1.0, &cs).unwrap();
        assert_relative_eq!(v, (-1f64).exp(), max_relative = 1e-10);
        let v = eval(&e, 2.0, &cs).unwrap();
        assert_relative_eq!(v, (-2f64).exp(), max_relative = 1e-10);
        let bad = cs.with_abscissa(-0.5);
        assert!(matches!(eval(&e, 1.0, &bad), Err(Error::StripViolation { .. })));
    }

    #[test]
    fn contour_refinement_within_error_estimate() {
        let l = FoxHParams::inverse_stable(0.5).unwrap();
        let strip = l.fundamental_strip().unwrap();
        let base = ContourSpec::auto(&strip, 1.3).unwrap();
        let r0 = l.eval_detailed(1.3, &base).unwrap();
        let mut longer = base;
        longer.truncation *= 2.0;
        let mut finer = base;
        finer.step *= 0.5;
        let tol = r0.error_estimate.max(1e-15);
        assert!((l.eval_with(1.3, &longer).unwrap() - r0.value).abs() <= tol);
        assert!((l.eval_with(1.3, &finer).unwrap() - r0.value).abs() <= tol);
    }

    #[test]
    fn instance_values() {
        let expect = (-0.25f64).exp() / PI.sqrt();
        assert_relative_eq!(l_density_foxh(0.5, 1.0, 1.0).unwrap(), expect, max_relative = 1e-9);
        let expect = (-1f64).exp() / PI.sqrt();
        assert_relative_eq!(e_density_foxh(1.0, 0.5, 1.0, 1.0).unwrap(), expect, max_relative = 1e-9);
        for &(g, mu, x, t) in &[(1.0, 0.5, 0.4, 1.7), (2.5, 1.3, 1.1, 0.6), (0.7, 3.0, 2.0, 1.0)] {
            let p = ShapeParams::new(g, mu).unwrap();
            assert_relative_eq!(
                e_density_foxh(g, mu, x, t).unwrap(),
                gengamma::e_density(p, x, t).unwrap(),
                max_relative = 1e-6
            );
            assert_relative_eq!(
                g_density_foxh(g, mu, x, t).unwrap(),
                gengamma::g_density(p, x, t).unwrap(),
                max_relative = 1e-6
            );
        }
        // h_{1/2}(1, 1) = e^{−1/4} / (2√π)
        let expect = (-0.25f64).exp() / (2.0 * PI.sqrt());
        assert_relative_eq!(h_density_foxh(0.5, 1.0, 1.0).unwrap(), expect, max_relative = 1e-8);
        // ν = 1 solution field is g^γ_μ(x, t^{1/γ})
        let (g, mu) = (2.0, 0.5);
        let p = ShapeParams::new(g, mu).unwrap();
        for &(x, t) in &[(0.5f64, 1.0f64), (1.2, 2.0)] {
            let want = gengamma::g_density(p, x, t.powf(1.0 / g)).unwrap();
            assert_relative_eq!(u_density_foxh(g, mu, 1.0, x, t).unwrap(), want, max_relative = 1e-6);
        }
    }

    #[test]
    fn instances_integrate_to_one() {
        let spec = QuadratureSpec::default().with_rel_tol(1e-9);
        let q = |f: &dyn Fn(f64) -> Result<f64>, scale: f64| {
            quadrature::try_integrate_semi_infinite_scaled(f, scale, &spec).unwrap().value
        };
        let cases: Vec<(Box<dyn Fn(f64) -> Result<f64>>, f64)> = vec![
            (Box::new(|x| l_density_foxh(0.6, x, 1.5)), 1.0),
            (Box::new(|x| e_density_foxh(1.5, 0.7, x, 1.0)), 1.0),
            (Box::new(|x| g_density_foxh(2.0, 1.2, x, 0.8)), 1.0),
            (Box::new(|x| u_density_foxh(1.0, 2.0, 0.5, x, 1.0)), 1.0),
        ];
        for (f, s) in &cases {
            let total = q(f.as_ref(), *s);
            assert!((total - 1.0).abs() < 1e-6, "{total}");
        }
    }

    #[test]
    fn rescale_and_shift_identities() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let l = FoxHParams::inverse_stable(0.4).unwrap();
        assert_eq!(l.rescale_argument(1.0).unwrap(), l);
        assert_eq!(l.shift_power(0.0).unwrap(), l);
        let r = l.rescale_argument(2.0).unwrap();
        let e = FoxHParams::gen_gamma(0.8).unwrap();
        let s = e.shift_power(1.0).unwrap();
        for _ in 0..5 {
            let x: f64 = rng.gen_range(0.2..3.0);
            let lhs = l.eval(x).unwrap();
            let rhs = 2.0 * r.eval(x * x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs(), "{lhs} vs {rhs}");
            let lhs = e.eval(x).unwrap();
            let rhs = s.eval(x).unwrap() / x;
            assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs(), "{lhs} vs {rhs}");
        }
        assert!(l.rescale_argument(0.0).is_err());
    }

    #[test]
    fn gamma_normalization_of_multiplier() {
        // M(1) = 1 for the laws built from these kernels
        let l = FoxHParams::inverse_stable(0.3).unwrap();
        assert_relative_eq!(l.mellin_multiplier(c(1.0, 0.0)).unwrap().re, 1.0, max_relative = 1e-13);
        let h = FoxHParams::stable(0.3).unwrap();
        assert_relative_eq!(h.mellin_multiplier(c(1.0, 0.0)).unwrap().re, 1.0, max_relative = 1e-13);
        let u = FoxHParams::fractional_solution(1.5, 0.5).unwrap();
        assert_relative_eq!(u.mellin_multiplier(c(0.0, 0.0)).unwrap().re, 1.0, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(1.0).unwrap(), 1.0);
    }
}
