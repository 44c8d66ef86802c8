//! Densities of the ν-stable subordinator `h_ν(x, t)` and of its inverse
//! `l_ν(x, t)`, their Mellin transforms, and the ratio laws `r`, `k`.
//!
//! For `ν = 1/(n+1)` both densities are ⋆-chains of generalized Gamma laws
//! evaluated at a stretched time:
//! `h_ν = e_{ν} ⋆ e_{2ν} ⋆ … ⋆ e_{nν}(x, φ_{n+1}(t))` and
//! `l_ν = g^{n+1}_{ν} ⋆ … ⋆ g^{n+1}_{nν}(x, ψ_{n+1}(t))`.
//! Other indices go through the Fox H representation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::foxh::FoxHParams;
use crate::gengamma::{self, ShapeVector};
use crate::quadrature::{self, ContourSpec, LnKernel, QuadratureSpec, Strip};
use crate::specfun::{cos_pi, ln_bessel_k_wide, ln_gamma_complex, sin_pi};

/// Largest reciprocal order `n` evaluated through ⋆-chains; beyond it the H form is used.
pub const MAX_CHAIN_ORDER: u32 = 10;

/// Stability index `ν ∈ (0, 1]`, remembering `n` when `ν = 1/(n+1)` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityIndex {
    nu: f64,
    reciprocal: Option<u32>,
}

impl StabilityIndex {
    /// Index from a real value; values within `1e-12` of `1/(n+1)` snap to it.
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::domain(format!("stability index must lie in (0, 1], got {nu}")));
        }
        let m = (1.0 / nu).round();
        if m <= 1e6 && (nu * m - 1.0).abs() <= 1e-12 {
            return Self::reciprocal(m as u32 - 1);
        }
        Ok(StabilityIndex { nu, reciprocal: None })
    }

    /// `ν = 1/(n+1)`.
    pub fn reciprocal(n: u32) -> Result<Self> {
        if n == u32::MAX {
            return Err(Error::domain("reciprocal order too large"));
        }
        Ok(StabilityIndex {
            nu: 1.0 / f64::from(n + 1),
            reciprocal: Some(n),
        })
    }

    /// Parses `"0.25"` or a fraction `"p/q"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("cannot parse stability index {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: u32 = p.trim().parse().map_err(|_| bad())?;
            let q: u32 = q.trim().parse().map_err(|_| bad())?;
            if p == 0 || q == 0 || p > q {
                return Err(Error::domain(format!("stability index {s} not in (0, 1]")));
            }
            if p == 1 {
                return Self::reciprocal(q - 1);
            }
            return Self::new(f64::from(p) / f64::from(q));
        }
        Self::new(s.parse().map_err(|_| bad())?)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `n` with `ν = 1/(n+1)`, if exact.
    pub fn order(&self) -> Option<u32> {
        self.reciprocal
    }

    /// `ν = 1`: the subordinator is the identity time.
    pub fn is_degenerate(&self) -> bool {
        self.nu == 1.0
    }

    /// `m` with `ν = 1/(2m+1)`, if any.
    pub fn odd_reciprocal(&self) -> Option<u32> {
        self.reciprocal.filter(|n| n % 2 == 0 && *n > 0).map(|n| n / 2)
    }
}

impl fmt::Display for StabilityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reciprocal {
            Some(n) => write!(f, "1/{}", n + 1),
            None => write!(f, "{}", self.nu),
        }
    }
}

impl FromStr for StabilityIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Which of the two mutually inverse time stretches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StretchKind {
    /// `φ_m(s) = (s/m)^m`
    Phi,
    /// `ψ_m(s) = m s^{1/m}`
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeStretch {
    pub m: u32,
    pub kind: StretchKind,
}

impl TimeStretch {
    pub fn phi(m: u32) -> Result<Self> {
        Self::new(m, StretchKind::Phi)
    }

    pub fn psi(m: u32) -> Result<Self> {
        Self::new(m, StretchKind::Psi)
    }

    pub fn new(m: u32, kind: StretchKind) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("time stretch order must be at least 1"));
        }
        Ok(TimeStretch { m, kind })
    }

    /// The stretch of the other kind; `φ_m ∘ ψ_m` is the identity.
    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            StretchKind::Phi => StretchKind::Psi,
            StretchKind::Psi => StretchKind::Phi,
        };
        TimeStretch { m: self.m, kind }
    }
}

/// `φ_m(s)` or `ψ_m(s)`.
pub fn time_stretch(ts: TimeStretch, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("time stretch needs s > 0, got {s}")));
    }
    let m = f64::from(ts.m);
    Ok(match ts.kind {
        StretchKind::Phi => (m * (s / m).ln()).exp(),
        StretchKind::Psi => m * (s.ln() / m).exp(),
    })
}

fn check_xt(x: f64, t: f64) -> Result<()> {
    if x > 0.0 && t > 0.0 && x.is_finite() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("need finite x, t > 0, got ({x}, {t})")))
    }
}

fn check_open_index(nu: f64) -> Result<()> {
    if nu > 0.0 && nu < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("stability index must lie in (0, 1), got {nu}")))
    }
}

fn exp_checked(l: f64, what: &'static str) -> Result<f64> {
    if l > 709.0 {
        return Err(Error::Overflow(what));
    }
    if l.is_nan() {
        return Err(Error::NaNDetected { at: l });
    }
    Ok(l.exp())
}

// Tolerance used by the single-integral closed forms.
fn form_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-9)
}

// Tolerance used by nested kernel chains; each level tightens it further.
fn chain_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-8)
}

// ---------------------------------------------------------------- h_ν

/// `h_ν(x, t)` for `ν = 1/(n+1)`, `n ≥ 1`.
///
/// Closed forms for `n ≤ 2`, single integrals for `n = 3, 4`, paired ⋆-chains
/// up to [`MAX_CHAIN_ORDER`], the H form beyond.
pub fn h_density(idx: StabilityIndex, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    let n = match idx.order() {
        Some(0) => return Err(Error::DegenerateCase("h_1 is the point mass at x = t".into())),
        Some(n) => n,
        None => {
            return Err(Error::domain(format!(
                "closed h forms need nu = 1/(n+1), got {}; use h_density_general",
                idx.nu()
            )))
        }
    };
    match n {
        1 => h_half(x, t),
        2 => h_third(x, t),
        3 => h_quarter(x, t),
        4 => h_fifth(FifthPairing::Adjacent, x, t),
        n if n <= MAX_CHAIN_ORDER => h_density_chain(n, x, t),
        _ => h_density_general(idx.nu(), x, t, None),
    }
}

/// `h_{1/2}(x, t) = t/(2√π) x^{−3/2} e^{−t²/(4x)}`.
pub fn h_half(x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    let l = t.ln() - (2.0 * PI.sqrt()).ln() - 1.5 * x.ln() - t * t / (4.0 * x);
    exp_checked(l, "h_1/2")
}

/// `h_{1/3}(x, t) = (1/(3π)) (t/x)^{3/2} K_{1/3}(2 t^{3/2} / (3^{3/2} √x))`.
pub fn h_third(x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    let ln_z = 2f64.ln() + 1.5 * t.ln() - 1.5 * 3f64.ln() - 0.5 * x.ln();
    let l = -(3.0 * PI).ln() + 1.5 * (t.ln() - x.ln()) + ln_bessel_k_wide(1.0 / 3.0, ln_z)?;
    exp_checked(l, "h_1/3")
}

/// `h_{1/4} = e_{1/2} ⋆ (e_{1/4} ⋆ e_{3/4})(x, (t/4)^4)`, the inner pair reduced through `K_{1/2}`.
pub fn h_quarter(x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    let ln_x = x.ln();
    let ln_t = 4.0 * (t / 4.0).ln();
    let c = -PI.sqrt().ln() - 0.5 * (2.0 * PI).ln() - 1.5 * ln_x;
    // e_{1/2}(x, s) = x^{−3/2} s^{1/2} e^{−s/x} / Γ(1/2) against z^{1/4} e^{−2√z} / (s √(2π)), z = T/s;
    // in u = ln s the Jacobian s cancels the 1/s
    let phi = |u: f64| -> Result<f64> {
        let ln_z = ln_t - u;
        Ok(c + 0.5 * u - (u - ln_x).exp() + 0.25 * ln_z - 2.0 * (0.5 * ln_z).exp())
    };
    let l = quadrature::ln_integral_unimodal(phi, 0.5 * (ln_x + ln_t), &form_spec())?;
    exp_checked(l, "h_1/4")
}

/// The two equivalent groupings of `e_{1/5} ⋆ e_{2/5} ⋆ e_{3/5} ⋆ e_{4/5}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FifthPairing {
    /// `(e_{1/5} ⋆ e_{2/5}) ⋆ (e_{3/5} ⋆ e_{4/5})`, a `K_{1/5} ⊗ K_{1/5}` integral.
    Adjacent,
    /// `(e_{1/5} ⋆ e_{3/5}) ⋆ (e_{2/5} ⋆ e_{4/5})`, a `K_{2/5} ⊗ K_{2/5}` integral.
    Interleaved,
}

/// `h_{1/5}(x, t)` as a single integral of two Bessel kernels.
pub fn h_fifth(pairing: FifthPairing, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    // second Bessel argument is a/√s
    let ln_a = 2f64.ln() + 2.5 * (t.ln() - 5f64.ln());
    let (order, pref, xpow, spow) = match pairing {
        FifthPairing::Adjacent => (0.2, 3.5 * t.ln() - 3.0 * 5f64.ln(), 1.3, -1.4),
        FifthPairing::Interleaved => (0.4, 3.0 * t.ln() - 2.5 * 5f64.ln(), 1.4, -1.2),
    };
    let ln_x = x.ln();
    let pref = pref - 2.0 * PI.ln() - xpow * ln_x;
    let phi = |u: f64| -> Result<f64> {
        let l1 = ln_bessel_k_wide(order, 2f64.ln() + 0.5 * (u - ln_x))?;
        let l2 = ln_bessel_k_wide(order, ln_a - 0.5 * u)?;
        Ok(pref + (spow + 1.0) * u + l1 + l2)
    };
    // the first factor confines s ≲ x, the second s ≳ a²
    let guess = 0.5 * (ln_x + 2.0 * (ln_a - 2f64.ln()));
    let l = quadrature::ln_integral_unimodal(phi, guess, &form_spec())?;
    exp_checked(l, "h_1/5")
}

/// `h_ν` for `ν = 1/(n+1)` as the paired ⋆-chain `e_ν ⋆ … ⋆ e_{nν}(x, φ_{n+1}(t))`.
pub fn h_density_chain(n: u32, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if n == 0 || n > MAX_CHAIN_ORDER {
        return Err(Error::domain(format!("chain order must lie in 1..={MAX_CHAIN_ORDER}, got {n}")));
    }
    let nu = 1.0 / f64::from(n + 1);
    let mus: Vec<f64> = (1..=n).map(|j| f64::from(j) * nu).collect();
    let v = ShapeVector::uniform(-1.0, &mus)?;
    let stretched = time_stretch(TimeStretch::phi(n + 1)?, t)?;
    gengamma::star_convolve(&v, x, stretched, &chain_spec())
}

/// `h_ν` for `ν = 1/(2m+1)` through the kernel chain
/// `x^{ν/2} t^{1/ν − 3/2} / (ν^{2 − 1/ν} π^{1/(2ν) − 1/2}) 𝒦^{∘m}(x, (νt)^{1/ν})`,
/// with `𝒦(x, s) = x^{−2ν−1} K_ν(2√(s/x))`.
pub fn h_density_kernel_chain(m: u32, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if m == 0 || m as usize > quadrature::MAX_COMPOSE_DEPTH + 1 {
        return Err(Error::domain(format!("kernel chain length must lie in 1..=5, got {m}")));
    }
    let nu = 1.0 / f64::from(2 * m + 1);
    let kernel = move |la: f64, lb: f64| -> Result<f64> {
        Ok((-2.0 * nu - 1.0) * la + ln_bessel_k_wide(nu, 2f64.ln() + 0.5 * (lb - la))?)
    };
    let ln_end = (nu * t).ln() / nu;
    let chain = ln_compose_same(&kernel, m, x.ln(), ln_end)?;
    let ln_pref = 0.5 * nu * x.ln() + (1.0 / nu - 1.5) * t.ln()
        - (2.0 - 1.0 / nu) * nu.ln()
        - (0.5 / nu - 0.5) * PI.ln();
    exp_or_zero(ln_pref + chain, "kernel chain")
}

// ln of m copies of a log kernel composed.
fn ln_compose_same(kernel: LnKernel<'_>, m: u32, ln_x: f64, ln_t: f64) -> Result<f64> {
    let ks: Vec<LnKernel<'_>> = (0..m).map(|_| kernel).collect();
    quadrature::ln_compose_unimodal(&ks, ln_x, ln_t, &chain_spec())
}

// exp that lets deep tails underflow to zero but reports overflow.
fn exp_or_zero(l: f64, what: &'static str) -> Result<f64> {
    if l < -745.0 {
        return Ok(0.0);
    }
    exp_checked(l, what)
}

/// `h_ν(x, t)` for any `ν ∈ (0, 1)` by inverting its x-Mellin transform.
///
/// `h_ν(x, t) = t^{−1/ν} H(x t^{−1/ν})`; `contour`, if given, is the contour for `H`.
pub fn h_density_general(nu: f64, x: f64, t: f64, contour: Option<&ContourSpec>) -> Result<f64> {
    check_xt(x, t)?;
    check_open_index(nu)?;
    let h = FoxHParams::stable(nu)?;
    let ln_s = t.ln() / nu;
    let v = match contour {
        Some(c) => h.eval_with(((x.ln() - ln_s)).exp(), c)?,
        None => h.eval_ln(x.ln() - ln_s)?,
    };
    Ok(v * (-ln_s).exp())
}

/// Strip of [`h_mellin_in_x`]: `0 < Re η < 1 + ν`.
pub fn h_mellin_in_x_strip(nu: f64) -> Strip {
    Strip::new(0.0, 1.0 + nu)
}

/// `∫ x^{η−1} h_ν(x, t) dx = Γ((1−η)/ν) t^{(η−1)/ν} / (ν Γ(1−η))`.
///
/// Evaluated as `Γ(1 + (1−η)/ν) / Γ(2−η)`, which is regular at `η = 1`.
pub fn h_mellin_in_x(nu: f64, eta: Complex64, t: f64) -> Result<Complex64> {
    check_open_index(nu)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    h_mellin_in_x_strip(nu).check(eta.re)?;
    if eta == Complex64::new(1.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let one = Complex64::new(1.0, 0.0);
    let l = ln_gamma_complex(one + (one - eta) / nu)? - ln_gamma_complex(2.0 - eta)?
        + (eta - 1.0) / nu * t.ln();
    Ok(l.exp())
}

/// Strip of [`h_mellin_in_t`]: `0 < Re η < 1/ν`.
pub fn h_mellin_in_t_strip(nu: f64) -> Strip {
    Strip::new(0.0, 1.0 / nu)
}

/// `∫ t^{η−1} h_ν(x, t) dt = Γ(η)/Γ(ην) x^{ην−1}`.
pub fn h_mellin_in_t(nu: f64, eta: Complex64, x: f64) -> Result<Complex64> {
    check_open_index(nu)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("x must be positive, got {x}")));
    }
    h_mellin_in_t_strip(nu).check(eta.re)?;
    let l = ln_gamma_complex(eta)? - ln_gamma_complex(eta * nu)? + (eta * nu - 1.0) * x.ln();
    Ok(l.exp())
}

// ---------------------------------------------------------------- l_ν

/// `l_ν(x, t)`, the density of the inverse subordinator `L_t`.
///
/// Closed forms for `ν = 1/2, 1/3`, a single integral at `1/4`, the `𝒬`-chain for
/// other `ν = 1/(2m+1)`, the generalized Gamma ⋆-chain for remaining reciprocal
/// indices, and the H form otherwise.
pub fn l_density(idx: StabilityIndex, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if idx.is_degenerate() {
        return Err(Error::DegenerateCase("l_1 is the point mass at x = t".into()));
    }
    match idx.order() {
        Some(1) => l_half(x, t),
        Some(2) => l_third(x, t),
        Some(3) => l_quarter(x, t),
        Some(n) if n % 2 == 0 && n / 2 <= quadrature::MAX_COMPOSE_DEPTH as u32 + 1 => {
            l_density_q_chain(n / 2, x, t)
        }
        Some(n) if n <= MAX_CHAIN_ORDER => l_density_chain(n, x, t),
        _ => l_density_general(idx.nu(), x, t, None),
    }
}

/// `ln l_ν(x, t)`; exact in the far tail for `ν ∈ {1/2, 1/3, 1/4}` where `l_ν` underflows.
pub fn ln_l_density(idx: StabilityIndex, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    match idx.order() {
        Some(1) => Ok(-x * x / (4.0 * t) - 0.5 * (PI * t).ln()),
        Some(2) => ln_l_third(x, t),
        Some(3) => ln_l_quarter(x, t),
        _ => Ok(l_density(idx, x, t)?.ln()),
    }
}

/// `l_{1/2}(x, t) = e^{−x²/(4t)} / √(πt)`.
pub fn l_half(x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    exp_checked(-x * x / (4.0 * t) - 0.5 * (PI * t).ln(), "l_1/2")
}

/// `l_{1/3}(x, t) = (1/π) √(x/t) K_{1/3}(2 x^{3/2} / (3^{3/2} √t))`.
pub fn l_third(x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    exp_checked(ln_l_third(x, t)?, "l_1/3")
}

fn ln_l_third(x: f64, t: f64) -> Result<f64> {
    let ln_z = 2f64.ln() + 1.5 * x.ln() - 1.5 * 3f64.ln() - 0.5 * t.ln();
    Ok(-PI.ln() + 0.5 * (x.ln() - t.ln()) + ln_bessel_k_wide(1.0 / 3.0, ln_z)?)
}

/// `l_{1/4}(x, t) = (2^{7/2}/π)(x/T) ∫ exp(−(sx)^4 − 2/(sT)^2) ds`, `T = 4 t^{1/4}`.
pub fn l_quarter(x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    exp_checked(ln_l_quarter(x, t)?, "l_1/4")
}

fn ln_l_quarter(x: f64, t: f64) -> Result<f64> {
    let ln_x = x.ln();
    let ln_big_t = 4f64.ln() + 0.25 * t.ln();
    let phi = |u: f64| -> Result<f64> {
        Ok(u - (4.0 * (u + ln_x)).exp() - 2.0 * (-2.0 * (u + ln_big_t)).exp())
    };
    // both exponents balance at s* = x^{−2/3} T^{−1/3}
    let guess = -(2.0 * ln_x + ln_big_t) / 3.0;
    let ln_i = quadrature::ln_integral_unimodal(phi, guess, &form_spec())?;
    Ok(3.5 * 2f64.ln() - PI.ln() + ln_x - ln_big_t + ln_i)
}

/// `l_ν` for `ν = 1/(2m+1)` through
/// `ν^{−1/(2ν)} (x/(π² T³))^{(1−ν)/(4ν)} 𝒬^{∘m}(x, T)`, `T = ψ_{1/ν}(t) = t^ν/ν`,
/// with `𝒬(x, s) = K_{(1−ν)/2}(2 (x/s)^{1/(2ν)})`.
pub fn l_density_q_chain(m: u32, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if m == 0 || m as usize > quadrature::MAX_COMPOSE_DEPTH + 1 {
        return Err(Error::domain(format!("kernel chain length must lie in 1..=5, got {m}")));
    }
    let nu = 1.0 / f64::from(2 * m + 1);
    let big_t = (nu * t.ln()).exp() / nu;
    let chain = ln_q_chain(m, x, big_t)?;
    let ln_pref = -0.5 / nu * nu.ln() + (1.0 - nu) / (4.0 * nu) * (x.ln() - 2.0 * PI.ln() - 3.0 * big_t.ln());
    exp_or_zero(ln_pref + chain, "Q chain")
}

/// `𝒬(x, s) = K_{(1−ν)/2}(2 (x/s)^{1/(2ν)})` for `ν = 1/(2m+1)`.
pub fn q_kernel(m: u32, x: f64, s: f64) -> Result<f64> {
    check_xt(x, s)?;
    let nu = 1.0 / f64::from(2 * m + 1);
    let l = ln_q_kernel(nu, x, s)?;
    Ok(if l < -745.0 { 0.0 } else { exp_checked(l, "Q kernel")? })
}

fn ln_q_kernel(nu: f64, x: f64, s: f64) -> Result<f64> {
    ln_q_kernel_log(nu, x.ln(), s.ln())
}

fn ln_q_kernel_log(nu: f64, lx: f64, ls: f64) -> Result<f64> {
    ln_bessel_k_wide(0.5 * (1.0 - nu), 2f64.ln() + (lx - ls) / (2.0 * nu))
}

/// `ln 𝒬^{∘m}(x, T)`, accurate where the chain itself underflows.
pub fn ln_q_chain(m: u32, x: f64, big_t: f64) -> Result<f64> {
    check_xt(x, big_t)?;
    if m == 0 || m as usize > quadrature::MAX_COMPOSE_DEPTH + 1 {
        return Err(Error::domain(format!("kernel chain length must lie in 1..=5, got {m}")));
    }
    let nu = 1.0 / f64::from(2 * m + 1);
    let kernel = move |la: f64, lb: f64| ln_q_kernel_log(nu, la, lb);
    ln_compose_same(&kernel, m, x.ln(), big_t.ln())
}

/// `𝒬^{∘m}(x, T)`: `m` kernels [`q_kernel`] composed, `ν = 1/(2m+1)`.
pub fn q_chain(m: u32, x: f64, big_t: f64) -> Result<f64> {
    exp_or_zero(ln_q_chain(m, x, big_t)?, "Q chain")
}

/// `l_ν` for `ν = 1/(n+1)` as the paired ⋆-chain `g^{n+1}_ν ⋆ … ⋆ g^{n+1}_{nν}(x, ψ_{n+1}(t))`.
pub fn l_density_chain(n: u32, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if n == 0 || n > MAX_CHAIN_ORDER {
        return Err(Error::domain(format!("chain order must lie in 1..={MAX_CHAIN_ORDER}, got {n}")));
    }
    let nu = 1.0 / f64::from(n + 1);
    let mus: Vec<f64> = (1..=n).map(|j| f64::from(j) * nu).collect();
    let v = ShapeVector::uniform(f64::from(n + 1), &mus)?;
    let stretched = time_stretch(TimeStretch::psi(n + 1)?, t)?;
    gengamma::star_convolve(&v, x, stretched, &chain_spec())
}

/// `l_ν(x, t) = t^{−ν} H(x t^{−ν})` for any `ν ∈ (0, 1)`; `contour`, if given, is used for `H`.
pub fn l_density_general(nu: f64, x: f64, t: f64, contour: Option<&ContourSpec>) -> Result<f64> {
    check_xt(x, t)?;
    check_open_index(nu)?;
    let h = FoxHParams::inverse_stable(nu)?;
    let ln_tn = nu * t.ln();
    let v = match contour {
        Some(c) => h.eval_with((x.ln() - ln_tn).exp(), c)?,
        None => h.eval_ln(x.ln() - ln_tn)?,
    };
    Ok(v * (-ln_tn).exp())
}

/// Strip of [`l_mellin_in_x`]: `Re η > 0`.
pub fn l_mellin_in_x_strip() -> Strip {
    Strip::new(0.0, f64::INFINITY)
}

/// `∫ x^{η−1} l_ν(x, t) dx = Γ(η)/Γ(ην − ν + 1) t^{ν(η−1)}`.
pub fn l_mellin_in_x(nu: f64, eta: Complex64, t: f64) -> Result<Complex64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::domain(format!("stability index must lie in (0, 1], got {nu}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    l_mellin_in_x_strip().check(eta.re)?;
    let l = ln_gamma_complex(eta)? - ln_gamma_complex(eta * nu - nu + 1.0)? + (eta - 1.0) * nu * t.ln();
    Ok(l.exp())
}

// ---------------------------------------------------------------- ratio laws

/// `r(w) = (1/π) w^{ν−1} sin πν / (1 + 2 w^ν cos πν + w^{2ν})`, the law of `τ₁/τ₂`.
pub fn ratio_density_r(nu: f64, w: f64) -> Result<f64> {
    check_open_index(nu)?;
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::domain(format!("ratio argument must be positive, got {w}")));
    }
    let ln_u = nu * w.ln();
    let c = cos_pi(nu);
    // divide numerator and denominator by max(1, u)² so nothing overflows
    let denom_ln = if ln_u > 0.0 {
        let v = (-ln_u).exp();
        2.0 * ln_u + (v * v + 2.0 * c * v + 1.0).ln()
    } else {
        let u = ln_u.exp();
        (1.0 + 2.0 * c * u + u * u).ln()
    };
    let l = (nu - 1.0) * w.ln() + sin_pi(nu).ln() - PI.ln() - denom_ln;
    exp_checked(l, "ratio density r")
}

/// `k(x) = sin νπ / (νπ (1 + 2x cos νπ + x²))`, the law of `(τ₁/τ₂)^ν`.
pub fn ratio_density_k(nu: f64, x: f64) -> Result<f64> {
    check_open_index(nu)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("ratio argument must be nonnegative, got {x}")));
    }
    let c = cos_pi(nu);
    let d = if x > 1.0 {
        let v = 1.0 / x;
        x * x * (v * v + 2.0 * c * v + 1.0)
    } else {
        1.0 + 2.0 * c * x + x * x
    };
    Ok(sin_pi(nu) / (nu * PI * d))
}

/// `∫₀^y k = (1/(νπ)) [arctan((y + cos νπ)/sin νπ) − (π/2 − νπ)]`.
pub fn ratio_cdf_k(nu: f64, y: f64) -> Result<f64> {
    check_open_index(nu)?;
    if !(y >= 0.0) {
        return Err(Error::domain(format!("ratio argument must be nonnegative, got {y}")));
    }
    if y.is_infinite() {
        return Ok(1.0);
    }
    let a = ((y + cos_pi(nu)) / sin_pi(nu)).atan();
    Ok(((a - (0.5 * PI - nu * PI)) / (nu * PI)).clamp(0.0, 1.0))
}

/// `∫₀^w r = K(w^ν)` with `K` from [`ratio_cdf_k`].
pub fn ratio_cdf_r(nu: f64, w: f64) -> Result<f64> {
    check_open_index(nu)?;
    if !(w >= 0.0) {
        return Err(Error::domain(format!("ratio argument must be nonnegative, got {w}")));
    }
    ratio_cdf_k(nu, w.powf(nu))
}

/// `h_ν ∘ l_ν (x, t) = t^{−1} r(x/t)`.
pub fn compose_hl_density(nu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    Ok(ratio_density_r(nu, x / t)? / t)
}

/// `l_ν ∘ h_ν (x, t) = t^{−1} k(x/t)`.
pub fn compose_lh_density(nu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    Ok(ratio_density_k(nu, x / t)? / t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Kernel;
    use crate::specfun::{bessel_k, gamma_fraction_product, gamma_real, mittag_leffler_neg};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn qspec() -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(1e-10)
    }

    fn idx(n: u32) -> StabilityIndex {
        StabilityIndex::reciprocal(n).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn index_parsing() {
        let a = StabilityIndex::parse("1/3").unwrap();
        assert_eq!(a.order(), Some(2));
        assert_eq!(a.nu(), 1.0 / 3.0);
        assert_eq!(StabilityIndex::parse("0.25").unwrap().order(), Some(3));
        assert_eq!(StabilityIndex::parse("2/4").unwrap().order(), Some(1));
        assert_eq!(StabilityIndex::parse("0.7").unwrap().order(), None);
        assert!(StabilityIndex::parse("1").unwrap().is_degenerate());
        assert!(StabilityIndex::parse("3/2").is_err());
        assert!(StabilityIndex::parse("0").is_err());
        assert!(StabilityIndex::parse("x").is_err());
        assert_eq!(idx(4).odd_reciprocal(), Some(2));
        assert_eq!(idx(3).odd_reciprocal(), None);
        assert_eq!(idx(2).to_string(), "1/3");
    }

    #[test]
    fn stretches() {
        assert_eq!(time_stretch(TimeStretch::phi(2).unwrap(), 2.0).unwrap(), 1.0);
        assert_eq!(time_stretch(TimeStretch::psi(2).unwrap(), 1.0).unwrap(), 2.0);
        assert!(TimeStretch::phi(0).is_err());
        assert!(time_stretch(TimeStretch::phi(2).unwrap(), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn stretch_inverse_pair(m in 1u32..12, s in 1e-3f64..1e3) {
            let p = TimeStretch::phi(m).unwrap();
            let back = time_stretch(p.inverse(), time_stretch(p, s).unwrap()).unwrap();
            prop_assert!((back - s).abs() <= 1e-12 * s);
        }

        #[test]
        fn ratio_r_inversion_symmetry(nu in 0.05f64..0.95, w in 1e-3f64..1e3) {
            let a = ratio_density_r(nu, 1.0 / w).unwrap() / (w * w);
            let b = ratio_density_r(nu, w).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }

        #[test]
        fn ratio_cdfs_monotone(nu in 0.05f64..0.95, a in 0.0f64..50.0, d in 0.0f64..50.0) {
            prop_assert!(ratio_cdf_k(nu, a).unwrap() <= ratio_cdf_k(nu, a + d).unwrap());
            prop_assert!(ratio_cdf_r(nu, a).unwrap() <= ratio_cdf_r(nu, a + d).unwrap());
        }

        #[test]
        fn h_scaling_in_t(x in 0.05f64..20.0, t in 0.2f64..5.0) {
            // h_ν(x, t) = t^{−1/ν} h_ν(x t^{−1/ν}, 1)
            let nu = 1.0 / 3.0;
            let s = t.powf(1.0 / nu);
            let a = h_third(x, t).unwrap();
            let b = h_third(x / s, 1.0).unwrap() / s;
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }

        #[test]
        fn densities_nonnegative(x in 1e-3f64..50.0, t in 0.1f64..10.0) {
            prop_assert!(h_half(x, t).unwrap() >= 0.0);
            prop_assert!(h_third(x, t).unwrap() >= 0.0);
            prop_assert!(l_half(x, t).unwrap() >= 0.0);
            prop_assert!(l_third(x, t).unwrap() >= 0.0);
        }
    }

    #[test]
    fn h_closed_values() {
        let want = (-0.25f64).exp() / (2.0 * PI.sqrt());
        assert_relative_eq!(h_density(idx(1), 1.0, 1.0).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(want, 0.2196956447338612, max_relative = 1e-7);
        let want = bessel_k(1.0 / 3.0, 2.0 / 3f64.powf(1.5)).unwrap() / (3.0 * PI);
        assert_relative_eq!(h_density(idx(2), 1.0, 1.0).unwrap(), want, max_relative = 1e-14);
        assert!(matches!(h_density(idx(0), 1.0, 1.0), Err(Error::DegenerateCase(_))));
        assert!(h_density(StabilityIndex::new(0.7).unwrap(), 1.0, 1.0).is_err());
    }

    #[test]
    fn h_laplace_identity() {
        // ∫ e^{−λx} h_ν(x, t) dx = e^{−t λ^ν}
        let nu = 1.0 / 3.0;
        for lambda in [0.5, 1.0, 2.0] {
            let r = quadrature::try_integrate_semi_infinite(
                |x| Ok((-lambda * x).exp() * h_density(idx(2), x, 1.0)?),
                &qspec(),
            )
            .unwrap();
            assert_relative_eq!(r.value, (-lambda.powf(nu)).exp(), max_relative = 1e-6);
        }
        // at λ = 1 the transform is e^{−t} for every ν
        for n in [1u32, 3, 4] {
            let r = quadrature::try_integrate_semi_infinite(
                |x| Ok((-x).exp() * h_density(idx(n), x, 1.3)?),
                &qspec(),
            )
            .unwrap();
            assert_relative_eq!(r.value, (-1.3f64).exp(), max_relative = 1e-6);
        }
    }

    #[test]
    fn h_mellin_values() {
        assert_eq!(h_mellin_in_x(0.3, c(1.0), 2.0).unwrap(), c(1.0));
        let v = h_mellin_in_x(0.5, c(0.5), 1.0).unwrap();
        assert_relative_eq!(v.re, 2.0 / PI.sqrt(), max_relative = 1e-13);
        assert!(matches!(h_mellin_in_x(0.5, c(1.6), 1.0), Err(Error::StripViolation { .. })));
        assert!(matches!(h_mellin_in_t(0.5, c(2.5), 1.0), Err(Error::StripViolation { .. })));
        // against quadrature of the closed densities
        for (n, eta, t) in [(1u32, 0.3, 1.7), (2, 0.8, 0.6), (2, 1.2, 1.0)] {
            let nu = 1.0 / f64::from(n + 1);
            let q = quadrature::try_integrate_semi_infinite(
                |x| Ok(x.powf(eta - 1.0) * h_density(idx(n), x, t)?),
                &qspec(),
            )
            .unwrap();
            assert_relative_eq!(h_mellin_in_x(nu, c(eta), t).unwrap().re, q.value, max_relative = 1e-6);
        }
        for (n, eta, x) in [(1u32, 0.5, 1.3), (2, 1.5, 0.7)] {
            let nu = 1.0 / f64::from(n + 1);
            let q = quadrature::try_integrate_semi_infinite(
                |t| Ok(t.powf(eta - 1.0) * h_density(idx(n), x, t)?),
                &qspec(),
            )
            .unwrap();
            assert_relative_eq!(h_mellin_in_t(nu, c(eta), x).unwrap().re, q.value, max_relative = 1e-6);
        }
        // the form with Γ((1−η)/ν)/(ν Γ(1−η)) away from η = 1
        let (nu, eta) = (0.4, 0.35);
        let want = gamma_real((1.0 - eta) / nu).unwrap() / (nu * gamma_real(1.0 - eta).unwrap());
        assert_relative_eq!(h_mellin_in_x(nu, c(eta), 1.0).unwrap().re, want, max_relative = 1e-13);
    }

    #[test]
    fn h_general_matches_closed_forms() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x = 10f64.powf(rng.gen_range(-1.5..1.5));
            let t = 10f64.powf(rng.gen_range(-0.7..0.7));
            assert_relative_eq!(h_density_general(0.5, x, t, None).unwrap(), h_half(x, t).unwrap(), max_relative = 1e-6);
            assert_relative_eq!(
                h_density_general(1.0 / 3.0, x, t, None).unwrap(),
                h_third(x, t).unwrap(),
                max_relative = 1e-6
            );
        }
        let r = quadrature::try_integrate_semi_infinite(|x| h_density_general(0.7, x, 1.0, None), &qspec()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn h_integral_forms_match_general() {
        for (x, t) in [(1.0, 1.0), (0.3, 2.0), (4.0, 0.8)] {
            let q = h_quarter(x, t).unwrap();
            assert_relative_eq!(q, h_density_general(0.25, x, t, None).unwrap(), max_relative = 1e-8);
            let f = h_fifth(FifthPairing::Adjacent, x, t).unwrap();
            assert_relative_eq!(f, h_density_general(0.2, x, t, None).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn fifth_pairings_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..5 {
            let x = 10f64.powf(rng.gen_range(-1.0..1.0));
            let t = 10f64.powf(rng.gen_range(-0.5..0.5));
            let a = h_fifth(FifthPairing::Adjacent, x, t).unwrap();
            let b = h_fifth(FifthPairing::Interleaved, x, t).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-5);
        }
    }

    #[test]
    fn h_from_phi_stretched_chain() {
        // h_{1/3} = e_{1/3} ⋆ e_{2/3}(x, (t/3)^3)
        let v = ShapeVector::uniform(-1.0, &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        for (x, t) in [(1.0, 1.0), (0.4, 1.5), (3.0, 0.9)] {
            let tt = (t / 3.0f64).powi(3);
            let s = gengamma::star_convolve_quadrature(&v, x, tt, &qspec()).unwrap();
            assert_relative_eq!(h_third(x, t).unwrap(), s, max_relative = 1e-6);
        }
    }

    #[test]
    fn h_chain_and_kernel_display() {
        // general reciprocal paths against the H form
        for (x, t) in [(1.0, 1.0), (0.5, 1.4)] {
            let k2 = h_density_kernel_chain(2, x, t).unwrap();
            assert_relative_eq!(k2, h_density_general(0.2, x, t, None).unwrap(), max_relative = 1e-6);
            let k1 = h_density_kernel_chain(1, x, t).unwrap();
            assert_relative_eq!(k1, h_third(x, t).unwrap(), max_relative = 1e-10);
            let c5 = h_density(idx(5), x, t).unwrap();
            assert_relative_eq!(c5, h_density_general(1.0 / 6.0, x, t, None).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn h_quarter_is_double_half() {
        // τ^{(1/2)}(τ^{(1/2)}_t) has index 1/4
        let k: Kernel<'_> = &|a, b| h_half(a, b);
        for (x, t) in [(1.0, 1.0), (0.2, 0.7)] {
            let c = quadrature::circ_compose(&[k, k], x, t, &qspec()).unwrap();
            assert_relative_eq!(c, h_quarter(x, t).unwrap(), max_relative = 1e-6);
        }
        // E exp{−λ τ₁(τ₂(t))} = exp{−t λ^{1/4}}
        let t = 1.2;
        for lambda in [0.5f64, 2.0] {
            let r = quadrature::try_integrate_semi_infinite(
                |s| Ok((-(lambda as f64).sqrt() * s).exp() * h_half(s, t)?),
                &qspec(),
            )
            .unwrap();
            assert_relative_eq!(r.value, (-t * lambda.powf(0.25)).exp(), max_relative = 1e-6);
            let r2 = quadrature::try_integrate_semi_infinite(
                |x| Ok((-lambda * x).exp() * quadrature::circ_compose(&[k, k], x, t, &qspec().with_rel_tol(1e-9))?),
                &qspec().with_rel_tol(1e-8),
            )
            .unwrap();
            assert_relative_eq!(r2.value, (-t * lambda.powf(0.25)).exp(), max_relative = 1e-6);
        }
    }

    #[test]
    fn l_closed_values() {
        let want = (-0.25f64).exp() / PI.sqrt();
        assert_relative_eq!(l_density(idx(1), 1.0, 1.0).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(want, 0.4393912894677224, max_relative = 1e-7);
        let want = bessel_k(1.0 / 3.0, 2.0 / 3f64.powf(1.5)).unwrap() / PI;
        assert_relative_eq!(l_density(idx(2), 1.0, 1.0).unwrap(), want, max_relative = 1e-14);
        assert!(matches!(l_density(idx(0), 1.0, 1.0), Err(Error::DegenerateCase(_))));
    }

    #[test]
    fn l_forms_match_general() {
        for (x, t) in [(1.0, 1.0), (0.3, 2.0), (2.5, 0.8)] {
            for n in [1u32, 2, 3, 4, 5, 6] {
                let nu = 1.0 / f64::from(n + 1);
                let a = l_density(idx(n), x, t).unwrap();
                let b = l_density_general(nu, x, t, None).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn l_from_psi_stretched_chain() {
        // l_{1/3} = g³_{2/3} ⋆ g³_{1/3}(x, ψ₃(t))
        let v = ShapeVector::uniform(3.0, &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        for (x, t) in [(1.0f64, 1.0f64), (0.4, 1.5), (2.0, 0.9)] {
            let s = gengamma::star_convolve_quadrature(&v, x, 3.0 * t.cbrt(), &qspec()).unwrap();
            assert_relative_eq!(l_third(x, t).unwrap(), s, max_relative = 1e-6);
        }
        assert_relative_eq!(l_density_chain(4, 0.7, 1.1).unwrap(), l_density_q_chain(2, 0.7, 1.1).unwrap(), max_relative = 1e-6);
    }

    #[test]
    fn l_transforms() {
        assert_relative_eq!(l_mellin_in_x(0.4, c(1.0), 3.0).unwrap().re, 1.0, max_relative = 1e-14);
        let v = l_mellin_in_x(0.5, c(2.0), 1.0).unwrap();
        assert_relative_eq!(v.re, 2.0 / PI.sqrt(), max_relative = 1e-13);
        let q = quadrature::try_integrate_semi_infinite(|x| Ok(x * l_half(x, 1.0)?), &qspec()).unwrap();
        assert_relative_eq!(q.value, 2.0 / PI.sqrt(), max_relative = 1e-6);
        assert!(l_mellin_in_x(0.5, c(-0.1), 1.0).is_err());
        // x-Laplace gives E_ν(−λ t^ν)
        for (n, lambda, t) in [(1u32, 1.0, 1.0), (2, 2.0, 0.5), (3, 0.7, 1.5)] {
            let nu = 1.0 / f64::from(n + 1);
            let q = quadrature::try_integrate_semi_infinite(|x| Ok((-lambda * x).exp() * l_density(idx(n), x, t)?), &qspec())
                .unwrap();
            let ml = mittag_leffler_neg(nu, lambda * t.powf(nu)).unwrap();
            assert_relative_eq!(q.value, ml, max_relative = 1e-6);
        }
        // t-Laplace: ∫ e^{−λt} l_ν(x, t) dt = λ^{ν−1} e^{−x λ^ν}
        for (n, lambda, x) in [(1u32, 1.0, 1.0), (2, 0.5, 0.8)] {
            let nu = 1.0 / f64::from(n + 1);
            let q = quadrature::try_integrate_semi_infinite(|t| Ok((-lambda * t).exp() * l_density(idx(n), x, t)?), &qspec())
                .unwrap();
            assert_relative_eq!(q.value, lambda.powf(nu - 1.0) * (-x * lambda.powf(nu)).exp(), max_relative = 1e-6);
        }
    }

    #[test]
    fn ratio_laws() {
        assert_relative_eq!(ratio_density_r(0.5, 1.0).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(ratio_density_k(0.5, 0.0).unwrap(), 2.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(compose_lh_density(0.5, 1.0, 1.0).unwrap(), 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(compose_hl_density(0.5, 1.0, 1.0).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-14);
        let r = quadrature::integrate_semi_infinite(|w| ratio_density_r(1.0 / 3.0, w).unwrap(), &qspec()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-8);
        let k = quadrature::integrate_semi_infinite(|x| ratio_density_k(0.5, x).unwrap(), &qspec()).unwrap();
        assert_relative_eq!(k.value, 1.0, max_relative = 1e-8);
        let hl = quadrature::integrate_semi_infinite(|x| compose_hl_density(0.3, x, 2.0).unwrap(), &qspec()).unwrap();
        assert_relative_eq!(hl.value, 1.0, max_relative = 1e-8);
        // far tails stay finite
        assert!(ratio_density_r(0.3, 1e200).unwrap() > 0.0);
        assert!(ratio_density_r(0.3, 1e-300).unwrap().is_finite());
        // CDFs against quadrature
        for y in [0.1, 1.0, 7.0] {
            let q = quadrature::integrate_interval(|x| ratio_density_k(0.3, x).unwrap(), 0.0, y, &qspec()).unwrap();
            assert_relative_eq!(ratio_cdf_k(0.3, y).unwrap(), q.value, max_relative = 1e-10);
            let q = quadrature::integrate_interval(|w| ratio_density_r(0.6, w).unwrap(), 0.0, y, &qspec()).unwrap();
            assert_relative_eq!(ratio_cdf_r(0.6, y).unwrap(), q.value, max_relative = 1e-8);
        }
    }

    #[test]
    fn compositions_match_quadrature() {
        let h: Kernel<'_> = &|a, b| h_half(a, b);
        let l: Kernel<'_> = &|a, b| l_half(a, b);
        let hl = quadrature::circ_compose(&[h, l], 1.0, 1.0, &qspec()).unwrap();
        assert_relative_eq!(hl, compose_hl_density(0.5, 1.0, 1.0).unwrap(), max_relative = 1e-5);
        let lh = quadrature::circ_compose(&[l, h], 1.0, 1.0, &qspec()).unwrap();
        assert_relative_eq!(lh, compose_lh_density(0.5, 1.0, 1.0).unwrap(), max_relative = 1e-5);
        let h3: Kernel<'_> = &|a, b| h_third(a, b);
        let l3: Kernel<'_> = &|a, b| l_third(a, b);
        let v = quadrature::circ_compose(&[h3, l3], 0.6, 1.3, &qspec()).unwrap();
        assert_relative_eq!(v, compose_hl_density(1.0 / 3.0, 0.6, 1.3).unwrap(), max_relative = 1e-5);
    }

    #[test]
    fn gauss_product() {
        for n in 1..=8u32 {
            let want = (2.0 * PI).powf(f64::from(n) / 2.0) / f64::from(n + 1).sqrt();
            assert_relative_eq!(gamma_fraction_product(n).unwrap(), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn extreme_arguments() {
        assert_eq!(h_half(1e-300, 1.0).unwrap(), 0.0);
        assert!(h_third(1e200, 1.0).unwrap() > 0.0);
        // deep tails of the integral forms against the H form
        assert_relative_eq!(l_quarter(10f64.powf(1.5), 1.5).unwrap(), 2.55912533939672e-19, max_relative = 1e-8);
        assert_relative_eq!(l_quarter(100.0, 1.5).unwrap(), 9.26257361628176e-85, max_relative = 1e-8);
        for x in [1e-3, 1e4] {
            assert_relative_eq!(h_quarter(x, 1.0).unwrap(), h_density_general(0.25, x, 1.0, None).unwrap(), max_relative = 1e-8);
            assert_relative_eq!(
                h_fifth(FifthPairing::Interleaved, x, 1.0).unwrap(),
                h_density_general(0.2, x, 1.0, None).unwrap(),
                max_relative = 1e-8
            );
        }
        assert_eq!(l_half(1e200, 1.0).unwrap(), 0.0);
        assert!(l_density_general(0.7, 1e3, 1.0, None).unwrap() >= 0.0);
        assert!(h_density(idx(1), -1.0, 1.0).is_err());
    }
}
