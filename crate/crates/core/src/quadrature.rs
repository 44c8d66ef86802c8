//! Numerical integration engines.
//!
//! * [`integrate_semi_infinite`]: exp-sinh double-exponential quadrature on `(0, ∞)`.
//! * [`integrate_interval`]: tanh-sinh quadrature on a finite interval.
//! * [`circ_compose`]: iterated kernel composition `∫…∫ f₁(x,s₁)…f_k(s_{k−1},t) ds`.
//! * [`mellin_invert`]: vertical-line trapezoid rule for the inverse Mellin transform.
//!
//! All sums are accumulated in a fixed order, so results are deterministic for a
//! fixed `QuadratureSpec`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Change of variables used by the semi-infinite integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// `x = c·exp(π/2·sinh t)`, trapezoid in `t`.
    DoubleExponential,
    /// `x = c·eᵗ` on a truncated window `|t| ≤ 40`, trapezoid in `t`.
    TruncatedUniform,
}

/// Tolerances and refinement budget for one integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Number of step halvings allowed after the initial level.
    pub max_refinements: usize,
    pub transform: Transform,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_refinements: 9,
            transform: Transform::DoubleExponential,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_refinements: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_refinements,
            transform: Transform::DoubleExponential,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    /// Same spec with both tolerances divided by `factor`, floored near machine precision.
    pub fn tightened(self, factor: f64) -> Self {
        QuadratureSpec {
            abs_tol: (self.abs_tol / factor).max(1e-300),
            rel_tol: (self.rel_tol / factor).max(4.0 * f64::EPSILON),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_refinements < 1 {
            return Err(Error::domain("max_refinements must be at least 1"));
        }
        Ok(())
    }

    fn accepts(&self, value: f64, error: f64) -> bool {
        error <= self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value of a quadrature together with its error estimate and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

// Largest |t| used by the exp-sinh map: x stays inside (1e-300, 1e300) for c = 1.
const EXP_SINH_T_MAX: f64 = 6.5;
const TANH_SINH_T_MAX: f64 = 6.2;
const UNIFORM_T_MAX: f64 = 40.0;
// A term is negligible once it is this small relative to the running sum.
const NEGLIGIBLE: f64 = 1e-20;

/// A one-dimensional trapezoid rule in an auxiliary variable `t`, refined by halving.
///
/// `node(t)` returns the abscissa handed to the integrand and the Jacobian weight.
fn trapezoid_levels<N, F>(
    mut node: N,
    mut f: F,
    t_max: f64,
    h0: f64,
    spec: &QuadratureSpec,
    what: &'static str,
) -> Result<IntegralResult>
where
    N: FnMut(f64) -> Option<(f64, f64)>,
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    let mut evaluations = 0usize;
    let mut eval = |t: f64, evaluations: &mut usize| -> Result<f64> {
        match node(t) {
            Some((x, w)) if w > 0.0 && w.is_finite() => {
                *evaluations += 1;
                let fx = f(x)?;
                if !fx.is_finite() {
                    return Err(Error::NaNDetected { at: x });
                }
                Ok(w * fx)
            }
            _ => Ok(0.0),
        }
    };

    // Level 0: walk outwards from t = 0 until terms become negligible.
    let mut raw = eval(0.0, &mut evaluations)?;
    let mut t_lo = 0.0;
    let mut t_hi = 0.0;
    for dir in [1.0, -1.0] {
        let mut k = 1usize;
        let mut quiet = 0;
        loop {
            let t = dir * k as f64 * h0;
            if t.abs() > t_max {
                break;
            }
            let term = eval(t, &mut evaluations)?;
            raw += term;
            if dir > 0.0 {
                t_hi = t;
            } else {
                t_lo = t;
            }
            if term.abs() <= NEGLIGIBLE * raw.abs() {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += 1;
        }
    }
    // One extra level-0 step of slack for the finer levels.
    t_hi = (t_hi + h0).min(t_max);
    t_lo = (t_lo - h0).max(-t_max);

    let mut h = h0;
    let mut estimate = h * raw;
    let mut error = f64::INFINITY;
    for level in 1..=spec.max_refinements {
        h *= 0.5;
        let first = (t_lo / h).ceil() as i64;
        let last = (t_hi / h).floor() as i64;
        let mut added = 0.0;
        for k in first..=last {
            if k.rem_euclid(2) == 1 {
                added += eval(k as f64 * h, &mut evaluations)?;
            }
        }
        raw += added;
        let next = h * raw;
        error = (next - estimate).abs();
        estimate = next;
        if level >= 2 && spec.accepts(estimate, error) {
            return Ok(IntegralResult {
                value: estimate,
                error_estimate: error,
                evaluations,
            });
        }
        // Two consecutive identical sums: converged to rounding.
        if level >= 2 && error == 0.0 {
            break;
        }
    }
    if spec.accepts(estimate, error) {
        return Ok(IntegralResult {
            value: estimate,
            error_estimate: error,
            evaluations,
        });
    }
    Err(Error::NonConvergence {
        what,
        estimate,
        error,
    })
}

/// `∫₀^∞ f(x) dx` for an integrand finite on `(0, ∞)`.
pub fn integrate_semi_infinite<F>(mut f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_infinite_scaled(|x| Ok(f(x)), 1.0, spec)
}

/// Fallible-integrand version of [`integrate_semi_infinite`].
pub fn try_integrate_semi_infinite<F>(f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_semi_infinite_scaled(f, 1.0, spec)
}

/// `∫₀^∞ f(x) dx` with the quadrature nodes centred on the scale `scale`.
///
/// The bulk of the integrand should sit within a few decades of `scale`.
pub fn try_integrate_semi_infinite_scaled<F>(
    f: F,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!("quadrature scale must be positive, got {scale}")));
    }
    match spec.transform {
        Transform::DoubleExponential => {
            // Keep x = scale·e^{(π/2) sinh t} inside the normal range.
            let log_room = 700.0 - scale.ln().abs();
            let t_max = (log_room / FRAC_PI_2).asinh().min(EXP_SINH_T_MAX);
            trapezoid_levels(
                |t| {
                    let e = FRAC_PI_2 * t.sinh();
                    let x = scale * e.exp();
                    (x > 0.0 && x.is_finite()).then(|| (x, FRAC_PI_2 * t.cosh() * x))
                },
                f,
                t_max,
                0.5,
                spec,
                "exp-sinh quadrature",
            )
        }
        Transform::TruncatedUniform => trapezoid_levels(
            |t| {
                let x = scale * t.exp();
                (x > 0.0 && x.is_finite()).then_some((x, x))
            },
            f,
            UNIFORM_T_MAX,
            1.0,
            spec,
            "log-uniform quadrature",
        ),
    }
}

/// `∫ₐ^∞ f(x) dx`.
pub fn try_integrate_upper<F>(mut f: F, a: f64, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !a.is_finite() {
        return Err(Error::domain("lower limit must be finite"));
    }
    let scale = if a == 0.0 { 1.0 } else { a.abs() };
    try_integrate_semi_infinite_scaled(|u| f(a + u), scale, spec)
}

/// `∫ₐᵇ f(x) dx` by tanh-sinh quadrature; endpoint singularities are tolerated.
pub fn integrate_interval<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_interval(|x| Ok(f(x)), a, b, spec)
}

/// Fallible-integrand version of [`integrate_interval`].
pub fn try_integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("interval endpoints must be finite"));
    }
    if a == b {
        return Ok(IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let half = 0.5 * (hi - lo);
    let mut r = trapezoid_levels(
        |t| {
            let s = FRAC_PI_2 * t.sinh();
            // Distance from the nearer endpoint, computed without cancellation.
            let gap = 2.0 * half / ((2.0 * s.abs()).exp() + 1.0);
            if gap <= 0.0 {
                return None;
            }
            let x = if t < 0.0 { lo + gap } else { hi - gap };
            let c = s.cosh();
            let w = half * FRAC_PI_2 * t.cosh() / (c * c);
            (x > lo && x < hi).then_some((x, w))
        },
        f,
        TANH_SINH_T_MAX,
        0.5,
        spec,
        "tanh-sinh quadrature",
    )?;
    r.value *= sign;
    Ok(r)
}

// Drop in exponent at which the window around a peak is closed.
const PEAK_WINDOW_DROP: f64 = 60.0;
// Multiple of ε|φ_max| below which a log-space integral cannot be resolved.
const CONDITIONING_ULPS: f64 = 64.0;
// Noise in φ beyond which only φ_max itself is meaningful.
const UNRESOLVED_LOG_NOISE: f64 = 100.0;
// Half-width, in unit steps, of the initial scan around the guess.
const PEAK_SCAN: i32 = 8;

/// `ln ∫_{−∞}^{∞} e^{φ(u)} du` for a unimodal exponent `φ`.
///
/// The peak is located from `guess` (scanned over `guess ± 8` first), the window is closed where `φ` has
/// fallen by 60 below its maximum, and the rescaled integrand is integrated
/// by tanh-sinh. Works in log space, so the result may lie far outside the
/// `f64` range. The relative tolerance is never tighter than `64 ε |φ_max|`,
/// the conditioning of the exponent itself; once that exceeds 100 the
/// maximum `φ_max` is returned as is.
pub fn ln_integral_unimodal<F>(phi: F, guess: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !guess.is_finite() {
        return Err(Error::domain("peak guess must be finite"));
    }
    let val = |u: f64| -> Result<f64> {
        let v = phi(u)?;
        if v.is_nan() {
            return Err(Error::NaNDetected { at: u });
        }
        Ok(v)
    };
    // coarse scan so a guess sitting in an underflowed region still finds the bulk
    let mut guess = guess;
    let mut f0 = val(guess)?;
    let centre = guess;
    for k in -PEAK_SCAN..=PEAK_SCAN {
        let u = centre + f64::from(k);
        let f = val(u)?;
        if f > f0 {
            guess = u;
            f0 = f;
        }
    }
    // bracket the maximum by doubling steps uphill
    let h = 0.125;
    let (fl, fr) = (val(guess - h)?, val(guess + h)?);
    let (mut a, mut b) = (guess - h, guess + h);
    if fl > f0 || fr > f0 {
        let dir = if fr >= fl { 1.0 } else { -1.0 };
        let (mut p0, mut p1, mut f1) = (guess, guess + dir * h, fr.max(fl));
        let mut step = h;
        let mut bracketed = false;
        for _ in 0..60 {
            step *= 2.0;
            let p2 = p1 + dir * step;
            let f2 = val(p2)?;
            if f2 <= f1 {
                a = p0.min(p2);
                b = p0.max(p2);
                bracketed = true;
                break;
            }
            p0 = p1;
            p1 = p2;
            f1 = f2;
        }
        if !bracketed {
            return Err(Error::NonConvergence {
                what: "unimodal peak search",
                estimate: f1,
                error: f64::INFINITY,
            });
        }
    }
    // golden section
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (val(c)?, val(d)?);
    for _ in 0..200 {
        if b - a <= 1e-10 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = val(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = val(d)?;
        }
    }
    let top = 0.5 * (a + b);
    let fmax = val(top)?.max(fc).max(fd);
    if fmax == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if !fmax.is_finite() {
        return Err(Error::Overflow("unimodal integrand"));
    }
    // close the window on each side
    let edge = |dir: f64| -> Result<f64> {
        // start narrow: super-exponential tails give peaks far thinner than a unit
        let mut w = 1e-8;
        for _ in 0..100 {
            if val(top + dir * w)? < fmax - PEAK_WINDOW_DROP {
                return Ok(top + dir * w);
            }
            w *= 2.0;
        }
        Err(Error::NonConvergence {
            what: "unimodal integrand tail",
            estimate: fmax,
            error: f64::INFINITY,
        })
    };
    let lo = edge(-1.0)?;
    let hi = edge(1.0)?;
    // φ carries absolute roundoff ~ ε|φ|, which is relative noise in e^{φ − φmax}
    let noise = CONDITIONING_ULPS * f64::EPSILON * fmax.abs();
    if noise > UNRESOLVED_LOG_NOISE {
        // ln of the window width is far below the uncertainty of φmax itself
        return Ok(fmax);
    }
    let mut spec = *spec;
    spec.rel_tol = spec.rel_tol.max(noise);
    let r = try_integrate_interval(
        |u| {
            let d = val(u)? - fmax;
            if d > noise {
                return Err(Error::NonConvergence {
                    what: "unimodal peak search",
                    estimate: fmax,
                    error: d,
                });
            }
            Ok(d.min(0.0).exp())
        },
        lo,
        hi,
        &spec,
    )?;
    if r.value <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(fmax + r.value.ln())
}

/// Boxed two-argument kernel `(x, s) ↦ f(x, s)` used by [`circ_compose`].
pub type Kernel<'a> = &'a dyn Fn(f64, f64) -> Result<f64>;

/// Which end of a kernel chain is integrated innermost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestOrder {
    /// `∫ f₁(x,s₁) [∫ f₂(s₁,s₂) … ] ds₁`: the last kernels are innermost.
    RightNested,
    /// `∫ [∫ f₁(x,s₁) f₂(s₁,s₂) ds₁ …] f_k(s_{k−1},t) ds_{k−1}`.
    LeftNested,
}

/// Maximum number of nested integrals in one composition.
pub const MAX_COMPOSE_DEPTH: usize = 4;

/// Tolerance tightening factor applied per nested level.
pub const COMPOSE_TIGHTENING: f64 = 10.0;

/// Log kernel `(ln a, ln b) ↦ ln f(a, b)` used by [`ln_compose_unimodal`].
pub type LnKernel<'a> = &'a dyn Fn(f64, f64) -> Result<f64>;

// Inner levels of a log composition never ask for less than this.
const LN_COMPOSE_FLOOR: f64 = 1e-10;

/// `ln (f₁ ∘ … ∘ f_k)(x, t)` with every argument in log form.
///
/// Each level integrates over `u = ln s` with [`ln_integral_unimodal`], so the
/// peak is located rather than assumed. The integrand at every level must be
/// unimodal in `u`; kernels jointly log-concave in `(ln a, ln b)` guarantee it,
/// since marginals of log-concave functions stay log-concave.
pub fn ln_compose_unimodal(kernels: &[LnKernel<'_>], ln_x: f64, ln_t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let k = kernels.len();
    if k == 0 {
        return Err(Error::domain("composition needs at least one kernel"));
    }
    if k - 1 > MAX_COMPOSE_DEPTH {
        return Err(Error::DepthExceeded {
            depth: k - 1,
            max: MAX_COMPOSE_DEPTH,
        });
    }
    if !(ln_x.is_finite() && ln_t.is_finite()) {
        return Err(Error::domain("composition arguments must be positive and finite"));
    }
    ln_nested(kernels, ln_x, ln_t, spec)
}

fn ln_nested(kernels: &[LnKernel<'_>], ln_x: f64, ln_t: f64, spec: &QuadratureSpec) -> Result<f64> {
    if kernels.len() == 1 {
        return kernels[0](ln_x, ln_t);
    }
    let mut inner = spec.tightened(COMPOSE_TIGHTENING);
    inner.rel_tol = inner.rel_tol.max(LN_COMPOSE_FLOOR.min(spec.rel_tol));
    let head = kernels[0];
    let tail = &kernels[1..];
    // first guess: the geometric interpolation between the two ends
    let guess = ln_x + (ln_t - ln_x) / kernels.len() as f64;
    ln_integral_unimodal(
        |u| {
            let a = head(ln_x, u)?;
            if a == f64::NEG_INFINITY {
                return Ok(a);
            }
            let b = ln_nested(tail, u, ln_t, &inner)?;
            Ok(a + b + u)
        },
        guess,
        spec,
    )
}

/// The iterated integral `f₁ ∘ f₂ ∘ … ∘ f_k (x, t)`.
///
/// Each intermediate variable `s_i` is integrated over `(0, ∞)` with nodes
/// centred on the geometric interpolation `x^{1−i/k} t^{i/k}`; inner levels use
/// tolerances tightened by [`COMPOSE_TIGHTENING`] per level.
pub fn circ_compose(kernels: &[Kernel<'_>], x: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    circ_compose_ordered(kernels, x, t, spec, NestOrder::RightNested)
}

/// [`circ_compose`] with an explicit nesting order.
pub fn circ_compose_ordered(
    kernels: &[Kernel<'_>],
    x: f64,
    t: f64,
    spec: &QuadratureSpec,
    order: NestOrder,
) -> Result<f64> {
    let k = kernels.len();
    if k < 2 {
        return Err(Error::domain("composition needs at least two kernels"));
    }
    if k - 1 > MAX_COMPOSE_DEPTH {
        return Err(Error::DepthExceeded {
            depth: k - 1,
            max: MAX_COMPOSE_DEPTH,
        });
    }
    if !(x > 0.0 && t > 0.0) {
        return Err(Error::domain("composition arguments must be positive"));
    }
    let scale = |i: usize| -> f64 {
        let w = i as f64 / k as f64;
        (x.ln() * (1.0 - w) + t.ln() * w).exp()
    };
    match order {
        NestOrder::RightNested => right_nested(kernels, x, t, spec, 1, &scale),
        NestOrder::LeftNested => left_nested(kernels, x, t, spec, k - 1, &scale),
    }
}

// ∫ k₀(x, s) · [k₁ ∘ … ∘ k_last](s, t) ds, where `index` labels the variable s.
fn right_nested(
    kernels: &[Kernel<'_>],
    x: f64,
    t: f64,
    spec: &QuadratureSpec,
    index: usize,
    scale: &dyn Fn(usize) -> f64,
) -> Result<f64> {
    if kernels.len() == 1 {
        return kernels[0](x, t);
    }
    let inner_spec = spec.tightened(COMPOSE_TIGHTENING);
    let head = kernels[0];
    let tail = &kernels[1..];
    let r = try_integrate_semi_infinite_scaled(
        |s| {
            let a = head(x, s)?;
            if a == 0.0 {
                return Ok(0.0);
            }
            Ok(a * right_nested(tail, s, t, &inner_spec, index + 1, scale)?)
        },
        scale(index),
        spec,
    )?;
    Ok(r.value)
}

// ∫ [k₀ ∘ … ∘ k_{n−2}](x, s) · k_{n−1}(s, t) ds, where `index` labels s.
fn left_nested(
    kernels: &[Kernel<'_>],
    x: f64,
    t: f64,
    spec: &QuadratureSpec,
    index: usize,
    scale: &dyn Fn(usize) -> f64,
) -> Result<f64> {
    let n = kernels.len();
    if n == 1 {
        return kernels[0](x, t);
    }
    let inner_spec = spec.tightened(COMPOSE_TIGHTENING);
    let last = kernels[n - 1];
    let head = &kernels[..n - 1];
    let r = try_integrate_semi_infinite_scaled(
        |s| {
            let b = last(s, t)?;
            if b == 0.0 {
                return Ok(0.0);
            }
            Ok(b * left_nested(head, x, s, &inner_spec, index - 1, scale)?)
        },
        scale(index),
        spec,
    )?;
    Ok(r.value)
}

/// An open vertical strip `lo < Re η < hi`; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub lo: f64,
    pub hi: f64,
}

impl Strip {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Strip { lo, hi }
    }

    pub const fn whole() -> Self {
        Strip {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, re: f64) -> bool {
        re > self.lo && re < self.hi
    }

    pub fn intersect(&self, other: &Strip) -> Strip {
        Strip {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// `Ok(())` when `re` lies strictly inside, `StripViolation` otherwise.
    pub fn check(&self, re: f64) -> Result<()> {
        if self.contains(re) {
            Ok(())
        } else {
            Err(Error::StripViolation {
                re,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    /// Default contour abscissa: the midpoint, or half a unit inside a one-sided strip.
    pub fn default_abscissa(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyStrip {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 0.5,
            (false, true) => self.hi - 0.5,
            (false, false) => 0.0,
        })
    }

    /// Distance from `re` to the nearer bound.
    pub fn margin(&self, re: f64) -> f64 {
        (re - self.lo).min(self.hi - re)
    }
}

/// Vertical-line contour `η = θ + i·k·h`, `|k·h| ≤ T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Abscissa θ of the vertical line.
    pub abscissa: f64,
    /// Maximal |Im η| reached by the sum.
    pub truncation: f64,
    /// Node spacing h along the line.
    pub step: f64,
    /// Summation stops once a node term falls below `tail_tol` times the central term.
    pub tail_tol: f64,
}

/// Fewest nodes a contour may span.
pub const MIN_CONTOUR_NODES: usize = 64;

impl ContourSpec {
    pub fn new(abscissa: f64, truncation: f64, step: f64) -> Result<Self> {
        let c = ContourSpec {
            abscissa,
            truncation,
            step,
            tail_tol: 1e-17,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.abscissa.is_finite() {
            return Err(Error::domain("contour abscissa must be finite"));
        }
        if !(self.truncation > 0.0 && self.step > 0.0) {
            return Err(Error::domain("contour truncation and step must be positive"));
        }
        let nodes = 2.0 * (self.truncation / self.step).floor() + 1.0;
        if nodes < MIN_CONTOUR_NODES as f64 {
            return Err(Error::domain(format!(
                "contour spans {nodes} nodes, need at least {MIN_CONTOUR_NODES}"
            )));
        }
        Ok(())
    }

    /// Contour adapted to a strip and to the evaluation point `x`.
    ///
    /// The step keeps the aliasing error of the oscillating factor `x^{−iy}`
    /// below roughly `e^{−40}` given the distance from θ to the strip edges.
    pub fn auto(strip: &Strip, x: f64) -> Result<Self> {
        let theta = strip.default_abscissa()?;
        Self::auto_at(strip, theta, x)
    }

    /// As [`ContourSpec::auto`] with a caller-chosen abscissa.
    pub fn auto_at(strip: &Strip, theta: f64, x: f64) -> Result<Self> {
        strip.check(theta)?;
        let d = strip.margin(theta).min(2.0) * 0.9;
        let step = (2.0 * PI / (x.ln().abs() + 40.0 / d)).min(0.25);
        let truncation = 2000.0_f64.max(MIN_CONTOUR_NODES as f64 * step);
        ContourSpec::new(theta, truncation, step)
    }

    pub fn with_abscissa(mut self, abscissa: f64) -> Self {
        self.abscissa = abscissa;
        self
    }
}

/// Result of a contour sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourResult {
    pub value: f64,
    /// Imaginary part left over after summation; zero for exactly real inverses.
    pub imag_residual: f64,
    /// `|S_h − S_{2h}|` plus the size of the last retained term and the rounding floor.
    pub error_estimate: f64,
    /// Sum of the absolute node terms, the scale of rounding errors.
    pub magnitude: f64,
    /// Abscissa actually used.
    pub abscissa: f64,
    /// Node spacing actually used.
    pub step: f64,
    /// Largest |Im η| actually used.
    pub reached: f64,
    pub evaluations: usize,
}

struct LineSum {
    sum: Complex64,
    even_sum: Complex64,
    magnitude: f64,
    last: f64,
    reached: f64,
    evaluations: usize,
    converged: bool,
}

// Trapezoid sum of M(θ + iy) x^{−θ−iy} over y = k h, stopping on a quiet tail.
fn line_sum<L>(ln_mult: &L, ln_x: f64, theta: f64, h: f64, truncation: f64, tail_tol: f64) -> Result<LineSum>
where
    L: Fn(Complex64) -> Result<Option<Complex64>>,
{
    let term = |y: f64| -> Result<Complex64> {
        let eta = Complex64::new(theta, y);
        match ln_mult(eta)? {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(l) => {
                let e = l - eta * ln_x;
                if e.re > 709.0 || !e.re.is_finite() && e.re != f64::NEG_INFINITY {
                    return Err(Error::NaNDetected { at: y });
                }
                let v = e.exp();
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NaNDetected { at: y });
                }
                Ok(v)
            }
        }
    };
    let centre = term(0.0)?;
    let mut sum = centre;
    let mut even_sum = centre;
    let mut magnitude = centre.norm();
    let mut peak = centre.norm();
    let kmax = (truncation / h).floor() as i64;
    let mut out = LineSum {
        sum,
        even_sum,
        magnitude,
        last: f64::INFINITY,
        reached: 0.0,
        evaluations: 1,
        converged: false,
    };
    let mut quiet = 0;
    for k in 1..=kmax {
        let y = k as f64 * h;
        let up = term(y)?;
        let down = term(-y)?;
        out.evaluations += 2;
        let pair = up + down;
        sum += pair;
        if k % 2 == 0 {
            even_sum += pair;
        }
        let size = up.norm().max(down.norm());
        magnitude += up.norm() + down.norm();
        peak = peak.max(size);
        out.last = size;
        out.reached = y;
        if size <= tail_tol * peak {
            quiet += 1;
            if quiet >= 3 {
                out.converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if !out.converged && out.last <= tail_tol * peak * 1e3 {
        out.converged = true;
    }
    out.sum = sum;
    out.even_sum = even_sum;
    out.magnitude = magnitude;
    Ok(out)
}

fn finish(s: &LineSum, theta: f64, h: f64) -> ContourResult {
    let factor = h / (2.0 * PI);
    let value = factor * s.sum.re;
    let coarse = 2.0 * factor * s.even_sum.re;
    let magnitude = factor * s.magnitude;
    ContourResult {
        value,
        imag_residual: (factor * s.sum.im).abs(),
        error_estimate: (value - coarse).abs() + factor * s.last + 1e-15 * magnitude,
        magnitude,
        abscissa: theta,
        step: h,
        reached: s.reached,
        evaluations: s.evaluations,
    }
}

/// Inverse Mellin transform `f(x) = (1/2πi) ∫ M(η) x^{−η} dη` along `Re η = θ`.
///
/// `strip` is the fundamental strip declared for the multiplier; the abscissa
/// must lie inside it.
pub fn mellin_invert<M>(multiplier: M, x: f64, strip: &Strip, contour: &ContourSpec) -> Result<ContourResult>
where
    M: Fn(Complex64) -> Result<Complex64>,
{
    mellin_invert_log(
        |eta| {
            let m = multiplier(eta)?;
            Ok((m != Complex64::new(0.0, 0.0)).then(|| m.ln()))
        },
        x,
        strip,
        contour,
    )
}

/// [`mellin_invert`] for a multiplier given by its logarithm (`None` where it vanishes).
pub fn mellin_invert_log<L>(ln_mult: L, x: f64, strip: &Strip, contour: &ContourSpec) -> Result<ContourResult>
where
    L: Fn(Complex64) -> Result<Option<Complex64>>,
{
    contour.validate()?;
    strip.check(contour.abscissa)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("Mellin inversion needs x > 0, got {x}")));
    }
    let s = line_sum(&ln_mult, x.ln(), contour.abscissa, contour.step, contour.truncation, contour.tail_tol)?;
    if !s.converged {
        return Err(Error::Truncation {
            at: s.reached,
            tail: s.last * contour.step / (2.0 * PI),
        });
    }
    Ok(finish(&s, contour.abscissa, contour.step))
}

// Largest |θ| probed by the saddle search.
const SADDLE_CAP: f64 = 1.0e4;

/// Abscissa minimizing `Re ln M(θ) − θ ln x` on the real segment of the strip.
///
/// On that line the integrand peaks at `y = 0` for Gamma-ratio multipliers, so the
/// minimizer keeps the summed magnitudes as close as possible to the result.
/// The argument enters through `ln_x = ln x`.
pub fn saddle_abscissa<L>(ln_mult: &L, ln_x: f64, strip: &Strip) -> Result<f64>
where
    L: Fn(Complex64) -> Result<Option<Complex64>>,
{
    let theta0 = strip.default_abscissa()?;
    let phi = |th: f64| -> f64 {
        match ln_mult(Complex64::new(th, 0.0)) {
            Ok(Some(l)) if l.re.is_finite() => l.re - th * ln_x,
            _ => f64::INFINITY,
        }
    };
    // keep a sliver away from pole edges
    let guard = |edge: f64| 1e-4 * (1.0 + edge.abs());
    let lo_lim = if strip.lo.is_finite() { strip.lo + guard(strip.lo) } else { -SADDLE_CAP };
    let hi_lim = if strip.hi.is_finite() { strip.hi - guard(strip.hi) } else { SADDLE_CAP };
    if !(lo_lim < hi_lim) {
        return Ok(theta0);
    }
    let f0 = phi(theta0);
    let (a, b);
    // Bracket by geometric expansion toward the descending side.
    let probe = 0.25f64.min(0.5 * (hi_lim - lo_lim));
    let (dir, limit) = if phi((theta0 + probe).min(hi_lim)) < f0 {
        (1.0, hi_lim)
    } else if phi((theta0 - probe).max(lo_lim)) < f0 {
        (-1.0, lo_lim)
    } else {
        (0.0, theta0)
    };
    if dir != 0.0 {
        let mut step = probe;
        let mut prev = theta0;
        let mut fprev = f0;
        loop {
            let next = if dir > 0.0 { (prev + step).min(limit) } else { (prev - step).max(limit) };
            let fnext = phi(next);
            if fnext >= fprev || next == limit {
                let pinned = fnext < fprev;
                if dir > 0.0 {
                    a = if pinned { prev } else { (prev - step * 0.5).max(lo_lim).min(prev) };
                    b = next;
                } else {
                    a = next;
                    b = if pinned { prev } else { (prev + step * 0.5).min(hi_lim).max(prev) };
                }
                break;
            }
            prev = next;
            fprev = fnext;
            step *= 2.0;
        }
    } else {
        a = (theta0 - probe).max(lo_lim);
        b = (theta0 + probe).min(hi_lim);
    }
    // Golden-section refinement inside [a, b].
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..60 {
        if (hi - lo).abs() <= 1e-6 * (1.0 + lo.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = phi(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = phi(d);
        }
    }
    let best = 0.5 * (lo + hi);
    Ok(if phi(best) <= f0 { best } else { theta0 })
}

/// Largest |Im η| an adaptive contour may reach.
pub const ADAPTIVE_TRUNCATION: f64 = 5.0e3;
/// Most node terms an adaptive contour may spend before giving up.
pub const ADAPTIVE_MAX_TERMS: usize = 400_000;

/// Inverse Mellin transform with the abscissa at the saddle of `|M(θ)| x^{−θ}` and
/// the step halved until two successive trapezoid sums agree to `rel_tol`.
pub fn mellin_invert_adaptive<L>(ln_mult: L, x: f64, strip: &Strip, rel_tol: f64) -> Result<ContourResult>
where
    L: Fn(Complex64) -> Result<Option<Complex64>>,
{
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("Mellin inversion needs x > 0, got {x}")));
    }
    mellin_invert_adaptive_ln(ln_mult, x.ln(), strip, rel_tol)
}

/// [`mellin_invert_adaptive`] at `x = e^{ln_x}`, for arguments outside the `f64` range.
pub fn mellin_invert_adaptive_ln<L>(ln_mult: L, ln_x: f64, strip: &Strip, rel_tol: f64) -> Result<ContourResult>
where
    L: Fn(Complex64) -> Result<Option<Complex64>>,
{
    if !ln_x.is_finite() {
        return Err(Error::domain(format!("Mellin inversion needs finite ln x, got {ln_x}")));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::domain("contour tolerance must be positive"));
    }
    let theta = saddle_abscissa(&ln_mult, ln_x, strip)?;
    strip.check(theta)?;
    // Aliasing bound e^{−2πd/h + d|ln x|} ≈ e^{−30} at the first try.
    let d = strip.margin(theta).min(2.0);
    let mut h = (2.0 * PI * d / (30.0 + d * ln_x.abs())).min(0.5);
    let mut spent = 0usize;
    let mut best: Option<ContourResult> = None;
    for _ in 0..12 {
        let s = line_sum(&ln_mult, ln_x, theta, h, ADAPTIVE_TRUNCATION, 1e-18)?;
        spent += s.evaluations;
        if !s.converged {
            return Err(Error::Truncation {
                at: s.reached,
                tail: s.last * h / (2.0 * PI),
            });
        }
        let r = finish(&s, theta, h);
        let floor = 1e-14 * r.magnitude;
        if r.error_estimate <= rel_tol * r.value.abs() + floor + f64::MIN_POSITIVE {
            return Ok(r);
        }
        best = Some(r);
        if spent > ADAPTIVE_MAX_TERMS {
            break;
        }
        h *= 0.5;
    }
    let r = best.expect("at least one pass");
    Err(Error::NonConvergence {
        what: "adaptive Mellin contour",
        estimate: r.value,
        error: r.error_estimate,
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, found by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(z) and P_{n−1}(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn unimodal_log_integrals() {
        let spec = QuadratureSpec::default();
        // ∫ e^{ku − e^u} du = Γ(k)
        for k in [0.5, 1.0, 7.5] {
            let l = ln_integral_unimodal(|u| Ok(k * u - u.exp()), 0.0, &spec).unwrap();
            assert!((l - crate::specfun::ln_gamma(k).unwrap()).abs() < 1e-12);
        }
        // a narrow Gaussian far from the guess, with a peak value far beyond f64
        for a in [1e-2, 1.0, 1e8] {
            let l = ln_integral_unimodal(|u| Ok(2000.0 - a * (u - 30.0) * (u - 30.0)), -5.0, &spec).unwrap();
            assert!((l - (2000.0 + 0.5 * (PI / a).ln())).abs() < 1e-12 * 2000.0);
        }
    }

    #[test]
    fn exponential_integrates_to_one() {
        let r = integrate_semi_infinite(|x| (-x).exp(), &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13, "{r:?}");
        assert!(r.error_estimate <= 1e-11);
    }

    #[test]
    fn gauss_legendre_rules() {
        for n in [1usize, 2, 5, 10] {
            let (x, w) = gauss_legendre(n);
            // exact for degree 2n − 1
            let d = 2 * n - 1;
            let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(d as i32 - 1)).sum();
            let want = if (d - 1) % 2 == 0 { 2.0 / d as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "{n} {got} {want}");
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        }
        let (x, _) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moment() {
        let r = integrate_semi_infinite(|x| x * (-x * x).exp(), &spec()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn heavy_power_tail() {
        // ∫₀^∞ dx / (1 + x)^{4/3} = 3
        let r = integrate_semi_infinite(|x| (1.0 + x).powf(-4.0 / 3.0), &spec()).unwrap();
        assert!((r.value - 3.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn log_uniform_transform_agrees() {
        let s = spec().with_transform(Transform::TruncatedUniform);
        let r = integrate_semi_infinite(|x| x * x * (-x).exp(), &s).unwrap();
        assert!((r.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn nan_integrand_is_reported() {
        let r = integrate_semi_infinite(|x| if x > 2.0 { f64::NAN } else { 1.0 }, &spec());
        assert!(matches!(r, Err(Error::NaNDetected { .. })));
    }

    #[test]
    fn non_convergence_is_reported() {
        // Oscillatory, not absolutely integrable.
        let s = QuadratureSpec::new(1e-14, 1e-14, 3).unwrap();
        let r = integrate_semi_infinite(|x| (x * 50.0).sin() / (1.0 + x).sqrt(), &s);
        assert!(matches!(r, Err(Error::NonConvergence { .. })), "{r:?}");
    }

    #[test]
    fn interval_with_endpoint_singularity() {
        // ∫₀¹ x^{-0.9} dx = 10
        let r = integrate_interval(|x| x.powf(-0.9), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 10.0).abs() < 1e-8, "{r:?}");
        let r = integrate_interval(|x| x.cos(), 1.0, 0.0, &spec()).unwrap();
        assert!((r.value + 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn upper_tail_integral() {
        let r = try_integrate_upper(|x| Ok((-x).exp()), 3.0, &spec()).unwrap();
        assert!((r.value - (-3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn bad_spec_rejected() {
        assert!(QuadratureSpec::new(0.0, 1e-8, 4).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-8, 0).is_err());
    }

    fn gauss_kernel(width: f64) -> impl Fn(f64, f64) -> Result<f64> {
        move |s: f64, t: f64| {
            Ok((-(s - t).powi(2) / (2.0 * width * width)).exp() / (width * (2.0 * PI).sqrt()))
        }
    }

    #[test]
    fn narrow_kernel_is_approximate_identity() {
        let f = |x: f64, s: f64| Ok(s * (-x * s).exp());
        let w = 0.02;
        let delta = gauss_kernel(w);
        let ks: [Kernel<'_>; 2] = [&f, &delta];
        let v = circ_compose(&ks, 0.7, 1.3, &spec()).unwrap();
        // f(t) + w²/2 f''(t) with f(s) = s e^{−0.7 s}
        let t = 1.3f64;
        let exact = t * (-0.7 * t).exp() + 0.5 * w * w * (0.49 * t - 1.4) * (-0.7 * t).exp();
        assert!((v - exact).abs() < 1e-6 * exact, "{v} vs {exact}");
    }

    #[test]
    fn two_gamma_kernels_match_tensor_oracle() {
        // g¹₁ as a kernel: (x, s) ↦ e^{−x/s}/s
        let g = |x: f64, s: f64| Ok((-x / s).exp() / s);
        let ks: [Kernel<'_>; 2] = [&g, &g];
        let v = circ_compose(&ks, 1.0, 1.0, &spec()).unwrap();
        // Independent oracle: composite Simpson in log s on a wide window.
        let n = 40_000;
        let (a, b) = (-30.0f64, 30.0f64);
        let hh = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let u = a + i as f64 * hh;
            let s = u.exp();
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * (-1.0 / s).exp() / s * (-s).exp() / 1.0 * s;
        }
        let oracle = acc * hh / 3.0;
        assert!((v - oracle).abs() < 1e-7, "{v} vs {oracle}");
        // closed form: 2 K₀(2)
        assert!((v - 2.0 * 0.113_893_872_749_533_4).abs() < 1e-9);
    }

    #[test]
    fn nesting_order_is_immaterial() {
        let g = |x: f64, s: f64| Ok((-x / s).exp() / s);
        let h = |x: f64, s: f64| Ok(2.0 * x / (s * s) * (-(x / s).powi(2)).exp());
        let ks: [Kernel<'_>; 3] = [&g, &h, &g];
        let right = circ_compose_ordered(&ks, 0.8, 1.5, &spec(), NestOrder::RightNested).unwrap();
        let left = circ_compose_ordered(&ks, 0.8, 1.5, &spec(), NestOrder::LeftNested).unwrap();
        assert!((right - left).abs() < 1e-7, "{right} vs {left}");
    }

    #[test]
    fn composition_limits() {
        let g = |x: f64, s: f64| Ok((-x / s).exp() / s);
        let one: [Kernel<'_>; 1] = [&g];
        assert!(circ_compose(&one, 1.0, 1.0, &spec()).is_err());
        let six: [Kernel<'_>; 6] = [&g, &g, &g, &g, &g, &g];
        assert!(matches!(
            circ_compose(&six, 1.0, 1.0, &spec()),
            Err(Error::DepthExceeded { depth: 5, max: 4 })
        ));
    }

    #[test]
    fn strip_helpers() {
        let s = Strip::new(0.0, 1.0);
        assert_eq!(s.default_abscissa().unwrap(), 0.5);
        assert!(s.check(1.0).is_err());
        assert_eq!(Strip::new(-0.5, f64::INFINITY).default_abscissa().unwrap(), 0.0);
        assert!(matches!(
            Strip::new(1.0, 1.0).default_abscissa(),
            Err(Error::EmptyStrip { .. })
        ));
    }

    #[test]
    fn contour_needs_enough_nodes() {
        assert!(ContourSpec::new(0.5, 1.0, 0.1).is_err());
        assert!(ContourSpec::new(0.5, 10.0, 0.1).is_ok());
    }
}
