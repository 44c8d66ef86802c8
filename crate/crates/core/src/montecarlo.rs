//! Samplers for the stable subordinator, its inverse and subordinated
//! generalized Gamma laws, plus Kolmogorov–Smirnov comparison with analytic
//! distribution functions.
//!
//! Every batch draws from its own ChaCha20 stream: the key comes from the
//! seed, the stream id from the sampler, so batches of different samplers
//! under one seed are independent and each is reproducible on its own.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, Open01};

use crate::error::{Error, Result};
use crate::fracpde::SolutionSpec;
use crate::gengamma;
use crate::quadrature::{self, QuadratureSpec};

/// Draws with the seed and parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    values: Vec<f64>,
    seed: u64,
    params: String,
}

impl SampleBatch {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `key=value;…` description of the sampler.
    pub fn params(&self) -> &str {
        &self.params
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Sample mean.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// One value per line after a `# seed=…;n=…;…` header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut text = format!("# seed={};n={};{}\nvalue\n", self.seed, self.n(), self.params);
        for v in &self.values {
            if !v.is_finite() {
                return Err(Error::Io(format!("refusing to write non-finite sample {v}")));
            }
            writeln!(text, "{v:.16e}").expect("writing to a String");
        }
        out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
    }
}

// stream ids, one per sampler
const STREAM_STABLE: u64 = 1;
const STREAM_INVERSE: u64 = 2;
const STREAM_SUBORDINATED: u64 = 3;
const STREAM_COMPOSE_HL: u64 = 4;
const STREAM_COMPOSE_LH: u64 = 5;
const STREAM_RATIO: u64 = 6;

/// The generator behind a batch: ChaCha20 keyed by `seed`, on stream `stream`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("stability index must lie in (0, 1], got {nu}")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("t must be positive and finite, got {t}")))
    }
}

/// One draw of `τ₁`, with `E e^{−λτ₁} = e^{−λ^ν}` (Kanter):
/// `sin(νU)/sin(U)^{1/ν} · (sin((1−ν)U)/E)^{(1−ν)/ν}`, `U ~ U(0, π)`, `E ~ Exp(1)`.
pub fn draw_stable_unit<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> f64 {
    if nu == 1.0 {
        return 1.0;
    }
    let u: f64 = PI * rng.sample::<f64, _>(Open01);
    let e: f64 = rng.sample(Exp1);
    let a = (nu * u).sin() / u.sin().powf(1.0 / nu);
    a * ((1.0 - nu) * u).sin().powf((1.0 - nu) / nu) * e.powf(-(1.0 - nu) / nu)
}

fn batch<F>(seed: u64, stream: u64, n: usize, params: String, mut draw: F) -> Result<SampleBatch>
where
    F: FnMut(&mut ChaCha20Rng) -> Result<f64>,
{
    let mut rng = rng_for(seed, stream);
    let values = (0..n).map(|_| draw(&mut rng)).collect::<Result<Vec<f64>>>()?;
    Ok(SampleBatch { values, seed, params })
}

/// `n` draws of `τ_t = t^{1/ν} τ₁`.
pub fn sample_stable(nu: f64, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_nu(nu)?;
    check_t(t)?;
    let scale = t.powf(1.0 / nu);
    batch(seed, STREAM_STABLE, n, format!("sampler=stable;nu={nu};t={t}"), |rng| {
        Ok(scale * draw_stable_unit(nu, rng))
    })
}

/// `n` draws of `L_t = (t/τ₁)^ν`, from `Pr{L_t < x} = Pr{τ_x > t}` and self-similarity.
pub fn sample_inverse(nu: f64, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_nu(nu)?;
    check_t(t)?;
    batch(seed, STREAM_INVERSE, n, format!("sampler=inverse;nu={nu};t={t}"), |rng| {
        Ok(if nu == 1.0 { t } else { (t / draw_stable_unit(nu, rng)).powf(nu) })
    })
}

/// `n` draws from `ũ^{γ,μ}_ν(·, t)`: `s ~ l_ν(·, t)`, then a draw of `g^γ_μ(·, s^{1/γ})`.
pub fn sample_subordinated(spec: &SolutionSpec, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let nu = spec.nu();
    let (g, shape) = (spec.gamma(), spec.shape());
    let params = format!("sampler=subordinated;gamma={g};mu={};nu={};t={t}", spec.mu(), spec.index());
    batch(seed, STREAM_SUBORDINATED, n, params, |rng| {
        let s = if nu == 1.0 { t } else { (t / draw_stable_unit(nu, rng)).powf(nu) };
        gengamma::sample_gengamma(shape, s.powf(1.0 / g), rng)
    })
}

/// `n` draws of `τ(L_t)` with independent `τ` and `L`; law `t⁻¹ r(x/t)`.
pub fn sample_compose_hl(nu: f64, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_nu(nu)?;
    check_t(t)?;
    batch(seed, STREAM_COMPOSE_HL, n, format!("sampler=compose_hl;nu={nu};t={t}"), |rng| {
        let l = (t / draw_stable_unit(nu, rng)).powf(nu);
        Ok(l.powf(1.0 / nu) * draw_stable_unit(nu, rng))
    })
}

/// `n` draws of `L(τ_t)` with independent `L` and `τ`; law `t⁻¹ k(x/t)`.
pub fn sample_compose_lh(nu: f64, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_nu(nu)?;
    check_t(t)?;
    batch(seed, STREAM_COMPOSE_LH, n, format!("sampler=compose_lh;nu={nu};t={t}"), |rng| {
        let tau = t.powf(1.0 / nu) * draw_stable_unit(nu, rng);
        Ok((tau / draw_stable_unit(nu, rng)).powf(nu))
    })
}

/// `n` draws of `(τ₁/τ₂)^ν` for independent unit-time variables; law `k`.
pub fn sample_ratio(nu: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_nu(nu)?;
    batch(seed, STREAM_RATIO, n, format!("sampler=ratio;nu={nu}"), |rng| {
        Ok((draw_stable_unit(nu, rng) / draw_stable_unit(nu, rng)).powf(nu))
    })
}

/// `sup_i max(|F(x_(i)) − i/n|, |F(x_(i)) − (i−1)/n|)` over the sorted sample.
///
/// Fails with [`Error::NonMonotoneCdf`] if `cdf` decreases along the sorted sample.
pub fn ks_statistic<F>(values: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if values.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let mut sorted = values.to_vec();
    if sorted.iter().any(|v| v.is_nan()) {
        return Err(Error::NaNDetected { at: f64::NAN });
    }
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut prev = f64::NEG_INFINITY;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        if f.is_nan() {
            return Err(Error::NaNDetected { at: x });
        }
        if f < prev {
            return Err(Error::NonMonotoneCdf { at: x });
        }
        prev = f;
        let i = i as f64;
        d = d.max((f - (i + 1.0) / n).abs()).max((f - i / n).abs());
    }
    Ok(d)
}

/// [`ks_statistic`] of a batch.
pub fn ks_batch<F>(batch: &SampleBatch, cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    ks_statistic(&batch.values, cdf)
}

/// A distribution function tabulated from a density on a log grid.
///
/// `F(lo)` comes from a quadrature on `(0, lo)`; each panel adds a
/// Gauss–Legendre integral of `x f(x)` in `ln x`, and values between nodes use
/// monotone-clamped cubic Hermite interpolation with slopes `x f(x)`.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    ln_x: Vec<f64>,
    cdf: Vec<f64>,
    slope: Vec<f64>,
}

const PANEL_ORDER: usize = 8;

impl TabulatedCdf {
    /// Tabulates `x ↦ ∫₀ˣ density` on `[lo, hi]` with `per_decade` panels per factor of ten.
    pub fn from_density<F>(mut density: F, lo: f64, hi: f64, per_decade: usize) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || per_decade == 0 {
            return Err(Error::domain("tabulated cdf needs 0 < lo < hi and per_decade >= 1"));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let panels = (((b - a) / 10f64.ln()) * per_decade as f64).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let (gx, gw) = quadrature::gauss_legendre(PANEL_ORDER);
        let spec = QuadratureSpec::default().with_rel_tol(1e-10);
        // ∫₀^lo f(x) dx with x = lo e^{−y}, y ∈ (0, ∞)
        let head = quadrature::try_integrate_semi_infinite_scaled(
            |y| {
                let x = lo * (-y).exp();
                if x <= 0.0 {
                    return Ok(0.0);
                }
                Ok(x * density(x)?)
            },
            1.0,
            &spec,
        )?
        .value;
        let mut ln_x = Vec::with_capacity(panels + 1);
        let mut cdf = Vec::with_capacity(panels + 1);
        let mut slope = Vec::with_capacity(panels + 1);
        let mut acc = head;
        for i in 0..=panels {
            let u = if i == panels { b } else { a + h * i as f64 };
            let x = u.exp();
            ln_x.push(u);
            cdf.push(acc);
            slope.push(x * density(x)?);
            if i < panels {
                let mid = u + 0.5 * h;
                let mut s = 0.0;
                for (z, w) in gx.iter().zip(&gw) {
                    let uu = mid + 0.5 * h * z;
                    let xx = uu.exp();
                    s += w * xx * density(xx)?;
                }
                acc += 0.5 * h * s;
            }
        }
        if cdf.iter().chain(&slope).any(|v| !v.is_finite()) {
            return Err(Error::NaNDetected { at: lo });
        }
        Ok(TabulatedCdf { ln_x, cdf, slope })
    }

    /// Tabulated over the range of `values`.
    pub fn for_sample<F>(density: F, values: &[f64], per_decade: usize) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0, f64::max);
        if !(lo > 0.0) {
            return Err(Error::domain("sample must be positive to tabulate its cdf"));
        }
        Self::from_density(density, lo, if hi > lo { hi } else { lo * 1.0001 }, per_decade)
    }

    /// Total mass accumulated up to the top of the table.
    pub fn top(&self) -> f64 {
        *self.cdf.last().expect("nonempty table")
    }

    /// `F(x)`, clamped to the end values outside the table.
    pub fn eval(&self, x: f64) -> f64 {
        let u = x.ln();
        let n = self.ln_x.len();
        if !(u > self.ln_x[0]) {
            return self.cdf[0];
        }
        if u >= self.ln_x[n - 1] {
            return self.cdf[n - 1];
        }
        let i = self.ln_x.partition_point(|&v| v <= u) - 1;
        let h = self.ln_x[i + 1] - self.ln_x[i];
        let s = (u - self.ln_x[i]) / h;
        let (f0, f1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * f0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * f1
            + (s3 - s2) * d1;
        v.clamp(f0.min(f1), f0.max(f1))
    }
}
