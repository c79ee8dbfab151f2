//! Independent checks of the analytic routes: Monte Carlo from physical
//! samplers, the forward Laplace relation between the Q-transform and the
//! CDF, and direct quadrature against closed-form densities.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::Serialize;

use crate::channels::{ChannelSpec, Sampler};
use crate::error::AnalysisError;
use crate::specfun::quad::integrate_adaptive;
use crate::specfun::{bromwich_cdf, gaussian_q, ln_gamma, reg_gamma_p, reg_gamma_q, Estimate};

/// Samples per independent RNG stream.
pub const MC_CHUNK: usize = 65_536;
/// Smallest accepted Monte Carlo sample count.
pub const MC_MIN_SAMPLES: u64 = 1_000;
pub const MC_DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|value − estimate|` in standard errors (infinite if the s.e. is 0
    /// and the values differ).
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (value - self.estimate).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments {
        n: 0.0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + d * b.n / n,
            m2: a.m2 + b.m2 + d * d * a.n * b.n / n,
        }
    }
}

/// Merges in a fixed binary tree over chunk order.
fn merge_tree(parts: &[Moments]) -> Moments {
    match parts {
        [] => Moments::EMPTY,
        [one] => *one,
        _ => {
            let mid = parts.len() / 2;
            Moments::merge(merge_tree(&parts[..mid]), merge_tree(&parts[mid..]))
        }
    }
}

fn chunk_moments<F: Fn(f64) -> f64>(sampler: &Sampler, seed: u64, chunk: usize, len: usize, stat: &F) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let mut m = Moments::EMPTY;
    for _ in 0..len {
        m.push(stat(sampler.sample(&mut rng)));
    }
    m
}

/// Mean and unbiased variance of `stat(γ)` over `n` draws.
///
/// Draws are split into fixed-size chunks, chunk `i` using stream `i` of a
/// ChaCha8 generator keyed by `seed`, so the result does not depend on how
/// many threads run the chunks.
fn sample_moments<F>(sampler: &Sampler, n: u64, seed: u64, stat: F) -> Moments
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = n as usize;
    let chunks = n.div_ceil(MC_CHUNK);
    let len = |i: usize| MC_CHUNK.min(n - i * MC_CHUNK);
    #[cfg(feature = "parallel")]
    let parts: Vec<Moments> = {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|i| chunk_moments(sampler, seed, i, len(i), &stat))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Moments> = (0..chunks)
        .map(|i| chunk_moments(sampler, seed, i, len(i), &stat))
        .collect();
    merge_tree(&parts)
}

fn prepare(spec: &ChannelSpec, n: u64) -> Result<Sampler, AnalysisError> {
    if n < MC_MIN_SAMPLES {
        return Err(AnalysisError::Argument(format!(
            "Monte Carlo needs at least {MC_MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(spec.to_sampler()?.build())
}

/// Sample mean of `stat(γ)` with its standard error.
pub fn mc_statistic<F>(spec: &ChannelSpec, n: u64, seed: u64, stat: F) -> Result<McEstimate, AnalysisError>
where
    F: Fn(f64) -> f64 + Sync,
{
    let sampler = prepare(spec, n)?;
    let m = sample_moments(&sampler, n, seed, stat);
    let var = if m.n > 1.0 { m.m2 / (m.n - 1.0) } else { 0.0 };
    Ok(McEstimate {
        estimate: m.mean,
        std_error: (var / m.n).sqrt(),
        n,
        seed,
    })
}

/// Monte Carlo estimate of `E[Q(√(pγ))]`.
pub fn mc_q_transform(spec: &ChannelSpec, p: f64, n: u64, seed: u64) -> Result<McEstimate, AnalysisError> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(AnalysisError::Argument(format!("p = {p} must be finite and nonnegative")));
    }
    if p == 0.0 {
        prepare(spec, n)?;
        return Ok(McEstimate {
            estimate: 0.5,
            std_error: 0.0,
            n,
            seed,
        });
    }
    mc_statistic(spec, n, seed, |g| gaussian_q((p * g).sqrt()))
}

/// Empirical `P(γ ≤ gamma_th)` with the binomial standard error.
pub fn mc_outage(spec: &ChannelSpec, gamma_th: f64, n: u64, seed: u64) -> Result<McEstimate, AnalysisError> {
    if !(gamma_th > 0.0) || gamma_th.is_nan() {
        return Err(AnalysisError::Argument(format!("threshold {gamma_th} must be positive")));
    }
    let sampler = prepare(spec, n)?;
    let m = sample_moments(&sampler, n, seed, |g| if g <= gamma_th { 1.0 } else { 0.0 });
    let frac = m.mean.clamp(0.0, 1.0);
    Ok(McEstimate {
        estimate: frac,
        std_error: (frac * (1.0 - frac) / m.n).sqrt(),
        n,
        seed,
    })
}

/// Empirical MGF `E[e^{sγ}]` for real `s ≤ 0`.
pub fn mc_mgf(spec: &ChannelSpec, s: f64, n: u64, seed: u64) -> Result<McEstimate, AnalysisError> {
    if !(s <= 0.0) {
        return Err(AnalysisError::Argument(format!("s = {s} must be nonpositive")));
    }
    mc_statistic(spec, n, seed, |g| (s * g).exp())
}

/// CDF used by [`laplace_forward_q`]: closed form for Rayleigh and
/// Nakagami-m, numerical inversion of the MGF otherwise.
fn cdf_for(spec: &ChannelSpec, tol: f64) -> Result<Box<dyn Fn(f64) -> Result<Estimate, AnalysisError> + '_>, AnalysisError> {
    let mgf = spec.to_mgf()?;
    Ok(match spec {
        ChannelSpec::Rayleigh { snr } => {
            let g = snr.value();
            Box::new(move |t| Ok(Estimate::exact(-(-t / g).exp_m1())))
        }
        ChannelSpec::NakagamiM { m, snr } => {
            let (m, g) = (*m, snr.value());
            Box::new(move |t| Ok(Estimate::exact(reg_gamma_p(m, m * t / g))))
        }
        _ => Box::new(move |t| Ok(bromwich_cdf(&mgf, t, tol)?)),
    })
}

/// Q-transform from the CDF:
/// `(√p / (2√(2π))) ∫₀^∞ e^{−pt/2} F(t) t^{−1/2} dt`, integrated in `x = √t`.
pub fn laplace_forward_q(spec: &ChannelSpec, p: f64, tol: f64) -> Result<Estimate, AnalysisError> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(AnalysisError::Argument(format!("p = {p} must be positive and finite")));
    }
    if !(tol > 0.0) {
        return Err(AnalysisError::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let cdf = cdf_for(spec, tol)?;
    // e^{−p x²/2} < tol·10⁻³ beyond the cut
    let cut = (2.0 * (1e3 / tol).ln() / p).sqrt();
    let norm = (p / (2.0 * PI)).sqrt();
    let failure = std::cell::RefCell::new(None);
    let warnings = std::cell::RefCell::new(Vec::new());
    let integrand = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match cdf(x * x) {
            Ok(f) => {
                if !f.converged() {
                    warnings.borrow_mut().extend(f.warnings);
                }
                norm * (-0.5 * p * x * x).exp() * f.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let mut est = integrate_adaptive(integrand, 0.0, cut, 0.1 * tol, 0.0, 2000);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut w = warnings.into_inner();
    w.dedup();
    w.truncate(3);
    est.warnings.extend(w);
    est.abs_error += tol * 1e-3;
    Ok(est)
}

/// `∫ Q(√(pγ)) f(γ) dγ` against the closed-form density (Rayleigh and
/// Nakagami-m only), integrated in `x = √γ`.
pub fn pdf_quadrature_q(spec: &ChannelSpec, p: f64, tol: f64) -> Result<Estimate, AnalysisError> {
    let (m, g) = match spec {
        ChannelSpec::Rayleigh { snr } => (1.0, snr.value()),
        ChannelSpec::NakagamiM { m, snr } => (*m, snr.value()),
        other => {
            return Err(AnalysisError::Argument(format!(
                "no closed-form density for kind {}",
                other.kind()
            )))
        }
    };
    spec.to_mgf()?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(AnalysisError::Argument(format!("p = {p} must be positive and finite")));
    }
    if !(tol > 0.0) {
        return Err(AnalysisError::Argument(format!("tolerance must be positive, got {tol}")));
    }
    // f(x²)·2x = 2 (m/γ̄)^m x^{2m−1} e^{−m x²/γ̄} / Γ(m)
    let ln_c = 2f64.ln() + m * (m / g).ln() - ln_gamma(m);
    let integrand = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln_f = ln_c + (2.0 * m - 1.0) * x.ln() - m * x * x / g;
        gaussian_q(p.sqrt() * x) * ln_f.exp()
    };
    // tail mass beyond the cut is below tol·10⁻³
    let mut cut = g.sqrt();
    while reg_gamma_q(m, m * cut * cut / g) > tol * 1e-3 {
        cut *= 1.5;
    }
    let mut est = integrate_adaptive(integrand, 0.0, cut, 0.1 * tol, 0.0, 2000);
    est.abs_error += tol * 1e-3;
    Ok(est)
}
