//! Channel registry: physical fading models mapped to characteristic
//! coefficients, plus sampler recipes for Monte Carlo cross-checks.
//!
//! Specs are plain JSON, e.g. `{"kind":"nakagami_m","m":2.5,"avg_snr_db":10}`
//! or nested `{"kind":"mrc","branches":[...]}`. Every physical kind takes its
//! mean SNR either in dB (`avg_snr_db`) or linear (`avg_snr`), never both.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;
use crate::mgf::{MonomialFactor, PosynomialMgf, WEIGHT_SUM_TOL};

/// Mean SNR `γ̄`, stored linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSnr", into = "RawSnr")]
pub struct MeanSnr(f64);

impl MeanSnr {
    pub fn linear(v: f64) -> Self {
        Self(v)
    }

    pub fn db(v: f64) -> Self {
        Self(db_to_linear(v))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Clone, Serialize, Deserialize)]
struct RawSnr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    avg_snr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    avg_snr_db: Option<f64>,
}

impl TryFrom<RawSnr> for MeanSnr {
    type Error = String;

    fn try_from(raw: RawSnr) -> Result<Self, Self::Error> {
        match (raw.avg_snr, raw.avg_snr_db) {
            (Some(v), None) => Ok(MeanSnr::linear(v)),
            (None, Some(db)) => Ok(MeanSnr::db(db)),
            (Some(_), Some(_)) => Err("give either avg_snr or avg_snr_db, not both".into()),
            (None, None) => Err("missing avg_snr or avg_snr_db".into()),
        }
    }
}

impl From<MeanSnr> for RawSnr {
    fn from(s: MeanSnr) -> Self {
        RawSnr {
            avg_snr: Some(s.0),
            avg_snr_db: None,
        }
    }
}

/// Parametric description of a fading channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    Rayleigh {
        #[serde(flatten)]
        snr: MeanSnr,
    },
    /// Nakagami-q.
    Hoyt {
        q: f64,
        #[serde(flatten)]
        snr: MeanSnr,
    },
    NakagamiM {
        m: f64,
        #[serde(flatten)]
        snr: MeanSnr,
    },
    RicianShadowed {
        #[serde(alias = "K")]
        k: f64,
        m: f64,
        #[serde(flatten)]
        snr: MeanSnr,
    },
    /// η-μ physical model with `μ = n/2`.
    EtaMu {
        format: u8,
        eta: f64,
        n: f64,
        #[serde(flatten)]
        snr: MeanSnr,
    },
    /// Maximal ratio combining of independent branches.
    Mrc { branches: Vec<ChannelSpec> },
    /// Random scenario: `scenarios[l]` with probability `probs[l]`.
    Mixture {
        probs: Vec<f64>,
        scenarios: Vec<ChannelSpec>,
    },
    /// OSTBC over shadowed Rician MIMO with spatially white scattering.
    OstbcShadowedRician {
        n_t: u32,
        n_r: u32,
        a: f64,
        b: f64,
        m: f64,
    },
    /// Raw characteristic coefficients with no physical model behind them.
    Posynomial {
        #[serde(flatten)]
        mgf: PosynomialMgf,
    },
}

fn violated(kind: &'static str, constraint: &'static str, detail: String) -> ChannelError {
    ChannelError::Constraint {
        kind,
        constraint,
        detail,
    }
}

fn check_snr(kind: &'static str, snr: &MeanSnr) -> Result<f64, ChannelError> {
    let v = snr.value();
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(violated(kind, "0 < γ̄", format!("γ̄ = {v}")))
    }
}

/// `(h, H)` of the η-μ model for the given format.
fn eta_mu_hh(format: u8, eta: f64) -> Result<(f64, f64), ChannelError> {
    match format {
        1 => {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(violated("eta_mu", "format 1: 0 < η < ∞", format!("η = {eta}")));
            }
            Ok(((2.0 + 1.0 / eta + eta) / 4.0, (1.0 / eta - eta) / 4.0))
        }
        2 => {
            if !(eta > -1.0 && eta < 1.0) {
                return Err(violated("eta_mu", "format 2: −1 < η < 1", format!("η = {eta}")));
            }
            let d = 1.0 - eta * eta;
            Ok((1.0 / d, eta / d))
        }
        other => Err(violated("eta_mu", "format ∈ {1, 2}", format!("format = {other}"))),
    }
}

impl ChannelSpec {
    pub fn rayleigh(avg_snr: f64) -> Self {
        ChannelSpec::Rayleigh {
            snr: MeanSnr::linear(avg_snr),
        }
    }

    pub fn hoyt(q: f64, avg_snr: f64) -> Self {
        ChannelSpec::Hoyt {
            q,
            snr: MeanSnr::linear(avg_snr),
        }
    }

    pub fn nakagami(m: f64, avg_snr: f64) -> Self {
        ChannelSpec::NakagamiM {
            m,
            snr: MeanSnr::linear(avg_snr),
        }
    }

    pub fn rician_shadowed(k: f64, m: f64, avg_snr: f64) -> Self {
        ChannelSpec::RicianShadowed {
            k,
            m,
            snr: MeanSnr::linear(avg_snr),
        }
    }

    pub fn eta_mu(format: u8, eta: f64, n: u32, avg_snr: f64) -> Self {
        ChannelSpec::EtaMu {
            format,
            eta,
            n: n as f64,
            snr: MeanSnr::linear(avg_snr),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ChannelSpec::Rayleigh { .. } => "rayleigh",
            ChannelSpec::Hoyt { .. } => "hoyt",
            ChannelSpec::NakagamiM { .. } => "nakagami_m",
            ChannelSpec::RicianShadowed { .. } => "rician_shadowed",
            ChannelSpec::EtaMu { .. } => "eta_mu",
            ChannelSpec::Mrc { .. } => "mrc",
            ChannelSpec::Mixture { .. } => "mixture",
            ChannelSpec::OstbcShadowedRician { .. } => "ostbc_shadowed_rician",
            ChannelSpec::Posynomial { .. } => "posynomial",
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Characteristic coefficients of the channel's SNR.
    ///
    /// Single-channel kinds return the factors exactly as tabulated (call
    /// [`PosynomialMgf::simplify`] for the canonical form); the OSTBC builder
    /// returns its simplified form.
    pub fn to_mgf(&self) -> Result<PosynomialMgf, ChannelError> {
        let mgf = match self {
            ChannelSpec::Rayleigh { snr } => {
                let g = check_snr("rayleigh", snr)?;
                PosynomialMgf::monomial(vec![MonomialFactor::real(1.0 / g, 1.0)])?
            }
            ChannelSpec::Hoyt { q, snr } => {
                let g = check_snr("hoyt", snr)?;
                if !(*q > 0.0 && *q <= 1.0) {
                    return Err(violated("hoyt", "0 < q ≤ 1", format!("q = {q}")));
                }
                let q2 = q * q;
                PosynomialMgf::monomial(vec![
                    MonomialFactor::real((1.0 + q2) / (2.0 * q2 * g), 0.5),
                    MonomialFactor::real((1.0 + q2) / (2.0 * g), 0.5),
                ])?
            }
            ChannelSpec::NakagamiM { m, snr } => {
                let g = check_snr("nakagami_m", snr)?;
                if !(*m >= 0.5 && m.is_finite()) {
                    return Err(violated("nakagami_m", "½ ≤ m", format!("m = {m}")));
                }
                PosynomialMgf::monomial(vec![MonomialFactor::real(m / g, *m)])?
            }
            ChannelSpec::RicianShadowed { k, m, snr } => {
                let g = check_snr("rician_shadowed", snr)?;
                if !(*k >= 0.0 && k.is_finite()) {
                    return Err(violated("rician_shadowed", "0 ≤ K", format!("K = {k}")));
                }
                if !(*m > 0.0 && m.is_finite()) {
                    return Err(violated("rician_shadowed", "0 < m", format!("m = {m}")));
                }
                PosynomialMgf::monomial(vec![
                    MonomialFactor::real((1.0 + k) / g, 1.0 - m),
                    MonomialFactor::real((1.0 + k) / ((1.0 + k / m) * g), *m),
                ])?
            }
            ChannelSpec::EtaMu { format, eta, n, snr } => {
                let g = check_snr("eta_mu", snr)?;
                if !(*n >= 1.0 && n.fract() == 0.0) {
                    return Err(violated("eta_mu", "n = 1, 2, …", format!("n = {n}")));
                }
                let (h, big_h) = eta_mu_hh(*format, *eta)?;
                PosynomialMgf::monomial(vec![
                    MonomialFactor::real(n * (h + big_h) / g, n / 2.0),
                    MonomialFactor::real(n * (h - big_h) / g, n / 2.0),
                ])?
            }
            ChannelSpec::Mrc { branches } => {
                if branches.is_empty() {
                    return Err(violated("mrc", "nonempty branch list", "no branches".into()));
                }
                let mut acc: Option<PosynomialMgf> = None;
                for branch in branches {
                    if matches!(branch, ChannelSpec::Mrc { .. }) {
                        return Err(violated("mrc", "branches are not mrc", "nested mrc".into()));
                    }
                    let m = branch.to_mgf()?;
                    acc = Some(match acc {
                        None => m,
                        Some(a) => a.product(&m),
                    });
                }
                acc.expect("nonempty")
            }
            ChannelSpec::Mixture { probs, scenarios } => {
                check_mixture(probs, scenarios)?;
                let comps = scenarios
                    .iter()
                    .map(ChannelSpec::to_mgf)
                    .collect::<Result<Vec<_>, _>>()?;
                PosynomialMgf::mixture(probs, &comps)?
            }
            ChannelSpec::OstbcShadowedRician { n_t, n_r, a, b, m } => {
                check_ostbc(*n_t, *n_r, *a, *b, *m)?;
                let n = (n_t * n_r) as f64;
                PosynomialMgf::monomial(vec![
                    MonomialFactor::real(1.0 / a, n),
                    MonomialFactor::real(1.0 / (a + b), m * n),
                    MonomialFactor::real(1.0 / a, -m * n),
                ])?
                .simplify()
            }
            ChannelSpec::Posynomial { mgf } => {
                let report = mgf.validate();
                if !report.ok() {
                    return Err(violated("posynomial", "compatibility conditions", report.to_string()));
                }
                mgf.clone()
            }
        };
        Ok(mgf)
    }

    /// Physical sampling recipe for Monte Carlo.
    pub fn to_sampler(&self) -> Result<SamplerRecipe, ChannelError> {
        // the coefficient builder performs all range checks
        self.to_mgf()?;
        let recipe = match self {
            ChannelSpec::Rayleigh { snr } => SamplerRecipe::Exponential { mean: snr.value() },
            ChannelSpec::Hoyt { q, snr } => SamplerRecipe::Hoyt {
                sigma_x: *q,
                sigma_y: 1.0,
                scale: snr.value() / (1.0 + q * q),
            },
            ChannelSpec::NakagamiM { m, snr } => SamplerRecipe::Gamma {
                shape: *m,
                scale: snr.value() / m,
            },
            ChannelSpec::RicianShadowed { k, m, snr } => rician_shadowed_recipe(*k, *m, snr.value()),
            ChannelSpec::EtaMu { format, eta, n, snr } => {
                let (h, big_h) = eta_mu_hh(*format, *eta)?;
                let g = snr.value();
                SamplerRecipe::Sum(vec![
                    SamplerRecipe::Gamma {
                        shape: n / 2.0,
                        scale: g / (n * (h + big_h)),
                    },
                    SamplerRecipe::Gamma {
                        shape: n / 2.0,
                        scale: g / (n * (h - big_h)),
                    },
                ])
            }
            ChannelSpec::Mrc { branches } => SamplerRecipe::Sum(
                branches
                    .iter()
                    .map(ChannelSpec::to_sampler)
                    .collect::<Result<_, _>>()?,
            ),
            ChannelSpec::Mixture { probs, scenarios } => SamplerRecipe::Mixture {
                probs: probs.clone(),
                components: scenarios
                    .iter()
                    .map(ChannelSpec::to_sampler)
                    .collect::<Result<_, _>>()?,
            },
            ChannelSpec::OstbcShadowedRician { n_t, n_r, a, b, m } => {
                // each of the n_t n_r white-scatter paths is shadowed Rician with
                // K = m b / a and mean a + m b
                let branch = rician_shadowed_recipe(m * b / a, *m, a + m * b);
                SamplerRecipe::Sum(vec![branch; (n_t * n_r) as usize])
            }
            ChannelSpec::Posynomial { .. } => return Err(ChannelError::UnsupportedSampler("posynomial")),
        };
        Ok(recipe)
    }
}

fn check_mixture(probs: &[f64], scenarios: &[ChannelSpec]) -> Result<(), ChannelError> {
    if probs.is_empty() || probs.len() != scenarios.len() {
        return Err(violated(
            "mixture",
            "one probability per scenario",
            format!("{} probabilities, {} scenarios", probs.len(), scenarios.len()),
        ));
    }
    if let Some(p) = probs.iter().find(|p| !(**p >= 0.0)) {
        return Err(violated("mixture", "probabilities ≥ 0", format!("Pr = {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(violated("mixture", "Σ Pr = 1", format!("Σ Pr = {total}")));
    }
    Ok(())
}

fn check_ostbc(n_t: u32, n_r: u32, a: f64, b: f64, m: f64) -> Result<(), ChannelError> {
    const KIND: &str = "ostbc_shadowed_rician";
    if n_t == 0 || n_r == 0 {
        return Err(violated(KIND, "n_t, n_r ≥ 1", format!("n_t = {n_t}, n_r = {n_r}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(violated(KIND, "0 < a", format!("a = {a}")));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(violated(KIND, "0 ≤ b", format!("b = {b}")));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(violated(KIND, "0 < m", format!("m = {m}")));
    }
    Ok(())
}

/// `γ = γ̄ |ξ + w|² / (Ω + 2b₀)` with `2b₀ = 1`, `Ω = K`.
fn rician_shadowed_recipe(k: f64, m: f64, avg: f64) -> SamplerRecipe {
    SamplerRecipe::RicianShadowed {
        m,
        omega: k,
        two_b0: 1.0,
        scale: avg / (k + 1.0),
    }
}

/// How to draw one SNR sample for a channel. Scale constants are analytic,
/// so the sample mean converges to `γ̄` exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerRecipe {
    Exponential {
        mean: f64,
    },
    Gamma {
        shape: f64,
        scale: f64,
    },
    /// `scale · (X² + Y²)`, `X ~ N(0, σx²)`, `Y ~ N(0, σy²)`.
    Hoyt {
        sigma_x: f64,
        sigma_y: f64,
        scale: f64,
    },
    /// `scale · |ξ + w|²`: `ξ` Nakagami-m amplitude with `E[ξ²] = Ω`,
    /// `w` circular complex Gaussian with `E|w|² = 2b₀`.
    RicianShadowed {
        m: f64,
        omega: f64,
        two_b0: f64,
        scale: f64,
    },
    Sum(Vec<SamplerRecipe>),
    Mixture {
        probs: Vec<f64>,
        components: Vec<SamplerRecipe>,
    },
}

impl SamplerRecipe {
    pub fn mean(&self) -> f64 {
        match self {
            SamplerRecipe::Exponential { mean } => *mean,
            SamplerRecipe::Gamma { shape, scale } => shape * scale,
            SamplerRecipe::Hoyt {
                sigma_x,
                sigma_y,
                scale,
            } => scale * (sigma_x * sigma_x + sigma_y * sigma_y),
            SamplerRecipe::RicianShadowed {
                omega,
                two_b0,
                scale,
                ..
            } => scale * (omega + two_b0),
            SamplerRecipe::Sum(parts) => parts.iter().map(SamplerRecipe::mean).sum(),
            SamplerRecipe::Mixture { probs, components } => probs
                .iter()
                .zip(components)
                .map(|(p, c)| p * c.mean())
                .sum(),
        }
    }

    /// Prepares the distribution objects for repeated draws.
    pub fn build(&self) -> Sampler {
        let node = match self {
            SamplerRecipe::Exponential { mean } => Node::Gamma(gamma_dist(1.0, *mean)),
            SamplerRecipe::Gamma { shape, scale } => Node::Gamma(gamma_dist(*shape, *scale)),
            SamplerRecipe::Hoyt {
                sigma_x,
                sigma_y,
                scale,
            } => Node::Hoyt {
                sigma_x: *sigma_x,
                sigma_y: *sigma_y,
                scale: *scale,
            },
            SamplerRecipe::RicianShadowed {
                m,
                omega,
                two_b0,
                scale,
            } => Node::RicianShadowed {
                los_power: (*omega > 0.0).then(|| gamma_dist(*m, omega / m)),
                sigma: (0.5 * two_b0).sqrt(),
                scale: *scale,
            },
            SamplerRecipe::Sum(parts) => Node::Sum(parts.iter().map(|p| p.build()).collect()),
            SamplerRecipe::Mixture { probs, components } => {
                let mut cumulative = Vec::with_capacity(probs.len());
                let mut acc = 0.0;
                for p in probs {
                    acc += p;
                    cumulative.push(acc);
                }
                Node::Mixture {
                    cumulative,
                    components: components.iter().map(|c| c.build()).collect(),
                }
            }
        };
        Sampler { node }
    }
}

fn gamma_dist(shape: f64, scale: f64) -> Gamma<f64> {
    Gamma::new(shape, scale).expect("shape and scale checked by the channel builder")
}

/// Ready-to-draw sampler; see [`SamplerRecipe::build`].
#[derive(Debug, Clone)]
pub struct Sampler {
    node: Node,
}

#[derive(Debug, Clone)]
enum Node {
    Gamma(Gamma<f64>),
    Hoyt {
        sigma_x: f64,
        sigma_y: f64,
        scale: f64,
    },
    RicianShadowed {
        los_power: Option<Gamma<f64>>,
        sigma: f64,
        scale: f64,
    },
    Sum(Vec<Sampler>),
    Mixture {
        cumulative: Vec<f64>,
        components: Vec<Sampler>,
    },
}

impl Distribution<f64> for Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.node {
            Node::Gamma(g) => g.sample(rng),
            Node::Hoyt {
                sigma_x,
                sigma_y,
                scale,
            } => {
                let x: f64 = rng.sample::<f64, _>(StandardNormal) * sigma_x;
                let y: f64 = rng.sample::<f64, _>(StandardNormal) * sigma_y;
                scale * (x * x + y * y)
            }
            Node::RicianShadowed {
                los_power,
                sigma,
                scale,
            } => {
                let los = los_power.as_ref().map_or(0.0, |g| g.sample(rng).sqrt());
                let re = los + sigma * rng.sample::<f64, _>(StandardNormal);
                let im = sigma * rng.sample::<f64, _>(StandardNormal);
                scale * (re * re + im * im)
            }
            Node::Sum(parts) => parts.iter().map(|p| p.sample(rng)).sum(),
            Node::Mixture {
                cumulative,
                components,
            } => {
                let u: f64 = rng.random();
                let idx = cumulative
                    .iter()
                    .position(|c| u < *c)
                    .unwrap_or(components.len() - 1);
                components[idx].sample(rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn simplified(spec: &ChannelSpec) -> PosynomialMgf {
        spec.to_mgf().unwrap().simplify()
    }

    #[test]
    fn table_coefficients() {
        let r = ChannelSpec::rayleigh(2.0).to_mgf().unwrap();
        assert_eq!(r.terms()[0].factors, vec![MonomialFactor::real(0.5, 1.0)]);

        let h = ChannelSpec::hoyt(0.5, 1.0).to_mgf().unwrap();
        assert_eq!(
            h.terms()[0].factors,
            vec![MonomialFactor::real(2.5, 0.5), MonomialFactor::real(0.625, 0.5)]
        );

        let n = ChannelSpec::nakagami(2.5, 5.0).to_mgf().unwrap();
        assert_eq!(n.terms()[0].factors, vec![MonomialFactor::real(0.5, 2.5)]);

        let rs = ChannelSpec::rician_shadowed(3.0, 2.0, 2.0).to_mgf().unwrap();
        assert_eq!(
            rs.terms()[0].factors,
            vec![MonomialFactor::real(2.0, -1.0), MonomialFactor::real(0.8, 2.0)]
        );
    }

    #[test]
    fn degenerate_parameters_collapse_to_rayleigh() {
        let rayleigh = simplified(&ChannelSpec::rayleigh(1.0));
        assert_eq!(simplified(&ChannelSpec::hoyt(1.0, 1.0)), rayleigh);
        for m in [0.3, 1.0, 4.0] {
            assert_eq!(simplified(&ChannelSpec::rician_shadowed(0.0, m, 1.0)), rayleigh);
        }
        assert_eq!(simplified(&ChannelSpec::nakagami(1.0, 1.0)), rayleigh);
    }

    #[test]
    fn eta_mu_unit_eta_is_nakagami() {
        for n in 1..=4 {
            let avg = 3.0;
            let em = simplified(&ChannelSpec::eta_mu(1, 1.0, n, avg));
            let nak = simplified(&ChannelSpec::nakagami(n as f64, avg));
            assert_eq!(em, nak);
        }
        // format 2 with η = 0 is the same point
        assert_eq!(
            simplified(&ChannelSpec::eta_mu(2, 0.0, 2, 1.0)),
            simplified(&ChannelSpec::nakagami(2.0, 1.0))
        );
    }

    #[test]
    fn mrc_of_rayleigh_is_nakagami() {
        let spec = ChannelSpec::Mrc {
            branches: vec![ChannelSpec::rayleigh(1.0), ChannelSpec::rayleigh(1.0)],
        };
        assert_eq!(simplified(&spec), simplified(&ChannelSpec::nakagami(2.0, 2.0)));
    }

    #[test]
    fn exponent_sums_per_kind() {
        let sum = |s: &ChannelSpec| s.to_mgf().unwrap().terms()[0].exponent_sum();
        assert_eq!(sum(&ChannelSpec::rayleigh(3.0)), 1.0);
        assert_eq!(sum(&ChannelSpec::hoyt(0.2, 3.0)), 1.0);
        assert!((sum(&ChannelSpec::rician_shadowed(4.0, 2.7, 1.0)) - 1.0).abs() < 1e-15);
        assert_eq!(sum(&ChannelSpec::nakagami(3.3, 1.0)), 3.3);
        assert_eq!(sum(&ChannelSpec::eta_mu(2, 0.4, 3, 1.0)), 3.0);
    }

    #[test]
    fn every_admissible_spec_validates() {
        let mut specs = Vec::new();
        for g in [0.1, 1.0, 10.0] {
            specs.push(ChannelSpec::rayleigh(g));
            for q in [0.05, 0.5, 1.0] {
                specs.push(ChannelSpec::hoyt(q, g));
            }
            for m in [0.5, 1.7, 6.0] {
                specs.push(ChannelSpec::nakagami(m, g));
                for k in [0.0, 2.0, 15.0] {
                    specs.push(ChannelSpec::rician_shadowed(k, m, g));
                }
            }
            for n in [1, 2, 5] {
                for eta in [0.1, 1.0, 7.0] {
                    specs.push(ChannelSpec::eta_mu(1, eta, n, g));
                }
                for eta in [-0.9, 0.0, 0.6] {
                    specs.push(ChannelSpec::eta_mu(2, eta, n, g));
                }
            }
        }
        for spec in specs {
            let m = spec.to_mgf().unwrap();
            assert!(m.validate().ok(), "{spec:?}");
            // mean SNR from the coefficients: M'(0) = Σ b/a
            let mean: f64 = m.terms()[0].factors.iter().map(|f| f.b / f.a.re).sum();
            let expected = spec.to_sampler().unwrap().mean();
            assert!((mean - expected).abs() < 1e-12 * expected, "{spec:?}");
        }
    }

    #[test]
    fn constraint_violations_name_the_range() {
        let err = ChannelSpec::hoyt(1.5, 1.0).to_mgf().unwrap_err();
        assert!(err.to_string().contains("0 < q ≤ 1"), "{err}");
        let err = ChannelSpec::nakagami(0.4, 1.0).to_mgf().unwrap_err();
        assert!(err.to_string().contains("½ ≤ m"));
        let err = ChannelSpec::rician_shadowed(-1.0, 1.0, 1.0).to_mgf().unwrap_err();
        assert!(err.to_string().contains("0 ≤ K"));
        let err = ChannelSpec::eta_mu(2, 1.0, 1, 1.0).to_mgf().unwrap_err();
        assert!(err.to_string().contains("−1 < η < 1"));
        let err = ChannelSpec::EtaMu {
            format: 1,
            eta: 1.0,
            n: 1.5,
            snr: MeanSnr::linear(1.0),
        }
        .to_mgf()
        .unwrap_err();
        assert!(err.to_string().contains("n = 1, 2, …"));
        let err = ChannelSpec::Mixture {
            probs: vec![0.5, 0.6],
            scenarios: vec![ChannelSpec::rayleigh(1.0), ChannelSpec::rayleigh(1.0)],
        }
        .to_mgf()
        .unwrap_err();
        assert!(err.to_string().contains("Σ Pr = 1"));
        let nested = ChannelSpec::Mrc {
            branches: vec![ChannelSpec::Mrc {
                branches: vec![ChannelSpec::rayleigh(1.0)],
            }],
        };
        assert!(nested.to_mgf().is_err());
    }

    #[test]
    fn json_round_trip_and_snr_forms() {
        let spec = ChannelSpec::from_json(r#"{"kind":"nakagami_m","m":2.5,"avg_snr_db":10.0}"#).unwrap();
        match &spec {
            ChannelSpec::NakagamiM { m, snr } => {
                assert_eq!(*m, 2.5);
                assert!((snr.value() - 10.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let nested = r#"{"kind":"mixture","probs":[0.4,0.6],"scenarios":[
            {"kind":"mrc","branches":[{"kind":"hoyt","q":0.5,"avg_snr":1},{"kind":"nakagami_m","m":2,"avg_snr":2}]},
            {"kind":"rician_shadowed","K":3,"m":2,"avg_snr":1}]}"#;
        let spec = ChannelSpec::from_json(nested).unwrap();
        let again = ChannelSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
        assert!(ChannelSpec::from_json(r#"{"kind":"rayleigh"}"#).is_err());
        assert!(ChannelSpec::from_json(r#"{"kind":"rayleigh","avg_snr":1,"avg_snr_db":0}"#).is_err());
        let raw = ChannelSpec::from_json(
            r#"{"kind":"posynomial","terms":[{"c":1,"factors":[{"a_re":2,"a_im":0,"b":2}]}]}"#,
        )
        .unwrap();
        assert_eq!(raw.to_mgf().unwrap(), ChannelSpec::nakagami(2.0, 1.0).to_mgf().unwrap());
        assert!(matches!(raw.to_sampler(), Err(ChannelError::UnsupportedSampler(_))));
    }

    #[test]
    fn ostbc_builder() {
        let spec = ChannelSpec::OstbcShadowedRician {
            n_t: 2,
            n_r: 2,
            a: 0.5,
            b: 0.8,
            m: 1.5,
        };
        let m = spec.to_mgf().unwrap();
        assert!(m.validate().ok());
        assert_eq!(m.terms()[0].factors.len(), 2);
        assert!((m.terms()[0].exponent_sum() - 4.0).abs() < 1e-12);
        // compare with the unsimplified three-group product at a test point
        let s = -0.3f64;
        let direct = (1.0 + 0.5 * -s).powf(-4.0) * (1.0 + 1.3 * -s).powf(-6.0) * (1.0 + 0.5 * -s).powf(6.0);
        assert!((m.eval_real(s).unwrap() - direct).abs() < 1e-12);
        // m = 1 removes the shared pole entirely
        let unit = ChannelSpec::OstbcShadowedRician {
            n_t: 1,
            n_r: 3,
            a: 0.5,
            b: 0.8,
            m: 1.0,
        };
        assert_eq!(unit.to_mgf().unwrap().terms()[0].factors, vec![MonomialFactor::real(1.0 / 1.3, 3.0)]);
    }

    #[test]
    fn sampler_mean_rayleigh() {
        let sampler = ChannelSpec::rayleigh(2.0).to_sampler().unwrap().build();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| sampler.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() < 4.0 * 2.0 / 1e3, "{mean}");
    }

    #[test]
    fn sampler_is_seed_deterministic() {
        let sampler = ChannelSpec::rician_shadowed(5.0, 2.0, 1.0).to_sampler().unwrap().build();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| sampler.sample(&mut rng)).collect::<Vec<f64>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }
}
