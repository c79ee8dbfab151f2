//! Error-probability and outage analysis of posynomial SNRs.
//!
//! Per term `k` with exponent sum `B = Σb`:
//!
//! * Q-transform: `c_k P_k F_D(½+B; b; 1+B; −2a/p)`, with
//!   `P_k = ∏a^b Γ(½+B) / (2√π Γ(1+B)) · (2/p)^B`;
//! * CDF: `c_k ∏a^b γ^B / Γ(1+B) · Φ₂(b; 1+B; −aγ)`;
//! * high-SNR form: `c_k ∏(2a)^b Γ(½+B) / (2√π Γ(1+B)) · p^{−B}`.
//!
//! Every prefactor is assembled as a sum of logarithms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::mgf::{MonomialTerm, PosynomialMgf};
use crate::specfun::{
    bromwich_cdf, lauricella_fd, ln_gamma, ln_gamma_ratio, phi2_series, QuadratureConfig, SeriesConfig,
    DEFAULT_INVERSION_TOL, PHI2_SERIES_WINDOW,
};

/// Numerical route that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    EulerIntegral,
    LaplaceInversion,
    Series,
    ClosedForm,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::EulerIntegral => "euler-integral",
            Method::LaplaceInversion => "laplace-inversion",
            Method::Series => "series",
            Method::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
    pub warnings: Vec<String>,
}

impl EvalResult {
    fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error: 0.0,
            method: Method::ClosedForm,
            warnings: Vec::new(),
        }
    }
}

/// Magnitudes below this are treated as round-off when a probability
/// comes out slightly outside its range.
const ROUNDOFF_SLACK: f64 = 1e-12;

fn clamp_probability(mut r: EvalResult, hi: f64, what: &str) -> EvalResult {
    let slack = ROUNDOFF_SLACK.max(2.0 * r.abs_error);
    if r.value < 0.0 {
        if r.value < -slack {
            r.warnings
                .push(format!("{what} came out negative ({:e}) beyond its error estimate", r.value));
        } else {
            r.warnings.push(format!("{what}: clamped round-off {:e} to 0", r.value));
        }
        r.value = 0.0;
    } else if r.value > hi {
        if r.value > hi + slack {
            r.warnings.push(format!("{what} exceeded {hi} ({})", r.value));
        }
        r.value = hi;
    }
    r
}

fn nonzero_terms(mgf: &PosynomialMgf) -> impl Iterator<Item = &MonomialTerm> {
    mgf.terms().iter().filter(|t| t.c != 0.0)
}

/// `E[Q(√(pγ))]` with the default quadrature settings.
pub fn q_transform(mgf: &PosynomialMgf, p: f64) -> Result<EvalResult, AnalysisError> {
    q_transform_with(mgf, p, &QuadratureConfig::default())
}

pub fn q_transform_with(
    mgf: &PosynomialMgf,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<EvalResult, AnalysisError> {
    mgf.ensure_valid()?;
    if !(p >= 0.0) || !p.is_finite() {
        return Err(AnalysisError::Argument(format!("p = {p} must be finite and nonnegative")));
    }
    if p == 0.0 {
        return Ok(EvalResult::exact(0.5));
    }
    let ln_norm = -(2.0f64.ln()) - 0.5 * PI.ln();
    let mut value = 0.0;
    let mut abs_error = 0.0;
    let mut warnings = Vec::new();
    for term in nonzero_terms(mgf) {
        let big_b = term.exponent_sum();
        let ln_pref = term.c.abs().ln()
            + ln_norm
            + term.log_pole_product()
            + ln_gamma_ratio(0.5 + big_b, 1.0 + big_b)
            + big_b * (2.0 / p).ln();
        let bvec: Vec<f64> = term.factors.iter().map(|f| f.b).collect();
        let xvec: Vec<Complex64> = term.factors.iter().map(|f| -2.0 * f.a / p).collect();
        let fd = lauricella_fd(0.5 + big_b, &bvec, 1.0 + big_b, &xvec, cfg)?;
        let scale = term.c.signum() * ln_pref.exp();
        value += scale * fd.value;
        abs_error += scale.abs() * fd.abs_error;
        warnings.extend(fd.warnings);
    }
    let r = EvalResult {
        value,
        abs_error,
        method: Method::EulerIntegral,
        warnings,
    };
    Ok(clamp_probability(r, 0.5, "Q-transform"))
}

/// Which route [`outage_with`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutageRoute {
    /// Series where admissible, inversion otherwise.
    #[default]
    Auto,
    Series,
    Inversion,
}

/// Whether the series route can evaluate every term at `gamma_th`.
pub fn series_admissible(mgf: &PosynomialMgf, gamma_th: f64) -> bool {
    nonzero_terms(mgf).all(|t| {
        let t = t.simplified();
        t.factors.len() <= 2
            && t.is_real()
            && t.factors.iter().map(|f| (f.a.re * gamma_th).abs()).sum::<f64>() <= PHI2_SERIES_WINDOW
    })
}

/// `P(γ ≤ gamma_th)` with automatic routing and default tolerances.
pub fn outage(mgf: &PosynomialMgf, gamma_th: f64) -> Result<EvalResult, AnalysisError> {
    outage_with(mgf, gamma_th, OutageRoute::Auto, DEFAULT_INVERSION_TOL)
}

/// `P(γ ≤ gamma_th)`; `tol` is the absolute target of the inversion route.
pub fn outage_with(
    mgf: &PosynomialMgf,
    gamma_th: f64,
    route: OutageRoute,
    tol: f64,
) -> Result<EvalResult, AnalysisError> {
    mgf.ensure_valid()?;
    if !(gamma_th > 0.0) || !gamma_th.is_finite() {
        return Err(AnalysisError::Argument(format!(
            "threshold {gamma_th} must be positive and finite"
        )));
    }
    let use_series = match route {
        OutageRoute::Auto => series_admissible(mgf, gamma_th),
        OutageRoute::Series => {
            if !series_admissible(mgf, gamma_th) {
                return Err(AnalysisError::Argument(format!(
                    "series route needs real poles, at most two per term and Σ|aγ| ≤ {PHI2_SERIES_WINDOW}"
                )));
            }
            true
        }
        OutageRoute::Inversion => false,
    };
    let r = if use_series {
        outage_series(mgf, gamma_th)?
    } else {
        let est = bromwich_cdf(mgf, gamma_th, tol)?;
        EvalResult {
            value: est.value,
            abs_error: est.abs_error,
            method: Method::LaplaceInversion,
            warnings: est.warnings,
        }
    };
    Ok(clamp_probability(r, 1.0, "outage"))
}

fn outage_series(mgf: &PosynomialMgf, gamma_th: f64) -> Result<EvalResult, AnalysisError> {
    let cfg = SeriesConfig::default();
    let mut value = 0.0;
    let mut scale_sum = 0.0;
    for term in nonzero_terms(mgf) {
        let term = term.simplified();
        let big_b = term.exponent_sum();
        let ln_pref =
            term.c.abs().ln() + term.log_pole_product() + big_b * gamma_th.ln() - ln_gamma(1.0 + big_b);
        let bvec: Vec<f64> = term.factors.iter().map(|f| f.b).collect();
        let xvec: Vec<f64> = term.factors.iter().map(|f| -f.a.re * gamma_th).collect();
        let phi = phi2_series(&bvec, 1.0 + big_b, &xvec, &cfg)?;
        let scale = term.c.signum() * ln_pref.exp();
        value += scale * phi;
        scale_sum += scale.abs();
    }
    Ok(EvalResult {
        value,
        abs_error: scale_sum * cfg.tol,
        method: Method::Series,
        warnings: Vec::new(),
    })
}

/// High-SNR approximation of the Q-transform.
pub fn q_asymptotic(mgf: &PosynomialMgf, p: f64) -> Result<f64, AnalysisError> {
    mgf.ensure_valid()?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(AnalysisError::Argument(format!("p = {p} must be positive and finite")));
    }
    let ln_norm = -(2.0f64.ln()) - 0.5 * PI.ln();
    Ok(nonzero_terms(mgf)
        .map(|t| {
            let big_b = t.exponent_sum();
            let ln = t.c.abs().ln()
                + ln_norm
                + big_b * 2.0f64.ln()
                + t.log_pole_product()
                + ln_gamma_ratio(0.5 + big_b, 1.0 + big_b)
                - big_b * p.ln();
            t.c.signum() * ln.exp()
        })
        .sum())
}

/// Small-threshold leading behaviour of the outage probability,
/// `Σ c_k ∏a^b γ^B / Γ(1+B)`.
pub fn outage_asymptotic(mgf: &PosynomialMgf, gamma_th: f64) -> Result<f64, AnalysisError> {
    mgf.ensure_valid()?;
    if !(gamma_th > 0.0) || !gamma_th.is_finite() {
        return Err(AnalysisError::Argument(format!(
            "threshold {gamma_th} must be positive and finite"
        )));
    }
    Ok(nonzero_terms(mgf)
        .map(|t| {
            let big_b = t.exponent_sum();
            let ln = t.c.abs().ln() + t.log_pole_product() + big_b * gamma_th.ln() - ln_gamma(1.0 + big_b);
            t.c.signum() * ln.exp()
        })
        .sum())
}

/// Smallest exponent sum over the terms.
pub fn diversity_order(mgf: &PosynomialMgf) -> Result<f64, AnalysisError> {
    mgf.ensure_valid()?;
    Ok(nonzero_terms(mgf)
        .map(MonomialTerm::exponent_sum)
        .fold(f64::INFINITY, f64::min))
}

/// Conditional error probability written as `Σ w_j Q(√(p_j γ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<WeightedTerm>", into = "Vec<WeightedTerm>")]
pub struct WeightedGaussianSum {
    terms: Vec<WeightedTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub weight: f64,
    pub p: f64,
}

impl WeightedGaussianSum {
    pub fn new(terms: Vec<WeightedTerm>) -> Result<Self, AnalysisError> {
        if terms.is_empty() {
            return Err(AnalysisError::Argument("weighted sum has no terms".into()));
        }
        if let Some(t) = terms.iter().find(|t| !(t.p > 0.0 && t.p.is_finite() && t.weight.is_finite())) {
            return Err(AnalysisError::Argument(format!(
                "weighted sum term (weight {}, p {}) needs p > 0",
                t.weight, t.p
            )));
        }
        Ok(Self { terms })
    }

    /// `Q(√(2γ))`.
    pub fn bpsk() -> Self {
        Self {
            terms: vec![WeightedTerm { weight: 1.0, p: 2.0 }],
        }
    }

    pub fn terms(&self) -> &[WeightedTerm] {
        &self.terms
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Same weights with every argument multiplied by `g` (an SNR gain).
    pub fn scaled(&self, g: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| WeightedTerm {
                    weight: t.weight,
                    p: t.p * g,
                })
                .collect(),
        }
    }
}

impl TryFrom<Vec<WeightedTerm>> for WeightedGaussianSum {
    type Error = AnalysisError;

    fn try_from(terms: Vec<WeightedTerm>) -> Result<Self, Self::Error> {
        Self::new(terms)
    }
}

impl From<WeightedGaussianSum> for Vec<WeightedTerm> {
    fn from(s: WeightedGaussianSum) -> Self {
        s.terms
    }
}

/// Average error probability `Σ w_j Q_γ(p_j)`.
pub fn average_ep(mgf: &PosynomialMgf, sum: &WeightedGaussianSum) -> Result<EvalResult, AnalysisError> {
    average_ep_with(mgf, sum, &QuadratureConfig::default())
}

pub fn average_ep_with(
    mgf: &PosynomialMgf,
    sum: &WeightedGaussianSum,
    cfg: &QuadratureConfig,
) -> Result<EvalResult, AnalysisError> {
    let mut out = EvalResult::exact(0.0);
    let mut all_closed = true;
    for t in sum.terms() {
        let q = q_transform_with(mgf, t.p, cfg)?;
        out.value += t.weight * q.value;
        out.abs_error += t.weight.abs() * q.abs_error;
        all_closed &= q.method == Method::ClosedForm;
        out.warnings.extend(q.warnings);
    }
    if !all_closed {
        out.method = Method::EulerIntegral;
    }
    Ok(out)
}

/// High-SNR form of [`average_ep`].
pub fn average_ep_asymptotic(mgf: &PosynomialMgf, sum: &WeightedGaussianSum) -> Result<f64, AnalysisError> {
    sum.terms()
        .iter()
        .map(|t| Ok(t.weight * q_asymptotic(mgf, t.p)?))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelSpec;
    use crate::specfun::{gauss_2f1, reg_gamma_q};

    fn mgf(spec: ChannelSpec) -> PosynomialMgf {
        spec.to_mgf().unwrap()
    }

    fn rayleigh_q(avg: f64, p: f64) -> f64 {
        let c = p * avg / 2.0;
        let r = (c / (1.0 + c)).sqrt();
        // 1 − r written without cancellation
        0.5 / ((1.0 + c) * (1.0 + r))
    }

    #[test]
    fn origin_is_one_half() {
        let m = mgf(ChannelSpec::hoyt(0.4, 3.0));
        let r = q_transform(&m, 0.0).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.method, Method::ClosedForm);
    }

    #[test]
    fn rayleigh_closed_form() {
        let r = q_transform(&mgf(ChannelSpec::rayleigh(1.0)), 2.0).unwrap();
        assert!((r.value - 0.146_446_609_406_726_24).abs() < 1e-13, "{}", r.value);
        assert_eq!(r.method, Method::EulerIntegral);
        for avg in [0.1, 1.0, 10.0, 1000.0] {
            for p in [1e-3, 0.5, 8.0, 1e4] {
                let v = q_transform(&mgf(ChannelSpec::rayleigh(avg)), p).unwrap().value;
                let e = rayleigh_q(avg, p);
                assert!(((v - e) / e).abs() < 1e-10, "avg={avg} p={p}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn nakagami_matches_gauss_hypergeometric() {
        // single-factor F_D is ₂F₁(m+½, m; m+1; −2m/(pγ̄))
        for m in [0.5, 1.0, 2.0, 3.5, 7.25] {
            for avg in [1.0, 10.0] {
                for p in [0.1, 1.0, 4.0, 100.0] {
                    let pref = (ln_gamma_ratio(m + 0.5, m + 1.0) + m * (2.0 * m / (p * avg)).ln()).exp()
                        / (2.0 * PI.sqrt());
                    let f = gauss_2f1(m + 0.5, m, m + 1.0, -2.0 * m / (p * avg)).unwrap();
                    let v = q_transform(&mgf(ChannelSpec::nakagami(m, avg)), p).unwrap().value;
                    assert!(((v - pref * f) / v).abs() < 1e-11, "m={m} avg={avg} p={p}");
                }
            }
        }
    }

    #[test]
    fn reference_values() {
        // 30-digit evaluations of the Craig-form expectation
        let cases = [
            (ChannelSpec::hoyt(0.3, 1.0), 4.0, 0.118_353_856_463_489_58),
            (ChannelSpec::nakagami(2.5, 3.0), 1.0, 0.071_905_404_355_801_94),
            (ChannelSpec::nakagami(2.0, 1.0), 2.0, 0.115_099_820_540_249_49),
            (ChannelSpec::rician_shadowed(5.0, 2.0, 1.0), 2.0, 0.128_055_460_440_969_58),
            (ChannelSpec::eta_mu(1, 2.0, 2, 1.0), 2.0, 0.117_544_467_966_324_13),
        ];
        for (spec, p, expected) in cases {
            let v = q_transform(&mgf(spec.clone()), p).unwrap();
            assert!(((v.value - expected) / expected).abs() < 1e-11, "{spec:?}: {}", v.value);
            assert!(v.abs_error < 1e-11);
        }
    }

    #[test]
    fn tanh_sinh_route_agrees() {
        let m = mgf(ChannelSpec::rician_shadowed(3.0, 0.7, 2.0));
        for p in [0.05, 1.0, 30.0] {
            let gl = q_transform(&m, p).unwrap().value;
            let ts = q_transform_with(&m, p, &QuadratureConfig::tanh_sinh(1e-12)).unwrap().value;
            assert!(((gl - ts) / gl).abs() < 1e-10, "p={p}: {gl} vs {ts}");
        }
    }

    #[test]
    fn outage_examples() {
        let r = outage(&mgf(ChannelSpec::rayleigh(1.0)), 1.0).unwrap();
        assert!((r.value - (1.0 - (-1.0f64).exp())).abs() < 1e-13);
        assert_eq!(r.method, Method::Series);
        let r = outage(&mgf(ChannelSpec::nakagami(2.0, 1.0)), 1.0).unwrap();
        assert!((r.value - 0.593_994_150_290_161_9).abs() < 1e-13);
        let r = outage(&mgf(ChannelSpec::eta_mu(1, 2.0, 2, 1.0)), 0.7).unwrap();
        assert!((r.value - 0.422_580_930_030_671_2).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn outage_routes_agree() {
        let specs = [
            ChannelSpec::hoyt(0.5, 1.0),
            ChannelSpec::hoyt(0.1, 2.0),
            ChannelSpec::rician_shadowed(5.0, 2.0, 1.0),
            ChannelSpec::rician_shadowed(2.0, 0.6, 4.0),
            ChannelSpec::eta_mu(2, -0.5, 3, 1.0),
            ChannelSpec::nakagami(3.5, 1.0),
        ];
        let mut checked = 0;
        for spec in specs {
            let m = mgf(spec.clone());
            for th in [0.05, 0.5, 1.0, 3.0] {
                if !series_admissible(&m, th) {
                    continue;
                }
                checked += 1;
                let s = outage_with(&m, th, OutageRoute::Series, 1e-10).unwrap();
                let i = outage_with(&m, th, OutageRoute::Inversion, 1e-10).unwrap();
                assert_eq!(s.method, Method::Series);
                assert_eq!(i.method, Method::LaplaceInversion);
                assert!((s.value - i.value).abs() < 1e-8, "{spec:?} th={th}: {} vs {}", s.value, i.value);
            }
        }
        assert!(checked >= 20, "{checked}");
    }

    #[test]
    fn outage_matches_incomplete_gamma() {
        for m in [0.5, 1.0, 2.0, 3.5] {
            for avg in [1.0, 10.0] {
                for th in [0.01, 0.3, 1.0, 5.0, 40.0] {
                    let v = outage(&mgf(ChannelSpec::nakagami(m, avg)), th).unwrap().value;
                    let e = 1.0 - reg_gamma_q(m, m * th / avg);
                    assert!((v - e).abs() < 1e-9, "m={m} avg={avg} th={th}: {v} vs {e}");
                }
            }
        }
    }

    #[test]
    fn routing_falls_back_to_inversion() {
        let m = mgf(ChannelSpec::nakagami(2.0, 1.0));
        assert_eq!(outage(&m, 20.0).unwrap().method, Method::LaplaceInversion);
        let mrc = mgf(ChannelSpec::Mrc {
            branches: vec![ChannelSpec::hoyt(0.5, 1.0), ChannelSpec::nakagami(2.0, 3.0)],
        });
        assert_eq!(outage(&mrc, 0.5).unwrap().method, Method::LaplaceInversion);
        assert!(outage_with(&mrc, 0.5, OutageRoute::Series, 1e-9).is_err());
    }

    #[test]
    fn asymptotic_forms() {
        let r = mgf(ChannelSpec::rayleigh(1.0));
        for p in [1.0, 7.0, 1e3] {
            assert!((q_asymptotic(&r, p).unwrap() - 0.5 / p).abs() < 1e-15 / p);
        }
        let exact = q_transform(&r, 1e3).unwrap().value;
        assert!(((exact - q_asymptotic(&r, 1e3).unwrap()) / exact).abs() < 0.01);
        let n = mgf(ChannelSpec::nakagami(2.7, 4.0));
        let ratio = q_asymptotic(&n, 20.0).unwrap() / q_asymptotic(&n, 10.0).unwrap();
        assert!((ratio - 2f64.powf(-2.7)).abs() < 1e-12);
        let o = outage_asymptotic(&n, 1e-4).unwrap();
        let e = 1.0 - reg_gamma_q(2.7, 2.7 * 1e-4 / 4.0);
        assert!(((o - e) / e).abs() < 1e-3);
    }

    #[test]
    fn diversity_examples() {
        assert_eq!(diversity_order(&mgf(ChannelSpec::nakagami(2.5, 1.0))).unwrap(), 2.5);
        assert_eq!(diversity_order(&mgf(ChannelSpec::hoyt(0.2, 1.0))).unwrap(), 1.0);
        let mix = PosynomialMgf::mixture(
            &[0.5, 0.5],
            &[mgf(ChannelSpec::nakagami(1.0, 1.0)), mgf(ChannelSpec::nakagami(3.0, 1.0))],
        )
        .unwrap();
        assert_eq!(diversity_order(&mix).unwrap(), 1.0);
    }

    #[test]
    fn average_ep_examples() {
        let r = mgf(ChannelSpec::rayleigh(1.0));
        let v = average_ep(&r, &WeightedGaussianSum::bpsk()).unwrap().value;
        assert!((v - 0.146_446_609_4).abs() < 1e-10);
        let split = WeightedGaussianSum::new(vec![
            WeightedTerm { weight: 0.5, p: 3.0 },
            WeightedTerm { weight: 0.5, p: 3.0 },
        ])
        .unwrap();
        let q = q_transform(&r, 3.0).unwrap().value;
        assert!((average_ep(&r, &split).unwrap().value - q).abs() < 1e-14);
        let mix = PosynomialMgf::mixture(&[0.5, 0.5], &[r.clone(), r.clone()]).unwrap();
        assert!((average_ep(&mix, &WeightedGaussianSum::bpsk()).unwrap().value - 0.146_446_609_4).abs() < 1e-10);
    }

    #[test]
    fn weights_json() {
        let w = WeightedGaussianSum::from_json(r#"[{"weight":0.75,"p":0.4},{"weight":0.5,"p":1.2}]"#).unwrap();
        assert_eq!(w.terms().len(), 2);
        assert!(WeightedGaussianSum::from_json("[]").is_err());
        assert!(WeightedGaussianSum::from_json(r#"[{"weight":1,"p":0}]"#).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        let r = mgf(ChannelSpec::rayleigh(1.0));
        assert!(q_transform(&r, -1.0).is_err());
        assert!(q_transform(&r, f64::NAN).is_err());
        assert!(outage(&r, 0.0).is_err());
        assert!(q_asymptotic(&r, 0.0).is_err());
    }
}
