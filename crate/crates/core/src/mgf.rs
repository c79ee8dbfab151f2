//! Posynomial moment generating functions.
//!
//! A nonnegative random SNR `γ` is *posynomial* when its MGF has the form
//!
//! ```text
//! M(s) = Σ_k c_k ∏_i (1 − s/a_{k,i})^(−b_{k,i})
//! ```
//!
//! subject to the compatibility conditions `Re[a] > 0` for every factor,
//! `Σ_i b_{k,i} > 0` for every term and `Σ_k c_k = 1`. With a single term the
//! MGF is *monomial*. The set `{c_k, a_{k,i}, b_{k,i}}` (the characteristic
//! coefficients) is all the analysis layer needs to know about a channel.
//!
//! The class is closed under products (sums of independent SNRs, e.g. MRC
//! branches) and under mixtures (random scenarios), both provided here.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::MgfError;

/// Tolerance on `Σ c_k = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Relative tolerance under which two poles are considered equal by [`PosynomialMgf::simplify`].
pub const POLE_MERGE_RTOL: f64 = 1e-12;
/// Exponents at or below this magnitude are dropped by [`PosynomialMgf::simplify`].
pub const ZERO_EXPONENT_TOL: f64 = 1e-14;

/// One factor `(1 − s/a)^(−b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialFactor {
    pub a: Complex64,
    pub b: f64,
}

impl MonomialFactor {
    pub fn new(a: Complex64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Self {
            a: Complex64::new(a, 0.0),
            b,
        }
    }

    pub fn is_real(&self) -> bool {
        self.a.im == 0.0
    }

    fn eval(&self, s: Complex64) -> Result<Complex64, MgfError> {
        let base = Complex64::new(1.0, 0.0) - s / self.a;
        if self.b > 0.0 && base.norm() <= 1e-14 {
            return Err(MgfError::Pole {
                s_re: s.re,
                s_im: s.im,
            });
        }
        if base.im == 0.0 && base.re > 0.0 {
            return Ok(Complex64::new(base.re.powf(-self.b), 0.0));
        }
        Ok((base.ln() * -self.b).exp())
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.a
            .re
            .total_cmp(&other.a.re)
            .then(self.a.im.total_cmp(&other.a.im))
            .then(self.b.total_cmp(&other.b))
    }
}

/// One weighted product term `c ∏ (1 − s/a_i)^(−b_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialTerm {
    pub c: f64,
    pub factors: Vec<MonomialFactor>,
}

impl MonomialTerm {
    pub fn new(c: f64, factors: Vec<MonomialFactor>) -> Self {
        Self { c, factors }
    }

    /// `Σ_i b_i`, the power-law exponent this term contributes at high SNR.
    pub fn exponent_sum(&self) -> f64 {
        self.factors.iter().map(|f| f.b).sum()
    }

    pub fn is_real(&self) -> bool {
        self.factors.iter().all(MonomialFactor::is_real)
    }

    /// `∏ (1 − s/a_i)^(−b_i)` without the weight.
    pub fn eval_product(&self, s: Complex64) -> Result<Complex64, MgfError> {
        self.factors
            .iter()
            .try_fold(Complex64::new(1.0, 0.0), |acc, f| Ok(acc * f.eval(s)?))
    }

    /// `Σ_i b_i ln a_i`, real for conjugate-paired poles.
    pub fn log_pole_product(&self) -> f64 {
        self.factors.iter().map(|f| f.b * f.a.ln().re).sum()
    }

    pub fn simplified(&self) -> MonomialTerm {
        let mut merged: Vec<MonomialFactor> = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            match merged.iter_mut().find(|m| poles_equal(m.a, f.a)) {
                Some(m) => m.b += f.b,
                None => merged.push(*f),
            }
        }
        let mut kept: Vec<MonomialFactor> = merged
            .iter()
            .copied()
            .filter(|f| f.b.abs() > ZERO_EXPONENT_TOL)
            .collect();
        if kept.is_empty() {
            // only reachable from an incompatible term (Σb = 0)
            kept = merged;
        }
        kept.sort_by(MonomialFactor::canonical_cmp);
        MonomialTerm {
            c: self.c,
            factors: kept,
        }
    }
}

fn poles_equal(x: Complex64, y: Complex64) -> bool {
    (x - y).norm() <= POLE_MERGE_RTOL * x.norm().max(y.norm())
}

/// Which compatibility condition a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `Re[a_{k,i}] > 0`.
    PolePositive,
    /// `Σ_i b_{k,i} > 0`.
    ExponentSum,
    /// `Σ_k c_k = 1`.
    WeightSum,
    /// Complex poles must come in conjugate pairs with equal exponents.
    ConjugatePairs,
}

impl Condition {
    pub fn id(&self) -> &'static str {
        match self {
            Condition::PolePositive => "Re[a]>0",
            Condition::ExponentSum => "Σb>0",
            Condition::WeightSum => "Σc=1",
            Condition::ConjugatePairs => "conjugate-pairs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Non-fatal remarks, e.g. negative term weights.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        let parts: Vec<_> = self.violations.iter().map(|v| v.detail.as_str()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A posynomial MGF given by its characteristic coefficients.
///
/// Construction only checks structure (at least one term, no empty factor
/// list, finite numbers). The compatibility conditions are checked by
/// [`PosynomialMgf::validate`] so that incompatible inputs can still be
/// reported on.
#[derive(Debug, Clone, PartialEq)]
pub struct PosynomialMgf {
    terms: Vec<MonomialTerm>,
}

impl PosynomialMgf {
    pub fn new(terms: Vec<MonomialTerm>) -> Result<Self, MgfError> {
        if terms.is_empty() {
            return Err(MgfError::NoTerms);
        }
        for (k, t) in terms.iter().enumerate() {
            if t.factors.is_empty() {
                return Err(MgfError::EmptyTerm(k));
            }
            let finite = t.c.is_finite()
                && t.factors
                    .iter()
                    .all(|f| f.a.re.is_finite() && f.a.im.is_finite() && f.b.is_finite());
            if !finite {
                return Err(MgfError::NonFinite { term: k });
            }
        }
        Ok(Self { terms })
    }

    pub fn monomial(factors: Vec<MonomialFactor>) -> Result<Self, MgfError> {
        Self::new(vec![MonomialTerm::new(1.0, factors)])
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(MonomialTerm::is_real)
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.c).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (k, term) in self.terms.iter().enumerate() {
            for (i, f) in term.factors.iter().enumerate() {
                if !(f.a.re > 0.0) {
                    report.violations.push(Violation {
                        condition: Condition::PolePositive,
                        detail: format!("term {k} factor {i}: Re[a]>0 fails ({})", f.a.re),
                    });
                }
            }
            let sum_b = term.exponent_sum();
            if !(sum_b > 0.0) {
                report.violations.push(Violation {
                    condition: Condition::ExponentSum,
                    detail: format!("term {k}: Σb>0 fails ({sum_b})"),
                });
            }
            if let Some(detail) = unpaired_complex_pole(term) {
                report.violations.push(Violation {
                    condition: Condition::ConjugatePairs,
                    detail: format!("term {k}: {detail}"),
                });
            }
            if term.c < 0.0 {
                report.warnings.push(format!(
                    "term {k} has negative weight {}; the mixture reading of the MGF does not apply",
                    term.c
                ));
            }
        }
        let sum_c = self.weight_sum();
        if (sum_c - 1.0).abs() > WEIGHT_SUM_TOL {
            report.violations.push(Violation {
                condition: Condition::WeightSum,
                detail: format!("Σc=1 fails ({sum_c})"),
            });
        }
        report
    }

    /// Validates and converts the report into an error.
    pub fn ensure_valid(&self) -> Result<(), MgfError> {
        let report = self.validate();
        if report.ok() {
            Ok(())
        } else {
            Err(MgfError::Incompatible(report.to_string()))
        }
    }

    /// Evaluates `M(s)` on the principal branch.
    pub fn eval(&self, s: Complex64) -> Result<Complex64, MgfError> {
        if s == Complex64::new(0.0, 0.0) && (self.weight_sum() - 1.0).abs() <= WEIGHT_SUM_TOL {
            return Ok(Complex64::new(1.0, 0.0));
        }
        self.terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            Ok(acc + t.eval_product(s)? * t.c)
        })
    }

    /// Evaluates `M(s)` for real `s`, discarding the (round-off) imaginary part.
    pub fn eval_real(&self, s: f64) -> Result<f64, MgfError> {
        self.eval(Complex64::new(s, 0.0)).map(|v| v.re)
    }

    /// MGF of the sum of two independent SNRs.
    pub fn product(&self, other: &PosynomialMgf) -> PosynomialMgf {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for l in &self.terms {
            for r in &other.terms {
                let mut factors = l.factors.clone();
                factors.extend_from_slice(&r.factors);
                terms.push(MonomialTerm::new(l.c * r.c, factors));
            }
        }
        PosynomialMgf { terms }
    }

    /// MGF of a random choice between scenarios, scenario `l` having probability `weights[l]`.
    pub fn mixture(weights: &[f64], components: &[PosynomialMgf]) -> Result<PosynomialMgf, MgfError> {
        if weights.len() != components.len() || weights.is_empty() {
            return Err(MgfError::LengthMismatch {
                weights: weights.len(),
                components: components.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(MgfError::WeightSum(total));
        }
        let terms = weights
            .iter()
            .zip(components)
            .flat_map(|(&w, m)| {
                m.terms
                    .iter()
                    .map(move |t| MonomialTerm::new(w * t.c, t.factors.clone()))
            })
            .collect();
        Ok(PosynomialMgf { terms })
    }

    /// Canonical form: equal poles merged, zero exponents dropped, factors sorted.
    pub fn simplify(&self) -> PosynomialMgf {
        PosynomialMgf {
            terms: self.terms.iter().map(MonomialTerm::simplified).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&WireMgf::from(self)).expect("wire form serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn unpaired_complex_pole(term: &MonomialTerm) -> Option<String> {
    let mut used = vec![false; term.factors.len()];
    for (i, f) in term.factors.iter().enumerate() {
        if f.is_real() || used[i] {
            continue;
        }
        used[i] = true;
        let partner = term.factors.iter().enumerate().position(|(j, g)| {
            !used[j] && poles_equal(g.a, f.a.conj()) && (g.b - f.b).abs() <= 1e-12 * f.b.abs().max(1.0)
        });
        match partner {
            Some(j) => used[j] = true,
            None => {
                return Some(format!(
                    "pole {}{:+}i with exponent {} has no conjugate partner",
                    f.a.re, f.a.im, f.b
                ))
            }
        }
    }
    None
}

// Canonical JSON: {"terms":[{"c":..,"factors":[{"a_re":..,"a_im":..,"b":..}]}]}
// Integral values are written without a fractional part.

#[derive(Serialize, Deserialize)]
struct WireMgf {
    terms: Vec<WireTerm>,
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    #[serde(serialize_with = "canonical_number")]
    c: f64,
    factors: Vec<WireFactor>,
}

#[derive(Serialize, Deserialize)]
struct WireFactor {
    #[serde(serialize_with = "canonical_number")]
    a_re: f64,
    #[serde(default, serialize_with = "canonical_number")]
    a_im: f64,
    #[serde(serialize_with = "canonical_number")]
    b: f64,
}

fn canonical_number<S: Serializer>(v: &f64, ser: S) -> Result<S::Ok, S::Error> {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        // -0.0 prints as 0
        ser.serialize_i64(*v as i64)
    } else {
        ser.serialize_f64(*v)
    }
}

impl From<&PosynomialMgf> for WireMgf {
    fn from(m: &PosynomialMgf) -> Self {
        WireMgf {
            terms: m
                .terms
                .iter()
                .map(|t| WireTerm {
                    c: t.c,
                    factors: t
                        .factors
                        .iter()
                        .map(|f| WireFactor {
                            a_re: f.a.re,
                            a_im: f.a.im,
                            b: f.b,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl Serialize for PosynomialMgf {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        WireMgf::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PosynomialMgf {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = WireMgf::deserialize(de)?;
        let terms = wire
            .terms
            .into_iter()
            .map(|t| {
                MonomialTerm::new(
                    t.c,
                    t.factors
                        .into_iter()
                        .map(|f| MonomialFactor::new(Complex64::new(f.a_re, f.a_im), f.b))
                        .collect(),
                )
            })
            .collect();
        PosynomialMgf::new(terms).map_err(serde::de::Error::custom)
    }
}
