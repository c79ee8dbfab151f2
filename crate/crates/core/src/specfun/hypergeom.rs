//! Gauss ₂F₁ and Kummer ₁F₁ for real arguments.

use crate::error::SpecfunError;

use super::gamma::gamma;

const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 2_000_000;

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

fn near_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-9
}

/// Plain hypergeometric series Σ (a)_n (b)_n / ((c)_n n!) x^n for |x| < 1.
fn series_2f1(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term == 0.0 {
            break;
        }
        if term.abs() <= SERIES_EPS * sum.abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum
}

/// Gauss hypergeometric function ₂F₁(a, b; c; x) for real `x < 1`.
///
/// Direct series on `|x| ≤ ½` and `x ∈ (½, 1)`, Pfaff's transformation on
/// `[-1, -½)`, and the `1/x` connection formula below `-1` (falling back
/// to Pfaff + series when `a − b` is an integer).
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64, SpecfunError> {
    if is_nonpositive_integer(c) {
        return Err(SpecfunError::Domain {
            function: "2F1",
            detail: format!("c = {c} is a nonpositive integer"),
        });
    }
    if !(x < 1.0) {
        return Err(SpecfunError::Domain {
            function: "2F1",
            detail: format!("x = {x} must be below 1"),
        });
    }
    if x == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if x >= -0.5 {
        return Ok(series_2f1(a, b, c, x));
    }
    let pfaff = |x: f64| (1.0f64 - x).powf(-a) * series_2f1(a, c - b, c, x / (x - 1.0));
    if x >= -1.0 || near_integer(a - b) {
        return Ok(pfaff(x));
    }
    // DLMF 15.8.2
    let y = 1.0 / x;
    let gc = gamma(c);
    let t1 = gc * gamma(b - a) / (gamma(b) * gamma(c - a));
    let t2 = gc * gamma(a - b) / (gamma(a) * gamma(c - b));
    let f1 = gauss_2f1(a, a - c + 1.0, a - b + 1.0, y)?;
    let f2 = gauss_2f1(b, b - c + 1.0, b - a + 1.0, y)?;
    let mx = -x;
    let mut total = 0.0;
    if t1.is_finite() && t1 != 0.0 {
        total += t1 * mx.powf(-a) * f1;
    }
    if t2.is_finite() && t2 != 0.0 {
        total += t2 * mx.powf(-b) * f2;
    }
    Ok(total)
}

/// Kummer confluent hypergeometric function ₁F₁(a; b; x).
///
/// Negative arguments go through Kummer's transformation
/// `₁F₁(a; b; −x) = e^{−x} ₁F₁(b − a; b; x)`, so the summed series is
/// free of cancellation for the parameter ranges used here.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64, SpecfunError> {
    if is_nonpositive_integer(b) {
        return Err(SpecfunError::Domain {
            function: "1F1",
            detail: format!("b = {b} is a nonpositive integer"),
        });
    }
    if x == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    if x < 0.0 {
        return Ok(x.exp() * series_1f1(b - a, b, -x));
    }
    Ok(series_1f1(a, b, x))
}

fn series_1f1(a: f64, b: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / ((b + nf) * (nf + 1.0)) * x;
        sum += term;
        if term == 0.0 || (nf > x && term.abs() <= SERIES_EPS * sum.abs()) {
            break;
        }
    }
    sum
}
