//! CDF of a posynomial SNR by numerical Laplace inversion.
//!
//! `L[F](s) = M(−s)/s` is inverted on a Bromwich line with the Fourier-series
//! (trapezoidal) discretization and Euler summation of the resulting
//! alternating series. The poles `−a` lie strictly left of the line, which is
//! all the method needs, so complex poles are handled the same way as real ones.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::SpecfunError;
use crate::mgf::PosynomialMgf;

use super::quad::Estimate;

/// Default target absolute accuracy of [`bromwich_cdf`].
pub const DEFAULT_INVERSION_TOL: f64 = 1e-9;

const EULER_TERMS: usize = 11;
const START_TERMS: usize = 15;
const MAX_TERMS: usize = 4000;

fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0; m + 1];
    for j in 1..m {
        row[j] = row[j - 1] * (m - j + 1) as f64 / j as f64;
    }
    let scale = 2f64.powi(-(m as i32));
    row.iter().map(|c| c * scale).collect()
}

/// `F_γ(t)` for a validated posynomial MGF.
///
/// The discretization parameter is chosen so the aliasing error `e^{−A}` is
/// a tenth of `tol`; the number of series terms grows until two successive
/// Euler averages agree to `tol / 2`. The result is clamped to `[0, 1]` and
/// carries a warning if the target was not met.
pub fn bromwich_cdf(mgf: &PosynomialMgf, t: f64, tol: f64) -> Result<Estimate, SpecfunError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(SpecfunError::Domain {
            function: "bromwich_cdf",
            detail: format!("t = {t} must be positive and finite"),
        });
    }
    if !(tol > 0.0) {
        return Err(SpecfunError::Domain {
            function: "bromwich_cdf",
            detail: format!("tolerance must be positive, got {tol}"),
        });
    }
    mgf.ensure_valid()?;

    let shift = (10.0 / tol).ln();
    let transform = |s: Complex64| -> Result<f64, SpecfunError> { Ok((mgf.eval(-s)? / s).re) };
    let scale = (0.5 * shift).exp() / t;
    let binom = binomial_row(EULER_TERMS);

    // partial sums s_0, s_1, ... of the alternating series
    let mut partial = Vec::with_capacity(START_TERMS + EULER_TERMS + 2);
    let mut acc = 0.5 * transform(Complex64::new(shift / (2.0 * t), 0.0))?;
    partial.push(acc);
    let mut extend_to = |partial: &mut Vec<f64>, len: usize| -> Result<(), SpecfunError> {
        while partial.len() < len {
            let k = partial.len();
            let s = Complex64::new(shift, 2.0 * PI * k as f64) / (2.0 * t);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * transform(s)?;
            partial.push(acc);
        }
        Ok(())
    };
    let euler = |partial: &[f64], n: usize| -> f64 {
        binom
            .iter()
            .enumerate()
            .map(|(j, c)| c * partial[n + j])
            .sum::<f64>()
    };

    let mut n = START_TERMS;
    let mut prev;
    let mut cur;
    let mut err;
    loop {
        extend_to(&mut partial, n + EULER_TERMS + 2)?;
        prev = scale * euler(&partial, n);
        cur = scale * euler(&partial, n + 1);
        err = (cur - prev).abs();
        if err <= 0.5 * tol || n >= MAX_TERMS {
            break;
        }
        n = (n * 3 / 2).min(MAX_TERMS);
    }
    let mut warnings = Vec::new();
    if err > 0.5 * tol {
        warnings.push(format!(
            "Laplace inversion at t = {t} reached only {err:e} (target {tol:e})"
        ));
    }
    Ok(Estimate {
        value: cur.clamp(0.0, 1.0),
        abs_error: err + 0.1 * tol,
        warnings,
    })
}
