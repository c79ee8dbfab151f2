//! Lauricella `F_D^(n)` through its Euler-type integral, and the confluent
//! `Φ₂^(n)` for up to two variables by series.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::SpecfunError;

use super::gamma::beta;
use super::hypergeom::kummer_1f1;
use super::quad::{gauss_legendre_doubling, tanh_sinh_unit, Estimate, QuadMethod, QuadratureConfig};

/// Truncation control for the `Φ₂` series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub max_order: usize,
    pub tol: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            max_order: 2000,
            tol: 1e-13,
        }
    }
}

/// Largest `Σ|x_i|` accepted by [`phi2_series`].
pub const PHI2_SERIES_WINDOW: f64 = 30.0;

/// `F_D^(n)(α; b_1..b_n; c; x_1..x_n)` for `c > α > 0`.
///
/// Evaluates
/// `B(α, c−α)^{-1} ∫₀¹ u^{α−1}(1−u)^{c−α−1} ∏ (1 − x_i u)^{−b_i} du`.
/// With Gauss–Legendre the integral is taken in `u = sin²θ`, which turns
/// the endpoint powers into `sin^{2α−1}θ cos^{2(c−α)−1}θ`; for the
/// Q-transform parameters (`c − α = ½`) the integrand is smooth on
/// `[0, π/2]`. Complex `x_i` must come in conjugate pairs (with equal `b_i`)
/// for the result to be real; only the real part is returned.
pub fn lauricella_fd(
    alpha: f64,
    bvec: &[f64],
    cparam: f64,
    xvec: &[Complex64],
    cfg: &QuadratureConfig,
) -> Result<Estimate, SpecfunError> {
    if !(alpha > 0.0 && cparam > alpha) {
        return Err(SpecfunError::Domain {
            function: "F_D",
            detail: format!("need c > alpha > 0, got alpha = {alpha}, c = {cparam}"),
        });
    }
    if bvec.len() != xvec.len() {
        return Err(SpecfunError::Domain {
            function: "F_D",
            detail: format!("{} exponents for {} arguments", bvec.len(), xvec.len()),
        });
    }
    cfg.check().map_err(|detail| SpecfunError::Domain {
        function: "F_D",
        detail,
    })?;
    for x in xvec {
        if x.im == 0.0 && x.re >= 1.0 {
            return Err(SpecfunError::IntegrandPole(x.re));
        }
    }
    let active: Vec<(f64, Complex64)> = bvec
        .iter()
        .zip(xvec)
        .filter(|(b, x)| **b != 0.0 && (x.re != 0.0 || x.im != 0.0))
        .map(|(b, x)| (*b, *x))
        .collect();
    if active.is_empty() {
        return Ok(Estimate::exact(1.0));
    }
    let all_real = active.iter().all(|(_, x)| x.im == 0.0);
    let product = |u: f64| -> f64 {
        if all_real {
            active.iter().map(|(b, x)| (1.0 - x.re * u).powf(-b)).product()
        } else {
            let log: Complex64 = active
                .iter()
                .map(|(b, x)| (Complex64::new(1.0, 0.0) - x * u).ln() * -b)
                .sum();
            log.exp().re
        }
    };

    let gap = cparam - alpha;
    let raw = match cfg.method {
        QuadMethod::GaussLegendre => {
            let p_sin = 2.0 * alpha - 1.0;
            let p_cos = 2.0 * gap - 1.0;
            gauss_legendre_doubling(
                |theta: f64| {
                    let (s, c) = theta.sin_cos();
                    2.0 * s.powf(p_sin) * c.powf(p_cos) * product(s * s)
                },
                0.0,
                FRAC_PI_2,
                cfg,
            )
        }
        QuadMethod::TanhSinh => tanh_sinh_unit(
            |u, w| u.powf(alpha - 1.0) * w.powf(gap - 1.0) * product(u),
            cfg,
        ),
    };
    let norm = beta(alpha, gap);
    Ok(Estimate {
        value: raw.value / norm,
        abs_error: raw.abs_error / norm,
        warnings: raw.warnings,
    })
}

/// Confluent Lauricella `Φ₂^(n)(b; c; x)` for `n ≤ 2`, `x_i ≤ 0`.
///
/// One variable reduces to `₁F₁(b; c; x)`. For two variables the most
/// negative argument `x_p` is pulled out,
/// `Φ₂(b_p, b_o; c; x_p, x_o) = e^{x_p} Φ₂(b_o, c − b_o − b_p; c; x_o − x_p, −x_p)`,
/// leaving a double series with nonnegative arguments that is summed by
/// total order without cancellation.
pub fn phi2_series(
    bvec: &[f64],
    cparam: f64,
    xvec: &[f64],
    cfg: &SeriesConfig,
) -> Result<f64, SpecfunError> {
    if bvec.len() != xvec.len() {
        return Err(SpecfunError::Domain {
            function: "Phi2",
            detail: format!("{} exponents for {} arguments", bvec.len(), xvec.len()),
        });
    }
    if bvec.len() > 2 {
        return Err(SpecfunError::SeriesOrder(bvec.len()));
    }
    if xvec.iter().any(|x| !(*x <= 0.0)) {
        return Err(SpecfunError::Domain {
            function: "Phi2",
            detail: "series route needs nonpositive arguments".into(),
        });
    }
    let spread: f64 = xvec.iter().map(|x| x.abs()).sum();
    if spread > PHI2_SERIES_WINDOW {
        return Err(SpecfunError::Domain {
            function: "Phi2",
            detail: format!("Σ|x| = {spread} exceeds the series window {PHI2_SERIES_WINDOW}"),
        });
    }
    let active: Vec<(f64, f64)> = bvec
        .iter()
        .zip(xvec)
        .filter(|(_, x)| **x != 0.0)
        .map(|(b, x)| (*b, *x))
        .collect();
    match active.as_slice() {
        [] => Ok(1.0),
        [(b, x)] => kummer_1f1(*b, cparam, *x),
        [first, second] => {
            let (pulled, other) = if first.1 <= second.1 {
                (first, second)
            } else {
                (second, first)
            };
            let b_other = other.0;
            let b_new = cparam - other.0 - pulled.0;
            let big_x = other.1 - pulled.1;
            let big_y = -pulled.1;
            let sum = positive_double_series(b_other, b_new, cparam, big_x, big_y, cfg)?;
            Ok(pulled.1.exp() * sum)
        }
        _ => unreachable!(),
    }
}

/// Σ_{j,k} (b1)_j (b2)_k / (c)_{j+k} · x^j y^k / (j! k!), summed by diagonals j+k = N.
fn positive_double_series(
    b1: f64,
    b2: f64,
    c: f64,
    x: f64,
    y: f64,
    cfg: &SeriesConfig,
) -> Result<f64, SpecfunError> {
    let mut row = vec![1.0];
    let mut sum = 1.0;
    let mut last = 1.0;
    let mut quiet = 0;
    for order in 0..cfg.max_order {
        let nf = order as f64;
        let mut next = Vec::with_capacity(row.len() + 1);
        for (j, t) in row.iter().enumerate() {
            let k = (order - j) as f64;
            next.push(t * (b2 + k) * y / ((c + nf) * (k + 1.0)));
        }
        next.push(row[order] * (b1 + nf) * x / ((c + nf) * (nf + 1.0)));
        let diag: f64 = next.iter().sum();
        sum += diag;
        last = diag;
        row = next;
        if nf + 1.0 > x + y && diag.abs() <= cfg.tol * sum.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(SpecfunError::NotConverged {
        max_order: cfg.max_order,
        last_term: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hypergeom::gauss_2f1;

    fn real(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    /// Composite Simpson on the raw Euler integral in `u` (brute force).
    fn simpson_fd(alpha: f64, b: &[f64], c: f64, x: &[f64], panels: usize) -> f64 {
        let f = |u: f64| {
            let mut v = u.powf(alpha - 1.0) * (1.0 - u).powf(c - alpha - 1.0);
            for (bi, xi) in b.iter().zip(x) {
                v *= (1.0 - xi * u).powf(-bi);
            }
            v
        };
        let h = 1.0 / panels as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0 / beta(alpha, c - alpha)
    }

    #[test]
    fn zero_arguments_give_one() {
        let v = lauricella_fd(1.5, &[0.5, 0.5], 2.0, &real(&[0.0, 0.0]), &QuadratureConfig::default())
            .unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn one_variable_is_gauss() {
        let v = lauricella_fd(1.5, &[1.0], 2.0, &real(&[-0.5]), &QuadratureConfig::default()).unwrap();
        let g = gauss_2f1(1.5, 1.0, 2.0, -0.5).unwrap();
        assert!((v.value - g).abs() < 1e-11, "{} vs {g}", v.value);
    }

    #[test]
    fn matches_brute_force_simpson() {
        // α = 1.5, c = 2: integrand u^{1/2} (1-u)^{-1/2} (1+u)^{-1}. Split at u = ½ and
        // substitute u = s² on the left, u = 1 - w² on the right so both halves are smooth.
        let left = |s: f64| 2.0 * s * s / ((1.0 - s * s).sqrt() * (1.0 + s * s));
        let right = |w: f64| 2.0 * (1.0 - w * w).sqrt() / (2.0 - w * w);
        let simpson = |f: &dyn Fn(f64) -> f64, hi: f64, panels: usize| {
            let h = hi / panels as f64;
            let mut s = f(0.0) + f(hi);
            for i in 1..panels {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
            }
            s * h / 3.0
        };
        let edge = 0.5f64.sqrt();
        let oracle = (simpson(&left, edge, 500_000) + simpson(&right, edge, 500_000)) / beta(1.5, 0.5);
        let v = lauricella_fd(1.5, &[1.0], 2.0, &real(&[-1.0]), &QuadratureConfig::default()).unwrap();
        assert!((v.value - oracle).abs() < 1e-10, "{} vs {oracle}", v.value);
        // A smooth-endpoint case where plain Simpson applies directly.
        let direct = simpson_fd(2.0, &[0.7, -0.3], 4.0, &[-2.0, -0.4], 1_000_000);
        let v = lauricella_fd(2.0, &[0.7, -0.3], 4.0, &real(&[-2.0, -0.4]), &QuadratureConfig::default())
            .unwrap();
        assert!((v.value - direct).abs() < 1e-10, "{} vs {direct}", v.value);
    }

    #[test]
    fn tanh_sinh_agrees_with_gauss_legendre() {
        let b = [0.5, 0.5, 2.0];
        let x = real(&[-3.0, -0.2, -40.0]);
        let alpha = 0.5 + 3.0;
        let gl = lauricella_fd(alpha, &b, 4.0, &x, &QuadratureConfig::default()).unwrap();
        let ts = lauricella_fd(alpha, &b, 4.0, &x, &QuadratureConfig::tanh_sinh(1e-13)).unwrap();
        assert!(gl.converged() && ts.converged());
        assert!(((gl.value - ts.value) / gl.value).abs() < 1e-11);
    }

    #[test]
    fn dropping_zero_argument_is_invariant() {
        let cfg = QuadratureConfig::default();
        let full = lauricella_fd(2.5, &[1.0, 0.8, 0.2], 3.0, &real(&[-1.0, 0.0, -7.0]), &cfg).unwrap();
        let reduced = lauricella_fd(2.5, &[1.0, 0.2], 3.0, &real(&[-1.0, -7.0]), &cfg).unwrap();
        assert!((full.value - reduced.value).abs() < 1e-11);
    }

    #[test]
    fn conjugate_pair_is_real() {
        let cfg = QuadratureConfig::default();
        let x = [Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)];
        let v = lauricella_fd(1.5, &[0.5, 0.5], 2.0, &x, &cfg).unwrap();
        // |1 - x u|^{-1} for the pair equals ((1+u)^2 + 4u^2)^{-1/2}
        let brute = simpson_like(|u| ((1.0 + u) * (1.0 + u) + 4.0 * u * u).powf(-0.5));
        assert!((v.value - brute).abs() < 1e-9, "{} vs {brute}", v.value);
    }

    // Composite Simpson in θ for the (α, c) = (3/2, 2) kernel.
    fn simpson_like<F: Fn(f64) -> f64>(prod: F) -> f64 {
        let n = 200_000;
        let h = FRAC_PI_2 / n as f64;
        let g = |t: f64| {
            let s = t.sin();
            2.0 * s * s * prod(s * s)
        };
        let mut acc = g(0.0) + g(FRAC_PI_2);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        acc * h / 3.0 / beta(1.5, 0.5)
    }

    #[test]
    fn domain_errors() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(
            lauricella_fd(1.5, &[1.0], 2.0, &real(&[1.5]), &cfg),
            Err(SpecfunError::IntegrandPole(_))
        ));
        assert!(lauricella_fd(2.0, &[1.0], 1.5, &real(&[-1.0]), &cfg).is_err());
    }

    #[test]
    fn phi2_trivial_cases() {
        let cfg = SeriesConfig::default();
        assert_eq!(phi2_series(&[0.5, 0.5], 2.0, &[0.0, 0.0], &cfg).unwrap(), 1.0);
        let v = phi2_series(&[2.0], 3.0, &[-1.0], &cfg).unwrap();
        assert!((v - kummer_1f1(2.0, 3.0, -1.0).unwrap()).abs() < 1e-13);
        assert!(matches!(
            phi2_series(&[1.0, 1.0, 1.0], 4.0, &[-1.0, -1.0, -1.0], &cfg),
            Err(SpecfunError::SeriesOrder(3))
        ));
        assert!(phi2_series(&[1.0], 2.0, &[-31.0], &cfg).is_err());
    }

    #[test]
    fn phi2_reference_values() {
        // 60-digit double-series references
        let cfg = SeriesConfig::default();
        let cases = [
            ([0.5, 0.5], 2.0, [-0.5, -1.5], 0.642_244_418_777_686_4),
            ([0.5, 0.5], 2.0, [-3.0, -12.0], 0.163_843_897_792_026_08),
            ([-1.5, 2.5], 2.0, [-6.0, -3.5], 0.576_124_902_748_247_7),
        ];
        for (b, c, x, v) in cases {
            let got = phi2_series(&b, c, &x, &cfg).unwrap();
            assert!(((got - v) / v).abs() < 1e-12, "{b:?} {x:?}: {got} vs {v}");
        }
    }

    #[test]
    fn phi2_one_variable_matches_kummer() {
        let cfg = SeriesConfig::default();
        for (b, x) in [(0.5, -0.1), (2.5, -7.0), (1.0, -29.0)] {
            let v = phi2_series(&[b], 1.0 + b, &[x], &cfg).unwrap();
            let k = kummer_1f1(b, 1.0 + b, x).unwrap();
            assert!((v - k).abs() < 1e-12);
        }
    }

    #[test]
    fn phi2_equal_arguments_collapse() {
        // Φ₂(b1, b2; c; x, x) = ₁F₁(b1 + b2; c; x)
        let cfg = SeriesConfig::default();
        let v = phi2_series(&[0.5, 1.5], 3.0, &[-4.0, -4.0], &cfg).unwrap();
        let k = kummer_1f1(2.0, 3.0, -4.0).unwrap();
        assert!(((v - k) / k).abs() < 1e-12);
    }
}
