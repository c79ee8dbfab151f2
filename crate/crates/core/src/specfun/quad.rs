//! Quadrature rules: Gauss–Legendre with node doubling, tanh-sinh, and an
//! adaptive Gauss–Kronrod (7/15) integrator for semi-infinite oracles.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Numerical estimate with an error bound and any accuracy warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub warnings: Vec<String>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error: 0.0,
            warnings: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.warnings.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMethod {
    GaussLegendre,
    TanhSinh,
}

impl QuadMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            QuadMethod::GaussLegendre => "gauss-legendre",
            QuadMethod::TanhSinh => "tanh-sinh",
        }
    }
}

/// Controls the one-dimensional integrals behind the Lauricella evaluation.
///
/// `tol` is a relative tolerance on successive refinements; `nodes` is the
/// starting Gauss–Legendre order, doubled at most `max_levels` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub method: QuadMethod,
    pub nodes: usize,
    pub tol: f64,
    pub max_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            method: QuadMethod::GaussLegendre,
            nodes: 16,
            tol: 1e-12,
            max_levels: 8,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn tanh_sinh(tol: f64) -> Self {
        Self {
            method: QuadMethod::TanhSinh,
            tol,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.tol > 0.0) {
            return Err(format!("quadrature tolerance must be positive, got {}", self.tol));
        }
        if self.nodes < 8 {
            return Err(format!("quadrature needs at least 8 nodes, got {}", self.nodes));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut rule = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule[i] = (-z, w);
        rule[n - 1 - i] = (z, w);
    }
    rule
}

const MAX_CACHED_LEVEL: usize = 12;
static GL_CACHE: [OnceLock<Vec<(f64, f64)>>; MAX_CACHED_LEVEL + 1] =
    [const { OnceLock::new() }; MAX_CACHED_LEVEL + 1];

/// Cached rule with `8 << level` nodes.
fn cached_rule(level: usize) -> &'static [(f64, f64)] {
    GL_CACHE[level].get_or_init(|| gauss_legendre_rule(8 << level))
}

fn gl_fixed<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, n: usize) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let apply = |rule: &[(f64, f64)]| rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>();
    let level = (n / 8).trailing_zeros() as usize;
    let s = if n % 8 == 0 && (8 << level) == n && level <= MAX_CACHED_LEVEL {
        apply(cached_rule(level))
    } else {
        apply(&gauss_legendre_rule(n))
    };
    half * s
}

/// Gauss–Legendre on `[lo, hi]`, doubling the order until two successive
/// estimates agree to `cfg.tol` relative.
pub fn gauss_legendre_doubling<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Estimate {
    let mut n = cfg.nodes;
    let mut prev = gl_fixed(&f, lo, hi, n);
    let mut diff = f64::INFINITY;
    for _ in 0..cfg.max_levels {
        n *= 2;
        let cur = gl_fixed(&f, lo, hi, n);
        diff = (cur - prev).abs();
        prev = cur;
        if diff <= cfg.tol * cur.abs() || cur == 0.0 && diff == 0.0 {
            return Estimate {
                value: cur,
                abs_error: diff,
                warnings: Vec::new(),
            };
        }
    }
    Estimate {
        value: prev,
        abs_error: diff,
        warnings: vec![format!(
            "Gauss-Legendre did not reach relative tolerance {:e} with {n} nodes (last change {diff:e})",
            cfg.tol
        )],
    }
}

/// Tanh-sinh (double exponential) quadrature on [0, 1]. The integrand
/// receives both `u` and `1 − u` so endpoint singularities stay accurate.
pub fn tanh_sinh_unit<F: Fn(f64, f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Estimate {
    const T_MAX: f64 = 6.5;
    let node = |t: f64| -> (f64, f64, f64) {
        let v = 0.5 * PI * t.sinh();
        let e = (-2.0 * v.abs()).exp();
        // small = min(u, 1-u), computed without cancellation
        let small = e / (1.0 + e);
        let (u, w1) = if v >= 0.0 { (1.0 - small, small) } else { (small, 1.0 - small) };
        let sech = 2.0 * (-v.abs()).exp() / (1.0 + e);
        let w = 0.25 * PI * t.cosh() * sech * sech;
        (u, w1, w)
    };
    let eval = |t: f64| -> f64 {
        let (u, w1, w) = node(t);
        if w == 0.0 || u <= 0.0 || w1 <= 0.0 {
            return 0.0;
        }
        w * f(u, w1)
    };

    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h;
    let mut diff = f64::INFINITY;
    for _ in 0..cfg.max_levels.max(4) + 2 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let cur = sum * h;
        diff = (cur - prev).abs();
        prev = cur;
        if diff <= cfg.tol * cur.abs() {
            return Estimate {
                value: cur,
                abs_error: diff,
                warnings: Vec::new(),
            };
        }
    }
    Estimate {
        value: prev,
        abs_error: diff,
        warnings: vec![format!(
            "tanh-sinh did not reach relative tolerance {:e} (last change {diff:e})",
            cfg.tol
        )],
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += GK_WEIGHTS_K[i] * pair;
        if i % 2 == 1 {
            gauss += GK_WEIGHTS_G[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod 7/15 on a finite interval.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Estimate {
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Estimate {
                value: total,
                abs_error: err,
                warnings: Vec::new(),
            };
        }
        if pieces.len() >= max_intervals {
            return Estimate {
                value: total,
                abs_error: err,
                warnings: vec![format!(
                    "adaptive quadrature stopped at {max_intervals} intervals with error {err:e}"
                )],
            };
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}
