//! Shared numerics: normal cdf/quantile, log-gamma helpers, adaptive
//! quadrature, and Gauss-Legendre rules used across the crate.

use std::fmt;

/// log2(e), the nat-to-bit conversion factor.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Natural log of 2.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Converts nats to bits.
#[inline]
pub fn nats_to_bits(x: f64) -> f64 {
    x * LOG2_E
}

/// Binary entropy of `p` in bits, with the 0·log 0 = 0 convention.
pub fn binary_entropy(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// x·log2(x) with the convention 0·log 0 = 0.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Gamma-function helpers
// ---------------------------------------------------------------------------

/// ln Γ(x).
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// ln(k!) for integer k.
#[inline]
pub fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// ln C(n, k); -inf when k > n.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// log2(n!) in bits.
#[inline]
pub fn log2_factorial(n: u64) -> f64 {
    ln_factorial(n) * LOG2_E
}

/// Table of ln(k!) for k = 0..=n, built once for inner loops that sweep k.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

/// Harmonic number H_k = sum_{m=1}^{k} 1/m.
pub fn harmonic(k: u64) -> f64 {
    (1..=k).map(|m| 1.0 / m as f64).sum()
}

/// ln B(a, b).
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta function I_x(a, b), via the standard
/// continued fraction (modified Lentz) with the symmetry reduction.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        // Symmetry: I_x(a,b) = 1 - I_{1-x}(b,a); the front factor is shared.
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Standard normal
// ---------------------------------------------------------------------------

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal cdf via erfc, accurate in both tails.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse standard normal cdf (Wichura's AS 241, PPND16 rational
/// approximations; |error| well below the 1e-9 the callers need).
pub fn inv_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "inv_normal_cdf domain: p in (0,1)");
    const A: [f64; 8] = [
        3.387_132_872_796_366_608e0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_3e0,
        4.630_337_846_156_545_295_9e0,
        5.769_497_221_460_691_405_5e0,
        3.647_848_324_763_204_605e0,
        1.270_458_252_452_368_382_6e0,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_3e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_9e0,
        1.676_384_830_183_803_849_4e0,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_7e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_2e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2e0,
        5.463_784_911_164_114_369_9e0,
        1.784_826_539_917_291_335_8e0,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_2e-5,
        2.010_334_399_292_288_132_6e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_2e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_6e-15,
    ];

    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Failure report from the adaptive integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureError {
    /// Best available estimate of the integral.
    pub estimate: f64,
    /// Residual error estimate that could not be driven below tolerance.
    pub residual: f64,
    /// Tolerance that was requested.
    pub tolerance: f64,
}

impl fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "quadrature did not converge: estimate {}, residual {:e} > tolerance {:e}",
            self.estimate, self.residual, self.tolerance
        )
    }
}

impl std::error::Error for QuadratureError {}

const MAX_DEPTH: u32 = 52;

/// Adaptive Simpson integration of `f` over [a, b].
///
/// `tol` is treated as an absolute tolerance, scaled pro rata across
/// subdivisions; callers wanting relative accuracy pass
/// `tol = rel * rough_magnitude`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut residual = 0.0f64;
    let v = simpson_rec(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut residual);
    if residual > tol.abs().max(f64::MIN_POSITIVE) * 4.0 {
        Err(QuadratureError {
            estimate: v,
            residual,
            tolerance: tol,
        })
    } else {
        Ok(v)
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    residual: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth == 0 {
        if depth == 0 && delta.abs() > 15.0 * tol {
            *residual += delta.abs() / 15.0;
        }
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, residual)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, residual)
}

/// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over [a, b] with a fixed N-point Gauss-Legendre rule.
pub fn gauss_legendre_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (b - a);
    let d = 0.5 * (a + b);
    rule.0
        .iter()
        .zip(rule.1.iter())
        .map(|(&x, &w)| w * f(c * x + d))
        .sum::<f64>()
        * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inverse_normal_matches_cdf() {
        // cdf(quantile(p)) = p over a wide grid, including tails.
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = inv_normal_cdf(p);
            assert_abs_diff_eq!(normal_cdf(x), p, epsilon = 1e-12);
        }
        for &p in &[1e-12, 1e-9, 1e-6, 1.0 - 1e-6, 1.0 - 1e-9] {
            let x = inv_normal_cdf(p);
            assert_abs_diff_eq!(normal_cdf(x), p, epsilon = p.min(1.0 - p) * 1e-6 + 1e-15);
        }
    }

    #[test]
    fn known_quantiles() {
        assert_abs_diff_eq!(inv_normal_cdf(0.5), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(inv_normal_cdf(0.975), 1.959963984540054, epsilon = 1e-12);
    }

    #[test]
    fn simpson_handles_smooth_and_peaked() {
        let v = integrate(&|x: f64| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-11);
        // Gaussian bump integrates to ~1 over wide interval.
        let v = integrate(&normal_pdf, -12.0, 12.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let rule = gauss_legendre(8);
        // Exact for degree <= 15.
        let v = gauss_legendre_integrate(&|x: f64| x.powi(10), -1.0, 1.0, &rule);
        assert_abs_diff_eq!(v, 2.0 / 11.0, epsilon = 1e-14);
    }

    #[test]
    fn incomplete_beta_basics() {
        // I_x(1,1) = x.
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            assert_abs_diff_eq!(regularized_incomplete_beta(1.0, 1.0, x), x, epsilon = 1e-12);
        }
        // I_x(2,1) = x^2; I_x(1,2) = 1-(1-x)^2.
        assert_abs_diff_eq!(regularized_incomplete_beta(2.0, 1.0, 0.3), 0.09, epsilon = 1e-12);
        assert_abs_diff_eq!(regularized_incomplete_beta(1.0, 2.0, 0.3), 1.0 - 0.49, epsilon = 1e-12);
        // Symmetry identity.
        assert_abs_diff_eq!(
            regularized_incomplete_beta(3.5, 2.25, 0.4),
            1.0 - regularized_incomplete_beta(2.25, 3.5, 0.6),
            epsilon = 1e-13
        );
    }

    #[test]
    fn binomial_log_helpers() {
        assert_abs_diff_eq!(ln_binomial(5, 2).exp(), 10.0, epsilon = 1e-9);
        assert_eq!(ln_binomial(3, 5), f64::NEG_INFINITY);
        let t = ln_factorial_table(10);
        assert_abs_diff_eq!(t[10], ln_factorial(10), epsilon = 1e-9);
        assert_abs_diff_eq!(harmonic(3), 11.0 / 6.0, epsilon = 1e-15);
    }
}
