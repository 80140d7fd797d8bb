//! Parent distributions: discrete pmfs and the three continuous families
//! (uniform, Gaussian, exponential) with cdf/pdf/quantile evaluators,
//! closed-form differential entropies, and seeded inverse-cdf samplers.

use std::fmt;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::math;

/// Errors from constructing or evaluating parent distributions.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionError {
    /// Discrete pmf failed validation.
    InvalidPmf(String),
    /// Continuous family parameters out of range.
    InvalidParameters(String),
    /// Quantile argument outside (0, 1).
    QuantileDomain(f64),
}

impl fmt::Display for DistributionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidPmf(msg) => write!(f, "invalid pmf: {msg}"),
            Self::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            Self::QuantileDomain(w) => write!(f, "quantile argument {w} outside (0,1)"),
        }
    }
}

impl std::error::Error for DistributionError {}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

/// Master seed plus stream index; identical (seed, stream) pairs yield
/// identical sample sequences, and distinct streams are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Deterministic generator for this (seed, stream) pair.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Uniform variate in the open interval (0, 1), safe to feed to quantiles.
pub fn open_unit_uniform(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

// ---------------------------------------------------------------------------
// Discrete pmf
// ---------------------------------------------------------------------------

/// Probability mass function over the alphabet {1, ..., |X|}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    probs: Vec<f64>,
}

impl DiscretePmf {
    /// Validates: probabilities nonnegative, summing to 1 within 1e-12.
    pub fn new(probs: Vec<f64>) -> Result<Self, DistributionError> {
        if probs.is_empty() {
            return Err(DistributionError::InvalidPmf("alphabet must be nonempty".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || p > 1.0) {
            return Err(DistributionError::InvalidPmf("probabilities must lie in [0,1]".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(DistributionError::InvalidPmf(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        -self.probs.iter().map(|&p| math::xlog2x(p)).sum::<f64>()
    }

    /// Draws `n` i.i.d. letters (1-based) by inverse-cdf walk.
    pub fn sample(&self, n: usize, seed: SeedSpec) -> Vec<u32> {
        let mut rng = seed.rng();
        (0..n).map(|_| self.sample_one(&mut rng)).collect()
    }

    pub fn sample_one(&self, rng: &mut impl RngCore) -> u32 {
        let u = open_unit_uniform(rng);
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u <= acc {
                return (i + 1) as u32;
            }
        }
        self.probs.len() as u32
    }
}

// ---------------------------------------------------------------------------
// Continuous parents
// ---------------------------------------------------------------------------

/// Continuous parent distribution; one of the three supported families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum ContinuousParent {
    /// Uniform on [a, b], b > a.
    Uniform { a: f64, b: f64 },
    /// Gaussian with mean and variance, variance > 0.
    Gaussian { mean: f64, var: f64 },
    /// Exponential with rate lambda > 0 (mean 1/lambda), support [0, inf).
    Exponential { rate: f64 },
}

impl ContinuousParent {
    pub fn uniform(a: f64, b: f64) -> Result<Self, DistributionError> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(DistributionError::InvalidParameters(format!("uniform needs b > a, got [{a}, {b})")));
        }
        Ok(Self::Uniform { a, b })
    }

    pub fn gaussian(mean: f64, var: f64) -> Result<Self, DistributionError> {
        if !(var > 0.0) || !mean.is_finite() || !var.is_finite() {
            return Err(DistributionError::InvalidParameters(format!("gaussian needs var > 0, got {var}")));
        }
        Ok(Self::Gaussian { mean, var })
    }

    pub fn exponential(rate: f64) -> Result<Self, DistributionError> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(DistributionError::InvalidParameters(format!("exponential needs rate > 0, got {rate}")));
        }
        Ok(Self::Exponential { rate })
    }

    /// Unit-variance uniform on [-sqrt(3), sqrt(3)].
    pub fn unit_uniform() -> Self {
        let s = 3.0f64.sqrt();
        Self::Uniform { a: -s, b: s }
    }

    pub fn standard_gaussian() -> Self {
        Self::Gaussian { mean: 0.0, var: 1.0 }
    }

    pub fn unit_exponential() -> Self {
        Self::Exponential { rate: 1.0 }
    }

    /// F_X(x); a total function of x.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Self::Gaussian { mean, var } => math::normal_cdf((x - mean) / var.sqrt()),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
        }
    }

    /// Density f_X(x).
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { a, b } => {
                if x >= a && x <= b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Self::Gaussian { mean, var } => {
                let s = var.sqrt();
                math::normal_pdf((x - mean) / s) / s
            }
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
        }
    }

    /// ln f_X(x); -inf outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { a, b } => {
                if x >= a && x <= b {
                    -(b - a).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::Gaussian { mean, var } => {
                let z = (x - mean) / var.sqrt();
                -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI * var).ln()
            }
            Self::Exponential { rate } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    rate.ln() - rate * x
                }
            }
        }
    }

    /// Q(w) = inf{x : F_X(x) >= w}, for w in (0, 1).
    pub fn quantile(&self, w: f64) -> Result<f64, DistributionError> {
        if !(w > 0.0 && w < 1.0) {
            return Err(DistributionError::QuantileDomain(w));
        }
        Ok(match *self {
            Self::Uniform { a, b } => a + w * (b - a),
            Self::Gaussian { mean, var } => mean + var.sqrt() * math::inv_normal_cdf(w),
            Self::Exponential { rate } => -(-w).ln_1p() / rate,
        })
    }

    /// Closed-form differential entropy h(X) in bits.
    pub fn differential_entropy_bits(&self) -> f64 {
        match *self {
            Self::Uniform { a, b } => (b - a).log2(),
            Self::Gaussian { var, .. } => {
                0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).log2()
            }
            Self::Exponential { rate } => (std::f64::consts::E / rate).log2(),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Uniform { a, b } => 0.5 * (a + b),
            Self::Gaussian { mean, .. } => mean,
            Self::Exponential { rate } => 1.0 / rate,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Uniform { a, b } => (b - a) * (b - a) / 12.0,
            Self::Gaussian { var, .. } => var,
            Self::Exponential { rate } => 1.0 / (rate * rate),
        }
    }

    /// An interval carrying all probability mass up to ~1e-16 per tail;
    /// used to truncate quadratures and quantizer supports.
    pub fn effective_support(&self) -> (f64, f64) {
        match *self {
            Self::Uniform { a, b } => (a, b),
            Self::Gaussian { mean, var } => {
                let s = var.sqrt();
                (mean - 9.0 * s, mean + 9.0 * s)
            }
            Self::Exponential { rate } => (0.0, 40.0 / rate),
        }
    }

    /// Draws `n` i.i.d. samples via the inverse-cdf method, so seeds are
    /// portable across families.
    pub fn sample(&self, n: usize, seed: SeedSpec) -> Vec<f64> {
        let mut rng = seed.rng();
        (0..n).map(|_| self.sample_one(&mut rng)).collect()
    }

    pub fn sample_one(&self, rng: &mut impl RngCore) -> f64 {
        self.quantile(open_unit_uniform(rng)).expect("open-interval uniform")
    }

    /// Parses the JSON object {"family": "...", "params": {...}} and
    /// validates the parameters.
    pub fn from_json(text: &str) -> Result<Self, DistributionError> {
        let parent: ContinuousParent = serde_json::from_str(text)
            .map_err(|e| DistributionError::InvalidParameters(format!("bad parent JSON: {e}")))?;
        match parent {
            Self::Uniform { a, b } => Self::uniform(a, b),
            Self::Gaussian { mean, var } => Self::gaussian(mean, var),
            Self::Exponential { rate } => Self::exponential(rate),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn parents() -> [ContinuousParent; 3] {
        [
            ContinuousParent::unit_uniform(),
            ContinuousParent::standard_gaussian(),
            ContinuousParent::unit_exponential(),
        ]
    }

    #[test]
    fn cdf_symmetry_points() {
        assert_abs_diff_eq!(ContinuousParent::unit_uniform().cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ContinuousParent::standard_gaussian().cdf(0.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn exponential_cdf_matches_numeric_integral() {
        // Closed form 1 - e^{-1} against quadrature of the pdf.
        let p = ContinuousParent::unit_exponential();
        let direct = p.cdf(1.0);
        assert_abs_diff_eq!(direct, 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        let integral = math::integrate(&|x| p.pdf(x), 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(direct, integral, epsilon = 1e-10);
    }

    #[test]
    fn quantile_examples() {
        let u01 = ContinuousParent::uniform(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(u01.quantile(0.25).unwrap(), 0.25, epsilon = 1e-15);
        let g = ContinuousParent::standard_gaussian();
        assert_abs_diff_eq!(g.quantile(0.5).unwrap(), 0.0, epsilon = 1e-15);
        let e = ContinuousParent::unit_exponential();
        assert_abs_diff_eq!(e.quantile(1.0 - (-1.0f64).exp()).unwrap(), 1.0, epsilon = 1e-12);
        assert!(e.quantile(0.0).is_err());
        assert!(e.quantile(1.0).is_err());
    }

    #[test]
    fn cdf_quantile_identity_on_grid() {
        for p in parents() {
            for i in 1..1000 {
                let w = i as f64 / 1000.0;
                let x = p.quantile(w).unwrap();
                assert_abs_diff_eq!(p.cdf(x), w, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn differential_entropies_closed_form() {
        assert_abs_diff_eq!(
            ContinuousParent::uniform(0.0, 1.0).unwrap().differential_entropy_bits(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            ContinuousParent::standard_gaussian().differential_entropy_bits(),
            2.047095585180641,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            ContinuousParent::unit_exponential().differential_entropy_bits(),
            std::f64::consts::E.log2(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn monte_carlo_entropy_estimate_matches_closed_form() {
        // -(1/n) sum log2 f(x_i) estimates h(X) within 1e-2 bits at n = 1e6.
        let n = 1_000_000;
        for (stream, p) in parents().into_iter().enumerate() {
            let xs = p.sample(n, SeedSpec::new(7, stream as u64));
            let est = -xs.iter().map(|&x| p.ln_pdf(x)).sum::<f64>() / n as f64 * math::LOG2_E;
            assert_abs_diff_eq!(est, p.differential_entropy_bits(), epsilon = 1e-2);
        }
    }

    #[test]
    fn monte_carlo_moments_match() {
        // Mean and variance within 5 standard errors at n = 1e5.
        let n = 100_000;
        for (stream, p) in parents().into_iter().enumerate() {
            let xs = p.sample(n, SeedSpec::new(11, stream as u64));
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            let se_mean = (p.variance() / n as f64).sqrt();
            assert!((mean - p.mean()).abs() < 5.0 * se_mean, "mean off for {p:?}");
            // Crude standard error for the variance estimate.
            let se_var = p.variance() * (2.0 / n as f64).sqrt() * 3.0;
            assert!((var - p.variance()).abs() < 5.0 * se_var, "variance off for {p:?}");
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let p = ContinuousParent::standard_gaussian();
        let a = p.sample(100, SeedSpec::new(42, 1));
        let b = p.sample(100, SeedSpec::new(42, 1));
        let c = p.sample(100, SeedSpec::new(42, 2));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_and_empty_sampling() {
        let pmf = DiscretePmf::new(vec![1.0]).unwrap();
        assert_eq!(pmf.sample(5, SeedSpec::new(0, 0)), vec![1, 1, 1, 1, 1]);
        let p = ContinuousParent::standard_gaussian();
        assert!(p.sample(0, SeedSpec::new(0, 0)).is_empty());
    }

    #[test]
    fn gaussian_sample_mean_within_clt_band() {
        // 3 sigma / sqrt(n) band at n = 1e6.
        let n = 1_000_000;
        let xs = ContinuousParent::standard_gaussian().sample(n, SeedSpec::new(3, 0));
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4e-3, "sample mean {mean}");
    }

    #[test]
    fn parent_json_roundtrip() {
        let g = ContinuousParent::gaussian(0.0, 1.0).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"family\":\"gaussian\""));
        assert_eq!(ContinuousParent::from_json(&s).unwrap(), g);
        assert!(ContinuousParent::from_json("{\"family\":\"uniform\",\"params\":{\"a\":1.0,\"b\":0.0}}").is_err());
    }

    #[test]
    fn pmf_validation() {
        assert!(DiscretePmf::new(vec![]).is_err());
        assert!(DiscretePmf::new(vec![0.5, 0.6]).is_err());
        assert!(DiscretePmf::new(vec![-0.1, 1.1]).is_err());
        assert!(DiscretePmf::new(vec![0.25, 0.5, 0.25]).is_ok());
    }
}
