//! Universal multiset coding: dictionary/pattern decomposition, the
//! composition (pattern-type) enumerative code, a histogram run-length
//! code, a concrete n + o(n) multiset codec for countable alphabets, and
//! log-blocklength normalized redundancy calculators.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::bitstream::{
    elias_delta_decode, elias_delta_encode, BitReader, Bitstream, BitstreamError,
};
use crate::math;
use crate::multiset;

#[derive(Debug, Clone, PartialEq)]
pub enum UniversalError {
    /// Operation needs a nonempty input.
    EmptyInput,
    /// Letters must be positive integers.
    NonPositiveLetter,
    /// Rank outside [0, 2^{n-1}).
    RankOutOfRange,
    /// Stream-level problem.
    Stream(BitstreamError),
    /// Parameter outside an operation's precondition.
    InvalidParameter(String),
}

impl fmt::Display for UniversalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyInput => write!(f, "input must be nonempty"),
            Self::NonPositiveLetter => write!(f, "letters must be positive integers"),
            Self::RankOutOfRange => write!(f, "composition rank out of range"),
            Self::Stream(e) => write!(f, "{e}"),
            Self::InvalidParameter(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for UniversalError {}

impl From<BitstreamError> for UniversalError {
    fn from(e: BitstreamError) -> Self {
        Self::Stream(e)
    }
}

// ---------------------------------------------------------------------------
// Dictionary / pattern decomposition
// ---------------------------------------------------------------------------

/// Distinct letters in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    letters: Vec<u64>,
}

impl Dictionary {
    pub fn letters(&self) -> &[u64] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Sequence of 1-based dictionary indices: psi_1 = 1 and each entry exceeds
/// the running maximum by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    indices: Vec<usize>,
}

impl Pattern {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Multiplicity of each dictionary index in order of first appearance;
    /// this is the pattern's type, a composition of n.
    pub fn pattern_type(&self) -> Composition {
        let k = self.indices.iter().max().copied().unwrap_or(0);
        let mut parts = vec![0u64; k];
        for &i in &self.indices {
            parts[i - 1] += 1;
        }
        Composition { parts }
    }
}

/// Splits a sequence into dictionary and pattern.
pub fn dict_pattern_decompose(seq: &[u64]) -> Result<(Dictionary, Pattern), UniversalError> {
    if seq.is_empty() {
        return Err(UniversalError::EmptyInput);
    }
    let mut letters = Vec::new();
    let mut indices = Vec::with_capacity(seq.len());
    for &x in seq {
        match letters.iter().position(|&d| d == x) {
            Some(i) => indices.push(i + 1),
            None => {
                letters.push(x);
                indices.push(letters.len());
            }
        }
    }
    Ok((Dictionary { letters }, Pattern { indices }))
}

/// Inverse of [`dict_pattern_decompose`].
pub fn dict_pattern_recompose(dict: &Dictionary, pattern: &Pattern) -> Result<Vec<u64>, UniversalError> {
    pattern
        .indices
        .iter()
        .map(|&i| {
            dict.letters
                .get(i - 1)
                .copied()
                .ok_or_else(|| UniversalError::InvalidParameter("pattern index outside dictionary".into()))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Compositions (pattern types)
// ---------------------------------------------------------------------------

/// Ordered list of positive parts summing to n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    parts: Vec<u64>,
}

impl Composition {
    pub fn new(parts: Vec<u64>) -> Result<Self, UniversalError> {
        if parts.is_empty() {
            return Err(UniversalError::EmptyInput);
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(UniversalError::InvalidParameter("parts must be positive".into()));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn n(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// The n-1 separator bits: bit j (j = 1..n-1, MSB first) is set iff a
    /// part boundary falls after position j.
    pub fn separator_bits(&self) -> Vec<bool> {
        let n = self.n();
        let mut bits = vec![false; (n - 1) as usize];
        let mut acc = 0u64;
        for &p in &self.parts[..self.parts.len() - 1] {
            acc += p;
            bits[(acc - 1) as usize] = true;
        }
        bits
    }

    fn from_separator_bits(bits: &[bool]) -> Self {
        let mut parts = Vec::new();
        let mut run = 1u64;
        for &b in bits {
            if b {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        Self { parts }
    }
}

/// Number of compositions of n: exactly 2^{n-1}.
pub fn composition_count(n: u64) -> BigUint {
    assert!(n >= 1);
    BigUint::one() << (n - 1)
}

/// Rank of a composition: its separator bits read as an integer.
pub fn composition_rank(c: &Composition) -> BigUint {
    let mut r = BigUint::zero();
    for b in c.separator_bits() {
        r <<= 1u8;
        if b {
            r |= BigUint::one();
        }
    }
    r
}

/// Inverse of [`composition_rank`].
pub fn composition_unrank(rank: &BigUint, n: u64) -> Result<Composition, UniversalError> {
    if n == 0 {
        return Err(UniversalError::InvalidParameter("n must be >= 1".into()));
    }
    if *rank >= composition_count(n) {
        return Err(UniversalError::RankOutOfRange);
    }
    let width = (n - 1) as u64;
    let bits: Vec<bool> = (0..width).rev().map(|i| rank.bit(i)).collect();
    Ok(Composition::from_separator_bits(&bits))
}

// ---------------------------------------------------------------------------
// Histogram run-length code
// ---------------------------------------------------------------------------

/// Encodes a histogram left to right: k zeros for the k occurrences of a
/// bin, then a single one to move to the next bin. Length is exactly
/// sum(counts) + #bins.
pub fn histogram_encode(counts: &[u64]) -> Bitstream {
    let mut bs = Bitstream::new();
    for &k in counts {
        for _ in 0..k {
            bs.push_bit(false);
        }
        bs.push_bit(true);
    }
    bs
}

/// Inverse of [`histogram_encode`]; the stream must end in a one.
pub fn histogram_decode(bs: &Bitstream) -> Result<Vec<u64>, UniversalError> {
    let mut counts = Vec::new();
    let mut run = 0u64;
    let mut last = true;
    for b in bs.iter_bits() {
        if b {
            counts.push(run);
            run = 0;
        } else {
            run += 1;
        }
        last = b;
    }
    if !last && !bs.is_empty() {
        return Err(UniversalError::Stream(BitstreamError::Malformed(
            "histogram stream must end in 1".into(),
        )));
    }
    Ok(counts)
}

// ---------------------------------------------------------------------------
// Universal multiset codec
// ---------------------------------------------------------------------------

/// Encodes a multiset of positive integers in n + o(n) bits.
///
/// Layout: Elias-delta of n, then the n-1 separator bits of the pattern
/// type of the sorted multiset (its composition code), then Elias-delta
/// codes of the first differences of the sorted distinct letters. The
/// result depends only on the multiset, never on input order.
pub fn universal_encode(multiset: &[u64]) -> Result<Bitstream, UniversalError> {
    if multiset.is_empty() {
        return Err(UniversalError::EmptyInput);
    }
    if multiset.iter().any(|&x| x == 0) {
        return Err(UniversalError::NonPositiveLetter);
    }
    let mut sorted = multiset.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as u64;

    let mut bs = Bitstream::new();
    elias_delta_encode(&mut bs, n);

    // Multiplicities of the sorted distinct letters form the pattern type;
    // write its separator bits directly.
    let mut distinct = Vec::new();
    let mut multiplicities: Vec<u64> = Vec::new();
    for &x in &sorted {
        if distinct.last() == Some(&x) {
            *multiplicities.last_mut().unwrap() += 1;
        } else {
            distinct.push(x);
            multiplicities.push(1);
        }
    }
    let composition = Composition { parts: multiplicities };
    for b in composition.separator_bits() {
        bs.push_bit(b);
    }

    let mut prev = 0u64;
    for &d in &distinct {
        elias_delta_encode(&mut bs, d - prev);
        prev = d;
    }
    Ok(bs)
}

/// Inverse of [`universal_encode`]; returns the sorted multiset.
pub fn universal_decode(bs: &Bitstream) -> Result<Vec<u64>, UniversalError> {
    let mut r = BitReader::new(bs);
    let n = elias_delta_decode(&mut r)?;
    if n == 0 {
        return Err(UniversalError::Stream(BitstreamError::Malformed("n must be positive".into())));
    }
    let bits: Result<Vec<bool>, _> = (0..n - 1).map(|_| r.read_bit()).collect();
    let composition = Composition::from_separator_bits(&bits?);
    let mut letters = Vec::with_capacity(composition.parts.len());
    let mut prev = 0u64;
    for _ in 0..composition.parts.len() {
        let diff = elias_delta_decode(&mut r)?;
        prev += diff;
        letters.push(prev);
    }
    if r.remaining() != 0 {
        return Err(UniversalError::Stream(BitstreamError::Malformed(
            "trailing bits after dictionary".into(),
        )));
    }
    let mut out = Vec::with_capacity(n as usize);
    for (&letter, &mult) in letters.iter().zip(&composition.parts) {
        for _ in 0..mult {
            out.push(letter);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Log-blocklength normalized redundancy
// ---------------------------------------------------------------------------

/// Probability of each binary type under the uniform mixture of Bernoulli
/// parameters: exactly 1/(n+1) for every type.
pub fn uniform_mixture_type_pmf(n: u64) -> f64 {
    assert!(n >= 1);
    1.0 / (n as f64 + 1.0)
}

/// Endpoint clamp for mixture-entropy integrands.
const THETA_CLAMP: f64 = 1e-9;

/// Conditional type entropy H({X} | Theta) for the binary uniform mixture:
/// the integral over theta of the exact Binomial(n, theta) entropy, in bits.
pub fn binary_conditional_type_entropy(n: u64) -> f64 {
    let table = math::ln_factorial_table(n as usize);
    let f = |theta: f64| multiset::binomial_entropy_with_table(n, theta, &table);
    // Symmetric about 1/2; integrate the left half and double.
    let half = math::integrate(&f, THETA_CLAMP, 0.5, 2.5e-7).unwrap_or_else(|e| e.estimate);
    2.0 * half
}

/// Log-blocklength normalized redundancy of the binary equiprobable-types
/// mixture: [log2(n+1) - H({X}|Theta)] / log2 n.
pub fn normalized_redundancy_binary(n: u64) -> f64 {
    assert!(n >= 2);
    let h_types = ((n + 1) as f64).log2();
    let h_cond = binary_conditional_type_entropy(n);
    (h_types - h_cond) / (n as f64).log2()
}

/// The analytic limit of the normalized redundancy: (|X| - 1)/2.
pub fn normalized_redundancy_general(alphabet_size: usize) -> f64 {
    assert!(alphabet_size >= 2);
    (alphabet_size as f64 - 1.0) / 2.0
}

/// Conditional type entropy for the ternary Dirichlet(1,1,1) mixture (the
/// equiprobable-types mixture), by tensor Gauss-Legendre quadrature over
/// the simplex of the exact trinomial entropy, in bits.
pub fn ternary_conditional_type_entropy(n: u64) -> f64 {
    // Precompute log multinomial coefficients for all (k1, k2).
    let lnfact = math::ln_factorial_table(n as usize);
    let mut types = Vec::new();
    for k1 in 0..=n {
        for k2 in 0..=(n - k1) {
            let k3 = n - k1 - k2;
            let lnc = lnfact[n as usize] - lnfact[k1 as usize] - lnfact[k2 as usize] - lnfact[k3 as usize];
            types.push((k1 as f64, k2 as f64, k3 as f64, lnc));
        }
    }
    let entropy_at = |t1: f64, t2: f64| -> f64 {
        let t3 = 1.0 - t1 - t2;
        if t1 <= 0.0 || t2 <= 0.0 || t3 <= 0.0 {
            return 0.0;
        }
        let (l1, l2, l3) = (t1.ln(), t2.ln(), t3.ln());
        let mut acc = 0.0;
        for &(k1, k2, k3, lnc) in &types {
            let lnp = lnc + k1 * l1 + k2 * l2 + k3 * l3;
            if lnp >= -46.0 {
                acc += lnp.exp() * lnp;
            }
        }
        -acc * math::LOG2_E
    };
    // theta1 = u, theta2 = (1-u) v maps the unit square onto the simplex
    // with Jacobian (1-u); the Dirichlet(1,1,1) density is 2.
    let rule = math::gauss_legendre(64);
    let lo = THETA_CLAMP;
    let hi = 1.0 - THETA_CLAMP;
    let outer = |u: f64| -> f64 {
        let inner = |v: f64| entropy_at(u, (1.0 - u) * v);
        math::gauss_legendre_integrate(&inner, lo, hi, &rule) * (1.0 - u)
    };
    2.0 * math::gauss_legendre_integrate(&outer, lo, hi, &rule)
}

/// Finite-n redundancy ratio for the equiprobable-types mixture at
/// alphabet size 2 or 3 (the desk-scale companion to
/// [`normalized_redundancy_general`]).
pub fn empirical_redundancy_ratio(alphabet_size: usize, n: u64) -> Result<f64, UniversalError> {
    match alphabet_size {
        2 => {
            if n < 2 {
                return Err(UniversalError::InvalidParameter("need n >= 2".into()));
            }
            Ok(normalized_redundancy_binary(n))
        }
        3 => {
            if !(2..=256).contains(&n) {
                return Err(UniversalError::InvalidParameter(
                    "ternary enumeration supported for 2 <= n <= 256".into(),
                ));
            }
            let h_types = multiset::type_count(n, 3)
                .to_f64()
                .expect("small count")
                .log2();
            let h_cond = ternary_conditional_type_entropy(n);
            Ok((h_types - h_cond) / (n as f64).log2())
        }
        other => Err(UniversalError::InvalidParameter(format!(
            "empirical ratio implemented for |X| in {{2,3}}, got {other}"
        ))),
    }
}
