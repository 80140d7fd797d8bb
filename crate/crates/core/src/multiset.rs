//! Multiset and type-class machinery: the order/value decomposition of a
//! sequence, type vectors with exact counting and colexicographic
//! ranking, and exact/asymptotic multiset entropies.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::distributions::DiscretePmf;
use crate::math;

/// Cap on the number of type classes an exact enumeration will touch.
pub const TYPE_ENUMERATION_GUARD: u64 = 10_000_000;

/// Cap on the number of sequence outcomes an exhaustive decomposition
/// check will touch.
pub const SEQUENCE_ENUMERATION_GUARD: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum MultisetError {
    /// A letter fell outside {1..alphabet_size}.
    LetterOutOfRange { letter: u32, alphabet_size: usize },
    /// A rank was not in [0, type_count).
    RankOutOfRange,
    /// Dimension mismatch between a type vector and a pmf.
    DimensionMismatch { type_len: usize, pmf_len: usize },
    /// An exact enumeration would exceed its guard.
    EnumerationGuard { needed: BigUint, guard: u64, hint: String },
    /// Parameter outside an operation's precondition.
    InvalidParameter(String),
}

impl fmt::Display for MultisetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LetterOutOfRange { letter, alphabet_size } => {
                write!(f, "letter {letter} outside alphabet {{1..{alphabet_size}}}")
            }
            Self::RankOutOfRange => write!(f, "rank out of range"),
            Self::DimensionMismatch { type_len, pmf_len } => {
                write!(f, "type has {type_len} entries but pmf has {pmf_len}")
            }
            Self::EnumerationGuard { needed, guard, hint } => {
                write!(f, "enumeration of {needed} outcomes exceeds guard {guard}; {hint}")
            }
            Self::InvalidParameter(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for MultisetError {}

// ---------------------------------------------------------------------------
// Order / value decomposition
// ---------------------------------------------------------------------------

/// The order half of the sequence decomposition: `perm[k]` is the 1-based
/// original position of the k-th smallest element (ties broken by original
/// index ascending, so the map sequence -> (order, sorted) is deterministic).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderIndex {
    perm: Vec<usize>,
}

impl OrderIndex {
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

/// Splits a sequence into its order and its nondecreasing value list.
pub fn decompose<T: PartialOrd + Copy>(seq: &[T]) -> (OrderIndex, Vec<T>) {
    let mut idx: Vec<usize> = (0..seq.len()).collect();
    idx.sort_by(|&i, &j| seq[i].partial_cmp(&seq[j]).expect("total order on letters"));
    let sorted = idx.iter().map(|&i| seq[i]).collect();
    let perm = idx.into_iter().map(|i| i + 1).collect();
    (OrderIndex { perm }, sorted)
}

/// Inverse of [`decompose`].
pub fn recompose<T: Copy>(order: &OrderIndex, sorted: &[T]) -> Vec<T> {
    assert_eq!(order.len(), sorted.len());
    let mut out = sorted.to_vec();
    for (k, &pos) in order.perm.iter().enumerate() {
        out[pos - 1] = sorted[k];
    }
    out
}

// ---------------------------------------------------------------------------
// Type vectors
// ---------------------------------------------------------------------------

/// Letter-occurrence counts (k_1, ..., k_|X|) representing a multiset over
/// the alphabet {1..|X|}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeVector {
    counts: Vec<u64>,
}

impl TypeVector {
    pub fn new(counts: Vec<u64>) -> Result<Self, MultisetError> {
        if counts.is_empty() {
            return Err(MultisetError::InvalidParameter("alphabet must be nonempty".into()));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// Total count n.
    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Counts letter occurrences; order-invariant by construction.
pub fn type_of(seq: &[u32], alphabet_size: usize) -> Result<TypeVector, MultisetError> {
    let mut counts = vec![0u64; alphabet_size.max(1)];
    if alphabet_size == 0 {
        return Err(MultisetError::InvalidParameter("alphabet must be nonempty".into()));
    }
    for &x in seq {
        if x == 0 || x as usize > alphabet_size {
            return Err(MultisetError::LetterOutOfRange { letter: x, alphabet_size });
        }
        counts[x as usize - 1] += 1;
    }
    Ok(TypeVector { counts })
}

/// Exact binomial coefficient C(n, k).
pub fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

/// Number of distinct types of n letters over an alphabet of the given
/// size: C(n + |X| - 1, |X| - 1).
pub fn type_count(n: u64, alphabet_size: usize) -> BigUint {
    assert!(alphabet_size >= 1);
    big_binomial(n + alphabet_size as u64 - 1, alphabet_size as u64 - 1)
}

/// Colexicographic rank of a type among all types of the same (n, |X|).
///
/// The order sorts by the last count, then recursively by the remaining
/// prefix, which makes the rank a sum of type-count terms.
pub fn type_rank(t: &TypeVector) -> BigUint {
    let mut rank = BigUint::zero();
    let mut n = t.n();
    let counts = t.counts();
    for pos in (1..counts.len()).rev() {
        let k = counts[pos];
        // Types whose count at `pos` is smaller come first.
        for j in 0..k {
            rank += type_count(n - j, pos);
        }
        n -= k;
    }
    rank
}

/// Inverse of [`type_rank`].
pub fn type_unrank(rank: &BigUint, n: u64, alphabet_size: usize) -> Result<TypeVector, MultisetError> {
    if alphabet_size == 0 {
        return Err(MultisetError::InvalidParameter("alphabet must be nonempty".into()));
    }
    if *rank >= type_count(n, alphabet_size) {
        return Err(MultisetError::RankOutOfRange);
    }
    let mut rank = rank.clone();
    let mut remaining = n;
    let mut counts = vec![0u64; alphabet_size];
    for pos in (1..alphabet_size).rev() {
        let mut k = 0u64;
        loop {
            let block = type_count(remaining - k, pos);
            if rank < block {
                break;
            }
            rank -= block;
            k += 1;
        }
        counts[pos] = k;
        remaining -= k;
    }
    counts[0] = remaining;
    Ok(TypeVector { counts })
}

/// Visits every type of (n, |X|) in colexicographic (rank) order.
pub fn for_each_type<F: FnMut(&[u64])>(n: u64, alphabet_size: usize, mut f: F) {
    assert!(alphabet_size >= 1);
    let mut scratch = vec![0u64; alphabet_size];
    fn rec<F: FnMut(&[u64])>(n: u64, pos: usize, scratch: &mut [u64], f: &mut F) {
        if pos == 0 {
            scratch[0] = n;
            f(scratch);
            return;
        }
        for k in 0..=n {
            scratch[pos] = k;
            rec(n - k, pos - 1, scratch, f);
        }
    }
    rec(n, alphabet_size - 1, &mut scratch, &mut f);
}

// ---------------------------------------------------------------------------
// Multiset entropies
// ---------------------------------------------------------------------------

/// Multinomial probability of a type under an i.i.d. parent pmf.
pub fn multinomial_type_pmf(t: &TypeVector, p: &DiscretePmf) -> Result<f64, MultisetError> {
    if t.alphabet_size() != p.alphabet_size() {
        return Err(MultisetError::DimensionMismatch {
            type_len: t.alphabet_size(),
            pmf_len: p.alphabet_size(),
        });
    }
    Ok(multinomial_pmf_raw(t.counts(), p.probs()))
}

fn multinomial_pmf_raw(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut ln = math::ln_factorial(n);
    for (&k, &p) in counts.iter().zip(probs) {
        if k == 0 {
            continue;
        }
        if p == 0.0 {
            return 0.0;
        }
        ln += k as f64 * p.ln() - math::ln_factorial(k);
    }
    ln.exp()
}

fn guard_types(n: u64, alphabet_size: usize, hint: &str) -> Result<(), MultisetError> {
    let count = type_count(n, alphabet_size);
    if count > BigUint::from(TYPE_ENUMERATION_GUARD) {
        return Err(MultisetError::EnumerationGuard {
            needed: count,
            guard: TYPE_ENUMERATION_GUARD,
            hint: hint.to_string(),
        });
    }
    Ok(())
}

/// Exact multiset entropy H({X}) in bits by enumerating every type class.
///
/// Guarded: errors when the type alphabet exceeds [`TYPE_ENUMERATION_GUARD`];
/// large n should use [`binomial_entropy_asymptotic`].
pub fn multiset_entropy_exact(n: u64, p: &DiscretePmf) -> Result<f64, MultisetError> {
    guard_types(n, p.alphabet_size(), "use the asymptotic entropy instead")?;
    let mut h = 0.0;
    for_each_type(n, p.alphabet_size(), |counts| {
        h -= math::xlog2x(multinomial_pmf_raw(counts, p.probs()));
    });
    Ok(h)
}

/// Leading term of the binomial entropy: (1/2) log2(2 pi e p(1-p) n) bits.
pub fn binomial_entropy_asymptotic(n: u64, p: f64) -> Result<f64, MultisetError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MultisetError::InvalidParameter(format!("p must lie strictly in (0,1), got {p}")));
    }
    if n == 0 {
        return Err(MultisetError::InvalidParameter("n must be >= 1".into()));
    }
    Ok(0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * p * (1.0 - p) * n as f64).log2())
}

/// Exact entropy of Binomial(n, p) in bits.
pub fn exact_binomial_entropy_bits(n: u64, p: f64) -> f64 {
    let table = math::ln_factorial_table(n as usize);
    binomial_entropy_with_table(n, p, &table)
}

/// Exact binomial entropy with a caller-supplied ln-factorial table
/// (for integrands that sweep p at fixed n). Terms below e^-46 are
/// dropped; the tail they carry is far below every tolerance used here.
pub fn binomial_entropy_with_table(n: u64, p: f64, lnfact: &[f64]) -> f64 {
    debug_assert!(lnfact.len() as u64 > n);
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    let lnp = p.ln();
    let lnq = (-p).ln_1p();
    let term = |z: u64| -> f64 {
        let ln = lnfact[n as usize] - lnfact[z as usize] - lnfact[(n - z) as usize]
            + z as f64 * lnp
            + (n - z) as f64 * lnq;
        if ln < -46.0 {
            f64::NAN // sentinel: below cutoff
        } else {
            ln.exp() * ln
        }
    };
    let mode = ((n as f64 + 1.0) * p).floor().min(n as f64) as u64;
    let mut acc = 0.0;
    let mut z = mode;
    loop {
        let t = term(z);
        if t.is_nan() {
            break;
        }
        acc += t;
        if z == 0 {
            break;
        }
        z -= 1;
    }
    let mut z = mode + 1;
    while z <= n {
        let t = term(z);
        if t.is_nan() {
            break;
        }
        acc += t;
        z += 1;
    }
    -acc * math::LOG2_E
}

// ---------------------------------------------------------------------------
// Entropy decomposition (order/value independence)
// ---------------------------------------------------------------------------

/// Explicit distribution over length-n sequences on {1..|X|}.
#[derive(Debug, Clone)]
pub struct SequenceDistribution {
    outcomes: Vec<(Vec<u32>, f64)>,
    n: usize,
    alphabet_size: usize,
}

impl SequenceDistribution {
    pub fn new(outcomes: Vec<(Vec<u32>, f64)>, alphabet_size: usize) -> Result<Self, MultisetError> {
        if outcomes.is_empty() {
            return Err(MultisetError::InvalidParameter("need at least one outcome".into()));
        }
        let n = outcomes[0].0.len();
        let mut total = 0.0;
        for (seq, prob) in &outcomes {
            if seq.len() != n {
                return Err(MultisetError::InvalidParameter("sequences must share one length".into()));
            }
            for &x in seq {
                if x == 0 || x as usize > alphabet_size {
                    return Err(MultisetError::LetterOutOfRange { letter: x, alphabet_size });
                }
            }
            if *prob < 0.0 {
                return Err(MultisetError::InvalidParameter("negative probability".into()));
            }
            total += prob;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(MultisetError::InvalidParameter(format!("probabilities sum to {total}")));
        }
        Ok(Self { outcomes, n, alphabet_size })
    }

    /// The i.i.d. product distribution of `pmf` over length-n sequences,
    /// enumerated exhaustively (guard: |X|^n outcomes).
    pub fn iid(pmf: &DiscretePmf, n: usize) -> Result<Self, MultisetError> {
        let m = pmf.alphabet_size();
        let total = BigUint::from(m).pow(n as u32);
        if total > BigUint::from(SEQUENCE_ENUMERATION_GUARD) {
            return Err(MultisetError::EnumerationGuard {
                needed: total,
                guard: SEQUENCE_ENUMERATION_GUARD,
                hint: "reduce n or the alphabet".to_string(),
            });
        }
        let count = total.to_usize().unwrap();
        let mut outcomes = Vec::with_capacity(count);
        let mut seq = vec![1u32; n];
        for idx in 0..count {
            let mut rem = idx;
            let mut prob = 1.0;
            for slot in seq.iter_mut() {
                let digit = rem % m;
                rem /= m;
                *slot = digit as u32 + 1;
                prob *= pmf.probs()[digit];
            }
            outcomes.push((seq.clone(), prob));
        }
        Ok(Self { outcomes, n, alphabet_size: m })
    }

    pub fn sequence_length(&self) -> usize {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }
}

/// The three entropies of the order/value split, with the residual of the
/// chain identity H(seq) = H(multiset) + H(order | multiset).
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub h_sequence: f64,
    pub h_multiset: f64,
    pub h_order: f64,
    /// h_sequence - h_multiset - h_order; zero up to roundoff whenever the
    /// bookkeeping is consistent.
    pub residual: f64,
    /// Whether the input was exchangeable (all sequences of a type class
    /// equiprobable).
    pub exchangeable: bool,
}

/// Exhaustively computes sequence, multiset, and conditional order
/// entropies for an explicit joint distribution.
///
/// The order entropy is H(J | {X}): with a deterministic tie-break, ties
/// make J and the multiset dependent, so the marginal order entropy would
/// not satisfy the decomposition; the conditional one always does.
pub fn entropy_decomposition_check(joint: &SequenceDistribution) -> DecompositionReport {
    let mut h_seq = 0.0;
    // Group by type.
    let mut classes: HashMap<TypeVector, Vec<f64>> = HashMap::new();
    for (seq, prob) in &joint.outcomes {
        h_seq -= math::xlog2x(*prob);
        let t = type_of(seq, joint.alphabet_size).expect("validated letters");
        classes.entry(t).or_default().push(*prob);
    }
    let mut h_multi = 0.0;
    let mut h_order = 0.0;
    let mut exchangeable = true;
    for probs in classes.values() {
        let class_p: f64 = probs.iter().sum();
        h_multi -= math::xlog2x(class_p);
        if class_p > 0.0 {
            // H(J | {X} = this class), weighted by the class probability.
            for &p in probs {
                if p > 0.0 {
                    h_order -= p * (p / class_p).log2();
                }
            }
            let expected = class_p / probs.len() as f64;
            if probs.iter().any(|&p| (p - expected).abs() > 1e-12 * (1.0 + expected)) {
                exchangeable = false;
            }
        }
    }
    DecompositionReport {
        h_sequence: h_seq,
        h_multiset: h_multi,
        h_order,
        residual: h_seq - h_multi - h_order,
        exchangeable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::SeedSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn decompose_example() {
        let (order, sorted) = decompose(&[3, 1, 2]);
        assert_eq!(sorted, vec![1, 2, 3]);
        assert_eq!(order.perm(), &[2, 3, 1]);
        assert_eq!(recompose(&order, &sorted), vec![3, 1, 2]);
    }

    #[test]
    fn decompose_all_ties_is_identity() {
        let (order, sorted) = decompose(&[5, 5, 5]);
        assert_eq!(sorted, vec![5, 5, 5]);
        assert_eq!(order.perm(), &[1, 2, 3]);
    }

    #[test]
    fn type_of_examples() {
        assert_eq!(type_of(&[1, 2, 1], 2).unwrap().counts(), &[2, 1]);
        assert_eq!(type_of(&[], 3).unwrap().counts(), &[0, 0, 0]);
        assert!(type_of(&[4], 3).is_err());
        // Permutation invariance over all 3! orderings.
        let perms: [[u32; 3]; 6] = [
            [1, 2, 3],
            [1, 3, 2],
            [2, 1, 3],
            [2, 3, 1],
            [3, 1, 2],
            [3, 2, 1],
        ];
        for p in perms {
            assert_eq!(type_of(&p, 3).unwrap().counts(), &[1, 1, 1]);
        }
    }

    #[test]
    fn type_count_small_and_bruteforce() {
        assert_eq!(type_count(3, 2), BigUint::from(4u32));
        assert_eq!(type_count(2, 3), BigUint::from(6u32));
        // Brute-force enumeration oracle at n=12, |X|=8.
        let mut brute = 0u64;
        for_each_type(12, 8, |_| brute += 1);
        assert_eq!(type_count(12, 8), BigUint::from(brute));
        // Eq-5-style bound.
        assert!(type_count(12, 8) <= BigUint::from(13u64).pow(8));
    }

    #[test]
    fn rank_unrank_bijection_exhaustive() {
        // n <= 8, |X| <= 4 exhaustive; includes the 165-type case (8, 4).
        for m in 1usize..=4 {
            for n in 0u64..=8 {
                let total = type_count(n, m).to_u64().unwrap();
                let mut seen = vec![false; total as usize];
                let mut expected_rank = BigUint::zero();
                for_each_type(n, m, |counts| {
                    let t = TypeVector::new(counts.to_vec()).unwrap();
                    let r = type_rank(&t);
                    // Enumeration order is the colex rank order.
                    assert_eq!(r, expected_rank);
                    expected_rank += 1u32;
                    let ri = r.to_usize().unwrap();
                    assert!(!seen[ri]);
                    seen[ri] = true;
                    assert_eq!(type_unrank(&r, n, m).unwrap(), t);
                });
                assert!(seen.into_iter().all(|b| b));
            }
        }
        assert_eq!(type_count(8, 4), BigUint::from(165u32));
    }

    #[test]
    fn unrank_rejects_out_of_range() {
        let r = type_count(3, 2);
        assert_eq!(type_unrank(&r, 3, 2), Err(MultisetError::RankOutOfRange));
        assert_eq!(type_unrank(&BigUint::zero(), 1, 1).unwrap().counts(), &[1]);
    }

    #[test]
    fn multinomial_pmf_examples_and_normalization() {
        let p = DiscretePmf::new(vec![0.5, 0.5]).unwrap();
        let t = TypeVector::new(vec![1, 1]).unwrap();
        assert_abs_diff_eq!(multinomial_type_pmf(&t, &p).unwrap(), 0.5, epsilon = 1e-15);
        let t = TypeVector::new(vec![2, 0]).unwrap();
        assert_abs_diff_eq!(multinomial_type_pmf(&t, &p).unwrap(), 0.25, epsilon = 1e-15);

        let p = DiscretePmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let mut total = 0.0;
        for_each_type(6, 3, |counts| {
            total += multinomial_pmf_raw(counts, p.probs());
        });
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn multiset_entropy_small_cases() {
        let fair = DiscretePmf::new(vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(multiset_entropy_exact(1, &fair).unwrap(), 1.0, epsilon = 1e-12);
        // n=2: type probs 1/4, 1/2, 1/4.
        assert_abs_diff_eq!(multiset_entropy_exact(2, &fair).unwrap(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn entropy_bounds_chain() {
        // H((X)) - log2 n! <= H({X}) <= |X| log2(n+1) on enumerable cases.
        for (probs, n) in [
            (vec![0.5, 0.5], 6u64),
            (vec![0.2, 0.8], 9),
            (vec![0.2, 0.3, 0.5], 7),
        ] {
            let p = DiscretePmf::new(probs).unwrap();
            let h_multi = multiset_entropy_exact(n, &p).unwrap();
            let h_seq = n as f64 * p.entropy_bits();
            let lower = h_seq - math::log2_factorial(n);
            let upper = p.alphabet_size() as f64 * ((n + 1) as f64).log2();
            assert!(lower <= h_multi + 1e-9);
            assert!(h_multi <= upper + 1e-9);
        }
    }

    #[test]
    fn entropy_permutation_invariant_in_pmf() {
        let a = DiscretePmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let b = DiscretePmf::new(vec![0.5, 0.2, 0.3]).unwrap();
        let ha = multiset_entropy_exact(5, &a).unwrap();
        let hb = multiset_entropy_exact(5, &b).unwrap();
        assert_abs_diff_eq!(ha, hb, epsilon = 1e-12);
    }

    #[test]
    fn entropy_guard_trips() {
        let p = DiscretePmf::new(vec![0.125; 8]).unwrap();
        // C(1000+7, 7) is far beyond the guard.
        assert!(matches!(
            multiset_entropy_exact(1000, &p),
            Err(MultisetError::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn asymptotic_binomial_entropy() {
        // Zero exactly when n p (1-p) = 1/(2 pi e).
        let target = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E);
        let p = 0.5 * (1.0 - (1.0 - 4.0 * target).sqrt());
        assert_abs_diff_eq!(binomial_entropy_asymptotic(1, p).unwrap(), 0.0, epsilon = 1e-12);
        assert!(binomial_entropy_asymptotic(10, 0.0).is_err());
        assert!(binomial_entropy_asymptotic(10, 1.0).is_err());

        // Agreement with the exact entropy, improving in n.
        let exact100 = exact_binomial_entropy_bits(100, 0.5);
        let asym100 = binomial_entropy_asymptotic(100, 0.5).unwrap();
        assert!((exact100 - asym100).abs() < 0.01, "gap {}", exact100 - asym100);
        let exact400 = exact_binomial_entropy_bits(400, 0.5);
        let asym400 = binomial_entropy_asymptotic(400, 0.5).unwrap();
        assert!((exact400 - asym400).abs() < (exact100 - asym100).abs());
    }

    #[test]
    fn exact_vs_enumerated_binomial_entropy() {
        // The windowed summation against the multiset entropy at |X|=2
        // (binary multiset entropy is the binomial entropy).
        let p = DiscretePmf::new(vec![0.3, 0.7]).unwrap();
        let via_types = multiset_entropy_exact(20, &p).unwrap();
        let via_binomial = exact_binomial_entropy_bits(20, 0.3);
        assert_abs_diff_eq!(via_types, via_binomial, epsilon = 1e-10);
        // Asymptotic agreement within 0.05 bits at n=20, p=1/2.
        let fair = DiscretePmf::new(vec![0.5, 0.5]).unwrap();
        let exact = multiset_entropy_exact(20, &fair).unwrap();
        let asym = binomial_entropy_asymptotic(20, 0.5).unwrap();
        assert!((exact - asym).abs() < 0.05);
    }

    #[test]
    fn decomposition_bernoulli_pair() {
        let pmf = DiscretePmf::new(vec![0.5, 0.5]).unwrap();
        let joint = SequenceDistribution::iid(&pmf, 2).unwrap();
        let rep = entropy_decomposition_check(&joint);
        assert_abs_diff_eq!(rep.h_sequence, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.h_multiset, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.h_order, 0.5, epsilon = 1e-12);
        assert!(rep.exchangeable);
        assert_abs_diff_eq!(rep.residual, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn decomposition_deterministic_source() {
        let joint = SequenceDistribution::new(vec![(vec![1, 2], 1.0)], 2).unwrap();
        let rep = entropy_decomposition_check(&joint);
        assert_eq!((rep.h_sequence, rep.h_multiset, rep.h_order), (0.0, 0.0, 0.0));
    }

    #[test]
    fn decomposition_uniform_ternary() {
        let pmf = DiscretePmf::new(vec![1.0 / 3.0; 3]).unwrap();
        let joint = SequenceDistribution::iid(&pmf, 3).unwrap();
        let rep = entropy_decomposition_check(&joint);
        assert_abs_diff_eq!(rep.h_sequence, 3.0 * 3.0f64.log2(), epsilon = 1e-9);
        assert!(rep.exchangeable);
        assert_abs_diff_eq!(rep.residual, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn decomposition_flags_non_exchangeable() {
        let joint = SequenceDistribution::new(vec![(vec![1, 2], 0.75), (vec![2, 1], 0.25)], 2).unwrap();
        let rep = entropy_decomposition_check(&joint);
        assert!(!rep.exchangeable);
        // The chain identity itself still holds.
        assert_abs_diff_eq!(rep.residual, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn iid_guard() {
        let pmf = DiscretePmf::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            SequenceDistribution::iid(&pmf, 21),
            Err(MultisetError::EnumerationGuard { .. })
        ));
    }

    proptest! {
        #[test]
        fn recompose_inverts_decompose(seq in proptest::collection::vec(0u32..50, 1..60)) {
            let (order, sorted) = decompose(&seq);
            prop_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(recompose(&order, &sorted), seq);
        }

        #[test]
        fn type_of_is_permutation_invariant(mut seq in proptest::collection::vec(1u32..5, 0..30)) {
            let t1 = type_of(&seq, 4).unwrap();
            seq.reverse();
            let t2 = type_of(&seq, 4).unwrap();
            prop_assert_eq!(t1, t2);
        }

        #[test]
        fn random_type_roundtrips(n in 0u64..40, m in 1usize..6, salt in any::<u64>()) {
            // One pseudo-random type per case via the sampler.
            let probs = vec![1.0 / m as f64; m];
            let pmf = DiscretePmf::new(probs).unwrap();
            let seq = pmf.sample(n as usize, SeedSpec::new(salt, 0));
            let t = type_of(&seq, m).unwrap();
            let r = type_rank(&t);
            prop_assert!(r < type_count(n, m));
            prop_assert_eq!(type_unrank(&r, n, m).unwrap(), t);
        }
    }
}
