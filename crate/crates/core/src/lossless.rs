//! Lossless multiset codecs for a known parent: a fixed-length enumerative
//! code over type ranks and a Huffman code over the type alphabet.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::bitstream::{BitReader, Bitstream, BitstreamError};
use crate::distributions::DiscretePmf;
use crate::multiset::{
    self, type_count, type_of, type_rank, type_unrank, MultisetError, TypeVector,
    TYPE_ENUMERATION_GUARD,
};

#[derive(Debug, Clone, PartialEq)]
pub enum CodecError {
    /// Underlying multiset error (bad letter, guard, ...).
    Multiset(MultisetError),
    /// Stream-level problem.
    Stream(BitstreamError),
    /// Decoded rank fell outside the type alphabet.
    InvalidRank,
    /// Stream length does not match the fixed code length.
    LengthMismatch { expected_bits: usize, got_bits: usize },
    /// Codeword lookup failed during decode.
    UnknownCodeword,
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Multiset(e) => write!(f, "{e}"),
            Self::Stream(e) => write!(f, "{e}"),
            Self::InvalidRank => write!(f, "decoded rank exceeds the number of types"),
            Self::LengthMismatch { expected_bits, got_bits } => {
                write!(f, "stream has {got_bits} bits, expected {expected_bits}")
            }
            Self::UnknownCodeword => write!(f, "bits do not form a codeword"),
        }
    }
}

impl std::error::Error for CodecError {}

impl From<MultisetError> for CodecError {
    fn from(e: MultisetError) -> Self {
        Self::Multiset(e)
    }
}

impl From<BitstreamError> for CodecError {
    fn from(e: BitstreamError) -> Self {
        Self::Stream(e)
    }
}

// ---------------------------------------------------------------------------
// Enumerative (fixed-length) coding
// ---------------------------------------------------------------------------

/// ceil(log2 x) for x >= 1.
fn ceil_log2(x: &BigUint) -> usize {
    debug_assert!(*x >= BigUint::one());
    let bits = x.bits() as usize;
    if x.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// Fixed code length in bits for types of (n, |X|): ceil(log2 |K(X,n)|).
pub fn enum_code_width(n: u64, alphabet_size: usize) -> usize {
    ceil_log2(&type_count(n, alphabet_size))
}

/// Encodes a type as its colex rank in exactly `enum_code_width` bits.
pub fn enum_encode(t: &TypeVector) -> Bitstream {
    let width = enum_code_width(t.n(), t.alphabet_size());
    let mut bs = Bitstream::new();
    bs.push_biguint(&type_rank(t), width);
    bs
}

/// Inverse of [`enum_encode`]; the stream must be exactly the fixed width.
pub fn enum_decode(bs: &Bitstream, n: u64, alphabet_size: usize) -> Result<TypeVector, CodecError> {
    let width = enum_code_width(n, alphabet_size);
    if bs.bit_len() != width {
        return Err(CodecError::LengthMismatch { expected_bits: width, got_bits: bs.bit_len() });
    }
    let mut r = BitReader::new(bs);
    let rank = r.read_biguint(width)?;
    type_unrank(&rank, n, alphabet_size).map_err(|e| match e {
        MultisetError::RankOutOfRange => CodecError::InvalidRank,
        other => CodecError::Multiset(other),
    })
}

// ---------------------------------------------------------------------------
// Huffman coding over the type alphabet
// ---------------------------------------------------------------------------

/// A prefix-free code over type ranks of a fixed (n, |X|).
#[derive(Debug, Clone)]
pub struct PrefixCode {
    n: u64,
    alphabet_size: usize,
    /// Codeword per type rank, MSB-first.
    codewords: Vec<Vec<bool>>,
    /// Binary trie over the codewords: (zero child, one child, leaf rank).
    trie: Vec<TrieNode>,
}

type TrieNode = (Option<usize>, Option<usize>, Option<usize>);

#[derive(Clone, Copy)]
enum Node {
    Leaf(usize),
    Internal(usize, usize),
}

/// Builds the Huffman code for the multinomial type distribution.
///
/// Ties merge the lowest-id nodes first (leaf ids are type ranks, internal
/// ids continue upward in creation order), so codebooks are reproducible.
pub fn build_optimal_code(n: u64, p: &DiscretePmf) -> Result<PrefixCode, CodecError> {
    let m = p.alphabet_size();
    let total = type_count(n, m);
    if total > BigUint::from(TYPE_ENUMERATION_GUARD) {
        return Err(MultisetError::EnumerationGuard {
            needed: total,
            guard: TYPE_ENUMERATION_GUARD,
            hint: "type alphabet too large for Huffman construction".into(),
        }
        .into());
    }
    let total = total.to_usize().unwrap();
    let mut probs = Vec::with_capacity(total);
    multiset::for_each_type(n, m, |counts| {
        let t = TypeVector::new(counts.to_vec()).unwrap();
        probs.push(multiset::multinomial_type_pmf(&t, p).unwrap());
    });

    let mut nodes: Vec<Node> = (0..total).map(Node::Leaf).collect();
    let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> =
        probs.iter().enumerate().map(|(i, &pr)| Reverse((OrdF64(pr), i))).collect();
    while heap.len() > 1 {
        let Reverse((pa, a)) = heap.pop().unwrap();
        let Reverse((pb, b)) = heap.pop().unwrap();
        let id = nodes.len();
        nodes.push(Node::Internal(a, b));
        heap.push(Reverse((OrdF64(pa.0 + pb.0), id)));
    }
    let root = heap.pop().unwrap().0 .1;

    let mut codewords = vec![Vec::new(); total];
    // Single-type alphabets get the empty codeword.
    if total > 1 {
        let mut stack = vec![(root, Vec::new())];
        while let Some((id, prefix)) = stack.pop() {
            match nodes[id] {
                Node::Leaf(rank) => codewords[rank] = prefix,
                Node::Internal(a, b) => {
                    let mut left = prefix.clone();
                    left.push(false);
                    let mut right = prefix;
                    right.push(true);
                    stack.push((a, left));
                    stack.push((b, right));
                }
            }
        }
    }
    let trie = build_trie(&codewords);
    Ok(PrefixCode { n, alphabet_size: m, codewords, trie })
}

fn build_trie(codewords: &[Vec<bool>]) -> Vec<TrieNode> {
    let mut trie: Vec<TrieNode> = vec![(None, None, None)];
    for (rank, cw) in codewords.iter().enumerate() {
        let mut node = 0usize;
        for &b in cw {
            let child = if b { trie[node].1 } else { trie[node].0 };
            let child = match child {
                Some(c) => c,
                None => {
                    trie.push((None, None, None));
                    let c = trie.len() - 1;
                    if b {
                        trie[node].1 = Some(c);
                    } else {
                        trie[node].0 = Some(c);
                    }
                    c
                }
            };
            node = child;
        }
        trie[node].2 = Some(rank);
    }
    trie
}

#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PrefixCode {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn num_types(&self) -> usize {
        self.codewords.len()
    }

    pub fn codeword(&self, rank: usize) -> Option<&[bool]> {
        self.codewords.get(rank).map(|v| v.as_slice())
    }

    /// Kraft sum of the codeword lengths.
    pub fn kraft_sum(&self) -> f64 {
        self.codewords.iter().map(|c| 2f64.powi(-(c.len() as i32))).sum()
    }

    /// True iff no codeword is a prefix of another. After a lexicographic
    /// sort any prefix pair becomes adjacent, so one pass suffices.
    pub fn is_prefix_free(&self) -> bool {
        let mut sorted: Vec<&Vec<bool>> = self.codewords.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| !w[1].starts_with(w[0]))
    }

    /// Expected codeword length in bits under the multinomial distribution.
    pub fn expected_length(&self, p: &DiscretePmf) -> Result<f64, CodecError> {
        if p.alphabet_size() != self.alphabet_size {
            return Err(MultisetError::DimensionMismatch {
                type_len: self.alphabet_size,
                pmf_len: p.alphabet_size(),
            }
            .into());
        }
        let mut acc = 0.0;
        let mut rank = 0usize;
        multiset::for_each_type(self.n, self.alphabet_size, |counts| {
            let t = TypeVector::new(counts.to_vec()).unwrap();
            acc += multiset::multinomial_type_pmf(&t, p).unwrap() * self.codewords[rank].len() as f64;
            rank += 1;
        });
        Ok(acc)
    }

    /// Encodes a type's rank as its codeword.
    pub fn encode_type(&self, t: &TypeVector) -> Result<Bitstream, CodecError> {
        if t.n() != self.n || t.alphabet_size() != self.alphabet_size {
            return Err(MultisetError::DimensionMismatch {
                type_len: t.alphabet_size(),
                pmf_len: self.alphabet_size,
            }
            .into());
        }
        let rank = type_rank(t).to_usize().ok_or(CodecError::InvalidRank)?;
        let mut bs = Bitstream::new();
        for &b in &self.codewords[rank] {
            bs.push_bit(b);
        }
        Ok(bs)
    }

    /// Decodes a full stream back to the type it encodes.
    pub fn decode_type(&self, bs: &Bitstream) -> Result<TypeVector, CodecError> {
        let mut node = 0usize;
        let mut reader = BitReader::new(bs);
        loop {
            if let Some(rank) = self.trie[node].2 {
                if reader.remaining() != 0 {
                    return Err(CodecError::Stream(BitstreamError::Malformed(
                        "trailing bits after codeword".into(),
                    )));
                }
                return type_unrank(&BigUint::from(rank), self.n, self.alphabet_size)
                    .map_err(CodecError::Multiset);
            }
            let bit = reader.read_bit().map_err(|_| CodecError::UnknownCodeword)?;
            let next = if bit { self.trie[node].1 } else { self.trie[node].0 };
            node = next.ok_or(CodecError::UnknownCodeword)?;
        }
    }
}

/// Encodes the type of a sequence with a prefix code; any permutation of
/// the sequence yields the identical stream.
pub fn encode_multiset(seq: &[u32], code: &PrefixCode) -> Result<Bitstream, CodecError> {
    let t = type_of(seq, code.alphabet_size())?;
    code.encode_type(&t)
}

/// Decodes a stream produced by [`encode_multiset`] back to its type.
pub fn decode_multiset(bs: &Bitstream, code: &PrefixCode) -> Result<TypeVector, CodecError> {
    code.decode_type(bs)
}
