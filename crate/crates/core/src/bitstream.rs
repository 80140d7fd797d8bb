//! Length-prefixed bitstreams shared by every codec in the crate, plus the
//! Elias gamma/delta integer codes used for dictionary coding.
//!
//! Wire format: a little-endian u32 bit count followed by the payload packed
//! MSB-first, zero-padded to a byte boundary.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

/// Errors raised while parsing or consuming a bitstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BitstreamError {
    /// Serialized container shorter than its header claims.
    Truncated { expected_bits: usize, got_bytes: usize },
    /// A read ran past the end of the stream.
    OutOfBits,
    /// Padding bits past the declared length were not zero.
    DirtyPadding,
    /// A decoder found structurally invalid content.
    Malformed(String),
}

impl fmt::Display for BitstreamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Truncated { expected_bits, got_bytes } => {
                write!(f, "bitstream truncated: header says {expected_bits} bits, payload has {got_bytes} bytes")
            }
            Self::OutOfBits => write!(f, "read past end of bitstream"),
            Self::DirtyPadding => write!(f, "nonzero padding bits"),
            Self::Malformed(msg) => write!(f, "malformed stream: {msg}"),
        }
    }
}

impl std::error::Error for BitstreamError {}

/// A packed bit sequence with an explicit bit length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bitstream {
    bit_len: usize,
    bytes: Vec<u8>,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    /// Appends a single bit.
    pub fn push_bit(&mut self, bit: bool) {
        let byte = self.bit_len / 8;
        if byte == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[byte] |= 1 << (7 - self.bit_len % 8);
        }
        self.bit_len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: usize) {
        assert!(width <= 64);
        for i in (0..width).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    /// Appends `value` in exactly `width` bits, most significant first.
    /// Panics if the value does not fit.
    pub fn push_biguint(&mut self, value: &BigUint, width: usize) {
        assert!(value.bits() as usize <= width, "value does not fit in {width} bits");
        for i in (0..width).rev() {
            self.push_bit(value.bit(i as u64));
        }
    }

    pub fn bit(&self, idx: usize) -> Option<bool> {
        if idx >= self.bit_len {
            return None;
        }
        Some(self.bytes[idx / 8] >> (7 - idx % 8) & 1 == 1)
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.bit_len).map(move |i| self.bit(i).unwrap())
    }

    /// Extends with every bit of another stream.
    pub fn extend(&mut self, other: &Bitstream) {
        for b in other.iter_bits() {
            self.push_bit(b);
        }
    }

    /// Builds a stream from an ASCII string of '0'/'1' characters.
    pub fn from_ascii(s: &str) -> Result<Self, BitstreamError> {
        let mut bs = Bitstream::new();
        for c in s.chars() {
            match c {
                '0' => bs.push_bit(false),
                '1' => bs.push_bit(true),
                c if c.is_whitespace() => {}
                c => return Err(BitstreamError::Malformed(format!("unexpected character {c:?}"))),
            }
        }
        Ok(bs)
    }

    /// Renders the bits as an ASCII '0'/'1' string.
    pub fn to_ascii(&self) -> String {
        self.iter_bits().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Serializes as [u32 LE bit length][payload bytes].
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.bytes.len());
        out.extend_from_slice(&(self.bit_len as u32).to_le_bytes());
        out.extend_from_slice(&self.bytes);
        out
    }

    /// Parses the [u32 LE bit length][payload] container.
    pub fn from_bytes(data: &[u8]) -> Result<Self, BitstreamError> {
        if data.len() < 4 {
            return Err(BitstreamError::Truncated { expected_bits: 0, got_bytes: data.len() });
        }
        let bit_len = u32::from_le_bytes([data[0], data[1], data[2], data[3]]) as usize;
        let payload = &data[4..];
        let need = bit_len.div_ceil(8);
        if payload.len() < need {
            return Err(BitstreamError::Truncated { expected_bits: bit_len, got_bytes: payload.len() });
        }
        let bytes = payload[..need].to_vec();
        // Padding bits beyond bit_len must be zero.
        if bit_len % 8 != 0 {
            let last = bytes[need - 1];
            let mask = 0xffu8 >> (bit_len % 8);
            if last & mask != 0 {
                return Err(BitstreamError::DirtyPadding);
            }
        }
        Ok(Self { bit_len, bytes })
    }
}

/// Cursor for reading a [`Bitstream`] front to back.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    stream: &'a Bitstream,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(stream: &'a Bitstream) -> Self {
        Self { stream, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.stream.bit_len() - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, BitstreamError> {
        let b = self.stream.bit(self.pos).ok_or(BitstreamError::OutOfBits)?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_bits(&mut self, width: usize) -> Result<u64, BitstreamError> {
        assert!(width <= 64);
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_biguint(&mut self, width: usize) -> Result<BigUint, BitstreamError> {
        let mut v = BigUint::zero();
        for _ in 0..width {
            v <<= 1u8;
            if self.read_bit()? {
                v |= BigUint::from(1u8);
            }
        }
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Elias codes
// ---------------------------------------------------------------------------

/// Appends the Elias gamma code of `value` (value >= 1).
pub fn elias_gamma_encode(bs: &mut Bitstream, value: u64) {
    assert!(value >= 1, "Elias codes do not handle 0");
    let nbits = 64 - value.leading_zeros() as usize; // position of MSB, 1-based
    for _ in 0..nbits - 1 {
        bs.push_bit(false);
    }
    bs.push_bits(value, nbits);
}

pub fn elias_gamma_decode(r: &mut BitReader<'_>) -> Result<u64, BitstreamError> {
    let mut zeros = 0usize;
    while !r.read_bit()? {
        zeros += 1;
        if zeros > 63 {
            return Err(BitstreamError::Malformed("gamma prefix too long".into()));
        }
    }
    let rest = r.read_bits(zeros)?;
    Ok((1u64 << zeros) | rest)
}

/// Appends the Elias delta code of `value` (value >= 1): gamma code of the
/// bit length followed by the value without its leading 1.
pub fn elias_delta_encode(bs: &mut Bitstream, value: u64) {
    assert!(value >= 1, "Elias codes do not handle 0");
    let nbits = 64 - value.leading_zeros() as usize;
    elias_gamma_encode(bs, nbits as u64);
    if nbits > 1 {
        bs.push_bits(value & !(1 << (nbits - 1)), nbits - 1);
    }
}

pub fn elias_delta_decode(r: &mut BitReader<'_>) -> Result<u64, BitstreamError> {
    let nbits = elias_gamma_decode(r)? as usize;
    if nbits == 0 || nbits > 64 {
        return Err(BitstreamError::Malformed("delta length out of range".into()));
    }
    let rest = r.read_bits(nbits - 1)?;
    Ok((1u64 << (nbits - 1)) | rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn container_roundtrip_and_padding() {
        let mut bs = Bitstream::new();
        bs.push_bits(0b1011, 4);
        let bytes = bs.to_bytes();
        assert_eq!(bytes[..4], 4u32.to_le_bytes());
        let back = Bitstream::from_bytes(&bytes).unwrap();
        assert_eq!(back, bs);

        // Corrupt the padding.
        let mut dirty = bytes.clone();
        dirty[4] |= 0x01;
        assert_eq!(Bitstream::from_bytes(&dirty), Err(BitstreamError::DirtyPadding));
    }

    #[test]
    fn ascii_roundtrip() {
        let s = "01001100000111010001";
        let bs = Bitstream::from_ascii(s).unwrap();
        assert_eq!(bs.bit_len(), 20);
        assert_eq!(bs.to_ascii(), s);
    }

    #[test]
    fn gamma_small_values() {
        let mut bs = Bitstream::new();
        elias_gamma_encode(&mut bs, 1);
        assert_eq!(bs.to_ascii(), "1");
        let mut bs = Bitstream::new();
        elias_gamma_encode(&mut bs, 5);
        assert_eq!(bs.to_ascii(), "00101");
    }

    #[test]
    fn delta_small_values() {
        let mut bs = Bitstream::new();
        elias_delta_encode(&mut bs, 1);
        assert_eq!(bs.to_ascii(), "1");
        let mut bs = Bitstream::new();
        elias_delta_encode(&mut bs, 9);
        // 9 = 1001, length 4 -> gamma(4)=00100, then 001.
        assert_eq!(bs.to_ascii(), "00100001");
    }

    proptest! {
        #[test]
        fn stream_serialization_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let mut bs = Bitstream::new();
            for b in &bits {
                bs.push_bit(*b);
            }
            let back = Bitstream::from_bytes(&bs.to_bytes()).unwrap();
            prop_assert_eq!(back, bs);
        }

        #[test]
        fn elias_roundtrip(values in proptest::collection::vec(1u64..1u64 << 48, 1..50)) {
            let mut bs = Bitstream::new();
            for &v in &values {
                elias_gamma_encode(&mut bs, v);
                elias_delta_encode(&mut bs, v);
            }
            let mut r = BitReader::new(&bs);
            for &v in &values {
                prop_assert_eq!(elias_gamma_decode(&mut r).unwrap(), v);
                prop_assert_eq!(elias_delta_decode(&mut r).unwrap(), v);
            }
            prop_assert_eq!(r.remaining(), 0);
        }
    }
}
