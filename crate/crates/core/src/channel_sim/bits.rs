//! Bit vectors of the linear deterministic model.
//!
//! A signal is a vector in `F_2^q` stored in the low `q` bits of a `u64`.
//! Element 0 of the vector is the most significant of those bits, so it is
//! the level that survives the weakest link. The shift matrix `S^{q-n}`
//! moves every element down by `q - n` positions: the top `n` elements of the
//! transmitted vector land in the bottom `n` positions of the received one
//! and the rest is zero-filled.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use super::SimError;

/// Largest supported vector length `q`.
pub const MAX_Q: u32 = 64;

/// A vector in `F_2^q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitSignal {
    bits: u64,
    q: u32,
}

fn mask(q: u32) -> u64 {
    if q >= 64 {
        u64::MAX
    } else {
        (1u64 << q) - 1
    }
}

impl BitSignal {
    /// The zero vector of length `q`.
    pub fn zero(q: u32) -> Self {
        assert!((1..=MAX_Q).contains(&q), "vector length {q} outside 1..={MAX_Q}");
        BitSignal { bits: 0, q }
    }

    /// Builds a vector from the low `q` bits of `bits`; higher bits are
    /// dropped.
    pub fn from_bits(bits: u64, q: u32) -> Self {
        let zero = BitSignal::zero(q);
        BitSignal { bits: bits & mask(q), ..zero }
    }

    /// Builds a vector from its elements, element 0 first.
    pub fn from_elements(elements: &[bool]) -> Self {
        let q = elements.len() as u32;
        let bits = elements.iter().fold(0u64, |acc, &e| (acc << 1) | e as u64);
        BitSignal::from_bits(bits, q)
    }

    /// A uniformly random vector.
    pub fn random(q: u32, rng: &mut impl Rng) -> Self {
        BitSignal::from_bits(rng.gen(), q)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Number of elements `q`.
    pub fn width(self) -> u32 {
        self.q
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Element `k`, counting from the most significant position.
    pub fn element(self, k: u32) -> bool {
        assert!(k < self.q, "element {k} out of range");
        (self.bits >> (self.q - 1 - k)) & 1 == 1
    }

    /// Sum in `F_2^q`.
    pub fn xor(self, other: BitSignal) -> BitSignal {
        assert_eq!(self.q, other.q, "vector lengths differ");
        BitSignal { bits: self.bits ^ other.bits, q: self.q }
    }

    /// Lower-case hex with `ceil(q / 4)` digits.
    pub fn to_hex(self) -> String {
        let width = self.q.div_ceil(4) as usize;
        format!("{:0width$x}", self.bits)
    }
}

impl fmt::Debug for BitSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.q as usize)
    }
}

impl fmt::Display for BitSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for BitSignal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

/// Applies `S^{q-n}` to `x`.
pub fn shift_apply(n: u32, x: BitSignal, q: u32) -> Result<BitSignal, SimError> {
    if n > q {
        return Err(SimError::GainExceedsQ { gain: n, q });
    }
    assert_eq!(x.q, q, "vector length differs from q");
    let bits = x.bits.checked_shr(q - n).unwrap_or(0);
    Ok(BitSignal { bits, q })
}
