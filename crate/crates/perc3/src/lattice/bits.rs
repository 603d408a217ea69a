//! Minimal fixed-length bitset used for site states and visit marks.

/// Fixed-length bitset backed by 64-bit words, bit `i` at word `i/64`, bit `i%64`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    /// All-zero bitset holding `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Packs the bits into bytes, least significant bit first, `ceil(len/8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(nbytes);
        out
    }

    /// Inverse of [`BitSet::to_bytes`]; bits beyond `len` in the last byte must be zero.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, b) in bytes.iter().enumerate() {
            words[i / 8] |= (*b as u64) << (8 * (i % 8));
        }
        let set = BitSet { words, len };
        // Reject stray bits past the end so the byte form is canonical.
        if len % 64 != 0 {
            if let Some(last) = set.words.last() {
                if last >> (len % 64) != 0 {
                    return None;
                }
            }
        }
        Some(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count() {
        let mut b = BitSet::zeros(130);
        b.set(0, true);
        b.set(64, true);
        b.set(129, true);
        assert!(b.get(0) && b.get(64) && b.get(129));
        assert!(!b.get(1) && !b.get(128));
        assert_eq!(b.count_ones(), 3);
        b.set(64, false);
        assert_eq!(b.count_ones(), 2);
    }

    #[test]
    fn byte_round_trip() {
        let mut b = BitSet::zeros(77);
        for i in (0..77).step_by(3) {
            b.set(i, true);
        }
        let bytes = b.to_bytes();
        assert_eq!(bytes.len(), 10);
        assert_eq!(BitSet::from_bytes(&bytes, 77).unwrap(), b);
    }

    #[test]
    fn stray_bits_rejected() {
        let bytes = vec![0xFFu8];
        assert!(BitSet::from_bytes(&bytes, 3).is_none());
        assert!(BitSet::from_bytes(&[0x07], 3).is_some());
    }
}
