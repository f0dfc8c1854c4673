//! Shared randomness: one infinite pseudorandom bitstream per message.
//!
//! The stream of message `m` under seed `s` is the concatenation of 64-bit
//! blocks `F_s(m, 0) F_s(m, 1) ...`, each read most-significant bit first,
//! where `F_s` is SipHash-1-3 keyed with the first half of `s` and with the
//! second half absorbed ahead of `(m, j)`. Blocks are computed lazily, so a
//! party only pays for the bits it looks at.

use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use siphasher::sip::SipHasher13;

use crate::error::{Error, Result};

/// Maximum number of bits that may be read from a single stream.
pub const STREAM_CAP_BITS: u64 = 1 << 20;

const WORD_BITS: u64 = 64;
const DERIVE_DOMAIN: &[u8] = b"uncertain-priors/derive/v1";

/// 256-bit master seed for the shared random string.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StreamSeed([u8; 32]);

impl StreamSeed {
    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Convenience seed for tests and examples.
    pub fn from_u64(value: u64) -> Self {
        Self::from_bytes([0; 32]).derive("u64", value)
    }

    /// Derives an independent child seed, e.g. one per trial.
    pub fn derive(&self, label: &str, index: u64) -> StreamSeed {
        let digest = Sha256::new()
            .chain_update(DERIVE_DOMAIN)
            .chain_update(self.0)
            .chain_update((label.len() as u64).to_le_bytes())
            .chain_update(label.as_bytes())
            .chain_update(index.to_le_bytes())
            .finalize();
        let mut out = [0u8; 32];
        out.copy_from_slice(&digest);
        StreamSeed(out)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Block generator for all messages under this seed.
    pub fn source(&self) -> StreamSource {
        StreamSource::new(self)
    }
}

impl FromStr for StreamSeed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != 64 {
            return Err(Error::InvalidSeed(format!(
                "expected 64 hex characters, got {}",
                s.len()
            )));
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).map_err(|e| Error::InvalidSeed(e.to_string()))?;
        Ok(StreamSeed(out))
    }
}

impl TryFrom<String> for StreamSeed {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StreamSeed> for String {
    fn from(seed: StreamSeed) -> String {
        seed.to_hex()
    }
}

impl fmt::Display for StreamSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for StreamSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StreamSeed({})", self.to_hex())
    }
}

/// A finite bit string. Bits are packed most-significant first into 64-bit
/// words; bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitPrefix {
    words: Vec<u64>,
    len: u64,
}

impl BitPrefix {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (63 - i % 64);
            }
        }
        Self {
            words,
            len: bits.len() as u64,
        }
    }

    /// Parses an ASCII `'0'`/`'1'` string, first-transmitted bit first.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidCodeword(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bit(&self, i: u64) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[(i / WORD_BITS) as usize] >> (63 - i % WORD_BITS) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }

    /// The first `n` bits; `n` is clamped to the length.
    pub fn truncated(&self, n: u64) -> BitPrefix {
        let n = n.min(self.len);
        let mut words = self.words[..n.div_ceil(WORD_BITS) as usize].to_vec();
        if let Some(last) = words.last_mut() {
            *last &= high_mask(n);
        }
        BitPrefix { words, len: n }
    }

    pub fn is_prefix_of(&self, other: &BitPrefix) -> bool {
        self.len <= other.len && other.truncated(self.len) == *self
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for BitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPrefix({:?})", self.to_bit_string())
    }
}

/// Mask selecting the bits of the final word that belong to a prefix of
/// `len` bits.
fn high_mask(len: u64) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => !(u64::MAX >> r),
    }
}

/// Computes stream blocks for every message under one seed.
#[derive(Clone)]
pub struct StreamSource {
    base: SipHasher13,
}

impl StreamSource {
    fn new(seed: &StreamSeed) -> Self {
        let b = seed.as_bytes();
        let k0 = u64::from_le_bytes(b[0..8].try_into().unwrap());
        let k1 = u64::from_le_bytes(b[8..16].try_into().unwrap());
        let mut base = SipHasher13::new_with_keys(k0, k1);
        base.write(&b[16..32]);
        Self { base }
    }

    /// Block `j` (bits `64j..64j+64`) of the stream for `message`.
    pub fn word(&self, message: usize, j: u64) -> u64 {
        let mut input = [0u8; 16];
        input[..8].copy_from_slice(&(message as u64).to_le_bytes());
        input[8..].copy_from_slice(&j.to_le_bytes());
        let mut h = self.base;
        h.write(&input);
        h.finish()
    }

    pub fn stream(&self, message: usize) -> MessageStream<'_> {
        MessageStream {
            source: self,
            message,
            cache: Vec::new(),
        }
    }

    /// Whether the stream of `message` starts with `prefix`.
    pub fn matches(&self, message: usize, prefix: &BitPrefix) -> bool {
        let full = (prefix.len / WORD_BITS) as usize;
        for j in 0..full {
            if self.word(message, j as u64) != prefix.words[j] {
                return false;
            }
        }
        if !prefix.len.is_multiple_of(WORD_BITS) {
            let w = self.word(message, full as u64) & high_mask(prefix.len);
            if w != prefix.words[full] {
                return false;
            }
        }
        true
    }
}

/// Lazily expanded view of one message's stream; blocks are cached as read.
pub struct MessageStream<'a> {
    source: &'a StreamSource,
    message: usize,
    cache: Vec<u64>,
}

impl MessageStream<'_> {
    pub fn message(&self) -> usize {
        self.message
    }

    pub fn word(&mut self, j: u64) -> Result<u64> {
        if j >= STREAM_CAP_BITS / WORD_BITS {
            return Err(Error::StreamCapExceeded {
                requested: (j + 1) * WORD_BITS,
                cap: STREAM_CAP_BITS,
            });
        }
        let j = j as usize;
        while self.cache.len() <= j {
            let next = self.cache.len() as u64;
            self.cache.push(self.source.word(self.message, next));
        }
        Ok(self.cache[j])
    }

    /// The first `n` bits.
    pub fn prefix(&mut self, n: u64) -> Result<BitPrefix> {
        if n > STREAM_CAP_BITS {
            return Err(Error::StreamCapExceeded {
                requested: n,
                cap: STREAM_CAP_BITS,
            });
        }
        let count = n.div_ceil(WORD_BITS);
        let mut words = (0..count).map(|j| self.word(j)).collect::<Result<Vec<_>>>()?;
        if let Some(last) = words.last_mut() {
            *last &= high_mask(n);
        }
        Ok(BitPrefix { words, len: n })
    }

    /// Length of the longest common prefix with the stream of `other`.
    /// Errors if the streams agree on every bit up to the cap.
    pub fn agreement_with(&mut self, other: usize) -> Result<u64> {
        let mut j = 0u64;
        loop {
            let diff = self.word(j)? ^ self.source.word(other, j);
            if diff != 0 {
                return Ok(j * WORD_BITS + diff.leading_zeros() as u64);
            }
            j += 1;
        }
    }
}

/// The first `n` bits of the stream for `message_index` under `seed`.
pub fn stream_bits(seed: &StreamSeed, message_index: usize, n: u64) -> Result<BitPrefix> {
    seed.source().stream(message_index).prefix(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_prefix() {
        let p = stream_bits(&StreamSeed::from_u64(1), 3, 0).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.to_bit_string(), "");
    }

    #[test]
    fn cap_is_enforced() {
        let seed = StreamSeed::from_u64(1);
        assert!(stream_bits(&seed, 0, STREAM_CAP_BITS).is_ok());
        assert!(matches!(
            stream_bits(&seed, 0, STREAM_CAP_BITS + 1),
            Err(Error::StreamCapExceeded { .. })
        ));
    }

    #[test]
    fn identical_streams_hit_the_cap() {
        let source = StreamSeed::from_u64(5).source();
        let mut s = source.stream(7);
        assert!(matches!(
            s.agreement_with(7),
            Err(Error::StreamCapExceeded { .. })
        ));
    }

    #[test]
    fn agreement_matches_bitwise_comparison() {
        let seed = StreamSeed::from_u64(9);
        let source = seed.source();
        for other in 1..200 {
            let a = stream_bits(&seed, 0, 256).unwrap();
            let b = stream_bits(&seed, other, 256).unwrap();
            let expected = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count() as u64;
            assert_eq!(source.stream(0).agreement_with(other).unwrap(), expected);
        }
    }

    #[test]
    fn matches_checks_partial_words() {
        let seed = StreamSeed::from_u64(2);
        let source = seed.source();
        for n in [0, 1, 5, 63, 64, 65, 130] {
            let p = stream_bits(&seed, 4, n).unwrap();
            assert!(source.matches(4, &p));
            if n > 0 {
                let mut bits: Vec<bool> = p.iter().collect();
                let last = bits.len() - 1;
                bits[last] = !bits[last];
                assert!(!source.matches(4, &BitPrefix::from_bits(&bits)));
            }
        }
    }

    #[test]
    fn seed_hex_roundtrip() {
        let seed = StreamSeed::from_u64(77);
        let hex = seed.to_hex();
        assert_eq!(hex.len(), 64);
        assert_eq!(hex.parse::<StreamSeed>().unwrap(), seed);
        assert!("abc".parse::<StreamSeed>().is_err());
        assert!("zz".repeat(32).parse::<StreamSeed>().is_err());
        let json = serde_json::to_string(&seed).unwrap();
        assert_eq!(json, format!("\"{hex}\""));
    }

    #[test]
    fn derived_seeds_differ() {
        let seed = StreamSeed::from_u64(0);
        assert_ne!(seed.derive("trial", 0), seed.derive("trial", 1));
        assert_ne!(seed.derive("trial", 0), seed.derive("other", 0));
        assert_eq!(seed.derive("trial", 3), seed.derive("trial", 3));
    }

    #[test]
    fn bit_strings() {
        let p = BitPrefix::parse_bits("1011").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.to_bit_string(), "1011");
        assert!(BitPrefix::parse_bits("10a").is_err());
        assert!(p.truncated(2).is_prefix_of(&p));
        assert_eq!(p.truncated(2).to_bit_string(), "10");
        assert!(!BitPrefix::parse_bits("11").unwrap().is_prefix_of(&p));
    }
}
