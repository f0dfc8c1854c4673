//! The two uncertain-priors coding schemes and their shared decoder.
//!
//! Both encoders send a prefix of the sender's message stream `r_m`. The
//! error-free encoder picks the shortest prefix that no plausible competitor
//! shares; the positive-error encoder sends a fixed `⌈log₂(α/(P(m)ε))⌉` bits.
//! The decoder returns the most likely message under its own prior among
//! those whose stream starts with the codeword.

use serde::{Deserialize, Serialize};

use crate::dist::{rank_by_probability, Distribution};
use crate::error::{Error, Result};
use crate::stream::{BitPrefix, StreamSeed, STREAM_CAP_BITS};

/// A transmitted prefix. Codewords are not self-delimiting; the length
/// travels with them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodewordFile", into = "CodewordFile")]
pub struct Codeword {
    prefix: BitPrefix,
}

impl Codeword {
    pub fn new(prefix: BitPrefix) -> Self {
        Self { prefix }
    }

    pub fn prefix(&self) -> &BitPrefix {
        &self.prefix
    }

    pub fn len(&self) -> u64 {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// The codeword with its last bit dropped, if any.
    pub fn shortened(&self) -> Option<Codeword> {
        (!self.is_empty()).then(|| Codeword::new(self.prefix.truncated(self.len() - 1)))
    }
}

/// Wire form: `{"len": n, "bits": "0101..."}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CodewordFile {
    len: u64,
    bits: String,
}

impl TryFrom<CodewordFile> for Codeword {
    type Error = Error;

    fn try_from(file: CodewordFile) -> Result<Self> {
        let prefix = BitPrefix::parse_bits(&file.bits)?;
        if prefix.len() != file.len {
            return Err(Error::InvalidCodeword(format!(
                "len is {} but bits has {} characters",
                file.len,
                prefix.len()
            )));
        }
        Ok(Codeword::new(prefix))
    }
}

impl From<Codeword> for CodewordFile {
    fn from(c: Codeword) -> Self {
        CodewordFile {
            len: c.len(),
            bits: c.prefix.to_bit_string(),
        }
    }
}

/// Encoder output plus the work it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeTrace {
    pub codeword: Codeword,
    /// Messages the error-free encoder had to separate `m` from.
    pub competitor_count: usize,
    /// Stream bits examined, over the sender's stream and all competitors'.
    pub stream_bits_read: u64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

fn positive_mass(p: &Distribution, m: usize) -> Result<f64> {
    let pm = p.try_prob(m)?;
    if pm == 0.0 {
        return Err(Error::ZeroProbabilityMessage { index: m });
    }
    Ok(pm)
}

/// Messages other than `m` whose probability is at least `P(m)/α²`.
pub fn competitors(p: &Distribution, m: usize, alpha: f64) -> impl Iterator<Item = usize> + '_ {
    let threshold = p.prob(m) / (alpha * alpha);
    p.probs()
        .iter()
        .enumerate()
        .filter(move |&(i, &x)| i != m && x >= threshold)
        .map(|(i, _)| i)
}

/// Error-free encoding: the shortest prefix of `r_m` that differs from the
/// same-length prefix of every competitor's stream.
pub fn encode_error_free(
    m: usize,
    p: &Distribution,
    alpha: f64,
    seed: &StreamSeed,
) -> Result<EncodeTrace> {
    check_alpha(alpha)?;
    positive_mass(p, m)?;
    let source = seed.source();
    let mut own = source.stream(m);
    let mut longest: Option<u64> = None;
    let mut competitor_count = 0;
    let mut competitor_bits = 0u64;
    for other in competitors(p, m, alpha) {
        let agreement = own.agreement_with(other)?;
        competitor_count += 1;
        competitor_bits += agreement + 1;
        longest = Some(longest.map_or(agreement, |l| l.max(agreement)));
    }
    let length = longest.map_or(0, |l| l + 1);
    let prefix = own.prefix(length)?;
    Ok(EncodeTrace {
        codeword: Codeword::new(prefix),
        competitor_count,
        stream_bits_read: competitor_bits + length,
    })
}

/// `⌈log₂(α/(P(m)ε))⌉`, or 0 when the argument is at most 1.
pub fn positive_error_length(pm: f64, alpha: f64, epsilon: f64) -> Result<u64> {
    check_alpha(alpha)?;
    check_epsilon(epsilon)?;
    if !(pm > 0.0 && pm.is_finite()) {
        return Err(Error::InvalidConfig(format!("message probability {pm} is not positive")));
    }
    let x = alpha / (pm * epsilon);
    if x <= 1.0 {
        return Ok(0);
    }
    // log2 may be off by an ulp at exact powers of two; settle the ceiling
    // against exact powers.
    let mut i = x.log2().ceil() as i32;
    while i > 0 && 2f64.powi(i - 1) >= x {
        i -= 1;
    }
    while 2f64.powi(i) < x {
        i += 1;
    }
    let length = i as u64;
    if length > STREAM_CAP_BITS {
        return Err(Error::StreamCapExceeded {
            requested: length,
            cap: STREAM_CAP_BITS,
        });
    }
    Ok(length)
}

/// Positive-error encoding: the first `⌈log₂(α/(P(m)ε))⌉` bits of `r_m`.
pub fn encode_positive_error(
    m: usize,
    p: &Distribution,
    alpha: f64,
    epsilon: f64,
    seed: &StreamSeed,
) -> Result<Codeword> {
    let pm = positive_mass(p, m)?;
    let length = positive_error_length(pm, alpha, epsilon)?;
    let prefix = seed.source().stream(m).prefix(length)?;
    Ok(Codeword::new(prefix))
}

/// `Σ_m P(m)·⌈log₂(α/(P(m)ε))⌉`: the positive-error scheme's expected length.
pub fn exact_expected_length_positive(p: &Distribution, alpha: f64, epsilon: f64) -> Result<f64> {
    let mut total = 0.0;
    for m in p.support() {
        let pm = p.prob(m);
        total += pm * positive_error_length(pm, alpha, epsilon)? as f64;
    }
    Ok(total)
}

/// All messages whose stream starts with the codeword.
pub fn candidate_set(c: &Codeword, message_count: usize, seed: &StreamSeed) -> Vec<usize> {
    let source = seed.source();
    (0..message_count)
        .filter(|&m| source.matches(m, c.prefix()))
        .collect()
}

/// Maximum-likelihood decoder for a fixed receiver prior.
///
/// Scans messages in order of decreasing `Q` (ties by index) and stops at the
/// first one consistent with the codeword, which is the argmax of `Q` over the
/// candidate set.
#[derive(Debug, Clone)]
pub struct MaxLikelihoodDecoder<'a> {
    q: &'a Distribution,
    order: Vec<usize>,
}

impl<'a> MaxLikelihoodDecoder<'a> {
    pub fn new(q: &'a Distribution) -> Self {
        Self {
            q,
            order: rank_by_probability(q),
        }
    }

    pub fn prior(&self) -> &Distribution {
        self.q
    }

    pub fn decode(&self, c: &Codeword, seed: &StreamSeed) -> Result<usize> {
        let source = seed.source();
        self.order
            .iter()
            .copied()
            .find(|&m| source.matches(m, c.prefix()))
            .ok_or(Error::EmptyCandidateSet)
    }
}

/// Decodes `c` as the most likely message under `q` consistent with it.
pub fn decode_max_q(c: &Codeword, q: &Distribution, seed: &StreamSeed) -> Result<usize> {
    MaxLikelihoodDecoder::new(q).decode(c, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::validate_distribution;
    use crate::stream::stream_bits;

    fn dist(p: &[f64]) -> Distribution {
        validate_distribution(p, None).unwrap()
    }

    #[test]
    fn single_message_gets_empty_codeword() {
        let p = dist(&[1.0]);
        let t = encode_error_free(0, &p, 3.0, &StreamSeed::from_u64(0)).unwrap();
        assert!(t.codeword.is_empty());
        assert_eq!(t.competitor_count, 0);
        assert_eq!(t.stream_bits_read, 0);
    }

    #[test]
    fn threshold_excludes_unlikely_message() {
        let p = dist(&[0.9, 0.1]);
        let seed = StreamSeed::from_u64(11);
        let t = encode_error_free(0, &p, 1.0, &seed).unwrap();
        assert!(t.codeword.is_empty());
        assert_eq!(t.competitor_count, 0);
        assert_eq!(decode_max_q(&t.codeword, &p, &seed).unwrap(), 0);
    }

    #[test]
    fn separates_from_competitor_at_first_difference() {
        let p = dist(&[0.9, 0.1]);
        for s in 0..50 {
            let seed = StreamSeed::from_u64(s);
            let t = encode_error_free(1, &p, 1.0, &seed).unwrap();
            assert_eq!(t.competitor_count, 1);
            let a = stream_bits(&seed, 0, 128).unwrap();
            let b = stream_bits(&seed, 1, 128).unwrap();
            let first_diff = a.iter().zip(b.iter()).position(|(x, y)| x != y).unwrap() as u64;
            assert_eq!(t.codeword.len(), first_diff + 1);
            assert!(t.codeword.prefix().is_prefix_of(&b));
            assert!(t.stream_bits_read >= t.codeword.len());
            assert_eq!(decode_max_q(&t.codeword, &p, &seed).unwrap(), 1);
        }
    }

    #[test]
    fn encoders_reject_bad_input() {
        let p = dist(&[1.0, 0.0]);
        let seed = StreamSeed::from_u64(0);
        assert!(matches!(
            encode_error_free(1, &p, 2.0, &seed),
            Err(Error::ZeroProbabilityMessage { index: 1 })
        ));
        assert!(matches!(
            encode_positive_error(1, &p, 2.0, 0.1, &seed),
            Err(Error::ZeroProbabilityMessage { index: 1 })
        ));
        assert!(matches!(
            encode_error_free(5, &p, 2.0, &seed),
            Err(Error::MessageOutOfRange { index: 5, size: 2 })
        ));
        assert!(matches!(
            encode_error_free(0, &p, 0.5, &seed),
            Err(Error::InvalidAlpha(_))
        ));
        assert!(matches!(
            encode_positive_error(0, &p, 2.0, 0.0, &seed),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            encode_positive_error(0, &p, 2.0, 1.5, &seed),
            Err(Error::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn positive_error_length_examples() {
        assert_eq!(positive_error_length(0.25, 2.0, 0.125).unwrap(), 6);
        assert_eq!(positive_error_length(1.0, 1.0, 1.0).unwrap(), 0);
        assert_eq!(positive_error_length(0.3, 10.0, 0.01).unwrap(), 12);
        // Exact powers of two must not round up.
        assert_eq!(positive_error_length(0.5, 1.0, 1.0).unwrap(), 1);
        assert_eq!(positive_error_length(1.0 / 1024.0, 1.0, 1.0).unwrap(), 10);
        assert_eq!(positive_error_length(1.0 / 1024.0, 1.0, 0.999_999).unwrap(), 11);
    }

    #[test]
    fn exact_expected_length_uniform_pair() {
        let p = Distribution::uniform(2).unwrap();
        assert_eq!(exact_expected_length_positive(&p, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn empty_codeword_decodes_to_argmax_q() {
        let q = dist(&[0.7, 0.3]);
        let seed = StreamSeed::from_u64(4);
        let c = Codeword::new(BitPrefix::empty());
        assert_eq!(candidate_set(&c, 2, &seed), vec![0, 1]);
        assert_eq!(decode_max_q(&c, &q, &seed).unwrap(), 0);
        // Ties go to the lowest index.
        assert_eq!(decode_max_q(&c, &dist(&[0.5, 0.5]), &seed).unwrap(), 0);
    }

    #[test]
    fn foreign_codeword_has_no_candidates() {
        // 64 bits matching no stream among two messages is overwhelmingly likely.
        let seed = StreamSeed::from_u64(4);
        let bits = stream_bits(&StreamSeed::from_u64(5), 0, 64).unwrap();
        let c = Codeword::new(bits);
        assert!(matches!(
            decode_max_q(&c, &dist(&[0.5, 0.5]), &seed),
            Err(Error::EmptyCandidateSet)
        ));
    }

    #[test]
    fn codeword_wire_format() {
        let c = Codeword::new(BitPrefix::parse_bits("0110").unwrap());
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"len":4,"bits":"0110"}"#);
        let back: Codeword = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Codeword>(r#"{"len":3,"bits":"0110"}"#).is_err());
        assert!(serde_json::from_str::<Codeword>(r#"{"len":2,"bits":"02"}"#).is_err());
        let empty: Codeword = serde_json::from_str(r#"{"len":0,"bits":""}"#).unwrap();
        assert!(empty.is_empty());
    }
}
