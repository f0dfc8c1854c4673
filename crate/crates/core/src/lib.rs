//! Source coding when the receiver's prior differs from the sender's.
//!
//! Sender and receiver share one random bitstream per message. The
//! [`codec`] module sends prefixes of those streams. In the error-free
//! scheme the decoder always recovers the message whenever its prior `Q` is
//! α-close to the sender's `P`. In the ε-error scheme it fails with
//! probability at most ε. [`instance`] builds the low-entropy hard pairs on
//! which redundancy is measured, and [`harness`] runs reproducible Monte Carlo
//! campaigns against the closed-form bounds.

pub mod codec;
pub mod dist;
pub mod error;
pub mod harness;
pub mod instance;
pub mod stream;

pub use codec::{
    decode_max_q, encode_error_free, encode_positive_error, exact_expected_length_positive,
    Codeword, EncodeTrace, MaxLikelihoodDecoder,
};
pub use dist::{
    entropy, min_closeness, one_to_one_optimal_length, relative_entropy, validate_distribution,
    ClosenessReport, Distribution, MessageSet,
};
pub use error::{Error, Result};
pub use instance::{hard_instance, largest_k, random_close_pair, HardInstance};
pub use stream::{stream_bits, BitPrefix, StreamSeed};
