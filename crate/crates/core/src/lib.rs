//! Fixed-point CTC beam-search decoding with bounded beam storage, a
//! compressed-trie dictionary language model and a shift-and-add softmax.
//!
//! The decoder lives in [`beam`]; [`reference`] holds the slow baselines it
//! is tested against.

pub mod accounting;
pub mod alphabet;
pub mod beam;
pub mod cli;
pub mod dict;
pub mod error;
pub mod fixedpoint;
pub mod io;
pub mod lm;
pub mod reference;
pub mod softmax;

pub use alphabet::Alphabet;
pub use beam::{decode, Arith, BeamDecoder, DecodeConfig, DecodeOutput, ExactArith, FixedArith};
pub use dict::{compile, CompiledDict, DictWidths};
pub use error::{AlphabetError, DecodeError, DictError, FixedPointError, IoError, OracleError};
pub use fixedpoint::{QConst, QLogit, QProb};
pub use lm::{extend_probs, DictPtr, ExtensionVerdict};
pub use softmax::{softmax_approx, softmax_exact, LogitFrame, SoftmaxParams, SoftmaxVariant};
