//! Truncated path signatures over the word basis, and the shuffle product.

mod shuffle;
mod tensor;
mod word;

pub use shuffle::{shuffle_apply, shuffle_words, ShuffleTable};
pub use tensor::{chen_product, segment_signature, signature, SignatureVector};
pub use word::{sig_dim, Word};
