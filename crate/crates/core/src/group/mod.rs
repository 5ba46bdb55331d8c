//! Symmetric alphabets, words and exact word-problem oracles.

mod alphabet;
mod fingerprint;
mod oracle;
mod presentation;

pub use alphabet::{Alphabet, Letter, Word};
pub use oracle::{Family, GroupOracle};
pub use presentation::{Presentation, PresentationSpec, Preset};
