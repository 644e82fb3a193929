//! Lifelong CRF for opinion-aspect extraction.
//!
//! A linear-chain CRF over lexical, POS and generalized dependency-pattern
//! features. Dependency patterns carry a knowledge label saying whether the
//! context word is a known aspect, so a fixed model extracts more once the
//! set of known aspects grows. [`lifelong`] mines that set from the model's
//! own results on earlier unlabeled domains.
//!
//! Input is pre-parsed text in a tab-separated dependency format, see
//! [`io::parse_conll`].

pub mod cli;
pub mod crf;
pub mod eval;
pub mod features;
pub mod io;
pub mod lifelong;
pub mod tags;

mod error;

pub use error::{Error, Result};
