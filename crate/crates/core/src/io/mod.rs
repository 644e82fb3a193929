//! Corpus ingestion and persistence of models and aspect stores.

mod conll;
mod model_file;
mod store_file;

pub use conll::{
    domain_id_of, extract_training_aspects, format_conll, parse_conll, read_conll, write_conll, ConllRecord, Corpus,
};
pub use model_file::{format_model, parse_model, read_model, write_model};
pub use store_file::{format_store, parse_store, read_store, write_store, UNIT_SEPARATOR};

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Write a sorted one-per-line phrase list.
pub fn write_phrases(phrases: &BTreeSet<String>, path: &Path) -> Result<()> {
    let mut text = String::new();
    for p in phrases {
        text.push_str(p);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_phrases(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect())
}
