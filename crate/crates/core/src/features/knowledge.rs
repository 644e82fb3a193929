use std::collections::BTreeSet;

/// Lowercase single-token words regarded as aspect-indicating.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    terms: BTreeSet<String>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a word. Input is lowercased; empty strings are ignored and
    /// anything containing whitespace is split into its tokens.
    pub fn insert(&mut self, word: &str) {
        for tok in word.split_whitespace() {
            self.terms.insert(tok.to_lowercase());
        }
    }

    /// Case-insensitive membership.
    pub fn contains(&self, word: &str) -> bool {
        self.terms.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

impl<S: AsRef<str>> FromIterator<S> for KnowledgeBase {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut kb = KnowledgeBase::new();
        for w in iter {
            kb.insert(w.as_ref());
        }
        kb
    }
}

/// Split aspect phrases into the lowercase tokens that make up a knowledge base.
pub fn tokens_of_aspects<'a, I>(aspects: I) -> KnowledgeBase
where
    I: IntoIterator<Item = &'a String>,
{
    aspects.into_iter().collect()
}
