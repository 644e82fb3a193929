use crate::error::{Error, Result};

/// Reserved boundary sentinels for the context-window templates.
pub const BOS: &str = "<BOS>";
pub const EOS: &str = "<EOS>";

/// Governor word used for the arc attached to the sentence root.
pub const ROOT_WORD: &str = "ROOT";

/// A typed arc without word positions: `(type, gov, govpos, dep, deppos)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DependencyRelation {
    pub rel_type: String,
    pub gov_word: String,
    pub gov_pos: String,
    pub dep_word: String,
    pub dep_pos: String,
}

impl DependencyRelation {
    pub fn new(
        rel_type: impl Into<String>,
        gov_word: impl Into<String>,
        gov_pos: impl Into<String>,
        dep_word: impl Into<String>,
        dep_pos: impl Into<String>,
    ) -> Result<Self> {
        let rel = DependencyRelation {
            rel_type: rel_type.into(),
            gov_word: gov_word.into(),
            gov_pos: gov_pos.into(),
            dep_word: dep_word.into(),
            dep_pos: dep_pos.into(),
        };
        for (name, v) in [
            ("type", &rel.rel_type),
            ("governor", &rel.gov_word),
            ("governor POS", &rel.gov_pos),
            ("dependent", &rel.dep_word),
            ("dependent POS", &rel.dep_pos),
        ] {
            if v.is_empty() {
                return Err(Error::contract(format!("dependency relation has empty {name}")));
            }
        }
        Ok(rel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedToken {
    pub word: String,
    pub pos: String,
    /// Every arc this token takes part in, as governor or dependent.
    pub relations: Vec<DependencyRelation>,
}

impl ParsedToken {
    pub fn new(word: impl Into<String>, pos: impl Into<String>, relations: Vec<DependencyRelation>) -> Result<Self> {
        let word = word.into();
        let pos = pos.into();
        if word.is_empty() {
            return Err(Error::contract("token word must not be empty"));
        }
        if pos.is_empty() {
            return Err(Error::contract(format!("token {word:?} has an empty POS tag")));
        }
        for s in [&word, &pos] {
            if s == BOS || s == EOS {
                return Err(Error::contract(format!("{s} is a reserved boundary marker")));
            }
        }
        Ok(ParsedToken { word, pos, relations })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub tokens: Vec<ParsedToken>,
    pub gold_tags: Option<Vec<String>>,
}

impl ParsedSentence {
    pub fn new(tokens: Vec<ParsedToken>, gold_tags: Option<Vec<String>>) -> Result<Self> {
        if let Some(g) = &gold_tags {
            if g.len() != tokens.len() {
                return Err(Error::contract(format!(
                    "{} gold tags for {} tokens",
                    g.len(),
                    tokens.len()
                )));
            }
        }
        Ok(ParsedSentence { tokens, gold_tags })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.word.as_str())
    }
}
