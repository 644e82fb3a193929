use std::fmt;
use std::str::FromStr;

use crate::crf::labels::LabelSet;
use crate::error::{Error, Result};

/// Observation templates. Every template except `G` is single-valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Template {
    Word,
    PrevWord,
    NextWord,
    Pos,
    PrevPos,
    NextPos,
    /// Generalized dependency pattern.
    Dependency,
}

impl Template {
    pub const ALL: [Template; 7] = [
        Template::Word,
        Template::PrevWord,
        Template::NextWord,
        Template::Pos,
        Template::PrevPos,
        Template::NextPos,
        Template::Dependency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Word => "W",
            Template::PrevWord => "-1W",
            Template::NextWord => "+1W",
            Template::Pos => "P",
            Template::PrevPos => "-1P",
            Template::NextPos => "+1P",
            Template::Dependency => "G",
        }
    }

    pub fn is_multi_valued(self) -> bool {
        self == Template::Dependency
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Template::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::contract(format!("unknown template {s:?}")))
    }
}

/// One active observation: a template and the value it takes at a token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Feature {
    pub template: Template,
    pub value: String,
}

impl Feature {
    pub fn new(template: Template, value: impl Into<String>) -> Self {
        Feature {
            template,
            value: value.into(),
        }
    }
}

/// The active features of a single token, kept sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    active: Vec<Feature>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from any collection of features. Fails if a single-valued
    /// template receives two different values.
    pub fn from_features<I: IntoIterator<Item = Feature>>(features: I) -> Result<Self> {
        let mut fv = FeatureVector::new();
        for f in features {
            fv.insert(f)?;
        }
        Ok(fv)
    }

    pub fn insert(&mut self, feature: Feature) -> Result<()> {
        if !feature.template.is_multi_valued() {
            if let Some(existing) = self.get(feature.template) {
                if existing != feature.value {
                    return Err(Error::contract(format!(
                        "template {} already set to {existing:?}",
                        feature.template
                    )));
                }
                return Ok(());
            }
        }
        if let Err(pos) = self.active.binary_search(&feature) {
            self.active.insert(pos, feature);
        }
        Ok(())
    }

    /// Value of a single-valued template, if present.
    pub fn get(&self, template: Template) -> Option<&str> {
        self.active
            .iter()
            .find(|f| f.template == template)
            .map(|f| f.value.as_str())
    }

    pub fn values(&self, template: Template) -> impl Iterator<Item = &str> {
        self.active
            .iter()
            .filter(move |f| f.template == template)
            .map(|f| f.value.as_str())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Feature> {
        self.active.iter()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }
}

impl<'a> IntoIterator for &'a FeatureVector {
    type Item = &'a Feature;
    type IntoIter = std::slice::Iter<'a, Feature>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// A token sequence ready for the CRF, with optional gold label indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturizedSentence {
    tokens: Vec<FeatureVector>,
    gold: Option<Vec<usize>>,
}

impl FeaturizedSentence {
    pub fn new(tokens: Vec<FeatureVector>, gold: Option<Vec<usize>>, labels: &LabelSet) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::contract("sentence must contain at least one token"));
        }
        if let Some(g) = &gold {
            if g.len() != tokens.len() {
                return Err(Error::contract(format!(
                    "gold length {} does not match sentence length {}",
                    g.len(),
                    tokens.len()
                )));
            }
            if let Some(&bad) = g.iter().find(|&&i| i >= labels.len()) {
                return Err(Error::contract(format!("gold label index {bad} out of range")));
            }
        }
        Ok(FeaturizedSentence { tokens, gold })
    }

    pub fn unlabeled(tokens: Vec<FeatureVector>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::contract("sentence must contain at least one token"));
        }
        Ok(FeaturizedSentence { tokens, gold: None })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[FeatureVector] {
        &self.tokens
    }

    pub fn gold(&self) -> Option<&[usize]> {
        self.gold.as_deref()
    }
}
