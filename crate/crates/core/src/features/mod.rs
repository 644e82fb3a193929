//! Token features: lexical/POS context windows plus generalized dependency
//! patterns whose knowledge labels come from a [`KnowledgeBase`].

mod knowledge;
mod parsed;
mod pattern;

pub use knowledge::{tokens_of_aspects, KnowledgeBase};
pub use parsed::{DependencyRelation, ParsedSentence, ParsedToken, BOS, EOS, ROOT_WORD};
pub use pattern::{generalize_relation, DependencyPattern, KnowledgeLabel, Slot};

use crate::crf::{Feature, FeatureVector, FeaturizedSentence, LabelSet, Template};
use crate::error::{Error, Result};

/// W, P and the ±1 window features of token `l`. Words are lowercased.
pub fn basic_features(sent: &ParsedSentence, l: usize) -> Result<FeatureVector> {
    let n = sent.len();
    if l >= n {
        return Err(Error::contract(format!("position {l} out of range for sentence of length {n}")));
    }
    let tok = &sent.tokens[l];
    let (prev_w, prev_p) = if l == 0 {
        (BOS.to_string(), BOS.to_string())
    } else {
        let t = &sent.tokens[l - 1];
        (t.word.to_lowercase(), t.pos.clone())
    };
    let (next_w, next_p) = if l + 1 == n {
        (EOS.to_string(), EOS.to_string())
    } else {
        let t = &sent.tokens[l + 1];
        (t.word.to_lowercase(), t.pos.clone())
    };
    FeatureVector::from_features([
        Feature::new(Template::Word, tok.word.to_lowercase()),
        Feature::new(Template::Pos, tok.pos.clone()),
        Feature::new(Template::PrevWord, prev_w),
        Feature::new(Template::PrevPos, prev_p),
        Feature::new(Template::NextWord, next_w),
        Feature::new(Template::NextPos, next_p),
    ])
}

/// The set of G values of token `l`: one generalized pattern per relation.
pub fn dependency_features(sent: &ParsedSentence, l: usize, kb: &KnowledgeBase) -> Result<Vec<DependencyPattern>> {
    let tok = sent
        .tokens
        .get(l)
        .ok_or_else(|| Error::contract(format!("position {l} out of range")))?;
    let mut patterns = tok
        .relations
        .iter()
        .map(|r| generalize_relation(r, &tok.word, kb))
        .collect::<Result<Vec<_>>>()?;
    patterns.sort();
    patterns.dedup();
    Ok(patterns)
}

/// Featurize a whole sentence against `kb`. Gold tags, when present, are
/// mapped through `labels`; an unknown tag is an error.
pub fn featurize(sent: &ParsedSentence, kb: &KnowledgeBase, labels: &LabelSet) -> Result<FeaturizedSentence> {
    let gold = sent.gold_tags.as_ref().map(|g| labels.encode(g)).transpose()?;
    FeaturizedSentence::new(token_features(sent, kb)?, gold, labels)
}

/// Featurize without gold tags, for decoding.
pub fn featurize_unlabeled(sent: &ParsedSentence, kb: &KnowledgeBase) -> Result<FeaturizedSentence> {
    FeaturizedSentence::unlabeled(token_features(sent, kb)?)
}

fn token_features(sent: &ParsedSentence, kb: &KnowledgeBase) -> Result<Vec<FeatureVector>> {
    (0..sent.len())
        .map(|l| {
            let mut fv = basic_features(sent, l)?;
            for p in dependency_features(sent, l, kb)? {
                fv.insert(Feature::new(Template::Dependency, p.to_string()))?;
            }
            Ok(fv)
        })
        .collect()
}
