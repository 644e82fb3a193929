use indexmap::IndexSet;

use crate::crf::feature::{Feature, FeaturizedSentence};
use crate::crf::labels::LabelSet;
use crate::error::{Error, Result};

/// Dense assignment of weight slots to feature functions.
///
/// Slots `0..Y²` are label-label transitions, `(current, previous)` in
/// row-major order. Each observed attribute `(template, value)` then owns
/// `Y` consecutive label-attribute slots.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureIndex {
    num_labels: usize,
    attributes: IndexSet<Feature>,
    frozen: bool,
}

impl FeatureIndex {
    pub fn new(num_labels: usize) -> Self {
        assert!(num_labels > 0, "feature index needs at least one label");
        FeatureIndex {
            num_labels,
            attributes: IndexSet::new(),
            frozen: false,
        }
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    /// Total number of weight slots.
    pub fn num_slots(&self) -> usize {
        self.num_transition_slots() + self.attributes.len() * self.num_labels
    }

    pub fn num_transition_slots(&self) -> usize {
        self.num_labels * self.num_labels
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    /// Id of an attribute, allocating a new one unless the index is frozen.
    pub fn intern(&mut self, feature: &Feature) -> Option<usize> {
        if let Some(id) = self.attributes.get_index_of(feature) {
            return Some(id);
        }
        if self.frozen {
            return None;
        }
        Some(self.attributes.insert_full(feature.clone()).0)
    }

    pub fn attribute_id(&self, feature: &Feature) -> Option<usize> {
        self.attributes.get_index_of(feature)
    }

    pub fn attribute(&self, id: usize) -> &Feature {
        &self.attributes[id]
    }

    pub fn attributes(&self) -> impl Iterator<Item = &Feature> {
        self.attributes.iter()
    }

    pub fn transition_slot(&self, current: usize, previous: usize) -> usize {
        debug_assert!(current < self.num_labels && previous < self.num_labels);
        current * self.num_labels + previous
    }

    pub fn attribute_slot(&self, attribute: usize, label: usize) -> usize {
        debug_assert!(label < self.num_labels);
        self.num_transition_slots() + attribute * self.num_labels + label
    }

    pub fn feature_slot(&self, feature: &Feature, label: usize) -> Option<usize> {
        self.attribute_id(feature).map(|a| self.attribute_slot(a, label))
    }

    /// Known attribute ids per position. Unseen values are dropped.
    pub fn compile(&self, sent: &FeaturizedSentence) -> Vec<Vec<usize>> {
        sent.tokens()
            .iter()
            .map(|fv| fv.iter().filter_map(|f| self.attribute_id(f)).collect())
            .collect()
    }
}

/// Index every attribute observed in `corpus` and freeze the result.
pub fn build_feature_index(corpus: &[FeaturizedSentence], labels: &LabelSet) -> Result<FeatureIndex> {
    if corpus.is_empty() {
        return Err(Error::config("cannot build a feature index from an empty corpus"));
    }
    let mut index = FeatureIndex::new(labels.len());
    for sent in corpus {
        for fv in sent.tokens() {
            for f in fv {
                index.intern(f);
            }
        }
    }
    index.freeze();
    Ok(index)
}
