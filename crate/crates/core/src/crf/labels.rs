use crate::error::{Error, Result};

pub const OUTSIDE: &str = "O";
pub const BEGIN_ASPECT: &str = "B-ASP";
pub const INSIDE_ASPECT: &str = "I-ASP";

/// Ordered set of tag names. Position in the list is the label index and
/// lower indices win ties during decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::config("label set must not be empty"));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(Error::config(format!("invalid label name {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::config(format!("duplicate label {l:?}")));
            }
        }
        Ok(LabelSet { labels })
    }

    /// The aspect tagging scheme: `O`, `B-ASP`, `I-ASP`, in that order.
    pub fn bio() -> Self {
        LabelSet {
            labels: vec![OUTSIDE.into(), BEGIN_ASPECT.into(), INSIDE_ASPECT.into()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn names(&self) -> &[String] {
        &self.labels
    }

    /// Map tag names to indices, failing on the first unknown tag.
    pub fn encode<S: AsRef<str>>(&self, tags: &[S]) -> Result<Vec<usize>> {
        tags.iter()
            .map(|t| {
                self.index_of(t.as_ref())
                    .ok_or_else(|| Error::contract(format!("unknown tag {:?}", t.as_ref())))
            })
            .collect()
    }

    pub fn decode(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.labels[i].clone()).collect()
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        LabelSet::bio()
    }
}
