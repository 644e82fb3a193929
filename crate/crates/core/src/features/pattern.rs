use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::knowledge::KnowledgeBase;
use crate::features::parsed::DependencyRelation;

/// Whether a context word belongs to the knowledge base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KnowledgeLabel {
    Aspect,
    Other,
}

impl KnowledgeLabel {
    fn symbol(self) -> &'static str {
        match self {
            KnowledgeLabel::Aspect => "A",
            KnowledgeLabel::Other => "O",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    /// The current word's side of the arc.
    Wildcard,
    Context { label: KnowledgeLabel, pos: String },
}

/// A dependency relation with the current word wildcarded and the context
/// word replaced by its knowledge label.
///
/// Serialized as `type(gov,dep)`, e.g. `nmod(*,A/NN)`. Characters that carry
/// structure (`%()/,*` and line/field separators) are percent-escaped inside
/// the relation type and POS tags, so distinct patterns never share a string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DependencyPattern {
    rel_type: String,
    gov: Slot,
    dep: Slot,
}

impl DependencyPattern {
    pub fn new(rel_type: impl Into<String>, gov: Slot, dep: Slot) -> Result<Self> {
        let rel_type = rel_type.into();
        if rel_type.is_empty() {
            return Err(Error::contract("pattern relation type must not be empty"));
        }
        match (&gov, &dep) {
            (Slot::Wildcard, Slot::Context { .. }) | (Slot::Context { .. }, Slot::Wildcard) => {}
            _ => return Err(Error::contract("exactly one pattern slot must be a wildcard")),
        }
        Ok(DependencyPattern { rel_type, gov, dep })
    }

    pub fn rel_type(&self) -> &str {
        &self.rel_type
    }

    pub fn gov(&self) -> &Slot {
        &self.gov
    }

    pub fn dep(&self) -> &Slot {
        &self.dep
    }

    /// The knowledge label on the context side.
    pub fn knowledge_label(&self) -> KnowledgeLabel {
        match (&self.gov, &self.dep) {
            (Slot::Context { label, .. }, _) | (_, Slot::Context { label, .. }) => *label,
            _ => unreachable!("pattern always has a context slot"),
        }
    }
}

const ESCAPED: &[char] = &['%', '(', ')', ',', '/', '*', '\t', '\n', '\r'];

fn escape(s: &str, out: &mut String) {
    for c in s.chars() {
        if ESCAPED.contains(&c) {
            out.push_str(&format!("%{:02X}", c as u32));
        } else {
            out.push(c);
        }
    }
}

fn unescape(s: &str) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '%' {
            let hex: String = chars.by_ref().take(2).collect();
            let code = u8::from_str_radix(&hex, 16)
                .map_err(|_| Error::contract(format!("bad escape %{hex} in pattern")))?;
            out.push(code as char);
        } else if ESCAPED.contains(&c) {
            return Err(Error::contract(format!("unescaped {c:?} in pattern field")));
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

fn write_slot(slot: &Slot, out: &mut String) {
    match slot {
        Slot::Wildcard => out.push('*'),
        Slot::Context { label, pos } => {
            out.push_str(label.symbol());
            out.push('/');
            escape(pos, out);
        }
    }
}

fn parse_slot(s: &str) -> Result<Slot> {
    if s == "*" {
        return Ok(Slot::Wildcard);
    }
    let (label, pos) = s
        .split_once('/')
        .ok_or_else(|| Error::contract(format!("malformed pattern slot {s:?}")))?;
    let label = match label {
        "A" => KnowledgeLabel::Aspect,
        "O" => KnowledgeLabel::Other,
        other => return Err(Error::contract(format!("unknown knowledge label {other:?}"))),
    };
    Ok(Slot::Context {
        label,
        pos: unescape(pos)?,
    })
}

impl fmt::Display for DependencyPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        escape(&self.rel_type, &mut out);
        out.push('(');
        write_slot(&self.gov, &mut out);
        out.push(',');
        write_slot(&self.dep, &mut out);
        out.push(')');
        f.write_str(&out)
    }
}

impl FromStr for DependencyPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::contract(format!("malformed dependency pattern {s:?}"));
        let (rel, rest) = s.split_once('(').ok_or_else(malformed)?;
        let body = rest.strip_suffix(')').ok_or_else(malformed)?;
        let (gov, dep) = body.split_once(',').ok_or_else(malformed)?;
        DependencyPattern::new(unescape(rel)?, parse_slot(gov)?, parse_slot(dep)?)
    }
}

fn context_slot(word: &str, pos: &str, kb: &KnowledgeBase) -> Slot {
    let label = if kb.contains(word) {
        KnowledgeLabel::Aspect
    } else {
        KnowledgeLabel::Other
    };
    Slot::Context {
        label,
        pos: pos.to_string(),
    }
}

/// Generalize `rel` from the point of view of `current_word`.
///
/// The side holding the current word becomes the wildcard; the other side
/// keeps its POS and gets `A` if its word is in `kb`, `O` otherwise. When
/// both sides match, the governor is wildcarded.
pub fn generalize_relation(rel: &DependencyRelation, current_word: &str, kb: &KnowledgeBase) -> Result<DependencyPattern> {
    let current = current_word.to_lowercase();
    let (gov, dep) = if rel.gov_word.to_lowercase() == current {
        (Slot::Wildcard, context_slot(&rel.dep_word, &rel.dep_pos, kb))
    } else if rel.dep_word.to_lowercase() == current {
        (context_slot(&rel.gov_word, &rel.gov_pos, kb), Slot::Wildcard)
    } else {
        return Err(Error::contract(format!(
            "{current_word:?} is neither governor nor dependent of {}",
            rel.rel_type
        )));
    };
    DependencyPattern::new(rel.rel_type.clone(), gov, dep)
}
