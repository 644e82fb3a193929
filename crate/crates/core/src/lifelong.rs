//! Lifelong extraction: mine reliable aspects from past domains' outputs and
//! re-extract from a new domain until the mined set stops changing.

use std::collections::{BTreeMap, BTreeSet};

use crate::crf::CrfModel;
use crate::error::{Error, Result};
use crate::features::{featurize_unlabeled, tokens_of_aspects, KnowledgeBase, ParsedSentence};
use crate::tags;

/// Aspects extracted from each past domain, in processing order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AspectStore {
    entries: Vec<(String, BTreeSet<String>)>,
}

impl AspectStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a domain's aspects (lowercased). Domain ids must be unique.
    pub fn insert(&mut self, domain_id: impl Into<String>, aspects: BTreeSet<String>) -> Result<()> {
        let domain_id = domain_id.into();
        if domain_id.is_empty() {
            return Err(Error::contract("domain id must not be empty"));
        }
        if self.contains(&domain_id) {
            return Err(Error::contract(format!("domain {domain_id:?} is already in the store")));
        }
        let aspects = aspects.into_iter().map(|a| a.to_lowercase()).collect();
        self.entries.push((domain_id, aspects));
        Ok(())
    }

    pub fn contains(&self, domain_id: &str) -> bool {
        self.entries.iter().any(|(d, _)| d == domain_id)
    }

    pub fn get(&self, domain_id: &str) -> Option<&BTreeSet<String>> {
        self.entries.iter().find(|(d, _)| d == domain_id).map(|(_, a)| a)
    }

    pub fn remove(&mut self, domain_id: &str) -> Option<BTreeSet<String>> {
        let pos = self.entries.iter().position(|(d, _)| d == domain_id)?;
        Some(self.entries.remove(pos).1)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.entries.iter().map(|(d, a)| (d.as_str(), a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LifelongConfig {
    /// Minimum number of distinct domains an aspect must appear in.
    pub lambda: usize,
    /// Cap on extraction rounds.
    pub max_iters: usize,
}

impl Default for LifelongConfig {
    fn default() -> Self {
        LifelongConfig { lambda: 2, max_iters: 10 }
    }
}

impl LifelongConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(Error::config("lambda must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The mined set equals the previous round's.
    Fixpoint,
    /// The mined set repeats one from an earlier, non-adjacent round.
    Cycle,
    /// `max_iters` rounds ran without a fixpoint.
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LifelongResult {
    /// Aspects extracted in the final round.
    pub aspects: BTreeSet<String>,
    pub iterations: usize,
    /// Mined reliable-aspect sets. Entry 0 is the empty starting set, entry
    /// `t` is the set mined after round `t`.
    pub k_history: Vec<BTreeSet<String>>,
    pub converged: bool,
    pub stop: StopReason,
    /// Training aspects plus mined aspects used to featurize the final round.
    pub knowledge: BTreeSet<String>,
}

/// Aspects found in at least `lambda` distinct domains of `store`.
pub fn mine_frequent_aspects(store: &AspectStore, lambda: usize) -> BTreeSet<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, aspects) in store.entries() {
        for a in aspects {
            *counts.entry(a.as_str()).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c >= lambda)
        .map(|(a, _)| a.to_string())
        .collect()
}

/// Decode every sentence of `domain` with features built against `kb`.
pub fn decode_domain(model: &CrfModel, domain: &[ParsedSentence], kb: &KnowledgeBase) -> Result<Vec<Vec<String>>> {
    domain
        .iter()
        .map(|s| Ok(model.tag(&featurize_unlabeled(s, kb)?)))
        .collect()
}

/// Lowercase phrases of all predicted spans in `tags`.
pub fn aspects_of(domain: &[ParsedSentence], tags: &[Vec<String>]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (s, t) in domain.iter().zip(tags) {
        let words: Vec<&str> = s.words().collect();
        for span in tags::spans(t) {
            out.insert(tags::phrase(&words, &span));
        }
    }
    out
}

pub fn extract_aspects(model: &CrfModel, domain: &[ParsedSentence], kb: &KnowledgeBase) -> Result<BTreeSet<String>> {
    if domain.is_empty() {
        return Err(Error::contract("cannot extract from an empty domain"));
    }
    let tags = decode_domain(model, domain, kb)?;
    Ok(aspects_of(domain, &tags))
}

/// Run the lifelong extraction loop on a new domain.
///
/// Each round featurizes the domain with the training aspects plus the
/// currently mined reliable aspects, extracts, adds the result to the store
/// and re-mines the reliable set. The loop stops at a
/// fixpoint, on a repeated earlier set, or after `max_iters` rounds. The
/// returned store holds the final round's aspects for `domain_id`.
pub fn lifelong_extract(
    model: &CrfModel,
    domain_id: &str,
    domain: &[ParsedSentence],
    mut store: AspectStore,
    training_aspects: &BTreeSet<String>,
    config: &LifelongConfig,
) -> Result<(LifelongResult, AspectStore)> {
    config.validate()?;
    if store.contains(domain_id) {
        return Err(Error::contract(format!("domain {domain_id:?} is already in the store")));
    }

    let mut history: Vec<BTreeSet<String>> = vec![BTreeSet::new()];
    let mut mined: BTreeSet<String> = BTreeSet::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let knowledge: BTreeSet<String> = training_aspects.union(&mined).cloned().collect();
        let kb = tokens_of_aspects(&knowledge);
        let aspects = extract_aspects(model, domain, &kb)?;
        store.insert(domain_id, aspects.clone())?;
        let next = mine_frequent_aspects(&store, config.lambda);

        let previous = history.last().expect("history starts non-empty");
        let stop = if next == *previous {
            Some(StopReason::Fixpoint)
        } else if history[..history.len() - 1].contains(&next) {
            Some(StopReason::Cycle)
        } else if iterations >= config.max_iters {
            Some(StopReason::IterationCap)
        } else {
            None
        };
        history.push(next.clone());

        if let Some(stop) = stop {
            let result = LifelongResult {
                aspects,
                iterations,
                k_history: history,
                converged: stop == StopReason::Fixpoint,
                stop,
                knowledge,
            };
            return Ok((result, store));
        }
        store.remove(domain_id);
        mined = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn mining_counts_domains() {
        let mut s = AspectStore::new();
        s.insert("d1", set(&["battery", "price"])).unwrap();
        s.insert("d2", set(&["price", "screen"])).unwrap();
        assert_eq!(mine_frequent_aspects(&s, 2), set(&["price"]));
        assert_eq!(mine_frequent_aspects(&s, 1), set(&["battery", "price", "screen"]));
        assert_eq!(mine_frequent_aspects(&AspectStore::new(), 1), set(&[]));
        assert_eq!(mine_frequent_aspects(&AspectStore::new(), 5), set(&[]));
    }

    #[test]
    fn store_rejects_duplicates() {
        let mut s = AspectStore::new();
        s.insert("d1", set(&[])).unwrap();
        assert!(s.insert("d1", set(&["x"])).is_err());
        assert_eq!(s.remove("d1"), Some(set(&[])));
        assert!(s.is_empty());
    }

    #[test]
    fn config_validation() {
        assert!(LifelongConfig { lambda: 0, max_iters: 3 }.validate().is_err());
        assert!(LifelongConfig { lambda: 1, max_iters: 0 }.validate().is_err());
        assert!(LifelongConfig::default().validate().is_ok());
    }

    #[test]
    fn removing_a_domain_never_adds_frequent_aspects() {
        let mut s = AspectStore::new();
        s.insert("a", set(&["x", "y"])).unwrap();
        s.insert("b", set(&["x", "z"])).unwrap();
        s.insert("c", set(&["y", "z"])).unwrap();
        for lambda in 1..=3 {
            let full = mine_frequent_aspects(&s, lambda);
            for d in ["a", "b", "c"] {
                let mut smaller = s.clone();
                smaller.remove(d);
                assert!(mine_frequent_aspects(&smaller, lambda).is_subset(&full));
            }
        }
    }
}
