use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::io::Corpus;
use crate::tags::{self, Span};

/// Span-level precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl EvalReport {
    /// Derive the ratios from counts. Empty denominators give 1 for
    /// precision/recall and 0 for F1 when both are 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        EvalReport {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }
}

/// Occurrence-level exact span matching over aligned tag sequences.
pub fn evaluate<S: AsRef<str>, T: AsRef<str>>(gold: &[Vec<S>], pred: &[Vec<T>]) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::contract(format!(
            "{} gold sentences vs {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::contract(format!(
                "sentence {i}: {} gold tags vs {} predicted",
                g.len(),
                p.len()
            )));
        }
        let gold_spans: HashSet<Span> = tags::spans(g).into_iter().collect();
        let pred_spans: HashSet<Span> = tags::spans(p).into_iter().collect();
        let hits = pred_spans.intersection(&gold_spans).count();
        tp += hits;
        fp += pred_spans.len() - hits;
        fn_ += gold_spans.len() - hits;
    }
    Ok(EvalReport::from_counts(tp, fp, fn_))
}

/// Dictionary baseline: add every occurrence of a reliable phrase that the
/// tagger missed.
///
/// Scanning left to right, the longest reliable phrase starting at each
/// position is matched case-insensitively. It becomes an aspect span unless
/// it overlaps a span already present.
pub fn crf_plus_r(pred: &[Vec<String>], reliable: &BTreeSet<String>, test: &Corpus) -> Result<Vec<Vec<String>>> {
    if pred.len() != test.len() {
        return Err(Error::contract("predictions do not match the test corpus"));
    }
    let phrases: Vec<Vec<String>> = reliable
        .iter()
        .map(|p| p.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>())
        .filter(|p| !p.is_empty())
        .collect();
    let max_len = phrases.iter().map(Vec::len).max().unwrap_or(0);
    let phrases: HashSet<Vec<String>> = phrases.into_iter().collect();

    test.sentences()
        .iter()
        .zip(pred)
        .map(|(sent, tags_in)| {
            if tags_in.len() != sent.len() {
                return Err(Error::contract("prediction length does not match sentence"));
            }
            let words: Vec<String> = sent.words().map(str::to_lowercase).collect();
            let mut taken: Vec<bool> = vec![false; words.len()];
            for s in tags::spans(tags_in) {
                taken[s.start..s.end].iter_mut().for_each(|t| *t = true);
            }
            let mut out = tags_in.clone();
            let mut start = 0;
            while start < words.len() {
                let longest = (1..=max_len.min(words.len() - start))
                    .rev()
                    .find(|&len| phrases.contains(&words[start..start + len]));
                match longest {
                    Some(len) if !taken[start..start + len].iter().any(|&t| t) => {
                        tags::mark(&mut out, start, start + len, "ASP");
                        taken[start..start + len].iter_mut().for_each(|t| *t = true);
                        start += len;
                    }
                    _ => start += 1,
                }
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_conll;

    fn t(tags: &[&str]) -> Vec<String> {
        tags.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_prediction() {
        let gold = vec![t(&["O", "B-ASP", "I-ASP"]), t(&["B-ASP"])];
        let r = evaluate(&gold, &gold).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn all_outside_prediction() {
        let gold = vec![t(&["B-ASP", "O", "B-ASP"]), t(&["B-ASP", "I-ASP", "O", "B-ASP", "B-ASP"])];
        let pred: Vec<Vec<String>> = gold.iter().map(|g| vec!["O".to_string(); g.len()]).collect();
        let r = evaluate(&gold, &pred).unwrap();
        assert_eq!(r.fn_, 5);
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 0.0, 0.0));
    }

    #[test]
    fn boundary_mismatch_is_a_miss() {
        // gold span covers token 1 only, predicted covers tokens 1-2
        let gold = vec![t(&["O", "B-ASP", "O", "O"])];
        let pred = vec![t(&["O", "B-ASP", "I-ASP", "O"])];
        let r = evaluate(&gold, &pred).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (0, 1, 1));
    }

    #[test]
    fn length_mismatch_is_error() {
        assert!(evaluate(&[t(&["O"])], &[t(&["O", "O"])]).is_err());
        assert!(evaluate(&[t(&["O"])], &Vec::<Vec<String>>::new()).is_err());
    }

    fn corpus(text: &str) -> Corpus {
        parse_conll(text, true, "t").unwrap()
    }

    const DIED: &str = "1\tthe\tDT\t2\tdet\tO\n2\tBattery\tNN\t3\tnsubj\tB-ASP\n3\tdied\tVBD\t0\troot\tO\n";

    #[test]
    fn adds_missing_reliable_phrase() {
        let c = corpus(DIED);
        let reliable: BTreeSet<String> = ["battery".to_string()].into();
        let out = crf_plus_r(&[t(&["O", "O", "O"])], &reliable, &c).unwrap();
        assert_eq!(out, vec![t(&["O", "B-ASP", "O"])]);
    }

    #[test]
    fn absent_phrase_changes_nothing() {
        let c = corpus(DIED);
        let reliable: BTreeSet<String> = ["screen".to_string()].into();
        let pred = vec![t(&["O", "O", "O"])];
        assert_eq!(crf_plus_r(&pred, &reliable, &c).unwrap(), pred);
    }

    #[test]
    fn overlapping_phrase_is_skipped() {
        let c = corpus(DIED);
        let reliable: BTreeSet<String> = ["battery died".to_string()].into();
        let pred = vec![t(&["O", "B-ASP", "O"])];
        assert_eq!(crf_plus_r(&pred, &reliable, &c).unwrap(), pred);
    }

    #[test]
    fn prefers_longest_phrase() {
        let c = corpus("1\tbattery\tNN\t2\tcompound\tB-ASP\n2\tlife\tNN\t0\troot\tI-ASP\n");
        let reliable: BTreeSet<String> = ["battery".to_string(), "battery life".to_string()].into();
        let out = crf_plus_r(&[t(&["O", "O"])], &reliable, &c).unwrap();
        assert_eq!(out, vec![t(&["B-ASP", "I-ASP"])]);
    }
}
