//! Tab-separated dependency format, one token per line:
//!
//! ```text
//! index  word  pos  head  deprel  [tag]
//! ```
//!
//! Sentences are separated by blank lines. `head` is the 1-based index of the
//! governor, or 0 for the root arc.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{DependencyRelation, ParsedSentence, ParsedToken, ROOT_WORD};
use crate::tags;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllRecord {
    pub index: usize,
    pub word: String,
    pub pos: String,
    pub head: usize,
    pub deprel: String,
    pub tag: Option<String>,
}

impl ConllRecord {
    pub fn new(index: usize, word: &str, pos: &str, head: usize, deprel: &str, tag: Option<&str>) -> Self {
        ConllRecord {
            index,
            word: word.into(),
            pos: pos.into(),
            head,
            deprel: deprel.into(),
            tag: tag.map(Into::into),
        }
    }
}

/// A domain's sentences, kept both as raw records and as parsed sentences
/// with per-token relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub domain_id: String,
    pub labeled: bool,
    records: Vec<Vec<ConllRecord>>,
    sentences: Vec<ParsedSentence>,
}

/// Line numbers are only used for error messages.
fn build_sentence(records: &[ConllRecord], lines: Option<&[usize]>) -> Result<ParsedSentence> {
    let line_of = |k: usize| lines.map_or(0, |l| l[k]);
    let n = records.len();
    let mut relations: Vec<Vec<DependencyRelation>> = vec![Vec::new(); n];
    for (k, r) in records.iter().enumerate() {
        if r.index != k + 1 {
            return Err(Error::parse(
                line_of(k),
                format!("token index {} is not contiguous (expected {})", r.index, k + 1),
            ));
        }
        if r.head > n {
            return Err(Error::parse(
                line_of(k),
                format!("head {} out of range for sentence of length {n}", r.head),
            ));
        }
        if r.head == r.index {
            return Err(Error::parse(line_of(k), format!("token {} is its own head", r.index)));
        }
        let rel = if r.head == 0 {
            DependencyRelation::new(&r.deprel, ROOT_WORD, &r.pos, &r.word, &r.pos)
        } else {
            let g = &records[r.head - 1];
            DependencyRelation::new(&r.deprel, &g.word, &g.pos, &r.word, &r.pos)
        }
        .map_err(|e| Error::parse(line_of(k), e.to_string()))?;
        if r.head != 0 {
            relations[r.head - 1].push(rel.clone());
        }
        relations[k].push(rel);
    }
    let tokens = records
        .iter()
        .zip(relations)
        .enumerate()
        .map(|(k, (r, rels))| ParsedToken::new(&r.word, &r.pos, rels).map_err(|e| Error::parse(line_of(k), e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let tagged = records.iter().filter(|r| r.tag.is_some()).count();
    let gold = match tagged {
        0 => None,
        t if t == n => Some(records.iter().map(|r| r.tag.clone().unwrap()).collect()),
        _ => {
            let k = records.iter().position(|r| r.tag.is_none()).unwrap();
            return Err(Error::parse(line_of(k), "missing gold tag"));
        }
    };
    ParsedSentence::new(tokens, gold)
}

impl Corpus {
    /// Assemble a corpus from token records. With `labeled`, every token must
    /// carry a tag.
    pub fn from_records(domain_id: impl Into<String>, records: Vec<Vec<ConllRecord>>, labeled: bool) -> Result<Self> {
        let sentences = records
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.is_empty() {
                    return Err(Error::contract(format!("sentence {i} is empty")));
                }
                if labeled && s.iter().any(|r| r.tag.is_none()) {
                    return Err(Error::contract(format!("sentence {i} is missing gold tags")));
                }
                build_sentence(s, None)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus {
            domain_id: domain_id.into(),
            labeled: labeled || (!sentences.is_empty() && sentences.iter().all(|s| s.gold_tags.is_some())),
            records,
            sentences,
        })
    }

    pub fn sentences(&self) -> &[ParsedSentence] {
        &self.sentences
    }

    pub fn records(&self) -> &[Vec<ConllRecord>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// A copy restricted to the sentences at `indices`, in that order.
    pub fn subset(&self, domain_id: impl Into<String>, indices: &[usize]) -> Corpus {
        let records: Vec<_> = indices.iter().map(|&i| self.records[i].clone()).collect();
        let sentences: Vec<_> = indices.iter().map(|&i| self.sentences[i].clone()).collect();
        Corpus {
            domain_id: domain_id.into(),
            labeled: self.labeled,
            records,
            sentences,
        }
    }

    /// Concatenate corpora under a new domain id.
    pub fn concat<'a, I: IntoIterator<Item = &'a Corpus>>(domain_id: impl Into<String>, parts: I) -> Corpus {
        let mut out = Corpus {
            domain_id: domain_id.into(),
            labeled: true,
            records: Vec::new(),
            sentences: Vec::new(),
        };
        for c in parts {
            out.labeled &= c.labeled;
            out.records.extend(c.records.iter().cloned());
            out.sentences.extend(c.sentences.iter().cloned());
        }
        out
    }

    /// Replace every token's tag column.
    pub fn with_tags(&self, tags: &[Vec<String>]) -> Result<Corpus> {
        if tags.len() != self.len() || tags.iter().zip(&self.records).any(|(t, r)| t.len() != r.len()) {
            return Err(Error::contract("tag sequences do not match the corpus shape"));
        }
        let records = self
            .records
            .iter()
            .zip(tags)
            .map(|(rs, ts)| {
                rs.iter()
                    .zip(ts)
                    .map(|(r, t)| ConllRecord {
                        tag: Some(t.clone()),
                        ..r.clone()
                    })
                    .collect()
            })
            .collect();
        Corpus::from_records(self.domain_id.clone(), records, true)
    }

    /// Gold tag sequences. Fails on an unlabeled corpus.
    pub fn gold_tags(&self) -> Result<Vec<Vec<String>>> {
        self.sentences
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.gold_tags
                    .clone()
                    .ok_or_else(|| Error::contract(format!("sentence {i} of {} has no gold tags", self.domain_id)))
            })
            .collect()
    }
}

fn parse_field<'a>(cols: &[&'a str], i: usize, line: usize, name: &str) -> Result<&'a str> {
    let v = cols[i];
    if v.is_empty() {
        return Err(Error::parse(line, format!("empty {name} column")));
    }
    Ok(v)
}

/// Parse corpus text. Nothing is returned unless the whole input is valid.
pub fn parse_conll(text: &str, expect_labels: bool, domain_id: &str) -> Result<Corpus> {
    let mut records: Vec<Vec<ConllRecord>> = Vec::new();
    let mut sentences = Vec::new();
    let mut current: Vec<ConllRecord> = Vec::new();
    let mut current_lines: Vec<usize> = Vec::new();

    let mut flush = |current: &mut Vec<ConllRecord>, lines: &mut Vec<usize>| -> Result<()> {
        if current.is_empty() {
            return Ok(());
        }
        sentences.push(build_sentence(current, Some(lines))?);
        records.push(std::mem::take(current));
        lines.clear();
        Ok(())
    };

    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            flush(&mut current, &mut current_lines)?;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        match cols.len() {
            5 if expect_labels => return Err(Error::parse(line_no, "missing gold tags (expected 6 columns)")),
            5 | 6 => {}
            n => return Err(Error::parse(line_no, format!("expected 5 or 6 tab-separated columns, found {n}"))),
        }
        let index = parse_field(&cols, 0, line_no, "index")?
            .parse::<usize>()
            .map_err(|_| Error::parse(line_no, format!("invalid token index {:?}", cols[0])))?;
        let word = parse_field(&cols, 1, line_no, "word")?;
        let pos = parse_field(&cols, 2, line_no, "POS")?;
        let head = parse_field(&cols, 3, line_no, "head")?
            .parse::<usize>()
            .map_err(|_| Error::parse(line_no, format!("invalid head {:?}", cols[3])))?;
        let deprel = parse_field(&cols, 4, line_no, "deprel")?;
        let tag = if cols.len() == 6 {
            Some(parse_field(&cols, 5, line_no, "tag")?.to_string())
        } else {
            None
        };
        current.push(ConllRecord {
            index,
            word: word.into(),
            pos: pos.into(),
            head,
            deprel: deprel.into(),
            tag,
        });
        current_lines.push(line_no);
    }
    flush(&mut current, &mut current_lines)?;

    let labeled = expect_labels || (!sentences.is_empty() && sentences.iter().all(|s| s.gold_tags.is_some()));
    Ok(Corpus {
        domain_id: domain_id.to_string(),
        labeled,
        records,
        sentences,
    })
}

/// Domain id used for a corpus file: its file stem.
pub fn domain_id_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn read_conll(path: &Path, expect_labels: bool) -> Result<Corpus> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
        path: Some(path.to_path_buf()),
        line: 0,
        message: format!("file is not valid UTF-8: {e}"),
    })?;
    parse_conll(&text, expect_labels, &domain_id_of(path)).map_err(|e| e.at_path(path))
}

pub fn format_conll(corpus: &Corpus) -> String {
    let mut out = String::new();
    for sent in &corpus.records {
        for r in sent {
            let _ = write!(out, "{}\t{}\t{}\t{}\t{}", r.index, r.word, r.pos, r.head, r.deprel);
            if let Some(t) = &r.tag {
                out.push('\t');
                out.push_str(t);
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn write_conll(corpus: &Corpus, path: &Path) -> Result<()> {
    std::fs::write(path, format_conll(corpus)).map_err(|e| Error::io(path, e))
}

/// Lowercase aspect phrases from the gold spans of a labeled corpus.
pub fn extract_training_aspects(corpus: &Corpus) -> Result<BTreeSet<String>> {
    if !corpus.labeled {
        return Err(Error::contract(format!("corpus {} is not labeled", corpus.domain_id)));
    }
    let mut out = BTreeSet::new();
    for (i, s) in corpus.sentences.iter().enumerate() {
        let gold = s
            .gold_tags
            .as_ref()
            .ok_or_else(|| Error::contract(format!("sentence {i} has no gold tags")))?;
        let words: Vec<&str> = s.words().collect();
        for span in tags::spans(gold) {
            out.insert(tags::phrase(&words, &span));
        }
    }
    Ok(out)
}
