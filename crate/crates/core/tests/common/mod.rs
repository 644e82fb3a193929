#![allow(dead_code)]

use std::collections::BTreeSet;

use lcrf::crf::{
    train, CrfModel, Feature, FeatureIndex, FeatureVector, FeaturizedSentence, LabelSet, Template, TrainConfig,
};
use lcrf::features::{featurize, tokens_of_aspects};
use lcrf::io::{extract_training_aspects, ConllRecord, Corpus};
use rand::Rng;

// ---------------------------------------------------------------------------
// Brute-force oracles. These only use the index's slot lookup and the raw
// weight vector, never the library's inference code.
// ---------------------------------------------------------------------------

pub fn oracle_score(model: &CrfModel, sent: &FeaturizedSentence, y: &[usize]) -> f64 {
    let index = model.index();
    let w = model.weights();
    let mut total = 0.0;
    for (l, fv) in sent.tokens().iter().enumerate() {
        for f in fv.iter() {
            if let Some(slot) = index.feature_slot(f, y[l]) {
                total += w[slot];
            }
        }
        if l > 0 {
            total += w[index.transition_slot(y[l], y[l - 1])];
        }
    }
    total
}

/// Every label sequence of length `len` over `num_labels` labels.
pub fn all_sequences(len: usize, num_labels: usize) -> Vec<Vec<usize>> {
    let total = num_labels.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut y = vec![0; len];
            for slot in y.iter_mut().rev() {
                *slot = code % num_labels;
                code /= num_labels;
            }
            y
        })
        .collect()
}

pub struct Enumeration {
    pub log_z: f64,
    pub best_score: f64,
    /// `node[l][i]`
    pub node: Vec<Vec<f64>>,
    /// `edge[l][i][j]` for `l >= 1` (index 0 unused)
    pub edge: Vec<Vec<Vec<f64>>>,
    pub max_posterior: f64,
}

pub fn enumerate(model: &CrfModel, sent: &FeaturizedSentence) -> Enumeration {
    let y = model.labels().len();
    let len = sent.len();
    let seqs = all_sequences(len, y);
    let scores: Vec<f64> = seqs.iter().map(|s| oracle_score(model, sent, s)).collect();
    let best_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scores.iter().map(|s| (s - best_score).exp()).sum();
    let log_z = best_score + z.ln();
    let mut node = vec![vec![0.0; y]; len];
    let mut edge = vec![vec![vec![0.0; y]; y]; len];
    for (seq, s) in seqs.iter().zip(&scores) {
        let p = (s - log_z).exp();
        for l in 0..len {
            node[l][seq[l]] += p;
            if l > 0 {
                edge[l][seq[l]][seq[l - 1]] += p;
            }
        }
    }
    Enumeration {
        log_z,
        best_score,
        node,
        edge,
        max_posterior: (best_score - log_z).exp(),
    }
}

/// Central finite-difference gradient of the penalized NLL.
pub fn finite_difference_gradient(model: &CrfModel, batch: &[FeaturizedSentence], l2: f64, eps: f64) -> Vec<f64> {
    let base = model.weights().to_vec();
    let nll_at = |w: Vec<f64>| {
        let m = CrfModel::from_parts(model.labels().clone(), model.index().clone(), w, *model.config()).unwrap();
        // Independent objective: enumeration-based log partition minus oracle score.
        let mut total = 0.0;
        for s in batch {
            total += enumerate(&m, s).log_z - oracle_score(&m, s, s.gold().unwrap());
        }
        total + 0.5 * l2 * m.weights().iter().map(|x| x * x).sum::<f64>()
    };
    (0..base.len())
        .map(|k| {
            let mut plus = base.clone();
            let mut minus = base.clone();
            plus[k] += eps;
            minus[k] -= eps;
            (nll_at(plus) - nll_at(minus)) / (2.0 * eps)
        })
        .collect()
}

/// `|a - b| / max(|a|, |b|, 1e-3)`
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}

// ---------------------------------------------------------------------------
// Random small models
// ---------------------------------------------------------------------------

pub fn random_pool(rng: &mut impl Rng, size: usize) -> Vec<Feature> {
    let templates = Template::ALL;
    (0..size)
        .map(|i| Feature::new(templates[rng.gen_range(0..templates.len())], format!("v{i}")))
        .collect()
}

/// A 3-label model over at most `max_values` distinct feature values with
/// weights in [-2, 2].
pub fn random_model(rng: &mut impl Rng, max_values: usize) -> (CrfModel, Vec<Feature>) {
    let labels = LabelSet::bio();
    let size = rng.gen_range(1..=max_values);
    let pool = random_pool(rng, size);
    let mut index = FeatureIndex::new(labels.len());
    for f in &pool {
        index.intern(f);
    }
    index.freeze();
    let weights = (0..index.num_slots()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    (CrfModel::from_parts(labels, index, weights, TrainConfig::default()).unwrap(), pool)
}

/// Each token draws up to three pool features, one per single-valued
/// template, plus occasionally a value unknown to the model.
pub fn random_sentence(rng: &mut impl Rng, pool: &[Feature], max_len: usize, with_gold: bool) -> FeaturizedSentence {
    let labels = LabelSet::bio();
    let len = rng.gen_range(1..=max_len);
    let tokens = (0..len)
        .map(|_| {
            let mut fv = FeatureVector::new();
            for _ in 0..rng.gen_range(0..=3) {
                let f = pool[rng.gen_range(0..pool.len())].clone();
                let _ = fv.insert(f);
            }
            if rng.gen_bool(0.2) {
                let _ = fv.insert(Feature::new(Template::Dependency, "unseen(*,O/XX)"));
            }
            fv
        })
        .collect();
    let gold = with_gold.then(|| (0..len).map(|_| rng.gen_range(0..3)).collect());
    FeaturizedSentence::new(tokens, gold, &labels).unwrap()
}

// ---------------------------------------------------------------------------
// Parsed-corpus fixtures
// ---------------------------------------------------------------------------

/// `(word, pos, head, deprel, tag)` rows, 1-based heads.
pub type Row<'a> = (&'a str, &'a str, usize, &'a str, &'a str);

pub fn records(rows: &[Row], labeled: bool) -> Vec<ConllRecord> {
    rows.iter()
        .enumerate()
        .map(|(i, &(w, p, h, d, t))| ConllRecord::new(i + 1, w, p, h, d, labeled.then_some(t)))
        .collect()
}

/// "the X of the Y is good": X heads Y through `nmod`.
pub fn nmod_sentence(x: &str, y: &str, x_tag: &str, y_tag: &str, labeled: bool) -> Vec<ConllRecord> {
    records(
        &[
            ("the", "DT", 2, "det", "O"),
            (x, "NN", 7, "nsubj", x_tag),
            ("of", "IN", 5, "case", "O"),
            ("the", "DT", 5, "det", "O"),
            (y, "NN", 2, "nmod", y_tag),
            ("is", "VBZ", 7, "cop", "O"),
            ("good", "JJ", 0, "root", "O"),
        ],
        labeled,
    )
}

/// Training data where aspect-hood is carried by the nmod partner: both
/// nouns are aspects or neither is, and most nouns occur only once.
pub fn pattern_training_corpus() -> Corpus {
    let mut sents = Vec::new();
    for i in 0..20 {
        let partner = if i % 4 == 0 { "battery".to_string() } else { format!("part{i}") };
        sents.push(nmod_sentence(&format!("feature{i}"), &partner, "B-ASP", "B-ASP", true));
        sents.push(nmod_sentence(&format!("friend{i}"), &format!("cousin{i}"), "O", "O", true));
    }
    Corpus::from_records("train", sents, true).unwrap()
}

pub fn train_on(corpus: &Corpus) -> (CrfModel, BTreeSet<String>) {
    let labels = LabelSet::bio();
    let kt = extract_training_aspects(corpus).unwrap();
    let kb = tokens_of_aspects(&kt);
    let featurized: Vec<_> = corpus
        .sentences()
        .iter()
        .map(|s| featurize(s, &kb, &labels).unwrap())
        .collect();
    (train(&featurized, &labels, &TrainConfig::default()).unwrap(), kt)
}

/// Two past domains where "lens" is reachable only through the known aspect
/// "battery", and a new domain where "zoom" is reachable only through "lens".
pub struct LifelongFixture {
    pub past: Vec<Corpus>,
    pub new_domain: Corpus,
}

pub fn lifelong_fixture() -> LifelongFixture {
    let past = (1..=2)
        .map(|d| {
            let sents = vec![
                nmod_sentence("lens", "battery", "B-ASP", "B-ASP", false),
                nmod_sentence(&format!("owner{d}"), &format!("neighbor{d}"), "O", "O", false),
            ];
            Corpus::from_records(format!("past{d}"), sents, false).unwrap()
        })
        .collect();
    let new_domain = Corpus::from_records(
        "camera",
        vec![
            nmod_sentence("zoom", "lens", "B-ASP", "B-ASP", true),
            nmod_sentence("flash", "lens", "B-ASP", "B-ASP", true),
            nmod_sentence("brother", "uncle", "O", "O", true),
        ],
        true,
    )
    .unwrap();
    LifelongFixture { past, new_domain }
}

/// A corpus in which every word has a fixed tag. Heads form a right-branching chain.
pub fn separable_corpus(rng: &mut impl Rng, sentences: usize) -> Corpus {
    const OUTSIDE: &[(&str, &str)] = &[
        ("the", "DT"),
        ("is", "VBZ"),
        ("great", "JJ"),
        ("awful", "JJ"),
        ("and", "CC"),
        ("very", "RB"),
        ("really", "RB"),
    ];
    const SINGLE: &[&str] = &["screen", "price", "keyboard", "speaker"];
    let sents = (0..sentences)
        .map(|_| {
            let mut toks: Vec<(String, &str, &str)> = Vec::new();
            let n = rng.gen_range(2..=6);
            for _ in 0..n {
                match rng.gen_range(0..4) {
                    0 => toks.push((SINGLE[rng.gen_range(0..SINGLE.len())].into(), "NN", "B-ASP")),
                    1 => {
                        toks.push(("battery".into(), "NN", "B-ASP"));
                        toks.push(("life".into(), "NN", "I-ASP"));
                    }
                    _ => {
                        let (w, p) = OUTSIDE[rng.gen_range(0..OUTSIDE.len())];
                        toks.push((w.into(), p, "O"));
                    }
                }
            }
            let len = toks.len();
            toks.iter()
                .enumerate()
                .map(|(i, (w, p, t))| {
                    let head = if i + 1 == len { 0 } else { i + 2 };
                    let rel = if head == 0 { "root" } else { "dep" };
                    ConllRecord::new(i + 1, w, p, head, rel, Some(t))
                })
                .collect()
        })
        .collect();
    Corpus::from_records("separable", sents, true).unwrap()
}

pub fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// A labeled domain of nmod sentences with fresh nouns. Every third aspect
/// sentence pairs with "battery".
pub fn pattern_domain(name: &str, sentences: usize) -> Corpus {
    let sents = (0..sentences)
        .map(|i| {
            if i % 2 == 0 {
                let partner = if i % 3 == 0 { "battery".to_string() } else { format!("{name}piece{i}") };
                nmod_sentence(&format!("{name}part{i}"), &partner, "B-ASP", "B-ASP", true)
            } else {
                nmod_sentence(&format!("{name}owner{i}"), &format!("{name}pal{i}"), "O", "O", true)
            }
        })
        .collect();
    Corpus::from_records(name, sents, true).unwrap()
}

/// "The battery of this camera is great", with "battery" tagged as the aspect.
pub fn battery_corpus() -> Corpus {
    Corpus::from_records(
        "example",
        vec![records(
            &[
                ("The", "DT", 2, "det", "O"),
                ("battery", "NN", 7, "nsubj", "B-ASP"),
                ("of", "IN", 5, "case", "O"),
                ("this", "DT", 5, "det", "O"),
                ("camera", "NN", 2, "nmod", "O"),
                ("is", "VBZ", 7, "cop", "O"),
                ("great", "JJ", 0, "root", "O"),
            ],
            true,
        )],
        true,
    )
    .unwrap()
}
