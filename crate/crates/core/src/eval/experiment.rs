//! Cross-domain and in-domain comparison of CRF, CRF+R and L-CRF.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::crf::{train, LabelSet, TrainConfig};
use crate::error::{Error, Result};
use crate::eval::metrics::{crf_plus_r, evaluate, EvalReport};
use crate::features::{featurize, tokens_of_aspects};
use crate::io::{extract_training_aspects, Corpus};
use crate::lifelong::{decode_domain, lifelong_extract, mine_frequent_aspects, AspectStore, LifelongConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// Train on all other domains, test on the held-out one.
    CrossDomain,
    /// Train and test on all other domains.
    InDomain,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::CrossDomain => "cross",
            Protocol::InDomain => "in",
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cross" => Ok(Protocol::CrossDomain),
            "in" => Ok(Protocol::InDomain),
            _ => Err(Error::config(format!("unknown protocol {s:?} (expected cross or in)"))),
        }
    }
}

/// One labeled domain with its train and test portions.
#[derive(Debug, Clone)]
pub struct DomainSplit {
    pub domain_id: String,
    pub train: Corpus,
    pub test: Corpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSizes {
    pub train: usize,
    pub test: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes { train: 200, test: 200 }
    }
}

/// Shuffle a domain with `seed` and cut it into train and test portions.
///
/// With at least `train + test` sentences the first `train` go to training
/// and the next `test` to testing. Smaller domains are divided in the same
/// proportion with every sentence used; a single sentence serves as both.
pub fn split_domain(corpus: &Corpus, sizes: SplitSizes, seed: u64) -> Result<DomainSplit> {
    let n = corpus.len();
    if n == 0 {
        return Err(Error::config(format!("domain {} has no sentences", corpus.domain_id)));
    }
    if sizes.train == 0 || sizes.test == 0 {
        return Err(Error::config("split sizes must be positive"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train_idx, test_idx): (&[usize], &[usize]) = if n >= sizes.train + sizes.test {
        (&order[..sizes.train], &order[sizes.train..sizes.train + sizes.test])
    } else if n == 1 {
        (&order[..], &order[..])
    } else {
        let cut = ((n * sizes.train) as f64 / (sizes.train + sizes.test) as f64).round() as usize;
        let cut = cut.clamp(1, n - 1);
        (&order[..cut], &order[cut..])
    };
    Ok(DomainSplit {
        domain_id: corpus.domain_id.clone(),
        train: corpus.subset(corpus.domain_id.clone(), train_idx),
        test: corpus.subset(corpus.domain_id.clone(), test_idx),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    pub lifelong: LifelongConfig,
    /// Recorded in the report; splitting happens before `run_experiment`.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Crf,
    CrfPlusR,
    LCrf,
}

impl System {
    pub const ALL: [System; 3] = [System::Crf, System::CrfPlusR, System::LCrf];

    pub fn name(self) -> &'static str {
        match self {
            System::Crf => "CRF",
            System::CrfPlusR => "CRF+R",
            System::LCrf => "L-CRF",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub training: String,
    pub testing: String,
    /// Indexed like [`System::ALL`].
    pub reports: [EvalReport; 3],
    pub lifelong_iterations: usize,
    pub lifelong_converged: bool,
}

impl FoldResult {
    pub fn report(&self, system: System) -> &EvalReport {
        &self.reports[System::ALL.iter().position(|&s| s == system).unwrap()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub protocol: Protocol,
    pub seed: u64,
    pub folds: Vec<FoldResult>,
}

impl ExperimentReport {
    /// Macro-averaged (P, R, F1) per system over folds.
    pub fn averages(&self) -> [(f64, f64, f64); 3] {
        let n = self.folds.len().max(1) as f64;
        let mut out = [(0.0, 0.0, 0.0); 3];
        for fold in &self.folds {
            for (o, r) in out.iter_mut().zip(&fold.reports) {
                o.0 += r.precision;
                o.1 += r.recall;
                o.2 += r.f1;
            }
        }
        out.map(|(p, r, f)| (p / n, r / n, f / n))
    }

    /// Aligned plain-text table, scores in percent.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "protocol: {}  seed: {}", self.protocol.name(), self.seed);
        let width = self
            .folds
            .iter()
            .flat_map(|f| [f.training.len(), f.testing.len()])
            .chain([8, 7])
            .max()
            .unwrap();
        let _ = write!(out, "{:<width$}  {:<width$}", "training", "testing");
        for s in System::ALL {
            let _ = write!(out, " | {:^20}", s.name());
        }
        out.push('\n');
        let _ = write!(out, "{:<width$}  {:<width$}", "", "");
        for _ in System::ALL {
            let _ = write!(out, " | {:>6} {:>6} {:>6}", "P", "R", "F1");
        }
        out.push('\n');
        let pct = |x: f64| format!("{:.1}", 100.0 * x);
        for f in &self.folds {
            let _ = write!(out, "{:<width$}  {:<width$}", f.training, f.testing);
            for r in &f.reports {
                let _ = write!(out, " | {:>6} {:>6} {:>6}", pct(r.precision), pct(r.recall), pct(r.f1));
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<width$}  {:<width$}", "", "average");
        for (p, r, f) in self.averages() {
            let _ = write!(out, " | {:>6} {:>6} {:>6}", pct(p), pct(r), pct(f));
        }
        out.push('\n');
        out
    }

    /// Tab-separated `fold, system, precision, recall, f1` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# protocol={} seed={}", self.protocol.name(), self.seed);
        out.push_str("fold\tsystem\tprecision\trecall\tf1\n");
        for f in &self.folds {
            for (s, r) in System::ALL.iter().zip(&f.reports) {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{:.6}\t{:.6}\t{:.6}",
                    f.testing,
                    s.name(),
                    r.precision,
                    r.recall,
                    r.f1
                );
            }
        }
        for (s, (p, r, f1)) in System::ALL.iter().zip(self.averages()) {
            let _ = writeln!(out, "average\t{}\t{p:.6}\t{r:.6}\t{f1:.6}", s.name());
        }
        out
    }
}

/// Train on `train`, then score all three systems on `test`.
pub fn run_fold(
    training: &str,
    testing: &str,
    train_corpus: &Corpus,
    test: &Corpus,
    store: &AspectStore,
    config: &ExperimentConfig,
) -> Result<FoldResult> {
    let labels = LabelSet::bio();
    let kt = extract_training_aspects(train_corpus)?;
    let kb_t = tokens_of_aspects(&kt);
    let featurized = train_corpus
        .sentences()
        .iter()
        .map(|s| featurize(s, &kb_t, &labels))
        .collect::<Result<Vec<_>>>()?;
    let model = train(&featurized, &labels, &config.train)?;

    let gold = test.gold_tags()?;
    let crf = decode_domain(&model, test.sentences(), &kb_t)?;

    let reliable: BTreeSet<String> = kt
        .union(&mine_frequent_aspects(store, config.lifelong.lambda))
        .cloned()
        .collect();
    let crf_r = crf_plus_r(&crf, &reliable, test)?;

    let (lifelong, _) = lifelong_extract(&model, testing, test.sentences(), store.clone(), &kt, &config.lifelong)?;
    let lcrf = decode_domain(&model, test.sentences(), &tokens_of_aspects(&lifelong.knowledge))?;

    Ok(FoldResult {
        training: training.to_string(),
        testing: testing.to_string(),
        reports: [evaluate(&gold, &crf)?, evaluate(&gold, &crf_r)?, evaluate(&gold, &lcrf)?],
        lifelong_iterations: lifelong.iterations,
        lifelong_converged: lifelong.converged,
    })
}

/// One fold per domain, in input order.
pub fn run_experiment(
    domains: &[DomainSplit],
    store: &AspectStore,
    protocol: Protocol,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if domains.len() < 2 {
        return Err(Error::config(format!(
            "an experiment needs at least 2 domains, got {}",
            domains.len()
        )));
    }
    for d in domains {
        if !d.train.labeled || !d.test.labeled {
            return Err(Error::config(format!("domain {} is not labeled", d.domain_id)));
        }
    }
    let folds = (0..domains.len())
        .map(|k| {
            let held_out = &domains[k];
            let others = || domains.iter().enumerate().filter(move |&(i, _)| i != k).map(|(_, d)| d);
            let training = format!("-{}", held_out.domain_id);
            let train_corpus = Corpus::concat(&training, others().map(|d| &d.train));
            match protocol {
                Protocol::CrossDomain => {
                    run_fold(&training, &held_out.domain_id, &train_corpus, &held_out.test, store, config)
                }
                Protocol::InDomain => {
                    let test = Corpus::concat(&training, others().map(|d| &d.test));
                    run_fold(&training, &training, &train_corpus, &test, store, config)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        protocol,
        seed: config.seed,
        folds,
    })
}
