use crate::crf::feature::FeaturizedSentence;
use crate::crf::index::{build_feature_index, FeatureIndex};
use crate::crf::inference::{Marginals, Potentials};
use crate::crf::labels::LabelSet;
use crate::crf::lbfgs::{self, LbfgsParams};
use crate::crf::objective::Objective;
use crate::error::{Error, Result};

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// L2 penalty coefficient on the weight vector.
    pub l2: f64,
    /// Stop once the gradient's infinity norm is at most this.
    pub tol: f64,
    pub max_iters: usize,
    /// Number of curvature pairs kept by L-BFGS.
    pub memory: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2: 1.0,
            tol: 1e-4,
            max_iters: 300,
            memory: 10,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::config(format!("l2 must be finite and >= 0, got {}", self.l2)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::config(format!("tol must be finite and > 0, got {}", self.tol)));
        }
        if self.memory == 0 {
            return Err(Error::config("L-BFGS memory must be at least 1"));
        }
        Ok(())
    }
}

/// Optimizer outcome for a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub iterations: usize,
    pub nll: f64,
    pub grad_norm: f64,
    pub converged: bool,
}

/// A trained linear-chain CRF. Immutable; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    labels: LabelSet,
    index: FeatureIndex,
    weights: Vec<f64>,
    config: TrainConfig,
}

impl CrfModel {
    pub fn from_parts(labels: LabelSet, mut index: FeatureIndex, weights: Vec<f64>, config: TrainConfig) -> Result<Self> {
        if index.num_labels() != labels.len() {
            return Err(Error::contract(format!(
                "index built for {} labels, label set has {}",
                index.num_labels(),
                labels.len()
            )));
        }
        if weights.len() != index.num_slots() {
            return Err(Error::contract(format!(
                "{} weights for {} slots",
                weights.len(),
                index.num_slots()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::contract("model weights must be finite"));
        }
        index.freeze();
        Ok(CrfModel {
            labels,
            index,
            weights,
            config,
        })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn index(&self) -> &FeatureIndex {
        &self.index
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn num_slots(&self) -> usize {
        self.index.num_slots()
    }

    pub fn potentials(&self, sent: &FeaturizedSentence) -> Potentials {
        Potentials::new(&self.index, &self.weights, &self.index.compile(sent))
    }

    pub fn score_sequence(&self, sent: &FeaturizedSentence, labels: &[usize]) -> Result<f64> {
        if labels.len() != sent.len() {
            return Err(Error::contract(format!(
                "label sequence of length {} for sentence of length {}",
                labels.len(),
                sent.len()
            )));
        }
        if labels.iter().any(|&l| l >= self.labels.len()) {
            return Err(Error::contract("label index out of range"));
        }
        Ok(self.potentials(sent).score(labels))
    }

    pub fn log_partition(&self, sent: &FeaturizedSentence) -> f64 {
        self.potentials(sent).log_partition()
    }

    pub fn marginals(&self, sent: &FeaturizedSentence) -> Marginals {
        self.potentials(sent).marginals().1
    }

    pub fn viterbi_decode(&self, sent: &FeaturizedSentence) -> Vec<usize> {
        self.potentials(sent).viterbi()
    }

    /// Decode and map label indices back to tag names.
    pub fn tag(&self, sent: &FeaturizedSentence) -> Vec<String> {
        self.labels.decode(&self.viterbi_decode(sent))
    }
}

/// Penalized NLL of `batch` at the model's weights and its gradient.
pub fn nll_and_gradient(model: &CrfModel, batch: &[FeaturizedSentence], l2: f64) -> Result<(f64, Vec<f64>)> {
    let objective = Objective::new(&model.index, batch, l2)?;
    let mut grad = vec![0.0; objective.dimension()];
    let value = objective.evaluate(&model.weights, &mut grad);
    Ok((value, grad))
}

/// Train a CRF from zero weights.
pub fn train(corpus: &[FeaturizedSentence], labels: &LabelSet, config: &TrainConfig) -> Result<CrfModel> {
    train_from(corpus, labels, config, None).map(|(m, _)| m)
}

/// Train a CRF, optionally from explicit initial weights, and report how
/// the optimizer finished.
pub fn train_from(
    corpus: &[FeaturizedSentence],
    labels: &LabelSet,
    config: &TrainConfig,
    init: Option<&[f64]>,
) -> Result<(CrfModel, TrainReport)> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::config("training corpus is empty"));
    }
    let index = build_feature_index(corpus, labels)?;
    let objective = Objective::new(&index, corpus, config.l2)?;
    let x0 = match init {
        Some(w) if w.len() != index.num_slots() => {
            return Err(Error::contract(format!(
                "initial weights have length {}, expected {}",
                w.len(),
                index.num_slots()
            )))
        }
        Some(w) => w.to_vec(),
        None => vec![0.0; index.num_slots()],
    };
    let min = lbfgs::minimize(
        |w, g| objective.evaluate(w, g),
        x0,
        LbfgsParams {
            memory: config.memory,
            tol: config.tol,
            max_iters: config.max_iters,
        },
    )?;
    let report = TrainReport {
        iterations: min.iterations,
        nll: min.value,
        grad_norm: min.grad_norm,
        converged: min.converged,
    };
    let model = CrfModel::from_parts(labels.clone(), index, min.x, *config)?;
    Ok((model, report))
}
