use crate::crf::feature::FeaturizedSentence;
use crate::crf::index::FeatureIndex;
use crate::crf::inference::Potentials;
use crate::error::{Error, Result};

struct CompiledSentence {
    attributes: Vec<Vec<usize>>,
    gold: Vec<usize>,
}

/// Penalized negative log-likelihood over a fixed labeled batch.
pub(crate) struct Objective<'a> {
    index: &'a FeatureIndex,
    sentences: Vec<CompiledSentence>,
    l2: f64,
}

impl<'a> Objective<'a> {
    pub fn new(index: &'a FeatureIndex, batch: &[FeaturizedSentence], l2: f64) -> Result<Self> {
        if !(l2 >= 0.0 && l2.is_finite()) {
            return Err(Error::config(format!("l2 coefficient must be finite and >= 0, got {l2}")));
        }
        let sentences = batch
            .iter()
            .enumerate()
            .map(|(n, s)| {
                let gold = s
                    .gold()
                    .ok_or_else(|| Error::contract(format!("sentence {n} has no gold labels")))?;
                if gold.iter().any(|&g| g >= index.num_labels()) {
                    return Err(Error::contract(format!("sentence {n} has an out-of-range label")));
                }
                Ok(CompiledSentence {
                    attributes: index.compile(s),
                    gold: gold.to_vec(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Objective { index, sentences, l2 })
    }

    pub fn dimension(&self) -> usize {
        self.index.num_slots()
    }

    /// Objective value and gradient at `weights`. Sentences are reduced in
    /// corpus order.
    pub fn evaluate(&self, weights: &[f64], grad: &mut [f64]) -> f64 {
        let index = self.index;
        let y = index.num_labels();
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut nll = 0.0;
        for sent in &self.sentences {
            let pot = Potentials::new(index, weights, &sent.attributes);
            let (log_z, marg) = pot.marginals();
            nll += log_z - pot.score(&sent.gold);

            for (l, attrs) in sent.attributes.iter().enumerate() {
                let node = &marg.node[l];
                for &a in attrs {
                    let base = index.attribute_slot(a, 0);
                    for i in 0..y {
                        grad[base + i] += node[i];
                    }
                    grad[base + sent.gold[l]] -= 1.0;
                }
                if l > 0 {
                    for i in 0..y {
                        for j in 0..y {
                            grad[index.transition_slot(i, j)] += marg.edge(l, i, j);
                        }
                    }
                    grad[index.transition_slot(sent.gold[l], sent.gold[l - 1])] -= 1.0;
                }
            }
        }
        if self.l2 > 0.0 {
            let mut sq = 0.0;
            for (g, &w) in grad.iter_mut().zip(weights) {
                *g += self.l2 * w;
                sq += w * w;
            }
            nll += 0.5 * self.l2 * sq;
        }
        nll
    }
}
