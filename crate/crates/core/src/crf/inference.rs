//! Exact linear-chain inference in log space.

use crate::crf::index::FeatureIndex;

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Per-position label scores and the shared transition matrix for one sentence.
#[derive(Debug, Clone)]
pub struct Potentials {
    num_labels: usize,
    len: usize,
    /// `[position * Y + label]`
    state: Vec<f64>,
    /// `[current * Y + previous]`
    trans: Vec<f64>,
}

/// Posterior marginals from forward-backward.
#[derive(Debug, Clone)]
pub struct Marginals {
    num_labels: usize,
    /// `node[l][i] = P(y_l = i | x)`
    pub node: Vec<Vec<f64>>,
    /// `edge[l - 1][i * Y + j] = P(y_l = i, y_{l-1} = j | x)` for `l >= 1`
    edge: Vec<Vec<f64>>,
}

impl Marginals {
    /// `P(y_l = current, y_{l-1} = previous | x)` for `l >= 1`.
    pub fn edge(&self, l: usize, current: usize, previous: usize) -> f64 {
        assert!(l >= 1, "edge marginals start at position 1");
        self.edge[l - 1][current * self.num_labels + previous]
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }
}

impl Potentials {
    pub fn new(index: &FeatureIndex, weights: &[f64], attributes: &[Vec<usize>]) -> Self {
        let y = index.num_labels();
        let len = attributes.len();
        let mut state = vec![0.0; len * y];
        for (l, attrs) in attributes.iter().enumerate() {
            let row = &mut state[l * y..(l + 1) * y];
            for &a in attrs {
                let base = index.attribute_slot(a, 0);
                for (i, s) in row.iter_mut().enumerate() {
                    *s += weights[base + i];
                }
            }
        }
        let trans = weights[..index.num_transition_slots()].to_vec();
        Potentials {
            num_labels: y,
            len,
            state,
            trans,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn state(&self, l: usize, label: usize) -> f64 {
        self.state[l * self.num_labels + label]
    }

    #[inline]
    pub fn trans(&self, current: usize, previous: usize) -> f64 {
        self.trans[current * self.num_labels + previous]
    }

    /// Unnormalized log-score of a label sequence. Position 0 has no
    /// transition term.
    pub fn score(&self, labels: &[usize]) -> f64 {
        debug_assert_eq!(labels.len(), self.len);
        let mut s = 0.0;
        for (l, &y) in labels.iter().enumerate() {
            s += self.state(l, y);
            if l > 0 {
                s += self.trans(y, labels[l - 1]);
            }
        }
        s
    }

    /// `alpha[l][i]`: log-sum of scores of all prefixes ending in label `i` at `l`.
    pub fn forward(&self) -> Vec<Vec<f64>> {
        let y = self.num_labels;
        let mut alpha = vec![vec![0.0; y]; self.len];
        for i in 0..y {
            alpha[0][i] = self.state(0, i);
        }
        let mut buf = vec![0.0; y];
        for l in 1..self.len {
            for i in 0..y {
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = alpha[l - 1][j] + self.trans(i, j);
                }
                alpha[l][i] = log_sum_exp(&buf) + self.state(l, i);
            }
        }
        alpha
    }

    /// `beta[l][i]`: log-sum of scores of all suffixes after `l` given label `i` at `l`.
    pub fn backward(&self) -> Vec<Vec<f64>> {
        let y = self.num_labels;
        let mut beta = vec![vec![0.0; y]; self.len];
        let mut buf = vec![0.0; y];
        for l in (0..self.len.saturating_sub(1)).rev() {
            for j in 0..y {
                for (i, b) in buf.iter_mut().enumerate() {
                    *b = self.trans(i, j) + self.state(l + 1, i) + beta[l + 1][i];
                }
                beta[l][j] = log_sum_exp(&buf);
            }
        }
        beta
    }

    pub fn log_partition(&self) -> f64 {
        let alpha = self.forward();
        log_sum_exp(&alpha[self.len - 1])
    }

    pub fn marginals(&self) -> (f64, Marginals) {
        let y = self.num_labels;
        let alpha = self.forward();
        let beta = self.backward();
        let log_z = log_sum_exp(&alpha[self.len - 1]);
        let node = (0..self.len)
            .map(|l| (0..y).map(|i| (alpha[l][i] + beta[l][i] - log_z).exp()).collect())
            .collect();
        let edge = (1..self.len)
            .map(|l| {
                let mut m = vec![0.0; y * y];
                for i in 0..y {
                    for j in 0..y {
                        m[i * y + j] =
                            (alpha[l - 1][j] + self.trans(i, j) + self.state(l, i) + beta[l][i] - log_z).exp();
                    }
                }
                m
            })
            .collect();
        (
            log_z,
            Marginals {
                num_labels: y,
                node,
                edge,
            },
        )
    }

    /// Max-product decoding. Ties resolve to the lower label index, both
    /// for back-pointers and for the final label.
    pub fn viterbi(&self) -> Vec<usize> {
        let y = self.num_labels;
        let mut delta = vec![0.0; y];
        for (i, d) in delta.iter_mut().enumerate() {
            *d = self.state(0, i);
        }
        let mut back = vec![vec![0usize; y]; self.len];
        let mut next = vec![0.0; y];
        for l in 1..self.len {
            for i in 0..y {
                let mut best = 0;
                let mut best_score = delta[0] + self.trans(i, 0);
                for (j, &d) in delta.iter().enumerate().skip(1) {
                    let s = d + self.trans(i, j);
                    if s > best_score {
                        best = j;
                        best_score = s;
                    }
                }
                back[l][i] = best;
                next[i] = best_score + self.state(l, i);
            }
            std::mem::swap(&mut delta, &mut next);
        }
        let mut last = 0;
        for i in 1..y {
            if delta[i] > delta[last] {
                last = i;
            }
        }
        let mut path = vec![0; self.len];
        path[self.len - 1] = last;
        for l in (1..self.len).rev() {
            path[l - 1] = back[l][path[l]];
        }
        path
    }
}
