mod common;

use common::*;
use lcrf::crf::{nll_and_gradient, train, train_from, CrfModel, LabelSet, TrainConfig};
use lcrf::features::{featurize, tokens_of_aspects};
use lcrf::io::extract_training_aspects;
use lcrf::tags;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, with_gold: bool) -> (CrfModel, lcrf::crf::FeaturizedSentence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (model, pool) = random_model(&mut rng, 8);
    let sent = random_sentence(&mut rng, &pool, 6, with_gold);
    (model, sent)
}

#[test]
fn score_matches_hand_sum() {
    for seed in 0..100 {
        let (model, sent) = instance(seed, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let y: Vec<usize> = (0..sent.len()).map(|_| rng.gen_range(0..3)).collect();
        let got = model.score_sequence(&sent, &y).unwrap();
        assert!((got - oracle_score(&model, &sent, &y)).abs() < 1e-12);
    }
}

#[test]
fn viterbi_and_partition_match_enumeration() {
    for seed in 0..200 {
        let (model, sent) = instance(seed, false);
        let e = enumerate(&model, &sent);
        let path = model.viterbi_decode(&sent);
        assert!((oracle_score(&model, &sent, &path) - e.best_score).abs() < 1e-9);
        let z = model.log_partition(&sent);
        assert!(relative_error(z, e.log_z) < 1e-9, "seed {seed}: {z} vs {}", e.log_z);
    }
}

#[test]
fn marginals_match_enumeration() {
    for seed in 0..100 {
        let (model, sent) = instance(seed, false);
        let e = enumerate(&model, &sent);
        let m = model.marginals(&sent);
        for l in 0..sent.len() {
            for i in 0..3 {
                assert!((m.node[l][i] - e.node[l][i]).abs() < 1e-9);
                if l > 0 {
                    for j in 0..3 {
                        assert!((m.edge(l, i, j) - e.edge[l][i][j]).abs() < 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, pool) = random_model(&mut rng, 6);
        let batch: Vec<_> = (0..3).map(|_| random_sentence(&mut rng, &pool, 4, true)).collect();
        for l2 in [0.0, 0.7] {
            let (_, grad) = nll_and_gradient(&model, &batch, l2).unwrap();
            let fd = finite_difference_gradient(&model, &batch, l2, 1e-5);
            for (k, (a, b)) in grad.iter().zip(&fd).enumerate() {
                assert!(relative_error(*a, *b) < 1e-4, "seed {seed} slot {k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn objective_is_additive_over_batches() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, pool) = random_model(&mut rng, 8);
        let batch: Vec<_> = (0..4).map(|_| random_sentence(&mut rng, &pool, 6, true)).collect();
        let doubled: Vec<_> = batch.iter().chain(&batch).cloned().collect();
        let (single, g1) = nll_and_gradient(&model, &batch, 0.0).unwrap();
        let (double, g2) = nll_and_gradient(&model, &doubled, 0.0).unwrap();
        assert!((double - 2.0 * single).abs() < 1e-9 * single.abs().max(1.0));
        for (a, b) in g1.iter().zip(&g2) {
            assert!((b - 2.0 * a).abs() < 1e-9 * a.abs().max(1.0));
        }
    }
}

#[test]
fn penalized_objective_has_a_unique_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (_, pool) = random_model(&mut rng, 8);
    let batch: Vec<_> = (0..8).map(|_| random_sentence(&mut rng, &pool, 6, true)).collect();
    let labels = LabelSet::bio();
    let config = TrainConfig {
        tol: 1e-7,
        max_iters: 1000,
        ..TrainConfig::default()
    };
    let (from_zero, _) = train_from(&batch, &labels, &config, None).unwrap();
    let init: Vec<f64> = (0..from_zero.num_slots()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (from_random, _) = train_from(&batch, &labels, &config, Some(&init)).unwrap();
    let (a, _) = nll_and_gradient(&from_zero, &batch, config.l2).unwrap();
    let (b, _) = nll_and_gradient(&from_random, &batch, config.l2).unwrap();
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn training_is_bit_deterministic() {
    let corpus = pattern_training_corpus();
    let (a, _) = train_on(&corpus);
    let (b, _) = train_on(&corpus);
    assert_eq!(a.weights(), b.weights());
}

#[test]
fn separable_corpus_is_learned_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let corpus = separable_corpus(&mut rng, 50);
    let labels = LabelSet::bio();
    let kb = tokens_of_aspects(&extract_training_aspects(&corpus).unwrap());
    let batch: Vec<_> = corpus.sentences().iter().map(|s| featurize(s, &kb, &labels).unwrap()).collect();
    let model = train(&batch, &labels, &TrainConfig::default()).unwrap();
    for (s, fs) in corpus.sentences().iter().zip(&batch) {
        assert_eq!(model.tag(fs), s.gold_tags.clone().unwrap());
    }
}

#[test]
fn single_token_sentences_decode_by_state_score() {
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, pool) = random_model(&mut rng, 8);
        let sent = random_sentence(&mut rng, &pool, 1, false);
        let scores: Vec<f64> = (0..3).map(|y| oracle_score(&model, &sent, &[y])).collect();
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let first_best = scores.iter().position(|&s| s == best).unwrap();
        assert_eq!(model.viterbi_decode(&sent), vec![first_best]);
    }
}

proptest! {
    #[test]
    fn partition_bounds_every_path(seed in any::<u64>()) {
        let (model, sent) = instance(seed, true);
        let z = model.log_partition(&sent);
        let gold = sent.gold().unwrap().to_vec();
        prop_assert!(model.score_sequence(&sent, &gold).unwrap() <= z + 1e-12);
        prop_assert!(z.is_finite());
    }

    #[test]
    fn node_marginals_are_distributions(seed in any::<u64>()) {
        let (model, sent) = instance(seed, false);
        let m = model.marginals(&sent);
        for l in 0..sent.len() {
            let total: f64 = m.node[l].iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(m.node[l].iter().all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)));
            if l > 0 {
                for i in 0..3 {
                    let row: f64 = (0..3).map(|j| m.edge(l, i, j)).sum();
                    prop_assert!((row - m.node[l][i]).abs() < 1e-9);
                    let col: f64 = (0..3).map(|j| m.edge(l, j, i)).sum();
                    prop_assert!((col - m.node[l - 1][i]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn decoded_tags_form_valid_spans(seed in any::<u64>()) {
        let (model, sent) = instance(seed, false);
        let tagged = model.tag(&sent);
        prop_assert_eq!(tagged.len(), sent.len());
        for s in tags::spans(&tagged) {
            prop_assert!(s.start < s.end && s.end <= sent.len());
        }
    }
}
