//! Span-level scoring, the dictionary baseline and the experiment protocol.

mod experiment;
mod metrics;

pub use experiment::{
    run_experiment, run_fold, split_domain, DomainSplit, ExperimentConfig, ExperimentReport, FoldResult, Protocol,
    SplitSizes, System,
};
pub use metrics::{crf_plus_r, evaluate, EvalReport};
