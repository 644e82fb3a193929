//! Linear-chain conditional random field.

mod feature;
mod index;
mod inference;
mod labels;
mod lbfgs;
mod model;
mod objective;

pub use feature::{Feature, FeatureVector, FeaturizedSentence, Template};
pub use index::{build_feature_index, FeatureIndex};
pub use inference::{Marginals, Potentials};
pub use labels::{LabelSet, BEGIN_ASPECT, INSIDE_ASPECT, OUTSIDE};
pub use model::{nll_and_gradient, train, train_from, CrfModel, TrainConfig, TrainReport};
