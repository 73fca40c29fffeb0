//! Filter-learning models and the node-classification protocol.

mod config;
mod network;
mod split;
mod train;

pub use config::{ModelConfig, ModelKind};
pub use network::{Model, FILTER_GRID};
pub use split::{make_split, Regime, Split};
pub use train::{
    accuracy, evaluate, mean_ci95, repeat_runs, repeat_train, train, train_model, RepeatSummary,
    SplitAccuracy,
    TrainReport,
};
