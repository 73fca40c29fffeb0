use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{make_split, Model, ModelConfig, Regime, Split};
use crate::autodiff::{Adam, GroupHyper, ParamStore, Tape};
use crate::error::{Error, Result};
use crate::format::{csv_line, fmt_g};
use crate::graph::Dataset;
use crate::linalg::Matrix;
use crate::par;
use crate::spectral::SampledFilter;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub model: String,
    pub config: ModelConfig,
    pub epochs_run: usize,
    /// 0-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub train_loss: Vec<f64>,
    pub val_acc: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub best_val_acc: f64,
    pub test_acc: f64,
    pub learned_filter: Option<SampledFilter>,
    pub wall_seconds: f64,
}

impl TrainReport {
    /// `epoch,train_loss,val_acc`
    pub fn history_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_acc\n");
        for (e, (l, a)) in self.train_loss.iter().zip(&self.val_acc).enumerate() {
            out.push_str(&csv_line([e.to_string(), fmt_g(*l), fmt_g(*a)]));
            out.push('\n');
        }
        out
    }

    /// Equality of everything except timing.
    pub fn same_outcome(&self, other: &TrainReport) -> bool {
        let strip = |r: &TrainReport| TrainReport {
            wall_seconds: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

/// Fraction of nodes in `mask` whose arg-max logit equals the label. Ties go
/// to the lowest class index.
pub fn accuracy(logits: &Matrix, labels: &[usize], mask: &[usize]) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::InvalidArgument("accuracy over an empty node set".into()));
    }
    if labels.len() != logits.rows() {
        return Err(Error::dim(logits.rows(), labels.len()));
    }
    let mut correct = 0usize;
    for &i in mask {
        if i >= logits.rows() {
            return Err(Error::Index { index: i, n: logits.rows() });
        }
        let row = logits.row(i);
        let pred = (0..row.len())
            .fold(0, |best, j| if row[j] > row[best] { j } else { best });
        correct += usize::from(pred == labels[i]);
    }
    Ok(correct as f64 / mask.len() as f64)
}

/// Mean NLL of the rows in `mask` under row-wise softmax.
fn masked_nll(logits: &Matrix, labels: &[usize], mask: &[usize]) -> f64 {
    let total: f64 = mask
        .iter()
        .map(|&i| {
            let row = logits.row(i);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            lse - row[labels[i]]
        })
        .sum();
    total / mask.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitAccuracy {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

/// Accuracy of `model` on each part of `split`, dropout disabled.
pub fn evaluate(model: &Model, dataset: &Dataset, split: &Split) -> Result<SplitAccuracy> {
    let logits = model.predict(&dataset.features)?;
    Ok(SplitAccuracy {
        train: accuracy(&logits, &dataset.labels, &split.train)?,
        val: accuracy(&logits, &dataset.labels, &split.val)?,
        test: accuracy(&logits, &dataset.labels, &split.test)?,
    })
}

pub fn train(dataset: &Dataset, split: &Split, config: &ModelConfig) -> Result<TrainReport> {
    Ok(train_model(dataset, split, config)?.0)
}

/// Full-batch training with early stopping on validation accuracy (ties go
/// to the lower validation loss). Returns the report and the model with its
/// best-epoch parameters restored.
pub fn train_model(dataset: &Dataset, split: &Split, config: &ModelConfig) -> Result<(TrainReport, Model)> {
    config.validate()?;
    split.validate(dataset.num_nodes())?;
    for (name, part) in [("train", &split.train), ("validation", &split.val), ("test", &split.test)] {
        if part.is_empty() {
            return Err(Error::Training(format!("{name} set is empty")));
        }
    }
    let start = Instant::now();
    let mut model = Model::new(dataset, config)?;
    let mut adam = Adam::new(
        &model.params,
        GroupHyper {
            lr: config.lr_linear,
            weight_decay: config.wd_linear,
        },
        GroupHyper {
            lr: config.lr_prop,
            weight_decay: config.wd_prop,
        },
    );
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(config.seed);
    dropout_rng.set_stream(1);

    let mut train_loss = Vec::new();
    let mut val_acc = Vec::new();
    let mut val_loss = Vec::new();
    let mut best: Option<(usize, f64, f64, f64, ParamStore)> = None;
    let mut stale = 0usize;

    for epoch in 0..config.epochs {
        let Model { arch, params } = &mut model;
        params.zero_grad();
        let mut tape = Tape::new();
        let out = arch.forward(&mut tape, params, &dataset.features, true, &mut dropout_rng)?;
        let lp = tape.log_softmax(out);
        let loss = tape.nll_loss(lp, &dataset.labels, &split.train)?;
        let loss_value = tape.scalar(loss);
        if !loss_value.is_finite() {
            return Err(Error::Training(format!("loss became {loss_value} at epoch {epoch}")));
        }
        tape.backward(loss, params)?;
        drop(tape);
        adam.step(params)?;

        let logits = model.predict(&dataset.features)?;
        let acc = accuracy(&logits, &dataset.labels, &split.val)?;
        let vloss = masked_nll(&logits, &dataset.labels, &split.val);
        train_loss.push(loss_value);
        val_acc.push(acc);
        val_loss.push(vloss);

        let improved = match &best {
            None => true,
            Some((_, best_acc, best_loss, _, _)) => acc > *best_acc || (acc == *best_acc && vloss < *best_loss),
        };
        if improved {
            let test = accuracy(&logits, &dataset.labels, &split.test)?;
            best = Some((epoch, acc, vloss, test, model.params.clone()));
            stale = 0;
        } else {
            stale += 1;
            if stale > config.patience {
                break;
            }
        }
    }

    let (best_epoch, best_val_acc, _, test_acc, best_params) = best.expect("at least one epoch runs");
    model.params = best_params;
    let report = TrainReport {
        model: config.model.name().to_string(),
        config: config.clone(),
        epochs_run: train_loss.len(),
        best_epoch,
        train_loss,
        val_acc,
        val_loss,
        best_val_acc,
        test_acc,
        learned_filter: model.learned_filter(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, model))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatSummary {
    pub runs: usize,
    pub regime: Regime,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub ci95: f64,
    pub reports: Vec<TrainReport>,
}

/// Mean and `1.96 · s / sqrt(n)` with the sample standard deviation.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * var.sqrt() / (n as f64).sqrt())
}

/// `runs` independent trainings with seeds `seed, seed + 1, ...`, each with a
/// fresh split and initialization. Up to `jobs` runs execute at once;
/// results come back in seed order.
pub fn repeat_runs(
    dataset: &Dataset,
    regime: Regime,
    config: &ModelConfig,
    runs: usize,
    jobs: usize,
) -> Result<RepeatSummary> {
    Ok(repeat_train(dataset, regime, config, runs, jobs)?.0)
}

/// [`repeat_runs`] that also hands back each run's best-epoch model.
pub fn repeat_train(
    dataset: &Dataset,
    regime: Regime,
    config: &ModelConfig,
    runs: usize,
    jobs: usize,
) -> Result<(RepeatSummary, Vec<Model>)> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be positive".into()));
    }
    config.validate()?;
    let results = par::with_threads(jobs, || {
        par::map_indexed(runs, |r| {
            let seed = config.seed.wrapping_add(r as u64);
            let split = make_split(dataset, regime, seed)?;
            let cfg = ModelConfig {
                seed,
                ..config.clone()
            };
            train_model(dataset, &split, &cfg)
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (reports, models): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let accuracies: Vec<f64> = reports.iter().map(|r| r.test_acc).collect();
    let (mean, ci95) = mean_ci95(&accuracies);
    let summary = RepeatSummary {
        runs,
        regime,
        accuracies,
        mean,
        ci95,
        reports,
    };
    Ok((summary, models))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_synthetic, SyntheticKind};
    use crate::models::ModelKind;
    use rand::Rng;

    fn quick(model: ModelKind) -> ModelConfig {
        ModelConfig {
            model,
            k: if model == ModelKind::Chebnet { 2 } else { 4 },
            hidden: 16,
            epochs: 30,
            patience: 30,
            ..ModelConfig::default()
        }
    }

    #[test]
    fn accuracy_examples() {
        let logits = Matrix::from_fn(4, 3, |i, j| if j == i % 3 { 1.0 } else { 0.0 });
        assert_eq!(accuracy(&logits, &[0, 1, 2, 0], &[0, 1, 2, 3]).unwrap(), 1.0);
        assert_eq!(accuracy(&logits, &[1, 1, 2, 0], &[0, 1]).unwrap(), 0.5);
        assert!(accuracy(&logits, &[0, 1, 2, 0], &[]).is_err());
        let ties = Matrix::zeros(2, 3);
        assert_eq!(accuracy(&ties, &[0, 1], &[0, 1]).unwrap(), 0.5);
    }

    #[test]
    fn random_predictor_near_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let n = 10_000;
        let logits = Matrix::from_fn(n, 5, |_, _| rng.random::<f64>());
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..5)).collect();
        let mask: Vec<usize> = (0..n).collect();
        let acc = accuracy(&logits, &labels, &mask).unwrap();
        assert!((acc - 0.2).abs() <= 0.05, "{acc}");
    }

    #[test]
    fn ci_examples() {
        assert_eq!(mean_ci95(&[0.8]), (0.8, 0.0));
        assert_eq!(mean_ci95(&[0.7; 5]).1, 0.0);
        let (m, ci) = mean_ci95(&[0.0, 1.0]);
        assert_eq!(m, 0.5);
        assert!((ci - 1.96 * 0.5f64.sqrt() / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_loss_decreases() {
        let d = generate_synthetic(120, SyntheticKind::Homophilic, 2).unwrap();
        let split = make_split(&d, Regime::Full, 2).unwrap();
        for model in ModelKind::ALL {
            let cfg = quick(model);
            let a = train(&d, &split, &cfg).unwrap();
            let b = train(&d, &split, &cfg).unwrap();
            assert!(a.same_outcome(&b), "{model:?}");
            assert!(a.train_loss[10] < a.train_loss[0], "{model:?}: {:?}", &a.train_loss[..11]);
            assert!(a.best_epoch < a.epochs_run && a.epochs_run <= cfg.epochs);
            assert!((0.0..=1.0).contains(&a.test_acc));
        }
    }

    #[test]
    fn zero_patience_stops_at_first_non_improvement() {
        let d = generate_synthetic(120, SyntheticKind::Homophilic, 2).unwrap();
        let split = make_split(&d, Regime::Full, 2).unwrap();
        let cfg = ModelConfig {
            patience: 0,
            epochs: 200,
            ..quick(ModelKind::Mlp)
        };
        let r = train(&d, &split, &cfg).unwrap();
        let stop = r.epochs_run - 1;
        assert!(r.epochs_run < 200);
        // every epoch before the last improved on the previous best
        for e in 1..stop {
            assert!(
                r.val_acc[e] > r.val_acc[e - 1] || (r.val_acc[e] == r.val_acc[e - 1] && r.val_loss[e] < r.val_loss[e - 1])
            );
        }
        assert_eq!(r.best_epoch, stop - 1);
    }

    #[test]
    fn reported_test_accuracy_matches_restored_model() {
        let d = generate_synthetic(120, SyntheticKind::Heterophilic, 4).unwrap();
        let split = make_split(&d, Regime::Full, 4).unwrap();
        let (report, model) = train_model(&d, &split, &quick(ModelKind::Chebnet2)).unwrap();
        let acc = evaluate(&model, &d, &split).unwrap();
        assert_eq!(acc.test, report.test_acc);
        assert_eq!(acc.val, report.best_val_acc);
        let csv = report.history_csv();
        assert!(csv.starts_with("epoch,train_loss,val_acc\n0,"));
        assert_eq!(csv.lines().count(), report.epochs_run + 1);
    }

    #[test]
    fn empty_training_set_is_an_error() {
        let d = generate_synthetic(40, SyntheticKind::Homophilic, 0).unwrap();
        let split = Split {
            train: vec![],
            val: vec![0, 1],
            test: vec![2, 3],
        };
        assert!(matches!(train(&d, &split, &quick(ModelKind::Mlp)), Err(Error::Training(_))));
    }

    #[test]
    fn divergence_is_reported() {
        let d = generate_synthetic(40, SyntheticKind::Homophilic, 0).unwrap();
        let split = make_split(&d, Regime::Full, 0).unwrap();
        let cfg = ModelConfig {
            lr_linear: 1e300,
            ..quick(ModelKind::Mlp)
        };
        assert!(matches!(train(&d, &split, &cfg), Err(Error::Training(_))));
    }

    #[test]
    fn repeat_runs_order_and_threads() {
        let d = generate_synthetic(100, SyntheticKind::Homophilic, 1).unwrap();
        let cfg = ModelConfig {
            epochs: 15,
            patience: 15,
            ..quick(ModelKind::Chebnet2)
        };
        let one = repeat_runs(&d, Regime::Full, &cfg, 3, 1).unwrap();
        let many = repeat_runs(&d, Regime::Full, &cfg, 3, 3).unwrap();
        assert_eq!(one.accuracies, many.accuracies);
        let seeds: Vec<u64> = many.reports.iter().map(|r| r.config.seed).collect();
        assert_eq!(seeds, vec![0, 1, 2]);
        let single = repeat_runs(&d, Regime::Full, &cfg, 1, 1).unwrap();
        assert_eq!(single.ci95, 0.0);
        assert!(repeat_runs(&d, Regime::Full, &cfg, 0, 1).is_err());
    }
}
