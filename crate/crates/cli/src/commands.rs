use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use chebfilter::format::{csv_line, fmt_g};
use chebfilter::graph::{
    eigendecompose, generate_synthetic, homophily, load_dataset, read_labels, Dataset, OperatorKind,
    SpectralOperator, SyntheticKind,
};
use chebfilter::models::{repeat_train, ModelConfig, ModelKind, Regime};
use chebfilter::poly::{error_study, ApproxMethod, FilterFunction};
use chebfilter::spectral::{apply_spectral_responses, build_ring, ring_demo as run_ring_demo};

use crate::manifest::{digest_file, InputDigest, OutputDir, RunManifest};
use crate::Failure;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn manifest(command: &str, config: serde_json::Value, seeds: Vec<u64>, inputs: Vec<InputDigest>) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        version: VERSION,
        config,
        seeds,
        inputs,
        outputs: Vec::new(),
        warnings: Vec::new(),
    }
}

fn digests(paths: &[&Path]) -> Result<Vec<InputDigest>, Failure> {
    paths.iter().map(|p| digest_file(p)).collect()
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value).map_err(chebfilter::Error::from)? + "\n")
}

pub fn approx(
    function: &FilterFunction,
    bases: &[ApproxMethod],
    orders: &[usize],
    grid: usize,
    out: &Path,
) -> Result<(), Failure> {
    let h = |x: f64| function.eval(x);
    let rows = error_study(&h, bases, orders, grid)?;
    let mut csv = String::from("basis,K,max_error,node_scheme\n");
    for r in &rows {
        csv.push_str(&csv_line([r.basis.clone(), r.order.to_string(), fmt_g(r.max_error), r.node_scheme.clone()]));
        csv.push('\n');
        println!("{:<10} K={:<3} max error {}", r.basis, r.order, fmt_g(r.max_error));
    }
    let mut dir = OutputDir::create(out)?;
    dir.write("approx.csv", &csv)?;
    let config = json!({
        "fn": format!("{function:?}"),
        "bases": bases.iter().map(|b| b.name()).collect::<Vec<_>>(),
        "orders": orders,
        "grid": grid,
    });
    dir.finish(manifest("approx", config, vec![], vec![]))
}

pub fn ring_demo(n: usize, tol: f64, out: &Path) -> Result<(), Failure> {
    let demo = run_ring_demo(n, tol)?;
    for w in &demo.warnings {
        eprintln!("warning: {w}");
    }
    let mut dir = OutputDir::create(out)?;
    dir.write("ring_demo.csv", &demo.to_csv())?;
    let mut m = manifest("ring-demo", json!({ "n": n, "tol": tol }), vec![], vec![]);
    m.warnings = demo.warnings;
    dir.finish(m)
}

pub enum RecoverSource<'a> {
    Ring {
        n: usize,
        labels: Option<&'a Path>,
        seed: u64,
    },
    Files {
        paths: [&'a Path; 3],
        column: usize,
    },
}

/// Maps binary labels 0/1 to -1/+1.
fn signed_labels(labels: &[usize]) -> Result<Vec<f64>, Failure> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| match l {
            0 => Ok(-1.0),
            1 => Ok(1.0),
            other => Err(Failure::Invalid(format!(
                "recover needs binary labels, node {i} has label {other}"
            ))),
        })
        .collect()
}

pub fn recover(source: RecoverSource, eps: f64, out: &Path) -> Result<(), Failure> {
    let (graph, x, labels, inputs, config, seeds) = match source {
        RecoverSource::Ring { n, labels, seed } => {
            let graph = build_ring(n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (labels, inputs) = match labels {
                Some(p) => (read_labels(p)?, digests(&[p])?),
                None => ((0..n).map(|i| i % 2).collect(), vec![]),
            };
            if labels.len() != n {
                return Err(Failure::Input(format!("expected {n} labels for the ring, found {}", labels.len())));
            }
            (graph, x, labels, inputs, json!({ "ring": n, "eps": eps }), vec![seed])
        }
        RecoverSource::Files { paths, column } => {
            let [e, f, l] = paths;
            let d = load_dataset(e, f, l)?;
            if column >= d.num_features() {
                return Err(Failure::Invalid(format!(
                    "feature column {column} out of range for {} features",
                    d.num_features()
                )));
            }
            let x: Vec<f64> = (0..d.num_nodes()).map(|i| d.features.row(i)[column]).collect();
            let graph = Arc::try_unwrap(d.graph).unwrap_or_else(|g| (*g).clone());
            (graph, x, d.labels, digests(&paths)?, json!({ "column": column, "eps": eps }), vec![])
        }
    };
    let y = signed_labels(&labels)?;
    let op = SpectralOperator::new(Arc::new(graph), OperatorKind::NormalizedLaplacian)?;
    let eig = eigendecompose(&op)?;
    let filter = chebfilter::spectral::recover_perfect_filter(&eig, &x, &y, eps)?;
    let reproduced = apply_spectral_responses(&eig, &filter.responses, &x)?;
    let residual = reproduced.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("recovered {} responses, max label residual {}", filter.len(), fmt_g(residual));

    let mut dir = OutputDir::create(out)?;
    dir.write("filter.csv", &filter.to_csv())?;
    dir.finish(manifest("recover", config, seeds, inputs))
}

pub enum TrainData<'a> {
    Synthetic { kind: SyntheticKind, n: usize },
    Files([&'a Path; 3]),
}

pub struct TrainRequest<'a> {
    pub data: TrainData<'a>,
    pub config: Option<&'a Path>,
    pub model: Option<ModelKind>,
    pub regime: Regime,
    pub runs: usize,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub out: &'a Path,
}

/// Per-model defaults, overlaid with the keys present in the config file,
/// then the command-line overrides.
fn resolve_config(path: Option<&Path>, model: Option<ModelKind>, seed: Option<u64>) -> Result<ModelConfig, Failure> {
    let file = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::io(p, e))?;
            match serde_json::from_str(&text) {
                Ok(serde_json::Value::Object(map)) => map,
                Ok(_) => return Err(Failure::Input(format!("{}: config must be a JSON object", p.display()))),
                Err(e) => return Err(Failure::Input(format!("{}: {e}", p.display()))),
            }
        }
        None => serde_json::Map::new(),
    };
    let file_model = match file.get("model") {
        Some(v) => Some(
            serde_json::from_value::<ModelKind>(v.clone()).map_err(|e| Failure::Input(format!("config model: {e}")))?,
        ),
        None => None,
    };
    let kind = model.or(file_model).unwrap_or(ModelKind::Chebnet2);
    let mut merged = match serde_json::to_value(ModelConfig::for_model(kind)).map_err(chebfilter::Error::from)? {
        serde_json::Value::Object(map) => map,
        _ => unreachable!("configs serialize to objects"),
    };
    merged.extend(file);
    merged.insert("model".into(), json!(kind));
    if let Some(s) = seed {
        merged.insert("seed".into(), json!(s));
    }
    let config: ModelConfig = serde_json::from_value(serde_json::Value::Object(merged))
        .map_err(|e| Failure::Input(format!("config: {e}")))?;
    config.validate()?;
    Ok(config)
}

pub fn train(req: TrainRequest) -> Result<(), Failure> {
    let config = resolve_config(req.config, req.model, req.seed)?;
    let mut inputs = Vec::new();
    if let Some(p) = req.config {
        inputs.push(digest_file(p)?);
    }
    let (dataset, source) = match req.data {
        TrainData::Synthetic { kind, n } => (
            generate_synthetic(n, kind, config.seed)?,
            json!({ "synthetic": format!("{kind:?}").to_lowercase(), "n": n }),
        ),
        TrainData::Files(paths) => {
            let [e, f, l] = paths;
            let d = load_dataset(e, f, l)?;
            inputs.extend(digests(&paths)?);
            (d, json!("files"))
        }
    };

    let (summary, models) = repeat_train(&dataset, req.regime, &config, req.runs, req.jobs)?;
    let mut dir = OutputDir::create(req.out)?;
    let first = &summary.reports[0];
    if req.runs == 1 {
        dir.write("report.json", &to_json(first)?)?;
    } else {
        dir.write("report.json", &to_json(&summary)?)?;
        for (r, report) in summary.reports.iter().enumerate() {
            dir.write(&format!("history_run{r}.csv"), &report.history_csv())?;
        }
    }
    dir.write("history.csv", &first.history_csv())?;
    if let Some(filter) = &first.learned_filter {
        dir.write("filter.csv", &filter.to_csv())?;
    }
    dir.write("checkpoint.json", &(models[0].params.to_checkpoint()? + "\n"))?;

    println!(
        "{} {}: test accuracy {} ± {} over {} run(s)",
        config.model.name(),
        json!(req.regime).as_str().unwrap_or_default(),
        fmt_g(summary.mean),
        fmt_g(summary.ci95),
        summary.runs
    );
    let seeds = (0..req.runs as u64).map(|r| config.seed.wrapping_add(r)).collect();
    let resolved = json!({
        "model": serde_json::to_value(&config).map_err(chebfilter::Error::from)?,
        "regime": req.regime,
        "runs": req.runs,
        "jobs": req.jobs,
        "data": source,
    });
    dir.finish(manifest("train", resolved, seeds, inputs))
}

pub fn stats(paths: [&Path; 3], out: &Path) -> Result<(), Failure> {
    let [e, f, l] = paths;
    let d: Dataset = load_dataset(e, f, l)?;
    let stats = json!({
        "n": d.num_nodes(),
        "m": d.graph.num_edges(),
        "f": d.num_features(),
        "C": d.num_classes,
        "homophily": homophily(&d),
    });
    let text = to_json(&stats)?;
    print!("{text}");
    let mut dir = OutputDir::create(out)?;
    dir.write("stats.json", &text)?;
    dir.finish(manifest("stats", json!({}), vec![], digests(&paths)?))
}
