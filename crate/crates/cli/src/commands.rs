use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::json;
use sigconform::datasets::{
    self, build_ais_experiment, default_normal_class, load_ais, load_pendigits, load_ucr_dataset,
    ucr_split, LabeledCorpus, SplitTag,
};
use sigconform::experiments::{pendigits_experiment, ucr_experiment};
use sigconform::metrics::{
    best_balanced_accuracy, bootstrap_se, ecdf, read_score_file, write_score_file, write_scores,
    Metric, ScoreRow,
};
use sigconform::streams::{
    min_max_normalize, read_streams, write_streams, NormalizationParams,
};
use sigconform::{calibrate as calibrate_corpus, ConformanceModel, Stream};

use crate::config::{RunConfig, DEFAULT_ANOMALY_RATE, DEFAULT_BOOTSTRAP};
use crate::{CliError, DatasetKind, Experiment};

fn data_err(context: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", context.display()))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json value");
    text.push('\n');
    fs::write(path, text).map_err(|e| data_err(path, e))
}

fn class_counts(c: &LabeledCorpus) -> serde_json::Value {
    c.class_counts()
        .into_iter()
        .map(|(k, v)| (k, json!(v)))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

/// Finite values as JSON numbers, infinities as `"inf"`.
fn extended_json(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(sigconform::extended::format(x))
    }
}

fn relabel(streams: impl IntoIterator<Item = Stream>, label: &str) -> Vec<Stream> {
    streams.into_iter().map(|s| s.with_label(label)).collect()
}

pub fn prepare(
    cfg: &RunConfig,
    kind: DatasetKind,
    input: &Path,
    out_dir: &Path,
    name: Option<&str>,
    normal_class: Option<String>,
) -> Result<(), CliError> {
    if !input.exists() {
        return Err(data_err(input, "input does not exist"));
    }
    fs::create_dir_all(out_dir).map_err(|e| data_err(out_dir, e))?;
    let out = |f: &str| out_dir.join(f);
    let manifest = match kind {
        DatasetKind::Pendigits => {
            let data = load_pendigits(input)?;
            let norm = |s: &Stream| min_max_normalize(s, &NormalizationParams::of_stream(s));
            let train = data.split(SplitTag::Train).map(norm).collect::<Result<Vec<_>, _>>()?;
            let test = data.split(SplitTag::Test).map(norm).collect::<Result<Vec<_>, _>>()?;
            write_streams(out("train.jsonl"), &train)?;
            write_streams(out("test.jsonl"), &test)?;
            json!({
                "kind": "pendigits",
                "source": input.display().to_string(),
                "instances": data.len(),
                "train": train.len(),
                "test": test.len(),
                "classes": class_counts(&data),
                "applied": {"normalization": "per-stream"},
                "files": ["train.jsonl", "test.jsonl"],
            })
        }
        DatasetKind::Ucr => {
            let name = name.ok_or_else(|| CliError::Config("ucr needs --name".into()))?;
            let data = load_ucr_dataset(input, name)?;
            let class = normal_class
                .or_else(|| cfg.ucr.normal_class.get(name).cloned())
                .or_else(|| default_normal_class(&data))
                .expect("non-empty dataset");
            let rate = cfg.anomaly_rate.unwrap_or(DEFAULT_ANOMALY_RATE);
            let seed = cfg.seed.unwrap_or(0);
            let split = ucr_split(&data, &class, rate, seed)?;
            let (mut normal, mut anomalous) = (Vec::new(), Vec::new());
            for (s, a) in split.test.iter().zip(&split.test_is_anomaly) {
                if *a { &mut anomalous } else { &mut normal }.push(s.clone());
            }
            write_streams(out("corpus.jsonl"), &split.corpus)?;
            write_streams(out("test_normal.jsonl"), &relabel(normal.clone(), "normal"))?;
            write_streams(out("test_anomaly.jsonl"), &relabel(anomalous.clone(), "anomaly"))?;
            json!({
                "kind": "ucr",
                "dataset": name,
                "source": input.display().to_string(),
                "instances": data.len(),
                "classes": class_counts(&data),
                "normal_class": class,
                "anomaly_rate": rate,
                "seed": seed,
                "corpus": split.corpus.len(),
                "contamination": split.contamination,
                "test_normal": normal.len(),
                "test_anomaly": anomalous.len(),
                "suggested_fit": {"order": 5, "transforms": ["time"], "normalization": "none"},
                "files": ["corpus.jsonl", "test_normal.jsonl", "test_anomaly.jsonl"],
            })
        }
        DatasetKind::Ais => {
            let load = load_ais(input, &cfg.ais.columns)?;
            let mut params = cfg.ais.params.clone();
            if let Some(s) = cfg.seed {
                params.seed = s;
            }
            let exp = build_ais_experiment(&load.vessels, &params)?;
            write_streams(out("corpus.jsonl"), &exp.corpus)?;
            write_streams(out("test_normal.jsonl"), &exp.normal_test)?;
            write_streams(out("test_anomaly.jsonl"), &exp.anomaly_test)?;
            json!({
                "kind": "ais",
                "source": input.display().to_string(),
                "vessels": load.vessels.len(),
                "dropped_rows": load.dropped_rows,
                "dropped_vessels": load.dropped_vessels,
                "params": params,
                "corpus_vessels": exp.corpus_vessels,
                "test_vessels": exp.test_vessels,
                "anomaly_vessels": exp.anomaly_vessels,
                "corpus": exp.corpus.len(),
                "test_normal": exp.normal_test.len(),
                "test_anomaly": exp.anomaly_test.len(),
                "suggested_fit": {
                    "transforms": ["time-diff", "lead-lag", "invisibility"],
                    "normalization": "corpus",
                },
                "files": ["corpus.jsonl", "test_normal.jsonl", "test_anomaly.jsonl"],
            })
        }
    };
    write_json(&out("manifest.json"), &manifest)?;
    println!("{}", serde_json::to_string_pretty(&manifest).expect("json value"));
    Ok(())
}

pub fn fit(cfg: &RunConfig, corpus: &Path, out: &Path) -> Result<(), CliError> {
    let cutoffs = cfg.cutoffs()?;
    let streams = read_streams(corpus)?;
    let dim = streams.first().map(Stream::dim).unwrap_or(1);
    let mut pipeline = cfg.pipeline(dim)?;
    if streams.len() < 2 {
        return Err(data_err(corpus, format!("corpus needs at least 2 streams, got {}", streams.len())));
    }
    pipeline.fit(&streams)?;
    let features = pipeline.features_batch(&streams)?;
    let model = ConformanceModel::fit(features, cutoffs)?.with_pipeline(pipeline)?;
    model.save(out)?;
    eprintln!(
        "fitted {} streams: feature_dim {}, rank {}",
        model.corpus_len(),
        model.feature_dim(),
        model.rank()
    );
    Ok(())
}

pub fn calibrate(cfg: &RunConfig, model_path: &Path, out: &Path) -> Result<(), CliError> {
    let model = ConformanceModel::load(model_path)?;
    let epsilon = cfg.epsilon()?;
    let seed = cfg.seed.unwrap_or(0);
    let cal = calibrate_corpus(model.corpus_features(), epsilon, seed, model.cutoffs())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "epsilon": epsilon,
            "seed": seed,
            "median_r": extended_json(cal.median_r),
            "threshold": extended_json(cal.threshold),
            "fit_size": cal.fit_size,
            "holdout_size": cal.holdout_size,
        }))
        .expect("json value")
    );
    model.with_calibration(cal).save(out)?;
    Ok(())
}

pub fn score(model_path: &Path, streams_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let model = ConformanceModel::load(model_path)?;
    let pipeline = model
        .pipeline()
        .ok_or_else(|| data_err(model_path, "model has no pipeline_meta; cannot score streams"))?;
    let streams = read_streams(streams_path)?;
    let features = pipeline.features_batch(&streams)?;
    let scores = model.conformance_batch(&features)?;
    let rows: Vec<ScoreRow> = streams
        .iter()
        .zip(&scores)
        .map(|(s, sc)| ScoreRow {
            id: s.id().to_string(),
            score: sc.value,
            label: s.label().map(str::to_string),
        })
        .collect();
    match out {
        Some(p) => write_score_file(p, &rows)?,
        None => write_scores(std::io::stdout().lock(), &rows)?,
    }
    if let Some(cal) = model.calibration() {
        let flagged = scores
            .iter()
            .filter(|s| s.value > cal.threshold || s.value.is_infinite())
            .count();
        eprintln!(
            "{flagged} of {} streams above threshold {}",
            rows.len(),
            sigconform::extended::format(cal.threshold)
        );
    }
    Ok(())
}

pub fn eval(
    cfg: &RunConfig,
    normal: &Path,
    anomaly: &Path,
    metric: &str,
    ecdf_out: Option<&Path>,
) -> Result<(), CliError> {
    let metric = Metric::parse(metric)?;
    let n = read_score_file(normal)?;
    let a = read_score_file(anomaly)?;
    let scores: Vec<f64> = n.iter().chain(&a).map(|r| r.score).collect();
    let labels: Vec<bool> = (0..scores.len()).map(|i| i >= n.len()).collect();
    let value = metric.eval(&scores, &labels)?;
    println!("metric\t{}", metric.name());
    println!("normal\t{}", n.len());
    println!("anomalous\t{}", a.len());
    println!("value\t{value}");
    if metric == Metric::BalancedAccuracy {
        let b = best_balanced_accuracy(&scores, &labels)?;
        println!("threshold\t{}", sigconform::extended::format(b.threshold));
    }
    let b = cfg.bootstrap.unwrap_or(DEFAULT_BOOTSTRAP);
    if b > 0 {
        let se = bootstrap_se(&scores, &labels, metric, b, cfg.seed.unwrap_or(0))?;
        println!("bootstrap_se\t{se}\t(B = {b})");
    }
    if let Some(path) = ecdf_out {
        let mut f = fs::File::create(path).map_err(|e| data_err(path, e))?;
        let mut text = String::from("class,value,cumulative_fraction\n");
        for (class, rows) in [("normal", &n), ("anomaly", &a)] {
            let vals: Vec<f64> = rows.iter().map(|r| r.score).collect();
            for (v, frac) in ecdf(&vals)? {
                text.push_str(&format!("{class},{},{frac}\n", sigconform::extended::format(v)));
            }
        }
        f.write_all(text.as_bytes()).map_err(|e| data_err(path, e))?;
    }
    Ok(())
}

fn ucr_names(dir: &Path) -> Result<Vec<String>, CliError> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(|e| data_err(dir, e))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let f = e.file_name().to_string_lossy().into_owned();
            let stem = f.rsplit_once('.').map_or(f.as_str(), |(s, _)| s).to_string();
            stem.strip_suffix("_TRAIN").map(str::to_string)
        })
        .collect();
    names.sort();
    names.dedup();
    if names.is_empty() {
        return Err(data_err(dir, "no *_TRAIN files found"));
    }
    Ok(names)
}

pub fn reproduce(cfg: &RunConfig, experiment: Experiment, out: Option<&Path>) -> Result<(), CliError> {
    let data = cfg
        .data
        .clone()
        .ok_or_else(|| CliError::Config("reproduce needs --data or `data` in the config".into()))?;
    if !data.exists() {
        return Err(data_err(&data, "prepared data not found"));
    }
    let cutoffs = cfg.cutoffs()?;
    let results = match experiment {
        Experiment::Pendigits => {
            let corpus = load_pendigits(&data)?;
            let orders = cfg.orders.clone().unwrap_or_else(|| (1..=5).collect());
            let b = cfg.bootstrap.unwrap_or(DEFAULT_BOOTSTRAP);
            let seed = cfg.seed.unwrap_or(0);
            println!("order\tauc\tbootstrap_se");
            let mut rows = Vec::new();
            for &n in &orders {
                let r = pendigits_experiment(&corpus, n, cutoffs)?;
                let se = if b > 0 {
                    Some(bootstrap_se(&r.scores, &r.labels, Metric::Auc, b, seed)?)
                } else {
                    None
                };
                println!("{n}\t{:.4}\t{}", r.auc, se.map_or("-".into(), |s| format!("{s:.4}")));
                rows.push(json!({"order": n, "auc": r.auc, "bootstrap_se": se,
                    "corpus_sizes": r.corpus_sizes, "test_size": r.test_size}));
            }
            json!({"experiment": "pendigits", "bootstrap": b, "seed": seed, "results": rows})
        }
        Experiment::Ucr => {
            let names = match &cfg.ucr.datasets {
                Some(n) => n.clone(),
                None => ucr_names(&data)?,
            };
            let rate = cfg.anomaly_rate.unwrap_or(DEFAULT_ANOMALY_RATE);
            let order = cfg.order.unwrap_or(5);
            let seeds = cfg.seeds();
            println!("dataset\tnormal_class\tcorpus\ttest_normal\ttest_anomaly\tmedian_ba\tstd");
            let mut rows = Vec::new();
            for name in &names {
                let corpus = load_ucr_dataset(&data, name)?;
                let class = match cfg.ucr.normal_class.get(name) {
                    Some(c) => c.clone(),
                    None => datasets::default_normal_class(&corpus).expect("non-empty"),
                };
                let r = ucr_experiment(&corpus, &class, rate, order, &seeds, cutoffs)?;
                println!(
                    "{name}\t{class}\t{}\t{}\t{}\t{:.3}\t{:.3}",
                    r.corpus_size, r.test_normal, r.test_anomalous, r.median, r.std_dev
                );
                let mut v = serde_json::to_value(&r).expect("serializable");
                v["dataset"] = json!(name);
                rows.push(v);
            }
            json!({"experiment": "ucr", "anomaly_rate": rate, "order": order,
                "seeds": seeds, "results": rows})
        }
    };
    if let Some(p) = out {
        write_json(p, &results)?;
    }
    Ok(())
}
