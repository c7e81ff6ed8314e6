use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sigconform::metrics::read_score_file;
use sigconform::streams::{read_streams, write_streams};
use sigconform::{ConformanceModel, Cutoffs, NormalizationMode, Pipeline, Stream};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigconform"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sigconform")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_stream_file(path: &Path, streams: &[Stream]) {
    write_streams(path, streams).unwrap();
}

/// Small 2-D corpus with enough spread for a full-rank order-2 model.
fn corpus(n: usize) -> Vec<Stream> {
    (0..n)
        .map(|k| {
            let f = k as f64;
            let pts: Vec<[f64; 2]> = (0..6)
                .map(|i| {
                    let t = i as f64;
                    [t + 0.3 * (f * 1.7 + t).sin(), 0.5 * t * (1.0 + 0.1 * f).cos() + 0.2 * (f + 2.0 * t).cos()]
                })
                .collect();
            Stream::from_points(format!("c{k}"), &pts).unwrap()
        })
        .collect()
}

fn write_scores(path: &Path, scores: &[f64]) {
    let mut text = String::from("id,score,label\n");
    for (i, s) in scores.iter().enumerate() {
        text.push_str(&format!("s{i},{s},\n"));
    }
    fs::write(path, text).unwrap();
}

fn eval_value(out: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix("value\t"))
        .expect("value line")
        .parse()
        .unwrap()
}

struct Fitted {
    dir: TempDir,
    corpus: PathBuf,
    model: PathBuf,
}

fn fitted(order: &str) -> Fitted {
    let dir = TempDir::new().unwrap();
    let corpus_path = dir.path().join("corpus.jsonl");
    write_stream_file(&corpus_path, &corpus(30));
    let model = dir.path().join("model.json");
    let o = run(&["fit", "--corpus", p(&corpus_path), "--out", p(&model), "--order", order]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    Fitted { dir, corpus: corpus_path, model }
}

#[test]
fn unknown_dataset_kind_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&["prepare", "mnist", "--input", "x", "--out-dir", p(dir.path())]);
    assert_eq!(code(&o), 2);
}

#[test]
fn fit_two_streams_order_two() {
    let dir = TempDir::new().unwrap();
    let corpus_path = dir.path().join("c.jsonl");
    let a = Stream::from_points("a", &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
    let b = Stream::from_points("b", &[[0.0, 0.0], [0.0, 2.0]]).unwrap();
    write_stream_file(&corpus_path, &[a, b]);
    let model = dir.path().join("m.json");
    let o = run(&["fit", "--corpus", p(&corpus_path), "--out", p(&model), "--order", "2"]);
    assert_eq!(code(&o), 0);
    let m = ConformanceModel::load(&model).unwrap();
    assert_eq!(m.feature_dim(), 7);
    assert_eq!(m.corpus_len(), 2);
}

#[test]
fn fit_is_deterministic() {
    let f = fitted("3");
    let again = f.dir.path().join("again.json");
    let o = run(&["fit", "--corpus", p(&f.corpus), "--out", p(&again), "--order", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&f.model).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn order_zero_is_a_config_error() {
    let f = fitted("2");
    let out = f.dir.path().join("zero.json");
    let o = run(&["fit", "--corpus", p(&f.corpus), "--out", p(&out), "--order", "0"]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn corpus_members_score_zero() {
    let f = fitted("2");
    let scores = f.dir.path().join("scores.csv");
    let o = run(&["score", "--model", p(&f.model), "--streams", p(&f.corpus), "--out", p(&scores)]);
    assert_eq!(code(&o), 0);
    let rows = read_score_file(&scores).unwrap();
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r.score == 0.0));
    assert_eq!(rows[3].id, "c3");
}

#[test]
fn empty_stream_file_gives_empty_scores() {
    let f = fitted("2");
    let empty = f.dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let scores = f.dir.path().join("scores.csv");
    let o = run(&["score", "--model", p(&f.model), "--streams", p(&empty), "--out", p(&scores)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&scores).unwrap(), "");
    assert!(read_score_file(&scores).unwrap().is_empty());
}

#[test]
fn dimension_mismatch_is_a_data_error() {
    let f = fitted("2");
    let wrong = f.dir.path().join("3d.jsonl");
    write_stream_file(&wrong, &[Stream::from_points("x", &[[0.0, 1.0, 2.0], [1.0, 1.0, 1.0]]).unwrap()]);
    let o = run(&["score", "--model", p(&f.model), "--streams", p(&wrong)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn missing_corpus_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&["fit", "--corpus", p(&dir.path().join("nope.jsonl")), "--out", p(&dir.path().join("m.json"))]);
    assert_eq!(code(&o), 1);
}

#[test]
fn persisted_scores_match_in_memory() {
    let f = fitted("3");
    let test: Vec<Stream> = corpus(40)
        .into_iter()
        .skip(30)
        .chain([Stream::from_points("odd", &[[0.0, 0.0], [3.0, -1.0], [0.5, 2.0]]).unwrap()])
        .collect();
    let test_path = f.dir.path().join("test.jsonl");
    write_stream_file(&test_path, &test);
    let o = run(&["score", "--model", p(&f.model), "--streams", p(&test_path)]);
    assert_eq!(code(&o), 0);
    let printed: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| sigconform::extended::parse(l.split(',').nth(1).unwrap()).unwrap())
        .collect();

    let streams = read_streams(&f.corpus).unwrap();
    let mut pipeline = Pipeline::new(2, 3, &[], NormalizationMode::None).unwrap();
    pipeline.fit(&streams).unwrap();
    let model = ConformanceModel::fit(pipeline.features_batch(&streams).unwrap(), Cutoffs::default()).unwrap();
    let expected: Vec<f64> = pipeline
        .features_batch(&test)
        .unwrap()
        .iter()
        .map(|x| model.conformance(x).unwrap().value)
        .collect();
    assert_eq!(printed, expected);
}

#[test]
fn calibrate_then_score_reports_flags() {
    let f = fitted("2");
    let cal = f.dir.path().join("cal.json");
    let o = run(&["calibrate", "--model", p(&f.model), "--out", p(&cal), "--epsilon", "0.1", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["fit_size"], 15);
    assert_eq!(summary["holdout_size"], 15);
    let m = ConformanceModel::load(&cal).unwrap();
    assert!(m.calibration().is_some());
    let o = run(&["score", "--model", p(&cal), "--streams", p(&f.corpus)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 of 30 streams above threshold"));

    let o = run(&["calibrate", "--model", p(&f.model), "--out", p(&cal), "--epsilon", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn eval_auc_and_complement() {
    let dir = TempDir::new().unwrap();
    let (normal, anomaly) = (dir.path().join("n.csv"), dir.path().join("a.csv"));
    write_scores(&normal, &[0.1, 0.2, 0.3, 0.35]);
    write_scores(&anomaly, &[0.5, 0.9, f64::INFINITY]);
    let o = run(&["eval", "--normal", p(&normal), "--anomaly", p(&anomaly), "--bootstrap", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(eval_value(&stdout(&o)), 1.0);

    write_scores(&normal, &[0.1, 0.6, 0.3, 0.35]);
    let forward = eval_value(&stdout(&run(&["eval", "--normal", p(&normal), "--anomaly", p(&anomaly), "--bootstrap", "0"])));
    let swapped = eval_value(&stdout(&run(&["eval", "--normal", p(&anomaly), "--anomaly", p(&normal), "--bootstrap", "0"])));
    assert!((forward + swapped - 1.0).abs() < 1e-12);
}

#[test]
fn eval_balanced_accuracy_and_ecdf() {
    let dir = TempDir::new().unwrap();
    let (normal, anomaly) = (dir.path().join("n.csv"), dir.path().join("a.csv"));
    write_scores(&normal, &[1.0, 2.0, 3.0]);
    write_scores(&anomaly, &[4.0, 5.0]);
    let ecdf = dir.path().join("ecdf.csv");
    let o = run(&[
        "eval", "--normal", p(&normal), "--anomaly", p(&anomaly), "--metric", "balanced-accuracy",
        "--bootstrap", "20", "--ecdf-out", p(&ecdf),
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(eval_value(&out), 1.0);
    assert!(out.contains("threshold\t3.5"));
    assert!(out.contains("bootstrap_se\t0\t"));
    let text = fs::read_to_string(&ecdf).unwrap();
    assert!(text.starts_with("class,value,cumulative_fraction\n"));
    assert!(text.contains("anomaly,5.0,1"));

    let o = run(&["eval", "--normal", p(&normal), "--anomaly", p(&anomaly), "--metric", "f1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn eval_single_class_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let (normal, empty) = (dir.path().join("n.csv"), dir.path().join("e.csv"));
    write_scores(&normal, &[1.0, 2.0]);
    fs::write(&empty, "").unwrap();
    let o = run(&["eval", "--normal", p(&normal), "--anomaly", p(&empty)]);
    assert_eq!(code(&o), 1);
}

fn ucr_line(label: usize, k: usize) -> String {
    let vals: Vec<String> = (0..24)
        .map(|i| format!("{:.4}", ((i * label) as f64 * 0.3 + k as f64 * 0.01).sin()))
        .collect();
    format!("{label},{}", vals.join(","))
}

#[test]
fn prepare_ucr_beef_sized_corpus() {
    // five balanced classes of six per split, like Beef
    let dir = TempDir::new().unwrap();
    for (split, offset) in [("TRAIN", 0), ("TEST", 100)] {
        let lines: Vec<String> = (1..=5)
            .flat_map(|c| (0..6).map(move |k| ucr_line(c, k + offset)))
            .collect();
        fs::write(dir.path().join(format!("Toy_{split}.tsv")), lines.join("\n") + "\n").unwrap();
    }
    let out = dir.path().join("out");
    let o = run(&["prepare", "ucr", "--input", p(dir.path()), "--name", "Toy", "--out-dir", p(&out), "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["normal_class"], "1");
    assert_eq!(manifest["corpus"], 10);
    assert_eq!(manifest["contamination"], 0);
    assert_eq!(manifest["test_normal"], 2);
    assert_eq!(manifest["test_anomaly"], 48);
    let corpus = read_streams(out.join("corpus.jsonl")).unwrap();
    assert_eq!(corpus.len(), 10);
    assert!(corpus.iter().all(|s| s.dim() == 1 && s.len() == 24));

    let o = run(&["prepare", "ucr", "--input", p(dir.path()), "--out-dir", p(&out)]);
    assert_eq!(code(&o), 2, "missing --name");
}

#[test]
fn prepare_pendigits_counts() {
    let dir = TempDir::new().unwrap();
    let digit = |label: u8, shift: i32| {
        format!(
            ".SEGMENT DIGIT ? ? \"{label}\"\n.PEN_DOWN\n{} 10\n{} 40\n{} 90\n.PEN_UP\n.PEN_DOWN\n5 5\n{} 60\n.PEN_UP\n",
            10 + shift,
            30 + shift,
            45 - shift,
            70 + 2 * shift
        )
    };
    let tra: String = (0..3).flat_map(|k| [digit(1, k), digit(7, k + 5)]).collect();
    let tes: String = (0..2).map(|k| digit(7, k)).collect();
    fs::write(dir.path().join("pendigits-orig.tra"), format!(".COMMENT toy\n{tra}")).unwrap();
    fs::write(dir.path().join("pendigits-orig.tes"), tes).unwrap();
    let out = dir.path().join("out");
    let o = run(&["prepare", "pendigits", "--input", p(dir.path()), "--out-dir", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["instances"], 8);
    assert_eq!(manifest["train"], 6);
    assert_eq!(manifest["test"], 2);
    let train = read_streams(out.join("train.jsonl")).unwrap();
    assert!(train.iter().all(|s| s.len() == 5));
    // per-stream min-max output lies in the unit box
    assert!(train.iter().flat_map(|s| s.to_points()).flatten().all(|v| (0.0..=1.0).contains(&v)));
}

#[test]
fn bad_config_file_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "order = 3\nbogus = 1\n").unwrap();
    let o = run(&["--config", p(&cfg), "eval", "--normal", "a", "--anomaly", "b"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["fit"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}
