//! End-to-end evaluation protocols shared by the CLI and the acceptance
//! tests.

use rayon::prelude::*;
use serde::Serialize;

use crate::conformance::{ConformanceModel, Cutoffs};
use crate::datasets::{ucr_split, AisExperiment, LabeledCorpus, SplitTag};
use crate::error::{Error, Result};
use crate::metrics::{best_balanced_accuracy, roc_auc};
use crate::pipeline::Pipeline;
use crate::streams::{NormalizationMode, Stream, Transform};

/// Fits `pipeline` and a model on `corpus`, then scores `test`.
pub fn fit_and_score(
    pipeline: &Pipeline,
    corpus: &[Stream],
    test: &[Stream],
    cutoffs: Cutoffs,
) -> Result<Vec<f64>> {
    let mut pipeline = pipeline.clone();
    pipeline.fit(corpus)?;
    let model = ConformanceModel::fit(pipeline.features_batch(corpus)?, cutoffs)?;
    let feats = pipeline.features_batch(test)?;
    Ok(model
        .conformance_batch(&feats)?
        .into_iter()
        .map(|s| s.value)
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct PendigitsResult {
    pub order: usize,
    pub auc: f64,
    /// One entry per (digit model, test instance), digit-major.
    #[serde(skip)]
    pub scores: Vec<f64>,
    #[serde(skip)]
    pub labels: Vec<bool>,
    pub corpus_sizes: Vec<usize>,
    pub test_size: usize,
}

/// For each digit, the corpus is that digit's training instances (each
/// min-max normalized per stream) and every test instance is scored; test
/// instances of other digits count as anomalies. Scores from all ten models
/// are pooled into one ROC AUC.
pub fn pendigits_experiment(
    data: &LabeledCorpus,
    order: usize,
    cutoffs: Cutoffs,
) -> Result<PendigitsResult> {
    let pipeline = Pipeline::new(2, order, &[], NormalizationMode::PerStream)?;
    let train: Vec<(&Stream, &str)> = data
        .streams()
        .iter()
        .zip(data.splits())
        .filter(|(_, t)| **t == SplitTag::Train)
        .map(|(s, _)| (s, s.label().expect("labelled")))
        .collect();
    let test: Vec<Stream> = data.split(SplitTag::Test).cloned().collect();
    if test.is_empty() {
        return Err(Error::InsufficientData("no test instances".into()));
    }
    let mut digits: Vec<&str> = train.iter().map(|(_, l)| *l).collect();
    digits.sort_unstable();
    digits.dedup();

    let per_digit = digits
        .iter()
        .map(|d| {
            let corpus: Vec<Stream> = train
                .iter()
                .filter(|(_, l)| l == d)
                .map(|(s, _)| (*s).clone())
                .collect();
            let scores = fit_and_score(&pipeline, &corpus, &test, cutoffs)?;
            let labels: Vec<bool> = test.iter().map(|s| s.label() != Some(*d)).collect();
            Ok((corpus.len(), scores, labels))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scores = Vec::with_capacity(per_digit.len() * test.len());
    let mut labels = Vec::with_capacity(scores.capacity());
    let mut corpus_sizes = Vec::new();
    for (m, s, l) in per_digit {
        corpus_sizes.push(m);
        scores.extend(s);
        labels.extend(l);
    }
    Ok(PendigitsResult {
        order,
        auc: roc_auc(&scores, &labels)?,
        scores,
        labels,
        corpus_sizes,
        test_size: test.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UcrResult {
    pub normal_class: String,
    pub anomaly_rate: f64,
    pub order: usize,
    pub seeds: Vec<u64>,
    pub balanced_accuracy: Vec<f64>,
    pub median: f64,
    /// Population standard deviation across splits.
    pub std_dev: f64,
    pub corpus_size: usize,
    pub test_normal: usize,
    pub test_anomalous: usize,
}

/// Median best balanced accuracy over seeded contamination splits, with a
/// uniform time coordinate added to each series.
pub fn ucr_experiment(
    data: &LabeledCorpus,
    normal_class: &str,
    anomaly_rate: f64,
    order: usize,
    seeds: &[u64],
    cutoffs: Cutoffs,
) -> Result<UcrResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    let pipeline = Pipeline::new(1, order, &[Transform::Time], NormalizationMode::None)?;
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            let split = ucr_split(data, normal_class, anomaly_rate, seed)?;
            let scores = fit_and_score(&pipeline, &split.corpus, &split.test, cutoffs)?;
            let ba = best_balanced_accuracy(&scores, &split.test_is_anomaly)?.ba;
            Ok((ba, split))
        })
        .collect::<Result<Vec<_>>>()?;
    let bas: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let first = &runs[0].1;
    let mean = bas.iter().sum::<f64>() / bas.len() as f64;
    let std_dev = (bas.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / bas.len() as f64).sqrt();
    Ok(UcrResult {
        normal_class: normal_class.to_string(),
        anomaly_rate,
        order,
        seeds: seeds.to_vec(),
        median: crate::conformance::empirical_median(&bas).expect("non-empty"),
        std_dev,
        balanced_accuracy: bas,
        corpus_size: first.corpus.len(),
        test_normal: first.test_normal_count(),
        test_anomalous: first.test.len() - first.test_normal_count(),
    })
}

/// ROC AUC of the anomalous test set against the normal test set, both
/// scored against the corpus.
pub fn ais_auc(exp: &AisExperiment, pipeline: &Pipeline, cutoffs: Cutoffs) -> Result<f64> {
    let mut test = exp.normal_test.clone();
    test.extend(exp.anomaly_test.iter().cloned());
    let scores = fit_and_score(pipeline, &exp.corpus, &test, cutoffs)?;
    let labels: Vec<bool> = (0..test.len()).map(|i| i >= exp.normal_test.len()).collect();
    roc_auc(&scores, &labels)
}
