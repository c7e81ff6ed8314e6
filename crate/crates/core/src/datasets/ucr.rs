//! UCR-style univariate series: one series per row, class label first,
//! separated by commas, tabs or spaces.

use std::fs;
use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{LabeledCorpus, SplitTag};
use crate::error::{Error, Result};
use crate::streams::Stream;

/// `"1.0000000e+00"` and `"1"` both become `"1"`.
fn normalize_label(raw: &str) -> String {
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 => format!("{}", x as i64),
        _ => raw.to_string(),
    }
}

pub fn parse_ucr<R: BufRead>(
    reader: R,
    split: SplitTag,
    prefix: &str,
    source: &str,
) -> Result<LabeledCorpus> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: source.into(),
        line,
        reason,
    };
    let mut streams = Vec::new();
    let mut width: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let (label, values) = fields.split_first().expect("non-empty line");
        let values: Vec<f64> = values
            .iter()
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(parse_err(lineno, format!("bad value {v:?}"))),
            })
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(parse_err(lineno, "row has a label but no values".into()));
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(parse_err(
                    lineno,
                    format!("ragged row: {} values, expected {w}", values.len()),
                ))
            }
            _ => {}
        }
        let id = format!("{prefix}-{}", streams.len());
        streams.push(Stream::new(id, 1, values)?.with_label(normalize_label(label)));
    }
    let n = streams.len();
    LabeledCorpus::new(streams, vec![split; n])
}

/// Loads one file; the split is `Test` when the file stem ends in `TEST`.
pub fn load_ucr(path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("")
        .to_ascii_uppercase();
    let (split, prefix) = if stem.ends_with("TEST") {
        (SplitTag::Test, "test")
    } else {
        (SplitTag::Train, "train")
    };
    parse_ucr(
        std::io::BufReader::new(file),
        split,
        prefix,
        &path.display().to_string(),
    )
}

/// Loads and merges `{name}_TRAIN` and `{name}_TEST` from `dir`, trying the
/// `.tsv`, `.csv` and `.txt` extensions. Both parts must share a length.
pub fn load_ucr_dataset(dir: impl AsRef<Path>, name: &str) -> Result<LabeledCorpus> {
    let dir = dir.as_ref();
    let find = |part: &str| {
        ["tsv", "csv", "txt"]
            .iter()
            .map(|ext| dir.join(format!("{name}_{part}.{ext}")))
            .find(|p| p.is_file())
            .ok_or_else(|| {
                Error::InsufficientData(format!("{name}_{part} not found in {}", dir.display()))
            })
    };
    let train = load_ucr(find("TRAIN")?)?;
    let test = load_ucr(find("TEST")?)?;
    let len = |c: &LabeledCorpus| c.streams().first().map(Stream::len);
    if let (Some(a), Some(b)) = (len(&train), len(&test)) {
        if a != b {
            return Err(Error::InvalidStream {
                id: name.to_string(),
                reason: format!("train series have length {a}, test series {b}"),
            });
        }
    }
    Ok(train.concat(test))
}

/// The least frequent class; ties go to the first label in sorted order.
pub fn default_normal_class(corpus: &LabeledCorpus) -> Option<String> {
    corpus
        .class_counts()
        .into_iter()
        .min_by_key(|(_, n)| *n)
        .map(|(k, _)| k)
}

/// One seeded train/test split of the contamination protocol.
#[derive(Debug, Clone)]
pub struct UcrSplit {
    pub corpus: Vec<Stream>,
    /// Anomalies placed in the corpus.
    pub contamination: usize,
    pub test: Vec<Stream>,
    pub test_is_anomaly: Vec<bool>,
}

impl UcrSplit {
    pub fn test_normal_count(&self) -> usize {
        self.test_is_anomaly.iter().filter(|a| !**a).count()
    }
}

/// Corpus = `round(0.8 * n_normal)` normal series plus
/// `round(anomaly_rate * that)` anomalies; everything else is test data.
pub fn ucr_split(
    data: &LabeledCorpus,
    normal_class: &str,
    anomaly_rate: f64,
    seed: u64,
) -> Result<UcrSplit> {
    if !(0.0..1.0).contains(&anomaly_rate) {
        return Err(Error::InvalidParameter(format!(
            "anomaly rate must lie in [0, 1), got {anomaly_rate}"
        )));
    }
    let (mut normals, mut anomalies): (Vec<usize>, Vec<usize>) =
        (0..data.len()).partition(|&i| data.label(i) == normal_class);
    if normals.is_empty() || anomalies.is_empty() {
        return Err(Error::SingleClass {
            normal: normals.len(),
            anomalous: anomalies.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    normals.shuffle(&mut rng);
    anomalies.shuffle(&mut rng);

    let n_fit = (0.8 * normals.len() as f64).round() as usize;
    let n_contam = ((anomaly_rate * n_fit as f64).round() as usize).min(anomalies.len() - 1);
    if n_fit < 2 || n_fit == normals.len() {
        return Err(Error::InsufficientData(format!(
            "class {normal_class:?} has {} series, too few to split",
            normals.len()
        )));
    }
    let s = data.streams();
    let corpus = normals[..n_fit]
        .iter()
        .chain(&anomalies[..n_contam])
        .map(|&i| s[i].clone())
        .collect();
    let test_idx: Vec<(usize, bool)> = normals[n_fit..]
        .iter()
        .map(|&i| (i, false))
        .chain(anomalies[n_contam..].iter().map(|&i| (i, true)))
        .collect();
    Ok(UcrSplit {
        corpus,
        contamination: n_contam,
        test: test_idx.iter().map(|&(i, _)| s[i].clone()).collect(),
        test_is_anomaly: test_idx.iter().map(|&(_, a)| a).collect(),
    })
}
