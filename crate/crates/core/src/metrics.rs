//! Evaluation metrics over extended-real scores (`+inf` ranks above every
//! finite score; NaN is rejected), plus the score file format.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended;

fn check(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            found: labels.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("NaN score".into()));
    }
    let anomalous = labels.iter().filter(|&&a| a).count();
    let normal = labels.len() - anomalous;
    if anomalous == 0 || normal == 0 {
        return Err(Error::SingleClass { normal, anomalous });
    }
    Ok((normal, anomalous))
}

/// Probability that a random anomaly (`label == true`) outscores a random
/// normal instance, ties counting one half. Computed from midranks.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (n_norm, n_anom) = check(scores, labels)?;
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let midrank = (i + j + 2) as f64 / 2.0;
        rank_sum += midrank * idx[i..=j].iter().filter(|&&k| labels[k]).count() as f64;
        i = j + 1;
    }
    let (na, nn) = (n_anom as f64, n_norm as f64);
    Ok((rank_sum - na * (na + 1.0) / 2.0) / (na * nn))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancedAccuracy {
    pub ba: f64,
    /// Scores strictly above this are predicted anomalous.
    #[serde(with = "extended::scalar")]
    pub threshold: f64,
}

/// Best `(TPR + TNR) / 2` over thresholds at midpoints between distinct
/// observed scores plus the `±inf` sentinels. Ties go to the lower
/// threshold.
pub fn best_balanced_accuracy(scores: &[f64], labels: &[bool]) -> Result<BalancedAccuracy> {
    let (n_norm, n_anom) = check(scores, labels)?;
    let mut pairs: Vec<(f64, bool)> = scores.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ba = |anom_at_or_below: usize, norm_at_or_below: usize| {
        let tpr = (n_anom - anom_at_or_below) as f64 / n_anom as f64;
        let tnr = norm_at_or_below as f64 / n_norm as f64;
        0.5 * (tpr + tnr)
    };
    // threshold -inf: everything above -inf is flagged
    let neg = pairs.iter().take_while(|p| p.0 == f64::NEG_INFINITY);
    let (a0, n0) = neg.fold((0, 0), |(a, n), p| if p.1 { (a + 1, n) } else { (a, n + 1) });
    let mut best = BalancedAccuracy {
        ba: ba(a0, n0),
        threshold: f64::NEG_INFINITY,
    };
    let (mut anom_le, mut norm_le) = (0, 0);
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            if pairs[i].1 {
                anom_le += 1;
            } else {
                norm_le += 1;
            }
            i += 1;
        }
        let t = match pairs.get(i) {
            Some(&(next, _)) if v.is_finite() && next.is_finite() => v + 0.5 * (next - v),
            Some(_) => v,
            None => f64::INFINITY,
        };
        let cand = ba(anom_le, norm_le);
        if cand > best.ba {
            best = BalancedAccuracy { ba: cand, threshold: t };
        }
    }
    Ok(best)
}

/// Step function of the empirical CDF: distinct values ascending with the
/// fraction of the sample at or below each.
pub fn ecdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("NaN in ECDF input".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, x) in v.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *x => last.1 = frac,
            _ => out.push((*x, frac)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Auc,
    BalancedAccuracy,
}

impl Metric {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "auc" | "roc-auc" => Ok(Metric::Auc),
            "balanced-accuracy" | "ba" => Ok(Metric::BalancedAccuracy),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Auc => "auc",
            Metric::BalancedAccuracy => "balanced-accuracy",
        }
    }

    pub fn eval(self, scores: &[f64], labels: &[bool]) -> Result<f64> {
        match self {
            Metric::Auc => roc_auc(scores, labels),
            Metric::BalancedAccuracy => best_balanced_accuracy(scores, labels).map(|b| b.ba),
        }
    }
}

/// Standard deviation (population form) of `metric` over `b` bootstrap
/// resamples drawn with replacement within each class. Resample `r` uses
/// its own ChaCha8 stream of `seed`, so the result does not depend on the
/// number of worker threads.
pub fn bootstrap_se(
    scores: &[f64],
    labels: &[bool],
    metric: Metric,
    b: usize,
    seed: u64,
) -> Result<f64> {
    check(scores, labels)?;
    if b == 0 {
        return Err(Error::InvalidParameter("bootstrap needs B >= 1".into()));
    }
    let (anom, norm): (Vec<usize>, Vec<usize>) = (0..scores.len()).partition(|&i| labels[i]);
    let values = (0..b)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut s = Vec::with_capacity(scores.len());
            let mut l = Vec::with_capacity(scores.len());
            for (pool, flag) in [(&norm, false), (&anom, true)] {
                for _ in 0..pool.len() {
                    s.push(scores[pool[rng.random_range(0..pool.len())]]);
                    l.push(flag);
                }
            }
            metric.eval(&s, &l)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = values.iter().sum::<f64>() / b as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / b as f64;
    Ok(var.sqrt())
}

/// One line of a score file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub id: String,
    pub score: f64,
    pub label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawRow {
    id: String,
    score: String,
    #[serde(default)]
    label: Option<String>,
}

/// Writes `id,score,label` rows with a header; infinite scores as `inf`.
/// No rows means an empty output, header included.
pub fn write_scores<W: std::io::Write>(out: W, rows: &[ScoreRow]) -> Result<()> {
    if rows.is_empty() {
        return Ok(());
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "score", "label"])?;
    for r in rows {
        w.write_record([
            r.id.as_str(),
            extended::format(r.score).as_str(),
            r.label.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush().map_err(|e| Error::io("score output", e))?;
    Ok(())
}

pub fn write_score_file(path: impl AsRef<Path>, rows: &[ScoreRow]) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    write_scores(std::io::BufWriter::new(f), rows)
}

pub fn read_score_file(path: impl AsRef<Path>) -> Result<Vec<ScoreRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut r = csv::Reader::from_reader(file);
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize::<RawRow>().enumerate() {
        let raw = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            reason: e.to_string(),
        })?;
        let score = extended::parse(&raw.score).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            // header is line 1
            line: i + 2,
            reason: format!("bad score {:?}", raw.score),
        })?;
        rows.push(ScoreRow {
            id: raw.id,
            score,
            label: raw.label.filter(|l| !l.is_empty()),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(normal: &[f64], anomalous: &[f64]) -> (Vec<f64>, Vec<bool>) {
        let mut s = normal.to_vec();
        s.extend_from_slice(anomalous);
        let mut l = vec![false; normal.len()];
        l.extend(vec![true; anomalous.len()]);
        (s, l)
    }

    #[test]
    fn auc_examples() {
        let (s, l) = split(&[0.0, 1.0], &[2.0, 3.0]);
        assert_eq!(roc_auc(&s, &l).unwrap(), 1.0);
        let (s, l) = split(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]);
        assert_eq!(roc_auc(&s, &l).unwrap(), 0.5);
        let (s, l) = split(&[1.0, 3.0], &[2.0, 4.0]);
        assert_eq!(roc_auc(&s, &l).unwrap(), 0.75);
        let inf = f64::INFINITY;
        let (s, l) = split(&[1.0, inf], &[inf, 1e300]);
        // inf vs 1: win, inf vs inf: half, 1e300 vs 1: win, 1e300 vs inf: loss
        assert_eq!(roc_auc(&s, &l).unwrap(), 2.5 / 4.0);
    }

    #[test]
    fn auc_errors() {
        assert!(matches!(
            roc_auc(&[1.0, 2.0], &[false, false]),
            Err(Error::SingleClass { normal: 2, anomalous: 0 })
        ));
        assert!(roc_auc(&[f64::NAN, 2.0], &[false, true]).is_err());
        assert!(roc_auc(&[1.0], &[false, true]).is_err());
    }

    #[test]
    fn ba_examples() {
        let (s, l) = split(&[1.0, 2.0], &[3.0]);
        let b = best_balanced_accuracy(&s, &l).unwrap();
        assert_eq!((b.ba, b.threshold), (1.0, 2.5));
        let (s, l) = split(&[1.0, 3.0], &[2.0, 4.0]);
        let b = best_balanced_accuracy(&s, &l).unwrap();
        // thresholds 1.5 and 3.5 both give 0.75; the lower wins
        assert_eq!((b.ba, b.threshold), (0.75, 1.5));
        let (s, l) = split(&[5.0, 5.0], &[5.0]);
        let b = best_balanced_accuracy(&s, &l).unwrap();
        assert_eq!((b.ba, b.threshold), (0.5, f64::NEG_INFINITY));
    }

    #[test]
    fn ba_with_infinities() {
        let inf = f64::INFINITY;
        let (s, l) = split(&[0.0, 1.0], &[inf, inf]);
        let b = best_balanced_accuracy(&s, &l).unwrap();
        assert_eq!((b.ba, b.threshold), (1.0, 1.0));
        let (s, l) = split(&[inf], &[inf]);
        assert_eq!(best_balanced_accuracy(&s, &l).unwrap().ba, 0.5);
    }

    #[test]
    fn ecdf_examples() {
        assert_eq!(ecdf(&[1.0, 1.0, 2.0]).unwrap(), vec![(1.0, 2.0 / 3.0), (2.0, 1.0)]);
        assert_eq!(ecdf(&[4.0]).unwrap(), vec![(4.0, 1.0)]);
        assert_eq!(
            ecdf(&[f64::INFINITY, 0.0]).unwrap(),
            vec![(0.0, 0.5), (f64::INFINITY, 1.0)]
        );
        assert!(ecdf(&[]).unwrap().is_empty());
    }

    #[test]
    fn bootstrap_examples() {
        let (s, l) = split(&[0.0, 1.0, 2.0], &[5.0, 6.0]);
        assert_eq!(bootstrap_se(&s, &l, Metric::Auc, 200, 1).unwrap(), 0.0);
        let (s, l) = split(&[1.0, 3.0, 0.5], &[2.0, 4.0, 0.2]);
        assert_eq!(bootstrap_se(&s, &l, Metric::Auc, 1, 1).unwrap(), 0.0);
        let a = bootstrap_se(&s, &l, Metric::Auc, 300, 5).unwrap();
        let b = bootstrap_se(&s, &l, Metric::Auc, 300, 5).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0);
        assert!(bootstrap_se(&s, &l, Metric::Auc, 0, 5).unwrap_err().is_config_error());
    }

    #[test]
    fn score_file_round_trip() {
        let rows = vec![
            ScoreRow { id: "a".into(), score: 0.1, label: Some("normal".into()) },
            ScoreRow { id: "b,c".into(), score: f64::INFINITY, label: None },
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_score_file(&p, &rows).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "id,score,label\na,0.1,normal\n\"b,c\",inf,\n");
        assert_eq!(read_score_file(&p).unwrap(), rows);
        write_score_file(&p, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "");
        assert!(read_score_file(&p).unwrap().is_empty());
        std::fs::write(&p, "id,score,label\nx,nan,\n").unwrap();
        assert!(matches!(read_score_file(&p), Err(Error::Parse { line: 2, .. })));
    }
}
