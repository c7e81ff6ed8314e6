//! Loaders and experiment builders for PenDigits-orig, UCR-style series and
//! AIS vessel traffic.

pub mod ais;
pub mod haversine;
pub mod pendigits;
pub mod ucr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::streams::Stream;

pub use ais::{
    build_ais_experiment, load_ais, sample_by_group, vessel_substreams, AisColumns, AisExperiment,
    AisLoad, AisParams, LengthClass, VesselRecord,
};
pub use haversine::haversine;
pub use pendigits::{load_pendigits, parse_pendigits};
pub use ucr::{default_normal_class, load_ucr, load_ucr_dataset, parse_ucr, ucr_split, UcrSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Test,
}

/// Labelled streams with their original train/test tags.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    streams: Vec<Stream>,
    splits: Vec<SplitTag>,
    normal_class: Option<String>,
}

impl LabeledCorpus {
    /// Every stream must carry a label.
    pub fn new(streams: Vec<Stream>, splits: Vec<SplitTag>) -> Result<Self> {
        if streams.len() != splits.len() {
            return Err(Error::DimensionMismatch {
                expected: streams.len(),
                found: splits.len(),
            });
        }
        if let Some(s) = streams.iter().find(|s| s.label().is_none()) {
            return Err(Error::invalid_stream(s.id(), "missing label"));
        }
        Ok(Self {
            streams,
            splits,
            normal_class: None,
        })
    }

    pub fn with_normal_class(mut self, class: impl Into<String>) -> Result<Self> {
        let class = class.into();
        if !self.streams.iter().any(|s| s.label() == Some(class.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "normal class {class:?} does not occur in the data"
            )));
        }
        self.normal_class = Some(class);
        Ok(self)
    }

    pub fn streams(&self) -> &[Stream] {
        &self.streams
    }

    pub fn into_streams(self) -> Vec<Stream> {
        self.streams
    }

    pub fn splits(&self) -> &[SplitTag] {
        &self.splits
    }

    pub fn normal_class(&self) -> Option<&str> {
        self.normal_class.as_deref()
    }

    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        self.streams[i].label().expect("checked at construction")
    }

    /// Streams carrying `tag`, in file order.
    pub fn split(&self, tag: SplitTag) -> impl Iterator<Item = &Stream> + '_ {
        self.streams
            .iter()
            .zip(&self.splits)
            .filter(move |(_, t)| **t == tag)
            .map(|(s, _)| s)
    }

    /// Distinct labels with their counts, sorted numerically where every
    /// label is a number and lexically otherwise.
    pub fn class_counts(&self) -> Vec<(String, usize)> {
        let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
        for s in &self.streams {
            *counts.entry(s.label().expect("labelled")).or_default() += 1;
        }
        let mut out: Vec<(String, usize)> =
            counts.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        sort_labels(&mut out);
        out
    }

    /// Merges two corpora, keeping tags.
    pub fn concat(mut self, other: LabeledCorpus) -> Self {
        self.streams.extend(other.streams);
        self.splits.extend(other.splits);
        self
    }
}

pub(crate) fn sort_labels<T>(v: &mut [(String, T)]) {
    let all_numeric = v.iter().all(|(k, _)| k.parse::<f64>().is_ok());
    if all_numeric {
        v.sort_by(|a, b| {
            let (x, y) = (a.0.parse::<f64>().unwrap(), b.0.parse::<f64>().unwrap());
            x.total_cmp(&y)
        });
    } else {
        v.sort_by(|a, b| a.0.cmp(&b.0));
    }
}
