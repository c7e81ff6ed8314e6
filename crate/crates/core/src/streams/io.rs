//! Newline-delimited JSON interchange format for streams.
//!
//! One object per line:
//! `{"id": "...", "label": "...", "timestamps": [...], "points": [[...], ...]}`
//! where `label` and `timestamps` may be omitted.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Stream;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamps: Option<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
}

impl From<&Stream> for StreamRecord {
    fn from(s: &Stream) -> Self {
        Self {
            id: s.id().to_string(),
            label: s.label().map(str::to_string),
            timestamps: s.timestamps().map(<[f64]>::to_vec),
            points: s.to_points(),
        }
    }
}

impl TryFrom<StreamRecord> for Stream {
    type Error = Error;

    fn try_from(r: StreamRecord) -> Result<Stream> {
        if r.points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid_stream(&r.id, "non-finite coordinate"));
        }
        let mut s = Stream::from_points(r.id, &r.points)?;
        if let Some(ts) = r.timestamps {
            s = s.with_timestamps(ts)?;
        }
        if let Some(label) = r.label {
            s = s.with_label(label);
        }
        Ok(s)
    }
}

/// Reads a stream file. Blank lines are skipped; errors carry line numbers.
pub fn read_streams(path: impl AsRef<Path>) -> Result<Vec<Stream>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let record: StreamRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        out.push(Stream::try_from(record).map_err(|e| parse_err(e.to_string()))?);
    }
    Ok(out)
}

pub fn write_streams<'a>(
    path: impl AsRef<Path>,
    streams: impl IntoIterator<Item = &'a Stream>,
) -> Result<()> {
    let path = path.as_ref();
    let ctx = || path.display().to_string();
    let file = File::create(path).map_err(|e| Error::io(ctx(), e))?;
    let mut w = BufWriter::new(file);
    for s in streams {
        serde_json::to_writer(&mut w, &StreamRecord::from(s))?;
        w.write_all(b"\n").map_err(|e| Error::io(ctx(), e))?;
    }
    w.flush().map_err(|e| Error::io(ctx(), e))
}
