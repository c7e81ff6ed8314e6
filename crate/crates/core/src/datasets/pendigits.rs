//! Reader for the unresampled pen-based digit trajectories, a UNIPEN-style
//! text format:
//!
//! ```text
//! .SEGMENT DIGIT 0 ? "8"
//! .PEN_DOWN
//!  267 333
//!  263 340
//! .PEN_UP
//! .PEN_DOWN
//!  ...
//! .PEN_UP
//! ```
//!
//! Strokes of one digit are concatenated into a single 2D stream. Other
//! dot-directives (headers, comments) are skipped.

use std::fs;
use std::io::BufRead;
use std::path::Path;

use super::{LabeledCorpus, SplitTag};
use crate::error::{Error, Result};
use crate::streams::Stream;

struct Pending {
    label: String,
    line: usize,
    coords: Vec<f64>,
}

/// Parses one trajectory file. Stream ids are `{prefix}-{k}` with `k`
/// counting digits from 0 in file order.
pub fn parse_pendigits<R: BufRead>(
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
    let mut current: Option<Pending> = None;
    let mut pen_down = false;

    let finish = |p: Pending, streams: &mut Vec<Stream>| -> Result<()> {
        if p.coords.is_empty() {
            return Err(parse_err(p.line, format!("digit {:?} has no pen-down points", p.label)));
        }
        let id = format!("{prefix}-{}", streams.len());
        streams.push(Stream::new(id, 2, p.coords)?.with_label(p.label));
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(directive) = t.strip_prefix('.') {
            let mut words = directive.split_whitespace();
            match words.next().unwrap_or("") {
                "SEGMENT" => {
                    if let Some(p) = current.take() {
                        finish(p, &mut streams)?;
                    }
                    let label = segment_label(directive)
                        .ok_or_else(|| parse_err(lineno, format!("no digit label in {t:?}")))?;
                    current = Some(Pending {
                        label,
                        line: lineno,
                        coords: Vec::new(),
                    });
                    pen_down = false;
                }
                "PEN_DOWN" => pen_down = true,
                "PEN_UP" => pen_down = false,
                _ => {}
            }
            continue;
        }
        if !pen_down {
            // stray numbers outside strokes (e.g. header payloads)
            continue;
        }
        let p = current
            .as_mut()
            .ok_or_else(|| parse_err(lineno, "pen-down points before any .SEGMENT".into()))?;
        let nums: Vec<f64> = t
            .split_whitespace()
            .map(|w| w.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(lineno, format!("bad coordinate line {t:?}")))?;
        if nums.len() != 2 || nums.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(lineno, format!("expected two coordinates, got {t:?}")));
        }
        p.coords.extend(nums);
    }
    if let Some(p) = current.take() {
        finish(p, &mut streams)?;
    }
    let n = streams.len();
    LabeledCorpus::new(streams, vec![split; n])
}

/// Label of a `.SEGMENT` directive: the last double-quoted token, else the
/// last word. Must be a single digit.
fn segment_label(directive: &str) -> Option<String> {
    let quoted = directive
        .rsplit('"')
        .nth(1)
        .filter(|_| directive.matches('"').count() >= 2);
    let raw = quoted.or_else(|| directive.split_whitespace().last())?.trim();
    (raw.len() == 1 && raw.as_bytes()[0].is_ascii_digit()).then(|| raw.to_string())
}

/// Loads a single file (split taken from a `.tes` extension, otherwise
/// train) or a directory holding `*.tra` and `*.tes` files.
pub fn load_pendigits(path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| matches!(p.extension().and_then(|x| x.to_str()), Some("tra" | "tes")))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no .tra/.tes files in {}",
                path.display()
            )));
        }
        let mut out: Option<LabeledCorpus> = None;
        for f in files {
            let part = load_file(&f)?;
            out = Some(match out {
                Some(acc) => acc.concat(part),
                None => part,
            });
        }
        return Ok(out.expect("at least one file"));
    }
    load_file(path)
}

fn load_file(path: &Path) -> Result<LabeledCorpus> {
    let file = fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let ext = path.extension().and_then(|x| x.to_str()).unwrap_or("");
    let split = if ext == "tes" {
        SplitTag::Test
    } else {
        SplitTag::Train
    };
    let prefix = if ext.is_empty() { "digit" } else { ext };
    parse_pendigits(
        std::io::BufReader::new(file),
        split,
        prefix,
        &path.display().to_string(),
    )
}
