//! AIS vessel traffic: CSV ingestion and the sub-stream experiment.

use std::collections::HashMap;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::haversine::unchecked as haversine_m;
use crate::error::{Error, Result};
use crate::streams::{compress, disintegrate, DisintegrateMode, Distance, Stream};

/// CSV column names. Defaults follow the MarineCadastre 2017 exports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AisColumns {
    pub vessel_id: String,
    pub timestamp: String,
    pub latitude: String,
    pub longitude: String,
    pub length: String,
}

impl Default for AisColumns {
    fn default() -> Self {
        Self {
            vessel_id: "MMSI".into(),
            timestamp: "BaseDateTime".into(),
            latitude: "LAT".into(),
            longitude: "LON".into(),
            length: "Length".into(),
        }
    }
}

/// One vessel's track: `(lat°, lon°)` points timestamped in seconds since
/// the Unix epoch, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct VesselRecord {
    pub vessel_id: String,
    pub positions: Stream,
    pub length_m: f64,
}

#[derive(Debug, Clone, Default)]
pub struct AisLoad {
    /// Sorted by vessel id.
    pub vessels: Vec<VesselRecord>,
    pub dropped_rows: usize,
    pub dropped_vessels: usize,
}

fn parse_time(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp() as f64 + f64::from(t.timestamp_subsec_micros()) * 1e-6);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            let t = t.and_utc();
            return Some(t.timestamp() as f64 + f64::from(t.timestamp_subsec_micros()) * 1e-6);
        }
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn parse_length(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|x| x.is_finite() && *x > 0.0)
}

#[derive(Default)]
struct Track {
    rows: Vec<(f64, f64, f64)>,
    length: Option<f64>,
    bad_length: bool,
}

/// Reads an AIS CSV. Rows without a vessel id, or with unparseable
/// coordinates or timestamps, are dropped and counted. A vessel with any
/// missing or invalid length is dropped entirely. Within a vessel rows are
/// sorted by time and repeated timestamps keep their first row.
pub fn load_ais(path: impl AsRef<Path>, columns: &AisColumns) -> Result<AisLoad> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::InvalidParameter(format!("column {name:?} not found in {}", path.display()))
        })
    };
    let (c_id, c_t, c_lat, c_lon, c_len) = (
        col(&columns.vessel_id)?,
        col(&columns.timestamp)?,
        col(&columns.latitude)?,
        col(&columns.longitude)?,
        col(&columns.length)?,
    );

    let mut tracks: HashMap<String, Track> = HashMap::new();
    let mut dropped_rows = 0;
    for rec in reader.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let id = field(c_id);
        if id.is_empty() {
            dropped_rows += 1;
            continue;
        }
        let track = tracks.entry(id.to_string()).or_default();
        match parse_length(field(c_len)) {
            Some(l) if track.length.is_none() => track.length = Some(l),
            Some(_) => {}
            None => track.bad_length = true,
        }
        let lat = field(c_lat).parse::<f64>().ok();
        let lon = field(c_lon).parse::<f64>().ok();
        match (parse_time(field(c_t)), lat, lon) {
            (Some(t), Some(lat), Some(lon))
                if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) =>
            {
                track.rows.push((t, lat, lon))
            }
            _ => dropped_rows += 1,
        }
    }

    let mut ids: Vec<String> = tracks.keys().cloned().collect();
    ids.sort();
    let mut out = AisLoad {
        dropped_rows,
        ..Default::default()
    };
    for id in ids {
        let mut track = tracks.remove(&id).expect("key listed");
        let length = match track.length {
            Some(l) if !track.bad_length && !track.rows.is_empty() => l,
            _ => {
                out.dropped_vessels += 1;
                continue;
            }
        };
        track.rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        track.rows.dedup_by(|b, a| a.0 == b.0);
        let coords = track.rows.iter().flat_map(|r| [r.1, r.2]).collect();
        let times = track.rows.iter().map(|r| r.0).collect();
        let positions = Stream::new(id.clone(), 2, coords)?.with_timestamps(times)?;
        out.vessels.push(VesselRecord {
            vessel_id: id,
            positions,
            length_m: length,
        });
    }
    Ok(out)
}

/// Experiment parameters; distances in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AisParams {
    pub segment_length_m: f64,
    pub compress_threshold_m: f64,
    pub min_displacement_m: f64,
    pub max_gap_m: f64,
    /// Vessels strictly longer than this are normal.
    pub normal_min_length_m: f64,
    /// Vessels at most this long are anomalous.
    pub anomaly_max_length_m: f64,
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for AisParams {
    fn default() -> Self {
        Self {
            segment_length_m: 4000.0,
            compress_threshold_m: 10.0,
            min_displacement_m: 5000.0,
            max_gap_m: 1000.0,
            normal_min_length_m: 100.0,
            anomaly_max_length_m: 50.0,
            sample_size: 5000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthClass {
    Normal,
    Anomalous,
    Excluded,
}

impl AisParams {
    pub fn classify(&self, length_m: f64) -> LengthClass {
        if length_m > self.normal_min_length_m {
            LengthClass::Normal
        } else if length_m <= self.anomaly_max_length_m {
            LengthClass::Anomalous
        } else {
            LengthClass::Excluded
        }
    }
}

#[derive(Debug, Clone)]
pub struct AisExperiment {
    pub corpus: Vec<Stream>,
    pub normal_test: Vec<Stream>,
    pub anomaly_test: Vec<Stream>,
    pub corpus_vessels: usize,
    pub test_vessels: usize,
    pub anomaly_vessels: usize,
}

/// Compressed, displacement-filtered, disintegrated sub-streams of one
/// vessel.
pub fn vessel_substreams(v: &VesselRecord, params: &AisParams) -> Result<Vec<Stream>> {
    let track = compress(&v.positions, params.compress_threshold_m, Distance::Haversine)?;
    let (a, b) = (track.point(0), track.point(track.len() - 1));
    if haversine_m(a[0], a[1], b[0], b[1]) <= params.min_displacement_m {
        return Ok(Vec::new());
    }
    disintegrate(
        &track,
        params.segment_length_m,
        params.max_gap_m,
        Distance::Haversine,
        DisintegrateMode::PathLength,
    )
}

/// Draws `n` (group, member) pairs with replacement so that every group is
/// equally likely and members are uniform within a group; a member's
/// probability is inversely proportional to its group's size.
pub fn sample_by_group<R: Rng>(group_sizes: &[usize], n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let groups: Vec<usize> = (0..group_sizes.len()).filter(|&g| group_sizes[g] > 0).collect();
    if groups.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|_| {
            let g = groups[rng.random_range(0..groups.len())];
            (g, rng.random_range(0..group_sizes[g]))
        })
        .collect()
}

fn sample_streams<R: Rng>(groups: &[Vec<Stream>], n: usize, rng: &mut R) -> Vec<Stream> {
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    sample_by_group(&sizes, n, rng)
        .into_iter()
        .map(|(g, k)| groups[g][k].clone())
        .collect()
}

/// Builds corpus, normal test and anomalous test sets. Normal vessels are
/// split in halves at the vessel level (the corpus half takes the extra
/// vessel), then each subset is a weighted sample of `sample_size`
/// sub-streams.
pub fn build_ais_experiment(records: &[VesselRecord], params: &AisParams) -> Result<AisExperiment> {
    if !(params.segment_length_m > 0.0 && params.max_gap_m > 0.0) {
        return Err(Error::InvalidParameter(
            "segment length and maximum gap must be positive".into(),
        ));
    }
    let mut normal: Vec<Vec<Stream>> = Vec::new();
    let mut anomalous: Vec<Vec<Stream>> = Vec::new();
    for v in records {
        let (pool, label) = match params.classify(v.length_m) {
            LengthClass::Normal => (&mut normal, "normal"),
            LengthClass::Anomalous => (&mut anomalous, "anomaly"),
            LengthClass::Excluded => continue,
        };
        let subs: Vec<Stream> = vessel_substreams(v, params)?
            .into_iter()
            .map(|s| s.with_label(label))
            .collect();
        if !subs.is_empty() {
            pool.push(subs);
        }
    }
    if normal.len() < 2 || anomalous.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} normal and {} anomalous vessels with sub-streams; need at least 2 and 1",
            normal.len(),
            anomalous.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    normal.shuffle(&mut rng);
    let test_half = normal.split_off(normal.len().div_ceil(2));
    Ok(AisExperiment {
        corpus: sample_streams(&normal, params.sample_size, &mut rng),
        normal_test: sample_streams(&test_half, params.sample_size, &mut rng),
        anomaly_test: sample_streams(&anomalous, params.sample_size, &mut rng),
        corpus_vessels: normal.len(),
        test_vessels: test_half.len(),
        anomaly_vessels: anomalous.len(),
    })
}
