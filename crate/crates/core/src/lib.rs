//! Anomaly detection on streamed data by conformance: the variance-norm
//! distance from a stream's truncated path signature to a corpus of normal
//! signatures.
//!
//! ```
//! use sigconform::{ConformanceModel, Cutoffs, NormalizationMode, Pipeline, Stream, Transform};
//!
//! let corpus: Vec<Stream> = (0..20)
//!     .map(|k| {
//!         let a = k as f64 * 0.1;
//!         Stream::from_points(format!("c{k}"), &[[0.0], [a.sin()], [1.0 + a], [a.cos()]]).unwrap()
//!     })
//!     .collect();
//! let mut pipeline = Pipeline::new(1, 3, &[Transform::Time], NormalizationMode::None).unwrap();
//! pipeline.fit(&corpus).unwrap();
//! let model = ConformanceModel::fit(pipeline.features_batch(&corpus).unwrap(), Cutoffs::default())
//!     .unwrap();
//! let member = pipeline.features(&corpus[3]).unwrap();
//! assert_eq!(model.conformance(&member).unwrap().value, 0.0);
//! ```

pub mod conformance;
pub mod datasets;
pub mod error;
pub mod experiments;
pub mod extended;
pub mod metrics;
pub mod pipeline;
pub mod signature;
pub mod streams;

pub use conformance::{calibrate, detect, Calibration, ConformanceModel, Cutoffs, Detection, Score};
pub use error::{Error, Result};
pub use pipeline::Pipeline;
pub use signature::{sig_dim, signature, SignatureVector, Word};
pub use streams::{NormalizationMode, Stream, Transform};
