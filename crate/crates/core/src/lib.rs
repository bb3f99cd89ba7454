//! Binary-image median filtering for event-camera frames, in software and
//! in a read-disturb 6T-SRAM macro model, with the analytic cost model,
//! region-proposal tracking pipeline and evaluation metrics around it.

pub mod error;
pub mod filters;
pub mod frames;
pub mod metrics;
pub mod perf_model;
pub mod pipeline;
pub mod sram_macro;
pub mod synth;

pub use error::{Error, Result};
pub use filters::{majority, median_filter_overlap, nomf, patch_majority, KernelSpec, StrideMode};
pub use frames::{BinaryFrame, Event, FrameConfig, Polarity};
pub use metrics::{iou, EvalResult};
pub use pipeline::{Annotation, BoundingBox};
