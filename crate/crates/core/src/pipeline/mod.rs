//! Downstream processing of filtered frames: OR-downscaling, connected
//! component region proposals, overlap tracking and classifier patches.

mod annotations;
mod regions;
mod tracker;

pub use annotations::{read_annotations, write_annotations, Annotation};
pub use regions::{
    connected_components, downscale_or, extract_patch, label_components, region_proposals, BoundingBox, Component,
    Connectivity, ProposalConfig,
};
pub use tracker::{Track, TrackState, Tracker, TrackerConfig};

use crate::error::Result;
use crate::frames::BinaryFrame;

/// Region proposals followed by tracking over an ordered frame sequence.
/// Returns one annotation per confirmed track per frame in which it was
/// matched, in frame order.
pub fn track_frames(
    frames: &[BinaryFrame],
    proposals: &ProposalConfig,
    tracker: &TrackerConfig,
) -> Result<Vec<Annotation>> {
    let mut t = Tracker::new(*tracker)?;
    let mut out = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        let regions = region_proposals(f, proposals);
        t.update(&regions, i);
        for (id, bbox) in t.confirmed_boxes(i) {
            out.push(Annotation {
                frame_index: i,
                track_id: id,
                class: String::from("object"),
                bbox,
            });
        }
    }
    Ok(out)
}
