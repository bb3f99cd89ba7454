//! Event-stream ingestion and event-based binary image (EBBI) framing.

mod binary_frame;
mod events;
pub mod pbm;

pub use binary_frame::BinaryFrame;
pub use events::{
    aggregate_frames, is_empty, parse_event_str, parse_event_stream, write_event_stream, Event,
    FrameConfig, Polarity,
};
pub use pbm::{decode_pbm, encode_pbm, load_pbm, read_pbm, save_pbm, write_pbm};
