use anyhow::Result;
use nomf_core::frames::{write_event_stream, Event, Polarity};
use nomf_core::synth::{generate, SynthRecording};

use crate::config::RunConfig;
use crate::io::{save_annotations, write_frames, write_text};

/// Writes `recNNN/` directories holding frames (or an event stream) and
/// `gt.csv`. Returns the number of recordings.
pub fn run(cfg: &RunConfig, as_events: bool) -> Result<usize> {
    let synth = nomf_core::synth::SynthConfig {
        seed: cfg.seed,
        width: cfg.frames.sensor_width,
        height: cfg.frames.sensor_height,
        ..cfg.synth.clone()
    };
    let recordings = generate(&synth)?;
    for r in &recordings {
        let dir = cfg.out.join(&r.id);
        if as_events {
            let mut buf = Vec::new();
            write_event_stream(&mut buf, &to_events(r, cfg.frames.frame_interval_us))?;
            write_text(&dir.join("events.txt"), std::str::from_utf8(&buf)?)?;
        } else {
            write_frames(&dir, &r.frames)?;
        }
        save_annotations(&dir.join("gt.csv"), &r.ground_truth)?;
    }
    Ok(recordings.len())
}

/// One ON event per set pixel, spread evenly over its frame interval in
/// raster order. Framing the stream again recovers the frames exactly as long
/// as the first and last frames are not blank.
fn to_events(r: &SynthRecording, tf: u64) -> Vec<Event> {
    let mut out = Vec::new();
    for (k, f) in r.frames.iter().enumerate() {
        let count = f.popcount() as u64;
        for (j, (x, y)) in f.ones().enumerate() {
            out.push(Event {
                t: k as u64 * tf + j as u64 * tf / count.max(1),
                x: x as u16,
                y: y as u16,
                polarity: Polarity::On,
            });
        }
    }
    out
}
