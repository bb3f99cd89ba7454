use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::frames::BinaryFrame;
use crate::sram_macro::MacroGeometry;

/// Sign of the brightness change reported by a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Off,
    On,
}

impl Polarity {
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Off => -1,
            Polarity::On => 1,
        }
    }
}

/// One address event: time in microseconds, pixel address and polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub t: u64,
    pub x: u16,
    pub y: u16,
    pub polarity: Polarity,
}

/// Framing parameters for turning an event stream into binary images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConfig {
    /// Frame interval `t_f` in microseconds.
    pub frame_interval_us: u64,
    pub sensor_width: usize,
    pub sensor_height: usize,
}

impl Default for FrameConfig {
    /// 15 Hz framing of a 240×180 sensor.
    fn default() -> Self {
        FrameConfig {
            frame_interval_us: 66_000,
            sensor_width: 240,
            sensor_height: 180,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        let g = MacroGeometry::default();
        if self.frame_interval_us == 0 {
            return Err(Error::InvalidParams("frame interval must be positive".into()));
        }
        if self.sensor_width == 0 || self.sensor_height == 0 {
            return Err(Error::InvalidParams("sensor dimensions must be positive".into()));
        }
        if self.sensor_width > g.cols || self.sensor_height > g.rows {
            return Err(Error::InvalidParams(format!(
                "sensor {}x{} exceeds the {}x{} macro",
                self.sensor_width, self.sensor_height, g.cols, g.rows
            )));
        }
        Ok(())
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<Event> {
    let mut fields = line.split(',').map(str::trim);
    let mut next = || fields.next().ok_or(Error::MalformedLine(line_no));
    let t = next()?.parse::<u64>().map_err(|_| Error::MalformedLine(line_no))?;
    let x = next()?.parse::<u16>().map_err(|_| Error::MalformedLine(line_no))?;
    let y = next()?.parse::<u16>().map_err(|_| Error::MalformedLine(line_no))?;
    let polarity = match next()? {
        "0" => Polarity::Off,
        "1" => Polarity::On,
        _ => return Err(Error::MalformedLine(line_no)),
    };
    if fields.next().is_some() {
        return Err(Error::MalformedLine(line_no));
    }
    Ok(Event { t, x, y, polarity })
}

/// Parses a `t_us,x,y,polarity` text stream.
///
/// Blank lines and lines starting with `#` are skipped. Line numbers in
/// errors are 1-based.
pub fn parse_event_stream<R: BufRead>(reader: R) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    let mut last_t = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let ev = parse_line(trimmed, line_no)?;
        if ev.t < last_t {
            return Err(Error::NonMonotonicTimestamp(line_no));
        }
        last_t = ev.t;
        events.push(ev);
    }
    Ok(events)
}

pub fn parse_event_str(text: &str) -> Result<Vec<Event>> {
    parse_event_stream(text.as_bytes())
}

/// Writes events in the format read by [`parse_event_stream`].
pub fn write_event_stream<W: Write>(mut out: W, events: &[Event]) -> Result<()> {
    for e in events {
        let p = match e.polarity {
            Polarity::Off => 0,
            Polarity::On => 1,
        };
        writeln!(out, "{},{},{},{}", e.t, e.x, e.y, p)?;
    }
    Ok(())
}

/// OR-accumulates events into fixed-interval binary frames.
///
/// Frame `k` covers `[t0 + k·t_f, t0 + (k+1)·t_f)` where `t0` is the first
/// event's timestamp. Polarity is ignored; intervals with no events still
/// produce (blank) frames so that frame indices stay aligned with time.
pub fn aggregate_frames(events: &[Event], cfg: &FrameConfig) -> Result<Vec<BinaryFrame>> {
    cfg.validate()?;
    let Some(first) = events.first() else {
        return Ok(Vec::new());
    };
    let t0 = first.t;
    let last = events.last().unwrap().t;
    if last < t0 {
        return Err(Error::InvalidParams("events are not sorted by time".into()));
    }
    let n_frames = ((last - t0) / cfg.frame_interval_us + 1) as usize;
    let mut frames = vec![BinaryFrame::new(cfg.sensor_width, cfg.sensor_height); n_frames];
    let mut prev_t = t0;
    for ev in events {
        if ev.t < prev_t {
            return Err(Error::InvalidParams("events are not sorted by time".into()));
        }
        prev_t = ev.t;
        if ev.x as usize >= cfg.sensor_width || ev.y as usize >= cfg.sensor_height {
            return Err(Error::EventOutOfBounds(*ev));
        }
        let k = ((ev.t - t0) / cfg.frame_interval_us) as usize;
        frames[k].set(ev.x as usize, ev.y as usize, true);
    }
    Ok(frames)
}

/// Software blank-frame test.
pub fn is_empty(frame: &BinaryFrame) -> bool {
    frame.is_blank()
}
