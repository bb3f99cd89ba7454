//! Seeded synthetic traffic scenes: textured rectangles of road-user sizes
//! crossing the frame at constant velocity, over Bernoulli salt noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frames::BinaryFrame;
use crate::pipeline::{Annotation, BoundingBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectClass {
    Car,
    Bus,
    Bike,
    Truck,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 4] = [ObjectClass::Car, ObjectClass::Bus, ObjectClass::Bike, ObjectClass::Truck];

    pub fn name(self) -> &'static str {
        match self {
            ObjectClass::Car => "car",
            ObjectClass::Bus => "bus",
            ObjectClass::Bike => "bike",
            ObjectClass::Truck => "truck",
        }
    }

    /// Mean `(height, width)` at camera location 1, 2 or 3.
    pub fn mean_size(self, location: usize) -> (usize, usize) {
        const SIZES: [[(usize, usize); 4]; 3] = [
            [(16, 42), (31, 94), (15, 21), (22, 50)],
            [(25, 47), (52, 107), (17, 22), (35, 61)],
            [(34, 82), (64, 180), (26, 44), (50, 104)],
        ];
        SIZES[location.clamp(1, 3) - 1][self as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub recordings: usize,
    /// Size-table rows (1..=3) assigned to recordings in rotation.
    pub locations: Vec<usize>,
    /// Probability that a background pixel is set.
    pub noise_rate: f64,
    /// Probability that a pixel inside an object is set.
    pub fill_density: f64,
    pub max_objects: usize,
    /// Per-frame chance of a new object entering when below `max_objects`.
    pub spawn_rate: f64,
    /// Horizontal speed range in pixels per frame.
    pub speed: (f64, f64),
    /// Relative size jitter, uniform in `1 ± size_jitter`.
    pub size_jitter: f64,
    /// Ground truth needs at least this many visible columns.
    pub min_visible: usize,
    /// Minimum vertical clearance between objects on screen at once.
    pub lane_gap: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            width: 240,
            height: 180,
            frames: 500,
            recordings: 5,
            locations: vec![1, 2, 3],
            noise_rate: 0.01,
            fill_density: 0.8,
            max_objects: 3,
            spawn_rate: 0.06,
            speed: (2.0, 6.0),
            size_jitter: 0.15,
            min_visible: 6,
            lane_gap: 12,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.width == 0 || self.height == 0 {
            return bad("frame dimensions must be positive");
        }
        if self.recordings == 0 || self.frames < self.recordings {
            return bad("need at least one frame per recording");
        }
        if self.locations.is_empty() || self.locations.iter().any(|l| !(1..=3).contains(l)) {
            return bad("locations must be a non-empty list of 1, 2 or 3");
        }
        for (name, p) in [
            ("noise_rate", self.noise_rate),
            ("fill_density", self.fill_density),
            ("spawn_rate", self.spawn_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("{name} must lie in [0, 1]")));
            }
        }
        if !(self.speed.0 > 0.0 && self.speed.1 >= self.speed.0) {
            return bad("speed range must be positive and ordered");
        }
        if !(0.0..1.0).contains(&self.size_jitter) {
            return bad("size_jitter must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Frames and ground truth of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthRecording {
    pub id: String,
    pub frames: Vec<BinaryFrame>,
    pub ground_truth: Vec<Annotation>,
}

#[derive(Debug, Clone)]
struct Mover {
    track_id: u64,
    class: ObjectClass,
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    w: usize,
    h: usize,
}

impl Mover {
    fn visible(&self, width: usize, height: usize) -> Option<BoundingBox> {
        let x0 = self.x.round() as isize;
        let y0 = self.y.round() as isize;
        let x1 = (x0 + self.w as isize).min(width as isize);
        let y1 = (y0 + self.h as isize).min(height as isize);
        let (x0, y0) = (x0.max(0), y0.max(0));
        if x1 <= x0 || y1 <= y0 {
            return None;
        }
        Some(BoundingBox::new(x0 as usize, y0 as usize, (x1 - x0) as usize, (y1 - y0) as usize))
    }
}

/// Sets each pixel of `bbox` with probability `density`.
pub fn paint_box<R: Rng>(frame: &mut BinaryFrame, bbox: &BoundingBox, density: f64, rng: &mut R) {
    for y in bbox.y..bbox.bottom() {
        for x in bbox.x..bbox.right() {
            if rng.random_bool(density) {
                frame.set(x, y, true);
            }
        }
    }
}

/// Sets each pixel of the frame with probability `rate`.
pub fn add_salt_noise<R: Rng>(frame: &mut BinaryFrame, rate: f64, rng: &mut R) {
    if rate <= 0.0 {
        return;
    }
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            if rng.random_bool(rate) {
                frame.set(x, y, true);
            }
        }
    }
}

/// Generates `cfg.recordings` recordings splitting `cfg.frames` between them.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<SynthRecording>> {
    cfg.validate()?;
    let base = cfg.frames / cfg.recordings;
    let extra = cfg.frames % cfg.recordings;
    Ok((0..cfg.recordings)
        .map(|r| {
            let n = base + usize::from(r < extra);
            let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(r as u64);
            let location = cfg.locations[r % cfg.locations.len()];
            generate_recording(cfg, location, n, &format!("rec{r:03}"), seed)
        })
        .collect())
}

const LANE_ATTEMPTS: usize = 16;

fn generate_recording(cfg: &SynthConfig, location: usize, frames: usize, id: &str, seed: u64) -> SynthRecording {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (cfg.width, cfg.height);
    let mut movers: Vec<Mover> = Vec::new();
    let mut next_id = 1u64;
    let mut out_frames = Vec::with_capacity(frames);
    let mut gt = Vec::new();

    for f in 0..frames {
        if movers.len() < cfg.max_objects && rng.random_bool(cfg.spawn_rate) {
            let class = ObjectClass::ALL[rng.random_range(0..4)];
            let (mh, mw) = class.mean_size(location);
            let j = cfg.size_jitter;
            let ow = ((mw as f64 * rng.random_range(1.0 - j..=1.0 + j)).round() as usize).clamp(1, w);
            let oh = ((mh as f64 * rng.random_range(1.0 - j..=1.0 + j)).round() as usize).clamp(1, h);
            let speed = rng.random_range(cfg.speed.0..=cfg.speed.1);
            let leftward = rng.random_bool(0.5);
            let gap = cfg.lane_gap as f64;
            let clear = |y: f64| {
                movers
                    .iter()
                    .all(|m| y + oh as f64 + gap <= m.y || m.y + m.h as f64 + gap <= y)
            };
            let lane = (0..LANE_ATTEMPTS)
                .map(|_| rng.random_range(0..=h - oh) as f64)
                .find(|&y| clear(y));
            if let Some(y) = lane {
                movers.push(Mover {
                    track_id: next_id,
                    class,
                    x: if leftward { w as f64 } else { -(ow as f64) },
                    y,
                    vx: if leftward { -speed } else { speed },
                    vy: 0.0,
                    w: ow,
                    h: oh,
                });
                next_id += 1;
            }
        }

        let mut frame = BinaryFrame::new(w, h);
        for m in &mut movers {
            m.x += m.vx;
            m.y += m.vy;
            if let Some(b) = m.visible(w, h) {
                paint_box(&mut frame, &b, cfg.fill_density, &mut rng);
                if b.w >= cfg.min_visible.min(m.w) {
                    gt.push(Annotation {
                        frame_index: f,
                        track_id: m.track_id,
                        class: m.class.name().to_string(),
                        bbox: b,
                    });
                }
            }
        }
        movers.retain(|m| {
            let gone_right = m.vx > 0.0 && m.x >= w as f64;
            let gone_left = m.vx < 0.0 && m.x + m.w as f64 <= 0.0;
            !(gone_right || gone_left)
        });
        add_salt_noise(&mut frame, cfg.noise_rate, &mut rng);
        out_frames.push(frame);
    }

    SynthRecording {
        id: id.to_string(),
        frames: out_frames,
        ground_truth: gt,
    }
}

/// One object moving at `(vx, vy)` pixels per frame from `start`, with no
/// background noise. Returns frames and the exact per-frame boxes.
pub fn constant_velocity_scene(
    width: usize,
    height: usize,
    frames: usize,
    start: BoundingBox,
    velocity: (isize, isize),
    density: f64,
    seed: u64,
) -> (Vec<BinaryFrame>, Vec<Option<BoundingBox>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mover = |f: usize| Mover {
        track_id: 1,
        class: ObjectClass::Car,
        x: start.x as f64 + (velocity.0 * f as isize) as f64,
        y: start.y as f64 + (velocity.1 * f as isize) as f64,
        vx: 0.0,
        vy: 0.0,
        w: start.w,
        h: start.h,
    };
    let mut out = Vec::with_capacity(frames);
    let mut boxes = Vec::with_capacity(frames);
    for f in 0..frames {
        let mut frame = BinaryFrame::new(width, height);
        let b = mover(f).visible(width, height);
        if let Some(b) = &b {
            paint_box(&mut frame, b, density, &mut rng);
        }
        out.push(frame);
        boxes.push(b);
    }
    (out, boxes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_split() {
        let cfg = SynthConfig {
            frames: 41,
            recordings: 4,
            seed: 3,
            ..SynthConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|r| r.frames.len()).collect::<Vec<_>>(), vec![11, 10, 10, 10]);
    }

    #[test]
    fn noise_rate_is_respected() {
        let cfg = SynthConfig {
            frames: 20,
            recordings: 1,
            spawn_rate: 0.0,
            ..SynthConfig::default()
        };
        let rec = &generate(&cfg).unwrap()[0];
        assert!(rec.ground_truth.is_empty());
        let set: usize = rec.frames.iter().map(BinaryFrame::popcount).sum();
        let rate = set as f64 / (20.0 * 43200.0);
        assert!((rate - 0.01).abs() < 0.001, "{rate}");
    }

    #[test]
    fn ground_truth_boxes_cover_painted_pixels() {
        let cfg = SynthConfig {
            frames: 200,
            recordings: 1,
            noise_rate: 0.0,
            min_visible: 1,
            seed: 9,
            ..SynthConfig::default()
        };
        let rec = &generate(&cfg).unwrap()[0];
        assert!(!rec.ground_truth.is_empty());
        for (f, frame) in rec.frames.iter().enumerate() {
            let boxes: Vec<_> = rec.ground_truth.iter().filter(|a| a.frame_index == f).map(|a| a.bbox).collect();
            for (x, y) in frame.ones() {
                assert!(boxes.iter().any(|b| b.contains(x, y)));
            }
        }
    }

    #[test]
    fn size_table() {
        assert_eq!(ObjectClass::Bus.mean_size(1), (31, 94));
        assert_eq!(ObjectClass::Bike.mean_size(2), (17, 22));
        assert_eq!(ObjectClass::Truck.mean_size(3), (50, 104));
    }

    #[test]
    fn constant_velocity_boxes() {
        let (frames, boxes) = constant_velocity_scene(100, 50, 5, BoundingBox::new(0, 10, 10, 8), (3, 1), 1.0, 0);
        assert_eq!(boxes[2], Some(BoundingBox::new(6, 12, 10, 8)));
        assert_eq!(frames[4].popcount(), 80);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(generate(&SynthConfig {
            locations: vec![4],
            ..SynthConfig::default()
        })
        .is_err());
        assert!(generate(&SynthConfig {
            noise_rate: 1.5,
            ..SynthConfig::default()
        })
        .is_err());
    }
}
