use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::iou;
use crate::pipeline::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackState {
    Tentative,
    Confirmed,
    Dead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u64,
    /// Matched box per frame index.
    pub boxes: BTreeMap<usize, BoundingBox>,
    /// Consecutive frames with a match.
    pub hits: u32,
    /// Consecutive frames without a match.
    pub misses: u32,
    pub state: TrackState,
}

impl Track {
    pub fn last_box(&self) -> Option<&BoundingBox> {
        self.boxes.values().next_back()
    }

    pub fn is_alive(&self) -> bool {
        self.state != TrackState::Dead
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    pub iou_match_threshold: f64,
    pub confirm_hits: u32,
    pub kill_misses: u32,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            iou_match_threshold: 0.3,
            confirm_hits: 3,
            kill_misses: 5,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_match_threshold > 0.0 && self.iou_match_threshold < 1.0) {
            return Err(Error::InvalidParams("iou_match_threshold must lie in (0, 1)".into()));
        }
        if self.confirm_hits == 0 || self.kill_misses == 0 {
            return Err(Error::InvalidParams("confirm_hits and kill_misses must be >= 1".into()));
        }
        Ok(())
    }
}

/// Frame-synchronous overlap tracker with greedy IoU association.
#[derive(Debug, Clone)]
pub struct Tracker {
    cfg: TrackerConfig,
    tracks: Vec<Track>,
    next_id: u64,
}

impl Tracker {
    pub fn new(cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Tracker {
            cfg,
            tracks: Vec::new(),
            next_id: 1,
        })
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn into_tracks(self) -> Vec<Track> {
        self.tracks
    }

    /// Associates this frame's proposals with live tracks.
    ///
    /// Candidate pairs with IoU at or above the match threshold are taken
    /// greedily by descending IoU, ties going to the lower track id and then
    /// the earlier proposal. Unmatched proposals open tentative tracks.
    pub fn update(&mut self, proposals: &[BoundingBox], frame_index: usize) {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, track) in self.tracks.iter().enumerate() {
            if !track.is_alive() {
                continue;
            }
            let Some(last) = track.last_box() else { continue };
            for (pi, p) in proposals.iter().enumerate() {
                let v = iou(last, p);
                if v >= self.cfg.iou_match_threshold {
                    pairs.push((v, ti, pi));
                }
            }
        }
        // track index order equals id order
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut track_taken = vec![false; self.tracks.len()];
        let mut prop_taken = vec![false; proposals.len()];
        for (_, ti, pi) in pairs {
            if track_taken[ti] || prop_taken[pi] {
                continue;
            }
            track_taken[ti] = true;
            prop_taken[pi] = true;
            let t = &mut self.tracks[ti];
            t.boxes.insert(frame_index, proposals[pi]);
            t.hits += 1;
            t.misses = 0;
            if t.state == TrackState::Tentative && t.hits >= self.cfg.confirm_hits {
                t.state = TrackState::Confirmed;
            }
        }
        for (ti, t) in self.tracks.iter_mut().enumerate() {
            if t.is_alive() && !track_taken[ti] {
                t.hits = 0;
                t.misses += 1;
                if t.misses >= self.cfg.kill_misses {
                    t.state = TrackState::Dead;
                }
            }
        }
        for (pi, p) in proposals.iter().enumerate() {
            if prop_taken[pi] {
                continue;
            }
            let mut boxes = BTreeMap::new();
            boxes.insert(frame_index, *p);
            let state = if self.cfg.confirm_hits <= 1 {
                TrackState::Confirmed
            } else {
                TrackState::Tentative
            };
            self.tracks.push(Track {
                id: self.next_id,
                boxes,
                hits: 1,
                misses: 0,
                state,
            });
            self.next_id += 1;
        }
    }

    /// `(track id, box)` of confirmed tracks matched in `frame_index`.
    pub fn confirmed_boxes(&self, frame_index: usize) -> Vec<(u64, BoundingBox)> {
        self.tracks
            .iter()
            .filter(|t| t.state == TrackState::Confirmed)
            .filter_map(|t| t.boxes.get(&frame_index).map(|b| (t.id, *b)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_in_empty_out() {
        let mut t = Tracker::new(TrackerConfig::default()).unwrap();
        t.update(&[], 0);
        assert!(t.tracks().is_empty());
    }

    #[test]
    fn static_box_confirms_after_three_hits() {
        let mut t = Tracker::new(TrackerConfig::default()).unwrap();
        let b = BoundingBox::new(10, 10, 20, 10);
        t.update(&[b], 0);
        t.update(&[b], 1);
        assert_eq!(t.tracks()[0].state, TrackState::Tentative);
        t.update(&[b], 2);
        assert_eq!(t.tracks().len(), 1);
        assert_eq!(t.tracks()[0].state, TrackState::Confirmed);
        assert_eq!(t.confirmed_boxes(2), vec![(1, b)]);
    }

    #[test]
    fn dies_after_misses_and_stays_dead() {
        let cfg = TrackerConfig {
            kill_misses: 2,
            ..TrackerConfig::default()
        };
        let mut t = Tracker::new(cfg).unwrap();
        let b = BoundingBox::new(0, 0, 5, 5);
        t.update(&[b], 0);
        t.update(&[], 1);
        t.update(&[], 2);
        assert_eq!(t.tracks()[0].state, TrackState::Dead);
        t.update(&[b], 3);
        assert_eq!(t.tracks().len(), 2);
        assert_eq!(t.tracks()[0].boxes.len(), 1);
        assert_eq!(t.tracks()[1].id, 2);
    }

    #[test]
    fn greedy_prefers_best_overlap() {
        let mut t = Tracker::new(TrackerConfig::default()).unwrap();
        t.update(&[BoundingBox::new(0, 0, 10, 10)], 0);
        // both overlap the track; the closer one wins, the other spawns
        let near = BoundingBox::new(1, 0, 10, 10);
        let far = BoundingBox::new(4, 0, 10, 10);
        t.update(&[far, near], 1);
        assert_eq!(t.tracks()[0].boxes[&1], near);
        assert_eq!(t.tracks()[1].boxes[&1], far);
    }

    #[test]
    fn tie_goes_to_lower_track_id() {
        let mut t = Tracker::new(TrackerConfig::default()).unwrap();
        let b = BoundingBox::new(0, 0, 10, 10);
        t.update(&[b, b], 0);
        t.update(&[b], 1);
        assert!(t.tracks()[0].boxes.contains_key(&1));
        assert!(!t.tracks()[1].boxes.contains_key(&1));
    }

    #[test]
    fn invalid_config() {
        assert!(Tracker::new(TrackerConfig {
            iou_match_threshold: 1.0,
            ..TrackerConfig::default()
        })
        .is_err());
        assert!(Tracker::new(TrackerConfig {
            confirm_hits: 0,
            ..TrackerConfig::default()
        })
        .is_err());
    }
}
