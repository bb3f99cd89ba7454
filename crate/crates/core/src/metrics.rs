//! Evaluation: IoU, precision/recall/F1 of proposed regions, track-weighted
//! F1 across recordings, F1-vs-threshold AUC, and image bit error ratio.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::frames::BinaryFrame;
use crate::pipeline::{Annotation, BoundingBox};

/// The nine IoU thresholds 0.1, 0.2, …, 0.9.
pub const IOU_THRESHOLDS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Intersection over union of two boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// True-positive, proposal and ground-truth counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub true_positives: usize,
    pub proposed: usize,
    pub ground_truth: usize,
}

impl std::ops::AddAssign for MatchCounts {
    fn add_assign(&mut self, o: MatchCounts) {
        self.true_positives += o.true_positives;
        self.proposed += o.proposed;
        self.ground_truth += o.ground_truth;
    }
}

impl MatchCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.true_positives, self.proposed)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.true_positives, self.ground_truth)
    }

    pub fn f1(&self) -> f64 {
        f1_score(self.precision(), self.recall())
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// `2PR / (P + R)`, or 0 when both are 0.
pub fn f1_score(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// One-to-one greedy matching by descending IoU; ties go to the lower
/// proposal index, then the lower ground-truth index. A pair counts only if
/// its IoU is at least `thr`.
pub fn match_regions(proposed: &[BoundingBox], ground_truth: &[BoundingBox], thr: f64) -> MatchCounts {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, p) in proposed.iter().enumerate() {
        for (gi, g) in ground_truth.iter().enumerate() {
            let v = iou(p, g);
            if v > 0.0 && v >= thr {
                pairs.push((v, pi, gi));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut p_used = vec![false; proposed.len()];
    let mut g_used = vec![false; ground_truth.len()];
    let mut tp = 0;
    for (_, pi, gi) in pairs {
        if !p_used[pi] && !g_used[gi] {
            p_used[pi] = true;
            g_used[gi] = true;
            tp += 1;
        }
    }
    MatchCounts {
        true_positives: tp,
        proposed: proposed.len(),
        ground_truth: ground_truth.len(),
    }
}

/// Precision, recall and F1 of one recording at one IoU threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub thr: f64,
    pub recording_id: String,
    pub n_tracks: usize,
}

impl EvalResult {
    pub fn from_counts(counts: MatchCounts, thr: f64, recording_id: impl Into<String>, n_tracks: usize) -> Self {
        EvalResult {
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            thr,
            recording_id: recording_id.into(),
            n_tracks,
        }
    }
}

/// Single-frame precision/recall/F1.
pub fn precision_recall_f1(proposed: &[BoundingBox], ground_truth: &[BoundingBox], thr: f64) -> Result<EvalResult> {
    check_thr(thr)?;
    Ok(EvalResult::from_counts(match_regions(proposed, ground_truth, thr), thr, "", 0))
}

fn check_thr(thr: f64) -> Result<()> {
    if thr > 0.0 && thr < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("IoU threshold must lie in (0, 1), got {thr}")))
    }
}

fn by_frame(rows: &[Annotation]) -> BTreeMap<usize, Vec<BoundingBox>> {
    let mut m: BTreeMap<usize, Vec<BoundingBox>> = BTreeMap::new();
    for a in rows {
        m.entry(a.frame_index).or_default().push(a.bbox);
    }
    m
}

/// Region-level evaluation of one recording: regions are matched frame by
/// frame and counts are summed over frames. The track weight is the number
/// of distinct ground-truth track ids.
pub fn evaluate_recording(
    predictions: &[Annotation],
    ground_truth: &[Annotation],
    thr: f64,
    recording_id: &str,
) -> Result<EvalResult> {
    check_thr(thr)?;
    let pred = by_frame(predictions);
    let gt = by_frame(ground_truth);
    let frames: BTreeSet<usize> = pred.keys().chain(gt.keys()).copied().collect();
    let empty = Vec::new();
    let mut counts = MatchCounts::default();
    for f in frames {
        counts += match_regions(pred.get(&f).unwrap_or(&empty), gt.get(&f).unwrap_or(&empty), thr);
    }
    let n_tracks = ground_truth.iter().map(|a| a.track_id).collect::<BTreeSet<_>>().len();
    Ok(EvalResult::from_counts(counts, thr, recording_id, n_tracks))
}

/// `Σ N_tracks · F1 / Σ N_tracks`.
pub fn weighted_f1(per_recording: &[EvalResult]) -> Result<f64> {
    let total: usize = per_recording.iter().map(|r| r.n_tracks).sum();
    if per_recording.is_empty() || total == 0 {
        return Err(Error::InvalidParams("weighted F1 needs at least one track".into()));
    }
    Ok(per_recording.iter().map(|r| r.n_tracks as f64 * r.f1).sum::<f64>() / total as f64)
}

/// Trapezoidal area under an F1-vs-threshold curve.
pub fn f1_curve_auc(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParams("thresholds must be strictly increasing".into()));
    }
    Ok(curve
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum())
}

/// One recording's predictions and ground truth.
#[derive(Debug, Clone)]
pub struct Recording {
    pub id: String,
    pub predictions: Vec<Annotation>,
    pub ground_truth: Vec<Annotation>,
}

/// Weighted F1 at each threshold across recordings, and its AUC.
pub fn weighted_f1_curve(recordings: &[Recording], thresholds: &[f64]) -> Result<(Vec<(f64, f64)>, f64)> {
    let mut curve = Vec::with_capacity(thresholds.len());
    for &thr in thresholds {
        let per: Vec<EvalResult> = recordings
            .iter()
            .map(|r| evaluate_recording(&r.predictions, &r.ground_truth, thr, &r.id))
            .collect::<Result<_>>()?;
        curve.push((thr, weighted_f1(&per)?));
    }
    let auc = f1_curve_auc(&curve)?;
    Ok((curve, auc))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerResult {
    pub ber: f64,
    pub frames: usize,
    pub dims: (usize, usize),
}

/// Mean absolute pixel difference between paired frames.
pub fn image_ber(hardware: &[BinaryFrame], reference: &[BinaryFrame]) -> Result<BerResult> {
    if hardware.len() != reference.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} hardware frames vs {} reference frames",
            hardware.len(),
            reference.len()
        )));
    }
    let Some(first) = reference.first() else {
        return Err(Error::InvalidParams("no frames to compare".into()));
    };
    let dims = first.dims();
    let mut diff = 0usize;
    for (h, s) in hardware.iter().zip(reference) {
        if h.dims() != dims || s.dims() != dims {
            return Err(Error::DimensionMismatch("frames differ in size".into()));
        }
        diff += h.hamming(s).expect("dims checked");
    }
    let total = dims.0 * dims.1 * reference.len();
    Ok(BerResult {
        ber: if total == 0 { 0.0 } else { diff as f64 / total as f64 },
        frames: reference.len(),
        dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iou_cases() {
        let a = BoundingBox::new(0, 0, 4, 4);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &BoundingBox::new(10, 10, 2, 2)), 0.0);
        let b = BoundingBox::new(2, 0, 4, 4);
        assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_empty() {
        let gt = vec![BoundingBox::new(0, 0, 4, 4), BoundingBox::new(10, 10, 5, 5)];
        for thr in IOU_THRESHOLDS {
            let r = precision_recall_f1(&gt, &gt, thr).unwrap();
            assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        }
        let r = precision_recall_f1(&[], &gt, 0.5).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
        assert!(precision_recall_f1(&gt, &gt, 1.0).is_err());
    }

    #[test]
    fn ground_truth_consumed_once() {
        let g = BoundingBox::new(0, 0, 10, 10);
        let r = precision_recall_f1(&[g, g], &[g], 0.5).unwrap();
        assert_eq!(r.precision, 0.5);
        assert_eq!(r.recall, 1.0);
    }

    #[test]
    fn weighting() {
        let mk = |f1: f64, n: usize| EvalResult {
            precision: f1,
            recall: f1,
            f1,
            thr: 0.5,
            recording_id: String::new(),
            n_tracks: n,
        };
        assert!((weighted_f1(&[mk(0.7, 3)]).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(weighted_f1(&[mk(1.0, 1), mk(0.0, 1)]).unwrap(), 0.5);
        assert!(weighted_f1(&[]).is_err());
        assert!(weighted_f1(&[mk(1.0, 0)]).is_err());
    }

    #[test]
    fn auc_cases() {
        let flat: Vec<(f64, f64)> = IOU_THRESHOLDS.iter().map(|&t| (t, 0.6)).collect();
        assert!((f1_curve_auc(&flat).unwrap() - 0.48).abs() < 1e-12);
        assert!(f1_curve_auc(&[(0.2, 1.0), (0.1, 1.0)]).is_err());
        assert_eq!(f1_curve_auc(&[(0.5, 1.0)]).unwrap(), 0.0);
    }

    #[test]
    fn ber_counts_pixels() {
        let a = BinaryFrame::new(240, 180);
        let mut b = a.clone();
        assert_eq!(image_ber(&[a.clone()], &[a.clone()]).unwrap().ber, 0.0);
        b.set(10, 10, true);
        let r = image_ber(&[b], &[a.clone()]).unwrap();
        assert!((r.ber - 1.0 / 43200.0).abs() < 1e-18);
        assert_eq!(r.dims, (240, 180));
        assert!(image_ber(&[a.clone()], &[]).is_err());
        assert!(image_ber(&[BinaryFrame::new(3, 3)], &[a]).is_err());
    }

    #[test]
    fn recording_evaluation_sums_frames() {
        let ann = |f: usize, id: u64, x: usize| Annotation {
            frame_index: f,
            track_id: id,
            class: "car".into(),
            bbox: BoundingBox::new(x, 0, 10, 10),
        };
        let gt = vec![ann(0, 1, 0), ann(1, 1, 5), ann(1, 2, 40)];
        let pred = vec![ann(0, 9, 0), ann(1, 9, 5), ann(2, 9, 80)];
        let r = evaluate_recording(&pred, &gt, 0.5, "r").unwrap();
        assert_eq!(r.n_tracks, 2);
        assert!((r.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.recall - 2.0 / 3.0).abs() < 1e-12);
    }
}
