use std::path::Path;

use anyhow::{bail, Context, Result};
use nomf_core::filters::{median_filter_overlap, nomf, KernelSpec};
use nomf_core::metrics::{weighted_f1_curve, Recording, IOU_THRESHOLDS};
use nomf_core::pipeline::{track_frames, Annotation};
use nomf_core::BinaryFrame;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::io::{load_annotations, pbm_files, read_event_frames, read_frames, recording_dirs, save_annotations, sci, write_csv};

const EVENTS_FILE: &str = "events.txt";

struct Input {
    id: String,
    frames: Vec<BinaryFrame>,
    ground_truth: Vec<Annotation>,
}

/// A recording directory holds `gt.csv` plus either PBM frames or an
/// `events.txt` stream.
fn load_recording(dir: &Path, cfg: &RunConfig) -> Result<Input> {
    let id = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let events = dir.join(EVENTS_FILE);
    let frames = if events.is_file() {
        read_event_frames(&events, &cfg.frames)?
    } else if !pbm_files(dir)?.is_empty() {
        read_frames(dir, &cfg.frames)?
    } else {
        bail!("{} has neither {EVENTS_FILE} nor .pbm frames", dir.display());
    };
    let ground_truth = load_annotations(&dir.join("gt.csv")).with_context(|| format!("recording {id}"))?;
    Ok(Input {
        id,
        frames,
        ground_truth,
    })
}

pub struct TrackEvalSummary {
    pub auc_omf: f64,
    pub auc_nomf: f64,
}

pub fn run_track_eval(cfg: &RunConfig, root: &Path) -> Result<TrackEvalSummary> {
    let spec = KernelSpec::new(cfg.n)?;
    let inputs: Vec<Input> = recording_dirs(root)?
        .iter()
        .map(|d| load_recording(d, cfg))
        .collect::<Result<_>>()?;

    let mut curves = Vec::new();
    for (name, filter) in [
        ("omf", median_filter_overlap as fn(&BinaryFrame, KernelSpec) -> BinaryFrame),
        ("nomf", nomf),
    ] {
        let recordings: Vec<Recording> = inputs
            .par_iter()
            .map(|r| -> Result<Recording> {
                let filtered: Vec<BinaryFrame> = r.frames.iter().map(|f| filter(f, spec)).collect();
                let predictions = track_frames(&filtered, &cfg.proposals, &cfg.tracker)?;
                Ok(Recording {
                    id: r.id.clone(),
                    predictions,
                    ground_truth: r.ground_truth.clone(),
                })
            })
            .collect::<Result<_>>()?;
        for r in &recordings {
            save_annotations(&cfg.out.join("tracks").join(name).join(format!("{}.csv", r.id)), &r.predictions)?;
        }
        curves.push(weighted_f1_curve(&recordings, &IOU_THRESHOLDS)?);
    }

    let rows: Vec<String> = IOU_THRESHOLDS
        .iter()
        .enumerate()
        .map(|(i, t)| format!("{t},{},{}", sci(curves[0].0[i].1), sci(curves[1].0[i].1)))
        .collect();
    write_csv(&cfg.out.join("f1_curve.csv"), "thr,weighted_f1_omf,weighted_f1_nomf", &rows)?;
    let (auc_omf, auc_nomf) = (curves[0].1, curves[1].1);
    write_csv(
        &cfg.out.join("auc.csv"),
        "filter,auc",
        &[
            format!("omf,{}", sci(auc_omf)),
            format!("nomf,{}", sci(auc_nomf)),
            format!("nomf_minus_omf,{}", sci(auc_nomf - auc_omf)),
        ],
    )?;
    Ok(TrackEvalSummary { auc_omf, auc_nomf })
}

/// Scores existing predictions: every recording directory holds `gt.csv`
/// and `pred.csv`.
pub fn run_eval(cfg: &RunConfig, root: &Path) -> Result<f64> {
    let recordings: Vec<Recording> = recording_dirs(root)?
        .iter()
        .map(|d| -> Result<Recording> {
            Ok(Recording {
                id: d.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                predictions: load_annotations(&d.join("pred.csv"))?,
                ground_truth: load_annotations(&d.join("gt.csv"))?,
            })
        })
        .collect::<Result<_>>()?;
    let (curve, auc) = weighted_f1_curve(&recordings, &IOU_THRESHOLDS)?;
    let mut rows: Vec<String> = curve.iter().map(|(t, f)| format!("{t},{}", sci(*f))).collect();
    rows.push(format!("auc,{}", sci(auc)));
    write_csv(&cfg.out.join("eval.csv"), "thr,weighted_f1", &rows)?;
    Ok(auc)
}
