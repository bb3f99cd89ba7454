use std::path::Path;

use anyhow::{bail, Result};
use clap::ValueEnum;
use nomf_core::filters::{median_filter_overlap, nomf, KernelSpec};
use nomf_core::sram_macro::{simulate_frames, MacroGeometry};
use nomf_core::BinaryFrame;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::io::{read_frames, sci, write_csv, write_frames};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterKind {
    /// Sliding-window median filter.
    Omf,
    /// Non-overlapping tile median filter.
    Nomf,
    /// Simulated in-memory filter with device mismatch.
    Imc,
}

const REPORT_HEADER: &str =
    "frame,ones_in,ones_out,flips_intended,flips_unintended,ber,patch_errors,cycles,valid_frame";

pub struct Summary {
    pub frames: usize,
    pub mean_ber: f64,
}

pub fn run(cfg: &RunConfig, input: &Path, filter: FilterKind) -> Result<Summary> {
    let frames = read_frames(input, &cfg.frames)?;
    let spec = KernelSpec::new(cfg.n)?;
    let (outputs, rows): (Vec<BinaryFrame>, Vec<String>) = match filter {
        FilterKind::Omf | FilterKind::Nomf => frames
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let out = if filter == FilterKind::Omf {
                    median_filter_overlap(f, spec)
                } else {
                    nomf(f, spec)
                };
                let changed = out.hamming(f).expect("same dims");
                let row = format!(
                    "{i},{},{},{changed},0,{},0,0,{}",
                    f.popcount(),
                    out.popcount(),
                    sci(0.0),
                    u8::from(!out.is_blank())
                );
                (out, row)
            })
            .unzip(),
        FilterKind::Imc => {
            let g = MacroGeometry::default();
            for (i, f) in frames.iter().enumerate() {
                if f.width() > g.cols || f.height() > g.rows {
                    bail!("frame {i} is {}x{}, larger than the {}x{} macro", f.width(), f.height(), g.cols, g.rows);
                }
                if f.height() % cfg.n != 0 {
                    bail!("frame {i} height {} is not a multiple of n = {}", f.height(), cfg.n);
                }
            }
            let sims = simulate_frames(
                &frames,
                cfg.n,
                &cfg.model,
                &cfg.reference_variation(),
                cfg.operating_point(cfg.vdd),
            )?;
            sims.into_iter()
                .zip(&frames)
                .enumerate()
                .map(|(i, ((out, r), f))| {
                    let ber = r.flips_unintended as f64 / f.len() as f64;
                    let row = format!(
                        "{i},{},{},{},{},{},{},{},{}",
                        f.popcount(),
                        out.popcount(),
                        r.flips_intended,
                        r.flips_unintended,
                        sci(ber),
                        r.patch_errors,
                        r.cycles,
                        u8::from(r.valid_frame.bit)
                    );
                    (out, row)
                })
                .unzip()
        }
    };
    write_frames(&cfg.out.join("frames"), &outputs)?;
    write_csv(&cfg.out.join("report.csv"), REPORT_HEADER, &rows)?;

    let flips: usize = outputs
        .iter()
        .zip(&frames)
        .map(|(o, f)| match filter {
            FilterKind::Imc => o.hamming(&nomf(f, spec)).expect("same dims"),
            _ => 0,
        })
        .sum();
    let pixels: usize = frames.iter().map(BinaryFrame::len).sum();
    Ok(Summary {
        frames: frames.len(),
        mean_ber: if pixels == 0 { 0.0 } else { flips as f64 / pixels as f64 },
    })
}
