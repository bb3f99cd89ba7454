//! Frame and table input/output shared by the subcommands.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nomf_core::frames::{aggregate_frames, load_pbm, parse_event_stream, save_pbm, BinaryFrame, FrameConfig};
use nomf_core::pipeline::{read_annotations, write_annotations, Annotation};

/// `*.pbm` files of a directory in name order.
pub fn pbm_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pbm")))
        .collect();
    files.sort();
    Ok(files)
}

/// Reads frames from a PBM directory, a single PBM file, or an event text
/// stream framed with `framing`.
pub fn read_frames(path: &Path, framing: &FrameConfig) -> Result<Vec<BinaryFrame>> {
    if path.is_dir() {
        let files = pbm_files(path)?;
        if files.is_empty() {
            bail!("no .pbm files in {}", path.display());
        }
        return files
            .iter()
            .map(|f| load_pbm(f).with_context(|| format!("reading {}", f.display())))
            .collect();
    }
    if !path.is_file() {
        bail!("input {} does not exist", path.display());
    }
    if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("pbm")) {
        return Ok(vec![load_pbm(path).with_context(|| format!("reading {}", path.display()))?]);
    }
    read_event_frames(path, framing)
}

pub fn read_event_frames(path: &Path, framing: &FrameConfig) -> Result<Vec<BinaryFrame>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let events = parse_event_stream(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))?;
    Ok(aggregate_frames(&events, framing)?)
}

pub fn frame_name(i: usize) -> String {
    format!("frame_{i:05}.pbm")
}

pub fn write_frames(dir: &Path, frames: &[BinaryFrame]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, f) in frames.iter().enumerate() {
        let p = dir.join(frame_name(i));
        save_pbm(&p, f).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

/// Writes a CSV with a header row; fields are written verbatim.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn load_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_annotations(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

pub fn save_annotations(path: &Path, rows: &[Annotation]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_annotations(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

/// Sub-directories of `root` in name order.
pub fn recording_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .with_context(|| format!("cannot list {}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        bail!("no recording directories under {}", root.display());
    }
    Ok(dirs)
}

/// `%.6e`-style float formatting used in every table.
pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}
