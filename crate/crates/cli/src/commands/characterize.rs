use anyhow::{bail, Result};
use nomf_core::sram_macro::{ber_pattern_sweep, MacroGeometry, PatternSelection, SweepConfig};

use crate::config::RunConfig;
use crate::io::{sci, write_csv};

pub struct Request {
    pub ks: Vec<usize>,
    pub vdds: Vec<f64>,
    pub patterns: PatternSelection,
}

/// Parses `all` or a sample size.
pub fn parse_patterns(s: &str, seed: u64) -> Result<PatternSelection> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(PatternSelection::All);
    }
    match s.parse::<usize>() {
        Ok(count) if count > 0 => Ok(PatternSelection::Sample { count, seed }),
        _ => bail!("--patterns expects `all` or a positive count, got `{s}`"),
    }
}

pub fn run(cfg: &RunConfig, req: &Request) -> Result<usize> {
    let cells = cfg.n * cfg.n;
    if req.ks.is_empty() || req.vdds.is_empty() {
        bail!("empty k or vdd list");
    }
    if let Some(&k) = req.ks.iter().find(|&&k| k > cells) {
        bail!("k = {k} exceeds the {cells} cells of a window");
    }
    if let Some(&v) = req.vdds.iter().find(|&&v| !(v > 0.0)) {
        bail!("vdd must be positive, got {v}");
    }
    let geometry = MacroGeometry::new(cfg.macro_rows, cfg.macro_cols)?;
    let reference = cfg.reference_variation();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &vdd in &req.vdds {
        let mut device = cfg.model.device(vdd, cfg.temperature_c, cfg.corner);
        device.delta_c = cfg.delta_c;
        let variation = cfg.model.variation(&reference, &device);
        for &k in &req.ks {
            let stat = ber_pattern_sweep(&SweepConfig {
                geometry,
                n: cfg.n,
                k,
                device,
                variation,
                trials: cfg.trials,
                patterns: req.patterns,
                patch_count: None,
            })?;
            let corner = cfg.corner.as_str();
            let t = cfg.temperature_c;
            for p in &stat.per_pattern {
                rows.push(format!("{vdd},{t},{corner},{},{k},{},{},{}", cfg.n, p.pattern_id, stat.trials, sci(p.ber)));
            }
            summary.push(format!(
                "{vdd},{t},{corner},{},{k},{},{},{},{},{}",
                cfg.n,
                stat.per_pattern.len(),
                stat.patches,
                stat.trials,
                sci(stat.ber),
                sci(stat.patch_error_rate)
            ));
        }
    }
    write_csv(
        &cfg.out.join("characterize.csv"),
        "vdd,temp_c,corner,n,k,pattern_id,trials,ber",
        &rows,
    )?;
    write_csv(
        &cfg.out.join("characterize_summary.csv"),
        "vdd,temp_c,corner,n,k,patterns,patches,trials,ber,patch_error_rate",
        &summary,
    )?;
    Ok(rows.len())
}
