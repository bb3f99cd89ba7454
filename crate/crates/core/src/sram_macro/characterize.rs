//! Monte-Carlo characterisation of unintended bit flips.
//!
//! A trial is one draw of the device lottery (one simulated chip). Trial
//! `t` uses seed `base_seed + t`, so trials can run in any order and a sweep
//! is reproducible from its base seed alone.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames::BinaryFrame;
use crate::sram_macro::device::{CellVariation, DeviceParams, MacroGeometry};
use crate::sram_macro::state::{filter_in_memory, init_macro};

/// Which `k`-of-`n²` patterns a sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternSelection {
    All,
    Sample { count: usize, seed: u64 },
}

/// Number of ways to choose `k` of `n` items.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// All `cells`-bit masks with exactly `k` bits set, in increasing order.
pub fn enumerate_patterns(cells: usize, k: usize) -> Vec<u32> {
    assert!(cells <= 32);
    if k > cells {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(cells, k) as usize);
    let limit = 1u64 << cells;
    // Gosper's hack
    let mut v: u64 = (1u64 << k) - 1;
    while v < limit {
        out.push(v as u32);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Patterns chosen by `selection`, as `(pattern_id, mask)` where the id is
/// the mask's rank in [`enumerate_patterns`] order.
pub fn select_patterns(cells: usize, k: usize, selection: PatternSelection) -> Vec<(usize, u32)> {
    let total = binomial(cells, k);
    match selection {
        PatternSelection::Sample { count, seed } if (count as u64) < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if total <= 1 << 20 {
                let all = enumerate_patterns(cells, k);
                let mut picks = index::sample(&mut rng, all.len(), count).into_vec();
                picks.sort_unstable();
                picks.into_iter().map(|i| (i, all[i])).collect()
            } else {
                let mut seen = std::collections::BTreeSet::new();
                while seen.len() < count {
                    let mask = index::sample(&mut rng, cells, k).iter().fold(0u32, |m, b| m | (1 << b));
                    seen.insert(mask);
                }
                seen.into_iter().map(|m| (pattern_rank(cells, m), m)).collect()
            }
        }
        _ => enumerate_patterns(cells, k).into_iter().enumerate().collect(),
    }
}

/// Rank of `mask` among masks with the same popcount, in increasing order.
pub fn pattern_rank(cells: usize, mask: u32) -> usize {
    let mut rank = 0u64;
    let mut ones_seen = 0;
    for bit in 0..cells {
        if mask & (1 << bit) != 0 {
            ones_seen += 1;
            rank += binomial(bit, ones_seen);
        }
    }
    rank as usize
}

/// Macro contents with `mask` written into the first `patches` complete
/// `n`×`n` windows (row-group-major order); everything else is 0.
pub fn pattern_image(geometry: &MacroGeometry, n: usize, mask: u32, patches: usize) -> BinaryFrame {
    let mut bits = BinaryFrame::new(geometry.cols, geometry.rows);
    let per_row = geometry.cols / n;
    for p in 0..patches.min(geometry.full_patches(n)) {
        let y0 = (p / per_row) * n;
        let x0 = (p % per_row) * n;
        for cell in 0..n * n {
            if mask & (1 << cell) != 0 {
                bits.set(x0 + cell % n, y0 + cell / n, true);
            }
        }
    }
    bits
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub geometry: MacroGeometry,
    pub n: usize,
    pub k: usize,
    /// Operating point; variation is taken as already scaled to it.
    pub device: DeviceParams,
    /// `rng_seed` is the base seed of the trials.
    pub variation: CellVariation,
    pub trials: usize,
    pub patterns: PatternSelection,
    /// Windows initialised per trial; `None` uses every complete window.
    pub patch_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternStat {
    pub pattern_id: usize,
    pub mask: u32,
    pub flips_unintended: u64,
    pub patch_errors: u64,
    /// Unintended flips per trial, indexed by trial.
    pub flips_per_trial: Vec<u64>,
    /// `flips_unintended / (patches · trials)`.
    pub ber: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerStat {
    pub n: usize,
    pub k: usize,
    pub patches: usize,
    pub trials: usize,
    pub per_pattern: Vec<PatternStat>,
    /// Over all patterns: `flips_unintended / (patches · trials · patterns)`.
    pub ber: f64,
    /// Patches latching the wrong value, same normalisation.
    pub patch_error_rate: f64,
}

impl BerStat {
    /// Flips summed over patterns, indexed by trial.
    pub fn flips_per_trial(&self) -> Vec<u64> {
        let mut out = vec![0; self.trials];
        for p in &self.per_pattern {
            for (o, f) in out.iter_mut().zip(&p.flips_per_trial) {
                *o += f;
            }
        }
        out
    }
}

/// Runs the in-memory filter over macros initialised with `k`-ones
/// patterns and counts unintended flips against the ideal filter.
pub fn ber_pattern_sweep(cfg: &SweepConfig) -> Result<BerStat> {
    let n = cfg.n;
    if n != 3 && n != 5 {
        return Err(Error::InvalidParams(format!("window side must be 3 or 5, got {n}")));
    }
    let cells = n * n;
    if cfg.k > cells {
        return Err(Error::InvalidCount { count: cfg.k, cells });
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidParams("at least one trial is required".into()));
    }
    if cfg.geometry.rows % n != 0 {
        return Err(Error::DimensionMismatch(format!(
            "{} macro rows are not divisible by {n}",
            cfg.geometry.rows
        )));
    }
    let patches = cfg
        .patch_count
        .unwrap_or(cfg.geometry.full_patches(n))
        .min(cfg.geometry.full_patches(n));
    let patterns = select_patterns(cells, cfg.k, cfg.patterns);
    let images: Vec<BinaryFrame> = patterns
        .iter()
        .map(|&(_, mask)| pattern_image(&cfg.geometry, n, mask, patches))
        .collect();

    // counts[trial][pattern] = (flips, patch errors)
    let counts: Vec<Vec<(u64, u64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<(u64, u64)>> {
            let variation = cfg.variation.with_seed(cfg.variation.rng_seed.wrapping_add(t as u64));
            let mut state = init_macro(cfg.geometry, &cfg.device, &variation)?;
            images
                .iter()
                .map(|img| {
                    state.set_bits(img.clone())?;
                    let r = filter_in_memory(&mut state, n, &cfg.device)?;
                    Ok((r.flips_unintended as u64, r.patch_errors as u64))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let denom = (patches * cfg.trials) as f64;
    let per_pattern: Vec<PatternStat> = patterns
        .iter()
        .enumerate()
        .map(|(pi, &(pattern_id, mask))| {
            let flips_per_trial: Vec<u64> = counts.iter().map(|c| c[pi].0).collect();
            let flips_unintended = flips_per_trial.iter().sum();
            let patch_errors = counts.iter().map(|c| c[pi].1).sum();
            PatternStat {
                pattern_id,
                mask,
                flips_unintended,
                patch_errors,
                flips_per_trial,
                ber: if denom > 0.0 { flips_unintended as f64 / denom } else { 0.0 },
            }
        })
        .collect();
    let total_denom = denom * per_pattern.len() as f64;
    let total_flips: u64 = per_pattern.iter().map(|p| p.flips_unintended).sum();
    let total_errors: u64 = per_pattern.iter().map(|p| p.patch_errors).sum();
    let ratio = |x: u64| if total_denom > 0.0 { x as f64 / total_denom } else { 0.0 };
    Ok(BerStat {
        n,
        k: cfg.k,
        patches,
        trials: cfg.trials,
        per_pattern,
        ber: ratio(total_flips),
        patch_error_rate: ratio(total_errors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_counts() {
        assert_eq!(binomial(9, 5), 126);
        assert_eq!(binomial(9, 4), 126);
        assert_eq!(binomial(25, 12), 5_200_300);
        assert_eq!(enumerate_patterns(9, 5).len(), 126);
        assert_eq!(enumerate_patterns(9, 0), vec![0]);
        assert_eq!(enumerate_patterns(9, 9), vec![0x1ff]);
        assert!(enumerate_patterns(9, 5).iter().all(|m| m.count_ones() == 5));
    }

    #[test]
    fn ranks_match_enumeration_order() {
        for (i, m) in enumerate_patterns(9, 4).into_iter().enumerate() {
            assert_eq!(pattern_rank(9, m), i);
        }
    }

    #[test]
    fn sampled_patterns_are_distinct_and_seeded() {
        let s = select_patterns(9, 5, PatternSelection::Sample { count: 10, seed: 3 });
        assert_eq!(s.len(), 10);
        assert_eq!(s, select_patterns(9, 5, PatternSelection::Sample { count: 10, seed: 3 }));
        let mut masks: Vec<_> = s.iter().map(|p| p.1).collect();
        masks.dedup();
        assert_eq!(masks.len(), 10);
        let big = select_patterns(25, 12, PatternSelection::Sample { count: 5, seed: 1 });
        assert_eq!(big.len(), 5);
        assert!(big.iter().all(|&(id, m)| m.count_ones() == 12 && (id as u64) < binomial(25, 12)));
    }

    #[test]
    fn pattern_image_fills_complete_windows() {
        let g = MacroGeometry::default();
        let img = pattern_image(&g, 3, 0b1_1111, g.full_patches(3));
        assert_eq!(img.popcount(), 8480 * 5);
        // last two columns belong to no complete window
        assert!((0..240).all(|y| !img.get(318, y) && !img.get(319, y)));
    }

    #[test]
    fn ideal_device_never_errs() {
        let cfg = SweepConfig {
            geometry: MacroGeometry::default(),
            n: 3,
            k: 5,
            device: DeviceParams::default(),
            variation: CellVariation::none(),
            trials: 1,
            patterns: PatternSelection::Sample { count: 4, seed: 0 },
            patch_count: None,
        };
        let r = ber_pattern_sweep(&cfg).unwrap();
        assert_eq!(r.patches, 8480);
        assert_eq!(r.ber, 0.0);
        assert_eq!(r.per_pattern.len(), 4);
    }

    #[test]
    fn rejects_bad_sweeps() {
        let mut cfg = SweepConfig {
            geometry: MacroGeometry::default(),
            n: 3,
            k: 10,
            device: DeviceParams::default(),
            variation: CellVariation::none(),
            trials: 1,
            patterns: PatternSelection::All,
            patch_count: Some(10),
        };
        assert!(ber_pattern_sweep(&cfg).is_err());
        cfg.k = 3;
        cfg.n = 7;
        assert!(ber_pattern_sweep(&cfg).is_err());
        cfg.n = 3;
        cfg.trials = 0;
        assert!(ber_pattern_sweep(&cfg).is_err());
    }
}
