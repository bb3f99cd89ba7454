//! Image-level error rates of the simulated macro and the fit of the
//! reference current mismatch against a target error band.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames::BinaryFrame;
use crate::sram_macro::device::{CellVariation, Corner, MacroGeometry, OverdriveModel};
use crate::sram_macro::state::{filter_in_memory, init_macro, FilterReport};

/// Operating point of an image-level run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub vdd: f64,
    pub temperature_c: f64,
    pub corner: Corner,
    pub delta_c: f64,
}

impl OperatingPoint {
    pub fn nominal(vdd: f64) -> Self {
        OperatingPoint {
            vdd,
            temperature_c: 27.0,
            corner: Corner::TT,
            delta_c: 0.0,
        }
    }
}

/// Filters each frame on a freshly sampled macro (frame `i` uses seed
/// `reference.rng_seed + i`) and returns one report per frame, in order.
pub fn simulate_frames(
    frames: &[BinaryFrame],
    n: usize,
    model: &OverdriveModel,
    reference: &CellVariation,
    point: OperatingPoint,
) -> Result<Vec<(BinaryFrame, FilterReport)>> {
    let mut device = model.device(point.vdd, point.temperature_c, point.corner);
    device.delta_c = point.delta_c;
    let variation = model.variation(reference, &device);
    let geometry = MacroGeometry::default();
    frames
        .par_iter()
        .enumerate()
        .map(|(i, frame)| {
            let v = variation.with_seed(variation.rng_seed.wrapping_add(i as u64));
            let mut state = init_macro(geometry, &device, &v)?;
            state.load_frame(frame)?;
            let report = filter_in_memory(&mut state, n, &device)?;
            Ok((state.read_frame(), report))
        })
        .collect()
}

/// Pixel error ratio of the simulated macro against the ideal filter over
/// `frames`.
pub fn simulated_image_ber(
    frames: &[BinaryFrame],
    n: usize,
    model: &OverdriveModel,
    reference: &CellVariation,
    point: OperatingPoint,
) -> Result<f64> {
    if frames.is_empty() {
        return Err(Error::InvalidParams("no frames".into()));
    }
    let reports = simulate_frames(frames, n, model, reference, point)?;
    let flips: usize = reports.iter().map(|(_, r)| r.flips_unintended).sum();
    let pixels: usize = frames.iter().map(BinaryFrame::len).sum();
    Ok(flips as f64 / pixels as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTarget {
    /// Supply at which the band applies.
    pub vdd: f64,
    pub ber_low: f64,
    pub ber_high: f64,
    /// Search interval for the reference `σ/μ`.
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub iterations: usize,
}

impl Default for CalibrationTarget {
    fn default() -> Self {
        CalibrationTarget {
            vdd: 0.7,
            ber_low: 1e-4,
            ber_high: 1e-3,
            sigma_min: 1e-3,
            sigma_max: 1.0,
            iterations: 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub sigma_i_over_mu: f64,
    pub ber: f64,
    /// `(σ/μ, BER)` of every evaluation, in search order.
    pub trace: Vec<(f64, f64)>,
}

/// Log-space bisection of the reference `σ/μ` toward the geometric centre
/// of the target band. Image BER grows with `σ/μ`; all evaluations share the
/// same seeds, which keeps the response close to monotone.
pub fn calibrate_sigma(
    frames: &[BinaryFrame],
    n: usize,
    model: &OverdriveModel,
    reference: &CellVariation,
    target: &CalibrationTarget,
) -> Result<Calibration> {
    if !(target.ber_low > 0.0 && target.ber_low < target.ber_high) {
        return Err(Error::InvalidParams("target band must satisfy 0 < low < high".into()));
    }
    if !(target.sigma_min > 0.0 && target.sigma_min < target.sigma_max) {
        return Err(Error::InvalidParams("sigma interval must satisfy 0 < min < max".into()));
    }
    let goal = (target.ber_low * target.ber_high).sqrt().ln();
    let point = OperatingPoint::nominal(target.vdd);
    let eval = |sigma: f64| {
        let v = CellVariation {
            sigma_i_over_mu: sigma,
            ..*reference
        };
        simulated_image_ber(frames, n, model, &v, point)
    };
    let (mut lo, mut hi) = (target.sigma_min.ln(), target.sigma_max.ln());
    let mut trace = Vec::with_capacity(target.iterations);
    let mut best: Option<(f64, f64, f64)> = None;
    for _ in 0..target.iterations {
        let mid = 0.5 * (lo + hi);
        let sigma = mid.exp();
        let ber = eval(sigma)?;
        trace.push((sigma, ber));
        let dist = if ber > 0.0 { (ber.ln() - goal).abs() } else { f64::INFINITY };
        if best.map_or(true, |(_, _, d)| dist < d) {
            best = Some((sigma, ber, dist));
        }
        if ber > 0.0 && ber.ln() > goal {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (sigma_i_over_mu, ber, _) = best.expect("at least one iteration");
    Ok(Calibration {
        sigma_i_over_mu,
        ber,
        trace,
    })
}
