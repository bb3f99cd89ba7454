//! Behavioural model of the 6T-SRAM macro that filters in place by
//! read disturb: clear, single-bit write, the n×n majority race, the
//! valid-frame detector and the Monte-Carlo characterisation harness.

pub mod calibration;
pub mod characterize;
mod detector;
mod device;
mod state;

pub use calibration::{calibrate_sigma, simulate_frames, simulated_image_ber, Calibration, CalibrationTarget, OperatingPoint};
pub use characterize::{ber_pattern_sweep, BerStat, PatternSelection, PatternStat, SweepConfig};
pub use detector::{detector_gate_counts, valid_frame_detect, GateCounts, ValidFrame};
pub use device::{
    check_tg_criterion, tg_boundary_resistance, CellVariation, Corner, DeviceParams, MacroGeometry, OverdriveModel,
};
pub use state::{filter_in_memory, init_macro, patch_rho_lambda, resolve_patch, FilterReport, MacroState, PatchOutcome};
