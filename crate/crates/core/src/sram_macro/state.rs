use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::filters::{nomf, KernelSpec};
use crate::frames::BinaryFrame;
use crate::sram_macro::device::{CellVariation, DeviceParams, MacroGeometry};
use crate::sram_macro::detector::{valid_frame_detect, ValidFrame};

/// Samples beyond this many standard deviations are redrawn.
const TRUNCATE_SIGMAS: f64 = 4.0;

/// Simulated macro contents plus the per-cell device lottery.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroState {
    geometry: MacroGeometry,
    bits: BinaryFrame,
    cell_current: Vec<f64>,
    cell_vtrip: Vec<f64>,
    /// Region written by the last [`load_frame`](MacroState::load_frame),
    /// `(width, height)`; the filter only runs over it.
    active: (usize, usize),
    pub cycle_count: u64,
}

fn truncated_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, accept: impl Fn(f64) -> bool) -> f64 {
    if sd == 0.0 {
        return mean;
    }
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() > TRUNCATE_SIGMAS {
            continue;
        }
        let v = mean + sd * z;
        if accept(v) {
            return v;
        }
    }
}

/// Creates a cleared macro and samples every cell's discharge current and
/// trip voltage. Identical seeds give identical states.
pub fn init_macro(geometry: MacroGeometry, device: &DeviceParams, variation: &CellVariation) -> Result<MacroState> {
    device.validate()?;
    variation.validate()?;
    let mut state = MacroState {
        geometry,
        bits: BinaryFrame::new(geometry.cols, geometry.rows),
        cell_current: Vec::new(),
        cell_vtrip: Vec::new(),
        active: (geometry.cols, geometry.rows),
        cycle_count: 0,
    };
    state.resample(device, variation)?;
    Ok(state)
}

impl MacroState {
    /// Draws a fresh device lottery, keeping the stored bits.
    pub fn resample(&mut self, device: &DeviceParams, variation: &CellVariation) -> Result<()> {
        device.validate()?;
        variation.validate()?;
        let cells = self.geometry.cells();
        let i_mean = device.i_s_nominal;
        let i_sd = variation.sigma_i_over_mu * i_mean;
        let v_mean = device.v_trip_nominal;
        let v_sd = variation.sigma_vtrip;
        let vdd = device.vdd;
        self.cell_current.clear();
        self.cell_vtrip.clear();
        if variation.is_ideal() {
            self.cell_current.resize(cells, i_mean);
            self.cell_vtrip.resize(cells, v_mean);
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(variation.rng_seed);
        self.cell_current.reserve(cells);
        self.cell_vtrip.reserve(cells);
        for _ in 0..cells {
            self.cell_current.push(truncated_normal(&mut rng, i_mean, i_sd, |v| v > 0.0));
            self.cell_vtrip
                .push(truncated_normal(&mut rng, v_mean, v_sd, |v| v > 0.0 && v < vdd));
        }
        Ok(())
    }

    pub fn geometry(&self) -> &MacroGeometry {
        &self.geometry
    }

    pub fn bits(&self) -> &BinaryFrame {
        &self.bits
    }

    pub fn active_region(&self) -> (usize, usize) {
        self.active
    }

    pub fn cell_current(&self, row: usize, col: usize) -> f64 {
        self.cell_current[row * self.geometry.cols + col]
    }

    pub fn cell_vtrip(&self, row: usize, col: usize) -> f64 {
        self.cell_vtrip[row * self.geometry.cols + col]
    }

    pub fn cell_currents(&self) -> &[f64] {
        &self.cell_current
    }

    /// Clears the macro, `clear_group` word lines per cycle.
    pub fn clear_memory(&mut self) -> u64 {
        self.bits = BinaryFrame::new(self.geometry.cols, self.geometry.rows);
        let cycles = self.geometry.rows.div_ceil(self.geometry.clear_group) as u64;
        self.cycle_count += cycles;
        cycles
    }

    /// Single-bit writes of `1`, one cycle per listed `(row, col)`.
    /// Nothing is written if any coordinate is out of range.
    pub fn write_events(&mut self, pixels: &[(usize, usize)]) -> Result<u64> {
        let (rows, cols) = (self.geometry.rows, self.geometry.cols);
        if let Some(&(row, col)) = pixels.iter().find(|&&(r, c)| r >= rows || c >= cols) {
            return Err(Error::OutOfBounds { row, col, rows, cols });
        }
        for &(row, col) in pixels {
            self.bits.set(col, row, true);
        }
        let cycles = pixels.len() as u64;
        self.cycle_count += cycles;
        Ok(cycles)
    }

    /// Clears the macro and writes the set pixels of `frame` at the top-left
    /// corner. Returns the cycles spent.
    pub fn load_frame(&mut self, frame: &BinaryFrame) -> Result<u64> {
        let (w, h) = frame.dims();
        if w > self.geometry.cols || h > self.geometry.rows || w == 0 || h == 0 {
            return Err(Error::DimensionMismatch(format!(
                "frame {w}x{h} does not fit the {}x{} macro",
                self.geometry.cols, self.geometry.rows
            )));
        }
        let pixels: Vec<(usize, usize)> = frame.ones().map(|(x, y)| (y, x)).collect();
        let mut cycles = self.clear_memory();
        cycles += self.write_events(&pixels)?;
        self.active = (w, h);
        Ok(cycles)
    }

    /// Overwrites the stored bits without cycle accounting; used to
    /// initialise characterisation patterns.
    pub fn set_bits(&mut self, bits: BinaryFrame) -> Result<()> {
        if bits.dims() != (self.geometry.cols, self.geometry.rows) {
            return Err(Error::DimensionMismatch("bit matrix must match the macro".into()));
        }
        self.bits = bits;
        self.active = (self.geometry.cols, self.geometry.rows);
        Ok(())
    }

    /// Contents of the active region.
    pub fn read_frame(&self) -> BinaryFrame {
        let (w, h) = self.active;
        self.bits.crop(0, 0, w, h)
    }
}

/// Outcome of one read-disturb majority race.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchOutcome {
    pub bit: bool,
    /// Trip-time difference BL − BLB in seconds; `±∞` for uniform patches.
    pub delta_t: f64,
}

/// Resolves one patch of shorted cells.
///
/// Cells storing 0 discharge BL and cells storing 1 discharge BLB. Each
/// line's trip voltage is the mean sampled trip point of the cells that the
/// line flips when it wins (the 1-cells for BL, the 0-cells for BLB). With
/// `n` shorted columns,
///
/// `Δt = n · (C_BL · V_BL,trip / I_BL − C_BLB · V_BLB,trip / I_BLB)`
///
/// and the patch latches 1 when `Δt ≥ 0`, i.e. when BLB reaches its trip
/// point first. The tie only matters for even cell counts in edge tiles,
/// where it reproduces the `count ≥ ⌈m/2⌉` rule.
pub fn resolve_patch(n: usize, bits: &[bool], currents: &[f64], vtrips: &[f64], device: &DeviceParams) -> PatchOutcome {
    debug_assert!(bits.len() == currents.len() && bits.len() == vtrips.len());
    let mut i_bl = 0.0;
    let mut i_blb = 0.0;
    let mut v_ones = 0.0;
    let mut v_zeros = 0.0;
    let mut ones = 0usize;
    for ((&b, &i), &v) in bits.iter().zip(currents).zip(vtrips) {
        if b {
            i_blb += i;
            v_ones += v;
            ones += 1;
        } else {
            i_bl += i;
            v_zeros += v;
        }
    }
    let zeros = bits.len() - ones;
    if ones == 0 {
        return PatchOutcome {
            bit: false,
            delta_t: f64::NEG_INFINITY,
        };
    }
    if zeros == 0 {
        return PatchOutcome {
            bit: true,
            delta_t: f64::INFINITY,
        };
    }
    let v_bl_trip = v_ones / ones as f64;
    let v_blb_trip = v_zeros / zeros as f64;
    let delta_t = n as f64 * (device.c_bl * v_bl_trip / i_bl - device.c_blb() * v_blb_trip / i_blb);
    PatchOutcome {
        bit: delta_t >= 0.0,
        delta_t,
    }
}

/// Fractions of VDD discharged on BL and BLB for a resolved patch with
/// `ones` of `cells` set. The winning line discharges fully; the losing
/// line is bounded by `β · min(k, m−k) / max(k, m−k)`.
pub fn patch_rho_lambda(ones: usize, cells: usize, bit: bool, beta: f64) -> (f64, f64) {
    let zeros = cells - ones;
    let lo = ones.min(zeros) as f64;
    let hi = ones.max(zeros) as f64;
    let loser = if hi == 0.0 { 0.0 } else { beta * lo / hi };
    if bit {
        (loser, 1.0)
    } else {
        (1.0, loser)
    }
}

/// Result of one in-memory filter pass.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    /// Bits the ideal filter changes.
    pub flips_intended: usize,
    /// Bits that differ from the ideal filter's output.
    pub flips_unintended: usize,
    /// Patches whose latched value differs from the ideal majority.
    pub patch_errors: usize,
    pub patches: usize,
    pub cycles: u64,
    /// Mean `(ρ, λ)` over the patches of each row group.
    pub rho_lambda: Vec<(f64, f64)>,
    /// Per row group: some bit line stayed high, i.e. some patch latched 1.
    pub group_any_set: Vec<bool>,
    pub valid_frame: ValidFrame,
}

impl FilterReport {
    pub fn mean_rho_plus_lambda(&self) -> f64 {
        if self.rho_lambda.is_empty() {
            return 0.0;
        }
        self.rho_lambda.iter().map(|(r, l)| r + l).sum::<f64>() / self.rho_lambda.len() as f64
    }
}

/// In-place NOMF over the active region via read-disturb races.
///
/// Each group of `n` rows takes two cycles (precharge, then word-line
/// assertion); columns are split into `n`-wide windows, with a narrower
/// last window when the active width is not a multiple of `n`.
pub fn filter_in_memory(state: &mut MacroState, n: usize, device: &DeviceParams) -> Result<FilterReport> {
    device.validate()?;
    let spec = KernelSpec::new(n)?;
    let (w, h) = state.active;
    if h % n != 0 {
        return Err(Error::DimensionMismatch(format!("{h} rows are not divisible by n = {n}")));
    }
    let before = state.read_frame();
    let ideal = nomf(&before, spec);
    let cols = state.geometry.cols;
    let beta = device.beta();

    let mut rho_lambda = Vec::with_capacity(h / n);
    let mut group_any_set = Vec::with_capacity(h / n);
    let mut patches = 0;
    let mut patch_errors = 0;
    let mut cycles = 0;
    let mut bits = Vec::with_capacity(n * n);
    let mut currents = Vec::with_capacity(n * n);
    let mut vtrips = Vec::with_capacity(n * n);

    for y0 in (0..h).step_by(n) {
        let mut rho_sum = 0.0;
        let mut lambda_sum = 0.0;
        let mut tiles = 0;
        let mut any_set = false;
        for x0 in (0..w).step_by(n) {
            let tw = n.min(w - x0);
            bits.clear();
            currents.clear();
            vtrips.clear();
            for y in y0..y0 + n {
                for x in x0..x0 + tw {
                    bits.push(state.bits.get(x, y));
                    currents.push(state.cell_current[y * cols + x]);
                    vtrips.push(state.cell_vtrip[y * cols + x]);
                }
            }
            let ones = bits.iter().filter(|&&b| b).count();
            let outcome = resolve_patch(tw, &bits, &currents, &vtrips, device);
            if outcome.bit != ideal.get(x0, y0) {
                patch_errors += 1;
            }
            for y in y0..y0 + n {
                state.bits.fill_row_span(y, x0, tw, outcome.bit);
            }
            let (rho, lambda) = patch_rho_lambda(ones, bits.len(), outcome.bit, beta);
            rho_sum += rho;
            lambda_sum += lambda;
            any_set |= outcome.bit;
            tiles += 1;
        }
        patches += tiles;
        let t = tiles.max(1) as f64;
        rho_lambda.push((rho_sum / t, lambda_sum / t));
        group_any_set.push(any_set);
        cycles += 2;
    }
    state.cycle_count += cycles;

    let after = state.read_frame();
    let flips_intended = before.hamming(&ideal).expect("same dims");
    let flips_unintended = after.hamming(&ideal).expect("same dims");
    let valid_frame = valid_frame_detect(&group_any_set, w, n);
    Ok(FilterReport {
        flips_intended,
        flips_unintended,
        patch_errors,
        patches,
        cycles,
        rho_lambda,
        group_any_set,
        valid_frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sram_macro::device::OverdriveModel;

    fn ideal_state() -> MacroState {
        init_macro(MacroGeometry::default(), &DeviceParams::default(), &CellVariation::none()).unwrap()
    }

    #[test]
    fn zero_sigma_gives_nominal_currents() {
        let d = DeviceParams::default();
        let s = ideal_state();
        assert!(s.cell_currents().iter().all(|&i| i == d.i_s_nominal));
        assert_eq!(s.cycle_count, 0);
        assert!(s.bits().is_blank());
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let d = DeviceParams::default();
        let v = CellVariation {
            sigma_i_over_mu: 0.1,
            sigma_vtrip: 0.02,
            rng_seed: 42,
        };
        let a = init_macro(MacroGeometry::default(), &d, &v).unwrap();
        let b = init_macro(MacroGeometry::default(), &d, &v).unwrap();
        assert_eq!(a, b);
        let c = init_macro(MacroGeometry::default(), &d, &v.with_seed(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampled_mean_and_truncation() {
        let d = DeviceParams::default();
        let v = CellVariation {
            sigma_i_over_mu: 0.05,
            sigma_vtrip: 0.01,
            rng_seed: 7,
        };
        let s = init_macro(MacroGeometry::default(), &d, &v).unwrap();
        let mean = s.cell_currents().iter().sum::<f64>() / 76800.0;
        assert!((mean / d.i_s_nominal - 1.0).abs() < 0.01);
        let bound = 4.0 * 0.05 * d.i_s_nominal;
        assert!(s.cell_currents().iter().all(|&i| i > 0.0 && (i - d.i_s_nominal).abs() <= bound));
    }

    #[test]
    fn clear_cycles() {
        let mut s = ideal_state();
        assert_eq!(s.clear_memory(), 15);
        let g = MacroGeometry::new(180, 240).unwrap();
        let mut s = init_macro(g, &DeviceParams::default(), &CellVariation::none()).unwrap();
        s.write_events(&[(3, 3)]).unwrap();
        assert_eq!(s.clear_memory(), 12);
        assert!(s.read_frame().is_blank());
    }

    #[test]
    fn write_events_cases() {
        let mut s = ideal_state();
        assert_eq!(s.write_events(&[]).unwrap(), 0);
        assert!(s.bits().is_blank());
        assert_eq!(s.write_events(&[(0, 0), (239, 319)]).unwrap(), 2);
        assert!(s.bits().get(0, 0) && s.bits().get(319, 239));
        assert_eq!(s.write_events(&[(0, 0), (0, 0)]).unwrap(), 2);
        assert_eq!(s.bits().popcount(), 2);
        let before = s.clone();
        assert!(matches!(
            s.write_events(&[(1, 1), (240, 0)]),
            Err(Error::OutOfBounds { row: 240, .. })
        ));
        assert_eq!(s, before);
    }

    #[test]
    fn uniform_patches_use_sentinels() {
        let d = DeviceParams::default();
        let z = resolve_patch(3, &[false; 9], &[1e-6; 9], &[0.3; 9], &d);
        assert!(!z.bit && z.delta_t == f64::NEG_INFINITY);
        let o = resolve_patch(3, &[true; 9], &[1e-6; 9], &[0.3; 9], &d);
        assert!(o.bit && o.delta_t == f64::INFINITY);
    }

    #[test]
    fn five_ones_win_without_variation() {
        let d = OverdriveModel::default().device(0.7, 27.0, crate::sram_macro::Corner::TT);
        let bits = [true, true, true, true, true, false, false, false, false];
        let out = resolve_patch(3, &bits, &[d.i_s_nominal; 9], &[d.v_trip_nominal; 9], &d);
        assert!(out.bit && out.delta_t > 0.0);
    }

    #[test]
    fn capacitance_imbalance_shifts_delta_t() {
        let mut d = DeviceParams::default();
        let bits = [true, true, true, true, true, false, false, false, false];
        let i = [d.i_s_nominal; 9];
        let v = [d.v_trip_nominal; 9];
        let base = resolve_patch(3, &bits, &i, &v, &d).delta_t;
        d.delta_c = 0.1;
        let heavier = resolve_patch(3, &bits, &i, &v, &d).delta_t;
        d.delta_c = -0.1;
        let lighter = resolve_patch(3, &bits, &i, &v, &d).delta_t;
        assert!(heavier < base && base < lighter);
        // a heavy enough BLB reverses the 5-vs-4 decision
        d.delta_c = 0.3;
        assert!(!resolve_patch(3, &bits, &i, &v, &d).bit);
    }

    #[test]
    fn rho_lambda_bookkeeping() {
        assert_eq!(patch_rho_lambda(0, 9, false, 0.7), (1.0, 0.0));
        assert_eq!(patch_rho_lambda(9, 9, true, 0.7), (0.0, 1.0));
        let (r, l) = patch_rho_lambda(4, 9, false, 0.7);
        assert_eq!(r, 1.0);
        assert!((l - 0.7 * 4.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn filter_cycle_counts() {
        let mut s = ideal_state();
        let r = filter_in_memory(&mut s, 3, &DeviceParams::default()).unwrap();
        assert_eq!(r.cycles, 160);
        let r = filter_in_memory(&mut s, 5, &DeviceParams::default()).unwrap();
        assert_eq!(r.cycles, 96);
        s.load_frame(&BinaryFrame::new(240, 180)).unwrap();
        let r = filter_in_memory(&mut s, 3, &DeviceParams::default()).unwrap();
        assert_eq!(r.cycles, 120);
        assert_eq!(r.patches, 80 * 60);
        let t = r.cycles as f64 / 70e6;
        assert!((t - 1.714e-6).abs() < 1e-9);
    }

    #[test]
    fn filter_rejects_indivisible_rows() {
        let mut s = ideal_state();
        s.load_frame(&BinaryFrame::new(30, 10)).unwrap();
        assert!(matches!(
            filter_in_memory(&mut s, 3, &DeviceParams::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn zero_variation_matches_nomf_with_edge_tiles() {
        let f = BinaryFrame::from_fn(32, 30, |x, y| (x * 31 + y * 17 + x * y) % 5 < 2);
        for n in [3, 5] {
            let mut s = ideal_state();
            s.load_frame(&f).unwrap();
            let r = filter_in_memory(&mut s, n, &DeviceParams::default()).unwrap();
            assert_eq!(s.read_frame(), nomf(&f, KernelSpec::new(n).unwrap()));
            assert_eq!(r.flips_unintended, 0);
            assert_eq!(r.patch_errors, 0);
        }
    }

    #[test]
    fn blank_frame_is_not_valid() {
        let mut s = ideal_state();
        s.load_frame(&BinaryFrame::new(240, 180)).unwrap();
        let r = filter_in_memory(&mut s, 3, &DeviceParams::default()).unwrap();
        assert!(!r.valid_frame.bit);
        assert_eq!(r.flips_intended, 0);
        assert!((r.mean_rho_plus_lambda() - 1.0).abs() < 1e-12);
        let mut f = BinaryFrame::new(240, 180);
        for y in 30..60 {
            f.fill_row_span(y, 90, 39, true);
        }
        f.set(5, 5, true);
        s.load_frame(&f).unwrap();
        let r = filter_in_memory(&mut s, 3, &DeviceParams::default()).unwrap();
        assert!(r.valid_frame.bit);
        assert_eq!(r.flips_intended, 1);
    }
}
