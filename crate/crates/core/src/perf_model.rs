//! Analytic cost model: memory-operation counts of the competing filters,
//! cycle latencies of digital baselines, bit-line current, energy and
//! throughput figures, and system energy with blank-frame gating.

use crate::error::{Error, Result};
use crate::sram_macro::DeviceParams;

/// Image and workload statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadParams {
    pub width: usize,
    pub height: usize,
    pub n: usize,
    /// Fraction of pixels the in-memory filter flips.
    pub alpha: f64,
    /// Bits per stored timestamp.
    pub beta_t: u32,
    /// Events per frame as a fraction of the pixel count.
    pub gamma: f64,
    pub empty_frame_fraction: f64,
}

impl Default for WorkloadParams {
    fn default() -> Self {
        WorkloadParams {
            width: 240,
            height: 180,
            n: 3,
            alpha: 0.015,
            beta_t: 16,
            gamma: 0.127,
            empty_frame_fraction: 0.51,
        }
    }
}

impl WorkloadParams {
    pub fn pixels(&self) -> u64 {
        (self.width * self.height) as u64
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.alpha) && unit(self.gamma) && unit(self.empty_frame_fraction)) {
            return Err(Error::InvalidParams("alpha, gamma and empty_frame_fraction must lie in [0, 1]".into()));
        }
        if self.beta_t == 0 {
            return Err(Error::InvalidParams("beta_t must be >= 1".into()));
        }
        if self.width == 0 || self.height == 0 || self.n == 0 {
            return Err(Error::InvalidParams("image dimensions and n must be positive".into()));
        }
        Ok(())
    }
}

/// Measured memory and system energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConstants {
    /// Read energy per bit at `ref_vdd` (J).
    pub e_read: f64,
    /// Write energy per bit at `ref_vdd` (J).
    pub e_write: f64,
    pub ref_vdd: f64,
    /// Bit-line capacitance of a minimum-size cell over the enlarged cell (89/140).
    pub cap_ratio: f64,
    /// Measured in-memory filter energy per pixel (J).
    pub e_imc_pixel: f64,
    /// Object-recognition energy per processed frame (J).
    pub dnn_energy: f64,
}

impl Default for EnergyConstants {
    fn default() -> Self {
        EnergyConstants {
            e_read: 0.916e-12,
            e_write: 6e-12,
            ref_vdd: 1.0,
            cap_ratio: 89.0 / 140.0,
            e_imc_pixel: 39e-15,
            dnn_energy: 1076.6e-9,
        }
    }
}

impl EnergyConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.e_read,
            self.e_write,
            self.ref_vdd,
            self.cap_ratio,
            self.e_imc_pixel,
            self.dnn_energy,
        ];
        if all.iter().all(|&v| v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParams("energy constants must be positive".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterMethod {
    NnFilt,
    MedianFilter,
    Nomf,
    NomfImc,
}

impl FilterMethod {
    pub const ALL: [FilterMethod; 4] = [
        FilterMethod::NnFilt,
        FilterMethod::MedianFilter,
        FilterMethod::Nomf,
        FilterMethod::NomfImc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterMethod::NnFilt => "NN-filt",
            FilterMethod::MedianFilter => "MedianFilter",
            FilterMethod::Nomf => "NOMF",
            FilterMethod::NomfImc => "NOMF+IMC",
        }
    }
}

/// Per-frame memory traffic and storage of a filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterCost {
    pub reads: u64,
    pub writes: u64,
    pub ops: u64,
    pub sram_cells: u64,
}

fn ceil_mul(x: f64, m: u64) -> u64 {
    // guard against products like 0.127 * 43200 landing just above an integer
    let v = x * m as f64;
    let r = v.round();
    if (v - r).abs() < 1e-9 * v.abs().max(1.0) {
        r as u64
    } else {
        v.ceil() as u64
    }
}

/// Operation counts for one `W`×`H` frame. Fractional counts round up.
pub fn op_counts(method: FilterMethod, params: &WorkloadParams) -> FilterCost {
    let m = params.pixels();
    let n = params.n as u64;
    let n2 = n * n;
    let bt = params.beta_t as u64;
    match method {
        FilterMethod::NnFilt => FilterCost {
            reads: ceil_mul(params.gamma, bt * n2 * m),
            writes: ceil_mul(params.gamma, bt * m),
            ops: ceil_mul(params.gamma, n2 * m),
            sram_cells: bt * m,
        },
        FilterMethod::MedianFilter => FilterCost {
            reads: n2 * m,
            writes: m,
            ops: n2 * m,
            sram_cells: 2 * m,
        },
        FilterMethod::Nomf => FilterCost {
            reads: m,
            writes: m,
            ops: m,
            sram_cells: m,
        },
        FilterMethod::NomfImc => FilterCost {
            reads: m.div_ceil(n),
            writes: ceil_mul(params.alpha, m),
            ops: 0,
            sram_cells: m,
        },
    }
}

/// Digital median-filter architectures and the in-memory filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// One pixel read per cycle.
    Mf,
    /// Pipelined read of a whole row.
    Mfpr,
    /// Single-pixel read with `n − 1` row buffers.
    Mfrb,
    /// Pipelined read with row buffers.
    Mfprrb,
    /// In-memory filtering.
    Imf,
}

impl Architecture {
    pub const ALL: [Architecture; 5] = [
        Architecture::Mf,
        Architecture::Mfpr,
        Architecture::Mfrb,
        Architecture::Mfprrb,
        Architecture::Imf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Mf => "MF",
            Architecture::Mfpr => "MFPR",
            Architecture::Mfrb => "MFRB",
            Architecture::Mfprrb => "MFPRRB",
            Architecture::Imf => "IMF",
        }
    }
}

/// Clock cycles to filter one `W`×`H` frame.
pub fn digital_latency(arch: Architecture, width: usize, height: usize, n: usize) -> Result<u64> {
    if width == 0 || height == 0 || n == 0 {
        return Err(Error::InvalidParams("dimensions must be positive".into()));
    }
    let (w, h, n) = (width as u64, height as u64, n as u64);
    Ok(match arch {
        Architecture::Mf | Architecture::Mfrb => (n * n + 1) * w * h,
        Architecture::Mfpr => 2 * n * h,
        Architecture::Mfprrb => 2 * h,
        Architecture::Imf => {
            if h % n != 0 {
                return Err(Error::DimensionMismatch(format!("height {h} is not divisible by n = {n}")));
            }
            2 * h / n
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyArch {
    Mf,
    Mfrb,
    ImcNomf,
}

impl EnergyArch {
    pub const ALL: [EnergyArch; 3] = [EnergyArch::Mf, EnergyArch::Mfrb, EnergyArch::ImcNomf];

    pub fn name(self) -> &'static str {
        match self {
            EnergyArch::Mf => "MF",
            EnergyArch::Mfrb => "MFRB",
            EnergyArch::ImcNomf => "IMC+NOMF",
        }
    }
}

/// Energy per frame in joules.
///
/// Digital baselines pay `n²` reads (`n² − 2n` with row buffers) and one
/// write per pixel, scaled by `(vdd/ref_vdd)²` and by the smaller bit-line
/// capacitance of a minimum-size cell. The in-memory filter uses the
/// measured per-pixel energy.
pub fn baseline_energy(arch: EnergyArch, params: &WorkloadParams, constants: &EnergyConstants, vdd: f64) -> Result<f64> {
    if !(vdd > 0.0) {
        return Err(Error::InvalidParams("vdd must be positive".into()));
    }
    let m = params.pixels() as f64;
    let n = params.n as f64;
    let scale = (vdd / constants.ref_vdd).powi(2) * constants.cap_ratio;
    Ok(match arch {
        EnergyArch::Mf => m * (n * n * constants.e_read + constants.e_write) * scale,
        EnergyArch::Mfrb => m * ((n * n - 2.0 * n) * constants.e_read + constants.e_write) * scale,
        EnergyArch::ImcNomf => m * constants.e_imc_pixel,
    })
}

/// Supply-current components of the in-memory filter (A).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentBreakdown {
    pub i_ch: f64,
    pub i_imf: f64,
    pub i_leakage: f64,
    pub i_bitflip: f64,
    pub i_total: f64,
}

/// Bit-flip current as a fraction of the precharge current.
pub const BITFLIP_FRACTION: f64 = 0.0068;

/// Precharge current `((ρ+λ)·N_col·C_BL + n·C_WL)·VDD·f/2` plus the
/// controller, leakage and bit-flip contributions.
pub fn imc_current(
    n: usize,
    n_col: usize,
    device: &DeviceParams,
    f: f64,
    rho_lambda_mean: f64,
    i_imf: f64,
    i_leakage: f64,
) -> Result<CurrentBreakdown> {
    if !(f > 0.0) {
        return Err(Error::InvalidParams("frequency must be positive".into()));
    }
    let i_ch = (rho_lambda_mean * n_col as f64 * device.c_bl + n as f64 * device.c_wl) * device.vdd * f / 2.0;
    let i_bitflip = BITFLIP_FRACTION * i_ch;
    Ok(CurrentBreakdown {
        i_ch,
        i_imf,
        i_leakage,
        i_bitflip,
        i_total: i_ch + i_imf + i_leakage + i_bitflip,
    })
}

/// Bounds on `ρ + λ` for a window with `k` of `n²` pixels set:
/// `1 ≤ ρ + λ ≤ 1 + β·min(k, n²−k)/max(k, n²−k)`.
pub fn rho_lambda_bound(k: usize, n: usize, beta: f64) -> Result<(f64, f64)> {
    let cells = n * n;
    if k > cells {
        return Err(Error::InvalidCount { count: k, cells });
    }
    let lo = k.min(cells - k) as f64;
    let hi = k.max(cells - k) as f64;
    Ok((1.0, 1.0 + beta * lo / hi))
}

/// Peak throughput in GOPS and energy efficiency in TOPS/W, counting two
/// operations per pixel and `cols·n` pixels per cycle.
pub fn throughput_efficiency(f: f64, n: usize, cols: usize, energy_per_pixel: f64) -> Result<(f64, f64)> {
    if !(f > 0.0 && energy_per_pixel > 0.0 && n > 0 && cols > 0) {
        return Err(Error::InvalidParams("inputs must be positive".into()));
    }
    let gops = 2.0 * cols as f64 * n as f64 * f / 1e9;
    let tops_per_w = 2.0 / energy_per_pixel / 1e12;
    Ok((gops, tops_per_w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemEnergy {
    /// Mean energy per frame with denoising and blank-frame gating.
    pub average: f64,
    /// Recognition on every frame, no filter.
    pub baseline: f64,
    /// `1 − average / baseline`.
    pub savings: f64,
}

/// Every frame is denoised; only non-blank frames reach the recogniser.
pub fn system_energy_per_frame(params: &WorkloadParams, constants: &EnergyConstants, denoise_energy: f64) -> SystemEnergy {
    let baseline = constants.dnn_energy;
    let average = denoise_energy + (1.0 - params.empty_frame_fraction) * constants.dnn_energy;
    SystemEnergy {
        average,
        baseline,
        savings: 1.0 - average / baseline,
    }
}
