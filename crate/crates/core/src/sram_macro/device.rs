use crate::error::{Error, Result};

/// Physical organisation of the SRAM macro.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacroGeometry {
    pub rows: usize,
    pub cols: usize,
    /// Columns per bank; lcm(3, 5) so both window sizes tile a bank.
    pub bank_cols: usize,
    pub n_banks: usize,
    /// Word lines asserted together during a clear.
    pub clear_group: usize,
}

impl Default for MacroGeometry {
    fn default() -> Self {
        MacroGeometry::new(240, 320).expect("default geometry is valid")
    }
}

impl MacroGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParams("macro dimensions must be positive".into()));
        }
        let bank_cols = 15;
        Ok(MacroGeometry {
            rows,
            cols,
            bank_cols,
            n_banks: cols.div_ceil(bank_cols),
            clear_group: 16,
        })
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Complete `n`×`n` patches when the whole macro is tiled from `(0, 0)`.
    /// For 240×320 and n = 3 this is 80·106 = 8480.
    pub fn full_patches(&self, n: usize) -> usize {
        (self.rows / n) * (self.cols / n)
    }

    /// Transmission-gate enable pattern along the columns: within each
    /// window the first `n − 1` column junctions are shorted.
    pub fn tg_enable_pattern(&self, n: usize) -> Vec<bool> {
        (0..self.cols.saturating_sub(1)).map(|c| c % n != n - 1).collect()
    }
}

/// Process corner of the bit-cell transistors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    TT,
    SS,
    FF,
}

impl Corner {
    /// Threshold-voltage shift relative to TT.
    pub fn vt_shift(self) -> f64 {
        match self {
            Corner::TT => 0.0,
            Corner::SS => 0.05,
            Corner::FF => -0.05,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Corner::TT => "TT",
            Corner::SS => "SS",
            Corner::FF => "FF",
        }
    }
}

impl std::str::FromStr for Corner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TT" => Ok(Corner::TT),
            "SS" => Ok(Corner::SS),
            "FF" => Ok(Corner::FF),
            _ => Err(Error::InvalidParams(format!("unknown corner {s:?}"))),
        }
    }
}

/// Nominal electrical parameters of the macro at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub vdd: f64,
    pub temperature_c: f64,
    pub corner: Corner,
    /// Bit-line capacitance (F).
    pub c_bl: f64,
    /// Word-line capacitance (F).
    pub c_wl: f64,
    /// Relative BLB capacitance offset: `C_BLB = c_bl · (1 + delta_c)`.
    pub delta_c: f64,
    /// Latch trip voltage (V).
    pub v_trip_nominal: f64,
    /// Unit-cell discharge current (A).
    pub i_s_nominal: f64,
    /// Transmission-gate on resistance (Ω).
    pub r_tg: f64,
}

impl Default for DeviceParams {
    /// Nominal 1.2 V, 27 °C, TT operating point.
    fn default() -> Self {
        OverdriveModel::default().device(1.2, 27.0, Corner::TT)
    }
}

impl DeviceParams {
    /// `1 − V_trip / VDD`.
    pub fn beta(&self) -> f64 {
        1.0 - self.v_trip_nominal / self.vdd
    }

    pub fn c_blb(&self) -> f64 {
        self.c_bl * (1.0 + self.delta_c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(self.vdd > 0.0) {
            return bad("vdd must be positive");
        }
        if !(self.v_trip_nominal > 0.0 && self.v_trip_nominal < self.vdd) {
            return bad("trip voltage must lie in (0, vdd)");
        }
        if !(self.delta_c.abs() < 1.0) {
            return bad("|delta_c| must be < 1");
        }
        if !(self.c_bl > 0.0 && self.c_wl > 0.0) {
            return bad("capacitances must be positive");
        }
        if !(self.i_s_nominal > 0.0) {
            return bad("cell current must be positive");
        }
        if !(self.r_tg >= 0.0) {
            return bad("transmission-gate resistance must be >= 0");
        }
        Ok(())
    }
}

/// Device mismatch magnitudes and the seed of the sampled lottery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellVariation {
    /// Relative standard deviation of a cell's discharge current.
    pub sigma_i_over_mu: f64,
    /// Standard deviation of a cell's trip voltage (V).
    pub sigma_vtrip: f64,
    pub rng_seed: u64,
}

impl CellVariation {
    pub fn none() -> Self {
        CellVariation {
            sigma_i_over_mu: 0.0,
            sigma_vtrip: 0.0,
            rng_seed: 0,
        }
    }

    /// Reference-point mismatch fitted so that synthetic traffic frames see
    /// an image error ratio of about 3·10⁻⁴ at 0.7 V and below 10⁻⁵ at 1.2 V.
    pub fn calibrated() -> Self {
        CellVariation {
            sigma_i_over_mu: 0.2097,
            sigma_vtrip: 0.005,
            rng_seed: 0,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.sigma_i_over_mu == 0.0 && self.sigma_vtrip == 0.0
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        CellVariation { rng_seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_i_over_mu >= 0.0 && self.sigma_vtrip >= 0.0) {
            return Err(Error::InvalidParams("variation magnitudes must be >= 0".into()));
        }
        Ok(())
    }
}

/// Supply, temperature and corner dependence of the cell current and its
/// mismatch.
///
/// The discharge current follows a square law in the overdrive
/// `VDD − V_T`, with `V_T` falling 1 mV/°C and shifted ±50 mV at the slow and
/// fast corners. Relative current mismatch scales as `1 / overdrive`,
/// normalised so that `CellVariation::sigma_i_over_mu` is the value at the
/// reference point (`ref_vdd`, `ref_temp_c`, TT). Trip-voltage mismatch is
/// held constant in volts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverdriveModel {
    /// Threshold voltage at `ref_temp_c`, TT.
    pub vt_nominal: f64,
    /// dV_T/dT (V/°C).
    pub vt_temp_coeff: f64,
    pub ref_temp_c: f64,
    /// Supply at which `sigma_i_over_mu` is specified.
    pub ref_vdd: f64,
    /// Cell current at 1.2 V, `ref_temp_c`, TT.
    pub i_s_at_1v2: f64,
    /// `1 − V_trip/VDD`.
    pub beta: f64,
    pub c_bl: f64,
    pub c_wl: f64,
    pub r_tg: f64,
}

impl Default for OverdriveModel {
    fn default() -> Self {
        OverdriveModel {
            vt_nominal: 0.35,
            vt_temp_coeff: -1e-3,
            ref_temp_c: 27.0,
            ref_vdd: 0.7,
            i_s_at_1v2: 30e-6,
            beta: 0.7,
            c_bl: 140e-15,
            c_wl: 330e-15,
            r_tg: 500.0,
        }
    }
}

impl OverdriveModel {
    pub fn vt(&self, temperature_c: f64, corner: Corner) -> f64 {
        self.vt_nominal + self.vt_temp_coeff * (temperature_c - self.ref_temp_c) + corner.vt_shift()
    }

    /// Gate overdrive, floored at 1 mV so the model stays finite.
    pub fn overdrive(&self, vdd: f64, temperature_c: f64, corner: Corner) -> f64 {
        (vdd - self.vt(temperature_c, corner)).max(1e-3)
    }

    pub fn cell_current(&self, vdd: f64, temperature_c: f64, corner: Corner) -> f64 {
        let ov = self.overdrive(vdd, temperature_c, corner);
        let ov_ref = self.overdrive(1.2, self.ref_temp_c, Corner::TT);
        self.i_s_at_1v2 * (ov / ov_ref).powi(2)
    }

    /// Multiplier applied to the reference `sigma_i_over_mu`.
    pub fn sigma_scale(&self, vdd: f64, temperature_c: f64, corner: Corner) -> f64 {
        self.overdrive(self.ref_vdd, self.ref_temp_c, Corner::TT) / self.overdrive(vdd, temperature_c, corner)
    }

    pub fn device(&self, vdd: f64, temperature_c: f64, corner: Corner) -> DeviceParams {
        DeviceParams {
            vdd,
            temperature_c,
            corner,
            c_bl: self.c_bl,
            c_wl: self.c_wl,
            delta_c: 0.0,
            v_trip_nominal: (1.0 - self.beta) * vdd,
            i_s_nominal: self.cell_current(vdd, temperature_c, corner),
            r_tg: self.r_tg,
        }
    }

    /// Variation at the operating point of `device`, given its reference value.
    pub fn variation(&self, reference: &CellVariation, device: &DeviceParams) -> CellVariation {
        CellVariation {
            sigma_i_over_mu: reference.sigma_i_over_mu
                * self.sigma_scale(device.vdd, device.temperature_c, device.corner),
            ..*reference
        }
    }
}

/// Boundary value of `R_tg` for the transmission-gate criterion,
/// `VDD / (10 · n · i_s)`.
pub fn tg_boundary_resistance(device: &DeviceParams, n: usize) -> f64 {
    TG_MARGIN * device.vdd / (n as f64 * device.i_s_nominal)
}

const TG_MARGIN: f64 = 0.1;

/// The transmission-gate RC must be much smaller than the bit-line
/// discharge time `C_BL · VDD / (n · i_s)`; "much smaller" means at most a
/// tenth of it.
pub fn check_tg_criterion(device: &DeviceParams, n: usize) -> bool {
    device.r_tg <= tg_boundary_resistance(device, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry() {
        let g = MacroGeometry::default();
        assert_eq!((g.rows, g.cols, g.bank_cols, g.n_banks, g.clear_group), (240, 320, 15, 22, 16));
        assert_eq!(g.full_patches(3), 8480);
        assert_eq!(g.full_patches(5), 48 * 64);
        assert!(MacroGeometry::new(0, 3).is_err());
    }

    #[test]
    fn tg_patterns() {
        let g = MacroGeometry::new(3, 10).unwrap();
        let bits: String = g.tg_enable_pattern(3).iter().map(|&b| if b { '1' } else { '0' }).collect();
        assert_eq!(bits, "110110110");
        let g = MacroGeometry::new(3, 16).unwrap();
        let bits: String = g.tg_enable_pattern(5).iter().map(|&b| if b { '1' } else { '0' }).collect();
        assert_eq!(bits, "111101111011110");
    }

    #[test]
    fn beta_by_construction() {
        let d = DeviceParams::default();
        assert!((d.beta() - 0.7).abs() < 1e-12);
        assert!((d.c_bl - 140e-15).abs() < 1e-27);
        d.validate().unwrap();
    }

    #[test]
    fn invalid_device_rejected() {
        let mut d = DeviceParams::default();
        d.v_trip_nominal = d.vdd;
        assert!(d.validate().is_err());
        let mut d = DeviceParams::default();
        d.delta_c = 1.0;
        assert!(d.validate().is_err());
        let v = CellVariation {
            sigma_i_over_mu: -0.1,
            ..CellVariation::none()
        };
        assert!(v.validate().is_err());
    }

    #[test]
    fn overdrive_trends() {
        let m = OverdriveModel::default();
        assert!((m.sigma_scale(0.7, 27.0, Corner::TT) - 1.0).abs() < 1e-12);
        assert!(m.sigma_scale(1.2, 27.0, Corner::TT) < m.sigma_scale(0.8, 27.0, Corner::TT));
        // hotter -> lower V_T -> less mismatch
        assert!(m.sigma_scale(0.7, 85.0, Corner::TT) < m.sigma_scale(0.7, -20.0, Corner::TT));
        assert!(m.sigma_scale(0.7, 27.0, Corner::SS) > 1.0);
        assert!(m.sigma_scale(0.7, 27.0, Corner::FF) < 1.0);
        assert!((m.cell_current(1.2, 27.0, Corner::TT) - 30e-6).abs() < 1e-15);
        assert!(m.cell_current(0.7, 27.0, Corner::TT) < 30e-6);
    }

    #[test]
    fn tg_criterion() {
        let mut d = DeviceParams::default();
        d.r_tg = 0.0;
        assert!(check_tg_criterion(&d, 3));
        // equality of the two sides is not "much less than"
        d.r_tg = d.c_bl * d.vdd / (3.0 * d.i_s_nominal) / d.c_bl;
        assert!(!check_tg_criterion(&d, 3));
        let b = tg_boundary_resistance(&d, 3);
        let expected = d.vdd / (10.0 * 3.0 * d.i_s_nominal);
        assert!((b - expected).abs() / expected < 1e-12);
        d.r_tg = b;
        assert!(check_tg_criterion(&d, 3));
        assert!(check_tg_criterion(&DeviceParams::default(), 3));
    }

    #[test]
    fn corner_parse() {
        assert_eq!("ss".parse::<Corner>().unwrap(), Corner::SS);
        assert!("XX".parse::<Corner>().is_err());
    }
}
