//! Flat `key = value` run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nomf_core::frames::FrameConfig;
use nomf_core::perf_model::{EnergyConstants, WorkloadParams};
use nomf_core::pipeline::{Connectivity, ProposalConfig, TrackerConfig};
use nomf_core::sram_macro::{CellVariation, Corner, OperatingPoint, OverdriveModel};
use nomf_core::synth::SynthConfig;

/// A rejected configuration entry. The process exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: key `{}`: {}", self.key, self.reason),
            None => write!(f, "config key `{}`: {}", self.key, self.reason),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Every tunable of a run. Defaults reproduce the reference operating point
/// and the calibrated mismatch.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub n: usize,

    pub vdd: f64,
    pub temperature_c: f64,
    pub corner: Corner,
    pub delta_c: f64,
    pub model: OverdriveModel,
    pub sigma_i_over_mu: f64,
    pub sigma_vtrip: f64,

    pub workload: WorkloadParams,
    pub energy: EnergyConstants,
    pub frequency_hz: f64,
    pub macro_cols: usize,
    pub macro_rows: usize,
    pub energy_vdd: f64,

    pub tracker: TrackerConfig,
    pub proposals: ProposalConfig,
    pub frames: FrameConfig,

    pub trials: usize,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cal = CellVariation::calibrated();
        RunConfig {
            seed: 0,
            out: PathBuf::from("out"),
            n: 3,
            vdd: 1.2,
            temperature_c: 27.0,
            corner: Corner::TT,
            delta_c: 0.0,
            model: OverdriveModel::default(),
            sigma_i_over_mu: cal.sigma_i_over_mu,
            sigma_vtrip: cal.sigma_vtrip,
            workload: WorkloadParams::default(),
            energy: EnergyConstants::default(),
            frequency_hz: 70e6,
            macro_cols: 320,
            macro_rows: 240,
            energy_vdd: 0.7,
            tracker: TrackerConfig::default(),
            proposals: ProposalConfig::default(),
            frames: FrameConfig::default(),
            trials: 4,
            synth: SynthConfig::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError {
        key: key.to_string(),
        line: None,
        reason: format!("cannot parse `{value}`: {e}"),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl RunConfig {
    /// Applies one entry. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value;
        match key {
            "seed" => self.seed = parse(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "n" => {
                self.n = parse(key, v)?;
                self.workload.n = self.n;
            }
            "vdd" => self.vdd = parse(key, v)?,
            "temperature_c" => self.temperature_c = parse(key, v)?,
            "corner" => self.corner = parse(key, v)?,
            "delta_c" => self.delta_c = parse(key, v)?,
            "vt_nominal" => self.model.vt_nominal = parse(key, v)?,
            "vt_temp_coeff" => self.model.vt_temp_coeff = parse(key, v)?,
            "sigma_ref_vdd" => self.model.ref_vdd = parse(key, v)?,
            "i_s_at_1v2" => self.model.i_s_at_1v2 = parse(key, v)?,
            "trip_beta" => self.model.beta = parse(key, v)?,
            "c_bl" => self.model.c_bl = parse(key, v)?,
            "c_wl" => self.model.c_wl = parse(key, v)?,
            "r_tg" => self.model.r_tg = parse(key, v)?,
            "sigma_i_over_mu" => self.sigma_i_over_mu = parse(key, v)?,
            "sigma_vtrip" => self.sigma_vtrip = parse(key, v)?,
            "width" => self.workload.width = parse(key, v)?,
            "height" => self.workload.height = parse(key, v)?,
            "alpha" => self.workload.alpha = parse(key, v)?,
            "beta_t" => self.workload.beta_t = parse(key, v)?,
            "gamma" => self.workload.gamma = parse(key, v)?,
            "empty_frame_fraction" => self.workload.empty_frame_fraction = parse(key, v)?,
            "e_read" => self.energy.e_read = parse(key, v)?,
            "e_write" => self.energy.e_write = parse(key, v)?,
            "energy_ref_vdd" => self.energy.ref_vdd = parse(key, v)?,
            "cap_ratio" => self.energy.cap_ratio = parse(key, v)?,
            "e_imc_pixel" => self.energy.e_imc_pixel = parse(key, v)?,
            "dnn_energy" => self.energy.dnn_energy = parse(key, v)?,
            "energy_vdd" => self.energy_vdd = parse(key, v)?,
            "frequency_hz" => self.frequency_hz = parse(key, v)?,
            "macro_cols" => self.macro_cols = parse(key, v)?,
            "macro_rows" => self.macro_rows = parse(key, v)?,
            "iou_match_threshold" => self.tracker.iou_match_threshold = parse(key, v)?,
            "confirm_hits" => self.tracker.confirm_hits = parse(key, v)?,
            "kill_misses" => self.tracker.kill_misses = parse(key, v)?,
            "rescale" => {
                let l: Vec<usize> = parse_list(key, v)?;
                match l[..] {
                    [a, b] if a >= 1 && b >= 1 => self.proposals.rescale = (a, b),
                    _ => return Err(bad(key, "expected two positive integers `a,b`")),
                }
            }
            "connectivity" => {
                self.proposals.connectivity =
                    Connectivity::from_count(parse(key, v)?).ok_or_else(|| bad(key, "expected 4 or 8"))?
            }
            "min_area" => self.proposals.min_area = parse(key, v)?,
            "frame_interval_us" => self.frames.frame_interval_us = parse(key, v)?,
            "sensor_width" => self.frames.sensor_width = parse(key, v)?,
            "sensor_height" => self.frames.sensor_height = parse(key, v)?,
            "trials" => self.trials = parse(key, v)?,
            "synth_frames" => self.synth.frames = parse(key, v)?,
            "synth_recordings" => self.synth.recordings = parse(key, v)?,
            "synth_locations" => self.synth.locations = parse_list(key, v)?,
            "noise_rate" => self.synth.noise_rate = parse(key, v)?,
            "fill_density" => self.synth.fill_density = parse(key, v)?,
            "max_objects" => self.synth.max_objects = parse(key, v)?,
            "spawn_rate" => self.synth.spawn_rate = parse(key, v)?,
            _ => return Err(bad(key, "unknown key")),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.apply_str(text)?;
        Ok(cfg)
    }

    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError {
                    key: line.to_string(),
                    line: Some(i + 1),
                    reason: "expected `key = value`".into(),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            self.set(k, v).map_err(|e| ConfigError { line: Some(i + 1), ..e })?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> anyhow::Result<Result<RunConfig, ConfigError>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Ok(RunConfig::parse_str(&text))
    }

    /// Cross-field checks; reported against the first offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |ok: bool, key: &str, why: &str| if ok { Ok(()) } else { Err(bad(key, why)) };
        check(self.n % 2 == 1 && self.n >= 3, "n", "must be an odd integer >= 3")?;
        check(self.vdd > 0.0, "vdd", "must be positive")?;
        check(self.sigma_i_over_mu >= 0.0, "sigma_i_over_mu", "must be >= 0")?;
        check(self.sigma_vtrip >= 0.0, "sigma_vtrip", "must be >= 0")?;
        check(self.delta_c > -1.0, "delta_c", "must exceed -1")?;
        check(self.frequency_hz > 0.0, "frequency_hz", "must be positive")?;
        check(self.energy_vdd > 0.0, "energy_vdd", "must be positive")?;
        check(self.trials >= 1, "trials", "must be >= 1")?;
        check(self.macro_cols >= 1 && self.macro_rows >= 1, "macro_cols", "macro dimensions must be positive")?;
        self.workload.validate().map_err(|e| bad("workload", &e.to_string()))?;
        self.energy.validate().map_err(|e| bad("energy", &e.to_string()))?;
        self.tracker.validate().map_err(|e| bad("tracker", &e.to_string()))?;
        self.frames.validate().map_err(|e| bad("sensor_width", &e.to_string()))?;
        self.synth.validate().map_err(|e| bad("synth", &e.to_string()))?;
        Ok(())
    }

    pub fn reference_variation(&self) -> CellVariation {
        CellVariation {
            sigma_i_over_mu: self.sigma_i_over_mu,
            sigma_vtrip: self.sigma_vtrip,
            rng_seed: self.seed,
        }
    }

    pub fn operating_point(&self, vdd: f64) -> OperatingPoint {
        OperatingPoint {
            vdd,
            temperature_c: self.temperature_c,
            corner: self.corner,
            delta_c: self.delta_c,
        }
    }
}

fn bad(key: &str, reason: &str) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        line: None,
        reason: reason.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let cfg = RunConfig::parse_str("# run\nvdd = 0.7  # low\n\nseed=9\nrescale = 4, 3\ncorner = SS\n").unwrap();
        assert_eq!(cfg.vdd, 0.7);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.proposals.rescale, (4, 3));
        assert_eq!(cfg.corner, Corner::SS);
    }

    #[test]
    fn unknown_and_malformed_keys_are_named() {
        let e = RunConfig::parse_str("vdd = 1.0\nbogus = 3\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("bogus", Some(2)));
        let e = RunConfig::parse_str("vdd = fast\n").unwrap_err();
        assert_eq!(e.key, "vdd");
        let e = RunConfig::parse_str("just words\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = RunConfig::parse_str("rescale = 8\n").unwrap_err();
        assert_eq!(e.key, "rescale");
    }

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
        let mut c = RunConfig::default();
        c.set("n", "4").unwrap();
        assert_eq!(c.validate().unwrap_err().key, "n");
    }
}
