use anyhow::Result;
use nomf_core::perf_model::*;
use nomf_core::sram_macro::{detector_gate_counts, tg_boundary_resistance, MacroGeometry};

use crate::config::RunConfig;
use crate::io::{write_csv, write_text};

/// Clock and `ρ + λ` at which the supply-current breakdown is reported.
const CURRENT_FREQUENCY_HZ: f64 = 48e6;
const CURRENT_RHO_LAMBDA: f64 = 1.01;

struct Row {
    metric: String,
    value: f64,
    unit: &'static str,
}

fn row(metric: impl Into<String>, value: f64, unit: &'static str) -> Row {
    Row {
        metric: metric.into(),
        value,
        unit,
    }
}

pub fn run(cfg: &RunConfig) -> Result<String> {
    let w = &cfg.workload;
    let e = &cfg.energy;
    let mut rows = Vec::new();

    for m in FilterMethod::ALL {
        let c = op_counts(m, w);
        let name = m.name();
        rows.push(row(format!("{name}_reads"), c.reads as f64, "count"));
        rows.push(row(format!("{name}_writes"), c.writes as f64, "count"));
        rows.push(row(format!("{name}_ops"), c.ops as f64, "count"));
        rows.push(row(format!("{name}_sram_cells"), c.sram_cells as f64, "count"));
    }
    rows.push(row("beta_t_gamma_over_alpha", w.beta_t as f64 * w.gamma / w.alpha, "ratio"));

    let (mc, mr) = (cfg.macro_cols, cfg.macro_rows);
    let mut lat = Vec::new();
    for a in Architecture::ALL {
        let cycles = digital_latency(a, mc, mr, cfg.n)?;
        rows.push(row(format!("latency_{}", a.name()), cycles as f64, "cycles"));
        lat.push((a, cycles));
    }
    let cycles_of = |a: Architecture| lat.iter().find(|(b, _)| *b == a).map(|x| x.1 as f64).unwrap_or(f64::NAN);
    let imf = cycles_of(Architecture::Imf);
    rows.push(row("latency_ratio_mf_over_imf", cycles_of(Architecture::Mf) / imf, "ratio"));
    rows.push(row("latency_ratio_mfprrb_over_imf", cycles_of(Architecture::Mfprrb) / imf, "ratio"));
    let frame_cycles = digital_latency(Architecture::Imf, w.width, w.height, cfg.n)? as f64;
    let frame_us = frame_cycles / cfg.frequency_hz * 1e6;
    rows.push(row("imf_frame_cycles", frame_cycles, "cycles"));
    rows.push(row("imf_frame_time", frame_us, "us"));
    rows.push(row("imf_frames_per_us", 1.0 / frame_us, "1/us"));
    let geometry = MacroGeometry::new(mr, mc)?;
    rows.push(row("clear_cycles", mr.div_ceil(geometry.clear_group) as f64, "cycles"));

    let mut energies = Vec::new();
    for a in EnergyArch::ALL {
        let j = baseline_energy(a, w, e, cfg.energy_vdd)?;
        rows.push(row(format!("energy_{}", a.name()), j * 1e9, "nJ"));
        energies.push(j);
    }
    let (mf, mfrb, imc) = (energies[0], energies[1], energies[2]);
    rows.push(row("energy_ratio_mf_over_imc", mf / imc, "ratio"));
    rows.push(row("energy_ratio_mfrb_over_imc", mfrb / imc, "ratio"));

    let mut device = cfg.model.device(cfg.vdd, cfg.temperature_c, cfg.corner);
    device.delta_c = cfg.delta_c;
    let current = imc_current(cfg.n, mc, &device, CURRENT_FREQUENCY_HZ, CURRENT_RHO_LAMBDA, 0.0, 0.0)?;
    rows.push(row("i_ch", current.i_ch * 1e3, "mA"));
    rows.push(row("i_bitflip", current.i_bitflip * 1e3, "mA"));
    rows.push(row("tg_boundary_resistance", tg_boundary_resistance(&device, cfg.n), "ohm"));

    let (gops, tops_w) = throughput_efficiency(cfg.frequency_hz, cfg.n, mc, e.e_imc_pixel)?;
    rows.push(row("throughput", gops, "GOPS"));
    rows.push(row("efficiency", tops_w, "TOPS/W"));

    let sys_imc = system_energy_per_frame(w, e, imc);
    let sys_mf = system_energy_per_frame(w, e, mf);
    let sys_mfrb = system_energy_per_frame(w, e, mfrb);
    rows.push(row("system_savings_imc_nomf", sys_imc.savings * 100.0, "%"));
    rows.push(row("system_savings_mf", sys_mf.savings * 100.0, "%"));
    rows.push(row("system_savings_mfrb", sys_mfrb.savings * 100.0, "%"));

    let gates = detector_gate_counts(mr, cfg.n);
    rows.push(row("detector_nor3", gates.nor3 as f64, "count"));
    rows.push(row("detector_nand3", gates.nand3 as f64, "count"));
    rows.push(row("detector_dff", gates.dff as f64, "count"));

    let csv: Vec<String> = rows.iter().map(|r| format!("{},{},{}", r.metric, r.value, r.unit)).collect();
    write_csv(&cfg.out.join("perf.csv"), "metric,value,unit", &csv)?;

    let mut text = String::new();
    let mut line = |s: String| {
        text.push_str(&s);
        text.push('\n');
    };
    line(format!(
        "workload: {}x{} frame, n = {}, macro {}x{} at {} MHz",
        w.width,
        w.height,
        cfg.n,
        mc,
        mr,
        cfg.frequency_hz / 1e6
    ));
    line(format!("throughput: {gops:.1} GOPS"));
    line(format!("efficiency: {tops_w:.1} TOPS/W"));
    line(format!(
        "energy per frame at {} V: MF {:.2} nJ, MFRB {:.2} nJ, IMC+NOMF {:.3} nJ",
        cfg.energy_vdd,
        mf * 1e9,
        mfrb * 1e9,
        imc * 1e9
    ));
    line(format!("energy ratios: MF/IMC {:.1}x, MFRB/IMC {:.1}x", mf / imc, mfrb / imc));
    line(format!(
        "latency ({}x{}): MF/IMF {:.0}x, MFPRRB/IMF {:.0}x; frame time {:.3} us ({:.2} frames/us)",
        mc,
        mr,
        cycles_of(Architecture::Mf) / imf,
        cycles_of(Architecture::Mfprrb) / imf,
        frame_us,
        1.0 / frame_us
    ));
    line(format!(
        "precharge current at {} MHz: {:.4} mA",
        CURRENT_FREQUENCY_HZ / 1e6,
        current.i_ch * 1e3
    ));
    line(format!(
        "system savings with {:.0}% blank frames: IMC+NOMF {:.2}%, MF {:.2}%, MFRB {:.2}%",
        w.empty_frame_fraction * 100.0,
        sys_imc.savings * 100.0,
        sys_mf.savings * 100.0,
        sys_mfrb.savings * 100.0
    ));
    write_text(&cfg.out.join("perf.txt"), &text)?;
    Ok(text)
}
