//! Near-memory valid-frame detection: bit lines that stay high during a
//! row-group evaluation mean some window latched 1, and an alternating
//! NOR3/NAND3 tree ORs them into a single flag held by a DFF.

/// Gate inventory of the detector tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub nor3: usize,
    pub nand3: usize,
    pub dff: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValidFrame {
    pub bit: bool,
    pub gates: GateCounts,
}

/// `Σ ⌈w / (first · 9^i)⌉` for i = 0, 1, …, stopping after the first term
/// that equals 1.
fn tree_series(w: usize, first: usize) -> usize {
    if w == 0 {
        return 0;
    }
    let mut total = 0;
    let mut denom = first;
    loop {
        let term = w.div_ceil(denom);
        total += term;
        if term <= 1 {
            return total;
        }
        denom *= 9;
    }
}

/// Gate counts for sensing a `w`-pixel-wide image with window side `n`:
/// `⌈w/3n⌉ + ⌈w/27n⌉ + …` NOR3, `⌈w/9n⌉ + ⌈w/81n⌉ + …` NAND3 and one DFF.
pub fn detector_gate_counts(w: usize, n: usize) -> GateCounts {
    GateCounts {
        nor3: tree_series(w, 3 * n),
        nand3: tree_series(w, 9 * n),
        dff: 1,
    }
}

/// The DFF is reset at the start of the pass and set by any row group in
/// which a window latched 1.
pub fn valid_frame_detect(group_any_set: &[bool], w: usize, n: usize) -> ValidFrame {
    ValidFrame {
        bit: group_any_set.iter().any(|&b| b),
        gates: detector_gate_counts(w, n),
    }
}
