//! Error-free reference filters on binary frames: the sliding (overlap)
//! median filter and the non-overlap median filter (NOMF).

use crate::error::{Error, Result};
use crate::frames::BinaryFrame;

/// Square window of odd side `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelSpec {
    n: usize,
}

impl KernelSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParams(format!("window side must be odd and >= 3, got {n}")));
        }
        Ok(KernelSpec { n })
    }

    pub fn n3() -> Self {
        KernelSpec { n: 3 }
    }

    pub fn n5() -> Self {
        KernelSpec { n: 5 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    /// Majority threshold `⌈n²/2⌉`.
    pub fn threshold(&self) -> usize {
        self.cells().div_ceil(2)
    }
}

/// How the window advances across the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrideMode {
    /// Stride 1; each output pixel is the majority of the window centred on it.
    Overlap,
    /// Stride `n`; each window's majority is written to all of its pixels.
    NonOverlap,
}

impl StrideMode {
    pub fn stride(self, spec: KernelSpec) -> usize {
        match self {
            StrideMode::Overlap => 1,
            StrideMode::NonOverlap => spec.n(),
        }
    }

    pub fn apply(self, frame: &BinaryFrame, spec: KernelSpec) -> BinaryFrame {
        match self {
            StrideMode::Overlap => median_filter_overlap(frame, spec),
            StrideMode::NonOverlap => nomf(frame, spec),
        }
    }
}

/// Binary median of a window holding `count` ones among `cells` pixels:
/// true iff `count >= ⌈cells/2⌉`.
#[inline]
pub fn majority(count: usize, cells: usize) -> bool {
    2 * count >= cells
}

/// Binary median rule for a full `n`×`n` window.
pub fn patch_majority(count: usize, n: usize) -> Result<bool> {
    let cells = n * n;
    if count > cells {
        return Err(Error::InvalidCount { count, cells });
    }
    Ok(majority(count, cells))
}

/// Sliding-window median with zero padding outside the frame.
pub fn median_filter_overlap(frame: &BinaryFrame, spec: KernelSpec) -> BinaryFrame {
    let (w, h) = frame.dims();
    let r = spec.n() / 2;
    let threshold = spec.threshold() as u32;
    let mut out = BinaryFrame::new(w, h);
    if w == 0 || h == 0 {
        return out;
    }
    // column sums over rows [y - r, y + r], updated incrementally per row
    let mut col = vec![0u32; w];
    for y in 0..=r.min(h - 1) {
        add_row(frame, y, &mut col, 1);
    }
    for y in 0..h {
        if y > 0 {
            if y + r < h {
                add_row(frame, y + r, &mut col, 1);
            }
            if y > r {
                add_row(frame, y - r - 1, &mut col, -1);
            }
        }
        let mut acc: u32 = col[..=r.min(w - 1)].iter().sum();
        for x in 0..w {
            if x > 0 {
                if x + r < w {
                    acc += col[x + r];
                }
                if x > r {
                    acc -= col[x - r - 1];
                }
            }
            if acc >= threshold {
                out.set(x, y, true);
            }
        }
    }
    out
}

fn add_row(frame: &BinaryFrame, y: usize, col: &mut [u32], sign: i32) {
    for (x, _) in frame.ones_in_row(y) {
        if sign > 0 {
            col[x] += 1;
        } else {
            col[x] -= 1;
        }
    }
}

/// Non-overlap median filter.
///
/// Tiles start at `(0, 0)`. Edge tiles narrower or shorter than `n` hold
/// `m < n²` pixels and use the threshold `⌈m/2⌉`.
pub fn nomf(frame: &BinaryFrame, spec: KernelSpec) -> BinaryFrame {
    let (w, h) = frame.dims();
    let n = spec.n();
    let mut out = BinaryFrame::new(w, h);
    for y0 in (0..h).step_by(n) {
        let th = n.min(h - y0);
        for x0 in (0..w).step_by(n) {
            let tw = n.min(w - x0);
            let count: u32 = (y0..y0 + th).map(|y| frame.count_row_span(y, x0, tw)).sum();
            if majority(count as usize, tw * th) {
                for y in y0..y0 + th {
                    out.fill_row_span(y, x0, tw, true);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_overlap(f: &BinaryFrame, n: usize) -> BinaryFrame {
        let r = (n / 2) as isize;
        BinaryFrame::from_fn(f.width(), f.height(), |x, y| {
            let mut k = 0;
            for dy in -r..=r {
                for dx in -r..=r {
                    k += f.get_or_zero(x as isize + dx, y as isize + dy) as usize;
                }
            }
            k >= (n * n).div_ceil(2)
        })
    }

    #[test]
    fn thresholds() {
        assert_eq!(KernelSpec::n3().threshold(), 5);
        assert_eq!(KernelSpec::n5().threshold(), 13);
        assert_eq!(KernelSpec::new(7).unwrap().threshold(), 25);
        assert!(KernelSpec::new(4).is_err());
        assert!(KernelSpec::new(1).is_err());
    }

    #[test]
    fn majority_rule() {
        assert!(patch_majority(5, 3).unwrap());
        assert!(!patch_majority(4, 3).unwrap());
        assert!(!patch_majority(0, 5).unwrap());
        assert!(patch_majority(25, 5).unwrap());
        assert!(matches!(
            patch_majority(10, 3),
            Err(Error::InvalidCount { count: 10, cells: 9 })
        ));
    }

    #[test]
    fn overlap_removes_isolated_pixel() {
        let mut f = BinaryFrame::new(9, 9);
        f.set(4, 4, true);
        assert!(median_filter_overlap(&f, KernelSpec::n3()).is_blank());
        assert!(median_filter_overlap(&BinaryFrame::new(5, 5), KernelSpec::n3()).is_blank());
    }

    #[test]
    fn overlap_fills_isolated_hole() {
        let mut f = BinaryFrame::filled(9, 9);
        f.set(4, 4, false);
        let out = median_filter_overlap(&f, KernelSpec::n3());
        assert!(out.get(4, 4));
    }

    #[test]
    fn overlap_tiny_frames() {
        // windows larger than the frame
        for (w, h) in [(1, 1), (2, 1), (1, 3), (2, 2)] {
            let f = BinaryFrame::filled(w, h);
            for n in [3, 5] {
                assert_eq!(median_filter_overlap(&f, KernelSpec::new(n).unwrap()), oracle_overlap(&f, n));
            }
        }
    }

    #[test]
    fn nomf_patch_cases() {
        // 5 ones in a 3x3 tile -> whole tile set
        let f = BinaryFrame::from_bits(3, 3, &[1, 0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(nomf(&f, KernelSpec::n3()).popcount(), 9);
        let f = BinaryFrame::from_bits(3, 3, &[1, 0, 1, 0, 0, 0, 1, 0, 1]).unwrap();
        assert!(nomf(&f, KernelSpec::n3()).is_blank());
    }

    #[test]
    fn nomf_partial_edge_tiles() {
        // 4x1 frame, n=3: tile of 3 then a 1-pixel tile
        let f = BinaryFrame::from_bits(4, 1, &[1, 0, 0, 1]).unwrap();
        let out = nomf(&f, KernelSpec::n3());
        assert_eq!(out.to_bits(), vec![0, 0, 0, 1]);
        // 2-pixel edge tile with one set pixel: 1 >= ceil(2/2)
        let f = BinaryFrame::from_bits(5, 1, &[0, 0, 0, 1, 0]).unwrap();
        assert_eq!(nomf(&f, KernelSpec::n3()).to_bits(), vec![0, 0, 0, 1, 1]);
    }

    #[test]
    fn stride_mode_dispatch() {
        let f = BinaryFrame::from_fn(12, 12, |x, y| (x * 7 + y * 3) % 4 == 0);
        assert_eq!(StrideMode::NonOverlap.apply(&f, KernelSpec::n3()), nomf(&f, KernelSpec::n3()));
        assert_eq!(
            StrideMode::Overlap.apply(&f, KernelSpec::n3()),
            median_filter_overlap(&f, KernelSpec::n3())
        );
        assert_eq!(StrideMode::NonOverlap.stride(KernelSpec::n5()), 5);
        assert_eq!(StrideMode::Overlap.stride(KernelSpec::n5()), 1);
    }
}
