use std::fmt;

const WORD_BITS: usize = 64;

/// A bit-packed, row-major binary image.
///
/// Each row occupies `words_per_row` little-endian `u64` words; bit `x % 64`
/// of word `x / 64` holds pixel `x`. Padding bits past `width` are always 0,
/// so whole-row popcounts are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryFrame {
    width: usize,
    height: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BinaryFrame {
    /// All-zero frame.
    pub fn new(width: usize, height: usize) -> Self {
        let words_per_row = width.div_ceil(WORD_BITS);
        BinaryFrame {
            width,
            height,
            words_per_row,
            words: vec![0; words_per_row * height],
        }
    }

    /// Frame with every pixel set.
    pub fn filled(width: usize, height: usize) -> Self {
        let mut f = Self::new(width, height);
        for y in 0..height {
            f.fill_row_span(y, 0, width, true);
        }
        f
    }

    /// Builds a frame by evaluating `pixel(x, y)` everywhere.
    pub fn from_fn(width: usize, height: usize, mut pixel: impl FnMut(usize, usize) -> bool) -> Self {
        let mut f = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if pixel(x, y) {
                    f.set(x, y, true);
                }
            }
        }
        f
    }

    /// Builds a frame from a row-major slice of 0/1 values.
    pub fn from_bits(width: usize, height: usize, bits: &[u8]) -> Option<Self> {
        if bits.len() != width * height || bits.iter().any(|&b| b > 1) {
            return None;
        }
        Some(Self::from_fn(width, height, |x, y| bits[y * width + x] == 1))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty_dims(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        let w = self.words[y * self.words_per_row + x / WORD_BITS];
        (w >> (x % WORD_BITS)) & 1 == 1
    }

    /// Like [`get`](Self::get) but returns `false` outside the frame.
    #[inline]
    pub fn get_or_zero(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            false
        } else {
            self.get(x as usize, y as usize)
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) outside frame");
        let w = &mut self.words[y * self.words_per_row + x / WORD_BITS];
        let mask = 1u64 << (x % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Raw words of row `y`.
    #[inline]
    pub fn row_words(&self, y: usize) -> &[u64] {
        &self.words[y * self.words_per_row..(y + 1) * self.words_per_row]
    }

    /// Number of set pixels in `[x0, x0 + len)` of row `y`.
    #[inline]
    pub fn count_row_span(&self, y: usize, x0: usize, len: usize) -> u32 {
        debug_assert!(x0 + len <= self.width);
        let row = self.row_words(y);
        let mut remaining = len;
        let mut x = x0;
        let mut count = 0;
        while remaining > 0 {
            let bit = x % WORD_BITS;
            let take = remaining.min(WORD_BITS - bit);
            let mask = span_mask(bit, take);
            count += (row[x / WORD_BITS] & mask).count_ones();
            x += take;
            remaining -= take;
        }
        count
    }

    /// Sets or clears every pixel in `[x0, x0 + len)` of row `y`.
    #[inline]
    pub fn fill_row_span(&mut self, y: usize, x0: usize, len: usize, value: bool) {
        assert!(x0 + len <= self.width);
        let base = y * self.words_per_row;
        let mut remaining = len;
        let mut x = x0;
        while remaining > 0 {
            let bit = x % WORD_BITS;
            let take = remaining.min(WORD_BITS - bit);
            let mask = span_mask(bit, take);
            let w = &mut self.words[base + x / WORD_BITS];
            if value {
                *w |= mask;
            } else {
                *w &= !mask;
            }
            x += take;
            remaining -= take;
        }
    }

    /// Total number of set pixels.
    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True iff no pixel is set.
    pub fn is_blank(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of pixels where `self` and `other` differ.
    pub fn hamming(&self, other: &BinaryFrame) -> Option<usize> {
        if self.dims() != other.dims() {
            return None;
        }
        Some(
            self.words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| (a ^ b).count_ones() as usize)
                .sum(),
        )
    }

    /// True iff every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryFrame) -> bool {
        self.dims() == other.dims() && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Coordinates `(x, y)` of set pixels in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |y| self.ones_in_row(y))
    }

    /// Set pixels of row `y`, left to right.
    pub fn ones_in_row(&self, y: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_words(y)
            .iter()
            .enumerate()
            .flat_map(move |(wi, &w)| BitIter(w).map(move |b| (wi * WORD_BITS + b, y)))
    }

    /// Row-major 0/1 values.
    pub fn to_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(self.get(x, y) as u8);
            }
        }
        out
    }

    /// Copy of the `w`×`h` region at `(x0, y0)`; pixels outside `self` read as 0.
    pub fn crop(&self, x0: isize, y0: isize, w: usize, h: usize) -> BinaryFrame {
        BinaryFrame::from_fn(w, h, |x, y| self.get_or_zero(x0 + x as isize, y0 + y as isize))
    }
}

#[inline]
fn span_mask(bit: usize, take: usize) -> u64 {
    if take == WORD_BITS {
        u64::MAX
    } else {
        ((1u64 << take) - 1) << bit
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

impl fmt::Debug for BinaryFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryFrame {}x{} ({} set)", self.width, self.height, self.popcount())?;
        if self.width <= 64 && self.height <= 64 {
            for y in 0..self.height {
                for x in 0..self.width {
                    f.write_str(if self.get(x, y) { "#" } else { "." })?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}
