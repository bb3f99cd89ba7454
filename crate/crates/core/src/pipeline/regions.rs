use crate::frames::BinaryFrame;

/// Axis-aligned box in pixel units; `(x, y)` is the top-left pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundingBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BoundingBox {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        BoundingBox { x, y, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    pub fn intersection_area(&self, other: &BoundingBox) -> usize {
        let w = self.right().min(other.right()).saturating_sub(self.x.max(other.x));
        let h = self.bottom().min(other.bottom()).saturating_sub(self.y.max(other.y));
        w * h
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.bottom()
    }

    /// Clipped to a `width`×`height` frame; `None` if nothing remains.
    pub fn clip(&self, width: usize, height: usize) -> Option<BoundingBox> {
        let r = self.right().min(width);
        let b = self.bottom().min(height);
        if self.x >= r || self.y >= b {
            return None;
        }
        Some(BoundingBox::new(self.x, self.y, r - self.x, b - self.y))
    }

    pub fn center(&self) -> (usize, usize) {
        (self.x + self.w / 2, self.y + self.h / 2)
    }
}

/// Pixel adjacency used by component labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn from_count(c: u8) -> Option<Self> {
        match c {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }
}

/// OR-downscaling by `a` horizontally and `b` vertically: output pixel
/// `(i, j)` is the OR of the source window starting at `(i·a, j·b)`.
/// Partial windows at the right and bottom edges OR what is present.
pub fn downscale_or(frame: &BinaryFrame, a: usize, b: usize) -> BinaryFrame {
    assert!(a >= 1 && b >= 1, "scale factors must be >= 1");
    let (w, h) = frame.dims();
    let (ow, oh) = (w.div_ceil(a), h.div_ceil(b));
    let mut out = BinaryFrame::new(ow, oh);
    for (x, y) in frame.ones() {
        out.set(x / a, y / b, true);
    }
    out
}

/// One labelled component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub bbox: BoundingBox,
    /// Number of pixels in the component.
    pub area: usize,
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller label becomes the root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass union-find labelling. Components are returned sorted by the
/// `(y, x)` of their bounding box.
pub fn label_components(frame: &BinaryFrame, connectivity: Connectivity) -> Vec<Component> {
    const NONE: u32 = u32::MAX;
    let (w, h) = frame.dims();
    let mut labels = vec![NONE; w * h];
    let mut sets = DisjointSet { parent: Vec::new() };

    for (x, y) in frame.ones() {
        let mut neighbours = [NONE; 4];
        let mut push = |i: usize, nx: isize, ny: isize| {
            if nx >= 0 && ny >= 0 && (nx as usize) < w {
                let l = labels[ny as usize * w + nx as usize];
                neighbours[i] = l;
            }
        };
        let (xi, yi) = (x as isize, y as isize);
        push(0, xi - 1, yi);
        push(1, xi, yi - 1);
        if connectivity == Connectivity::Eight {
            push(2, xi - 1, yi - 1);
            push(3, xi + 1, yi - 1);
        }
        let label = match neighbours.iter().copied().filter(|&l| l != NONE).min() {
            Some(min) => {
                for &l in neighbours.iter().filter(|&&l| l != NONE) {
                    sets.union(min, l);
                }
                min
            }
            None => sets.make(),
        };
        labels[y * w + x] = label;
    }

    let mut slot = vec![usize::MAX; sets.parent.len()];
    let mut acc: Vec<(usize, usize, usize, usize, usize)> = Vec::new();
    for (x, y) in frame.ones() {
        let root = sets.find(labels[y * w + x]) as usize;
        if slot[root] == usize::MAX {
            slot[root] = acc.len();
            acc.push((x, y, x, y, 0));
        }
        let e = &mut acc[slot[root]];
        e.0 = e.0.min(x);
        e.1 = e.1.min(y);
        e.2 = e.2.max(x);
        e.3 = e.3.max(y);
        e.4 += 1;
    }
    let mut comps: Vec<Component> = acc
        .into_iter()
        .map(|(x0, y0, x1, y1, area)| Component {
            bbox: BoundingBox::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1),
            area,
        })
        .collect();
    comps.sort_by_key(|c| (c.bbox.y, c.bbox.x, c.bbox.h, c.bbox.w));
    comps
}

/// Bounding boxes of the connected components of set pixels.
pub fn connected_components(frame: &BinaryFrame, connectivity: Connectivity) -> Vec<BoundingBox> {
    label_components(frame, connectivity).into_iter().map(|c| c.bbox).collect()
}

/// Region-proposal settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposalConfig {
    /// Horizontal and vertical OR-downscale factors.
    pub rescale: (usize, usize),
    pub connectivity: Connectivity,
    /// Components with fewer downscaled pixels are dropped.
    pub min_area: usize,
}

impl Default for ProposalConfig {
    fn default() -> Self {
        ProposalConfig {
            rescale: (8, 6),
            connectivity: Connectivity::Eight,
            min_area: 2,
        }
    }
}

/// Downscale, label, drop specks, and map boxes back to full resolution.
pub fn region_proposals(frame: &BinaryFrame, cfg: &ProposalConfig) -> Vec<BoundingBox> {
    let (a, b) = cfg.rescale;
    let small = downscale_or(frame, a, b);
    label_components(&small, cfg.connectivity)
        .into_iter()
        .filter(|c| c.area >= cfg.min_area)
        .filter_map(|c| {
            BoundingBox::new(c.bbox.x * a, c.bbox.y * b, c.bbox.w * a, c.bbox.h * b).clip(frame.width(), frame.height())
        })
        .collect()
}

/// `side`×`side` crop centred on `center`, zero outside the frame.
pub fn extract_patch(frame: &BinaryFrame, center: (usize, usize), side: usize) -> BinaryFrame {
    let half = (side / 2) as isize;
    frame.crop(center.0 as isize - half, center.1 as isize - half, side, side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_downscale() {
        let f = BinaryFrame::from_fn(13, 7, |x, y| (x ^ y) & 1 == 1);
        assert_eq!(downscale_or(&f, 1, 1), f);
    }

    #[test]
    fn block_collapses_to_one_pixel() {
        let f = BinaryFrame::filled(8, 6);
        let d = downscale_or(&f, 8, 6);
        assert_eq!(d.dims(), (1, 1));
        assert!(d.get(0, 0));
    }

    #[test]
    fn partial_windows_at_edges() {
        let mut f = BinaryFrame::new(10, 7);
        f.set(9, 6, true);
        let d = downscale_or(&f, 8, 6);
        assert_eq!(d.dims(), (2, 2));
        assert_eq!(d.to_bits(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn ccl_connectivity() {
        assert!(connected_components(&BinaryFrame::new(5, 5), Connectivity::Eight).is_empty());
        let mut f = BinaryFrame::new(4, 4);
        f.set(1, 1, true);
        f.set(2, 2, true);
        assert_eq!(connected_components(&f, Connectivity::Eight).len(), 1);
        assert_eq!(connected_components(&f, Connectivity::Four).len(), 2);
    }

    #[test]
    fn ccl_u_shape_merges() {
        // two arms joined only at the bottom; labels must merge across passes
        let f = BinaryFrame::from_bits(5, 4, &[1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1]).unwrap();
        let comps = label_components(&f, Connectivity::Four);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].bbox, BoundingBox::new(0, 0, 5, 4));
        assert_eq!(comps[0].area, 11);
    }

    #[test]
    fn ccl_sorted_by_position() {
        let mut f = BinaryFrame::new(10, 10);
        f.set(8, 1, true);
        f.set(1, 5, true);
        f.set(2, 1, true);
        let boxes = connected_components(&f, Connectivity::Eight);
        assert_eq!(
            boxes,
            vec![BoundingBox::new(2, 1, 1, 1), BoundingBox::new(8, 1, 1, 1), BoundingBox::new(1, 5, 1, 1)]
        );
    }

    #[test]
    fn proposals_drop_specks_and_rescale() {
        let mut f = BinaryFrame::new(64, 48);
        for y in 12..24 {
            f.fill_row_span(y, 16, 20, true);
        }
        f.set(60, 2, true);
        let p = region_proposals(&f, &ProposalConfig::default());
        assert_eq!(p, vec![BoundingBox::new(16, 12, 24, 12)]);
    }

    #[test]
    fn patches() {
        let f = BinaryFrame::filled(100, 100);
        assert_eq!(extract_patch(&f, (50, 50), 42).popcount(), 42 * 42);
        let corner = extract_patch(&f, (0, 0), 42);
        assert_eq!(corner.popcount(), 21 * 21);
        assert!(!corner.get(0, 0) && corner.get(41, 41) && corner.get(21, 21) && !corner.get(20, 41));
    }

    #[test]
    fn box_geometry() {
        let a = BoundingBox::new(0, 0, 4, 4);
        let b = BoundingBox::new(2, 0, 4, 4);
        assert_eq!(a.intersection_area(&b), 8);
        assert_eq!(a.intersection_area(&BoundingBox::new(4, 0, 1, 1)), 0);
        assert_eq!(BoundingBox::new(5, 5, 10, 10).clip(8, 20), Some(BoundingBox::new(5, 5, 3, 10)));
        assert_eq!(BoundingBox::new(9, 5, 10, 10).clip(8, 20), None);
        assert!(a.contains(3, 3) && !a.contains(4, 0));
    }
}
