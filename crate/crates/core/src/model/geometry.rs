use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("mask canvases differ: {a_width}x{a_height} vs {b_width}x{b_height}")]
    CanvasMismatch {
        a_width: u32,
        a_height: u32,
        b_width: u32,
        b_height: u32,
    },
}

/// Run-length encoded binary mask.
///
/// `runs` alternate background and foreground lengths over the pixels in
/// row-major order, starting with background (which may be a zero-length run).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RleMask {
    pub width: u32,
    pub height: u32,
    pub runs: Vec<u32>,
}

impl RleMask {
    pub fn new(width: u32, height: u32, runs: Vec<u32>) -> Self {
        Self {
            width,
            height,
            runs,
        }
    }

    /// Encodes a row-major boolean raster.
    pub fn from_bitmap(width: u32, height: u32, pixels: &[bool]) -> Self {
        debug_assert_eq!(pixels.len(), width as usize * height as usize);
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0u32;
        for &p in pixels {
            if p != current {
                runs.push(len);
                current = p;
                len = 0;
            }
            len += 1;
        }
        runs.push(len);
        Self {
            width,
            height,
            runs,
        }
    }

    pub fn canvas_len(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn run_sum(&self) -> u64 {
        self.runs.iter().map(|&r| r as u64).sum()
    }

    pub fn area(&self) -> u64 {
        self.runs.iter().skip(1).step_by(2).map(|&r| r as u64).sum()
    }

    /// Half-open `[start, end)` linear-index intervals of foreground pixels.
    pub fn foreground(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let mut pos = 0u64;
        self.runs.iter().enumerate().filter_map(move |(i, &r)| {
            let start = pos;
            pos += r as u64;
            (i % 2 == 1 && r > 0).then_some((start, pos))
        })
    }

    pub fn to_bitmap(&self) -> Vec<bool> {
        let mut out = alloc::vec![false; self.canvas_len() as usize];
        for (s, e) in self.foreground() {
            let e = e.min(out.len() as u64);
            for p in s..e {
                out[p as usize] = true;
            }
        }
        out
    }
}

/// Axis-aligned box in pixel units; `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w.max(0.0) * self.h.max(0.0)
    }

    /// Pixel rectangle `[c0, c1) x [r0, r1)` covered on a `width x height`
    /// canvas. A pixel is covered when its centre lies inside the box.
    pub fn raster_bounds(&self, width: u32, height: u32) -> (u64, u64, u64, u64) {
        let clamp = |v: f64, hi: u32| -> u64 {
            if !(v > 0.0) {
                0
            } else if v >= hi as f64 {
                hi as u64
            } else {
                v as u64
            }
        };
        let c0 = clamp(math::ceil(self.x - 0.5), width);
        let c1 = clamp(math::ceil(self.x + self.w - 0.5), width);
        let r0 = clamp(math::ceil(self.y - 0.5), height);
        let r1 = clamp(math::ceil(self.y + self.h - 0.5), height);
        (c0, c1.max(c0), r0, r1.max(r0))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MaskGeometry {
    Rle(RleMask),
    Box(BoundingBox),
}

impl MaskGeometry {
    /// Area in pixels. For boxes this is the continuous area.
    pub fn area(&self) -> f64 {
        match self {
            MaskGeometry::Rle(m) => m.area() as f64,
            MaskGeometry::Box(b) => b.area(),
        }
    }
}

/// Intersection over union of two masks observed in the same frame.
///
/// Two boxes are compared with continuous areas. When one side is a run-length
/// mask the box is rasterised onto that mask's canvas and pixels are counted.
/// A pair with an empty union scores 0.
pub fn mask_iou(a: &MaskGeometry, b: &MaskGeometry) -> Result<f64, GeometryError> {
    let (inter, union) = match (a, b) {
        (MaskGeometry::Box(p), MaskGeometry::Box(q)) => {
            let iw = (p.x + p.w).min(q.x + q.w) - p.x.max(q.x);
            let ih = (p.y + p.h).min(q.y + q.h) - p.y.max(q.y);
            let inter = if iw > 0.0 && ih > 0.0 { iw * ih } else { 0.0 };
            (inter, p.area() + q.area() - inter)
        }
        (MaskGeometry::Rle(p), MaskGeometry::Rle(q)) => {
            if p.width != q.width || p.height != q.height {
                return Err(GeometryError::CanvasMismatch {
                    a_width: p.width,
                    a_height: p.height,
                    b_width: q.width,
                    b_height: q.height,
                });
            }
            let inter = rle_intersection(p, q);
            (inter as f64, (p.area() + q.area() - inter) as f64)
        }
        (MaskGeometry::Rle(m), MaskGeometry::Box(bx)) | (MaskGeometry::Box(bx), MaskGeometry::Rle(m)) => {
            let (c0, c1, r0, r1) = bx.raster_bounds(m.width, m.height);
            let box_area = (c1 - c0) * (r1 - r0);
            let inter = rle_box_intersection(m, (c0, c1, r0, r1));
            (inter as f64, (m.area() + box_area - inter) as f64)
        }
    };
    if union > 0.0 {
        Ok(inter / union)
    } else {
        Ok(0.0)
    }
}

fn rle_intersection(a: &RleMask, b: &RleMask) -> u64 {
    let mut ia = a.foreground().peekable();
    let mut ib = b.foreground().peekable();
    let mut total = 0;
    while let (Some(&(sa, ea)), Some(&(sb, eb))) = (ia.peek(), ib.peek()) {
        let lo = sa.max(sb);
        let hi = ea.min(eb);
        if hi > lo {
            total += hi - lo;
        }
        if ea <= eb {
            ia.next();
        } else {
            ib.next();
        }
    }
    total
}

fn rle_box_intersection(m: &RleMask, (c0, c1, r0, r1): (u64, u64, u64, u64)) -> u64 {
    if c1 <= c0 || r1 <= r0 {
        return 0;
    }
    let w = m.width as u64;
    let mut total = 0;
    for (s, e) in m.foreground() {
        let first_row = (s / w).max(r0);
        let last_row = ((e - 1) / w).min(r1 - 1);
        if first_row > last_row {
            continue;
        }
        for row in first_row..=last_row {
            let row_start = row * w;
            let lo = s.max(row_start) - row_start;
            let hi = e.min(row_start + w) - row_start;
            let lo = lo.max(c0);
            let hi = hi.min(c1);
            if hi > lo {
                total += hi - lo;
            }
        }
    }
    total
}
