//! Per-pixel IoU.

#[derive(Debug, Clone, PartialEq)]
pub enum Geom {
    Rle { w: u32, h: u32, runs: Vec<u32> },
    Box { x: f64, y: f64, w: f64, h: f64 },
}

/// Decodes runs that alternate background and foreground, background first.
pub fn decode(w: u32, h: u32, runs: &[u32]) -> Vec<bool> {
    let mut px = Vec::with_capacity((w * h) as usize);
    for (i, &r) in runs.iter().enumerate() {
        px.extend(std::iter::repeat(i % 2 == 1).take(r as usize));
    }
    assert_eq!(px.len(), (w * h) as usize, "runs do not cover the canvas");
    px
}

/// A pixel belongs to the box when its centre lies in `[x, x+w) x [y, y+h)`.
pub fn paint_box(w: u32, h: u32, x: f64, y: f64, bw: f64, bh: f64) -> Vec<bool> {
    let mut px = vec![false; (w * h) as usize];
    for r in 0..h {
        for c in 0..w {
            let (cx, cy) = (c as f64 + 0.5, r as f64 + 0.5);
            if cx >= x && cx < x + bw && cy >= y && cy < y + bh {
                px[(r * w + c) as usize] = true;
            }
        }
    }
    px
}

fn count_iou(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(p, q)| **p && **q).count();
    let union = a.iter().zip(b).filter(|(p, q)| **p || **q).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// `None` when two run-length masks live on different canvases.
pub fn pixel_iou(a: &Geom, b: &Geom) -> Option<f64> {
    match (a, b) {
        (Geom::Rle { w, h, runs }, Geom::Rle { w: w2, h: h2, runs: r2 }) => {
            if (w, h) != (w2, h2) {
                return None;
            }
            Some(count_iou(&decode(*w, *h, runs), &decode(*w, *h, r2)))
        }
        (Geom::Rle { w, h, runs }, Geom::Box { x, y, w: bw, h: bh })
        | (Geom::Box { x, y, w: bw, h: bh }, Geom::Rle { w, h, runs }) => {
            Some(count_iou(&decode(*w, *h, runs), &paint_box(*w, *h, *x, *y, *bw, *bh)))
        }
        (
            Geom::Box { x, y, w, h },
            Geom::Box {
                x: x2,
                y: y2,
                w: w2,
                h: h2,
            },
        ) => {
            let ix = ((x + w).min(x2 + w2) - x.max(*x2)).max(0.0);
            let iy = ((y + h).min(y2 + h2) - y.max(*y2)).max(0.0);
            let inter = ix * iy;
            let union = w * h + w2 * h2 - inter;
            Some(if union > 0.0 { inter / union } else { 0.0 })
        }
    }
}

/// Run lengths of a bitmap, background first.
pub fn encode(px: &[bool]) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u32;
    for &p in px {
        if p == current {
            len += 1;
        } else {
            runs.push(len);
            current = p;
            len = 1;
        }
    }
    runs.push(len);
    runs
}
