//! Tracklet merging re-done by brute force: every pair's overlap ratio is
//! recomputed from scratch at every hand-over.

use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::{pixel_iou, Geom};

#[derive(Debug, Clone)]
pub struct OTracklet {
    pub id: u64,
    pub frames: Vec<(u64, Geom)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OTrack {
    pub tracklets: Vec<u64>,
    pub lambdas: Vec<f64>,
}

pub fn overlap(a: &OTracklet, b: &OTracklet, gamma: f64) -> f64 {
    let shorter = a.frames.len().min(b.frames.len());
    if shorter == 0 {
        return 0.0;
    }
    let mut hits = 0;
    for (fa, ga) in &a.frames {
        for (fb, gb) in &b.frames {
            if fa == fb && pixel_iou(ga, gb).is_some_and(|v| v > gamma) {
                hits += 1;
            }
        }
    }
    hits as f64 / shorter as f64
}

/// `timeline` lists frames with their selections; frames not listed select
/// nothing, and a frame selecting nothing ends every open track.
pub fn brute_merge(
    tracklets: &[OTracklet],
    timeline: &BTreeMap<u64, BTreeSet<u64>>,
    gamma: f64,
    lambda_min: f64,
) -> Vec<OTrack> {
    let by_id: BTreeMap<u64, &OTracklet> = tracklets.iter().map(|t| (t.id, t)).collect();
    let mut tracks: Vec<OTrack> = Vec::new();
    // Open tracks: current tracklet -> track index.
    let mut open: Vec<(u64, usize)> = Vec::new();
    let mut used: BTreeSet<u64> = BTreeSet::new();
    let (first, last) = match (timeline.keys().next(), timeline.keys().next_back()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return tracks,
    };
    for frame in first..=last {
        let empty = BTreeSet::new();
        let sel = timeline.get(&frame).unwrap_or(&empty);
        if sel.is_empty() {
            open.clear();
            continue;
        }
        let fresh: Vec<u64> = sel.iter().copied().filter(|id| !used.contains(id)).collect();
        let orphans: Vec<(u64, usize)> = open.iter().copied().filter(|(id, _)| !sel.contains(id)).collect();
        let mut still_open: Vec<(u64, usize)> = open.iter().copied().filter(|(id, _)| sel.contains(id)).collect();

        let mut free_orphans = orphans.clone();
        let mut free_fresh = fresh.clone();
        loop {
            // Best remaining pair: highest ratio, then smaller fresh id, then smaller orphan id.
            let mut best: Option<(f64, u64, u64, usize)> = None;
            for &(o, idx) in &free_orphans {
                for &c in &free_fresh {
                    let l = overlap(by_id[&o], by_id[&c], gamma);
                    if l < lambda_min {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bl, bc, bo, _)) => l > bl || (l == bl && (c < bc || (c == bc && o < bo))),
                    };
                    if better {
                        best = Some((l, c, o, idx));
                    }
                }
            }
            let Some((l, c, o, idx)) = best else { break };
            tracks[idx].tracklets.push(c);
            tracks[idx].lambdas.push(l);
            still_open.push((c, idx));
            used.insert(c);
            free_orphans.retain(|&(x, _)| x != o);
            free_fresh.retain(|&x| x != c);
        }
        for c in free_fresh {
            used.insert(c);
            still_open.push((c, tracks.len()));
            tracks.push(OTrack {
                tracklets: vec![c],
                lambdas: vec![],
            });
        }
        open = still_open;
    }
    tracks
}

pub type Timeline = BTreeMap<u64, BTreeSet<u64>>;

/// Random merge instance on a 12x12 canvas: a few moving objects, each
/// followed by a chain of tracklets whose observations overlap around the
/// hand-over frame, plus stray tracklets. Coordinates are multiples of 0.25 so
/// every area is exact in binary.
pub fn random_instance(rng: &mut crate::Lcg, max_tracklets: usize, max_frames: u64) -> (Vec<OTracklet>, Timeline) {
    let n = 1 + rng.below(max_tracklets as u64) as usize;
    let mut tracklets: Vec<OTracklet> = Vec::with_capacity(n);
    let mut timeline: Timeline = BTreeMap::new();
    let n_objects = 1 + rng.below(3);
    let objects: Vec<Object> = (0..n_objects).map(|_| Object::random(rng)).collect();
    while tracklets.len() < n {
        let obj = &objects[rng.below(n_objects) as usize];
        let stray = rng.unit() < 0.2;
        let pieces = if stray { 1 } else { 1 + rng.below(4) };
        let mut cursor = rng.below(max_frames);
        for _ in 0..pieces {
            if tracklets.len() == n || cursor >= max_frames {
                break;
            }
            let sel_len = 1 + rng.below(10);
            let sel_end = (cursor + sel_len).min(max_frames);
            let lead = rng.below(6).min(cursor);
            let tail = rng.below(6);
            let obs = (cursor - lead)..(sel_end + tail).min(max_frames);
            let id = tracklets.len() as u64;
            tracklets.push(obj.tracklet(rng, id, obs));
            let spans = if rng.unit() < 0.1 { 2 } else { 1 };
            for s in 0..spans {
                let from = if s == 0 { cursor } else { cursor + rng.below(sel_end - cursor) };
                for f in from..sel_end {
                    timeline.entry(f).or_default().insert(id);
                }
            }
            // Occasionally leave a gap before the next piece.
            cursor = sel_end + u64::from(rng.unit() < 0.1);
        }
    }
    (tracklets, timeline)
}

struct Object {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
}

fn quarter(rng: &mut crate::Lcg, lo: f64, hi: f64) -> f64 {
    (rng.range(lo, hi) * 4.0).round() / 4.0
}

impl Object {
    fn random(rng: &mut crate::Lcg) -> Self {
        Self {
            x: quarter(rng, 0.0, 6.0),
            y: quarter(rng, 0.0, 6.0),
            vx: quarter(rng, -0.25, 0.25),
            vy: quarter(rng, -0.25, 0.25),
        }
    }

    fn tracklet(&self, rng: &mut crate::Lcg, id: u64, frames: std::ops::Range<u64>) -> OTracklet {
        const W: u32 = 12;
        let as_rle = rng.unit() < 0.5;
        let jitter = [0.0, 0.5, 2.0][rng.below(3) as usize];
        let frames = frames
            .map(|f| {
                let t = (f % 24) as f64;
                let x = self.x + self.vx * t + quarter(rng, -jitter, jitter);
                let y = self.y + self.vy * t + quarter(rng, -jitter, jitter);
                let (w, h) = (4.0 + quarter(rng, 0.0, 1.0), 4.0 + quarter(rng, 0.0, 1.0));
                let geom = if as_rle {
                    let mut px = crate::geometry::paint_box(W, W, x, y, w, h);
                    if rng.unit() < 0.3 {
                        let i = rng.below((W * W) as u64) as usize;
                        px[i] = !px[i];
                    }
                    Geom::Rle { w: W, h: W, runs: crate::geometry::encode(&px) }
                } else {
                    Geom::Box { x, y, w, h }
                };
                (f, geom)
            })
            .collect();
        OTracklet { id, frames }
    }
}
