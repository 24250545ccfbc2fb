mod common;

use proptest::prelude::*;
use trackmine_core::model::{mask_iou, validate_tracklet, Violation};
use trackmine_core::{BoundingBox, FrameObservation, MaskGeometry, RleMask, Tracklet, TrackletId};
use trackmine_testkit::geometry::{encode, pixel_iou, Geom};

fn quarter() -> impl Strategy<Value = f64> {
    (-8i32..72).prop_map(|q| q as f64 / 4.0)
}

fn geom_on(w: u32, h: u32) -> impl Strategy<Value = Geom> {
    let rle = proptest::collection::vec(any::<bool>(), (w * h) as usize)
        .prop_map(move |px| Geom::Rle { w, h, runs: encode(&px) });
    let bx = (quarter(), quarter(), (0i32..64).prop_map(|q| q as f64 / 4.0), (0i32..64).prop_map(|q| q as f64 / 4.0))
        .prop_map(|(x, y, w, h)| Geom::Box { x, y, w, h });
    prop_oneof![rle, bx]
}

fn canvas_pair() -> impl Strategy<Value = (Geom, Geom)> {
    (1u32..=32, 1u32..=32).prop_flat_map(|(w, h)| (geom_on(w, h), geom_on(w, h)))
}

proptest! {
    #[test]
    fn iou_matches_pixel_count((a, b) in canvas_pair()) {
        let got = mask_iou(&common::geometry(&a), &common::geometry(&b)).unwrap();
        let want = pixel_iou(&a, &b).unwrap();
        prop_assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }

    #[test]
    fn iou_is_symmetric((a, b) in canvas_pair()) {
        let (a, b) = (common::geometry(&a), common::geometry(&b));
        prop_assert_eq!(mask_iou(&a, &b).unwrap(), mask_iou(&b, &a).unwrap());
    }

    #[test]
    fn self_iou_is_one((a, _) in canvas_pair()) {
        let g = common::geometry(&a);
        let iou = mask_iou(&g, &g).unwrap();
        if g.area() > 0.0 {
            prop_assert_eq!(iou, 1.0);
        } else {
            prop_assert_eq!(iou, 0.0);
        }
    }
}

#[test]
fn half_shifted_boxes_give_one_third() {
    let a = MaskGeometry::Box(BoundingBox::new(0.0, 0.0, 10.0, 10.0));
    let b = MaskGeometry::Box(BoundingBox::new(5.0, 0.0, 10.0, 10.0));
    assert_eq!(mask_iou(&a, &b).unwrap(), 1.0 / 3.0);
    // The same pair rasterised on a canvas agrees.
    let pa = Geom::Box { x: 0.0, y: 0.0, w: 10.0, h: 10.0 };
    let pb = Geom::Rle { w: 20, h: 12, runs: encode(&trackmine_testkit::geometry::paint_box(20, 12, 5.0, 0.0, 10.0, 10.0)) };
    assert_eq!(mask_iou(&common::geometry(&pa), &common::geometry(&pb)).unwrap(), 1.0 / 3.0);
}

#[test]
fn disjoint_boxes_give_zero() {
    let a = MaskGeometry::Box(BoundingBox::new(0.0, 0.0, 10.0, 10.0));
    let b = MaskGeometry::Box(BoundingBox::new(20.0, 20.0, 5.0, 5.0));
    assert_eq!(mask_iou(&a, &b).unwrap(), 0.0);
}

#[test]
fn canvas_mismatch_is_an_error() {
    let a = MaskGeometry::Rle(RleMask::new(2, 2, vec![0, 4]));
    let b = MaskGeometry::Rle(RleMask::new(4, 1, vec![0, 4]));
    assert!(mask_iou(&a, &b).is_err());
}

#[test]
fn validation_reports() {
    let obs = |f| FrameObservation::new(f, MaskGeometry::Box(BoundingBox::new(0.0, 0.0, 1.0, 1.0)));
    let unsorted = Tracklet::new(TrackletId(0), vec![obs(3), obs(1), obs(2)]);
    assert!(validate_tracklet(&unsorted)
        .violations
        .iter()
        .any(|v| matches!(v, Violation::NotSorted { .. })));
    assert!(validate_tracklet(&Tracklet::new(TrackletId(1), vec![obs(0)])).is_valid());

    let short = Tracklet::new(
        TrackletId(2),
        vec![FrameObservation::new(0, MaskGeometry::Rle(RleMask::new(3, 3, vec![4, 4])))],
    );
    let report = validate_tracklet(&short);
    assert!(report
        .violations
        .iter()
        .any(|v| v.to_string().contains("run-length sum mismatch")));
}
