//! Property tests over the core invariants.

use proptest::prelude::*;

use seamcut::evaluation::{combine, smooth_signal};
use seamcut::graphcut::{extract_seam, Labeling};
use seamcut::{compute_overlap, difference_map, Image, Mask, Smoothing};

fn image_strategy(w: u32, h: u32) -> impl Strategy<Value = Image> {
    proptest::collection::vec(0.0f64..=1.0, (w * h * 3) as usize)
        .prop_map(move |data| Image::from_data(w, h, data).unwrap())
}

proptest! {
    #[test]
    fn difference_map_is_symmetric_bounded_and_matches_a_scalar_loop(
        a in image_strategy(8, 8),
        b in image_strategy(8, 8),
    ) {
        let mask = Mask::filled(8, 8, true);
        let region = compute_overlap(&mask, &mask).unwrap();
        let ab = difference_map(&a, &b, &region).unwrap();
        let ba = difference_map(&b, &a, &region).unwrap();
        for (id, x, y) in region.iter() {
            prop_assert_eq!(ab.get(id), ba.get(id));
            prop_assert!(ab.get(id) <= 3f64.sqrt() + 1e-12);
            let pa = a.pixel(x, y);
            let pb = b.pixel(x, y);
            let mut acc = 0.0;
            for c in 0..3 {
                acc += (pa[c] - pb[c]) * (pa[c] - pb[c]);
            }
            prop_assert!((ab.get(id) - acc.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_masks_partition_the_footprint_union(
        (x0, x1) in (0u32..10, 1u32..11).prop_filter("nonempty", |(a, b)| a < b),
        (y0, y1) in (0u32..8, 1u32..9).prop_filter("nonempty", |(a, b)| a < b),
        (u0, u1) in (0u32..10, 1u32..11).prop_filter("nonempty", |(a, b)| a < b),
        (v0, v1) in (0u32..8, 1u32..9).prop_filter("nonempty", |(a, b)| a < b),
    ) {
        let mask0 = Mask::from_rect(11, 9, x0, y0, x1, y1);
        let mask1 = Mask::from_rect(11, 9, u0, v0, u1, v1);
        match compute_overlap(&mask0, &mask1) {
            Err(_) => {
                // Disjoint rectangles: nothing to check.
                for y in 0..9 {
                    for x in 0..11 {
                        prop_assert!(!(mask0.get(x, y) && mask1.get(x, y)));
                    }
                }
            }
            Ok(region) => {
                for y in 0..9 {
                    for x in 0..11 {
                        let union = mask0.get(x, y) || mask1.get(x, y);
                        let parts = usize::from(region.overlap().get(x, y))
                            + usize::from(region.ref_only().get(x, y))
                            + usize::from(region.target_only().get(x, y));
                        prop_assert_eq!(parts, usize::from(union));
                    }
                }
            }
        }
    }

    #[test]
    fn seam_pairs_are_exactly_the_discontinuities(
        bits in proptest::collection::vec(0u8..2, 24),
    ) {
        // 6x4 overlap strip flanked by exclusive columns.
        let mask0 = Mask::from_rect(8, 4, 0, 0, 7, 4);
        let mask1 = Mask::from_rect(8, 4, 1, 0, 8, 4);
        let region = compute_overlap(&mask0, &mask1).unwrap();
        let labeling = Labeling::from_labels(bits.clone());
        if !labeling.is_mixed() {
            prop_assert!(extract_seam(&labeling, &region).is_err());
            return Ok(());
        }
        let seam = extract_seam(&labeling, &region).unwrap();
        let mut expected = std::collections::BTreeSet::new();
        for (id, x, y) in region.iter() {
            for (nx, ny) in [(x as i64 + 1, y as i64), (x as i64, y as i64 + 1)] {
                if let Some(other) = region.id_at(nx, ny) {
                    if labeling.get(id) != labeling.get(other) {
                        expected.insert((id.min(other), id.max(other)));
                    }
                }
            }
        }
        let got: std::collections::BTreeSet<(u32, u32)> = seam
            .crossings()
            .iter()
            .map(|c| (c.p_id.min(c.q_id), c.p_id.max(c.q_id)))
            .collect();
        prop_assert_eq!(&got, &expected);
        prop_assert_eq!(seam.len(), expected.len());
        for c in seam.crossings() {
            prop_assert_eq!(labeling.get(c.p_id), 0);
            prop_assert_eq!(labeling.get(c.q_id), 1);
            let manhattan = (c.p.0 as i64 - c.q.0 as i64).abs()
                + (c.p.1 as i64 - c.q.1 as i64).abs();
            prop_assert_eq!(manhattan, 1);
        }
    }

    #[test]
    fn smoothing_preserves_length_and_nonnegativity(
        signal in proptest::collection::vec(0.0f64..2.0, 0..80),
        method_index in 0usize..3,
    ) {
        let method = [Smoothing::Wavelet, Smoothing::MovingAverage, Smoothing::None][method_index];
        let out = smooth_signal(&signal, method);
        prop_assert_eq!(out.len(), signal.len());
        prop_assert!(out.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn smoothing_fixes_constant_signals(
        value in 0.0f64..2.0,
        len in 1usize..70,
        method_index in 0usize..3,
    ) {
        let method = [Smoothing::Wavelet, Smoothing::MovingAverage, Smoothing::None][method_index];
        let signal = vec![value; len];
        let out = smooth_signal(&signal, method);
        for v in out {
            prop_assert!((v - value).abs() < 1e-9);
        }
    }

    #[test]
    fn combine_matches_a_scalar_loop_and_is_monotone(
        pairs in proptest::collection::vec((0.0f64..1.0, 0.0f64..2.0), 1..40),
        lambda in 0.1f64..20.0,
        bump in 0.0f64..0.5,
        index in 0usize..40,
    ) {
        let (patch, point): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
        let out = combine(&patch, &point, lambda).unwrap();
        for i in 0..patch.len() {
            prop_assert!((out[i] - lambda * patch[i] * point[i]).abs() < 1e-15);
        }
        let i = index % patch.len();
        let mut bumped = patch.clone();
        bumped[i] += bump;
        let out2 = combine(&bumped, &point, lambda).unwrap();
        prop_assert!(out2[i] >= out[i]);
    }
}
