mod common;

use common::*;
use polyra::*;
use proptest::prelude::*;
use rand::Rng;

/// `[0, 1] u [2, 3]` by `[0, 1]`, with the gap carved out by a base shape
/// whose consequent is empty.
fn two_boxes() -> Swarm64 {
    let outer = BaseShape::new(Polytope::universal(2), Polytope::from_box(&[0.0, 0.0], &[3.0, 1.0]).unwrap()).unwrap();
    let gap = Polytope::from_rows(2, vec![vec![-1.0, 0.0], vec![1.0, 0.0]], vec![-1.0, 2.0]).unwrap();
    let nothing = Polytope::from_rows(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![-1.0, 0.0]).unwrap();
    let carve = BaseShape::new(gap, nothing).unwrap();
    let bounds = BoundingBox::new(vec![0.0, 0.0], vec![3.0, 1.0]).unwrap();
    Swarm::new(vec![outer, carve], bounds).unwrap().with_start_point(vec![0.5, 0.5]).unwrap()
}

#[test]
fn line_through_two_boxes_gives_two_sections() {
    let s = two_boxes();
    let r = ray_sections(&s, &[0.5, 0.5], &[1.0, 0.0]).unwrap();
    assert_eq!(r.len(), 2);
    let [a, b] = r.intervals() else { unreachable!() };
    assert!((a.lo + 0.5).abs() < 1e-12 && (a.hi - 0.5).abs() < 1e-12);
    assert!((b.lo - 1.5).abs() < 1e-12 && (b.hi - 2.5).abs() < 1e-12);
}

#[test]
fn range_query_on_two_boxes() {
    let s = two_boxes();
    let r = range_query(&s, &RangeQuery::new(2, [(1, 0.3)]).unwrap()).unwrap();
    assert_eq!(r.len(), 2);
    assert!(r.contains(0.5) && r.contains(2.9) && !r.contains(1.5) && !r.contains(3.1));
    let ends: Vec<(f64, f64)> = r.intervals().iter().map(|iv| (iv.lo, iv.hi)).collect();
    assert_eq!(ends, [(0.0, 1.0), (2.0, 3.0)]);
}

#[test]
fn condition_boundaries_leave_no_slivers() {
    // the carve only fires on [1, 2] and its consequent holds for x <= 1.5,
    // so the line is one piece even though a condition edge crosses it
    let outer = BaseShape::new(Polytope::universal(2), Polytope::from_box(&[0.0, 0.0], &[3.0, 1.0]).unwrap()).unwrap();
    let cond = Polytope::from_rows(2, vec![vec![-1.0, 0.0], vec![1.0, 0.0]], vec![-1.0, 2.0]).unwrap();
    let cons = Polytope::from_rows(2, vec![vec![1.0, 0.0]], vec![1.5]).unwrap();
    let bounds = BoundingBox::new(vec![0.0, 0.0], vec![3.0, 1.0]).unwrap();
    let s = Swarm::new(vec![outer, BaseShape::new(cond, cons).unwrap()], bounds).unwrap();
    let r = range_query(&s, &RangeQuery::new(2, [(1, 0.5)]).unwrap()).unwrap();
    let ends: Vec<(f64, f64)> = r.intervals().iter().map(|iv| (iv.lo, iv.hi)).collect();
    assert_eq!(ends, [(0.0, 1.5), (2.0, 3.0)]);
}

#[test]
fn generation_visits_both_boxes() {
    let s = two_boxes();
    let pts = generate(&s, &GenConfig { n_samples: 3000, seed: 5, ..Default::default() }).unwrap();
    assert!(pts.iter().all(|x| s.contains(x).unwrap()));
    let left = pts.iter().filter(|x| x[0] < 1.5).count();
    assert!(left > 300 && left < 2700, "{left}");
}

#[test]
fn generation_is_deterministic_and_exact() {
    let data = diamond(2, 2000);
    let s = fit(&data, &FitConfig { n_models: 200, seed: 2, ..Default::default() }).unwrap();
    for weighting in [SegmentWeighting::InverseLength, SegmentWeighting::ProportionalLength] {
        let cfg = GenConfig { n_samples: 2000, seed: 8, segment_weighting: weighting, ..Default::default() };
        let a = generate(&s, &cfg).unwrap();
        assert_eq!(a, generate(&s, &cfg).unwrap());
        assert!(a.iter().all(|x| s.contains(x).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reversed_direction_mirrors_sections(seed in 0u64..100, angle in 0.0..std::f64::consts::TAU) {
        let data = diamond(seed, 1000);
        let s = fit(&data, &FitConfig { n_models: 50, seed, ..Default::default() }).unwrap();
        let o = s.start_point().unwrap().to_vec();
        let d = [angle.cos(), angle.sin()];
        let fwd = ray_sections(&s, &o, &d).unwrap();
        let back = ray_sections(&s, &o, &[-d[0], -d[1]]).unwrap();
        prop_assert_eq!(fwd.len(), back.len());
        for (a, b) in fwd.intervals().iter().zip(back.negate().intervals()) {
            prop_assert!((a.lo - b.lo).abs() < 1e-9 && (a.hi - b.hi).abs() < 1e-9);
        }
    }
}

#[test]
fn range_query_agrees_with_membership() {
    let data = noisy_sine(4, 3000, 0.1);
    let s = fit(&data, &FitConfig { n_models: 300, seed: 4, ..Default::default() }).unwrap();
    let mut r = rng(4);
    for x0 in [0.5, 1.5, 3.0, 4.5] {
        let q = RangeQuery::new(2, [(0, x0)]).unwrap();
        let set = range_query(&s, &q).unwrap();
        assert!(!set.is_empty());
        let hull = (set.intervals()[0].lo, set.intervals()[set.len() - 1].hi);
        let near_edge = |v: f64| set.intervals().iter().any(|iv| (iv.lo - v).abs() < 1e-5 || (iv.hi - v).abs() < 1e-5);
        for _ in 0..1000 {
            let v = r.random_range(-1.5..1.5);
            if near_edge(v) {
                continue;
            }
            assert_eq!(set.contains(v), s.contains(&q.point(v)).unwrap(), "x = {x0}, y = {v}");
        }
        let iv = set.intervals()[r.random_range(0..set.len())];
        assert!(s.contains(&q.point(iv.lo + (iv.hi - iv.lo) * 0.5)).unwrap());
        assert!(hull.0 > -1.5 && hull.1 < 1.5);
    }
}

#[test]
fn range_query_rejects_bad_slices() {
    assert!(RangeQuery::<f64>::new(3, [(0, 1.0)]).is_err());
    assert!(RangeQuery::<f64>::new(2, [(2, 1.0)]).is_err());
    assert!(RangeQuery::<f64>::new(2, [(0, f64::NAN)]).is_err());
}

#[test]
fn clusters_hold_training_points_and_match_abstraction() {
    let data = boxes(2, 3000, &THREE_SQUARES);
    let s = fit(&data, &FitConfig { n_models: 300, seed: 2, ..Default::default() }).unwrap();
    let cfg = AbstractConfig { seed: 2, ..Default::default() };
    let c = cluster_swarm(&s, &data, &cfg).unwrap();
    let out = abstract_swarm(&s, &data, &cfg).unwrap();
    assert_eq!(c.clusters.len(), out.dnf.len());
    for p in &c.clusters {
        assert!(data.rows().any(|x| p.contains(x).unwrap()));
    }
    for x in grid2(&[0.0, 0.0], &[1.0, 1.0], 50) {
        let any = c.clusters.iter().any(|p| p.contains(&x).unwrap());
        assert_eq!(any, out.dnf.contains(&x).unwrap());
    }
    assert_eq!(c.assignment.len(), data.len());
}
