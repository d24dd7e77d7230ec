mod common;

use common::*;
use polyra::*;
use proptest::prelude::*;

fn small_swarm(seed: u64, offset: f64) -> Swarm64 {
    let pts: Vec<Vec<f64>> = gaussian(&mut rng(seed), 200, 2).into_iter().map(|p| vec![p[0] + offset, p[1]]).collect();
    fit(&Dataset64::new(&pts).unwrap(), &FitConfig { n_models: 40, seed, ..Default::default() }).unwrap()
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0..4.0f64, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_is_conjunction(seed in 0u64..50, offset in -1.5..1.5f64, xs in prop::collection::vec(point(), 50)) {
        let (a, b) = (small_swarm(seed, 0.0), small_swarm(seed + 1, offset));
        let m = a.merge(&b).unwrap();
        prop_assert_eq!(m.len(), a.len() + b.len());
        for x in &xs {
            prop_assert_eq!(m.contains(x).unwrap(), a.contains(x).unwrap() && b.contains(x).unwrap());
        }
    }

    #[test]
    fn appending_never_admits(seed in 0u64..50, xs in prop::collection::vec(point(), 50)) {
        let mut s = small_swarm(seed, 0.0);
        let extra = small_swarm(seed + 100, 0.5);
        let outside: Vec<&Vec<f64>> = xs.iter().filter(|x| !s.contains(x).unwrap()).collect();
        for f in extra.base_shapes() {
            s.push(f.clone()).unwrap();
        }
        for x in outside {
            prop_assert!(!s.contains(x).unwrap());
        }
    }

    #[test]
    fn scores_ignore_shape_order(seed in 0u64..50, x in point()) {
        let s = small_swarm(seed, 0.0);
        let mut shapes = s.base_shapes().to_vec();
        shapes.reverse();
        let r = Swarm::new(shapes, s.data_bounds().clone()).unwrap();
        prop_assert_eq!(score_mean(&s, &x).unwrap(), score_mean(&r, &x).unwrap());
        prop_assert_eq!(score_conditional(&s, &x).unwrap(), score_conditional(&r, &x).unwrap());
    }

    #[test]
    fn full_mean_score_means_member(seed in 0u64..50, x in point()) {
        let s = small_swarm(seed, 0.0);
        prop_assert_eq!(score_mean(&s, &x).unwrap() == 1.0, s.contains(&x).unwrap());
        prop_assert_eq!(s.contains(&x).unwrap(), s.contains(&x).unwrap());
    }
}

#[test]
fn training_points_score_one() {
    let pts = gaussian(&mut rng(1), 300, 3);
    let s = fit(&Dataset64::new(&pts).unwrap(), &FitConfig { n_models: 200, ..Default::default() }).unwrap();
    for x in &pts {
        assert_eq!(score_mean(&s, x).unwrap(), 1.0);
        assert_eq!(score_conditional(&s, x).unwrap().value, 1.0);
    }
}

#[test]
fn fallback_agrees_with_assigned_outcomes() {
    let left = fit(&boxes(1, 500, &[[0.0, 1.0, 0.0, 1.0]]), &FitConfig { n_models: 100, ..Default::default() }).unwrap();
    let right = fit(&boxes(2, 500, &[[0.8, 2.0, 0.0, 1.0]]), &FitConfig { n_models: 100, ..Default::default() }).unwrap();
    let bundle = ClassifierBundle::new(vec![("left".into(), left), ("right".into(), right)]).unwrap();
    let mut kinds = std::collections::HashSet::new();
    for x in grid2(&[-0.5, -0.5], &[2.5, 1.5], 40) {
        let out = classify(&bundle, &x).unwrap();
        kinds.insert(std::mem::discriminant(&out.kind));
        if let OutcomeKind::Assigned(label) = out.kind {
            assert_eq!(classify_with_score_fallback(&bundle, &x).unwrap(), label);
        }
    }
    assert_eq!(kinds.len(), 3);
}

#[test]
fn boundary_points_are_inside() {
    let h = Halfspace64::new(vec![1.0, 1.0], 1.0).unwrap();
    assert!(h.contains(&[0.5, 0.5]).unwrap());
    assert!(!h.contains(&[0.5, 0.5 + 1e-12]).unwrap());
}

#[test]
fn dimension_mismatch_is_an_error() {
    let s = small_swarm(0, 0.0);
    assert!(matches!(s.contains(&[1.0]), Err(PolyraError::DimensionMismatch { expected: 2, found: 1 })));
}
