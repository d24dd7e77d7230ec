mod common;

use common::*;
use polyra::logic::{distribute_to_dnf, LogicNode};
use polyra::*;
use proptest::prelude::*;

fn leaf(dim: usize) -> impl Strategy<Value = LogicNode<f64>> {
    (prop::collection::vec(-2.0..2.0f64, dim), -2.0..2.0f64).prop_map(|(n, b)| LogicNode::Leaf(Halfspace::new(n, b).unwrap()))
}

fn tree(dim: usize) -> impl Strategy<Value = LogicNode<f64>> {
    let base = prop_oneof![8 => leaf(dim), 1 => Just(LogicNode::True), 1 => Just(LogicNode::False)];
    base.prop_recursive(5, 40, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(|c| LogicNode::Not(Box::new(c))),
            prop::collection::vec(inner.clone(), 1..4).prop_map(LogicNode::And),
            prop::collection::vec(inner, 1..4).prop_map(LogicNode::Or),
        ]
    })
}

fn margins_clear(t: &LogicNode<f64>, x: &[f64]) -> bool {
    match t {
        LogicNode::Leaf(h) => h.margin(x).unwrap().abs() > 1e-6,
        LogicNode::Not(c) => margins_clear(c, x),
        LogicNode::And(cs) | LogicNode::Or(cs) => cs.iter().all(|c| margins_clear(c, x)),
        LogicNode::True | LogicNode::False => true,
    }
}

fn polytope(dim: usize) -> impl Strategy<Value = Polytope64> {
    prop::collection::vec((prop::collection::vec(-2.0..2.0f64, dim), -1.0..2.0f64), 1..4)
        .prop_map(move |rows| Polytope::new(dim, rows.into_iter().map(|(n, b)| Halfspace::new(n, b).unwrap()).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplify_preserves_meaning(t in tree(2), xs in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 500)) {
        let s = simplify(&t);
        for x in xs.iter().filter(|x| margins_clear(&t, x)) {
            prop_assert_eq!(s.eval(x).unwrap(), t.eval(x).unwrap());
        }
    }

    #[test]
    fn simplify_is_idempotent_and_closed(t in tree(3)) {
        let s = simplify(&t);
        prop_assert!(s.is_simplified());
        prop_assert_eq!(simplify(&s), s);
    }

    #[test]
    fn distribution_is_exact(
        a in prop::collection::vec(polytope(2), 1..4),
        b in prop::collection::vec(polytope(2), 1..4),
        xs in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 200),
    ) {
        let q = DnfForm::new(2, a).unwrap();
        let d = distribute_to_dnf(&q, &b).unwrap();
        prop_assert_eq!(d.len(), q.len() * b.len());
        for x in &xs {
            let rhs = q.contains(x).unwrap() && b.iter().any(|p| p.contains(x).unwrap());
            prop_assert_eq!(d.contains(x).unwrap(), rhs);
        }
    }

    #[test]
    fn rangefinder_matches_tree(t in tree(1)) {
        let s = simplify(&t);
        let set = rangefinder(&s).unwrap();
        prop_assert!(set.len() <= s.leaf_count().max(1));
        let mut cuts: Vec<f64> = set.intervals().iter().flat_map(|iv| [iv.lo, iv.hi]).collect();
        collect_cuts(&s, &mut cuts);
        for i in 0..10_000 {
            let x = -10.0 + 20.0 * i as f64 / 9999.0;
            if cuts.iter().any(|c| (c - x).abs() < 1e-5) {
                continue;
            }
            prop_assert_eq!(set.contains(x), s.eval(&[x]).unwrap(), "x = {}", x);
        }
    }
}

fn collect_cuts(t: &LogicNode<f64>, out: &mut Vec<f64>) {
    match t {
        LogicNode::Leaf(h) if h.normal()[0].abs() > 1e-3 => out.push(h.bound() / h.normal()[0]),
        LogicNode::Leaf(_) | LogicNode::True | LogicNode::False => {}
        LogicNode::Not(c) => collect_cuts(c, out),
        LogicNode::And(cs) | LogicNode::Or(cs) => cs.iter().for_each(|c| collect_cuts(c, out)),
    }
}

#[test]
fn swarm_tree_agrees_with_swarm() {
    let pts = gaussian(&mut rng(2), 300, 2);
    let s = fit(&Dataset64::new(&pts).unwrap(), &FitConfig { n_models: 30, ..Default::default() }).unwrap();
    let t = swarm_to_tree(&s);
    let simple = simplify(&t);
    for x in grid2(&[-3.0, -3.0], &[3.0, 3.0], 60) {
        assert_eq!(t.eval(&x).unwrap(), s.contains(&x).unwrap());
        if margins_clear(&t, &x) {
            assert_eq!(simple.eval(&x).unwrap(), s.contains(&x).unwrap());
        }
    }
}

#[test]
fn trees_round_trip_through_json() {
    let t = LogicNode::Or(vec![
        LogicNode::Leaf(Halfspace::new(vec![1.0, -0.5], 0.25).unwrap()),
        LogicNode::Not(Box::new(LogicNode::True)),
    ]);
    let text = serde_json::to_string(&t).unwrap();
    assert_eq!(serde_json::from_str::<LogicNode64>(&text).unwrap(), t);
}
