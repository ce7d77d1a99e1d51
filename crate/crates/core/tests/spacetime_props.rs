mod common;

use causal_metrics::pathval::PolylinePath;
use causal_metrics::spacetime::{
    self, Event, MetricField, OptimizerConfig, Quadrature,
};
use causal_metrics::ExtReal;
use proptest::prelude::*;
use rand::Rng;

fn event(n: usize) -> impl Strategy<Value = Event> {
    proptest::collection::vec(-5.0f64..5.0, n).prop_map(Event)
}

fn event_pair() -> impl Strategy<Value = (Event, Event)> {
    (2usize..=4).prop_flat_map(|n| (event(n), event(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn inertial_path_maximizes_proper_time(seed in any::<u64>(), n in 2usize..=4, segs in 1usize..6) {
        let mut rng = common::rng(seed);
        let path = common::random_causal_polyline(&mut rng, n, segs, 0.1);
        let f = MetricField::minkowski(n).unwrap();
        let tau = spacetime::proper_time(&f, &path, Quadrature::ExactMinkowski).unwrap();
        let direct = spacetime::event_antimetric(&f, path.first(), path.last()).unwrap();
        prop_assert!(tau.is_finite());
        prop_assert!(tau.to_f64() <= direct.to_f64() + 1e-9, "{tau} > {direct}");
    }

    #[test]
    fn order_and_rho_agree((x, y) in event_pair()) {
        let f = MetricField::minkowski(x.dim()).unwrap();
        let gamma = spacetime::event_antimetric(&f, &x, &y).unwrap();
        let rho = spacetime::event_rho(&f, &x, &y).unwrap();
        prop_assert_eq!(gamma.negate(), rho);
        prop_assert_eq!(spacetime::causally_precedes(&f, &x, &y).unwrap(), rho < ExtReal::PosInf);
        prop_assert!(rho <= ExtReal::ZERO || rho == ExtReal::PosInf);
    }

    #[test]
    fn causal_paths_are_monotone_vertex_chains(seed in any::<u64>(), n in 2usize..=3, segs in 1usize..6) {
        let mut rng = common::rng(seed);
        let f = MetricField::minkowski(n).unwrap();
        // mix causal and arbitrary steps
        let mut pts = vec![Event(vec![0.0; n])];
        for _ in 0..segs {
            let step = if rng.gen_bool(0.7) {
                {
                    let boundary = rng.gen_bool(0.2);
                    common::random_cone_vector(&mut rng, n, boundary)
                }
            } else {
                common::random_vector(&mut rng, n, 2.0)
            };
            let next = pts.last().unwrap().offset(&step);
            pts.push(next);
        }
        let chain = pts.windows(2).all(|w| spacetime::causally_precedes(&f, &w[0], &w[1]).unwrap());
        let path = PolylinePath::uniform(pts).unwrap();
        let check = spacetime::is_causal_path(&f, &path, 1).unwrap();
        prop_assert_eq!(check.causal, chain);
        prop_assert_eq!(check.violation.is_none(), chain);
    }

    #[test]
    fn proper_time_is_additive(seed in any::<u64>(), n in 2usize..=4, a in 1usize..4, b in 1usize..4) {
        let mut rng = common::rng(seed);
        let f = MetricField::minkowski(n).unwrap();
        let first = common::random_causal_polyline(&mut rng, n, a, 0.1);
        let mut pts = vec![first.last().clone()];
        for _ in 0..b {
            let step = common::random_cone_vector(&mut rng, n, false);
            let next = pts.last().unwrap().offset(&step);
            pts.push(next);
        }
        let second = PolylinePath::uniform(pts.clone()).unwrap();
        let mut joined: Vec<Event> = first.points().to_vec();
        joined.extend(pts.into_iter().skip(1));
        let whole = PolylinePath::uniform(joined).unwrap();
        let q = Quadrature::ExactMinkowski;
        let parts = spacetime::proper_time(&f, &first, q).unwrap().add_gain(spacetime::proper_time(&f, &second, q).unwrap());
        let total = spacetime::proper_time(&f, &whole, q).unwrap();
        prop_assert!((total.to_f64() - parts.to_f64()).abs() <= 1e-12 * (1.0 + total.to_f64()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rho_g_is_a_one_sided_bound(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = common::rng(seed);
        let f = MetricField::minkowski(n).unwrap();
        let x = Event((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let y = x.offset(&common::random_cone_vector(&mut rng, n, false));
        let cfg = OptimizerConfig { iterations: 15, seed, ..Default::default() };
        let est = spacetime::rho_g_estimate(&f, &x, &y, &cfg).unwrap();
        let exact = spacetime::event_rho(&f, &x, &y).unwrap().to_f64();
        prop_assert!(est.rho.to_f64() >= exact - 1e-9, "{} < {exact}", est.rho);
        prop_assert!(est.trace.windows(2).all(|w| w[1].rho <= w[0].rho));
        prop_assert_eq!(est.trace.last().unwrap().rho, est.rho);
    }
}

#[test]
fn quadrature_orders_on_power_field() {
    let f = MetricField::diagonal_power(1.0, 2).unwrap();
    let path = PolylinePath::uniform(vec![Event(vec![1.0, 0.0]), Event(vec![2.0, 0.3])]).unwrap();
    let reference = common::power_one_reference();
    let err = |q| (spacetime::proper_time(&f, &path, q).unwrap().to_f64() - reference).abs();
    for k in [4usize, 8] {
        let mid = err(Quadrature::Midpoint(k)) / err(Quadrature::Midpoint(2 * k));
        let simp = err(Quadrature::Simpson(k)) / err(Quadrature::Simpson(2 * k));
        assert!((mid.log2() - 2.0).abs() < 0.3, "midpoint order {}", mid.log2());
        assert!((simp.log2() - 4.0).abs() < 0.5, "simpson order {}", simp.log2());
    }
    assert!(err(Quadrature::Simpson(64)) < 1e-10);
}

#[test]
fn comoving_curves_in_power_fields() {
    for p in [0.5, 1.0, 2.0] {
        let f = MetricField::diagonal_power(p, 3).unwrap();
        let path = PolylinePath::uniform(vec![Event(vec![1.0, 0.4, -0.2]), Event(vec![2.5, 0.4, -0.2])]).unwrap();
        let tau = spacetime::proper_time(&f, &path, Quadrature::Midpoint(16)).unwrap();
        assert!((tau.to_f64() - 1.5).abs() < 1e-12);
    }
}

/// Taking the infimum of proper time instead of minus its supremum collapses:
/// chains of light rays make every causally related pair cost 0.
#[test]
fn inf_of_proper_time_degenerates_to_zero() {
    let f = MetricField::minkowski(2).unwrap();
    let (x, y) = (Event(vec![0.0, 0.0]), Event(vec![2.0, 1.0]));
    for pairs in [1usize, 3, 10] {
        // right-moving ray of length 1.5 / pairs, then left-moving of 0.5 / pairs
        let (r, l) = (1.5 / pairs as f64, 0.5 / pairs as f64);
        let mut pts = vec![x.clone()];
        for _ in 0..pairs {
            let p = pts.last().unwrap().0.clone();
            pts.push(Event(vec![p[0] + r, p[1] + r]));
            pts.push(Event(vec![p[0] + r + l, p[1] + r - l]));
        }
        let end = pts.last().unwrap().0.clone();
        assert!((end[0] - 2.0).abs() < 1e-12 && (end[1] - 1.0).abs() < 1e-12);
        *pts.last_mut().unwrap() = y.clone();
        let path = PolylinePath::uniform(pts).unwrap();
        let tau = spacetime::proper_time(&f, &path, Quadrature::ExactMinkowski).unwrap();
        assert!(tau.is_finite());
        assert!(tau.to_f64() < 1e-6, "{tau}");
    }
    assert!(spacetime::event_antimetric(&f, &x, &y).unwrap() > ExtReal::new(1.7));
}
