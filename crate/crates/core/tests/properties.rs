use lipkit::certify::{check_k_lipschitz, pou_report, random_k_extension};
use lipkit::extension::{extend_to_interval, mcshane_envelopes};
use lipkit::fixtures::{random_instance, Backend};
use lipkit::partition_of_unity::{
    frolik_grouped, staircase, staircase_partial_sum, Ball, CozeroCover,
};
use lipkit::scalar_field::{global_lip, global_lip_values, pointwise_lip, scaled_oscillation};
use lipkit::{Field, Interval, MetricSpace};
use proptest::prelude::*;

fn backend() -> impl Strategy<Value = Backend> {
    prop::sample::select(Backend::ALL.to_vec())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn envelopes_match_brute_force(b in backend(), seed in any::<u64>()) {
        let inst = random_instance(b, seed).unwrap();
        let phi = Field::partial(inst.space.len(), inst.subset.ids().iter().copied().zip(inst.phi.iter().copied())).unwrap();
        let env = mcshane_envelopes(&inst.space, &inst.subset, &phi, inst.k).unwrap();
        let lower = env.lower.tabulate(&inst.space).unwrap();
        let upper = env.upper.tabulate(&inst.space).unwrap();
        for p in inst.space.points() {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for (&x, &v) in inst.subset.ids().iter().zip(&inst.phi) {
                let d = inst.space.dist(x, p).unwrap();
                lo = lo.max(v - inst.k * d);
                hi = hi.min(v + inst.k * d);
            }
            prop_assert!(close(lower[p], lo) && close(upper[p], hi));
            prop_assert!(lower[p] <= upper[p] + 1e-9);
        }
        for (&x, &v) in inst.subset.ids().iter().zip(&inst.phi) {
            prop_assert!(close(lower[x], v) && close(upper[x], v));
        }
        prop_assert!(check_k_lipschitz(&inst.space, &lower, inst.k, 1e-9).pass);
        prop_assert!(check_k_lipschitz(&inst.space, &upper, inst.k, 1e-9).pass);
    }

    #[test]
    fn lower_envelope_is_mirrored_upper(b in backend(), seed in any::<u64>()) {
        let inst = random_instance(b, seed).unwrap();
        let n = inst.space.len();
        let pairs = |s: f64| inst.subset.ids().iter().copied().zip(inst.phi.iter().map(move |v| s * v));
        let env = mcshane_envelopes(&inst.space, &inst.subset, &Field::partial(n, pairs(1.0)).unwrap(), inst.k).unwrap();
        let mirrored = mcshane_envelopes(&inst.space, &inst.subset, &Field::partial(n, pairs(-1.0)).unwrap(), inst.k).unwrap();
        let lower = env.lower.tabulate(&inst.space).unwrap();
        let upper = mirrored.upper.tabulate(&inst.space).unwrap();
        for p in inst.space.points() {
            prop_assert_eq!(lower[p], -upper[p]);
        }
    }

    #[test]
    fn random_extensions_lie_between_envelopes(b in backend(), seed in any::<u64>(), order_seed in any::<u64>()) {
        let inst = random_instance(b, seed).unwrap();
        let phi = Field::partial(inst.space.len(), inst.subset.ids().iter().copied().zip(inst.phi.iter().copied())).unwrap();
        let env = mcshane_envelopes(&inst.space, &inst.subset, &phi, inst.k).unwrap();
        let lower = env.lower.tabulate(&inst.space).unwrap();
        let upper = env.upper.tabulate(&inst.space).unwrap();
        let f = random_k_extension(&inst.space, &inst.subset, &inst.phi, inst.k, None, order_seed).unwrap();
        for p in inst.space.points() {
            prop_assert!(lower[p] <= f[p] + 1e-9 && f[p] <= upper[p] + 1e-9);
        }
        prop_assert!(check_k_lipschitz(&inst.space, &f, inst.k, 1e-9).pass);
    }

    #[test]
    fn bounded_interval_extension_stays_inside(b in backend(), seed in any::<u64>(), pad in 0.0..2.0f64) {
        let inst = random_instance(b, seed).unwrap();
        let lo = inst.phi.iter().copied().fold(f64::INFINITY, f64::min) - pad;
        let hi = inst.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad;
        let phi = Field::partial(inst.space.len(), inst.subset.ids().iter().copied().zip(inst.phi.iter().copied())).unwrap();
        let f = extend_to_interval(&inst.space, &inst.subset, &phi, inst.k, &Interval::closed(lo, hi)).unwrap();
        let vals = f.tabulate(&inst.space).unwrap();
        prop_assert!(vals.iter().all(|&v| lo - 1e-9 <= v && v <= hi + 1e-9));
        prop_assert!(check_k_lipschitz(&inst.space, &vals, inst.k, 1e-9).pass);
        for (&x, &v) in inst.subset.ids().iter().zip(&inst.phi) {
            prop_assert!(close(vals[x], v));
        }
    }

    #[test]
    fn global_lip_is_max_of_pointwise(b in backend(), seed in any::<u64>()) {
        let inst = random_instance(b, seed).unwrap();
        let vals = random_k_extension(&inst.space, &inst.subset, &inst.phi, inst.k, None, seed).unwrap();
        let f = Field::tabulated(vals);
        let global = global_lip(&inst.space, &f).unwrap().value;
        let pointwise = inst
            .space
            .points()
            .map(|p| pointwise_lip(&inst.space, &f, p).unwrap().value)
            .fold(0.0, f64::max);
        prop_assert_eq!(global, pointwise);
        let radii = [4.0, 2.0, 1.0, 0.5, 0.25];
        for p in inst.space.points() {
            let osc = scaled_oscillation(&inst.space, &f, p, &radii).unwrap();
            prop_assert!(osc <= pointwise_lip(&inst.space, &f, p).unwrap().value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lip_is_subadditive(b in backend(), s1 in any::<u64>(), s2 in any::<u64>(), c in -3.0..3.0f64) {
        let inst = random_instance(b, s1).unwrap();
        let f = random_k_extension(&inst.space, &inst.subset, &inst.phi, inst.k, None, s1).unwrap();
        let mut rng_vals = random_k_extension(&inst.space, &inst.subset, &inst.phi, inst.k, None, s2).unwrap();
        rng_vals.iter_mut().for_each(|v| *v *= c);
        let sum: Vec<f64> = f.iter().zip(&rng_vals).map(|(a, b)| a + b).collect();
        let lf = global_lip_values(&inst.space, &f).value;
        let lg = global_lip_values(&inst.space, &rng_vals).value;
        let ls = global_lip_values(&inst.space, &sum).value;
        prop_assert!(ls <= (lf + lg) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn staircase_telescopes(t in 1e-3..20.0f64, k_max in 1usize..60) {
        let direct: f64 = (1..=k_max).map(|k| staircase(k, t).unwrap()).sum();
        prop_assert!(close(direct, staircase_partial_sum(k_max, t)));
        prop_assert!(close(direct, (k_max as f64).min(1.0 / t)));
        for k in 1..=k_max {
            let v = staircase(k, t).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn ball_cover_partition_sums_to_one(
        b in backend(),
        seed in any::<u64>(),
        radii in prop::collection::vec(0.05..1.5f64, 1..6),
    ) {
        let inst = random_instance(b, seed).unwrap();
        let space: &MetricSpace = &inst.space;
        let n = space.len();
        // one set per radius centred at every k-th point, plus a set covering everything
        let mut unions: Vec<Vec<Ball>> = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| (i % n..n).step_by(radii.len()).map(|c| Ball { center: c, radius: r }).collect())
            .collect();
        unions.push(space.points().map(|c| Ball { center: c, radius: 0.01 }).collect());
        let cover = CozeroCover::from_balls(space, &unions, 1.0).unwrap();
        let fp = frolik_grouped(space, &cover).unwrap();
        let report = pou_report(space, &fp.pou, Some(cover.tables()), 1e-9).unwrap();
        prop_assert!(report.pass(), "{:?}", report.certificates().iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }
}
