use proptest::prelude::*;

use staopt::harness::{rank_sum_test, Significance};
use staopt::history::{HistoryEntry, HistorySet, HistoryTag};
use staopt::qi::{qi_point, QiAgents};
use staopt::{clamp, make, run, BenchmarkId, Bounds, ObjectiveFunction, Point, RunLimits, Solution, Variant, VariantConfig};

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

fn function() -> impl Strategy<Value = BenchmarkId> {
    prop::sample::select(BenchmarkId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_are_monotone_and_within_budget(id in function(), v in variant(), dim in 2usize..6, seed in any::<u64>(), budget in 1u64..4000) {
        let f = make(id, dim).unwrap();
        let r = run(&f, &VariantConfig::new(v, seed), &RunLimits::new(budget)).unwrap();
        prop_assert!(r.total_fes <= budget);
        prop_assert!(r.trace.windows(2).all(|w| w[1].fitness < w[0].fitness && w[1].fe > w[0].fe));
        prop_assert!(r.final_best.fitness <= r.trace[0].fitness);
        prop_assert!(f.bounds().contains(&r.final_best.point));
        prop_assert_eq!(f.value(&r.final_best.point), r.final_best.fitness);
    }
}

proptest! {
    #[test]
    fn clamp_is_idempotent_and_inside(coords in prop::collection::vec(-1e3f64..1e3, 1..8), lo in -50.0f64..0.0, width in 0.1f64..100.0) {
        let b = Bounds::uniform(coords.len(), lo, lo + width).unwrap();
        let p = clamp(&Point::new(coords).unwrap(), &b).unwrap();
        prop_assert!(b.contains(&p));
        prop_assert_eq!(clamp(&p, &b).unwrap(), p);
    }

    #[test]
    fn qi_point_stays_in_bounds(
        pts in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 3),
        fits in prop::collection::vec(0.0f64..100.0, 3),
    ) {
        let s: Vec<Solution> = pts.into_iter().zip(fits).map(|(c, f)| Solution::new(Point::new(c).unwrap(), f)).collect();
        let b = Bounds::uniform(3, -1.0, 1.0).unwrap();
        let p = qi_point(QiAgents { a: &s[0], b: &s[1], best: &s[2] }, &b);
        prop_assert!(b.contains(&p));
    }

    #[test]
    fn rank_sum_is_antisymmetric(
        a in prop::collection::vec(0u8..10, 2..14),
        b in prop::collection::vec(0u8..10, 2..14),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let ab = rank_sum_test(&a, &b, 0.05).unwrap();
        let ba = rank_sum_test(&b, &a, 0.05).unwrap();
        prop_assert_eq!(ab, ba.flipped());
        if a == b {
            prop_assert_eq!(ab, Significance::NotSignificant);
        }
    }

    #[test]
    fn history_keeps_size_and_tag_balance(fits in prop::collection::vec(0.0f64..10.0, 1..30), dim in 1usize..5) {
        let entries = (0..=dim)
            .map(|i| HistoryEntry {
                solution: Solution::new(Point::new(vec![i as f64; dim]).unwrap(), 5.0),
                tag: HistoryTag::Old,
            })
            .collect();
        let mut h = HistorySet::from_entries(entries).unwrap();
        let mut last = h.update_rate();
        for f in fits {
            h.collect(Solution::new(Point::new(vec![f; dim]).unwrap(), f));
            prop_assert_eq!(h.len(), dim + 1);
            prop_assert_eq!(h.count(HistoryTag::Old) + h.count(HistoryTag::Current), dim + 1);
            prop_assert!(h.update_rate() >= last);
            last = h.update_rate();
        }
    }
}

#[test]
fn qi_variants_reduce_to_nm_when_target_is_unreachable() {
    let id = BenchmarkId::F6;
    let base = make(id, 4).unwrap();
    let far = ObjectiveFunction::new("far", base.bounds().clone(), move |x| id.eval(x)).with_target(-1e9);
    let limits = RunLimits::new(20_000);
    for seed in 0..5 {
        let nm = run(&far, &VariantConfig::new(Variant::NM_POSTA, seed), &limits).unwrap();
        let nmqi = run(&far, &VariantConfig::new(Variant::NMQI_POSTA, seed), &limits).unwrap();
        assert_eq!(nm.trace, nmqi.trace);
        assert_eq!(nm.final_best, nmqi.final_best);
    }
}

#[test]
fn objective_without_target_never_reports_success() {
    let f = ObjectiveFunction::new("sq", Bounds::uniform(2, -5.0, 5.0).unwrap(), |x| x.iter().map(|v| v * v).sum());
    let r = run(&f, &VariantConfig::new(Variant::NMQI_POSTA, 3), &RunLimits::new(5_000)).unwrap();
    assert!(!r.success);
    assert!(r.final_best.fitness < 1e-6);
}

#[test]
fn nmqi_beats_posta_fes_on_sphere() {
    let f = make(BenchmarkId::F6, 20).unwrap();
    let limits = RunLimits::new(staopt::harness::fe_budget(20).unwrap());
    let wins = (0..10)
        .filter(|&seed| {
            let p = run(&f, &VariantConfig::new(Variant::POSTA, seed), &limits).unwrap();
            let q = run(&f, &VariantConfig::new(Variant::NMQI_POSTA, seed), &limits).unwrap();
            assert_eq!((p.final_best.fitness, q.final_best.fitness), (0.0, 0.0));
            q.total_fes < p.total_fes
        })
        .count();
    assert!(wins > 5, "NMQI used fewer FEs in only {wins}/10 seeds");
}
