use std::sync::OnceLock;

use cuspsum_core::bounds::bombieri_check;
use cuspsum_core::coefficients::{generate_delta_coefficients, read_cache, write_cache, CoefficientTable};
use cuspsum_core::moments::{exact_moment, moment_of_range, MomentSpec};
use cuspsum_core::spacing::{spacing_count_pairsum, SpacingQuery};
use cuspsum_core::sums::{build_step_function, make_twist, short_sum_direct, ShortSumSpec, UnitRoots};
use num_complex::Complex64;
use proptest::prelude::*;

fn table() -> &'static CoefficientTable {
    static T: OnceLock<CoefficientTable> = OnceLock::new();
    T.get_or_init(|| generate_delta_coefficients(4000).unwrap())
}

fn spec_strategy() -> impl Strategy<Value = ShortSumSpec> {
    (1.0f64..1500.0, 0.0f64..1.0, 1u64..10, 0i64..40).prop_filter_map("coprime", |(m, frac, k, h)| {
        let twist = make_twist(h % k as i64, k).ok()?;
        ShortSumSpec::new(m, (frac * m.min(60.0)).max(0.05), twist).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_function_matches_direct(spec in spec_strategy(), xs in prop::collection::vec(0.0f64..=1.0, 16)) {
        let t = table();
        let sf = build_step_function(&spec, t).unwrap();
        let m = spec.m();
        let lo = m.floor() as u64;
        let hi = spec.max_index();
        let mass: f64 = (lo.max(1)..=hi).map(|n| t.a(n).abs()).sum();
        for u in xs {
            let x = m + u * m;
            let d = short_sum_direct(x, &spec, t).unwrap();
            let s = sf.value_at(x).unwrap();
            prop_assert!((s - d).norm() <= 1e-9 * (1.0 + mass), "x={x}");
        }
    }

    #[test]
    fn conjugate_twist_conjugates(spec in spec_strategy(), u in 0.0f64..=1.0) {
        let t = table();
        let x = spec.m() * (1.0 + u);
        let conj = ShortSumSpec::new(spec.m(), spec.delta(), spec.twist().conjugate()).unwrap();
        let a = short_sum_direct(x, &spec, t).unwrap();
        let b = short_sum_direct(x, &conj, t).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn roots_are_exactly_periodic(k in 1u64..200, h in 0i64..1000, n in 0u64..100_000) {
        if let Ok(tw) = make_twist(h % k as i64, k) {
            let roots = UnitRoots::new(k);
            prop_assert_eq!(roots.get(tw.residue(n)), roots.get(tw.residue(n + k)));
        }
    }

    #[test]
    fn moment_splits_at_breakpoint(spec in spec_strategy(), a in prop::sample::select(vec![1.0, 2.0, 3.5, 4.0])) {
        let sf = build_step_function(&spec, table()).unwrap();
        let bp = sf.breakpoints();
        let cut = bp[bp.len() / 2];
        let (m, top) = (spec.m(), 2.0 * spec.m());
        let whole = moment_of_range(&sf, a, m, top).value;
        let parts = moment_of_range(&sf, a, m, cut).value + moment_of_range(&sf, a, cut, top).value;
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn moment_scales_by_power(spec in spec_strategy(), c in 0.1f64..10.0, a in prop::sample::select(vec![2.0, 4.0])) {
        let t = table();
        let ms = MomentSpec::new(a, spec).unwrap();
        let base = exact_moment(&ms, t).unwrap();
        let scaled = exact_moment(&ms, &t.scaled(c)).unwrap();
        let want = base.value * c.powf(a);
        prop_assert!((scaled.value - want).abs() <= 1e-9 * want.abs().max(f64::MIN_POSITIVE));
        if base.max_abs > 0.0 {
            prop_assert_eq!(scaled.argmax, base.argmax);
        }
    }

    #[test]
    fn spacing_monotone_in_delta(l in 1.0f64..40.0, d1 in 1e-9f64..0.5, d2 in 1e-9f64..0.5, omega in prop::sample::select(vec![2.0, 3.0])) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = spacing_count_pairsum(&SpacingQuery::new(l, lo, omega).unwrap()).unwrap().count;
        let b = spacing_count_pairsum(&SpacingQuery::new(l, hi, omega).unwrap()).unwrap().count;
        prop_assert!(a <= b);
        let (first, last) = SpacingQuery::new(l, lo, omega).unwrap().range();
        let n = (last + 1).saturating_sub(first);
        prop_assert!(a >= 2 * n * n - n);
    }

    #[test]
    fn bombieri_holds(
        n in 1usize..6,
        r in 1usize..6,
        vals in prop::collection::vec(-1.0f64..1.0, 72),
    ) {
        let mut it = vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).cycle();
        let xi: Vec<Complex64> = (0..n).map(|_| it.next().unwrap()).collect();
        let phis: Vec<Vec<Complex64>> = (0..r).map(|_| (0..n).map(|_| it.next().unwrap()).collect()).collect();
        let (lhs, rhs) = bombieri_check(&xi, &phis).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}

#[test]
fn cache_round_trip_is_exact() {
    let t = table();
    let mut buf = Vec::new();
    write_cache(t, &mut buf).unwrap();
    let (back, report) = read_cache(&buf[..]).unwrap();
    assert!(report.is_empty());
    assert_eq!(back.exact(), t.exact());
    let bits = |t: &CoefficientTable| t.normalized().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&back), bits(t));
}
