//! Twisted coefficient sums.
//!
//! The short sum `S(x) = sum_{x <= n <= x + Delta} a(n) e(n h / k)` is piecewise
//! constant in `x`: it only changes where an integer enters the window
//! (`x = n - Delta`) or leaves it (`x = n`). [`build_step_function`] sweeps
//! those events once and records every plateau, which makes integrals of
//! `|S(x)|^A` over `[M, 2M]` finite sums.
//!
//! Plateau values belong to the open intervals between breakpoints; the value
//! of `S` exactly at a breakpoint is never used.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coefficients::CoefficientTable;
use crate::error::{invalid, Error, Result};
use crate::numeric::{gcd, ComplexSum};

/// Sliding-window sums are recomputed from scratch after this many events.
pub const RESYNC_INTERVAL: usize = 1 << 16;

/// Additive twist `e(n h / k)` with `gcd(h, k) = 1`, stored with `h` reduced
/// into `[0, k)` and the inverse `h_bar` of `h` modulo `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalTwist {
    h: u64,
    k: u64,
    h_bar: u64,
}

impl RationalTwist {
    pub fn new(h: i64, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k", "must be a positive integer"));
        }
        let g = gcd(h.unsigned_abs(), k);
        if g != 1 {
            return Err(Error::NotCoprime { h, k, gcd: g });
        }
        let h_red = h.rem_euclid(k as i64) as u64;
        let h_bar = if k == 1 { 0 } else { mod_inverse(h_red, k) };
        Ok(Self { h: h_red, k, h_bar })
    }

    /// The trivial twist `h/k = 0/1`.
    pub fn trivial() -> Self {
        Self { h: 0, k: 1, h_bar: 0 }
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn h_bar(&self) -> u64 {
        self.h_bar
    }

    /// The twist `-h / k`.
    pub fn conjugate(&self) -> Self {
        Self::new(-(self.h as i64), self.k).expect("conjugate of a valid twist is valid")
    }

    /// Residue of `n h` modulo `k`.
    #[inline]
    pub fn residue(&self, n: u64) -> u64 {
        ((n as u128 * self.h as u128) % self.k as u128) as u64
    }

    /// Residue of `-n h_bar` modulo `k`.
    #[inline]
    pub fn dual_residue(&self, n: u64) -> u64 {
        let r = ((n as u128 * self.h_bar as u128) % self.k as u128) as u64;
        (self.k - r) % self.k
    }
}

pub fn make_twist(h: i64, k: u64) -> Result<RationalTwist> {
    RationalTwist::new(h, k)
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// `e(r / k)` for `r = 0..k`. Entries `r` and `k - r` are exact conjugates and
/// the quarter points are exact.
#[derive(Debug, Clone)]
pub struct UnitRoots {
    roots: Vec<Complex64>,
}

impl UnitRoots {
    pub fn new(k: u64) -> Self {
        let k = k as usize;
        let mut roots = vec![Complex64::new(1.0, 0.0); k];
        for r in 1..=k / 2 {
            let z = if 4 * r == k {
                Complex64::new(0.0, 1.0)
            } else if 2 * r == k {
                Complex64::new(-1.0, 0.0)
            } else {
                let theta = TAU * r as f64 / k as f64;
                Complex64::new(theta.cos(), theta.sin())
            };
            roots[r] = z;
            roots[k - r] = z.conj();
        }
        Self { roots }
    }

    #[inline]
    pub fn get(&self, residue: u64) -> Complex64 {
        self.roots[residue as usize]
    }
}

/// Parameters of a short sum: window length `Delta` over `x in [M, 2M]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortSumSpec {
    m: f64,
    delta: f64,
    twist: RationalTwist,
}

impl ShortSumSpec {
    /// Requires `M >= 1` and `0 < Delta <= M`. Windows shorter than 1 are
    /// accepted here; theorem drivers impose `Delta >= 1` themselves.
    pub fn new(m: f64, delta: f64, twist: RationalTwist) -> Result<Self> {
        if !(m >= 1.0) || !m.is_finite() {
            return Err(invalid("M", format!("must be a finite real >= 1, got {m}")));
        }
        if !(delta > 0.0) || delta > m {
            return Err(invalid("Delta", format!("must lie in (0, M] = (0, {m}], got {delta}")));
        }
        Ok(Self { m, delta, twist })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn twist(&self) -> RationalTwist {
        self.twist
    }

    /// Largest coefficient index touched by a sweep over `[M, 2M]`.
    pub fn max_index(&self) -> u64 {
        (2.0 * self.m + self.delta).floor() as u64
    }
}

/// Twisted coefficients `a(n) e(n h / k)` read from a table.
pub(crate) struct TwistedCoefficients<'a> {
    a: &'a [f64],
    twist: RationalTwist,
    roots: UnitRoots,
}

impl<'a> TwistedCoefficients<'a> {
    pub(crate) fn new(t: &'a CoefficientTable, twist: RationalTwist) -> Self {
        Self {
            a: t.normalized(),
            twist,
            roots: UnitRoots::new(twist.k()),
        }
    }

    #[inline]
    pub(crate) fn get(&self, n: u64) -> Complex64 {
        self.roots.get(self.twist.residue(n)) * self.a[(n - 1) as usize]
    }

    /// Compensated sum over `lo..=hi` (empty when `lo > hi`).
    pub(crate) fn range_sum(&self, lo: u64, hi: u64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for n in lo..=hi {
            acc.add(self.get(n));
        }
        acc.value()
    }
}

/// `sum_{x <= n <= x + Delta} a(n) e(n h / k)` evaluated term by term.
pub fn short_sum_direct(x: f64, spec: &ShortSumSpec, t: &CoefficientTable) -> Result<Complex64> {
    let hi = (x + spec.delta).floor();
    if hi >= 1.0 {
        t.require(hi as u64)?;
    }
    let lo = x.ceil().max(1.0);
    if hi < lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(TwistedCoefficients::new(t, spec.twist).range_sum(lo as u64, hi as u64))
}

/// `sum_{n <= x} a(n) e(n h / k)`.
pub fn long_sum_direct(x: f64, twist: RationalTwist, t: &CoefficientTable) -> Result<Complex64> {
    if x < 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let hi = x.floor() as u64;
    t.require(hi)?;
    Ok(TwistedCoefficients::new(t, twist).range_sum(1, hi))
}

/// Running prefix sums `P[i] = sum_{n <= i + 1} a(n) e(n h / k)` for
/// `i < upto`.
pub fn long_sum_prefixes(twist: RationalTwist, t: &CoefficientTable, upto: u64) -> Result<Vec<Complex64>> {
    t.require(upto)?;
    let c = TwistedCoefficients::new(t, twist);
    let mut acc = ComplexSum::new();
    Ok((1..=upto)
        .map(|n| {
            acc.add(c.get(n));
            acc.value()
        })
        .collect())
}

/// `S(x)` over `[M, 2M]` as breakpoints and plateau values.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    spec: ShortSumSpec,
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

impl StepFunction {
    /// Assembles a step function from raw parts. Breakpoints must ascend
    /// strictly from `M` to `2M`, with one value per interval.
    pub fn from_parts(spec: ShortSumSpec, breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::DimensionMismatch {
                expected: breakpoints.len().saturating_sub(1),
                found: values.len(),
            });
        }
        if breakpoints[0] != spec.m || *breakpoints.last().unwrap() != 2.0 * spec.m {
            return Err(invalid("breakpoints", "must start at M and end at 2M"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("breakpoints", "must be strictly ascending"));
        }
        Ok(Self {
            spec,
            breakpoints,
            values,
        })
    }

    pub fn spec(&self) -> &ShortSumSpec {
        &self.spec
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn plateau_count(&self) -> usize {
        self.values.len()
    }

    /// `(left, right, value)` for every plateau.
    pub fn plateaus(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (w[0], w[1], *v))
    }

    /// Index of the plateau containing `x`, taking `[b_i, b_{i+1})` with the
    /// last plateau closed at `2M`. `None` outside `[M, 2M]`.
    pub fn plateau_index(&self, x: f64) -> Option<usize> {
        let first = self.breakpoints[0];
        let last = *self.breakpoints.last().unwrap();
        if !(x >= first && x <= last) {
            return None;
        }
        let i = self.breakpoints.partition_point(|b| *b <= x);
        Some((i - 1).min(self.values.len() - 1))
    }

    pub fn value_at(&self, x: f64) -> Option<Complex64> {
        self.plateau_index(x).map(|i| self.values[i])
    }

    /// Writes `x_left,x_right,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x_left,x_right,re,im")?;
        for (l, r, v) in self.plateaus() {
            writeln!(w, "{l},{r},{},{}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Plateau layout: breakpoints plus the integer window `lo..=hi` active on
/// each plateau.
struct Sweep {
    breakpoints: Vec<f64>,
    windows: Vec<(u64, u64)>,
}

fn sweep_events(spec: &ShortSumSpec) -> Sweep {
    let (m, delta) = (spec.m, spec.delta);
    let two_m = 2.0 * m;
    let enter_at = |n: u64| n as f64 - delta;

    // initial window for x slightly above M: M < n and n - Delta <= M
    let lo0 = m.floor() as u64 + 1;
    let mut next_enter = ((m + delta).floor() as u64).max(1);
    while enter_at(next_enter) <= m {
        next_enter += 1;
    }
    while next_enter > 1 && enter_at(next_enter - 1) > m {
        next_enter -= 1;
    }
    let (mut lo, mut hi) = (lo0, next_enter - 1);
    let mut next_leave = lo0;

    let mut breakpoints = vec![m];
    let mut windows = vec![(lo, hi)];
    loop {
        let leave_x = next_leave as f64;
        let enter_x = enter_at(next_enter);
        let x = leave_x.min(enter_x);
        if x >= two_m {
            break;
        }
        if leave_x == x {
            lo += 1;
            next_leave += 1;
        }
        if enter_x == x {
            hi += 1;
            next_enter += 1;
        }
        breakpoints.push(x);
        windows.push((lo, hi));
    }
    breakpoints.push(two_m);
    Sweep {
        breakpoints,
        windows,
    }
}

fn slide_values(coeffs: &TwistedCoefficients<'_>, windows: &[(u64, u64)]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(windows.len());
    let Some(&(lo0, hi0)) = windows.first() else {
        return out;
    };
    let mut acc = ComplexSum::new();
    acc.add(coeffs.range_sum(lo0, hi0));
    out.push(acc.value());
    let (mut lo, mut hi) = (lo0, hi0);
    let mut events = 0usize;
    for &(new_lo, new_hi) in &windows[1..] {
        for n in lo..new_lo {
            acc.sub(coeffs.get(n));
        }
        for n in hi + 1..=new_hi {
            acc.add(coeffs.get(n));
        }
        events += (new_lo - lo + new_hi - hi) as usize;
        (lo, hi) = (new_lo, new_hi);
        if events >= RESYNC_INTERVAL {
            acc = ComplexSum::new();
            acc.add(coeffs.range_sum(lo, hi));
            events = 0;
        }
        out.push(acc.value());
    }
    out
}

/// Event-driven sweep of `S(x)` over `[M, 2M]`.
pub fn build_step_function(spec: &ShortSumSpec, t: &CoefficientTable) -> Result<StepFunction> {
    build_step_function_partitioned(spec, t, 1)
}

/// Same sweep with `[M, 2M]` cut into `parts` plateau ranges that are swept
/// concurrently, each starting from its own from-scratch window sum. The
/// result depends only on `parts`, not on scheduling.
pub fn build_step_function_partitioned(
    spec: &ShortSumSpec,
    t: &CoefficientTable,
    parts: usize,
) -> Result<StepFunction> {
    t.require(spec.max_index())?;
    let sweep = sweep_events(spec);
    let coeffs = TwistedCoefficients::new(t, spec.twist);
    let parts = parts.max(1);
    let chunk = sweep.windows.len().div_ceil(parts).max(1);
    let values: Vec<Complex64> = if parts == 1 {
        slide_values(&coeffs, &sweep.windows)
    } else {
        sweep
            .windows
            .par_chunks(chunk)
            .map(|w| slide_values(&coeffs, w))
            .collect::<Vec<_>>()
            .concat()
    };
    Ok(StepFunction {
        spec: *spec,
        breakpoints: sweep.breakpoints,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::generate_delta_coefficients;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn twist_construction() {
        let t = make_twist(1, 1).unwrap();
        assert_eq!((t.h(), t.k(), t.h_bar()), (0, 1, 0));
        let t = make_twist(3, 5).unwrap();
        assert_eq!(t.h_bar(), 2);
        let t = make_twist(-3, 5).unwrap();
        assert_eq!((t.h(), t.h_bar()), (2, 3));
        assert!(matches!(make_twist(2, 4), Err(Error::NotCoprime { gcd: 2, .. })));
        assert!(make_twist(1, 0).is_err());
    }

    #[test]
    fn short_sum_examples() {
        let t = generate_delta_coefficients(100).unwrap();
        let trivial = ShortSumSpec::new(10.0, 1.0, RationalTwist::trivial()).unwrap();
        let s = short_sum_direct(2.0, &trivial, &t).unwrap();
        assert_eq!(s, Complex64::new(t.a(2) + t.a(3), 0.0));

        let half = ShortSumSpec::new(10.0, 1.0, make_twist(1, 2).unwrap()).unwrap();
        let s = short_sum_direct(2.0, &half, &t).unwrap();
        assert!(close(s, Complex64::new(t.a(2) - t.a(3), 0.0), 1e-15));

        let narrow = ShortSumSpec::new(10.0, 0.4, RationalTwist::trivial()).unwrap();
        assert_eq!(short_sum_direct(2.5, &narrow, &t).unwrap(), Complex64::new(0.0, 0.0));

        let wide = ShortSumSpec::new(10.0, 5.0, RationalTwist::trivial()).unwrap();
        assert!(matches!(
            short_sum_direct(99.0, &wide, &t),
            Err(Error::TableTooShort { .. })
        ));
    }

    #[test]
    fn long_sum_examples() {
        let t = generate_delta_coefficients(100).unwrap();
        let tw = make_twist(2, 7).unwrap();
        let one = long_sum_direct(1.0, tw, &t).unwrap();
        let e = Complex64::from_polar(1.0, TAU * 2.0 / 7.0);
        assert!(close(one, e, 1e-15));
        let three = long_sum_direct(3.0, RationalTwist::trivial(), &t).unwrap();
        assert!(close(three, Complex64::new(t.a(1) + t.a(2) + t.a(3), 0.0), 1e-15));
        assert_eq!(long_sum_direct(0.5, tw, &t).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unit_roots_are_periodic_and_symmetric() {
        for k in 1..40u64 {
            let roots = UnitRoots::new(k);
            let tw = RationalTwist::new(1, k).unwrap();
            for n in 0..3 * k {
                assert_eq!(roots.get(tw.residue(n)), roots.get(tw.residue(n + k)));
            }
            for r in 1..k {
                assert_eq!(roots.get(r), roots.get(k - r).conj());
            }
        }
    }

    #[test]
    fn conjugate_twist_conjugates_the_sum() {
        let t = generate_delta_coefficients(400).unwrap();
        for (h, k) in [(1, 3), (2, 5), (3, 7), (5, 12)] {
            let tw = make_twist(h, k).unwrap();
            let spec = ShortSumSpec::new(100.0, 37.5, tw).unwrap();
            let conj = ShortSumSpec::new(100.0, 37.5, tw.conjugate()).unwrap();
            for x in [100.0, 133.3, 180.9] {
                let a = short_sum_direct(x, &spec, &t).unwrap();
                let b = short_sum_direct(x, &conj, &t).unwrap();
                assert_eq!(a, b.conj());
            }
        }
    }

    #[test]
    fn zero_table_gives_zero_plateaus() {
        let t = CoefficientTable::synthetic(vec![0.0; 300]);
        let spec = ShortSumSpec::new(100.0, 5.0, RationalTwist::trivial()).unwrap();
        let sf = build_step_function(&spec, &t).unwrap();
        assert!(sf.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn integer_delta_breakpoints_are_integers() {
        let t = generate_delta_coefficients(300).unwrap();
        let spec = ShortSumSpec::new(100.0, 5.0, RationalTwist::trivial()).unwrap();
        let sf = build_step_function(&spec, &t).unwrap();
        let bps = sf.breakpoints();
        assert!(bps.iter().all(|b| b.fract() == 0.0));
        let expect: Vec<f64> = (100..=200).map(|n| n as f64).collect();
        assert_eq!(bps, expect.as_slice());
        assert!(bps.len() <= 2 * (100 + 1));
    }

    #[test]
    fn plateaus_match_direct_sums_at_midpoints() {
        let t = generate_delta_coefficients(400).unwrap();
        for (m, delta, h, k) in [(100.0, 5.0, 1, 1), (100.0, 5.3, 2, 5), (73.4, 0.6, 1, 3), (150.0, 31.7, 4, 9)] {
            let spec = ShortSumSpec::new(m, delta, make_twist(h, k).unwrap()).unwrap();
            let sf = build_step_function(&spec, &t).unwrap();
            for (l, r, v) in sf.plateaus() {
                let direct = short_sum_direct(0.5 * (l + r), &spec, &t).unwrap();
                assert!(close(v, direct, 1e-12), "M={m} D={delta} plateau ({l},{r})");
            }
        }
    }

    #[test]
    fn random_points_agree_with_direct_sums() {
        let t = generate_delta_coefficients(3000).unwrap();
        let spec = ShortSumSpec::new(1000.0, 47.25, make_twist(3, 4).unwrap()).unwrap();
        let sf = build_step_function(&spec, &t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(1000.0..2000.0);
            let direct = short_sum_direct(x, &spec, &t).unwrap();
            let lo = x.ceil() as u64;
            let hi = (x + spec.delta()).floor() as u64;
            let mass: f64 = (lo..=hi).map(|n| t.a(n).abs()).sum();
            assert!(close(sf.value_at(x).unwrap(), direct, 1e-9 * (1.0 + mass)));
        }
    }

    #[test]
    fn partitioned_sweep_matches_sequential() {
        let t = generate_delta_coefficients(5000).unwrap();
        let spec = ShortSumSpec::new(2000.0, 60.5, make_twist(1, 3).unwrap()).unwrap();
        let seq = build_step_function(&spec, &t).unwrap();
        for parts in [2, 3, 8, 64] {
            let par = build_step_function_partitioned(&spec, &t, parts).unwrap();
            assert_eq!(par.breakpoints(), seq.breakpoints());
            for (a, b) in par.values().iter().zip(seq.values()) {
                assert!(close(*a, *b, 1e-12));
            }
            let again = build_step_function_partitioned(&spec, &t, parts).unwrap();
            assert_eq!(again, par);
        }
    }

    #[test]
    fn step_function_needs_enough_coefficients() {
        let t = generate_delta_coefficients(200).unwrap();
        let spec = ShortSumSpec::new(100.0, 5.0, RationalTwist::trivial()).unwrap();
        assert!(matches!(build_step_function(&spec, &t), Err(Error::TableTooShort { .. })));
    }

    #[test]
    fn csv_export_shape() {
        let t = generate_delta_coefficients(30).unwrap();
        let spec = ShortSumSpec::new(10.0, 2.0, RationalTwist::trivial()).unwrap();
        let sf = build_step_function(&spec, &t).unwrap();
        let mut buf = Vec::new();
        sf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("x_left,x_right,re,im"));
        assert_eq!(text.lines().count(), sf.plateau_count() + 1);
    }

    proptest! {
        #[test]
        fn sweep_windows_are_exact(m in 1.0f64..80.0, frac in 0.01f64..1.0, h in 0i64..12, k in 1u64..12) {
            prop_assume!(gcd(h.unsigned_abs(), k) == 1);
            let delta = frac * m;
            let t = generate_delta_coefficients(300).unwrap();
            let spec = ShortSumSpec::new(m, delta, make_twist(h, k).unwrap()).unwrap();
            let sf = build_step_function(&spec, &t).unwrap();
            for (l, r, v) in sf.plateaus() {
                let direct = short_sum_direct(0.5 * (l + r), &spec, &t).unwrap();
                prop_assert!(close(v, direct, 1e-12));
            }
        }

        #[test]
        fn inverse_is_an_inverse(h in -1000i64..1000, k in 2u64..500) {
            prop_assume!(gcd(h.unsigned_abs(), k) == 1);
            let tw = make_twist(h, k).unwrap();
            prop_assert!(tw.h_bar() < k);
            prop_assert_eq!((tw.h() * tw.h_bar()) % k, 1);
        }
    }
}
