//! Moments `int_M^{2M} |S(x)|^A dx` integrated exactly over the plateaus of
//! the short-sum step function, growth fits along `M` ladders, and
//! large-value censuses.

use std::io::Write;

use rayon::prelude::*;

use crate::bounds::{thm1_rhs, thm2_rhs, Evaluation, ExponentPair, DEFAULT_KNOB};
use crate::coefficients::CoefficientTable;
use crate::error::{invalid, Error, Result};
use crate::numeric::{loglog_slope, CompensatedSum};
use crate::sums::{build_step_function, build_step_function_partitioned, RationalTwist, ShortSumSpec, StepFunction};

/// Relative accuracy of plateau values, used for the error budget.
const PLATEAU_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSpec {
    a: f64,
    spec: ShortSumSpec,
}

impl MomentSpec {
    pub fn new(a: f64, spec: ShortSumSpec) -> Result<Self> {
        if !(a >= 1.0) || !a.is_finite() {
            return Err(invalid("A", format!("moment order must be finite and >= 1, got {a}")));
        }
        Ok(Self { a, spec })
    }

    pub fn order(&self) -> f64 {
        self.a
    }

    pub fn spec(&self) -> &ShortSumSpec {
        &self.spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub value: f64,
    pub plateau_count: usize,
    pub max_abs: f64,
    /// Midpoint of the leftmost plateau attaining `max_abs`.
    pub argmax: f64,
    /// Estimated effect of plateau-value noise on `value`.
    pub error_budget: f64,
}

#[inline]
fn abs_pow(r: f64, a: f64) -> f64 {
    if a == 2.0 {
        r * r
    } else if a == 4.0 {
        let s = r * r;
        s * s
    } else {
        r.powf(a)
    }
}

/// Partial reduction over a run of plateaus.
#[derive(Debug, Clone, Copy)]
struct Partial {
    value: CompensatedSum,
    max_abs: f64,
    argmax: f64,
}

impl Partial {
    fn empty() -> Self {
        Self {
            value: CompensatedSum::new(),
            max_abs: f64::NEG_INFINITY,
            argmax: f64::NAN,
        }
    }

    fn push(&mut self, l: f64, r: f64, abs: f64, a: f64) {
        self.value.add((r - l) * abs_pow(abs, a));
        if abs > self.max_abs {
            self.max_abs = abs;
            self.argmax = 0.5 * (l + r);
        }
    }

    /// `other` covers plateaus to the right of `self`.
    fn merge(mut self, other: Partial) -> Partial {
        self.value.absorb(&other.value);
        if other.max_abs > self.max_abs {
            self.max_abs = other.max_abs;
            self.argmax = other.argmax;
        }
        self
    }

    fn finish(self, a: f64, plateau_count: usize) -> MomentResult {
        let max_abs = self.max_abs.max(0.0);
        let tol = PLATEAU_TOL * (1.0 + max_abs);
        let value = self.value.value();
        let error_budget = if max_abs == 0.0 {
            0.0
        } else {
            // |S| <= max_abs on every plateau, so this dominates the per-plateau error
            value * ((1.0 + tol / max_abs).powf(a) - 1.0)
        };
        MomentResult {
            value,
            plateau_count,
            max_abs,
            argmax: self.argmax,
            error_budget,
        }
    }
}

/// Moment of an already built step function over its whole domain.
pub fn moment_of(sf: &StepFunction, a: f64) -> MomentResult {
    moment_of_range(sf, a, sf.spec().m(), 2.0 * sf.spec().m())
}

/// Moment over `[lo, hi]`, clipped to the domain; partial plateaus count
/// with their overlap length.
pub fn moment_of_range(sf: &StepFunction, a: f64, lo: f64, hi: f64) -> MomentResult {
    let mut acc = Partial::empty();
    let mut count = 0;
    for (l, r, v) in sf.plateaus() {
        let (l, r) = (l.max(lo), r.min(hi));
        if l < r {
            acc.push(l, r, v.norm(), a);
            count += 1;
        }
    }
    acc.finish(a, count)
}

/// Same reduction split into `parts` contiguous plateau ranges run
/// concurrently and merged left to right; deterministic for fixed `parts`.
pub fn moment_of_parallel(sf: &StepFunction, a: f64, parts: usize) -> MomentResult {
    let bp = sf.breakpoints();
    let vals = sf.values();
    let chunk = vals.len().div_ceil(parts.max(1)).max(1);
    let partials: Vec<Partial> = vals
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, vs)| {
            let mut p = Partial::empty();
            for (i, v) in vs.iter().enumerate() {
                let j = c * chunk + i;
                p.push(bp[j], bp[j + 1], v.norm(), a);
            }
            p
        })
        .collect();
    partials
        .into_iter()
        .fold(Partial::empty(), Partial::merge)
        .finish(a, vals.len())
}

pub fn exact_moment(ms: &MomentSpec, t: &CoefficientTable) -> Result<MomentResult> {
    let sf = build_step_function(&ms.spec, t)?;
    Ok(moment_of(&sf, ms.a))
}

/// Step-function sweep and reduction both split into `parts` ranges.
pub fn exact_moment_parallel(ms: &MomentSpec, t: &CoefficientTable, parts: usize) -> Result<MomentResult> {
    let sf = build_step_function_partitioned(&ms.spec, t, parts)?;
    Ok(moment_of_parallel(&sf, ms.a, parts))
}

/// Oracle: every plateau recomputed from scratch at its midpoint.
pub fn moment_bruteforce(ms: &MomentSpec, t: &CoefficientTable) -> Result<f64> {
    let sf = build_step_function(&ms.spec, t)?;
    let mut acc = CompensatedSum::new();
    for (l, r, _) in sf.plateaus() {
        let s = crate::sums::short_sum_direct(0.5 * (l + r), &ms.spec, t)?;
        acc.add((r - l) * abs_pow(s.norm(), ms.a));
    }
    Ok(acc.value())
}

/// How `Delta` follows `M` along a ladder: `Delta = coefficient * M^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRule {
    pub coefficient: f64,
    pub exponent: f64,
}

impl DeltaRule {
    pub fn power(exponent: f64) -> Self {
        Self {
            coefficient: 1.0,
            exponent,
        }
    }

    pub fn delta(&self, m: f64) -> f64 {
        self.coefficient * m.powf(self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderPoint {
    pub m: f64,
    pub delta: f64,
    pub k: u64,
    pub a: f64,
    pub result: MomentResult,
    /// Fourth-moment theorem classification at this rung.
    pub thm1: Evaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub points: Vec<LadderPoint>,
    pub slope: f64,
}

impl GrowthFit {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_ladder_csv(&self.points, w)
    }
}

pub fn write_ladder_csv<W: Write>(points: &[LadderPoint], mut w: W) -> Result<()> {
    writeln!(w, "M,Delta,k,A,value,max_abs,argmax")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.m, p.delta, p.k, p.a, p.result.value, p.result.max_abs, p.result.argmax
        )?;
    }
    Ok(())
}

/// Checks a ladder against the rule and the table before any work is done.
pub fn check_ladder(rule: DeltaRule, twist: RationalTwist, ladder: &[f64], t: &CoefficientTable) -> Result<()> {
    if ladder.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 ladder rungs, got {}", ladder.len())));
    }
    if ladder.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("ladder", "must be strictly ascending"));
    }
    for &m in ladder {
        let delta = rule.delta(m);
        if !(m >= 1.0) || !(delta >= 1.0 && delta <= m) {
            return Err(Error::Infeasible(format!(
                "rule gives Delta = {delta} at M = {m}; need 1 <= Delta <= M"
            )));
        }
        if twist.k() as f64 > m {
            return Err(Error::Infeasible(format!("k = {} exceeds M = {m}", twist.k())));
        }
    }
    let last = *ladder.last().unwrap();
    t.require(ShortSumSpec::new(last, rule.delta(last), twist)?.max_index())
}

/// Exact moments along the ladder and the log-log slope of value against `M`.
pub fn moment_growth_fit(
    a: f64,
    rule: DeltaRule,
    twist: RationalTwist,
    ladder: &[f64],
    t: &CoefficientTable,
) -> Result<GrowthFit> {
    check_ladder(rule, twist, ladder, t)?;
    let points = ladder
        .iter()
        .map(|&m| {
            let delta = rule.delta(m);
            let ms = MomentSpec::new(a, ShortSumSpec::new(m, delta, twist)?)?;
            Ok(LadderPoint {
                m,
                delta,
                k: twist.k(),
                a,
                result: exact_moment(&ms, t)?,
                thm1: thm1_rhs(twist.k() as f64, m, delta, DEFAULT_KNOB),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = points.iter().map(|p| p.result.value).collect();
    let slope = loglog_slope(ladder, &values)?;
    Ok(GrowthFit { points, slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LargeValueCensus {
    pub v: f64,
    pub points: Vec<f64>,
    /// `|S(x_i)|` at each point.
    pub abs_values: Vec<f64>,
    pub r: usize,
    pub bound_rhs: f64,
}

impl LargeValueCensus {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,abs_S")?;
        for (x, s) in self.points.iter().zip(&self.abs_values) {
            writeln!(w, "{x},{s}")?;
        }
        Ok(())
    }

    /// Re-checks spacing and size of every point against `sf`.
    pub fn verify(&self, sf: &StepFunction) -> bool {
        self.points.len() == self.r
            && self.points.windows(2).all(|w| w[1] - w[0] >= self.v)
            && self
                .points
                .iter()
                .all(|&x| sf.value_at(x).is_some_and(|s| s.norm() >= self.v))
    }
}

/// Smallest `y > x` with `y - x >= v` in floating point.
fn advance(x: f64, v: f64) -> f64 {
    let mut y = x + v;
    while y - x < v {
        y = y.next_up();
    }
    y
}

pub fn large_value_census(sf: &StepFunction, v: f64) -> Result<LargeValueCensus> {
    large_value_census_with(sf, v, DEFAULT_KNOB)
}

/// Greedy leftmost V-separated selection of points with `|S| >= V`. The
/// count is compared with the large-value theorem at pair (1/2, 1/2).
pub fn large_value_census_with(sf: &StepFunction, v: f64, delta_knob: f64) -> Result<LargeValueCensus> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(invalid("V", format!("must be finite and >= 1, got {v}")));
    }
    let spec = sf.spec();
    let two_m = 2.0 * spec.m();
    let last = sf.plateau_count() - 1;
    let mut cursor = spec.m();
    let mut points = Vec::new();
    let mut abs_values = Vec::new();
    for (i, (l, r, s)) in sf.plateaus().enumerate() {
        let abs = s.norm();
        if abs < v {
            continue;
        }
        let inside = |x: f64| if i == last { x <= two_m } else { x < r };
        let mut x = cursor.max(l);
        while inside(x) {
            points.push(x);
            abs_values.push(abs);
            x = advance(x, v);
        }
        cursor = cursor.max(x);
    }
    let bound_rhs = thm2_rhs(
        spec.twist().k() as f64,
        spec.m(),
        spec.delta(),
        v,
        ExponentPair::HALF,
        delta_knob,
    )
    .value
    .unwrap_or(f64::INFINITY);
    Ok(LargeValueCensus {
        v,
        r: points.len(),
        points,
        abs_values,
        bound_rhs,
    })
}

/// Measure-weighted quantile of `|S|` over the domain.
pub fn abs_quantile(sf: &StepFunction, q: f64) -> f64 {
    let mut pl: Vec<(f64, f64)> = sf.plateaus().map(|(l, r, s)| (s.norm(), r - l)).collect();
    pl.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pl.iter().map(|p| p.1).sum();
    let target = q.clamp(0.0, 1.0) * total;
    let mut acc = 0.0;
    for (abs, len) in &pl {
        acc += len;
        if acc >= target {
            return *abs;
        }
    }
    pl.last().map_or(0.0, |p| p.0)
}

/// `max |S| / min(Delta^(1/2), k^(1/2) M^(1/4))`.
pub fn conjecture_probe(sf: &StepFunction) -> f64 {
    let spec = sf.spec();
    let max_abs = sf.values().iter().map(|s| s.norm()).fold(0.0, f64::max);
    let scale = spec
        .delta()
        .sqrt()
        .min((spec.twist().k() as f64).sqrt() * spec.m().powf(0.25));
    max_abs / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::generate_delta_coefficients;
    use crate::numeric::{approx_eq, approx_le};
    use crate::sums::make_twist;
    use num_complex::Complex64;

    fn zero_table(n: usize) -> CoefficientTable {
        CoefficientTable::synthetic(vec![0.0; n])
    }

    fn spec(m: f64, d: f64) -> ShortSumSpec {
        ShortSumSpec::new(m, d, RationalTwist::trivial()).unwrap()
    }

    #[test]
    fn zero_table_gives_zero() {
        let ms = MomentSpec::new(4.0, spec(100.0, 5.0)).unwrap();
        let r = exact_moment(&ms, &zero_table(300)).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.max_abs, 0.0);
    }

    #[test]
    fn matches_bruteforce_oracle() {
        let t = generate_delta_coefficients(400).unwrap();
        for a in [2.0, 4.0, 3.0] {
            let ms = MomentSpec::new(a, spec(100.0, 5.0)).unwrap();
            let r = exact_moment(&ms, &t).unwrap();
            let o = moment_bruteforce(&ms, &t).unwrap();
            assert!(approx_eq(r.value, o, 1e-9), "{} vs {o}", r.value);
            assert!(r.error_budget < 1e-6 * r.value);
        }
    }

    #[test]
    fn fourth_moment_dominated_by_second() {
        let t = generate_delta_coefficients(400).unwrap();
        let m2 = exact_moment(&MomentSpec::new(2.0, spec(100.0, 5.0)).unwrap(), &t).unwrap();
        let m4 = exact_moment(&MomentSpec::new(4.0, spec(100.0, 5.0)).unwrap(), &t).unwrap();
        assert!(approx_le(m4.value, m2.value * m2.max_abs.powi(2), 1e-12));
        assert!(approx_le(m4.value, 100.0 * m4.max_abs.powi(4), 1e-12));
    }

    #[test]
    fn additive_over_split_domain() {
        let t = generate_delta_coefficients(2000).unwrap();
        let sp = ShortSumSpec::new(600.0, 7.5, make_twist(2, 5).unwrap()).unwrap();
        let sf = build_step_function(&sp, &t).unwrap();
        let mid = sf.breakpoints()[sf.breakpoints().partition_point(|b| *b < 900.0)];
        for a in [2.0, 4.0] {
            let whole = moment_of(&sf, a).value;
            let left = moment_of_range(&sf, a, 600.0, mid).value;
            let right = moment_of_range(&sf, a, mid, 1200.0).value;
            assert!(approx_eq(whole, left + right, 1e-12));
        }
    }

    #[test]
    fn scaling_by_constant() {
        let t = generate_delta_coefficients(800).unwrap();
        let c: f64 = 2.75;
        let scaled = t.scaled(c);
        let sp = ShortSumSpec::new(300.0, 12.0, make_twist(1, 3).unwrap()).unwrap();
        for a in [2.0, 4.0, 2.5] {
            let ms = MomentSpec::new(a, sp).unwrap();
            let r0 = exact_moment(&ms, &t).unwrap();
            let r1 = exact_moment(&ms, &scaled).unwrap();
            assert!(approx_eq(r1.value, c.powf(a) * r0.value, 1e-9));
            assert_eq!(r0.argmax, r1.argmax);
        }
    }

    #[test]
    fn parallel_agrees_with_sequential() {
        let t = generate_delta_coefficients(5000).unwrap();
        let ms = MomentSpec::new(4.0, ShortSumSpec::new(2000.0, 40.0, make_twist(3, 7).unwrap()).unwrap()).unwrap();
        let seq = exact_moment(&ms, &t).unwrap();
        for parts in [2, 3, 8] {
            let par = exact_moment_parallel(&ms, &t, parts).unwrap();
            assert!(approx_eq(seq.value, par.value, 1e-9));
            assert_eq!(seq.plateau_count, par.plateau_count);
            assert!(approx_eq(seq.max_abs, par.max_abs, 1e-9));
            let again = exact_moment_parallel(&ms, &t, parts).unwrap();
            assert_eq!(par.value.to_bits(), again.value.to_bits());
        }
    }

    #[test]
    fn growth_fit_rejects_bad_input() {
        let z = zero_table(3000);
        let e = moment_growth_fit(2.0, DeltaRule::power(0.4), RationalTwist::trivial(), &[100.0, 200.0, 400.0], &z);
        assert!(matches!(e, Err(Error::DegenerateFit(_))));
        let t = generate_delta_coefficients(3000).unwrap();
        let e = moment_growth_fit(2.0, DeltaRule::power(1.2), RationalTwist::trivial(), &[100.0, 200.0, 400.0], &t);
        assert!(matches!(e, Err(Error::Infeasible(_))));
        let e = moment_growth_fit(2.0, DeltaRule::power(0.4), RationalTwist::trivial(), &[100.0, 200.0], &t);
        assert!(e.is_err());
        let e = moment_growth_fit(2.0, DeltaRule::power(0.4), RationalTwist::trivial(), &[100.0, 200.0, 4000.0], &t);
        assert!(matches!(e, Err(Error::TableTooShort { .. })));
    }

    #[test]
    fn small_growth_fit() {
        let t = generate_delta_coefficients(20_000).unwrap();
        let ladder = [1024.0, 2048.0, 4096.0, 8192.0];
        let fit = moment_growth_fit(2.0, DeltaRule::power(0.4), RationalTwist::trivial(), &ladder, &t).unwrap();
        assert!(fit.slope > 1.0 && fit.slope <= 1.5, "{}", fit.slope);
        let mut buf = Vec::new();
        fit.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }

    #[test]
    fn census_edge_cases() {
        let sp = spec(100.0, 5.0);
        let v = 3.0;
        let flat = StepFunction::from_parts(sp, vec![100.0, 200.0], vec![Complex64::new(0.0, 2.0 * v)]).unwrap();
        let c = large_value_census(&flat, v).unwrap();
        assert_eq!(c.r, (100.0 / v) as usize + 1);
        assert!(c.verify(&flat));

        let small = StepFunction::from_parts(sp, vec![100.0, 150.0, 200.0], vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let c = large_value_census(&small, v).unwrap();
        assert_eq!(c.r, 0);
        assert!(c.points.is_empty());
        assert!(large_value_census(&small, 0.5).is_err());
    }

    #[test]
    fn census_on_delta_form() {
        let t = generate_delta_coefficients(3000).unwrap();
        let sf = build_step_function(&ShortSumSpec::new(1000.0, 50.0, RationalTwist::trivial()).unwrap(), &t).unwrap();
        let v = abs_quantile(&sf, 0.99).max(1.0);
        let c = large_value_census(&sf, v).unwrap();
        assert!(c.r >= 1);
        assert!(c.verify(&sf));
        assert!(c.bound_rhs > 0.0);
    }

    #[test]
    fn conjecture_probe_values() {
        let sf = build_step_function(&spec(100.0, 5.0), &zero_table(300)).unwrap();
        assert_eq!(conjecture_probe(&sf), 0.0);
        let t = generate_delta_coefficients(300).unwrap();
        let sf = build_step_function(&spec(100.0, 5.0), &t).unwrap();
        let r = conjecture_probe(&sf);
        assert!(r.is_finite() && r > 0.0);
    }
}
