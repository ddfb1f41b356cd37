//! Counting quadruples `(a, b, c, d)` in `(L, 2L]^4` with
//! `|a^(1/w) + b^(1/w) - c^(1/w) - d^(1/w)| < delta L^(1/w)`.
//!
//! Both counters take the same decision for every quadruple: the binary64
//! difference of the pair sums `fl(r_a + r_b) - fl(r_c + r_d)`, and an
//! extended-precision recount when that difference lies within a guard band
//! of the threshold. Their counts are therefore equal, not merely close.

use std::cmp::Ordering;
use std::io::Write;

use astro_float::{BigFloat, Consts, RoundingMode};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

pub const BRUTEFORCE_MAX_L: f64 = 200.0;
pub const PAIRSUM_MAX_L: f64 = 1e4;
/// Guard band, relative to the size of a pair sum.
pub const GUARD_REL: f64 = 1e-12;
const PREC_BITS: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingQuery {
    l: f64,
    delta: f64,
    omega: f64,
    k: f64,
    m: f64,
    theta: f64,
}

impl SpacingQuery {
    pub fn new(l: f64, delta: f64, omega: f64) -> Result<Self> {
        if !(l >= 0.5) || !l.is_finite() {
            return Err(invalid("L", format!("must be finite and >= 1/2, got {l}")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        if !(omega > 1.0) || !omega.is_finite() {
            return Err(invalid("omega", format!("must exceed 1, got {omega}")));
        }
        Ok(Self {
            l,
            delta,
            omega,
            k: 1.0,
            m: 1e6,
            theta: 0.05,
        })
    }

    /// Parameters of the corollary bound reported next to the count.
    pub fn with_corollary(mut self, k: f64, m: f64, theta: f64) -> Result<Self> {
        if !(k >= 1.0) || !(m >= 1.0) || !(theta > 0.0) {
            return Err(invalid("theta", "need k >= 1, M >= 1, theta > 0"));
        }
        (self.k, self.m, self.theta) = (k, m, theta);
        Ok(self)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `delta L^(1/omega)`.
    pub fn threshold(&self) -> f64 {
        self.delta * root(self.l, self.omega)
    }

    /// Integers in `(L, 2L]`.
    pub fn range(&self) -> (u64, u64) {
        (self.l.floor() as u64 + 1, (2.0 * self.l).floor() as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingCount {
    pub count: u64,
    /// `delta L^4 + L^2`.
    pub bound_rs: f64,
    pub bound_corollary: f64,
    /// Quadruples settled by the extended-precision recount.
    pub rechecked: u64,
}

impl SpacingCount {
    pub fn csv_header() -> &'static str {
        "L,delta,omega,count,bound_rs,bound_corollary"
    }

    pub fn write_csv_row<W: Write>(&self, q: &SpacingQuery, mut w: W) -> Result<()> {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            q.l, q.delta, q.omega, self.count, self.bound_rs, self.bound_corollary
        )?;
        Ok(())
    }
}

/// `L^(7/2) k M^(theta - 1/2) + L^2`.
pub fn corollary_rhs(l: f64, k: f64, m: f64, theta: f64) -> f64 {
    l.powf(3.5) * k * m.powf(theta - 0.5) + l * l
}

pub fn robert_sargos_rhs(l: f64, delta: f64) -> f64 {
    delta * l.powi(4) + l * l
}

/// `delta` for which the general threshold equals the corollary's
/// `k M^(theta - 1/2)` at `omega = 2`.
pub fn corollary_delta(l: f64, k: f64, m: f64, theta: f64) -> f64 {
    k * m.powf(theta - 0.5) / l.sqrt()
}

fn root(x: f64, omega: f64) -> f64 {
    if omega == 2.0 {
        x.sqrt()
    } else {
        x.powf(omega.recip())
    }
}

/// Shared decision state for one query.
struct Decider {
    lo: u64,
    roots: Vec<f64>,
    tau: f64,
    guard: f64,
    omega: f64,
    delta: f64,
    l: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    In,
    Out,
    Band,
}

impl Decider {
    fn new(q: &SpacingQuery) -> Self {
        let (lo, hi) = q.range();
        let roots = (lo..=hi).map(|n| root(n as f64, q.omega)).collect();
        let scale = 2.0 * root(2.0 * q.l, q.omega);
        Self {
            lo,
            roots,
            tau: q.threshold(),
            guard: GUARD_REL * scale,
            omega: q.omega,
            delta: q.delta,
            l: q.l,
        }
    }

    fn n(&self) -> usize {
        self.roots.len()
    }

    #[inline]
    fn pair(&self, i: usize, j: usize) -> f64 {
        self.roots[i] + self.roots[j]
    }

    /// Classification of a nonnegative pair-sum gap.
    #[inline]
    fn verdict(&self, gap: f64) -> Verdict {
        if gap < self.tau - self.guard {
            Verdict::In
        } else if gap > self.tau + self.guard {
            Verdict::Out
        } else {
            Verdict::Band
        }
    }

    fn exact(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let mut cc = Consts::new().expect("constant cache");
        let root = |x: f64, cc: &mut Consts| {
            let v = BigFloat::from_f64(x, PREC_BITS);
            if self.omega == 2.0 {
                v.sqrt(PREC_BITS, RM)
            } else {
                let inv = BigFloat::from_f64(1.0, PREC_BITS).div(&BigFloat::from_f64(self.omega, PREC_BITS), PREC_BITS, RM);
                v.pow(&inv, PREC_BITS, RM, cc)
            }
        };
        let idx = |i: usize| (self.lo + i as u64) as f64;
        let s1 = root(idx(a), &mut cc).add(&root(idx(b), &mut cc), PREC_BITS, RM);
        let s2 = root(idx(c), &mut cc).add(&root(idx(d), &mut cc), PREC_BITS, RM);
        let gap = s1.sub(&s2, PREC_BITS, RM).abs();
        let tau = BigFloat::from_f64(self.delta, PREC_BITS).mul(&root(self.l, &mut cc), PREC_BITS, RM);
        gap.cmp(&tau).is_some_and(|o| o < 0)
    }

    fn decide(&self, a: usize, b: usize, c: usize, d: usize) -> (bool, bool) {
        let gap = (self.pair(a, b) - self.pair(c, d)).abs();
        match self.verdict(gap) {
            Verdict::In => (true, false),
            Verdict::Out => (false, false),
            Verdict::Band => (self.exact(a, b, c, d), true),
        }
    }
}

fn finish(q: &SpacingQuery, count: u64, rechecked: u64) -> SpacingCount {
    SpacingCount {
        count,
        bound_rs: robert_sargos_rhs(q.l, q.delta),
        bound_corollary: corollary_rhs(q.l, q.k, q.m, q.theta),
        rechecked,
    }
}

fn check_budget(q: &SpacingQuery, limit: f64, what: &'static str) -> Result<()> {
    if q.l > limit {
        return Err(Error::Budget {
            what,
            requested: q.l.ceil() as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

/// All `|(L, 2L]|^4` quadruples; parallel over `a`.
pub fn spacing_count_bruteforce(q: &SpacingQuery) -> Result<SpacingCount> {
    check_budget(q, BRUTEFORCE_MAX_L, "L (brute force)")?;
    let dec = Decider::new(q);
    let n = dec.n();
    let (count, rechecked) = (0..n)
        .into_par_iter()
        .map(|a| {
            let (mut c_in, mut c_re) = (0u64, 0u64);
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let (hit, re) = dec.decide(a, b, c, d);
                        c_in += hit as u64;
                        c_re += re as u64;
                    }
                }
            }
            (c_in, c_re)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(finish(q, count, rechecked))
}

/// Sorted unordered pair sums swept with two pointers.
pub fn spacing_count_pairsum(q: &SpacingQuery) -> Result<SpacingCount> {
    check_budget(q, PAIRSUM_MAX_L, "L (pair sum)")?;
    let dec = Decider::new(q);
    let n = dec.n();
    if n == 0 {
        return Ok(finish(q, 0, 0));
    }
    // unordered pairs i <= j, encoded as i * n + j
    let mut pairs: Vec<u32> = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            pairs.push((i * n + j) as u32);
        }
    }
    let split = |p: u32| ((p as usize) / n, (p as usize) % n);
    let value = |p: u32| {
        let (i, j) = split(p);
        dec.pair(i, j)
    };
    pairs.par_sort_unstable_by(|&x, &y| value(x).partial_cmp(&value(y)).unwrap_or(Ordering::Equal).then(x.cmp(&y)));
    let vals: Vec<f64> = pairs.iter().map(|&p| value(p)).collect();
    let weight = |p: u32| {
        let (i, j) = split(p);
        if i == j {
            1u64
        } else {
            2u64
        }
    };
    let mut prefix = Vec::with_capacity(pairs.len() + 1);
    prefix.push(0u64);
    for &p in &pairs {
        prefix.push(prefix.last().unwrap() + weight(p));
    }

    let len = pairs.len();
    let (mut end_in, mut end_band) = (0usize, 0usize);
    let mut count = 0u64;
    let mut rechecked = 0u64;
    for i in 0..len {
        let wi = weight(pairs[i]);
        count += wi * wi;
        end_in = end_in.max(i + 1);
        while end_in < len && dec.verdict(vals[end_in] - vals[i]) == Verdict::In {
            end_in += 1;
        }
        end_band = end_band.max(end_in);
        while end_band < len && dec.verdict(vals[end_band] - vals[i]) != Verdict::Out {
            end_band += 1;
        }
        let mut near = prefix[end_in] - prefix[i + 1];
        let (a, b) = split(pairs[i]);
        for &pj in &pairs[end_in..end_band] {
            let (c, d) = split(pj);
            rechecked += 1;
            if dec.exact(a, b, c, d) {
                near += weight(pj);
            }
        }
        count += 2 * wi * near;
    }
    Ok(finish(q, count, rechecked))
}
