use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::{leading_is_one, normalize, CoefficientTable};
use crate::numeric::{divisor_count_table, smallest_prime_factors};

const DELIGNE_SLACK: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-12;

/// A broken table invariant together with its witness.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `tau(1) != 1`, `a(1) != 1`, or `a(n)` disagrees with `tau(n)`.
    Normalization { n: u64, detail: String },
    /// `|a(n)| > d(n)`.
    Deligne { n: u64, abs_a: f64, divisors: u32 },
    /// `tau(n) != tau(m1) tau(m2)` for the coprime split `n = m1 * m2`.
    Multiplicativity { n: u64, m1: u64, m2: u64 },
    /// `tau(p) tau(p^j) != tau(p^(j+1)) + p^(k-1) tau(p^(j-1))`.
    Hecke { p: u64, j: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl Violation {
    /// Eigenform relations are warnings for externally supplied tables; the
    /// normalization and Deligne checks always reject.
    pub fn severity_for_loaded(&self) -> Severity {
        match self {
            Violation::Normalization { .. } | Violation::Deligne { .. } => Severity::Error,
            Violation::Multiplicativity { .. } | Violation::Hecke { .. } => Severity::Warning,
        }
    }

    pub fn witness(&self) -> u64 {
        match *self {
            Violation::Normalization { n, .. }
            | Violation::Deligne { n, .. }
            | Violation::Multiplicativity { n, .. } => n,
            Violation::Hecke { p, .. } => p,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn errors_for_loaded(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity_for_loaded() == Severity::Error)
    }

    pub fn warnings_for_loaded(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity_for_loaded() == Severity::Warning)
    }
}

pub fn validate_table(t: &CoefficientTable) -> ValidationReport {
    let n_max = t.n_max() as usize;
    let mut violations = Vec::new();
    if n_max == 0 {
        return ValidationReport { violations };
    }

    if !leading_is_one(t) {
        violations.push(Violation::Normalization {
            n: 1,
            detail: format!("tau(1) = {}", t.tau(1)),
        });
    }
    if t.a(1) != 1.0 {
        violations.push(Violation::Normalization {
            n: 1,
            detail: format!("a(1) = {}", t.a(1)),
        });
    }
    for n in 2..=n_max as u64 {
        let expect = normalize(t.tau(n), n, t.weight());
        let got = t.a(n);
        let tol = NORMALIZATION_TOL * expect.abs().max(1e-300);
        if !((got - expect).abs() <= tol) {
            violations.push(Violation::Normalization {
                n,
                detail: format!("a(n) = {got:e} but tau(n)/n^((k-1)/2) = {expect:e}"),
            });
        }
    }

    let d = divisor_count_table(n_max);
    for n in 1..=n_max {
        let abs_a = t.a(n as u64).abs();
        if !(abs_a <= d[n] as f64 * (1.0 + DELIGNE_SLACK)) {
            violations.push(Violation::Deligne {
                n: n as u64,
                abs_a,
                divisors: d[n],
            });
        }
    }

    let spf = smallest_prime_factors(n_max);
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut pe = p;
        while (n / pe).is_multiple_of(p) {
            pe *= p;
        }
        let m = n / pe;
        if m > 1 && *t.tau(n as u64) != t.tau(pe as u64) * t.tau(m as u64) {
            violations.push(Violation::Multiplicativity {
                n: n as u64,
                m1: pe as u64,
                m2: m as u64,
            });
        }
    }

    for p in 2..=n_max {
        if spf[p] as usize != p {
            continue;
        }
        let pk: BigInt = BigInt::from(p).pow(t.weight() - 1);
        let mut j = 1u32;
        let mut prev = 1usize; // p^(j-1)
        let mut cur = p; // p^j
        while let Some(next) = cur.checked_mul(p).filter(|&x| x <= n_max) {
            let lhs = t.tau(p as u64) * t.tau(cur as u64);
            let rhs = t.tau(next as u64) + &pk * t.tau(prev as u64);
            if lhs != rhs {
                violations.push(Violation::Hecke { p: p as u64, j });
            }
            prev = cur;
            cur = next;
            j += 1;
        }
    }

    ValidationReport { violations }
}

/// Rebuilds every `tau(n)` from the table's prime values alone: prime powers
/// by the Hecke recursion, everything else by multiplicativity.
pub fn reconstruct_from_primes(t: &CoefficientTable) -> Vec<BigInt> {
    let n_max = t.n_max() as usize;
    let mut out = vec![BigInt::zero(); n_max + 1];
    if n_max == 0 {
        return Vec::new();
    }
    out[1] = BigInt::one();
    let spf = smallest_prime_factors(n_max);
    // prime powers first
    for p in 2..=n_max {
        if spf[p] as usize != p {
            continue;
        }
        let pk: BigInt = BigInt::from(p).pow(t.weight() - 1);
        out[p] = t.tau(p as u64).clone();
        let (mut prev, mut cur) = (1usize, p);
        while let Some(next) = cur.checked_mul(p).filter(|&x| x <= n_max) {
            out[next] = &out[p] * &out[cur] - &pk * &out[prev];
            prev = cur;
            cur = next;
        }
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut pe = p;
        while (n / pe).is_multiple_of(p) {
            pe *= p;
        }
        if pe != n {
            out[n] = &out[pe] * &out[n / pe];
        }
    }
    out.remove(0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::generate_delta_coefficients;

    #[test]
    fn generated_table_is_clean() {
        let t = generate_delta_coefficients(10_000).unwrap();
        let report = validate_table(&t);
        assert!(report.is_empty(), "{:?}", &report.violations[..report.len().min(5)]);
        assert_eq!(reconstruct_from_primes(&t), t.exact());
    }

    #[test]
    fn zeroing_tau_two_breaks_multiplicativity_and_hecke() {
        let mut t = generate_delta_coefficients(100).unwrap();
        t.set_tau(2, BigInt::zero());
        let report = validate_table(&t);
        assert!(report
            .violations
            .contains(&Violation::Multiplicativity { n: 6, m1: 2, m2: 3 }));
        assert!(report.violations.contains(&Violation::Hecke { p: 2, j: 1 }));
        assert!(report.errors_for_loaded().next().is_none());
    }

    #[test]
    fn oversized_normalized_value_breaks_deligne() {
        let mut t = generate_delta_coefficients(100).unwrap();
        t.set_normalized(2, 5.0);
        let report = validate_table(&t);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::Deligne { n: 2, divisors: 2, .. }
        )));
        assert!(report.errors_for_loaded().count() >= 1);
    }

    #[test]
    fn wrong_leading_coefficient_is_reported() {
        let mut t = generate_delta_coefficients(10).unwrap();
        t.set_tau(1, BigInt::from(2));
        let report = validate_table(&t);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Normalization { n: 1, .. })));
    }
}
