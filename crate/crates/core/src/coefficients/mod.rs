//! Fourier coefficients of a level-one holomorphic cusp form.
//!
//! Coefficients are kept twice: exactly as integers `tau(n)` (the raw
//! q-expansion coefficients) and as the Deligne-normalized reals
//! `a(n) = tau(n) / n^((k-1)/2)` in binary64. The built-in generator produces
//! the discriminant form of weight 12, `q prod (1 - q^n)^24`.

mod cache;
pub mod series;
mod validate;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::numeric::{loglog_slope, CompensatedSum};

pub use crate::numeric::divisor_count;
pub use cache::{load_cache, read_cache, save_cache, write_cache, CACHE_MAGIC};
pub use validate::{
    reconstruct_from_primes, validate_table, Severity, ValidationReport, Violation,
};

pub const DELTA_WEIGHT: u32 = 12;
pub const DEFAULT_N_MAX: usize = 100_000;
pub const DEFAULT_N_MAX_CAP: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Generated,
    Loaded,
    /// Hand-built tables used by tests and experiments (not a cusp form).
    Synthetic,
}

/// Limits applied when generating coefficient tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationBudget {
    pub max_n: usize,
}

impl Default for GenerationBudget {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_N_MAX_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    weight: u32,
    /// `tau[n - 1] = tau(n)`
    tau: Vec<BigInt>,
    /// `a[n - 1] = a(n)`
    a: Vec<f64>,
    source: Source,
}

impl CoefficientTable {
    /// Builds a table from exact coefficients, normalizing each one.
    pub fn from_tau(weight: u32, tau: Vec<BigInt>, source: Source) -> Result<Self> {
        check_weight(weight)?;
        let a = tau
            .iter()
            .enumerate()
            .map(|(i, t)| normalize(t, (i + 1) as u64, weight))
            .collect();
        Ok(Self {
            weight,
            tau,
            a,
            source,
        })
    }

    /// Assembles a table from both sequences as given, without checking that
    /// they agree. Use [`validate_table`] to audit the result.
    pub fn from_parts(weight: u32, tau: Vec<BigInt>, a: Vec<f64>, source: Source) -> Result<Self> {
        check_weight(weight)?;
        if tau.len() != a.len() {
            return Err(Error::DimensionMismatch {
                expected: tau.len(),
                found: a.len(),
            });
        }
        Ok(Self {
            weight,
            tau,
            a,
            source,
        })
    }

    /// A synthetic table with the given normalized values and `tau` set to 0.
    pub fn synthetic(a: Vec<f64>) -> Self {
        let tau = vec![BigInt::zero(); a.len()];
        Self {
            weight: DELTA_WEIGHT,
            tau,
            a,
            source: Source::Synthetic,
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn n_max(&self) -> u64 {
        self.a.len() as u64
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Exact coefficient `tau(n)`, `1 <= n <= n_max`.
    pub fn tau(&self, n: u64) -> &BigInt {
        &self.tau[(n - 1) as usize]
    }

    /// Normalized coefficient `a(n)`, `1 <= n <= n_max`.
    #[inline]
    pub fn a(&self, n: u64) -> f64 {
        self.a[(n - 1) as usize]
    }

    /// All normalized coefficients; index `i` holds `a(i + 1)`.
    pub fn normalized(&self) -> &[f64] {
        &self.a
    }

    pub fn exact(&self) -> &[BigInt] {
        &self.tau
    }

    /// Overwrites `tau(n)` and recomputes `a(n)` from it.
    pub fn set_tau(&mut self, n: u64, value: BigInt) {
        let i = (n - 1) as usize;
        self.a[i] = normalize(&value, n, self.weight);
        self.tau[i] = value;
    }

    /// Overwrites `a(n)` only, leaving `tau(n)` untouched.
    pub fn set_normalized(&mut self, n: u64, value: f64) {
        self.a[(n - 1) as usize] = value;
    }

    /// Synthetic copy with every normalized coefficient multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self::synthetic(self.a.iter().map(|v| v * c).collect())
    }

    /// Fails with [`Error::TableTooShort`] unless `n <= n_max`.
    pub fn require(&self, n: u64) -> Result<()> {
        if n > self.n_max() {
            Err(Error::TableTooShort {
                needed: n,
                available: self.n_max(),
            })
        } else {
            Ok(())
        }
    }
}

fn check_weight(weight: u32) -> Result<()> {
    if weight == 0 || weight % 2 == 1 {
        return Err(invalid("weight", format!("must be a positive even integer, got {weight}")));
    }
    Ok(())
}

/// `n^((weight - 1) / 2)` using only correctly rounded operations.
pub(crate) fn normalizer(n: u64, weight: u32) -> f64 {
    let x = n as f64;
    let mut p = 1.0;
    for _ in 0..(weight - 2) / 2 {
        p *= x;
    }
    p * x.sqrt()
}

fn normalize(tau: &BigInt, n: u64, weight: u32) -> f64 {
    tau.to_f64().unwrap_or(f64::NAN) / normalizer(n, weight)
}

/// Coefficients of the weight-12 discriminant form for `n <= n_max` with the
/// default generation budget.
pub fn generate_delta_coefficients(n_max: usize) -> Result<CoefficientTable> {
    generate_delta_coefficients_with(n_max, GenerationBudget::default())
}

pub fn generate_delta_coefficients_with(
    n_max: usize,
    budget: GenerationBudget,
) -> Result<CoefficientTable> {
    if n_max == 0 {
        return Err(invalid("n_max", "must be at least 1"));
    }
    if n_max > budget.max_n {
        return Err(Error::Budget {
            what: "n_max",
            requested: n_max as u64,
            limit: budget.max_n as u64,
        });
    }
    // tau(n) is the coefficient of q^(n-1) in prod (1 - q^m)^24
    let (tau, _) = series::eta24_coefficients(n_max);
    CoefficientTable::from_tau(DELTA_WEIGHT, tau, Source::Generated)
}

/// Least-squares description of `sum_{n <= M} |a(n)|^2 ~ A_hat * M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankinSelbergFit {
    /// Fitted density; the fit is through the origin.
    pub a_hat: f64,
    /// Log-log slope of `|sum - a_hat * M|` against `M`, or `None` when fewer
    /// than two checkpoints have a nonzero residual.
    pub residual_exponent: Option<f64>,
    pub checkpoints: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn rankin_selberg_scan(t: &CoefficientTable, checkpoints: &[f64]) -> Result<RankinSelbergFit> {
    if checkpoints.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 checkpoints, got {}",
            checkpoints.len()
        )));
    }
    if checkpoints.windows(2).any(|w| !(w[0] < w[1])) || !(checkpoints[0] >= 1.0) {
        return Err(invalid("checkpoints", "must be ascending and at least 1"));
    }
    let last = *checkpoints.last().unwrap();
    t.require(last.floor() as u64)?;

    let mut partial_sums = Vec::with_capacity(checkpoints.len());
    let mut acc = CompensatedSum::new();
    let mut n = 0u64;
    for &m in checkpoints {
        let upto = m.floor() as u64;
        while n < upto {
            n += 1;
            let v = t.a(n);
            acc.add(v * v);
        }
        partial_sums.push(acc.value());
    }
    let num: f64 = checkpoints.iter().zip(&partial_sums).map(|(m, s)| m * s).sum();
    let den: f64 = checkpoints.iter().map(|m| m * m).sum();
    let a_hat = num / den;
    let residuals: Vec<f64> = checkpoints
        .iter()
        .zip(&partial_sums)
        .map(|(m, s)| (s - a_hat * m).abs())
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = checkpoints
        .iter()
        .zip(&residuals)
        .filter(|(_, r)| **r > 0.0)
        .map(|(m, r)| (*m, *r))
        .unzip();
    let residual_exponent = if xs.len() >= 2 {
        Some(loglog_slope(&xs, &ys)?)
    } else {
        None
    };
    Ok(RankinSelbergFit {
        a_hat,
        residual_exponent,
        checkpoints: checkpoints.to_vec(),
        partial_sums,
        residuals,
    })
}

/// Whether `tau(1) = 1`, used by loaders that need a quick sanity check.
pub(crate) fn leading_is_one(t: &CoefficientTable) -> bool {
    t.n_max() >= 1 && t.tau(1).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau_values(t: &CoefficientTable, upto: u64) -> Vec<i64> {
        (1..=upto).map(|n| t.tau(n).to_i64().unwrap()).collect()
    }

    #[test]
    fn leading_coefficient() {
        let t = generate_delta_coefficients(1).unwrap();
        assert_eq!(t.tau(1), &BigInt::from(1));
        assert_eq!(t.a(1), 1.0);
    }

    #[test]
    fn first_coefficients_of_discriminant() {
        let t = generate_delta_coefficients(12).unwrap();
        assert_eq!(
            tau_values(&t, 12),
            vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944]
        );
        assert_eq!(t.tau(6), &(t.tau(2) * t.tau(3)));
    }

    #[test]
    fn normalization_uses_half_integral_power() {
        let t = generate_delta_coefficients(5).unwrap();
        let expect = -24.0 / 2f64.powf(5.5);
        assert!((t.a(2) - expect).abs() < 1e-15);
    }

    #[test]
    fn budget_exceeded_is_a_resource_error() {
        let err = generate_delta_coefficients_with(1000, GenerationBudget { max_n: 999 }).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
        assert!(generate_delta_coefficients(0).is_err());
    }

    #[test]
    fn rankin_selberg_on_synthetic_tables() {
        let zeros = CoefficientTable::synthetic(vec![0.0; 100]);
        let fit = rankin_selberg_scan(&zeros, &[10.0, 20.0, 50.0]).unwrap();
        assert_eq!(fit.a_hat, 0.0);
        assert_eq!(fit.residual_exponent, None);

        let ones = CoefficientTable::synthetic(vec![1.0; 100]);
        let fit = rankin_selberg_scan(&ones, &[10.0, 20.0, 50.0, 99.0]).unwrap();
        assert_eq!(fit.a_hat, 1.0);
        assert!(fit.residuals.iter().all(|r| *r <= 1.0));

        let fit = rankin_selberg_scan(&ones, &[10.5, 20.25, 50.9]).unwrap();
        assert!((fit.a_hat - 1.0).abs() < 0.05);
        assert!(fit.residuals.iter().all(|r| *r <= 1.0));
    }

    #[test]
    fn rankin_selberg_rejects_bad_checkpoints() {
        let ones = CoefficientTable::synthetic(vec![1.0; 100]);
        assert!(rankin_selberg_scan(&ones, &[10.0, 20.0]).is_err());
        assert!(rankin_selberg_scan(&ones, &[10.0, 5.0, 20.0]).is_err());
        assert!(matches!(
            rankin_selberg_scan(&ones, &[10.0, 20.0, 200.0]),
            Err(Error::TableTooShort { .. })
        ));
    }

    #[test]
    fn rankin_selberg_residual_grows_slower_than_linear() {
        let t = generate_delta_coefficients(20_000).unwrap();
        let cps: Vec<f64> = (0..=13).map(|i| (1000.0 * 20f64.powf(i as f64 / 13.0)).floor()).collect();
        let fit = rankin_selberg_scan(&t, &cps).unwrap();
        assert!(fit.a_hat > 0.0);
        assert!(fit.residual_exponent.unwrap() < 1.0);
    }
}
