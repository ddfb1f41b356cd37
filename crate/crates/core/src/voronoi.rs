//! Truncated Voronoi main term for twisted long sums,
//!
//! ```text
//! sum_{n <= x} a(n) e(nh/k) ~ (k^(1/2) x^(1/4) / (pi sqrt 2))
//!     * sum_{n <= N} a(n) e(-n h_bar/k) n^(-3/4) cos(4 pi sqrt(n x)/k - pi/4)
//! ```
//!
//! with error `O(k x^(1/2 + eps) N^(-1/2))`. For `k > 2` both sides are
//! genuinely complex; for `k <= 2` the imaginary part of the main term is a
//! rounding-level diagnostic.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2, TAU};
use std::io::Write;

use num_complex::Complex64;

use crate::coefficients::CoefficientTable;
use crate::error::{invalid, Error, Result};
use crate::numeric::{loglog_slope, ComplexSum};
use crate::sums::{long_sum_direct, short_sum_direct, RationalTwist, ShortSumSpec, UnitRoots};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiSpec {
    x: f64,
    n_trunc: f64,
    twist: RationalTwist,
}

impl VoronoiSpec {
    /// `x >= 1`, `k <= x`, truncation `N >= 0` (`N < 1` means no terms).
    pub fn new(x: f64, n_trunc: f64, twist: RationalTwist) -> Result<Self> {
        if !(x >= 1.0) || !x.is_finite() {
            return Err(invalid("x", format!("must be a finite real >= 1, got {x}")));
        }
        if twist.k() as f64 > x {
            return Err(invalid("k", format!("k = {} exceeds x = {x}", twist.k())));
        }
        if !(n_trunc >= 0.0) || !n_trunc.is_finite() {
            return Err(invalid("N", format!("must be a finite real >= 0, got {n_trunc}")));
        }
        Ok(Self { x, n_trunc, twist })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn n_trunc(&self) -> f64 {
        self.n_trunc
    }

    pub fn twist(&self) -> RationalTwist {
        self.twist
    }
}

fn prefactor(x: f64, k: u64) -> f64 {
    (k as f64).sqrt() * x.sqrt().sqrt() / (PI * SQRT_2)
}

/// `cos(4 pi sqrt(n x)/k - pi/4)`, reducing the argument in turns first.
#[inline]
fn phase_cos(n: u64, x: f64, k: u64) -> f64 {
    let turns = 2.0 * (n as f64 * x).sqrt() / k as f64 - 0.125;
    (TAU * (turns - turns.floor())).cos()
}

/// Terms of the main-term series, without the prefactor, for `n` in
/// `lo < n <= hi`.
struct Terms<'a> {
    a: &'a [f64],
    x: f64,
    twist: RationalTwist,
    roots: UnitRoots,
}

impl<'a> Terms<'a> {
    fn new(t: &'a CoefficientTable, x: f64, twist: RationalTwist) -> Self {
        Self {
            a: t.normalized(),
            x,
            twist,
            roots: UnitRoots::new(twist.k()),
        }
    }

    #[inline]
    fn term(&self, n: u64) -> Complex64 {
        let weight = self.a[(n - 1) as usize] * (n as f64).powf(-0.75) * phase_cos(n, self.x, self.twist.k());
        self.roots.get(self.twist.dual_residue(n)) * weight
    }
}

fn checked_count(n_trunc: f64, t: &CoefficientTable) -> Result<u64> {
    if n_trunc < 1.0 {
        return Ok(0);
    }
    let n = n_trunc.floor() as u64;
    t.require(n)?;
    Ok(n)
}

/// The truncated main term. Returns 0 when `N < 1`.
pub fn voronoi_main_term(spec: &VoronoiSpec, t: &CoefficientTable) -> Result<Complex64> {
    let upto = checked_count(spec.n_trunc, t)?;
    voronoi_partial(spec, 0, upto, t)
}

/// Prefactor times the series restricted to `lo < n <= hi`.
pub fn voronoi_partial(spec: &VoronoiSpec, lo: u64, hi: u64, t: &CoefficientTable) -> Result<Complex64> {
    if hi > 0 {
        t.require(hi)?;
    }
    let terms = Terms::new(t, spec.x, spec.twist);
    let mut acc = ComplexSum::new();
    for n in lo + 1..=hi {
        acc.add(terms.term(n));
    }
    Ok(acc.value() * prefactor(spec.x, spec.twist.k()))
}

/// Main terms for several truncations at once (one pass over `n`). The
/// returned values follow the order of `truncations`.
pub fn voronoi_main_terms(
    x: f64,
    twist: RationalTwist,
    truncations: &[f64],
    t: &CoefficientTable,
) -> Result<Vec<Complex64>> {
    let counts = truncations
        .iter()
        .map(|n| {
            VoronoiSpec::new(x, *n, twist)?;
            checked_count(*n, t)
        })
        .collect::<Result<Vec<u64>>>()?;
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| counts[i]);

    let terms = Terms::new(t, x, twist);
    let scale = prefactor(x, twist.k());
    let mut out = vec![Complex64::new(0.0, 0.0); counts.len()];
    let mut acc = ComplexSum::new();
    let mut n = 0u64;
    for i in order {
        while n < counts[i] {
            n += 1;
            acc.add(terms.term(n));
        }
        out[i] = acc.value() * scale;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiErrorProfile {
    pub n_values: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
    /// The direct long sum every main term was compared against.
    pub direct: Complex64,
    pub main_terms: Vec<Complex64>,
}

impl VoronoiErrorProfile {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N,error")?;
        for (n, e) in self.n_values.iter().zip(&self.errors) {
            writeln!(w, "{n},{e}")?;
        }
        Ok(())
    }
}

/// `|long_sum_direct(x) - main_term(N)|` over a ladder of truncations, with
/// the log-log slope of error against `N`.
pub fn error_profile(
    x: f64,
    twist: RationalTwist,
    n_values: &[f64],
    t: &CoefficientTable,
) -> Result<VoronoiErrorProfile> {
    if n_values.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 truncation values, got {}",
            n_values.len()
        )));
    }
    if n_values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("N_values", "must be strictly ascending"));
    }
    let direct = long_sum_direct(x, twist, t)?;
    let main_terms = voronoi_main_terms(x, twist, n_values, t)?;
    let errors: Vec<f64> = main_terms.iter().map(|m| (direct - m).norm()).collect();
    let fitted_slope = loglog_slope(n_values, &errors)?;
    Ok(VoronoiErrorProfile {
        n_values: n_values.to_vec(),
        errors,
        fitted_slope,
        direct,
        main_terms,
    })
}

/// `|S(x) - [main(x + Delta) - main(x)]|` for the short window starting at `x`,
/// both main terms truncated at `N`.
pub fn short_sum_voronoi_error(
    x: f64,
    spec: &ShortSumSpec,
    n_trunc: f64,
    t: &CoefficientTable,
) -> Result<f64> {
    let twist = spec.twist();
    let direct = short_sum_direct(x, spec, t)?;
    let upper = voronoi_main_term(&VoronoiSpec::new(x + spec.delta(), n_trunc, twist)?, t)?;
    let lower = voronoi_main_term(&VoronoiSpec::new(x, n_trunc, twist)?, t)?;
    Ok((direct - (upper - lower)).norm())
}

/// `sum a(n) e(nh/k) exp(-n/X)`, which tends to the value at `s = 0` of the
/// twisted coefficient series with corrections of order `k^2/X`. The
/// truncated main term omits this constant, so at desk scale it sets the
/// floor of `|direct - main_term(N)|`.
pub fn constant_term_estimate(twist: RationalTwist, smoothing: f64, t: &CoefficientTable) -> Result<Complex64> {
    if !(smoothing >= 1.0) || !smoothing.is_finite() {
        return Err(invalid("X", format!("smoothing length must be finite and >= 1, got {smoothing}")));
    }
    let upto = (40.0 * smoothing).ceil() as u64;
    t.require(upto)?;
    let roots = UnitRoots::new(twist.k());
    let mut acc = ComplexSum::new();
    for n in 1..=upto {
        acc.add(roots.get(twist.residue(n)) * (t.a(n) * (-(n as f64) / smoothing).exp()));
    }
    Ok(acc.value())
}

/// Residual of `cos(2 xi - pi/4) - cos(2 eta - pi/4) = 2 sin(xi - eta) cos(xi + eta + pi/4)`.
pub fn trig_difference_identity_check(xi: f64, eta: f64) -> f64 {
    let lhs = (2.0 * xi - FRAC_PI_4).cos() - (2.0 * eta - FRAC_PI_4).cos();
    let rhs = 2.0 * (xi - eta).sin() * (xi + eta + FRAC_PI_4).cos();
    (lhs - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::generate_delta_coefficients;
    use crate::sums::make_twist;
    use astro_float::{BigFloat, Consts, RoundingMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: usize = 192;
    const RM: RoundingMode = RoundingMode::ToEven;

    /// The `k = 1` main term evaluated in 192-bit arithmetic.
    fn main_term_highprec(x: f64, n_trunc: u64, t: &CoefficientTable) -> f64 {
        let mut cc = Consts::new().unwrap();
        let pi = cc.pi(P, RM);
        let xb = BigFloat::from_f64(x, P);
        let mut acc = BigFloat::from_f64(0.0, P);
        for n in 1..=n_trunc {
            let nb = BigFloat::from_u64(n, P);
            let root = nb.mul(&xb, P, RM).sqrt(P, RM);
            let four = BigFloat::from_u64(4, P);
            let quarter_pi = pi.div(&four, P, RM);
            let arg = four.mul(&pi, P, RM).mul(&root, P, RM).sub(&quarter_pi, P, RM);
            let c = arg.cos(P, RM, &mut cc);
            // n^(-3/4) = 1 / sqrt(sqrt(n)^3)
            let s = nb.sqrt(P, RM);
            let w = s.mul(&s, P, RM).mul(&s, P, RM).sqrt(P, RM).reciprocal(P, RM);
            let a = BigFloat::from_f64(t.a(n), P);
            acc = acc.add(&a.mul(&w, P, RM).mul(&c, P, RM), P, RM);
        }
        let pre = xb.sqrt(P, RM).sqrt(P, RM).div(
            &pi.mul(&BigFloat::from_u64(2, P).sqrt(P, RM), P, RM),
            P,
            RM,
        );
        let v = acc.mul(&pre, P, RM);
        v.to_string().parse::<f64>().unwrap()
    }

    #[test]
    fn empty_truncation_is_zero() {
        let t = generate_delta_coefficients(100).unwrap();
        let spec = VoronoiSpec::new(50.0, 0.5, RationalTwist::trivial()).unwrap();
        assert_eq!(voronoi_main_term(&spec, &t).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ten_terms_against_high_precision() {
        let t = generate_delta_coefficients(20).unwrap();
        let spec = VoronoiSpec::new(1e4, 10.0, RationalTwist::trivial()).unwrap();
        let fast = voronoi_main_term(&spec, &t).unwrap();
        let slow = main_term_highprec(1e4, 10, &t);
        assert!((fast.re - slow).abs() <= 1e-12 * (1.0 + slow.abs()), "{fast} vs {slow}");
        assert!(fast.im.abs() <= 1e-15);
    }

    #[test]
    fn argument_validation() {
        let tw = make_twist(1, 7).unwrap();
        assert!(VoronoiSpec::new(5.0, 3.0, tw).is_err());
        assert!(VoronoiSpec::new(0.5, 3.0, RationalTwist::trivial()).is_err());
        let t = generate_delta_coefficients(10).unwrap();
        let spec = VoronoiSpec::new(100.0, 11.0, RationalTwist::trivial()).unwrap();
        assert!(matches!(voronoi_main_term(&spec, &t), Err(Error::TableTooShort { .. })));
    }

    #[test]
    fn telescoping_partial_sums() {
        let t = generate_delta_coefficients(2000).unwrap();
        for (h, k) in [(0, 1), (2, 5)] {
            let tw = make_twist(h, k).unwrap();
            for l in [16u64, 100, 512] {
                let x = 5000.0;
                let big = voronoi_main_term(&VoronoiSpec::new(x, 2.0 * l as f64, tw).unwrap(), &t).unwrap();
                let small = voronoi_main_term(&VoronoiSpec::new(x, l as f64, tw).unwrap(), &t).unwrap();
                let spec = VoronoiSpec::new(x, 0.0, tw).unwrap();
                let part = voronoi_partial(&spec, l, 2 * l, &t).unwrap();
                let diff = big - small;
                assert!((diff - part).norm() <= 1e-10 * part.norm().max(1e-300) + 1e-13);
            }
        }
    }

    #[test]
    fn batched_main_terms_match_single() {
        let t = generate_delta_coefficients(1000).unwrap();
        let tw = make_twist(3, 4).unwrap();
        let ns = [700.0, 5.0, 64.5, 0.3];
        let batch = voronoi_main_terms(900.0, tw, &ns, &t).unwrap();
        for (n, b) in ns.iter().zip(&batch) {
            let single = voronoi_main_term(&VoronoiSpec::new(900.0, *n, tw).unwrap(), &t).unwrap();
            assert!((single - b).norm() <= 1e-12 * (1.0 + single.norm()));
        }
    }

    #[test]
    fn saturated_truncation_has_flat_profile() {
        let t = generate_delta_coefficients(400).unwrap();
        // all N beyond the table's useful range give the same main term only
        // when the series terms vanish, so use a table zero past n = 50
        let mut a = t.normalized().to_vec();
        a.iter_mut().skip(50).for_each(|v| *v = 0.0);
        let t = CoefficientTable::synthetic(a);
        let p = error_profile(50.0, RationalTwist::trivial(), &[60.0, 120.0, 240.0], &t).unwrap();
        assert!(p.errors.windows(2).all(|w| (w[0] - w[1]).abs() <= 1e-12 * w[0]));
        assert!(p.fitted_slope.abs() < 1e-9);
    }

    #[test]
    fn error_profile_needs_three_points() {
        let t = generate_delta_coefficients(100).unwrap();
        assert!(error_profile(50.0, RationalTwist::trivial(), &[4.0, 16.0], &t).is_err());
    }

    #[test]
    fn main_term_is_real_for_small_moduli() {
        let t = generate_delta_coefficients(500).unwrap();
        for (h, k) in [(0, 1), (1, 2)] {
            let spec = VoronoiSpec::new(3000.0, 500.0, make_twist(h, k).unwrap()).unwrap();
            let v = voronoi_main_term(&spec, &t).unwrap();
            assert!(v.im.abs() <= 1e-9 * v.norm().max(1.0));
        }
    }

    #[test]
    fn constant_term_converges() {
        let t = generate_delta_coefficients(80_000).unwrap();
        let c1 = constant_term_estimate(RationalTwist::trivial(), 1000.0, &t).unwrap();
        let c2 = constant_term_estimate(RationalTwist::trivial(), 2000.0, &t).unwrap();
        assert!((c1 - c2).norm() < 1e-3);
        assert!(c1.im == 0.0 && c1.re > 0.5);
        assert!(constant_term_estimate(RationalTwist::trivial(), 3000.0, &t).is_err());
    }

    #[test]
    fn trig_identity_residuals() {
        assert!(trig_difference_identity_check(1.234, 1.234) <= 1e-15);
        assert!(trig_difference_identity_check(PI / 8.0, 0.0) <= 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for _ in 0..100_000 {
            let xi = rng.gen_range(-1e6..1e6);
            let eta = rng.gen_range(-1e6..1e6);
            worst = worst.max(trig_difference_identity_check(xi, eta));
        }
        assert!(worst <= 1e-9, "max residual {worst}");
    }
}
