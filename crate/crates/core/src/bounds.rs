//! Exponent pairs, plain exponential sums, Bombieri's inequality, and
//! right-hand-side calculators for the moment and large-value theorems.
//!
//! Calculators never fail on precondition violations; they return an
//! [`Evaluation`] carrying human-readable flags instead. Implicit constants
//! are taken to be 1 and `M^eps` factors use the explicit knob.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numeric::ComplexSum;

/// Relative slack for `<=`/`>=` classification at boundaries.
const CLASSIFY_TOL: f64 = 1e-9;

fn le(a: f64, b: f64) -> bool {
    a <= b + CLASSIFY_TOL * a.abs().max(b.abs())
}

fn ge(a: f64, b: f64) -> bool {
    le(b, a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    p: f64,
    q: f64,
}

impl ExponentPair {
    /// The trivial van der Corput pair.
    pub const HALF: ExponentPair = ExponentPair { p: 0.5, q: 0.5 };
    pub const FOUR_ELEVEN: ExponentPair = ExponentPair {
        p: 4.0 / 18.0,
        q: 11.0 / 18.0,
    };

    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 0.5) {
            return Err(invalid("p", format!("{p} is outside (0, 1/2]")));
        }
        if !(0.5..=1.0).contains(&q) {
            return Err(invalid("q", format!("{q} is outside [1/2, 1]")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn catalog() -> [ExponentPair; 2] {
        [Self::HALF, Self::FOUR_ELEVEN]
    }
}

/// `A(p, q) = (p/(2p+2), (p+q+1)/(2p+2))`.
pub fn ep_process_a(e: ExponentPair) -> Result<ExponentPair> {
    let d = 2.0 * e.p + 2.0;
    ExponentPair::new(e.p / d, (e.p + e.q + 1.0) / d)
}

/// `B(p, q) = (q - 1/2, p + 1/2)`.
pub fn ep_process_b(e: ExponentPair) -> Result<ExponentPair> {
    ExponentPair::new(e.q - 0.5, e.p + 0.5)
}

/// `Amp^p M^(q - p/2) + M^(1/2)/Amp` bounding `sum_{M <= n <= M+Delta} e(Amp sqrt n)`.
pub fn plain_expsum_bound(e: ExponentPair, amp: f64, m: f64, delta: f64) -> Result<f64> {
    if !(amp > 0.0) {
        return Err(invalid("Amp", "must be positive"));
    }
    if !(m >= 1.0) || !(delta >= 1.0 && delta <= m) {
        return Err(invalid("Delta", format!("need M >= 1 and 1 <= Delta <= M, got M={m}, Delta={delta}")));
    }
    Ok(amp.powf(e.p) * m.powf(e.q - e.p / 2.0) + m.sqrt() / amp)
}

/// `sum_{M <= n <= M+Delta} e(Amp sqrt n)`, compensated.
pub fn plain_expsum_direct(amp: f64, m: f64, delta: f64) -> Complex64 {
    let lo = m.ceil().max(1.0) as u64;
    let hi = (m + delta).floor() as u64;
    let mut acc = ComplexSum::new();
    for n in lo..=hi {
        let t = amp * (n as f64).sqrt();
        acc.add(Complex64::from_polar(1.0, TAU * (t - t.floor())));
    }
    acc.value()
}

fn inner(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (a, b) in z.iter().zip(w) {
        acc.add(a.conj() * b);
    }
    acc.value()
}

/// Both sides of `sum_r |<xi|phi_r>|^2 <= |xi|^2 max_r sum_s |<phi_r|phi_s>|`.
pub fn bombieri_check(xi: &[Complex64], phis: &[Vec<Complex64>]) -> Result<(f64, f64)> {
    if xi.is_empty() {
        return Err(invalid("xi", "dimension must be at least 1"));
    }
    if let Some(bad) = phis.iter().find(|v| v.len() != xi.len()) {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            found: bad.len(),
        });
    }
    let lhs: f64 = phis.iter().map(|phi| inner(xi, phi).norm_sqr()).sum();
    let norm2: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
    let max_row = phis
        .iter()
        .map(|r| phis.iter().map(|s| inner(r, s).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok((lhs, norm2 * max_row))
}

/// Inputs shared by the moment calculators. Fields mirror the theorem
/// statements; `alpha`, `beta`, `gamma` describe an assumed pointwise bound
/// `k^alpha Delta^beta M^gamma` (long-sum form `k^alpha x^beta` uses only
/// the first two).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub v0: f64,
    pub a: f64,
    pub k: f64,
    pub m: f64,
    pub delta: f64,
    pub delta_knob: f64,
    pub theta_knob: f64,
    pub eps_knob: f64,
}

pub const DEFAULT_KNOB: f64 = 0.05;
pub const MAX_KNOB: f64 = 0.2;

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            beta: 1.0,
            gamma: 0.0,
            v0: 1.0,
            a: 4.0,
            k: 1.0,
            m: 1.0,
            delta: 1.0,
            delta_knob: DEFAULT_KNOB,
            theta_knob: DEFAULT_KNOB,
            eps_knob: DEFAULT_KNOB,
        }
    }
}

impl BoundParams {
    /// Type-level checks only; theorem preconditions become flags.
    pub fn validate(&self) -> Result<()> {
        if !(self.v0 >= 1.0) {
            return Err(invalid("V0", format!("must be >= 1, got {}", self.v0)));
        }
        if !(self.a >= 2.0) {
            return Err(invalid("A", format!("must be >= 2, got {}", self.a)));
        }
        if !(self.k >= 1.0) || !(self.m >= 1.0) || !(self.delta > 0.0) {
            return Err(invalid("M", "need k >= 1, M >= 1, Delta > 0"));
        }
        for (name, v) in [
            ("delta_knob", self.delta_knob),
            ("theta_knob", self.theta_knob),
            ("eps_knob", self.eps_knob),
        ] {
            if !(0.0..=MAX_KNOB).contains(&v) {
                return Err(invalid(name, format!("{v} is outside [0, {MAX_KNOB}]")));
            }
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// `k^alpha Delta^beta M^gamma`.
    pub fn pointwise(&self) -> f64 {
        self.k.powf(self.alpha) * self.delta.powf(self.beta) * self.m.powf(self.gamma)
    }
}

/// One calculator result.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub theorem: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    pub branch: String,
    pub flags: Vec<String>,
    /// `None` when no branch of the statement covers the inputs.
    pub value: Option<f64>,
    pub terms: Vec<(&'static str, f64)>,
}

fn flag_if(flags: &mut Vec<String>, violated: bool, text: impl Into<String>) {
    if violated {
        flags.push(text.into());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Thm1Branch {
    /// `k << M^(-1/2) Delta` and `k << M^(1/4)`: `k^2 M^(2+eps)`.
    SmallModulus,
    /// `M^(-1/2) Delta << k << M^(-1/4) Delta^(2/3)`: `M^(1+eps) Delta^2`.
    LongWindow,
    NotCovered,
}

impl Thm1Branch {
    pub fn label(self) -> &'static str {
        match self {
            Thm1Branch::SmallModulus => "1",
            Thm1Branch::LongWindow => "2",
            Thm1Branch::NotCovered => "not covered",
        }
    }
}

pub fn thm1_branch_value(branch: Thm1Branch, k: f64, m: f64, delta: f64, eps: f64) -> Option<f64> {
    match branch {
        Thm1Branch::SmallModulus => Some(k * k * m.powf(2.0 + eps)),
        Thm1Branch::LongWindow => Some(m.powf(1.0 + eps) * delta * delta),
        Thm1Branch::NotCovered => None,
    }
}

/// Branch choice: where both hypotheses hold the values coincide
/// (`k = M^(-1/2) Delta` gives `k^2 M^2 = M Delta^2`); the first branch is
/// preferred unless its `M^(1/4)` cap is also tight and the second applies.
pub fn thm1_classify(k: f64, m: f64, delta: f64) -> Thm1Branch {
    let lower = delta / m.sqrt();
    let cap = m.powf(0.25);
    let upper = delta.powf(2.0 / 3.0) / cap;
    let first = le(k, lower) && le(k, cap);
    let second = ge(k, lower) && le(k, upper);
    match (first, second) {
        (true, true) if ge(k, cap) => Thm1Branch::LongWindow,
        (true, _) => Thm1Branch::SmallModulus,
        (false, true) => Thm1Branch::LongWindow,
        (false, false) => Thm1Branch::NotCovered,
    }
}

pub fn thm1_rhs(k: f64, m: f64, delta: f64, eps: f64) -> Evaluation {
    let branch = thm1_classify(k, m, delta);
    let mut flags = Vec::new();
    flag_if(&mut flags, !(1.0 <= delta && le(delta, m)), "Delta outside [1, M]");
    flag_if(&mut flags, branch == Thm1Branch::NotCovered, "no branch covers (k, M, Delta)");
    let value = thm1_branch_value(branch, k, m, delta, eps);
    Evaluation {
        theorem: "thm1",
        inputs: vec![("k", k), ("M", m), ("Delta", delta), ("eps", eps)],
        branch: branch.label().to_string(),
        flags,
        value,
        terms: value.map(|v| vec![("bound", v)]).unwrap_or_default(),
    }
}

/// The two terms of the large-value count bound.
pub fn thm2_terms(k: f64, m: f64, delta: f64, v: f64, e: ExponentPair, dk: f64) -> (f64, f64) {
    let (p, q) = (e.p, e.q);
    let first = k * k * m.powf(1.0 + 7.0 * dk) * delta * delta * v.powi(-5);
    let second = k.powf(2.0 * q / p)
        * delta.powf(2.0 + 2.0 / p)
        * m.powf(1.0 + q / p + dk * (6.0 + 5.0 / p + 2.0 * q / p))
        * v.powf(-2.0 * q / p - 4.0 - 3.0 / p);
    (first, second)
}

pub fn thm2_rhs(k: f64, m: f64, delta: f64, v: f64, e: ExponentPair, delta_knob: f64) -> Evaluation {
    let (first, second) = thm2_terms(k, m, delta, v, e, delta_knob);
    let dk = delta_knob;
    let mut flags = Vec::new();
    flag_if(&mut flags, !(1.0 <= k && le(k, m)), "k outside [1, M]");
    flag_if(&mut flags, !(1.0 <= delta && le(delta, m)), "Delta outside [1, M]");
    flag_if(&mut flags, v < 1.0, "V < 1");
    flag_if(&mut flags, !ge(v, k * m.powf(2.0 * dk)), "V below k M^(2 delta)");
    flag_if(&mut flags, !le(v, k * m.powf(0.5 + dk)), "V above k M^(1/2 + delta)");
    flag_if(
        &mut flags,
        !ge(v, (k * delta).powf(2.0 / 3.0) * m.powf(-1.0 / 3.0 + dk)),
        "V below k^(2/3) Delta^(2/3) M^(-1/3 + delta)",
    );
    flag_if(&mut flags, !le(v, delta * m.powf(dk)), "V above Delta M^delta");
    Evaluation {
        theorem: "thm2",
        inputs: vec![
            ("k", k),
            ("M", m),
            ("Delta", delta),
            ("V", v),
            ("p", e.p),
            ("q", e.q),
            ("delta", dk),
        ],
        branch: "single".into(),
        flags,
        value: Some(first + second),
        terms: vec![("first", first), ("second", second)],
    }
}

/// Side of a case split in `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl Side {
    fn of(a: f64, split: f64) -> Side {
        if le(a, split) {
            Side::Below
        } else {
            Side::Above
        }
    }

    fn label(self) -> &'static str {
        match self {
            Side::Below => "below",
            Side::Above => "above",
        }
    }
}

pub fn thm3_phi_split() -> f64 {
    4.0
}

pub fn thm3_psi_split(e: ExponentPair) -> f64 {
    2.0 * e.q / e.p + 3.0 + 3.0 / e.p
}

pub fn thm3_phi(b: &BoundParams, side: Side) -> f64 {
    let me = b.m.powf(1.0 + b.eps_knob);
    match side {
        Side::Below => b.k * b.k * me * b.delta * b.delta * b.v0.powf(b.a - 4.0),
        Side::Above => {
            b.k.powf(b.alpha * b.a - 4.0 * b.alpha + 2.0)
                * b.delta.powf(b.beta * b.a - 4.0 * b.beta + 2.0)
                * b.m.powf(b.gamma * b.a - 4.0 * b.gamma + 1.0 + b.eps_knob)
        }
    }
}

pub fn thm3_psi(b: &BoundParams, e: ExponentPair, side: Side) -> f64 {
    let (p, q) = (e.p, e.q);
    let base = b.k.powf(2.0 * q / p) * b.delta.powf(2.0 + 2.0 / p) * b.m.powf(1.0 + q / p + b.eps_knob);
    let exponent = b.a - thm3_psi_split(e);
    match side {
        Side::Below => base * b.v0.powf(exponent),
        Side::Above => base * b.pointwise().powf(exponent),
    }
}

pub fn thm3_rhs(b: &BoundParams, e: ExponentPair) -> Evaluation {
    let main = b.m.powf(1.0 + b.eps_knob) * b.v0.powf(b.a);
    let phi_side = Side::of(b.a, thm3_phi_split());
    let psi_side = Side::of(b.a, thm3_psi_split(e));
    let phi = thm3_phi(b, phi_side);
    let psi = thm3_psi(b, e, psi_side);
    let mut flags = Vec::new();
    flag_if(&mut flags, !(1.0 <= b.k && le(b.k, b.m)), "k outside [1, M]");
    flag_if(&mut flags, !(1.0 <= b.delta && le(b.delta, b.m)), "Delta outside [1, M]");
    flag_if(&mut flags, b.a < 2.0, "A < 2");
    flag_if(&mut flags, !ge(b.v0, b.k), "V0 below k");
    flag_if(&mut flags, !le(b.v0, b.pointwise()), "V0 above k^alpha Delta^beta M^gamma");
    flag_if(
        &mut flags,
        !ge(b.v0, (b.k * b.delta).powf(2.0 / 3.0) * b.m.powf(-1.0 / 3.0)),
        "V0 below k^(2/3) Delta^(2/3) M^(-1/3)",
    );
    Evaluation {
        theorem: "thm3",
        inputs: params_inputs(b, Some(e)),
        branch: format!("Phi:{},Psi:{}", phi_side.label(), psi_side.label()),
        flags,
        value: Some(main + phi + psi),
        terms: vec![("main", main), ("Phi", phi), ("Psi", psi)],
    }
}

fn params_inputs(b: &BoundParams, e: Option<ExponentPair>) -> Vec<(&'static str, f64)> {
    let mut v = vec![
        ("k", b.k),
        ("M", b.m),
        ("Delta", b.delta),
        ("A", b.a),
        ("V0", b.v0),
        ("alpha", b.alpha),
        ("beta", b.beta),
        ("gamma", b.gamma),
        ("eps", b.eps_knob),
    ];
    if let Some(e) = e {
        v.push(("p", e.p));
        v.push(("q", e.q));
    }
    v
}

pub fn thm4_value(k: f64, m: f64, a: f64, eps: f64) -> f64 {
    k * k * m.powf(11.0 / 6.0 + 29.0 * (a - 4.0) / 72.0 + eps)
}

pub fn thm4_rhs(k: f64, m: f64, a: f64, eps: f64) -> Evaluation {
    let mut flags = Vec::new();
    flag_if(&mut flags, a < 11.0, "A < 11");
    flag_if(&mut flags, !ge(k, m.powf(1.0 / 9.0)), "k below M^(1/9)");
    flag_if(&mut flags, !le(k, m.powf(7.0 / 18.0)), "k above M^(7/18)");
    let value = thm4_value(k, m, a, eps);
    Evaluation {
        theorem: "thm4",
        inputs: vec![("k", k), ("M", m), ("A", a), ("eps", eps)],
        branch: "single".into(),
        flags,
        value: Some(value),
        terms: vec![("bound", value)],
    }
}

/// The four lines of the `k = 1` moment bound, in the order stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Thm5Case {
    /// `A <= 8`, `Delta << M^(7/24)`: `M^(A/11+1+eps) Delta^(6A/11)`.
    SmallAShort,
    /// `A <= 8`, `Delta >> M^(7/24)`: `M^(A/4+1+eps)`.
    SmallALong,
    /// `A >= 8`, `Delta << M^(4/9 - 11/(9A))`: `M^(A/11+1+eps) Delta^(6A/11)`.
    LargeAShort,
    /// `A >= 8`, `Delta >> M^(4/9 - 11/(9A))`: `M^((A+1)/3+eps)`.
    LargeALong,
}

impl Thm5Case {
    pub fn label(self) -> &'static str {
        match self {
            Thm5Case::SmallAShort => "A<=8,Delta<<M^(7/24)",
            Thm5Case::SmallALong => "A<=8,Delta>>M^(7/24)",
            Thm5Case::LargeAShort => "A>=8,Delta<<M^(4/9-11/(9A))",
            Thm5Case::LargeALong => "A>=8,Delta>>M^(4/9-11/(9A))",
        }
    }
}

pub fn thm5_delta_threshold(m: f64, a: f64) -> f64 {
    if a <= 8.0 {
        m.powf(7.0 / 24.0)
    } else {
        m.powf(4.0 / 9.0 - 11.0 / (9.0 * a))
    }
}

pub fn thm5_case_value(case: Thm5Case, m: f64, delta: f64, a: f64, eps: f64) -> f64 {
    match case {
        Thm5Case::SmallAShort | Thm5Case::LargeAShort => m.powf(a / 11.0 + 1.0 + eps) * delta.powf(6.0 * a / 11.0),
        Thm5Case::SmallALong => m.powf(a / 4.0 + 1.0 + eps),
        Thm5Case::LargeALong => m.powf((a + 1.0) / 3.0 + eps),
    }
}

pub fn thm5_classify(m: f64, delta: f64, a: f64) -> Thm5Case {
    let short = le(delta, thm5_delta_threshold(m, a));
    match (le(a, 8.0), short) {
        (true, true) => Thm5Case::SmallAShort,
        (true, false) => Thm5Case::SmallALong,
        (false, true) => Thm5Case::LargeAShort,
        (false, false) => Thm5Case::LargeALong,
    }
}

pub fn thm5_rhs(m: f64, delta: f64, a: f64, eps: f64) -> Evaluation {
    let case = thm5_classify(m, delta, a);
    let mut flags = Vec::new();
    flag_if(&mut flags, !(4.0..=11.0).contains(&a), "A outside [4, 11]");
    flag_if(&mut flags, !ge(delta, m.powf(0.2)), "Delta below M^(1/5)");
    flag_if(&mut flags, !le(delta, m.powf(4.0 / 9.0)), "Delta above M^(4/9)");
    flag_if(&mut flags, le(a, 8.0) && ge(a, 8.0), "A = 8 lies in overlapping case ranges");
    let value = thm5_case_value(case, m, delta, a, eps);
    Evaluation {
        theorem: "thm5",
        inputs: vec![("M", m), ("Delta", delta), ("A", a), ("eps", eps)],
        branch: case.label().into(),
        flags,
        value: Some(value),
        terms: vec![("bound", value)],
    }
}

pub fn longsum_phi_split() -> f64 {
    2.0
}

pub fn longsum_psi_split(e: ExponentPair) -> f64 {
    1.0 + (1.0 + 2.0 * e.q) / e.p
}

/// `Phi` of the long-sum moment bound. `Above` is the `A >= 2` line.
pub fn longsum_phi(b: &BoundParams, side: Side) -> f64 {
    let (al, be, a, eps) = (b.alpha, b.beta, b.a, b.eps_knob);
    match side {
        Side::Above => b.k.powf(al * a + 2.0 * (1.0 - al)) * b.m.powf(be * a + (1.0 - 2.0 * be) + eps),
        Side::Below => b.k.powf(a / 2.0 + 1.0) * b.m.powf(a / 4.0 + 0.5 + eps),
    }
}

/// `Psi` of the long-sum moment bound. `Above` is the `A >= 1 + (1+2q)/p` line.
pub fn longsum_psi(b: &BoundParams, e: ExponentPair, side: Side) -> f64 {
    let (p, q) = (e.p, e.q);
    let (al, be, a, eps) = (b.alpha, b.beta, b.a, b.eps_knob);
    match side {
        Side::Above => {
            b.k.powf(al * a - al - al / p + (1.0 - al) * 2.0 * q / p)
                * b.m.powf(be * a + 1.0 - be - be / p + (1.0 - 2.0 * be) * q / p + eps)
        }
        Side::Below => {
            b.k.powf(a / 2.0 - 0.5 - 1.0 / (2.0 * p) + q / p)
                * b.m.powf(a / 4.0 + 0.75 - 1.0 / (4.0 * p) + q / (2.0 * p) + eps)
        }
    }
}

pub fn longsum_moment_rhs(b: &BoundParams, e: ExponentPair) -> Evaluation {
    let main = b.k.powf(b.a / 2.0) * b.m.powf(b.a / 4.0 + 1.0);
    let phi_side = if ge(b.a, longsum_phi_split()) { Side::Above } else { Side::Below };
    let psi_side = if ge(b.a, longsum_psi_split(e)) { Side::Above } else { Side::Below };
    let phi = longsum_phi(b, phi_side);
    let psi = longsum_psi(b, e, psi_side);
    let mut flags = Vec::new();
    flag_if(&mut flags, !ge(e.q, (e.p + 1.0) / 2.0), "q < (p+1)/2");
    flag_if(
        &mut flags,
        !le(b.k, b.m.powf(0.5 - b.eps_knob)),
        "k above M^(1/2 - eps)",
    );
    Evaluation {
        theorem: "longsum",
        inputs: params_inputs(b, Some(e)),
        branch: format!("Phi:{},Psi:{}", phi_side.label(), psi_side.label()),
        flags,
        value: Some(main + phi + psi),
        terms: vec![("main", main), ("Phi", phi), ("Psi", psi)],
    }
}
