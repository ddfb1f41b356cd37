//! Truncated power-series arithmetic for eta products.
//!
//! The cube of the Euler product has the lacunary expansion
//! `prod (1 - q^n)^3 = sum_{j>=0} (-1)^j (2j+1) q^{j(j+1)/2}`, so the 24th power
//! is reached by seven sparse-by-dense products starting from the cube itself.

use std::ops::{AddAssign, Mul};

use num_bigint::BigInt;
use num_traits::Zero;

/// Nonzero terms `(exponent, coefficient)` of `prod (1 - q^n)^3` with
/// exponent `< len`, in increasing exponent order.
pub fn euler_cube_terms(len: usize) -> Vec<(usize, i64)> {
    let mut terms = Vec::new();
    let mut j = 0usize;
    loop {
        let e = j * (j + 1) / 2;
        if e >= len {
            break;
        }
        let c = (2 * j + 1) as i64;
        terms.push((e, if j.is_multiple_of(2) { c } else { -c }));
        j += 1;
    }
    terms
}

/// `dense * sparse` truncated to `dense.len()` coefficients.
pub fn mul_sparse<T>(dense: &[T], sparse: &[(usize, i64)]) -> Vec<T>
where
    T: Clone + Zero + From<i64> + Mul<Output = T> + AddAssign,
{
    let len = dense.len();
    let mut out = vec![T::zero(); len];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for &(e, c) in sparse {
            if e > i {
                break;
            }
            acc += T::from(c) * dense[i - e].clone();
        }
        *slot = acc;
    }
    out
}

fn densify<T: Clone + Zero + From<i64>>(sparse: &[(usize, i64)], len: usize) -> Vec<T> {
    let mut dense = vec![T::zero(); len];
    for &(e, c) in sparse {
        dense[e] = T::from(c);
    }
    dense
}

/// Which arithmetic produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Fixed128,
    BigInt,
}

/// Coefficients `c_0 .. c_{len-1}` of `prod_{n>=1} (1 - q^n)^24`.
///
/// Runs in `i128` while a worst-case magnitude bound proves no product can
/// overflow, and switches to arbitrary precision otherwise.
pub fn eta24_coefficients(len: usize) -> (Vec<BigInt>, Engine) {
    if len == 0 {
        return (Vec::new(), Engine::Fixed128);
    }
    let cube = euler_cube_terms(len);
    let l1: u128 = cube.iter().map(|&(_, c)| c.unsigned_abs() as u128).sum();

    let mut dense: Vec<i128> = densify(&cube, len);
    for step in 0..7 {
        let max = dense.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        let fits = max
            .checked_mul(l1)
            .is_some_and(|b| b <= i128::MAX as u128);
        if !fits {
            let big: Vec<BigInt> = dense.iter().map(|&v| BigInt::from(v)).collect();
            return (finish_bigint(big, &cube, 7 - step), Engine::BigInt);
        }
        dense = mul_sparse(&dense, &cube);
    }
    (dense.into_iter().map(BigInt::from).collect(), Engine::Fixed128)
}

/// Same series computed entirely in arbitrary precision.
pub fn eta24_coefficients_bigint(len: usize) -> Vec<BigInt> {
    let cube = euler_cube_terms(len);
    finish_bigint(densify(&cube, len), &cube, 7)
}

fn finish_bigint(mut dense: Vec<BigInt>, cube: &[(usize, i64)], steps: usize) -> Vec<BigInt> {
    for _ in 0..steps {
        dense = mul_sparse(&dense, cube);
    }
    dense
}
