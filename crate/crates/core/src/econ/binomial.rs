use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::WalkParams;
use crate::{DomainError, Result};

/// Exact probability `numerator / 2^log2_denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProb {
    pub numerator: BigUint,
    pub log2_denominator: u64,
}

impl ExactProb {
    pub fn zero() -> Self {
        ExactProb { numerator: BigUint::zero(), log2_denominator: 0 }
    }

    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.numerator, self.log2_denominator)
    }
}

/// `n / 2^log2_den` from the top two 64-bit digits of `n`, without
/// allocating.
fn scaled_to_f64(n: &BigUint, log2_den: u64) -> f64 {
    let mut digits = n.iter_u64_digits();
    let len = digits.len() as i64;
    let hi = match digits.next_back() {
        Some(d) => d,
        None => return 0.0,
    };
    let lo = digits.next_back().unwrap_or(0);
    let top = libm::ldexp(hi as f64, 64) + lo as f64;
    scale_pow2(top, 64 * (len - 2) - log2_den as i64)
}

fn scale_pow2(mut x: f64, mut exp: i64) -> f64 {
    // ldexp takes i32; step through wide exponents so nothing saturates early.
    while exp < i32::MIN as i64 / 2 {
        x = libm::ldexp(x, i32::MIN / 2);
        exp -= i32::MIN as i64 / 2;
    }
    libm::ldexp(x, exp as i32)
}

/// `C(n, k)` by the multiplicative formula; every intermediate division is
/// exact.
pub fn binomial_coefficient(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

fn rounded_mean(walk: &WalkParams) -> Result<i64> {
    if !walk.mean_step.is_finite() {
        return Err(DomainError::OutOfRange { name: "mean_step", value: walk.mean_step });
    }
    Ok(libm::round(walk.mean_step) as i64)
}

/// Exact probability that the walk sits at `offset` after `k` steps:
/// `C(2kS, offset - s + kS) / 2^(2kS)` with `s` the rounded mean step, and 0
/// outside `|offset - s| <= kS`.
pub fn binomial_request_prob_exact(offset: i64, k: u32, walk: &WalkParams) -> Result<ExactProb> {
    if k < 1 {
        return Err(DomainError::OutOfRange { name: "step index", value: k as f64 });
    }
    let mean = rounded_mean(walk)?;
    let span = k as i64 * walk.max_step as i64;
    let rel = offset - mean;
    if rel.abs() > span {
        return Ok(ExactProb::zero());
    }
    let trials = 2 * span as u64;
    let index = (rel + span) as u64;
    Ok(ExactProb {
        numerator: binomial_coefficient(trials, index),
        log2_denominator: trials,
    })
}

pub fn binomial_request_prob(offset: i64, k: u32, walk: &WalkParams) -> Result<f64> {
    Ok(binomial_request_prob_exact(offset, k, walk)?.to_f64())
}

/// Expected number of hits on `offset` among the next `n` requests:
/// `sum_{i=1..n} P_i(offset)`.
///
/// Each row's coefficient is derived exactly from the previous row's, so the
/// cost grows with the sum of row widths instead of their squares.
pub fn er_binomial(offset: i64, n: u32, walk: &WalkParams) -> Result<f64> {
    let mean = rounded_mean(walk)?;
    let gap = (offset - mean).unsigned_abs();
    let s = walk.max_step as u64;
    if n == 0 {
        return Ok(0.0);
    }
    if s == 0 {
        return Ok(if gap == 0 { n as f64 } else { 0.0 });
    }
    let first = gap.div_ceil(s).max(1);
    if first > n as u64 {
        return Ok(0.0);
    }
    let mut coef = binomial_coefficient(2 * first * s, first * s + gap);
    let mut total = scaled_to_f64(&coef, 2 * first * s);
    for i in first + 1..=n as u64 {
        let trials = 2 * (i - 1) * s;
        let hi = (i - 1) * s + gap;
        let lo = (i - 1) * s - gap;
        // The new row's coefficient is an integer, so the denominators can
        // be divided out in batches once every numerator factor is in.
        mul_batched(&mut coef, (1..=2 * s).map(|j| trials + j));
        div_batched(&mut coef, (1..=s).flat_map(|j| [hi + j, lo + j]));
        total += scaled_to_f64(&coef, trials + 2 * s);
    }
    Ok(total)
}

fn batches(factors: impl Iterator<Item = u64>) -> impl Iterator<Item = u64> {
    let mut factors = factors.peekable();
    core::iter::from_fn(move || {
        let mut acc = factors.next()?;
        while let Some(&f) = factors.peek() {
            match acc.checked_mul(f) {
                Some(v) => {
                    acc = v;
                    factors.next();
                }
                None => break,
            }
        }
        Some(acc)
    })
}

fn mul_batched(x: &mut BigUint, factors: impl Iterator<Item = u64>) {
    for b in batches(factors) {
        *x *= b;
    }
}

fn div_batched(x: &mut BigUint, factors: impl Iterator<Item = u64>) {
    for b in batches(factors) {
        *x /= b;
    }
}

/// Requests expected during the next `future_window`, assuming the arrival
/// rate observed over `past_window` stays constant. Rounds half up.
pub fn forecast_horizon(past_count: u64, future_window: f64, past_window: f64) -> Result<u64> {
    if !(past_window > 0.0) {
        return Err(DomainError::OutOfRange { name: "past_window", value: past_window });
    }
    if !(future_window > 0.0) {
        return Ok(0);
    }
    Ok(libm::floor(past_count as f64 * future_window / past_window + 0.5) as u64)
}

/// Weighted mean of `steps` (oldest first). The newest step has weight 1
/// and each older one is scaled by another factor of `decay`.
pub fn weighted_mean_step(steps: &[i64], decay: f64) -> Result<f64> {
    if steps.is_empty() {
        return Err(DomainError::EmptySteps);
    }
    if !(decay > 0.0 && decay <= 1.0) {
        return Err(DomainError::OutOfRange { name: "step_decay", value: decay });
    }
    let mut weight = 1.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for &s in steps.iter().rev() {
        num += weight * s as f64;
        den += weight;
        weight *= decay;
    }
    Ok(num / den)
}

/// Consecutive differences of a content-id sequence.
pub(crate) fn steps_of(ids: impl IntoIterator<Item = u32>) -> Vec<i64> {
    let mut out = Vec::new();
    let mut prev: Option<u32> = None;
    for id in ids {
        if let Some(p) = prev {
            out.push(id as i64 - p as i64);
        }
        prev = Some(id);
    }
    out
}
