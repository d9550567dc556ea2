//! Bessel functions of the first kind for integer order.

use crate::error::{Error, Result};

pub const MAX_ORDER: i32 = 40;
pub const MAX_ARGUMENT: f64 = 50.0;

/// `J_m(x)` for integer `m`, `|m| ≤ 40`, `|x| ≤ 50`.
///
/// Miller's backward recurrence from a start order well above both `m` and
/// `x`, normalized with `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j(m: i32, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::OutOfRange(format!(
            "bessel_j argument {x} outside [-{MAX_ARGUMENT}, {MAX_ARGUMENT}]"
        )));
    }
    if m.abs() > MAX_ORDER {
        return Err(Error::OutOfRange(format!(
            "bessel_j order {m} outside [-{MAX_ORDER}, {MAX_ORDER}]"
        )));
    }
    let n = m.unsigned_abs() as usize;
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x)
    let mut sign = 1.0;
    if m < 0 && n % 2 == 1 {
        sign = -sign;
    }
    if x < 0.0 && n % 2 == 1 {
        sign = -sign;
    }
    Ok(sign * bessel_jn_nonneg(n, x.abs()))
}

fn bessel_jn_nonneg(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let scale = n.max(x.ceil() as usize) as f64;
    let mut start = (scale + 30.0 + 2.0 * (40.0 * scale).sqrt()) as usize;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{k+1}
    let mut j_curr = 1e-30; // J_k
    let mut target = 0.0;
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j_curr - j_next;
        j_next = j_curr;
        j_curr = j_prev;
        if j_curr.abs() > 1e250 {
            j_curr *= 1e-250;
            j_next *= 1e-250;
            target *= 1e-250;
            even_sum *= 1e-250;
        }
        // j_curr now holds J_{k-1}
        let order = k - 1;
        if order == n {
            target = j_curr;
        }
        if order % 2 == 0 && order > 0 {
            even_sum += j_curr;
        }
    }
    let norm = j_curr + 2.0 * even_sum;
    target / norm
}
