//! Logit-scale transforms and exact boundary arithmetic for fractions.

/// logit(p) = ln(p / (1 - p)). Requires p in (0, 1).
pub fn logit(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "logit requires p in (0, 1), got {p}");
    (p / (1.0 - p)).ln()
}

/// Inverse logit, exp(t) / (1 + exp(t)); evaluated via the stable branch.
pub fn inv_logit(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Exact test of x / m <= p, treating p as the binary rational it is.
///
/// Decomposes p into mantissa * 2^exp and compares integers, so grid
/// boundaries such as x/m exactly equal to p never misclassify.
pub fn frac_le(x: u64, m: u64, p: f64) -> bool {
    assert!(m > 0, "frac_le requires m > 0");
    assert!((0.0..=1.0).contains(&p) && p.is_finite());
    if p == 0.0 {
        return x == 0;
    }
    if p >= 1.0 {
        return true;
    }
    // p = mant * 2^exp with mant < 2^53 and exp in [-1074, -1].
    let bits = p.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, exp) = if raw_exp == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    debug_assert!(exp < 0);
    // x / m <= mant * 2^exp  <=>  x << -exp <= m * mant.
    let shift = (-exp) as u32;
    let lhs = (x as u128) << shift.min(127);
    if shift > 127 {
        // p is subnormal-scale; x / m <= p only if x = 0, handled above.
        return x == 0;
    }
    lhs <= (m as u128) * (mant as u128)
}

/// Largest integer j with j <= m * p, computed exactly.
pub fn floor_mul(m: u64, p: f64) -> u64 {
    assert!((0.0..=1.0).contains(&p) && p.is_finite());
    if p >= 1.0 {
        return m;
    }
    // Binary search over j using the exact comparison j/m <= p.
    let (mut lo, mut hi) = (0u64, m);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if frac_le(mid, m, p) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}
