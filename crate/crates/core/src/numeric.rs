//! Floating-point helpers shared by the model and the solvers.

/// Tolerance used when comparing a route duration against the time budget.
pub const EPS_FEAS: f64 = 1e-6;

/// Tolerance for deciding that a variable value is integral.
pub const EPS_INT: f64 = 1e-6;

/// Correctly rounded sum of a sequence of finite floats.
///
/// Keeps a list of non-overlapping partial sums (Shewchuk's scheme), so the
/// result does not depend on the order of the terms.
pub fn exact_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in terms {
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    // Round the partials back to a single float, correcting the half-way case.
    let mut hi = 0.0;
    if let Some(mut n) = partials.len().checked_sub(1) {
        hi = partials[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = partials[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
    }
    hi
}

/// True when `value` is within [`EPS_INT`] of an integer.
pub fn is_integral(value: f64) -> bool {
    (value - value.round()).abs() <= EPS_INT
}
