//! Transition profiles used for smooth truncations.

/// Quintic smoothstep: 0 for `t ≤ 0`, 1 for `t ≥ 1`, C² in between.
pub fn quintic_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

/// Derivative of [`quintic_step`].
pub fn quintic_step_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (t - 1.0) * (t - 1.0)
    }
}

fn bump_tail(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let a = bump_tail(t);
    let b = bump_tail(1.0 - t);
    if a + b == 0.0 {
        return if t >= 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// `1` on `[0, R]`, `0` beyond `R + 1`, C^∞ in between.
pub fn smooth_cutoff(r: f64, radius: f64) -> f64 {
    1.0 - smooth_step(r - radius)
}
