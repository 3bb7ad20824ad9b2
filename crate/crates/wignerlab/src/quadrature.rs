//! Adaptive Simpson quadrature used for continuous-law moments and for the
//! smoothing-inequality terms.

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
///
/// The first few levels split unconditionally so that integrands whose
/// mass lies between the initial sample points (e.g. x^k times a Gaussian
/// on a wide interval) are not mistaken for zero.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = simpson(a, b, fa, fc, fb);
    recurse(f, a, b, fa, fb, fc, whole, tol, 48, 7)
}

fn simpson(a: f64, b: f64, fa: f64, fc: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fc + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    force: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let (fd, fe) = (f(d), f(e));
    let left = simpson(a, c, fa, fd, fc);
    let right = simpson(c, b, fc, fe, fb);
    let delta = left + right - whole;
    if depth == 0 || (force == 0 && delta.abs() <= 15.0 * tol) {
        left + right + delta / 15.0
    } else {
        let force = force.saturating_sub(1);
        recurse(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1, force)
            + recurse(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1, force)
    }
}

/// Composite Simpson with a fixed even number of intervals. Deterministic
/// cost, used where step-halving self-consistency is checked explicitly.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) & !1usize;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}
