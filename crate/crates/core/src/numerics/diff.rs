/// Numerical first derivative of `f` at `t`.
///
/// Central differences with step `1e-5·scale`, improved by one level of
/// Richardson extrapolation (half step). `scale` should be the length over
/// which `f` varies appreciably; zero or non-finite values fall back to 1.
pub fn derivative<F: Fn(f64) -> f64>(f: F, t: f64, scale: f64) -> f64 {
    let scale = if scale.is_finite() && scale != 0.0 {
        scale.abs()
    } else {
        1.0
    };
    let h = 1e-5 * scale;
    let coarse = (f(t + h) - f(t - h)) / (2.0 * h);
    let fine = (f(t + 0.5 * h) - f(t - 0.5 * h)) / h;
    (4.0 * fine - coarse) / 3.0
}
