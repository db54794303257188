use crate::math::sqrt;

/// Stable plane rotation: returns `(c, s, r)` with `c·a + s·b = r`,
/// `−s·a + c·b = 0`, `c² + s² = 1` and `r ≥ 0`.
///
/// `sym_ortho(0, 0)` is `(1, 0, 0)`.
pub fn sym_ortho(a: f64, b: f64) -> (f64, f64, f64) {
    if b == 0.0 {
        let c = if a < 0.0 { -1.0 } else { 1.0 };
        (c, 0.0, a.abs())
    } else if a == 0.0 {
        (0.0, b.signum(), b.abs())
    } else if b.abs() > a.abs() {
        let tau = a / b;
        let s = b.signum() / sqrt(1.0 + tau * tau);
        let c = s * tau;
        (c, s, b / s)
    } else {
        let tau = b / a;
        let c = a.signum() / sqrt(1.0 + tau * tau);
        let s = c * tau;
        (c, s, a / c)
    }
}
