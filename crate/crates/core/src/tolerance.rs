//! Float comparison conventions.

/// Absolute-or-relative tolerance for "equal up to float".
pub const FLOAT_TOL: f64 = 1e-9;

/// `a <= b` up to [`FLOAT_TOL`], absolute or relative to `|b|`.
pub fn le(a: f64, b: f64) -> bool {
    a - b <= FLOAT_TOL * b.abs().max(1.0)
}

/// `|a - b|` within [`FLOAT_TOL`], absolute or relative.
pub fn approx_eq(a: f64, b: f64) -> bool {
    let diff = (a - b).abs();
    diff <= FLOAT_TOL * a.abs().max(b.abs()).max(1.0)
}
