//! The potential `φ(x) = 2 asinh(√x)` and its companions.

/// `φ(x) = 2 asinh(√x)`.
pub fn phi(x: f64) -> f64 {
    2.0 * x.sqrt().asinh()
}

/// `φ⁻¹(y) = sinh²(y / 2)`.
pub fn phi_inv(y: f64) -> f64 {
    let s = (y / 2.0).sinh();
    s * s
}

/// `Φ(x) = dφ/dx = 1 / √(x(1 + x))`.
pub fn big_phi(x: f64) -> f64 {
    1.0 / (x * (1.0 + x)).sqrt()
}

/// `d φ⁻¹ / dy = sinh(y) / 2`, which equals `√(x(1+x))` at `x = φ⁻¹(y)`.
pub fn phi_inv_derivative(y: f64) -> f64 {
    y.sinh() / 2.0
}
