//! Closed-form quantities of the semicircle law: density, distribution
//! function, Stieltjes transform with the Herglotz branch, quantiles and the
//! auxiliary functions built from them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point z = u + iv of the upper half-plane at which spectral quantities
/// are evaluated. `v > 0` is enforced at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPoint {
    u: f64,
    v: f64,
}

impl ComplexPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::Domain(format!("non-finite point ({u}, {v})")));
        }
        if v <= 0.0 {
            return Err(Error::Domain(format!(
                "imaginary part must be positive for upper half-plane use, got v = {v}"
            )));
        }
        Ok(Self { u, v })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

/// Semicircle density g_sc(x) = (1/2π) √((4 − x²)₊).
pub fn density(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite input {x}")));
    }
    Ok((4.0 - x * x).max(0.0).sqrt() / (2.0 * PI))
}

/// Distribution function G_sc(x) = ∫_{−∞}^x g_sc, in closed form.
pub fn cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite input {x}")));
    }
    if x <= -2.0 {
        return Ok(0.0);
    }
    if x >= 2.0 {
        return Ok(1.0);
    }
    let val = 0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI;
    Ok(val.clamp(0.0, 1.0))
}

/// Stieltjes transform of the semicircle law, s(z) = −z/2 + √(z²/4 − 1),
/// on the branch with Im s(z) > 0 and s(z) → −1/z at infinity.
///
/// The two roots of 1 + z·s + s² = 0 have product 1; for v > 0 exactly one
/// of them lies strictly inside the unit disk, and that root is the
/// Herglotz branch.
pub fn stieltjes_ref(z: ComplexPoint) -> Complex64 {
    let zc = z.to_complex();
    let root = (zc * zc / 4.0 - 1.0).sqrt();
    let s1 = -zc / 2.0 + root;
    let s2 = -zc / 2.0 - root;
    if s1.norm_sqr() <= s2.norm_sqr() {
        s1
    } else {
        s2
    }
}

/// b(z) = z + 2 s(z). Vanishes (in modulus) at the spectral edges.
pub fn b_of_z(z: ComplexPoint) -> Complex64 {
    z.to_complex() + 2.0 * stieltjes_ref(z)
}

/// Classical quantile location γ_j of the j-th eigenvalue, defined by
/// G_sc(γ_j) = j/n, obtained by bisection on [−2, 2].
pub fn quantile(j: usize, n: usize) -> Result<f64> {
    if n == 0 || j == 0 || j > n {
        return Err(Error::Argument(format!(
            "quantile index must satisfy 1 <= j <= n, got j = {j}, n = {n}"
        )));
    }
    let target = j as f64 / n as f64;
    if target >= 1.0 {
        return Ok(2.0);
    }
    // cdf is strictly increasing on (-2, 2); bisect to a 1e-13 bracket.
    let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ψ(z) = Im s(z) + p/(nv).
pub fn psi(z: ComplexPoint, p: u32, n: usize) -> Result<f64> {
    if p < 1 || n < 1 {
        return Err(Error::Argument(format!(
            "psi requires p >= 1 and n >= 1, got p = {p}, n = {n}"
        )));
    }
    Ok(stieltjes_ref(z).im + p as f64 / (n as f64 * z.v()))
}

/// Distance to the spectral edge, γ(u) = ||u| − 2|.
pub fn edge_distance(u: f64) -> f64 {
    (u.abs() - 2.0).abs()
}
