//! Spherical annuli, conformal modulus and the unit-sphere area.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Ambient dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {n}")));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

/// Open ring `inner < |x| < outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite()) || inner <= 0.0 {
            return Err(Error::domain(format!(
                "annulus radii must be positive and finite, got ({inner}, {outer})"
            )));
        }
        if inner >= outer {
            return Err(Error::domain(format!(
                "degenerate annulus: inner {inner} is not below outer {outer}"
            )));
        }
        Ok(Annulus { inner, outer })
    }

    pub fn log_ratio(&self) -> f64 {
        (self.outer / self.inner).ln()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Annulus::new(self.inner * s, self.outer * s)
    }
}

/// Conformal modulus, kept both as the absolute value and as `log(R/r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Modulus {
    #[serde(serialize_with = "crate::ser::ext_f64")]
    pub value: f64,
    #[serde(serialize_with = "crate::ser::ext_f64")]
    pub log_ratio: f64,
}

impl Modulus {
    /// Builds a modulus from its absolute value.
    pub fn from_value(value: f64, n: Dimension) -> Self {
        Modulus { value, log_ratio: value / sphere_area(n) }
    }

    pub fn from_log_ratio(log_ratio: f64, n: Dimension) -> Self {
        Modulus { value: sphere_area(n) * log_ratio, log_ratio }
    }
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: Dimension) -> f64 {
    let n = n.get();
    let k = n / 2;
    if n.is_multiple_of(2) {
        // 2 pi^k / (k-1)!
        let fact: f64 = (1..k).map(f64::from).product();
        2.0 * PI.powi(k as i32) / fact
    } else {
        // 2^(k+1) pi^k / (1*3*...*(2k-1))
        let odd: f64 = (1..=k).map(|j| f64::from(2 * j - 1)).product();
        2f64.powi(k as i32 + 1) * PI.powi(k as i32) / odd
    }
}

pub fn modulus(a: &Annulus, n: Dimension) -> Modulus {
    Modulus::from_log_ratio(a.log_ratio(), n)
}

/// Euclidean volume of the annulus.
pub fn volume(a: &Annulus, n: Dimension) -> f64 {
    let nf = n.as_f64();
    sphere_area(n) * (a.outer.powf(nf) - a.inner.powf(nf)) / nf
}
