//! Dimensional constants, the lower and upper Nitsche functions, and the
//! regime classification of annulus pairs.

use std::collections::BTreeMap;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{modulus, sphere_area, Annulus, Dimension, Modulus};
use crate::principal::{gamma_minus, log_eval, PrincipalKind};
use crate::roots::bisect;

/// Relative tolerance on moduli separating Within from Below/Above.
const BOUND_TOL: f64 = 1e-10;
/// Relative tolerance on moduli for the conformal regime.
const CONFORMAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NitscheConstants {
    /// Infinite for n = 2, 3.
    #[serde(serialize_with = "crate::ser::ext_f64")]
    pub alpha_n: f64,
    pub gamma_n: f64,
    /// Only defined for n >= 4.
    pub delta_n: Option<f64>,
}

static CACHE: RwLock<BTreeMap<u32, NitscheConstants>> = RwLock::new(BTreeMap::new());

/// Constants for dimension `n`, memoized.
pub fn constants(n: Dimension) -> Result<NitscheConstants> {
    if let Some(c) = CACHE.read().ok().and_then(|m| m.get(&n.get()).copied()) {
        return Ok(c);
    }
    let alpha = compute_alpha_n(n)?;
    let c = NitscheConstants {
        alpha_n: alpha,
        gamma_n: if alpha.is_infinite() { 1.0 } else { gamma_minus(1.0 / alpha, n)? },
        delta_n: delta_n(n).ok(),
    };
    if let Ok(mut m) = CACHE.write() {
        m.insert(n.get(), c);
    }
    Ok(c)
}

/// `log` of `(a^2+n-1)^{(n-2)/2}(a^2-1) / a^n`; vanishes at the critical stretch.
pub(crate) fn critical_defect_log(alpha: f64, n: f64) -> f64 {
    let a2 = alpha * alpha;
    0.5 * (n - 2.0) * (a2 + n - 1.0).ln() + (a2 - 1.0).ln() - n * alpha.ln()
}

fn compute_alpha_n(n: Dimension) -> Result<f64> {
    if n.get() <= 3 {
        return Ok(f64::INFINITY);
    }
    let nf = n.as_f64();
    let hi = ((nf - 1.0) / (nf - 3.0)).sqrt();
    bisect(|a| Ok(critical_defect_log(a, nf)), 1.0 + 1e-15, hi, 1e-16, "critical stretch")
}

/// Critical stretch: infinite for n = 2, 3.
pub fn alpha_n(n: Dimension) -> f64 {
    constants(n).map(|c| c.alpha_n).unwrap_or(f64::NAN)
}

/// `Gamma_-(1/alpha_n)`, equal to 1 for n = 2, 3.
pub fn gamma_n(n: Dimension) -> f64 {
    constants(n).map(|c| c.gamma_n).unwrap_or(f64::NAN)
}

/// Closed-form threshold on `R/r` for the energy counterexample, n >= 4.
pub fn delta_n(n: Dimension) -> Result<f64> {
    if n.get() < 4 {
        return Err(Error::domain(format!("delta_n is defined for n >= 4, got {}", n.get())));
    }
    let nf = n.as_f64();
    let (p, q) = ((nf - 1.0).sqrt(), (nf - 3.0).sqrt());
    let coeff = (nf - 2.0) / (nf * p);
    Ok(((p + q) / (p - q)).sqrt() * (coeff * q.atan()).exp())
}

/// Lower Nitsche function `omega * log H_+(exp(Mod/omega))`.
pub fn lower_nitsche(mod_a: Modulus, n: Dimension) -> Result<Modulus> {
    if mod_a.value < 0.0 {
        return Err(Error::domain("modulus must be nonnegative"));
    }
    let e = log_eval(PrincipalKind::Plus, mod_a.log_ratio, n)?;
    Ok(Modulus::from_log_ratio(e.log_abs_h, n))
}

/// Upper Nitsche function; infinite for n = 2, 3.
pub fn upper_nitsche(mod_a: Modulus, n: Dimension) -> Result<Modulus> {
    if mod_a.value < 0.0 {
        return Err(Error::domain("modulus must be nonnegative"));
    }
    let c = constants(n)?;
    if c.alpha_n.is_infinite() {
        return Ok(Modulus { value: f64::INFINITY, log_ratio: f64::INFINITY });
    }
    let base = c.gamma_n.ln();
    let top = log_eval(PrincipalKind::Minus, base + mod_a.log_ratio, n)?;
    let bottom = log_eval(PrincipalKind::Minus, base, n)?;
    Ok(Modulus::from_log_ratio(top.log_abs_h - bottom.log_abs_h, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Conformal,
    ContractingWithin,
    ContractingBelow,
    ExpandingWithin,
    ExpandingAbove,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairClassification {
    pub regime: Regime,
    pub mod_source: Modulus,
    pub mod_target: Modulus,
    /// `Mod target / Mod source`.
    #[serde(serialize_with = "crate::ser::ext_f64")]
    pub alpha_ratio: f64,
    pub lower_bound: Modulus,
    pub upper_bound: Modulus,
}

pub fn classify(source: &Annulus, target: &Annulus, n: Dimension) -> Result<PairClassification> {
    let ms = modulus(source, n);
    let mt = modulus(target, n);
    let lower = lower_nitsche(ms, n)?;
    let upper = upper_nitsche(ms, n)?;
    let regime = if (mt.log_ratio - ms.log_ratio).abs() <= CONFORMAL_TOL * ms.log_ratio {
        Regime::Conformal
    } else if mt.log_ratio < ms.log_ratio {
        if mt.log_ratio >= lower.log_ratio * (1.0 - BOUND_TOL) {
            Regime::ContractingWithin
        } else {
            Regime::ContractingBelow
        }
    } else if mt.log_ratio <= upper.log_ratio * (1.0 + BOUND_TOL) {
        Regime::ExpandingWithin
    } else {
        Regime::ExpandingAbove
    };
    Ok(PairClassification {
        regime,
        mod_source: ms,
        mod_target: mt,
        alpha_ratio: mt.log_ratio / ms.log_ratio,
        lower_bound: lower,
        upper_bound: upper,
    })
}

/// Absolute modulus from a log-ratio in dimension `n`.
pub fn modulus_from_log(log_ratio: f64, n: Dimension) -> Modulus {
    Modulus { value: sphere_area(n) * log_ratio, log_ratio }
}
