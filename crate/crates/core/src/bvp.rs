//! Radial boundary-value problem `L H = c`, `H(a) = alpha`, `H(b) = beta`.
//!
//! Every solution is a rescaled principal solution `lambda * H_kind(k t)`;
//! the kind is fixed by where `alpha/beta` falls relative to `a/b` and `b/a`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Annulus, Dimension};
use crate::principal::{log_eval, principal_sample, PrincipalKind, StrainSample};
use crate::profile::{Hammer, StrainProfile};
use crate::roots::bisect;

/// Relative width of the band around `a/b` and `b/a` treated as conformal.
const CONFORMAL_BAND: f64 = 1e-12;

/// `t -> lambda * H_kind(k t)` on `domain`, optionally preceded by a hammered zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialMap {
    pub kind: PrincipalKind,
    pub lambda: f64,
    pub k: f64,
    pub domain: Annulus,
    pub hammer_to: Option<f64>,
    pub hammer_zone: Option<Annulus>,
}

impl RadialMap {
    pub fn new(kind: PrincipalKind, lambda: f64, k: f64, domain: Annulus) -> Result<Self> {
        if !(lambda != 0.0 && lambda.is_finite() && k > 0.0 && k.is_finite()) {
            return Err(Error::domain(format!("radial map needs lambda != 0 and k > 0, got ({lambda}, {k})")));
        }
        Ok(RadialMap { kind, lambda, k, domain, hammer_to: None, hammer_zone: None })
    }

    /// Adds a hammered inner zone; requires a Plus profile with `Hdot = 0` at the junction.
    pub fn with_hammer(mut self, zone: Annulus, radius: f64, n: Dimension) -> Result<Self> {
        if self.kind != PrincipalKind::Plus {
            return Err(Error::precondition("a hammered zone only glues onto a Plus profile"));
        }
        if (zone.outer - self.domain.inner).abs() > 1e-12 * zone.outer {
            return Err(Error::precondition("hammered zone must end where the smooth part begins"));
        }
        let junction = self.sample(self.domain.inner, n)?;
        if (junction.h - radius).abs() > 1e-9 * radius || junction.hdot.abs() > 1e-8 * radius.max(1.0) {
            return Err(Error::precondition(format!(
                "profile does not meet the hammered sphere tangentially: H = {}, Hdot = {}",
                junction.h, junction.hdot
            )));
        }
        self.hammer_to = Some(radius);
        self.hammer_zone = Some(zone);
        Ok(self)
    }

    /// Value of the characteristic operator along the smooth part.
    pub fn characteristic_constant(&self, n: Dimension) -> f64 {
        self.lambda.abs().powf(n.as_f64()) * self.kind.characteristic_sign()
    }

    /// True if `|H|` is strictly increasing on the smooth part.
    pub fn is_increasing(&self, n: Dimension) -> Result<bool> {
        let d = self.domain;
        for i in 0..=64 {
            let t = d.inner * (d.outer / d.inner).powf(i as f64 / 64.0);
            let s = self.sample(t, n)?;
            if s.h * self.lambda.signum() <= 0.0 && i > 0 {
                return Ok(false);
            }
            if s.hdot * s.h.signum() < 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl StrainProfile for RadialMap {
    fn domain(&self) -> Annulus {
        self.domain
    }

    fn sample(&self, t: f64, n: Dimension) -> Result<StrainSample> {
        let base = principal_sample(self.kind, self.k * t, n)?;
        let mut s = base.rescaled(self.lambda, self.k);
        s.t = t;
        Ok(s)
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn hammer(&self) -> Option<Hammer> {
        match (self.hammer_zone, self.hammer_to) {
            (Some(zone), Some(radius)) => Some(Hammer { zone, radius }),
            _ => None,
        }
    }
}

/// Data of the two-point problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvpProblem {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl BvpProblem {
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64) -> Result<Self> {
        Annulus::new(a, b)?;
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::domain("boundary values must be finite"));
        }
        Ok(BvpProblem { a, b, alpha, beta })
    }
}

/// `H_kind(k a) / H_kind(k b)`.
pub fn q_ratio(kind: PrincipalKind, k: f64, a: f64, b: f64, n: Dimension) -> Result<f64> {
    let ha = principal_sample(kind, k * a, n)?.h;
    let hb = principal_sample(kind, k * b, n)?.h;
    if hb == 0.0 {
        return Err(Error::domain(format!("pole of the ratio: H({}) = 0", k * b)));
    }
    Ok(ha / hb)
}

/// `log|H(e^x a)| - log|H(e^x b)|`.
fn log_abs_ratio(kind: PrincipalKind, x: f64, a: f64, b: f64, n: Dimension) -> Result<f64> {
    let ea = log_eval(kind, x + a.ln(), n)?;
    let eb = log_eval(kind, x + b.ln(), n)?;
    Ok(ea.log_abs_h - eb.log_abs_h)
}

/// Moves `x` by doubling steps until `f(x)` has the requested sign.
fn expand<F>(mut f: F, start: f64, step: f64, want_positive: bool) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut delta = step;
    for _ in 0..200 {
        let x = start + delta;
        let v = f(x)?;
        if (v > 0.0) == want_positive && v != 0.0 {
            return Ok(x);
        }
        delta *= 2.0;
    }
    Err(Error::numerical("bracket expansion for the boundary-value problem", f64::NAN))
}

fn xtol(x: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs().max(1.0)
}

/// Solves the problem by the five-case analysis; returns the map and `c = L H`.
pub fn solve_radial_bvp(p: &BvpProblem, n: Dimension) -> Result<(RadialMap, f64)> {
    let BvpProblem { a, b, alpha, beta } = *p;
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::domain("boundary values are both zero"));
    }
    let domain = Annulus::new(a, b)?;
    let minus = PrincipalKind::Minus;
    let finish = |kind: PrincipalKind, k: f64| -> Result<(RadialMap, f64)> {
        let hb = principal_sample(kind, k * b, n)?.h;
        let map = if hb != 0.0 {
            RadialMap::new(kind, beta / hb, k, domain)?
        } else {
            RadialMap::new(kind, alpha / principal_sample(kind, k * a, n)?.h, k, domain)?
        };
        Ok((map, map.characteristic_constant(n)))
    };

    if beta == 0.0 {
        return finish(minus, 1.0 / b);
    }
    let rho = alpha / beta;
    let low = a / b;
    let high = b / a;

    if (rho - low).abs() <= CONFORMAL_BAND * low {
        let map = RadialMap::new(PrincipalKind::IdentityLike, alpha / a, 1.0, domain)?;
        return Ok((map, 0.0));
    }
    if (rho - high).abs() <= CONFORMAL_BAND * high {
        let map = RadialMap::new(PrincipalKind::InversionLike, alpha * a, 1.0, domain)?;
        return Ok((map, 0.0));
    }

    let x_a = -a.ln();
    let x_b = -b.ln();
    if rho < low {
        // Minus kind with k > 1/b.
        if rho == 0.0 {
            return finish(minus, 1.0 / a);
        }
        let target = rho.abs().ln();
        let g = |x: f64| log_abs_ratio(minus, x, a, b, n).map(|v| v - target);
        let x = if rho < 0.0 {
            // 1/b < k < 1/a: |Q| falls from +inf to 0.
            bisect(g, x_b, x_a, xtol(x_a.abs().max(x_b.abs())), "minus-kind ratio (k between 1/b and 1/a)")?
        } else {
            // k > 1/a: Q rises from 0 to a/b.
            let hi = expand(g, x_a, 1.0, true)?;
            bisect(g, x_a, hi, xtol(hi), "minus-kind ratio (k above 1/a)")?
        };
        return finish(minus, x.exp());
    }
    if rho > high {
        // Minus kind with k < 1/b: Q falls from +inf to b/a as k decreases to 0.
        let target = rho.ln();
        let g = |x: f64| log_abs_ratio(minus, x, a, b, n).map(|v| v - target);
        let lo = expand(g, x_b, -1.0, false)?;
        let x = bisect(g, lo, x_b, xtol(lo), "minus-kind ratio (k below 1/b)")?;
        return finish(minus, x.exp());
    }

    // Plus kind: Q decreases from b/a to a/b and equals 1 at k = 1/sqrt(ab).
    let plus = PrincipalKind::Plus;
    if alpha.signum() != beta.signum() {
        return Err(Error::domain("Plus-kind solutions keep one sign"));
    }
    let target = rho.ln();
    let g = |x: f64| log_abs_ratio(plus, x, a, b, n).map(|v| v - target);
    let x0 = -0.5 * (a * b).ln();
    let x = if target == 0.0 {
        x0
    } else if target < 0.0 {
        let hi = expand(g, x0, 1.0, false)?;
        bisect(g, x0, hi, xtol(hi), "plus-kind ratio")?
    } else {
        let lo = expand(g, x0, -1.0, true)?;
        bisect(g, lo, x0, xtol(lo), "plus-kind ratio")?
    };
    let k = x.exp();
    // The ratio's log-derivative is eta(ka) - eta(kb); it must be negative.
    let ea = log_eval(plus, (k * a).ln(), n)?.eta;
    let eb = log_eval(plus, (k * b).ln(), n)?.eta;
    if ea >= eb {
        return Err(Error::numerical("plus-kind ratio is not monotone at the solution", ea - eb));
    }
    finish(plus, k)
}

/// Radial solution sending `source.inner -> target.inner` and `source.outer -> target.outer`.
pub fn fit_annuli(source: &Annulus, target: &Annulus, n: Dimension) -> Result<(RadialMap, f64)> {
    let p = BvpProblem::new(source.inner, source.outer, target.inner, target.outer)?;
    solve_radial_bvp(&p, n)
}
