//! Principal radial solutions of the n-harmonic equation.
//!
//! The two nontrivial kinds are parametrised internally by `sigma = atanh(u)`
//! where `u` is the inverse of the generating function at `t`. Working in
//! `sigma` keeps `1 - u^2 = sech^2(sigma)` accurate even when `u` is within
//! an ulp of one, which happens for moderate `t` once `n` is large.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Dimension;

/// The four principal strain functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PrincipalKind {
    /// `H(t) = t`
    IdentityLike,
    /// `H(t) = 1/t`
    InversionLike,
    Plus,
    Minus,
}

impl PrincipalKind {
    /// Value of the characteristic operator on the unscaled solution.
    pub fn characteristic_sign(self) -> f64 {
        match self {
            PrincipalKind::Plus => 1.0,
            PrincipalKind::Minus => -1.0,
            _ => 0.0,
        }
    }
}

/// Pointwise strain data of a radial profile.
///
/// `defect` holds `1 - eta^2`. Principal solutions fill it from a closed form
/// so the characteristic operator stays accurate near conformality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrainSample {
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "Hdot")]
    pub hdot: f64,
    #[serde(serialize_with = "crate::ser::ext_f64")]
    pub eta: f64,
    #[serde(skip)]
    pub defect: f64,
}

impl StrainSample {
    /// Sample from raw values; elasticity and defect are derived.
    pub fn from_values(t: f64, h: f64, hdot: f64) -> Self {
        let eta = if h == 0.0 { f64::INFINITY.copysign(hdot) } else { t * hdot / h };
        let defect = (1.0 - eta) * (1.0 + eta);
        StrainSample { t, h, hdot, eta, defect }
    }

    /// Sample of `lambda * H(k t)` given the sample of `H` at `k t`.
    pub fn rescaled(&self, lambda: f64, k: f64) -> Self {
        StrainSample {
            t: self.t / k,
            h: lambda * self.h,
            hdot: lambda * k * self.hdot,
            eta: self.eta,
            defect: self.defect,
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(s > -1.0 && s < 1.0) {
        return Err(Error::domain(format!("generating function needs -1 < s < 1, got {s}")));
    }
    Ok(())
}

fn plus_coeff(n: f64) -> f64 {
    (2.0 - n) / (n * (n - 1.0).sqrt())
}

fn minus_coeff(n: f64) -> f64 {
    (n - 2.0) / (n * (n - 1.0).sqrt())
}

/// Generating function of the Plus kind.
pub fn gamma_plus(s: f64, n: Dimension) -> Result<f64> {
    check_s(s)?;
    let nf = n.as_f64();
    let ratio = (1.0 + s) / (1.0 - s);
    Ok(ratio.powf(1.0 / nf) * (plus_coeff(nf) * (s / (nf - 1.0).sqrt()).atan()).exp())
}

/// Generating function of the Minus kind.
///
/// The radial factor is the n-th root of `(1+s)/(1-s)`, which is what makes
/// the logarithmic derivative equal `(1+s^2)/((1-s^2)(1+(n-1)s^2))`.
pub fn gamma_minus(s: f64, n: Dimension) -> Result<f64> {
    check_s(s)?;
    let nf = n.as_f64();
    let ratio = (1.0 + s) / (1.0 - s);
    Ok(ratio.powf(1.0 / nf) * (minus_coeff(nf) * (s * (nf - 1.0).sqrt()).atan()).exp())
}

/// `log cosh(x)` without overflow.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `log Gamma(tanh sigma)` and its derivative in `sigma`.
fn log_gamma_sigma(kind: PrincipalKind, sigma: f64, n: f64) -> (f64, f64) {
    let u = sigma.tanh();
    let sech2 = (-2.0 * ln_cosh(sigma)).exp();
    let m = n - 1.0;
    match kind {
        PrincipalKind::Plus => {
            let c = plus_coeff(n);
            let v = 2.0 * sigma / n + c * (u / m.sqrt()).atan();
            let dv = 2.0 / n + c * sech2 / m.sqrt() / (1.0 + u * u / m);
            (v, dv)
        }
        _ => {
            let c = minus_coeff(n);
            let v = 2.0 * sigma / n + c * (u * m.sqrt()).atan();
            let dv = 2.0 / n + c * m.sqrt() * sech2 / (1.0 + m * u * u);
            (v, dv)
        }
    }
}

/// Solves `log Gamma(tanh sigma) = log_t` by safeguarded Newton iteration.
fn solve_sigma(kind: PrincipalKind, log_t: f64, n: Dimension) -> Result<f64> {
    if !log_t.is_finite() {
        return Err(Error::domain(format!("principal solution needs finite positive t, log t = {log_t}")));
    }
    if log_t == 0.0 {
        return Ok(0.0);
    }
    let nf = n.as_f64();
    let m = nf - 1.0;
    // The arctan term is bounded, which gives an explicit bracket.
    let scale = nf / 2.0;
    let bound = match kind {
        PrincipalKind::Plus => plus_coeff(nf).abs() * (1.0 / m.sqrt()).atan(),
        _ => minus_coeff(nf).abs() * m.sqrt().atan(),
    };
    let mut lo = scale * (log_t - bound) - 1.0;
    let mut hi = scale * (log_t + bound) + 1.0;
    let mut sigma = scale * log_t;
    let mut last_step = f64::INFINITY;
    for _ in 0..200 {
        let (v, dv) = log_gamma_sigma(kind, sigma, nf);
        let f = v - log_t;
        if f == 0.0 {
            return Ok(sigma);
        }
        if f < 0.0 {
            lo = sigma;
        } else {
            hi = sigma;
        }
        let mut next = sigma - f / dv;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - sigma).abs();
        if step <= 4.0 * f64::EPSILON * sigma.abs().max(1.0) || (step >= last_step && step <= 1e-12 * sigma.abs().max(1.0)) {
            return Ok(next);
        }
        last_step = step;
        sigma = next;
    }
    let (v, _) = log_gamma_sigma(kind, sigma, nf);
    Err(Error::numerical("inversion of the generating function", (v - log_t).abs()))
}

fn check_t(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("principal solutions need 0 < t < inf, got {t}")));
    }
    Ok(t.ln())
}

/// Inverse of [`gamma_plus`].
pub fn u_plus(t: f64, n: Dimension) -> Result<f64> {
    Ok(solve_sigma(PrincipalKind::Plus, check_t(t)?, n)?.tanh())
}

/// Inverse of [`gamma_minus`].
pub fn u_minus(t: f64, n: Dimension) -> Result<f64> {
    Ok(solve_sigma(PrincipalKind::Minus, check_t(t)?, n)?.tanh())
}

/// Principal solution evaluated in logarithmic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogEval {
    /// `log |H|`, `-inf` at the zero of the Minus kind.
    pub log_abs_h: f64,
    pub sign: f64,
    /// `log |t Hdot|`
    pub log_abs_thdot: f64,
    pub eta: f64,
    pub defect: f64,
}

pub(crate) fn log_eval(kind: PrincipalKind, log_t: f64, n: Dimension) -> Result<LogEval> {
    let nf = n.as_f64();
    let m = nf - 1.0;
    match kind {
        PrincipalKind::IdentityLike => Ok(LogEval {
            log_abs_h: log_t,
            sign: 1.0,
            log_abs_thdot: log_t,
            eta: 1.0,
            defect: 0.0,
        }),
        PrincipalKind::InversionLike => Ok(LogEval {
            log_abs_h: -log_t,
            sign: 1.0,
            log_abs_thdot: -log_t,
            eta: -1.0,
            defect: 0.0,
        }),
        PrincipalKind::Plus => {
            let sigma = solve_sigma(kind, log_t, n)?;
            let u = sigma.tanh();
            let lc = ln_cosh(sigma);
            let log_abs_h = (1.0 / nf - 0.5) * (u * u / m).ln_1p() + 2.0 / nf * lc;
            Ok(LogEval {
                log_abs_h,
                sign: 1.0,
                log_abs_thdot: log_abs_h + u.abs().ln(),
                eta: u,
                defect: (-2.0 * lc).exp(),
            })
        }
        PrincipalKind::Minus => {
            let sigma = solve_sigma(kind, log_t, n)?;
            let u = sigma.tanh();
            let lc = ln_cosh(sigma);
            // t Hdot = H / u stays finite through the zero of H.
            let log_thdot = (1.0 / nf - 0.5) * (u * u + 1.0 / m).ln() + 2.0 / nf * lc;
            let sinh = sigma.sinh();
            Ok(LogEval {
                log_abs_h: log_thdot + u.abs().ln(),
                sign: if u < 0.0 { -1.0 } else { 1.0 },
                log_abs_thdot: log_thdot,
                eta: 1.0 / u,
                defect: -1.0 / (sinh * sinh),
            })
        }
    }
}

/// Strain sample of a principal solution at `t`.
pub fn principal_sample(kind: PrincipalKind, t: f64, n: Dimension) -> Result<StrainSample> {
    let log_t = check_t(t)?;
    let e = log_eval(kind, log_t, n)?;
    let h = e.sign * e.log_abs_h.exp();
    let thdot = e.log_abs_thdot.exp();
    let hdot = match kind {
        PrincipalKind::InversionLike => -thdot / t,
        PrincipalKind::Plus => e.eta * h / t,
        _ => thdot / t,
    };
    Ok(StrainSample { t, h, hdot, eta: e.eta, defect: e.defect })
}

pub fn h_plus(t: f64, n: Dimension) -> Result<StrainSample> {
    principal_sample(PrincipalKind::Plus, t, n)
}

pub fn h_minus(t: f64, n: Dimension) -> Result<StrainSample> {
    principal_sample(PrincipalKind::Minus, t, n)
}

/// Elasticity `t Hdot / H` of a principal solution; infinite at the zero of the Minus kind.
pub fn elasticity(kind: PrincipalKind, t: f64, n: Dimension) -> Result<f64> {
    match kind {
        PrincipalKind::IdentityLike => Ok(1.0),
        PrincipalKind::InversionLike => Ok(-1.0),
        PrincipalKind::Plus => u_plus(t, n),
        PrincipalKind::Minus => Ok(1.0 / u_minus(t, n)?),
    }
}

/// The characteristic operator `[H^2 + t^2 Hdot^2/(n-1)]^{(n-2)/2} (H^2 - t^2 Hdot^2)`.
///
/// Evaluated as `|H|^n (1 + eta^2/(n-1))^{(n-2)/2} (1 - eta^2)` whenever `H != 0`,
/// using the sample's stored defect for the last factor.
pub fn characteristic(sample: &StrainSample, n: Dimension) -> f64 {
    let nf = n.as_f64();
    let m = nf - 1.0;
    if sample.h == 0.0 || !sample.eta.is_finite() || !sample.defect.is_finite() {
        let h2 = sample.h * sample.h;
        let th2 = (sample.t * sample.hdot).powi(2);
        return (h2 + th2 / m).powf((nf - 2.0) / 2.0) * (h2 - th2);
    }
    let eta2 = sample.eta * sample.eta;
    sample.h.abs().powf(nf) * (1.0 + eta2 / m).powf((nf - 2.0) / 2.0) * sample.defect
}

/// Slope of the asymptote `H(t) ~ slope * t` at infinity.
pub fn asymptote_slope(kind: PrincipalKind, n: Dimension) -> Result<f64> {
    let nf = n.as_f64();
    let m = nf - 1.0;
    let prefactor = (1.0 - 1.0 / nf).powf((nf - 2.0) / (2.0 * nf)) * 4f64.powf(-1.0 / nf);
    match kind {
        PrincipalKind::Plus => Ok(prefactor * (minus_coeff(nf) * (1.0 / m.sqrt()).atan()).exp()),
        PrincipalKind::Minus => Ok(prefactor * (plus_coeff(nf) * m.sqrt().atan()).exp()),
        other => Err(Error::domain(format!("no asymptote slope for {other:?}"))),
    }
}
