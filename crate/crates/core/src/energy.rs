//! Energy functionals of radial maps, extremal constructions per regime,
//! planar closed forms, sharp pointwise coefficients and distortion checks.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bvp::{fit_annuli, RadialMap};
use crate::error::{Error, Result};
use crate::geometry::{modulus, sphere_area, volume, Annulus, Dimension, Modulus};
use crate::lagrangian::{nonradial_witness, NonRadialWitness};
use crate::nitsche::{classify, constants, Regime};
use crate::principal::{log_eval, PrincipalKind, StrainSample};
use crate::profile::{Hammer, PowerStretching, StrainProfile};
use crate::quad::{integrate, QuadOptions};
use crate::roots::{bisect, brent};

/// Relative agreement required between the two energy routes of a minimizer.
const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Functional {
    /// `int ||Dh||^n`
    ConformalE,
    /// `int ||Dh||^n / |h|^n`
    WeightedF,
    /// `int |Dh|^n / |h|^n` with the operator norm.
    OperatorNormF,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub value: f64,
    pub functional: Functional,
    pub formula_id: String,
    pub quad_error: f64,
    pub mod_source: Modulus,
    pub mod_target: Modulus,
}

/// Second, independent evaluation of an energy value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub value: f64,
    pub formula_id: String,
    pub rel_diff: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn sample_moduli<P: StrainProfile + ?Sized>(p: &P, n: Dimension) -> Result<(Modulus, Modulus)> {
    let d = p.full_domain();
    let hi = p.sample_full(d.outer, n)?.h.abs();
    let lo = p.sample_full(d.inner, n)?.h.abs();
    Ok((modulus(&d, n), Modulus::from_log_ratio((hi / lo).ln().abs(), n)))
}

/// Energy of a radial profile by adaptive quadrature in `s = log t`.
pub fn radial_energy<P: StrainProfile + ?Sized>(
    profile: &P,
    n: Dimension,
    functional: Functional,
    opts: QuadOptions,
) -> Result<EnergyReport> {
    let nf = n.as_f64();
    let m = nf - 1.0;
    let omega = sphere_area(n);
    let d = profile.domain();
    let mut direction = 0.0f64;
    let integrand = |s: f64| -> Result<f64> {
        let t = s.exp();
        let x = profile.sample(t, n)?;
        // Reject profiles whose radial derivative changes sign.
        let sign = (x.hdot * x.h.signum()).signum();
        if x.eta.abs() > 1e-12 && x.hdot != 0.0 {
            if direction == 0.0 {
                direction = sign;
            } else if sign != direction {
                return Err(Error::precondition(format!("profile is not monotone (Hdot changes sign near t = {t})")));
            }
        }
        match functional {
            Functional::ConformalE => {
                let th = t * x.hdot;
                Ok(omega * (th * th + m * x.h * x.h).powf(nf / 2.0))
            }
            Functional::WeightedF | Functional::OperatorNormF => {
                if x.h == 0.0 {
                    return Err(Error::precondition(format!("H vanishes at t = {t}")));
                }
                let eta = x.eta;
                Ok(omega
                    * match functional {
                        Functional::WeightedF => (eta * eta + m).powf(nf / 2.0),
                        _ => eta.abs().max(1.0).powf(nf),
                    })
            }
        }
    };
    let breaks: Vec<f64> = profile.breakpoints().iter().map(|b| b.ln()).collect();
    let q = integrate(integrand, d.inner.ln(), d.outer.ln(), &breaks, opts)?;
    let mut value = q.value;
    let mut formula_id = "quadrature:log-t".to_string();
    if let Some(Hammer { zone, radius }) = profile.hammer() {
        let zone_mod = modulus(&zone, n).value;
        value += zone_mod
            * match functional {
                Functional::ConformalE => m.powf(nf / 2.0) * radius.powf(nf),
                Functional::WeightedF => m.powf(nf / 2.0),
                Functional::OperatorNormF => 1.0,
            };
        formula_id.push_str("+hammered-zone");
    }
    let (mod_source, mod_target) = sample_moduli(profile, n)?;
    Ok(EnergyReport { value, functional, formula_id, quad_error: q.error, mod_source, mod_target })
}

/// Energy `n^{n/2} |target|` of a conformal map onto `target`.
pub fn conformal_energy(source: &Annulus, target: &Annulus, n: Dimension) -> EnergyReport {
    EnergyReport {
        value: n.as_f64().powf(n.as_f64() / 2.0) * volume(target, n),
        functional: Functional::ConformalE,
        formula_id: "closed-form:conformal".into(),
        quad_error: 0.0,
        mod_source: modulus(source, n),
        mod_target: modulus(target, n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Expanding,
    Contracting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientPair {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub branch: Branch,
}

impl CoefficientPair {
    /// `[X^2 + (n-1) Y^2]^{n/2} - (a X^n + b X Y^{n-1})` for the expanding branch,
    /// with `a Y^n` in place of `a X^n` for the contracting one.
    pub fn margin(&self, x: f64, y: f64, n: Dimension) -> f64 {
        let nf = n.as_f64();
        let lhs = (x * x + (nf - 1.0) * y * y).powf(nf / 2.0);
        let lead = match self.branch {
            Branch::Expanding => self.a * x.powf(nf),
            Branch::Contracting => self.a * y.powf(nf),
        };
        lhs - lead - self.b * x * y.powf(nf - 1.0)
    }
}

/// Sharp coefficients of the pointwise lower bound, tight at `X = alpha Y`.
pub fn coefficient_pair(alpha: f64, n: Dimension, branch: Branch) -> Result<CoefficientPair> {
    let nf = n.as_f64();
    let base = (alpha * alpha + nf - 1.0).powf((nf - 2.0) / 2.0);
    match branch {
        Branch::Expanding => {
            let alpha_n = constants(n)?.alpha_n;
            if !(alpha >= 1.0 && alpha <= alpha_n && alpha.is_finite()) {
                return Err(Error::domain(format!("expanding branch needs 1 <= alpha <= alpha_n, got {alpha}")));
            }
            Ok(CoefficientPair {
                a: base * (alpha * alpha - 1.0) / alpha.powf(nf),
                b: nf * base / alpha,
                alpha,
                branch,
            })
        }
        Branch::Contracting => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::domain(format!("contracting branch needs 0 <= alpha <= 1, got {alpha}")));
            }
            Ok(CoefficientPair {
                a: (nf - 1.0) * base * (1.0 - alpha * alpha),
                b: nf * alpha * base,
                alpha,
                branch,
            })
        }
    }
}

/// Elasticity as a function of the target radius `tau` for a radial solution
/// with characteristic constant `c` (contracting) or `q` (expanding).
pub fn eta_of_tau(tau: f64, c_or_q: f64, n: Dimension, branch: Branch) -> Result<f64> {
    let nf = n.as_f64();
    let m = nf - 1.0;
    let p = (nf - 2.0) / 2.0;
    let rhs = c_or_q / tau.powf(nf);
    match branch {
        Branch::Contracting => {
            if !(c_or_q > 0.0) || rhs > 1.0 * (1.0 + 1e-14) {
                return Err(Error::domain(format!("no contracting elasticity for c = {c_or_q}, tau = {tau}")));
            }
            if rhs >= 1.0 {
                return Ok(0.0);
            }
            let f = |e: f64| Ok((1.0 + e * e / m).powf(p) * (1.0 - e * e) - rhs);
            brent(f, 0.0, 1.0, 1e-16, "contracting elasticity")
        }
        Branch::Expanding => {
            if !(c_or_q > 0.0) {
                return Err(Error::domain(format!("expanding elasticity needs q > 0, got {c_or_q}")));
            }
            let f = |e: f64| Ok((m + e * e).powf(p) * (e * e - 1.0) - rhs);
            let mut hi = 2.0;
            while f(hi)? <= 0.0 {
                hi *= 2.0;
                if hi > 1e150 {
                    return Err(Error::numerical("expanding elasticity bracket", rhs));
                }
            }
            brent(f, 1.0, hi, 1e-16 * hi, "expanding elasticity")
        }
    }
}

/// The `tau`-integral `omega int tau^{n-1} b(eta(tau)) dtau` over the target radii.
fn target_side_integral(target: &Annulus, c_or_q: f64, n: Dimension, branch: Branch, opts: QuadOptions) -> Result<f64> {
    let nf = n.as_f64();
    let m = nf - 1.0;
    let omega = sphere_area(n);
    let f = |s: f64| -> Result<f64> {
        let tau = s.exp();
        let eta = eta_of_tau(tau, c_or_q, n, branch)?;
        let base = (eta * eta + m).powf((nf - 2.0) / 2.0);
        let b = match branch {
            Branch::Contracting => nf * eta * base,
            Branch::Expanding => nf * base / eta,
        };
        Ok(omega * tau.powf(nf) * b)
    };
    Ok(integrate(f, target.inner.ln(), target.outer.ln(), &[], opts)?.value)
}

/// Lower-bound formula for contracting radial solutions, tight on the minimizer.
pub fn contracting_energy_formula(source: &Annulus, target: &Annulus, c: f64, n: Dimension, opts: QuadOptions) -> Result<f64> {
    let nf = n.as_f64();
    let lead = (nf - 1.0).powf(nf / 2.0) * c * modulus(source, n).value;
    Ok(lead + target_side_integral(target, c, n, Branch::Contracting, opts)?)
}

/// Lower-bound formula for expanding radial solutions with `c = L H < 0`.
pub fn expanding_energy_formula(source: &Annulus, target: &Annulus, c: f64, n: Dimension, opts: QuadOptions) -> Result<f64> {
    let nf = n.as_f64();
    let q = (nf - 1.0).powf((nf - 2.0) / 2.0) * (-c);
    Ok(q * modulus(source, n).value + target_side_integral(target, q, n, Branch::Expanding, opts)?)
}

/// Planar map `z -> (s z + omega / (s z-bar)) / 2`, hammered inside `|z| = sqrt(omega)/s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarNitscheParams {
    pub omega: f64,
    pub rescale: f64,
}

/// A [`PlanarNitscheParams`] restricted to a source annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarNitscheMap {
    pub spec: PlanarNitscheParams,
    pub source: Annulus,
}

impl PlanarNitscheMap {
    fn junction(&self) -> Option<f64> {
        let PlanarNitscheParams { omega, rescale } = self.spec;
        let rho = omega.max(0.0).sqrt() / rescale;
        (omega > 0.0 && rho > self.source.inner).then_some(rho)
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        let PlanarNitscheParams { omega, rescale: s } = self.spec;
        (0.5 * (s * t + omega / (s * t)), 0.5 * (s - omega / (s * t * t)))
    }

    /// Image of the source annulus.
    pub fn target(&self) -> (f64, f64) {
        let inner = match self.junction() {
            Some(rho) => self.eval(rho).0,
            None => self.eval(self.source.inner).0,
        };
        (inner, self.eval(self.source.outer).0)
    }
}

impl StrainProfile for PlanarNitscheMap {
    fn domain(&self) -> Annulus {
        match self.junction() {
            Some(rho) => Annulus { inner: rho, outer: self.source.outer },
            None => self.source,
        }
    }

    fn sample(&self, t: f64, _n: Dimension) -> Result<StrainSample> {
        let (h, hdot) = self.eval(t);
        Ok(StrainSample::from_values(t, h, hdot))
    }

    fn hammer(&self) -> Option<Hammer> {
        self.junction().map(|rho| Hammer {
            zone: Annulus { inner: self.source.inner, outer: rho },
            radius: self.eval(rho).0,
        })
    }
}

/// Closed-form energy of a planar Nitsche-type map on its source annulus.
pub fn planar_nitsche_energy(map: &PlanarNitscheMap) -> Result<EnergyReport> {
    let n = Dimension::new(2)?;
    let omega = map.spec.omega;
    let (r_in, r_out) = map.target();
    let mut value = 2.0 * PI * (r_out * (r_out * r_out - omega).sqrt());
    let formula_id = match map.junction() {
        Some(rho) => {
            value += 2.0 * PI * omega * (rho / map.source.inner).ln();
            "closed-form:planar-hammered"
        }
        None => {
            value -= 2.0 * PI * r_in * (r_in * r_in - omega).max(0.0).sqrt();
            "closed-form:planar-nitsche"
        }
    };
    Ok(EnergyReport {
        value,
        functional: Functional::ConformalE,
        formula_id: formula_id.into(),
        quad_error: 0.0,
        mod_source: modulus(&map.source, n),
        mod_target: Modulus::from_log_ratio((r_out / r_in).ln(), n),
    })
}

/// Planar minimizer: solves for the Nitsche parameter and returns the closed-form energy.
pub fn planar_minimal_energy(source: &Annulus, target: &Annulus) -> Result<(PlanarNitscheParams, EnergyReport)> {
    let n = Dimension::new(2)?;
    let (r, big_r) = (source.inner, source.outer);
    let (rs, big_rs) = (target.inner, target.outer);
    let cls = classify(source, target, n)?;
    let ratio = big_r / r;
    let g = |w: f64| Ok((big_rs + (big_rs * big_rs - w).sqrt()) / (rs + (rs * rs - w).sqrt()) - ratio);
    let omega = match cls.regime {
        Regime::Conformal => 0.0,
        Regime::ExpandingWithin => {
            let mut lo = -rs * rs;
            while g(lo)? >= 0.0 {
                lo *= 2.0;
                if !lo.is_finite() {
                    return Err(Error::numerical("planar expanding parameter bracket", f64::NAN));
                }
            }
            brent(g, lo, 0.0, 1e-15 * lo.abs(), "planar expanding parameter")?
        }
        Regime::ContractingWithin => {
            let top = rs * rs;
            if g(top)? <= 0.0 {
                top
            } else {
                brent(g, 0.0, top, 1e-16 * top, "planar contracting parameter")?
            }
        }
        Regime::ContractingBelow => rs * rs,
        Regime::ExpandingAbove => {
            return Err(Error::numerical("planar pairs are never above the upper bound", cls.alpha_ratio));
        }
    };
    let rescale = match cls.regime {
        Regime::ContractingBelow => (big_rs + (big_rs * big_rs - omega).sqrt()) / big_r,
        _ => (rs + (rs * rs - omega).sqrt()) / r,
    };
    let spec = PlanarNitscheParams { omega, rescale };
    let report = planar_nitsche_energy(&PlanarNitscheMap { spec, source: *source })?;
    Ok((spec, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinimalityStatus {
    ProvenMinimal,
    RadialUnproven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MapShape {
    Conformal,
    Radial,
    HammeringComposite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerPlan {
    pub regime: Regime,
    pub shape: MapShape,
    pub map: RadialMap,
    /// Junction radius of a hammering composite.
    pub rho: Option<f64>,
    /// Planar parametrisation, for n = 2 only.
    pub planar: Option<PlanarNitscheParams>,
    pub energy: EnergyReport,
    pub cross_check: Option<CrossCheck>,
    pub status: MinimalityStatus,
    pub witness: Option<NonRadialWitness>,
}

/// Solves `H_+(R/rho) = R*/r*` for the junction radius.
pub fn hammering_junction(source: &Annulus, target: &Annulus, n: Dimension) -> Result<f64> {
    let goal = target.log_ratio();
    let f = |x: f64| Ok(log_eval(PrincipalKind::Plus, x, n)?.log_abs_h - goal);
    let mut hi = 1.0;
    while f(hi)? <= 0.0 {
        hi *= 2.0;
    }
    let x = bisect(f, 0.0, hi, 4.0 * f64::EPSILON * hi, "hammering junction")?;
    Ok(source.outer / x.exp())
}

fn hammering_map(source: &Annulus, target: &Annulus, n: Dimension) -> Result<(RadialMap, f64)> {
    let rho = hammering_junction(source, target, n)?;
    let smooth = Annulus::new(rho, source.outer)?;
    let map = RadialMap::new(PrincipalKind::Plus, target.inner, 1.0 / rho, smooth)?.with_hammer(
        Annulus::new(source.inner, rho)?,
        target.inner,
        n,
    )?;
    Ok((map, rho))
}

fn cross(value: f64, primary: f64, formula_id: &str) -> Result<CrossCheck> {
    let d = rel_diff(value, primary);
    if !(d <= CROSS_CHECK_TOL) {
        return Err(Error::numerical(format!("energy cross-check {formula_id}"), d));
    }
    Ok(CrossCheck { value, formula_id: formula_id.into(), rel_diff: d })
}

/// Energy-minimal deformation of `source` onto `target` with default tolerances.
pub fn minimal_energy(source: &Annulus, target: &Annulus, n: Dimension) -> Result<MinimizerPlan> {
    minimal_energy_with(source, target, n, QuadOptions::default())
}

pub fn minimal_energy_with(source: &Annulus, target: &Annulus, n: Dimension, opts: QuadOptions) -> Result<MinimizerPlan> {
    let cls = classify(source, target, n)?;
    let e = Functional::ConformalE;
    let planar = if n.get() == 2 { Some(planar_minimal_energy(source, target)?) } else { None };

    let (map, shape, rho) = match cls.regime {
        Regime::ContractingBelow => {
            let (map, rho) = hammering_map(source, target, n)?;
            (map, MapShape::HammeringComposite, Some(rho))
        }
        Regime::Conformal => {
            let map = RadialMap::new(PrincipalKind::IdentityLike, target.inner / source.inner, 1.0, *source)?;
            (map, MapShape::Conformal, None)
        }
        Regime::ExpandingAbove if n.get() <= 3 => {
            debug_assert!(false, "upper Nitsche bound is infinite for n <= 3");
            return Err(Error::numerical("expanding-above regime reached for n <= 3", cls.alpha_ratio));
        }
        _ => (fit_annuli(source, target, n)?.0, MapShape::Radial, None),
    };

    if cls.regime == Regime::ExpandingWithin && n.get() >= 4 {
        // The explicit upper bound is equivalent to eta_H(r) <= alpha_n.
        let eta_r = map.sample(source.inner, n)?.eta;
        let alpha_n = constants(n)?.alpha_n;
        if eta_r > alpha_n * (1.0 + 1e-8) {
            return Err(Error::numerical("upper Nitsche bound disagrees with the elasticity condition", eta_r - alpha_n));
        }
    }

    let quad = radial_energy(&map, n, e, opts)?;
    let (energy, cross_check) = if let Some((_, closed)) = &planar {
        let cc = cross(quad.value, closed.value, &quad.formula_id)?;
        (closed.clone(), Some(cc))
    } else {
        match cls.regime {
            Regime::Conformal => {
                let closed = conformal_energy(source, target, n);
                let cc = cross(quad.value, closed.value, &quad.formula_id)?;
                (closed, Some(cc))
            }
            Regime::ContractingWithin | Regime::ContractingBelow => {
                let c = if shape == MapShape::HammeringComposite {
                    target.inner.powf(n.as_f64())
                } else {
                    map.characteristic_constant(n)
                };
                let v = contracting_energy_formula(source, target, c, n, opts)?;
                let cc = cross(v, quad.value, "lower-bound:contracting")?;
                (quad, Some(cc))
            }
            Regime::ExpandingWithin | Regime::ExpandingAbove => {
                let v = expanding_energy_formula(source, target, map.characteristic_constant(n), n, opts)?;
                let cc = cross(v, quad.value, "lower-bound:expanding")?;
                (quad, Some(cc))
            }
        }
    };

    let (status, witness) = if cls.regime == Regime::ExpandingAbove {
        (MinimalityStatus::RadialUnproven, nonradial_witness(source, target, n, e).ok())
    } else {
        (MinimalityStatus::ProvenMinimal, None)
    };
    Ok(MinimizerPlan {
        regime: cls.regime,
        shape,
        map,
        rho,
        planar: planar.map(|(s, _)| s),
        energy,
        cross_check,
        status,
        witness,
    })
}

/// `max(1, alpha^n) Mod A` with `alpha = Mod A* / Mod A`.
pub fn operator_norm_lower_bound(source: &Annulus, target: &Annulus, n: Dimension) -> EnergyReport {
    let ms = modulus(source, n);
    let mt = modulus(target, n);
    let alpha = mt.log_ratio / ms.log_ratio;
    EnergyReport {
        value: alpha.powf(n.as_f64()).max(1.0) * ms.value,
        functional: Functional::OperatorNormF,
        formula_id: "closed-form:operator-norm-bound".into(),
        quad_error: 0.0,
        mod_source: ms,
        mod_target: mt,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FStatus {
    ProvenMinimal,
    Indeterminate,
    NotPowerStretching,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FMinimality {
    pub status: FStatus,
    pub alpha: f64,
    pub witness: Option<NonRadialWitness>,
}

/// Whether the power stretching minimizes the weighted energy for this pair.
pub fn f_minimality_status(source: &Annulus, target: &Annulus, n: Dimension) -> Result<FMinimality> {
    let alpha = target.log_ratio() / source.log_ratio();
    let nf = n.as_f64();
    if n.get() <= 3 || alpha < constants(n)?.alpha_n {
        return Ok(FMinimality { status: FStatus::ProvenMinimal, alpha, witness: None });
    }
    if alpha >= ((nf - 1.0) / (nf - 3.0)).sqrt() {
        let witness = nonradial_witness(source, target, n, Functional::WeightedF).ok();
        return Ok(FMinimality { status: FStatus::NotPowerStretching, alpha, witness });
    }
    Ok(FMinimality { status: FStatus::Indeterminate, alpha, witness: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionCheck {
    pub energy_identity_lhs: f64,
    pub energy_identity_rhs: f64,
    pub energy_identity_residual: f64,
    pub weighted_identity_lhs: f64,
    pub weighted_identity_rhs: f64,
    pub weighted_identity_residual: f64,
}

/// `||D#f||^n / det D#f` for a radial map `f` with radial stretch `gdot` and
/// tangential stretch `g_over_s`.
fn inner_distortion_numerator(gdot: f64, g_over_s: f64, n: f64) -> f64 {
    // Cofactor singular values: g_over_s^{n-1} once, gdot g_over_s^{n-2} (n-1 times).
    let radial = g_over_s.powf(n - 1.0);
    let tangential = gdot * g_over_s.powf(n - 2.0);
    let hs2 = radial * radial + (n - 1.0) * tangential * tangential;
    let det = (gdot * g_over_s.powf(n - 1.0)).powf(n - 1.0);
    hs2.powf(n / 2.0) / det
}

/// Both sides of the inner-distortion identities for the inverse of `profile`.
pub fn distortion_integral_check<P: StrainProfile + ?Sized>(profile: &P, n: Dimension, opts: QuadOptions) -> Result<DistortionCheck> {
    if profile.hammer().is_some() {
        return Err(Error::precondition("distortion identities need a homeomorphism"));
    }
    let nf = n.as_f64();
    let omega = sphere_area(n);
    let d = profile.domain();
    let breaks: Vec<f64> = profile.breakpoints().iter().map(|b| b.ln()).collect();
    let (a, b) = (d.inner.ln(), d.outer.ln());
    let lhs = |weighted: bool| {
        // Pull the y-integral back to the t-line: y = H(t), dy-measure omega H^{n-1} Hdot dt.
        move |s: f64| -> Result<f64> {
            let t = s.exp();
            let x = profile.sample(t, n)?;
            if !(x.hdot > 0.0 && x.h > 0.0) {
                return Err(Error::precondition(format!("map must be increasing with positive Jacobian, t = {t}")));
            }
            let k = inner_distortion_numerator(1.0 / x.hdot, t / x.h, nf);
            let w = if weighted { x.h.powf(-nf) } else { 1.0 };
            Ok(omega * x.h.powf(nf - 1.0) * x.hdot * k * w * t)
        }
    };
    let energy_identity_lhs = integrate(lhs(false), a, b, &breaks, opts)?.value;
    let weighted_identity_lhs = integrate(lhs(true), a, b, &breaks, opts)?.value;
    let energy_identity_rhs = radial_energy(profile, n, Functional::ConformalE, opts)?.value;
    let weighted_identity_rhs = radial_energy(profile, n, Functional::WeightedF, opts)?.value;
    Ok(DistortionCheck {
        energy_identity_lhs,
        energy_identity_rhs,
        energy_identity_residual: (energy_identity_lhs - energy_identity_rhs).abs(),
        weighted_identity_lhs,
        weighted_identity_rhs,
        weighted_identity_residual: (weighted_identity_lhs - weighted_identity_rhs).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QcCheck {
    /// `(Mod A*/Mod A)^{n-1}`
    pub ratio_power: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `ratio_power - 1/K_I`
    pub lower_margin: f64,
    /// `K_O - ratio_power`
    pub upper_margin: f64,
}

/// Checks `1/K_I <= (Mod A*/Mod A)^{n-1} <= K_O`.
pub fn qc_bounds(source: &Annulus, target: &Annulus, n: Dimension, k_outer: f64, k_inner: f64) -> Result<QcCheck> {
    if !(k_outer >= 1.0 && k_inner >= 1.0) {
        return Err(Error::domain(format!("dilatations must be at least 1, got ({k_outer}, {k_inner})")));
    }
    let ratio_power = (target.log_ratio() / source.log_ratio()).powf(n.as_f64() - 1.0);
    let lower_margin = ratio_power - 1.0 / k_inner;
    let upper_margin = k_outer - ratio_power;
    Ok(QcCheck {
        ratio_power,
        lower_holds: lower_margin >= -1e-12 * ratio_power,
        upper_holds: upper_margin >= -1e-12 * ratio_power,
        lower_margin,
        upper_margin,
    })
}

/// Outer and inner dilatations `(K_O, K_I)` of the power stretching with exponent `alpha`.
pub fn power_stretching_dilatations(alpha: f64, n: Dimension) -> (f64, f64) {
    let nf = n.as_f64();
    ((1.0 / alpha).max(alpha.powf(nf - 1.0)), alpha.powf(1.0 - nf).max(alpha))
}

/// Weighted energy of the power stretching between two annuli, `(alpha^2+n-1)^{n/2} Mod A`.
pub fn power_stretching_weighted_energy(source: &Annulus, target: &Annulus, n: Dimension) -> f64 {
    let nf = n.as_f64();
    let alpha = target.log_ratio() / source.log_ratio();
    (alpha * alpha + nf - 1.0).powf(nf / 2.0) * modulus(source, n).value
}

/// Convenience: the power stretching between two annuli as a profile.
pub fn power_stretching(source: &Annulus, target: &Annulus) -> Result<PowerStretching> {
    PowerStretching::between(source, target)
}
