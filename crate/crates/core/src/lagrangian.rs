//! Free-Lagrangian identities, the spherical homothety, the random-variable
//! energy model and non-radial witnesses in dimensions `n >= 4`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bvp::fit_annuli;
use crate::energy::Functional;
use crate::error::{Error, Result};
use crate::geometry::{modulus, sphere_area, Annulus, Dimension};
use crate::nitsche::{constants, delta_n};
use crate::principal::h_minus;
use crate::profile::StrainProfile;
use crate::quad::{integrate, QuadOptions};

/// Candidate homothety parameters tried by [`nonradial_witness`].
pub const WITNESS_LAMBDAS: [f64; 6] = [0.95, 1.05, 0.9, 1.1, 0.8, 1.2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangianCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`
    pub margin: f64,
}

impl LagrangianCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        LagrangianCheck { lhs, rhs, margin: lhs - rhs }
    }

    pub fn residual(&self) -> f64 {
        self.margin.abs()
    }
}

/// Jacobian, radial-normal and tangential free-Lagrangian integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangianReport {
    pub jacobian: LagrangianCheck,
    pub radial: LagrangianCheck,
    pub degree: LagrangianCheck,
}

impl LagrangianReport {
    pub fn max_residual(&self) -> f64 {
        self.jacobian.residual().max(self.radial.residual()).max(self.degree.residual())
    }
}

fn lagrangian_integrals<P: StrainProfile + ?Sized>(
    profile: &P,
    source: &Annulus,
    target: &Annulus,
    n: Dimension,
    opts: QuadOptions,
) -> Result<LagrangianReport> {
    let nf = n.as_f64();
    let omega = sphere_area(n);
    let full = profile.full_domain();
    let tol = 1e-8;
    if (full.inner - source.inner).abs() > tol * source.inner || (full.outer - source.outer).abs() > tol * source.outer {
        return Err(Error::precondition("profile is not defined on the source annulus"));
    }
    let h_in = profile.sample_full(source.inner, n)?.h;
    let h_out = profile.sample_full(source.outer, n)?.h;
    if (h_in - target.inner).abs() > tol * target.inner || (h_out - target.outer).abs() > tol * target.outer {
        return Err(Error::precondition(format!(
            "profile does not preserve boundary order: H(r) = {h_in}, H(R) = {h_out}"
        )));
    }
    let mut breaks: Vec<f64> = profile.breakpoints().iter().map(|b| b.ln()).collect();
    breaks.push(profile.domain().inner.ln());

    // |h_N| = |Hdot|, |h_T| = |H|/t; polar measure omega t^{n-1} dt = omega t^n ds.
    let integral = |which: u8| {
        let f = |s: f64| -> Result<f64> {
            let t = s.exp();
            let x = profile.sample_full(t, n)?;
            if x.hdot < -1e-12 * x.h.abs() / t || x.h <= 0.0 {
                return Err(Error::precondition(format!("profile is not an increasing homeomorphism near t = {t}")));
            }
            let normal = x.hdot.abs();
            let tangential = x.h.abs() / t;
            let measure = omega * t.powf(nf);
            Ok(measure
                * match which {
                    0 => normal * tangential.powf(nf - 1.0),
                    1 => normal / (x.h.abs() * t.powf(nf - 1.0)),
                    _ => (tangential / x.h.abs()).powf(nf - 1.0) / t,
                })
        };
        integrate(f, full.inner.ln(), full.outer.ln(), &breaks, opts).map(|q| q.value)
    };
    let jac_rhs = omega * (target.outer.powf(nf) - target.inner.powf(nf)) / nf;
    Ok(LagrangianReport {
        jacobian: LagrangianCheck::new(integral(0)?, jac_rhs),
        radial: LagrangianCheck::new(integral(1)?, modulus(target, n).value),
        degree: LagrangianCheck::new(integral(2)?, modulus(source, n).value),
    })
}

/// Evaluates the three free-Lagrangian identities for a radial homeomorphism.
pub fn verify_free_lagrangians<P: StrainProfile + ?Sized>(
    profile: &P,
    source: &Annulus,
    target: &Annulus,
    n: Dimension,
    opts: QuadOptions,
) -> Result<LagrangianReport> {
    lagrangian_integrals(profile, source, target, n, opts)
}

/// Margins of the free-Lagrangian lower estimates (weight one in the first).
/// For radial maps all three vanish.
pub fn free_lagrangian_estimates<P: StrainProfile + ?Sized>(
    profile: &P,
    source: &Annulus,
    target: &Annulus,
    n: Dimension,
    opts: QuadOptions,
) -> Result<LagrangianReport> {
    lagrangian_integrals(profile, source, target, n, opts)
}

/// Conjugate of `x -> lambda x` by stereographic projection, acting on meridians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalHomothety {
    pub lambda: f64,
}

impl SphericalHomothety {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("homothety parameter must be positive, got {lambda}")));
        }
        Ok(SphericalHomothety { lambda })
    }

    /// Image latitude `2 atan(lambda tan(theta/2))`.
    pub fn phi(&self, theta: f64) -> f64 {
        let half = 0.5 * theta;
        2.0 * (self.lambda * half.sin()).atan2(half.cos())
    }

    /// Meridian speed, valid on the closed interval `[0, pi]`.
    pub fn speed(&self, theta: f64) -> f64 {
        let half = 0.5 * theta;
        let (s, c) = half.sin_cos();
        1.0 / (c * c / self.lambda + self.lambda * s * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeridianSample {
    pub theta: f64,
    pub phi: f64,
    pub phi_dot: f64,
    pub dbar_norm: f64,
}

pub fn homothety_profile(lambda: f64, theta: f64) -> Result<MeridianSample> {
    let h = SphericalHomothety::new(lambda)?;
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::domain(format!("meridian angle must lie in (0, pi), got {theta}")));
    }
    let phi = h.phi(theta);
    Ok(MeridianSample { theta, phi, phi_dot: h.speed(theta), dbar_norm: phi.sin() / theta.sin() })
}

/// Mean over the sphere of a function of the meridian angle.
fn sphere_mean<F>(mut f: F, n: Dimension, opts: QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let w = n.as_f64() - 2.0;
    let num = integrate(|th: f64| Ok(f(th)? * th.sin().powf(w)), 0.0, PI, &[], opts)?.value;
    let den = integrate(|th: f64| Ok(th.sin().powf(w)), 0.0, PI, &[], opts)?.value;
    Ok(num / den)
}

/// Normalized mean of the Jacobian `|D Phi|^{n-1}`; equals one.
pub fn homothety_jacobian_mean(lambda: f64, n: Dimension, opts: QuadOptions) -> Result<f64> {
    let h = SphericalHomothety::new(lambda)?;
    let e = n.as_f64() - 1.0;
    sphere_mean(|th| Ok((h.phi(th).sin() / th.sin()).powf(e)), n, opts)
}

/// Mean of `[alpha^2 + (n-1)|D Phi|^2]^{n/2}` over the sphere.
pub fn sphere_energy_t(alpha: f64, lambda: f64, n: Dimension, opts: QuadOptions) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("stretch must be positive, got {alpha}")));
    }
    let h = SphericalHomothety::new(lambda)?;
    let nf = n.as_f64();
    sphere_mean(
        |th| {
            let d = h.speed(th);
            Ok((alpha * alpha + (nf - 1.0) * d * d).powf(nf / 2.0))
        },
        n,
        opts,
    )
}

/// Two-valued nonnegative random variable: `high_value` with probability `mass_high`, else 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPointVariable {
    pub high_value: f64,
    pub mass_high: f64,
}

impl TwoPointVariable {
    /// The optimal variable for `alpha > alpha_n`.
    pub fn optimal(alpha: f64, n: Dimension) -> Result<Self> {
        let an = constants(n)?.alpha_n;
        if !(alpha > an) {
            return Err(Error::domain(format!("two-point variable needs alpha > alpha_n = {an}, got {alpha}")));
        }
        let e = n.as_f64() - 1.0;
        Ok(TwoPointVariable { high_value: (alpha / an).powf(e), mass_high: (an / alpha).powf(e) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RandomVariable {
    Constant(f64),
    TwoPoint(TwoPointVariable),
    /// `(value, probability)` pairs.
    Discrete(Vec<(f64, f64)>),
}

impl RandomVariable {
    fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            RandomVariable::Constant(c) => vec![(*c, 1.0)],
            RandomVariable::TwoPoint(v) => vec![(v.high_value, v.mass_high), (0.0, 1.0 - v.mass_high)],
            RandomVariable::Discrete(a) => a.clone(),
        }
    }
}

/// `E[(alpha^2 + (n-1) X^{2/(n-1)})^{n/2}]`.
pub fn random_variable_energy(alpha: f64, n: Dimension, x: &RandomVariable) -> Result<f64> {
    let atoms = x.atoms();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if atoms.iter().any(|&(v, p)| v < 0.0 || p < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::domain("random variable must be nonnegative with total probability one"));
    }
    let mean: f64 = atoms.iter().map(|&(v, p)| v * p).sum();
    if mean < 1.0 - 1e-12 {
        return Err(Error::domain(format!("random variable mean must be at least 1, got {mean}")));
    }
    let nf = n.as_f64();
    let m = nf - 1.0;
    Ok(atoms
        .iter()
        .map(|&(v, p)| p * (alpha * alpha + m * v.powf(2.0 / m)).powf(nf / 2.0))
        .sum())
}

/// `alpha^n + b alpha` with `b = n (alpha_n^2 + n - 1)^{(n-2)/2} / alpha_n`.
pub fn two_point_energy_closed_form(alpha: f64, n: Dimension) -> Result<f64> {
    let an = constants(n)?.alpha_n;
    if an.is_infinite() {
        return Err(Error::domain("no finite critical stretch for n <= 3"));
    }
    let nf = n.as_f64();
    let b = nf * (an * an + nf - 1.0).powf((nf - 2.0) / 2.0) / an;
    Ok(alpha.powf(nf) + b * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessCandidate {
    pub lambda: f64,
    pub energy: f64,
    /// Radial infimum minus the candidate's energy.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonRadialWitness {
    pub functional: Functional,
    pub radial_energy: f64,
    pub best: Option<WitnessCandidate>,
    pub candidates: Vec<WitnessCandidate>,
    /// True when some admissible candidate beats the radial infimum.
    pub conclusive: bool,
}

fn admissible(lambda: f64, min_stretch: f64, n: f64) -> bool {
    lambda != 1.0 && lambda.max(1.0 / lambda) <= ((n - 3.0) / (n - 1.0)).sqrt() * min_stretch
}

fn finish(functional: Functional, radial_energy: f64, candidates: Vec<WitnessCandidate>) -> NonRadialWitness {
    let best = candidates.iter().copied().max_by(|a, b| a.gap.total_cmp(&b.gap));
    NonRadialWitness {
        functional,
        radial_energy,
        conclusive: best.map(|c| c.gap > 0.0).unwrap_or(false),
        best,
        candidates,
    }
}

/// Radial profile composed with a spherical homothety, compared against the
/// radial infimum.
pub fn nonradial_witness(source: &Annulus, target: &Annulus, n: Dimension, functional: Functional) -> Result<NonRadialWitness> {
    nonradial_witness_with(source, target, n, functional, QuadOptions::default())
}

pub fn nonradial_witness_with(
    source: &Annulus,
    target: &Annulus,
    n: Dimension,
    functional: Functional,
    opts: QuadOptions,
) -> Result<NonRadialWitness> {
    let nf = n.as_f64();
    if n.get() < 4 {
        return Err(Error::precondition("non-radial witnesses need n >= 4"));
    }
    let m = nf - 1.0;
    match functional {
        Functional::WeightedF => {
            let alpha = target.log_ratio() / source.log_ratio();
            if !(alpha * alpha > m / (nf - 3.0)) {
                return Err(Error::precondition(format!(
                    "weighted witness needs alpha^2 > (n-1)/(n-3), got alpha = {alpha}"
                )));
            }
            let md = modulus(source, n).value;
            let radial = (alpha * alpha + m).powf(nf / 2.0) * md;
            let mut out = Vec::new();
            for &lambda in WITNESS_LAMBDAS.iter().filter(|&&l| admissible(l, alpha, nf)) {
                let energy = sphere_energy_t(alpha, lambda, n, opts)? * md;
                out.push(WitnessCandidate { lambda, energy, gap: radial - energy });
            }
            Ok(finish(functional, radial, out))
        }
        Functional::ConformalE => {
            let delta = delta_n(n)?;
            let ratio = source.outer / source.inner;
            let threshold = h_minus(delta, n)?.h / h_minus(delta / ratio, n)?.h;
            if !(ratio > 1.0 && ratio < delta && target.outer / target.inner > threshold) {
                return Err(Error::precondition(format!(
                    "energy witness needs 1 < R/r < {delta} and R*/r* > {threshold}"
                )));
            }
            let (map, _) = fit_annuli(source, target, n)?;
            let omega = sphere_area(n);
            let (a, b) = (source.inner.ln(), source.outer.ln());
            let radial = integrate(
                |s: f64| {
                    let x = map.sample(s.exp(), n)?;
                    Ok(omega * x.h.abs().powf(nf) * (x.eta * x.eta + m).powf(nf / 2.0))
                },
                a,
                b,
                &[],
                opts,
            )?
            .value;
            // The elasticity of the Minus branch decreases in t.
            let min_stretch = map.sample(source.outer, n)?.eta.min(map.sample(source.inner, n)?.eta);
            let mut out = Vec::new();
            for &lambda in WITNESS_LAMBDAS.iter().filter(|&&l| admissible(l, min_stretch, nf)) {
                let energy = integrate(
                    |s: f64| {
                        let x = map.sample(s.exp(), n)?;
                        Ok(omega * x.h.abs().powf(nf) * sphere_energy_t(x.eta, lambda, n, opts)?)
                    },
                    a,
                    b,
                    &[],
                    opts,
                )?
                .value;
                out.push(WitnessCandidate { lambda, energy, gap: radial - energy });
            }
            Ok(finish(functional, radial, out))
        }
        Functional::OperatorNormF => Err(Error::precondition("no witness construction for the operator-norm energy")),
    }
}
