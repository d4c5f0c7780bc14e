//! Radial strain profiles `x -> H(|x|) x/|x|` accepted by the energy and
//! free-Lagrangian evaluators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Annulus, Dimension};
use crate::principal::StrainSample;

/// An inner sub-annulus collapsed onto the sphere of a given radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hammer {
    pub zone: Annulus,
    pub radius: f64,
}

/// A radial profile on an annulus, optionally preceded by a hammered zone.
pub trait StrainProfile {
    /// Annulus on which the profile is smooth.
    fn domain(&self) -> Annulus;

    /// Strain data at `t` inside [`StrainProfile::domain`].
    fn sample(&self, t: f64, n: Dimension) -> Result<StrainSample>;

    /// Interior radii where the profile is only piecewise smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn hammer(&self) -> Option<Hammer> {
        None
    }

    /// Source annulus including any hammered zone.
    fn full_domain(&self) -> Annulus {
        let d = self.domain();
        match self.hammer() {
            Some(h) => Annulus { inner: h.zone.inner, outer: d.outer },
            None => d,
        }
    }

    /// Samples anywhere in the full domain; hammered radii give `H = radius`, `Hdot = 0`.
    fn sample_full(&self, t: f64, n: Dimension) -> Result<StrainSample> {
        match self.hammer() {
            Some(h) if t < self.domain().inner => Ok(StrainSample {
                t,
                h: h.radius,
                hdot: 0.0,
                eta: 0.0,
                defect: 1.0,
            }),
            _ => self.sample(t, n),
        }
    }
}

/// Power stretching `H(t) = lambda t^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerStretching {
    pub lambda: f64,
    pub alpha: f64,
    pub domain: Annulus,
}

impl PowerStretching {
    pub fn new(lambda: f64, alpha: f64, domain: Annulus) -> Result<Self> {
        if !(lambda > 0.0 && alpha > 0.0) {
            return Err(Error::domain(format!(
                "power stretching needs lambda > 0 and alpha > 0, got ({lambda}, {alpha})"
            )));
        }
        Ok(PowerStretching { lambda, alpha, domain })
    }

    /// The stretching taking `source` onto `target` with matching boundary order.
    pub fn between(source: &Annulus, target: &Annulus) -> Result<Self> {
        let alpha = target.log_ratio() / source.log_ratio();
        let lambda = target.inner / source.inner.powf(alpha);
        PowerStretching::new(lambda, alpha, *source)
    }
}

impl StrainProfile for PowerStretching {
    fn domain(&self) -> Annulus {
        self.domain
    }

    fn sample(&self, t: f64, _n: Dimension) -> Result<StrainSample> {
        let h = self.lambda * t.powf(self.alpha);
        Ok(StrainSample {
            t,
            h,
            hdot: self.alpha * h / t,
            eta: self.alpha,
            defect: (1.0 - self.alpha) * (1.0 + self.alpha),
        })
    }
}

/// Monotone piecewise-cubic Hermite interpolant of user samples
/// (Fritsch-Carlson slope limiting).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledProfile {
    ts: Vec<f64>,
    hs: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledProfile {
    /// Requires strictly increasing radii and strictly monotone positive values.
    pub fn new(ts: Vec<f64>, hs: Vec<f64>) -> Result<Self> {
        let m = ts.len();
        if m < 2 || hs.len() != m {
            return Err(Error::domain("sampled profile needs at least two (t, H) pairs of equal length"));
        }
        if ts[0] <= 0.0 || ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("sampled profile radii must be positive and strictly increasing"));
        }
        let increasing = hs[m - 1] > hs[0];
        let monotone = hs.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
        if !monotone || hs.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::precondition("sampled profile values must be positive and strictly monotone"));
        }
        let secants: Vec<f64> = (0..m - 1).map(|i| (hs[i + 1] - hs[i]) / (ts[i + 1] - ts[i])).collect();
        let mut slopes = vec![0.0; m];
        slopes[0] = secants[0];
        slopes[m - 1] = secants[m - 2];
        for i in 1..m - 1 {
            slopes[i] = 0.5 * (secants[i - 1] + secants[i]);
        }
        for i in 0..m - 1 {
            let d = secants[i];
            let a = slopes[i] / d;
            let b = slopes[i + 1] / d;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slopes[i] = tau * a * d;
                slopes[i + 1] = tau * b * d;
            }
        }
        Ok(SampledProfile { ts, hs, slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.ts
    }
}

impl StrainProfile for SampledProfile {
    fn domain(&self) -> Annulus {
        Annulus { inner: self.ts[0], outer: self.ts[self.ts.len() - 1] }
    }

    fn sample(&self, t: f64, _n: Dimension) -> Result<StrainSample> {
        let m = self.ts.len();
        if !(t >= self.ts[0] && t <= self.ts[m - 1]) {
            return Err(Error::domain(format!("t = {t} outside the sampled range")));
        }
        let i = match self.ts.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(m - 2),
        };
        let h = self.ts[i + 1] - self.ts[i];
        let s = (t - self.ts[i]) / h;
        let (y0, y1) = (self.hs[i], self.hs[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        let deriv = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / h;
        Ok(StrainSample::from_values(t, value, deriv))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.ts[1..self.ts.len() - 1].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn power_stretching_between_annuli() {
        let s = Annulus::new(1.0, 2.0).unwrap();
        let t = Annulus::new(3.0, 12.0).unwrap();
        let p = PowerStretching::between(&s, &t).unwrap();
        assert!((p.alpha - 2.0).abs() < 1e-15);
        assert!((p.sample(1.0, dim(3)).unwrap().h - 3.0).abs() < 1e-14);
        assert!((p.sample(2.0, dim(3)).unwrap().h - 12.0).abs() < 1e-13);
    }

    #[test]
    fn sampled_profile_interpolates_and_stays_monotone() {
        let ts = vec![1.0, 1.3, 1.5, 2.0];
        let hs = vec![1.0, 1.01, 1.8, 1.9];
        let p = SampledProfile::new(ts.clone(), hs.clone()).unwrap();
        for (t, h) in ts.iter().zip(&hs) {
            assert!((p.sample(*t, dim(2)).unwrap().h - h).abs() < 1e-14);
        }
        let mut prev = 0.0;
        for i in 0..=1000 {
            let t = 1.0 + i as f64 / 1000.0;
            let s = p.sample(t, dim(2)).unwrap();
            assert!(s.h >= prev && s.hdot >= 0.0);
            prev = s.h;
        }
    }

    #[test]
    fn sampled_profile_reproduces_cubic_slope() {
        // Linear data is reproduced exactly, derivative included.
        let ts: Vec<f64> = (0..6).map(|i| 1.0 + 0.2 * i as f64).collect();
        let hs: Vec<f64> = ts.iter().map(|t| 3.0 * t + 1.0).collect();
        let p = SampledProfile::new(ts, hs).unwrap();
        let s = p.sample(1.55, dim(3)).unwrap();
        assert!((s.h - 5.65).abs() < 1e-14 && (s.hdot - 3.0).abs() < 1e-13);
    }

    #[test]
    fn non_monotone_samples_rejected() {
        let e = SampledProfile::new(vec![1.0, 1.5, 2.0], vec![1.0, 2.0, 1.5]).unwrap_err();
        assert_eq!(e.kind(), "precondition");
    }
}
