//! Singular-value profiles `ν` and the ring radii they induce.
//!
//! For `A = U·diag(s)·V` with the empirical law of the `s_i` close to `ν`,
//! the eigenvalues of `A` fill the annulus `a ≤ |z| ≤ b` with
//! `b = (∫x² ν)^½` and `a = (∫x⁻² ν)^-½` (`a = 0` when that integral diverges).

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Singular-value law.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularProfile {
    /// Empirical law of the listed values.
    ExplicitList(Vec<f64>),
    /// Uniform law on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Density `π⁻¹ √(4 − x²)` on `[0, 2]`: the singular values of a
    /// variance-`1/n` Ginibre matrix.
    QuarterCircle,
    /// All singular values equal to `c`.
    PointMass(f64),
}

/// Inner and outer radius of the limiting annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGeometry {
    /// Inner radius; exactly `0.0` when `∫x⁻²ν` diverges.
    pub a: f64,
    pub b: f64,
}

impl RingGeometry {
    pub fn has_hole(&self) -> bool {
        self.a > 0.0
    }
}

impl SingularProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ExplicitList(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidProfile("empty value list".into()));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return Err(Error::InvalidProfile(format!(
                        "singular value {v} is not a positive finite number"
                    )));
                }
            }
            Self::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && lo < hi) {
                    return Err(Error::InvalidProfile(format!(
                        "uniform profile needs 0 < lo < hi, got lo = {lo}, hi = {hi}"
                    )));
                }
            }
            Self::QuarterCircle => {}
            Self::PointMass(c) => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidProfile(format!("point mass must be positive, got {c}")));
                }
            }
        }
        Ok(())
    }

    /// Upper end of the support.
    pub fn support_bound(&self) -> f64 {
        match self {
            Self::ExplicitList(v) => v.iter().copied().fold(0.0, f64::max),
            Self::Uniform { hi, .. } => *hi,
            Self::QuarterCircle => 2.0,
            Self::PointMass(c) => *c,
        }
    }

    /// `∫ x² ν(dx)`.
    pub fn second_moment(&self) -> f64 {
        match self {
            Self::ExplicitList(v) => v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64,
            Self::Uniform { lo, hi } => (hi * hi * hi - lo * lo * lo) / (3.0 * (hi - lo)),
            Self::QuarterCircle => 1.0,
            Self::PointMass(c) => c * c,
        }
    }

    /// `∫ x⁻² ν(dx)`, or `None` when it diverges.
    pub fn inverse_second_moment(&self) -> Option<f64> {
        match self {
            Self::ExplicitList(v) => Some(v.iter().map(|x| 1.0 / (x * x)).sum::<f64>() / v.len() as f64),
            Self::Uniform { lo, hi } => Some((1.0 / lo - 1.0 / hi) / (hi - lo)),
            // The density is ≍ 2/π near 0, so ∫ x⁻² diverges.
            Self::QuarterCircle => None,
            Self::PointMass(c) => Some(1.0 / (c * c)),
        }
    }

    pub fn ring_radii(&self) -> RingGeometry {
        let b = sqrt(self.second_moment());
        let a = match self.inverse_second_moment() {
            Some(m) if m.is_finite() && m > 0.0 => 1.0 / sqrt(m),
            _ => 0.0,
        };
        RingGeometry { a, b }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::ExplicitList(v) => v.iter().filter(|s| **s <= x).count() as f64 / v.len() as f64,
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::QuarterCircle => quarter_circle_cdf(x),
            Self::PointMass(c) => {
                if x >= *c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Quantile function `F⁻¹(u)` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::ExplicitList(v) => {
                let mut sorted = v.clone();
                sorted.sort_by(f64::total_cmp);
                list_quantile(&sorted, u)
            }
            Self::Uniform { lo, hi } => lo + (hi - lo) * u,
            Self::QuarterCircle => quarter_circle_quantile(u),
            Self::PointMass(c) => *c,
        }
    }

    /// Deterministic singular values `s_i = F⁻¹((i − ½)/n)`, ascending.
    pub fn realize(&self, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::InvalidArgument("realize needs n >= 1".into()));
        }
        let grid = (1..=n).map(|i| (i as f64 - 0.5) / n as f64);
        let out = match self {
            Self::ExplicitList(v) => {
                let mut sorted = v.clone();
                sorted.sort_by(f64::total_cmp);
                grid.map(|u| list_quantile(&sorted, u)).collect()
            }
            _ => grid.map(|u| self.quantile(u)).collect(),
        };
        Ok(out)
    }
}

fn list_quantile(sorted: &[f64], u: f64) -> f64 {
    let m = sorted.len();
    let idx = libm::ceil(u * m as f64) as usize;
    sorted[idx.clamp(1, m) - 1]
}

/// `F(x) = π⁻¹ ((x/2)√(4 − x²) + 2 asin(x/2))` on `[0, 2]`.
fn quarter_circle_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    (0.5 * x * sqrt(4.0 - x * x) + 2.0 * libm::asin(0.5 * x)) / PI
}

fn quarter_circle_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if quarter_circle_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Empirical Stieltjes transform `(1/n) Σ 1/(z − s_i)`, for `Im z > 0`.
pub fn stieltjes(values: &[f64], z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Stieltjes transform needs Im z > 0, got {z}"
        )));
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty value list".into()));
    }
    let sum: Complex64 = values.iter().map(|s| Complex64::new(1.0, 0.0) / (z - s)).sum();
    Ok(sum / values.len() as f64)
}

/// `|Im G(x + iη)|` along a grid of real points, for inspecting how bounded
/// the Stieltjes transform of the realized singular values stays.
pub fn stieltjes_profile(values: &[f64], eta: f64, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    xs.iter()
        .map(|&x| Ok((x, stieltjes(values, Complex64::new(x, eta))?.im.abs())))
        .collect()
}
