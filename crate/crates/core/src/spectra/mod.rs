//! Spectra of spiked matrices, the determinant ratio `f(z)`, and outlier
//! classification and matching.
//!
//! The outliers of `Ã = A + BC` are the zeros of
//! `f(z) = det(I_r − C (zI − A)⁻¹ B) = det(zI − Ã) / det(zI − A)`
//! outside the spectrum of `A`.

mod dense;
mod krylov;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jordan::JordanSpec;
use crate::math::{cabs, powf};
use crate::matrix::{CMatrix, Lu};
use crate::profiles::RingGeometry;

pub use krylov::{
    outer_eigenvalues, InvertibleOperator, KrylovOptions, KrylovOutcome, LinearOperator, LowRankUpdate, SpikedInverse,
};

/// Pivot ratio below which `zI − A` counts as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

/// Dimension up to which the determinant residual is computed.
pub const DET_CHECK_MAX_DIM: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    /// `|Σλ − Tr M| / (n · max|M_ij|)`.
    pub trace_residual: f64,
    /// `|Πλ − det M| / max(|det M|, Π|λ|)` for `n ≤ 30`.
    pub det_residual: Option<f64>,
}

/// All eigenvalues of a square matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<SpectrumResult> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let n = m.rows();
    let mut work = m.as_slice().to_vec();
    let eigenvalues = dense::eigenvalues_in_place(&mut work, n)?;

    let scale = (n as f64 * m.max_norm()).max(f64::MIN_POSITIVE);
    let sum: Complex64 = eigenvalues.iter().sum();
    let trace_residual = cabs(sum - m.trace()) / scale;
    let det_residual = (n <= DET_CHECK_MAX_DIM && n > 0).then(|| {
        let prod: Complex64 = eigenvalues.iter().product();
        let det = m.determinant().unwrap_or(Complex64::new(0.0, 0.0));
        let mag: f64 = eigenvalues.iter().map(|z| cabs(*z)).product();
        cabs(prod - det) / cabs(det).max(mag).max(f64::MIN_POSITIVE)
    });
    debug_assert!(trace_residual <= 1e-8, "trace residual {trace_residual:e}");
    Ok(SpectrumResult {
        eigenvalues,
        trace_residual,
        det_residual,
    })
}

/// `f(z) = det(I_r − C (zI − A)⁻¹ B)` from one LU of `zI − A` and `r` solves.
pub fn characteristic_ratio(z: Complex64, a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<Complex64> {
    let (_, x) = resolvent_columns(z, a, b, c)?;
    if b.cols() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    (&CMatrix::identity(b.cols()) - &(c * &x)).determinant()
}

fn resolvent_columns(z: Complex64, a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<(Lu, CMatrix)> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || c.cols() != n || c.rows() != b.cols() {
        return Err(Error::Dimension(format!(
            "A {}x{}, B {}x{}, C {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    let mut shifted = a.scale(Complex64::new(-1.0, 0.0));
    for i in 0..n {
        shifted[(i, i)] += z;
    }
    let lu = Lu::factor(&shifted)?;
    lu.check_nonsingular(SINGULAR_PIVOT_RATIO)?;
    let x = lu.solve_matrix(b);
    Ok((lu, x))
}

/// One Newton step on `f` from `z`, using
/// `f'/f = tr((I − C R B)⁻¹ C R² B)` with `R = (zI − A)⁻¹`.
pub fn newton_polish(z: Complex64, a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<Complex64> {
    let (lu, x) = resolvent_columns(z, a, b, c)?;
    let r = b.cols();
    if r == 0 {
        return Ok(z);
    }
    let m = &CMatrix::identity(r) - &(c * &x);
    let r2b = lu.solve_matrix(&x);
    let rhs = c * &r2b;
    let mlu = Lu::factor(&m)?;
    if mlu.check_nonsingular(1e-300).is_err() {
        return Ok(z);
    }
    let logderiv = mlu.solve_matrix(&rhs).trace();
    if logderiv == Complex64::new(0.0, 0.0) || !logderiv.is_finite() {
        return Ok(z);
    }
    Ok(z - Complex64::new(1.0, 0.0) / logderiv)
}

/// `ε = min(0.1·b, (min_i |θ_i| − b)/4)` over the groups beyond `b`,
/// falling back to `0.1·b`.
pub fn default_epsilon(spec: &JordanSpec, b: f64) -> f64 {
    let gap = spec.thetas().map(cabs).filter(|&m| m > b).fold(f64::INFINITY, f64::min);
    if gap.is_finite() {
        (0.1 * b).min((gap - b) / 4.0)
    } else {
        0.1 * b
    }
}

/// `δ = 0.1·a`.
pub fn default_delta(ring: &RingGeometry) -> f64 {
    0.1 * ring.a
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Classification {
    /// `|λ| > b + 2ε`.
    pub outer: Vec<Complex64>,
    /// `|λ| < a − δ`; always empty when `a = 0`.
    pub inner_violations: Vec<Complex64>,
    pub bulk: Vec<Complex64>,
}

pub fn classify_outliers(
    spectrum: &[Complex64],
    ring: &RingGeometry,
    epsilon: f64,
    delta: f64,
) -> Result<Classification> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if ring.a > 0.0 && !(delta > 0.0 && delta < ring.a) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, a = {}), got {delta}",
            ring.a
        )));
    }
    let outer_r = ring.b + 2.0 * epsilon;
    let inner_r = if ring.a > 0.0 { ring.a - delta } else { 0.0 };
    let mut out = Classification::default();
    for &z in spectrum {
        let r = cabs(z);
        if r > outer_r {
            out.outer.push(z);
        } else if r < inner_r {
            out.inner_violations.push(z);
        } else {
            out.bulk.push(z);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedOutlier {
    pub lambda: Complex64,
    /// `n^{1/(2p)} (λ̃ − θ)`.
    pub rescaled: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateClass {
    /// 1-based class index `j`.
    pub j: usize,
    pub p: usize,
    pub beta: usize,
    pub points: Vec<MatchedOutlier>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub theta: Complex64,
    /// Whether `|θ| > b`, so that outliers are expected.
    pub supercritical: bool,
    pub expected: usize,
    pub found: usize,
    pub mismatch: bool,
    pub classes: Vec<RateClass>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub n: usize,
    pub groups: Vec<GroupReport>,
    /// Outer eigenvalues with no supercritical group to attach to.
    pub unmatched: Vec<Complex64>,
    pub inner_violations: Vec<Complex64>,
}

/// One CSV row of a report or constellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierRow {
    /// 1-based.
    pub group_index: usize,
    pub theta: Complex64,
    /// 1-based.
    pub rate_class: usize,
    pub p: usize,
    pub lambda: Complex64,
    pub rescaled: Complex64,
}

impl OutlierReport {
    /// Any group whose cluster size differs from its prediction.
    pub fn mismatch(&self) -> bool {
        self.groups.iter().any(|g| g.mismatch) || !self.unmatched.is_empty()
    }

    pub fn outer_count(&self) -> usize {
        self.groups.iter().map(|g| g.found).sum::<usize>() + self.unmatched.len()
    }

    pub fn rows(&self) -> Vec<OutlierRow> {
        let mut rows = Vec::new();
        for (gi, g) in self.groups.iter().enumerate() {
            for class in &g.classes {
                for pt in &class.points {
                    rows.push(OutlierRow {
                        group_index: gi + 1,
                        theta: g.theta,
                        rate_class: class.j,
                        p: class.p,
                        lambda: pt.lambda,
                        rescaled: pt.rescaled,
                    });
                }
            }
        }
        rows
    }
}

/// Assigns outer eigenvalues to the nearest `θ_i` with `|θ_i| > b`, then fills
/// rate classes of each cluster by decreasing distance to `θ_i`.
pub fn match_outliers(outer: &[Complex64], spec: &JordanSpec, n: usize, b: f64) -> OutlierReport {
    let groups = spec.groups();
    let supercritical: Vec<bool> = groups.iter().map(|g| cabs(g.theta) > b).collect();
    let mut clusters: Vec<Vec<Complex64>> = alloc::vec![Vec::new(); groups.len()];
    let mut unmatched = Vec::new();
    for &z in outer {
        let nearest = groups
            .iter()
            .enumerate()
            .filter(|(i, _)| supercritical[*i])
            .min_by(|(_, g), (_, h)| cabs(z - g.theta).total_cmp(&cabs(z - h.theta)));
        match nearest {
            Some((i, _)) => clusters[i].push(z),
            None => unmatched.push(z),
        }
    }

    let reports = groups
        .iter()
        .zip(clusters)
        .zip(&supercritical)
        .map(|((g, mut cluster), &sup)| {
            cluster.sort_by(|x, y| cabs(y - g.theta).total_cmp(&cabs(x - g.theta)));
            let expected = if sup { g.multiplicity() } else { 0 };
            let found = cluster.len();
            let mut it = cluster.into_iter();
            let classes = g
                .blocks
                .iter()
                .enumerate()
                .map(|(j, blk)| {
                    let scale = powf(n as f64, 1.0 / (2.0 * blk.p as f64));
                    RateClass {
                        j: j + 1,
                        p: blk.p,
                        beta: blk.beta,
                        points: it
                            .by_ref()
                            .take(blk.p * blk.beta)
                            .map(|lambda| MatchedOutlier {
                                lambda,
                                rescaled: (lambda - g.theta) * scale,
                            })
                            .collect(),
                    }
                })
                .collect();
            GroupReport {
                theta: g.theta,
                supercritical: sup,
                expected,
                found,
                mismatch: found != expected,
                classes,
            }
        })
        .collect();
    OutlierReport {
        n,
        groups: reports,
        unmatched,
        inner_violations: Vec::new(),
    }
}
