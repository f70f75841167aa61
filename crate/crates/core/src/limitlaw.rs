//! Limit laws of the rescaled outliers.
//!
//! The Gaussian vector `m = (m_{k,ℓ})`, indexed by `(i, k, ℓ)` with
//! `k ∈ J(θ_i)` (last columns) and `ℓ ∈ I(θ_i)` (first columns), is circular
//! with covariance
//!
//! `E[m_{k,ℓ} conj(m_{k',ℓ'})] = b²/(θ_i conj(θ_{i'}) − b²) · G₁[k,k'] · G₂[ℓ',ℓ]`
//!
//! where `G₁ = Q⁻¹(Q⁻¹)*` and `G₂ = Q*Q`. For class `(i, j)`,
//! `M = θ (M^IV − M^III (M^I)⁻¹ M^II)` with `M^I = m[K⁻, L⁻]`,
//! `M^II = m[K⁻, L]`, `M^III = m[K, L⁻]`, `M^IV = m[K, L]`, and the limit of
//! the rescaled class is the set of `p`-th roots of the eigenvalues of `M`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::jordan::{indexing, BasisSpec, JordanIndexing, JordanSpec};
use crate::math::{cabs, croots, powf, sqrt};
use crate::matrix::{CMatrix, Lu};
use crate::randmat::complex_gaussian;
use crate::spectra::{eigenvalues, OutlierRow};

/// Diagonal floor, relative to the largest variance, below which the
/// remaining Schur complement is treated as zero.
pub const CHOLESKY_JITTER: f64 = 1e-12;

/// Most negative relative pivot tolerated before declaring `Γ` indefinite.
pub const INDEFINITE_TOL: f64 = 1e-8;

/// Reciprocal condition of `M^I` below which a draw is rejected.
pub const MIN_SCHUR_RCOND: f64 = 1e-12;

/// Tolerance of the orthonormality hypothesis on the Gram products.
pub const HYPOTHESIS_TOL: f64 = 1e-10;

const RESAMPLE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MIndex {
    pub group: usize,
    pub k: usize,
    pub l: usize,
}

/// Covariance of `m` with a cached square-root factor.
#[derive(Debug, Clone)]
pub struct LimitCovariance {
    b: f64,
    idx: JordanIndexing,
    entries: Vec<MIndex>,
    offsets: Vec<usize>,
    gamma: CMatrix,
    factor: CMatrix,
    rank: usize,
}

fn check_supercritical(theta: Complex64, b: f64) -> Result<()> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "outer radius must be positive, got {b}"
        )));
    }
    if cabs(theta) <= b {
        return Err(Error::SpikeBelowRadius {
            modulus: cabs(theta),
            b,
        });
    }
    Ok(())
}

impl LimitCovariance {
    pub fn new(spec: &JordanSpec, basis: &BasisSpec, b: f64) -> Result<Self> {
        if basis.dim() != spec.rank() {
            return Err(Error::Dimension(format!(
                "basis dimension {} differs from Jordan dimension {}",
                basis.dim(),
                spec.rank()
            )));
        }
        for theta in spec.thetas() {
            check_supercritical(theta, b)?;
        }
        let idx = indexing(spec);
        let g1 = basis.left_gram();
        let g2 = basis.right_gram();
        let mut entries = Vec::new();
        let mut offsets = Vec::new();
        for (gi, g) in idx.groups.iter().enumerate() {
            offsets.push(entries.len());
            for &k in &g.last {
                for &l in &g.first {
                    entries.push(MIndex { group: gi, k, l });
                }
            }
        }
        let b2 = b * b;
        let d = entries.len();
        let gamma = CMatrix::from_fn(d, d, |x, y| {
            let (e, f) = (entries[x], entries[y]);
            let th = idx.groups[e.group].theta;
            let th2 = idx.groups[f.group].theta;
            let cauchy = b2 / (th * th2.conj() - b2);
            cauchy * g1[(e.k, f.k)] * g2[(f.l, e.l)]
        });
        let (factor, rank) = pivoted_cholesky(&gamma)?;
        Ok(Self {
            b,
            idx,
            entries,
            offsets,
            gamma,
            factor,
            rank,
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn gamma(&self) -> &CMatrix {
        &self.gamma
    }

    /// `F` with `F F* = Γ` up to the jitter floor.
    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[MIndex] {
        &self.entries
    }

    pub fn indexing(&self) -> &JordanIndexing {
        &self.idx
    }

    /// Position of `m_{k,ℓ}` of group `group` in the vector.
    pub fn position(&self, group: usize, k: usize, l: usize) -> Option<usize> {
        let g = self.idx.groups.get(group)?;
        let kp = g.last.iter().position(|&x| x == k)?;
        let lp = g.first.iter().position(|&x| x == l)?;
        Some(self.offsets[group] + kp * g.first.len() + lp)
    }
}

/// Spec-level alias of [`LimitCovariance::new`].
pub fn covariance_matrix(spec: &JordanSpec, basis: &BasisSpec, b: f64) -> Result<LimitCovariance> {
    LimitCovariance::new(spec, basis, b)
}

/// Diagonally pivoted Cholesky of a Hermitian positive semidefinite matrix.
/// Returns `F = P L` with `F F* ≈ Γ` and the numerical rank.
fn pivoted_cholesky(gamma: &CMatrix) -> Result<(CMatrix, usize)> {
    let d = gamma.rows();
    let mut a = gamma.clone();
    // Symmetrize.
    for i in 0..d {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in 0..i {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let scale = (0..d).map(|i| a[(i, i)].re).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut perm: Vec<usize> = (0..d).collect();
    let mut l = CMatrix::zeros(d, d);
    let mut rank = d;
    for k in 0..d {
        let (p, dmax) = (k..d)
            .map(|i| (i, a[(perm[i], perm[i])].re))
            .fold((k, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if dmax <= CHOLESKY_JITTER * scale {
            let dmin = (k..d).map(|i| a[(perm[i], perm[i])].re).fold(f64::INFINITY, f64::min);
            if dmin < -INDEFINITE_TOL * scale {
                return Err(Error::Indefinite { pivot: dmin / scale });
            }
            rank = k;
            break;
        }
        perm.swap(k, p);
        let pk = perm[k];
        let piv = sqrt(dmax);
        l[(pk, k)] = Complex64::new(piv, 0.0);
        for &pi in &perm[k + 1..] {
            let mut s = a[(pi, pk)];
            for t in 0..k {
                s -= l[(pi, t)] * l[(pk, t)].conj();
            }
            l[(pi, k)] = s / piv;
        }
        for &pi in &perm[k + 1..] {
            let v = l[(pi, k)].norm_sqr();
            a[(pi, pi)] -= v;
        }
    }
    Ok((l, rank))
}

/// One draw of `m`: `F g` with `g` standard circular.
pub fn sample_m_vector<R: Rng + ?Sized>(cov: &LimitCovariance, rng: &mut R) -> Vec<Complex64> {
    let d = cov.dim();
    let g: Vec<Complex64> = (0..cov.rank).map(|_| complex_gaussian(rng)).collect();
    (0..d)
        .map(|i| cov.factor.row(i)[..cov.rank].iter().zip(&g).map(|(a, b)| a * b).sum())
        .collect()
}

/// `M^θ_j` for group `group` and 0-based class `class`.
pub fn build_m(cov: &LimitCovariance, m: &[Complex64], group: usize, class: usize) -> Result<CMatrix> {
    if m.len() != cov.dim() {
        return Err(Error::CountMismatch {
            expected: cov.dim(),
            got: m.len(),
        });
    }
    let g = cov
        .idx
        .groups
        .get(group)
        .ok_or_else(|| Error::InvalidArgument(format!("no group {group}")))?;
    let cl = g
        .classes
        .get(class)
        .ok_or_else(|| Error::InvalidArgument(format!("group {group} has no class {class}")))?;
    let block = |ks: &[usize], ls: &[usize]| {
        CMatrix::from_fn(ks.len(), ls.len(), |a, b| {
            m[cov
                .position(group, ks[a], ls[b])
                .expect("index sets belong to the group")]
        })
    };
    let m4 = block(&cl.k, &cl.l);
    if cl.k_minus.is_empty() {
        return Ok(m4.scale(g.theta));
    }
    let m1 = block(&cl.k_minus, &cl.l_minus);
    let m2 = block(&cl.k_minus, &cl.l);
    let m3 = block(&cl.k, &cl.l_minus);
    let rcond = m1.rcond1();
    if !(rcond >= MIN_SCHUR_RCOND) {
        return Err(Error::Singular(format!("Schur pivot block, rcond {rcond:e}")));
    }
    let x = Lu::factor(&m1)?.solve_matrix(&m2);
    Ok((&m4 - &(&m3 * &x)).scale(g.theta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationClass {
    /// 1-based class index.
    pub j: usize,
    pub p: usize,
    pub beta: usize,
    pub matrix: CMatrix,
    pub eigenvalues: Vec<Complex64>,
    /// All `p`-th roots of each eigenvalue, principal root first.
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationGroup {
    pub theta: Complex64,
    pub classes: Vec<ConstellationClass>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitConstellation {
    pub groups: Vec<ConstellationGroup>,
}

impl LimitConstellation {
    fn from_matrices(thetas: &[Complex64], classes: Vec<Vec<(usize, usize, CMatrix)>>) -> Result<Self> {
        let groups = thetas
            .iter()
            .zip(classes)
            .map(|(&theta, cls)| {
                let classes = cls
                    .into_iter()
                    .enumerate()
                    .map(|(j, (p, beta, matrix))| {
                        let eig = eigenvalues(&matrix)?.eigenvalues;
                        let points = eig.iter().flat_map(|&z| croots(z, p)).collect();
                        Ok(ConstellationClass {
                            j: j + 1,
                            p,
                            beta,
                            matrix,
                            eigenvalues: eig,
                            points,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConstellationGroup { theta, classes })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { groups })
    }

    /// Rows in the outlier CSV schema; `lambda = θ + point · n^{−1/(2p)}`.
    pub fn rows(&self, n: usize) -> Vec<OutlierRow> {
        let mut rows = Vec::new();
        for (gi, g) in self.groups.iter().enumerate() {
            for c in &g.classes {
                let s = powf(n as f64, -1.0 / (2.0 * c.p as f64));
                for &pt in &c.points {
                    rows.push(OutlierRow {
                        group_index: gi + 1,
                        theta: g.theta,
                        rate_class: c.j,
                        p: c.p,
                        lambda: g.theta + pt * s,
                        rescaled: pt,
                    });
                }
            }
        }
        rows
    }
}

/// One joint draw of every `M^θ_j` from a shared `m`, with their roots.
/// Draws whose Schur pivot block is numerically singular are redrawn.
pub fn sample_constellation<R: Rng + ?Sized>(cov: &LimitCovariance, rng: &mut R) -> Result<LimitConstellation> {
    let thetas: Vec<Complex64> = cov.idx.groups.iter().map(|g| g.theta).collect();
    for _ in 0..RESAMPLE_LIMIT {
        let m = sample_m_vector(cov, rng);
        let mut all = Vec::with_capacity(thetas.len());
        let mut singular = false;
        'groups: for (gi, g) in cov.idx.groups.iter().enumerate() {
            let mut cls = Vec::with_capacity(g.classes.len());
            for (ci, c) in g.classes.iter().enumerate() {
                match build_m(cov, &m, gi, ci) {
                    Ok(mat) => cls.push((c.p, c.beta, mat)),
                    Err(Error::Singular(_)) => {
                        singular = true;
                        break 'groups;
                    }
                    Err(e) => return Err(e),
                }
            }
            all.push(cls);
        }
        if !singular {
            return LimitConstellation::from_matrices(&thetas, all);
        }
    }
    Err(Error::Singular("Schur pivot block singular in every redraw".into()))
}

/// The limit law when the Gram products are orthonormal: each `M^θ_j` is a
/// scaled Ginibre matrix or Ginibre Schur complement.
#[derive(Debug, Clone, PartialEq)]
pub struct GinibreCaseLaw {
    groups: Vec<GinibreGroup>,
}

#[derive(Debug, Clone, PartialEq)]
struct GinibreGroup {
    theta: Complex64,
    scale: Complex64,
    /// `(p, β, ρ)` per class.
    classes: Vec<(usize, usize, usize)>,
}

/// Checks `G₁[k,k'] · G₂[ℓ',ℓ] = 1{k=k', ℓ=ℓ'}` over all index quadruples
/// and returns the Ginibre description.
pub fn ginibre_case_law(spec: &JordanSpec, basis: &BasisSpec, b: f64) -> Result<GinibreCaseLaw> {
    if basis.dim() != spec.rank() {
        return Err(Error::Dimension("basis and Jordan data differ in dimension".into()));
    }
    for theta in spec.thetas() {
        check_supercritical(theta, b)?;
    }
    let idx = indexing(spec);
    let g1 = basis.left_gram();
    let g2 = basis.right_gram();
    let ks: Vec<usize> = idx.groups.iter().flat_map(|g| g.last.iter().copied()).collect();
    let ls: Vec<usize> = idx.groups.iter().flat_map(|g| g.first.iter().copied()).collect();
    for &k in &ks {
        for &k2 in &ks {
            for &l in &ls {
                for &l2 in &ls {
                    let want = if k == k2 && l == l2 { 1.0 } else { 0.0 };
                    let got = g1[(k, k2)] * g2[(l2, l)];
                    if cabs(got - want) > HYPOTHESIS_TOL {
                        return Err(Error::Hypothesis(format!(
                            "Gram product at (k={k}, l={l}, k'={k2}, l'={l2}) is {got}, expected {want}; \
                             use the general constellation sampler"
                        )));
                    }
                }
            }
        }
    }
    let groups = spec
        .groups()
        .iter()
        .map(|g| {
            let t = g.theta;
            let scale = t * b / sqrt(t.norm_sqr() - b * b);
            let mut rho = 0;
            let classes = g
                .blocks
                .iter()
                .map(|blk| {
                    let c = (blk.p, blk.beta, rho);
                    rho += blk.beta;
                    c
                })
                .collect();
            GinibreGroup {
                theta: t,
                scale,
                classes,
            }
        })
        .collect();
    Ok(GinibreCaseLaw { groups })
}

fn ginibre_block<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

impl GinibreCaseLaw {
    /// `θb/√(|θ|²−b²)` per group.
    pub fn scales(&self) -> Vec<Complex64> {
        self.groups.iter().map(|g| g.scale).collect()
    }

    /// Independent draws of every `M^θ_j`, by group then class.
    pub fn sample_matrices<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Vec<CMatrix>>> {
        self.groups
            .iter()
            .map(|g| {
                g.classes
                    .iter()
                    .map(|&(_, beta, rho)| {
                        for _ in 0..RESAMPLE_LIMIT {
                            let g4 = ginibre_block(beta, beta, rng);
                            if rho == 0 {
                                return Ok(g4.scale(g.scale));
                            }
                            let g1 = ginibre_block(rho, rho, rng);
                            let g2 = ginibre_block(rho, beta, rng);
                            let g3 = ginibre_block(beta, rho, rng);
                            if !(g1.rcond1() >= MIN_SCHUR_RCOND) {
                                continue;
                            }
                            let x = Lu::factor(&g1)?.solve_matrix(&g2);
                            return Ok((&g4 - &(&g3 * &x)).scale(g.scale));
                        }
                        Err(Error::Singular("Ginibre pivot block singular in every redraw".into()))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LimitConstellation> {
        let mats = self.sample_matrices(rng)?;
        let thetas: Vec<Complex64> = self.groups.iter().map(|g| g.theta).collect();
        let classes = self
            .groups
            .iter()
            .zip(mats)
            .map(|(g, ms)| {
                g.classes
                    .iter()
                    .zip(ms)
                    .map(|(&(p, beta, _), m)| (p, beta, m))
                    .collect()
            })
            .collect();
        LimitConstellation::from_matrices(&thetas, classes)
    }
}

/// `b²/(|θ|²(|θ|²−b²))`.
pub fn single_block_variance(theta: Complex64, b: f64) -> Result<f64> {
    check_supercritical(theta, b)?;
    let t2 = theta.norm_sqr();
    Ok(b * b / (t2 * (t2 - b * b)))
}

/// `E|θ m_{k,ℓ}|² = |θ|² b²/(|θ|²−b²)` for an orthonormal basis: the variance
/// of the `p`-th power of the rescaled outliers of a single block.
pub fn power_variance(theta: Complex64, b: f64) -> Result<f64> {
    check_supercritical(theta, b)?;
    let t2 = theta.norm_sqr();
    Ok(t2 * b * b / (t2 - b * b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseCovariance {
    /// `G₁[k,k'] · G₂[ℓ',ℓ]`.
    pub k: Complex64,
    pub sigma2: f64,
    pub sigma2_prime: f64,
    /// `E[Z conj(Z')]`.
    pub cross: Complex64,
}

/// Limit covariance of `Z = √n(λ̃−θ)^p` and `Z'` for two groups whose first
/// class is a single block. `k` is the last and `ℓ` the first column of
/// that block.
pub fn pairwise_outlier_covariance(
    spec: &JordanSpec,
    basis: &BasisSpec,
    b: f64,
    group: usize,
    other: usize,
) -> Result<PairwiseCovariance> {
    if group == other {
        return Err(Error::InvalidArgument("the two groups must differ".into()));
    }
    if basis.dim() != spec.rank() {
        return Err(Error::Dimension("basis and Jordan data differ in dimension".into()));
    }
    let idx = indexing(spec);
    let pick = |gi: usize| -> Result<(Complex64, usize, usize)> {
        let g = idx
            .groups
            .get(gi)
            .ok_or_else(|| Error::InvalidArgument(format!("no group {gi}")))?;
        let c = &g.classes[0];
        if c.beta != 1 {
            return Err(Error::InvalidArgument(format!(
                "group {gi}: the largest block must have multiplicity one"
            )));
        }
        check_supercritical(g.theta, b)?;
        Ok((g.theta, c.k[0], c.l[0]))
    };
    let (t1, k1, l1) = pick(group)?;
    let (t2, k2, l2) = pick(other)?;
    let g1 = basis.left_gram();
    let g2 = basis.right_gram();
    let b2 = b * b;
    let var = |t: Complex64, k: usize, l: usize| {
        let m2 = t.norm_sqr();
        m2 * b2 / (m2 - b2) * (g1[(k, k)] * g2[(l, l)]).re
    };
    let kk = g1[(k1, k2)] * g2[(l2, l1)];
    let tt = t1 * t2.conj();
    Ok(PairwiseCovariance {
        k: kk,
        sigma2: var(t1, k1, l1),
        sigma2_prime: var(t2, k2, l2),
        cross: tt * b2 * kk / (tt - b2),
    })
}

/// `E|Z|²` for one group whose first class is a single block, with `Z` the
/// limit of `√n(λ̃−θ)^p`.
pub fn outlier_power_variance(spec: &JordanSpec, basis: &BasisSpec, b: f64, group: usize) -> Result<f64> {
    if basis.dim() != spec.rank() {
        return Err(Error::Dimension("basis and Jordan data differ in dimension".into()));
    }
    let idx = indexing(spec);
    let g = idx
        .groups
        .get(group)
        .ok_or_else(|| Error::InvalidArgument(format!("no group {group}")))?;
    let c = &g.classes[0];
    if c.beta != 1 {
        return Err(Error::InvalidArgument(format!(
            "group {group}: the largest block must have multiplicity one"
        )));
    }
    check_supercritical(g.theta, b)?;
    let (k, l) = (c.k[0], c.l[0]);
    let m2 = g.theta.norm_sqr();
    Ok(m2 * b * b / (m2 - b * b) * (basis.left_gram()[(k, k)] * basis.right_gram()[(l, l)]).re)
}

/// Covariance of a vector from samples: `(E[x x*], E[x xᵀ])` with the mean
/// assumed zero.
pub fn empirical_second_moments(samples: &[Vec<Complex64>]) -> (CMatrix, CMatrix) {
    let d = samples.first().map_or(0, Vec::len);
    let mut cov = CMatrix::zeros(d, d);
    let mut pseudo = CMatrix::zeros(d, d);
    for s in samples {
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += s[i] * s[j].conj();
                pseudo[(i, j)] += s[i] * s[j];
            }
        }
    }
    let inv = 1.0 / samples.len().max(1) as f64;
    (
        cov.scale(Complex64::new(inv, 0.0)),
        pseudo.scale(Complex64::new(inv, 0.0)),
    )
}
