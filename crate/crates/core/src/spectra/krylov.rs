//! Outer eigenvalues of an implicit operator by Arnoldi iteration.
//!
//! The basis is orthogonalized with classical Gram–Schmidt applied twice.
//! At each checkpoint the Ritz values of the projected Hessenberg matrix are
//! computed; a Ritz pair `(θ, Vs)` is accepted when its residual
//! `|h_{m+1,m}|·|s_m|/‖s‖` is below `tol · ‖H_m‖_F`. The search stops once
//! every Ritz value beyond the radius is accepted and that set is unchanged
//! from the previous checkpoint.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::math::{cabs, sqrt};
use crate::matrix::{CMatrix, Lu};
use crate::randmat::{complex_gaussian_vec, IsotropicOperator};

use super::dense::{eigenvalues_in_place, hessenberg_qr};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A square linear map applied out of place.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y ← M x`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl LinearOperator for CMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (yi, row) in y.iter_mut().zip(self.as_slice().chunks_exact(self.cols())) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

impl LinearOperator for IsotropicOperator {
    fn dim(&self) -> usize {
        IsotropicOperator::dim(self)
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.copy_from_slice(x);
        IsotropicOperator::apply(self, y);
    }
}

/// `M + B C` with `B` of size `n × r` and `C` of size `r × n`.
#[derive(Debug, Clone, Copy)]
pub struct LowRankUpdate<'a, M: ?Sized> {
    pub base: &'a M,
    pub b: &'a CMatrix,
    pub c: &'a CMatrix,
}

impl<M: LinearOperator + ?Sized> LinearOperator for LowRankUpdate<'_, M> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.base.apply(x, y);
        let cx = self.c.matvec(x);
        for (yi, row) in y.iter_mut().zip(self.b.as_slice().chunks_exact(self.b.cols())) {
            *yi += row.iter().zip(&cx).map(|(a, b)| a * b).sum::<Complex64>();
        }
    }
}

/// Operators with a cheap exact inverse.
pub trait InvertibleOperator: LinearOperator {
    /// `x ← M⁻¹ x`.
    fn apply_inverse(&self, x: &mut [Complex64]);
}

impl InvertibleOperator for IsotropicOperator {
    fn apply_inverse(&self, x: &mut [Complex64]) {
        IsotropicOperator::apply_inverse(self, x);
    }
}

/// `(M + BC)⁻¹ = M⁻¹ − Y (I_r + C Y)⁻¹ C M⁻¹` with `Y = M⁻¹ B`.
#[derive(Debug, Clone)]
pub struct SpikedInverse<'a, M: ?Sized> {
    base: &'a M,
    y: CMatrix,
    c: &'a CMatrix,
    capacitance: Lu,
}

impl<'a, M: InvertibleOperator + ?Sized> SpikedInverse<'a, M> {
    pub fn new(base: &'a M, b: &CMatrix, c: &'a CMatrix) -> Result<Self> {
        let n = base.dim();
        let r = b.cols();
        let mut y = CMatrix::zeros(n, r);
        for j in 0..r {
            let mut col = b.column(j);
            base.apply_inverse(&mut col);
            y.set_column(j, &col);
        }
        let k = &CMatrix::identity(r) + &(c * &y);
        let capacitance = Lu::factor(&k)?;
        capacitance.check_nonsingular(super::SINGULAR_PIVOT_RATIO)?;
        Ok(Self {
            base,
            y,
            c,
            capacitance,
        })
    }
}

impl<M: InvertibleOperator + ?Sized> LinearOperator for SpikedInverse<'_, M> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(x);
        self.base.apply_inverse(out);
        let mut t = self.c.matvec(out);
        self.capacitance.solve_in_place(&mut t);
        for (o, row) in out.iter_mut().zip(self.y.as_slice().chunks_exact(self.y.cols().max(1))) {
            *o -= row.iter().zip(&t).map(|(a, b)| a * b).sum::<Complex64>();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Basis size at the first checkpoint.
    pub start_dim: usize,
    /// Basis growth between checkpoints.
    pub step: usize,
    /// Largest basis size.
    pub max_dim: usize,
    /// Relative residual accepting a Ritz pair.
    pub tol: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            start_dim: 40,
            step: 20,
            max_dim: 200,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovOutcome {
    /// Accepted Ritz values with modulus above the radius.
    pub eigenvalues: Vec<Complex64>,
    /// Whether every Ritz value beyond the radius was accepted and stable.
    pub converged: bool,
    pub basis_dim: usize,
}

/// Eigenvalues of `op` with modulus greater than `radius`.
pub fn outer_eigenvalues<M, R>(op: &M, radius: f64, opts: &KrylovOptions, rng: &mut R) -> Result<KrylovOutcome>
where
    M: LinearOperator + ?Sized,
    R: Rng + ?Sized,
{
    let n = op.dim();
    let max_dim = opts.max_dim.min(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_dim + 1);
    // Column-major (max_dim + 1) × max_dim Hessenberg coefficients.
    let mut hcols: Vec<Vec<Complex64>> = Vec::with_capacity(max_dim);

    let mut v0 = complex_gaussian_vec(rng, n);
    let nrm = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= nrm);
    basis.push(v0);

    let mut w = vec![ZERO; n];
    let mut checkpoint = opts.start_dim.min(max_dim).max(1);
    let mut previous: Option<Vec<Complex64>> = None;
    let mut last = KrylovOutcome {
        eigenvalues: Vec::new(),
        converged: false,
        basis_dim: 0,
    };

    for m in 0..max_dim {
        op.apply(&basis[m], &mut w);
        let mut hcol = vec![ZERO; m + 2];
        for _ in 0..2 {
            for (j, v) in basis.iter().enumerate() {
                let d: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                hcol[j] += d;
                for (x, vj) in w.iter_mut().zip(v) {
                    *x -= d * vj;
                }
            }
        }
        let beta = norm(&w);
        hcol[m + 1] = Complex64::new(beta, 0.0);
        hcols.push(hcol);
        let dim = m + 1;
        let breakdown = beta <= f64::EPSILON * frob(&hcols);

        if dim == checkpoint || dim == max_dim || breakdown {
            let outcome = ritz_check(&hcols, dim, radius, opts.tol, breakdown)?;
            let stable = previous
                .as_ref()
                .is_some_and(|p| same_set(p, &outcome.eigenvalues, sqrt(opts.tol)));
            let done = breakdown || (outcome.converged && stable);
            previous = Some(outcome.eigenvalues.clone());
            last = KrylovOutcome {
                converged: outcome.converged && (stable || breakdown),
                ..outcome
            };
            if done {
                return Ok(last);
            }
            checkpoint = (checkpoint + opts.step).min(max_dim);
        }
        if dim == max_dim {
            break;
        }
        let inv = 1.0 / beta;
        basis.push(w.iter().map(|x| x * inv).collect());
    }
    Ok(last)
}

fn ritz_check(hcols: &[Vec<Complex64>], m: usize, radius: f64, tol: f64, exact: bool) -> Result<KrylovOutcome> {
    let hm = CMatrix::from_fn(m, m, |i, j| hcols[j].get(i).copied().unwrap_or(ZERO));
    let h_next = hcols[m - 1][m].re;
    let hnorm = hm.frobenius().max(f64::MIN_POSITIVE);
    let mut work = hm.as_slice().to_vec();
    let ritz = match hessenberg_qr(&mut work, m) {
        Ok(r) => r,
        Err(_) => {
            let mut again = hm.as_slice().to_vec();
            eigenvalues_in_place(&mut again, m)?
        }
    };
    let mut accepted = Vec::new();
    let mut converged = true;
    for theta in ritz.into_iter().filter(|t| cabs(*t) > radius) {
        let resid = if exact {
            0.0
        } else {
            let s = ritz_vector(&hm, theta, hnorm);
            h_next.abs() * cabs(s[m - 1])
        };
        if resid <= tol * hnorm {
            accepted.push(theta);
        } else {
            converged = false;
        }
    }
    Ok(KrylovOutcome {
        eigenvalues: accepted,
        converged,
        basis_dim: m,
    })
}

/// Unit eigenvector of `h` for the Ritz value `theta`, by inverse iteration.
fn ritz_vector(h: &CMatrix, theta: Complex64, hnorm: f64) -> Vec<Complex64> {
    let m = h.rows();
    let mut shifted = h.clone();
    let nudge = Complex64::new(hnorm * 1e-14, hnorm * 1e-14);
    for i in 0..m {
        shifted[(i, i)] -= theta + nudge;
    }
    let Ok(lu) = Lu::factor(&shifted) else {
        return vec![ZERO; m];
    };
    let mut s: Vec<Complex64> = (0..m)
        .map(|i| Complex64::new(1.0, 0.5 * (i as f64 + 1.0).recip()))
        .collect();
    for _ in 0..3 {
        lu.solve_in_place(&mut s);
        let nrm = norm(&s);
        if !(nrm.is_finite() && nrm > 0.0) {
            return vec![ZERO; m];
        }
        s.iter_mut().for_each(|x| *x /= nrm);
    }
    s
}

fn same_set(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let scale = tol * (1.0 + cabs(*x));
        match (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| cabs(b[i] - x).total_cmp(&cabs(b[j] - x)))
        {
            Some(j) if cabs(b[j] - x) <= scale => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

fn norm(x: &[Complex64]) -> f64 {
    sqrt(x.iter().map(|z| z.norm_sqr()).sum())
}

fn frob(cols: &[Vec<Complex64>]) -> f64 {
    sqrt(cols.iter().flatten().map(|z| z.norm_sqr()).sum())
}
