//! Exact unitary Weingarten calculus.
//!
//! `Wg(·, n)` is the inverse of `Φ(σ) = n^{#cycles(σ)}` in the group algebra
//! of `S_k`. `Φ` is central, so `Wg` is a class function, and the system
//! `Σ_τ Φ(σ⁻¹τ) Wg(τ) = δ_{σ,id}` reduces to one equation per cycle type.
//! The reduced system is solved in exact rational arithmetic.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Largest supported order `k`.
pub const MAX_ORDER: usize = 7;

/// A permutation of `{0, …, k−1}`, stored as its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return Err(Error::InvalidArgument(format!(
                    "{images:?} is not a permutation of 0..{k}"
                )));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            images: (0..k).collect(),
        }
    }

    /// The transposition of `a` and `b` in `S_k`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(k);
        p.images.swap(a, b);
        p
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Perm { images: inv }
    }

    /// Cycle lengths in nonincreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        cycle_type(&self.images)
    }

    pub fn num_cycles(&self) -> usize {
        num_cycles(&self.images)
    }

    /// `|σ| = k − #cycles(σ)`: minimal number of transpositions.
    pub fn length(&self) -> usize {
        self.order() - self.num_cycles()
    }
}

fn num_cycles(images: &[usize]) -> usize {
    let mut seen = [false; 64];
    let mut count = 0;
    for start in 0..images.len() {
        if !seen[start] {
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = images[x];
            }
        }
    }
    count
}

fn cycle_type(images: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; images.len()];
    let mut lens = Vec::new();
    for start in 0..images.len() {
        if !seen[start] {
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = images[x];
                len += 1;
            }
            lens.push(len);
        }
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

/// All permutations of `S_k` in lexicographic order.
pub fn all_perms(k: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(Perm { images: cur.clone() });
        // Next lexicographic permutation.
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn pow_int(n: usize, e: usize) -> BigInt {
    let mut acc = BigInt::one();
    let base = BigInt::from(n);
    for _ in 0..e {
        acc *= &base;
    }
    acc
}

/// Exact Weingarten values of order `k` at dimension `n`, by cycle type.
#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenTable {
    k: usize,
    n: usize,
    values: BTreeMap<Vec<usize>, BigRational>,
}

impl WeingartenTable {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k > MAX_ORDER {
            return Err(Error::OrderCap { k, max: MAX_ORDER });
        }
        if n < k || n == 0 {
            return Err(Error::DimensionTooSmall { n, k });
        }
        if k == 0 {
            let mut values = BTreeMap::new();
            values.insert(Vec::new(), BigRational::one());
            return Ok(Self { k, n, values });
        }
        let perms = all_perms(k);
        let types: Vec<Vec<usize>> = perms.iter().map(Perm::cycle_type).collect();
        let mut classes: Vec<Vec<usize>> = types.clone();
        classes.sort();
        classes.dedup();
        let class_of = |t: &Vec<usize>| classes.binary_search(t).unwrap();
        let m = classes.len();

        // a[λ][μ] = Σ_{τ ∈ C_μ} n^{#cycles(σ_λ⁻¹ τ)} for a representative σ_λ.
        let mut a = vec![vec![BigRational::zero(); m + 1]; m];
        let powers: Vec<BigInt> = (0..=k).map(|e| pow_int(n, e)).collect();
        for (row, class) in classes.iter().enumerate() {
            let rep = perms
                .iter()
                .zip(&types)
                .find(|(_, t)| *t == class)
                .map(|(p, _)| p.inverse())
                .unwrap();
            let mut acc = vec![BigInt::zero(); m];
            for (tau, t) in perms.iter().zip(&types) {
                let c = num_cycles(&rep.compose(tau).images);
                acc[class_of(t)] += &powers[c];
            }
            for (col, v) in acc.into_iter().enumerate() {
                a[row][col] = BigRational::from_integer(v);
            }
            if class.iter().all(|&l| l == 1) {
                a[row][m] = BigRational::one();
            }
        }
        let sol = solve_rational(a)?;
        let values = classes.into_iter().zip(sol).collect();
        Ok(Self { k, n, values })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, sigma: &Perm) -> &BigRational {
        assert_eq!(sigma.order(), self.k, "permutation order must match the table");
        &self.values[&sigma.cycle_type()]
    }

    pub fn by_cycle_type(&self, cycle_type: &[usize]) -> Option<&BigRational> {
        self.values.get(cycle_type)
    }

    /// `(cycle type, Wg)` pairs ordered by cycle type.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &BigRational)> {
        self.values.iter()
    }

    /// Residual of the defining relation `Σ_τ n^{#cycles(σ⁻¹τ)} Wg(τ) − δ_{σ,id}`
    /// for every `σ ∈ S_k`; all zero for a correct table.
    pub fn gram_residuals(&self) -> Vec<BigRational> {
        let perms = all_perms(self.k);
        let wg: Vec<&BigRational> = perms.iter().map(|t| self.get(t)).collect();
        let powers: Vec<BigInt> = (0..=self.k).map(|e| pow_int(self.n, e)).collect();
        perms
            .iter()
            .map(|sigma| {
                let inv = sigma.inverse();
                let mut sum = BigRational::zero();
                for (tau, w) in perms.iter().zip(&wg) {
                    let c = num_cycles(&inv.compose(tau).images);
                    sum += *w * BigRational::from_integer(powers[c].clone());
                }
                if sigma.length() == 0 {
                    sum -= BigRational::one();
                }
                sum
            })
            .collect()
    }

    /// Exact `E[u_{i₁j₁}⋯u_{i_k j_k} · conj(u_{i'₁j'₁}⋯u_{i'_k j'_k})]`.
    pub fn moment(&self, rows: &[usize], cols: &[usize], rows_c: &[usize], cols_c: &[usize]) -> Result<BigRational> {
        let k = self.k;
        for s in [rows, cols, rows_c, cols_c] {
            if s.len() != k {
                return Err(Error::CountMismatch {
                    expected: k,
                    got: s.len(),
                });
            }
            if let Some(&bad) = s.iter().find(|&&x| x >= self.n) {
                return Err(Error::InvalidArgument(format!(
                    "index {bad} out of range for dimension {}",
                    self.n
                )));
            }
        }
        let sigmas = matchings(rows, rows_c);
        let taus = matchings(cols, cols_c);
        if sigmas.is_empty() || taus.is_empty() {
            return Ok(BigRational::zero());
        }
        // Count pairs per class of σ τ⁻¹, then weight once per class.
        let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        let tau_invs: Vec<Perm> = taus.iter().map(Perm::inverse).collect();
        for s in &sigmas {
            for ti in &tau_invs {
                *counts.entry(cycle_type(&s.compose(ti).images)).or_default() += 1;
            }
        }
        let mut total = BigRational::zero();
        for (ct, count) in counts {
            total += &self.values[&ct] * BigRational::from_integer(BigInt::from(count));
        }
        Ok(total)
    }
}

/// Permutations `σ` with `a[x] = b[σ(x)]` for every `x`.
fn matchings(a: &[usize], b: &[usize]) -> Vec<Perm> {
    fn rec(a: &[usize], b: &[usize], used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Perm>) {
        let x = cur.len();
        if x == a.len() {
            out.push(Perm { images: cur.clone() });
            return;
        }
        for y in 0..b.len() {
            if !used[y] && b[y] == a[x] {
                used[y] = true;
                cur.push(y);
                rec(a, b, used, cur, out);
                cur.pop();
                used[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(a, b, &mut vec![false; b.len()], &mut Vec::new(), &mut out);
    out
}

/// Gauss–Jordan elimination on an augmented `m × (m+1)` rational system.
fn solve_rational(mut a: Vec<Vec<BigRational>>) -> Result<Vec<BigRational>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Singular("Weingarten class system".into()))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut().skip(col) {
            *x *= &inv;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&prow).skip(col) {
                    *x -= &f * p;
                }
            }
        }
    }
    Ok(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// `Wg(σ, n)` as an exact rational.
pub fn weingarten(sigma: &Perm, n: usize) -> Result<BigRational> {
    Ok(WeingartenTable::new(sigma.order(), n)?.get(sigma).clone())
}

/// Exact Haar moment `E[Π u_{rows[a], cols[a]} · Π conj(u_{rows_c[a], cols_c[a]})]`
/// for `0`-based indices below `n`.
pub fn unitary_moment(
    rows: &[usize],
    cols: &[usize],
    rows_c: &[usize],
    cols_c: &[usize],
    n: usize,
) -> Result<BigRational> {
    WeingartenTable::new(rows.len(), n)?.moment(rows, cols, rows_c, cols_c)
}

/// Converts an exact value to the nearest `f64`.
pub fn to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        return v;
    }
    let (num, den) = (x.numer().abs(), x.denom().clone());
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    sign * num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY)
}

/// Traits of the four-matrix trace closed form, over any scalar field.
pub trait TraceScalar:
    Clone
    + core::ops::Add<Output = Self>
    + core::ops::Sub<Output = Self>
    + core::ops::Mul<Output = Self>
    + core::ops::Div<Output = Self>
{
    fn from_usize(n: usize) -> Self;
}

impl TraceScalar for Complex64 {
    fn from_usize(n: usize) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

impl TraceScalar for BigRational {
    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Dense square matrix over a [`TraceScalar`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: TraceScalar> SquareMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn trace(&self) -> T {
        (1..self.n).fold(self.get(0, 0).clone(), |acc, i| acc + self.get(i, i).clone())
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> T {
        let mut acc = T::from_usize(0);
        for i in 0..self.n {
            for j in 0..self.n {
                acc = acc + self.get(i, j).clone() * other.get(j, i).clone();
            }
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| {
            let mut acc = T::from_usize(0);
            for l in 0..self.n {
                acc = acc + self.get(i, l).clone() * other.get(l, j).clone();
            }
            acc
        })
    }
}

/// `E Tr(A V B V* C V D V*)` for Haar `V`, from eight traces.
pub fn four_trace_closed_form<T: TraceScalar>(
    a: &SquareMatrix<T>,
    b: &SquareMatrix<T>,
    c: &SquareMatrix<T>,
    d: &SquareMatrix<T>,
) -> Result<T> {
    let n = a.dim();
    if [b.dim(), c.dim(), d.dim()].iter().any(|&m| m != n) || n == 0 {
        return Err(Error::Dimension("four matrices of equal positive size required".into()));
    }
    if n == 1 {
        // V is a phase and cancels.
        return Ok(a.get(0, 0).clone() * b.get(0, 0).clone() * c.get(0, 0).clone() * d.get(0, 0).clone());
    }
    let (tr_ac, tr_bd) = (a.trace_product(c), b.trace_product(d));
    let (tr_a, tr_b, tr_c, tr_d) = (a.trace(), b.trace(), c.trace(), d.trace());
    let nn = T::from_usize(n);
    let n2m1 = T::from_usize(n * n - 1);
    let first = tr_ac.clone() * tr_b.clone() * tr_d.clone() + tr_a.clone() * tr_c.clone() * tr_bd.clone();
    let second = tr_ac * tr_bd + tr_a * tr_c * tr_b * tr_d;
    Ok(first / n2m1.clone() - second / (nn * n2m1))
}

/// [`four_trace_closed_form`] for complex matrices.
pub fn four_trace_expectation(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Result<Complex64> {
    let conv = |m: &CMatrix| -> Result<SquareMatrix<Complex64>> {
        if !m.is_square() {
            return Err(Error::Dimension("square matrices required".into()));
        }
        Ok(SquareMatrix::from_fn(m.rows(), |i, j| m[(i, j)]))
    };
    four_trace_closed_form(&conv(a)?, &conv(b)?, &conv(c)?, &conv(d)?)
}

/// The same expectation by brute-force Weingarten expansion over indices:
/// `Tr(A V B V* C V D V*) = Σ A_{ab} B_{cd} C_{ef} D_{gh} V_{bc} V_{fg} conj(V_{ed} V_{ah})`.
pub fn four_trace_by_expansion(
    a: &SquareMatrix<BigRational>,
    b: &SquareMatrix<BigRational>,
    c: &SquareMatrix<BigRational>,
    d: &SquareMatrix<BigRational>,
) -> Result<BigRational> {
    let n = a.dim();
    let table = WeingartenTable::new(2, n)?;
    let mut total = BigRational::zero();
    // Nonzero moments need {e, a} = {b, f} and {d, h} = {c, g} as multisets.
    for bi in 0..n {
        for fi in 0..n {
            let row_choices = distinct_orders(bi, fi);
            for ci in 0..n {
                for gi in 0..n {
                    let col_choices = distinct_orders(ci, gi);
                    for &(ei, ai) in &row_choices {
                        for &(di, hi) in &col_choices {
                            let w = table.moment(&[bi, fi], &[ci, gi], &[ei, ai], &[di, hi])?;
                            if w.is_zero() {
                                continue;
                            }
                            let coef = a.get(ai, bi).clone()
                                * b.get(ci, di).clone()
                                * c.get(ei, fi).clone()
                                * d.get(gi, hi).clone();
                            total += coef * w;
                        }
                    }
                }
            }
        }
    }
    Ok(total)
}

fn distinct_orders(x: usize, y: usize) -> Vec<(usize, usize)> {
    if x == y {
        vec![(x, y)]
    } else {
        vec![(x, y), (y, x)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn perm_basics() {
        let p = Perm::new(vec![1, 2, 0, 3]).unwrap();
        assert_eq!(p.cycle_type(), vec![3, 1]);
        assert_eq!(p.length(), 2);
        assert_eq!(p.compose(&p.inverse()), Perm::identity(4));
        assert!(Perm::new(vec![0, 0]).is_err());
        assert_eq!(all_perms(4).len(), 24);
    }

    #[test]
    fn order_one_is_reciprocal() {
        for n in 1..6 {
            assert_eq!(weingarten(&Perm::identity(1), n).unwrap(), q(1, n as i64));
        }
    }

    #[test]
    fn order_two_closed_forms() {
        for n in 2..9i64 {
            let t = WeingartenTable::new(2, n as usize).unwrap();
            assert_eq!(t.get(&Perm::identity(2)), &q(1, n * n - 1));
            assert_eq!(t.get(&Perm::transposition(2, 0, 1)), &q(-1, n * (n * n - 1)));
            let fourth = t.get(&Perm::identity(2)) * q(2, 1) + t.get(&Perm::transposition(2, 0, 1)) * q(2, 1);
            assert_eq!(fourth, q(2, n * (n + 1)));
        }
        let t = WeingartenTable::new(2, 5).unwrap();
        assert_eq!(t.get(&Perm::identity(2)).to_string(), "1/24");
        assert_eq!(t.get(&Perm::transposition(2, 0, 1)).to_string(), "-1/120");
    }

    #[test]
    fn guards() {
        assert!(matches!(WeingartenTable::new(8, 10), Err(Error::OrderCap { .. })));
        assert!(matches!(
            WeingartenTable::new(3, 2),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn gram_relation_is_exact() {
        for k in 1..=4 {
            for n in [k, k + 1, 10] {
                let t = WeingartenTable::new(k, n).unwrap();
                assert!(t.gram_residuals().iter().all(Zero::is_zero), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn leading_order_of_identity() {
        for k in 1..=4usize {
            for n in [50usize, 100] {
                let t = WeingartenTable::new(k, n).unwrap();
                let scaled = to_f64(t.get(&Perm::identity(k))) * (n as f64).powi(k as i32);
                assert!(
                    (scaled - 1.0).abs() <= (k * k * k) as f64 / (n * n) as f64,
                    "k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn classical_moments() {
        let n = 4usize;
        let ni = n as i64;
        assert_eq!(unitary_moment(&[0], &[0], &[0], &[0], n).unwrap(), q(1, ni));
        assert_eq!(
            unitary_moment(&[1, 1], &[2, 2], &[1, 1], &[2, 2], n).unwrap(),
            q(2, ni * (ni + 1))
        );
        // Same row, distinct columns.
        assert_eq!(
            unitary_moment(&[0, 0], &[1, 2], &[0, 0], &[1, 2], n).unwrap(),
            q(1, ni * (ni + 1))
        );
        // Distinct rows, distinct columns.
        assert_eq!(
            unitary_moment(&[0, 3], &[1, 2], &[0, 3], &[1, 2], n).unwrap(),
            q(1, ni * ni - 1)
        );
        // E[v_ac conj(v_ad) v_bd conj(v_bc)].
        assert_eq!(
            unitary_moment(&[0, 1], &[2, 3], &[0, 1], &[3, 2], n).unwrap(),
            q(-1, ni * (ni * ni - 1))
        );
        assert!(unitary_moment(&[0, 1], &[0, 0], &[0, 0], &[0, 0], n).unwrap().is_zero());
    }

    #[test]
    fn moment_symmetries() {
        let t = WeingartenTable::new(3, 4).unwrap();
        let (r, c, rc, cc) = ([0, 1, 1], [2, 0, 3], [1, 0, 1], [3, 2, 0]);
        let base = t.moment(&r, &c, &rc, &cc).unwrap();
        let perm = [2usize, 0, 1];
        let pr = |s: &[usize; 3]| [s[perm[0]], s[perm[1]], s[perm[2]]];
        assert_eq!(t.moment(&pr(&r), &pr(&c), &rc, &cc).unwrap(), base);
        assert_eq!(t.moment(&rc, &cc, &r, &c).unwrap(), base);
    }

    #[test]
    fn four_trace_identity_and_rank_one() {
        for n in 1..6 {
            let id = SquareMatrix::from_fn(n, |i, j| if i == j { q(1, 1) } else { q(0, 1) });
            assert_eq!(four_trace_closed_form(&id, &id, &id, &id).unwrap(), q(n as i64, 1));
        }
        let n = 4;
        let e11 = SquareMatrix::from_fn(n, |i, j| if i == 0 && j == 0 { q(1, 1) } else { q(0, 1) });
        let id = SquareMatrix::from_fn(n, |i, j| if i == j { q(1, 1) } else { q(0, 1) });
        assert_eq!(four_trace_closed_form(&e11, &id, &e11, &id).unwrap(), q(1, 1));
    }

    #[test]
    fn four_trace_matches_expansion_small() {
        let n = 3;
        let mk = |s: i64| {
            SquareMatrix::from_fn(n, |i, j| {
                q(((i * 7 + j * 3) as i64 * s) % 11 - 5, 1 + (i + j) as i64 % 3)
            })
        };
        let (a, b, c, d) = (mk(1), mk(2), mk(3), mk(5));
        assert_eq!(
            four_trace_closed_form(&a, &b, &c, &d).unwrap(),
            four_trace_by_expansion(&a, &b, &c, &d).unwrap()
        );
    }
}
