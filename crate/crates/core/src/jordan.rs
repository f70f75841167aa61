//! Jordan data of the perturbation and its embedding into dimension `n`.
//!
//! A [`JordanSpec`] lists eigenvalues `θ_i`, each with blocks `(p, β)`: `β`
//! copies of the Jordan block `R_p(θ_i)`. Columns of the `r × r` Jordan
//! matrix are laid out group by group in spec order, blocks by decreasing
//! size, copies consecutively. All indices here are 0-based.
//!
//! For a group `i`:
//! * `first` holds the first column of every block, `last` the last column;
//! * class `j` (the blocks of size `p_{i,j}`) owns `k = K(i,j) ⊂ last` and
//!   `l = L(i,j) ⊂ first`; `k_minus`, `l_minus` are the unions over the
//!   larger classes `j' < j`.
//!
//! The embedding uses `B = W (QJ; 0)` and `C = (Q⁻¹ 0) W*`, so that `P = BC`,
//! `CB = J`, `B*B = J*Q*QJ` and `CC* = Q⁻¹Q⁻¹*` hold for every `n`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::randmat::{HaarUnitary, StreamRng};

/// Largest accepted total dimension `r`.
pub const MAX_RANK: usize = 64;

/// Reciprocal 1-norm condition below which `Q` is rejected.
pub const MIN_BASIS_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JordanBlock {
    pub p: usize,
    pub beta: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanGroup {
    pub theta: Complex64,
    pub blocks: Vec<JordanBlock>,
}

impl JordanGroup {
    pub fn new(theta: Complex64, blocks: &[(usize, usize)]) -> Self {
        Self {
            theta,
            blocks: blocks.iter().map(|&(p, beta)| JordanBlock { p, beta }).collect(),
        }
    }

    /// `Σ_j β_{i,j} p_{i,j}`: algebraic multiplicity of `θ_i`.
    pub fn multiplicity(&self) -> usize {
        self.blocks.iter().map(|b| b.p * b.beta).sum()
    }

    /// `Σ_j β_{i,j}`: number of blocks, `|I(θ_i)|`.
    pub fn block_count(&self) -> usize {
        self.blocks.iter().map(|b| b.beta).sum()
    }
}

/// Validated Jordan data.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpec {
    groups: Vec<JordanGroup>,
    r: usize,
}

impl JordanSpec {
    pub fn new(groups: Vec<JordanGroup>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidJordan("at least one group is required".into()));
        }
        let mut r = 0usize;
        for (i, g) in groups.iter().enumerate() {
            if !(g.theta.re.is_finite() && g.theta.im.is_finite()) {
                return Err(Error::InvalidJordan(format!("group {i}: theta is not finite")));
            }
            if g.blocks.is_empty() {
                return Err(Error::InvalidJordan(format!("group {i}: no blocks")));
            }
            for (j, b) in g.blocks.iter().enumerate() {
                if b.p == 0 || b.beta == 0 {
                    return Err(Error::InvalidJordan(format!(
                        "group {i}, block {j}: sizes and multiplicities must be positive"
                    )));
                }
                if j > 0 && g.blocks[j - 1].p <= b.p {
                    return Err(Error::InvalidJordan(format!(
                        "group {i}: block sizes must be strictly decreasing"
                    )));
                }
            }
            if groups[..i].iter().any(|h| h.theta == g.theta) {
                return Err(Error::InvalidJordan(format!(
                    "group {i}: theta {} repeats an earlier group",
                    g.theta
                )));
            }
            r = r.saturating_add(g.multiplicity());
        }
        if r > MAX_RANK {
            return Err(Error::InvalidJordan(format!("total dimension {r} exceeds {MAX_RANK}")));
        }
        Ok(Self { groups, r })
    }

    /// Single group with one block of each listed `(p, β)`.
    pub fn single(theta: Complex64, blocks: &[(usize, usize)]) -> Result<Self> {
        Self::new(alloc::vec![JordanGroup::new(theta, blocks)])
    }

    /// One simple eigenvalue per entry.
    pub fn simple(thetas: &[Complex64]) -> Result<Self> {
        Self::new(thetas.iter().map(|&t| JordanGroup::new(t, &[(1, 1)])).collect())
    }

    pub fn groups(&self) -> &[JordanGroup] {
        &self.groups
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn thetas(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.groups.iter().map(|g| g.theta)
    }
}

/// Block-diagonal Jordan matrix `J`.
pub fn build_jcf(spec: &JordanSpec) -> CMatrix {
    let mut j = CMatrix::zeros(spec.r, spec.r);
    let mut col = 0;
    for g in &spec.groups {
        for b in &g.blocks {
            for _ in 0..b.beta {
                for t in 0..b.p {
                    j[(col + t, col + t)] = g.theta;
                    if t + 1 < b.p {
                        j[(col + t, col + t + 1)] = Complex64::new(1.0, 0.0);
                    }
                }
                col += b.p;
            }
        }
    }
    j
}

/// Index sets of one rate class `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassIndex {
    pub p: usize,
    pub beta: usize,
    pub k: Vec<usize>,
    pub k_minus: Vec<usize>,
    pub l: Vec<usize>,
    pub l_minus: Vec<usize>,
}

/// Index sets of one group `i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupIndex {
    pub theta: Complex64,
    /// `I(θ_i)`.
    pub first: Vec<usize>,
    /// `J(θ_i)`.
    pub last: Vec<usize>,
    pub classes: Vec<ClassIndex>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct JordanIndexing {
    pub groups: Vec<GroupIndex>,
}

pub fn indexing(spec: &JordanSpec) -> JordanIndexing {
    let mut col = 0;
    let groups = spec
        .groups
        .iter()
        .map(|g| {
            let mut gi = GroupIndex {
                theta: g.theta,
                ..GroupIndex::default()
            };
            for b in &g.blocks {
                let mut class = ClassIndex {
                    p: b.p,
                    beta: b.beta,
                    k_minus: gi.last.clone(),
                    l_minus: gi.first.clone(),
                    ..ClassIndex::default()
                };
                for _ in 0..b.beta {
                    class.l.push(col);
                    class.k.push(col + b.p - 1);
                    col += b.p;
                }
                gi.first.extend_from_slice(&class.l);
                gi.last.extend_from_slice(&class.k);
                gi.classes.push(class);
            }
            gi
        })
        .collect();
    JordanIndexing { groups }
}

/// Invertible change of basis `Q` with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    q: CMatrix,
    q_inv: CMatrix,
    rcond: f64,
}

impl BasisSpec {
    pub fn new(q: CMatrix) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Dimension(format!(
                "basis matrix must be square, got {}x{}",
                q.rows(),
                q.cols()
            )));
        }
        if !q.is_finite() {
            return Err(Error::InvalidArgument("basis matrix has non-finite entries".into()));
        }
        let q_inv = q.inverse().map_err(|_| Error::IllConditioned { rcond: 0.0 })?;
        let rcond = 1.0 / (q.norm1() * q_inv.norm1());
        if !(rcond >= MIN_BASIS_RCOND) {
            return Err(Error::IllConditioned { rcond });
        }
        Ok(Self { q, q_inv, rcond })
    }

    pub fn identity(r: usize) -> Self {
        Self {
            q: CMatrix::identity(r),
            q_inv: CMatrix::identity(r),
            rcond: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    pub fn q_inv(&self) -> &CMatrix {
        &self.q_inv
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// `Q⁻¹ (Q⁻¹)*`, the Gram matrix of the rows of `C`.
    pub fn left_gram(&self) -> CMatrix {
        &self.q_inv * &self.q_inv.adjoint()
    }

    /// `Q* Q`, the Gram matrix of the columns of `Q`.
    pub fn right_gram(&self) -> CMatrix {
        &self.q.adjoint() * &self.q
    }
}

/// Source of the unitary `W` in `P = W (Po ⊕ 0) W*`.
#[derive(Debug)]
pub enum Mixing<'a> {
    /// `W = I`: deterministic fixtures.
    Identity,
    /// `W` Haar, drawn from the given generator.
    Haar(&'a mut StreamRng),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRealization {
    pub p: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub j: CMatrix,
}

impl PerturbationRealization {
    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn rank(&self) -> usize {
        self.j.rows()
    }
}

pub fn embed_perturbation(
    spec: &JordanSpec,
    basis: &BasisSpec,
    n: usize,
    mixing: Mixing<'_>,
) -> Result<PerturbationRealization> {
    embed_perturbation_with_extra(spec, basis, None, n, mixing)
}

/// As [`embed_perturbation`], with an optional extra square block `E`
/// placed after the Jordan part: `P = W (QJQ⁻¹ ⊕ E ⊕ 0) W*`. The returned
/// `j` is then `J ⊕ E`.
pub fn embed_perturbation_with_extra(
    spec: &JordanSpec,
    basis: &BasisSpec,
    extra: Option<&CMatrix>,
    n: usize,
    mixing: Mixing<'_>,
) -> Result<PerturbationRealization> {
    let r0 = spec.rank();
    if basis.dim() != r0 {
        return Err(Error::Dimension(format!(
            "basis is {}x{} but the Jordan data has dimension {r0}",
            basis.dim(),
            basis.dim()
        )));
    }
    if let Some(e) = extra {
        if !e.is_square() {
            return Err(Error::Dimension("extra block must be square".into()));
        }
    }
    let s = extra.map_or(0, CMatrix::rows);
    let r = r0 + s;
    if n < r {
        return Err(Error::Dimension(format!(
            "dimension n = {n} is smaller than the perturbation rank {r}"
        )));
    }

    let jcf = build_jcf(spec);
    let mut core_j = CMatrix::zeros(r, r);
    let mut left = CMatrix::zeros(r, r); // QJ ⊕ E
    let mut right = CMatrix::zeros(r, r); // Q⁻¹ ⊕ I
    let qj = basis.q() * &jcf;
    for a in 0..r0 {
        for c in 0..r0 {
            core_j[(a, c)] = jcf[(a, c)];
            left[(a, c)] = qj[(a, c)];
            right[(a, c)] = basis.q_inv()[(a, c)];
        }
    }
    if let Some(e) = extra {
        for a in 0..s {
            right[(r0 + a, r0 + a)] = Complex64::new(1.0, 0.0);
            for c in 0..s {
                core_j[(r0 + a, r0 + c)] = e[(a, c)];
                left[(r0 + a, r0 + c)] = e[(a, c)];
            }
        }
    }

    // First r columns of W, as an n × r matrix.
    let w = match mixing {
        Mixing::Identity => CMatrix::from_fn(n, r, |a, c| Complex64::new(if a == c { 1.0 } else { 0.0 }, 0.0)),
        Mixing::Haar(rng) => {
            let u = HaarUnitary::sample(n, rng);
            let mut w = CMatrix::from_fn(n, r, |a, c| Complex64::new(if a == c { 1.0 } else { 0.0 }, 0.0));
            u.apply_left(&mut w);
            w
        }
    };
    let b = &w * &left;
    let c = &right * &w.adjoint();
    let p = &b * &c;
    Ok(PerturbationRealization { p, b, c, j: core_j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmat::SeededStream;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jcf_single_scalar() {
        let spec = JordanSpec::single(c(2.0, 0.0), &[(1, 1)]).unwrap();
        let j = build_jcf(&spec);
        assert_eq!(j, CMatrix::from_diag(&[c(2.0, 0.0)]));
    }

    #[test]
    fn jcf_three_plus_one() {
        let th = c(4.0, 1.0);
        let spec = JordanSpec::single(th, &[(3, 1), (1, 1)]).unwrap();
        let j = build_jcf(&spec);
        assert_eq!(j.rows(), 4);
        for a in 0..4 {
            assert_eq!(j[(a, a)], th);
        }
        assert_eq!(j[(0, 1)], c(1.0, 0.0));
        assert_eq!(j[(1, 2)], c(1.0, 0.0));
        assert_eq!(j[(2, 3)], c(0.0, 0.0));
        // Upper triangular with nonzero diagonal: full rank.
        assert!(j.determinant().unwrap().norm() > 0.0);
    }

    #[test]
    fn spec_validation() {
        assert!(JordanSpec::single(c(1.0, 0.0), &[(1, 1), (2, 1)]).is_err());
        assert!(JordanSpec::single(c(1.0, 0.0), &[(2, 1), (2, 1)]).is_err());
        assert!(JordanSpec::single(c(1.0, 0.0), &[(0, 1)]).is_err());
        assert!(JordanSpec::simple(&[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(JordanSpec::single(c(1.0, 0.0), &[(65, 1)]).is_err());
        assert!(JordanSpec::new(vec![]).is_err());
    }

    #[test]
    fn indexing_simple() {
        let spec = JordanSpec::single(c(2.0, 0.0), &[(1, 1)]).unwrap();
        let idx = indexing(&spec);
        assert_eq!(idx.groups[0].first, vec![0]);
        assert_eq!(idx.groups[0].last, vec![0]);
    }

    #[test]
    fn indexing_three_plus_one() {
        let spec = JordanSpec::single(c(2.0, 0.0), &[(3, 1), (1, 1)]).unwrap();
        let g = &indexing(&spec).groups[0];
        assert_eq!(g.first, vec![0, 3]);
        assert_eq!(g.last, vec![2, 3]);
        let c2 = &g.classes[1];
        assert_eq!(c2.k_minus, vec![2]);
        assert_eq!(c2.l_minus, vec![0]);
        assert_eq!(c2.k, vec![3]);
        assert_eq!(c2.l, vec![3]);
        assert!(g.classes[0].k_minus.is_empty() && g.classes[0].l_minus.is_empty());
    }

    #[test]
    fn indexing_two_by_two() {
        let spec = JordanSpec::single(c(2.0, 0.0), &[(2, 2)]).unwrap();
        let g = &indexing(&spec).groups[0];
        assert_eq!(g.first, vec![0, 2]);
        assert_eq!(g.last, vec![1, 3]);
    }

    #[test]
    fn first_columns_of_q_are_eigenvectors() {
        let spec = JordanSpec::new(vec![
            JordanGroup::new(c(3.0, 1.0), &[(3, 1), (1, 2)]),
            JordanGroup::new(c(-2.0, 0.5), &[(2, 1)]),
        ])
        .unwrap();
        let q = CMatrix::from_fn(7, 7, |a, b| {
            c(
                if a == b { 2.0 } else { 0.0 } + 0.1 * (a as f64) - 0.07 * (b as f64),
                0.05 * ((a * b) % 3) as f64,
            )
        });
        let basis = BasisSpec::new(q).unwrap();
        let po = &(basis.q() * &build_jcf(&spec)) * basis.q_inv();
        for g in &indexing(&spec).groups {
            for &col in &g.first {
                let v = basis.q().column(col);
                let pv = po.matvec(&v);
                for (x, y) in pv.iter().zip(&v) {
                    assert_abs_diff_eq!((x - g.theta * y).norm(), 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn scalar_embedding_with_identity_mixing() {
        let spec = JordanSpec::single(c(2.0, 0.0), &[(1, 1)]).unwrap();
        let real = embed_perturbation(&spec, &BasisSpec::identity(1), 3, Mixing::Identity).unwrap();
        assert_eq!(real.p, CMatrix::from_diag(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
    }

    #[test]
    fn three_simple_spikes_are_diagonal() {
        let th = [c(1.0, 0.0), c(4.0, 1.0), c(4.0, -1.0)];
        let spec = JordanSpec::simple(&th).unwrap();
        let real = embed_perturbation(&spec, &BasisSpec::identity(3), 8, Mixing::Identity).unwrap();
        let mut d = vec![c(0.0, 0.0); 8];
        d[..3].copy_from_slice(&th);
        assert_eq!(real.p, CMatrix::from_diag(&d));
    }

    #[test]
    fn rejects_singular_basis_and_small_n() {
        let q = CMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert!(matches!(BasisSpec::new(q), Err(Error::IllConditioned { .. })));
        let spec = JordanSpec::single(c(2.0, 0.0), &[(3, 1)]).unwrap();
        assert!(embed_perturbation(&spec, &BasisSpec::identity(3), 2, Mixing::Identity).is_err());
    }

    #[test]
    fn extra_block_is_embedded() {
        let spec = JordanSpec::single(c(3.0, 0.0), &[(1, 1)]).unwrap();
        let e = CMatrix::from_diag(&[c(0.1, 0.0)]);
        let real =
            embed_perturbation_with_extra(&spec, &BasisSpec::identity(1), Some(&e), 4, Mixing::Identity).unwrap();
        assert_eq!(real.rank(), 2);
        assert_eq!(real.p[(1, 1)], c(0.1, 0.0));
    }

    fn arb_spec() -> impl Strategy<Value = JordanSpec> {
        prop::collection::vec(
            (
                (-4.0f64..4.0, -4.0f64..4.0),
                prop::collection::btree_set(1usize..4, 1..3),
                1usize..3,
            ),
            1..3,
        )
        .prop_filter_map("distinct thetas", |groups| {
            let gs = groups
                .into_iter()
                .enumerate()
                .map(|(i, ((re, im), sizes, beta))| {
                    let blocks: Vec<(usize, usize)> = sizes.into_iter().rev().map(|p| (p, beta)).collect();
                    JordanGroup::new(c(re + 10.0 * i as f64, im), &blocks)
                })
                .collect();
            JordanSpec::new(gs).ok()
        })
    }

    fn arb_basis(r: usize, seed: u64) -> BasisSpec {
        let mut rng = SeededStream::new(seed, 0).rng();
        let g = crate::randmat::sample_ginibre(r, &mut rng);
        BasisSpec::new(&CMatrix::identity(r) + &g).unwrap_or_else(|_| BasisSpec::identity(r))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn factor_identities_hold_for_every_n(spec in arb_spec(), seed in 0u64..1000) {
            let r = spec.rank();
            let basis = arb_basis(r, seed);
            let jcf = build_jcf(&spec);
            let bb_expect = &(&(&jcf.adjoint() * &basis.q().adjoint()) * basis.q()) * &jcf;
            let cc_expect = basis.left_gram();
            for n in [r, 2 * r, 100] {
                let mut rng = SeededStream::new(seed, n as u64).rng();
                let real = embed_perturbation(&spec, &basis, n, Mixing::Haar(&mut rng)).unwrap();
                let scale = 1.0 + bb_expect.max_norm() + cc_expect.max_norm();
                prop_assert!((&(&real.c * &real.b) - &jcf).max_norm() <= 1e-12 * scale);
                prop_assert!((&(&real.b.adjoint() * &real.b) - &bb_expect).max_norm() <= 1e-12 * scale);
                prop_assert!((&(&real.c * &real.c.adjoint()) - &cc_expect).max_norm() <= 1e-12 * scale);
                prop_assert!((&real.p - &(&real.b * &real.c)).max_norm() <= 1e-12);
            }
        }

        #[test]
        fn index_sets_have_the_stated_sizes(spec in arb_spec()) {
            let idx = indexing(&spec);
            for (g, gi) in spec.groups().iter().zip(&idx.groups) {
                prop_assert_eq!(gi.first.len(), g.block_count());
                prop_assert_eq!(gi.last.len(), g.block_count());
                let mut seen = 0;
                let mut union: Vec<usize> = Vec::new();
                for class in &gi.classes {
                    prop_assert_eq!(class.k.len(), class.beta);
                    prop_assert_eq!(class.l.len(), class.beta);
                    prop_assert_eq!(class.k_minus.len(), seen);
                    prop_assert_eq!(class.l_minus.len(), seen);
                    prop_assert_eq!(&class.k_minus, &union);
                    union.extend_from_slice(&class.k);
                    seen += class.beta;
                }
                prop_assert_eq!(&union, &gi.last);
            }
        }
    }
}
