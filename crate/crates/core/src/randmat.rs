//! Seeded random generation: Haar unitaries, Ginibre matrices, and the
//! isotropic model `A = U·diag(s)` or `A = U·diag(s)·V`.
//!
//! Haar unitaries are produced by Householder QR of a standard complex
//! Gaussian matrix followed by the phase correction `U = Q·diag(r_jj/|r_jj|)`,
//! which makes the factorization unique and the law of `U` exactly Haar.
//! The factor is kept as its `n` reflectors. Once the first `k` reflectors
//! are fixed, column `k` of the partially reduced matrix is again a standard
//! Gaussian vector independent of them, so each reflector is built from a
//! fresh Gaussian vector. This is the same QR, with the Gaussian columns
//! drawn as they are consumed; it stores `O(n²)` numbers and applies `U` to
//! a vector in `O(n²)` operations.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::math::sqrt;
use crate::matrix::CMatrix;

/// Generator behind every [`SeededStream`].
pub type StreamRng = ChaCha8Rng;

/// A reproducible random stream: `(base_seed, stream_index)` fixes the output
/// bit for bit, and distinct indices select disjoint ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub base_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub const fn new(base_seed: u64, stream_index: u64) -> Self {
        Self {
            base_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Standard circular complex Gaussian: `E|z|² = 1`, `E z² = 0`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

#[derive(Debug, Clone)]
struct Reflector {
    /// Householder vector with implicit leading 1 omitted.
    tail: Vec<Complex64>,
    tau: Complex64,
}

impl Reflector {
    /// `x ← (I − τ v v*) x` on the trailing block `x[k..]`.
    #[inline]
    fn apply(&self, x: &mut [Complex64], tau: Complex64) {
        let (head, rest) = x.split_first_mut().expect("nonempty block");
        let mut dot = *head;
        for (v, y) in self.tail.iter().zip(rest.iter()) {
            dot += v.conj() * y;
        }
        let s = tau * dot;
        *head -= s;
        for (v, y) in self.tail.iter().zip(rest.iter_mut()) {
            *y -= s * v;
        }
    }
}

/// A Haar-distributed unitary stored as `U = H₀ H₁ ⋯ H_{n−1} · diag(d)`.
#[derive(Debug, Clone)]
pub struct HaarUnitary {
    n: usize,
    reflectors: Vec<Reflector>,
    phases: Vec<Complex64>,
}

impl HaarUnitary {
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "Haar unitary needs n >= 1");
        let mut reflectors = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        for k in 0..n {
            let m = n - k;
            // A zero column has probability zero; draw again if it happens.
            let (x, norm) = loop {
                let x = complex_gaussian_vec(rng, m);
                let norm = sqrt(x.iter().map(|z| z.norm_sqr()).sum());
                if norm > 0.0 {
                    break (x, norm);
                }
            };
            let alpha = x[0];
            let beta = if alpha.re >= 0.0 { -norm } else { norm };
            let tau = (Complex64::new(beta, 0.0) - alpha) / beta;
            let scale = Complex64::new(1.0, 0.0) / (alpha - beta);
            let tail = x[1..].iter().map(|z| z * scale).collect();
            reflectors.push(Reflector { tail, tau });
            // r_kk = beta is real, so the phase correction is its sign.
            phases.push(Complex64::new(beta.signum(), 0.0));
        }
        Self { n, reflectors, phases }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `x ← U x`.
    pub fn apply(&self, x: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        for (xi, d) in x.iter_mut().zip(&self.phases) {
            *xi *= d;
        }
        for k in (0..self.n).rev() {
            let h = &self.reflectors[k];
            h.apply(&mut x[k..], h.tau);
        }
    }

    /// `x ← U* x`.
    pub fn apply_adjoint(&self, x: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        for k in 0..self.n {
            let h = &self.reflectors[k];
            h.apply(&mut x[k..], h.tau.conj());
        }
        for (xi, d) in x.iter_mut().zip(&self.phases) {
            *xi *= d.conj();
        }
    }

    /// `M ← U M` for an `n × c` matrix.
    pub fn apply_left(&self, m: &mut CMatrix) {
        assert_eq!(m.rows(), self.n);
        let cols = m.cols();
        for i in 0..self.n {
            let d = self.phases[i];
            for x in m.row_mut(i) {
                *x *= d;
            }
        }
        let mut w = vec![Complex64::new(0.0, 0.0); cols];
        for k in (0..self.n).rev() {
            let h = &self.reflectors[k];
            reflect_rows(m, k, 0, h, h.tau, &mut w);
        }
    }

    /// Dense `n × n` matrix of `U`.
    pub fn to_dense(&self) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::identity(n);
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        // Backward accumulation: after applying H_{k+1} … H_{n−1}, only the
        // trailing block m[k.., k..] differs from the identity.
        for k in (0..n).rev() {
            let h = &self.reflectors[k];
            reflect_rows(&mut m, k, k, h, h.tau, &mut w[..n - k]);
        }
        let d = self.phases.clone();
        m.scale_columns(&d)
    }
}

/// Applies `I − τ v v*` to rows `k..` of `m`, restricted to columns `col0..`.
fn reflect_rows(m: &mut CMatrix, k: usize, col0: usize, h: &Reflector, tau: Complex64, w: &mut [Complex64]) {
    let cols = m.cols();
    let width = cols - col0;
    let w = &mut w[..width];
    w.copy_from_slice(&m.row(k)[col0..]);
    for (i, v) in h.tail.iter().enumerate() {
        let vc = v.conj();
        for (acc, x) in w.iter_mut().zip(&m.row(k + 1 + i)[col0..]) {
            *acc += vc * x;
        }
    }
    for acc in w.iter_mut() {
        *acc *= tau;
    }
    for (x, s) in m.row_mut(k)[col0..].iter_mut().zip(w.iter()) {
        *x -= s;
    }
    for (i, v) in h.tail.iter().enumerate() {
        let v = *v;
        for (x, s) in m.row_mut(k + 1 + i)[col0..].iter_mut().zip(w.iter()) {
            *x -= v * s;
        }
    }
}

/// Dense Haar unitary.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    HaarUnitary::sample(n, rng).to_dense()
}

/// Ginibre matrix with i.i.d. circular entries of variance `1/n`.
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    assert!(n >= 1, "Ginibre matrix needs n >= 1");
    let s = 1.0 / sqrt(n as f64);
    CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng) * s)
}

/// Which isotropic factorization to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsotropicForm {
    /// `A = U·diag(s)`; equal in spectral law to `U·diag(s)·V`.
    #[default]
    UT,
    /// `A = U·diag(s)·V` with independent `U`, `V`.
    UTV,
}

/// Isotropic matrix kept in factored form.
#[derive(Debug, Clone)]
pub struct IsotropicOperator {
    u: HaarUnitary,
    s: Vec<f64>,
    v: Option<HaarUnitary>,
}

impl IsotropicOperator {
    pub fn sample<R: Rng + ?Sized>(t_values: &[f64], form: IsotropicForm, rng: &mut R) -> Self {
        assert!(!t_values.is_empty(), "singular values must be nonempty");
        let n = t_values.len();
        let u = HaarUnitary::sample(n, rng);
        let v = match form {
            IsotropicForm::UT => None,
            IsotropicForm::UTV => Some(HaarUnitary::sample(n, rng)),
        };
        Self {
            u,
            s: t_values.to_vec(),
            v,
        }
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.s
    }

    /// `x ← A x`.
    pub fn apply(&self, x: &mut [Complex64]) {
        if let Some(v) = &self.v {
            v.apply(x);
        }
        for (xi, s) in x.iter_mut().zip(&self.s) {
            *xi *= s;
        }
        self.u.apply(x);
    }

    /// `x ← A⁻¹ x = V* diag(1/s) U* x`.
    pub fn apply_inverse(&self, x: &mut [Complex64]) {
        self.u.apply_adjoint(x);
        for (xi, s) in x.iter_mut().zip(&self.s) {
            *xi /= s;
        }
        if let Some(v) = &self.v {
            v.apply_adjoint(x);
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.v {
            None => {
                let d: Vec<Complex64> = self.s.iter().map(|s| Complex64::new(*s, 0.0)).collect();
                self.u.to_dense().scale_columns(&d)
            }
            Some(v) => {
                let mut m = v.to_dense();
                for (i, s) in self.s.iter().enumerate() {
                    for x in m.row_mut(i) {
                        *x *= s;
                    }
                }
                self.u.apply_left(&mut m);
                m
            }
        }
    }
}

/// Dense isotropic matrix `U·diag(s)` or `U·diag(s)·V`.
pub fn assemble_isotropic<R: Rng + ?Sized>(t_values: &[f64], rng: &mut R, form: IsotropicForm) -> CMatrix {
    IsotropicOperator::sample(t_values, form, rng).to_dense()
}
