//! Dense complex eigenvalues: balancing, Householder reduction to upper
//! Hessenberg form, then single-shift implicit QR on the active window.
//!
//! The QR phase follows the structure of LAPACK's `zlahqr` in
//! eigenvalues-only mode, with general complex subdiagonals and the
//! Ahues–Tisseur deflation test.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{cabs, cabs1, cdiv, csqrt, hypot, sqrt};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Total QR sweeps allowed per unit of dimension.
pub const SWEEPS_PER_DIM: usize = 40;

/// Iterations between exceptional shifts.
const EXCEPTIONAL_PERIOD: usize = 10;
const EXCEPTIONAL_FACTOR: f64 = 0.75;

/// Eigenvalues of a row-major `n × n` matrix, destroying `h`.
pub(crate) fn eigenvalues_in_place(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    debug_assert_eq!(h.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    balance(h, n);
    hessenberg(h, n);
    hessenberg_qr(h, n)
}

/// Diagonal similarity by powers of two equalizing off-diagonal row and
/// column 1-norms.
pub(crate) fn balance(h: &mut [Complex64], n: usize) {
    const RADIX: f64 = 2.0;
    const RADIX2: f64 = RADIX * RADIX;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(h[j * n + i]);
                    r += cabs1(h[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut g = r / RADIX;
            let mut f = 1.0;
            while c < g && f < 1e150 {
                f *= RADIX;
                c *= RADIX2;
            }
            g = r * RADIX;
            while c >= g && f > 1e-150 {
                f /= RADIX;
                c /= RADIX2;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for x in &mut h[i * n..(i + 1) * n] {
                    *x *= inv;
                }
                for j in 0..n {
                    h[j * n + i] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Elementary reflector `I − τ u u*`, `u = (1, v)`, with `H*(α, x) = (β, 0)`
/// and `β` real.
#[inline]
fn reflector(alpha: Complex64, xnorm: f64) -> Option<(f64, Complex64, Complex64)> {
    if xnorm == 0.0 && alpha.im == 0.0 {
        return None;
    }
    let mag = hypot(cabs(alpha), xnorm);
    let beta = if alpha.re >= 0.0 { -mag } else { mag };
    let tau = (Complex64::new(beta, 0.0) - alpha) / beta;
    let scale = cdiv(ONE, alpha - beta);
    Some((beta, tau, scale))
}

/// Householder reduction to upper Hessenberg form.
pub(crate) fn hessenberg(h: &mut [Complex64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let alpha = h[(k + 1) * n + k];
        let xnorm = sqrt((k + 2..n).map(|i| h[i * n + k].norm_sqr()).sum());
        let Some((beta, tau, scale)) = reflector(alpha, xnorm) else {
            continue;
        };
        v[0] = ONE;
        for (i, vi) in v.iter_mut().enumerate().take(len).skip(1) {
            let idx = (k + 1 + i) * n + k;
            *vi = h[idx] * scale;
            h[idx] = ZERO;
        }
        h[(k + 1) * n + k] = Complex64::new(beta, 0.0);
        let v = &v[..len];

        // A ← A (I − τ v v*) on columns k+1.., all rows.
        for row in h.chunks_exact_mut(n) {
            let seg = &mut row[k + 1..];
            let mut s = ZERO;
            for (x, vj) in seg.iter().zip(v) {
                s += x * vj;
            }
            s *= tau;
            for (x, vj) in seg.iter_mut().zip(v) {
                *x -= s * vj.conj();
            }
        }

        // A ← (I − τ̄ v v*) A on rows k+1.., columns k+1...
        let w = &mut w[..len];
        w.fill(ZERO);
        for (i, vi) in v.iter().enumerate() {
            let vc = vi.conj();
            let row = &h[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (acc, x) in w.iter_mut().zip(row) {
                *acc += vc * x;
            }
        }
        let ctau = tau.conj();
        for (i, vi) in v.iter().enumerate() {
            let s = ctau * vi;
            let row = &mut h[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (x, wj) in row.iter_mut().zip(w.iter()) {
                *x -= s * wj;
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by implicit single-shift QR.
pub(crate) fn hessenberg_qr(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let max_sweeps = SWEEPS_PER_DIM * n.max(1);
    let mut sweeps = 0usize;
    let mut w = vec![ZERO; n];
    let at = |i: usize, j: usize| i * n + j;

    let mut i = n as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut kdefl = 0usize;
        loop {
            // Look for a negligible subdiagonal entry.
            let mut k = iu;
            while k > l {
                let sub = h[at(k, k - 1)];
                if cabs1(sub) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[at(k - 1, k - 1)]) + cabs1(h[at(k, k)]);
                if tst == 0.0 {
                    if k >= 2 {
                        tst += cabs1(h[at(k - 1, k - 2)]);
                    }
                    if k + 1 < n {
                        tst += cabs1(h[at(k + 1, k)]);
                    }
                }
                if cabs1(sub) <= ulp * tst {
                    let up = cabs1(h[at(k - 1, k)]);
                    let ab = cabs1(sub).max(up);
                    let ba = cabs1(sub).min(up);
                    let hkk = cabs1(h[at(k, k)]);
                    let diff = cabs1(h[at(k - 1, k - 1)] - h[at(k, k)]);
                    let aa = hkk.max(diff);
                    let bb = hkk.min(diff);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[at(l, l - 1)] = ZERO;
            }
            if l >= iu {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::NoConvergence {
                    partial: w[iu + 1..].to_vec(),
                    n,
                });
            }
            kdefl += 1;

            let t = shift(h, n, l, iu, kdefl);

            // Start the sweep at the lowest row where two consecutive
            // subdiagonals are small enough.
            let mut m = iu - 1;
            let mut v;
            loop {
                let h11 = h[at(m, m)];
                let h22 = h[at(m + 1, m + 1)];
                let mut h11s = h11 - t;
                let mut h21 = h[at(m + 1, m)];
                let s = cabs1(h11s) + cabs1(h21);
                h11s /= s;
                h21 /= s;
                v = [h11s, h21];
                if m == l {
                    break;
                }
                let h10 = h[at(m, m - 1)];
                if cabs1(h10) * cabs1(h21) <= ulp * (cabs1(h11s) * (cabs1(h11) + cabs1(h22))) {
                    break;
                }
                m -= 1;
            }

            for k in m..iu {
                if k > m {
                    v = [h[at(k, k - 1)], h[at(k + 1, k - 1)]];
                }
                let (t1, v2) = match reflector(v[0], cabs(v[1])) {
                    Some((beta, tau, scale)) => {
                        if k > m {
                            h[at(k, k - 1)] = Complex64::new(beta, 0.0);
                            h[at(k + 1, k - 1)] = ZERO;
                        }
                        (tau, v[1] * scale)
                    }
                    None => continue,
                };
                let ct1 = t1.conj();
                let cv2 = v2.conj();

                // Rows k, k+1 over columns k..=i.
                let (upper, lower) = h.split_at_mut((k + 1) * n);
                let rk = &mut upper[k * n + k..k * n + iu + 1];
                let rk1 = &mut lower[k..iu + 1];
                for (a, b) in rk.iter_mut().zip(rk1.iter_mut()) {
                    let sum = ct1 * (*a + cv2 * *b);
                    *a -= sum;
                    *b -= sum * v2;
                }

                // Columns k, k+1 over rows l..=min(k+2, i).
                for j in l..=(k + 2).min(iu) {
                    let pair = &mut h[j * n + k..j * n + k + 2];
                    let sum = t1 * (pair[0] + v2 * pair[1]);
                    pair[0] -= sum;
                    pair[1] -= sum * cv2;
                }

                if k == m && m > l {
                    h[at(m, m - 1)] *= ONE - ct1;
                }
            }
        }
        w[iu] = h[at(iu, iu)];
        i -= 1;
    }
    Ok(w)
}

fn shift(h: &[Complex64], n: usize, l: usize, i: usize, kdefl: usize) -> Complex64 {
    let at = |r: usize, c: usize| h[r * n + c];
    if kdefl.is_multiple_of(2 * EXCEPTIONAL_PERIOD) {
        return EXCEPTIONAL_FACTOR * cabs(at(i, i - 1)) + at(i, i);
    }
    if kdefl.is_multiple_of(EXCEPTIONAL_PERIOD) {
        return EXCEPTIONAL_FACTOR * cabs(at(l + 1, l)) + at(l, l);
    }
    // Wilkinson shift: eigenvalue of the trailing 2×2 block nearer h_ii.
    let mut t = at(i, i);
    let u = csqrt(at(i - 1, i)) * csqrt(at(i, i - 1));
    let mut s = cabs1(u);
    if s != 0.0 {
        let x = 0.5 * (at(i - 1, i - 1) - t);
        let sx = cabs1(x);
        s = s.max(sx);
        let xs = x / s;
        let us = u / s;
        let mut y = s * csqrt(xs * xs + us * us);
        if sx > 0.0 {
            let xn = x / sx;
            if xn.re * y.re + xn.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * cdiv(u, x + y);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CMatrix;

    #[test]
    fn hessenberg_is_a_similarity() {
        let n = 7;
        let m = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(((i * 3 + j * 5) % 7) as f64 - 3.0, ((i + 2 * j) % 5) as f64 - 2.0)
        });
        let mut h = m.as_slice().to_vec();
        hessenberg(&mut h, n);
        for i in 2..n {
            for j in 0..i - 1 {
                assert_eq!(h[i * n + j], ZERO);
            }
        }
        let tr: Complex64 = (0..n).map(|i| h[i * n + i]).sum();
        assert!((tr - m.trace()).norm() < 1e-12);
        let fro = sqrt(h.iter().map(|z| z.norm_sqr()).sum());
        assert!((fro - m.frobenius()).abs() < 1e-12 * fro);
    }

    #[test]
    fn balancing_preserves_trace() {
        let n = 4;
        let mut m = CMatrix::identity(n);
        m[(0, 3)] = Complex64::new(1e6, 0.0);
        m[(3, 0)] = Complex64::new(1e-6, 0.0);
        m[(1, 2)] = Complex64::new(2.0, 1.0);
        let mut h = m.as_slice().to_vec();
        balance(&mut h, n);
        let tr: Complex64 = (0..n).map(|i| h[i * n + i]).sum();
        assert_eq!(tr, m.trace());
        assert!(h[3].norm() < 1e3);
    }
}
