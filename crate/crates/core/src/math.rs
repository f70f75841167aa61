//! Floating-point helpers that work without `std`.

use core::f64::consts::PI;

use num_complex::Complex64;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Modulus without intermediate overflow.
#[inline]
pub fn cabs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `|re| + |im|`, the cheap norm used by deflation tests.
#[inline]
pub fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

#[inline]
pub fn carg(z: Complex64) -> f64 {
    libm::atan2(z.im, z.re)
}

#[inline]
pub fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::new(r * libm::cos(t), r * libm::sin(t))
}

#[inline]
pub fn cis(t: f64) -> Complex64 {
    polar(1.0, t)
}

/// Principal square root.
pub fn csqrt(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let r = cabs(z);
    let re = sqrt(0.5 * (r + z.re.abs()));
    let im = 0.5 * z.im / re;
    if z.re >= 0.0 {
        Complex64::new(re, im)
    } else {
        Complex64::new(im.abs(), if z.im >= 0.0 { re } else { -re })
    }
}

/// `z^k` for a nonnegative integer power, by repeated squaring.
pub fn cpowi(z: Complex64, k: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut base = z;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// All `p`-th roots of `z`, principal root first, then counterclockwise:
/// `|z|^(1/p) · exp(i(arg z + 2πs)/p)` for `s = 0..p`.
pub fn croots(z: Complex64, p: usize) -> alloc::vec::Vec<Complex64> {
    assert!(p >= 1);
    let r = powf(cabs(z), 1.0 / p as f64);
    let t = carg(z) / p as f64;
    (0..p).map(|s| polar(r, t + 2.0 * PI * s as f64 / p as f64)).collect()
}

/// Robust complex division (Smith's algorithm).
pub fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}
