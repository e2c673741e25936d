//! Minimal dense linear algebra for desk-scale matrices (n <= 9).
//!
//! Everything here is hand-rolled so that the whole pipeline stays generic
//! over the floating scalar and free of platform-dependent BLAS behaviour:
//! byte-identical reruns are part of the sampling contract, and LAPACK makes
//! no such promise across builds.  At these sizes cyclic Jacobi is accurate
//! to machine precision and fast enough for 10^6-sample batches.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Matrix entry: a real scalar, a complex number, or a quaternion.
///
/// Quaternions are non-commutative, so column operations consistently
/// multiply scalars on the right.
pub trait Entry:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    type R: Real;

    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn abs_sqr(self) -> Self::R;
    fn scale(self, s: Self::R) -> Self;
    fn from_real(x: Self::R) -> Self;
    /// Standard normal on every real component.
    fn gaussian<G: Rng + ?Sized>(rng: &mut G) -> Self;
}

macro_rules! real_entry {
    ($t:ty) => {
        impl Entry for $t {
            type R = $t;

            fn zero() -> Self {
                0.0
            }
            fn one() -> Self {
                1.0
            }
            fn conj(self) -> Self {
                self
            }
            fn abs_sqr(self) -> Self::R {
                self * self
            }
            fn scale(self, s: Self::R) -> Self {
                self * s
            }
            fn from_real(x: Self::R) -> Self {
                x
            }
            fn gaussian<G: Rng + ?Sized>(rng: &mut G) -> Self {
                <$t>::of(rng.sample::<f64, _>(StandardNormal))
            }
        }
    };
}

real_entry!(f32);
real_entry!(f64);

impl<T: Real> Entry for Complex<T> {
    type R = T;

    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn one() -> Self {
        Complex::new(T::one(), T::zero())
    }
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    fn abs_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }
    fn scale(self, s: T) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
    fn from_real(x: T) -> Self {
        Complex::new(x, T::zero())
    }
    fn gaussian<G: Rng + ?Sized>(rng: &mut G) -> Self {
        Complex::new(
            T::of(rng.sample::<f64, _>(StandardNormal)),
            T::of(rng.sample::<f64, _>(StandardNormal)),
        )
    }
}

/// Quaternion `w + xi + yj + zk`, used only to draw Haar samples from the
/// compact symplectic group.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quat<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quat<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quat { w, x, y, z }
    }

    /// Standard 2x2 complex image: `w + xi -> diag part`, `j`-part off-diagonal.
    pub fn embed(self) -> [[Complex<T>; 2]; 2] {
        [
            [Complex::new(self.w, self.x), Complex::new(self.y, self.z)],
            [Complex::new(-self.y, self.z), Complex::new(self.w, -self.x)],
        ]
    }
}

impl<T: Real> Add for Quat<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Quat::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Quat<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Quat::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Quat<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul for Quat<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl<T: Real> AddAssign for Quat<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Quat<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Entry for Quat<T> {
    type R = T;

    fn zero() -> Self {
        Quat::new(T::zero(), T::zero(), T::zero(), T::zero())
    }
    fn one() -> Self {
        Quat::new(T::one(), T::zero(), T::zero(), T::zero())
    }
    fn conj(self) -> Self {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }
    fn abs_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }
    fn scale(self, s: T) -> Self {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
    fn from_real(x: T) -> Self {
        Quat::new(x, T::zero(), T::zero(), T::zero())
    }
    fn gaussian<G: Rng + ?Sized>(rng: &mut G) -> Self {
        Quat::new(
            T::of(rng.sample::<f64, _>(StandardNormal)),
            T::of(rng.sample::<f64, _>(StandardNormal)),
            T::of(rng.sample::<f64, _>(StandardNormal)),
            T::of(rng.sample::<f64, _>(StandardNormal)),
        )
    }
}

/// Square matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    n: usize,
    a: Vec<E>,
}

impl<E: Entry> Mat<E> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![E::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fill_gaussian<G: Rng + ?Sized>(&mut self, rng: &mut G) {
        for v in self.a.iter_mut() {
            *v = E::gaussian(rng);
        }
    }

    pub fn mul_into(&self, b: &Self, out: &mut Self) {
        let n = self.n;
        debug_assert!(b.n == n && out.n == n);
        for i in 0..n {
            for j in 0..n {
                let mut s = E::zero();
                for k in 0..n {
                    s += self.a[i * n + k] * b.a[k * n + j];
                }
                out.a[i * n + j] = s;
            }
        }
    }

    pub fn mul(&self, b: &Self) -> Self {
        let mut out = Self::zeros(self.n);
        self.mul_into(b, &mut out);
        out
    }

    pub fn adjoint_into(&self, out: &mut Self) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.a[i * n + j].conj();
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        self.adjoint_into(&mut out);
        out
    }

    pub fn add_assign_mat(&mut self, b: &Self) {
        for (x, y) in self.a.iter_mut().zip(b.a.iter()) {
            *x += *y;
        }
    }

    pub fn scale_entries(&mut self, s: E::R) {
        for x in self.a.iter_mut() {
            *x = x.scale(s);
        }
    }

    pub fn frobenius(&self) -> E::R {
        let mut s = E::R::zero();
        for x in &self.a {
            s = s + x.abs_sqr();
        }
        s.sqrt()
    }

    /// Largest entry modulus off the diagonal.
    pub fn max_abs_offdiag(&self) -> E::R {
        let mut m = E::R::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.a[i * self.n + j].abs_sqr());
                }
            }
        }
        m.sqrt()
    }

    /// Projects onto the anti-Hermitian part, `(M - M*)/2`; used to remove
    /// floating point drift after conjugating algebra elements.
    pub fn anti_hermitize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let x = self.a[i * n + j];
                let y = self.a[j * n + i];
                let half = E::R::of(0.5);
                let v = (x - y.conj()).scale(half);
                self.a[i * n + j] = v;
                self.a[j * n + i] = -v.conj();
            }
        }
    }

    /// Multiplies column `j` by `q` on the right.
    pub fn col_scale(&mut self, j: usize, q: E) {
        for i in 0..self.n {
            let v = self.a[i * self.n + j];
            self.a[i * self.n + j] = v * q;
        }
    }
}

impl<E> Index<(usize, usize)> for Mat<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.a[i * self.n + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Mat<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.a[i * self.n + j]
    }
}

/// Two-pass modified Gram-Schmidt, in place.  With a square Gaussian input
/// the result is the unique Q of the QR factorization with positive real
/// diagonal of R, which is exactly the Haar-correct orthonormalization.
pub fn orthonormalize<E: Entry>(m: &mut Mat<E>) -> Result<()> {
    let n = m.dim();
    for _pass in 0..2 {
        for j in 0..n {
            for k in 0..j {
                let mut r = E::zero();
                for i in 0..n {
                    r += m[(i, k)].conj() * m[(i, j)];
                }
                for i in 0..n {
                    let t = m[(i, k)] * r;
                    m[(i, j)] -= t;
                }
            }
            let mut nrm = E::R::zero();
            for i in 0..n {
                nrm = nrm + m[(i, j)].abs_sqr();
            }
            let nrm = nrm.sqrt();
            if !(nrm > E::R::epsilon()) {
                return Err(Error::InvalidParameter(
                    "rank-deficient matrix in orthonormalization".into(),
                ));
            }
            let inv = E::R::one() / nrm;
            for i in 0..n {
                let v = m[(i, j)];
                m[(i, j)] = v.scale(inv);
            }
        }
    }
    Ok(())
}

/// Determinant by partial-pivot elimination; real and complex entries only.
pub fn determinant<E>(m: &Mat<E>) -> E
where
    E: Entry + Div<Output = E>,
{
    let n = m.dim();
    let mut a = m.clone();
    let mut det = E::one();
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].abs_sqr();
        for i in k + 1..n {
            let v = a[(i, k)].abs_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if !(best > E::R::zero()) {
            return E::zero();
        }
        if piv != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            det = -det;
        }
        let d = a[(k, k)];
        det = det * d;
        for i in k + 1..n {
            let f = a[(i, k)] / d;
            for j in k..n {
                let t = f * a[(k, j)];
                a[(i, j)] -= t;
            }
        }
    }
    det
}

pub struct HermitianEigen<T: Real> {
    /// Eigenvalues sorted descending; ties keep the original diagonal order.
    pub values: Vec<T>,
    pub vectors: Option<Mat<Complex<T>>>,
}

const MAX_JACOBI_SWEEPS: usize = 42;

/// Cyclic Jacobi for Hermitian matrices.
pub fn hermitian_eigen<T: Real>(
    a: &Mat<Complex<T>>,
    want_vectors: bool,
) -> Result<HermitianEigen<T>> {
    let n = a.dim();
    let mut a = a.clone();
    let mut v = want_vectors.then(|| Mat::<Complex<T>>::identity(n));
    let scale = a.frobenius();
    if n <= 1 || !(scale > T::zero()) {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(HermitianEigen { values, vectors: v });
    }
    let tol = scale * T::epsilon() * T::of(n as f64);
    let skip_sqr = (scale * T::epsilon()).powi(2);
    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off + a[(i, j)].abs_sqr();
            }
        }
        if (off + off).sqrt() <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let gsq = g.abs_sqr();
                if gsq <= skip_sqr {
                    continue;
                }
                let gabs = gsq.sqrt();
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let zeta = (alpha - beta) / (gabs + gabs);
                let t = if zeta >= T::zero() {
                    -T::one() / (zeta + (zeta * zeta + T::one()).sqrt())
                } else {
                    T::one() / (-zeta + (zeta * zeta + T::one()).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let sigma = t * c;
                let s = g.scale(sigma / gabs);
                // A <- U* A U with U = I except U_pp = U_qq = c, U_pq = s,
                // U_qp = -conj(s).
                for r in 0..n {
                    let vp = a[(r, p)];
                    let vq = a[(r, q)];
                    a[(r, p)] = vp.scale(c) - vq * s.conj();
                    a[(r, q)] = vp * s + vq.scale(c);
                }
                for r in 0..n {
                    let wp = a[(p, r)];
                    let wq = a[(q, r)];
                    a[(p, r)] = wp.scale(c) - s * wq;
                    a[(q, r)] = s.conj() * wp + wq.scale(c);
                }
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                if let Some(vm) = v.as_mut() {
                    for r in 0..n {
                        let vp = vm[(r, p)];
                        let vq = vm[(r, q)];
                        vm[(r, p)] = vp.scale(c) - vq * s.conj();
                        vm[(r, q)] = vp * s + vq.scale(c);
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenFailure { sweeps: MAX_JACOBI_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.map(|vm| {
        Mat::from_fn(n, |r, c| vm[(r, order[c])])
    });
    Ok(HermitianEigen { values, vectors })
}

/// Mixing angles used to reduce a unitary eigenproblem to a Hermitian one.
/// `U` normal means `H = (U+U*)/2` and `K = (U-U*)/2i` commute, so the
/// eigenvectors of a generic combination `H + phi K` diagonalize `U`; a
/// residual check catches the measure-zero collisions and moves to the next
/// angle.
const MIX_ANGLES: [f64; 3] = [1.618033988749895, 2.414213562373095, 4.669201609102991];

/// Eigenvalue angles of a unitary matrix, unsorted, in `(-pi, pi]`.
pub fn unitary_eigenangles<T: Real>(u: &Mat<Complex<T>>) -> Result<Vec<T>> {
    let n = u.dim();
    let ua = u.adjoint();
    let half = T::of(0.5);
    let h = Mat::from_fn(n, |i, j| (u[(i, j)] + ua[(i, j)]).scale(half));
    // (U - U*)/(2i) = -i/2 (U - U*)
    let k = Mat::from_fn(n, |i, j| {
        let d = u[(i, j)] - ua[(i, j)];
        Complex::new(d.im * half, -d.re * half)
    });
    let tol = T::of(1e-7) * T::of((n as f64).sqrt());
    for phi in MIX_ANGLES {
        let phi = T::of(phi);
        let m = Mat::from_fn(n, |i, j| h[(i, j)] + k[(i, j)].scale(phi));
        let eig = hermitian_eigen(&m, true)?;
        let v = eig.vectors.expect("vectors requested");
        let d = v.adjoint().mul(&u.mul(&v));
        if d.max_abs_offdiag() <= tol {
            let angles = (0..n).map(|i| d[(i, i)].im.atan2(d[(i, i)].re)).collect();
            return Ok(angles);
        }
    }
    Err(Error::EigenFailure { sweeps: MIX_ANGLES.len() })
}

/// Pfaffian of the real part of a small antisymmetric matrix, by cofactor
/// recursion along the first row.  Only the sign is ever used.
pub fn pfaffian_re<T: Real>(m: &Mat<Complex<T>>) -> T {
    let n = m.dim();
    if n % 2 != 0 {
        return T::zero();
    }
    let idx: Vec<usize> = (0..n).collect();
    pfaffian_rec(m, &idx)
}

fn pfaffian_rec<T: Real>(m: &Mat<Complex<T>>, idx: &[usize]) -> T {
    if idx.is_empty() {
        return T::one();
    }
    let mut acc = T::zero();
    let i0 = idx[0];
    let mut sign = T::one();
    for j in 1..idx.len() {
        let sub: Vec<usize> = idx[1..]
            .iter()
            .copied()
            .filter(|&r| r != idx[j])
            .collect();
        let term = m[(i0, idx[j])].re * pfaffian_rec(m, &sub);
        acc = acc + sign * term;
        sign = -sign;
    }
    acc
}
