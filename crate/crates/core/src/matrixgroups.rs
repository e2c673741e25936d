//! Matrix realizations, Haar sampling, and radial projection.
//!
//! Each supported algebra gets a concrete compact matrix picture: su(n) as
//! traceless anti-Hermitian matrices, so(2r+1) and so(2r) as real
//! antisymmetric ones, sp(r) as quaternionic anti-Hermitian matrices
//! embedded in su(2r) with interleaved 2x2 blocks.  Group elements are
//! drawn from Haar measure by orthonormalizing Gaussian matrices (the QR
//! phase convention is fixed implicitly: modified Gram-Schmidt normalizes
//! against column norms, which are positive, so the triangular factor has a
//! positive diagonal and no extra phase correction is needed), and orbit
//! or conjugacy samples reduce back to dominant Cartan coordinates through
//! the Jacobi eigensolver.
//!
//! Determinism contract: a batch is fully determined by its master seed.
//! Samples are produced in fixed-size chunks, each owning the ChaCha stream
//! whose id equals the chunk index, and chunks are concatenated in index
//! order.  Worker count therefore never changes the output, only the wall
//! clock.  Samples whose eigensolve fails are dropped without refilling so
//! the stream alignment survives; the drop count is recorded on the batch.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    determinant, hermitian_eigen, orthonormalize, pfaffian_re, unitary_eigenangles, Entry, Mat,
    Quat,
};
use crate::rootsys::{regularity_tol, CartanPoint, LieType, RootSystem};
use crate::scalar::{kahan_sum, Real};

/// Samples per RNG stream; the unit of parallel work.
const CHUNK: usize = 8192;

/// Which manifold a radial batch lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Algebra,
    Group,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Algebra => write!(f, "algebra"),
            Side::Group => write!(f, "group"),
        }
    }
}

/// An element of the compact group in its matrix realization.
#[derive(Clone, Debug)]
pub struct GroupElement<T> {
    matrix: Mat<Complex<T>>,
}

impl<T: Real> GroupElement<T> {
    pub fn matrix(&self) -> &Mat<Complex<T>> {
        &self.matrix
    }

    /// Max-norm distance from unitarity, for invariant checks.
    pub fn unitarity_defect(&self) -> T {
        let n = self.matrix.dim();
        let prod = self.matrix.mul(&self.matrix.adjoint());
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) };
                worst = worst.max((prod[(i, j)] - want).abs_sqr().sqrt());
            }
        }
        worst
    }
}

/// An element of the algebra in the same realization.
#[derive(Clone, Debug)]
pub struct AlgebraElement<T> {
    matrix: Mat<Complex<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn matrix(&self) -> &Mat<Complex<T>> {
        &self.matrix
    }

    /// Max-norm distance from anti-Hermitian symmetry.
    pub fn skew_defect(&self) -> T {
        let n = self.matrix.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix[(i, j)] + self.matrix[(j, i)].conj();
                worst = worst.max(v.abs_sqr().sqrt());
            }
        }
        worst
    }
}

/// A convolution configuration: the tuple of dominant orbit representatives.
#[derive(Clone, Debug)]
pub struct OrbitConfig<T> {
    rs: RootSystem<T>,
    reps: Vec<CartanPoint<T>>,
    orbit_dims: Vec<usize>,
}

impl<T: Real> OrbitConfig<T> {
    /// Builds a configuration, projecting every representative to the
    /// dominant chamber first.
    pub fn new(rs: RootSystem<T>, reps: Vec<CartanPoint<T>>) -> Result<Self> {
        if reps.is_empty() {
            return Err(Error::InvalidParameter(
                "a convolution needs at least one orbit".into(),
            ));
        }
        let reps: Vec<CartanPoint<T>> =
            reps.iter().map(|x| rs.project_to_dominant(x)).collect();
        let orbit_dims = reps
            .iter()
            .map(|x| rs.orbit_dimension(x, regularity_tol(x.norm())))
            .collect();
        Ok(OrbitConfig { rs, reps, orbit_dims })
    }

    pub fn rs(&self) -> &RootSystem<T> {
        &self.rs
    }

    pub fn reps(&self) -> &[CartanPoint<T>] {
        &self.reps
    }

    pub fn orbit_dims(&self) -> &[usize] {
        &self.orbit_dims
    }

    pub fn factors(&self) -> usize {
        self.reps.len()
    }

    /// Sum of representative norms; the support radius of the orbit sum.
    pub fn radius_sum(&self) -> T {
        kahan_sum(self.reps.iter().map(|x| x.norm()))
    }
}

/// Seed bookkeeping carried by every batch; enough to reproduce it exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedProvenance {
    pub master_seed: u64,
    pub chunk_size: u32,
    pub n_streams: u32,
}

/// Dominant radial coordinates of a batch of samples, stored flat.
#[derive(Clone, Debug)]
pub struct RadialSampleBatch<T> {
    rs: RootSystem<T>,
    side: Side,
    samples: Vec<T>,
    count: usize,
    discards: usize,
    provenance: SeedProvenance,
}

impl<T: Real> RadialSampleBatch<T> {
    /// Rebuilds a batch from stored coordinates, e.g. when loading saved
    /// sample files.  `samples` is row-major with stride `rs.rank()`.
    pub fn from_parts(
        rs: RootSystem<T>,
        side: Side,
        samples: Vec<T>,
        discards: usize,
        provenance: SeedProvenance,
    ) -> Result<Self> {
        let rank = rs.rank();
        if samples.is_empty() || samples.len() % rank != 0 {
            return Err(Error::InvalidParameter(format!(
                "sample buffer length {} is not a positive multiple of rank {rank}",
                samples.len()
            )));
        }
        let count = samples.len() / rank;
        Ok(RadialSampleBatch { rs, side, samples, count, discards, provenance })
    }

    pub fn rs(&self) -> &RootSystem<T> {
        &self.rs
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Samples dropped due to eigensolver failures.
    pub fn discards(&self) -> usize {
        self.discards
    }

    pub fn provenance(&self) -> SeedProvenance {
        self.provenance
    }

    pub fn sample(&self, i: usize) -> &[T] {
        let r = self.rs.rank();
        &self.samples[i * r..(i + 1) * r]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.samples.chunks_exact(self.rs.rank())
    }

    pub fn point(&self, i: usize) -> CartanPoint<T> {
        CartanPoint::new(self.sample(i).to_vec())
    }
}

fn fill_real_gaussian<T: Real, R: Rng + ?Sized>(m: &mut Mat<Complex<T>>, rng: &mut R) {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex::new(T::of(rng.sample::<f64, _>(StandardNormal)), T::zero());
        }
    }
}

fn embed_quaternionic<T: Real>(q: &Mat<Quat<T>>) -> Mat<Complex<T>> {
    let r = q.dim();
    let mut m = Mat::zeros(2 * r);
    for a in 0..r {
        for b in 0..r {
            let block = q[(a, b)].embed();
            m[(2 * a, 2 * b)] = block[0][0];
            m[(2 * a, 2 * b + 1)] = block[0][1];
            m[(2 * a + 1, 2 * b)] = block[1][0];
            m[(2 * a + 1, 2 * b + 1)] = block[1][1];
        }
    }
    m
}

/// One Haar-distributed group element for the realization of `rs`.
pub fn haar_sample<T: Real, R: Rng + ?Sized>(rs: &RootSystem<T>, rng: &mut R) -> GroupElement<T> {
    let r = rs.rank();
    let matrix = match rs.lie_type() {
        LieType::A => {
            let n = r + 1;
            let mut g: Mat<Complex<T>> = Mat::zeros(n);
            g.fill_gaussian(rng);
            orthonormalize(&mut g).expect("Gaussian matrix is a.s. full rank");
            // Divide out the determinant phase to land in SU(n); for
            // V in SU(n), det(VU)^{-1/n} VU = V (det U)^{-1/n} U, so the
            // pushed-forward measure keeps its invariance.
            let d = determinant(&g);
            let phase = d.im.atan2(d.re);
            let z = Complex::from_polar(T::one(), -phase / T::of(n as f64));
            for j in 0..n {
                g.col_scale(j, z);
            }
            g
        }
        LieType::B | LieType::D => {
            let m = if rs.lie_type() == LieType::B { 2 * r + 1 } else { 2 * r };
            let mut g: Mat<Complex<T>> = Mat::zeros(m);
            fill_real_gaussian(&mut g, rng);
            orthonormalize(&mut g).expect("Gaussian matrix is a.s. full rank");
            let d = determinant(&g);
            if d.re < T::zero() {
                g.col_scale(m - 1, Complex::new(-T::one(), T::zero()));
            }
            g
        }
        LieType::C => {
            let mut g: Mat<Quat<T>> = Mat::zeros(r);
            g.fill_gaussian(rng);
            orthonormalize(&mut g).expect("Gaussian matrix is a.s. full rank");
            embed_quaternionic(&g)
        }
    };
    GroupElement { matrix }
}

/// Canonical matrix realization of a Cartan point.
pub fn realize<T: Real>(rs: &RootSystem<T>, x: &CartanPoint<T>) -> AlgebraElement<T> {
    let r = rs.rank();
    let matrix = match rs.lie_type() {
        LieType::A => {
            let theta = rs.point_to_eigenvalues(x);
            let n = r + 1;
            let mut m = Mat::zeros(n);
            for j in 0..n {
                m[(j, j)] = Complex::new(T::zero(), theta[j]);
            }
            m
        }
        LieType::B | LieType::D => {
            let theta = rs.point_to_angles(x);
            let dim = if rs.lie_type() == LieType::B { 2 * r + 1 } else { 2 * r };
            let mut m = Mat::zeros(dim);
            for (i, &t) in theta.iter().enumerate() {
                m[(2 * i, 2 * i + 1)] = Complex::new(t, T::zero());
                m[(2 * i + 1, 2 * i)] = Complex::new(-t, T::zero());
            }
            m
        }
        LieType::C => {
            let theta = rs.point_to_angles(x);
            let mut m = Mat::zeros(2 * r);
            for (a, &t) in theta.iter().enumerate() {
                m[(2 * a, 2 * a)] = Complex::new(T::zero(), t);
                m[(2 * a + 1, 2 * a + 1)] = Complex::new(T::zero(), -t);
            }
            m
        }
    };
    AlgebraElement { matrix }
}

/// Dominant Cartan coordinates of an algebra element.
pub fn radial_part<T: Real>(rs: &RootSystem<T>, x: &AlgebraElement<T>) -> Result<CartanPoint<T>> {
    let m = x.matrix();
    let n = m.dim();
    // -iX is Hermitian; its spectrum carries the radial data.
    let herm = Mat::from_fn(n, |i, j| {
        let v = m[(i, j)];
        Complex::new(v.im, -v.re)
    });
    let eig = hermitian_eigen(&herm, false)?;
    let vals = eig.values;
    match rs.lie_type() {
        LieType::A => Ok(rs.eigenvalues_to_point(&vals)),
        LieType::B | LieType::C => {
            // Spectrum is symmetric (with one extra zero for B); the top
            // rank entries are the sorted absolute angles.
            let theta: Vec<T> = vals[..rs.rank()].to_vec();
            Ok(rs.angles_to_point(&theta))
        }
        LieType::D => {
            let mut theta: Vec<T> = vals[..rs.rank()].to_vec();
            // The spectrum forgets the sign of the angle product; the
            // Pfaffian of the (real antisymmetric) realization restores it.
            let pf = pfaffian_re(m);
            if pf < T::zero() {
                let last = theta.len() - 1;
                theta[last] = -theta[last];
            }
            Ok(rs.angles_to_point(&theta))
        }
    }
}

/// Monte Carlo batch for the sum of independently rotated orbits:
/// each sample is the dominant radial part of
/// sum over i of Ad(g_i) X_i with g_i independent Haar.
pub fn sample_orbit_sum<T: Real>(
    cfg: &OrbitConfig<T>,
    n_samples: usize,
    master_seed: u64,
) -> Result<RadialSampleBatch<T>> {
    sample_orbit_sum_translated(cfg, n_samples, master_seed, None)
}

/// Like `sample_orbit_sum` with every g_i replaced by h g_i; with the same
/// seed this exercises the translation invariance of the sampled law.
pub fn sample_orbit_sum_translated<T: Real>(
    cfg: &OrbitConfig<T>,
    n_samples: usize,
    master_seed: u64,
    left: Option<&GroupElement<T>>,
) -> Result<RadialSampleBatch<T>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let rs = cfg.rs();
    let rank = rs.rank();
    let realized: Vec<Mat<Complex<T>>> =
        cfg.reps().iter().map(|x| realize(rs, x).matrix().clone()).collect();
    let dim = realized[0].dim();
    let n_chunks = n_samples.div_ceil(CHUNK);

    let chunks: Vec<(Vec<T>, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(ci as u64);
            let take = CHUNK.min(n_samples - ci * CHUNK);
            let mut out = Vec::with_capacity(take * rank);
            let mut discards = 0usize;
            let mut g: Mat<Complex<T>> = Mat::zeros(dim);
            let mut gadj: Mat<Complex<T>> = Mat::zeros(dim);
            let mut tmp: Mat<Complex<T>> = Mat::zeros(dim);
            let mut rot: Mat<Complex<T>> = Mat::zeros(dim);
            let mut acc: Mat<Complex<T>> = Mat::zeros(dim);
            for _ in 0..take {
                acc.scale_entries(T::zero());
                for rmat in &realized {
                    let drawn = haar_sample(rs, &mut rng);
                    let gm = match left {
                        Some(h) => h.matrix().mul(drawn.matrix()),
                        None => drawn.matrix().clone(),
                    };
                    g.clone_from(&gm);
                    g.adjoint_into(&mut gadj);
                    g.mul_into(rmat, &mut tmp);
                    tmp.mul_into(&gadj, &mut rot);
                    acc.add_assign_mat(&rot);
                }
                // Conjugation is exact only in exact arithmetic; snap back
                // onto the algebra before eigensolving.
                acc.anti_hermitize();
                match radial_part(rs, &AlgebraElement { matrix: acc.clone() }) {
                    Ok(h) => out.extend_from_slice(h.coords()),
                    Err(Error::EigenFailure { .. }) => discards += 1,
                    Err(e) => panic!("unexpected radial failure: {e}"),
                }
            }
            (out, discards)
        })
        .collect();

    let mut samples = Vec::with_capacity(n_samples * rank);
    let mut discards = 0;
    for (chunk, d) in chunks {
        samples.extend_from_slice(&chunk);
        discards += d;
    }
    let count = samples.len() / rank;
    Ok(RadialSampleBatch {
        rs: rs.clone(),
        side: Side::Algebra,
        samples,
        count,
        discards,
        provenance: SeedProvenance {
            master_seed,
            chunk_size: CHUNK as u32,
            n_streams: n_chunks as u32,
        },
    })
}

/// Group-side batch: eigenangle vectors of products of independently
/// rotated torus elements, reduced to the dominant alcove.  Type A only;
/// the eigenangle fundamental domain is unambiguous there.
pub fn sample_conjugacy_product<T: Real>(
    cfg: &OrbitConfig<T>,
    n_samples: usize,
    master_seed: u64,
) -> Result<RadialSampleBatch<T>> {
    if cfg.rs().lie_type() != LieType::A {
        return Err(Error::InvalidParameter(
            "group-side sampling is defined for type A only".into(),
        ));
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let rs = cfg.rs();
    let rank = rs.rank();
    let n = rank + 1;
    // exp of the canonical realization: diagonal phases.
    let exps: Vec<Mat<Complex<T>>> = cfg
        .reps()
        .iter()
        .map(|x| {
            let theta = rs.point_to_eigenvalues(x);
            Mat::from_fn(n, |i, j| {
                if i == j {
                    Complex::from_polar(T::one(), theta[i])
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
        })
        .collect();
    let n_chunks = n_samples.div_ceil(CHUNK);

    let chunks: Vec<(Vec<T>, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(ci as u64);
            let take = CHUNK.min(n_samples - ci * CHUNK);
            let mut out = Vec::with_capacity(take * rank);
            let mut discards = 0usize;
            let mut gadj: Mat<Complex<T>> = Mat::zeros(n);
            let mut tmp: Mat<Complex<T>> = Mat::zeros(n);
            let mut factor: Mat<Complex<T>> = Mat::zeros(n);
            let mut prod: Mat<Complex<T>> = Mat::zeros(n);
            let mut next: Mat<Complex<T>> = Mat::zeros(n);
            for _ in 0..take {
                let mut first = true;
                for d in &exps {
                    let g = haar_sample(rs, &mut rng);
                    g.matrix().adjoint_into(&mut gadj);
                    g.matrix().mul_into(d, &mut tmp);
                    tmp.mul_into(&gadj, &mut factor);
                    if first {
                        prod.clone_from(&factor);
                        first = false;
                    } else {
                        prod.mul_into(&factor, &mut next);
                        std::mem::swap(&mut prod, &mut next);
                    }
                }
                match unitary_eigenangles(&prod) {
                    Ok(angles) => {
                        let h = alcove_reduce(rs, angles);
                        out.extend_from_slice(h.coords());
                    }
                    Err(Error::EigenFailure { .. }) => discards += 1,
                    Err(e) => panic!("unexpected eigenangle failure: {e}"),
                }
            }
            (out, discards)
        })
        .collect();

    let mut samples = Vec::with_capacity(n_samples * rank);
    let mut discards = 0;
    for (chunk, d) in chunks {
        samples.extend_from_slice(&chunk);
        discards += d;
    }
    let count = samples.len() / rank;
    Ok(RadialSampleBatch {
        rs: rs.clone(),
        side: Side::Group,
        samples,
        count,
        discards,
        provenance: SeedProvenance {
            master_seed,
            chunk_size: CHUNK as u32,
            n_streams: n_chunks as u32,
        },
    })
}

/// Reduces raw eigenangles (branch (-pi, pi], sum in 2 pi Z) to the
/// dominant alcove: shift the right number of entries by 2 pi to reach sum
/// zero, then sort.  The resulting spread never exceeds 2 pi, so sorting
/// lands exactly in the fundamental domain.
fn alcove_reduce<T: Real>(rs: &RootSystem<T>, mut angles: Vec<T>) -> CartanPoint<T> {
    let tau = T::of(2.0 * std::f64::consts::PI);
    let sum = kahan_sum(angles.iter().copied());
    let k = (sum / tau).to_f64_lossy().round() as i64;
    if k != 0 {
        // Move the k largest (or |k| smallest) entries by one period.
        let mut order: Vec<usize> = (0..angles.len()).collect();
        order.sort_by(|&a, &b| {
            angles[b].partial_cmp(&angles[a]).unwrap_or(std::cmp::Ordering::Equal)
        });
        if k > 0 {
            for &i in order.iter().take(k as usize) {
                angles[i] -= tau;
            }
        } else {
            for &i in order.iter().rev().take(k.unsigned_abs() as usize) {
                angles[i] += tau;
            }
        }
    }
    angles.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    rs.eigenvalues_to_point(&angles)
}

/// Diagnostic sampler: radial parts of standard Gaussian algebra elements.
/// The radial law has the closed form c (2 pi)^{-dim/2} exp(-|H|^2/2) pi(H)^2
/// with c the Weyl integration constant, which makes this the one-shot
/// cross-check coupling the eigensolver, the coordinates and pi together.
pub fn gaussian_algebra_sample<T: Real>(
    rs: &RootSystem<T>,
    n_samples: usize,
    master_seed: u64,
) -> Result<RadialSampleBatch<T>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let rank = rs.rank();
    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunks: Vec<(Vec<T>, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(ci as u64);
            let take = CHUNK.min(n_samples - ci * CHUNK);
            let mut out = Vec::with_capacity(take * rank);
            let mut discards = 0usize;
            for _ in 0..take {
                let x = gaussian_algebra_element(rs, &mut rng);
                match radial_part(rs, &x) {
                    Ok(h) => out.extend_from_slice(h.coords()),
                    Err(Error::EigenFailure { .. }) => discards += 1,
                    Err(e) => panic!("unexpected radial failure: {e}"),
                }
            }
            (out, discards)
        })
        .collect();
    let mut samples = Vec::with_capacity(n_samples * rank);
    let mut discards = 0;
    for (chunk, d) in chunks {
        samples.extend_from_slice(&chunk);
        discards += d;
    }
    let count = samples.len() / rank;
    Ok(RadialSampleBatch {
        rs: rs.clone(),
        side: Side::Algebra,
        samples,
        count,
        discards,
        provenance: SeedProvenance {
            master_seed,
            chunk_size: CHUNK as u32,
            n_streams: n_chunks as u32,
        },
    })
}

/// Standard Gaussian on the algebra: iid unit normals in any orthonormal
/// basis for -Tr(XY).
fn gaussian_algebra_element<T: Real, R: Rng + ?Sized>(
    rs: &RootSystem<T>,
    rng: &mut R,
) -> AlgebraElement<T> {
    let r = rs.rank();
    let draw = |rng: &mut R| T::of(rng.sample::<f64, _>(StandardNormal));
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    let matrix = match rs.lie_type() {
        LieType::A => {
            let n = r + 1;
            let mut m = Mat::zeros(n);
            let theta: Vec<T> = (0..n).map(|_| draw(rng)).collect();
            let mean = kahan_sum(theta.iter().copied()) / T::of(n as f64);
            for j in 0..n {
                m[(j, j)] = Complex::new(T::zero(), theta[j] - mean);
            }
            for j in 0..n {
                for k in j + 1..n {
                    let a = draw(rng) * inv_sqrt2;
                    let b = draw(rng) * inv_sqrt2;
                    m[(j, k)] = Complex::new(a, b);
                    m[(k, j)] = Complex::new(-a, b);
                }
            }
            m
        }
        LieType::B | LieType::D => {
            let dim = if rs.lie_type() == LieType::B { 2 * r + 1 } else { 2 * r };
            let mut m = Mat::zeros(dim);
            for j in 0..dim {
                for k in j + 1..dim {
                    let a = draw(rng) * inv_sqrt2;
                    m[(j, k)] = Complex::new(a, T::zero());
                    m[(k, j)] = Complex::new(-a, T::zero());
                }
            }
            m
        }
        LieType::C => {
            let half = T::of(0.5);
            let mut q: Mat<Quat<T>> = Mat::zeros(r);
            for a in 0..r {
                q[(a, a)] = Quat::new(
                    T::zero(),
                    draw(rng) * inv_sqrt2,
                    draw(rng) * inv_sqrt2,
                    draw(rng) * inv_sqrt2,
                );
                for b in a + 1..r {
                    let v = Quat::new(
                        draw(rng) * half,
                        draw(rng) * half,
                        draw(rng) * half,
                        draw(rng) * half,
                    );
                    q[(a, b)] = v;
                    q[(b, a)] = -v.conj();
                }
            }
            embed_quaternionic(&q)
        }
    };
    AlgebraElement { matrix }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weylconst::weyl_integration_constant;

    fn rs(t: LieType, r: usize) -> RootSystem<f64> {
        RootSystem::build(t, r).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn haar_samples_are_unitary_with_unit_determinant() {
        let mut r = rng(1);
        for sys in [
            rs(LieType::A, 2),
            rs(LieType::B, 2),
            rs(LieType::C, 2),
            rs(LieType::D, 3),
        ] {
            for _ in 0..25 {
                let g = haar_sample(&sys, &mut r);
                assert!(g.unitarity_defect() < 1e-10, "{}", sys.lie_type());
                let d = determinant(g.matrix());
                assert!(
                    (d - Complex::new(1.0, 0.0)).abs_sqr().sqrt() < 1e-9,
                    "det != 1 for {}",
                    sys.lie_type()
                );
            }
        }
    }

    #[test]
    fn orthogonal_samples_are_real() {
        let mut r = rng(2);
        let so5 = rs(LieType::B, 2);
        for _ in 0..10 {
            let g = haar_sample(&so5, &mut r);
            let m = g.matrix();
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    assert_eq!(m[(i, j)].im, 0.0);
                }
            }
        }
    }

    #[test]
    fn symplectic_samples_preserve_the_symplectic_form() {
        let mut r = rng(3);
        let sp2 = rs(LieType::C, 2);
        let n = 4;
        // J: interleaved 2x2 blocks [[0,1],[-1,0]].
        let j = Mat::from_fn(n, |a, b| {
            if a / 2 == b / 2 {
                if a % 2 == 0 && b % 2 == 1 {
                    Complex::new(1.0, 0.0)
                } else if a % 2 == 1 && b % 2 == 0 {
                    Complex::new(-1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        for _ in 0..10 {
            let g = haar_sample(&sp2, &mut r);
            // g J g^T = J, with a plain transpose.
            let gt = Mat::from_fn(n, |a, b| g.matrix()[(b, a)]);
            let lhs = g.matrix().mul(&j).mul(&gt);
            for a in 0..n {
                for b in 0..n {
                    assert!((lhs[(a, b)] - j[(a, b)]).abs_sqr().sqrt() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn haar_mean_vanishes() {
        let mut r = rng(4);
        let su3 = rs(LieType::A, 2);
        let n = 2000;
        let mut acc: Mat<Complex<f64>> = Mat::zeros(3);
        for _ in 0..n {
            acc.add_assign_mat(haar_sample(&su3, &mut r).matrix());
        }
        acc.scale_entries(1.0 / n as f64);
        let bound = 5.0 / (n as f64).sqrt();
        for i in 0..3 {
            for j in 0..3 {
                assert!(acc[(i, j)].abs_sqr().sqrt() < bound);
            }
        }
    }

    #[test]
    fn su2_entry_modulus_squared_is_uniform() {
        // |g_00|^2 of a Haar SU(2) element is uniform on [0,1].
        let mut r = rng(5);
        let su2 = rs(LieType::A, 1);
        let n = 10_000;
        let mut vals: Vec<f64> = (0..n)
            .map(|_| {
                let g = haar_sample(&su2, &mut r);
                g.matrix()[(0, 0)].abs_sqr()
            })
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, v) in vals.iter().enumerate() {
            let emp_hi = (i + 1) as f64 / n as f64;
            let emp_lo = i as f64 / n as f64;
            ks = ks.max((emp_hi - v).abs()).max((v - emp_lo).abs());
        }
        // 1% KS critical value is about 1.63/sqrt(n).
        assert!(ks < 1.63 / (n as f64).sqrt(), "ks = {ks}");
    }

    #[test]
    fn realize_radial_round_trip_on_dominant_points() {
        let mut r = rng(6);
        for sys in [
            rs(LieType::A, 1),
            rs(LieType::A, 3),
            rs(LieType::B, 2),
            rs(LieType::C, 3),
            rs(LieType::D, 2),
            rs(LieType::D, 3),
        ] {
            for _ in 0..25 {
                let raw = CartanPoint::new(
                    (0..sys.rank()).map(|_| r.gen_range(-2.0..2.0)).collect(),
                );
                let x = sys.project_to_dominant(&raw);
                let a = realize(&sys, &x);
                assert!(a.skew_defect() < 1e-12);
                let back = radial_part(&sys, &a).unwrap();
                for (u, v) in x.coords().iter().zip(back.coords()) {
                    assert!(
                        (u - v).abs() < 1e-10,
                        "round trip failed for {}{}: {:?} vs {:?}",
                        sys.lie_type(),
                        sys.rank(),
                        x.coords(),
                        back.coords()
                    );
                }
            }
        }
    }

    #[test]
    fn type_d_round_trip_keeps_negative_parity() {
        let d3 = rs(LieType::D, 3);
        let x = CartanPoint::new(vec![2.0, 1.0, -0.5]);
        assert!(d3.is_dominant(&x, 1e-12));
        let back = radial_part(&d3, &realize(&d3, &x)).unwrap();
        assert!((back.coords()[2] + 0.5).abs() < 1e-12, "{:?}", back.coords());
    }

    #[test]
    fn single_orbit_samples_reproduce_the_representative() {
        for sys in [rs(LieType::A, 2), rs(LieType::B, 2), rs(LieType::C, 2), rs(LieType::D, 3)] {
            let x = sys.project_to_dominant(&CartanPoint::new(
                (0..sys.rank()).map(|i| 1.0 + i as f64 * 0.3).collect(),
            ));
            let cfg = OrbitConfig::new(sys.clone(), vec![x.clone()]).unwrap();
            let batch = sample_orbit_sum(&cfg, 200, 7).unwrap();
            assert_eq!(batch.len(), 200);
            for s in batch.iter() {
                for (a, b) in s.iter().zip(x.coords()) {
                    assert!((a - b).abs() < 1e-8, "{}", sys.lie_type());
                }
            }
        }
    }

    #[test]
    fn su2_two_orbit_radial_cdf_matches_the_triangle_law() {
        let su2 = rs(LieType::A, 1);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let x = su2.eigenvalues_to_point(&[a, -a]); // |X| = 1
        assert!((x.norm() - 1.0).abs() < 1e-12);
        let cfg = OrbitConfig::new(su2, vec![x.clone(), x]).unwrap();
        let n = 100_000;
        let batch = sample_orbit_sum(&cfg, n, 8).unwrap();
        let mut norms: Vec<f64> = batch.iter().map(|s| s[0]).collect();
        norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, t) in norms.iter().enumerate() {
            let model = (t * t / 4.0).clamp(0.0, 1.0);
            let emp_hi = (i + 1) as f64 / n as f64;
            let emp_lo = i as f64 / n as f64;
            ks = ks.max((emp_hi - model).abs()).max((model - emp_lo).abs());
        }
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn orbit_sums_respect_support_and_chamber() {
        let su3 = rs(LieType::A, 2);
        let x1 = su3.eigenvalues_to_point(&[1.0, 0.0, -1.0]);
        let x2 = su3.eigenvalues_to_point(&[0.7, 0.1, -0.8]);
        let cfg = OrbitConfig::new(su3.clone(), vec![x1, x2]).unwrap();
        let bound = cfg.radius_sum() + 1e-10;
        let batch = sample_orbit_sum(&cfg, 3000, 9).unwrap();
        for i in 0..batch.len() {
            let p = batch.point(i);
            assert!(su3.is_dominant(&p, 1e-9));
            assert!(p.norm() <= bound);
        }
    }

    #[test]
    fn batches_are_bit_identical_across_worker_counts() {
        let su3 = rs(LieType::A, 2);
        let x = su3.eigenvalues_to_point(&[1.0, 0.0, -1.0]);
        let cfg = OrbitConfig::new(su3, vec![x.clone(), x]).unwrap();
        let n = 3 * CHUNK / 2; // spans chunk boundary
        let base = sample_orbit_sum(&cfg, n, 10).unwrap();
        let again = sample_orbit_sum(&cfg, n, 10).unwrap();
        assert_eq!(base.samples, again.samples);
        for workers in [1usize, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            let alt = pool.install(|| sample_orbit_sum(&cfg, n, 10).unwrap());
            assert_eq!(base.samples, alt.samples, "workers = {workers}");
        }
        let other_seed = sample_orbit_sum(&cfg, n, 11).unwrap();
        assert_ne!(base.samples, other_seed.samples);
    }

    #[test]
    fn left_translation_leaves_the_law_unchanged() {
        let su2 = rs(LieType::A, 1);
        let x = su2.eigenvalues_to_point(&[1.0, -1.0]);
        let cfg = OrbitConfig::new(su2.clone(), vec![x.clone(), x]).unwrap();
        let h = haar_sample(&su2, &mut rng(123));
        let n = 50_000;
        let plain = sample_orbit_sum(&cfg, n, 12).unwrap();
        let moved = sample_orbit_sum_translated(&cfg, n, 12, Some(&h)).unwrap();
        let mut a: Vec<f64> = plain.iter().map(|s| s[0]).collect();
        let mut b: Vec<f64> = moved.iter().map(|s| s[0]).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // Two-sample KS; 1% critical value.
        let mut ks = 0.0f64;
        let (mut i, mut j) = (0usize, 0usize);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            ks = ks.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        let crit = 1.63 * (2.0 / n as f64).sqrt();
        assert!(ks < crit, "ks = {ks}, crit = {crit}");
    }

    #[test]
    fn conjugacy_product_of_one_class_is_its_angle_vector() {
        let su3 = rs(LieType::A, 2);
        let x = su3.eigenvalues_to_point(&[0.9, 0.1, -1.0]);
        let cfg = OrbitConfig::new(su3.clone(), vec![x.clone()]).unwrap();
        let batch = sample_conjugacy_product(&cfg, 100, 13).unwrap();
        assert_eq!(batch.side(), Side::Group);
        for i in 0..batch.len() {
            let p = batch.point(i);
            for (u, v) in p.coords().iter().zip(x.coords()) {
                assert!((u - v).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn conjugacy_samples_live_in_the_alcove_with_zero_angle_sum() {
        let su2 = rs(LieType::A, 1);
        let x = su2.eigenvalues_to_point(&[2.0, -2.0]);
        let cfg = OrbitConfig::new(su2.clone(), vec![x.clone(), x]).unwrap();
        let batch = sample_conjugacy_product(&cfg, 5000, 14).unwrap();
        let alcove_edge = std::f64::consts::SQRT_2 * std::f64::consts::PI;
        for i in 0..batch.len() {
            let p = batch.point(i);
            let theta = su2.point_to_eigenvalues(&p);
            assert!(theta.iter().sum::<f64>().abs() < 1e-8);
            assert!(p.coords()[0] >= -1e-9);
            assert!(p.coords()[0] <= alcove_edge + 1e-9);
        }
    }

    #[test]
    fn group_side_rejects_non_type_a() {
        let b2 = rs(LieType::B, 2);
        let x = b2.angles_to_point(&[1.0, 0.5]);
        let cfg = OrbitConfig::new(b2, vec![x]).unwrap();
        assert!(matches!(
            sample_conjugacy_product(&cfg, 10, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn gaussian_radial_law_matches_chi_three_in_rank_one() {
        // For su(2) the radial norm of a Gaussian algebra element is a
        // chi(3) variable; compare empirical and exact CDF.
        let su2 = rs(LieType::A, 1);
        let n = 100_000;
        let batch = gaussian_algebra_sample(&su2, n, 15).unwrap();
        let mut norms: Vec<f64> = batch.iter().map(|s| s[0]).collect();
        norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let chi3_cdf = |t: f64| {
            // erf(t/sqrt2) - sqrt(2/pi) t exp(-t^2/2), via the error
            // function's Abramowitz--Stegun rational approximation.
            let z = t / std::f64::consts::SQRT_2;
            let a = [0.254829592, -0.284496736, 1.421413741, -1.453152027, 1.061405429];
            let p = 0.3275911;
            let s = 1.0 / (1.0 + p * z);
            let mut poly = 0.0;
            for &c in a.iter().rev() {
                poly = poly * s + c;
            }
            let erf = 1.0 - poly * s * (-z * z).exp();
            erf - (2.0 / std::f64::consts::PI).sqrt() * t * (-t * t / 2.0).exp()
        };
        let mut ks = 0.0f64;
        for (i, t) in norms.iter().enumerate() {
            let model = chi3_cdf(*t).clamp(0.0, 1.0);
            ks = ks.max(((i + 1) as f64 / n as f64 - model).abs());
        }
        // Loose gate: the erf approximation itself is only good to ~1e-7,
        // and 1% far exceeds both error sources.
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn gaussian_pi_squared_average_matches_moment_ratio() {
        // Sample law on the chamber is proportional to exp(-|H|^2/2) pi^2,
        // so E[pi^2] over samples equals E[pi^4]/E[pi^2] over the plain
        // Gaussian.  This couples eigensolver, coordinates and pi per type.
        let cases = [
            (LieType::A, 2, 16u64),
            (LieType::B, 2, 17),
            (LieType::C, 2, 18),
            (LieType::D, 3, 19),
        ];
        for (t, r, seed) in cases {
            let sys = rs(t, r);
            let n = 200_000;
            let batch = gaussian_algebra_sample(&sys, n, seed).unwrap();
            let vals: Vec<f64> = (0..batch.len())
                .map(|i| {
                    let p = sys.root_product(&batch.point(i));
                    p * p
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / vals.len() as f64;
            let expect = expectation_ratio(t, r);
            let tolerance = 5.0 * (var / n as f64).sqrt() + 1e-9;
            assert!(
                (mean - expect).abs() < tolerance,
                "{t:?}{r}: mean {mean}, expect {expect}, tol {tolerance}"
            );
        }
    }

    fn expectation_ratio(t: LieType, r: usize) -> f64 {
        use crate::weylconst::{gaussian_pi_pow_moment, gaussian_pi_sq_moment};
        use num_traits::ToPrimitive;
        let num = gaussian_pi_pow_moment(t, r, 2).to_f64().unwrap();
        let den = gaussian_pi_sq_moment(t, r).to_f64().unwrap();
        num / den
    }

    #[test]
    fn type_d_gaussian_hits_both_parities() {
        let d2 = rs(LieType::D, 2);
        let batch = gaussian_algebra_sample(&d2, 20_000, 20).unwrap();
        let neg = (0..batch.len())
            .filter(|&i| batch.sample(i)[1] < 0.0)
            .count() as f64
            / batch.len() as f64;
        assert!((neg - 0.5).abs() < 0.02, "negative-parity fraction {neg}");
    }

    #[test]
    fn weyl_constant_consistency_against_su2_quadrature() {
        // Integrate c e^{-u^2/2}/(2pi)^{3/2} pi(u)^2 over the chamber and
        // compare with 1; ties the exact constant to the radial law the
        // Gaussian sampler obeys.
        let su2 = rs(LieType::A, 1);
        let c = weyl_integration_constant(&su2);
        let steps = 20_000;
        let hi = 12.0;
        let dx = hi / steps as f64;
        let mut acc = 0.0;
        for i in 0..steps {
            let u = (i as f64 + 0.5) * dx;
            let pi_u = su2.root_product(&CartanPoint::new(vec![u]));
            acc += (-u * u / 2.0).exp() * pi_u * pi_u * dx;
        }
        let total = c * acc / (2.0 * std::f64::consts::PI).powf(1.5);
        assert!((total - 1.0).abs() < 1e-6, "total = {total}");
    }
}
