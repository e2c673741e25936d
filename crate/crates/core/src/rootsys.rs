//! Classical root systems in fixed Cartan coordinates.
//!
//! All geometry lives in one coordinate system: an orthonormal basis of the
//! Cartan subalgebra t with respect to the inner product -Tr(XY) on the
//! compact matrix realization.  Positive roots are stored as covectors acting
//! by dot product on those coordinates, so the scalar weights pi, j and
//! |Delta|^2, the lattice Gamma, chamber projection and eigenvalue
//! conversion all agree without per-call convention juggling.
//!
//! Realizations: type A_{n-1} is su(n) with eigenvalue coordinates summing
//! to zero, mapped to orthonormal coordinates by Helmert vectors; B_r, C_r
//! and D_r use rotation-angle coordinates theta with u = sqrt(2) theta.
//! Gamma is 2 pi times the coroot lattice, the kernel of exp restricted to
//! t for the simply connected group.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{kahan_sum, Real};

/// Supported families of compact simple algebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LieType {
    A,
    B,
    C,
    D,
}

impl LieType {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'A' => Some(LieType::A),
            'B' => Some(LieType::B),
            'C' => Some(LieType::C),
            'D' => Some(LieType::D),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            LieType::A => 'A',
            LieType::B => 'B',
            LieType::C => 'C',
            LieType::D => 'D',
        }
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An element of the Cartan subalgebra in the fixed orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanPoint<T> {
    coords: Vec<T>,
}

impl<T: Real> CartanPoint<T> {
    pub fn new(coords: Vec<T>) -> Self {
        CartanPoint { coords }
    }

    pub fn zero(rank: usize) -> Self {
        CartanPoint { coords: vec![T::zero(); rank] }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean norm; equals sqrt(-Tr X^2) of any matrix realization.
    pub fn norm(&self) -> T {
        kahan_sum(self.coords.iter().map(|&u| u * u)).sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        CartanPoint::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn scaled(&self, s: T) -> Self {
        CartanPoint::new(self.coords.iter().map(|&a| a * s).collect())
    }
}

/// Default wall tolerance for a point of the given norm: evaluations with
/// |alpha(X)| below this count as exactly zero.
pub fn regularity_tol<T: Real>(x_norm: T) -> T {
    T::of(1e-9) * x_norm.max(T::one())
}

/// Root data for one classical algebra.  Immutable after construction; all
/// operations are pure, so values can be shared freely across workers.
#[derive(Clone, Debug)]
pub struct RootSystem<T> {
    lie_type: LieType,
    rank: usize,
    dim_g: usize,
    positive_roots: Vec<Vec<T>>,
    simple_root_indices: Vec<usize>,
    weyl_group_order: u64,
    gamma_basis: Vec<Vec<T>>,
    /// Type A only: rows are the Helmert vectors e_m of length n = rank+1.
    helmert: Option<Vec<Vec<T>>>,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// sin(x)/x with the removable singularity filled in by its Taylor series;
/// the series cutoff avoids cancellation loss right at chamber walls.
fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::of(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::of(6.0) + x2 * x2 / T::of(120.0)
    } else {
        x.sin() / x
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl<T: Real> RootSystem<T> {
    /// Constructs the root system for the given family and rank.
    ///
    /// Supported: A with rank 1..=6, B/C/D with rank 2..=4.
    pub fn build(lie_type: LieType, rank: usize) -> Result<Self> {
        let ok = match lie_type {
            LieType::A => (1..=6).contains(&rank),
            LieType::B | LieType::C | LieType::D => (2..=4).contains(&rank),
        };
        if !ok {
            return Err(Error::UnsupportedType { lie_type: lie_type.as_char(), rank });
        }
        let r = rank;
        let sqrt2 = T::SQRT_2();
        let inv_sqrt2 = T::one() / sqrt2;

        let mut positive_roots: Vec<Vec<T>> = Vec::new();
        let mut simple_root_indices: Vec<usize> = Vec::new();
        let mut gamma_basis: Vec<Vec<T>> = Vec::new();
        let mut helmert = None;

        // e_i as a coordinate vector.
        let axis = |i: usize, scale: T| -> Vec<T> {
            let mut v = vec![T::zero(); r];
            v[i] = scale;
            v
        };
        let axis_pair = |i: usize, j: usize, si: T, sj: T| -> Vec<T> {
            let mut v = vec![T::zero(); r];
            v[i] = si;
            v[j] = sj;
            v
        };

        let (dim_g, weyl_group_order) = match lie_type {
            LieType::A => {
                let n = r + 1;
                // Helmert orthonormal basis of the sum-zero subspace of R^n:
                // e_m has m leading entries 1/sqrt(m(m+1)) and then -m/sqrt(m(m+1)).
                let mut rows = Vec::with_capacity(r);
                for m in 1..=r {
                    let norm = T::of((m * (m + 1)) as f64).sqrt();
                    let mut row = vec![T::zero(); n];
                    for entry in row.iter_mut().take(m) {
                        *entry = T::one() / norm;
                    }
                    row[m] = -T::of(m as f64) / norm;
                    rows.push(row);
                }
                // Root alpha_{jk}(H) = theta_j - theta_k as a covector on u.
                for j in 0..n {
                    for k in j + 1..n {
                        let cov: Vec<T> =
                            rows.iter().map(|e| e[j] - e[k]).collect();
                        if k == j + 1 {
                            simple_root_indices.push(positive_roots.len());
                        }
                        positive_roots.push(cov);
                    }
                }
                // Simple coroots coincide with simple roots (all |alpha|^2 = 2).
                for &si in &simple_root_indices {
                    gamma_basis
                        .push(positive_roots[si].iter().map(|&x| x * T::of(2.0) * T::PI()).collect());
                }
                helmert = Some(rows);
                (n * n - 1, factorial(n))
            }
            LieType::B => {
                for i in 0..r {
                    for j in i + 1..r {
                        if j == i + 1 {
                            simple_root_indices.push(positive_roots.len());
                        }
                        positive_roots.push(axis_pair(i, j, inv_sqrt2, -inv_sqrt2));
                    }
                }
                for i in 0..r {
                    for j in i + 1..r {
                        positive_roots.push(axis_pair(i, j, inv_sqrt2, inv_sqrt2));
                    }
                }
                for i in 0..r {
                    if i == r - 1 {
                        simple_root_indices.push(positive_roots.len());
                    }
                    positive_roots.push(axis(i, inv_sqrt2));
                }
                // Simple coroots: sqrt2 (e_i - e_{i+1}) and 2 sqrt2 e_r.
                let tau = T::of(2.0) * T::PI();
                for i in 0..r - 1 {
                    gamma_basis.push(axis_pair(i, i + 1, sqrt2 * tau, -sqrt2 * tau));
                }
                gamma_basis.push(axis(r - 1, T::of(2.0) * sqrt2 * tau));
                (r * (2 * r + 1), (1u64 << r) * factorial(r))
            }
            LieType::C => {
                for i in 0..r {
                    for j in i + 1..r {
                        if j == i + 1 {
                            simple_root_indices.push(positive_roots.len());
                        }
                        positive_roots.push(axis_pair(i, j, inv_sqrt2, -inv_sqrt2));
                    }
                }
                for i in 0..r {
                    for j in i + 1..r {
                        positive_roots.push(axis_pair(i, j, inv_sqrt2, inv_sqrt2));
                    }
                }
                for i in 0..r {
                    if i == r - 1 {
                        simple_root_indices.push(positive_roots.len());
                    }
                    positive_roots.push(axis(i, sqrt2));
                }
                let tau = T::of(2.0) * T::PI();
                for i in 0..r - 1 {
                    gamma_basis.push(axis_pair(i, i + 1, sqrt2 * tau, -sqrt2 * tau));
                }
                gamma_basis.push(axis(r - 1, sqrt2 * tau));
                (r * (2 * r + 1), (1u64 << r) * factorial(r))
            }
            LieType::D => {
                for i in 0..r {
                    for j in i + 1..r {
                        if j == i + 1 {
                            simple_root_indices.push(positive_roots.len());
                        }
                        positive_roots.push(axis_pair(i, j, inv_sqrt2, -inv_sqrt2));
                    }
                }
                let plus_start = positive_roots.len();
                for i in 0..r {
                    for j in i + 1..r {
                        positive_roots.push(axis_pair(i, j, inv_sqrt2, inv_sqrt2));
                    }
                }
                // The branch node: e_{r-1} + e_r sits among the plus roots.
                let branch = plus_start
                    + (0..r)
                        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
                        .position(|(i, j)| i == r - 2 && j == r - 1)
                        .expect("rank >= 2");
                simple_root_indices.push(branch);
                let tau = T::of(2.0) * T::PI();
                for i in 0..r - 1 {
                    gamma_basis.push(axis_pair(i, i + 1, sqrt2 * tau, -sqrt2 * tau));
                }
                gamma_basis.push(axis_pair(r - 2, r - 1, sqrt2 * tau, sqrt2 * tau));
                (r * (2 * r - 1), (1u64 << (r - 1)) * factorial(r))
            }
        };

        debug_assert_eq!(positive_roots.len(), (dim_g - r) / 2);
        debug_assert_eq!(simple_root_indices.len(), r);

        Ok(RootSystem {
            lie_type,
            rank,
            dim_g,
            positive_roots,
            simple_root_indices,
            weyl_group_order,
            gamma_basis,
            helmert,
        })
    }

    pub fn lie_type(&self) -> LieType {
        self.lie_type
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim_g(&self) -> usize {
        self.dim_g
    }

    pub fn positive_roots(&self) -> &[Vec<T>] {
        &self.positive_roots
    }

    pub fn simple_root_indices(&self) -> &[usize] {
        &self.simple_root_indices
    }

    /// The chamber normals: H is dominant iff every simple root is >= 0 on it.
    pub fn chamber_normal_covectors(&self) -> impl Iterator<Item = &[T]> {
        self.simple_root_indices
            .iter()
            .map(move |&i| self.positive_roots[i].as_slice())
    }

    pub fn weyl_group_order(&self) -> u64 {
        self.weyl_group_order
    }

    /// Basis of Gamma = exp^{-1}(e) on t, i.e. 2 pi times the coroot lattice.
    pub fn gamma_basis(&self) -> &[Vec<T>] {
        &self.gamma_basis
    }

    /// pi(H): the product of all positive roots evaluated at H.  Sign
    /// alternates across chamber walls; |pi| is Weyl invariant.
    pub fn root_product(&self, h: &CartanPoint<T>) -> T {
        assert_eq!(h.rank(), self.rank);
        let mut p = T::one();
        for alpha in &self.positive_roots {
            p *= dot(alpha, h.coords());
        }
        p
    }

    /// j(H): the analytic square root of the Jacobian of exp, normalized to
    /// j(0) = 1.  Smooth through walls thanks to the sinc continuation.
    pub fn j_factor(&self, h: &CartanPoint<T>) -> T {
        assert_eq!(h.rank(), self.rank);
        let half = T::of(0.5);
        let mut p = T::one();
        for alpha in &self.positive_roots {
            p *= sinc(dot(alpha, h.coords()) * half);
        }
        p
    }

    /// |Delta(exp H)|^2 = (j(H) pi(H))^2, the group-side integration weight.
    pub fn delta_sq(&self, h: &CartanPoint<T>) -> T {
        let v = self.j_factor(h) * self.root_product(h);
        v * v
    }

    /// Dimension of the adjoint orbit through X: the number of roots in the
    /// whole of Phi that do not vanish on X at the given tolerance.
    pub fn orbit_dimension(&self, x: &CartanPoint<T>, tol: T) -> usize {
        assert!(tol > T::zero());
        2 * self
            .positive_roots
            .iter()
            .filter(|alpha| dot(alpha, x.coords()).abs() > tol)
            .count()
    }

    /// True when sin(alpha(X)/2) vanishes only where alpha(X) itself does,
    /// i.e. j(X) != 0 at tolerance.  Under this condition the conjugacy
    /// class of exp X has the same dimension as the adjoint orbit of X.
    pub fn check_dim_equal(&self, x: &CartanPoint<T>, tol: T) -> bool {
        assert!(tol > T::zero());
        let half = T::of(0.5);
        for alpha in &self.positive_roots {
            let a = dot(alpha, x.coords());
            if a.abs() <= tol {
                continue;
            }
            if (a * half).sin().abs() <= tol * (T::one() + a.abs()) {
                return false;
            }
        }
        true
    }

    pub fn is_dominant(&self, h: &CartanPoint<T>, tol: T) -> bool {
        self.chamber_normal_covectors()
            .all(|alpha| dot(alpha, h.coords()) >= -tol)
    }

    /// The unique dominant representative of the Weyl orbit of H.
    ///
    /// Type A sorts eigenvalue coordinates descending; B and C sort absolute
    /// values; D does the same but restores the sign parity on the last
    /// coordinate, since only even numbers of sign flips are available.
    pub fn project_to_dominant(&self, h: &CartanPoint<T>) -> CartanPoint<T> {
        assert_eq!(h.rank(), self.rank);
        match self.lie_type {
            LieType::A => {
                let mut theta = self.point_to_eigenvalues(h);
                theta.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
                self.eigenvalues_to_point(&theta)
            }
            LieType::B | LieType::C => {
                let mut u: Vec<T> = h.coords().iter().map(|&x| x.abs()).collect();
                u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
                CartanPoint::new(u)
            }
            LieType::D => {
                let neg = h.coords().iter().filter(|&&x| x < T::zero()).count();
                let has_zero = h.coords().iter().any(|&x| x == T::zero());
                let mut u: Vec<T> = h.coords().iter().map(|&x| x.abs()).collect();
                u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
                if neg % 2 == 1 && !has_zero {
                    let last = u.len() - 1;
                    u[last] = -u[last];
                }
                CartanPoint::new(u)
            }
        }
    }

    /// Reflection in the k-th simple root (k indexes `simple_root_indices`).
    pub fn reflect_simple(&self, k: usize, h: &CartanPoint<T>) -> CartanPoint<T> {
        let alpha = &self.positive_roots[self.simple_root_indices[k]];
        let len_sq = dot(alpha, alpha);
        let coef = T::of(2.0) * dot(alpha, h.coords()) / len_sq;
        CartanPoint::new(
            h.coords()
                .iter()
                .zip(alpha)
                .map(|(&u, &a)| u - coef * a)
                .collect(),
        )
    }

    /// All lattice points of Gamma within `k_radius` plus the covering
    /// margin, origin included, in a deterministic order (norm, then
    /// lexicographic).  Finite for every radius.
    pub fn gamma_points_near(&self, k_radius: T) -> Vec<CartanPoint<T>> {
        assert!(k_radius >= T::zero());
        let r = self.rank;
        // Covering radius of a lattice is at most half the sum of basis
        // vector lengths; crude but safe at these ranks.
        let margin = kahan_sum(
            self.gamma_basis
                .iter()
                .map(|g| dot(g, g).sqrt()),
        ) * T::of(0.5);
        let reach = k_radius + margin;
        // |m_i| <= ||row_i(B^{-1})|| * reach for points B m in the ball.
        let basis: Vec<Vec<T>> = (0..r)
            .map(|i| (0..r).map(|j| self.gamma_basis[j][i]).collect())
            .collect();
        let inv = invert_small(&basis).expect("lattice basis is invertible");
        let bounds: Vec<i64> = inv
            .iter()
            .map(|row| {
                let norm = dot(row, row).sqrt();
                (norm * reach).to_f64_lossy().floor() as i64 + 1
            })
            .collect();
        let mut points: Vec<CartanPoint<T>> = Vec::new();
        let mut m = vec![-bounds[0]; 1];
        m.clear();
        m.resize(r, 0);
        for i in 0..r {
            m[i] = -bounds[i];
        }
        'outer: loop {
            let coords: Vec<T> = (0..r)
                .map(|i| {
                    let mut s = T::zero();
                    for (j, &mj) in m.iter().enumerate() {
                        s += self.gamma_basis[j][i] * T::of(mj as f64);
                    }
                    s
                })
                .collect();
            let p = CartanPoint::new(coords);
            if p.norm() <= reach {
                points.push(p);
            }
            for i in 0..r {
                m[i] += 1;
                if m[i] <= bounds[i] {
                    continue 'outer;
                }
                m[i] = -bounds[i];
            }
            break;
        }
        points.sort_by(|a, b| {
            a.norm()
                .partial_cmp(&b.norm())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    for (x, y) in a.coords().iter().zip(b.coords()) {
                        match x.partial_cmp(y) {
                            Some(std::cmp::Ordering::Equal) | None => continue,
                            Some(o) => return o,
                        }
                    }
                    std::cmp::Ordering::Equal
                })
        });
        points
    }

    /// Largest exponent for which the L^{2+eps} upgrade is guaranteed:
    /// 2 rank / (dim - rank).
    pub fn eps_max(&self) -> T {
        T::of(2.0 * self.rank as f64) / T::of((self.dim_g - self.rank) as f64)
    }

    /// Fundamental coweight vectors w_k with alpha_i(w_k) = delta_ik over
    /// the simple roots; scaled by 2 pi these are the alcove edge directions.
    pub fn fundamental_coweights(&self) -> Vec<Vec<T>> {
        let mat: Vec<Vec<T>> = self
            .chamber_normal_covectors()
            .map(|a| a.to_vec())
            .collect();
        let inv = invert_small(&mat).expect("simple roots are a basis");
        (0..self.rank)
            .map(|k| (0..self.rank).map(|i| inv[i][k]).collect())
            .collect()
    }

    /// Volume of the fundamental parallelepiped of Gamma.
    pub fn gamma_cell_volume(&self) -> T {
        let basis: Vec<Vec<T>> = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.gamma_basis[j][i]).collect())
            .collect();
        det_small(&basis).abs()
    }

    /// Type A: orthonormal coordinates from the n = rank+1 eigenvalue
    /// coordinates (mean is removed, enforcing the trace-zero constraint).
    pub fn eigenvalues_to_point(&self, theta: &[T]) -> CartanPoint<T> {
        let rows = self.helmert.as_ref().expect("eigenvalue coordinates are type A");
        assert_eq!(theta.len(), self.rank + 1);
        let n = T::of(theta.len() as f64);
        let mean = kahan_sum(theta.iter().copied()) / n;
        let coords = rows
            .iter()
            .map(|e| {
                let mut s = T::zero();
                for (&t, &c) in theta.iter().zip(e) {
                    s += (t - mean) * c;
                }
                s
            })
            .collect();
        CartanPoint::new(coords)
    }

    /// Type A: eigenvalue coordinates of a Cartan point.
    pub fn point_to_eigenvalues(&self, h: &CartanPoint<T>) -> Vec<T> {
        let rows = self.helmert.as_ref().expect("eigenvalue coordinates are type A");
        let n = self.rank + 1;
        (0..n)
            .map(|j| {
                let mut s = T::zero();
                for (&u, e) in h.coords().iter().zip(rows) {
                    s += u * e[j];
                }
                s
            })
            .collect()
    }

    /// B/C/D: orthonormal coordinates from the r rotation angles.
    pub fn angles_to_point(&self, theta: &[T]) -> CartanPoint<T> {
        assert!(self.helmert.is_none(), "rotation angles are for types B, C, D");
        assert_eq!(theta.len(), self.rank);
        CartanPoint::new(theta.iter().map(|&t| t * T::SQRT_2()).collect())
    }

    pub fn point_to_angles(&self, h: &CartanPoint<T>) -> Vec<T> {
        assert!(self.helmert.is_none(), "rotation angles are for types B, C, D");
        h.coords().iter().map(|&u| u / T::SQRT_2()).collect()
    }

    /// Key-value text record used by the CLI and golden tests.
    pub fn summary(&self) -> String {
        format!(
            "lie_type={}\nrank={}\ndim_g={}\nn_positive_roots={}\nweyl_group_order={}\neps_max={}\n",
            self.lie_type,
            self.rank,
            self.dim_g,
            self.positive_roots.len(),
            self.weyl_group_order,
            self.eps_max().to_f64_lossy(),
        )
    }
}

/// Gauss-Jordan inverse for the tiny real systems here (lattice bases and
/// simple-root matrices, rank <= 6).  None when singular.
fn invert_small<T: Real>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a.iter().cloned().collect();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[i][k].abs() > m[piv][k].abs() {
                piv = i;
            }
        }
        if m[piv][k].abs() <= T::epsilon() {
            return None;
        }
        m.swap(k, piv);
        inv.swap(k, piv);
        let d = m[k][k];
        for j in 0..n {
            m[k][j] /= d;
            inv[k][j] /= d;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k];
            if f == T::zero() {
                continue;
            }
            for j in 0..n {
                let mk = m[k][j];
                let ik = inv[k][j];
                m[i][j] -= f * mk;
                inv[i][j] -= f * ik;
            }
        }
    }
    Some(inv)
}

fn det_small<T: Real>(a: &[Vec<T>]) -> T {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut det = T::one();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[i][k].abs() > m[piv][k].abs() {
                piv = i;
            }
        }
        if m[piv][k].abs() <= T::epsilon() {
            return T::zero();
        }
        if piv != k {
            m.swap(k, piv);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let mk = m[k][j];
                m[i][j] -= f * mk;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rs(t: LieType, r: usize) -> RootSystem<f64> {
        RootSystem::build(t, r).unwrap()
    }

    fn all_supported() -> Vec<RootSystem<f64>> {
        let mut v = Vec::new();
        for r in 1..=6 {
            v.push(rs(LieType::A, r));
        }
        for t in [LieType::B, LieType::C, LieType::D] {
            for r in 2..=4 {
                v.push(rs(t, r));
            }
        }
        v
    }

    fn random_point(r: usize, rng: &mut ChaCha8Rng) -> CartanPoint<f64> {
        CartanPoint::new((0..r).map(|_| rng.gen_range(-2.0..2.0)).collect())
    }

    #[test]
    fn dimensions_and_counts_match_the_classical_tables() {
        let a1 = rs(LieType::A, 1);
        assert_eq!(a1.dim_g(), 3);
        assert_eq!(a1.positive_roots().len(), 1);
        assert_eq!(a1.weyl_group_order(), 2);

        let a2 = rs(LieType::A, 2);
        assert_eq!(a2.dim_g(), 8);
        assert_eq!(a2.positive_roots().len(), 3);
        assert_eq!(a2.weyl_group_order(), 6);

        let b2 = rs(LieType::B, 2);
        assert_eq!(b2.dim_g(), 10);
        assert_eq!(b2.positive_roots().len(), 4);
        assert_eq!(b2.weyl_group_order(), 8);

        for sys in all_supported() {
            assert_eq!(
                sys.positive_roots().len(),
                (sys.dim_g() - sys.rank()) / 2,
                "{}{}",
                sys.lie_type(),
                sys.rank()
            );
            assert_eq!(sys.simple_root_indices().len(), sys.rank());
        }
    }

    #[test]
    fn unsupported_inputs_are_rejected() {
        assert!(matches!(
            RootSystem::<f64>::build(LieType::A, 7),
            Err(Error::UnsupportedType { lie_type: 'A', rank: 7 })
        ));
        assert!(RootSystem::<f64>::build(LieType::D, 1).is_err());
        assert!(RootSystem::<f64>::build(LieType::B, 5).is_err());
        assert!(LieType::from_char('E').is_none());
    }

    #[test]
    fn every_positive_root_is_a_nonnegative_integer_combination_of_simples() {
        for sys in all_supported() {
            let simples: Vec<Vec<f64>> = sys
                .chamber_normal_covectors()
                .map(|a| a.to_vec())
                .collect();
            let inv = invert_small(&simples).unwrap();
            for alpha in sys.positive_roots() {
                // coefficients c with sum_k c_k alpha_k = alpha
                for i in 0..sys.rank() {
                    let c: f64 = (0..sys.rank())
                        .map(|j| alpha[j] * inv[j][i])
                        .sum();
                    assert!(c > -1e-9, "negative coefficient in {}{}", sys.lie_type(), sys.rank());
                    assert!(
                        (c - c.round()).abs() < 1e-9,
                        "non-integer coefficient {c} in {}{}",
                        sys.lie_type(),
                        sys.rank()
                    );
                }
            }
        }
    }

    #[test]
    fn su2_root_product_golden_values() {
        let a1 = rs(LieType::A, 1);
        // alpha(H) = 2 corresponds to eigenvalues (1, -1).
        let h = a1.eigenvalues_to_point(&[1.0, -1.0]);
        assert!((a1.root_product(&h) - 2.0).abs() < 1e-12);
        let wall = CartanPoint::zero(1);
        assert_eq!(a1.root_product(&wall), 0.0);
    }

    #[test]
    fn su3_root_product_positive_on_regular_dominant_points() {
        let a2 = rs(LieType::A, 2);
        let h = a2.eigenvalues_to_point(&[2.0, 0.5, -2.5]);
        // Product of the three eigenvalue gaps.
        let expect = (2.0 - 0.5) * (2.0 + 2.5) * (0.5 + 2.5);
        assert!((a2.root_product(&h) - expect).abs() < 1e-10 * expect);
        assert!(a2.is_dominant(&h, 1e-12));
    }

    #[test]
    fn j_factor_golden_values() {
        for sys in all_supported() {
            let r = sys.rank();
            assert!((sys.j_factor(&CartanPoint::zero(r)) - 1.0).abs() < 1e-15);
        }
        let a1 = rs(LieType::A, 1);
        let h_pi = a1.eigenvalues_to_point(&[
            std::f64::consts::PI / 2.0,
            -std::f64::consts::PI / 2.0,
        ]);
        assert!((a1.j_factor(&h_pi) - 2.0 / std::f64::consts::PI).abs() < 1e-14);
        let h_2pi = h_pi.scaled(2.0);
        assert!(a1.j_factor(&h_2pi).abs() < 1e-14);
    }

    #[test]
    fn delta_sq_golden_and_lattice_zeros() {
        let a1 = rs(LieType::A, 1);
        assert_eq!(a1.delta_sq(&CartanPoint::zero(1)), 0.0);
        let h_pi = a1.eigenvalues_to_point(&[
            std::f64::consts::PI / 2.0,
            -std::f64::consts::PI / 2.0,
        ]);
        assert!((a1.delta_sq(&h_pi) - 4.0).abs() < 1e-12);
        for gamma in a1.gamma_points_near(20.0) {
            assert!(a1.delta_sq(&gamma).abs() < 1e-9, "Delta nonzero at lattice point");
        }
    }

    #[test]
    fn delta_sq_is_gamma_periodic_for_type_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for r in 1..=3 {
            let sys = rs(LieType::A, r);
            let gammas = sys.gamma_points_near(1.0);
            for _ in 0..40 {
                let h = random_point(r, &mut rng);
                let base = sys.delta_sq(&h);
                for g in &gammas {
                    let shifted = sys.delta_sq(&h.add(g));
                    assert!(
                        (shifted - base).abs() < 1e-8 * (1.0 + base.abs()),
                        "periodicity failed at rank {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn orbit_dimensions_match_hand_counts() {
        let a1 = rs(LieType::A, 1);
        let reg = a1.eigenvalues_to_point(&[1.0, -1.0]);
        assert_eq!(a1.orbit_dimension(&reg, 1e-9), 2);
        assert_eq!(a1.orbit_dimension(&CartanPoint::zero(1), 1e-9), 0);

        let a2 = rs(LieType::A, 2);
        let subreg = a2.eigenvalues_to_point(&[1.0, 1.0, -2.0]);
        assert_eq!(a2.orbit_dimension(&subreg, 1e-9), 4);
        let reg3 = a2.eigenvalues_to_point(&[1.0, 0.0, -1.0]);
        assert_eq!(a2.orbit_dimension(&reg3, 1e-9), 6);
        assert_eq!(a2.orbit_dimension(&reg3, 1e-9), a2.dim_g() - a2.rank());
    }

    #[test]
    fn orbit_dimension_counts_pair_with_nonvanishing_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for sys in all_supported() {
            for _ in 0..20 {
                let x = random_point(sys.rank(), &mut rng);
                let tol = 1e-9;
                let nonzero = sys
                    .positive_roots()
                    .iter()
                    .filter(|a| dot(a, x.coords()).abs() > tol)
                    .count();
                assert_eq!(sys.orbit_dimension(&x, tol), 2 * nonzero);
            }
        }
    }

    #[test]
    fn check_dim_equal_detects_sine_zeros_off_the_wall() {
        let a1 = rs(LieType::A, 1);
        assert!(a1.check_dim_equal(&CartanPoint::zero(1), 1e-9));
        let one = a1.eigenvalues_to_point(&[0.5, -0.5]); // alpha = 1
        assert!(a1.check_dim_equal(&one, 1e-9));
        let two_pi = a1.eigenvalues_to_point(&[
            std::f64::consts::PI,
            -std::f64::consts::PI,
        ]); // alpha = 2 pi, sin(pi) = 0
        assert!(!a1.check_dim_equal(&two_pi, 1e-9));
    }

    #[test]
    fn projection_sorts_type_a_eigenvalues() {
        let a2 = rs(LieType::A, 2);
        let h = a2.eigenvalues_to_point(&[1.0, 3.0, -4.0]);
        let dom = a2.project_to_dominant(&h);
        let theta = a2.point_to_eigenvalues(&dom);
        assert!((theta[0] - 3.0).abs() < 1e-12);
        assert!((theta[1] - 1.0).abs() < 1e-12);
        assert!((theta[2] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent_dominant_and_orbit_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for sys in all_supported() {
            for _ in 0..50 {
                let h = random_point(sys.rank(), &mut rng);
                let dom = sys.project_to_dominant(&h);
                assert!(sys.is_dominant(&dom, 1e-12), "{}{}", sys.lie_type(), sys.rank());
                assert!(sys.root_product(&dom) >= -1e-12);
                let again = sys.project_to_dominant(&dom);
                for (a, b) in dom.coords().iter().zip(again.coords()) {
                    assert!((a - b).abs() < 1e-12);
                }
                // Weyl invariants survive: |pi| and the coordinate multiset
                // up to the group action (checked through |pi| and norm).
                assert!(
                    (sys.root_product(&dom).abs() - sys.root_product(&h).abs()).abs()
                        < 1e-8 * (1.0 + sys.root_product(&h).abs())
                );
                assert!((dom.norm() - h.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn type_d_projection_preserves_sign_parity() {
        let d3 = rs(LieType::D, 3);
        let h = CartanPoint::new(vec![-1.0, 0.5, 0.25]);
        let dom = d3.project_to_dominant(&h);
        let prod_before: f64 = h.coords().iter().product();
        let prod_after: f64 = dom.coords().iter().product();
        assert_eq!(prod_before.signum(), prod_after.signum());
        assert!(dom.coords()[0] >= dom.coords()[1]);
        assert!(dom.coords()[1] >= dom.coords()[2].abs());
    }

    #[test]
    fn weyl_reflections_preserve_abs_pi_and_j() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for sys in all_supported() {
            for _ in 0..20 {
                let h = random_point(sys.rank(), &mut rng);
                let pi = sys.root_product(&h).abs();
                let j = sys.j_factor(&h);
                for k in 0..sys.rank() {
                    let hr = sys.reflect_simple(k, &h);
                    assert!(
                        (sys.root_product(&hr).abs() - pi).abs() < 1e-9 * (1.0 + pi),
                        "pi not invariant for {}{}",
                        sys.lie_type(),
                        sys.rank()
                    );
                    assert!(
                        (sys.j_factor(&hr) - j).abs() < 1e-11 * (1.0 + j.abs()),
                        "j not invariant for {}{}",
                        sys.lie_type(),
                        sys.rank()
                    );
                }
            }
        }
    }

    #[test]
    fn su2_gamma_lattice_has_spacing_two_sqrt_two_pi() {
        let a1 = rs(LieType::A, 1);
        let g = &a1.gamma_basis()[0];
        let spacing = 2.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI;
        assert!((g[0].abs() - spacing).abs() < 1e-12);
        assert!((a1.gamma_cell_volume() - spacing).abs() < 1e-12);

        // Radius slightly above one generator: exactly -g, 0, g.
        let pts = a1.gamma_points_near(spacing * 1.05);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].coords()[0], 0.0);
        assert!((pts[1].coords()[0].abs() - spacing).abs() < 1e-12);

        let origin_only = a1.gamma_points_near(0.0);
        assert!(origin_only.iter().any(|p| p.norm() == 0.0));
    }

    #[test]
    fn gamma_point_counts_grow_like_radius_to_the_rank() {
        let a2 = rs(LieType::A, 2);
        let n1 = a2.gamma_points_near(30.0).len() as f64;
        let n2 = a2.gamma_points_near(60.0).len() as f64;
        let ratio = n2 / n1;
        assert!(ratio > 2.5 && ratio < 6.0, "quadratic growth expected, got {ratio}");
    }

    #[test]
    fn gamma_vectors_pair_integrally_with_all_roots() {
        // alpha(gamma) must be a multiple of 2 pi for every root and every
        // lattice vector; this is what makes Delta periodic.
        for sys in all_supported() {
            for gamma in sys.gamma_basis() {
                for alpha in sys.positive_roots() {
                    let v = dot(alpha, gamma) / (2.0 * std::f64::consts::PI);
                    assert!(
                        (v - v.round()).abs() < 1e-9,
                        "non-integral pairing in {}{}",
                        sys.lie_type(),
                        sys.rank()
                    );
                }
            }
        }
    }

    #[test]
    fn eps_max_golden_values() {
        assert!((rs(LieType::A, 1).eps_max() - 1.0).abs() < 1e-15);
        assert!((rs(LieType::A, 2).eps_max() - 2.0 / 3.0).abs() < 1e-15);
        assert!((rs(LieType::B, 2).eps_max() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coweights_are_dual_to_simple_roots() {
        for sys in all_supported() {
            let w = sys.fundamental_coweights();
            let simples: Vec<Vec<f64>> = sys
                .chamber_normal_covectors()
                .map(|a| a.to_vec())
                .collect();
            for (k, wk) in w.iter().enumerate() {
                for (i, alpha) in simples.iter().enumerate() {
                    let want = if i == k { 1.0 } else { 0.0 };
                    assert!((dot(alpha, wk) - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn eigenvalue_round_trip_and_trace_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for r in 1..=4 {
            let sys = rs(LieType::A, r);
            for _ in 0..20 {
                let mut theta: Vec<f64> =
                    (0..=r).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let mean = theta.iter().sum::<f64>() / theta.len() as f64;
                for t in theta.iter_mut() {
                    *t -= mean;
                }
                let h = sys.eigenvalues_to_point(&theta);
                let back = sys.point_to_eigenvalues(&h);
                for (a, b) in theta.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-12);
                }
                assert!(back.iter().sum::<f64>().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn angle_round_trip_for_orthogonal_and_symplectic_types() {
        let b3 = rs(LieType::B, 3);
        let theta = vec![1.25, 0.5, 0.125];
        let h = b3.angles_to_point(&theta);
        assert!((h.norm() * h.norm() - 2.0 * theta.iter().map(|t| t * t).sum::<f64>()).abs() < 1e-12);
        let back = b3.point_to_angles(&h);
        for (a, b) in theta.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn summary_is_a_stable_key_value_record() {
        let got = rs(LieType::A, 2).summary();
        let want = "lie_type=A\nrank=2\ndim_g=8\nn_positive_roots=3\nweyl_group_order=6\neps_max=0.6666666666666666\n";
        assert_eq!(got, want);
    }
}
