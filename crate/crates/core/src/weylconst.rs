//! The normalization constant of the Weyl integration formula.
//!
//! For a G-invariant function f on the algebra, with Lebesgue measure taken
//! in the orthonormal coordinates fixed by rootsys,
//!
//! ```text
//!   integral over g of f  =  C_W * integral over the dominant chamber of
//!                            f(H) pi(H)^2 dH
//! ```
//!
//! and C_W is pinned down by plugging in the standard Gaussian:
//! C_W = |W| (2 pi)^{(dim - rank)/2} / E[pi(Z)^2], Z standard normal on t.
//! The Gaussian moment E[pi(Z)^2] is evaluated exactly: pi^2 expands into a
//! polynomial with integer coefficients (in the eigenvalue gaps for type A,
//! in the squared coordinates for B/C/D up to an explicit power of two), and
//! monomial moments are double factorials.  Everything is big-rational until
//! the final conversion, so the constant is correct to the last float digit
//! and the density pipeline inherits no quadrature error from it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::rootsys::{LieType, RootSystem};
use crate::scalar::Real;

/// Sparse multivariate polynomial: exponent vector -> integer coefficient.
type Poly = BTreeMap<Vec<u32>, BigInt>;

fn poly_one(nvars: usize) -> Poly {
    let mut p = Poly::new();
    p.insert(vec![0; nvars], BigInt::one());
    p
}

/// The factor (x_i - x_j).
fn difference_factor(nvars: usize, i: usize, j: usize) -> Poly {
    let mut p = Poly::new();
    let mut ei = vec![0; nvars];
    ei[i] = 1;
    let mut ej = vec![0; nvars];
    ej[j] = 1;
    p.insert(ei, BigInt::one());
    p.insert(ej, -BigInt::one());
    p
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// (2m-1)!! = E[g^{2m}] for a standard normal g.
fn double_factorial_odd(m: u32) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = 1u32;
    while k < 2 * m {
        acc *= BigInt::from(k);
        k += 2;
    }
    acc
}

/// E of the polynomial under iid standard normals, one per variable.
/// `vars_are_squares` means each variable already stands for g^2, so an
/// exponent m contributes (2m-1)!!; otherwise odd exponents kill the term.
fn gaussian_expectation(p: &Poly, vars_are_squares: bool) -> BigRational {
    let mut acc = BigRational::zero();
    'term: for (e, c) in p {
        let mut factor = BigInt::one();
        for &m in e {
            if vars_are_squares {
                factor *= double_factorial_odd(m);
            } else {
                if m % 2 == 1 {
                    continue 'term;
                }
                factor *= double_factorial_odd(m / 2);
            }
        }
        acc += BigRational::from(c * factor);
    }
    acc
}

/// prod_{i<j} (x_i - x_j), squared.
fn vandermonde_squared(nvars: usize) -> Poly {
    let mut p = poly_one(nvars);
    for i in 0..nvars {
        for j in i + 1..nvars {
            p = poly_mul(&p, &difference_factor(nvars, i, j));
        }
    }
    poly_mul(&p, &p)
}

/// Exact E[pi(Z)^2] for a standard Gaussian Z on the Cartan subalgebra, in
/// the orthonormal coordinates of rootsys.
pub fn gaussian_pi_sq_moment(lie_type: LieType, rank: usize) -> BigRational {
    gaussian_pi_pow_moment(lie_type, rank, 1)
}

/// Exact E[pi(Z)^(2m)] for a standard Gaussian Z, m = `half_power`.
pub fn gaussian_pi_pow_moment(lie_type: LieType, rank: usize, half_power: u32) -> BigRational {
    assert!(half_power >= 1);
    let m = half_power;
    match lie_type {
        LieType::A => {
            // pi = prod of eigenvalue gaps; the gap polynomial is invariant
            // under the center direction, so the (rank+1)-variable iid
            // Gaussian expectation equals the on-subspace one.
            let n = rank + 1;
            let v2 = vandermonde_squared(n);
            let mut p = v2.clone();
            for _ in 1..m {
                p = poly_mul(&p, &v2);
            }
            gaussian_expectation(&p, false)
        }
        LieType::B | LieType::C | LieType::D => {
            // In squared variables v_i = u_i^2:
            //   pi^2 = 2^s * [prod_{i<j}(v_i - v_j)]^2 * (prod v_i)^t
            // with (s, t) = (-r^2, 1) for B, (r - r(r-1), 1) for C and
            // (-r(r-1), 0) for D; the 2m-th power just raises each factor.
            let r = rank;
            let v2 = vandermonde_squared(r);
            let mut p = v2.clone();
            for _ in 1..m {
                p = poly_mul(&p, &v2);
            }
            let (shift, with_prod): (i64, bool) = match lie_type {
                LieType::B => (-(r as i64) * (r as i64), true),
                LieType::C => (r as i64 - (r as i64) * (r as i64 - 1), true),
                LieType::D => (-(r as i64) * (r as i64 - 1), false),
                LieType::A => unreachable!(),
            };
            if with_prod {
                let mut prod = Poly::new();
                prod.insert(vec![m; r], BigInt::one());
                p = poly_mul(&p, &prod);
            }
            let e = gaussian_expectation(&p, true);
            let two = BigRational::from(BigInt::from(2));
            let mut scale = BigRational::one();
            for _ in 0..(shift * m as i64).unsigned_abs() {
                if shift > 0 {
                    scale *= two.clone();
                } else {
                    scale /= two.clone();
                }
            }
            e * scale
        }
    }
}

/// C_W for the given root system, as a float.
pub fn weyl_integration_constant<T: Real>(rs: &RootSystem<T>) -> T {
    let moment = gaussian_pi_sq_moment(rs.lie_type(), rs.rank())
        .to_f64()
        .expect("moment fits in f64");
    assert!(moment > 0.0);
    let half_codim = (rs.dim_g() - rs.rank()) / 2;
    let tau = 2.0 * std::f64::consts::PI;
    T::of(rs.weyl_group_order() as f64 * tau.powi(half_codim as i32) / moment)
}
