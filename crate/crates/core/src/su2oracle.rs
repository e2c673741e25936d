//! Exact rank-1 oracle for convolution powers of orbital measures.
//!
//! On su(2) an orbit of radius r is a round 2-sphere in R^3, and the 1-D
//! coordinate projection of its uniform measure is uniform on [-r, r]
//! (Archimedes).  The projection of an L-fold orbit sum is therefore the
//! convolution h of L uniform densities, an object we can hold exactly as a
//! piecewise polynomial with rational breakpoints and coefficients.  From h
//! the module recovers, in closed form: the radial density f(t) = -2t h'(t),
//! its cumulative distribution, the bounded polynomial part P of the density
//! R = P/|pi|, and the exact integrability threshold of |R|^p at the origin.
//!
//! Everything downstream (sampling, histograms, L^p estimates, wrapping) is
//! certified against this module in rank 1, so the arithmetic here stays in
//! `BigRational` until the final evaluation step.  Floating radii are
//! converted to their exact dyadic values, which keeps round inputs like
//! 1.0 or 0.25 exact end to end.
//!
//! Normalization: `exact_p` returns the polynomial -h' itself.  The absolute
//! density normalization used by the estimation pipeline corresponds to
//! multiplying by [`P_ABSOLUTE_SCALE`] = 1/(sqrt(2) pi); with that factor,
//! P matches h-hat/(C_W |pi|) of the density module bin for bin.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::scalar::Real;

/// Scale converting the rational polynomial of `exact_p` into the absolute
/// normalization of the density pipeline's P-hat.
pub const P_ABSOLUTE_SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2 / std::f64::consts::PI;

/// An L^p value that may be infinite by an exact exponent count at t = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpValue<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> LpValue<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, LpValue::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match self {
            LpValue::Finite(v) => Some(*v),
            LpValue::Infinite => None,
        }
    }
}

type Rat = BigRational;

fn rat(x: i64) -> Rat {
    Rat::from_integer(BigInt::from(x))
}

fn rat_of_f64(x: f64) -> Rat {
    Rat::from_f64(x).expect("finite float")
}

// Dense univariate polynomials, ascending powers of x.

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_derivative(p: &[Rat]) -> Vec<Rat> {
    if p.len() <= 1 {
        return vec![Rat::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * rat(i as i64))
        .collect()
}

fn poly_antiderivative(p: &[Rat]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(Rat::zero());
    for (i, c) in p.iter().enumerate() {
        out.push(c / rat(i as i64 + 1));
    }
    out
}

/// p(x + c) by binomial expansion.
fn poly_shift(p: &[Rat], c: &Rat) -> Vec<Rat> {
    let n = p.len();
    let mut out = vec![Rat::zero(); n];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        // a * (x + c)^i
        let mut binom = Rat::one();
        let mut cpow = Rat::one();
        for j in (0..=i).rev() {
            out[j] += a * &binom * &cpow;
            if j > 0 {
                binom = binom * rat(j as i64) / rat((i - j + 1) as i64);
                cpow *= c;
            }
        }
    }
    out
}

fn poly_is_zero(p: &[Rat]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

/// A compactly supported piecewise polynomial with exact rational
/// breakpoints and coefficients; identically zero outside the support.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePolynomial {
    /// Sorted, strictly increasing; one more entry than `pieces`.
    breakpoints: Vec<Rat>,
    /// Coefficients per interval, ascending powers of the global variable.
    pieces: Vec<Vec<Rat>>,
}

impl PiecewisePolynomial {
    fn new(breakpoints: Vec<Rat>, pieces: Vec<Vec<Rat>>) -> Self {
        debug_assert_eq!(breakpoints.len(), pieces.len() + 1);
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        PiecewisePolynomial { breakpoints, pieces }
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Rat>] {
        &self.pieces
    }

    /// Largest per-piece degree after trimming trailing zeros.
    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| poly_trim(p.clone()).len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn support(&self) -> (&Rat, &Rat) {
        (
            self.breakpoints.first().expect("nonempty"),
            self.breakpoints.last().expect("nonempty"),
        )
    }

    /// Exact evaluation; intervals are closed on the left, and points
    /// outside the support give zero.
    pub fn eval_rat(&self, x: &Rat) -> Rat {
        match self.piece_index(x) {
            Some(i) => poly_eval(&self.pieces[i], x),
            None => Rat::zero(),
        }
    }

    fn piece_index(&self, x: &Rat) -> Option<usize> {
        if x < self.breakpoints.first().unwrap() || x > self.breakpoints.last().unwrap() {
            return None;
        }
        // Small piece counts; linear scan is simplest and exact.
        for i in 0..self.pieces.len() {
            if x < &self.breakpoints[i + 1] {
                return Some(i);
            }
        }
        Some(self.pieces.len() - 1)
    }

    /// Float evaluation at a float point, through the exact path.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let xr = Rat::from_f64(x).expect("finite input");
        self.eval_rat(&xr).to_f64().expect("value fits in f64")
    }

    pub fn derivative(&self) -> Self {
        PiecewisePolynomial::new(
            self.breakpoints.clone(),
            self.pieces.iter().map(|p| poly_derivative(p)).collect(),
        )
    }

    pub fn negated(&self) -> Self {
        PiecewisePolynomial::new(
            self.breakpoints.clone(),
            self.pieces
                .iter()
                .map(|p| p.iter().map(|c| -c.clone()).collect())
                .collect(),
        )
    }

    /// Exact integral over the whole support.
    pub fn mass(&self) -> Rat {
        let mut acc = Rat::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let prim = poly_antiderivative(p);
            acc += poly_eval(&prim, &self.breakpoints[i + 1])
                - poly_eval(&prim, &self.breakpoints[i]);
        }
        acc
    }

    /// The continuous antiderivative that vanishes left of the support.
    fn cumulative(&self) -> PiecewisePolynomial {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut carry = Rat::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let mut prim = poly_antiderivative(p);
            let at_left = poly_eval(&prim, &self.breakpoints[i]);
            prim[0] = &prim[0] + (&carry - &at_left);
            carry = poly_eval(&prim, &self.breakpoints[i + 1]);
            pieces.push(prim);
        }
        PiecewisePolynomial::new(self.breakpoints.clone(), pieces)
    }

    /// Restriction to x >= 0, splitting a piece at zero when needed.
    pub fn restrict_nonneg(&self) -> Self {
        let zero = Rat::zero();
        let (lo, hi) = self.support();
        if lo >= &zero {
            return self.clone();
        }
        if hi <= &zero {
            return PiecewisePolynomial::new(vec![zero.clone(), Rat::one()], vec![vec![zero]]);
        }
        let mut breakpoints = vec![zero.clone()];
        let mut pieces = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let right = &self.breakpoints[i + 1];
            if right <= &zero {
                continue;
            }
            pieces.push(p.clone());
            breakpoints.push(right.clone());
        }
        PiecewisePolynomial::new(breakpoints, pieces)
    }

    /// Text export: one row per interval, tab separated, coefficients in
    /// ascending order, all values exact.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.pieces.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}",
                self.breakpoints[i], self.breakpoints[i + 1]
            ));
            for c in poly_trim(p.clone()) {
                out.push_str(&format!("\t{c}"));
            }
            out.push('\n');
        }
        out
    }

    fn to_float<T: Real>(&self) -> FloatPiecewise<T> {
        FloatPiecewise {
            breaks: self
                .breakpoints
                .iter()
                .map(|b| T::of(b.to_f64().expect("breakpoint fits")))
                .collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|c| T::of(c.to_f64().expect("coefficient fits")))
                        .collect()
                })
                .collect(),
        }
    }
}

/// The k-fold convolution of uniform densities on [-r_i, r_i], exact.
///
/// Built by the antiderivative recursion: convolving a piecewise density h
/// with the uniform on [-r, r] gives (H(x+r) - H(x-r))/(2r) where H is the
/// cumulative of h, which stays piecewise polynomial with breakpoints
/// shifted by +-r.
pub fn uniform_convolution(radii: &[f64]) -> PiecewisePolynomial {
    assert!(!radii.is_empty(), "at least one radius");
    assert!(radii.iter().all(|&r| r > 0.0), "radii must be positive");
    let mut h = uniform_density(&rat_of_f64(radii[0]));
    for &r in &radii[1..] {
        h = convolve_with_uniform(&h, &rat_of_f64(r));
    }
    h
}

fn uniform_density(r: &Rat) -> PiecewisePolynomial {
    let half_inv = Rat::one() / (rat(2) * r);
    PiecewisePolynomial::new(vec![-r.clone(), r.clone()], vec![vec![half_inv]])
}

fn convolve_with_uniform(h: &PiecewisePolynomial, r: &Rat) -> PiecewisePolynomial {
    let big_h = h.cumulative();
    let total = h.mass();
    let mut breakpoints: Vec<Rat> = Vec::new();
    for b in h.breakpoints() {
        breakpoints.push(b - r);
        breakpoints.push(b + r);
    }
    breakpoints.sort();
    breakpoints.dedup();
    let two_r_inv = Rat::one() / (rat(2) * r);
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let mut pieces = Vec::with_capacity(breakpoints.len() - 1);
    for w in breakpoints.windows(2) {
        let mid = (&w[0] + &w[1]) * &half;
        // H(x + r) and H(x - r) as polynomials valid near the midpoint.
        let upper = cumulative_piece(&big_h, &total, &(mid.clone() + r), r, true);
        let lower = cumulative_piece(&big_h, &total, &(mid - r), r, false);
        let diff: Vec<Rat> = upper
            .iter()
            .zip(&lower)
            .map(|(a, b)| (a - b) * &two_r_inv)
            .collect();
        pieces.push(diff);
    }
    merge_equal_pieces(PiecewisePolynomial::new(breakpoints, pieces))
}

/// The polynomial representing H(x +- r) on the piece containing `at`,
/// padded to a common length; constant 0 or `total` beyond the support.
fn cumulative_piece(
    big_h: &PiecewisePolynomial,
    total: &Rat,
    at: &Rat,
    r: &Rat,
    upper: bool,
) -> Vec<Rat> {
    let shift = if upper { r.clone() } else { -r.clone() };
    let max_len = big_h.pieces.iter().map(|p| p.len()).max().unwrap_or(1);
    let mut out = match big_h.piece_index(at) {
        Some(i) => poly_shift(&big_h.pieces[i], &shift),
        None => {
            if at < big_h.breakpoints.first().unwrap() {
                vec![Rat::zero()]
            } else {
                vec![total.clone()]
            }
        }
    };
    out.resize(max_len.max(out.len()), Rat::zero());
    out
}

fn merge_equal_pieces(p: PiecewisePolynomial) -> PiecewisePolynomial {
    let mut breakpoints = vec![p.breakpoints[0].clone()];
    let mut pieces: Vec<Vec<Rat>> = Vec::new();
    for (i, piece) in p.pieces.iter().enumerate() {
        let piece = poly_trim(piece.clone());
        match pieces.last() {
            Some(last) if *last == piece => {
                *breakpoints.last_mut().unwrap() = p.breakpoints[i + 1].clone();
            }
            _ => {
                pieces.push(piece);
                breakpoints.push(p.breakpoints[i + 1].clone());
            }
        }
    }
    PiecewisePolynomial::new(breakpoints, pieces)
}

/// Float mirror of a piecewise polynomial for hot evaluation paths.
#[derive(Clone, Debug)]
struct FloatPiecewise<T> {
    breaks: Vec<T>,
    pieces: Vec<Vec<T>>,
}

impl<T: Real> FloatPiecewise<T> {
    fn eval(&self, x: T) -> T {
        let first = self.breaks[0];
        let last = *self.breaks.last().unwrap();
        if x < first || x > last {
            return T::zero();
        }
        let mut i = 0;
        while i + 1 < self.pieces.len() && x >= self.breaks[i + 1] {
            i += 1;
        }
        let mut acc = T::zero();
        for &c in self.pieces[i].iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Cached oracle for one configuration of sphere radii.
#[derive(Clone, Debug)]
pub struct Su2Oracle<T> {
    radii: Vec<f64>,
    h: PiecewisePolynomial,
    h_float: FloatPiecewise<T>,
    cumulative_float: FloatPiecewise<T>,
}

impl<T: Real> Su2Oracle<T> {
    pub fn new(radii: &[f64]) -> Self {
        let h = uniform_convolution(radii);
        let h_float = h.to_float();
        let cumulative_float = h.cumulative().to_float();
        Su2Oracle { radii: radii.to_vec(), h, h_float, cumulative_float }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// The exact k-fold convolution h of the coordinate projections.
    pub fn convolution(&self) -> &PiecewisePolynomial {
        &self.h
    }

    /// Support of the radial density: [max(0, inf supp f), sum of radii].
    pub fn support(&self) -> (T, T) {
        let df = self.h.derivative();
        let nonneg = df.restrict_nonneg();
        let mut lo = nonneg.support().1.clone();
        for (i, p) in nonneg.pieces().iter().enumerate() {
            if !poly_is_zero(p) {
                lo = nonneg.breakpoints()[i].clone();
                break;
            }
        }
        let hi = self.h.support().1;
        (
            T::of(lo.to_f64().expect("fits")),
            T::of(hi.to_f64().expect("fits")),
        )
    }

    /// Radial density f(t) = -2t h'(t) of the orbit-sum norm, t >= 0.
    /// Values at breakpoints follow the left-closed piece convention.
    pub fn radial_density(&self, t: T) -> T {
        assert!(self.radii.len() >= 2, "radial density needs at least two orbits");
        if t < T::zero() {
            return T::zero();
        }
        let dh = self.derivative_float();
        -(t + t) * dh.eval(t)
    }

    fn derivative_float(&self) -> FloatPiecewise<T> {
        self.h.derivative().to_float()
    }

    /// Distribution function of the radial law: F(t) = 2(A(t) - t h(t))
    /// with A the cumulative of h from 0; exact integration by parts of
    /// -2s h'(s) on [0, t].
    pub fn cdf(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        let (_, hi) = self.support();
        if t >= hi {
            return T::one();
        }
        let a0 = self.cumulative_float.eval_clamped_right(T::zero());
        let at = self.cumulative_float.eval_clamped_right(t);
        let two = T::of(2.0);
        let v = two * (at - a0 - t * self.h_float.eval(t));
        v.max(T::zero()).min(T::one())
    }

    /// The bounded polynomial factor P = -h' restricted to t >= 0, exact.
    /// Multiply by [`P_ABSOLUTE_SCALE`] for the density pipeline's P-hat.
    pub fn exact_p(&self) -> PiecewisePolynomial {
        assert!(self.radii.len() >= 2, "P needs at least two orbits");
        self.h.derivative().negated().restrict_nonneg()
    }

    /// Exact integral of |R|^p over R^3 for the absolutely normalized
    /// density R(t) = f(t)/(4 pi t^2): the value is
    /// 4 pi Integral |(-h'(t))/(2 pi t)|^p t^2 dt, and finiteness at the
    /// origin is decided symbolically from the vanishing order of -h'.
    pub fn exact_lp(&self, p: f64) -> LpValue<T> {
        assert!(self.radii.len() >= 2, "L^p needs at least two orbits");
        assert!(p >= 1.0);
        let neg_dh = self.h.derivative().negated().restrict_nonneg();
        // Locate the start of the support of -h' on t >= 0.
        let mut first_nonzero = None;
        for (i, piece) in neg_dh.pieces().iter().enumerate() {
            if !poly_is_zero(piece) {
                first_nonzero = Some(i);
                break;
            }
        }
        let Some(first) = first_nonzero else {
            return LpValue::Finite(T::zero());
        };
        let lo = &neg_dh.breakpoints()[first];
        if lo.is_zero() {
            // -h'(t) = a t^{m0} + ... near 0; |R|^p t^2 ~ t^{p(m0-1)+2}.
            let m0 = neg_dh.pieces()[first]
                .iter()
                .position(|c| !c.is_zero())
                .expect("nonzero piece");
            let exponent = p * (m0 as f64 - 1.0) + 2.0;
            if exponent <= -1.0 {
                return LpValue::Infinite;
            }
        }
        let (nodes, weights) = gauss_legendre(64);
        let tau = 2.0 * std::f64::consts::PI;
        let four_pi = 2.0 * tau;
        let mut acc = 0.0f64;
        for i in first..neg_dh.pieces().len() {
            let a = neg_dh.breakpoints()[i].to_f64().expect("fits");
            let b = neg_dh.breakpoints()[i + 1].to_f64().expect("fits");
            let coeffs: Vec<f64> = neg_dh.pieces()[i]
                .iter()
                .map(|c| c.to_f64().expect("fits"))
                .collect();
            let m0 = if a == 0.0 {
                coeffs.iter().position(|&c| c != 0.0).unwrap_or(0)
            } else {
                0
            };
            let kappa = p * (m0 as f64 - 1.0) + 2.0;
            // Power substitution t = s^m regularizes an integrable but
            // singular endpoint so fixed-order quadrature stays accurate.
            let m = if a == 0.0 && kappa < 1.0 {
                ((2.0 / (kappa + 1.0)).ceil() as i32).clamp(1, 60)
            } else {
                1
            };
            let eval_poly = |t: f64| -> f64 {
                let mut v = 0.0;
                for &c in coeffs.iter().rev() {
                    v = v * t + c;
                }
                v
            };
            let (sa, sb) = (a.powf(1.0 / m as f64), b.powf(1.0 / m as f64));
            for (&x, &w) in nodes.iter().zip(&weights) {
                let s = 0.5 * (sb - sa) * x + 0.5 * (sb + sa);
                let t = s.powi(m);
                let val = eval_poly(t).abs() / (tau * t);
                let jac = m as f64 * s.powi(m - 1);
                acc += w * 0.5 * (sb - sa) * val.powf(p) * t * t * jac;
            }
        }
        LpValue::Finite(T::of(four_pi * acc))
    }
}

impl<T: Real> FloatPiecewise<T> {
    /// Like `eval` but clamping to the final value right of the support;
    /// used for cumulative functions whose tail is a constant.
    fn eval_clamped_right(&self, x: T) -> T {
        let last = *self.breaks.last().unwrap();
        if x > last {
            let piece = self.pieces.last().unwrap();
            let mut acc = T::zero();
            for &c in piece.iter().rev() {
                acc = acc * last + c;
            }
            return acc;
        }
        self.eval(x)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn single_uniform_is_a_box() {
        let h = uniform_convolution(&[1.0]);
        assert_eq!(h.breakpoints(), &[q(-1, 1), q(1, 1)]);
        assert_eq!(h.pieces(), &[vec![q(1, 2)]]);
        assert_eq!(h.degree(), 0);
        assert_eq!(h.mass(), q(1, 1));
    }

    #[test]
    fn two_equal_radii_give_the_triangle() {
        let h = uniform_convolution(&[1.0, 1.0]);
        assert_eq!(h.breakpoints(), &[q(-2, 1), q(0, 1), q(2, 1)]);
        // (2+t)/4 rising, (2-t)/4 falling.
        assert_eq!(h.pieces()[0], vec![q(1, 2), q(1, 4)]);
        assert_eq!(h.pieces()[1], vec![q(1, 2), q(-1, 4)]);
        assert_eq!(h.mass(), q(1, 1));
    }

    #[test]
    fn unequal_radii_have_a_flat_plateau() {
        let h = uniform_convolution(&[1.0, 2.0]);
        assert_eq!(
            h.breakpoints(),
            &[q(-3, 1), q(-1, 1), q(1, 1), q(3, 1)]
        );
        assert_eq!(h.pieces()[1], vec![q(1, 4)]);
        // falling edge (3-x)/8
        assert_eq!(h.pieces()[2], vec![q(3, 8), q(-1, 8)]);
    }

    #[test]
    fn three_equal_radii_match_the_quadratic_spline() {
        let h = uniform_convolution(&[1.0, 1.0, 1.0]);
        assert_eq!(
            h.breakpoints(),
            &[q(-3, 1), q(-1, 1), q(1, 1), q(3, 1)]
        );
        // center (3 - x^2)/8, outer (x -+ 3)^2/16.
        assert_eq!(h.pieces()[1], vec![q(3, 8), q(0, 1), q(-1, 8)]);
        assert_eq!(h.pieces()[2], vec![q(9, 16), q(-3, 8), q(1, 16)]);
        assert_eq!(h.eval_rat(&q(0, 1)), q(3, 8));
        assert_eq!(h.mass(), q(1, 1));
    }

    #[test]
    fn cumulative_is_continuous_and_reaches_one() {
        for radii in [vec![1.0, 1.0], vec![1.0, 2.0], vec![0.5, 1.0, 2.0]] {
            let h = uniform_convolution(&radii);
            let big_h = h.cumulative();
            for i in 1..h.breakpoints().len() - 1 {
                let b = &h.breakpoints()[i];
                let left = poly_eval(&big_h.pieces()[i - 1], b);
                let right = poly_eval(&big_h.pieces()[i], b);
                assert_eq!(left, right, "jump at breakpoint {b}");
            }
            let (_, hi) = h.support();
            assert_eq!(big_h.eval_rat(hi), q(1, 1));
        }
    }

    #[test]
    fn radial_density_of_two_unit_spheres_is_t_over_two() {
        let oracle = Su2Oracle::<f64>::new(&[1.0, 1.0]);
        for t in [0.1, 0.5, 1.0, 1.5, 1.99] {
            assert!((oracle.radial_density(t) - t / 2.0).abs() < 1e-14);
        }
        assert_eq!(oracle.radial_density(2.5), 0.0);
        let (lo, hi) = oracle.support();
        assert_eq!((lo, hi), (0.0, 2.0));
    }

    #[test]
    fn radial_density_support_is_the_radii_interval() {
        let oracle = Su2Oracle::<f64>::new(&[1.0, 2.0]);
        let (lo, hi) = oracle.support();
        assert_eq!((lo, hi), (1.0, 3.0));
        assert_eq!(oracle.radial_density(0.5), 0.0);
        // f(t) = t/4 on (1, 3).
        for t in [1.2, 2.0, 2.9] {
            assert!((oracle.radial_density(t) - t / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cdf_matches_hand_integrals() {
        let eq = Su2Oracle::<f64>::new(&[1.0, 1.0]);
        for t in [0.25, 0.5, 1.0, 1.75] {
            assert!((eq.cdf(t) - t * t / 4.0).abs() < 1e-14, "t={t}");
        }
        assert_eq!(eq.cdf(0.0), 0.0);
        assert_eq!(eq.cdf(2.0), 1.0);

        let uneq = Su2Oracle::<f64>::new(&[1.0, 2.0]);
        for t in [1.5, 2.0, 2.5] {
            assert!((uneq.cdf(t) - (t * t - 1.0) / 8.0).abs() < 1e-14);
        }
        assert_eq!(uneq.cdf(0.9), 0.0);
    }

    #[test]
    fn exact_p_is_constant_for_two_equal_radii() {
        let oracle = Su2Oracle::<f64>::new(&[1.0, 1.0]);
        let p = oracle.exact_p();
        assert_eq!(p.degree(), 0);
        assert_eq!(p.eval_rat(&q(1, 1)), q(1, 4));
        // Absolute normalization: 1/4 * scale = sqrt(2)/(8 pi).
        let absolute = 0.25 * P_ABSOLUTE_SCALE;
        let expect = std::f64::consts::SQRT_2 / (8.0 * std::f64::consts::PI);
        assert!((absolute - expect).abs() < 1e-16);
    }

    #[test]
    fn p_degree_law_for_equal_radii() {
        for k in 2..=6 {
            let radii = vec![1.0; k];
            let oracle = Su2Oracle::<f64>::new(&radii);
            assert_eq!(oracle.exact_p().degree(), k - 2, "k={k}");
        }
    }

    #[test]
    fn lp_of_two_unit_spheres() {
        let oracle = Su2Oracle::<f64>::new(&[1.0, 1.0]);
        let mass = oracle.exact_lp(1.0).finite().unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
        let l2 = oracle.exact_lp(2.0).finite().unwrap();
        let expect = 1.0 / (8.0 * std::f64::consts::PI);
        assert!((l2 - expect).abs() < 1e-12 * expect);
        assert!(oracle.exact_lp(2.5).is_finite());
        assert!(oracle.exact_lp(2.9).is_finite());
        assert_eq!(oracle.exact_lp(3.0), LpValue::Infinite);
        assert_eq!(oracle.exact_lp(3.5), LpValue::Infinite);
    }

    #[test]
    fn lp_finite_for_separated_support() {
        let oracle = Su2Oracle::<f64>::new(&[1.0, 2.0]);
        for p in [1.0, 2.0, 3.5, 10.0] {
            assert!(oracle.exact_lp(p).is_finite(), "p={p}");
        }
        let mass = oracle.exact_lp(1.0).finite().unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_threshold_shifts_with_three_spheres() {
        // k=3 equal: -h' vanishes to first order at 0, so R is bounded
        // near the origin and every p is locally integrable there.
        let oracle = Su2Oracle::<f64>::new(&[1.0, 1.0, 1.0]);
        for p in [2.0, 3.0, 5.0] {
            assert!(oracle.exact_lp(p).is_finite(), "p={p}");
        }
        let mass = oracle.exact_lp(1.0).finite().unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn smoothness_increases_with_the_number_of_factors() {
        // k >= 3: h' is continuous at interior breakpoints.
        for radii in [vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0, 1.0]] {
            let dh = uniform_convolution(&radii).derivative();
            for i in 1..dh.breakpoints().len() - 1 {
                let b = &dh.breakpoints()[i];
                let left = poly_eval(&dh.pieces()[i - 1], b);
                let right = poly_eval(&dh.pieces()[i], b);
                assert_eq!(left, right, "h' jumps at {b} for {radii:?}");
            }
        }
    }

    #[test]
    fn export_text_is_exact_and_stable() {
        let h = uniform_convolution(&[1.0, 1.0]);
        let text = h.export_text();
        assert_eq!(text, "-2\t0\t1/2\t1/4\n0\t2\t1/2\t-1/4\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mass_is_exactly_one_for_rational_radii(
            numerators in prop::collection::vec(1i64..=12, 1..=4)
        ) {
            let radii: Vec<f64> = numerators.iter().map(|&n| n as f64 / 4.0).collect();
            let h = uniform_convolution(&radii);
            prop_assert_eq!(h.mass(), Rat::one());
            let k = radii.len();
            prop_assert_eq!(h.degree(), k.saturating_sub(1));
            let (lo, hi) = h.support();
            let sum: f64 = radii.iter().sum();
            prop_assert!((hi.to_f64().unwrap() - sum).abs() < 1e-12);
            prop_assert!((lo.to_f64().unwrap() + sum).abs() < 1e-12);
        }

        #[test]
        fn density_is_nonnegative_and_normalized(
            numerators in prop::collection::vec(1i64..=8, 2..=4)
        ) {
            let radii: Vec<f64> = numerators.iter().map(|&n| n as f64 / 2.0).collect();
            let oracle = Su2Oracle::<f64>::new(&radii);
            let (lo, hi) = oracle.support();
            let steps = 400;
            for s in 0..=steps {
                let t = lo + (hi - lo) * s as f64 / steps as f64;
                prop_assert!(oracle.radial_density(t) > -1e-12);
            }
            prop_assert!((oracle.cdf(hi) - 1.0).abs() < 1e-12);
            let mass = oracle.exact_lp(1.0).finite().unwrap();
            prop_assert!((mass - 1.0).abs() < 1e-10);
        }
    }
}
