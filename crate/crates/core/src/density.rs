//! Radial density estimation on the dominant chamber.
//!
//! A batch of radial samples is binned on a rectangular grid spanning its
//! bounding box.  Three views of each cell are exposed:
//!
//! * `h_hat`: plain histogram density with respect to Lebesgue measure on
//!   the Cartan coordinates, so the cell masses sum to one;
//! * `r_hat = h_hat / (c w^2)`: the density with respect to the ambient
//!   reference measure, where `w = |pi|` on the algebra side and `w = |Delta|`
//!   on the group side, and `c` is the matching integration constant.  This
//!   is the quantity whose square-integrability the dichotomy is about;
//! * `p_hat = h_hat / (c w)`: the half-weighted profile.  Near the chamber
//!   walls `r_hat` can blow up while `p_hat` stays flat; the pair is what
//!   `wall_profile` summarizes.
//!
//! Cells whose weight `w` at the center falls below a relative floor sit too
//! close to a wall for the ratio to mean anything and are masked; masked
//! cells keep their histogram mass but are excluded from ratio views and
//! from `wall_profile`.

use crate::error::{Error, Result};
use crate::matrixgroups::{RadialSampleBatch, Side};
use crate::rootsys::{CartanPoint, RootSystem};
use crate::scalar::{kahan_sum, Real};
use crate::weylconst::weyl_integration_constant;

/// Relative floor under which a cell counts as a wall cell.
const WALL_FLOOR: f64 = 1e-8;

/// Histogram-based density estimate over the bounding box of a batch.
#[derive(Clone, Debug)]
pub struct DensityEstimate<T> {
    rs: RootSystem<T>,
    side: Side,
    n_samples: usize,
    bins_per_dim: usize,
    lo: Vec<T>,
    hi: Vec<T>,
    step: Vec<T>,
    counts: Vec<u64>,
    h_hat: Vec<T>,
    weight: Vec<T>,
    masked: Vec<bool>,
    c: T,
}

/// One grid cell of a `DensityEstimate`.
#[derive(Clone, Debug)]
pub struct Cell<T> {
    pub index: usize,
    pub center: Vec<T>,
    pub volume: T,
    pub count: u64,
    pub h_hat: T,
    /// `h_hat / (c w^2)`; `None` on wall-masked cells.
    pub r_hat: Option<T>,
    /// `h_hat / (c w)`; `None` on wall-masked cells.
    pub p_hat: Option<T>,
    /// Whether any grid coordinate is an outermost bin.
    pub endpoint: bool,
}

/// Wall behavior summary: suprema of the two ratio views over interior,
/// unmasked, occupied cells.
#[derive(Clone, Copy, Debug)]
pub struct WallProfile<T> {
    pub sup_p_hat: T,
    pub sup_r_hat: T,
}

/// Bins a batch on a `bins_per_dim`-per-coordinate grid.
pub fn estimate<T: Real>(
    batch: &RadialSampleBatch<T>,
    bins_per_dim: usize,
) -> Result<DensityEstimate<T>> {
    if !(2..=4096).contains(&bins_per_dim) {
        return Err(Error::InvalidParameter(format!(
            "bins_per_dim {bins_per_dim} outside 2..=4096"
        )));
    }
    let rs = batch.rs().clone();
    let rank = rs.rank();
    let n = batch.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty batch".into()));
    }

    let mut lo = vec![T::infinity(); rank];
    let mut hi = vec![T::neg_infinity(); rank];
    for s in batch.iter() {
        for (i, &v) in s.iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    let scale = lo
        .iter()
        .chain(hi.iter())
        .fold(T::one(), |a, &v| a.max(v.abs()));
    for i in 0..rank {
        if hi[i] - lo[i] < T::of(1e-8) * scale {
            // The batch concentrates on a lower-dimensional slice; a grid
            // density is meaningless (and the measure is singular anyway).
            return Err(Error::DegenerateSupport { n });
        }
    }

    let step: Vec<T> = (0..rank)
        .map(|i| (hi[i] - lo[i]) / T::of(bins_per_dim as f64))
        .collect();
    let n_cells = bins_per_dim.pow(rank as u32);
    let mut counts = vec![0u64; n_cells];
    for s in batch.iter() {
        let mut idx = 0usize;
        for i in 0..rank {
            let k = ((s[i] - lo[i]) / step[i]).to_f64_lossy().floor() as isize;
            let k = k.clamp(0, bins_per_dim as isize - 1) as usize;
            idx = idx * bins_per_dim + k;
        }
        counts[idx] += 1;
    }

    let cell_vol = step.iter().fold(T::one(), |a, &s| a * s);
    let h_hat: Vec<T> = counts
        .iter()
        .map(|&k| T::of(k as f64) / (T::of(n as f64) * cell_vol))
        .collect();

    // Weight at cell centers: |pi| against Lebesgue on the algebra side,
    // |Delta| = |j pi| on the group side.
    let mut weight = Vec::with_capacity(n_cells);
    for idx in 0..n_cells {
        let center = decode_center(idx, bins_per_dim, &lo, &step);
        let p = CartanPoint::new(center);
        let w = match batch.side() {
            Side::Algebra => rs.root_product(&p).abs(),
            Side::Group => rs.delta_sq(&p).abs().sqrt(),
        };
        weight.push(w);
    }
    let w_top = weight.iter().fold(T::zero(), |a, &v| a.max(v));
    let floor = T::of(WALL_FLOOR) * w_top;
    let masked: Vec<bool> = weight.iter().map(|&w| w <= floor).collect();

    let c = match batch.side() {
        Side::Algebra => weyl_integration_constant(&rs),
        Side::Group => T::one() / rs.gamma_cell_volume(),
    };

    Ok(DensityEstimate {
        rs,
        side: batch.side(),
        n_samples: n,
        bins_per_dim,
        lo,
        hi,
        step,
        counts,
        h_hat,
        weight,
        masked,
        c,
    })
}

fn decode_center<T: Real>(idx: usize, bins: usize, lo: &[T], step: &[T]) -> Vec<T> {
    let rank = lo.len();
    let mut ks = vec![0usize; rank];
    let mut rest = idx;
    for i in (0..rank).rev() {
        ks[i] = rest % bins;
        rest /= bins;
    }
    (0..rank)
        .map(|i| lo[i] + (T::of(ks[i] as f64) + T::of(0.5)) * step[i])
        .collect()
}

impl<T: Real> DensityEstimate<T> {
    pub fn rs(&self) -> &RootSystem<T> {
        &self.rs
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn bins_per_dim(&self) -> usize {
        self.bins_per_dim
    }

    pub fn n_cells(&self) -> usize {
        self.counts.len()
    }

    pub fn bounds(&self) -> (&[T], &[T]) {
        (&self.lo, &self.hi)
    }

    pub fn cell_volume(&self) -> T {
        self.step.iter().fold(T::one(), |a, &s| a * s)
    }

    /// The integration constant used for the ratio views.
    pub fn reference_constant(&self) -> T {
        self.c
    }

    /// Total histogram mass; equals one up to rounding by construction.
    pub fn mass(&self) -> T {
        let vol = self.cell_volume();
        kahan_sum(self.h_hat.iter().map(|&h| h * vol))
    }

    /// Poisson standard error of `h_hat` in one cell.
    pub fn h_stderr(&self, index: usize) -> T {
        let vol = self.cell_volume();
        T::of((self.counts[index] as f64).sqrt()) / (T::of(self.n_samples as f64) * vol)
    }

    /// Flat index of the cell a radial coordinate vector falls in,
    /// clamped to the grid.
    pub fn cell_index_of(&self, sample: &[T]) -> usize {
        let bins = self.bins_per_dim;
        let mut idx = 0usize;
        for i in 0..self.lo.len() {
            let k = ((sample[i] - self.lo[i]) / self.step[i])
                .to_f64_lossy()
                .floor() as isize;
            idx = idx * bins + k.clamp(0, bins as isize - 1) as usize;
        }
        idx
    }

    pub fn is_masked(&self, index: usize) -> bool {
        self.masked[index]
    }

    /// The weight `w` at the cell center (`|pi|` or `|Delta|` by side).
    pub fn weight_at(&self, index: usize) -> T {
        self.weight[index]
    }

    fn is_endpoint(&self, idx: usize) -> bool {
        let bins = self.bins_per_dim;
        let rank = self.lo.len();
        let mut rest = idx;
        for _ in 0..rank {
            let k = rest % bins;
            if k == 0 || k == bins - 1 {
                return true;
            }
            rest /= bins;
        }
        false
    }

    pub fn cell(&self, index: usize) -> Cell<T> {
        let center = decode_center(index, self.bins_per_dim, &self.lo, &self.step);
        let vol = self.cell_volume();
        let h = self.h_hat[index];
        let (r_hat, p_hat) = if self.masked[index] {
            (None, None)
        } else {
            let w = self.weight[index];
            (Some(h / (self.c * w * w)), Some(h / (self.c * w)))
        };
        Cell {
            index,
            center,
            volume: vol,
            count: self.counts[index],
            h_hat: h,
            r_hat,
            p_hat,
            endpoint: self.is_endpoint(index),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell<T>> + '_ {
        (0..self.counts.len()).map(|i| self.cell(i))
    }
}

/// Integral of `|R|^p` against the reference measure `c w^2 dH`.
///
/// For `p = 1` this is the total mass, reported over every cell including
/// masked ones so the value is exactly the histogram mass.  For other `p`
/// the sum runs over unmasked cells: `sum h^p / (c w^2)^(p-1) vol`.
pub fn lp_norm<T: Real>(est: &DensityEstimate<T>, p: f64) -> T {
    if p <= 0.0 {
        panic!("lp_norm needs p > 0");
    }
    if (p - 1.0).abs() < 1e-15 {
        return est.mass();
    }
    let vol = est.cell_volume();
    let pm1 = T::of(p - 1.0);
    kahan_sum((0..est.n_cells()).filter_map(|i| {
        if est.masked[i] || est.counts[i] == 0 {
            return None;
        }
        let h = est.h_hat[i];
        let w = est.weight[i];
        let cw2 = est.c * w * w;
        Some(h.powf(T::of(p)) / cw2.powf(pm1) * vol)
    }))
}

/// Suprema of `p_hat` and `r_hat` over interior, unmasked, occupied cells.
pub fn wall_profile<T: Real>(est: &DensityEstimate<T>) -> WallProfile<T> {
    let mut sup_p = T::zero();
    let mut sup_r = T::zero();
    for cell in est.cells() {
        if cell.endpoint || cell.count == 0 {
            continue;
        }
        if let (Some(r), Some(p)) = (cell.r_hat, cell.p_hat) {
            sup_p = sup_p.max(p);
            sup_r = sup_r.max(r);
        }
    }
    WallProfile { sup_p_hat: sup_p, sup_r_hat: sup_r }
}
