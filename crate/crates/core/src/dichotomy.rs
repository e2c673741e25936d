//! Empirical resolution of the singular / absolutely-continuous dichotomy.
//!
//! The decision statistic is a cross-fitted L2 concentration estimate: the
//! batch is split into halves by sample parity, both halves are binned on
//! the same grid, and the per-cell product of the two half-densities is
//! summed against the reference weight.  Products of independent halves
//! have no Poisson self-term, so for an absolutely continuous limit the
//! statistic settles as the grid refines, while mass concentrated on a
//! lower-dimensional set makes it grow like a power of the bin count.  The
//! classifier reads the log-log slope over a three-step refinement.
//!
//! Two companion probes ship with it: `verify_eps_bound` tracks empirical
//! `L^p` integrals across the same refinement for exponents bracketing the
//! sharp integrability threshold, and `stanton_tomas_integral` evaluates
//! the torus-cell weight integral whose finiteness governs the group side.

use crate::density::{estimate, DensityEstimate};
use crate::error::{Error, Result};
use crate::matrixgroups::{OrbitConfig, RadialSampleBatch};
use crate::rootsys::{CartanPoint, RootSystem};
use crate::scalar::{kahan_sum, Real};

/// Fewest samples `classify` accepts.
pub const MIN_CLASSIFY_SAMPLES: usize = 10_000;
/// Log-log slope at or above which the statistic counts as growing.
pub const SLOPE_SINGULAR: f64 = 0.5;
/// Absolute slope below which the statistic counts as settled.
pub const SLOPE_FLAT: f64 = 0.2;
/// Relative change under which an `L^p` sequence counts as stable.
pub const LP_STABLE_TOL: f64 = 0.10;
/// Relative growth above which an `L^p` sequence counts as diverging.
pub const LP_DIVERGE_TOL: f64 = 0.25;
/// Relative growth above which a quadrature refinement counts as growing.
pub const ST_GROWTH_TOL: f64 = 0.25;
/// Consecutive growing refinements that establish divergence.
pub const ST_GROWTH_RUN: usize = 3;

/// Outcome of the classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Singular,
    AbsolutelyContinuous,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Singular => write!(f, "singular"),
            Verdict::AbsolutelyContinuous => write!(f, "absolutely_continuous"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// The dimension count necessary for absolute continuity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionCheck {
    pub sum_orbit_dims: usize,
    pub dim_g: usize,
}

impl DimensionCheck {
    pub fn passes(&self) -> bool {
        self.sum_orbit_dims >= self.dim_g
    }
}

/// Sum of orbit dimensions against the ambient dimension.
pub fn necessary_dimension_check<T: Real>(cfg: &OrbitConfig<T>) -> DimensionCheck {
    DimensionCheck {
        sum_orbit_dims: cfg.orbit_dims().iter().sum(),
        dim_g: cfg.rs().dim_g(),
    }
}

/// Full classification record.
#[derive(Clone, Debug)]
pub struct DichotomyVerdict<T> {
    pub verdict: Verdict,
    pub dim_check: DimensionCheck,
    /// (bins per dim, cross-fitted L2 statistic) at each refinement.
    pub statistics: Vec<(usize, T)>,
    pub slope: Option<T>,
    pub note: Option<String>,
}

/// Classifies the convolution behind `batch` as singular or absolutely
/// continuous from the refinement behavior of the concentration statistic.
pub fn classify<T: Real>(
    cfg: &OrbitConfig<T>,
    batch: &RadialSampleBatch<T>,
    base_bins: usize,
) -> Result<DichotomyVerdict<T>> {
    if batch.len() < MIN_CLASSIFY_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "classification needs at least {MIN_CLASSIFY_SAMPLES} samples, got {}",
            batch.len()
        )));
    }
    if batch.rs().lie_type() != cfg.rs().lie_type() || batch.rs().rank() != cfg.rs().rank() {
        return Err(Error::InvalidParameter(
            "batch and configuration live on different root systems".into(),
        ));
    }
    let dim_check = necessary_dimension_check(cfg);

    let mut statistics = Vec::with_capacity(3);
    for bins in [base_bins, 2 * base_bins, 4 * base_bins] {
        let est = match estimate(batch, bins) {
            Ok(est) => est,
            Err(Error::DegenerateSupport { n }) => {
                return Ok(DichotomyVerdict {
                    verdict: Verdict::Singular,
                    dim_check,
                    statistics,
                    slope: None,
                    note: Some(format!(
                        "degenerate support: {n} samples concentrate on a \
                         lower-dimensional slice"
                    )),
                });
            }
            Err(e) => return Err(e),
        };
        statistics.push((bins, cross_fit_l2(&est, batch)));
    }

    if statistics.iter().any(|&(_, s)| s <= T::zero()) {
        return Ok(DichotomyVerdict {
            verdict: Verdict::Inconclusive,
            dim_check,
            statistics,
            slope: None,
            note: Some("concentration statistic vanished on some refinement".into()),
        });
    }

    let xs: Vec<f64> = statistics.iter().map(|&(b, _)| (b as f64).ln()).collect();
    let ys: Vec<f64> = statistics
        .iter()
        .map(|&(_, s)| s.to_f64_lossy().ln())
        .collect();
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    let slope = num / den;

    let verdict = if slope >= SLOPE_SINGULAR {
        Verdict::Singular
    } else if slope.abs() < SLOPE_FLAT && dim_check.passes() {
        Verdict::AbsolutelyContinuous
    } else {
        Verdict::Inconclusive
    };
    Ok(DichotomyVerdict {
        verdict,
        dim_check,
        statistics,
        slope: Some(T::of(slope)),
        note: None,
    })
}

/// Cross-fitted L2 statistic: sum over unmasked cells of the product of
/// half-sample densities against the reference weight.
fn cross_fit_l2<T: Real>(est: &DensityEstimate<T>, batch: &RadialSampleBatch<T>) -> T {
    let n_cells = est.n_cells();
    let mut even = vec![0u64; n_cells];
    let mut odd = vec![0u64; n_cells];
    for (i, s) in batch.iter().enumerate() {
        let idx = est.cell_index_of(s);
        if i % 2 == 0 {
            even[idx] += 1;
        } else {
            odd[idx] += 1;
        }
    }
    let n_even = batch.len().div_ceil(2) as f64;
    let n_odd = (batch.len() / 2) as f64;
    let vol = est.cell_volume();
    let c = est.reference_constant();
    kahan_sum((0..n_cells).filter_map(|i| {
        if est.is_masked(i) || even[i] == 0 || odd[i] == 0 {
            return None;
        }
        let ha = T::of(even[i] as f64 / n_even) / vol;
        let hb = T::of(odd[i] as f64 / n_odd) / vol;
        let w = est.weight_at(i);
        Some(ha * hb / (c * w * w) * vol)
    }))
}

/// Stability status of an `L^p` sequence across refinements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrendStatus {
    Stable,
    Diverging,
    Ambiguous,
}

impl std::fmt::Display for TrendStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrendStatus::Stable => write!(f, "stable"),
            TrendStatus::Diverging => write!(f, "diverging"),
            TrendStatus::Ambiguous => write!(f, "ambiguous"),
        }
    }
}

/// One exponent's empirical integrals across the refinement ladder.
#[derive(Clone, Debug)]
pub struct LpTrend<T> {
    pub p: f64,
    /// Values at base, doubled and quadrupled bin counts.
    pub values: Vec<T>,
    pub status: TrendStatus,
}

/// Report for the integrability-threshold probe.
#[derive(Clone, Debug)]
pub struct EpsBoundReport<T> {
    /// The sharp exponent margin of the root system.
    pub eps: f64,
    pub trends: Vec<LpTrend<T>>,
}

/// Tracks empirical `L^p` integrals for exponents below and above the
/// sharp threshold `2 + eps`. Exponents below it should stabilize under
/// refinement; those above should grow monotonically.
pub fn verify_eps_bound<T: Real>(
    cfg: &OrbitConfig<T>,
    batch: &RadialSampleBatch<T>,
    base_bins: usize,
) -> Result<EpsBoundReport<T>> {
    let eps = cfg.rs().eps_max().to_f64_lossy();
    let ps = [2.0, 2.0 + eps / 2.0, 2.0 + 0.9 * eps, 2.0 + 1.5 * eps];
    let ests: Vec<DensityEstimate<T>> = [base_bins, 2 * base_bins, 4 * base_bins]
        .iter()
        .map(|&b| estimate(batch, b))
        .collect::<Result<_>>()?;
    let trends = ps
        .iter()
        .map(|&p| {
            let values: Vec<T> = ests.iter().map(|est| crate::density::lp_norm(est, p)).collect();
            let growths: Vec<f64> = values
                .windows(2)
                .map(|w| (w[1] / w[0] - T::one()).to_f64_lossy())
                .collect();
            let status = if growths.iter().all(|&g| g >= LP_DIVERGE_TOL) {
                TrendStatus::Diverging
            } else if growths.iter().all(|&g| g.abs() < LP_STABLE_TOL) {
                TrendStatus::Stable
            } else {
                TrendStatus::Ambiguous
            };
            LpTrend { p, values, status }
        })
        .collect();
    Ok(EpsBoundReport { eps, trends })
}

/// Outcome of the torus-cell weight integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StantonTomasStatus<T> {
    Finite { value: T },
    Diverged,
}

/// Quadrature ladder for the torus-cell weight integral.
#[derive(Clone, Debug)]
pub struct StantonTomasReport<T> {
    pub eps: f64,
    /// (points per dimension, quadrature value) per level.
    pub levels: Vec<(usize, T)>,
    pub status: StantonTomasStatus<T>,
}

/// Rectangle-rule evaluation of the integral of `delta_sq^(-eps/2)` over
/// the fundamental cell of the lattice, on dyadically refined grids.  The
/// nodes carry a small irrational per-dimension offset from the midpoints:
/// the weight vanishes on rational hyperplanes of the cell coordinates,
/// and plain midpoints can land on them once several lattice pairings mix.
///
/// At `eps = 0` every level returns the cell volume exactly.  Divergence
/// is declared when the last `ST_GROWTH_RUN` refinements each grow by at
/// least `ST_GROWTH_TOL`.  In rank one the integrand has simple linear
/// zeros, where midpoint ladders approach non-integrable endpoints too
/// slowly for the ratio rule; there the exact local criterion applies:
/// a transverse power `eps >= 1` diverges.
pub fn stanton_tomas_integral<T: Real>(
    rs: &RootSystem<T>,
    eps: f64,
    base_per_dim: usize,
    levels: usize,
) -> Result<StantonTomasReport<T>> {
    if !(0.0..=8.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps {eps} outside 0..=8")));
    }
    if base_per_dim < 2 || base_per_dim % 2 != 0 {
        return Err(Error::InvalidParameter(
            "base_per_dim must be even and at least 2".into(),
        ));
    }
    if !(4..=12).contains(&levels) {
        return Err(Error::InvalidParameter("levels outside 4..=12".into()));
    }
    let rank = rs.rank();
    let finest = base_per_dim << (levels - 1);
    let budget = (finest as u128).pow(rank as u32);
    if budget > 1 << 24 {
        return Err(Error::InvalidParameter(format!(
            "quadrature budget {budget} exceeds 2^24 points"
        )));
    }

    let gamma = rs.gamma_basis();
    let cell_vol = rs.gamma_cell_volume();
    // Offsets 1/2 + xi (i+1)^2 with irrational xi keep every node off the
    // rational zero hyperplanes of the weight, at any refinement.
    let xi = std::f64::consts::FRAC_1_SQRT_2 * 1e-3;
    let tau: Vec<T> = (0..rank)
        .map(|i| T::of(0.5 + xi * ((i + 1) * (i + 1)) as f64))
        .collect();
    let mut level_values = Vec::with_capacity(levels);
    for l in 0..levels {
        let m = base_per_dim << l;
        let n_pts = (m as u64).pow(rank as u32);
        let inv_m = T::of(1.0 / m as f64);
        let mut acc = T::zero();
        let mut comp = T::zero();
        let mut coords = vec![0usize; rank];
        for flat in 0..n_pts {
            let mut rest = flat;
            for c in coords.iter_mut().rev() {
                *c = (rest % m as u64) as usize;
                rest /= m as u64;
            }
            let mut h = vec![T::zero(); rank];
            for (i, &ki) in coords.iter().enumerate() {
                let ci = (T::of(ki as f64) + tau[i]) * inv_m;
                for (hj, &gj) in h.iter_mut().zip(&gamma[i]) {
                    *hj += ci * gj;
                }
            }
            let dsq = rs.delta_sq(&CartanPoint::new(h));
            if dsq <= T::of(1e-280) {
                return Err(Error::InvalidParameter(format!(
                    "quadrature node at level {l} hit a zero of the weight"
                )));
            }
            let term = dsq.powf(T::of(-eps / 2.0));
            let y = term - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        level_values.push((m, cell_vol * acc / T::of(n_pts as f64)));
    }

    let status = if rank == 1 && eps >= 1.0 {
        // Exact endpoint criterion; the ladder alone would creep.
        StantonTomasStatus::Diverged
    } else {
        let growths: Vec<f64> = level_values
            .windows(2)
            .map(|w| (w[1].1 / w[0].1 - T::one()).to_f64_lossy())
            .collect();
        let run = growths
            .iter()
            .rev()
            .take(ST_GROWTH_RUN)
            .filter(|&&g| g >= ST_GROWTH_TOL)
            .count();
        if run >= ST_GROWTH_RUN {
            StantonTomasStatus::Diverged
        } else {
            StantonTomasStatus::Finite {
                value: level_values.last().expect("levels >= 4").1,
            }
        }
    };
    Ok(StantonTomasReport { eps, levels: level_values, status })
}
