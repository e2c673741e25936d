//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Requested a Lie type / rank combination outside the supported table.
    #[error("unsupported root system: type {lie_type} rank {rank} (supported: A 1-6, B/C/D 2-4)")]
    UnsupportedType { lie_type: char, rank: usize },

    /// An iterative eigensolver failed to converge.  Samples hit by this are
    /// discarded, never retried; callers report the discard count.
    #[error("eigensolver failed to converge after {sweeps} sweeps")]
    EigenFailure { sweeps: usize },

    /// All samples of a batch are identical, so no density grid can be built.
    /// For classification this is evidence, not a failure: a radial Dirac.
    #[error("degenerate support: all {n} samples coincide within tolerance")]
    DegenerateSupport { n: usize },

    /// The wrapping weight `j` vanishes on a non-negligible part of the
    /// support, so division by `j` is meaningless there.
    #[error("j vanishes on {mass_fraction:.3}% of the support mass (limit 1%)")]
    JZeroOnSupport { mass_fraction: f64 },

    /// Group-side prediction requested for a configuration whose orbit
    /// dimension drops under the exponential map.
    #[error("conjugacy class dimension differs from orbit dimension for rep {rep_index}")]
    DimMismatch { rep_index: usize },

    /// Malformed or inconsistent user input (configs, radii, grid sizes).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
