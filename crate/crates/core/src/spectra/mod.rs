//! Spectral diagnostics of diluted maps: spectra and densities, ring radii,
//! cluster counts and transition thresholds, eigenvalue tracking and angular
//! velocities.

mod clusters;
mod radii;
mod spectrum;
mod velocity;

pub use clusters::{count_clusters, eigenphases, ClusterReport};
pub use radii::{cluster_shape_factor, kappa_cr, kappa_rd, predicted_radii, radii, RadiiEstimate};
pub use spectrum::{compute_spectrum, density_grid, DensityGrid, Spectrum, SpectrumSource};
pub use velocity::{
    angular_velocity, angular_velocity_from_spectra, detect_transition, match_eigenvalues, velocity_curve,
    velocity_for_seed, TrackedEigenvalue, VelocityCurve, VelocityOptions, VelocitySample,
};

/// A circular gap this many reference spacings wide opens a cluster boundary.
pub const DEFAULT_GAP_FACTOR: f64 = 5.0;
/// Eigenvalues with `|Im λ|` below this are treated as real.
pub const DEFAULT_REAL_TOL: f64 = 1e-6;
/// `dκ = κ · DEFAULT_D_KAPPA_FRACTION`.
pub const DEFAULT_D_KAPPA_FRACTION: f64 = 1e-3;
