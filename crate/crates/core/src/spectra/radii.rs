use super::Spectrum;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiiEstimate {
    pub r_minus_measured: f64,
    pub r_plus_measured: f64,
    pub r_minus_pred: f64,
    pub r_plus_pred: f64,
    /// `R = (R₊ − R₋)/2`, from the predictions.
    pub cluster_radius: f64,
    /// `D = (R₊ + R₋)/2`, from the predictions.
    pub center_distance: f64,
}

/// Inner and outer ring radii `R± = √((1−κ)² r ± κ²) / √r`; the inner radius
/// is clamped to 0 past the ring-to-disk threshold.
pub fn predicted_radii(rank: f64, kappa: f64) -> (f64, f64) {
    let coherent = (1.0 - kappa).powi(2) * rank;
    let k2 = kappa * kappa;
    let scale = rank.sqrt();
    let minus = if coherent > k2 {
        (coherent - k2).sqrt() / scale
    } else {
        0.0
    };
    (minus, (coherent + k2).sqrt() / scale)
}

/// Measured extreme moduli of the nontrivial spectrum next to the predictions.
pub fn radii(spectrum: &Spectrum, rank: usize, kappa: f64) -> RadiiEstimate {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for z in spectrum.nontrivial() {
        let m = z.norm();
        lo = lo.min(m);
        hi = hi.max(m);
    }
    if !lo.is_finite() {
        // a single-eigenvalue spectrum has no nontrivial part
        lo = 0.0;
    }
    let (r_minus_pred, r_plus_pred) = predicted_radii(rank as f64, kappa);
    RadiiEstimate {
        r_minus_measured: lo,
        r_plus_measured: hi,
        r_minus_pred,
        r_plus_pred,
        cluster_radius: 0.5 * (r_plus_pred - r_minus_pred),
        center_distance: 0.5 * (r_plus_pred + r_minus_pred),
    }
}

/// Ring-to-disk threshold `1 / (1 + 1/√r)`.
pub fn kappa_rd(rank: f64) -> Result<f64> {
    if !(rank >= 1.0) {
        return Err(invalid(format!("rank {rank} must be at least 1")));
    }
    Ok(1.0 / (1.0 + 1.0 / rank.sqrt()))
}

/// `f(n) = √(2/n + n/8)`.
pub fn cluster_shape_factor(n: usize) -> f64 {
    let n = n as f64;
    (2.0 / n + n / 8.0).sqrt()
}

/// Cluster-to-ring threshold `1 / (1 + f(n)/√r)`, where `n` clusters of
/// radius `(R₊−R₋)/2` cover the same area as the ring.
pub fn kappa_cr(n: usize, rank: f64) -> Result<f64> {
    if n < 1 {
        return Err(invalid("cluster count must be at least 1"));
    }
    if !(rank >= 1.0) {
        return Err(invalid(format!("rank {rank} must be at least 1")));
    }
    Ok(1.0 / (1.0 + cluster_shape_factor(n) / rank.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EnsembleKind;
    use crate::spectra::SpectrumSource;
    use num_complex::Complex64 as C64;

    #[test]
    fn no_dissipation_gives_unit_radii() {
        assert_eq!(predicted_radii(5.0, 0.0), (1.0, 1.0));
    }

    #[test]
    fn inner_radius_vanishes_at_threshold() {
        let k = kappa_rd(5.0).unwrap();
        let (minus, _) = predicted_radii(5.0, k);
        assert!(minus < 1e-6, "{minus}");
        assert_eq!(predicted_radii(5.0, 0.9).0, 0.0);
    }

    #[test]
    fn radii_at_kappa_point_three() {
        // (1−0.3)² = 0.49, 0.3²/5 = 0.018
        let (minus, plus) = predicted_radii(5.0, 0.3);
        assert!((plus - (0.49f64 + 0.018).sqrt()).abs() < 1e-12);
        assert!((minus - (0.49f64 - 0.018).sqrt()).abs() < 1e-12);
        assert!((plus - 0.71274).abs() < 1e-5);
        assert!((minus - 0.68702).abs() < 1e-5);
    }

    #[test]
    fn ring_to_disk_values() {
        assert_eq!(kappa_rd(1.0).unwrap(), 0.5);
        assert!((kappa_rd(5.0).unwrap() - 0.691).abs() < 1e-3);
        assert!(kappa_rd(1e8).unwrap() > 0.9999);
        assert!(kappa_rd(0.5).is_err());
    }

    #[test]
    fn cluster_to_ring_values() {
        for r in 1..=64 {
            assert_eq!(kappa_cr(4, r as f64).unwrap(), kappa_rd(r as f64).unwrap());
        }
        let f16 = cluster_shape_factor(16);
        assert!((f16 - 2.125f64.sqrt()).abs() < 1e-12);
        let expected = 1.0 / (1.0 + 2.125f64.sqrt() / 5f64.sqrt());
        assert!((kappa_cr(16, 5.0).unwrap() - expected).abs() < 1e-12);
        assert!((kappa_cr(16, 5.0).unwrap() - 0.60535).abs() < 1e-5);
        let ratio = cluster_shape_factor(1024) / (1024.0f64 / 8.0).sqrt();
        assert!((ratio - 1.0).abs() < 1e-3);
        assert!(kappa_cr(0, 5.0).is_err());
    }

    #[test]
    fn measured_radii_skip_the_trivial_eigenvalue() {
        let values = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.5), C64::new(-0.2, 0.0)];
        let source = SpectrumSource {
            ensemble: EnsembleKind::Cue,
            qubits: 1,
            rank: 1,
            kappa: 0.5,
            unitary_seed: 0,
            kraus_seed: 0,
        };
        let s = Spectrum::new(values, source).unwrap();
        let est = radii(&s, 1, 0.5);
        assert!((est.r_minus_measured - 0.2).abs() < 1e-15);
        assert!((est.r_plus_measured - 0.5).abs() < 1e-15);
        assert!(est.r_minus_pred <= est.r_plus_pred);
        assert!((est.cluster_radius + est.center_distance - est.r_plus_pred).abs() < 1e-15);
    }
}
