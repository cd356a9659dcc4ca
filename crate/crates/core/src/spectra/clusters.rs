use crate::ensembles::UnitarySample;
use crate::error::Result;
use crate::numkit::eig_general;
use std::f64::consts::TAU;

/// Eigenphase clustering of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub n: usize,
    /// Angles in `[0, 2π)` at the midpoints of the boundary gaps.
    pub boundaries: Vec<f64>,
    /// Sorted eigenphases in `[0, 2π)`.
    pub eigenphases: Vec<f64>,
    pub gap_factor: f64,
    pub reference_spacing: f64,
}

/// Eigenphases of `u`, sorted in `[0, 2π)`.
pub fn eigenphases(u: &UnitarySample) -> Result<Vec<f64>> {
    let values = eig_general(&u.matrix, false)?.values;
    let mut phases: Vec<f64> = values.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    // rem_euclid can round a tiny negative angle up to exactly 2π
    for p in &mut phases {
        if *p >= TAU {
            *p = 0.0;
        }
    }
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// Counts eigenphase clusters: every circular gap wider than
/// `gap_factor · 2π/d³` separates two clusters.
pub fn count_clusters(u: &UnitarySample, gap_factor: f64) -> Result<ClusterReport> {
    if !(gap_factor > 0.0 && gap_factor.is_finite()) {
        return Err(crate::error::invalid(format!(
            "gap factor must be positive, got {gap_factor}"
        )));
    }
    let phases = eigenphases(u)?;
    let d = phases.len() as f64;
    let reference_spacing = TAU / (d * d * d);
    let threshold = gap_factor * reference_spacing;

    let m = phases.len();
    let gap = |i: usize| {
        if i + 1 < m {
            phases[i + 1] - phases[i]
        } else {
            phases[0] + TAU - phases[m - 1]
        }
    };
    let midpoint = |i: usize| (phases[i] + 0.5 * gap(i)).rem_euclid(TAU);

    let mut boundaries: Vec<f64> = (0..m).filter(|&i| gap(i) > threshold).map(midpoint).collect();
    if boundaries.is_empty() {
        let widest = (0..m)
            .max_by(|&a, &b| gap(a).total_cmp(&gap(b)))
            .expect("non-empty spectrum");
        boundaries.push(midpoint(widest));
    }
    boundaries.sort_by(f64::total_cmp);
    Ok(ClusterReport {
        n: boundaries.len(),
        boundaries,
        eigenphases: phases,
        gap_factor,
        reference_spacing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_qft, sample_clifford, sample_cue, EnsembleKind, EnsembleParams};
    use crate::numkit::ComplexMatrix;
    use num_complex::Complex64 as C64;

    fn identity(qubits: usize) -> UnitarySample {
        let d = 1 << qubits;
        UnitarySample::new(
            EnsembleKind::Cue,
            qubits,
            ComplexMatrix::identity(d),
            0,
            EnsembleParams::None,
        )
        .unwrap()
    }

    /// Distinct eigenvalues on the circle, merged by chordal distance.
    fn dedup_count(u: &UnitarySample, tol: f64) -> usize {
        let values = eig_general(&u.matrix, false).unwrap().values;
        let mut reps: Vec<C64> = Vec::new();
        for z in values {
            if reps.iter().all(|r| (r - z).norm() > tol) {
                reps.push(z);
            }
        }
        reps.len()
    }

    #[test]
    fn identity_is_one_cluster() {
        for q in 1..=4 {
            let r = count_clusters(&identity(q), 5.0).unwrap();
            assert_eq!(r.n, 1);
            assert_eq!(r.boundaries.len(), 1);
        }
    }

    #[test]
    fn qft_has_four_clusters() {
        for q in 3..=6 {
            let u = build_qft(q).unwrap();
            for gf in [2.0, 3.5, 5.0, 10.0, 17.0, 20.0] {
                assert_eq!(count_clusters(&u, gf).unwrap().n, 4, "L={q} gf={gf}");
            }
        }
    }

    #[test]
    fn smallest_qft_lacks_one_root() {
        // the 4×4 DFT has eigenvalues 1, 1, −1, −i
        let u = build_qft(2).unwrap();
        assert_eq!(dedup_count(&u, 1e-6), 3);
        assert_eq!(count_clusters(&u, 5.0).unwrap().n, 3);
    }

    #[test]
    fn clifford_matches_exact_deduplication() {
        for seed in 0..20 {
            let u = sample_clifford(4, 192, seed).unwrap();
            let r = count_clusters(&u, 5.0).unwrap();
            assert_eq!(r.n, dedup_count(&u, 1e-6), "seed {seed}");
        }
    }

    #[test]
    fn cue_spectrum_resolves_every_level() {
        let u = sample_cue(3, 9).unwrap();
        assert_eq!(count_clusters(&u, 5.0).unwrap().n, 8);
    }

    #[test]
    fn phases_are_sorted_and_in_range() {
        let u = sample_cue(4, 3).unwrap();
        let r = count_clusters(&u, 5.0).unwrap();
        assert_eq!(r.eigenphases.len(), 16);
        assert!(r.eigenphases.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.eigenphases.iter().all(|p| (0.0..TAU).contains(p)));
        assert!(r.boundaries.iter().all(|p| (0.0..TAU).contains(p)));
    }

    #[test]
    fn rejects_bad_gap_factor() {
        assert!(count_clusters(&identity(1), 0.0).is_err());
        assert!(count_clusters(&identity(1), f64::NAN).is_err());
    }
}
