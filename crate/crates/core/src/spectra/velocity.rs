use super::{DEFAULT_D_KAPPA_FRACTION, DEFAULT_REAL_TOL};
use crate::channels::{build_superoperator, sample_kraus, DilutedMapSpec, KrausSet};
use crate::ensembles::{EnsembleKind, EnsembleSpec, UnitarySample};
use crate::error::{invalid, Error, Result};
use crate::numkit::eig_general;
use crate::rng::derive_seed;
use num_complex::Complex64 as C64;
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityOptions {
    pub d_kappa_fraction: f64,
    pub real_tol: f64,
}

impl Default for VelocityOptions {
    fn default() -> Self {
        Self {
            d_kappa_fraction: DEFAULT_D_KAPPA_FRACTION,
            real_tol: DEFAULT_REAL_TOL,
        }
    }
}

impl VelocityOptions {
    fn validate(&self) -> Result<()> {
        if !(self.d_kappa_fraction > 0.0 && self.d_kappa_fraction.is_finite()) {
            return Err(invalid(format!(
                "d_kappa_fraction must be positive, got {}",
                self.d_kappa_fraction
            )));
        }
        if !(self.real_tol >= 0.0 && self.real_tol.is_finite()) {
            return Err(invalid(format!("real_tol must be non-negative, got {}", self.real_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedEigenvalue {
    pub index_a: usize,
    pub index_b: usize,
    pub velocity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySample {
    pub kappa: f64,
    pub d_kappa: f64,
    pub mean: f64,
    pub per_eigenvalue: Vec<TrackedEigenvalue>,
    pub discarded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist: f64,
    row: usize,
    col: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.row.cmp(&other.row))
            .then(self.col.cmp(&other.col))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const SHORTLIST: usize = 8;

/// Nearest unmatched columns of `row`, closest last so `pop` yields the best.
fn shortlist(row: usize, z: C64, b: &[C64], taken: &[bool]) -> Vec<Candidate> {
    let mut all: Vec<Candidate> = b
        .iter()
        .enumerate()
        .filter(|(j, _)| !taken[*j])
        .map(|(col, w)| Candidate {
            dist: (z - w).norm(),
            row,
            col,
        })
        .collect();
    if all.len() > SHORTLIST {
        all.select_nth_unstable(SHORTLIST - 1);
        all.truncate(SHORTLIST);
    }
    all.sort_unstable_by(|x, y| y.cmp(x));
    all
}

/// Greedy global matching: repeatedly pairs the closest unmatched
/// `(a[i], b[j])`, ties going to the lower `i` then the lower `j`.
/// Returns `(i, j)` pairs sorted by `i`.
pub fn match_eigenvalues(a: &[C64], b: &[C64]) -> Result<Vec<(usize, usize)>> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "cannot match spectra of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    let mut taken = vec![false; n];
    let mut lists: Vec<Vec<Candidate>> = Vec::with_capacity(n);
    let mut heap = BinaryHeap::with_capacity(n);
    for (i, &z) in a.iter().enumerate() {
        let mut list = shortlist(i, z, b, &taken);
        if let Some(c) = list.pop() {
            heap.push(Reverse(c));
        }
        lists.push(list);
    }

    let mut partner = vec![usize::MAX; n];
    while let Some(Reverse(c)) = heap.pop() {
        if !taken[c.col] {
            taken[c.col] = true;
            partner[c.row] = c.col;
            continue;
        }
        // stale head: advance this row to its next unmatched column
        let list = &mut lists[c.row];
        let next = loop {
            match list.pop() {
                Some(next) if taken[next.col] => continue,
                Some(next) => break Some(next),
                None => {
                    *list = shortlist(c.row, a[c.row], b, &taken);
                    break list.pop();
                }
            }
        };
        if let Some(next) = next {
            heap.push(Reverse(next));
        }
    }
    Ok(partner.into_iter().enumerate().collect())
}

/// Angular velocities between two spectra `dκ` apart.
pub fn angular_velocity_from_spectra(
    kappa: f64,
    d_kappa: f64,
    a: &[C64],
    b: &[C64],
    real_tol: f64,
) -> Result<VelocitySample> {
    if !(d_kappa > 0.0) {
        return Err(invalid(format!("dκ must be positive, got {d_kappa}")));
    }
    let pairs = match_eigenvalues(a, b)?;
    let mut per_eigenvalue = Vec::with_capacity(pairs.len());
    let mut discarded = 0;
    for (i, j) in pairs {
        let (za, zb) = (a[i], b[j]);
        if za.im.abs() < real_tol || zb.im.abs() < real_tol {
            discarded += 1;
            continue;
        }
        // arg of the ratio is the minimal signed angle difference
        let dtheta = (zb * za.conj()).arg();
        per_eigenvalue.push(TrackedEigenvalue {
            index_a: i,
            index_b: j,
            velocity: dtheta.abs() / d_kappa,
        });
    }
    if per_eigenvalue.is_empty() {
        return Err(Error::AllDiscarded);
    }
    let mean = per_eigenvalue.iter().map(|t| t.velocity).sum::<f64>() / per_eigenvalue.len() as f64;
    Ok(VelocitySample {
        kappa,
        d_kappa,
        mean,
        per_eigenvalue,
        discarded,
    })
}

fn spectrum_values(unitary: &UnitarySample, kraus: &KrausSet, kappa: f64) -> Result<Vec<C64>> {
    let spec = DilutedMapSpec::new(unitary.clone(), kraus.clone(), kappa)?;
    let phi = build_superoperator(&spec)?;
    Ok(eig_general(&phi, false)?.values)
}

fn check_kappa(kappa: f64, opts: &VelocityOptions) -> Result<f64> {
    let d_kappa = kappa * opts.d_kappa_fraction;
    if !(kappa > 0.0 && kappa + d_kappa <= 1.0) {
        return Err(invalid(format!(
            "κ = {kappa} must satisfy 0 < κ and κ(1 + {}) ≤ 1",
            opts.d_kappa_fraction
        )));
    }
    Ok(d_kappa)
}

/// Mean `|Δθ|/dκ` of the map's eigenvalues between `κ` and `κ + dκ`, with the
/// same unitary and Kraus set at both points.
pub fn angular_velocity(
    unitary: &UnitarySample,
    kraus: &KrausSet,
    kappa: f64,
    opts: &VelocityOptions,
) -> Result<VelocitySample> {
    opts.validate()?;
    let d_kappa = check_kappa(kappa, opts)?;
    let a = spectrum_values(unitary, kraus, kappa)?;
    let b = spectrum_values(unitary, kraus, kappa + d_kappa)?;
    angular_velocity_from_spectra(kappa, d_kappa, &a, &b, opts.real_tol)
}

/// Velocities along `kappas` for one realization: the unitary comes from
/// `derive_seed(seed, 0)`, the Kraus set from `derive_seed(seed, 1)`.
pub fn velocity_for_seed(
    ensemble: &EnsembleSpec,
    qubits: usize,
    rank: usize,
    kappas: &[f64],
    seed: u64,
    opts: &VelocityOptions,
) -> Result<Vec<VelocitySample>> {
    opts.validate()?;
    for &k in kappas {
        check_kappa(k, opts)?;
    }
    let unitary = ensemble.sample(qubits, derive_seed(seed, 0))?;
    let kraus = sample_kraus(unitary.dim(), rank, derive_seed(seed, 1))?;
    kappas
        .iter()
        .map(|&k| angular_velocity(&unitary, &kraus, k, opts))
        .collect()
}

/// Seed-averaged angular velocity on a κ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityCurve {
    pub ensemble: EnsembleKind,
    pub qubits: usize,
    pub rank: usize,
    pub kappas: Vec<f64>,
    pub mean_velocity: Vec<f64>,
    /// Discarded pairs at each κ, summed over seeds.
    pub n_discarded: Vec<usize>,
    pub n_seeds: usize,
    pub d_kappa_fraction: f64,
}

impl VelocityCurve {
    /// Averages per-seed sample rows (each aligned with `kappas`), in the
    /// order given.
    pub fn from_samples(
        ensemble: EnsembleKind,
        qubits: usize,
        rank: usize,
        kappas: Vec<f64>,
        d_kappa_fraction: f64,
        per_seed: &[Vec<VelocitySample>],
    ) -> Result<Self> {
        if per_seed.is_empty() {
            return Err(invalid("a velocity curve needs at least one seed"));
        }
        if per_seed.iter().any(|row| row.len() != kappas.len()) {
            return Err(Error::Shape("velocity samples do not match the κ grid".into()));
        }
        let n = per_seed.len() as f64;
        let mean_velocity = (0..kappas.len())
            .map(|k| per_seed.iter().map(|row| row[k].mean).sum::<f64>() / n)
            .collect();
        let n_discarded = (0..kappas.len())
            .map(|k| per_seed.iter().map(|row| row[k].discarded).sum())
            .collect();
        Ok(Self {
            ensemble,
            qubits,
            rank,
            kappas,
            mean_velocity,
            n_discarded,
            n_seeds: per_seed.len(),
            d_kappa_fraction,
        })
    }
}

/// Sequential sweep over `seeds`; see [`velocity_for_seed`].
pub fn velocity_curve(
    ensemble: &EnsembleSpec,
    qubits: usize,
    rank: usize,
    kappas: &[f64],
    seeds: &[u64],
    opts: &VelocityOptions,
) -> Result<VelocityCurve> {
    let per_seed = seeds
        .iter()
        .map(|&s| velocity_for_seed(ensemble, qubits, rank, kappas, s, opts))
        .collect::<Result<Vec<_>>>()?;
    VelocityCurve::from_samples(
        ensemble.kind,
        qubits,
        rank,
        kappas.to_vec(),
        opts.d_kappa_fraction,
        &per_seed,
    )
}

/// Smallest grid κ from which the model curve stays within relative distance
/// `epsilon` of the baseline for every larger κ.
pub fn detect_transition(model: &VelocityCurve, baseline: &VelocityCurve, epsilon: f64) -> Result<Option<f64>> {
    if model.kappas != baseline.kappas {
        return Err(Error::Shape("velocity curves use different κ grids".into()));
    }
    if !(epsilon > 0.0) {
        return Err(invalid(format!("ε must be positive, got {epsilon}")));
    }
    let close = |k: usize| {
        let (m, b) = (model.mean_velocity[k], baseline.mean_velocity[k]);
        if b == 0.0 {
            m == 0.0
        } else {
            ((m - b) / b).abs() < epsilon
        }
    };
    let n = model.kappas.len();
    let mut first = n;
    while first > 0 && close(first - 1) {
        first -= 1;
    }
    Ok((first < n).then(|| model.kappas[first]))
}
