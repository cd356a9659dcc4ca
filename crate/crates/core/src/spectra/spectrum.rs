use crate::channels::{build_superoperator, DilutedMapSpec};
use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};
use crate::numkit::eig_general;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSource {
    pub ensemble: EnsembleKind,
    pub qubits: usize,
    pub rank: usize,
    pub kappa: f64,
    pub unitary_seed: u64,
    pub kraus_seed: u64,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// Index of the eigenvalue closest to 1 (the stationary state).
    pub trivial_index: usize,
    pub source: SpectrumSource,
}

impl Spectrum {
    /// Wraps eigenvalues, locating the trivial one and checking `|λ| ≤ 1 + 1e−8`.
    pub fn new(eigenvalues: Vec<C64>, source: SpectrumSource) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Shape("empty spectrum".into()));
        }
        if let Some(z) = eigenvalues.iter().find(|z| z.norm() > 1.0 + 1e-8) {
            return Err(Error::Numerical(format!("eigenvalue {z} lies outside the unit disk")));
        }
        let trivial_index = eigenvalues
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm()))
            .map(|(i, _)| i)
            .expect("non-empty");
        Ok(Self {
            eigenvalues,
            trivial_index,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// All eigenvalues except the stationary one.
    pub fn nontrivial(&self) -> impl Iterator<Item = C64> + '_ {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.trivial_index)
            .map(|(_, &z)| z)
    }
}

/// Eigenvalues of the superoperator of `spec` (`d ≤ 64`).
pub fn compute_spectrum(spec: &DilutedMapSpec) -> Result<Spectrum> {
    let phi = build_superoperator(spec)?;
    let values = eig_general(&phi, false)?.values;
    Spectrum::new(
        values,
        SpectrumSource {
            ensemble: spec.unitary.ensemble,
            qubits: spec.unitary.qubits,
            rank: spec.kraus.rank(),
            kappa: spec.kappa,
            unitary_seed: spec.unitary.seed,
            kraus_seed: spec.kraus.seed,
        },
    )
}

/// Eigenvalue counts on a `bins × bins` grid over `[−1, 1]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub bins: usize,
    /// Row-major: row indexes the imaginary part, column the real part.
    pub counts: Vec<u64>,
}

impl DensityGrid {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, im_bin: usize, re_bin: usize) -> u64 {
        self.counts[im_bin * self.bins + re_bin]
    }

    /// Bin index of a coordinate in `[−1, 1]`.
    pub fn bin_of(&self, x: f64) -> usize {
        let k = ((x + 1.0) * 0.5 * self.bins as f64).floor();
        (k.max(0.0) as usize).min(self.bins - 1)
    }
}

/// Histogram of the nontrivial eigenvalues of every spectrum.
pub fn density_grid(spectra: &[Spectrum], bins: usize) -> Result<DensityGrid> {
    if bins < 2 {
        return Err(crate::error::invalid("density grid needs at least 2 bins"));
    }
    let mut grid = DensityGrid {
        bins,
        counts: vec![0; bins * bins],
    };
    for s in spectra {
        for z in s.nontrivial() {
            let (row, col) = (grid.bin_of(z.im), grid.bin_of(z.re));
            grid.counts[row * bins + col] += 1;
        }
    }
    Ok(grid)
}
