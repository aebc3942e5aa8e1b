//! Square-lattice Ising dynamics: single-site Metropolis with periodic
//! boundaries, zero external field.

use crate::lattice::GridShape;
use crate::rng::Stream;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingParams {
    pub coupling: f64,
    pub temperature: f64,
}

impl Default for IsingParams {
    fn default() -> Self {
        // Near-critical temperature for the 2D square lattice (T_c ~ 2.269).
        Self { coupling: 1.0, temperature: 2.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinLattice {
    shape: GridShape,
    spins: Vec<i8>,
}

impl SpinLattice {
    pub fn uniform(shape: GridShape, spin: i8) -> Self {
        assert!(spin == 1 || spin == -1);
        Self { shape, spins: vec![spin; shape.num_sites()] }
    }

    pub fn from_spins(shape: GridShape, spins: Vec<i8>) -> Self {
        assert_eq!(spins.len(), shape.num_sites());
        assert!(spins.iter().all(|&s| s == 1 || s == -1));
        Self { shape, spins }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn spin(&self, row: usize, col: usize) -> i8 {
        self.spins[self.shape.index(row, col)]
    }

    #[inline]
    pub fn flip(&mut self, row: usize, col: usize) {
        let i = self.shape.index(row, col);
        self.spins[i] = -self.spins[i];
    }

    pub fn magnetization(&self) -> f64 {
        let sum: i64 = self.spins.iter().map(|&s| s as i64).sum();
        sum as f64 / self.spins.len() as f64
    }

    /// Spins as a site-indexed f64 field, for coarse-graining.
    pub fn site_values(&self) -> Vec<f64> {
        self.spins.iter().map(|&s| s as f64).collect()
    }

    /// Total energy, each bond counted once: E = -J sum over bonds s_i s_j.
    pub fn energy(&self, params: &IsingParams) -> f64 {
        let n = self.shape.size();
        let mut bonds: i64 = 0;
        for row in 0..n {
            for col in 0..n {
                let s = self.spin(row, col) as i64;
                bonds += s * self.spin((row + 1) % n, col) as i64;
                bonds += s * self.spin(row, (col + 1) % n) as i64;
            }
        }
        -params.coupling * bonds as f64
    }
}

/// Energy change from flipping the spin at (row, col):
/// dE = 2 J s sum of the four periodic neighbors.
#[inline]
pub fn local_energy_delta(lattice: &SpinLattice, row: usize, col: usize, params: &IsingParams) -> f64 {
    let mut nb = 0i32;
    for (r, c) in lattice.shape().neighbors(row, col) {
        nb += lattice.spin(r, c) as i32;
    }
    2.0 * params.coupling * lattice.spin(row, col) as f64 * nb as f64
}

/// One sweep = N^2 single-site proposals at uniformly random sites (with
/// replacement). Every proposal consumes exactly one site draw and one
/// acceptance draw, so the stream position is independent of the acceptance
/// history. Returns the number of accepted flips.
pub fn metropolis_sweep(lattice: &mut SpinLattice, params: &IsingParams, rng: &mut Stream) -> usize {
    let n = lattice.shape().size();
    let beta = 1.0 / params.temperature;
    let mut accepted = 0;
    for _ in 0..n * n {
        let site = rng.gen_range(0..n * n);
        let (row, col) = (site / n, site % n);
        let delta = local_energy_delta(lattice, row, col, params);
        let u: f64 = rng.gen();
        if u < (-delta * beta).exp() {
            lattice.flip(row, col);
            accepted += 1;
        }
    }
    accepted
}
