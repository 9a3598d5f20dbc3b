//! Hilbert spaces: the maximal Dicke sector, a truncated Fock space, and
//! their tensor product.
//!
//! Basis conventions, fixed so matrix fixtures are bit-reproducible:
//! Dicke states are ordered by descending magnetic number, `m = J, J-1, ...,
//! -J` with `J = N/2`; Fock states by ascending photon number; product
//! indices are photon-major, `index = photon * (N + 1) + dicke_index`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HilbertSpace {
    /// Maximal-J sector of N spin-1/2 atoms, dimension N + 1.
    Dicke { atoms: u32 },
    /// Photon space truncated at `dim` levels (occupations 0..dim-1).
    Fock { dim: usize },
    /// Fock x Dicke tensor product, photon-major index ordering.
    Product { fock_dim: usize, atoms: u32 },
}

impl HilbertSpace {
    pub fn dicke(atoms: u32) -> Result<Self> {
        if atoms < 1 {
            return Err(Error::Invalid("Dicke sector needs at least one atom"));
        }
        Ok(HilbertSpace::Dicke { atoms })
    }

    pub fn fock(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Invalid("Fock cutoff must be at least 2"));
        }
        Ok(HilbertSpace::Fock { dim })
    }

    pub fn product(fock_dim: usize, atoms: u32) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::Invalid("Fock cutoff must be at least 2"));
        }
        if atoms < 1 {
            return Err(Error::Invalid("Dicke sector needs at least one atom"));
        }
        Ok(HilbertSpace::Product { fock_dim, atoms })
    }

    pub fn dim(&self) -> usize {
        match *self {
            HilbertSpace::Dicke { atoms } => atoms as usize + 1,
            HilbertSpace::Fock { dim } => dim,
            HilbertSpace::Product { fock_dim, atoms } => fock_dim * (atoms as usize + 1),
        }
    }

    /// Atom count, when the space has an atomic sector.
    pub fn atoms(&self) -> Option<u32> {
        match *self {
            HilbertSpace::Dicke { atoms } | HilbertSpace::Product { atoms, .. } => Some(atoms),
            HilbertSpace::Fock { .. } => None,
        }
    }

    /// Total spin J = N/2 of the atomic sector.
    pub fn total_spin(&self) -> Option<f64> {
        self.atoms().map(|n| n as f64 / 2.0)
    }
}

/// Magnetic quantum number of the `idx`-th Dicke basis state (m descending).
pub fn dicke_m(atoms: u32, idx: usize) -> f64 {
    atoms as f64 / 2.0 - idx as f64
}
