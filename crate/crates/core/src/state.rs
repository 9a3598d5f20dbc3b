//! Quantum states: pure vectors and density matrices.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::operators::Operator;

/// Dense row-major square complex matrix; used for density matrices on the
/// Dicke sector, where mixed-state evolution is affordable.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// |psi><psi|
    pub fn projector(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in psi {
            for b in psi {
                data.push(a * b.conj());
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..=r {
                err = err.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        err
    }

    /// <v|rho|v> for a sampled positivity check.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.dim {
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..self.dim {
                row += self.data[r * self.dim + c] * v[c];
            }
            acc += v[r].conj() * row;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Pure(Vec<Complex64>),
    Mixed(DenseMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: HilbertSpace,
    repr: StateRepr,
}

impl QuantumState {
    pub fn pure(space: HilbertSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::Invalid("state length does not match space dimension"));
        }
        Ok(QuantumState {
            space,
            repr: StateRepr::Pure(amplitudes),
        })
    }

    pub fn mixed(space: HilbertSpace, rho: DenseMatrix) -> Result<Self> {
        if rho.dim() != space.dim() {
            return Err(Error::Invalid("matrix size does not match space dimension"));
        }
        Ok(QuantumState {
            space,
            repr: StateRepr::Mixed(rho),
        })
    }

    /// Fock vacuum tensor CSS-style product state: `photon` part at |0>,
    /// atomic amplitudes supplied by the caller.
    pub fn vacuum_product(fock_dim: usize, atomic: &[Complex64]) -> Result<Self> {
        let atoms = atomic.len() as u32 - 1;
        let space = HilbertSpace::product(fock_dim, atoms)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        amps[..atomic.len()].copy_from_slice(atomic);
        QuantumState::pure(space, amps)
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn as_pure(&self) -> Option<&[Complex64]> {
        match &self.repr {
            StateRepr::Pure(v) => Some(v),
            StateRepr::Mixed(_) => None,
        }
    }

    pub fn as_mixed(&self) -> Option<&DenseMatrix> {
        match &self.repr {
            StateRepr::Pure(_) => None,
            StateRepr::Mixed(m) => Some(m),
        }
    }

    /// State norm (pure) or trace (mixed).
    pub fn weight(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt(),
            StateRepr::Mixed(m) => m.trace().re,
        }
    }

    pub fn renormalize(&mut self) {
        match &mut self.repr {
            StateRepr::Pure(v) => {
                let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for a in v.iter_mut() {
                        *a /= norm;
                    }
                }
            }
            StateRepr::Mixed(m) => {
                let tr = m.trace().re;
                if tr != 0.0 {
                    for a in m.data_mut().iter_mut() {
                        *a /= tr;
                    }
                }
            }
        }
    }

    /// <A> in this state.
    pub fn expect(&self, op: &Operator) -> Complex64 {
        debug_assert_eq!(op.space(), self.space);
        match &self.repr {
            StateRepr::Pure(v) => {
                let mut av = vec![Complex64::new(0.0, 0.0); v.len()];
                op.matrix().matvec(v, &mut av);
                inner(v, &av)
            }
            StateRepr::Mixed(m) => op.matrix().trace_product_dense(m.data()),
        }
    }

    pub fn expect_real(&self, op: &Operator) -> f64 {
        self.expect(op).re
    }
}

/// <a|b>
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_trace_is_norm_sqr() {
        let psi = [
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ];
        let rho = DenseMatrix::projector(&psi);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(rho.hermiticity_error() < 1e-15);
    }

    #[test]
    fn renormalize_pure() {
        let space = HilbertSpace::dicke(1).unwrap();
        let mut s = QuantumState::pure(
            space,
            vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)],
        )
        .unwrap();
        s.renormalize();
        assert!((s.weight() - 1.0).abs() < 1e-15);
    }
}
