//! Extraction of first and second spin moments (and the photon number)
//! from pure or mixed states.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::operators::{
    dicke_spin_ops, lift_to_product, photon_number_on_product, Operator,
};
use crate::state::{inner, DenseMatrix, QuantumState, StateRepr};

/// First moments, symmetrized second moments, and the total spin J = N/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    /// (<Jx>, <Jy>, <Jz>)
    pub first: [f64; 3],
    /// second[i][j] = <Ji Jj + Jj Ji> / 2
    pub second: [[f64; 3]; 3],
    pub j: f64,
}

impl SpinMoments {
    /// Variance of the i-th component.
    pub fn variance(&self, i: usize) -> f64 {
        self.second[i][i] - self.first[i] * self.first[i]
    }

    /// |<J>|
    pub fn mean_spin_length(&self) -> f64 {
        self.first
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// One sampled instant of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSample {
    pub spin: SpinMoments,
    /// <n>, zero for models without a photonic sector.
    pub photons: f64,
}

/// Precomputed observables for repeated moment extraction on one space.
#[derive(Debug, Clone)]
pub struct SpinMeasurer {
    space: HilbertSpace,
    jx: Operator,
    jy: Operator,
    jz: Operator,
    photon_number: Option<Operator>,
    j: f64,
}

impl SpinMeasurer {
    /// Measurer for the bare Dicke sector.
    pub fn dicke(atoms: u32) -> Result<Self> {
        let ops = dicke_spin_ops(atoms)?;
        Ok(SpinMeasurer {
            space: HilbertSpace::dicke(atoms)?,
            jx: ops.jx,
            jy: ops.jy,
            jz: ops.jz,
            photon_number: None,
            j: atoms as f64 / 2.0,
        })
    }

    /// Measurer for the Fock x Dicke product space of the full model.
    pub fn product(fock_dim: usize, atoms: u32) -> Result<Self> {
        let ops = dicke_spin_ops(atoms)?;
        Ok(SpinMeasurer {
            space: HilbertSpace::product(fock_dim, atoms)?,
            jx: lift_to_product(&ops.jx, fock_dim)?,
            jy: lift_to_product(&ops.jy, fock_dim)?,
            jz: lift_to_product(&ops.jz, fock_dim)?,
            photon_number: Some(photon_number_on_product(fock_dim, atoms)?),
            j: atoms as f64 / 2.0,
        })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn measure(&self, state: &QuantumState) -> Result<MomentSample> {
        if state.space() != self.space {
            return Err(Error::Invalid("state lives on a different space"));
        }
        match state.repr() {
            StateRepr::Pure(psi) => Ok(self.measure_pure(psi)),
            StateRepr::Mixed(rho) => Ok(self.measure_mixed(rho)),
        }
    }

    /// Moments of a pure state from three applications J_i |psi>.
    pub fn measure_pure(&self, psi: &[Complex64]) -> MomentSample {
        let dim = psi.len();
        let mut jx_psi = vec![Complex64::new(0.0, 0.0); dim];
        let mut jy_psi = vec![Complex64::new(0.0, 0.0); dim];
        let mut jz_psi = vec![Complex64::new(0.0, 0.0); dim];
        self.jx.matrix().matvec(psi, &mut jx_psi);
        self.jy.matrix().matvec(psi, &mut jy_psi);
        self.jz.matrix().matvec(psi, &mut jz_psi);

        let applied = [&jx_psi, &jy_psi, &jz_psi];
        let mut first = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for i in 0..3 {
            first[i] = inner(psi, applied[i]).re;
            for k in i..3 {
                // <Ji Jk>_sym = Re <Ji psi | Jk psi> for Hermitian Ji, Jk
                let sym = inner(applied[i], applied[k]).re;
                second[i][k] = sym;
                second[k][i] = sym;
            }
        }

        let photons = self
            .photon_number
            .as_ref()
            .map(|n| {
                let diag = n.matrix();
                let mut acc = 0.0;
                for (r, c, v) in diag.iter_entries() {
                    debug_assert_eq!(r, c);
                    acc += v.re * psi[r].norm_sqr();
                }
                acc
            })
            .unwrap_or(0.0);

        MomentSample {
            spin: SpinMoments {
                first,
                second,
                j: self.j,
            },
            photons,
        }
    }

    /// Moments of a density matrix from traces against the spin operators.
    pub fn measure_mixed(&self, rho: &DenseMatrix) -> MomentSample {
        let dim = rho.dim();
        let ops = [&self.jx, &self.jy, &self.jz];
        let mut first = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        let mut product: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..3 {
            first[k] = ops[k].matrix().trace_product_dense(rho.data()).re;
            ops[k].matrix().mul_dense(rho.data(), &mut product);
            for i in 0..3 {
                // Tr(Ji Jk rho); both orders of each off-diagonal pair land
                // here once, so the two half-contributions symmetrize them,
                // while the diagonal gets its single full contribution.
                let v = ops[i].matrix().trace_product_dense(&product).re;
                second[i][k] += 0.5 * v;
                second[k][i] += 0.5 * v;
            }
        }

        let photons = self
            .photon_number
            .as_ref()
            .map(|n| n.matrix().trace_product_dense(rho.data()).re)
            .unwrap_or(0.0);

        MomentSample {
            spin: SpinMoments {
                first,
                second,
                j: self.j,
            },
            photons,
        }
    }
}
