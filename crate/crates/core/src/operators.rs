//! Collective-spin and cavity operators, dispersive Hamiltonians, and
//! spin-coherent initial states.

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{dicke_m, HilbertSpace};
use crate::sparse::CsrMatrix;
use crate::state::QuantumState;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A labeled operator: a CSR matrix tied to its Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CsrMatrix,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CsrMatrix) -> Result<Self> {
        if matrix.dim() != space.dim() {
            return Err(Error::Invalid("matrix size does not match space dimension"));
        }
        Ok(Operator { space, matrix })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            space: self.space,
            matrix: self.matrix.dagger(),
        }
    }

    pub fn scaled(&self, scale: Complex64) -> Operator {
        Operator {
            space: self.space,
            matrix: self.matrix.scaled(scale),
        }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        debug_assert_eq!(self.space, other.space);
        Operator {
            space: self.space,
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        debug_assert_eq!(self.space, other.space);
        Operator {
            space: self.space,
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    /// [self, other]
    pub fn commutator(&self, other: &Operator) -> Operator {
        self.matmul(other)
            .add(&other.matmul(self).scaled(re(-1.0)))
    }
}

/// The collective spin family on the maximal Dicke sector.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub jx: Operator,
    pub jy: Operator,
    pub jz: Operator,
    pub jplus: Operator,
    pub jminus: Operator,
    pub j2: Operator,
}

/// Spin operators on the (N+1)-dimensional Dicke sector, basis ordered by
/// descending m. Jz is diagonal and J2 = J(J+1) I.
pub fn dicke_spin_ops(atoms: u32) -> Result<SpinOps> {
    let space = HilbertSpace::dicke(atoms)?;
    let dim = space.dim();
    let j = atoms as f64 / 2.0;

    let jz = Operator::new(
        space,
        CsrMatrix::from_diagonal_fn(dim, |i| re(dicke_m(atoms, i))),
    )?;

    // J+ |J,m> = sqrt(J(J+1) - m(m+1)) |J,m+1>; raising m moves one index up.
    let mut up = Vec::with_capacity(dim - 1);
    for i in 1..dim {
        let m = dicke_m(atoms, i);
        let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        up.push((i - 1, i, re(amp)));
    }
    let jplus = Operator::new(space, CsrMatrix::from_triplets(dim, &up))?;
    let jminus = jplus.dagger();

    let jx = jplus.add(&jminus).scaled(re(0.5));
    let jy = jplus
        .add(&jminus.scaled(re(-1.0)))
        .scaled(Complex64::new(0.0, -0.5));
    let j2 = jx
        .matmul(&jx)
        .add(&jy.matmul(&jy))
        .add(&jz.matmul(&jz));

    Ok(SpinOps {
        jx,
        jy,
        jz,
        jplus,
        jminus,
        j2,
    })
}

/// Truncated boson operators: annihilation, creation, and number.
#[derive(Debug, Clone)]
pub struct FockOps {
    pub annihilate: Operator,
    pub create: Operator,
    pub number: Operator,
}

/// c |k> = sqrt(k) |k-1> on a `cutoff`-dimensional Fock space.
pub fn fock_ops(cutoff: usize) -> Result<FockOps> {
    let space = HilbertSpace::fock(cutoff)?;
    let mut low = Vec::with_capacity(cutoff - 1);
    for k in 1..cutoff {
        low.push((k - 1, k, re((k as f64).sqrt())));
    }
    let annihilate = Operator::new(space, CsrMatrix::from_triplets(cutoff, &low))?;
    let create = annihilate.dagger();
    let number = Operator::new(
        space,
        CsrMatrix::from_diagonal_fn(cutoff, |k| re(k as f64)),
    )?;
    Ok(FockOps {
        annihilate,
        create,
        number,
    })
}

/// Fock cutoff rule for an expected steady occupation `n0`.
///
/// Coherent-state photon fluctuations have variance n0, so the truncation
/// keeps several standard deviations of headroom: d_c = floor(3 n0 + 6).
pub fn fock_cutoff(n0: f64) -> usize {
    assert!(n0 >= 0.0, "mean photon number must be nonnegative");
    (3.0 * n0 + 6.0).floor() as usize
}

/// Spin-coherent state |theta, phi> with J = N/2 on the Dicke sector.
///
/// Amplitude on |J,m>: binomial weight C(N, J-m)^(1/2)
/// cos(theta/2)^(J+m) sin(theta/2)^(J-m) e^{-i (J-m) phi}; the m = J
/// amplitude is real and positive, fixing the global phase. Under this
/// phase convention the mean spin sits at azimuth -phi. Weights are
/// accumulated in log space so large N does not overflow.
pub fn coherent_spin_state(atoms: u32, theta: f64, phi: f64) -> Result<QuantumState> {
    let space = HilbertSpace::dicke(atoms)?;
    let dim = space.dim();
    let n = atoms as f64;
    let (cos_half, sin_half) = ((theta / 2.0).cos(), (theta / 2.0).sin());

    let mut amps = Vec::with_capacity(dim);
    let mut ln_binom = 0.0_f64; // ln C(N, k), k = J - m = basis index
    for k in 0..dim {
        let kf = k as f64;
        if k > 0 {
            ln_binom += ((n - kf + 1.0) / kf).ln();
        }
        let ln_mag = 0.5 * ln_binom
            + (n - kf) * cos_half.abs().max(f64::MIN_POSITIVE).ln()
            + kf * sin_half.abs().max(f64::MIN_POSITIVE).ln();
        let mag = if cos_half == 0.0 && k < dim - 1 {
            0.0
        } else if sin_half == 0.0 && k > 0 {
            0.0
        } else {
            ln_mag.exp()
        };
        let phase = -(kf) * phi;
        amps.push(Complex64::new(mag * phase.cos(), mag * phase.sin()));
    }

    let mut state = QuantumState::pure(space, amps)?;
    state.renormalize();
    Ok(state)
}

/// Physical parameters of the monitored atom-cavity model. The detuning is
/// the frequency unit (usually set to 1); all rates are multiples of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Atom count N.
    pub atoms: u32,
    /// Atom-cavity coupling g.
    pub g: f64,
    /// Detuning Delta.
    pub delta: f64,
    /// Cavity transmission rate kappa.
    pub kappa: f64,
    /// Drive amplitude epsilon.
    pub epsilon: f64,
    /// Homodyne efficiency eta in [0, 1].
    pub eta: f64,
    /// Local-oscillator phase; the monitored quadrature is fixed to x.
    pub homodyne_phase: f64,
    /// Drive-cavity detuning; only resonant driving is supported.
    pub drive_detuning: f64,
}

impl ModelParams {
    pub fn new(atoms: u32, g: f64, delta: f64, kappa: f64, epsilon: f64, eta: f64) -> Self {
        ModelParams {
            atoms,
            g,
            delta,
            kappa,
            epsilon,
            eta,
            homodyne_phase: 0.0,
            drive_detuning: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms < 1 {
            return Err(Error::Invalid("need at least one atom"));
        }
        if !(self.g >= 0.0 && self.delta > 0.0 && self.kappa >= 0.0 && self.epsilon >= 0.0) {
            return Err(Error::Invalid("rates must be nonnegative and detuning positive"));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Invalid("efficiency must lie in [0, 1]"));
        }
        if self.drive_detuning != 0.0 {
            return Err(Error::Invalid("only resonant driving (zero drive detuning) is supported"));
        }
        if self.homodyne_phase != 0.0 {
            return Err(Error::Invalid("only x-quadrature homodyne (zero phase) is supported"));
        }
        Ok(())
    }

    /// Maximum dispersive frequency shift g^2 N / Delta.
    pub fn frequency_shift(&self) -> f64 {
        self.g * self.g * self.atoms as f64 / self.delta
    }
}

/// Dispersive Hamiltonian of the two-ground-state (Lambda) configuration on
/// the product space: H = (2 g^2 / Delta) n (x) Jz + drive.
pub fn lambda_hamiltonian(params: &ModelParams, fock_dim: usize) -> Result<Operator> {
    params.validate()?;
    let space = HilbertSpace::product(fock_dim, params.atoms)?;
    let coupling = 2.0 * params.g * params.g / params.delta;
    dispersive_hamiltonian(space, coupling, 0.0, params.epsilon)
}

/// Dispersive Hamiltonian of the single-ground-state (V) configuration:
/// H = -(g^2 / Delta) n (x) Jz + (g^2 N / 2 Delta) n (x) I + drive.
pub fn v_hamiltonian(params: &ModelParams, fock_dim: usize) -> Result<Operator> {
    params.validate()?;
    let space = HilbertSpace::product(fock_dim, params.atoms)?;
    let g2_over_delta = params.g * params.g / params.delta;
    dispersive_hamiltonian(
        space,
        -g2_over_delta,
        g2_over_delta * params.atoms as f64 / 2.0,
        params.epsilon,
    )
}

/// H = coupling * n (x) Jz + shift * n (x) I + epsilon (c + c^dag) (x) I.
fn dispersive_hamiltonian(
    space: HilbertSpace,
    coupling: f64,
    shift: f64,
    epsilon: f64,
) -> Result<Operator> {
    let (fock_dim, atoms) = match space {
        HilbertSpace::Product { fock_dim, atoms } => (fock_dim, atoms),
        _ => return Err(Error::Invalid("dispersive Hamiltonian lives on a product space")),
    };
    let atom_dim = atoms as usize + 1;
    let dim = space.dim();

    let mut triplets = Vec::with_capacity(dim * 3);
    for photon in 0..fock_dim {
        for i in 0..atom_dim {
            let row = photon * atom_dim + i;
            let diag = photon as f64 * (coupling * dicke_m(atoms, i) + shift);
            if diag != 0.0 {
                triplets.push((row, row, re(diag)));
            }
            if photon + 1 < fock_dim && epsilon != 0.0 {
                let amp = epsilon * ((photon + 1) as f64).sqrt();
                triplets.push((row, row + atom_dim, re(amp)));
                triplets.push((row + atom_dim, row, re(amp)));
            }
        }
    }
    Operator::new(space, CsrMatrix::from_triplets(dim, &triplets))
}

/// Dispersive coefficients from a generic driven three-level configuration
/// after removing the excited state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    /// Prefactor of the n sz term: 2 (|g_up|^2 / 2 Delta_up - |g_down|^2 / 2 Delta_down).
    pub sz_coefficient: f64,
    /// Prefactor of the photon-number shift: |g_up|^2 / 2 Delta_up + |g_down|^2 / 2 Delta_down.
    pub shift_coefficient: f64,
    /// True when the detunings are tuned so the shift term vanishes.
    pub balanced: bool,
    /// False when a coupling is not small against its detuning (ratio < 10),
    /// i.e. the dispersive elimination is questionable.
    pub dispersive_ok: bool,
}

pub fn three_level_coefficients(
    g_up: f64,
    g_down: f64,
    delta_up: f64,
    delta_down: f64,
) -> Result<EffectiveCoefficients> {
    if delta_up == 0.0 || delta_down == 0.0 {
        return Err(Error::Invalid("detunings must be nonzero"));
    }
    let up = g_up * g_up / (2.0 * delta_up);
    let down = g_down * g_down / (2.0 * delta_down);
    let balanced_delta_down = if g_up != 0.0 {
        -delta_up * (g_down * g_down) / (g_up * g_up)
    } else {
        f64::NAN
    };
    let balanced = balanced_delta_down.is_finite()
        && (delta_down - balanced_delta_down).abs() <= 1e-9 * balanced_delta_down.abs();
    let dispersive_ok = (g_up == 0.0 || delta_up.abs() >= 10.0 * g_up.abs())
        && (g_down == 0.0 || delta_down.abs() >= 10.0 * g_down.abs());
    Ok(EffectiveCoefficients {
        sz_coefficient: 2.0 * (up - down),
        shift_coefficient: up + down,
        balanced,
        dispersive_ok,
    })
}

/// I_fock (x) A for an atomic-sector operator.
pub fn lift_to_product(op: &Operator, fock_dim: usize) -> Result<Operator> {
    let atoms = match op.space() {
        HilbertSpace::Dicke { atoms } => atoms,
        _ => return Err(Error::Invalid("can only lift Dicke-sector operators")),
    };
    let space = HilbertSpace::product(fock_dim, atoms)?;
    let eye = CsrMatrix::identity(fock_dim);
    Operator::new(space, eye.kron(op.matrix()))
}

/// n (x) I_atoms on the product space.
pub fn photon_number_on_product(fock_dim: usize, atoms: u32) -> Result<Operator> {
    let space = HilbertSpace::product(fock_dim, atoms)?;
    let atom_dim = atoms as usize + 1;
    Operator::new(
        space,
        CsrMatrix::from_diagonal_fn(space.dim(), |row| re((row / atom_dim) as f64)),
    )
}

/// sqrt(kappa) c (x) I_atoms: the transmission collapse operator of the full model.
pub fn transmission_collapse(kappa: f64, fock_dim: usize, atoms: u32) -> Result<Operator> {
    let space = HilbertSpace::product(fock_dim, atoms)?;
    let atom_dim = atoms as usize + 1;
    let root = kappa.sqrt();
    let mut triplets = Vec::new();
    for photon in 1..fock_dim {
        let amp = root * (photon as f64).sqrt();
        for i in 0..atom_dim {
            triplets.push(((photon - 1) * atom_dim + i, photon * atom_dim + i, re(amp)));
        }
    }
    Operator::new(space, CsrMatrix::from_triplets(space.dim(), &triplets))
}
