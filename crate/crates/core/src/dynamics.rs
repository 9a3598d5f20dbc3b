//! Stochastic integrators for the conditional dynamics and
//! single-trajectory records.
//!
//! Two models are integrated: the full atom-cavity system as a pure-state
//! diffusive unraveling (transmission collapse operator sqrt(kappa) c), and
//! the cavity-removed dynamics with the measurement acting directly on Jz.
//! The removed model runs either as a pure-state unraveling (unit
//! efficiency) or as a conditional density-matrix equation for eta < 1.
//!
//! The pure-state update is the normalized diffusive form
//!
//! ```text
//! dpsi = [ -iH - (L'L - <L+L'>L + <L+L'>^2/4) / 2 ] psi dt
//!        + (L - <L+L'>/2) psi dW
//! ```
//!
//! with expectations in psi; renormalization after each step corrects
//! floating-point drift only. The same Wiener increment biases the recorded
//! photocurrent, I dt = sqrt(eta) <L + L'> dt + dW.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{AbortKind, Error, Result};
use crate::hilbert::dicke_m;
use crate::moments::{MomentSample, SpinMeasurer};
use crate::operators::{
    coherent_spin_state, fock_cutoff, lambda_hamiltonian, transmission_collapse, ModelParams,
    Operator,
};
use crate::rng::WienerSource;
use crate::sparse::CsrMatrix;
use crate::squeezing;
use crate::state::{inner, DenseMatrix};
use crate::theory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Full,
    CavityRemoved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    PureSse,
    MixedSme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    EulerMaruyama,
    Milstein,
    ImplicitMilstein,
}

/// Physical parameters plus numerical controls of one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub model: Model,
    pub state_kind: StateKind,
    pub scheme: Scheme,
    /// Steps per fastest period R; the time step is 2 pi / (R omega_max).
    pub resolution: u32,
    /// Total integration time in units of the inverse frequency unit.
    pub total_time: f64,
    /// Record every k-th step; `None` picks ~400 samples per run.
    pub sample_stride: Option<usize>,
    /// Base seed; ensembles derive per-trajectory seeds from it.
    pub seed: u64,
    /// Direct effective measurement rate for the cavity-removed model,
    /// overriding the value derived from (g, Delta, kappa, epsilon).
    pub kappa_tilde: Option<f64>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.resolution < 100 {
            return Err(Error::Invalid("resolution must be at least 100"));
        }
        if !(self.total_time > 0.0) {
            return Err(Error::Invalid("total time must be positive"));
        }
        if self.state_kind == StateKind::PureSse && self.params.eta != 1.0 {
            return Err(Error::Invalid(
                "the pure-state unraveling requires unit efficiency",
            ));
        }
        if self.model == Model::Full && self.state_kind == StateKind::MixedSme {
            return Err(Error::Invalid(
                "the full model runs only as a pure-state unraveling",
            ));
        }
        if self.model == Model::Full && self.kappa_tilde.is_some() {
            return Err(Error::Invalid(
                "a direct effective rate only applies to the cavity-removed model",
            ));
        }
        if let Some(kt) = self.kappa_tilde {
            if !(kt > 0.0) {
                return Err(Error::Invalid("effective rate must be positive"));
            }
        }
        Ok(())
    }

    /// Effective measurement rate for the cavity-removed model.
    pub fn kappa_tilde(&self) -> f64 {
        self.kappa_tilde.unwrap_or_else(|| {
            if self.params.kappa <= 0.0 {
                return 0.0;
            }
            let n0 = theory::steady_photons(self.params.epsilon, self.params.kappa);
            theory::effective_rate(self.params.g, self.params.delta, self.params.kappa, n0)
        })
    }
}

/// A monitored decay channel. The collapse operator carries the square root
/// of the rate, e.g. sqrt(kappa) c for cavity transmission.
#[derive(Debug, Clone)]
pub struct MeasurementChannel {
    pub collapse: Operator,
    pub rate: f64,
    pub efficiency: f64,
    /// Local-oscillator phase; fixed to the x quadrature.
    pub phase: f64,
}

impl MeasurementChannel {
    pub fn new(collapse: Operator, rate: f64, efficiency: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::Invalid("channel rate must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::Invalid("efficiency must lie in [0, 1]"));
        }
        Ok(MeasurementChannel {
            collapse,
            rate,
            efficiency,
            phase: 0.0,
        })
    }

    /// Homodyne monitoring of the transmitted field, L = sqrt(kappa) c (x) I.
    pub fn transmission(kappa: f64, fock_dim: usize, atoms: u32, efficiency: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::Invalid("transmission rate must be positive"));
        }
        MeasurementChannel::new(
            transmission_collapse(kappa, fock_dim, atoms)?,
            kappa,
            efficiency,
        )
    }

    /// Direct monitoring of the population difference, L = sqrt(kappa_tilde) Jz.
    pub fn qnd(kappa_tilde: f64, atoms: u32, efficiency: f64) -> Result<Self> {
        if !(kappa_tilde > 0.0) {
            return Err(Error::Invalid("effective rate must be positive"));
        }
        let space = crate::hilbert::HilbertSpace::dicke(atoms)?;
        let root = kappa_tilde.sqrt();
        let diag = CsrMatrix::from_diagonal_fn(space.dim(), |i| {
            Complex64::new(root * dicke_m(atoms, i), 0.0)
        });
        MeasurementChannel::new(Operator::new(space, diag)?, kappa_tilde, efficiency)
    }
}

/// One unraveling's sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub times: Vec<f64>,
    pub moments: Vec<MomentSample>,
    /// Photocurrent averaged over each inter-sample window; the first entry
    /// (no preceding window) is zero.
    pub photocurrent: Vec<f64>,
    /// Conditional squeezing parameter per sample.
    pub xi2: Vec<f64>,
}

/// Time step from the fastest frequency in the model:
/// dt = 2 pi / (R omega_max).
///
/// For the full model omega_max = max(n0 d_omega, N d_omega, kappa,
/// epsilon) with d_omega = g^2 N / Delta; for the cavity-removed model
/// omega_max = max(kappa_tilde N, kappa_tilde).
pub fn select_timestep(config: &SimConfig) -> Result<f64> {
    let omega_max = match config.model {
        Model::Full => {
            let p = &config.params;
            let d_omega = p.frequency_shift();
            let n0 = theory::steady_photons(p.epsilon, p.kappa);
            (n0 * d_omega)
                .max(p.atoms as f64 * d_omega)
                .max(p.kappa)
                .max(p.epsilon)
        }
        Model::CavityRemoved => {
            let kt = config.kappa_tilde();
            (kt * config.params.atoms as f64).max(kt)
        }
    };
    if !(omega_max > 0.0) {
        return Err(Error::ZeroFrequencyScale);
    }
    Ok(2.0 * core::f64::consts::PI / (config.resolution as f64 * omega_max))
}

/// Resolved discretization of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
}

pub fn discretization(config: &SimConfig) -> Result<Discretization> {
    let dt = select_timestep(config)?;
    let steps = (config.total_time / dt).ceil().max(1.0) as usize;
    let stride = config
        .sample_stride
        .unwrap_or_else(|| (steps / 400).max(1));
    if stride == 0 {
        return Err(Error::Invalid("sample stride must be positive"));
    }
    Ok(Discretization { dt, steps, stride })
}

/// Homodyne record increment: I dt = sqrt(eta) <L + L'> dt + dW. The same
/// dW must drive the state update.
pub fn photocurrent_increment(quadrature: f64, efficiency: f64, dt: f64, dw: f64) -> f64 {
    efficiency.sqrt() * quadrature * dt + dw
}

/// <L + L'> of a pure state for the channel's collapse operator.
pub fn channel_quadrature(psi: &[Complex64], channel: &MeasurementChannel) -> f64 {
    let mut l_psi = vec![Complex64::new(0.0, 0.0); psi.len()];
    channel.collapse.matrix().matvec(psi, &mut l_psi);
    2.0 * inner(psi, &l_psi).re
}

const IMPLICIT_TOL: f64 = 1e-10;
const IMPLICIT_MAX_ITER: usize = 50;
/// Largest dimension for the dense direct-solve fallback of the implicit step.
const DENSE_SOLVE_MAX_DIM: usize = 2048;

/// Dense LU with partial pivoting for the implicit-step fallback.
#[derive(Debug, Clone)]
struct ComplexLu {
    dim: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
}

impl ComplexLu {
    fn factor(mut a: Vec<Complex64>, dim: usize) -> Option<Self> {
        let mut piv = vec![0usize; dim];
        for k in 0..dim {
            let mut p = k;
            let mut best = a[k * dim + k].norm_sqr();
            for r in k + 1..dim {
                let v = a[r * dim + k].norm_sqr();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return None;
            }
            piv[k] = p;
            if p != k {
                for c in 0..dim {
                    a.swap(k * dim + c, p * dim + c);
                }
            }
            let pivot = a[k * dim + k];
            for r in k + 1..dim {
                let factor = a[r * dim + k] / pivot;
                a[r * dim + k] = factor;
                for c in k + 1..dim {
                    let akc = a[k * dim + c];
                    a[r * dim + c] -= factor * akc;
                }
            }
        }
        Some(ComplexLu { dim, lu: a, piv })
    }

    fn solve(&self, b: &mut [Complex64]) {
        let d = self.dim;
        for k in 0..d {
            b.swap(k, self.piv[k]);
            for r in k + 1..d {
                let f = self.lu[r * d + k];
                let bk = b[k];
                b[r] -= f * bk;
            }
        }
        for k in (0..d).rev() {
            b[k] /= self.lu[k * d + k];
            for r in 0..k {
                let f = self.lu[r * d + k];
                let bk = b[k];
                b[r] -= f * bk;
            }
        }
    }
}

enum ImplicitPlan {
    /// Explicit scheme; nothing to solve.
    NotNeeded,
    /// Drift generator is diagonal; the solve is an elementwise division.
    Diagonal(Vec<Complex64>),
    /// Fixed-point iteration, with a lazily built dense LU as fallback.
    Iterative { lu: Option<ComplexLu> },
}

/// Reusable pure-state stepper for one (H, L, dt, scheme) combination.
pub struct SsePropagator {
    drift: CsrMatrix,
    collapse: CsrMatrix,
    dt: f64,
    scheme: Scheme,
    implicit: ImplicitPlan,
    l_psi: Vec<Complex64>,
    m_psi: Vec<Complex64>,
    rhs: Vec<Complex64>,
    work: Vec<Complex64>,
}

impl SsePropagator {
    /// `hamiltonian = None` means a purely dissipative/measurement drift.
    pub fn new(
        hamiltonian: Option<&Operator>,
        collapse: &Operator,
        dt: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        let dim = collapse.dim();
        if let Some(h) = hamiltonian {
            if h.dim() != dim {
                return Err(Error::Invalid("Hamiltonian and collapse dimensions differ"));
            }
        }
        // A = -iH - L'L/2
        let ldag_l = collapse.matrix().dagger().matmul(collapse.matrix());
        let mut drift = ldag_l.scaled(Complex64::new(-0.5, 0.0));
        if let Some(h) = hamiltonian {
            drift = drift.add(&h.matrix().scaled(Complex64::new(0.0, -1.0)));
        }

        let implicit = if scheme != Scheme::ImplicitMilstein {
            ImplicitPlan::NotNeeded
        } else if drift.is_diagonal() {
            let denom = drift
                .diagonal()
                .iter()
                .map(|a| (Complex64::new(1.0, 0.0) - dt * a).finv())
                .collect();
            ImplicitPlan::Diagonal(denom)
        } else {
            ImplicitPlan::Iterative { lu: None }
        };

        Ok(SsePropagator {
            drift,
            collapse: collapse.matrix().clone(),
            dt,
            scheme,
            implicit,
            l_psi: vec![Complex64::new(0.0, 0.0); dim],
            m_psi: vec![Complex64::new(0.0, 0.0); dim],
            rhs: vec![Complex64::new(0.0, 0.0); dim],
            work: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance the normalized state by one step. Returns <L + L'> evaluated
    /// before the update, the quantity biasing the photocurrent.
    pub fn step(&mut self, psi: &mut [Complex64], dw: f64) -> core::result::Result<f64, AbortKind> {
        let dt = self.dt;
        self.collapse.matvec(psi, &mut self.l_psi);
        let exp_l = inner(psi, &self.l_psi);
        let half_x = exp_l.re; // <L + L'>/2 for normalized psi
        let x = 2.0 * half_x;

        // M psi = (L - x/2) psi
        for i in 0..psi.len() {
            self.m_psi[i] = self.l_psi[i] - half_x * psi[i];
        }

        // rhs = psi + dt (x/2 L - x^2/8) psi + dW M psi
        let drift_gain = dt * half_x;
        let drift_bias = dt * half_x * half_x * 0.5;
        for i in 0..psi.len() {
            self.rhs[i] = psi[i] + drift_gain * self.l_psi[i] - drift_bias * psi[i]
                + dw * self.m_psi[i];
        }

        if self.scheme != Scheme::EulerMaruyama {
            // + (dW^2 - dt)/2 M^2 psi, expectations frozen at psi
            let gain = 0.5 * (dw * dw - dt);
            self.collapse.matvec(&self.m_psi, &mut self.work);
            for i in 0..psi.len() {
                self.rhs[i] += gain * (self.work[i] - half_x * self.m_psi[i]);
            }
        }

        match self.scheme {
            Scheme::EulerMaruyama | Scheme::Milstein => {
                // + dt A psi, explicit
                let rhs = &mut self.rhs;
                self.drift
                    .matvec_add_scaled(psi, Complex64::new(dt, 0.0), rhs);
                psi.copy_from_slice(rhs);
            }
            Scheme::ImplicitMilstein => {
                self.solve_implicit(psi)?;
            }
        }

        let norm_sq: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(AbortKind::NonFinite);
        }
        let inv = 1.0 / norm_sq.sqrt();
        for a in psi.iter_mut() {
            *a *= inv;
        }
        Ok(x)
    }

    /// Solve (I - dt A) psi' = rhs.
    fn solve_implicit(&mut self, psi: &mut [Complex64]) -> core::result::Result<(), AbortKind> {
        let dt = Complex64::new(self.dt, 0.0);
        match &mut self.implicit {
            ImplicitPlan::NotNeeded => unreachable!("explicit scheme"),
            ImplicitPlan::Diagonal(inv_denom) => {
                for i in 0..psi.len() {
                    psi[i] = self.rhs[i] * inv_denom[i];
                }
                Ok(())
            }
            ImplicitPlan::Iterative { lu } => {
                // warm start with one explicit application
                self.work.copy_from_slice(&self.rhs);
                self.drift
                    .matvec_add_scaled(&self.rhs, dt, &mut self.work);
                psi.copy_from_slice(&self.work);
                for _ in 0..IMPLICIT_MAX_ITER {
                    self.work.copy_from_slice(&self.rhs);
                    self.drift.matvec_add_scaled(psi, dt, &mut self.work);
                    let diff: f64 = self
                        .work
                        .iter()
                        .zip(psi.iter())
                        .map(|(a, b)| (a - b).norm_sqr())
                        .sum();
                    psi.copy_from_slice(&self.work);
                    if diff.sqrt() <= IMPLICIT_TOL {
                        return Ok(());
                    }
                }
                // iteration stalled: direct dense solve
                let dim = self.rhs.len();
                if dim > DENSE_SOLVE_MAX_DIM {
                    return Err(AbortKind::ImplicitNonConvergence);
                }
                if lu.is_none() {
                    let mut dense = CsrMatrix::identity(dim).to_dense();
                    for (r, c, v) in self.drift.iter_entries() {
                        dense[r * dim + c] -= dt * v;
                    }
                    *lu = ComplexLu::factor(dense, dim);
                }
                match lu {
                    Some(f) => {
                        psi.copy_from_slice(&self.rhs);
                        f.solve(psi);
                        Ok(())
                    }
                    None => Err(AbortKind::ImplicitNonConvergence),
                }
            }
        }
    }
}

/// Specialized stepper for the cavity-removed pure-state unraveling: the
/// collapse operator is real diagonal and there is no Hamiltonian, so the
/// whole update is elementwise on a real amplitude vector.
pub struct DiagonalSsePropagator {
    l_diag: Vec<f64>,
    dt: f64,
    scheme: Scheme,
    /// 1 / (1 + dt l_i^2 / 2): the exact drift-implicit division.
    inv_denom: Vec<f64>,
}

impl DiagonalSsePropagator {
    pub fn new(l_diag: Vec<f64>, dt: f64, scheme: Scheme) -> Self {
        let inv_denom = l_diag
            .iter()
            .map(|l| 1.0 / (1.0 + 0.5 * dt * l * l))
            .collect();
        DiagonalSsePropagator {
            l_diag,
            dt,
            scheme,
            inv_denom,
        }
    }

    pub fn step(&self, psi: &mut [f64], dw: f64) -> core::result::Result<f64, AbortKind> {
        let dt = self.dt;
        let mut exp_l = 0.0;
        for (a, l) in psi.iter().zip(self.l_diag.iter()) {
            exp_l += l * a * a;
        }
        let milstein_gain = 0.5 * (dw * dw - dt);
        let mut norm_sq = 0.0;
        match self.scheme {
            Scheme::EulerMaruyama => {
                for (a, l) in psi.iter_mut().zip(self.l_diag.iter()) {
                    let m = l - exp_l;
                    let factor = 1.0
                        + dt * (exp_l * l - 0.5 * exp_l * exp_l - 0.5 * l * l)
                        + dw * m;
                    *a *= factor;
                    norm_sq += *a * *a;
                }
            }
            Scheme::Milstein => {
                for (a, l) in psi.iter_mut().zip(self.l_diag.iter()) {
                    let m = l - exp_l;
                    let factor = 1.0
                        + dt * (exp_l * l - 0.5 * exp_l * exp_l - 0.5 * l * l)
                        + dw * m
                        + milstein_gain * m * m;
                    *a *= factor;
                    norm_sq += *a * *a;
                }
            }
            Scheme::ImplicitMilstein => {
                for ((a, l), inv) in psi
                    .iter_mut()
                    .zip(self.l_diag.iter())
                    .zip(self.inv_denom.iter())
                {
                    let m = l - exp_l;
                    let factor = 1.0
                        + dt * (exp_l * l - 0.5 * exp_l * exp_l)
                        + dw * m
                        + milstein_gain * m * m;
                    *a *= factor * inv;
                    norm_sq += *a * *a;
                }
            }
        }
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(AbortKind::NonFinite);
        }
        let inv_norm = 1.0 / norm_sq.sqrt();
        for a in psi.iter_mut() {
            *a *= inv_norm;
        }
        Ok(2.0 * exp_l)
    }
}

/// Conditional density-matrix stepper for the cavity-removed model with a
/// diagonal measurement operator. Superoperators act elementwise:
/// the dissipator damps coherences at kappa_tilde (m_i - m_j)^2 / 2 and the
/// measurement term multiplies by sqrt(eta kappa_tilde)(m_i + m_j - 2<Jz>).
pub struct QndSmePropagator {
    m_values: Vec<f64>,
    kappa_tilde: f64,
    eta: f64,
    dt: f64,
    scheme: Scheme,
}

impl QndSmePropagator {
    pub fn new(atoms: u32, kappa_tilde: f64, eta: f64, dt: f64, scheme: Scheme) -> Self {
        let dim = atoms as usize + 1;
        QndSmePropagator {
            m_values: (0..dim).map(|i| dicke_m(atoms, i)).collect(),
            kappa_tilde,
            eta,
            dt,
            scheme,
        }
    }

    /// Advance rho one step; returns <L + L'> = 2 sqrt(kappa_tilde) <Jz>
    /// evaluated before the update.
    pub fn step(&self, rho: &mut DenseMatrix, dw: f64) -> core::result::Result<f64, AbortKind> {
        let dim = rho.dim();
        let dt = self.dt;
        let root_eta_kt = (self.eta * self.kappa_tilde).sqrt();

        let jz_mean: f64 = (0..dim).map(|i| self.m_values[i] * rho.get(i, i).re).sum();

        let data = rho.data_mut();
        let milstein_gain = 0.5 * (dw * dw - dt);
        for i in 0..dim {
            for k in 0..dim {
                let dm = self.m_values[i] - self.m_values[k];
                let decay = 0.5 * self.kappa_tilde * dm * dm;
                let f = root_eta_kt * (self.m_values[i] + self.m_values[k] - 2.0 * jz_mean);
                let idx = i * dim + k;
                let mut factor = 1.0 + f * dw;
                if self.scheme != Scheme::EulerMaruyama {
                    factor += milstein_gain * f * f;
                }
                match self.scheme {
                    Scheme::ImplicitMilstein => {
                        data[idx] = data[idx] * factor / (1.0 + decay * dt);
                    }
                    _ => {
                        data[idx] *= factor - decay * dt;
                    }
                }
            }
        }

        let trace = rho.trace().re;
        if !trace.is_finite() {
            return Err(AbortKind::NonFinite);
        }
        if trace.abs() < 1e-12 {
            return Err(AbortKind::TraceCollapse);
        }
        for v in rho.data_mut().iter_mut() {
            *v /= trace;
        }
        Ok(2.0 * self.kappa_tilde.sqrt() * jz_mean)
    }
}

/// One step of the pure-state unraveling (convenience wrapper over
/// [`SsePropagator`] for single-shot use; construct the propagator directly
/// inside loops).
pub fn sse_step(
    psi: &mut [Complex64],
    hamiltonian: Option<&Operator>,
    channel: &MeasurementChannel,
    dt: f64,
    dw: f64,
    scheme: Scheme,
) -> Result<f64> {
    let mut prop = SsePropagator::new(hamiltonian, &channel.collapse, dt, scheme)?;
    prop.step(psi, dw).map_err(|kind| Error::TrajectoryAbort {
        seed: 0,
        step: 0,
        kind,
    })
}

/// One step of the cavity-removed conditional master equation.
pub fn sme_step_cavity_removed(
    rho: &mut DenseMatrix,
    atoms: u32,
    kappa_tilde: f64,
    eta: f64,
    dt: f64,
    dw: f64,
    scheme: Scheme,
) -> Result<f64> {
    let prop = QndSmePropagator::new(atoms, kappa_tilde, eta, dt, scheme);
    prop.step(rho, dw).map_err(|kind| Error::TrajectoryAbort {
        seed: 0,
        step: 0,
        kind,
    })
}

struct Recorder {
    record: TrajectoryRecord,
    dt: f64,
    stride: usize,
    current_acc: f64,
    steps_in_window: usize,
    eta: f64,
}

impl Recorder {
    fn new(seed: u64, dt: f64, stride: usize, steps: usize, eta: f64) -> Self {
        let capacity = steps / stride + 2;
        Recorder {
            record: TrajectoryRecord {
                seed,
                times: Vec::with_capacity(capacity),
                moments: Vec::with_capacity(capacity),
                photocurrent: Vec::with_capacity(capacity),
                xi2: Vec::new(),
            },
            dt,
            stride,
            current_acc: 0.0,
            steps_in_window: 0,
            eta,
        }
    }

    fn sample(&mut self, step: usize, moments: MomentSample) {
        self.record.times.push(step as f64 * self.dt);
        self.record.moments.push(moments);
        if self.steps_in_window == 0 {
            self.record.photocurrent.push(0.0);
        } else {
            let window = self.steps_in_window as f64 * self.dt;
            self.record.photocurrent.push(self.current_acc / window);
        }
        self.current_acc = 0.0;
        self.steps_in_window = 0;
    }

    fn accumulate(&mut self, quadrature: f64, dw: f64) {
        self.current_acc += photocurrent_increment(quadrature, self.eta, self.dt, dw);
        self.steps_in_window += 1;
    }

    fn should_sample(&self, step_done: usize, total: usize) -> bool {
        step_done % self.stride == 0 || step_done == total
    }

    fn finish(mut self) -> Result<TrajectoryRecord> {
        squeezing::fill_xi2(&mut self.record)?;
        Ok(self.record)
    }
}

/// Integrate one unraveling. Deterministic for fixed (config, seed): the
/// per-step Wiener increments come from a counter-based generator seeded
/// with `seed` alone.
pub fn run_trajectory(config: &SimConfig, seed: u64) -> Result<TrajectoryRecord> {
    config.validate()?;
    let disc = discretization(config)?;
    match (config.model, config.state_kind) {
        (Model::Full, StateKind::PureSse) => run_full_pure(config, seed, disc),
        (Model::CavityRemoved, StateKind::PureSse) => run_removed_pure(config, seed, disc),
        (Model::CavityRemoved, StateKind::MixedSme) => run_removed_mixed(config, seed, disc),
        (Model::Full, StateKind::MixedSme) => Err(Error::Invalid(
            "the full model runs only as a pure-state unraveling",
        )),
    }
}

fn abort(seed: u64, step: usize) -> impl Fn(AbortKind) -> Error {
    move |kind| Error::TrajectoryAbort { seed, step, kind }
}

fn run_full_pure(config: &SimConfig, seed: u64, disc: Discretization) -> Result<TrajectoryRecord> {
    let p = &config.params;
    let n0 = theory::steady_photons(p.epsilon, p.kappa);
    let d_c = fock_cutoff(n0);
    let h = lambda_hamiltonian(p, d_c)?;
    let channel = MeasurementChannel::transmission(p.kappa, d_c, p.atoms, p.eta)?;
    let measurer = SpinMeasurer::product(d_c, p.atoms)?;

    let css = coherent_spin_state(p.atoms, core::f64::consts::FRAC_PI_2, 0.0)?;
    let mut psi = vec![Complex64::new(0.0, 0.0); d_c * (p.atoms as usize + 1)];
    psi[..p.atoms as usize + 1].copy_from_slice(css.as_pure().expect("CSS is pure"));

    let mut prop = SsePropagator::new(Some(&h), &channel.collapse, disc.dt, config.scheme)?;
    let mut wiener = WienerSource::new(seed, disc.dt);
    let mut rec = Recorder::new(seed, disc.dt, disc.stride, disc.steps, p.eta);

    rec.sample(0, measurer.measure_pure(&psi));
    for step in 0..disc.steps {
        let dw = wiener.next_dw();
        let x = prop.step(&mut psi, dw).map_err(abort(seed, step))?;
        rec.accumulate(x, dw);
        if rec.should_sample(step + 1, disc.steps) {
            rec.sample(step + 1, measurer.measure_pure(&psi));
        }
    }
    rec.finish()
}

fn run_removed_pure(
    config: &SimConfig,
    seed: u64,
    disc: Discretization,
) -> Result<TrajectoryRecord> {
    let p = &config.params;
    let kt = config.kappa_tilde();
    if !(kt > 0.0) {
        return Err(Error::ZeroFrequencyScale);
    }
    let dim = p.atoms as usize + 1;
    let root = kt.sqrt();
    let l_diag: Vec<f64> = (0..dim).map(|i| root * dicke_m(p.atoms, i)).collect();
    let measurer = SpinMeasurer::dicke(p.atoms)?;

    let css = coherent_spin_state(p.atoms, core::f64::consts::FRAC_PI_2, 0.0)?;
    // the equatorial CSS and the whole diagonal update are real
    let mut psi: Vec<f64> = css
        .as_pure()
        .expect("CSS is pure")
        .iter()
        .map(|a| a.re)
        .collect();
    let mut psi_c = vec![Complex64::new(0.0, 0.0); dim];

    let prop = DiagonalSsePropagator::new(l_diag, disc.dt, config.scheme);
    let mut wiener = WienerSource::new(seed, disc.dt);
    let mut rec = Recorder::new(seed, disc.dt, disc.stride, disc.steps, p.eta);

    let sample = |rec: &mut Recorder, step: usize, psi: &[f64], psi_c: &mut [Complex64]| {
        for (c, r) in psi_c.iter_mut().zip(psi.iter()) {
            *c = Complex64::new(*r, 0.0);
        }
        rec.sample(step, measurer.measure_pure(psi_c));
    };

    sample(&mut rec, 0, &psi, &mut psi_c);
    for step in 0..disc.steps {
        let dw = wiener.next_dw();
        let x = prop.step(&mut psi, dw).map_err(abort(seed, step))?;
        rec.accumulate(x, dw);
        if rec.should_sample(step + 1, disc.steps) {
            sample(&mut rec, step + 1, &psi, &mut psi_c);
        }
    }
    rec.finish()
}

fn run_removed_mixed(
    config: &SimConfig,
    seed: u64,
    disc: Discretization,
) -> Result<TrajectoryRecord> {
    let p = &config.params;
    let kt = config.kappa_tilde();
    if !(kt > 0.0) {
        return Err(Error::ZeroFrequencyScale);
    }
    let measurer = SpinMeasurer::dicke(p.atoms)?;
    let css = coherent_spin_state(p.atoms, core::f64::consts::FRAC_PI_2, 0.0)?;
    let mut rho = DenseMatrix::projector(css.as_pure().expect("CSS is pure"));

    let prop = QndSmePropagator::new(p.atoms, kt, p.eta, disc.dt, config.scheme);
    let mut wiener = WienerSource::new(seed, disc.dt);
    let mut rec = Recorder::new(seed, disc.dt, disc.stride, disc.steps, p.eta);

    rec.sample(0, measurer.measure_mixed(&rho));
    for step in 0..disc.steps {
        let dw = wiener.next_dw();
        let x = prop.step(&mut rho, dw).map_err(abort(seed, step))?;
        rec.accumulate(x, dw);
        if rec.should_sample(step + 1, disc.steps) {
            rec.sample(step + 1, measurer.measure_mixed(&rho));
        }
    }
    rec.finish()
}
