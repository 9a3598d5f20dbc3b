//! Closed-form reference curves and regime diagnostics.
//!
//! Everything here is a deterministic pure function of its arguments, used
//! for acceptance tests, overlays on simulated ensembles, and experiment
//! design. Times are expressed through the scaled variable `tau`, the
//! physical time multiplied by the effective measurement rate.

use num_traits::Float;

use crate::operators::ModelParams;

/// Steady photon number of the driven empty cavity: n0 = (2 eps / kappa)^2.
pub fn steady_photons(epsilon: f64, kappa: f64) -> f64 {
    let r = 2.0 * epsilon / kappa;
    r * r
}

/// Effective measurement rate after removing the cavity:
/// kappa_tilde = 4 (2 g^2 / Delta)^2 n0 / kappa.
pub fn effective_rate(g: f64, delta: f64, kappa: f64, n0: f64) -> f64 {
    let shift_per_photon = 2.0 * g * g / delta;
    4.0 * shift_per_photon * shift_per_photon * n0 / kappa
}

/// Validity diagnostics of the dispersive description and the cavity
/// removal. A ratio above 0.1 flags the corresponding assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// Maximum dispersive shift, delta_omega = g^2 N / Delta.
    pub delta_omega: f64,
    /// Steady photon number of the empty cavity.
    pub n0: f64,
    /// Effective measurement rate.
    pub kappa_tilde: f64,
    /// delta_omega / kappa; small means bad-cavity regime.
    pub bad_cavity_ratio: f64,
    /// n0 / (Delta/g)^2; small keeps the excited state negligible.
    pub excited_state_ratio: f64,
    /// n0 / (kappa Delta / g^2); the tighter photon bound for cavity removal.
    pub cavity_removal_ratio: f64,
    pub bad_cavity_ok: bool,
    pub excited_state_ok: bool,
    pub cavity_removal_ok: bool,
}

const REGIME_WARN: f64 = 0.1;

pub fn regime_report(params: &ModelParams) -> RegimeReport {
    let delta_omega = params.frequency_shift();
    let n0 = if params.kappa > 0.0 {
        steady_photons(params.epsilon, params.kappa)
    } else {
        0.0
    };
    let kappa_tilde = if params.kappa > 0.0 {
        effective_rate(params.g, params.delta, params.kappa, n0)
    } else {
        0.0
    };
    let g2 = params.g * params.g;
    let bad_cavity_ratio = if params.kappa > 0.0 {
        delta_omega / params.kappa
    } else if delta_omega > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let excited_state_ratio = n0 * g2 / (params.delta * params.delta);
    let cavity_removal_ratio = if params.kappa > 0.0 {
        n0 * g2 / (params.kappa * params.delta)
    } else {
        0.0
    };
    RegimeReport {
        delta_omega,
        n0,
        kappa_tilde,
        bad_cavity_ratio,
        excited_state_ratio,
        cavity_removal_ratio,
        bad_cavity_ok: bad_cavity_ratio <= REGIME_WARN,
        excited_state_ok: excited_state_ratio <= REGIME_WARN,
        cavity_removal_ok: cavity_removal_ratio <= REGIME_WARN,
    }
}

/// Unconditional moments of the measurement-dephased ensemble, from a CSS
/// along +x. Variances are in units of the CSS value J/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasedMoments {
    /// <Jx>(tau) = J e^{-tau/2}
    pub jx: f64,
    /// Var Jx / (J/2) = J (1 - e^{-tau})^2 + (1 - e^{-2 tau}) / 2
    pub var_x: f64,
    /// Var Jy / (J/2) = J (1 - e^{-2 tau}) + (1 + e^{-2 tau}) / 2
    pub var_y: f64,
    /// Var Jz / (J/2) = 1 / (1 + 2 J eta tau)
    pub var_z: f64,
}

pub fn moments_nofeedback(tau: f64, atoms: u32, eta: f64) -> DephasedMoments {
    let j = atoms as f64 / 2.0;
    let e1 = (-tau).exp();
    let e2 = (-2.0 * tau).exp();
    DephasedMoments {
        jx: j * (-tau / 2.0).exp(),
        var_x: j * (1.0 - e1) * (1.0 - e1) + 0.5 * (1.0 - e2),
        var_y: j * (1.0 - e2) + 0.5 * (1.0 + e2),
        var_z: 1.0 / (1.0 + 2.0 * j * eta * tau),
    }
}

/// How the mean-spin length entering the conditional squeezing curve treats
/// the stochastic z component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContrastModel {
    /// |<J>|^2 = J^2 e^{-tau}; the convention under which the Gaussian
    /// trajectory average closes exactly.
    LargeJ,
    /// |<J>|^2 = J^2 e^{-tau} + <Jz>^2; more accurate far from the equator.
    Refined,
}

/// Conditional squeezing parameter at scaled time `tau` for a trajectory
/// sitting at conditional mean `jz`.
pub fn xi2_conditional(tau: f64, jz: f64, atoms: u32, eta: f64, contrast: ContrastModel) -> f64 {
    let j = atoms as f64 / 2.0;
    let m = moments_nofeedback(tau, atoms, eta);
    let mean_spin_sq = match contrast {
        ContrastModel::LargeJ => j * j * (-tau).exp(),
        ContrastModel::Refined => j * j * (-tau).exp() + jz * jz,
    };
    let cos_sq = jz * jz / mean_spin_sq;
    let sin_sq = 1.0 - cos_sq;
    let contrast = mean_spin_sq / (j * j);
    (m.var_z * sin_sq + m.var_x * cos_sq) / contrast
}

/// Trajectory average of the conditional squeezing parameter without
/// feedback:
/// (1 - e^tau / N) e^tau / (1 + eta N tau)
///   + [N (e^tau - 1)^2 + e^{2 tau} - 1] / (2 N).
pub fn xi2_average_nofeedback(tau: f64, atoms: u32, eta: f64) -> f64 {
    let n = atoms as f64;
    let et = tau.exp();
    (1.0 - et / n) * et / (1.0 + eta * n * tau)
        + (n * (et - 1.0) * (et - 1.0) + et * et - 1.0) / (2.0 * n)
}

/// Short-to-intermediate-time squeezing under continuous feedback:
/// e^tau / (1 + eta N tau).
pub fn xi2_feedback(tau: f64, atoms: u32, eta: f64) -> f64 {
    tau.exp() / (1.0 + eta * atoms as f64 * tau)
}

/// Feedback optimum (xi2, tau) = (e / (eta N), 1).
pub fn feedback_optimum(atoms: u32, eta: f64) -> (f64, f64) {
    (core::f64::consts::E / (eta * atoms as f64), 1.0)
}

/// Large-N asymptotics of the no-feedback optimum:
/// tau_m = (eta N)^{-1/3}, xi2_m = (3/2) (eta N)^{-2/3}.
pub fn nofeedback_optimum_asymptotic(atoms: u32, eta: f64) -> (f64, f64) {
    let en = eta * atoms as f64;
    (en.powf(-1.0 / 3.0), 1.5 * en.powf(-2.0 / 3.0))
}

/// Numeric minimum (tau_m, xi2_m) of the no-feedback average curve: a
/// log-spaced scan followed by golden-section refinement. The minimum is
/// shallow for small N, hence the two stages.
pub fn nofeedback_optimum(atoms: u32, eta: f64) -> (f64, f64) {
    let f = |tau: f64| xi2_average_nofeedback(tau, atoms, eta);
    let (ln_lo, ln_hi) = ((1e-7_f64).ln(), (20.0_f64).ln());
    let points = 2000;
    let mut best: (usize, f64) = (0, f64::INFINITY);
    for i in 0..points {
        let tau = (ln_lo + (ln_hi - ln_lo) * i as f64 / (points - 1) as f64).exp();
        let v = f(tau);
        if v < best.1 {
            best = (i, v);
        }
    }
    let grid_tau =
        |i: usize| (ln_lo + (ln_hi - ln_lo) * i as f64 / (points - 1) as f64).exp();
    let mut a = grid_tau(best.0.saturating_sub(1));
    let mut b = grid_tau((best.0 + 1).min(points - 1));

    // golden-section to width 1e-10
    let inv_phi = 0.618_033_988_749_894_8_f64;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let tau_m = 0.5 * (a + b);
    (tau_m, f(tau_m))
}

/// Optimal time with the cavity-filling transient:
/// t_m = b / (kappa_tilde N^beta) + 2 c / kappa.
pub fn optimal_time_with_transient(
    atoms: u32,
    kappa_tilde: f64,
    kappa: f64,
    b: f64,
    beta: f64,
    c: f64,
) -> f64 {
    b / (kappa_tilde * (atoms as f64).powf(beta)) + 2.0 * c / kappa
}

/// Default power-law parameters of the optimal-time scaling fit.
pub const TOPT_PREFACTOR_DEFAULT: f64 = 0.9;
pub const TOPT_EXPONENT_DEFAULT: f64 = 0.32;
/// Cavity-fill transient constant deep in the bad-cavity regime.
pub const TRANSIENT_C_DEFAULT: f64 = 3.0;

/// Large-J density of the initial (and time-invariant) distribution of the
/// conditional <Jz>: zero-mean Gaussian with variance N/4.
pub fn jz_initial_density(q: f64, atoms: u32) -> f64 {
    let var = atoms as f64 / 4.0;
    (-q * q / (2.0 * var)).exp() / (2.0 * core::f64::consts::PI * var).sqrt()
}

/// Design estimates for a V-configuration (single coupled ground state)
/// ensemble at the bad-cavity border. All rates in angular frequency units;
/// the power limit is in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignEstimates {
    /// Optimal detuning g^2 N / kappa.
    pub delta_opt: f64,
    /// Photon ceiling (g N / kappa)^2 from the excited-state bound.
    pub n_lim: f64,
    /// Input power at the photon ceiling, n_lim kappa omega_d hbar / 4.
    pub power_lim_watts: f64,
    /// Squeezing time f kappa / (4 g^2 N^{1/3}) + 6 / kappa.
    pub t_m_seconds: f64,
    /// Expected optimum (3/2) N^{-2/3}.
    pub xi2_m: f64,
    /// The same in positive dB of squeezing, -10 log10(xi2).
    pub squeezing_db: f64,
    /// Collective cooperativity N 4 g^2 / (kappa gamma).
    pub collective_cooperativity: f64,
}

const HBAR: f64 = 1.054_571_817e-34;

pub fn sr_estimates(
    g: f64,
    kappa: f64,
    gamma: f64,
    omega_d: f64,
    atoms: u32,
    attenuation: f64,
) -> DesignEstimates {
    let n = atoms as f64;
    let n_lim = (g * n / kappa) * (g * n / kappa);
    let xi2_m = 1.5 * n.powf(-2.0 / 3.0);
    DesignEstimates {
        delta_opt: g * g * n / kappa,
        n_lim,
        power_lim_watts: n_lim * kappa * omega_d * HBAR / 4.0,
        t_m_seconds: attenuation * kappa / (4.0 * g * g * n.powf(1.0 / 3.0)) + 6.0 / kappa,
        xi2_m,
        squeezing_db: -10.0 * xi2_m.log10(),
        collective_cooperativity: n * 4.0 * g * g / (kappa * gamma),
    }
}

/// Exponents of the squeezing optimum for the small-time model
/// xi2 ~ Q^{-delta} + f Q^gamma / N^epsilon with Q ~ N t:
/// the minimum sits at Q = q_prefactor N^{epsilon/(gamma+delta)} with value
/// xi2_prefactor N^{-alpha}, alpha = delta epsilon / (gamma + delta) and
/// beta = 1 - epsilon / (gamma + delta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    pub alpha: f64,
    pub beta: f64,
    pub xi2_prefactor: f64,
    pub q_prefactor: f64,
}

pub fn scaling_exponents(delta: f64, gamma: f64, epsilon: f64, f: f64) -> ScalingExponents {
    let q_prefactor = (delta / (f * gamma)).powf(1.0 / (gamma + delta));
    ScalingExponents {
        alpha: delta * epsilon / (gamma + delta),
        beta: 1.0 - epsilon / (gamma + delta),
        xi2_prefactor: (1.0 + delta / gamma)
            * (delta / (f * gamma)).powf(delta / (gamma + delta)),
        q_prefactor,
    }
}
