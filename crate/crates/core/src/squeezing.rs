//! From trajectory moments to the metrological squeezing parameter,
//! ensemble statistics, optimal points, transients, and power-law fits.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::moments::SpinMoments;

pub type Mat3 = [[f64; 3]; 3];

/// cov_ij = <Ji Jj + Jj Ji>/2 - <Ji><Jj>
pub fn covariance_matrix(m: &SpinMoments) -> Mat3 {
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            cov[i][k] = m.second[i][k] - m.first[i] * m.first[k];
        }
    }
    cov
}

/// Frame that carries the mean spin onto +x: a rotation by -phi around z
/// followed by pi/2 - theta around y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSpinFrame {
    pub theta: f64,
    pub phi: f64,
    pub rotation: Mat3,
}

/// Relative mean-spin length below which the tangential frame is undefined.
pub const FRAME_TOLERANCE: f64 = 1e-9;

pub fn mean_spin_frame(m: &SpinMoments) -> Result<MeanSpinFrame> {
    let length = m.mean_spin_length();
    if length < FRAME_TOLERANCE * m.j {
        return Err(Error::DegenerateFrame {
            spin_magnitude: length,
        });
    }
    let theta = (m.first[2] / length).clamp(-1.0, 1.0).acos();
    let phi = m.first[1].atan2(m.first[0]);

    let a = core::f64::consts::FRAC_PI_2 - theta;
    let (ca, sa) = (a.cos(), a.sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    let ry = [[ca, 0.0, sa], [0.0, 1.0, 0.0], [-sa, 0.0, ca]];
    let rz = [[cp, sp, 0.0], [-sp, cp, 0.0], [0.0, 0.0, 1.0]];
    Ok(MeanSpinFrame {
        theta,
        phi,
        rotation: mat3_mul(&ry, &rz),
    })
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_apply(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (0..3).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

/// R cov R^T
pub fn rotate_covariance(rotation: &Mat3, cov: &Mat3) -> Mat3 {
    let mut rt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rt[i][j] = rotation[j][i];
        }
    }
    mat3_mul(&mat3_mul(rotation, cov), &rt)
}

/// Contrast-weighted minimal tangential variance: rotate the covariance to
/// the mean-spin frame, take the smallest eigenvalue of the transverse 2x2
/// block, and normalize by J C / 2 with C = |<J>|^2 / J^2.
pub fn squeezing_parameter(m: &SpinMoments) -> Result<f64> {
    let frame = mean_spin_frame(m)?;
    let rotated = rotate_covariance(&frame.rotation, &covariance_matrix(m));
    let (a, b, c) = (rotated[1][1], rotated[1][2], rotated[2][2]);
    let lambda_min = 0.5 * (a + c - ((a - c) * (a - c) + 4.0 * b * b).sqrt());
    let length = m.mean_spin_length();
    let contrast = length * length / (m.j * m.j);
    Ok(lambda_min / (m.j * contrast / 2.0))
}

/// Fill the per-sample squeezing series of one trajectory.
pub fn fill_xi2(record: &mut TrajectoryRecord) -> Result<()> {
    let mut xi2 = Vec::with_capacity(record.moments.len());
    for sample in &record.moments {
        xi2.push(squeezing_parameter(&sample.spin)?);
    }
    record.xi2 = xi2;
    Ok(())
}

/// Trajectory-averaged observables on the shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub times: Vec<f64>,
    pub mean_xi2: Vec<f64>,
    /// Standard error of the xi2 mean; NaN entries when `trajectories` = 1.
    pub stderr_xi2: Vec<f64>,
    pub mean_jx: Vec<f64>,
    pub mean_jy: Vec<f64>,
    pub mean_jz: Vec<f64>,
    pub mean_n: Vec<f64>,
    pub optimal: OptimalPoint,
    pub trajectories: usize,
    /// Cavity-fill transient, when a photonic sector exists; filled by the
    /// caller from `transient_time`.
    pub transient: Option<Transient>,
}

impl EnsembleSummary {
    pub fn stderr_defined(&self) -> bool {
        self.trajectories > 1
    }
}

/// Per-trajectory xi2 is averaged across records; averaging the moments
/// first would reproduce the unconditional, squeezing-free evolution.
pub fn ensemble_average(records: &[TrajectoryRecord]) -> Result<EnsembleSummary> {
    let first = records.first().ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
    let len = first.times.len();
    for r in records {
        if r.times != first.times {
            return Err(Error::GridMismatch);
        }
        if r.xi2.len() != len {
            return Err(Error::Invalid("xi2 series not filled for a record"));
        }
    }
    let m = records.len() as f64;

    let mut mean_xi2 = vec![0.0; len];
    let mut stderr_xi2 = vec![0.0; len];
    let mut mean_jx = vec![0.0; len];
    let mut mean_jy = vec![0.0; len];
    let mut mean_jz = vec![0.0; len];
    let mut mean_n = vec![0.0; len];
    for k in 0..len {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in records {
            let v = r.xi2[k];
            sum += v;
            sum_sq += v * v;
            mean_jx[k] += r.moments[k].spin.first[0];
            mean_jy[k] += r.moments[k].spin.first[1];
            mean_jz[k] += r.moments[k].spin.first[2];
            mean_n[k] += r.moments[k].photons;
        }
        mean_xi2[k] = sum / m;
        stderr_xi2[k] = if records.len() > 1 {
            let var = (sum_sq - sum * sum / m) / (m - 1.0);
            (var.max(0.0) / m).sqrt()
        } else {
            f64::NAN
        };
        mean_jx[k] /= m;
        mean_jy[k] /= m;
        mean_jz[k] /= m;
        mean_n[k] /= m;
    }

    let optimal = optimal_point(&first.times, &mean_xi2)?;
    Ok(EnsembleSummary {
        times: first.times.clone(),
        mean_xi2,
        stderr_xi2,
        mean_jx,
        mean_jy,
        mean_jz,
        mean_n,
        optimal,
        trajectories: records.len(),
        transient: None,
    })
}

/// Discrete minimum of the averaged squeezing curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPoint {
    pub t_m: f64,
    pub xi2_m: f64,
    pub index: usize,
    /// Set when the argmin sits on an endpoint (monotone series).
    pub boundary_warning: bool,
    /// Three-point parabolic vertex around the argmin; reported separately
    /// from the discrete minimum and absent on the boundary.
    pub refined: Option<(f64, f64)>,
}

pub fn optimal_point(times: &[f64], xi2: &[f64]) -> Result<OptimalPoint> {
    if times.len() < 10 {
        return Err(Error::TooFewPoints {
            needed: 10,
            got: times.len(),
        });
    }
    debug_assert_eq!(times.len(), xi2.len());
    let mut index = 0;
    for (k, v) in xi2.iter().enumerate() {
        if *v < xi2[index] {
            index = k;
        }
    }
    let boundary_warning = index == 0 || index == xi2.len() - 1;
    let refined = if boundary_warning {
        None
    } else {
        parabolic_vertex(
            (times[index - 1], xi2[index - 1]),
            (times[index], xi2[index]),
            (times[index + 1], xi2[index + 1]),
        )
    };
    Ok(OptimalPoint {
        t_m: times[index],
        xi2_m: xi2[index],
        index,
        boundary_warning,
        refined,
    })
}

fn parabolic_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> Option<(f64, f64)> {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if denom == 0.0 {
        return None;
    }
    let num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    let xv = x1 - 0.5 * num / denom;
    // evaluate the interpolating parabola at the vertex
    let l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    Some((xv, y0 * l0 + y1 * l1 + y2 * l2))
}

/// First crossing of `fraction * steady` and the dimensionless fill
/// constant c = kappa * delta_t / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transient {
    pub delta_t: f64,
    pub c: f64,
}

pub fn transient_time(
    times: &[f64],
    series: &[f64],
    steady: f64,
    fraction: f64,
    kappa: f64,
) -> Result<Transient> {
    debug_assert_eq!(times.len(), series.len());
    let target = fraction * steady;
    if series.is_empty() {
        return Err(Error::NoCrossing);
    }
    let mut delta_t = None;
    if series[0] >= target {
        delta_t = Some(times[0]);
    } else {
        for k in 1..series.len() {
            if series[k] >= target {
                let f = (target - series[k - 1]) / (series[k] - series[k - 1]);
                delta_t = Some(times[k - 1] + f * (times[k] - times[k - 1]));
                break;
            }
        }
    }
    let delta_t = delta_t.ok_or(Error::NoCrossing)?;
    Ok(Transient {
        delta_t,
        c: kappa * delta_t / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Weights 1/sigma^2 in log space; parameter errors are absolute.
    ErrorWeighted,
    /// Uniform weights; parameter errors scaled by the reduced chi-square.
    Uniform,
}

/// Power-law fit y = a x^(-exponent) by least squares on log y vs log x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    pub exponent_sigma: f64,
    pub prefactor: f64,
    pub prefactor_sigma: f64,
    /// (smallest, largest) abscissa used.
    pub range: (f64, f64),
    /// 2-norm of the log-space residuals.
    pub residual_norm: f64,
    pub weighting: Weighting,
}

/// `points` are (x, y, sigma_y) rows.
pub fn fit_power_law(points: &[(f64, f64, f64)], weighting: Weighting) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    for &(x, y, sigma) in points {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::NonPositiveData);
        }
        if weighting == Weighting::ErrorWeighted && !(sigma > 0.0) {
            return Err(Error::Invalid("error-weighted fit needs positive sigmas"));
        }
    }

    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, sigma) in points {
        let u = x.ln();
        let z = y.ln();
        let w = match weighting {
            Weighting::ErrorWeighted => {
                let sz = sigma / y;
                1.0 / (sz * sz)
            }
            Weighting::Uniform => 1.0,
        };
        s += w;
        sx += w * u;
        sy += w * z;
        sxx += w * u * u;
        sxy += w * u * z;
    }
    let delta = s * sxx - sx * sx;
    if delta <= 0.0 {
        return Err(Error::Invalid("degenerate abscissas in fit"));
    }
    let intercept = (sxx * sy - sx * sxy) / delta;
    let slope = (s * sxy - sx * sy) / delta;

    let mut var_intercept = sxx / delta;
    let mut var_slope = s / delta;
    let mut residual_sq = 0.0;
    let mut chi2 = 0.0;
    for &(x, y, sigma) in points {
        let r = y.ln() - intercept - slope * x.ln();
        residual_sq += r * r;
        let w = match weighting {
            Weighting::ErrorWeighted => {
                let sz = sigma / y;
                1.0 / (sz * sz)
            }
            Weighting::Uniform => 1.0,
        };
        chi2 += w * r * r;
    }
    if weighting == Weighting::Uniform && points.len() > 2 {
        let reduced = chi2 / (points.len() as f64 - 2.0);
        var_intercept *= reduced;
        var_slope *= reduced;
    }

    let prefactor = intercept.exp();
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &(x, _, _)| {
            (lo.min(x), hi.max(x))
        });
    Ok(FitResult {
        exponent: -slope,
        exponent_sigma: var_slope.max(0.0).sqrt(),
        prefactor,
        prefactor_sigma: prefactor * var_intercept.max(0.0).sqrt(),
        range: (lo, hi),
        residual_norm: residual_sq.sqrt(),
        weighting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::SpinMeasurer;
    use crate::operators::coherent_spin_state;
    use crate::theory;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn css_moments(atoms: u32, theta: f64, phi: f64) -> SpinMoments {
        let m = SpinMeasurer::dicke(atoms).unwrap();
        let s = coherent_spin_state(atoms, theta, phi).unwrap();
        m.measure(&s).unwrap().spin
    }

    #[test]
    fn covariance_of_css_along_x() {
        let cov = covariance_matrix(&css_moments(2, core::f64::consts::FRAC_PI_2, 0.0));
        let expected = [[0.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]];
        for i in 0..3 {
            for k in 0..3 {
                assert!((cov[i][k] - expected[i][k]).abs() < 1e-12, "{i}{k}");
            }
        }
    }

    #[test]
    fn covariance_of_polar_eigenstate() {
        // |m = J> has Var Jx = Var Jy = J/2 and Var Jz = 0
        let cov = covariance_matrix(&css_moments(8, 0.0, 0.0));
        let j = 4.0;
        assert_relative_eq!(cov[0][0], j / 2.0, max_relative = 1e-12);
        assert_relative_eq!(cov[1][1], j / 2.0, max_relative = 1e-12);
        assert!(cov[2][2].abs() < 1e-12);
    }

    #[test]
    fn covariance_trace_identity() {
        // tr cov = J(J+1) - |<J>|^2
        for (atoms, theta, phi) in [(5u32, 0.7, 1.1), (12, 2.0, -0.4), (3, 1.3, 3.0)] {
            let m = css_moments(atoms, theta, phi);
            let cov = covariance_matrix(&m);
            let trace = cov[0][0] + cov[1][1] + cov[2][2];
            let j = atoms as f64 / 2.0;
            let len = m.mean_spin_length();
            assert_relative_eq!(trace, j * (j + 1.0) - len * len, epsilon = 1e-10);
        }
    }

    #[test]
    fn frame_along_axes() {
        let m = css_moments(4, core::f64::consts::FRAC_PI_2, 0.0);
        let f = mean_spin_frame(&m).unwrap();
        assert_relative_eq!(f.theta, core::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert!(f.phi.abs() < 1e-12);
        for i in 0..3 {
            for k in 0..3 {
                let expected = if i == k { 1.0 } else { 0.0 };
                assert!((f.rotation[i][k] - expected).abs() < 1e-12);
            }
        }

        let m = css_moments(4, 0.0, 0.0);
        let f = mean_spin_frame(&m).unwrap();
        assert!(f.theta.abs() < 1e-9);
        let mapped = mat3_apply(&f.rotation, &[0.0, 0.0, 1.0]);
        assert_relative_eq!(mapped[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn frame_preserves_length_and_trace() {
        // the CSS phase convention e^{-i(J-m)phi} points the mean spin at
        // azimuth -phi
        let m = css_moments(10, 1.0, -core::f64::consts::FRAC_PI_4);
        let f = mean_spin_frame(&m).unwrap();
        assert_relative_eq!(f.phi, core::f64::consts::FRAC_PI_4, epsilon = 1e-12);

        let rotated_mean = mat3_apply(&f.rotation, &m.first);
        assert!(rotated_mean[1].abs() < 1e-10);
        assert!(rotated_mean[2].abs() < 1e-10);
        assert_relative_eq!(rotated_mean[0], m.mean_spin_length(), epsilon = 1e-10);

        let cov = covariance_matrix(&m);
        let rot = rotate_covariance(&f.rotation, &cov);
        let tr = |c: &Mat3| c[0][0] + c[1][1] + c[2][2];
        assert_relative_eq!(tr(&rot), tr(&cov), epsilon = 1e-10);

        // orthogonality to 1e-12
        let rt = rotate_covariance(&f.rotation, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        for i in 0..3 {
            for k in 0..3 {
                let expected = if i == k { 1.0 } else { 0.0 };
                assert!((rt[i][k] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_frame_is_an_error() {
        let m = SpinMoments {
            first: [0.0, 0.0, 0.0],
            second: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            j: 2.0,
        };
        assert!(matches!(
            mean_spin_frame(&m),
            Err(Error::DegenerateFrame { .. })
        ));
        assert!(squeezing_parameter(&m).is_err());
    }

    #[test]
    fn css_sits_at_the_standard_quantum_limit() {
        for (theta, phi) in [
            (0.0, 0.0),
            (core::f64::consts::FRAC_PI_2, 0.0),
            (1.1, 2.2),
            (2.7, -1.0),
            (core::f64::consts::PI, 0.0),
        ] {
            let m = css_moments(14, theta, phi);
            assert_relative_eq!(squeezing_parameter(&m).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn handmade_squeezed_moments() {
        // mean spin on +x, cov diag(0, J/2, J/4), contrast 1 -> xi2 = 1/2
        let j = 8.0;
        let m = SpinMoments {
            first: [j, 0.0, 0.0],
            second: [[j * j, 0.0, 0.0], [0.0, j / 2.0, 0.0], [0.0, 0.0, j / 4.0]],
            j,
        };
        assert_relative_eq!(squeezing_parameter(&m).unwrap(), 0.5, epsilon = 1e-12);
    }

    proptest! {
        // xi2 is invariant under a global rotation of the state
        #[test]
        fn xi2_rotation_invariance(
            theta in 0.2f64..2.9,
            phi in -3.1f64..3.1,
            alpha in -3.1f64..3.1,
            beta in 0.0f64..core::f64::consts::PI,
        ) {
            let m = css_moments(9, theta, phi);
            // squeeze the z variance by hand to leave the SQL, then rotate
            let mut squeezed = m;
            for i in 0..3 {
                for k in 0..3 {
                    squeezed.second[i][k] = m.second[i][k] * if i == 2 || k == 2 { 0.6 } else { 1.0 };
                }
            }
            let xi2 = squeezing_parameter(&squeezed);
            prop_assume!(xi2.is_ok());
            let xi2 = xi2.unwrap();

            let (ca, sa) = (alpha.cos(), alpha.sin());
            let (cb, sb) = (beta.cos(), beta.sin());
            let rz = [[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]];
            let ry = [[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]];
            let r = mat3_mul(&rz, &ry);

            let rotated = SpinMoments {
                first: mat3_apply(&r, &squeezed.first),
                second: rotate_covariance(&r, &squeezed.second),
                j: squeezed.j,
            };
            let xi2_rot = squeezing_parameter(&rotated).unwrap();
            prop_assert!((xi2 - xi2_rot).abs() < 1e-8 * xi2.max(1.0));
        }
    }

    #[test]
    fn optimal_point_basics() {
        let times: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let mut series = vec![1.0; 12];
        series[4] = 0.5;
        series[5] = 0.7;
        let p = optimal_point(&times, &series).unwrap();
        assert_eq!(p.t_m, 4.0);
        assert_eq!(p.xi2_m, 0.5);
        assert!(!p.boundary_warning);
        assert!(p.refined.is_some());

        // monotone decreasing
        let falling: Vec<f64> = (0..12).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let p = optimal_point(&times, &falling).unwrap();
        assert!(p.boundary_warning);
        assert_eq!(p.index, 11);

        assert!(optimal_point(&times[..5], &series[..5]).is_err());
    }

    #[test]
    fn optimal_point_ties_break_earliest() {
        let times: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut series = vec![1.0; 10];
        series[3] = 0.5;
        series[6] = 0.5;
        let p = optimal_point(&times, &series).unwrap();
        assert_eq!(p.index, 3);
    }

    #[test]
    fn optimal_point_on_theory_curve() {
        // sampled no-feedback average for N=1000: minimum near tau = 0.1
        let atoms = 1000;
        let times: Vec<f64> = (0..4000).map(|i| 0.4 * i as f64 / 3999.0).collect();
        let xi2: Vec<f64> = times
            .iter()
            .map(|&tau| theory::xi2_average_nofeedback(tau, atoms, 1.0))
            .collect();
        let p = optimal_point(&times, &xi2).unwrap();
        assert_relative_eq!(p.t_m, 0.1, max_relative = 0.15);
        assert_relative_eq!(p.xi2_m, 0.015, max_relative = 0.15);
        let (t_ref, x_ref) = p.refined.unwrap();
        assert_relative_eq!(t_ref, p.t_m, max_relative = 0.01);
        assert!(x_ref <= p.xi2_m + 1e-12);
    }

    #[test]
    fn transient_on_free_cavity_fill() {
        // n(t) = n0 (1 - e^{-kappa t / 2})^2 crosses 90% at c = -ln(1 - sqrt(0.9))
        let kappa = 0.4;
        let n0 = 4.0;
        let times: Vec<f64> = (0..40_000).map(|i| i as f64 * 1e-3 / 0.2).collect();
        let series: Vec<f64> = times
            .iter()
            .map(|t| {
                let e = 1.0 - (-kappa * t / 2.0).exp();
                n0 * e * e
            })
            .collect();
        let tr = transient_time(&times, &series, n0, 0.9, kappa).unwrap();
        let c_expected = -(1.0 - 0.9f64.sqrt()).ln();
        assert_relative_eq!(tr.c, c_expected, max_relative = 1e-5);
        assert_relative_eq!(tr.c, 2.97, max_relative = 1e-2);

        // never crosses
        let low: Vec<f64> = series.iter().map(|v| v * 0.5).collect();
        assert!(matches!(
            transient_time(&times, &low, n0, 0.9, kappa),
            Err(Error::NoCrossing)
        ));
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let points: Vec<(f64, f64, f64)> = [1e3, 1e4, 1e5]
            .iter()
            .map(|&x| (x, 2.0 / x.powf(2.0 / 3.0), 0.05))
            .collect();
        for weighting in [Weighting::ErrorWeighted, Weighting::Uniform] {
            let fit = fit_power_law(&points, weighting).unwrap();
            assert_relative_eq!(fit.exponent, 2.0 / 3.0, epsilon = 1e-10);
            assert_relative_eq!(fit.prefactor, 2.0, epsilon = 1e-10);
            assert!(fit.residual_norm < 1e-12);
            assert_eq!(fit.range, (1e3, 1e5));
        }
    }

    proptest! {
        // exact power laws are recovered independent of the weights
        #[test]
        fn fit_weight_independence(
            exponent in 0.1f64..2.0,
            prefactor in 0.1f64..10.0,
            sig in proptest::collection::vec(0.01f64..5.0, 5),
        ) {
            let points: Vec<(f64, f64, f64)> = sig
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    let x = 10f64.powi(i as i32 + 2);
                    (x, prefactor / x.powf(exponent), s)
                })
                .collect();
            let fit = fit_power_law(&points, Weighting::ErrorWeighted).unwrap();
            prop_assert!((fit.exponent - exponent).abs() < 1e-8);
            prop_assert!((fit.prefactor - prefactor).abs() < 1e-6 * prefactor);
        }
    }

    #[test]
    fn fit_rejects_bad_input() {
        let good = [(10.0, 1.0, 0.1), (100.0, 0.5, 0.1), (1000.0, 0.2, 0.1)];
        assert!(fit_power_law(&good[..2], Weighting::Uniform).is_err());
        let negative = [(10.0, 1.0, 0.1), (100.0, -0.5, 0.1), (1000.0, 0.2, 0.1)];
        assert!(matches!(
            fit_power_law(&negative, Weighting::Uniform),
            Err(Error::NonPositiveData)
        ));
        let zero_sigma = [(10.0, 1.0, 0.0), (100.0, 0.5, 0.1), (1000.0, 0.2, 0.1)];
        assert!(fit_power_law(&zero_sigma, Weighting::ErrorWeighted).is_err());
        assert!(fit_power_law(&zero_sigma, Weighting::Uniform).is_ok());
    }
}
