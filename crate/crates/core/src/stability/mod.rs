//! Discrete ISS-Lyapunov function, decay-rate certificates and the
//! positivity checks behind the decay certificate.

mod eigen;

pub use eigen::min_eig_symmetric;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::system::{FeedbackMatrix, StateField, SystemCoefficients};
use crate::weights::RealizedWeights;

/// Relative tolerance granted to the semi-definiteness verdicts; absorbs
/// symmetrization noise.
const PSD_REL_TOL: f64 = 1e-10;

#[inline]
fn verdict_tol(scale: f64) -> f64 {
    PSD_REL_TOL * scale.max(1.0)
}

/// Per-step record of the discrete Lyapunov function, its certified upper
/// envelope and the running disturbance supremum.
#[derive(Debug, Clone)]
pub struct LyapunovSeries {
    pub t: Vec<f64>,
    /// Discrete Lyapunov value `L^n = dx sum_j W_j' P_j W_j`.
    pub l: Vec<f64>,
    /// Certified envelope `L_up^n`.
    pub l_up: Vec<f64>,
    /// Running supremum `S^n = max_{s<=n} dx sum_j |Psi_j^s|^2`.
    pub s: Vec<f64>,
    /// Unweighted state energy `dx sum_j |W_j|^2`.
    pub l2_state: Vec<f64>,
    /// Smallest realized weight entry over the interior cells.
    pub zeta: f64,
    /// Largest realized weight entry over the interior cells.
    pub beta: f64,
    /// Decay rate used for the envelope.
    pub eta: f64,
    pub xi: f64,
}

impl LyapunovSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// ISS overshoot constant `C = beta / zeta`.
    pub fn iss_constant(&self) -> f64 {
        self.beta / self.zeta
    }
}

/// Margins of the certificate conditions for one discretised run.
///
/// `theta` must be positive definite (strict margin), the source and boundary
/// matrices positive semi-definite (margin above `-tol`). `eta_cert` is the
/// constant in `W' Theta W >= eta W' P W`, certified as the minimum
/// generalized eigenvalue over all cells.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub theta_margin: f64,
    pub theta_scale: f64,
    pub theta_per_cell: Vec<f64>,
    pub source_margin: f64,
    pub source_scale: f64,
    pub source_per_cell: Vec<f64>,
    pub boundary_margin: f64,
    pub boundary_scale: f64,
    pub eta_cert: f64,
    pub continuous: Option<ContinuousConditions>,
}

impl ConditionReport {
    pub fn theta_ok(&self) -> bool {
        self.theta_margin > verdict_tol(self.theta_scale)
    }

    pub fn source_ok(&self) -> bool {
        self.source_margin >= -verdict_tol(self.source_scale)
    }

    pub fn boundary_ok(&self) -> bool {
        self.boundary_margin >= -verdict_tol(self.boundary_scale)
    }

    pub fn all_ok(&self) -> bool {
        self.theta_ok() && self.source_ok() && self.boundary_ok()
    }
}

/// Margins of the continuous-theory conditions sampled over `[0, l]`.
#[derive(Debug, Clone)]
pub struct ContinuousConditions {
    pub interior_margin: f64,
    pub interior_scale: f64,
    pub boundary_margin: f64,
    pub boundary_scale: f64,
}

impl ContinuousConditions {
    pub fn interior_ok(&self) -> bool {
        self.interior_margin > verdict_tol(self.interior_scale)
    }

    pub fn boundary_ok(&self) -> bool {
        self.boundary_margin >= -verdict_tol(self.boundary_scale)
    }
}

/// Coefficient and weight functions of the continuous system, used by
/// [`check_continuous`].
pub struct ContinuousModel<'a> {
    pub components: usize,
    pub positive: usize,
    pub length: f64,
    /// Signed transport diagonal; the first `positive` entries are positive.
    pub speeds: &'a dyn Fn(f64) -> Vec<f64>,
    /// Row-major `k x k` source matrix.
    pub source: &'a dyn Fn(f64) -> Vec<f64>,
    /// Positive diagonal weight function.
    pub weights: &'a dyn Fn(f64) -> Vec<f64>,
}

/// Discrete Lyapunov value `dx sum_j W_j' P_j W_j` over the interior cells.
pub fn lyapunov_value(state: &StateField, weights: &RealizedWeights, dx: f64) -> f64 {
    let k = state.components();
    let mut acc = 0.0;
    for j in 0..state.cells() {
        let w = state.cell(j);
        let p = weights.cell(j);
        for i in 0..k {
            acc += p[i] * w[i] * w[i];
        }
    }
    dx * acc
}

/// Smallest and largest realized diagonal entries over the interior cells,
/// the constants in `zeta dx sum |W|^2 <= L <= beta dx sum |W|^2`.
pub fn weight_bounds(weights: &RealizedWeights) -> (f64, f64) {
    let mut zeta = f64::INFINITY;
    let mut beta = 0.0f64;
    for j in 0..weights.cells() {
        for &p in weights.cell(j) {
            zeta = zeta.min(p);
            beta = beta.max(p);
        }
    }
    (zeta, beta)
}

/// Closed-form lower bound on the decay rate for the exponential weight
/// family: `mu * alpha * (1 + xi dt) * exp(-mu dx) - xi`. Negative values are
/// returned as-is and signal that no envelope is certified.
pub fn decay_rate_exponential(mu: f64, alpha: f64, xi: f64, dt: f64, dx: f64) -> f64 {
    mu * alpha * (1.0 + xi * dt) * (-mu * dx).exp() - xi
}

/// Envelope `L_up^n = exp(-eta t^n) L0 + (beta/eta)(1/xi + dt) S^{n-1}`
/// obtained from the per-step decay inequality by discrete recursion.
pub fn gronwall_envelope(
    l0: f64,
    eta: f64,
    beta: f64,
    xi: f64,
    dt: f64,
    s: &[f64],
) -> Result<Vec<f64>> {
    if !(eta > 0.0) {
        return Err(Error::NoCertificate { eta });
    }
    if !(eta * dt < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eta dt = {} must stay below 1 for the discrete recursion",
            eta * dt
        )));
    }
    if !(xi > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "xi must be positive, got {xi}"
        )));
    }
    let gain = (beta / eta) * (1.0 / xi + dt);
    Ok(s.iter()
        .enumerate()
        .map(|(n, _)| {
            let sup = s[n.saturating_sub(1)];
            (-eta * n as f64 * dt).exp() * l0 + gain * sup
        })
        .collect())
}

/// Minimum over cells of the smallest generalized eigenvalue of
/// `(Theta_j, P_j)`; this is the certified decay rate `eta`.
#[derive(Debug, Clone)]
pub struct ThetaReport {
    pub margin: f64,
    pub scale: f64,
    pub per_cell: Vec<f64>,
}

pub fn check_theta(
    coeffs: &SystemCoefficients,
    weights: &RealizedWeights,
    xi: f64,
    grid: &GridSpec,
) -> ThetaReport {
    let m = coeffs.positive();
    let neg = coeffs.negative();
    let dx = grid.dx;
    let growth = 1.0 + xi * grid.dt;
    let mut per_cell = Vec::with_capacity(coeffs.cells());
    let mut scale = 0.0f64;
    for j in 0..coeffs.cells() as i64 {
        let mut cell_min = f64::INFINITY;
        for i in 0..m {
            let p_here = weights.entry(j, i);
            let theta = -growth
                * (coeffs.lambda_plus(j - 1, i) * (weights.entry(j + 1, i) - p_here) / dx
                    + (coeffs.lambda_plus(j, i) - coeffs.lambda_plus(j - 1, i)) / dx
                        * weights.entry(j + 1, i))
                - xi * p_here;
            let ratio = theta / p_here;
            cell_min = cell_min.min(ratio);
            scale = scale.max(ratio.abs());
        }
        for i in 0..neg {
            let c = m + i;
            let p_here = weights.entry(j, c);
            let theta = growth
                * (coeffs.lambda_minus(j + 1, i) * (p_here - weights.entry(j - 1, c)) / dx
                    + (coeffs.lambda_minus(j + 1, i) - coeffs.lambda_minus(j, i)) / dx
                        * weights.entry(j - 1, c))
                - xi * p_here;
            let ratio = theta / p_here;
            cell_min = cell_min.min(ratio);
            scale = scale.max(ratio.abs());
        }
        per_cell.push(cell_min);
    }
    let margin = per_cell.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    ThetaReport {
        margin,
        scale,
        per_cell,
    }
}

/// Minimum over cells of the smallest eigenvalue of
/// `M_j = P_j Pi_j + Pi_j' P_j - dt Pi_j' P_j Pi_j`.
#[derive(Debug, Clone)]
pub struct SourceReport {
    pub margin: f64,
    pub scale: f64,
    pub per_cell: Vec<f64>,
}

pub fn check_source_matrix(
    coeffs: &SystemCoefficients,
    weights: &RealizedWeights,
    dt: f64,
) -> SourceReport {
    let k = coeffs.components();
    let mut per_cell = Vec::with_capacity(coeffs.cells());
    let mut scale = 0.0f64;
    let mut matrix = vec![0.0; k * k];
    for j in 0..coeffs.cells() {
        let pi = coeffs.source(j);
        let p = weights.cell(j);
        for r in 0..k {
            for c in 0..k {
                // (P Pi)_{rc} + (Pi' P)_{rc} - dt (Pi' P Pi)_{rc}
                let mut quad = 0.0;
                for t in 0..k {
                    quad += pi[t * k + r] * p[t] * pi[t * k + c];
                }
                matrix[r * k + c] = p[r] * pi[r * k + c] + pi[c * k + r] * p[c] - dt * quad;
            }
        }
        for &v in &matrix {
            scale = scale.max(v.abs());
        }
        let eig = if k == 2 {
            eigen::min_eig_2x2(matrix[0], 0.5 * (matrix[1] + matrix[2]), matrix[3])
        } else {
            min_eig_symmetric(&matrix, k).expect("source matrix is symmetric by construction")
        };
        per_cell.push(eig);
    }
    let margin = per_cell.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    SourceReport {
        margin,
        scale,
        per_cell,
    }
}

/// Smallest eigenvalue of the boundary dissipation matrix
/// `diag{L+_{J-1} P+_J, L-_0 P-_{-1}} - K' diag{L+_{-1} P+_0, L-_J P-_{J-1}} K`.
#[derive(Debug, Clone)]
pub struct BoundaryReport {
    pub margin: f64,
    pub scale: f64,
}

pub fn check_boundary_matrix(
    coeffs: &SystemCoefficients,
    weights: &RealizedWeights,
    feedback: &FeedbackMatrix,
) -> Result<BoundaryReport> {
    let k = coeffs.components();
    let m = coeffs.positive();
    if feedback.positive() != m || feedback.negative() != k - m {
        return Err(Error::InvalidParameter(format!(
            "feedback shaped {}x{} does not match system with m = {m}, k - m = {}",
            feedback.positive(),
            feedback.negative(),
            k - m
        )));
    }
    let last = coeffs.cells() as i64 - 1;
    let ghost = coeffs.cells() as i64;
    let mut exit_weight = vec![0.0; k];
    let mut entry_weight = vec![0.0; k];
    for i in 0..m {
        exit_weight[i] = coeffs.lambda_plus(last, i) * weights.entry(ghost, i);
        entry_weight[i] = coeffs.lambda_plus(-1, i) * weights.entry(0, i);
    }
    for i in 0..(k - m) {
        exit_weight[m + i] = coeffs.lambda_minus(0, i) * weights.entry(-1, m + i);
        entry_weight[m + i] = coeffs.lambda_minus(ghost, i) * weights.entry(last, m + i);
    }
    let kf = feedback.assemble();
    let mut b = vec![0.0; k * k];
    for r in 0..k {
        b[r * k + r] = exit_weight[r];
        for c in 0..k {
            let mut sandwich = 0.0;
            for t in 0..k {
                sandwich += kf[t * k + r] * entry_weight[t] * kf[t * k + c];
            }
            b[r * k + c] -= sandwich;
        }
    }
    let scale = b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let margin = min_eig_symmetric(&b, k)?;
    Ok(BoundaryReport { margin, scale })
}

/// Largest admissible gain magnitudes for the scalar 2x2 feedback,
/// `(|k12|_max, |k21|_max)`, from the boundary dissipation condition.
pub fn feedback_bounds(
    coeffs: &SystemCoefficients,
    weights: &RealizedWeights,
) -> Result<(f64, f64)> {
    if coeffs.components() != 2 || coeffs.positive() != 1 {
        return Err(Error::UnsupportedShape(format!(
            "feedback bounds require k = 2, m = 1, got k = {}, m = {}",
            coeffs.components(),
            coeffs.positive()
        )));
    }
    let last = coeffs.cells() as i64 - 1;
    let ghost = coeffs.cells() as i64;
    let k12_max = (coeffs.lambda_minus(0, 0) * weights.entry(-1, 1)
        / (coeffs.lambda_plus(-1, 0) * weights.entry(0, 0)))
    .sqrt();
    let k21_max = (coeffs.lambda_plus(last, 0) * weights.entry(ghost, 0)
        / (coeffs.lambda_minus(ghost, 0) * weights.entry(last, 1)))
    .sqrt();
    Ok((k12_max, k21_max))
}

/// Evaluates the continuous-theory conditions on a uniform sample of `[0, l]`,
/// with derivatives of the coefficient and weight functions taken by central
/// differences of step `l / (10 samples)`. Constant-coefficient systems are
/// the special case with vanishing speed derivatives.
pub fn check_continuous(
    model: &ContinuousModel,
    feedback: &FeedbackMatrix,
    xi: f64,
    samples: usize,
) -> Result<ContinuousConditions> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 sample points, got {samples}"
        )));
    }
    let k = model.components;
    let m = model.positive;
    let h = model.length / (10.0 * samples as f64);
    let mut interior_margin = f64::INFINITY;
    let mut interior_scale = 0.0f64;
    let mut q = vec![0.0; k * k];
    for idx in 0..samples {
        let x = model.length * idx as f64 / (samples - 1) as f64;
        let speeds = (model.speeds)(x);
        let p = (model.weights)(x);
        let pi = (model.source)(x);
        let p_hi = (model.weights)(x + h);
        let p_lo = (model.weights)(x - h);
        let s_hi = (model.speeds)(x + h);
        let s_lo = (model.speeds)(x - h);
        for r in 0..k {
            for c in 0..k {
                q[r * k + c] = pi[c * k + r] * p[c] + p[r] * pi[r * k + c];
            }
            let dp = (p_hi[r] - p_lo[r]) / (2.0 * h);
            let ds = (s_hi[r] - s_lo[r]) / (2.0 * h);
            q[r * k + r] += -speeds[r] * dp - ds * p[r] - xi * p[r];
        }
        for &v in &q {
            interior_scale = interior_scale.max(v.abs());
        }
        interior_margin = interior_margin.min(min_eig_symmetric(&q, k)?);
    }

    let s0 = (model.speeds)(0.0);
    let sl = (model.speeds)(model.length);
    let p0 = (model.weights)(0.0);
    let pl = (model.weights)(model.length);
    let mut exit_weight = vec![0.0; k];
    let mut entry_weight = vec![0.0; k];
    for i in 0..m {
        exit_weight[i] = sl[i] * pl[i];
        entry_weight[i] = s0[i] * p0[i];
    }
    for i in m..k {
        exit_weight[i] = s0[i].abs() * p0[i];
        entry_weight[i] = sl[i].abs() * pl[i];
    }
    let kf = feedback.assemble();
    let mut b = vec![0.0; k * k];
    for r in 0..k {
        b[r * k + r] = exit_weight[r];
        for c in 0..k {
            let mut sandwich = 0.0;
            for t in 0..k {
                sandwich += kf[t * k + r] * entry_weight[t] * kf[t * k + c];
            }
            b[r * k + c] -= sandwich;
        }
    }
    let boundary_scale = b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let boundary_margin = min_eig_symmetric(&b, k)?;
    Ok(ContinuousConditions {
        interior_margin,
        interior_scale,
        boundary_margin,
        boundary_scale,
    })
}

/// Runs the three discrete condition checks and certifies the decay rate.
pub fn condition_report(
    coeffs: &SystemCoefficients,
    weights: &RealizedWeights,
    feedback: &FeedbackMatrix,
    xi: f64,
    grid: &GridSpec,
) -> Result<ConditionReport> {
    let theta = check_theta(coeffs, weights, xi, grid);
    let source = check_source_matrix(coeffs, weights, grid.dt);
    let boundary = check_boundary_matrix(coeffs, weights, feedback)?;
    Ok(ConditionReport {
        theta_margin: theta.margin,
        theta_scale: theta.scale,
        theta_per_cell: theta.per_cell,
        source_margin: source.margin,
        source_scale: source.scale,
        source_per_cell: source.per_cell,
        boundary_margin: boundary.margin,
        boundary_scale: boundary.scale,
        eta_cert: theta.margin,
        continuous: None,
    })
}

/// Verifies the discrete ISS inequality
/// `dx sum |W^n|^2 <= C exp(-eta t^n) dx sum |W^0|^2 + (C/eta)(1/xi + dt) S^{n-1}`
/// with `C = beta / zeta` for every recorded step.
pub fn iss_bound_check(series: &LyapunovSeries, w0_norm_sq: f64, w_norm_sq: &[f64]) -> bool {
    if w_norm_sq.is_empty() {
        return true;
    }
    let c = series.iss_constant();
    let dt = if series.t.len() >= 2 {
        series.t[1] - series.t[0]
    } else {
        0.0
    };
    let gain = (c / series.eta) * (1.0 / series.xi + dt);
    w_norm_sq.iter().enumerate().all(|(n, &w2)| {
        let sup = series.s[n.saturating_sub(1).min(series.s.len() - 1)];
        let bound = c * (-series.eta * series.t[n]).exp() * w0_norm_sq + gain * sup;
        w2 <= bound * (1.0 + 1e-9) + 1e-300
    })
}
