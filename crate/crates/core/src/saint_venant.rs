//! Shallow-water channel experiment: steady-state profiles, linearization
//! around them, characteristic coordinates and boundary-gain mapping.

use crate::error::{Error, Result};
use crate::grid::{build_grid, GridSpec};
use crate::solver::{simulate, SimulateOptions, SimulationOutput};
use crate::system::{Disturbance, FeedbackMatrix, StateField, SystemCoefficients, TimeProfile};
use crate::weights::WeightSpec;

/// Channel model: gravity, friction, bed slope and rainfall forcing.
///
/// The momentum source is `friction u^2 / h - gravity * bed_slope` by
/// default. `friction_with_g` restores the variant with gravity multiplying
/// the whole term, `gravity (friction u^2 / h - bed_slope)`; the default is
/// the form consistent with the reference data for the constant steady state.
#[derive(Debug, Clone)]
pub struct SaintVenantModel {
    pub gravity: f64,
    pub friction: f64,
    pub bed_slope: f64,
    /// Homogeneous rainfall intensity `R(t)`.
    pub rain: TimeProfile,
    /// Steady rainfall `R*` entering the steady-state balance.
    pub steady_rain: f64,
    pub friction_with_g: bool,
}

impl SaintVenantModel {
    /// Momentum source term at depth `h` and velocity `u`.
    #[inline]
    pub fn friction_source(&self, h: f64, u: f64) -> f64 {
        if self.friction_with_g {
            self.gravity * (self.friction * u * u / h - self.bed_slope)
        } else {
            self.friction * u * u / h - self.gravity * self.bed_slope
        }
    }

    /// Friction constant as it appears in the linearized source entries.
    #[inline]
    fn friction_eff(&self) -> f64 {
        if self.friction_with_g {
            self.gravity * self.friction
        } else {
            self.friction
        }
    }

    /// Right-hand side of the steady-state profile ODEs.
    pub fn steady_rhs(&self, h: f64, u: f64, x: f64) -> Result<(f64, f64)> {
        let g = self.gravity;
        if !(h > 0.0) {
            return Err(Error::SteadyStateFailure {
                x,
                detail: format!("depth became non-positive: h = {h}"),
            });
        }
        let denom = u * u - g * h;
        if denom >= -1e-10 * g * h.max(1.0) {
            return Err(Error::SteadyStateFailure {
                x,
                detail: format!("flow left the sub-critical regime: g h - u^2 = {}", -denom),
            });
        }
        let f = self.friction_source(h, u);
        let r = self.steady_rain;
        let dh = (h * f + 2.0 * u * r) / denom;
        let du = -(u * f + (g + u * u / h) * r) / denom;
        Ok((dh, du))
    }
}

/// Steady depth and velocity sampled at the cell and ghost centres,
/// row `j + 1` for grid index `j` in `-1..=cells`.
#[derive(Debug, Clone)]
pub struct SteadyProfiles {
    pub depth: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl SteadyProfiles {
    #[inline]
    pub fn depth_at(&self, j: i64) -> f64 {
        self.depth[(j + 1) as usize]
    }

    #[inline]
    pub fn velocity_at(&self, j: i64) -> f64 {
        self.velocity[(j + 1) as usize]
    }
}

fn rk4_step(model: &SaintVenantModel, h: f64, u: f64, x: f64, step: f64) -> Result<(f64, f64)> {
    let (k1h, k1u) = model.steady_rhs(h, u, x)?;
    let (k2h, k2u) = model.steady_rhs(h + 0.5 * step * k1h, u + 0.5 * step * k1u, x)?;
    let (k3h, k3u) = model.steady_rhs(h + 0.5 * step * k2h, u + 0.5 * step * k2u, x)?;
    let (k4h, k4u) = model.steady_rhs(h + step * k3h, u + step * k3u, x + step)?;
    Ok((
        h + step / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h),
        u + step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
    ))
}

/// Integrates the steady-state ODEs from the left-boundary data `(h0, u0)`
/// with classical fourth-order steps of `dx / 4`, sampling every cell centre
/// and both ghost centres. Aborts if the flow leaves the sub-critical regime.
pub fn steady_state_solve(
    model: &SaintVenantModel,
    h0: f64,
    u0: f64,
    grid: &GridSpec,
) -> Result<SteadyProfiles> {
    model.steady_rhs(h0, u0, 0.0)?;
    let substep = grid.dx / 4.0;
    let cells = grid.cells;
    let mut depth = vec![0.0; cells + 2];
    let mut velocity = vec![0.0; cells + 2];

    // Left ghost centre at -dx/2: two backward substeps.
    let (mut h, mut u, mut x) = (h0, u0, 0.0);
    for _ in 0..2 {
        (h, u) = rk4_step(model, h, u, x, -substep)?;
        x -= substep;
        model.steady_rhs(h, u, x)?;
    }
    depth[0] = h;
    velocity[0] = u;

    // Forward sweep: two substeps to the first centre, then four per cell.
    let (mut h, mut u, mut x) = (h0, u0, 0.0);
    for j in 0..cells {
        let substeps = if j == 0 { 2 } else { 4 };
        for _ in 0..substeps {
            (h, u) = rk4_step(model, h, u, x, substep)?;
            x += substep;
            model.steady_rhs(h, u, x)?;
        }
        depth[j + 1] = h;
        velocity[j + 1] = u;
    }
    // Right ghost centre one full cell beyond the last centre.
    for _ in 0..4 {
        (h, u) = rk4_step(model, h, u, x, substep)?;
        x += substep;
        model.steady_rhs(h, u, x)?;
    }
    depth[cells + 1] = h;
    velocity[cells + 1] = u;

    Ok(SteadyProfiles { depth, velocity })
}

/// Source coefficients of the decoupled characteristic system at one point,
/// `[g11, g12, g21, g22]`, from the steady state and its derivatives.
fn characteristic_source(model: &SaintVenantModel, h: f64, u: f64, dh: f64, du: f64) -> [f64; 4] {
    let g = model.gravity;
    let s = (g * h).sqrt();
    let l1 = u + s;
    let l2 = u - s;
    let fric = model.friction_eff() * u * u / (2.0 * h);
    let rterm = model.steady_rain / (2.0 * h * s);
    let minus = fric * (2.0 / u - 1.0 / s);
    let plus = fric * (2.0 / u + 1.0 / s);
    [
        du + (l1 + 2.0 * s) / (4.0 * h) * dh + minus - l2 * rterm,
        -(l1 - 2.0 * s) / (4.0 * h) * dh + plus + l1 * rterm,
        -(l2 + 2.0 * s) / (4.0 * h) * dh + minus - l2 * rterm,
        du + (l2 - 2.0 * s) / (4.0 * h) * dh + plus + l1 * rterm,
    ]
}

/// Linearizes the channel flow around a steady profile and emits the
/// characteristic-coordinate system: speeds `u* +- sqrt(g h*)`, the 2x2
/// source matrix, and the rainfall disturbance `(-l2/h*, -l1/h*) (R - R*)`.
pub fn linearize(
    model: &SaintVenantModel,
    steady: &SteadyProfiles,
    grid: &GridSpec,
) -> Result<SystemCoefficients> {
    let cells = grid.cells;
    let g = model.gravity;
    let mut lambda_plus = Vec::with_capacity(cells + 2);
    let mut lambda_minus = Vec::with_capacity(cells + 2);
    for j in -1..=cells as i64 {
        let h = steady.depth_at(j);
        let u = steady.velocity_at(j);
        let s = (g * h).sqrt();
        lambda_plus.push(u + s);
        lambda_minus.push(s - u);
    }

    let mut source = Vec::with_capacity(cells * 4);
    let mut pattern = Vec::with_capacity(cells * 2);
    for j in 0..cells {
        let h = steady.depth_at(j as i64);
        let u = steady.velocity_at(j as i64);
        let (dh, du) = model.steady_rhs(h, u, grid.center(j as i64))?;
        source.extend_from_slice(&characteristic_source(model, h, u, dh, du));
        let s = (g * h).sqrt();
        pattern.push((s - u) / h); // -lambda_2 / h*
        pattern.push(-(u + s) / h); // -lambda_1 / h*
    }

    let disturbance = match (&model.rain, model.steady_rain) {
        (TimeProfile::Zero, _) => Disturbance::zero(cells, 2),
        (profile, 0.0) => Disturbance::per_cell(cells, 2, pattern, profile.clone())?,
        _ => {
            return Err(Error::InvalidParameter(
                "rainfall deviation R - R* with non-zero R* is not representable".into(),
            ))
        }
    };
    SystemCoefficients::new(cells, 2, 1, lambda_plus, lambda_minus, source, disturbance)
}

/// Characteristic coordinates from physical perturbations:
/// `w1 = v2 + v1 sqrt(g/h*)`, `w2 = v2 - v1 sqrt(g/h*)`.
pub fn riemann_forward(v1: f64, v2: f64, h_star: f64, gravity: f64) -> (f64, f64) {
    let c = (gravity / h_star).sqrt();
    (v2 + v1 * c, v2 - v1 * c)
}

/// Inverse transform: `v1 = (1/2) sqrt(h*/g) (w1 - w2)`, `v2 = (w1 + w2)/2`.
pub fn riemann_backward(w1: f64, w2: f64, h_star: f64, gravity: f64) -> (f64, f64) {
    (0.5 * (h_star / gravity).sqrt() * (w1 - w2), 0.5 * (w1 + w2))
}

/// Maps the physical proportional gains `u = kappa h` at each end of the
/// channel to the characteristic feedback gains.
pub fn physical_feedback_to_k(
    kappa0: f64,
    kappal: f64,
    h_star_0: f64,
    h_star_l: f64,
    gravity: f64,
) -> Result<(f64, f64)> {
    let map = |kappa: f64, h: f64, end: &str| -> Result<f64> {
        let a = kappa * (h / gravity).sqrt();
        if (a - 1.0).abs() < 1e-12 {
            return Err(Error::SingularGain(format!(
                "kappa sqrt(h*/g) = 1 at x = {end} leaves the gain undefined"
            )));
        }
        Ok((a + 1.0) / (a - 1.0))
    };
    Ok((map(kappa0, h_star_0, "0")?, map(kappal, h_star_l, "l")?))
}

/// Everything `simulate` needs for the channel experiment.
#[derive(Debug, Clone)]
pub struct SvExperiment {
    pub grid: GridSpec,
    pub model: SaintVenantModel,
    pub steady: SteadyProfiles,
    pub coefficients: SystemCoefficients,
    pub feedback: FeedbackMatrix,
    pub weights: WeightSpec,
    pub initial: StateField,
    pub xi: f64,
    /// Admissible gain magnitudes `(|k12|_max, |k21|_max)` for reporting;
    /// exceeding them is allowed but voids the certificate.
    pub gain_bounds: (f64, f64),
}

/// Tunable physical parameters of the channel experiment. The default bed
/// slope balances friction exactly at the left-boundary data so the constant
/// profile is a genuine steady state.
#[derive(Debug, Clone)]
pub struct SvParams {
    pub gravity: f64,
    pub friction: f64,
    pub bed_slope: Option<f64>,
    pub rain_amplitude: f64,
    pub rain_cutoff: f64,
    pub depth_left: f64,
    pub velocity_left: f64,
    pub friction_with_g: bool,
    /// Weight constants `(p1, p2)`; defaults to `(g21, g12)` at the left
    /// boundary, which balances the off-diagonal source entries.
    pub weight_constants: Option<(f64, f64)>,
}

impl Default for SvParams {
    fn default() -> Self {
        SvParams {
            gravity: 9.81,
            friction: 0.1,
            bed_slope: None,
            rain_amplitude: 0.25,
            rain_cutoff: 5.0,
            depth_left: 2.0,
            velocity_left: 3.0,
            friction_with_g: false,
            weight_constants: None,
        }
    }
}

/// Assembles the channel experiment with the default physical parameters:
/// unit channel, depth 2 and velocity 3 at the left boundary, rainfall
/// `0.25 sin^2(pi t)` until `t = 5`, initial depth 2.5 and velocity
/// `4 sin(pi x)`.
pub fn sv_experiment(
    cells: usize,
    cfl: f64,
    final_time: f64,
    mu: f64,
    xi: f64,
    k12: f64,
    k21: f64,
) -> Result<SvExperiment> {
    sv_experiment_with(
        &SvParams::default(),
        cells,
        cfl,
        final_time,
        mu,
        xi,
        k12,
        k21,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn sv_experiment_with(
    params: &SvParams,
    cells: usize,
    cfl: f64,
    final_time: f64,
    mu: f64,
    xi: f64,
    k12: f64,
    k21: f64,
) -> Result<SvExperiment> {
    let (h0, u0) = (params.depth_left, params.velocity_left);
    let bed_slope = params
        .bed_slope
        .unwrap_or(params.friction * u0 * u0 / (params.gravity * h0));
    let model = SaintVenantModel {
        gravity: params.gravity,
        friction: params.friction,
        bed_slope,
        rain: if params.rain_amplitude == 0.0 {
            TimeProfile::Zero
        } else {
            TimeProfile::SineSquaredBurst {
                amplitude: params.rain_amplitude,
                cutoff: params.rain_cutoff,
            }
        },
        steady_rain: 0.0,
        friction_with_g: params.friction_with_g,
    };

    // The time step needs the fastest characteristic, which needs the steady
    // profile; integrate on a provisional grid first (dx depends only on J).
    let geometry = build_grid(1.0, cells, final_time, cfl, 1.0)?;
    let steady = steady_state_solve(&model, h0, u0, &geometry)?;
    let lambda_max = steady
        .depth
        .iter()
        .zip(&steady.velocity)
        .map(|(&h, &u)| {
            (u + (model.gravity * h).sqrt())
                .abs()
                .max((u - (model.gravity * h).sqrt()).abs())
        })
        .fold(0.0f64, f64::max);
    let grid = build_grid(1.0, cells, final_time, cfl, lambda_max)?;
    let coefficients = linearize(&model, &steady, &grid)?;

    let (p1, p2) = params.weight_constants.unwrap_or_else(|| {
        let (dh, du) = model
            .steady_rhs(h0, u0, 0.0)
            .expect("left boundary is sub-critical");
        let g = characteristic_source(&model, h0, u0, dh, du);
        (g[2], g[1])
    });
    let weights = WeightSpec::exponential_2x2(p1, p2, mu);
    let feedback = FeedbackMatrix::gains_2x2(k12, k21);

    let mut initial = StateField::zero(cells, 2, 1);
    for j in 0..cells {
        let x = grid.center(j as i64);
        let hs = steady.depth_at(j as i64);
        let us = steady.velocity_at(j as i64);
        let v1 = 2.5 - hs;
        let v2 = 4.0 * (std::f64::consts::PI * x).sin() - us;
        let (w1, w2) = riemann_forward(v1, v2, hs, model.gravity);
        initial.set(j, 0, w1);
        initial.set(j, 1, w2);
    }

    let realized = crate::weights::realize_weights(&weights, &grid, 2, 1)?;
    let gain_bounds = crate::stability::feedback_bounds(&coefficients, &realized)?;

    Ok(SvExperiment {
        grid,
        model,
        steady,
        coefficients,
        feedback,
        weights,
        initial,
        xi,
        gain_bounds,
    })
}

impl SvExperiment {
    pub fn run(&self, options: &SimulateOptions) -> Result<SimulationOutput> {
        simulate(
            &self.coefficients,
            &self.grid,
            &self.feedback,
            &self.initial,
            &self.weights,
            self.xi,
            options,
        )
    }
}
