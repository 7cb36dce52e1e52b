//! Uniform space-time grid with a CFL-constrained time step.

use crate::error::{Error, Result};

/// A uniform grid on `[0, length]` with `cells` finite-volume cells and a time
/// step chosen so that `dt * lambda_max / dx = cfl <= 1`.
///
/// Cell centres are `x_j = (j + 1/2) dx` for `j = 0..cells-1`; the ghost
/// centres `x_{-1} = -dx/2` and `x_J = length + dx/2` continue the same
/// spacing one cell beyond each boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub length: f64,
    pub cells: usize,
    pub final_time: f64,
    pub cfl: f64,
    pub lambda_max: f64,
    pub dx: f64,
    pub dt: f64,
    /// Step count `N = ceil(final_time / dt)`; the last step may overshoot
    /// `final_time` by less than `dt`.
    pub steps: usize,
}

pub fn build_grid(
    length: f64,
    cells: usize,
    final_time: f64,
    cfl: f64,
    lambda_max: f64,
) -> Result<GridSpec> {
    if !(length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "domain length must be positive, got {length}"
        )));
    }
    if cells < 2 {
        return Err(Error::InvalidParameter(format!(
            "cell count must be at least 2, got {cells}"
        )));
    }
    if !(final_time > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "final time must be positive, got {final_time}"
        )));
    }
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Courant ratio must lie in (0, 1], got {cfl}"
        )));
    }
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "maximum speed must be positive, got {lambda_max}"
        )));
    }

    let dx = length / cells as f64;
    let dt = cfl * dx / lambda_max;
    let steps = (final_time / dt).ceil() as usize;
    Ok(GridSpec {
        length,
        cells,
        final_time,
        cfl,
        lambda_max,
        dx,
        dt,
        steps,
    })
}

impl GridSpec {
    /// Cell centre `x_j`. Accepts the ghost indices `-1` and `cells`.
    #[inline]
    pub fn center(&self, j: i64) -> f64 {
        // (2j+1) is exact in f64 for any realistic j, so the centre is a
        // single rounding of the closed form (j + 1/2) dx.
        (2 * j + 1) as f64 * (0.5 * self.dx)
    }

    #[inline]
    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    /// The time actually reached after all steps, `t^N = N dt >= final_time`.
    pub fn reached_time(&self) -> f64 {
        self.time(self.steps)
    }

    /// Courant number `dt * lambda_max / dx`.
    pub fn courant(&self) -> f64 {
        self.dt * self.lambda_max / self.dx
    }
}
