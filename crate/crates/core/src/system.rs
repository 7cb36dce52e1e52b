//! Coefficients, disturbances, feedback gains and state storage for the
//! discretised hyperbolic system.
//!
//! Speeds follow the sign convention of the transport matrix
//! `diag{L+, -L-}`: the first `m` components travel rightward with positive
//! speeds `lambda_plus`, the remaining `k - m` travel leftward and only their
//! positive magnitudes `lambda_minus` are stored.

use crate::error::{Error, Result};
use crate::grid::{build_grid, GridSpec};

/// Scalar time profile shared by all disturbance components.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeProfile {
    Zero,
    /// `amplitude * sin^2(pi t)` for `t < cutoff`, zero afterwards.
    SineSquaredBurst {
        amplitude: f64,
        cutoff: f64,
    },
}

impl TimeProfile {
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Zero => 0.0,
            TimeProfile::SineSquaredBurst { amplitude, cutoff } => {
                if t < *cutoff {
                    let s = (std::f64::consts::PI * t).sin();
                    amplitude * s * s
                } else {
                    0.0
                }
            }
        }
    }
}

/// Additive disturbance sampled at cell centres: `Psi_j(t) = profile(t) * pattern_j`.
#[derive(Debug, Clone)]
pub struct Disturbance {
    profile: TimeProfile,
    /// `cells x k` row-major spatial pattern.
    pattern: Vec<f64>,
    components: usize,
}

impl Disturbance {
    pub fn zero(cells: usize, components: usize) -> Self {
        Disturbance {
            profile: TimeProfile::Zero,
            pattern: vec![0.0; cells * components],
            components,
        }
    }

    /// Same component pattern in every cell.
    pub fn uniform(cells: usize, component_pattern: &[f64], profile: TimeProfile) -> Self {
        let mut pattern = Vec::with_capacity(cells * component_pattern.len());
        for _ in 0..cells {
            pattern.extend_from_slice(component_pattern);
        }
        Disturbance {
            profile,
            pattern,
            components: component_pattern.len(),
        }
    }

    pub fn per_cell(
        cells: usize,
        components: usize,
        pattern: Vec<f64>,
        profile: TimeProfile,
    ) -> Result<Self> {
        if pattern.len() != cells * components {
            return Err(Error::InvalidParameter(format!(
                "disturbance pattern has {} entries, expected {}",
                pattern.len(),
                cells * components
            )));
        }
        Ok(Disturbance {
            profile,
            pattern,
            components,
        })
    }

    #[inline]
    pub fn factor(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }

    #[inline]
    pub fn pattern(&self, cell: usize) -> &[f64] {
        let k = self.components;
        &self.pattern[cell * k..(cell + 1) * k]
    }

    /// `Psi` of component `i` in `cell` at time `t`.
    #[inline]
    pub fn sample(&self, cell: usize, i: usize, t: f64) -> f64 {
        self.factor(t) * self.pattern[cell * self.components + i]
    }

    /// `dx * sum_j |Psi_j(t)|^2`, the per-step forcing sum entering the
    /// running disturbance supremum.
    pub fn forcing_sum(&self, t: f64, dx: f64) -> f64 {
        let g = self.factor(t);
        if g == 0.0 {
            return 0.0;
        }
        let sq: f64 = self.pattern.iter().map(|p| p * p).sum();
        dx * g * g * sq
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.profile, TimeProfile::Zero) || self.pattern.iter().all(|&p| p == 0.0)
    }
}

/// Sampled transport speeds and source matrix for one discretised system.
///
/// Speed arrays cover the ghost indices `-1..=cells`; the source matrix is
/// stored per interior cell only.
#[derive(Debug, Clone)]
pub struct SystemCoefficients {
    components: usize,
    positive: usize,
    cells: usize,
    /// `(cells + 2) x m`, row `j + 1` holds the speeds at grid index `j`.
    lambda_plus: Vec<f64>,
    /// `(cells + 2) x (k - m)` positive magnitudes of the negative speeds.
    lambda_minus: Vec<f64>,
    /// `cells x k x k` row-major source matrices.
    source: Vec<f64>,
    pub disturbance: Disturbance,
}

impl SystemCoefficients {
    pub fn new(
        cells: usize,
        components: usize,
        positive: usize,
        lambda_plus: Vec<f64>,
        lambda_minus: Vec<f64>,
        source: Vec<f64>,
        disturbance: Disturbance,
    ) -> Result<Self> {
        let negative = components - positive;
        if positive > components {
            return Err(Error::InvalidParameter(format!(
                "positive component count {positive} exceeds total {components}"
            )));
        }
        if lambda_plus.len() != (cells + 2) * positive {
            return Err(Error::InvalidParameter(format!(
                "lambda_plus has {} entries, expected {}",
                lambda_plus.len(),
                (cells + 2) * positive
            )));
        }
        if lambda_minus.len() != (cells + 2) * negative {
            return Err(Error::InvalidParameter(format!(
                "lambda_minus has {} entries, expected {}",
                lambda_minus.len(),
                (cells + 2) * negative
            )));
        }
        if source.len() != cells * components * components {
            return Err(Error::InvalidParameter(format!(
                "source matrix storage has {} entries, expected {}",
                source.len(),
                cells * components * components
            )));
        }
        if lambda_plus
            .iter()
            .chain(lambda_minus.iter())
            .any(|&l| !(l > 0.0))
        {
            return Err(Error::InvalidParameter(
                "all stored characteristic speeds must be strictly positive magnitudes".into(),
            ));
        }
        Ok(SystemCoefficients {
            components,
            positive,
            cells,
            lambda_plus,
            lambda_minus,
            source,
            disturbance,
        })
    }

    /// Constant speeds in every cell (including ghosts), `k = 2`, `m = 1`.
    pub fn constant_2x2(
        cells: usize,
        lambda_plus: f64,
        lambda_minus_mag: f64,
        source_2x2: [f64; 4],
        disturbance: Disturbance,
    ) -> Result<Self> {
        let mut source = Vec::with_capacity(cells * 4);
        for _ in 0..cells {
            source.extend_from_slice(&source_2x2);
        }
        SystemCoefficients::new(
            cells,
            2,
            1,
            vec![lambda_plus; cells + 2],
            vec![lambda_minus_mag; cells + 2],
            source,
            disturbance,
        )
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    pub fn positive(&self) -> usize {
        self.positive
    }

    #[inline]
    pub fn negative(&self) -> usize {
        self.components - self.positive
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Positive-speed component `i` at grid index `j` in `-1..=cells`.
    #[inline]
    pub fn lambda_plus(&self, j: i64, i: usize) -> f64 {
        self.lambda_plus[(j + 1) as usize * self.positive + i]
    }

    /// Magnitude of negative-speed component `i` at grid index `j` in `-1..=cells`.
    #[inline]
    pub fn lambda_minus(&self, j: i64, i: usize) -> f64 {
        self.lambda_minus[(j + 1) as usize * self.negative() + i]
    }

    /// `k x k` source matrix of interior cell `j`.
    #[inline]
    pub fn source(&self, j: usize) -> &[f64] {
        let k = self.components;
        &self.source[j * k * k..(j + 1) * k * k]
    }

    /// Largest speed magnitude over all components and indices.
    pub fn max_speed(&self) -> f64 {
        self.lambda_plus
            .iter()
            .chain(self.lambda_minus.iter())
            .fold(0.0f64, |a, &b| a.max(b))
    }

    /// Smallest speed magnitude over all components and indices.
    pub fn min_speed(&self) -> f64 {
        self.lambda_plus
            .iter()
            .chain(self.lambda_minus.iter())
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn source_is_zero(&self) -> bool {
        self.source.iter().all(|&g| g == 0.0)
    }
}

/// Boundary feedback gains mapping outgoing traces to incoming ghosts:
/// the full matrix is `[[0, k_minus], [k_plus, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackMatrix {
    positive: usize,
    negative: usize,
    /// `m x (k - m)` block feeding the left ghost from the right-moving exit trace.
    k_minus: Vec<f64>,
    /// `(k - m) x m` block feeding the right ghost.
    k_plus: Vec<f64>,
}

impl FeedbackMatrix {
    pub fn new(
        positive: usize,
        negative: usize,
        k_minus: Vec<f64>,
        k_plus: Vec<f64>,
    ) -> Result<Self> {
        if k_minus.len() != positive * negative || k_plus.len() != negative * positive {
            return Err(Error::InvalidParameter(format!(
                "feedback blocks sized {} and {} do not match m = {positive}, k - m = {negative}",
                k_minus.len(),
                k_plus.len()
            )));
        }
        Ok(FeedbackMatrix {
            positive,
            negative,
            k_minus,
            k_plus,
        })
    }

    pub fn zero(positive: usize, negative: usize) -> Self {
        FeedbackMatrix {
            positive,
            negative,
            k_minus: vec![0.0; positive * negative],
            k_plus: vec![0.0; negative * positive],
        }
    }

    /// Scalar gains for the `k = 2`, `m = 1` system.
    pub fn gains_2x2(k12: f64, k21: f64) -> Self {
        FeedbackMatrix {
            positive: 1,
            negative: 1,
            k_minus: vec![k12],
            k_plus: vec![k21],
        }
    }

    #[inline]
    pub fn positive(&self) -> usize {
        self.positive
    }

    #[inline]
    pub fn negative(&self) -> usize {
        self.negative
    }

    #[inline]
    pub fn k_minus(&self) -> &[f64] {
        &self.k_minus
    }

    #[inline]
    pub fn k_plus(&self) -> &[f64] {
        &self.k_plus
    }

    /// Dense `k x k` assembly `[[0, k_minus], [k_plus, 0]]`.
    pub fn assemble(&self) -> Vec<f64> {
        let (m, p) = (self.positive, self.negative);
        let k = m + p;
        let mut full = vec![0.0; k * k];
        for r in 0..m {
            for c in 0..p {
                full[r * k + (m + c)] = self.k_minus[r * p + c];
            }
        }
        for r in 0..p {
            for c in 0..m {
                full[(m + r) * k + c] = self.k_plus[r * m + c];
            }
        }
        full
    }

    /// Ghost traces `(W+_{-1}, W-_J)` from the outgoing traces
    /// `W+_{J-1}` and `W-_0`.
    pub fn ghosts(&self, exit_plus: &[f64], exit_minus: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (m, p) = (self.positive, self.negative);
        let left = (0..m)
            .map(|r| {
                (0..p)
                    .map(|c| self.k_minus[r * p + c] * exit_minus[c])
                    .sum()
            })
            .collect();
        let right = (0..p)
            .map(|r| (0..m).map(|c| self.k_plus[r * m + c] * exit_plus[c]).sum())
            .collect();
        (left, right)
    }
}

/// Cell-averaged state at one time level, plus the two ghost traces.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    components: usize,
    positive: usize,
    cells: usize,
    /// `cells x k` row-major interior values.
    values: Vec<f64>,
    /// `W+` at grid index `-1` (length `m`).
    pub ghost_left: Vec<f64>,
    /// `W-` at grid index `cells` (length `k - m`).
    pub ghost_right: Vec<f64>,
}

impl StateField {
    pub fn zero(cells: usize, components: usize, positive: usize) -> Self {
        StateField {
            components,
            positive,
            cells,
            values: vec![0.0; cells * components],
            ghost_left: vec![0.0; positive],
            ghost_right: vec![0.0; components - positive],
        }
    }

    /// Sample a componentwise profile at the cell centres.
    pub fn from_profile(
        grid: &GridSpec,
        components: usize,
        positive: usize,
        profile: impl Fn(f64) -> Vec<f64>,
    ) -> Self {
        let mut values = Vec::with_capacity(grid.cells * components);
        for j in 0..grid.cells {
            let v = profile(grid.center(j as i64));
            debug_assert_eq!(v.len(), components);
            values.extend_from_slice(&v);
        }
        StateField {
            components,
            positive,
            cells: grid.cells,
            values,
            ghost_left: vec![0.0; positive],
            ghost_right: vec![0.0; components - positive],
        }
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    pub fn positive(&self) -> usize {
        self.positive
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.cells
    }

    #[inline]
    pub fn get(&self, cell: usize, i: usize) -> f64 {
        self.values[cell * self.components + i]
    }

    #[inline]
    pub fn set(&mut self, cell: usize, i: usize, v: f64) {
        self.values[cell * self.components + i] = v;
    }

    #[inline]
    pub fn cell(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.components..(cell + 1) * self.components]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Outgoing traces fed to the feedback matrix: `W+_{J-1}` and `W-_0`.
    pub fn exit_traces(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.positive;
        let plus = self.cell(self.cells - 1)[..m].to_vec();
        let minus = self.cell(0)[m..].to_vec();
        (plus, minus)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    /// Unweighted discrete energy `dx * sum_j |W_j|^2` over interior cells.
    pub fn l2_norm_sq(&self, dx: f64) -> f64 {
        dx * self.values.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Inputs for one fully assembled run: grid, coefficients, feedback and
/// initial data.
#[derive(Debug, Clone)]
pub struct LinearExample {
    pub grid: GridSpec,
    pub coefficients: SystemCoefficients,
    pub feedback: FeedbackMatrix,
    pub initial: StateField,
}

/// The built-in non-uniform 2x2 test system on `[0, 1]`: unit speeds
/// `+1 / -1`, zero source, initial data `(-0.5, 0.5)` and the antisymmetric
/// disturbance `(psi, -psi)` with `psi = amp * sin^2(pi t)` switched off at
/// `t = 5`.
pub fn linear_example(
    cells: usize,
    cfl: f64,
    final_time: f64,
    k12: f64,
    k21: f64,
    amp: f64,
) -> Result<LinearExample> {
    if amp < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "disturbance amplitude must be non-negative, got {amp}"
        )));
    }
    let grid = build_grid(1.0, cells, final_time, cfl, 1.0)?;
    let profile = if amp == 0.0 {
        TimeProfile::Zero
    } else {
        TimeProfile::SineSquaredBurst {
            amplitude: amp,
            cutoff: 5.0,
        }
    };
    let disturbance = Disturbance::uniform(cells, &[1.0, -1.0], profile);
    let coefficients = SystemCoefficients::constant_2x2(cells, 1.0, 1.0, [0.0; 4], disturbance)?;
    let feedback = FeedbackMatrix::gains_2x2(k12, k21);
    let initial = StateField::from_profile(&grid, 2, 1, |_| vec![-0.5, 0.5]);
    Ok(LinearExample {
        grid,
        coefficients,
        feedback,
        initial,
    })
}
