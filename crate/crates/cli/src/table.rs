//! The grid-refinement comparison table: envelope-minus-Lyapunov norms and
//! the closed-form decay rate over `J = 200, 400, 800, 1600`.

use std::io::Write;

use hyplyap_core::{decay_rate_exponential, LyapunovSeries, SimulateOptions};

use crate::commands::{build_linear, CliError};
use crate::config::{ModelKind, RunConfig};

pub const TABLE_CELLS: [usize; 4] = [200, 400, 800, 1600];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableVariant {
    Cfl075,
    Cfl100,
}

impl TableVariant {
    pub fn cfl(&self) -> f64 {
        match self {
            TableVariant::Cfl075 => 0.75,
            TableVariant::Cfl100 => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TableVariant::Cfl075 => "cfl075",
            TableVariant::Cfl100 => "cfl100",
        }
    }
}

/// The decay rate printed in a table row: the closed-form bound at that
/// row's grid spacing (unit speeds, so `alpha = 1` and `dt = cfl dx`).
pub fn table_eta(cells: usize, cfl: f64, mu: f64, xi: f64) -> f64 {
    let dx = 1.0 / cells as f64;
    let dt = cfl * dx;
    decay_rate_exponential(mu, 1.0, xi, dt, dx)
}

/// Time norms of the envelope gap: `max_n |.|` and `sqrt(dt sum_n (.)^2)`.
pub fn envelope_gap_norms(series: &LyapunovSeries, dt: f64) -> (f64, f64) {
    let mut linf = 0.0f64;
    let mut sq = 0.0f64;
    for n in 0..series.len() {
        let gap = series.l_up[n] - series.l[n];
        linf = linf.max(gap.abs());
        sq += gap * gap;
    }
    (linf, (dt * sq).sqrt())
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub cells: usize,
    pub linf_diff: f64,
    pub l2_diff: f64,
    pub mu: f64,
    pub eta: f64,
}

pub fn table_row(cfg: &RunConfig, cells: usize) -> Result<TableRow, CliError> {
    let mut row_cfg = cfg.clone();
    row_cfg.cells = cells;
    row_cfg.model = ModelKind::Linear2x2;
    let built = build_linear(&row_cfg, cfg.mu)?;
    let result = built.simulate(&SimulateOptions::default())?;
    let (linf, l2) = envelope_gap_norms(&result.series, built.grid.dt);
    Ok(TableRow {
        cells,
        linf_diff: linf,
        l2_diff: l2,
        mu: cfg.mu,
        eta: table_eta(cells, cfg.cfl, cfg.mu, cfg.xi),
    })
}

/// `table`: run the four grids of one variant (or a `custom-table` config)
/// and emit the comparison columns.
pub fn cmd_table(
    variant: TableVariant,
    custom: Option<&RunConfig>,
    markdown: bool,
    out: &mut dyn Write,
) -> Result<Vec<TableRow>, CliError> {
    let cfg = match custom {
        Some(cfg) => cfg.clone(),
        None => {
            let mut cfg = RunConfig {
                cfl: variant.cfl(),
                ..Default::default()
            };
            cfg.k12 = Some(0.5);
            cfg.k21 = Some(0.5);
            cfg
        }
    };
    let rows: Vec<TableRow> = TABLE_CELLS
        .iter()
        .map(|&cells| table_row(&cfg, cells))
        .collect::<Result<_, _>>()?;

    if markdown {
        writeln!(out, "| J | Linf_diff | L2_diff | mu | eta |")?;
        writeln!(out, "|---|-----------|---------|----|-----|")?;
        for r in &rows {
            writeln!(
                out,
                "| {} | {:.5} | {:.5} | {:.3} | {:.5} |",
                r.cells, r.linf_diff, r.l2_diff, r.mu, r.eta
            )?;
        }
    } else {
        writeln!(
            out,
            "# hyplyap table: variant = {}, cfl = {}, T = {}, xi = {}, mu = {}, k12 = {:?}, k21 = {:?}, amp = {}",
            if custom.is_some() { "custom" } else { variant.name() },
            cfg.cfl,
            cfg.final_time,
            cfg.xi,
            cfg.mu,
            cfg.k12.unwrap_or(0.5),
            cfg.k21.unwrap_or(0.5),
            cfg.amp
        )?;
        writeln!(out, "# norms: max_n / sqrt(dt*sum)")?;
        writeln!(out, "J,Linf_diff,L2_diff,mu,eta")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.cells, r.linf_diff, r.l2_diff, r.mu, r.eta
            )?;
        }
    }
    Ok(rows)
}
