//! Time loop, diagnostics cadence and per-run output.

use std::fs;
use std::path::PathBuf;

use super::cases::TestCase;
use super::config::{ExperimentConfig, SchemeId};
use super::output::{FieldMapRow, PartialCsv, TimeseriesRow};
use crate::ader::{ader_step, clip_dt, AderTableau};
use crate::analysis::{
    divergence_norm, energy_density_map, l1_error, magnetic_energy, DivergenceNorm, ElementwiseField,
};
use crate::ctsd::{CtsdScheme, VelocityField};
use crate::error::{Error, Result};
use crate::grid::{ElementGrid, ModalDGField, StaggeredField, StateVector};
use crate::rkdg::{CleaningParams, DgScheme, DgVariant};

/// Subcells per direction of the initial DG projection; 1 is the plain
/// element Gauss rule.
pub const PROJECTION_SUBCELLS: usize = 1;

/// A scheme together with its current and initial state.
pub enum Solver {
    Ctsd {
        scheme: CtsdScheme,
        tableau: AderTableau,
        b: StaggeredField,
        b0: StaggeredField,
    },
    Dg {
        scheme: DgScheme,
        u: ModalDGField,
        u0: ModalDGField,
    },
}

fn speed_bound(velocity: &VelocityField, grid: &ElementGrid) -> f64 {
    match velocity {
        VelocityField::Constant(vx, vy) => vx.hypot(*vy),
        _ => {
            let (x0, x1, y0, y1) = grid.domain();
            [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
                .iter()
                .map(|&(x, y)| {
                    let v = velocity.eval(x, y);
                    v[0].hypot(v[1])
                })
                .fold(0.0, f64::max)
        }
    }
}

impl Solver {
    pub fn new(config: &ExperimentConfig, case: &TestCase) -> Result<Self> {
        config.validate()?;
        let grid = ElementGrid::new(config.elements, config.elements, (0.0, 1.0, 0.0, 1.0), case.boundary)?;
        let n = config.degree;
        match config.scheme.dg_variant() {
            None => {
                let scheme = CtsdScheme::new(grid, n, case.velocity.clone(), case.exact.clone())?;
                let tableau = AderTableau::new(n)?;
                let (_, b) = scheme.init_from_potential(&case.potential);
                Ok(Solver::Ctsd {
                    scheme,
                    tableau,
                    b0: b.clone(),
                    b,
                })
            }
            Some(variant) => {
                let cleaning = if variant == DgVariant::DivClean {
                    let c_h = config.c_h.unwrap_or(2.0 * speed_bound(&case.velocity, &grid));
                    let c_p2 = config.c_p2.unwrap_or(0.8 * c_h * grid.dx());
                    Some(CleaningParams::new(c_h, c_p2)?)
                } else {
                    None
                };
                let scheme = DgScheme::new(grid, n, variant, case.velocity.clone(), cleaning)?;
                let u = scheme.project(case.field.as_ref(), PROJECTION_SUBCELLS)?;
                Ok(Solver::Dg {
                    scheme,
                    u0: u.clone(),
                    u,
                })
            }
        }
    }

    pub fn view(&self) -> Box<dyn ElementwiseField + '_> {
        match self {
            Solver::Ctsd { scheme, b, .. } => Box::new(scheme.view(b)),
            Solver::Dg { scheme, u, .. } => Box::new(scheme.view(u)),
        }
    }

    fn initial_view(&self) -> Box<dyn ElementwiseField + '_> {
        match self {
            Solver::Ctsd { scheme, b0, .. } => Box::new(scheme.view(b0)),
            Solver::Dg { scheme, u0, .. } => Box::new(scheme.view(u0)),
        }
    }

    pub fn grid(&self) -> &ElementGrid {
        match self {
            Solver::Ctsd { scheme, .. } => scheme.grid(),
            Solver::Dg { scheme, .. } => scheme.grid(),
        }
    }

    pub fn stable_dt(&self, courant: f64) -> Result<f64> {
        match self {
            Solver::Ctsd { scheme, .. } => scheme.stable_dt(courant),
            Solver::Dg { scheme, .. } => scheme.stable_dt(courant),
        }
    }

    pub fn advance(&mut self, t: f64, dt: f64) -> Result<()> {
        match self {
            Solver::Ctsd {
                scheme, tableau, b, ..
            } => {
                *b = ader_step(b, t, dt, scheme, tableau)?;
            }
            Solver::Dg { scheme, u, .. } => {
                *u = scheme.step(u, t, dt)?;
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        let data = match self {
            Solver::Ctsd { b, .. } => b.as_slice(),
            Solver::Dg { u, .. } => u.as_slice(),
        };
        data.iter().all(|v| v.is_finite())
    }

    pub fn energy(&self) -> f64 {
        magnetic_energy(self.view().as_ref())
    }

    pub fn divergence(&self) -> DivergenceNorm {
        divergence_norm(self.view().as_ref())
    }

    /// Control-volume L1 distance to the initial discrete state.
    pub fn l1_from_initial(&self) -> Result<[f64; 2]> {
        l1_error(self.view().as_ref(), self.initial_view().as_ref())
    }

    pub fn staggered(&self) -> Option<&StaggeredField> {
        match self {
            Solver::Ctsd { b, .. } => Some(b),
            Solver::Dg { .. } => None,
        }
    }

    pub fn modal(&self) -> Option<&ModalDGField> {
        match self {
            Solver::Ctsd { .. } => None,
            Solver::Dg { u, .. } => Some(u),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub rows: Vec<TimeseriesRow>,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub steps: usize,
    pub t: f64,
    /// Control-volume L1 distance between the final and initial states.
    pub l1: [f64; 2],
    pub timeseries: PathBuf,
    pub fieldmap: Option<PathBuf>,
}

fn numerical_failure(e: Error, step: usize, t: f64) -> Error {
    match e {
        Error::Divergence { .. } | Error::Numerical(_) => Error::NonFinite { step, t },
        other => other,
    }
}

/// Run one experiment and write `timeseries.csv` and `fieldmap.csv` to the
/// configured output directory.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    run_with(config, true)
}

pub fn run_with(config: &ExperimentConfig, write_fieldmap: bool) -> Result<RunOutcome> {
    config.validate()?;
    let case = TestCase::new(config.test);
    let mut solver = Solver::new(config, &case)?;
    let t_final = config.t_final();
    let dt_stable = solver.stable_dt(config.cfl)?;

    fs::create_dir_all(&config.outdir)?;
    let mut series = PartialCsv::create(config.outdir.join("timeseries.csv"))?;

    let initial_energy = solver.energy();
    let scale = if initial_energy > 0.0 { initial_energy } else { 1.0 };
    let peak_density = energy_density_map(solver.view().as_ref())
        .iter()
        .map(|c| c.energy_density)
        .fold(0.0, f64::max);

    let mut rows = Vec::new();
    let mut record = |step: usize, t: f64, dt: f64, solver: &Solver, series: &mut PartialCsv| -> Result<()> {
        let d = solver.divergence();
        let row = TimeseriesRow {
            step,
            t,
            dt,
            energy: solver.energy() / scale,
            div_surface: d.surface,
            div_volume: d.volume,
        };
        series.write(&row)?;
        rows.push(row);
        Ok(())
    };
    record(0, 0.0, 0.0, &solver, &mut series)?;

    let mut t = 0.0;
    let mut step = 0;
    let mut next_diag = config.diag_dt;
    while t < t_final {
        let target = next_diag.map_or(t_final, |d| d.min(t_final));
        let dt = clip_dt(dt_stable, t, target);
        let lands = dt != dt_stable || t + dt >= target;
        solver
            .advance(t, dt)
            .map_err(|e| numerical_failure(e, step + 1, t))?;
        step += 1;
        t = if lands { target } else { t + dt };
        if !solver.is_finite() {
            return Err(Error::NonFinite { step, t });
        }
        let mut due = step % config.diag_interval == 0 || t >= t_final;
        if let (Some(d), Some(next)) = (config.diag_dt, next_diag) {
            if t >= next {
                due = true;
                next_diag = Some(next + d);
            }
        }
        if due {
            record(step, t, dt, &solver, &mut series)?;
        }
    }
    let timeseries = series.finish()?;

    let fieldmap = if write_fieldmap {
        let norm = if peak_density > 0.0 { peak_density } else { 1.0 };
        let cells: Vec<FieldMapRow> = energy_density_map(solver.view().as_ref())
            .into_iter()
            .map(|c| FieldMapRow {
                i: c.i,
                j: c.j,
                x_center: c.x_center,
                y_center: c.y_center,
                energy_density_normalized: c.energy_density / norm,
            })
            .collect();
        Some(super::output::write_csv(config.outdir.join("fieldmap.csv"), &cells)?)
    } else {
        None
    };

    let final_energy = solver.energy();
    Ok(RunOutcome {
        config: config.clone(),
        rows,
        initial_energy,
        final_energy,
        steps: step,
        t,
        l1: solver.l1_from_initial()?,
        timeseries,
        fieldmap,
    })
}

/// Short label of a run, used for output subdirectories.
pub fn run_label(scheme: SchemeId, n: usize, cells: usize) -> String {
    format!("{}_n{}_N{}", scheme.name(), n, cells)
}
