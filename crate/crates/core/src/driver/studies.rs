//! Multi-run studies and the Fourier-analysis tables.

use std::path::{Path, PathBuf};

use super::cases::TestCaseId;
use super::config::{ExperimentConfig, SchemeId};
use super::output::{write_csv, DispersionRow, ErrorRow, FixedDofRow, StabilityRow, SummaryRow};
use super::run::{run, run_label, run_with, RunOutcome};
use crate::analysis::dispersion::{dispersion_relation, k_samples};
use crate::analysis::observed_order;
use crate::analysis::stability::amplification_grid;
use crate::error::{Error, Result};

/// Settings shared by every run of a study.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyOptions {
    pub outdir: PathBuf,
    pub cfl: f64,
    pub t_final: Option<f64>,
    pub diag_interval: usize,
    pub diag_dt: Option<f64>,
}

impl StudyOptions {
    pub fn new(outdir: impl Into<PathBuf>) -> Self {
        Self {
            outdir: outdir.into(),
            cfl: 0.8,
            t_final: None,
            diag_interval: 10,
            diag_dt: None,
        }
    }

    fn config(&self, test: TestCaseId, scheme: SchemeId, n: usize, cells: usize, dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            t_final: self.t_final,
            cfl: self.cfl,
            outdir: dir.to_path_buf(),
            diag_interval: self.diag_interval,
            diag_dt: self.diag_dt,
            ..ExperimentConfig::new(test, scheme, n, cells)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonSuite {
    pub runs: Vec<RunOutcome>,
    pub summary: PathBuf,
}

/// Loop test with all four schemes at every degree; one directory per run
/// plus a merged `summary.csv`.
pub fn run_comparison_suite(degrees: &[usize], cells: usize, opts: &StudyOptions) -> Result<ComparisonSuite> {
    if let Some(&n) = degrees.iter().find(|&&n| n > 3) {
        return Err(Error::UnsupportedOrder(n));
    }
    let configs: Vec<ExperimentConfig> = degrees
        .iter()
        .flat_map(|&n| {
            SchemeId::ALL.into_iter().map(move |s| (s, n))
        })
        .map(|(s, n)| {
            let dir = opts.outdir.join(run_label(s, n, cells));
            opts.config(TestCaseId::Loop, s, n, cells, &dir)
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let mut runs = Vec::with_capacity(configs.len());
    let mut summary = Vec::new();
    for c in &configs {
        let outcome = run(c)?;
        summary.extend(outcome.rows.iter().map(|r| SummaryRow {
            scheme: c.scheme.name().to_string(),
            n: c.degree,
            step: r.step,
            t: r.t,
            dt: r.dt,
            energy: r.energy,
            div_surface: r.div_surface,
            div_volume: r.div_volume,
        }));
        runs.push(outcome);
    }
    let summary = write_csv(opts.outdir.join("summary.csv"), &summary)?;
    Ok(ComparisonSuite { runs, summary })
}

/// Loop test with `(n + 1) N = dof` for every degree.
pub fn run_fixed_dof_study(dof: usize, degrees: &[usize], scheme: SchemeId, opts: &StudyOptions) -> Result<Vec<FixedDofRow>> {
    for &n in degrees {
        if dof == 0 || dof % (n + 1) != 0 {
            return Err(Error::Config(format!(
                "{dof} degrees of freedom cannot be split into elements of degree {n}"
            )));
        }
    }
    let mut rows = Vec::new();
    for &n in degrees {
        let cells = dof / (n + 1);
        let dir = opts.outdir.join(run_label(scheme, n, cells));
        let mut config = opts.config(TestCaseId::Loop, scheme, n, cells, &dir);
        config.t_final = Some(opts.t_final.unwrap_or(1.0));
        let outcome = run(&config)?;
        rows.push(FixedDofRow {
            n,
            cells,
            t: outcome.t,
            energy: outcome.final_energy / outcome.initial_energy,
        });
    }
    write_csv(opts.outdir.join("fixed_dof.csv"), &rows)?;
    Ok(rows)
}

/// Smooth-field convergence: L1 distance to the initial state after one
/// period, for every degree and resolution, written to `errors.csv`.
pub fn run_convergence(
    scheme: SchemeId,
    degrees: &[usize],
    cells: &[usize],
    opts: &StudyOptions,
) -> Result<Vec<ErrorRow>> {
    if cells.is_empty() || degrees.is_empty() {
        return Err(Error::Config("convergence needs degrees and resolutions".into()));
    }
    let mut rows = Vec::new();
    for &n in degrees {
        let mut previous: Option<(usize, [f64; 2])> = None;
        for &m in cells {
            let dir = opts.outdir.join(run_label(scheme, n, m));
            let outcome = run_with(&opts.config(TestCaseId::Smooth, scheme, n, m, &dir), false)?;
            let order = |c: usize| {
                previous.map(|(pm, pe)| (pe[c] / outcome.l1[c]).log2() / (m as f64 / pm as f64).log2())
            };
            rows.push(ErrorRow {
                n,
                cells: m,
                dx: 1.0 / m as f64,
                l1_bx: outcome.l1[0],
                l1_by: outcome.l1[1],
                order_bx: order(0),
                order_by: order(1),
            });
            previous = Some((m, outcome.l1));
        }
    }
    write_csv(opts.outdir.join("errors.csv"), &rows)?;
    Ok(rows)
}

/// Least-squares order of the `Bx` errors of degree `n`.
pub fn fitted_order(rows: &[ErrorRow], n: usize) -> Option<f64> {
    let (cells, errors): (Vec<usize>, Vec<f64>) =
        rows.iter().filter(|r| r.n == n).map(|r| (r.cells, r.l1_bx)).unzip();
    observed_order(&cells, &errors)
}

/// Physical dispersion branch of every degree on `samples` wave numbers.
pub fn write_dispersion(degrees: &[usize], samples: usize, dx: f64, v: f64, path: &Path) -> Result<Vec<DispersionRow>> {
    let mut rows = Vec::new();
    for &n in degrees {
        let ks = k_samples(n, dx, samples);
        let branch = dispersion_relation(n, &ks, dx, v)?;
        rows.extend(branch.k.iter().zip(&branch.omega).map(|(&k, w)| DispersionRow {
            n,
            k,
            re_omega: w.re,
            im_omega: w.im,
        }));
    }
    write_csv(path, &rows)?;
    Ok(rows)
}

/// Inclusive, evenly spaced samples.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// `|P(z)|` of the ADER integrator on a rectangle of the complex plane.
pub fn write_stability_region(
    degrees: &[usize],
    re: (f64, f64),
    im: (f64, f64),
    resolution: usize,
    path: &Path,
) -> Result<Vec<StabilityRow>> {
    if resolution < 2 {
        return Err(Error::Config("stability grid needs at least 2 points per axis".into()));
    }
    let res = linspace(re.0, re.1, resolution);
    let ims = linspace(im.0, im.1, resolution);
    let mut rows = Vec::new();
    for &n in degrees {
        rows.extend(amplification_grid(n, &res, &ims)?.into_iter().map(|(x, y, p)| StabilityRow {
            n,
            re_z: x,
            im_z: y,
            abs_p: p,
        }));
    }
    write_csv(path, &rows)?;
    Ok(rows)
}
