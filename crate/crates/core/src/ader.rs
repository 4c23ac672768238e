//! ADER time integration: a Galerkin projection in time on `n+1` Gauss
//! nodes, solved with exactly `n` Picard corrections, followed by a
//! quadrature update.

use nalgebra::DMatrix;

use crate::basis::{LagrangeBasis, TimeQuadrature};
use crate::error::{Error, Result};
use crate::grid::{ElementGrid, StateVector};

/// Semi-discrete operator `du/dt = L(u, t)`.
///
/// `rhs` may overwrite ghost data of `u` before evaluating.
pub trait RhsOperator<S> {
    fn rhs(&self, u: &mut S, t: f64, out: &mut S) -> Result<()>;

    /// Autonomous operators are evaluated once per step for the initial
    /// predictor instead of once per time node.
    fn is_autonomous(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug)]
pub struct AderTableau {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    start_values: Vec<f64>,
    end_values: Vec<f64>,
    mass: DMatrix<f64>,
    mass_inv: DMatrix<f64>,
    /// `picard[(i, j)] = mass_inv[(i, j)] * weights[j]`.
    picard: DMatrix<f64>,
}

impl AderTableau {
    pub fn new(n: usize) -> Result<Self> {
        let quad = TimeQuadrature::new(n)?;
        let nodes = quad.nodes().to_vec();
        let weights = quad.weights().to_vec();
        let basis = LagrangeBasis::new(nodes.clone())?;
        let start_values = basis.values_at(0.0);
        let end_values = basis.values_at(1.0);
        let deriv = basis.deriv_matrix(&nodes);
        let m = n + 1;
        let mut mass = DMatrix::zeros(m, m);
        for j in 0..m {
            for i in 0..m {
                mass[(j, i)] = end_values[j] * end_values[i] - weights[i] * deriv[(i, j)];
            }
        }
        let mass_inv = mass.clone().lu().try_inverse().ok_or_else(|| {
            Error::Numerical(format!("singular ADER mass matrix for degree {n}"))
        })?;
        let mut picard = mass_inv.clone();
        for i in 0..m {
            for j in 0..m {
                picard[(i, j)] *= weights[j];
            }
        }
        Ok(Self {
            degree: n,
            nodes,
            weights,
            start_values,
            end_values,
            mass,
            mass_inv,
            picard,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn start_values(&self) -> &[f64] {
        &self.start_values
    }

    pub fn end_values(&self) -> &[f64] {
        &self.end_values
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn mass_inv(&self) -> &DMatrix<f64> {
        &self.mass_inv
    }
}

pub fn build_tableau(n: usize) -> Result<AderTableau> {
    AderTableau::new(n)
}

fn all_finite(s: &[f64]) -> bool {
    s.iter().all(|v| v.is_finite())
}

/// Advance `state` from `t` to `t + dt`.
pub fn ader_step<S, O>(state: &S, t: f64, dt: f64, op: &O, tab: &AderTableau) -> Result<S>
where
    S: StateVector,
    O: RhsOperator<S> + ?Sized,
{
    let m = tab.degree + 1;
    let u0 = state.as_slice();
    let mut nodes: Vec<S> = vec![state.clone(); m];
    let mut rhs: Vec<S> = vec![state.clone(); m];

    let evaluate = |nodes: &mut [S], rhs: &mut [S], reuse_first: bool| -> Result<()> {
        if reuse_first {
            op.rhs(&mut nodes[0], t + tab.nodes[0] * dt, &mut rhs[0])?;
            let (first, rest) = rhs.split_at_mut(1);
            for r in rest {
                r.as_mut_slice().copy_from_slice(first[0].as_slice());
            }
        } else {
            for i in 0..m {
                op.rhs(&mut nodes[i], t + tab.nodes[i] * dt, &mut rhs[i])?;
            }
        }
        Ok(())
    };

    evaluate(&mut nodes, &mut rhs, op.is_autonomous())?;
    if !rhs.iter().all(|r| all_finite(r.as_slice())) {
        return Err(Error::Divergence { iteration: 0 });
    }

    for k in 1..=tab.degree {
        for (i, node) in nodes.iter_mut().enumerate() {
            let out = node.as_mut_slice();
            out.copy_from_slice(u0);
            for (j, r) in rhs.iter().enumerate() {
                let c = dt * tab.picard[(i, j)];
                if c != 0.0 {
                    for (o, &v) in out.iter_mut().zip(r.as_slice()) {
                        *o += c * v;
                    }
                }
            }
        }
        if !nodes.iter().all(|u| all_finite(u.as_slice())) {
            return Err(Error::Divergence { iteration: k });
        }
        evaluate(&mut nodes, &mut rhs, false)?;
    }

    let mut result = state.clone();
    {
        let out = result.as_mut_slice();
        for (r, &w) in rhs.iter().zip(&tab.weights) {
            let c = dt * w;
            for (o, &v) in out.iter_mut().zip(r.as_slice()) {
                *o += c * v;
            }
        }
        if !all_finite(out) {
            return Err(Error::Divergence {
                iteration: tab.degree + 1,
            });
        }
    }
    Ok(result)
}

/// Stable time step `C/(n+1) * min(dx, dy) / vmax`.
pub fn cfl_dt(grid: &ElementGrid, vmax: f64, n: usize, courant: f64) -> Result<f64> {
    if !(vmax > 0.0 && vmax.is_finite()) {
        return Err(Error::Config(format!(
            "maximum velocity must be positive to derive a time step, got {vmax}"
        )));
    }
    if !(courant > 0.0 && courant.is_finite()) {
        return Err(Error::Config(format!("invalid CFL number {courant}")));
    }
    Ok(courant / (n + 1) as f64 * grid.dx().min(grid.dy()) / vmax)
}

/// Speed entering the 2D time-step rule: the directional speeds weighted by
/// the cell aspect, so the sum of the two 1D Courant numbers stays at `C`.
/// Equals `|v|` for flow along a grid axis.
pub fn directional_speed(grid: &ElementGrid, vx: f64, vy: f64) -> f64 {
    let h = grid.dx().min(grid.dy());
    h * (vx.abs() / grid.dx() + vy.abs() / grid.dy())
}

/// Shorten `dt` so the step ends exactly on `t_final`.
pub fn clip_dt(dt: f64, t: f64, t_final: f64) -> f64 {
    if t + dt >= t_final || (t_final - (t + dt)) < 1e-9 * dt {
        t_final - t
    } else {
        dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    struct Linear(f64);

    impl RhsOperator<Vec<f64>> for Linear {
        fn rhs(&self, u: &mut Vec<f64>, _t: f64, out: &mut Vec<f64>) -> Result<()> {
            out[0] = self.0 * u[0];
            Ok(())
        }
    }

    struct TimeOnly(Box<dyn Fn(f64) -> f64>);

    impl RhsOperator<Vec<f64>> for TimeOnly {
        fn rhs(&self, _u: &mut Vec<f64>, t: f64, out: &mut Vec<f64>) -> Result<()> {
            out[0] = (self.0)(t);
            Ok(())
        }
        fn is_autonomous(&self) -> bool {
            false
        }
    }

    struct Blowup;

    impl RhsOperator<Vec<f64>> for Blowup {
        fn rhs(&self, u: &mut Vec<f64>, _t: f64, out: &mut Vec<f64>) -> Result<()> {
            out[0] = if u[0] > 1.0 { f64::INFINITY } else { 1.0 };
            Ok(())
        }
    }

    #[test]
    fn degree_zero_tableau_is_forward_euler() {
        let tab = build_tableau(0).unwrap();
        assert_eq!(tab.nodes(), &[0.5]);
        assert!((tab.weights()[0] - 1.0).abs() < 1e-15);
        assert!((tab.mass()[(0, 0)] - 1.0).abs() < 1e-15);
        let u = ader_step(&vec![2.0], 0.0, 0.1, &Linear(-3.0), &tab).unwrap();
        assert!((u[0] - 2.0 * (1.0 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn degree_one_mass_matrix_matches_closed_form() {
        let tab = build_tableau(1).unwrap();
        let s3 = 3.0_f64.sqrt();
        // l0(1) = -(sqrt3 - 1)/2, l1(1) = (sqrt3 + 1)/2, l0' = -sqrt3, l1' = sqrt3.
        let e = [-(s3 - 1.0) / 2.0, (s3 + 1.0) / 2.0];
        let d = [-s3, s3];
        for j in 0..2 {
            for i in 0..2 {
                let expected = e[j] * e[i] - 0.5 * d[j];
                assert!((tab.mass()[(j, i)] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mass_matrix_identities() {
        for n in 0..=12 {
            let tab = build_tableau(n).unwrap();
            let m = n + 1;
            let eye = tab.mass() * tab.mass_inv();
            assert!((eye - DMatrix::<f64>::identity(m, m)).abs().max() < 1e-12, "n={n}");
            for j in 0..m {
                let row: f64 = tab.mass().row(j).iter().sum();
                assert!((row - tab.start_values()[j]).abs() < 1e-12);
            }
            for i in 0..m {
                let s: f64 = (0..m)
                    .map(|j| tab.mass_inv()[(i, j)] * tab.start_values()[j])
                    .sum();
                assert!((s - 1.0).abs() < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn zero_rhs_is_identity() {
        for n in 0..5 {
            let tab = build_tableau(n).unwrap();
            let u = ader_step(&vec![0.3712], 1.0, 0.2, &Linear(0.0), &tab).unwrap();
            assert_eq!(u[0], 0.3712);
        }
    }

    fn error_at(n: usize, lambda: f64, steps: usize) -> f64 {
        let tab = build_tableau(n).unwrap();
        let dt = 1.0 / steps as f64;
        let mut u = vec![1.0];
        for s in 0..steps {
            u = ader_step(&u, s as f64 * dt, dt, &Linear(lambda), &tab).unwrap();
        }
        (u[0] - lambda.exp()).abs()
    }

    #[test]
    fn temporal_order_is_n_plus_one() {
        for n in 0..=4 {
            let base = 8 << n.min(2);
            let e1 = error_at(n, -1.0, base);
            let e2 = error_at(n, -1.0, 2 * base);
            let slope = (e1 / e2).log2();
            assert!((slope - (n + 1) as f64).abs() < 0.2, "n={n} slope {slope}");
        }
    }

    #[test]
    fn integrates_polynomials_in_time_exactly() {
        for n in 0..=6 {
            let tab = build_tableau(n).unwrap();
            // p(t) = sum_k t^k for k <= n, so p'(t) has degree n - 1.
            let p = move |t: f64| (0..=n as i32).map(|k| t.powi(k)).sum::<f64>();
            let dp = move |t: f64| {
                (1..=n as i32)
                    .map(|k| k as f64 * t.powi(k - 1))
                    .sum::<f64>()
            };
            let op = TimeOnly(Box::new(dp));
            let (t0, dt) = (0.3, 0.7);
            let u = ader_step(&vec![p(t0)], t0, dt, &op, &tab).unwrap();
            assert!((u[0] - p(t0 + dt)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn divergence_reports_iteration() {
        let tab = build_tableau(3).unwrap();
        let err = ader_step(&vec![0.0], 0.0, 2.0, &Blowup, &tab).unwrap_err();
        assert!(matches!(err, Error::Divergence { iteration: 2 }), "{err:?}");
    }

    #[test]
    fn cfl_examples() {
        let g = ElementGrid::unit_square(10, Boundary::Periodic).unwrap();
        assert!((cfl_dt(&g, 1.0, 0, 0.8).unwrap() - 0.08).abs() < 1e-15);
        let g = ElementGrid::unit_square(32, Boundary::Periodic).unwrap();
        let dt = cfl_dt(&g, 2.0_f64.sqrt(), 2, 0.8).unwrap();
        assert!((dt - 5.8926e-3).abs() < 1e-7);
        let a = cfl_dt(&g, 1.0, 1, 0.8).unwrap();
        let b = cfl_dt(&g, 1.0, 3, 0.8).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-16);
        assert!(cfl_dt(&g, 0.0, 1, 0.8).unwrap_err().is_config());
    }

    #[test]
    fn clip_lands_on_final_time() {
        assert_eq!(clip_dt(0.3, 0.9, 1.0), 1.0 - 0.9);
        assert_eq!(clip_dt(0.1, 0.0, 1.0), 0.1);
    }
}
