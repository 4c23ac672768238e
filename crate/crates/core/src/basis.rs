//! One-dimensional node sets, quadrature and Lagrange interpolation on the
//! reference interval [0, 1].
//!
//! Everything here is immutable after construction. The spectral difference
//! scheme uses two node families per degree `n`:
//!
//! * `n + 1` solution points, the zeros of the Chebyshev polynomial
//!   `T_{n+1}` mapped to (0, 1);
//! * `n + 2` flux points, the element end points plus the `n` Gauss-Legendre
//!   points.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Legendre polynomial `P_m(t)` and its derivative on [-1, 1].
fn legendre_with_derivative(m: usize, t: f64) -> (f64, f64) {
    if m == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = t;
    for k in 1..m {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let mf = m as f64;
    // Closed form is singular at the end points, which are never roots.
    let dp = mf * (t * p - p_prev) / (t * t - 1.0);
    (p, dp)
}

/// Gauss-Legendre rule with `m` points, mapped to [0, 1].
///
/// Nodes are sorted increasingly and are exactly symmetric about 1/2; the
/// weights sum to one.
pub fn gauss_legendre(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs at least one point".into(),
        ));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m / 2 {
        // Roots in ascending order, starting from the most negative one.
        let mut t = -(std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_with_derivative(m, t);
            let step = p / dp;
            t -= step;
            if step.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "Newton iteration for Gauss-Legendre root {i} of degree {m} did not converge"
            )));
        }
        let (_, dp) = legendre_with_derivative(m, t);
        let w = 1.0 / ((1.0 - t * t) * dp * dp);
        let x = 0.5 * (1.0 + t);
        nodes[i] = x;
        weights[i] = w;
        nodes[m - 1 - i] = 1.0 - x;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        let (_, dp) = legendre_with_derivative(m, 0.0);
        nodes[m / 2] = 0.5;
        weights[m / 2] = 1.0 / (dp * dp);
    }
    Ok((nodes, weights))
}

/// Zeros of the Chebyshev polynomial `T_{n+1}` mapped to (0, 1), increasing.
pub fn chebyshev_solution_nodes(n: usize) -> Vec<f64> {
    let count = n + 1;
    let mut nodes = vec![0.0; count];
    for k in 0..count / 2 {
        let t = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
        let x = 0.5 * (1.0 - t);
        nodes[k] = x;
        nodes[count - 1 - k] = 1.0 - x;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.5;
    }
    nodes
}

/// Orthonormal Legendre polynomials on [0, 1]: `sqrt(2k+1) P_k(2x - 1)`.
///
/// Fills `values[k]` and `derivatives[k]` for `k = 0..values.len()`.
pub fn orthonormal_legendre(x: f64, values: &mut [f64], derivatives: &mut [f64]) {
    let count = values.len();
    debug_assert_eq!(count, derivatives.len());
    if count == 0 {
        return;
    }
    let t = 2.0 * x - 1.0;
    // Recurrence for P_k and P_k' in t; d/dx = 2 d/dt.
    let (mut p_prev, mut dp_prev) = (1.0, 0.0);
    let (mut p, mut dp) = (t, 1.0);
    for k in 0..count {
        let (pk, dpk) = match k {
            0 => (1.0, 0.0),
            1 => (t, 1.0),
            _ => {
                let kf = (k - 1) as f64;
                let p_next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
                let dp_next = ((2.0 * kf + 1.0) * (p + t * dp) - kf * dp_prev) / (kf + 1.0);
                p_prev = p;
                dp_prev = dp;
                p = p_next;
                dp = dp_next;
                (p, dp)
            }
        };
        let scale = ((2 * k + 1) as f64).sqrt();
        values[k] = scale * pk;
        derivatives[k] = 2.0 * scale * dpk;
    }
}

/// Lagrange basis in barycentric form.
#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("empty node list".into()));
        }
        let mut weights = vec![1.0; nodes.len()];
        for (i, &xi) in nodes.iter().enumerate() {
            for (k, &xk) in nodes.iter().enumerate() {
                if i != k {
                    let d = xi - xk;
                    if d == 0.0 {
                        return Err(Error::InvalidArgument(format!(
                            "repeated interpolation node {xi}"
                        )));
                    }
                    weights[i] /= d;
                }
            }
        }
        let scale = weights.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
        for w in &mut weights {
            *w /= scale;
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn barycentric_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn node_index(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&xi| xi == x)
    }

    /// All basis values `l_i(x)`.
    pub fn values_into(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        if let Some(j) = self.node_index(x) {
            out.fill(0.0);
            out[j] = 1.0;
            return;
        }
        let mut sum = 0.0;
        for ((o, &xi), &wi) in out.iter_mut().zip(&self.nodes).zip(&self.weights) {
            *o = wi / (x - xi);
            sum += *o;
        }
        for o in out.iter_mut() {
            *o /= sum;
        }
    }

    pub fn values_at(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.values_into(x, &mut out);
        out
    }

    /// All basis derivatives `l_i'(x)`.
    pub fn derivatives_into(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        if let Some(j) = self.node_index(x) {
            let xj = self.nodes[j];
            let wj = self.weights[j];
            let mut diag = 0.0;
            for (i, o) in out.iter_mut().enumerate() {
                if i != j {
                    *o = (self.weights[i] / wj) / (xj - self.nodes[i]);
                    diag -= *o;
                }
            }
            out[j] = diag;
            return;
        }
        let mut s = 0.0;
        let mut t = 0.0;
        for (&xi, &wi) in self.nodes.iter().zip(&self.weights) {
            let r = 1.0 / (x - xi);
            s += wi * r;
            t += wi * r * r;
        }
        let ratio = t / s;
        for ((o, &xi), &wi) in out.iter_mut().zip(&self.nodes).zip(&self.weights) {
            let r = 1.0 / (x - xi);
            *o = (wi * r / s) * (ratio - r);
        }
    }

    pub fn derivatives_at(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.derivatives_into(x, &mut out);
        out
    }

    /// Value of the interpolant with nodal values `coeffs` at `x`.
    pub fn eval(&self, coeffs: &[f64], x: f64) -> Result<f64> {
        if coeffs.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.len(),
                coeffs.len()
            )));
        }
        if let Some(j) = self.node_index(x) {
            return Ok(coeffs[j]);
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&c, &xi), &wi) in coeffs.iter().zip(&self.nodes).zip(&self.weights) {
            let r = wi / (x - xi);
            num += r * c;
            den += r;
        }
        Ok(num / den)
    }

    /// `V[a][i] = l_i(targets[a])`.
    pub fn value_matrix(&self, targets: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(targets.len(), self.len());
        let mut row = vec![0.0; self.len()];
        for (a, &x) in targets.iter().enumerate() {
            self.values_into(x, &mut row);
            for (i, &v) in row.iter().enumerate() {
                m[(a, i)] = v;
            }
        }
        m
    }

    /// `D[a][i] = l_i'(targets[a])`.
    pub fn deriv_matrix(&self, targets: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(targets.len(), self.len());
        let mut row = vec![0.0; self.len()];
        for (a, &x) in targets.iter().enumerate() {
            self.derivatives_into(x, &mut row);
            for (i, &v) in row.iter().enumerate() {
                m[(a, i)] = v;
            }
        }
        m
    }
}

/// Solution and flux points of degree `n`.
#[derive(Clone, Debug)]
pub struct NodeSet1D {
    degree: usize,
    solution_nodes: Vec<f64>,
    flux_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
    solution_basis: LagrangeBasis,
    flux_basis: LagrangeBasis,
}

impl NodeSet1D {
    pub fn new(n: usize) -> Result<Self> {
        let solution_nodes = chebyshev_solution_nodes(n);
        let mut flux_nodes = Vec::with_capacity(n + 2);
        flux_nodes.push(0.0);
        let gl_weights = if n > 0 {
            let (gl, w) = gauss_legendre(n)?;
            flux_nodes.extend_from_slice(&gl);
            w
        } else {
            Vec::new()
        };
        flux_nodes.push(1.0);
        let solution_basis = LagrangeBasis::new(solution_nodes.clone())?;
        let flux_basis = LagrangeBasis::new(flux_nodes.clone())?;
        Ok(Self {
            degree: n,
            solution_nodes,
            flux_nodes,
            gl_weights,
            solution_basis,
            flux_basis,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn solution_nodes(&self) -> &[f64] {
        &self.solution_nodes
    }

    pub fn flux_nodes(&self) -> &[f64] {
        &self.flux_nodes
    }

    /// Weights of the interior (Gauss-Legendre) flux points.
    pub fn gl_weights(&self) -> &[f64] {
        &self.gl_weights
    }

    pub fn solution_basis(&self) -> &LagrangeBasis {
        &self.solution_basis
    }

    pub fn flux_basis(&self) -> &LagrangeBasis {
        &self.flux_basis
    }
}

/// Gauss-Legendre nodes in time used by the ADER predictor.
#[derive(Clone, Debug)]
pub struct TimeQuadrature {
    degree: usize,
    time_nodes: Vec<f64>,
    time_weights: Vec<f64>,
}

impl TimeQuadrature {
    pub fn new(n: usize) -> Result<Self> {
        let (time_nodes, time_weights) = gauss_legendre(n + 1)?;
        Ok(Self {
            degree: n,
            time_nodes,
            time_weights,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.time_nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.time_weights
    }
}
