//! Planar-wave analysis of the one-dimensional vector-potential form of the
//! scheme.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::basis::NodeSet1D;
use crate::error::{Error, Result};

/// `(n+1) x (n+1)` matrix of the semi-discrete update for wave number `k`.
///
/// Rows are the flux points `x_1..x_{n+1}`, columns the basis derivatives
/// `l'_1..l'_{n+1}`; the upwind point `x_0` of the left neighbour enters the
/// last column with the phase `exp(-i k dx)`.
pub fn dispersion_matrix(n: usize, k_dx: f64) -> Result<DMatrix<Complex64>> {
    let nodes = NodeSet1D::new(n)?;
    let d = nodes.flux_basis().deriv_matrix(nodes.flux_nodes());
    let phase = Complex64::from_polar(1.0, -k_dx);
    let m = n + 1;
    let mut out = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for r in 0..m {
        for c in 0..m {
            out[(r, c)] = Complex64::new(d[(r + 1, c + 1)], 0.0);
        }
        out[(r, m - 1)] += phase * d[(r + 1, 0)];
    }
    Ok(out)
}

pub(crate) fn complex_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let dump = format!("{m:?}");
    let schur = Schur::try_new(m, 1e-15, 10_000).ok_or_else(|| {
        Error::Numerical(format!("eigenvalue iteration did not converge for {dump}"))
    })?;
    let (_, t) = schur.unpack();
    let values: Vec<Complex64> = t.diagonal().iter().copied().collect();
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numerical(format!("non-finite eigenvalues for {dump}")));
    }
    Ok(values)
}

/// All `n+1` frequencies `omega` at wave number `k`.
pub fn frequencies(n: usize, k: f64, dx: f64, v: f64) -> Result<Vec<Complex64>> {
    let m = dispersion_matrix(n, k * dx)?;
    let eig = complex_eigenvalues(m)?;
    let minus_i = Complex64::new(0.0, -1.0);
    Ok(eig.into_iter().map(|mu| minus_i * mu * (v / dx)).collect())
}

#[derive(Clone, Debug)]
pub struct DispersionBranch {
    pub degree: usize,
    pub k: Vec<f64>,
    /// Physical branch, continuous in `k`, with `omega(0) = 0`.
    pub omega: Vec<Complex64>,
    /// Largest imaginary part over every eigenvalue at every sample.
    pub max_imag_all: f64,
}

/// Follows the physical branch away from `k = 0` in small steps,
/// predicting by linear extrapolation and picking the nearest eigenvalue.
struct BranchTracker {
    n: usize,
    dx: f64,
    v: f64,
    step: f64,
    k: f64,
    current: Complex64,
    previous: Option<Complex64>,
}

impl BranchTracker {
    fn new(n: usize, dx: f64, v: f64, step: f64) -> Result<Self> {
        let start = frequencies(n, 0.0, dx, v)?;
        Ok(Self {
            n,
            dx,
            v,
            step,
            k: 0.0,
            current: nearest(&start, Complex64::new(0.0, 0.0)),
            previous: None,
        })
    }

    fn advance_to(&mut self, k_target: f64) -> Result<Complex64> {
        let distance = k_target - self.k;
        let steps = (distance.abs() / self.step).ceil() as usize;
        if steps == 0 {
            return Ok(self.current);
        }
        let h = distance / steps as f64;
        let k0 = self.k;
        for s in 1..=steps {
            let k = k0 + h * s as f64;
            let guess = match self.previous {
                Some(p) => self.current + (self.current - p),
                None => self.current + Complex64::new(self.v * h, 0.0),
            };
            let next = nearest(&frequencies(self.n, k, self.dx, self.v)?, guess);
            self.previous = Some(self.current);
            self.current = next;
        }
        self.k = k_target;
        Ok(self.current)
    }
}

fn nearest(values: &[Complex64], target: Complex64) -> Complex64 {
    *values
        .iter()
        .min_by(|a, b| (**a - target).norm().total_cmp(&(**b - target).norm()))
        .expect("at least one eigenvalue")
}

/// Physical dispersion branch `omega(k)` of degree `n`.
pub fn dispersion_relation(n: usize, k_samples: &[f64], dx: f64, v: f64) -> Result<DispersionBranch> {
    if !(v > 0.0) || !(dx > 0.0) {
        return Err(Error::InvalidArgument(
            "dispersion analysis needs v > 0 and dx > 0".into(),
        ));
    }
    let kmax = (n + 1) as f64 * std::f64::consts::PI / dx;
    if k_samples.iter().any(|k| k.abs() > kmax * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "wave numbers must lie within +-{kmax}"
        )));
    }
    // Sub-steps fine enough that eigenvalue curves never swap.
    let step = std::f64::consts::PI / dx / (64.0 * (n + 1) as f64);
    let mut omega = vec![Complex64::new(0.0, 0.0); k_samples.len()];
    let mut order: Vec<usize> = (0..k_samples.len()).collect();
    order.sort_by(|&a, &b| k_samples[a].total_cmp(&k_samples[b]));
    let (negative, positive): (Vec<usize>, Vec<usize>) =
        order.into_iter().partition(|&i| k_samples[i] < 0.0);
    let mut tracker = BranchTracker::new(n, dx, v, step)?;
    for &i in &positive {
        omega[i] = tracker.advance_to(k_samples[i])?;
    }
    let mut tracker = BranchTracker::new(n, dx, v, step)?;
    for &i in negative.iter().rev() {
        omega[i] = tracker.advance_to(k_samples[i])?;
    }
    let mut max_imag_all = f64::NEG_INFINITY;
    for &k in k_samples {
        for w in frequencies(n, k, dx, v)? {
            max_imag_all = max_imag_all.max(w.im);
        }
    }
    Ok(DispersionBranch {
        degree: n,
        k: k_samples.to_vec(),
        omega,
        max_imag_all,
    })
}

/// `count` equally spaced wave numbers covering `[-kmax, kmax]`.
pub fn k_samples(n: usize, dx: f64, count: usize) -> Vec<f64> {
    let kmax = (n + 1) as f64 * std::f64::consts::PI / dx;
    if count == 1 {
        return vec![0.0];
    }
    (0..count)
        .map(|i| -kmax + 2.0 * kmax * i as f64 / (count - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_closed_form() {
        let (dx, v) = (0.1, 1.5);
        let ks = k_samples(0, dx, 51);
        let branch = dispersion_relation(0, &ks, dx, v).unwrap();
        for (k, w) in ks.iter().zip(&branch.omega) {
            let exact = Complex64::new(0.0, -1.0)
                * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -k * dx))
                * (v / dx);
            assert!((w - exact).norm() < 1e-12 * v / dx, "k={k}");
        }
    }

    #[test]
    fn constant_mode_at_zero_wave_number() {
        for n in 0..=9 {
            let w = frequencies(n, 0.0, 1.0, 1.0).unwrap();
            let smallest = w.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
            assert!(smallest < 1e-12, "n={n}: {smallest}");
        }
    }

    #[test]
    fn eigenvalues_are_eigenvalues() {
        for n in 1..=6 {
            let m = dispersion_matrix(n, 0.7).unwrap();
            for mu in complex_eigenvalues(m.clone()).unwrap() {
                let shifted = &m - DMatrix::<Complex64>::identity(n + 1, n + 1) * mu;
                let sv = shifted.singular_values();
                let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
                assert!(smallest < 1e-10, "n={n}: {smallest}");
            }
        }
    }

    #[test]
    fn branch_is_continuous_and_approaches_exact_at_small_k() {
        for n in 1..=4 {
            let dx = 1.0;
            let ks = k_samples(n, dx, 200);
            let b = dispersion_relation(n, &ks, dx, 1.0).unwrap();
            for w in b.omega.windows(2) {
                assert!((w[1] - w[0]).norm() <= std::f64::consts::PI / dx);
            }
            let small = dispersion_relation(n, &[0.05], dx, 1.0).unwrap();
            assert!((small.omega[0] - 0.05).norm() < 0.05 * 0.05 * 0.05);
        }
    }

    #[test]
    fn rejects_out_of_range_wave_numbers() {
        assert!(dispersion_relation(1, &[10.0], 1.0, 1.0).is_err());
        assert!(dispersion_relation(1, &[0.0], 1.0, 0.0).is_err());
    }
}
