//! Amplification factor of the ADER integrator and its combination with the
//! spectral difference footprint.

use num_complex::Complex64;

use crate::ader::{ader_step, AderTableau, RhsOperator};
use crate::analysis::dispersion::{complex_eigenvalues, dispersion_matrix, k_samples};
use crate::error::Result;

/// Margin above one still counted as stable.
pub const STABILITY_TOLERANCE: f64 = 1e-12;

/// `u' = z u` with complex `z`, stored as `[re, im]`.
struct ComplexLinear(Complex64);

impl RhsOperator<Vec<f64>> for ComplexLinear {
    fn rhs(&self, u: &mut Vec<f64>, _t: f64, out: &mut Vec<f64>) -> Result<()> {
        let w = self.0 * Complex64::new(u[0], u[1]);
        out[0] = w.re;
        out[1] = w.im;
        Ok(())
    }
}

/// `P(z)`: one ADER step of size 1 on `u' = z u` from `u = 1`.
pub fn ader_amplification(tab: &AderTableau, z: Complex64) -> Result<Complex64> {
    let u = ader_step(&vec![1.0, 0.0], 0.0, 1.0, &ComplexLinear(z), tab)?;
    Ok(Complex64::new(u[0], u[1]))
}

/// `|P|` on a rectangular grid of `z = re + i im`, rows `(re, im, |P|)`.
pub fn amplification_grid(n: usize, re: &[f64], im: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let tab = AderTableau::new(n)?;
    let mut rows = Vec::with_capacity(re.len() * im.len());
    for &y in im {
        for &x in re {
            let p = ader_amplification(&tab, Complex64::new(x, y))?;
            rows.push((x, y, p.norm()));
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub degree: usize,
    pub courant: f64,
    pub stable: bool,
    pub max_abs_p: f64,
    pub worst_z: Complex64,
    pub largest_safe_courant: f64,
}

/// Scaled footprint `Omega dt` of every semi-discrete eigenvalue.
fn footprint(n: usize, dx: f64, v: f64, courant: f64, samples: usize) -> Result<Vec<Complex64>> {
    let dt = courant / (n + 1) as f64 * dx / v;
    let mut out = Vec::with_capacity(samples * (n + 1));
    for k in k_samples(n, dx, samples) {
        for mu in complex_eigenvalues(dispersion_matrix(n, k * dx)?)? {
            out.push(-mu * (v / dx) * dt);
        }
    }
    Ok(out)
}

fn worst_amplification(tab: &AderTableau, zs: &[Complex64]) -> Result<(f64, Complex64)> {
    let mut worst = (0.0_f64, Complex64::new(0.0, 0.0));
    for &z in zs {
        let p = ader_amplification(tab, z)?.norm();
        if p > worst.0 {
            worst = (p, z);
        }
    }
    Ok(worst)
}

/// Check that every scaled eigenvalue lies in the ADER stability region at
/// Courant number `courant`, and bisect for the largest Courant number that
/// still passes.
pub fn combined_stability_check(
    n: usize,
    dx: f64,
    v: f64,
    courant: f64,
    samples: usize,
) -> Result<StabilityReport> {
    let tab = AderTableau::new(n)?;
    let zs = footprint(n, dx, v, courant, samples)?;
    let (max_abs_p, worst_z) = worst_amplification(&tab, &zs)?;
    let stable = max_abs_p <= 1.0 + STABILITY_TOLERANCE;

    // The footprint scales linearly with the Courant number.
    let unit = footprint(n, dx, v, 1.0, samples)?;
    let passes = |c: f64| -> Result<bool> {
        let scaled: Vec<Complex64> = unit.iter().map(|z| z * c).collect();
        Ok(worst_amplification(&tab, &scaled)?.0 <= 1.0 + STABILITY_TOLERANCE)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while passes(hi)? && hi < 64.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(StabilityReport {
        degree: n,
        courant,
        stable,
        max_abs_p,
        worst_z,
        largest_safe_courant: lo,
    })
}
