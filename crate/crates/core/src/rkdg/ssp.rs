//! Strong-stability-preserving Runge-Kutta methods of order 2, 3 and 4.

use crate::ader::RhsOperator;
use crate::error::{Error, Result};
use crate::grid::StateVector;

/// `out = sum of w * s` elementwise.
fn combine<S: StateVector>(out: &mut S, terms: &[(f64, &S)]) {
    let o = out.as_mut_slice();
    o.iter_mut().for_each(|v| *v = 0.0);
    for (w, s) in terms {
        for (v, x) in o.iter_mut().zip(s.as_slice()) {
            *v += w * x;
        }
    }
}

fn check<S: StateVector>(s: &S) -> Result<()> {
    if s.as_slice().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical("non-finite Runge-Kutta stage".into()))
    }
}

/// Evaluate `L(u)` at time `t` into a fresh state.
fn eval<S: StateVector, O: RhsOperator<S> + ?Sized>(u: &S, t: f64, op: &O) -> Result<S> {
    let mut work = u.clone();
    let mut out = u.clone();
    op.rhs(&mut work, t, &mut out)?;
    check(&out)?;
    Ok(out)
}

// Five-stage fourth-order method in Shu-Osher form.
const A10: f64 = 0.391752226571890;
const A20: f64 = 0.444370493651235;
const A21: f64 = 0.555629506348765;
const B21: f64 = 0.368410593050371;
const A30: f64 = 0.620101851488403;
const A32: f64 = 0.379898148511597;
const B32: f64 = 0.251891774271694;
const A40: f64 = 0.178079954393132;
const A43: f64 = 0.821920045606868;
const B43: f64 = 0.544974750228521;
const A52: f64 = 0.517231671970585;
const A53: f64 = 0.096059710526147;
const B53: f64 = 0.063692468666290;
const A54: f64 = 0.386708617503269;
const B54: f64 = 0.226007483236906;

/// One step of the SSP Runge-Kutta method of the given order (2, 3 or 4).
pub fn ssp_rk_step<S: StateVector, O: RhsOperator<S> + ?Sized>(
    u: &S,
    t: f64,
    dt: f64,
    order: usize,
    op: &O,
) -> Result<S> {
    let mut next = u.clone();
    match order {
        2 => {
            let l0 = eval(u, t, op)?;
            let mut u1 = u.clone();
            combine(&mut u1, &[(1.0, u), (dt, &l0)]);
            let l1 = eval(&u1, t + dt, op)?;
            combine(&mut next, &[(0.5, u), (0.5, &u1), (0.5 * dt, &l1)]);
        }
        3 => {
            let l0 = eval(u, t, op)?;
            let mut u1 = u.clone();
            combine(&mut u1, &[(1.0, u), (dt, &l0)]);
            let l1 = eval(&u1, t + dt, op)?;
            let mut u2 = u.clone();
            combine(&mut u2, &[(0.75, u), (0.25, &u1), (0.25 * dt, &l1)]);
            let l2 = eval(&u2, t + 0.5 * dt, op)?;
            combine(
                &mut next,
                &[(1.0 / 3.0, u), (2.0 / 3.0, &u2), (2.0 / 3.0 * dt, &l2)],
            );
        }
        4 => {
            let c1 = A10;
            let c2 = A21 * c1 + B21;
            let c3 = A32 * c2 + B32;
            let c4 = A43 * c3 + B43;
            let l0 = eval(u, t, op)?;
            let mut u1 = u.clone();
            combine(&mut u1, &[(1.0, u), (A10 * dt, &l0)]);
            let l1 = eval(&u1, t + c1 * dt, op)?;
            let mut u2 = u.clone();
            combine(&mut u2, &[(A20, u), (A21, &u1), (B21 * dt, &l1)]);
            let l2 = eval(&u2, t + c2 * dt, op)?;
            let mut u3 = u.clone();
            combine(&mut u3, &[(A30, u), (A32, &u2), (B32 * dt, &l2)]);
            let l3 = eval(&u3, t + c3 * dt, op)?;
            let mut u4 = u.clone();
            combine(&mut u4, &[(A40, u), (A43, &u3), (B43 * dt, &l3)]);
            let l4 = eval(&u4, t + c4 * dt, op)?;
            combine(
                &mut next,
                &[
                    (A52, &u2),
                    (A53, &u3),
                    (B53 * dt, &l3),
                    (A54, &u4),
                    (B54 * dt, &l4),
                ],
            );
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no SSP Runge-Kutta method of order {order}"
            )))
        }
    }
    check(&next)?;
    Ok(next)
}

/// Order used with spatial degree `n`: `n + 1`, clamped to `2..=4`.
pub fn ssp_order_for_degree(n: usize) -> usize {
    (n + 1).clamp(2, 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Cosine;

    impl RhsOperator<Vec<f64>> for Cosine {
        fn rhs(&self, _u: &mut Vec<f64>, t: f64, out: &mut Vec<f64>) -> Result<()> {
            out[0] = t.cos();
            Ok(())
        }

        fn is_autonomous(&self) -> bool {
            false
        }
    }

    struct Decay;

    impl RhsOperator<Vec<f64>> for Decay {
        fn rhs(&self, u: &mut Vec<f64>, _t: f64, out: &mut Vec<f64>) -> Result<()> {
            out[0] = -u[0];
            Ok(())
        }
    }

    fn error(order: usize, steps: usize, op: &dyn RhsOperator<Vec<f64>>, u0: f64, exact: f64) -> f64 {
        let dt = 1.0 / steps as f64;
        let mut u = vec![u0];
        for s in 0..steps {
            u = ssp_rk_step(&u, s as f64 * dt, dt, order, op).unwrap();
        }
        (u[0] - exact).abs()
    }

    #[test]
    fn observed_orders() {
        for order in 2..=4 {
            for (op, u0, exact) in [
                (&Cosine as &dyn RhsOperator<Vec<f64>>, 0.0, 1.0_f64.sin()),
                (&Decay as &dyn RhsOperator<Vec<f64>>, 1.0, (-1.0_f64).exp()),
            ] {
                let e1 = error(order, 10, op, u0, exact);
                let e2 = error(order, 20, op, u0, exact);
                let slope = (e1 / e2).log2();
                // Pure quadrature can superconverge: order 3 reduces to Simpson's rule.
                assert!(slope > order as f64 - 0.25, "order {order}: {slope}");
                if u0 != 0.0 {
                    assert!((slope - order as f64).abs() < 0.25, "order {order}: {slope}");
                }
            }
        }
    }

    struct Linear(f64);

    impl RhsOperator<Vec<f64>> for Linear {
        fn rhs(&self, u: &mut Vec<f64>, _t: f64, out: &mut Vec<f64>) -> Result<()> {
            for (o, v) in out.iter_mut().zip(u.iter()) {
                *o = self.0 * v;
            }
            Ok(())
        }
    }

    #[test]
    fn third_order_amplification_is_cubic_taylor() {
        let z: f64 = 0.1;
        let u = ssp_rk_step(&vec![1.0], 0.0, 1.0, 3, &Linear(z)).unwrap();
        assert!((u[0] - (1.0 + z + z * z / 2.0 + z * z * z / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_rhs_is_identity() {
        for order in 2..=4 {
            let u = ssp_rk_step(&vec![0.3, -2.0], 0.0, 0.7, order, &Linear(0.0)).unwrap();
            assert!((u[0] - 0.3).abs() < 1e-14 && (u[1] + 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn final_stage_is_a_convex_combination() {
        let weights = A52 + A53 + A54;
        assert!((weights - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unsupported_order() {
        assert!(ssp_rk_step(&vec![1.0], 0.0, 0.1, 5, &Decay).is_err());
        assert_eq!(ssp_order_for_degree(0), 2);
        assert_eq!(ssp_order_for_degree(2), 3);
        assert_eq!(ssp_order_for_degree(7), 4);
    }
}
