//! The registered test problems.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::ctsd::{PotentialInit, ScalarFn, VelocityField};
use crate::error::{Error, Result};
use crate::grid::{Boundary, VectorFieldFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestCaseId {
    Smooth,
    Loop,
    Rotating,
}

impl TestCaseId {
    pub const ALL: [TestCaseId; 3] = [TestCaseId::Smooth, TestCaseId::Loop, TestCaseId::Rotating];

    pub fn name(self) -> &'static str {
        match self {
            TestCaseId::Smooth => "smooth",
            TestCaseId::Loop => "loop",
            TestCaseId::Rotating => "rotating",
        }
    }
}

impl fmt::Display for TestCaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestCaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestCaseId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown test case '{s}' (smooth, loop, rotating)")))
    }
}

pub type PlaneFieldFn = dyn Fn(f64, f64) -> [f64; 2] + Send + Sync;

/// Initial data, velocity and boundary treatment of one problem on `[0, 1]^2`.
#[derive(Clone)]
pub struct TestCase {
    pub id: TestCaseId,
    pub potential: PotentialInit,
    pub field: Arc<PlaneFieldFn>,
    pub velocity: VelocityField,
    pub boundary: Boundary,
    pub exact: Option<Arc<VectorFieldFn>>,
    pub default_t_final: f64,
}

pub const LOOP_AMPLITUDE: f64 = 1e-3;
pub const LOOP_RADIUS: f64 = 0.25;
pub const ROTATING_RADIUS: f64 = 0.125;
pub const ROTATING_CENTER: (f64, f64) = (0.75, 0.5);
pub const ROTATION_AXIS: (f64, f64) = (0.5, 0.5);

/// `Az = A0 max(0, r0 - r)` about `center`.
pub fn loop_potential(a0: f64, r0: f64, center: (f64, f64)) -> impl Fn(f64, f64) -> f64 + Send + Sync + Copy {
    move |x, y| {
        let r = (x - center.0).hypot(y - center.1);
        a0 * (r0 - r).max(0.0)
    }
}

/// `B = curl Az` of [`loop_potential`]: tangential with magnitude `A0`
/// inside the loop, zero outside.
pub fn loop_field(a0: f64, r0: f64, center: (f64, f64)) -> impl Fn(f64, f64) -> [f64; 2] + Send + Sync + Copy {
    move |x, y| {
        let (dx, dy) = (x - center.0, y - center.1);
        let r = dx.hypot(dy);
        if r < r0 && r > 0.0 {
            [-a0 * dy / r, a0 * dx / r]
        } else {
            [0.0, 0.0]
        }
    }
}

fn rotate(v: (f64, f64), angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (c * v.0 - s * v.1, s * v.0 + c * v.1)
}

impl TestCase {
    pub fn new(id: TestCaseId) -> Self {
        match id {
            TestCaseId::Smooth => {
                let az = |x: f64, y: f64| ((2.0 * PI * x).sin() + (2.0 * PI * y).sin()) / (2.0 * PI);
                let b = |x: f64, y: f64| [(2.0 * PI * y).cos(), -(2.0 * PI * x).cos()];
                Self {
                    id,
                    potential: PotentialInit::new("smooth", az),
                    field: Arc::new(b),
                    velocity: VelocityField::Constant(1.0, 1.0),
                    boundary: Boundary::Periodic,
                    exact: None,
                    default_t_final: 1.0,
                }
            }
            TestCaseId::Loop => {
                let center = (0.5, 0.5);
                Self {
                    id,
                    potential: PotentialInit::new(
                        "loop",
                        loop_potential(LOOP_AMPLITUDE, LOOP_RADIUS, center),
                    ),
                    field: Arc::new(loop_field(LOOP_AMPLITUDE, LOOP_RADIUS, center)),
                    velocity: VelocityField::Constant(1.0, 1.0),
                    boundary: Boundary::Periodic,
                    exact: None,
                    default_t_final: 2.0,
                }
            }
            TestCaseId::Rotating => {
                let b0 = loop_field(LOOP_AMPLITUDE, ROTATING_RADIUS, ROTATING_CENTER);
                let exact = move |x: f64, y: f64, t: f64| {
                    let (cx, cy) = ROTATION_AXIS;
                    let (x0, y0) = rotate((x - cx, y - cy), -t);
                    let b = b0(x0 + cx, y0 + cy);
                    let (bx, by) = rotate((b[0], b[1]), t);
                    [bx, by]
                };
                Self {
                    id,
                    potential: PotentialInit::new(
                        "rotating",
                        loop_potential(LOOP_AMPLITUDE, ROTATING_RADIUS, ROTATING_CENTER),
                    ),
                    field: Arc::new(b0),
                    velocity: VelocityField::Rotation { center: ROTATION_AXIS },
                    boundary: Boundary::DirichletExact,
                    exact: Some(Arc::new(exact)),
                    default_t_final: PI,
                }
            }
        }
    }

    /// Initial potential as a plain function.
    pub fn az(&self) -> Arc<ScalarFn> {
        self.potential.az.clone()
    }

    /// Analytic magnetic energy of the initial field, if known in closed form.
    pub fn analytic_energy(&self) -> Option<f64> {
        match self.id {
            TestCaseId::Smooth => Some(0.5),
            TestCaseId::Loop => Some(0.5 * LOOP_AMPLITUDE.powi(2) * PI * LOOP_RADIUS.powi(2)),
            TestCaseId::Rotating => {
                Some(0.5 * LOOP_AMPLITUDE.powi(2) * PI * ROTATING_RADIUS.powi(2))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in TestCaseId::ALL {
            assert_eq!(id.name().parse::<TestCaseId>().unwrap(), id);
        }
        assert!("vortex".parse::<TestCaseId>().unwrap_err().is_config());
    }

    #[test]
    fn fields_are_curls_of_potentials() {
        let h = 1e-6;
        for id in TestCaseId::ALL {
            let c = TestCase::new(id);
            let az = c.az();
            for &(x, y) in &[(0.3, 0.41), (0.62, 0.55), (0.8, 0.47), (0.1, 0.9)] {
                let b = (c.field)(x, y);
                let bx = (az(x, y + h) - az(x, y - h)) / (2.0 * h);
                let by = -(az(x + h, y) - az(x - h, y)) / (2.0 * h);
                assert!((b[0] - bx).abs() < 1e-8 && (b[1] - by).abs() < 1e-8, "{id} at ({x}, {y})");
            }
        }
    }

    #[test]
    fn rotating_exact_solution() {
        let c = TestCase::new(TestCaseId::Rotating);
        let exact = c.exact.clone().unwrap();
        // At t = 0 it is the initial field.
        for &(x, y) in &[(0.7, 0.52), (0.2, 0.5), (0.8, 0.45)] {
            assert_eq!(exact(x, y, 0.0), (c.field)(x, y));
        }
        // Half a turn moves the loop centre to (0.25, 0.5) and flips B.
        let b = exact(0.25 + 0.05, 0.5, PI);
        let b0 = (c.field)(0.75 - 0.05, 0.5);
        assert!((b[0] + b0[0]).abs() < 1e-15 && (b[1] + b0[1]).abs() < 1e-15);
        // The exact field is transported by v = (-(y - 1/2), x - 1/2): the
        // magnitude is constant along the circular path.
        let p = (0.8_f64, 0.5_f64);
        let t = 0.3;
        let (qx, qy) = rotate((p.0 - 0.5, p.1 - 0.5), t);
        let m0 = {
            let b = exact(p.0, p.1, 0.0);
            b[0].hypot(b[1])
        };
        let b = exact(qx + 0.5, qy + 0.5, t);
        assert!((b[0].hypot(b[1]) - m0).abs() < 1e-15);
    }
}
