//! Diagnostics shared by every scheme: the two-term divergence norm,
//! magnetic energy, mean-value L1 error and control-volume energy maps.
//! Fourier analysis of the scheme lives in the submodules.

pub mod dispersion;
pub mod stability;

use rayon::prelude::*;

use crate::basis::gauss_legendre;
use crate::error::{Error, Result};
use crate::grid::{Boundary, ElementGrid};

pub use dispersion::{dispersion_matrix, dispersion_relation, DispersionBranch};
pub use stability::{ader_amplification, combined_stability_check, StabilityReport};

/// `Bx`, `By` and `dBx/dx + dBy/dy` on a tensor point set, index `a*ny + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSamples {
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
    pub div: Vec<f64>,
}

impl TensorSamples {
    pub fn zeros(len: usize) -> Self {
        Self {
            bx: vec![0.0; len],
            by: vec![0.0; len],
            div: vec![0.0; len],
        }
    }
}

/// A magnetic field given as one polynomial per element.
pub trait ElementwiseField: Sync {
    fn grid(&self) -> &ElementGrid;

    fn degree(&self) -> usize;

    /// Local boundaries of the control volumes inside an element, the same in
    /// both directions, starting at 0 and ending at 1.
    fn control_volume_edges(&self) -> Vec<f64>;

    /// Evaluate element `(ex, ey)` at local points `xs x ys`.
    fn sample(&self, ex: usize, ey: usize, xs: &[f64], ys: &[f64]) -> TensorSamples;
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DivergenceNorm {
    pub surface: f64,
    pub volume: f64,
}

fn elements(grid: &ElementGrid) -> Vec<(usize, usize)> {
    (0..grid.ny())
        .flat_map(|ey| (0..grid.nx()).map(move |ex| (ex, ey)))
        .collect()
}

/// Surface term: integral of the normal jump over every interior face (and
/// the wrap faces of periodic grids). Volume term: integral of `|div B|`.
pub fn divergence_norm(field: &dyn ElementwiseField) -> DivergenceNorm {
    let grid = field.grid();
    let q = 2 * (field.degree() + 2);
    let (gx, gw) = gauss_legendre(q).expect("positive quadrature order");
    let (dx, dy) = (grid.dx(), grid.dy());
    let periodic = grid.boundary() == Boundary::Periodic;
    let (nx, ny) = (grid.nx(), grid.ny());

    let per_element: Vec<(f64, f64)> = elements(grid)
        .par_iter()
        .map(|&(ex, ey)| {
            let inside = field.sample(ex, ey, &gx, &gx);
            let mut volume = 0.0;
            for a in 0..q {
                for b in 0..q {
                    volume += gw[a] * gw[b] * inside.div[a * q + b].abs();
                }
            }
            volume *= dx * dy;

            let mut surface = 0.0;
            if ex > 0 || periodic {
                let left = (ex + nx - 1) % nx;
                let l = field.sample(left, ey, &[1.0], &gx);
                let r = field.sample(ex, ey, &[0.0], &gx);
                for b in 0..q {
                    surface += gw[b] * (r.bx[b] - l.bx[b]).abs() * dy;
                }
            }
            if ey > 0 || periodic {
                let below = (ey + ny - 1) % ny;
                let l = field.sample(ex, below, &gx, &[1.0]);
                let r = field.sample(ex, ey, &gx, &[0.0]);
                for a in 0..q {
                    surface += gw[a] * (r.by[a] - l.by[a]).abs() * dx;
                }
            }
            (surface, volume)
        })
        .collect();

    let mut norm = DivergenceNorm::default();
    for (s, v) in per_element {
        norm.surface += s;
        norm.volume += v;
    }
    norm
}

/// `integral of (Bx^2 + By^2)/2`, exact for the polynomial representation.
pub fn magnetic_energy(field: &dyn ElementwiseField) -> f64 {
    let grid = field.grid();
    let q = field.degree() + 2;
    let (gx, gw) = gauss_legendre(q).expect("positive quadrature order");
    let per_element: Vec<f64> = elements(grid)
        .par_iter()
        .map(|&(ex, ey)| {
            let s = field.sample(ex, ey, &gx, &gx);
            let mut e = 0.0;
            for a in 0..q {
                for b in 0..q {
                    let p = a * q + b;
                    e += gw[a] * gw[b] * (s.bx[p] * s.bx[p] + s.by[p] * s.by[p]);
                }
            }
            0.5 * e * grid.dx() * grid.dy()
        })
        .collect();
    per_element.iter().sum()
}

/// Quadrature points and weights covering every control volume of an element.
struct SubcellRule {
    edges: Vec<f64>,
    q: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SubcellRule {
    fn new(edges: Vec<f64>, q: usize) -> Self {
        let (gx, gw) = gauss_legendre(q).expect("positive quadrature order");
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for c in 0..edges.len() - 1 {
            let (lo, hi) = (edges[c], edges[c + 1]);
            for (x, w) in gx.iter().zip(&gw) {
                points.push(lo + (hi - lo) * x);
                weights.push(*w);
            }
        }
        Self {
            edges,
            q,
            points,
            weights,
        }
    }

    fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    /// Means of `f` over every control volume, `[ci * cells + cj]`.
    fn means(&self, values: &[f64]) -> Vec<f64> {
        let c = self.cells();
        let q = self.q;
        let np = self.points.len();
        let mut out = vec![0.0; c * c];
        for ci in 0..c {
            for cj in 0..c {
                let mut acc = 0.0;
                for a in 0..q {
                    let pa = ci * q + a;
                    for b in 0..q {
                        let pb = cj * q + b;
                        acc += self.weights[pa] * self.weights[pb] * values[pa * np + pb];
                    }
                }
                out[ci * c + cj] = acc;
            }
        }
        out
    }
}

/// Sum over control volumes of `|mean(u_t) - mean(u_0)| * area`, per
/// component.
pub fn l1_error(state_t: &dyn ElementwiseField, state_0: &dyn ElementwiseField) -> Result<[f64; 2]> {
    let grid = state_t.grid();
    if grid != state_0.grid()
        || state_t.degree() != state_0.degree()
        || state_t.control_volume_edges() != state_0.control_volume_edges()
    {
        return Err(Error::InvalidArgument(
            "L1 error needs states on identical grids and representations".into(),
        ));
    }
    let rule = SubcellRule::new(state_t.control_volume_edges(), state_t.degree() + 2);
    let widths: Vec<f64> = rule.edges.windows(2).map(|w| w[1] - w[0]).collect();
    let c = rule.cells();
    let per_element: Vec<[f64; 2]> = elements(grid)
        .par_iter()
        .map(|&(ex, ey)| {
            let st = state_t.sample(ex, ey, &rule.points, &rule.points);
            let s0 = state_0.sample(ex, ey, &rule.points, &rule.points);
            let dbx: Vec<f64> = st.bx.iter().zip(&s0.bx).map(|(a, b)| a - b).collect();
            let dby: Vec<f64> = st.by.iter().zip(&s0.by).map(|(a, b)| a - b).collect();
            let mx = rule.means(&dbx);
            let my = rule.means(&dby);
            let mut acc = [0.0, 0.0];
            for ci in 0..c {
                for cj in 0..c {
                    let area = widths[ci] * widths[cj] * grid.dx() * grid.dy();
                    acc[0] += mx[ci * c + cj].abs() * area;
                    acc[1] += my[ci * c + cj].abs() * area;
                }
            }
            acc
        })
        .collect();
    let mut total = [0.0, 0.0];
    for e in per_element {
        total[0] += e[0];
        total[1] += e[1];
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldMapCell {
    pub i: usize,
    pub j: usize,
    pub x_center: f64,
    pub y_center: f64,
    pub energy_density: f64,
}

/// Control-volume averages of `(Bx^2 + By^2)/2`, row-major in `j`.
pub fn energy_density_map(field: &dyn ElementwiseField) -> Vec<FieldMapCell> {
    let grid = field.grid();
    let rule = SubcellRule::new(field.control_volume_edges(), field.degree() + 2);
    let c = rule.cells();
    let per_element: Vec<Vec<f64>> = elements(grid)
        .par_iter()
        .map(|&(ex, ey)| {
            let s = field.sample(ex, ey, &rule.points, &rule.points);
            let e: Vec<f64> = s
                .bx
                .iter()
                .zip(&s.by)
                .map(|(bx, by)| 0.5 * (bx * bx + by * by))
                .collect();
            rule.means(&e)
        })
        .collect();
    let mut cells = Vec::with_capacity(grid.element_count() * c * c);
    for gj in 0..grid.ny() * c {
        for gi in 0..grid.nx() * c {
            let (ex, ci) = (gi / c, gi % c);
            let (ey, cj) = (gj / c, gj % c);
            let xc = 0.5 * (rule.edges[ci] + rule.edges[ci + 1]);
            let yc = 0.5 * (rule.edges[cj] + rule.edges[cj + 1]);
            let (x, y) = grid.physical(ex as isize, ey as isize, xc, yc);
            cells.push(FieldMapCell {
                i: gi,
                j: gj,
                x_center: x,
                y_center: y,
                energy_density: per_element[ey * grid.nx() + ex][ci * c + cj],
            });
        }
    }
    cells
}

/// Least-squares slope of `log2(err)` against `log2(N)`, negated.
pub fn observed_order(cells: &[usize], errors: &[f64]) -> Option<f64> {
    if cells.len() != errors.len() || cells.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = cells.iter().map(|&n| (n as f64).log2()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.log2()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    slope.is_finite().then_some(-slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Polynomial field given by closures, one element layout for all.
    struct Analytic<F: Fn(f64, f64) -> [f64; 3] + Sync> {
        grid: ElementGrid,
        degree: usize,
        f: F,
    }

    impl<F: Fn(f64, f64) -> [f64; 3] + Sync> ElementwiseField for Analytic<F> {
        fn grid(&self) -> &ElementGrid {
            &self.grid
        }
        fn degree(&self) -> usize {
            self.degree
        }
        fn control_volume_edges(&self) -> Vec<f64> {
            vec![0.0, 1.0]
        }
        fn sample(&self, ex: usize, ey: usize, xs: &[f64], ys: &[f64]) -> TensorSamples {
            let mut s = TensorSamples::zeros(xs.len() * ys.len());
            for (a, &x) in xs.iter().enumerate() {
                for (b, &y) in ys.iter().enumerate() {
                    let (px, py) = self.grid.physical(ex as isize, ey as isize, x, y);
                    let v = (self.f)(px, py);
                    let p = a * ys.len() + b;
                    s.bx[p] = v[0];
                    s.by[p] = v[1];
                    s.div[p] = v[2];
                }
            }
            s
        }
    }

    #[test]
    fn single_element_linear_field() {
        let f = Analytic {
            grid: ElementGrid::unit_square(1, Boundary::Periodic).unwrap(),
            degree: 1,
            f: |x, _| [x, 0.0, 1.0],
        };
        let d = divergence_norm(&f);
        assert!((d.volume - 1.0).abs() < 1e-14);
        assert!((d.surface - 1.0).abs() < 1e-14);
        assert!((magnetic_energy(&f) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn zero_field_diagnostics() {
        let f = Analytic {
            grid: ElementGrid::unit_square(3, Boundary::Periodic).unwrap(),
            degree: 2,
            f: |_, _| [0.0, 0.0, 0.0],
        };
        assert_eq!(divergence_norm(&f), DivergenceNorm::default());
        assert_eq!(magnetic_energy(&f), 0.0);
        assert_eq!(l1_error(&f, &f).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn smooth_field_energy_is_one_half() {
        use std::f64::consts::PI;
        let f = Analytic {
            grid: ElementGrid::unit_square(8, Boundary::Periodic).unwrap(),
            degree: 6,
            f: |x, y| [(2.0 * PI * y).cos(), -(2.0 * PI * x).cos(), 0.0],
        };
        assert!((magnetic_energy(&f) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn l1_of_constant_offset_is_offset_times_area() {
        let grid = ElementGrid::new(3, 2, (0.0, 2.0, 0.0, 1.5), Boundary::Periodic).unwrap();
        let a = Analytic {
            grid: grid.clone(),
            degree: 2,
            f: |x, y| [x * y, y, 0.0],
        };
        let b = Analytic {
            grid,
            degree: 2,
            f: |x, y| [x * y + 0.25, y - 0.5, 0.0],
        };
        let e = l1_error(&b, &a).unwrap();
        assert!((e[0] - 0.25 * 3.0).abs() < 1e-13);
        assert!((e[1] - 0.5 * 3.0).abs() < 1e-13);
    }

    #[test]
    fn l1_rejects_mismatched_grids() {
        let a = Analytic {
            grid: ElementGrid::unit_square(2, Boundary::Periodic).unwrap(),
            degree: 1,
            f: |_, _| [0.0; 3],
        };
        let b = Analytic {
            grid: ElementGrid::unit_square(3, Boundary::Periodic).unwrap(),
            degree: 1,
            f: |_, _| [0.0; 3],
        };
        assert!(matches!(l1_error(&a, &b), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn divergence_norm_is_homogeneous() {
        let make = |s: f64| Analytic {
            grid: ElementGrid::unit_square(2, Boundary::Periodic).unwrap(),
            degree: 2,
            f: move |x: f64, y: f64| [s * x * x, s * (y - x), s * (2.0 * x + 1.0)],
        };
        let d1 = divergence_norm(&make(1.0));
        let d2 = divergence_norm(&make(-3.0));
        assert!((d2.surface - 3.0 * d1.surface).abs() < 1e-12);
        assert!((d2.volume - 3.0 * d1.volume).abs() < 1e-12);
    }

    #[test]
    fn observed_order_of_exact_power_law() {
        let e: Vec<f64> = [8usize, 16, 32].iter().map(|&n| 3.0 * (n as f64).powi(-3)).collect();
        let p = observed_order(&[8, 16, 32], &e).unwrap();
        assert!((p - 3.0).abs() < 1e-12);
        assert!(observed_order(&[8], &[1.0]).is_none());
    }

    #[test]
    fn field_map_layout() {
        let f = Analytic {
            grid: ElementGrid::unit_square(2, Boundary::Periodic).unwrap(),
            degree: 1,
            f: |_, _| [1.0, 1.0, 0.0],
        };
        let cells = energy_density_map(&f);
        assert_eq!(cells.len(), 4);
        assert_eq!((cells[1].i, cells[1].j), (1, 0));
        assert!((cells[1].x_center - 0.75).abs() < 1e-15);
        assert!(cells.iter().all(|c| (c.energy_density - 1.0).abs() < 1e-14));
    }
}
