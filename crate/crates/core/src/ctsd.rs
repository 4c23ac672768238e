//! Constrained-transport spectral difference scheme.
//!
//! `Bx` lives at (flux-x, solution-y) points and `By` at (solution-x, flux-y)
//! points of every element. The electric field `Ez` is assembled on the
//! `(n+2) x (n+2)` flux-point grid, made single valued by upwind selection,
//! and its curl updates both components. Because the update is an exact curl
//! of one continuous polynomial per element, the divergence of `B` is zero
//! pointwise and the normal component stays continuous across faces.

use std::sync::Arc;

use rayon::prelude::*;

use crate::ader::{directional_speed, RhsOperator};
use crate::analysis::{ElementwiseField, TensorSamples};
use crate::basis::NodeSet1D;
use crate::error::{Error, Result};
use crate::grid::{
    exchange_or_fill_ghosts, BlockField, Boundary, CornerField, ElementGrid, StaggeredField,
    StateVector, VectorFieldFn,
};

pub type ScalarFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Initial vector potential `Az(x, y)`.
#[derive(Clone)]
pub struct PotentialInit {
    pub name: String,
    pub az: Arc<ScalarFn>,
}

impl PotentialInit {
    pub fn new(name: impl Into<String>, az: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            az: Arc::new(az),
        }
    }
}

#[derive(Clone)]
pub enum VelocityField {
    Constant(f64, f64),
    /// Solid-body rotation `v = (-(y - cy), x - cx)`.
    Rotation { center: (f64, f64) },
    Custom(Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>),
}

impl VelocityField {
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        match self {
            VelocityField::Constant(vx, vy) => [*vx, *vy],
            VelocityField::Rotation { center } => [-(y - center.1), x - center.0],
            VelocityField::Custom(f) => f(x, y),
        }
    }
}

impl std::fmt::Debug for VelocityField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VelocityField::Constant(vx, vy) => write!(f, "Constant({vx}, {vy})"),
            VelocityField::Rotation { center } => write!(f, "Rotation {{ center: {center:?} }}"),
            VelocityField::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Share of the left (or bottom) candidate given the normal velocity.
#[inline]
fn upwind_left(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Interpolation and differentiation tables of degree `n`.
#[derive(Clone, Debug)]
pub struct CtsdOperators {
    n: usize,
    nodes: NodeSet1D,
    /// `(n+2) x (n+1)`: solution basis at flux nodes.
    isf: Vec<f64>,
    /// `(n+1) x (n+2)`: flux basis derivative at solution nodes.
    dfs: Vec<f64>,
    /// `(n+2) x (n+2)`: flux basis derivative at flux nodes.
    dff: Vec<f64>,
}

impl CtsdOperators {
    pub fn new(n: usize) -> Result<Self> {
        let nodes = NodeSet1D::new(n)?;
        let flatten = |m: nalgebra::DMatrix<f64>| {
            let mut out = Vec::with_capacity(m.len());
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    out.push(m[(r, c)]);
                }
            }
            out
        };
        let isf = flatten(nodes.solution_basis().value_matrix(nodes.flux_nodes()));
        let dfs = flatten(nodes.flux_basis().deriv_matrix(nodes.solution_nodes()));
        let dff = flatten(nodes.flux_basis().deriv_matrix(nodes.flux_nodes()));
        Ok(Self {
            n,
            nodes,
            isf,
            dfs,
            dff,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &NodeSet1D {
        &self.nodes
    }

    /// `Bx` and `By` of one element from its corner values of `Az`.
    fn curl_of_corner(&self, az: &[f64], dx: f64, dy: f64, bx: &mut [f64], by: &mut [f64], scale: f64) {
        let (m, s) = (self.n + 2, self.n + 1);
        for i in 0..m {
            for j in 0..s {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += az[i * m + k] * self.dfs[j * m + k];
                }
                bx[i * s + j] = scale * acc / dy;
            }
        }
        for i in 0..s {
            for j in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += self.dfs[i * m + k] * az[k * m + j];
                }
                by[i * m + j] = -scale * acc / dx;
            }
        }
    }

    /// Corner candidates `vy Bx - vx By` of one element.
    fn b_candidates(&self, bx: &[f64], by: &[f64], vel: &[f64], out: &mut [f64]) {
        let (m, s) = (self.n + 2, self.n + 1);
        let mm = m * m;
        for i in 0..m {
            for j in 0..m {
                let mut bxc = 0.0;
                for k in 0..s {
                    bxc += bx[i * s + k] * self.isf[j * s + k];
                }
                let mut byc = 0.0;
                for k in 0..s {
                    byc += self.isf[i * s + k] * by[k * m + j];
                }
                let p = i * m + j;
                out[p] = vel[mm + p] * bxc - vel[p] * byc;
            }
        }
    }

    /// Corner candidates `vx dAz/dx + vy dAz/dy` of one element.
    fn potential_candidates(&self, az: &[f64], vel: &[f64], dx: f64, dy: f64, out: &mut [f64]) {
        let m = self.n + 2;
        let mm = m * m;
        for i in 0..m {
            for j in 0..m {
                let mut ddx = 0.0;
                let mut ddy = 0.0;
                for k in 0..m {
                    ddx += self.dff[i * m + k] * az[k * m + j];
                    ddy += self.dff[j * m + k] * az[i * m + k];
                }
                let p = i * m + j;
                out[p] = vel[p] * ddx / dx + vel[mm + p] * ddy / dy;
            }
        }
    }

    /// `dBx = -dEz/dy`, `dBy = dEz/dx` at the staggered points.
    fn curl_update(&self, ez: &[f64], dx: f64, dy: f64, dbx: &mut [f64], dby: &mut [f64]) {
        self.curl_of_corner(ez, dx, dy, dbx, dby, -1.0);
    }
}

/// Magnetic fluxes through the segments joining the element's lower-left
/// corner lines to every corner point.
#[derive(Clone, Debug)]
pub struct MagneticFluxes {
    degree: usize,
    phi_x: CornerField,
    phi_y: CornerField,
}

impl MagneticFluxes {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn phi_x(&self) -> &CornerField {
        &self.phi_x
    }

    pub fn phi_y(&self) -> &CornerField {
        &self.phi_y
    }

    pub fn phi_x_mut(&mut self) -> &mut CornerField {
        &mut self.phi_x
    }

    pub fn phi_y_mut(&mut self) -> &mut CornerField {
        &mut self.phi_y
    }

    /// Largest violation of the discrete circulation identity
    /// `phi_x(i,j) + phi_y(i,j) - phi_x(0,j) - phi_y(i,0) = 0`.
    pub fn circulation_residual(&self) -> f64 {
        let m = self.degree + 2;
        let mut worst = 0.0_f64;
        for (ex, ey) in self.phi_x.blocks().interior() {
            let px = self.phi_x.values(ex, ey);
            let py = self.phi_y.values(ex, ey);
            for i in 0..m {
                for j in 0..m {
                    let r = px[i * m + j] + py[i * m + j] - px[j] - py[i * m];
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    fn scale(&self) -> f64 {
        let mut s = 0.0_f64;
        for (ex, ey) in self.phi_x.blocks().interior() {
            for v in self.phi_x.values(ex, ey).iter().chain(self.phi_y.values(ex, ey)) {
                s = s.max(v.abs());
            }
        }
        s
    }
}

/// Fluxes `phi_x(i,j) = Az(i,j) - Az(i,0)` and `phi_y(i,j) = Az(0,j) - Az(i,j)`.
pub fn fluxes_from_potential(az: &CornerField) -> MagneticFluxes {
    let n = az.degree();
    let m = n + 2;
    let mut phi_x = az.clone();
    let mut phi_y = az.clone();
    for (ex, ey) in az.blocks().interior() {
        let a = az.values(ex, ey);
        let px = phi_x.values_mut(ex, ey);
        for i in 0..m {
            for j in 0..m {
                px[i * m + j] = a[i * m + j] - a[i * m];
            }
        }
        let py = phi_y.values_mut(ex, ey);
        for i in 0..m {
            for j in 0..m {
                py[i * m + j] = a[j] - a[i * m + j];
            }
        }
    }
    phi_x.blocks_mut().zero_ghosts();
    phi_y.blocks_mut().zero_ghosts();
    MagneticFluxes {
        degree: n,
        phi_x,
        phi_y,
    }
}

/// Evaluated `Bx`, `By` and divergence of one element on a tensor point set.
fn sample_staggered(
    nodes: &NodeSet1D,
    bx: &[f64],
    by: &[f64],
    dx: f64,
    dy: f64,
    xs: &[f64],
    ys: &[f64],
) -> TensorSamples {
    let n = nodes.degree();
    let (m, s) = (n + 2, n + 1);
    let fb = nodes.flux_basis();
    let sb = nodes.solution_basis();
    let fx: Vec<Vec<f64>> = xs.iter().map(|&x| fb.values_at(x)).collect();
    let dfx: Vec<Vec<f64>> = xs.iter().map(|&x| fb.derivatives_at(x)).collect();
    let sx: Vec<Vec<f64>> = xs.iter().map(|&x| sb.values_at(x)).collect();
    let fy: Vec<Vec<f64>> = ys.iter().map(|&y| fb.values_at(y)).collect();
    let dfy: Vec<Vec<f64>> = ys.iter().map(|&y| fb.derivatives_at(y)).collect();
    let sy: Vec<Vec<f64>> = ys.iter().map(|&y| sb.values_at(y)).collect();
    let (na, nb) = (xs.len(), ys.len());
    let mut out = TensorSamples::zeros(na * nb);
    // Contract along y first.
    let mut tx = vec![0.0; m * nb];
    for i in 0..m {
        for b in 0..nb {
            let mut acc = 0.0;
            for j in 0..s {
                acc += bx[i * s + j] * sy[b][j];
            }
            tx[i * nb + b] = acc;
        }
    }
    let mut ty = vec![0.0; s * nb];
    let mut tdy = vec![0.0; s * nb];
    for i in 0..s {
        for b in 0..nb {
            let (mut acc, mut dacc) = (0.0, 0.0);
            for j in 0..m {
                acc += by[i * m + j] * fy[b][j];
                dacc += by[i * m + j] * dfy[b][j];
            }
            ty[i * nb + b] = acc;
            tdy[i * nb + b] = dacc;
        }
    }
    for a in 0..na {
        for b in 0..nb {
            let (mut vbx, mut dbx) = (0.0, 0.0);
            for i in 0..m {
                vbx += fx[a][i] * tx[i * nb + b];
                dbx += dfx[a][i] * tx[i * nb + b];
            }
            let (mut vby, mut dby) = (0.0, 0.0);
            for i in 0..s {
                vby += sx[a][i] * ty[i * nb + b];
                dby += sx[a][i] * tdy[i * nb + b];
            }
            let p = a * nb + b;
            out.bx[p] = vbx;
            out.by[p] = vby;
            out.div[p] = dbx / dx + dby / dy;
        }
    }
    out
}

/// A staggered field viewed as element-wise polynomials, for diagnostics.
pub struct StaggeredView<'a> {
    pub grid: &'a ElementGrid,
    pub nodes: &'a NodeSet1D,
    pub field: &'a StaggeredField,
}

impl ElementwiseField for StaggeredView<'_> {
    fn grid(&self) -> &ElementGrid {
        self.grid
    }

    fn degree(&self) -> usize {
        self.field.degree()
    }

    fn control_volume_edges(&self) -> Vec<f64> {
        self.nodes.flux_nodes().to_vec()
    }

    fn sample(&self, ex: usize, ey: usize, xs: &[f64], ys: &[f64]) -> TensorSamples {
        let (ex, ey) = (ex as isize, ey as isize);
        sample_staggered(
            self.nodes,
            self.field.bx(ex, ey),
            self.field.by(ex, ey),
            self.grid.dx(),
            self.grid.dy(),
            xs,
            ys,
        )
    }
}

/// The semi-discrete constrained-transport operator on one grid.
pub struct CtsdScheme {
    grid: ElementGrid,
    ops: CtsdOperators,
    velocity: VelocityField,
    /// Per block: `vx` then `vy` at the `(n+2)^2` corner points.
    corner_velocity: BlockField,
    exact: Option<Arc<VectorFieldFn>>,
}

impl CtsdScheme {
    pub fn new(
        grid: ElementGrid,
        n: usize,
        velocity: VelocityField,
        exact: Option<Arc<VectorFieldFn>>,
    ) -> Result<Self> {
        if grid.boundary() == Boundary::DirichletExact && exact.is_none() {
            return Err(Error::Config(
                "Dirichlet boundaries need an exact solution".into(),
            ));
        }
        let ops = CtsdOperators::new(n)?;
        let m = n + 2;
        let mut corner_velocity = BlockField::zeros(grid.nx(), grid.ny(), 2 * m * m);
        let xf = ops.nodes.flux_nodes().to_vec();
        for s in 0..corner_velocity.slot_count() {
            let (ex, ey) = corner_velocity.element_at(s);
            let block = corner_velocity.block_mut(ex, ey);
            for i in 0..m {
                for j in 0..m {
                    let (x, y) = grid.physical(ex, ey, xf[i], xf[j]);
                    let v = velocity.eval(x, y);
                    block[i * m + j] = v[0];
                    block[m * m + i * m + j] = v[1];
                }
            }
        }
        Ok(Self {
            grid,
            ops,
            velocity,
            corner_velocity,
            exact,
        })
    }

    pub fn grid(&self) -> &ElementGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.ops.n
    }

    pub fn nodes(&self) -> &NodeSet1D {
        &self.ops.nodes
    }

    pub fn velocity(&self) -> &VelocityField {
        &self.velocity
    }

    pub fn view<'a>(&'a self, field: &'a StaggeredField) -> StaggeredView<'a> {
        StaggeredView {
            grid: &self.grid,
            nodes: &self.ops.nodes,
            field,
        }
    }

    /// Largest speed: exact for constant velocity, sampled at every corner
    /// point (ghosts included) otherwise.
    pub fn vmax(&self) -> f64 {
        match self.velocity {
            VelocityField::Constant(vx, vy) => vx.hypot(vy),
            _ => {
                let mm = (self.ops.n + 2) * (self.ops.n + 2);
                self.corner_velocity
                    .data()
                    .chunks(2 * mm)
                    .flat_map(|b| (0..mm).map(move |p| b[p].hypot(b[mm + p])))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Largest directional speed over the same samples as `vmax`.
    pub fn cfl_speed(&self) -> f64 {
        match self.velocity {
            VelocityField::Constant(vx, vy) => directional_speed(&self.grid, vx, vy),
            _ => {
                let mm = (self.ops.n + 2) * (self.ops.n + 2);
                self.corner_velocity
                    .data()
                    .chunks(2 * mm)
                    .flat_map(|b| (0..mm).map(move |p| directional_speed(&self.grid, b[p], b[mm + p])))
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn stable_dt(&self, courant: f64) -> Result<f64> {
        crate::ader::cfl_dt(&self.grid, self.cfl_speed(), self.ops.n, courant)
    }

    /// Local coordinate of corner index `i` in element `e`, wrapped onto the
    /// first element for the last point of a periodic direction.
    fn corner_sample_point(&self, ex: isize, ey: isize, i: usize, j: usize) -> (f64, f64) {
        let m = self.ops.n + 2;
        let xf = self.ops.nodes.flux_nodes();
        let periodic = self.grid.boundary() == Boundary::Periodic;
        let (mut gx, mut xi) = (ex, xf[i]);
        let (mut gy, mut eta) = (ey, xf[j]);
        if periodic && i == m - 1 && ex == self.grid.nx() as isize - 1 {
            gx = 0;
            xi = 0.0;
        }
        if periodic && j == m - 1 && ey == self.grid.ny() as isize - 1 {
            gy = 0;
            eta = 0.0;
        }
        self.grid.physical(gx, gy, xi, eta)
    }

    /// Sample `Az` at every corner point. Periodic ghosts are filled.
    pub fn sample_potential(&self, az: &ScalarFn) -> CornerField {
        let m = self.ops.n + 2;
        let mut field = CornerField::zeros(self.ops.n, &self.grid);
        for (ex, ey) in field.blocks().interior().collect::<Vec<_>>() {
            for i in 0..m {
                for j in 0..m {
                    let (x, y) = self.corner_sample_point(ex, ey, i, j);
                    field.values_mut(ex, ey)[i * m + j] = az(x, y);
                }
            }
        }
        if self.grid.boundary() == Boundary::Periodic {
            field.blocks_mut().fill_periodic_ghosts();
        }
        field
    }

    /// `B = (dAz/dy, -dAz/dx)` of the per-element corner interpolant.
    pub fn staggered_from_corner(&self, az: &CornerField) -> StaggeredField {
        let mut b = StaggeredField::zeros(self.ops.n, &self.grid);
        let (dx, dy) = (self.grid.dx(), self.grid.dy());
        let bx_len = b.bx_len();
        for (ex, ey) in az.blocks().interior().collect::<Vec<_>>() {
            let block = b.blocks_mut().block_mut(ex, ey);
            let (bx, by) = block.split_at_mut(bx_len);
            self.ops.curl_of_corner(az.values(ex, ey), dx, dy, bx, by, 1.0);
        }
        b
    }

    pub fn init_from_potential(&self, init: &PotentialInit) -> (CornerField, StaggeredField) {
        let az = self.sample_potential(init.az.as_ref());
        let b = self.staggered_from_corner(&az);
        (az, b)
    }

    /// Staggered field from magnetic fluxes, rejecting fluxes that violate
    /// the circulation identity.
    pub fn reconstruct_b(&self, fluxes: &MagneticFluxes) -> Result<StaggeredField> {
        let n = self.ops.n;
        if fluxes.degree() != n {
            return Err(Error::InvalidArgument(format!(
                "flux degree {} does not match scheme degree {n}",
                fluxes.degree()
            )));
        }
        let residual = fluxes.circulation_residual();
        if residual > 1e-8 * fluxes.scale().max(1.0) {
            return Err(Error::InconsistentInput(format!(
                "magnetic fluxes violate the circulation identity by {residual:e}"
            )));
        }
        let (m, s) = (n + 2, n + 1);
        let (dx, dy) = (self.grid.dx(), self.grid.dy());
        let dfs = &self.ops.dfs;
        let mut b = StaggeredField::zeros(n, &self.grid);
        for (ex, ey) in fluxes.phi_x.blocks().interior() {
            let px = fluxes.phi_x.values(ex, ey);
            let bx = b.bx_mut(ex, ey);
            for i in 0..m {
                for j in 0..s {
                    let mut acc = 0.0;
                    for k in 0..m {
                        acc += px[i * m + k] * dfs[j * m + k];
                    }
                    bx[i * s + j] = acc / dy;
                }
            }
            let py = fluxes.phi_y.values(ex, ey);
            let by = b.by_mut(ex, ey);
            for i in 0..s {
                for j in 0..m {
                    let mut acc = 0.0;
                    for k in 0..m {
                        acc += dfs[i * m + k] * py[k * m + j];
                    }
                    by[i * m + j] = acc / dx;
                }
            }
        }
        Ok(b)
    }

    /// `dBx/dx + dBy/dy` of the element polynomial containing `(x, y)`.
    pub fn pointwise_divergence(&self, b: &StaggeredField, x: f64, y: f64) -> Result<f64> {
        let ((ex, ey), (xi, eta)) = self.grid.element_of(x, y)?;
        Ok(self.view(b).sample(ex, ey, &[xi], &[eta]).div[0])
    }

    pub fn fill_ghosts(&self, b: &mut StaggeredField, t: f64) -> Result<()> {
        exchange_or_fill_ghosts(b, &self.grid, &self.ops.nodes, self.exact.as_deref(), t)
    }

    /// Make the candidate field single valued at every interior corner point.
    fn resolve(&self, cand: &BlockField) -> CornerField {
        let n = self.ops.n;
        let m = n + 2;
        let mm = m * m;
        let mut ez = CornerField::zeros(n, &self.grid);
        let nx = self.grid.nx() + 2;
        let vel = &self.corner_velocity;
        ez.blocks_mut()
            .data_mut()
            .par_chunks_mut(mm)
            .enumerate()
            .for_each(|(slot, out)| {
                let ex = (slot % nx) as isize - 1;
                let ey = (slot / nx) as isize - 1;
                if !cand.is_interior(ex, ey) {
                    return;
                }
                let v = vel.block(ex, ey);
                for i in 0..m {
                    for j in 0..m {
                        let p = i * m + j;
                        let wl = upwind_left(v[p]);
                        let wb = upwind_left(v[mm + p]);
                        let (xs, nxs) = if i == 0 {
                            ([(-1, m - 1, wl), (0, 0, 1.0 - wl)], 2)
                        } else if i == m - 1 {
                            ([(0, m - 1, wl), (1, 0, 1.0 - wl)], 2)
                        } else {
                            ([(0, i, 1.0), (0, 0, 0.0)], 1)
                        };
                        let (ys, nys) = if j == 0 {
                            ([(-1, m - 1, wb), (0, 0, 1.0 - wb)], 2)
                        } else if j == m - 1 {
                            ([(0, m - 1, wb), (1, 0, 1.0 - wb)], 2)
                        } else {
                            ([(0, j, 1.0), (0, 0, 0.0)], 1)
                        };
                        let mut acc = 0.0;
                        for &(ox, ii, wx) in &xs[..nxs] {
                            if wx == 0.0 {
                                continue;
                            }
                            for &(oy, jj, wy) in &ys[..nys] {
                                if wy == 0.0 {
                                    continue;
                                }
                                acc += wx * wy * cand.block(ex + ox, ey + oy)[ii * m + jj];
                            }
                        }
                        out[p] = acc;
                    }
                }
            });
        ez
    }

    /// Single-valued `Ez = vy Bx - vx By` at every corner point. Fills the
    /// ghost data of `b` for time `t` first.
    pub fn assemble_electric_field(&self, b: &mut StaggeredField, t: f64) -> Result<CornerField> {
        self.fill_ghosts(b, t)?;
        let m = self.ops.n + 2;
        let periodic = self.grid.boundary() == Boundary::Periodic;
        let mut cand = BlockField::zeros(self.grid.nx(), self.grid.ny(), m * m);
        let nx = self.grid.nx() + 2;
        let bx_len = b.bx_len();
        let bref = &*b;
        let vel = &self.corner_velocity;
        cand.data_mut()
            .par_chunks_mut(m * m)
            .enumerate()
            .for_each(|(slot, out)| {
                let ex = (slot % nx) as isize - 1;
                let ey = (slot / nx) as isize - 1;
                if periodic && !vel.is_interior(ex, ey) {
                    return;
                }
                let block = bref.blocks().block(ex, ey);
                let (bx, by) = block.split_at(bx_len);
                self.ops.b_candidates(bx, by, vel.block(ex, ey), out);
            });
        if periodic {
            cand.fill_periodic_ghosts();
        }
        Ok(self.resolve(&cand))
    }

    /// Time derivative of the staggered field from a single-valued `Ez`.
    pub fn curl_rhs(&self, ez: &CornerField, out: &mut StaggeredField) {
        let (dx, dy) = (self.grid.dx(), self.grid.dy());
        let bx_len = out.bx_len();
        let block_len = out.blocks().block_len();
        let nx = self.grid.nx() + 2;
        let ezb = ez.blocks();
        out.blocks_mut()
            .data_mut()
            .par_chunks_mut(block_len)
            .enumerate()
            .for_each(|(slot, block)| {
                let ex = (slot % nx) as isize - 1;
                let ey = (slot / nx) as isize - 1;
                if !ezb.is_interior(ex, ey) {
                    block.fill(0.0);
                    return;
                }
                let (dbx, dby) = block.split_at_mut(bx_len);
                self.ops.curl_update(ezb.block(ex, ey), dx, dy, dbx, dby);
            });
    }

    /// `dAz/dt = -Ez` with the same upwind selection as the field update.
    pub fn potential_rhs(&self, az: &mut CornerField, out: &mut CornerField) -> Result<()> {
        if self.grid.boundary() != Boundary::Periodic {
            return Err(Error::Config(
                "the vector-potential form supports periodic boundaries only".into(),
            ));
        }
        az.blocks_mut().fill_periodic_ghosts();
        let m = self.ops.n + 2;
        let (dx, dy) = (self.grid.dx(), self.grid.dy());
        let mut cand = BlockField::zeros(self.grid.nx(), self.grid.ny(), m * m);
        let nx = self.grid.nx() + 2;
        let azb = az.blocks();
        let vel = &self.corner_velocity;
        cand.data_mut()
            .par_chunks_mut(m * m)
            .enumerate()
            .for_each(|(slot, o)| {
                let ex = (slot % nx) as isize - 1;
                let ey = (slot / nx) as isize - 1;
                if !vel.is_interior(ex, ey) {
                    return;
                }
                self.ops
                    .potential_candidates(azb.block(ex, ey), vel.block(ex, ey), dx, dy, o);
            });
        cand.fill_periodic_ghosts();
        let ez = self.resolve(&cand);
        for (o, e) in out.as_mut_slice().iter_mut().zip(ez.blocks().data()) {
            *o = -e;
        }
        Ok(())
    }
}

impl RhsOperator<StaggeredField> for CtsdScheme {
    fn rhs(&self, u: &mut StaggeredField, t: f64, out: &mut StaggeredField) -> Result<()> {
        let ez = self.assemble_electric_field(u, t)?;
        self.curl_rhs(&ez, out);
        Ok(())
    }

    fn is_autonomous(&self) -> bool {
        self.grid.boundary() == Boundary::Periodic
    }
}

impl RhsOperator<CornerField> for CtsdScheme {
    fn rhs(&self, u: &mut CornerField, _t: f64, out: &mut CornerField) -> Result<()> {
        self.potential_rhs(u, out)
    }
}
