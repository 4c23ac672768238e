//! Structured Cartesian meshes and per-element field storage.
//!
//! Every field is stored as one contiguous block of values per element, with
//! a single ring of ghost elements around the interior. Element indices run
//! over `-1..=nx` and `-1..=ny`; the interior is `0..nx` by `0..ny`.

use crate::basis::NodeSet1D;
use crate::error::{Error, Result};

/// Exact vector field `B(x, y, t)`, used for Dirichlet ghost data.
pub type VectorFieldFn = dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    DirichletExact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementGrid {
    nx: usize,
    ny: usize,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    dx: f64,
    dy: f64,
    boundary: Boundary,
}

impl ElementGrid {
    pub fn new(
        nx: usize,
        ny: usize,
        domain: (f64, f64, f64, f64),
        boundary: Boundary,
    ) -> Result<Self> {
        let (x0, x1, y0, y1) = domain;
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(
                "element counts must be positive".into(),
            ));
        }
        if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "degenerate domain [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self {
            nx,
            ny,
            x0,
            x1,
            y0,
            y1,
            dx: (x1 - x0) / nx as f64,
            dy: (y1 - y0) / ny as f64,
            boundary,
        })
    }

    /// `n` by `n` elements on the unit square.
    pub fn unit_square(n: usize, boundary: Boundary) -> Result<Self> {
        Self::new(n, n, (0.0, 1.0, 0.0, 1.0), boundary)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn domain(&self) -> (f64, f64, f64, f64) {
        (self.x0, self.x1, self.y0, self.y1)
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn element_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Physical coordinates of the local point `(xi, eta)` of element `(ex, ey)`.
    ///
    /// Written so that a point shared by two elements (e.g. `xi = 1` of one and
    /// `xi = 0` of the next) yields bit-identical coordinates.
    #[inline]
    pub fn physical(&self, ex: isize, ey: isize, xi: f64, eta: f64) -> (f64, f64) {
        (
            self.x0 + (ex as f64 + xi) * self.dx,
            self.y0 + (ey as f64 + eta) * self.dy,
        )
    }

    /// Element containing `(x, y)` and the local coordinates inside it.
    pub fn element_of(&self, x: f64, y: f64) -> Result<((usize, usize), (f64, f64))> {
        if !(x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1) {
            return Err(Error::OutOfDomain { x, y });
        }
        let sx = (x - self.x0) / self.dx;
        let sy = (y - self.y0) / self.dy;
        let ex = (sx.floor() as usize).min(self.nx - 1);
        let ey = (sy.floor() as usize).min(self.ny - 1);
        Ok(((ex, ey), (sx - ex as f64, sy - ey as f64)))
    }
}

/// One block of `block_len` values per element, including a ghost ring.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockField {
    nx: usize,
    ny: usize,
    block_len: usize,
    data: Vec<f64>,
}

impl BlockField {
    pub fn zeros(nx: usize, ny: usize, block_len: usize) -> Self {
        Self {
            nx,
            ny,
            block_len,
            data: vec![0.0; (nx + 2) * (ny + 2) * block_len],
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Storage index of element `(ex, ey)`; valid for `-1..=nx`, `-1..=ny`.
    #[inline]
    pub fn slot(&self, ex: isize, ey: isize) -> usize {
        debug_assert!(ex >= -1 && ex <= self.nx as isize);
        debug_assert!(ey >= -1 && ey <= self.ny as isize);
        (ey + 1) as usize * (self.nx + 2) + (ex + 1) as usize
    }

    /// Element indices of storage slot `s`.
    #[inline]
    pub fn element_at(&self, s: usize) -> (isize, isize) {
        let w = self.nx + 2;
        ((s % w) as isize - 1, (s / w) as isize - 1)
    }

    #[inline]
    pub fn is_interior(&self, ex: isize, ey: isize) -> bool {
        ex >= 0 && ey >= 0 && (ex as usize) < self.nx && (ey as usize) < self.ny
    }

    pub fn slot_count(&self) -> usize {
        (self.nx + 2) * (self.ny + 2)
    }

    #[inline]
    pub fn block(&self, ex: isize, ey: isize) -> &[f64] {
        let s = self.slot(ex, ey) * self.block_len;
        &self.data[s..s + self.block_len]
    }

    #[inline]
    pub fn block_mut(&mut self, ex: isize, ey: isize) -> &mut [f64] {
        let s = self.slot(ex, ey) * self.block_len;
        &mut self.data[s..s + self.block_len]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn interior(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        (0..self.ny as isize).flat_map(move |ey| (0..self.nx as isize).map(move |ex| (ex, ey)))
    }

    pub fn ghosts(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        (-1..=ny)
            .flat_map(move |ey| (-1..=nx).map(move |ex| (ex, ey)))
            .filter(move |&(ex, ey)| !(ex >= 0 && ey >= 0 && ex < nx && ey < ny))
    }

    /// Copy the wrapped interior block into every ghost slot.
    pub fn fill_periodic_ghosts(&mut self) {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let len = self.block_len;
        let ghosts: Vec<_> = self.ghosts().collect();
        for (gx, gy) in ghosts {
            let src = self.slot(gx.rem_euclid(nx), gy.rem_euclid(ny)) * len;
            let dst = self.slot(gx, gy) * len;
            self.data.copy_within(src..src + len, dst);
        }
    }

    pub fn zero_ghosts(&mut self) {
        let len = self.block_len;
        let ghosts: Vec<_> = self.ghosts().collect();
        for (gx, gy) in ghosts {
            let dst = self.slot(gx, gy) * len;
            self.data[dst..dst + len].fill(0.0);
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.block_len == other.block_len
    }
}

/// States that time integrators can combine linearly.
pub trait StateVector: Clone + Send + Sync {
    fn as_slice(&self) -> &[f64];
    fn as_mut_slice(&mut self) -> &mut [f64];
}

impl StateVector for Vec<f64> {
    fn as_slice(&self) -> &[f64] {
        self
    }
    fn as_mut_slice(&mut self) -> &mut [f64] {
        self
    }
}

impl StateVector for BlockField {
    fn as_slice(&self) -> &[f64] {
        &self.data
    }
    fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Magnetic field at the staggered points of the constrained-transport
/// scheme.
///
/// Per element, `Bx` occupies the first `(n+2)(n+1)` values at (flux-x,
/// solution-y) points, index `i*(n+1) + j`; `By` follows with `(n+1)(n+2)`
/// values at (solution-x, flux-y) points, index `i*(n+2) + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StaggeredField {
    degree: usize,
    data: BlockField,
}

impl StaggeredField {
    pub fn zeros(degree: usize, grid: &ElementGrid) -> Self {
        let len = 2 * (degree + 1) * (degree + 2);
        Self {
            degree,
            data: BlockField::zeros(grid.nx(), grid.ny(), len),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn bx_len(&self) -> usize {
        (self.degree + 1) * (self.degree + 2)
    }

    pub fn blocks(&self) -> &BlockField {
        &self.data
    }

    pub fn blocks_mut(&mut self) -> &mut BlockField {
        &mut self.data
    }

    #[inline]
    pub fn bx(&self, ex: isize, ey: isize) -> &[f64] {
        &self.data.block(ex, ey)[..self.bx_len()]
    }

    #[inline]
    pub fn by(&self, ex: isize, ey: isize) -> &[f64] {
        &self.data.block(ex, ey)[self.bx_len()..]
    }

    pub fn bx_mut(&mut self, ex: isize, ey: isize) -> &mut [f64] {
        let len = self.bx_len();
        &mut self.data.block_mut(ex, ey)[..len]
    }

    pub fn by_mut(&mut self, ex: isize, ey: isize) -> &mut [f64] {
        let len = self.bx_len();
        &mut self.data.block_mut(ex, ey)[len..]
    }

    /// Largest mismatch of the normal component across interior faces.
    pub fn max_face_mismatch(&self, grid: &ElementGrid) -> f64 {
        let n = self.degree;
        let periodic = grid.boundary() == Boundary::Periodic;
        let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
        let mut worst = 0.0_f64;
        for (ex, ey) in self.data.interior() {
            if ex + 1 < nx || periodic {
                let right = (ex + 1).rem_euclid(nx);
                let a = self.bx(ex, ey);
                let b = self.bx(right, ey);
                for j in 0..=n {
                    worst = worst.max((a[(n + 1) * (n + 1) + j] - b[j]).abs());
                }
            }
            if ey + 1 < ny || periodic {
                let top = (ey + 1).rem_euclid(ny);
                let a = self.by(ex, ey);
                let b = self.by(ex, top);
                for i in 0..=n {
                    worst = worst.max((a[i * (n + 2) + n + 1] - b[i * (n + 2)]).abs());
                }
            }
        }
        worst
    }

    /// Largest absolute nodal value over interior elements.
    pub fn max_abs(&self) -> f64 {
        self.data
            .interior()
            .flat_map(|(ex, ey)| self.data.block(ex, ey).iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl StateVector for StaggeredField {
    fn as_slice(&self) -> &[f64] {
        self.data.data()
    }
    fn as_mut_slice(&mut self) -> &mut [f64] {
        self.data.data_mut()
    }
}

/// Scalar values (`Az` or `Ez`) on the `(n+2) x (n+2)` flux-point tensor grid
/// of every element, index `i*(n+2) + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerField {
    degree: usize,
    data: BlockField,
}

impl CornerField {
    pub fn zeros(degree: usize, grid: &ElementGrid) -> Self {
        Self {
            degree,
            data: BlockField::zeros(grid.nx(), grid.ny(), (degree + 2) * (degree + 2)),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn blocks(&self) -> &BlockField {
        &self.data
    }

    pub fn blocks_mut(&mut self) -> &mut BlockField {
        &mut self.data
    }

    #[inline]
    pub fn values(&self, ex: isize, ey: isize) -> &[f64] {
        self.data.block(ex, ey)
    }

    pub fn values_mut(&mut self, ex: isize, ey: isize) -> &mut [f64] {
        self.data.block_mut(ex, ey)
    }

    /// Largest disagreement between copies of points shared by neighbouring
    /// interior elements.
    pub fn max_shared_mismatch(&self, grid: &ElementGrid) -> f64 {
        let m = self.degree + 2;
        let periodic = grid.boundary() == Boundary::Periodic;
        let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
        let mut worst = 0.0_f64;
        for (ex, ey) in self.data.interior() {
            let a = self.values(ex, ey);
            if ex + 1 < nx || periodic {
                let b = self.values((ex + 1).rem_euclid(nx), ey);
                for j in 0..m {
                    worst = worst.max((a[(m - 1) * m + j] - b[j]).abs());
                }
            }
            if ey + 1 < ny || periodic {
                let b = self.values(ex, (ey + 1).rem_euclid(ny));
                for i in 0..m {
                    worst = worst.max((a[i * m + m - 1] - b[i * m]).abs());
                }
            }
        }
        worst
    }
}

impl StateVector for CornerField {
    fn as_slice(&self) -> &[f64] {
        self.data.data()
    }
    fn as_mut_slice(&mut self) -> &mut [f64] {
        self.data.data_mut()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgBasisKind {
    /// `(phi_ab, 0)` and `(0, phi_ab)` with tensor Legendre `phi_ab`.
    Tensor,
    /// Locally divergence-free vector basis.
    Ldf,
}

/// Number of locally divergence-free basis vectors of degree `n`.
pub fn ldf_dimension(n: usize) -> Result<usize> {
    match n {
        0 => Ok(2),
        1 => Ok(5),
        2 => Ok(9),
        3 => Ok(14),
        _ => Err(Error::UnsupportedOrder(n)),
    }
}

/// Modal coefficients of a DG field; optionally followed by the `(n+1)^2`
/// coefficients of the cleaning scalar `psi` in every block.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalDGField {
    degree: usize,
    kind: DgBasisKind,
    b_len: usize,
    psi_len: usize,
    data: BlockField,
}

impl ModalDGField {
    pub fn zeros(degree: usize, kind: DgBasisKind, with_psi: bool, grid: &ElementGrid) -> Result<Self> {
        let b_len = match kind {
            DgBasisKind::Tensor => 2 * (degree + 1) * (degree + 1),
            DgBasisKind::Ldf => ldf_dimension(degree)?,
        };
        let psi_len = if with_psi { (degree + 1) * (degree + 1) } else { 0 };
        Ok(Self {
            degree,
            kind,
            b_len,
            psi_len,
            data: BlockField::zeros(grid.nx(), grid.ny(), b_len + psi_len),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> DgBasisKind {
        self.kind
    }

    pub fn b_len(&self) -> usize {
        self.b_len
    }

    pub fn psi_len(&self) -> usize {
        self.psi_len
    }

    pub fn has_psi(&self) -> bool {
        self.psi_len > 0
    }

    pub fn blocks(&self) -> &BlockField {
        &self.data
    }

    pub fn blocks_mut(&mut self) -> &mut BlockField {
        &mut self.data
    }

    pub fn b_coeffs(&self, ex: isize, ey: isize) -> &[f64] {
        &self.data.block(ex, ey)[..self.b_len]
    }

    pub fn b_coeffs_mut(&mut self, ex: isize, ey: isize) -> &mut [f64] {
        let len = self.b_len;
        &mut self.data.block_mut(ex, ey)[..len]
    }

    pub fn psi_coeffs(&self, ex: isize, ey: isize) -> &[f64] {
        &self.data.block(ex, ey)[self.b_len..]
    }

    pub fn psi_coeffs_mut(&mut self, ex: isize, ey: isize) -> &mut [f64] {
        let len = self.b_len;
        &mut self.data.block_mut(ex, ey)[len..]
    }
}

impl StateVector for ModalDGField {
    fn as_slice(&self) -> &[f64] {
        self.data.data()
    }
    fn as_mut_slice(&mut self) -> &mut [f64] {
        self.data.data_mut()
    }
}

/// Populate the ghost ring of a staggered field.
///
/// Periodic grids copy wrapped interior data; `DirichletExact` grids sample
/// `exact` at the ghost elements' staggered points at time `t`.
pub fn exchange_or_fill_ghosts(
    field: &mut StaggeredField,
    grid: &ElementGrid,
    nodes: &NodeSet1D,
    exact: Option<&VectorFieldFn>,
    t: f64,
) -> Result<()> {
    match grid.boundary() {
        Boundary::Periodic => {
            field.blocks_mut().fill_periodic_ghosts();
            Ok(())
        }
        Boundary::DirichletExact => {
            let exact = exact.ok_or_else(|| {
                Error::Config("Dirichlet boundaries need an exact solution".into())
            })?;
            let n = field.degree();
            let xs = nodes.solution_nodes();
            let xf = nodes.flux_nodes();
            let ghosts: Vec<_> = field.blocks().ghosts().collect();
            for (gx, gy) in ghosts {
                let bx = field.bx_mut(gx, gy);
                for i in 0..n + 2 {
                    for j in 0..n + 1 {
                        let (x, y) = grid.physical(gx, gy, xf[i], xs[j]);
                        bx[i * (n + 1) + j] = exact(x, y, t)[0];
                    }
                }
                let by = field.by_mut(gx, gy);
                for i in 0..n + 1 {
                    for j in 0..n + 2 {
                        let (x, y) = grid.physical(gx, gy, xs[i], xf[j]);
                        by[i * (n + 2) + j] = exact(x, y, t)[1];
                    }
                }
            }
            Ok(())
        }
    }
}
