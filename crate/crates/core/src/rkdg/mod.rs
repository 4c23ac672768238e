//! Modal discontinuous Galerkin schemes for the induction equation in
//! divergence form, used as a baseline for the constrained-transport solver.
//!
//! Three variants share one operator: the traditional tensor Legendre basis,
//! the locally divergence-free basis of [`ldf`], and hyperbolic divergence
//! cleaning with an extra scalar `psi`. Boundaries are periodic.

pub mod ldf;
pub mod ssp;

use rayon::prelude::*;

use crate::ader::{directional_speed, RhsOperator};
use crate::analysis::{ElementwiseField, TensorSamples};
use crate::basis::{gauss_legendre, orthonormal_legendre};
use crate::ctsd::VelocityField;
use crate::error::{Error, Result};
use crate::grid::{Boundary, DgBasisKind, ElementGrid, ModalDGField};

pub use ldf::LdfBasis;
pub use ssp::{ssp_order_for_degree, ssp_rk_step};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgVariant {
    Traditional,
    Ldf,
    DivClean,
}

impl DgVariant {
    pub fn basis_kind(self) -> DgBasisKind {
        match self {
            DgVariant::Ldf => DgBasisKind::Ldf,
            _ => DgBasisKind::Tensor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CleaningParams {
    pub c_h: f64,
    pub c_p2: f64,
}

impl CleaningParams {
    pub fn new(c_h: f64, c_p2: f64) -> Result<Self> {
        if !(c_h > 0.0 && c_h.is_finite() && c_p2 > 0.0 && c_p2.is_finite()) {
            return Err(Error::Config(format!(
                "cleaning needs c_h > 0 and c_p^2 > 0, got {c_h} and {c_p2}"
            )));
        }
        Ok(Self { c_h, c_p2 })
    }

    /// `c_h = 2 vmax`, `c_p^2 = 0.8 c_h dx`.
    pub fn defaults(vmax: f64, dx: f64) -> Result<Self> {
        let c_h = 2.0 * vmax;
        Self::new(c_h, 0.8 * c_h * dx)
    }

    /// Factor applied to `psi` by the exact parabolic substep.
    pub fn damping_factor(&self, dt: f64) -> f64 {
        (-self.c_h * self.c_h / self.c_p2 * dt).exp()
    }
}

/// `dt = C / (2n + 1) * min(dx, dy) / max(speed, c_h)` with `speed` from
/// `directional_speed`.
pub fn cfl_dt_dg(grid: &ElementGrid, vmax: f64, n: usize, courant: f64, c_h: Option<f64>) -> Result<f64> {
    if !(vmax > 0.0) || !vmax.is_finite() {
        return Err(Error::Config(format!("maximum speed must be positive, got {vmax}")));
    }
    if !(courant > 0.0) {
        return Err(Error::Config(format!("Courant number must be positive, got {courant}")));
    }
    let speed = vmax.max(c_h.unwrap_or(0.0));
    Ok(courant / (2 * n + 1) as f64 * grid.dx().min(grid.dy()) / speed)
}

#[derive(Clone, Debug)]
enum VectorBasis {
    Tensor(usize),
    Ldf(LdfBasis),
}

impl VectorBasis {
    fn len(&self) -> usize {
        match self {
            VectorBasis::Tensor(n) => 2 * (n + 1) * (n + 1),
            VectorBasis::Ldf(b) => b.len(),
        }
    }

    /// `[b1, b2, d b1/d xi, d b1/d eta, d b2/d xi, d b2/d eta]` per element.
    fn eval(&self, xi: f64, eta: f64, out: &mut [[f64; 6]]) {
        match self {
            VectorBasis::Tensor(n) => {
                let mut s = vec![[0.0; 3]; (n + 1) * (n + 1)];
                scalar_basis(*n, xi, eta, &mut s);
                let m = s.len();
                for (k, v) in s.iter().enumerate() {
                    out[k] = [v[0], 0.0, v[1], v[2], 0.0, 0.0];
                    out[m + k] = [0.0, v[0], 0.0, 0.0, v[1], v[2]];
                }
            }
            VectorBasis::Ldf(b) => {
                b.eval(2.0 * xi - 1.0, 2.0 * eta - 1.0, out);
                for o in out.iter_mut().take(b.len()) {
                    for d in &mut o[2..] {
                        *d *= 2.0;
                    }
                }
            }
        }
    }
}

/// Tensor Legendre `phi_ab(xi, eta)` with its two derivatives, index `a*(n+1)+b`.
fn scalar_basis(n: usize, xi: f64, eta: f64, out: &mut [[f64; 3]]) {
    let mut px = vec![0.0; n + 1];
    let mut dpx = vec![0.0; n + 1];
    let mut py = vec![0.0; n + 1];
    let mut dpy = vec![0.0; n + 1];
    orthonormal_legendre(xi, &mut px, &mut dpx);
    orthonormal_legendre(eta, &mut py, &mut dpy);
    for a in 0..=n {
        for b in 0..=n {
            out[a * (n + 1) + b] = [px[a] * py[b], dpx[a] * py[b], px[a] * dpy[b]];
        }
    }
}

const LEFT: usize = 0;
const RIGHT: usize = 1;
const BOTTOM: usize = 2;
const TOP: usize = 3;

fn face_point(face: usize, s: f64) -> (f64, f64) {
    match face {
        LEFT => (0.0, s),
        RIGHT => (1.0, s),
        BOTTOM => (s, 0.0),
        _ => (s, 1.0),
    }
}

/// The DG operator of one variant on one periodic grid.
pub struct DgScheme {
    grid: ElementGrid,
    n: usize,
    variant: DgVariant,
    basis: VectorBasis,
    velocity: VelocityField,
    cleaning: Option<CleaningParams>,
    q: usize,
    gx: Vec<f64>,
    gw: Vec<f64>,
    nb: usize,
    ns: usize,
    /// `[p * nb + k]` with volume point `p = a*q + b`.
    vol_b: Vec<[f64; 6]>,
    vol_s: Vec<[f64; 3]>,
    /// Per face: `[j * nb + k]`, `(b1, b2)`.
    face_b: [Vec<[f64; 2]>; 4],
    face_s: [Vec<f64>; 4],
    /// Per interior element `e = ey*nx + ex`: `q^2` volume velocities.
    vel_vol: Vec<[f64; 2]>,
    /// Per element: right face then top face, `q` points each.
    vel_face: Vec<[f64; 2]>,
}

impl DgScheme {
    pub fn new(
        grid: ElementGrid,
        n: usize,
        variant: DgVariant,
        velocity: VelocityField,
        cleaning: Option<CleaningParams>,
    ) -> Result<Self> {
        if grid.boundary() != Boundary::Periodic {
            return Err(Error::Config("DG schemes support periodic boundaries only".into()));
        }
        let basis = match variant {
            DgVariant::Ldf => {
                ldf::check_degree(n)?;
                if (grid.dx() - grid.dy()).abs() > 1e-14 * grid.dx() {
                    return Err(Error::Config(
                        "the divergence-free basis needs square elements".into(),
                    ));
                }
                VectorBasis::Ldf(LdfBasis::new(n)?)
            }
            _ => VectorBasis::Tensor(n),
        };
        let cleaning = match variant {
            DgVariant::DivClean => Some(cleaning.ok_or_else(|| {
                Error::Config("divergence cleaning needs c_h and c_p^2".into())
            })?),
            _ => None,
        };
        let q = n + 2;
        let (gx, gw) = gauss_legendre(q)?;
        let nb = basis.len();
        let ns = (n + 1) * (n + 1);

        let mut vol_b = vec![[0.0; 6]; q * q * nb];
        let mut vol_s = vec![[0.0; 3]; q * q * ns];
        for a in 0..q {
            for b in 0..q {
                let p = a * q + b;
                basis.eval(gx[a], gx[b], &mut vol_b[p * nb..(p + 1) * nb]);
                scalar_basis(n, gx[a], gx[b], &mut vol_s[p * ns..(p + 1) * ns]);
            }
        }
        let mut face_b: [Vec<[f64; 2]>; 4] = Default::default();
        let mut face_s: [Vec<f64>; 4] = Default::default();
        let mut tmp_b = vec![[0.0; 6]; nb];
        let mut tmp_s = vec![[0.0; 3]; ns];
        for f in 0..4 {
            for &s in &gx {
                let (xi, eta) = face_point(f, s);
                basis.eval(xi, eta, &mut tmp_b);
                scalar_basis(n, xi, eta, &mut tmp_s);
                face_b[f].extend(tmp_b.iter().map(|v| [v[0], v[1]]));
                face_s[f].extend(tmp_s.iter().map(|v| v[0]));
            }
        }

        let (nx, ny) = (grid.nx(), grid.ny());
        let mut vel_vol = Vec::with_capacity(nx * ny * q * q);
        let mut vel_face = Vec::with_capacity(nx * ny * 2 * q);
        for ey in 0..ny as isize {
            for ex in 0..nx as isize {
                for a in 0..q {
                    for b in 0..q {
                        let (x, y) = grid.physical(ex, ey, gx[a], gx[b]);
                        vel_vol.push(velocity.eval(x, y));
                    }
                }
                for f in [RIGHT, TOP] {
                    for &s in &gx {
                        let (xi, eta) = face_point(f, s);
                        let (x, y) = grid.physical(ex, ey, xi, eta);
                        vel_face.push(velocity.eval(x, y));
                    }
                }
            }
        }

        Ok(Self {
            grid,
            n,
            variant,
            basis,
            velocity,
            cleaning,
            q,
            gx,
            gw,
            nb,
            ns,
            vol_b,
            vol_s,
            face_b,
            face_s,
            vel_vol,
            vel_face,
        })
    }

    pub fn grid(&self) -> &ElementGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> DgVariant {
        self.variant
    }

    pub fn velocity(&self) -> &VelocityField {
        &self.velocity
    }

    pub fn cleaning(&self) -> Option<CleaningParams> {
        self.cleaning
    }

    pub fn ssp_order(&self) -> usize {
        ssp_order_for_degree(self.n)
    }

    /// Largest speed over the volume and face quadrature points.
    pub fn vmax(&self) -> f64 {
        match self.velocity {
            VelocityField::Constant(vx, vy) => vx.hypot(vy),
            _ => self
                .vel_vol
                .iter()
                .chain(&self.vel_face)
                .map(|v| v[0].hypot(v[1]))
                .fold(0.0, f64::max),
        }
    }

    /// Largest directional speed, each direction raised to `c_h` when
    /// cleaning is active.
    pub fn cfl_speed(&self) -> f64 {
        let c_h = self.cleaning.map_or(0.0, |c| c.c_h);
        let speed = |v: [f64; 2]| directional_speed(&self.grid, v[0].abs().max(c_h), v[1].abs().max(c_h));
        match self.velocity {
            VelocityField::Constant(vx, vy) => speed([vx, vy]),
            _ => self.vel_vol.iter().chain(&self.vel_face).map(|&v| speed(v)).fold(0.0, f64::max),
        }
    }

    pub fn stable_dt(&self, courant: f64) -> Result<f64> {
        cfl_dt_dg(&self.grid, self.cfl_speed(), self.n, courant, None)
    }

    pub fn zeros(&self) -> Result<ModalDGField> {
        ModalDGField::zeros(
            self.n,
            self.variant.basis_kind(),
            self.variant == DgVariant::DivClean,
            &self.grid,
        )
    }

    /// L2 projection of `b(x, y)` using `subcells^2` Gauss blocks per element.
    pub fn project(
        &self,
        b: &(dyn Fn(f64, f64) -> [f64; 2] + Sync),
        subcells: usize,
    ) -> Result<ModalDGField> {
        if subcells == 0 {
            return Err(Error::InvalidArgument("need at least one subcell".into()));
        }
        let mut field = self.zeros()?;
        let (nx, nb, q) = (self.grid.nx(), self.nb, self.q);
        let block_len = field.blocks().block_len();
        let s = subcells as f64;
        field
            .blocks_mut()
            .data_mut()
            .par_chunks_mut(block_len)
            .enumerate()
            .for_each(|(slot, block)| {
                let Some((ex, ey)) = interior_of(slot, nx, self.grid.ny()) else {
                    return;
                };
                let mut vals = vec![[0.0; 6]; nb];
                for si in 0..subcells {
                    for sj in 0..subcells {
                        for a in 0..q {
                            for c in 0..q {
                                let xi = (si as f64 + self.gx[a]) / s;
                                let eta = (sj as f64 + self.gx[c]) / s;
                                let w = self.gw[a] * self.gw[c] / (s * s);
                                let (x, y) = self.grid.physical(ex as isize, ey as isize, xi, eta);
                                let v = b(x, y);
                                self.basis.eval(xi, eta, &mut vals);
                                for k in 0..nb {
                                    block[k] += w * (v[0] * vals[k][0] + v[1] * vals[k][1]);
                                }
                            }
                        }
                    }
                }
            });
        Ok(field)
    }

    fn element_index(&self, ex: usize, ey: usize) -> usize {
        ey * self.grid.nx() + ex
    }

    /// `(Bx, By, psi)` on the four faces of every element, `[(e*4 + f)*q + j]`.
    fn traces(&self, u: &ModalDGField) -> Vec<[f64; 3]> {
        let (nx, ny, q, nb, ns) = (self.grid.nx(), self.grid.ny(), self.q, self.nb, self.ns);
        let mut out = vec![[0.0; 3]; nx * ny * 4 * q];
        out.par_chunks_mut(4 * q).enumerate().for_each(|(e, tr)| {
            let (ex, ey) = ((e % nx) as isize, (e / nx) as isize);
            let c = u.b_coeffs(ex, ey);
            let psi = u.psi_coeffs(ex, ey);
            for f in 0..4 {
                for j in 0..q {
                    let mut t = [0.0; 3];
                    let fb = &self.face_b[f][j * nb..(j + 1) * nb];
                    for k in 0..nb {
                        t[0] += c[k] * fb[k][0];
                        t[1] += c[k] * fb[k][1];
                    }
                    let fs = &self.face_s[f][j * ns..(j + 1) * ns];
                    for m in 0..psi.len() {
                        t[2] += psi[m] * fs[m];
                    }
                    tr[f * q + j] = t;
                }
            }
        });
        out
    }

    fn east(&self, e: usize) -> usize {
        let nx = self.grid.nx();
        let (ex, ey) = (e % nx, e / nx);
        self.element_index((ex + 1) % nx, ey)
    }

    fn north(&self, e: usize) -> usize {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (ex, ey) = (e % nx, e / nx);
        self.element_index(ex, (ey + 1) % ny)
    }

    fn west(&self, e: usize) -> usize {
        let nx = self.grid.nx();
        let (ex, ey) = (e % nx, e / nx);
        self.element_index((ex + nx - 1) % nx, ey)
    }

    fn south(&self, e: usize) -> usize {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (ex, ey) = (e % nx, e / nx);
        self.element_index(ex, (ey + ny - 1) % ny)
    }

    /// Numerical flux vector on the right and top face of every element,
    /// `[(e*2 + side)*q + j]`.
    fn induction_fluxes(&self, tr: &[[f64; 3]]) -> Vec<[f64; 2]> {
        let (nx, ny, q) = (self.grid.nx(), self.grid.ny(), self.q);
        let mut out = vec![[0.0; 2]; nx * ny * 2 * q];
        out.par_chunks_mut(2 * q).enumerate().for_each(|(e, fl)| {
            let (east, north) = (self.east(e), self.north(e));
            for j in 0..q {
                let v = self.vel_face[(e * 2) * q + j];
                let l = tr[(e * 4 + RIGHT) * q + j];
                let r = tr[(east * 4 + LEFT) * q + j];
                fl[j] = induction_flux(v, 0, l, r);
                let v = self.vel_face[(e * 2 + 1) * q + j];
                let l = tr[(e * 4 + TOP) * q + j];
                let r = tr[(north * 4 + BOTTOM) * q + j];
                fl[q + j] = induction_flux(v, 1, l, r);
            }
        });
        out
    }

    /// Rusanov fluxes `(F_Bn, F_psi)` of the cleaning subsystem, same layout
    /// as [`Self::induction_fluxes`].
    fn cleaning_fluxes(&self, tr: &[[f64; 3]], ch: f64) -> Vec<[f64; 2]> {
        let (nx, ny, q) = (self.grid.nx(), self.grid.ny(), self.q);
        let mut out = vec![[0.0; 2]; nx * ny * 2 * q];
        out.par_chunks_mut(2 * q).enumerate().for_each(|(e, fl)| {
            let (east, north) = (self.east(e), self.north(e));
            for j in 0..q {
                let v = self.vel_face[(e * 2) * q + j];
                let l = tr[(e * 4 + RIGHT) * q + j];
                let r = tr[(east * 4 + LEFT) * q + j];
                fl[j] = rusanov(l[0], l[2], r[0], r[2], v[0].abs().max(ch), ch);
                let v = self.vel_face[(e * 2 + 1) * q + j];
                let l = tr[(e * 4 + TOP) * q + j];
                let r = tr[(north * 4 + BOTTOM) * q + j];
                fl[q + j] = rusanov(l[1], l[2], r[1], r[2], v[1].abs().max(ch), ch);
            }
        });
        out
    }

    /// Time derivative of the modal coefficients under `dB/dt = -curl Ez`
    /// with `Ez = vy Bx - vx By`. The `psi` part of `out` is zeroed.
    pub fn induction_rhs(&self, u: &ModalDGField, out: &mut ModalDGField) -> Result<()> {
        self.check_shape(u, out)?;
        let tr = self.traces(u);
        let flux = self.induction_fluxes(&tr);
        let (nx, ny, q, nb) = (self.grid.nx(), self.grid.ny(), self.q, self.nb);
        let (dx, dy) = (self.grid.dx(), self.grid.dy());
        let block_len = out.blocks().block_len();
        out.blocks_mut()
            .data_mut()
            .par_chunks_mut(block_len)
            .enumerate()
            .for_each(|(slot, block)| {
                block.iter_mut().for_each(|v| *v = 0.0);
                let Some((ex, ey)) = interior_of(slot, nx, ny) else {
                    return;
                };
                let e = self.element_index(ex, ey);
                let c = u.b_coeffs(ex as isize, ey as isize);
                let d = &mut block[..nb];
                for p in 0..q * q {
                    let vals = &self.vol_b[p * nb..(p + 1) * nb];
                    let (mut bx, mut by) = (0.0, 0.0);
                    for k in 0..nb {
                        bx += c[k] * vals[k][0];
                        by += c[k] * vals[k][1];
                    }
                    let v = self.vel_vol[e * q * q + p];
                    let w = self.gw[p / q] * self.gw[p % q] * (v[1] * bx - v[0] * by);
                    for k in 0..nb {
                        d[k] += w * (vals[k][3] / dy - vals[k][4] / dx);
                    }
                }
                let (west, south) = (self.west(e), self.south(e));
                for j in 0..q {
                    let wj = self.gw[j];
                    let faces = [
                        (RIGHT, flux[(e * 2) * q + j], -wj / dx),
                        (LEFT, flux[(west * 2) * q + j], wj / dx),
                        (TOP, flux[(e * 2 + 1) * q + j], -wj / dy),
                        (BOTTOM, flux[(south * 2 + 1) * q + j], wj / dy),
                    ];
                    for (f, fl, w) in faces {
                        let fb = &self.face_b[f][j * nb..(j + 1) * nb];
                        for k in 0..nb {
                            d[k] += w * (fl[0] * fb[k][0] + fl[1] * fb[k][1]);
                        }
                    }
                }
            });
        Ok(())
    }

    /// Time derivative under `dB/dt + grad psi = 0`, `dpsi/dt + c_h^2 div B = 0`.
    pub fn cleaning_rhs(&self, u: &ModalDGField, out: &mut ModalDGField) -> Result<()> {
        self.check_shape(u, out)?;
        let params = self.cleaning.ok_or_else(|| {
            Error::InvalidArgument("cleaning operator needs cleaning parameters".into())
        })?;
        if !u.has_psi() {
            return Err(Error::InvalidArgument("cleaning operator needs psi coefficients".into()));
        }
        let ch = params.c_h;
        let ch2 = ch * ch;
        let tr = self.traces(u);
        let flux = self.cleaning_fluxes(&tr, ch);
        let (nx, ny, q, nb, ns) = (self.grid.nx(), self.grid.ny(), self.q, self.nb, self.ns);
        let (dx, dy) = (self.grid.dx(), self.grid.dy());
        let block_len = out.blocks().block_len();
        out.blocks_mut()
            .data_mut()
            .par_chunks_mut(block_len)
            .enumerate()
            .for_each(|(slot, block)| {
                block.iter_mut().for_each(|v| *v = 0.0);
                let Some((ex, ey)) = interior_of(slot, nx, ny) else {
                    return;
                };
                let e = self.element_index(ex, ey);
                let c = u.b_coeffs(ex as isize, ey as isize);
                let psi = u.psi_coeffs(ex as isize, ey as isize);
                let (db, dpsi) = block.split_at_mut(nb);
                for p in 0..q * q {
                    let vals = &self.vol_b[p * nb..(p + 1) * nb];
                    let svals = &self.vol_s[p * ns..(p + 1) * ns];
                    let (mut bx, mut by, mut ps) = (0.0, 0.0, 0.0);
                    for k in 0..nb {
                        bx += c[k] * vals[k][0];
                        by += c[k] * vals[k][1];
                    }
                    for m in 0..ns {
                        ps += psi[m] * svals[m][0];
                    }
                    let w = self.gw[p / q] * self.gw[p % q];
                    for k in 0..nb {
                        db[k] += w * ps * (vals[k][2] / dx + vals[k][5] / dy);
                    }
                    for m in 0..ns {
                        dpsi[m] += w * ch2 * (bx * svals[m][1] / dx + by * svals[m][2] / dy);
                    }
                }
                let (west, south) = (self.west(e), self.south(e));
                for j in 0..q {
                    let wj = self.gw[j];
                    let right = flux[(e * 2) * q + j];
                    let left = flux[(west * 2) * q + j];
                    let top = flux[(e * 2 + 1) * q + j];
                    let bottom = flux[(south * 2 + 1) * q + j];
                    for k in 0..nb {
                        db[k] += wj / dx
                            * (left[0] * self.face_b[LEFT][j * nb + k][0]
                                - right[0] * self.face_b[RIGHT][j * nb + k][0])
                            + wj / dy
                                * (bottom[0] * self.face_b[BOTTOM][j * nb + k][1]
                                    - top[0] * self.face_b[TOP][j * nb + k][1]);
                    }
                    for m in 0..ns {
                        dpsi[m] += wj / dx
                            * (left[1] * self.face_s[LEFT][j * ns + m]
                                - right[1] * self.face_s[RIGHT][j * ns + m])
                            + wj / dy
                                * (bottom[1] * self.face_s[BOTTOM][j * ns + m]
                                    - top[1] * self.face_s[TOP][j * ns + m]);
                    }
                }
            });
        Ok(())
    }

    fn check_shape(&self, u: &ModalDGField, out: &ModalDGField) -> Result<()> {
        let expected = self.zeros()?;
        if u.b_len() != expected.b_len()
            || u.psi_len() != expected.psi_len()
            || !u.blocks().same_shape(expected.blocks())
            || !out.blocks().same_shape(u.blocks())
        {
            return Err(Error::InvalidArgument(
                "DG field does not match the scheme's basis or grid".into(),
            ));
        }
        Ok(())
    }

    /// Multiply every `psi` coefficient by `factor`.
    pub fn damp_psi(&self, u: &mut ModalDGField, factor: f64) {
        for ey in 0..self.grid.ny() as isize {
            for ex in 0..self.grid.nx() as isize {
                u.psi_coeffs_mut(ex, ey).iter_mut().for_each(|v| *v *= factor);
            }
        }
    }

    /// One full time step of the scheme's variant.
    pub fn step(&self, u: &ModalDGField, t: f64, dt: f64) -> Result<ModalDGField> {
        let order = self.ssp_order();
        let next = ssp_rk_step(u, t, dt, order, &Induction(self))?;
        match self.cleaning {
            Some(params) => self.divclean_substeps(next, t, dt, params),
            None => Ok(next),
        }
    }

    /// Cleaning substep followed by exact damping of `psi`.
    fn divclean_substeps(
        &self,
        u: ModalDGField,
        t: f64,
        dt: f64,
        params: CleaningParams,
    ) -> Result<ModalDGField> {
        let mut next = ssp_rk_step(&u, t, dt, self.ssp_order(), &Cleaning(self))?;
        self.damp_psi(&mut next, params.damping_factor(dt));
        Ok(next)
    }

    /// Induction substep, cleaning substep, then damping of `psi`.
    pub fn divclean_step(&self, u: &ModalDGField, t: f64, dt: f64) -> Result<ModalDGField> {
        let params = self.cleaning.ok_or_else(|| {
            Error::InvalidArgument("divergence cleaning needs cleaning parameters".into())
        })?;
        let next = ssp_rk_step(u, t, dt, self.ssp_order(), &Induction(self))?;
        self.divclean_substeps(next, t, dt, params)
    }

    pub fn view<'a>(&'a self, field: &'a ModalDGField) -> DgView<'a> {
        DgView { scheme: self, field }
    }

    /// Total `(integral Bx, integral By)` over the domain.
    pub fn total_field(&self, u: &ModalDGField) -> [f64; 2] {
        let area = self.grid.dx() * self.grid.dy();
        let (q, nb) = (self.q, self.nb);
        let mut acc = [0.0; 2];
        for ey in 0..self.grid.ny() as isize {
            for ex in 0..self.grid.nx() as isize {
                let c = u.b_coeffs(ex, ey);
                for p in 0..q * q {
                    let w = self.gw[p / q] * self.gw[p % q] * area;
                    let vals = &self.vol_b[p * nb..(p + 1) * nb];
                    for k in 0..nb {
                        acc[0] += w * c[k] * vals[k][0];
                        acc[1] += w * c[k] * vals[k][1];
                    }
                }
            }
        }
        acc
    }
}

fn interior_of(slot: usize, nx: usize, ny: usize) -> Option<(usize, usize)> {
    let (sx, sy) = (slot % (nx + 2), slot / (nx + 2));
    if sx == 0 || sy == 0 || sx > nx || sy > ny {
        None
    } else {
        Some((sx - 1, sy - 1))
    }
}

/// Normal flux of `v (x) B - B (x) v` through a face with normal `axis`:
/// the advective part `(v.n) B` upwinded in every component, the `Bn v`
/// part central.
#[inline]
fn induction_flux(v: [f64; 2], axis: usize, l: [f64; 3], r: [f64; 3]) -> [f64; 2] {
    let vn = v[axis];
    let (up, down) = if vn > 0.0 { (l, r) } else { (r, l) };
    let w = if vn == 0.0 { 0.5 } else { 1.0 };
    let adv = |c: usize| vn * (w * up[c] + (1.0 - w) * down[c]);
    let bn = 0.5 * (l[axis] + r[axis]);
    [adv(0) - bn * v[0], adv(1) - bn * v[1]]
}

/// Rusanov flux of `u = (Bn, psi)`, `f(u) = (psi, c_h^2 Bn)`.
#[inline]
fn rusanov(bl: f64, pl: f64, br: f64, pr: f64, s: f64, ch: f64) -> [f64; 2] {
    [
        0.5 * (pl + pr) - 0.5 * s * (br - bl),
        0.5 * ch * ch * (bl + br) - 0.5 * s * (pr - pl),
    ]
}

struct Induction<'a>(&'a DgScheme);

impl RhsOperator<ModalDGField> for Induction<'_> {
    fn rhs(&self, u: &mut ModalDGField, _t: f64, out: &mut ModalDGField) -> Result<()> {
        self.0.induction_rhs(u, out)
    }
}

struct Cleaning<'a>(&'a DgScheme);

impl RhsOperator<ModalDGField> for Cleaning<'_> {
    fn rhs(&self, u: &mut ModalDGField, _t: f64, out: &mut ModalDGField) -> Result<()> {
        self.0.cleaning_rhs(u, out)
    }
}

pub struct DgView<'a> {
    scheme: &'a DgScheme,
    field: &'a ModalDGField,
}

impl ElementwiseField for DgView<'_> {
    fn grid(&self) -> &ElementGrid {
        &self.scheme.grid
    }

    fn degree(&self) -> usize {
        self.scheme.n
    }

    /// `n + 1` equal control volumes per direction.
    fn control_volume_edges(&self) -> Vec<f64> {
        let m = self.scheme.n + 1;
        (0..=m).map(|i| i as f64 / m as f64).collect()
    }

    fn sample(&self, ex: usize, ey: usize, xs: &[f64], ys: &[f64]) -> TensorSamples {
        let s = self.scheme;
        let c = self.field.b_coeffs(ex as isize, ey as isize);
        let (dx, dy) = (s.grid.dx(), s.grid.dy());
        let mut vals = vec![[0.0; 6]; s.nb];
        let mut out = TensorSamples::zeros(xs.len() * ys.len());
        for (a, &x) in xs.iter().enumerate() {
            for (b, &y) in ys.iter().enumerate() {
                s.basis.eval(x, y, &mut vals);
                let i = a * ys.len() + b;
                for k in 0..s.nb {
                    out.bx[i] += c[k] * vals[k][0];
                    out.by[i] += c[k] * vals[k][1];
                    out.div[i] += c[k] * (vals[k][2] / dx + vals[k][5] / dy);
                }
            }
        }
        out
    }
}
