//! The seven tiled compute stages: limiter and flux sweeps in both grid
//! directions, source evaluation, residual assembly and the explicit update.
//!
//! Every stage writes buffers that depend only on the previous stage's
//! output, and each written value is computed with the same floating-point
//! operation order regardless of tile shape, so results are bitwise
//! invariant under re-tiling while traversal order (and hence runtime) is
//! not.

use super::grid::{Field, GAMMA, GHOST, NUM_COMPONENTS};
use super::muscl::{limiter_value, muscl_reconstruct};
use super::{TilePair, WorkloadError};

/// Face area of the unit Cartesian metric.
pub const CELL_FACE_AREA: f64 = 1.0;
/// Cell volume of the unit Cartesian metric.
pub const CELL_VOLUME: f64 = 1.0;

/// Sweep direction: `Xi` walks the first grid index, `Eta` the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Xi,
    Eta,
}

/// Visit `(i0..i1) x (j0..j1)` in `tile.0 x tile.1` blocks.
#[inline]
fn tiled(
    i0: usize,
    i1: usize,
    j0: usize,
    j1: usize,
    tile: TilePair,
    mut body: impl FnMut(usize, usize),
) {
    let ti = tile.0.max(1);
    let tj = tile.1.max(1);
    let mut bi = i0;
    while bi < i1 {
        let ei = (bi + ti).min(i1);
        let mut bj = j0;
        while bj < j1 {
            let ej = (bj + tj).min(j1);
            for i in bi..ei {
                for j in bj..ej {
                    body(i, j);
                }
            }
            bj = ej;
        }
        bi = ei;
    }
}

/// Inviscid flux normal component for a conserved state `q` and unit normal
/// `(n_x, n_y)`.
#[inline]
fn inviscid_flux(q: &[f64; 4], n_x: f64, n_y: f64) -> [f64; 4] {
    let rho = q[0];
    let u = q[1] / rho;
    let v = q[2] / rho;
    let p = (GAMMA - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / rho);
    let v_n = n_x * u + n_y * v;
    [
        rho * v_n,
        q[1] * v_n + n_x * p,
        q[2] * v_n + n_y * p,
        (q[3] + p) * v_n,
    ]
}

/// Largest signal speed `|V_n| + a` of a state.
#[inline]
fn max_wavespeed(q: &[f64; 4], n_x: f64, n_y: f64) -> f64 {
    let rho = q[0];
    let u = q[1] / rho;
    let v = q[2] / rho;
    let p = (GAMMA - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
    let a = (GAMMA * p / rho).sqrt();
    (n_x * u + n_y * v).abs() + a
}

type CompField = [Vec<f64>; 4];

/// Scratch buffers for one pass of the stage loop. Face-indexed arrays use
/// the convention that face `f` sits between cells `f-1` and `f` along the
/// sweep direction.
pub struct StagePipeline {
    nx: usize,
    ny: usize,
    stride: usize,
    psi_plus: [CompField; 2],
    psi_minus: [CompField; 2],
    flux: [CompField; 2],
    source: CompField,
    residual: CompField,
}

impl StagePipeline {
    pub fn new(nx: usize, ny: usize) -> Self {
        let len = (nx + 2 * GHOST) * (ny + 2 * GHOST);
        let make = || -> CompField { std::array::from_fn(|_| vec![0.0; len]) };
        Self {
            nx,
            ny,
            stride: ny + 2 * GHOST,
            psi_plus: [make(), make()],
            psi_minus: [make(), make()],
            flux: [make(), make()],
            source: make(),
            residual: make(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.stride + j
    }

    fn dir_index(dir: Direction) -> usize {
        match dir {
            Direction::Xi => 0,
            Direction::Eta => 1,
        }
    }

    pub fn limiters(&self, dir: Direction) -> (&CompField, &CompField) {
        let d = Self::dir_index(dir);
        (&self.psi_plus[d], &self.psi_minus[d])
    }

    pub fn flux(&self, dir: Direction) -> &CompField {
        &self.flux[Self::dir_index(dir)]
    }

    pub fn source(&self) -> &CompField {
        &self.source
    }

    pub fn source_mut(&mut self) -> &mut CompField {
        &mut self.source
    }

    pub fn residual(&self) -> &CompField {
        &self.residual
    }

    /// L2 norm of the interior residual, reduced in fixed index order.
    pub fn residual_l2(&self) -> f64 {
        let mut acc = 0.0;
        for c in 0..NUM_COMPONENTS {
            for i in GHOST..self.nx + GHOST {
                for j in GHOST..self.ny + GHOST {
                    let r = self.residual[c][self.at(i, j)];
                    acc += r * r;
                }
            }
        }
        acc.sqrt()
    }

    /// Digest of a face flux field over the faces the residual consumes.
    pub fn flux_checksum(&self, dir: Direction) -> f64 {
        let fx = self.flux(dir);
        let (i1, j1) = match dir {
            Direction::Xi => (self.nx + GHOST + 1, self.ny + GHOST),
            Direction::Eta => (self.nx + GHOST, self.ny + GHOST + 1),
        };
        let mut acc = 0.0;
        for c in 0..NUM_COMPONENTS {
            for i in GHOST..i1 {
                for j in GHOST..j1 {
                    acc += fx[c][self.at(i, j)].abs();
                }
            }
        }
        acc
    }

    /// Per-face ratio-based van Leer limiter values over the stencil range
    /// the flux sweep will read. Pure with respect to `field`.
    pub fn limiter_stage(&mut self, field: &Field, dir: Direction, tile: TilePair) {
        let (nx, ny, s) = (self.nx, self.ny, self.stride);
        let d = Self::dir_index(dir);
        match dir {
            Direction::Xi => {
                // psi+ on faces 1..nx+3 (needs slopes at f and f+1)
                for c in 0..NUM_COMPONENTS {
                    let q = field.comp(c);
                    let psi = &mut self.psi_plus[d][c];
                    tiled(1, nx + GHOST + 1, GHOST, ny + GHOST, tile, |f, j| {
                        let k = f * s + j;
                        let d_f = q[k] - q[k - s];
                        let d_fp = q[k + s] - q[k];
                        psi[k] = limiter_value(d_fp, d_f);
                    });
                }
                // psi- on faces 2..nx+4 (needs slopes at f-1 and f)
                for c in 0..NUM_COMPONENTS {
                    let q = field.comp(c);
                    let psi = &mut self.psi_minus[d][c];
                    tiled(GHOST, nx + 2 * GHOST, GHOST, ny + GHOST, tile, |f, j| {
                        let k = f * s + j;
                        let d_f = q[k] - q[k - s];
                        let d_fm = q[k - s] - q[k - 2 * s];
                        psi[k] = limiter_value(d_fm, d_f);
                    });
                }
            }
            Direction::Eta => {
                for c in 0..NUM_COMPONENTS {
                    let q = field.comp(c);
                    let psi = &mut self.psi_plus[d][c];
                    tiled(GHOST, nx + GHOST, 1, ny + GHOST + 1, tile, |i, f| {
                        let k = i * s + f;
                        let d_f = q[k] - q[k - 1];
                        let d_fp = q[k + 1] - q[k];
                        psi[k] = limiter_value(d_fp, d_f);
                    });
                }
                for c in 0..NUM_COMPONENTS {
                    let q = field.comp(c);
                    let psi = &mut self.psi_minus[d][c];
                    tiled(GHOST, nx + GHOST, GHOST, ny + 2 * GHOST, tile, |i, f| {
                        let k = i * s + f;
                        let d_f = q[k] - q[k - 1];
                        let d_fm = q[k - 1] - q[k - 2];
                        psi[k] = limiter_value(d_fm, d_f);
                    });
                }
            }
        }
    }

    /// MUSCL face states plus a local Lax-Friedrichs flux on every face the
    /// residual needs. Pure with respect to `field` and the limiter buffers.
    pub fn flux_stage(
        &mut self,
        field: &Field,
        dir: Direction,
        epsilon: f64,
        kappa: f64,
        tile: TilePair,
    ) {
        let (nx, ny, s) = (self.nx, self.ny, self.stride);
        let d = Self::dir_index(dir);
        let (n_x, n_y, step, i1, j1) = match dir {
            Direction::Xi => (1.0, 0.0, s, nx + GHOST + 1, ny + GHOST),
            Direction::Eta => (0.0, 1.0, 1, nx + GHOST, ny + GHOST + 1),
        };
        let psi_p = &self.psi_plus[d];
        let psi_m = &self.psi_minus[d];
        let flux = &mut self.flux[d];
        let (f0, j0) = (GHOST, GHOST);
        tiled(f0, i1, j0, j1, tile, |a, b| {
            let k = a * s + b;
            let mut q_left = [0.0; 4];
            let mut q_right = [0.0; 4];
            for c in 0..NUM_COMPONENTS {
                let q = field.comp(c);
                let (l, r) = muscl_reconstruct(
                    q[k - 2 * step],
                    q[k - step],
                    q[k],
                    q[k + step],
                    epsilon,
                    kappa,
                    psi_p[c][k - step],
                    psi_m[c][k],
                    psi_p[c][k],
                    psi_m[c][k + step],
                );
                q_left[c] = l;
                q_right[c] = r;
            }
            let f_left = inviscid_flux(&q_left, n_x, n_y);
            let f_right = inviscid_flux(&q_right, n_x, n_y);
            let lambda = max_wavespeed(&q_left, n_x, n_y).max(max_wavespeed(&q_right, n_x, n_y));
            for c in 0..NUM_COMPONENTS {
                flux[c][k] =
                    0.5 * (f_left[c] + f_right[c]) - 0.5 * lambda * (q_right[c] - q_left[c]);
            }
        });
    }

    /// Manufactured smooth source field, scaled by `amplitude`.
    pub fn source_stage(&mut self, amplitude: f64, tile: TilePair) {
        let (nx, ny, s) = (self.nx, self.ny, self.stride);
        let tau = std::f64::consts::TAU;
        let source = &mut self.source;
        tiled(GHOST, nx + GHOST, GHOST, ny + GHOST, tile, |i, j| {
            let x = (i - GHOST) as f64 + 0.5;
            let y = (j - GHOST) as f64 + 0.5;
            let (sx, cx) = (tau * x / nx as f64).sin_cos();
            let (sy, cy) = (tau * y / ny as f64).sin_cos();
            let k = i * s + j;
            source[0][k] = amplitude * sx * cy;
            source[1][k] = amplitude * cx * sy;
            source[2][k] = amplitude * sx * sy;
            source[3][k] = amplitude * cx * cy;
        });
    }

    /// Assemble the per-cell residual: outward face fluxes times face area
    /// minus volume times source.
    pub fn rhs_stage(&mut self, tile: TilePair) {
        let (nx, ny, s) = (self.nx, self.ny, self.stride);
        for c in 0..NUM_COMPONENTS {
            let fx = &self.flux[0][c];
            let fy = &self.flux[1][c];
            let src = &self.source[c];
            let res = &mut self.residual[c];
            tiled(GHOST, nx + GHOST, GHOST, ny + GHOST, tile, |i, j| {
                let k = i * s + j;
                res[k] = (fx[k + s] - fx[k]) * CELL_FACE_AREA
                    + (fy[k + 1] - fy[k]) * CELL_FACE_AREA
                    - CELL_VOLUME * src[k];
            });
        }
    }

    /// Explicit forward-Euler update `q <- q - dt * R / volume`, followed by
    /// the periodic ghost refill and the positivity check.
    pub fn update_stage(
        &self,
        field: &mut Field,
        dt: f64,
        tile: TilePair,
    ) -> Result<(), WorkloadError> {
        let (nx, ny, s) = (self.nx, self.ny, self.stride);
        let scale = dt / CELL_VOLUME;
        for c in 0..NUM_COMPONENTS {
            let res = &self.residual[c];
            let q = field.comp_mut(c);
            tiled(GHOST, nx + GHOST, GHOST, ny + GHOST, tile, |i, j| {
                let k = i * s + j;
                q[k] -= scale * res[k];
            });
        }
        field.fill_ghosts();
        field.check_positivity()
    }
}
