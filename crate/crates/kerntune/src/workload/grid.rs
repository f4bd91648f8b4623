//! Conserved-variable field on a uniform Cartesian grid with two periodic
//! ghost layers per side.

use super::WorkloadError;

/// Ghost layers on each side; the MUSCL stencil needs two.
pub const GHOST: usize = 2;

/// Ratio of specific heats for the synthetic gas.
pub const GAMMA: f64 = 1.4;

/// Amplitude of the seeded initial perturbation.
pub const INIT_PERTURBATION: f64 = 0.01;

/// Density, x-momentum, y-momentum, total energy per unit volume.
pub const NUM_COMPONENTS: usize = 4;

/// Storage is one flat row-major array per component, eta index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    nx: usize,
    ny: usize,
    q: [Vec<f64>; 4],
}

impl Field {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        let len = (nx + 2 * GHOST) * (ny + 2 * GHOST);
        Self {
            nx,
            ny,
            q: std::array::from_fn(|_| vec![0.0; len]),
        }
    }

    /// Spatially constant state given as primitives (density, velocities,
    /// pressure).
    pub fn uniform(nx: usize, ny: usize, rho: f64, u: f64, v: f64, p: f64) -> Self {
        let mut f = Self::zeros(nx, ny);
        let e_total = p / (GAMMA - 1.0) + 0.5 * rho * (u * u + v * v);
        for c in 0..NUM_COMPONENTS {
            let val = [rho, rho * u, rho * v, e_total][c];
            f.q[c].fill(val);
        }
        f
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Row stride of the flat layout.
    #[inline]
    pub fn stride(&self) -> usize {
        self.ny + 2 * GHOST
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.stride() + j
    }

    #[inline]
    pub fn comp(&self, c: usize) -> &[f64] {
        &self.q[c]
    }

    #[inline]
    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.q[c]
    }

    /// Copy periodic images into the ghost layers. Eta ghosts are filled
    /// from interior rows first, then xi ghosts over full rows so the
    /// corners come out consistent.
    pub fn fill_ghosts(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        let s = self.stride();
        for c in 0..NUM_COMPONENTS {
            let q = &mut self.q[c];
            for i in GHOST..nx + GHOST {
                let row = i * s;
                q[row] = q[row + ny];
                q[row + 1] = q[row + ny + 1];
                q[row + ny + 2] = q[row + 2];
                q[row + ny + 3] = q[row + 3];
            }
            for j in 0..s {
                q[j] = q[nx * s + j];
                q[s + j] = q[(nx + 1) * s + j];
                q[(nx + 2) * s + j] = q[2 * s + j];
                q[(nx + 3) * s + j] = q[3 * s + j];
            }
        }
    }

    /// Density, internal energy and pressure must stay positive; reports the
    /// first offending interior cell in logical coordinates.
    pub fn check_positivity(&self) -> Result<(), WorkloadError> {
        for i in GHOST..self.nx + GHOST {
            for j in GHOST..self.ny + GHOST {
                let k = self.idx(i, j);
                let rho = self.q[0][k];
                let e_total = self.q[3][k];
                let kinetic = if rho > 0.0 {
                    0.5 * (self.q[1][k] * self.q[1][k] + self.q[2][k] * self.q[2][k]) / rho
                } else {
                    0.0
                };
                let internal = e_total - kinetic;
                if !(rho > 0.0 && e_total > 0.0 && internal > 0.0) {
                    return Err(WorkloadError::PositivityViolation {
                        i: i - GHOST,
                        j: j - GHOST,
                        rho,
                        internal_energy: internal,
                    });
                }
            }
        }
        Ok(())
    }

    /// Order-independent digest: sum of absolute interior values, reduced in
    /// fixed (component, i, j) order so the result is also bit-stable.
    pub fn checksum(&self) -> f64 {
        let mut acc = 0.0;
        for c in 0..NUM_COMPONENTS {
            for i in GHOST..self.nx + GHOST {
                for j in GHOST..self.ny + GHOST {
                    acc += self.q[c][self.idx(i, j)].abs();
                }
            }
        }
        acc
    }
}

/// Deterministic smooth positive initial field: fixed trigonometric modes
/// of the cell coordinates plus a seeded low-amplitude perturbation on
/// density and pressure.
pub fn init_grid(nx: usize, ny: usize, seed: u64) -> Result<Field, WorkloadError> {
    use rand::Rng;
    use rand::SeedableRng;

    let mut field = Field::zeros(nx, ny);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    for i in 0..nx {
        for j in 0..ny {
            let x = (i as f64 + 0.5) / nx as f64;
            let y = (j as f64 + 0.5) / ny as f64;
            let d_rho: f64 = rng.gen_range(-1.0..1.0);
            let d_p: f64 = rng.gen_range(-1.0..1.0);
            let rho = 1.0 + 0.1 * (tau * x).sin() * (tau * y).cos() + INIT_PERTURBATION * d_rho;
            let u = 0.1 * (tau * x).cos();
            let v = 0.1 * (tau * y).sin();
            let p = 1.0 + 0.05 * (tau * x).sin() * (tau * y).sin() + INIT_PERTURBATION * d_p;
            let k = field.idx(i + GHOST, j + GHOST);
            field.q[0][k] = rho;
            field.q[1][k] = rho * u;
            field.q[2][k] = rho * v;
            field.q[3][k] = p / (GAMMA - 1.0) + 0.5 * rho * (u * u + v * v);
        }
    }
    field.fill_ghosts();
    field.check_positivity()?;
    Ok(field)
}
