//! Spatial mesh, natural units and trapezoidal quadrature.
//!
//! Units throughout the crate: c = 1, lengths in fm, energies in MeV,
//! momenta in MeV/c and times in fm/c. Numerically hbar = hbar*c in MeV fm.

use std::ops::{Add, Mul};

use crate::error::{invalid, Error, Result};

pub const DEFAULT_HBAR_C: f64 = 197.3269631;
pub const DEFAULT_ALPHA_FS: f64 = 1.0 / 137.035999679;
/// Alpha-particle rest energy in MeV.
pub const DEFAULT_MASS_ALPHA: f64 = 3727.379;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar_c: f64,
    pub alpha_fs: f64,
    pub mass_alpha: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            hbar_c: DEFAULT_HBAR_C,
            alpha_fs: DEFAULT_ALPHA_FS,
            mass_alpha: DEFAULT_MASS_ALPHA,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar_c: f64, alpha_fs: f64, mass_alpha: f64) -> Result<Self> {
        for (name, value) in [
            ("hbar_c", hbar_c),
            ("alpha_fs", alpha_fs),
            ("mass_alpha", mass_alpha),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {value}")));
            }
        }
        Ok(Self {
            hbar_c,
            alpha_fs,
            mass_alpha,
        })
    }

    /// Default constants with a different projectile mass.
    pub fn with_mass(mass_alpha: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(d.hbar_c, d.alpha_fs, mass_alpha)
    }

    /// hbar^2 / 2m in MeV fm^2.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar_c * self.hbar_c / (2.0 * self.mass_alpha)
    }
}

/// Uniform mesh `x_j = x_min + j dx`, `j = 0..n_points`.
///
/// Construction shifts the requested mesh by half a cell when an interior
/// node would land within `dx/4` of the origin, so the Coulomb singularity
/// sits between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
    shift: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() {
            return Err(invalid("x_min", format!("must be finite, got {x_min}")));
        }
        if !x_max.is_finite() {
            return Err(invalid("x_max", format!("must be finite, got {x_max}")));
        }
        if x_min >= x_max {
            return Err(invalid("x_max", format!("must exceed x_min ({x_min}), got {x_max}")));
        }
        if n_points < 3 {
            return Err(invalid("n_points", format!("must be >= 3, got {n_points}")));
        }
        let dx = (x_max - x_min) / (n_points - 1) as f64;

        // Interior node closest to the origin. An edge node at 0 is left in
        // place; the potential's softening cut covers it.
        let j0 = (-x_min / dx).round();
        let near_origin = j0 > 0.0
            && j0 < (n_points - 1) as f64
            && (x_min + j0 * dx).abs() < 0.25 * dx;
        let shift = if near_origin { 0.5 * dx } else { 0.0 };

        Ok(Self {
            x_min: x_min + shift,
            x_max: x_max + shift,
            n_points,
            dx,
            shift,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Offset applied to the requested bounds (0 or dx/2).
    pub fn shift(&self) -> f64 {
        self.shift
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }

    pub fn node_vec(&self) -> Vec<f64> {
        self.nodes().collect()
    }

    /// Nearest node index to `x`, clamped to the mesh.
    pub fn index_of(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.dx).round();
        j.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    pub(crate) fn ensure_same(&self, other: &Grid, what: &'static str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(what))
        }
    }
}

/// Trapezoidal-rule integral of `samples` over the full mesh.
pub fn quadrature<T>(samples: &[T], grid: &Grid) -> Result<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    if samples.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            actual: samples.len(),
        });
    }
    Ok(trapezoid(samples, grid.dx()))
}

#[inline]
pub(crate) fn trapezoid<T>(samples: &[T], dx: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = samples.len();
    let interior = samples[1..n - 1]
        .iter()
        .fold(T::default(), |acc, &s| acc + s);
    (interior + (samples[0] + samples[n - 1]) * 0.5) * dx
}
