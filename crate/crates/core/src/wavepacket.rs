//! Gaussian initial state and quantum expectation values.
//!
//! All observables divide by the current norm, so the norm itself is an
//! independent diagnostic of the propagator.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{trapezoid, Grid, UnitSystem};
use crate::potential::PotentialTable;

/// Largest allowed ratio of boundary amplitude to peak amplitude for a freshly
/// constructed packet.
pub const EDGE_RATIO_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    amplitudes: Vec<Complex64>,
    grid: Grid,
    time: f64,
}

/// Snapshot of the quantum averages at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumObservables {
    pub time: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_force: f64,
    pub spread: f64,
    pub norm: f64,
    pub mean_energy: f64,
}

impl WaveFunction {
    /// Samples the Gaussian
    /// `(sigma sqrt(2 pi))^{-1/2} exp(-(x-x0)^2/4 sigma^2 + i p0 (x-x0)/hbar)`
    /// and renormalizes it with the discrete quadrature.
    pub fn gaussian(grid: &Grid, x0: f64, sigma: f64, p0: f64, units: &UnitSystem) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("sigma", format!("must be > 0, got {sigma}")));
        }
        if !x0.is_finite() || !p0.is_finite() {
            return Err(invalid("x0", "x0 and p0 must be finite"));
        }
        if x0 <= grid.x_min() + 5.0 * sigma || x0 >= grid.x_max() - 5.0 * sigma {
            return Err(invalid(
                "x0",
                format!(
                    "packet centre {x0} must lie 5 sigma ({}) inside [{}, {}]",
                    5.0 * sigma,
                    grid.x_min(),
                    grid.x_max()
                ),
            ));
        }
        let amp = (sigma * (2.0 * std::f64::consts::PI).sqrt()).powf(-0.5);
        let k0 = p0 / units.hbar_c;
        let amplitudes: Vec<Complex64> = grid
            .nodes()
            .map(|x| {
                let d = x - x0;
                amp * Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), k0 * d)
            })
            .collect();
        let mut wf = Self::from_amplitudes(grid, amplitudes, 0.0)?;

        let ratio = wf.edge_ratio(1);
        if !(ratio < EDGE_RATIO_LIMIT) {
            return Err(Error::PacketTail {
                ratio,
                limit: EDGE_RATIO_LIMIT,
            });
        }
        let n = wf.norm();
        if n <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let s = n.sqrt().recip();
        wf.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(wf)
    }

    pub fn from_amplitudes(grid: &Grid, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self {
            amplitudes,
            grid: grid.clone(),
            time,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub(crate) fn edges_zero(&self) -> bool {
        let zero = Complex64::default();
        self.amplitudes[0] == zero && self.amplitudes[self.amplitudes.len() - 1] == zero
    }

    /// Largest amplitude within `band` nodes of either edge, relative to the
    /// peak amplitude. Returns infinity for a zero field.
    pub fn edge_ratio(&self, band: usize) -> f64 {
        let n = self.amplitudes.len();
        let band = band.clamp(1, n / 2);
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let edge = self.amplitudes[..band]
            .iter()
            .chain(&self.amplitudes[n - band..])
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        if peak > 0.0 {
            edge / peak
        } else {
            f64::INFINITY
        }
    }

    fn density(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|a| a.norm_sqr())
    }

    fn weighted(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        let w: Vec<f64> = self.density().enumerate().map(|(j, r)| f(j, r)).collect();
        trapezoid(&w, self.grid.dx())
    }

    fn checked_norm(&self) -> Result<f64> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Ok(n)
        } else {
            Err(Error::ZeroNorm)
        }
    }

    pub fn norm(&self) -> f64 {
        self.weighted(|_, r| r)
    }

    pub fn mean_position(&self) -> Result<f64> {
        let n = self.checked_norm()?;
        Ok(self.weighted(|j, r| self.grid.x(j) * r) / n)
    }

    pub fn position_spread(&self) -> Result<f64> {
        let n = self.checked_norm()?;
        let mean = self.weighted(|j, r| self.grid.x(j) * r) / n;
        // Central second moment avoids cancellation for packets far from 0.
        let var = self.weighted(|j, r| {
            let d = self.grid.x(j) - mean;
            d * d * r
        }) / n;
        Ok(var.max(0.0).sqrt())
    }

    /// `hbar Int Im(psi* dpsi/dx) dx / norm`, three-point central differences
    /// inside, two-point one-sided at the edges.
    pub fn mean_momentum(&self, units: &UnitSystem) -> Result<f64> {
        let n = self.checked_norm()?;
        let psi = &self.amplitudes;
        let len = psi.len();
        let dx = self.grid.dx();
        let integrand: Vec<f64> = (0..len)
            .map(|j| {
                let d = match j {
                    0 => (psi[1] - psi[0]) / dx,
                    j if j == len - 1 => (psi[j] - psi[j - 1]) / dx,
                    j => (psi[j + 1] - psi[j - 1]) / (2.0 * dx),
                };
                (psi[j].conj() * d).im
            })
            .collect();
        Ok(units.hbar_c * trapezoid(&integrand, dx) / n)
    }

    /// `-Int |psi|^2 V' dx / norm`.
    pub fn mean_force(&self, pot: &PotentialTable) -> Result<f64> {
        self.grid.ensure_same(pot.grid(), "wave function and potential")?;
        let n = self.checked_norm()?;
        let dv = pot.dv();
        Ok(-self.weighted(|j, r| r * dv[j]) / n)
    }

    /// `<H>` with the three-point Laplacian, field taken as zero outside the
    /// mesh (the same discrete operator the propagator uses).
    pub fn mean_energy(&self, pot: &PotentialTable, units: &UnitSystem) -> Result<f64> {
        self.grid.ensure_same(pot.grid(), "wave function and potential")?;
        let n = self.checked_norm()?;
        let psi = &self.amplitudes;
        let len = psi.len();
        let a = units.kinetic_prefactor() / (self.grid.dx() * self.grid.dx());
        let v = pot.v();
        let zero = Complex64::new(0.0, 0.0);
        let integrand: Vec<f64> = (0..len)
            .map(|j| {
                let left = if j > 0 { psi[j - 1] } else { zero };
                let right = if j + 1 < len { psi[j + 1] } else { zero };
                let h_psi = -a * (left + right - 2.0 * psi[j]) + v[j] * psi[j];
                (psi[j].conj() * h_psi).re
            })
            .collect();
        Ok(trapezoid(&integrand, self.grid.dx()) / n)
    }

    /// All averages in two passes over the mesh, without temporaries.
    pub fn observables(&self, pot: &PotentialTable, units: &UnitSystem) -> Result<QuantumObservables> {
        self.grid.ensure_same(pot.grid(), "wave function and potential")?;
        let psi = &self.amplitudes;
        let len = psi.len();
        let dx = self.grid.dx();
        let a = units.kinetic_prefactor() / (dx * dx);
        let (v, dv) = (pot.v(), pot.dv());
        let zero = Complex64::default();

        let (mut norm, mut sx, mut sp, mut sf, mut se) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for j in 0..len {
            let w = if j == 0 || j == len - 1 { 0.5 } else { 1.0 };
            let r = psi[j].norm_sqr() * w;
            let left = if j > 0 { psi[j - 1] } else { zero };
            let right = if j + 1 < len { psi[j + 1] } else { zero };
            let d = match j {
                0 => (psi[1] - psi[0]) / dx,
                j if j == len - 1 => (psi[j] - psi[j - 1]) / dx,
                _ => (right - left) / (2.0 * dx),
            };
            let h_psi = -a * (left + right - 2.0 * psi[j]) + v[j] * psi[j];
            norm += r;
            sx += self.grid.x(j) * r;
            sf += dv[j] * r;
            sp += w * (psi[j].conj() * d).im;
            se += w * (psi[j].conj() * h_psi).re;
        }
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroNorm);
        }
        let mean_x = sx / norm;
        let var = psi
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let w = if j == 0 || j == len - 1 { 0.5 } else { 1.0 };
                let d = self.grid.x(j) - mean_x;
                w * d * d * p.norm_sqr()
            })
            .sum::<f64>()
            / norm;
        Ok(QuantumObservables {
            time: self.time,
            mean_x,
            mean_p: units.hbar_c * sp / norm,
            mean_force: -sf / norm,
            spread: var.max(0.0).sqrt(),
            norm: norm * dx,
            mean_energy: se / norm,
        })
    }
}
