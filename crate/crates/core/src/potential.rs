//! Potential tables sampled on a [`Grid`]: the repulsive Coulomb field of a
//! fixed target at the origin, plus harmonic and free fixtures.

use crate::error::{invalid, Result};
use crate::grid::{Grid, UnitSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Coulomb,
    Harmonic,
    Free,
}

/// `V` and `V'` on the mesh. The derivative is tabulated analytically.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    v: Vec<f64>,
    dv: Vec<f64>,
    /// `k` for Coulomb (MeV fm), `k_h` for harmonic (MeV/fm^2), 0 for free.
    coupling_k: f64,
    kind: PotentialKind,
    softening_cut: f64,
    grid: Grid,
}

/// Coulomb coupling `z1 z2 alpha hbar c` in MeV fm.
pub fn coupling_constant(z1: i64, z2: i64, units: &UnitSystem) -> Result<f64> {
    if z1 < 1 {
        return Err(invalid("z1", format!("charge number must be >= 1, got {z1}")));
    }
    if z2 < 1 {
        return Err(invalid("z2", format!("charge number must be >= 1, got {z2}")));
    }
    Ok((z1 * z2) as f64 * units.alpha_fs * units.hbar_c)
}

impl PotentialTable {
    /// `V = k / max(|x|, cut)`; `cut` defaults to `dx/2`.
    pub fn coulomb(grid: &Grid, coupling_k: f64, softening_cut: Option<f64>) -> Result<Self> {
        if !coupling_k.is_finite() {
            return Err(invalid("coupling_k", format!("must be finite, got {coupling_k}")));
        }
        let cut = softening_cut.unwrap_or(0.5 * grid.dx());
        if !(cut.is_finite() && cut >= 0.0) {
            return Err(invalid("softening_cut", format!("must be >= 0, got {cut}")));
        }
        if cut == 0.0 && grid.nodes().any(|x| x == 0.0) {
            return Err(invalid(
                "softening_cut",
                "a grid node sits at x = 0 and no softening was requested",
            ));
        }
        let (v, dv) = grid
            .nodes()
            .map(|x| {
                let r = x.abs().max(cut);
                let v = coupling_k / r;
                // -sign(x) k / r^2; sign(0) = 0
                let dv = if x == 0.0 { 0.0 } else { -x.signum() * v / r };
                (v, dv)
            })
            .unzip();
        Ok(Self {
            v,
            dv,
            coupling_k,
            kind: PotentialKind::Coulomb,
            softening_cut: cut,
            grid: grid.clone(),
        })
    }

    /// `V = k_h x^2 / 2`.
    pub fn harmonic(grid: &Grid, k_h: f64) -> Result<Self> {
        if !(k_h.is_finite() && k_h >= 0.0) {
            return Err(invalid("k_h", format!("must be finite and >= 0, got {k_h}")));
        }
        let (v, dv) = grid.nodes().map(|x| (0.5 * k_h * x * x, k_h * x)).unzip();
        Ok(Self {
            v,
            dv,
            coupling_k: k_h,
            kind: PotentialKind::Harmonic,
            softening_cut: 0.0,
            grid: grid.clone(),
        })
    }

    pub fn free(grid: &Grid) -> Self {
        let n = grid.n_points();
        Self {
            v: vec![0.0; n],
            dv: vec![0.0; n],
            coupling_k: 0.0,
            kind: PotentialKind::Free,
            softening_cut: 0.0,
            grid: grid.clone(),
        }
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn dv(&self) -> &[f64] {
        &self.dv
    }

    pub fn coupling_k(&self) -> f64 {
        self.coupling_k
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn softening_cut(&self) -> f64 {
        self.softening_cut
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}
