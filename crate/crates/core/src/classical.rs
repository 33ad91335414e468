//! Point-particle dynamics under Hamilton's equations, integrated with
//! classic fixed-step RK4.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub x: f64,
    pub p: f64,
    pub t: f64,
}

/// Analytic force laws. The Coulomb law uses the exact inverse square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForceLaw {
    Free,
    /// `V = k / |x|`, integration refused inside `excluded_radius`.
    Coulomb { coupling_k: f64, excluded_radius: f64 },
    /// `V = k_h x^2 / 2`.
    Harmonic { k_h: f64 },
}

impl ForceLaw {
    pub fn coulomb(coupling_k: f64) -> Self {
        ForceLaw::Coulomb {
            coupling_k,
            excluded_radius: 0.0,
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        match *self {
            ForceLaw::Free => 0.0,
            ForceLaw::Coulomb { coupling_k, .. } => coupling_k / x.abs(),
            ForceLaw::Harmonic { k_h } => 0.5 * k_h * x * x,
        }
    }

    /// `-V'(x)`.
    pub fn force(&self, x: f64) -> f64 {
        match *self {
            ForceLaw::Free => 0.0,
            ForceLaw::Coulomb { coupling_k, .. } => coupling_k * x.signum() / (x * x),
            ForceLaw::Harmonic { k_h } => -k_h * x,
        }
    }

    fn check(&self, x: f64, t: f64) -> Result<()> {
        if let ForceLaw::Coulomb {
            coupling_k,
            excluded_radius,
        } = *self
        {
            if coupling_k != 0.0 && (x == 0.0 || x.abs() < excluded_radius) {
                return Err(Error::ExcludedRegion {
                    radius: excluded_radius,
                    time: t,
                });
            }
        }
        Ok(())
    }
}

pub fn energy(state: &ClassicalState, law: &ForceLaw, mass: f64) -> f64 {
    state.p * state.p / (2.0 * mass) + law.potential(state.x)
}

/// One RK4 step of `dx/dt = p/m`, `dp/dt = -V'(x)`. A negative `dt`
/// integrates backwards.
pub fn hamilton_step(state: &ClassicalState, law: &ForceLaw, mass: f64, dt: f64) -> Result<ClassicalState> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(invalid("dt", format!("must be finite and non-zero, got {dt}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(invalid("mass", format!("must be > 0, got {mass}")));
    }
    let deriv = |x: f64, p: f64| (p / mass, law.force(x));
    let (x, p) = (state.x, state.p);
    let (k1x, k1p) = deriv(x, p);
    let (k2x, k2p) = deriv(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p);
    let (k3x, k3p) = deriv(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p);
    let (k4x, k4p) = deriv(x + dt * k3x, p + dt * k3p);
    let next = ClassicalState {
        x: x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        p: p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        t: state.t + dt,
    };
    if !(next.x.is_finite() && next.p.is_finite()) {
        return Err(Error::ExcludedRegion {
            radius: 0.0,
            time: next.t,
        });
    }
    law.check(next.x, next.t)?;
    Ok(next)
}

/// Samples of `(t, x, p, F)` every `dt` from `t = 0` to `t_max`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassicalSeries {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub force: Vec<f64>,
}

impl ClassicalSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, s: &ClassicalState, law: &ForceLaw) {
        self.times.push(s.t);
        self.x.push(s.x);
        self.p.push(s.p);
        self.force.push(law.force(s.x));
    }
}

/// Integrates `steps` RK4 steps from `(x0, p0)` recording every step.
pub fn integrate(
    x0: f64,
    p0: f64,
    mass: f64,
    law: &ForceLaw,
    dt: f64,
    steps: usize,
) -> Result<ClassicalSeries> {
    let mut s = ClassicalState { x: x0, p: p0, t: 0.0 };
    law.check(x0, 0.0)?;
    let mut series = ClassicalSeries::default();
    series.push(&s, law);
    for n in 1..=steps {
        s = hamilton_step(&s, law, mass, dt)?;
        // avoid accumulating t by repeated addition
        s.t = n as f64 * dt;
        series.push(&s, law);
    }
    Ok(series)
}

/// Head-on approach in the Coulomb field `k/|x|`, starting at `x0 < 0`
/// moving towards the origin.
pub fn classical_trajectory(
    x0: f64,
    p0: f64,
    mass: f64,
    coupling_k: f64,
    dt: f64,
    t_max: f64,
) -> Result<ClassicalSeries> {
    if !(x0 < 0.0) {
        return Err(invalid("x0", format!("approach starts at x0 < 0, got {x0}")));
    }
    if !(p0 > 0.0) {
        return Err(invalid("p0", format!("approach needs p0 > 0, got {p0}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(invalid("t_max", format!("must be > 0, got {t_max}")));
    }
    let steps = steps_for(t_max, dt);
    integrate(x0, p0, mass, &ForceLaw::coulomb(coupling_k), dt, steps)
}

/// Number of whole steps of `dt` that fit in `t_max`.
pub fn steps_for(t_max: f64, dt: f64) -> usize {
    (t_max / dt * (1.0 + 1e-12)).floor() as usize
}

/// Turning point `k / E` of a head-on approach with total energy `E`.
pub fn analytic_closest_approach(energy: f64, coupling_k: f64) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(invalid("kinetic_energy", format!("must be > 0, got {energy}")));
    }
    if !(coupling_k.is_finite() && coupling_k > 0.0) {
        return Err(invalid("coupling_k", format!("must be > 0, got {coupling_k}")));
    }
    Ok(coupling_k / energy)
}
