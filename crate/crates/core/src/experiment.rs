//! Paired quantum/classical runs and the comparison metrics built on them.

use serde::{Deserialize, Serialize};

use crate::classical::{analytic_closest_approach, integrate, steps_for, ClassicalSeries, ForceLaw};
use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, UnitSystem, DEFAULT_MASS_ALPHA};
use crate::potential::{coupling_constant, PotentialTable};
use crate::propagator::CnPropagator;
use crate::wavepacket::{QuantumObservables, WaveFunction};

/// Fraction of the mesh, at each end, scanned for boundary contamination.
pub const EDGE_BAND_FRACTION: f64 = 0.005;
/// Largest tolerated edge-to-peak amplitude ratio during a run.
pub const CONTAMINATION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub x0: f64,
    pub p0: f64,
    pub sigma_list: Vec<f64>,
    pub z1: i64,
    pub z2: i64,
    pub mass: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dt: f64,
    pub t_max: f64,
    pub sample_every: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub softening_cut: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            x0: -500.0,
            p0: 386.13,
            sigma_list: vec![20.0, 50.0],
            z1: 2,
            z2: 79,
            mass: DEFAULT_MASS_ALPHA,
            x_min: -1200.0,
            x_max: 200.0,
            n_points: 56_001,
            dt: 0.5,
            t_max: 12_000.0,
            sample_every: 12,
            softening_cut: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        };
        finite("x0", self.x0)?;
        finite("p0", self.p0)?;
        finite("x_min", self.x_min)?;
        finite("x_max", self.x_max)?;
        if self.sigma_list.is_empty() {
            return Err(invalid("sigma_list", "must not be empty"));
        }
        if let Some(s) = self.sigma_list.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(invalid("sigma_list", format!("every sigma must be > 0, got {s}")));
        }
        if self.z1 < 1 {
            return Err(invalid("z1", format!("must be >= 1, got {}", self.z1)));
        }
        if self.z2 < 1 {
            return Err(invalid("z2", format!("must be >= 1, got {}", self.z2)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(invalid("mass", format!("must be > 0, got {}", self.mass)));
        }
        if self.x_min >= self.x_max {
            return Err(invalid("x_max", format!("must exceed x_min, got {}", self.x_max)));
        }
        if self.n_points < 3 {
            return Err(invalid("n_points", format!("must be >= 3, got {}", self.n_points)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(invalid("t_max", format!("must be > 0, got {}", self.t_max)));
        }
        if self.t_max < self.dt {
            return Err(invalid("t_max", "must cover at least one time step"));
        }
        if self.sample_every < 1 {
            return Err(invalid("sample_every", "must be >= 1"));
        }
        if let Some(c) = self.softening_cut {
            if !(c.is_finite() && c >= 0.0) {
                return Err(invalid("softening_cut", format!("must be >= 0, got {c}")));
            }
        }
        Ok(())
    }

    pub fn units(&self) -> Result<UnitSystem> {
        UnitSystem::with_mass(self.mass)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.x_min, self.x_max, self.n_points)
    }

    pub fn coupling_k(&self) -> Result<f64> {
        coupling_constant(self.z1, self.z2, &self.units()?)
    }

    pub fn total_steps(&self) -> usize {
        steps_for(self.t_max, self.dt)
    }

    pub fn sample_count(&self) -> usize {
        self.total_steps() / self.sample_every + 1
    }

    /// The same run with both mesh spacing and time step halved, sampled at
    /// the same instants.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * (self.n_points - 1) + 1,
            dt: 0.5 * self.dt,
            sample_every: 2 * self.sample_every,
            ..self.clone()
        }
    }
}

/// Field the projectile moves in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetField {
    /// `Z1 Z2 alpha hbar c / |x|` from the config's charges.
    Coulomb,
    Free,
    Harmonic { k_h: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSeries {
    pub sigma: f64,
    pub samples: Vec<QuantumObservables>,
}

impl QuantumSeries {
    pub fn column(&self, f: impl Fn(&QuantumObservables) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }

    pub fn mean_x(&self) -> Vec<f64> {
        self.column(|o| o.mean_x)
    }

    pub fn mean_p(&self) -> Vec<f64> {
        self.column(|o| o.mean_p)
    }

    pub fn mean_force(&self) -> Vec<f64> {
        self.column(|o| o.mean_force)
    }
}

/// Everything sampled on the shared time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub classical: ClassicalSeries,
    pub quantum: Vec<QuantumSeries>,
}

/// Parameters derived while setting a run up, written next to the results.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub grid: Grid,
    pub units: UnitSystem,
    pub coupling_k: f64,
    pub softening_cut: f64,
    pub reference_energy: f64,
    pub classical_energy: f64,
    pub field: TargetField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Approach {
    Reached { time: f64, distance: f64 },
    NotReached,
}

impl Approach {
    pub fn distance(&self) -> Option<f64> {
        match *self {
            Approach::Reached { distance, .. } => Some(distance),
            Approach::NotReached => None,
        }
    }

    pub fn time(&self) -> Option<f64> {
        match *self {
            Approach::Reached { time, .. } => Some(time),
            Approach::NotReached => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenReport {
    pub quantum_force_t0: f64,
    pub classical_force_t0: f64,
    /// `|<F>(0)| >= |F_cl(0)|`.
    pub t0_satisfied: bool,
    /// The initial sample has `|<F>| > |F_cl|` strictly.
    pub initial_excess: bool,
    /// First time `|<F>| < |F_cl|`, linearly interpolated between samples.
    pub crossover_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaMetrics {
    pub sigma: f64,
    pub approach: Approach,
    pub jensen: JensenReport,
    pub max_lag: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMetrics {
    pub classical: Approach,
    /// `k / E` with `E = p0^2/2m + V(x0)`; `None` without a Coulomb field.
    pub classical_oracle: Option<f64>,
    pub per_sigma: Vec<SigmaMetrics>,
}

impl ComparisonMetrics {
    /// Every quantum closest approach exceeds the classical one.
    pub fn quantum_stays_farther(&self) -> Option<bool> {
        let cl = self.classical.distance()?;
        self.per_sigma
            .iter()
            .map(|s| s.approach.distance().map(|d| d > cl))
            .collect::<Option<Vec<_>>>()
            .map(|v| v.iter().all(|&b| b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub series: ObservableSeries,
    pub metrics: ComparisonMetrics,
    pub metadata: RunMetadata,
}

/// Headline run: Coulomb field from the config's charges.
pub fn run_comparison(config: &RunConfig) -> Result<RunOutput> {
    run_with_field(config, TargetField::Coulomb)
}

pub fn run_with_field(config: &RunConfig, field: TargetField) -> Result<RunOutput> {
    config.validate()?;
    let units = config.units()?;
    let grid = config.grid()?;
    let (pot, law, coupling_k) = match field {
        TargetField::Coulomb => {
            let k = config.coupling_k()?;
            let pot = PotentialTable::coulomb(&grid, k, config.softening_cut)?;
            (pot, ForceLaw::coulomb(k), k)
        }
        TargetField::Free => (PotentialTable::free(&grid), ForceLaw::Free, 0.0),
        TargetField::Harmonic { k_h } => (
            PotentialTable::harmonic(&grid, k_h)?,
            ForceLaw::Harmonic { k_h },
            k_h,
        ),
    };
    let classical_energy = config.p0 * config.p0 / (2.0 * config.mass) + law.potential(config.x0);
    let prop = CnPropagator::build_with_reference(&grid, &pot, config.dt, &units, classical_energy)?;

    let steps = config.total_steps();
    let every = config.sample_every;
    let dense = integrate(config.x0, config.p0, config.mass, &law, config.dt, steps)?;
    let classical = subsample(&dense, every);
    let times = classical.times.clone();

    // Packets first, so a misfit sigma fails before any propagation.
    let packets = config
        .sigma_list
        .iter()
        .map(|&s| WaveFunction::gaussian(&grid, config.x0, s, config.p0, &units))
        .collect::<Result<Vec<_>>>()?;

    let quantum = propagate_sampled(&prop, &pot, &units, packets, &config.sigma_list, steps, every)?;

    let series = ObservableSeries {
        times,
        classical,
        quantum,
    };
    let classical_oracle = match field {
        TargetField::Coulomb => analytic_closest_approach(classical_energy, coupling_k).ok(),
        _ => None,
    };
    let metrics = compare(&series, &dense, classical_oracle)?;
    let metadata = RunMetadata {
        softening_cut: pot.softening_cut(),
        grid,
        units,
        coupling_k,
        reference_energy: prop.reference_energy(),
        classical_energy,
        field,
    };
    Ok(RunOutput {
        series,
        metrics,
        metadata,
    })
}

fn subsample(dense: &ClassicalSeries, every: usize) -> ClassicalSeries {
    let pick = |v: &[f64]| v.iter().step_by(every).copied().collect::<Vec<_>>();
    ClassicalSeries {
        times: pick(&dense.times),
        x: pick(&dense.x),
        p: pick(&dense.p),
        force: pick(&dense.force),
    }
}

/// Steps all packets together, sampling observables every `every` steps.
fn propagate_sampled(
    prop: &CnPropagator,
    pot: &PotentialTable,
    units: &UnitSystem,
    mut packets: Vec<WaveFunction>,
    sigmas: &[f64],
    steps: usize,
    every: usize,
) -> Result<Vec<QuantumSeries>> {
    let n_points = prop.grid().n_points();
    let band = ((EDGE_BAND_FRACTION * n_points as f64) as usize).max(2);
    let n_samples = steps / every + 1;
    let mut out: Vec<QuantumSeries> = sigmas
        .iter()
        .map(|&sigma| QuantumSeries {
            sigma,
            samples: Vec::with_capacity(n_samples),
        })
        .collect();
    for k in 0..n_samples {
        if k > 0 {
            prop.propagate_batch(&mut packets, every)?;
        }
        for (wf, series) in packets.iter().zip(out.iter_mut()) {
            let ratio = wf.edge_ratio(band);
            if !(ratio <= CONTAMINATION_LIMIT) {
                return Err(Error::BoundaryContamination {
                    sigma: series.sigma,
                    time: wf.time(),
                    ratio,
                });
            }
            let mut obs = wf.observables(pot, units)?;
            // sample instants from the step count, not accumulated dt
            obs.time = (k * every) as f64 * prop.dt();
            series.samples.push(obs);
        }
    }
    Ok(out)
}

fn compare(series: &ObservableSeries, dense: &ClassicalSeries, classical_oracle: Option<f64>) -> Result<ComparisonMetrics> {
    let classical = closest_approach(&dense.times, &dense.x, &dense.p)?;
    let per_sigma = series
        .quantum
        .iter()
        .map(|q| {
            let (qx, qp, qf) = (q.mean_x(), q.mean_p(), q.mean_force());
            let approach = closest_approach(&series.times, &qx, &qp)?;
            let jensen = jensen_report(&series.times, &qf, &series.classical.force)?;
            let end = approach.time().unwrap_or(f64::INFINITY);
            let lag = max_lag(&series.times, &series.classical.x, &qx, end)?;
            Ok(SigmaMetrics {
                sigma: q.sigma,
                approach,
                jensen,
                max_lag: lag,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonMetrics {
        classical,
        classical_oracle,
        per_sigma,
    })
}

fn check_lengths(times: &[f64], other: &[f64]) -> Result<()> {
    if times.len() != other.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            actual: other.len(),
        });
    }
    Ok(())
}

/// Turning point of a position/momentum series: the first momentum sign
/// change, refined by the vertex of the parabola through the three samples
/// around it.
pub fn closest_approach(times: &[f64], x: &[f64], p: &[f64]) -> Result<Approach> {
    check_lengths(times, x)?;
    check_lengths(times, p)?;
    if times.len() < 3 {
        return Ok(Approach::NotReached);
    }
    let Some(i) = (0..times.len() - 1).find(|&i| p[i] != 0.0 && (p[i] * p[i + 1] < 0.0 || p[i + 1] == 0.0)) else {
        return Ok(Approach::NotReached);
    };
    let centre = if p[i].abs() < p[i + 1].abs() { i } else { i + 1 };
    let c = centre.clamp(1, times.len() - 2);
    let (sa, sc) = (times[c - 1] - times[c], times[c + 1] - times[c]);
    if !(sa < 0.0 && sc > 0.0) {
        return Err(Error::DegenerateFit("times must increase".into()));
    }
    let d1 = (x[c - 1] - x[c]) / sa;
    let d2 = (x[c + 1] - x[c]) / sc;
    let curv = (d2 - d1) / (sc - sa);
    if curv == 0.0 || !curv.is_finite() {
        return Err(Error::DegenerateFit(format!("zero curvature near t = {}", times[c])));
    }
    let slope = d1 - curv * sa;
    let s_star = -slope / (2.0 * curv);
    let x_star = x[c] - slope * slope / (4.0 * curv);
    if !(s_star.is_finite() && x_star.is_finite()) {
        return Err(Error::DegenerateFit("non-finite vertex".into()));
    }
    Ok(Approach::Reached {
        time: times[c] + s_star,
        distance: x_star.abs(),
    })
}

/// Compares `|<F>|` with `|F_cl|` at `t = 0` and finds the first crossing.
pub fn jensen_report(times: &[f64], quantum_force: &[f64], classical_force: &[f64]) -> Result<JensenReport> {
    check_lengths(times, quantum_force)?;
    check_lengths(times, classical_force)?;
    if times.is_empty() {
        return Err(invalid("series", "must not be empty"));
    }
    let gap: Vec<f64> = quantum_force
        .iter()
        .zip(classical_force)
        .map(|(q, c)| q.abs() - c.abs())
        .collect();
    let crossover_time = gap.iter().position(|&g| g < 0.0).map(|i| {
        if i == 0 {
            times[0]
        } else {
            let (g0, g1) = (gap[i - 1], gap[i]);
            let w = if g0 > 0.0 { g0 / (g0 - g1) } else { 1.0 };
            times[i - 1] + w * (times[i] - times[i - 1])
        }
    });
    Ok(JensenReport {
        quantum_force_t0: quantum_force[0],
        classical_force_t0: classical_force[0],
        t0_satisfied: gap[0] >= 0.0,
        initial_excess: gap[0] > 0.0,
        crossover_time,
    })
}

/// Largest `x_cl(t) - <x>(t)` over samples with `t <= t_end`.
pub fn max_lag(times: &[f64], classical_x: &[f64], quantum_x: &[f64], t_end: f64) -> Result<f64> {
    check_lengths(times, classical_x)?;
    check_lengths(times, quantum_x)?;
    times
        .iter()
        .zip(classical_x.iter().zip(quantum_x))
        .filter(|(t, _)| **t <= t_end)
        .map(|(_, (c, q))| c - q)
        .reduce(f64::max)
        .ok_or_else(|| invalid("series", "no samples in the approach phase"))
}
