//! State propagation under static and time-dependent Hamiltonians.
//!
//! Static Hamiltonians are propagated exactly through one eigendecomposition.
//! Time-dependent ones use piecewise exponentials: the midpoint rule
//! `U = exp(−i·H(t+dt/2)·dt)` (second order) or the fourth-order
//! commutator-free Magnus scheme with two Gauss-node exponentials. Both are
//! unitary by construction (each exponential is a diagonal Padé approximant,
//! exactly unitary up to rounding, or a closed form). The internal step starts at
//! `min(0.25/f_max, duration/2000)` and is halved until the sampled
//! populations move by less than the requested tolerance.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dirac::{self, DiracParams, NamedState};
use crate::error::{invalid, Error, Result};
use crate::linalg::{
    eigh, expectation, pade_propagator, EigenDecomposition, HermitianOperator, StateVector, UnitaryOperator,
};
use crate::scalar::{cis, Real};

/// Output sampling `t_start..=t_end` with `n_samples` uniformly spaced points (µs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<T> {
    pub t_start: T,
    pub t_end: T,
    pub n_samples: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_start: T, t_end: T, n_samples: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() || !(t_end > t_start) {
            return Err(invalid("time grid needs finite t_end > t_start"));
        }
        if n_samples < 2 {
            return Err(invalid("time grid needs at least two samples"));
        }
        Ok(Self {
            t_start,
            t_end,
            n_samples,
        })
    }

    pub fn duration(&self) -> T {
        self.t_end - self.t_start
    }

    pub fn times(&self) -> Vec<T> {
        let last = T::from_usize(self.n_samples - 1).unwrap();
        (0..self.n_samples)
            .map(|k| {
                if k == self.n_samples - 1 {
                    self.t_end
                } else {
                    self.t_start + self.duration() * T::from_usize(k).unwrap() / last
                }
            })
            .collect()
    }
}

/// Drive component swept by a chirp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChirpTarget {
    Px,
    Py,
    Pz,
    #[serde(rename = "m")]
    Mass,
}

/// Linear ramp of one drive component from `start_mhz` to `end_mhz` at
/// `rate_mhz2` MHz/µs, beginning at `t = 0` and held at `end_mhz` afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChirpSchedule<T> {
    pub target: ChirpTarget,
    pub start_mhz: T,
    pub end_mhz: T,
    pub rate_mhz2: T,
}

impl<T: Real> ChirpSchedule<T> {
    pub fn new(target: ChirpTarget, start_mhz: T, end_mhz: T, rate_mhz2: T) -> Result<Self> {
        if !start_mhz.is_finite() || !end_mhz.is_finite() || !rate_mhz2.is_finite() {
            return Err(invalid("chirp parameters must be finite"));
        }
        if !(rate_mhz2 > T::zero()) {
            return Err(invalid("chirp rate must be positive"));
        }
        if target == ChirpTarget::Mass && (start_mhz < T::zero() || end_mhz < T::zero()) {
            return Err(invalid("a mass chirp must stay non-negative"));
        }
        Ok(Self {
            target,
            start_mhz,
            end_mhz,
            rate_mhz2,
        })
    }

    /// `|end − start| / rate` in µs.
    pub fn duration(&self) -> T {
        (self.end_mhz - self.start_mhz).abs() / self.rate_mhz2
    }

    pub fn value_at(&self, t: T) -> T {
        if t <= T::zero() {
            return self.start_mhz;
        }
        if t >= self.duration() {
            return self.end_mhz;
        }
        let sign = if self.end_mhz >= self.start_mhz {
            T::one()
        } else {
            -T::one()
        };
        self.start_mhz + sign * self.rate_mhz2 * t
    }

    /// `params` with the swept component replaced by its value at `t`.
    pub fn apply(&self, params: &DiracParams<T>, t: T) -> DiracParams<T> {
        let mut p = *params;
        let v = self.value_at(t);
        match self.target {
            ChirpTarget::Px => p.momentum_mhz[0] = v,
            ChirpTarget::Py => p.momentum_mhz[1] = v,
            ChirpTarget::Pz => p.momentum_mhz[2] = v,
            ChirpTarget::Mass => p.mass_mhz = v,
        }
        p
    }

    pub fn reversed(&self) -> Self {
        Self {
            start_mhz: self.end_mhz,
            end_mhz: self.start_mhz,
            ..*self
        }
    }
}

/// Sampled propagation result. Populations are in storage order; use
/// [`Trajectory::level_populations`] for level-labelled four-level output.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<StateVector<T>>,
    pub populations: Vec<Vec<T>>,
    pub observables: BTreeMap<String, Vec<T>>,
    /// Internal step actually used by the time-dependent stepper.
    pub internal_step: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn from_states(times: Vec<T>, states: Vec<StateVector<T>>) -> Self {
        let populations = states.iter().map(StateVector::populations).collect();
        Self {
            times,
            states,
            populations,
            observables: BTreeMap::new(),
            internal_step: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &StateVector<T> {
        self.states.last().expect("non-empty trajectory")
    }

    /// `max_t | ‖ψ(t)‖ − 1 |`.
    pub fn max_norm_error(&self) -> T {
        self.states
            .iter()
            .fold(T::zero(), |acc, s| acc.max((s.norm() - T::one()).abs()))
    }

    pub fn level_populations(&self) -> Vec<[T; 4]> {
        self.states.iter().map(dirac::level_populations).collect()
    }

    /// Records spin components, the {0,1}/{2,3} manifold populations and, when an
    /// operator is given, the helicity, for a four-level trajectory.
    pub fn add_dirac_observables(&mut self, helicity: Option<&HermitianOperator<T>>) -> Result<()> {
        if self.states.first().is_some_and(|s| s.dim() != 4) {
            return Err(invalid("Dirac observables need a four-level trajectory"));
        }
        let mut cols: BTreeMap<String, Vec<T>> = BTreeMap::new();
        for psi in &self.states {
            let s = dirac::spin_expectation(psi)?;
            cols.entry("spin_x".into()).or_default().push(s.sx);
            cols.entry("spin_y".into()).or_default().push(s.sy);
            cols.entry("spin_z".into()).or_default().push(s.sz);
            cols.entry("p_01".into())
                .or_default()
                .push(manifold_population(psi, &[0, 1])?);
            cols.entry("p_23".into())
                .or_default()
                .push(manifold_population(psi, &[2, 3])?);
            for (name, reference) in [
                ("p_plus01", NamedState::Plus01),
                ("p_minus01", NamedState::Minus01),
                ("p_plus23", NamedState::Plus23),
                ("p_minus23", NamedState::Minus23),
            ] {
                cols.entry(name.into())
                    .or_default()
                    .push(reference.state()?.fidelity(psi));
            }
            if let Some(h) = helicity {
                cols.entry("helicity".into()).or_default().push(expectation(psi, h)?);
            }
        }
        self.observables.extend(cols);
        Ok(())
    }
}

/// Sum of `|cₖ|²` over level labels. Four-level states are addressed by Dirac
/// level (`|0⟩..|3⟩`, independent of storage order); other dimensions by index.
pub fn manifold_population<T: Real>(psi: &StateVector<T>, levels: &[usize]) -> Result<T> {
    let amps = psi.amplitudes();
    let mut total = T::zero();
    for &level in levels {
        if level >= psi.dim() {
            return Err(invalid(format!(
                "level {level} out of range for dimension {}",
                psi.dim()
            )));
        }
        let idx = if psi.dim() == 4 {
            dirac::LEVEL_TO_INDEX[level]
        } else {
            level
        };
        total = total + amps[idx].norm_sqr();
    }
    Ok(total)
}

/// Exact propagation under a constant Hamiltonian; `ψ0` is the state at `grid.t_start`.
pub fn evolve_static<T: Real>(
    h: &HermitianOperator<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
) -> Result<Trajectory<T>> {
    if h.dim() != psi0.dim() {
        return Err(invalid(format!(
            "Hamiltonian dimension {} does not match state dimension {}",
            h.dim(),
            psi0.dim()
        )));
    }
    let e = eigh(h)?;
    let v = &e.eigenvectors;
    let coeffs = v.adjoint().matvec(psi0.amplitudes());
    let times = grid.times();
    let states = times
        .iter()
        .map(|&t| {
            let tau = t - grid.t_start;
            let rotated: Vec<Complex<T>> = coeffs
                .iter()
                .zip(&e.eigenvalues)
                .map(|(c, &l)| *c * cis(-l * tau))
                .collect();
            StateVector::from_raw(v.matvec(&rotated))
        })
        .collect();
    Ok(Trajectory::from_states(times, states))
}

/// Single-step propagation rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMethod {
    /// `exp(−i·H(t+dt/2)·dt)`, second order.
    #[default]
    Midpoint,
    /// Fourth-order commutator-free Magnus (two exponentials per step).
    CommutatorFree4,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

impl StepMethod {
    pub fn order(self) -> u32 {
        match self {
            StepMethod::Midpoint => 2,
            StepMethod::CommutatorFree4 => 4,
        }
    }

    /// Gauss nodes and mixing weights of the fourth-order scheme:
    /// `U = exp(−i·dt·(a·H₁ + b·H₂))·exp(−i·dt·(b·H₁ + a·H₂))`.
    fn cf4_coefficients<T: Real>() -> ([T; 2], T, T) {
        let nodes = [T::lit(0.5 - SQRT3 / 6.0), T::lit(0.5 + SQRT3 / 6.0)];
        let a = T::lit((3.0 - 2.0 * SQRT3) / 12.0);
        let b = T::lit((3.0 + 2.0 * SQRT3) / 12.0);
        (nodes, a, b)
    }
}

/// A Hamiltonian `H(t)` in angular units (rad/µs), `t` in µs.
pub trait TimeDependentHamiltonian<T: Real>: Sync {
    fn dim(&self) -> usize;

    fn at(&self, t: T) -> Result<HermitianOperator<T>>;

    /// Largest frequency scale (MHz) on `[t0, t1]`, used to pick the base step.
    fn max_frequency_mhz(&self, t0: T, t1: T) -> T;

    /// `exp(−i·h·dt)`; override when a closed form is available.
    fn exponential(&self, h: &HermitianOperator<T>, dt: T) -> Result<UnitaryOperator<T>> {
        pade_propagator(h, dt)
    }

    /// One step of `method` from `t` to `t + dt` (`dt` may be negative).
    fn step(&self, t: T, dt: T, method: StepMethod) -> Result<UnitaryOperator<T>> {
        match method {
            StepMethod::Midpoint => self.exponential(&self.at(t + dt * T::lit(0.5))?, dt),
            StepMethod::CommutatorFree4 => {
                let ([c1, c2], a, b) = StepMethod::cf4_coefficients::<T>();
                let h1 = self.at(t + c1 * dt)?;
                let h2 = self.at(t + c2 * dt)?;
                let first = self.exponential(&HermitianOperator::linear_combination(&[(b, &h1), (a, &h2)]), dt)?;
                let second = self.exponential(&HermitianOperator::linear_combination(&[(a, &h1), (b, &h2)]), dt)?;
                Ok(second.compose(&first))
            }
        }
    }
}

/// Step control for [`evolve_time_dependent`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperOptions<T> {
    pub method: StepMethod,
    /// Maximum population change between successive halvings.
    pub tolerance: T,
    pub max_refinements: usize,
    /// Overrides the automatic base step (µs).
    pub base_step: Option<T>,
}

impl<T: Real> Default for StepperOptions<T> {
    fn default() -> Self {
        Self {
            method: StepMethod::Midpoint,
            tolerance: T::lit(1e-7),
            max_refinements: 12,
            base_step: None,
        }
    }
}

/// Propagates `psi` from `t_from` to `t_to` in `n_steps` equal steps.
pub fn propagate<T: Real, H: TimeDependentHamiltonian<T> + ?Sized>(
    ham: &H,
    psi: &StateVector<T>,
    t_from: T,
    t_to: T,
    n_steps: usize,
    method: StepMethod,
) -> Result<StateVector<T>> {
    if ham.dim() != psi.dim() {
        return Err(invalid("Hamiltonian and state dimensions differ"));
    }
    let n = n_steps.max(1);
    let h = (t_to - t_from) / T::from_usize(n).unwrap();
    let mut state = psi.clone();
    for k in 0..n {
        let t = t_from + h * T::from_usize(k).unwrap();
        state = ham.step(t, h, method)?.apply(&state);
    }
    Ok(state)
}

fn run_fixed<T: Real, H: TimeDependentHamiltonian<T> + ?Sized>(
    ham: &H,
    psi0: &StateVector<T>,
    times: &[T],
    dt: T,
    method: StepMethod,
) -> Result<Vec<StateVector<T>>> {
    let mut states = Vec::with_capacity(times.len());
    states.push(psi0.clone());
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let n = (span / dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
        let next = propagate(ham, states.last().unwrap(), w[0], w[1], n, method)?;
        states.push(next);
    }
    Ok(states)
}

fn max_population_change<T: Real>(a: &[StateVector<T>], b: &[StateVector<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| {
        x.amplitudes()
            .iter()
            .zip(y.amplitudes())
            .fold(acc, |acc, (p, q)| acc.max((p.norm_sqr() - q.norm_sqr()).abs()))
    })
}

/// Default base step `min(0.25/f_max, duration/2000)`.
pub fn base_step<T: Real>(f_max_mhz: T, duration: T) -> T {
    let by_duration = duration / T::lit(2000.0);
    if f_max_mhz > T::zero() {
        (T::lit(0.25) / f_max_mhz).min(by_duration)
    } else {
        by_duration
    }
}

/// Integrates `i∂ψ/∂t = H(t)ψ` from `grid.t_start`, halving the internal step until
/// the sampled populations change by at most `opts.tolerance`.
pub fn evolve_time_dependent<T: Real, H: TimeDependentHamiltonian<T> + ?Sized>(
    ham: &H,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    opts: &StepperOptions<T>,
) -> Result<Trajectory<T>> {
    if ham.dim() != psi0.dim() {
        return Err(invalid("Hamiltonian and state dimensions differ"));
    }
    let times = grid.times();
    let mut dt = opts
        .base_step
        .unwrap_or_else(|| base_step(ham.max_frequency_mhz(grid.t_start, grid.t_end), grid.duration()));
    let mut previous = run_fixed(ham, psi0, &times, dt, opts.method)?;
    let mut last_change = T::infinity();
    for _ in 0..opts.max_refinements {
        dt = dt * T::lit(0.5);
        let current = run_fixed(ham, psi0, &times, dt, opts.method)?;
        last_change = max_population_change(&previous, &current);
        if last_change <= opts.tolerance {
            let mut traj = Trajectory::from_states(times, current);
            traj.internal_step = Some(dt);
            return Ok(traj);
        }
        previous = current;
    }
    Err(Error::ConvergenceFailure(format!(
        "population change {last_change:?} still above {:?} after {} step halvings",
        opts.tolerance, opts.max_refinements
    )))
}

/// Fixed-step integration (no refinement); used for convergence studies.
pub fn evolve_fixed_step<T: Real, H: TimeDependentHamiltonian<T> + ?Sized>(
    ham: &H,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    dt: T,
    method: StepMethod,
) -> Result<Trajectory<T>> {
    let times = grid.times();
    let states = run_fixed(ham, psi0, &times, dt, method)?;
    let mut traj = Trajectory::from_states(times, states);
    traj.internal_step = Some(dt);
    Ok(traj)
}

/// Dirac Hamiltonian with one component swept by a [`ChirpSchedule`].
#[derive(Clone, Copy, Debug)]
pub struct ChirpedDirac<T> {
    pub params: DiracParams<T>,
    pub schedule: ChirpSchedule<T>,
}

impl<T: Real> ChirpedDirac<T> {
    pub fn params_at(&self, t: T) -> DiracParams<T> {
        self.schedule.apply(&self.params, t)
    }
}

fn combine<T: Real>(a: T, p: &DiracParams<T>, b: T, q: &DiracParams<T>) -> DiracParams<T> {
    DiracParams {
        mass_mhz: a * p.mass_mhz + b * q.mass_mhz,
        momentum_mhz: [0, 1, 2].map(|k| a * p.momentum_mhz[k] + b * q.momentum_mhz[k]),
    }
}

impl<T: Real> TimeDependentHamiltonian<T> for ChirpedDirac<T> {
    fn dim(&self) -> usize {
        4
    }

    fn at(&self, t: T) -> Result<HermitianOperator<T>> {
        dirac::build_dirac_hamiltonian(&self.params_at(t))
    }

    fn max_frequency_mhz(&self, t0: T, t1: T) -> T {
        // energy is convex along a linear sweep, so the endpoints bound it
        let mut ts = vec![t0, t1];
        let d = self.schedule.duration();
        if d > t0 && d < t1 {
            ts.push(d);
        }
        ts.into_iter()
            .map(|t| self.params_at(t).energy_mhz())
            .fold(T::zero(), T::max)
    }

    fn step(&self, t: T, dt: T, method: StepMethod) -> Result<UnitaryOperator<T>> {
        // H is linear in (m, p), so Magnus combinations stay Dirac-form and
        // exponentiate in closed form
        match method {
            StepMethod::Midpoint => Ok(dirac::dirac_propagator(&self.params_at(t + dt * T::lit(0.5)), dt)),
            StepMethod::CommutatorFree4 => {
                let ([c1, c2], a, b) = StepMethod::cf4_coefficients::<T>();
                let p1 = self.params_at(t + c1 * dt);
                let p2 = self.params_at(t + c2 * dt);
                let first = dirac::dirac_propagator(&combine(b, &p1, a, &p2), dt);
                let second = dirac::dirac_propagator(&combine(a, &p1, b, &p2), dt);
                Ok(second.compose(&first))
            }
        }
    }
}

/// Chirped Dirac evolution with the midpoint stepper and step-halving control.
pub fn evolve_chirped<T: Real>(
    params: &DiracParams<T>,
    schedule: &ChirpSchedule<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
) -> Result<Trajectory<T>> {
    evolve_chirped_with(params, schedule, psi0, grid, &StepperOptions::default())
}

pub fn evolve_chirped_with<T: Real>(
    params: &DiracParams<T>,
    schedule: &ChirpSchedule<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    opts: &StepperOptions<T>,
) -> Result<Trajectory<T>> {
    params.validate()?;
    if psi0.dim() != 4 {
        return Err(invalid("chirped Dirac evolution needs a four-level state"));
    }
    let ham = ChirpedDirac {
        params: *params,
        schedule: *schedule,
    };
    let mut traj = evolve_time_dependent(&ham, psi0, grid, opts)?;
    traj.add_dirac_observables(None)?;
    let px: Vec<T> = traj.times.iter().map(|&t| ham.params_at(t).momentum_mhz[0]).collect();
    let mass: Vec<T> = traj.times.iter().map(|&t| ham.params_at(t).mass_mhz).collect();
    traj.observables.insert("px_mhz".into(), px);
    traj.observables.insert("mass_mhz".into(), mass);
    Ok(traj)
}

/// `H(t)` seen in the interaction picture of a static reference `A`,
/// expressed in the eigenbasis of `A`:
/// `H̃(t)ⱼₖ = [V†(H(t) − A)V]ⱼₖ · e^{i(λⱼ−λₖ)t}`.
pub struct InteractionPicture<'a, T, H: ?Sized> {
    inner: &'a H,
    reference: HermitianOperator<T>,
    eigen: EigenDecomposition<T>,
    f_max_mhz: T,
}

impl<'a, T: Real, H: TimeDependentHamiltonian<T> + ?Sized> InteractionPicture<'a, T, H> {
    /// `f_max_mhz` is the largest frequency left in the interaction-picture Hamiltonian.
    pub fn new(inner: &'a H, reference: HermitianOperator<T>, f_max_mhz: T) -> Result<Self> {
        if reference.dim() != inner.dim() {
            return Err(invalid("reference dimension differs from the Hamiltonian"));
        }
        let eigen = eigh(&reference)?;
        Ok(Self {
            inner,
            reference,
            eigen,
            f_max_mhz,
        })
    }

    /// Interaction-picture coordinates of a state at time `t`.
    pub fn to_interaction(&self, psi: &StateVector<T>, t: T) -> StateVector<T> {
        let c = self.eigen.eigenvectors.adjoint().matvec(psi.amplitudes());
        StateVector::from_raw(
            c.iter()
                .zip(&self.eigen.eigenvalues)
                .map(|(z, &l)| *z * cis(l * t))
                .collect(),
        )
    }

    /// Inverse of [`Self::to_interaction`].
    pub fn from_interaction(&self, phi: &StateVector<T>, t: T) -> StateVector<T> {
        let rotated: Vec<Complex<T>> = phi
            .amplitudes()
            .iter()
            .zip(&self.eigen.eigenvalues)
            .map(|(z, &l)| *z * cis(-l * t))
            .collect();
        StateVector::from_raw(self.eigen.eigenvectors.matvec(&rotated))
    }
}

impl<T: Real, H: TimeDependentHamiltonian<T> + ?Sized> TimeDependentHamiltonian<T> for InteractionPicture<'_, T, H> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn at(&self, t: T) -> Result<HermitianOperator<T>> {
        let b = self.inner.at(t)?.sub(&self.reference);
        let v = &self.eigen.eigenvectors;
        let mut m = &(&v.adjoint() * b.matrix()) * v;
        let l = &self.eigen.eigenvalues;
        for j in 0..m.rows() {
            for k in 0..m.cols() {
                if j != k {
                    m[(j, k)] = m[(j, k)] * cis((l[j] - l[k]) * t);
                }
            }
        }
        HermitianOperator::new(m)
    }

    fn max_frequency_mhz(&self, _t0: T, _t1: T) -> T {
        self.f_max_mhz
    }
}

/// Integrates in the interaction picture of `reference` (treated exactly) and
/// returns states in the original frame. Step control acts on the populations
/// in the eigenbasis of `reference`.
pub fn evolve_interaction_picture<T: Real, H: TimeDependentHamiltonian<T> + ?Sized>(
    ham: &H,
    reference: &HermitianOperator<T>,
    f_max_mhz: T,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    opts: &StepperOptions<T>,
) -> Result<Trajectory<T>> {
    let ip = InteractionPicture::new(ham, reference.clone(), f_max_mhz)?;
    let phi0 = ip.to_interaction(psi0, grid.t_start);
    let inner = evolve_time_dependent(&ip, &phi0, grid, opts)?;
    let states = inner
        .times
        .iter()
        .zip(&inner.states)
        .map(|(&t, phi)| ip.from_interaction(phi, t))
        .collect();
    let mut traj = Trajectory::from_states(inner.times, states);
    traj.internal_step = inner.internal_step;
    Ok(traj)
}

/// Convention for the units inside the Schwinger exponent `−π·m²/ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchwingerConvention {
    /// `m` and `ε` both angular: `exp(−π·(2πm)²/(2πε)) = exp(−2π²m²/ε)`.
    Angular,
    /// `m` and `ε` taken as quoted: `exp(−π·m²/ε)`.
    Ordinary,
}

/// Convention selected by the Landau-Zener calibration (see the `schwinger-scan` scenario).
pub const ADOPTED_SCHWINGER_CONVENTION: SchwingerConvention = SchwingerConvention::Angular;

impl SchwingerConvention {
    pub fn probability<T: Real>(self, mass_mhz: T, rate_mhz2: T) -> T {
        let factor = match self {
            SchwingerConvention::Angular => T::lit(2.0) * T::PI() * T::PI(),
            SchwingerConvention::Ordinary => T::PI(),
        };
        (-factor * mass_mhz * mass_mhz / rate_mhz2).exp()
    }
}

/// Pair-production probability with the adopted convention; `rate_mhz2 > 0`.
pub fn schwinger_probability<T: Real>(mass_mhz: T, rate_mhz2: T) -> T {
    ADOPTED_SCHWINGER_CONVENTION.probability(mass_mhz, rate_mhz2)
}

/// Final {0,1}-manifold population after sweeping `pₓ` over `schedule` from `|0⟩`.
pub fn final_pair_population<T: Real>(mass_mhz: T, schedule: &ChirpSchedule<T>) -> Result<T> {
    let params = DiracParams::new(mass_mhz, [schedule.start_mhz, T::zero(), T::zero()])?;
    let grid = TimeGrid::new(T::zero(), schedule.duration(), 2)?;
    let psi0 = NamedState::Level(0).state()?;
    let traj = evolve_chirped(&params, schedule, &psi0, &grid)?;
    manifold_population(traj.final_state(), &[0, 1])
}

/// Outcome of fitting the exponent convention to numerical sweeps.
#[derive(Clone, Debug)]
pub struct SchwingerCalibration<T> {
    pub masses_mhz: Vec<T>,
    pub numeric: Vec<T>,
    pub max_deviation_angular: T,
    pub max_deviation_ordinary: T,
    pub adopted: SchwingerConvention,
}

/// Picks the convention whose formula deviates least (max absolute) from the
/// numerically swept {0,1} population.
pub fn calibrate_schwinger_convention<T: Real>(
    masses_mhz: &[T],
    schedule: &ChirpSchedule<T>,
) -> Result<SchwingerCalibration<T>> {
    let numeric = masses_mhz
        .iter()
        .map(|&m| final_pair_population(m, schedule))
        .collect::<Result<Vec<_>>>()?;
    let dev = |conv: SchwingerConvention| {
        masses_mhz
            .iter()
            .zip(&numeric)
            .map(|(&m, &p)| (p - conv.probability(m, schedule.rate_mhz2)).abs())
            .fold(T::zero(), T::max)
    };
    let max_deviation_angular = dev(SchwingerConvention::Angular);
    let max_deviation_ordinary = dev(SchwingerConvention::Ordinary);
    let adopted = if max_deviation_angular <= max_deviation_ordinary {
        SchwingerConvention::Angular
    } else {
        SchwingerConvention::Ordinary
    };
    Ok(SchwingerCalibration {
        masses_mhz: masses_mhz.to_vec(),
        numeric,
        max_deviation_angular,
        max_deviation_ordinary,
        adopted,
    })
}
