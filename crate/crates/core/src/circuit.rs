//! Two coupled three-level transmons and their dressed "diamond".
//!
//! Basis ordering is `|na nb⟩ ↦ 3·na + nb`. Energies are in MHz (ordinary
//! frequency) at the API surface and angular (rad/µs) inside Hamiltonians.
//!
//! The drive acts through `Ω(t)·a† + Ω*(t)·a` with
//! `Ω(t) = Σₖ Vₖ(t)·e^{−i·2π·fₖ·t}`; with `i∂ψ/∂t = Hψ` this sign makes every
//! tone co-rotating with the upward transition it addresses.

use num_complex::Complex;
use num_traits::Zero;

use crate::dirac::{self, DiracParams};
use crate::error::{invalid, Error, Result};
use crate::evolution::{
    evolve_interaction_picture, evolve_static, ChirpSchedule, StepMethod, StepperOptions, TimeDependentHamiltonian,
    TimeGrid, Trajectory,
};
use crate::linalg::{eigh, ComplexMatrix, HermitianOperator, StateVector};
use crate::scalar::{angular, cis, Real};

pub const DIM: usize = 9;
const LEVELS: usize = 3;

/// Diamond transitions in tone order: `0→1, 0→2, 1→3, 2→3`.
pub const TRANSITIONS: [(usize, usize); 4] = [(0, 1), (0, 2), (1, 3), (2, 3)];

/// Basis index of the bare state `|na nb⟩`.
pub fn bare_index(na: usize, nb: usize) -> usize {
    LEVELS * na + nb
}

/// Bare label `"na nb"` of a basis index.
pub fn bare_label(index: usize) -> String {
    format!("{}{}", index / LEVELS, index % LEVELS)
}

/// Transmon pair parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitParams<T> {
    pub omega0_ghz: T,
    pub kappa_mhz: T,
    pub g_mhz: T,
}

impl<T: Real> Default for CircuitParams<T> {
    fn default() -> Self {
        Self {
            omega0_ghz: T::lit(5.0),
            kappa_mhz: T::lit(-300.0),
            g_mhz: T::lit(100.0),
        }
    }
}

impl<T: Real> CircuitParams<T> {
    pub fn new(omega0_ghz: T, kappa_mhz: T, g_mhz: T) -> Result<Self> {
        let p = Self {
            omega0_ghz,
            kappa_mhz,
            g_mhz,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ω₀ > 0`, `κ ≤ 0`, `g ≥ 0`, all finite. The zero limits are accepted so
    /// that uncoupled or harmonic cases can be studied.
    pub fn validate(&self) -> Result<()> {
        if !self.omega0_ghz.is_finite() || !self.kappa_mhz.is_finite() || !self.g_mhz.is_finite() {
            return Err(invalid("circuit parameters must be finite"));
        }
        if !(self.omega0_ghz > T::zero()) {
            return Err(invalid("omega0 must be positive"));
        }
        if self.kappa_mhz > T::zero() {
            return Err(invalid("anharmonicity kappa must be non-positive"));
        }
        if self.g_mhz < T::zero() {
            return Err(invalid("coupling g must be non-negative"));
        }
        Ok(())
    }

    pub fn omega0_mhz(&self) -> T {
        self.omega0_ghz * T::lit(1000.0)
    }

    /// Non-fatal remarks about the parameter regime.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.kappa_mhz.abs() <= self.g_mhz {
            out.push(format!(
                "|kappa| = {:?} MHz does not exceed g = {:?} MHz; the diamond levels are strongly hybridized",
                self.kappa_mhz.abs(),
                self.g_mhz
            ));
        }
        out
    }
}

fn single_lowering<T: Real>() -> ComplexMatrix<T> {
    let mut a = ComplexMatrix::zeros(LEVELS, LEVELS);
    for n in 1..LEVELS {
        a[(n - 1, n)] = Complex::new(T::from_usize(n).unwrap().sqrt(), T::zero());
    }
    a
}

/// Truncated lowering operators `(a, b)` on the nine-dimensional space.
pub fn lowering_operators<T: Real>() -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let id = ComplexMatrix::identity(LEVELS);
    let a1 = single_lowering();
    (crate::linalg::kron(&a1, &id), crate::linalg::kron(&id, &a1))
}

/// Total excitation number of each basis state.
pub fn excitation_numbers() -> [usize; DIM] {
    std::array::from_fn(|i| i / LEVELS + i % LEVELS)
}

/// `a†a + b†b`.
pub fn number_operator<T: Real>() -> HermitianOperator<T> {
    let n = excitation_numbers().map(|k| T::from_usize(k).unwrap());
    HermitianOperator::new_unchecked(ComplexMatrix::from_real_diagonal(&n))
}

/// `H₀ = ω₀·N + (κ/2)(a†a†aa + b†b†bb) + g(a†b + b†a)` in rad/µs.
pub fn build_bare_hamiltonian<T: Real>(params: &CircuitParams<T>) -> Result<HermitianOperator<T>> {
    params.validate()?;
    let w0 = angular(params.omega0_mhz());
    let kappa = angular(params.kappa_mhz);
    let g = angular(params.g_mhz);
    let mut h = ComplexMatrix::zeros(DIM, DIM);
    for na in 0..LEVELS {
        for nb in 0..LEVELS {
            let i = bare_index(na, nb);
            let (fa, fb) = (T::from_usize(na).unwrap(), T::from_usize(nb).unwrap());
            let anh = kappa * T::lit(0.5) * (fa * (fa - T::one()) + fb * (fb - T::one()));
            h[(i, i)] = Complex::new(w0 * (fa + fb) + anh, T::zero());
        }
    }
    // g·a†b: |na, nb⟩ → √(na+1)·√nb |na+1, nb−1⟩
    for na in 0..LEVELS - 1 {
        for nb in 1..LEVELS {
            let from = bare_index(na, nb);
            let to = bare_index(na + 1, nb - 1);
            let amp = g * T::from_usize((na + 1) * nb).unwrap().sqrt();
            h[(to, from)] = Complex::new(amp, T::zero());
            h[(from, to)] = Complex::new(amp, T::zero());
        }
    }
    Ok(HermitianOperator::new_unchecked(h))
}

/// One dressed eigenstate of `H₀`.
#[derive(Clone, Debug)]
pub struct DressedState<T> {
    pub energy_mhz: T,
    pub excitation: usize,
    pub state: StateVector<T>,
}

/// Dressed eigenbasis with the diamond levels identified.
#[derive(Clone, Debug)]
pub struct DressedBasis<T> {
    pub params: CircuitParams<T>,
    /// All nine dressed states, ascending in energy.
    pub states: Vec<DressedState<T>>,
    /// Indices into `states` of diamond levels |0⟩..|3⟩.
    pub diamond_indices: [usize; 4],
    pub diamond_states: [StateVector<T>; 4],
    pub diamond_energies_mhz: [T; 4],
    pub spectator_states: Vec<StateVector<T>>,
    /// `f₀₁, f₀₂, f₁₃, f₂₃` in MHz.
    pub transition_frequencies_mhz: [T; 4],
}

/// Largest-magnitude component made real positive; ties go to the lowest index.
fn fix_phase<T: Real>(v: &mut [Complex<T>]) {
    let max = v.iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
    if max.is_zero() {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (T::one() - T::lit(1e-10)))
        .expect("non-empty vector");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z = *z * phase;
    }
}

/// Eigendecomposes `H₀` inside each excitation-number block and labels the diamond.
pub fn dressed_basis<T: Real>(params: &CircuitParams<T>) -> Result<DressedBasis<T>> {
    let h0 = build_bare_hamiltonian(params)?;
    let exc = excitation_numbers();
    let max_exc = 2 * (LEVELS - 1);
    let mut blocks: Vec<Vec<DressedState<T>>> = Vec::with_capacity(max_exc + 1);
    for n in 0..=max_exc {
        let idx: Vec<usize> = (0..DIM).filter(|&i| exc[i] == n).collect();
        let sub = HermitianOperator::new(h0.matrix().principal_submatrix(&idx))?;
        let e = eigh(&sub)?;
        let block = (0..idx.len())
            .map(|k| {
                let mut v = vec![Complex::zero(); DIM];
                for (r, &i) in idx.iter().enumerate() {
                    v[i] = e.eigenvectors[(r, k)];
                }
                fix_phase(&mut v);
                DressedState {
                    energy_mhz: e.eigenvalues[k] / T::two_pi(),
                    excitation: n,
                    state: StateVector::from_raw(v),
                }
            })
            .collect();
        blocks.push(block);
    }

    let scale = params.omega0_mhz() * T::lit(2.0);
    let resolution = T::lit(1e-9) * scale;
    let single = &blocks[1];
    if (single[1].energy_mhz - single[0].energy_mhz).abs() <= resolution {
        return Err(Error::DegenerateSpectrum(
            "single-excitation doublet is degenerate; |1⟩ and |2⟩ cannot be assigned".into(),
        ));
    }
    let double = &blocks[2];
    let top = double.len() - 1;
    if (double[top].energy_mhz - double[top - 1].energy_mhz).abs() <= resolution {
        return Err(Error::DegenerateSpectrum(
            "highest two-excitation level is degenerate; |3⟩ cannot be assigned".into(),
        ));
    }

    let mut labelled: Vec<(DressedState<T>, Option<usize>)> = Vec::with_capacity(DIM);
    for (n, block) in blocks.into_iter().enumerate() {
        let last = block.len() - 1;
        for (k, s) in block.into_iter().enumerate() {
            let label = match (n, k) {
                (0, 0) => Some(0),
                (1, 0) => Some(1),
                (1, 1) => Some(2),
                (2, k) if k == last => Some(3),
                _ => None,
            };
            labelled.push((s, label));
        }
    }
    labelled.sort_by(|a, b| a.0.energy_mhz.partial_cmp(&b.0.energy_mhz).expect("finite energies"));

    let mut diamond_indices = [0usize; 4];
    let mut spectator_states = Vec::new();
    for (i, (s, label)) in labelled.iter().enumerate() {
        match label {
            Some(l) => diamond_indices[*l] = i,
            None => spectator_states.push(s.state.clone()),
        }
    }
    let states: Vec<DressedState<T>> = labelled.into_iter().map(|(s, _)| s).collect();
    let diamond_states = diamond_indices.map(|i| states[i].state.clone());
    let diamond_energies_mhz = diamond_indices.map(|i| states[i].energy_mhz);
    let transition_frequencies_mhz = TRANSITIONS.map(|(lo, hi)| diamond_energies_mhz[hi] - diamond_energies_mhz[lo]);
    Ok(DressedBasis {
        params: *params,
        states,
        diamond_indices,
        diamond_states,
        diamond_energies_mhz,
        spectator_states,
        transition_frequencies_mhz,
    })
}

impl<T: Real> DressedBasis<T> {
    /// Dressed energies (MHz) of the two-excitation block, ascending.
    pub fn two_excitation_energies_mhz(&self) -> Vec<T> {
        self.states
            .iter()
            .filter(|s| s.excitation == 2)
            .map(|s| s.energy_mhz)
            .collect()
    }

    /// `f(0→2) − f(0→1)`.
    pub fn single_excitation_splitting_mhz(&self) -> T {
        self.diamond_energies_mhz[2] - self.diamond_energies_mhz[1]
    }

    pub fn min_transition_separation_mhz(&self) -> T {
        let f = self.transition_frequencies_mhz;
        let mut best = T::infinity();
        for i in 0..4 {
            for j in i + 1..4 {
                best = best.min((f[i] - f[j]).abs());
            }
        }
        best
    }

    /// `⟨D_hi| op |D_lo⟩` for each diamond transition.
    pub fn transition_matrix_elements(&self, op: &ComplexMatrix<T>) -> [Complex<T>; 4] {
        TRANSITIONS.map(|(lo, hi)| {
            let v = StateVector::from_raw(op.matvec(self.diamond_states[lo].amplitudes()));
            self.diamond_states[hi].inner(&v)
        })
    }
}

/// Which transmon the drive couples to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveTarget {
    #[default]
    First,
    Both,
}

impl DriveTarget {
    /// Raising operator the field multiplies: `a†` or `a† + b†`.
    pub fn raising_operator<T: Real>(self) -> ComplexMatrix<T> {
        let (a, b) = lowering_operators::<T>();
        match self {
            DriveTarget::First => a.adjoint(),
            DriveTarget::Both => &a.adjoint() + &b.adjoint(),
        }
    }
}

/// Affine time dependence `V(t) = V + c·s(t)` of one tone, where `s` is a chirp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToneSweep<T> {
    pub schedule: ChirpSchedule<T>,
    pub coefficient: Complex<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveTone<T> {
    /// Static complex amplitude (MHz).
    pub amplitude_mhz: Complex<T>,
    pub frequency_mhz: T,
    pub sweep: Option<ToneSweep<T>>,
}

impl<T: Real> DriveTone<T> {
    pub fn amplitude_at(&self, t: T) -> Complex<T> {
        match &self.sweep {
            Some(s) => self.amplitude_mhz + s.coefficient * s.schedule.value_at(t),
            None => self.amplitude_mhz,
        }
    }

    /// Largest `|V(t)|` over all times.
    pub fn peak_amplitude_mhz(&self) -> T {
        match &self.sweep {
            Some(s) => (self.amplitude_mhz + s.coefficient * s.schedule.start_mhz)
                .norm()
                .max((self.amplitude_mhz + s.coefficient * s.schedule.end_mhz).norm()),
            None => self.amplitude_mhz.norm(),
        }
    }
}

/// Four-tone drive, tones ordered as [`TRANSITIONS`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveProgram<T> {
    pub tones: [DriveTone<T>; 4],
    pub target: DriveTarget,
}

impl<T: Real> DriveProgram<T> {
    /// All amplitudes zero, tones at the dressed transition frequencies.
    pub fn silent(basis: &DressedBasis<T>) -> Self {
        Self {
            tones: basis.transition_frequencies_mhz.map(|f| DriveTone {
                amplitude_mhz: Complex::zero(),
                frequency_mhz: f,
                sweep: None,
            }),
            target: DriveTarget::First,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for tone in &self.tones {
            let ok = tone.amplitude_mhz.re.is_finite()
                && tone.amplitude_mhz.im.is_finite()
                && tone.frequency_mhz.is_finite()
                && tone.frequency_mhz > T::zero();
            if !ok {
                return Err(invalid("drive tones need finite amplitudes and positive frequencies"));
            }
        }
        Ok(())
    }

    /// `Ω(t) = Σₖ Vₖ(t)·e^{−i·2π·fₖ·t}` in MHz.
    pub fn field_at(&self, t: T) -> Complex<T> {
        self.tones
            .iter()
            .map(|tone| tone.amplitude_at(t) * cis(-angular(tone.frequency_mhz) * t))
            .fold(Complex::zero(), |acc, z| acc + z)
    }

    pub fn peak_field_mhz(&self) -> T {
        self.tones
            .iter()
            .map(DriveTone::peak_amplitude_mhz)
            .fold(T::zero(), |a, b| a + b)
    }
}

/// `2π·(Ω(t)·a† + Ω*(t)·a)` on the driven transmon(s).
pub fn build_drive_hamiltonian<T: Real>(program: &DriveProgram<T>, t: T) -> Result<HermitianOperator<T>> {
    program.validate()?;
    let omega = program.field_at(t) * T::two_pi();
    let up = program.target.raising_operator::<T>();
    let term = up.scale(omega);
    Ok(HermitianOperator::new_unchecked(&term + &term.adjoint()))
}

/// `R·H·R† − ω_f·N` with `R = exp(i·ω_f·t·N)`, exact.
pub fn to_rotating_frame<T: Real>(h: &HermitianOperator<T>, t: T, frame_mhz: T) -> Result<HermitianOperator<T>> {
    if !frame_mhz.is_finite() || !t.is_finite() {
        return Err(invalid("frame frequency and time must be finite"));
    }
    if h.dim() != DIM {
        return Err(invalid(format!(
            "rotating frame needs dimension {DIM}, got {}",
            h.dim()
        )));
    }
    let w = angular(frame_mhz);
    let n = excitation_numbers().map(|k| T::from_usize(k).unwrap());
    let mut m = h.matrix().clone();
    for j in 0..DIM {
        for k in 0..DIM {
            if j == k {
                m[(j, j)] = m[(j, j)] - Complex::new(w * n[j], T::zero());
            } else if n[j] != n[k] {
                m[(j, k)] = m[(j, k)] * cis(w * t * (n[j] - n[k]));
            }
        }
    }
    Ok(HermitianOperator::new_unchecked(m))
}

/// Integration frame for the nine-level simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frame<T> {
    Lab,
    /// Both transmons rotating at the given frequency (MHz).
    Rotating(T),
}

impl<T: Real> Frame<T> {
    pub fn default_for(params: &CircuitParams<T>) -> Self {
        Frame::Rotating(params.omega0_mhz())
    }
}

/// Amplitude convention for mapping Dirac couplings onto tones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DriveMode<T> {
    /// `Vₖ = Dₖ / Mₖ` so the dressed couplings equal the Dirac ones.
    Calibrated,
    /// `Vₖ = s·Dₖ`, one common factor for all tones.
    Naive(T),
}

/// Default common factor for the naive mode: undoes `|⟨1|a†|0⟩| = |⟨2|a†|0⟩| = 1/√2`.
pub fn default_naive_scale<T: Real>() -> T {
    T::lit(2.0).sqrt()
}

fn tone_factors<T: Real>(basis: &DressedBasis<T>, mode: DriveMode<T>, target: DriveTarget) -> Result<[Complex<T>; 4]> {
    match mode {
        DriveMode::Naive(s) => {
            if !s.is_finite() || s <= T::zero() {
                return Err(invalid("naive drive scale must be positive"));
            }
            Ok([Complex::new(s, T::zero()); 4])
        }
        DriveMode::Calibrated => {
            let m = basis.transition_matrix_elements(&target.raising_operator());
            let mut out = [Complex::zero(); 4];
            for (k, mk) in m.iter().enumerate() {
                if mk.norm() < T::lit(1e-9) {
                    return Err(Error::DegenerateDrive(format!(
                        "transition {:?} has no drive matrix element",
                        TRANSITIONS[k]
                    )));
                }
                out[k] = Complex::new(T::one(), T::zero()) / *mk;
            }
            Ok(out)
        }
    }
}

/// Dirac couplings in MHz per transition (tone order).
fn dirac_couplings_mhz<T: Real>(params: &DiracParams<T>) -> [Complex<T>; 4] {
    dirac::transition_couplings(params).map(|z| z / T::two_pi())
}

/// Tones reproducing the static Dirac Hamiltonian on the dressed diamond.
pub fn dirac_drive_mapping<T: Real>(
    params: &DiracParams<T>,
    basis: &DressedBasis<T>,
    mode: DriveMode<T>,
    target: DriveTarget,
) -> Result<DriveProgram<T>> {
    params.validate()?;
    let factors = tone_factors(basis, mode, target)?;
    let d = dirac_couplings_mhz(params);
    let mut program = DriveProgram::silent(basis);
    program.target = target;
    for k in 0..4 {
        program.tones[k].amplitude_mhz = d[k] * factors[k];
    }
    Ok(program)
}

/// Like [`dirac_drive_mapping`] with one Dirac component swept by `schedule`.
pub fn dirac_chirp_mapping<T: Real>(
    params: &DiracParams<T>,
    schedule: &ChirpSchedule<T>,
    basis: &DressedBasis<T>,
    mode: DriveMode<T>,
    target: DriveTarget,
) -> Result<DriveProgram<T>> {
    // couplings are linear in (m, p): split into the fixed part and a unit sweep
    let zero = DiracParams {
        mass_mhz: T::zero(),
        momentum_mhz: [T::zero(); 3],
    };
    let unit_schedule = ChirpSchedule {
        start_mhz: T::one(),
        end_mhz: T::one(),
        ..*schedule
    };
    let unit = unit_schedule.apply(&zero, T::zero());
    let fixed = ChirpSchedule {
        start_mhz: T::zero(),
        end_mhz: T::zero(),
        ..*schedule
    }
    .apply(params, T::zero());
    let factors = tone_factors(basis, mode, target)?;
    let d_fixed = dirac_couplings_mhz(&fixed);
    let d_unit = dirac_couplings_mhz(&unit);
    let mut program = DriveProgram::silent(basis);
    program.target = target;
    for k in 0..4 {
        program.tones[k].amplitude_mhz = d_fixed[k] * factors[k];
        let coefficient = d_unit[k] * factors[k];
        if !coefficient.is_zero() {
            program.tones[k].sweep = Some(ToneSweep {
                schedule: *schedule,
                coefficient,
            });
        }
    }
    Ok(program)
}

/// Full nine-level Hamiltonian `H₀ + H_drive(t)`, optionally in the rotating frame.
pub struct CircuitHamiltonian<T> {
    pub h0: HermitianOperator<T>,
    pub program: DriveProgram<T>,
    pub frame: Frame<T>,
}

impl<T: Real> CircuitHamiltonian<T> {
    pub fn new(params: &CircuitParams<T>, program: DriveProgram<T>, frame: Frame<T>) -> Result<Self> {
        program.validate()?;
        Ok(Self {
            h0: build_bare_hamiltonian(params)?,
            program,
            frame,
        })
    }

    /// Static part of the Hamiltonian in the chosen frame.
    pub fn static_part(&self) -> HermitianOperator<T> {
        match self.frame {
            Frame::Lab => self.h0.clone(),
            Frame::Rotating(f) => self.h0.sub(&number_operator().scale(angular(f))),
        }
    }

    /// Frame state to lab state at time `t`.
    pub fn to_lab(&self, psi: &StateVector<T>, t: T) -> StateVector<T> {
        match self.frame {
            Frame::Lab => psi.clone(),
            Frame::Rotating(f) => {
                let n = excitation_numbers();
                let w = angular(f);
                StateVector::from_raw(
                    psi.amplitudes()
                        .iter()
                        .zip(n)
                        .map(|(z, k)| *z * cis(-w * t * T::from_usize(k).unwrap()))
                        .collect(),
                )
            }
        }
    }

    /// Lab state to frame state at time `t`.
    pub fn from_lab(&self, psi: &StateVector<T>, t: T) -> StateVector<T> {
        match self.frame {
            Frame::Lab => psi.clone(),
            Frame::Rotating(f) => {
                let n = excitation_numbers();
                let w = angular(f);
                StateVector::from_raw(
                    psi.amplitudes()
                        .iter()
                        .zip(n)
                        .map(|(z, k)| *z * cis(w * t * T::from_usize(k).unwrap()))
                        .collect(),
                )
            }
        }
    }

    /// Largest frequency left after removing the static part exactly: the
    /// detuning of every tone from every dressed transition it can drive, plus
    /// the total Rabi scale.
    pub fn residual_frequency_mhz(&self, basis: &DressedBasis<T>) -> T {
        let up = self.program.target.raising_operator::<T>();
        let mut detuning = T::zero();
        for lo in &basis.states {
            let raised = StateVector::from_raw(up.matvec(lo.state.amplitudes()));
            for hi in &basis.states {
                if hi.state.inner(&raised).norm() > T::lit(1e-9) {
                    let gap = hi.energy_mhz - lo.energy_mhz;
                    for tone in &self.program.tones {
                        detuning = detuning.max((tone.frequency_mhz - gap).abs());
                    }
                }
            }
        }
        detuning + T::lit(3.0) * self.program.peak_field_mhz()
    }
}

impl<T: Real> TimeDependentHamiltonian<T> for CircuitHamiltonian<T> {
    fn dim(&self) -> usize {
        DIM
    }

    fn at(&self, t: T) -> Result<HermitianOperator<T>> {
        let h = self.h0.add(&build_drive_hamiltonian(&self.program, t)?);
        match self.frame {
            Frame::Lab => Ok(h),
            Frame::Rotating(f) => to_rotating_frame(&h, t, f),
        }
    }

    fn max_frequency_mhz(&self, _t0: T, _t1: T) -> T {
        let top = match self.frame {
            Frame::Lab => T::zero(),
            Frame::Rotating(f) => f,
        };
        let scale = self.h0.matrix().max_abs() / T::two_pi();
        scale * T::lit(4.0) - top * T::lit(4.0) + self.program.peak_field_mhz() * T::lit(3.0)
    }
}

/// Default stepper for the circuit: fourth-order Magnus, 1e−7 population tolerance.
pub fn circuit_stepper_options<T: Real>() -> StepperOptions<T> {
    StepperOptions {
        method: StepMethod::CommutatorFree4,
        ..StepperOptions::default()
    }
}

/// Integrates the driven circuit from `psi0` (lab frame, at `grid.t_start`).
/// The static part of the frame Hamiltonian is handled exactly through the
/// interaction picture; returned states are lab-frame.
pub fn simulate_circuit<T: Real>(
    basis: &DressedBasis<T>,
    program: &DriveProgram<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    frame: Frame<T>,
    opts: &StepperOptions<T>,
) -> Result<Trajectory<T>> {
    if psi0.dim() != DIM {
        return Err(invalid(format!("circuit state must have dimension {DIM}")));
    }
    let ham = CircuitHamiltonian::new(&basis.params, *program, frame)?;
    let reference = ham.static_part();
    let f_max = ham.residual_frequency_mhz(basis);
    let start = ham.from_lab(psi0, grid.t_start);
    let traj = evolve_interaction_picture(&ham, &reference, f_max, &start, grid, opts)?;
    let states = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| ham.to_lab(s, t))
        .collect();
    let mut out = Trajectory::from_states(traj.times, states);
    out.internal_step = traj.internal_step;
    Ok(out)
}

/// Diamond populations and leakage along a nine-level trajectory.
#[derive(Clone, Debug)]
pub struct DiamondProjection<T> {
    pub times: Vec<T>,
    pub populations: Vec<[T; 4]>,
    pub leakage: Vec<T>,
}

impl<T: Real> DiamondProjection<T> {
    pub fn max_leakage(&self) -> T {
        self.leakage.iter().fold(T::zero(), |a, &b| a.max(b))
    }
}

pub fn project_to_diamond<T: Real>(traj: &Trajectory<T>, basis: &DressedBasis<T>) -> Result<DiamondProjection<T>> {
    if traj.states.iter().any(|s| s.dim() != DIM) {
        return Err(invalid(format!("diamond projection needs dimension-{DIM} states")));
    }
    let populations: Vec<[T; 4]> = traj
        .states
        .iter()
        .map(|psi| std::array::from_fn(|k| basis.diamond_states[k].fidelity(psi)))
        .collect();
    let leakage = traj
        .states
        .iter()
        .zip(&populations)
        .map(|(psi, p)| psi.norm() * psi.norm() - p.iter().copied().sum::<T>())
        .collect();
    Ok(DiamondProjection {
        times: traj.times.clone(),
        populations,
        leakage,
    })
}

/// Circuit run driven by a static Dirac program, with the ideal four-level
/// reference evolved from the matching diamond level.
#[derive(Clone, Debug)]
pub struct CircuitComparison<T> {
    pub trajectory: Trajectory<T>,
    pub diamond: DiamondProjection<T>,
    pub ideal: Vec<[T; 4]>,
    pub rms_error: T,
    pub max_error: T,
    pub max_leakage: T,
}

#[allow(clippy::too_many_arguments)]
pub fn compare_with_ideal<T: Real>(
    basis: &DressedBasis<T>,
    dirac_params: &DiracParams<T>,
    mode: DriveMode<T>,
    target: DriveTarget,
    initial_level: usize,
    grid: &TimeGrid<T>,
    frame: Frame<T>,
    opts: &StepperOptions<T>,
) -> Result<CircuitComparison<T>> {
    if initial_level > 3 {
        return Err(invalid("initial diamond level must be 0..=3"));
    }
    let program = dirac_drive_mapping(dirac_params, basis, mode, target)?;
    let trajectory = simulate_circuit(basis, &program, &basis.diamond_states[initial_level], grid, frame, opts)?;
    let diamond = project_to_diamond(&trajectory, basis)?;

    let mut amps = [Complex::zero(); 4];
    amps[initial_level] = Complex::new(T::one(), T::zero());
    let ideal_traj = evolve_static(
        &dirac::build_dirac_hamiltonian(dirac_params)?,
        &dirac::level_state(amps)?,
        grid,
    )?;
    let ideal = ideal_traj.level_populations();

    let mut sq = T::zero();
    let mut max_error = T::zero();
    for (c, i) in diamond.populations.iter().zip(&ideal) {
        for k in 0..4 {
            let d = (c[k] - i[k]).abs();
            sq = sq + d * d;
            max_error = max_error.max(d);
        }
    }
    let count = T::from_usize(4 * ideal.len()).unwrap();
    let max_leakage = diamond.max_leakage();
    Ok(CircuitComparison {
        trajectory,
        diamond,
        ideal,
        rms_error: (sq / count).sqrt(),
        max_error,
        max_leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::ChirpTarget;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn defaults() -> DressedBasis<f64> {
        dressed_basis(&CircuitParams::default()).unwrap()
    }

    /// Closed-form two-excitation eigenvalues at κ = −3g, independent of the
    /// Jacobi solver: the 3×3 block in (|02⟩, |11⟩, |20⟩) has characteristic
    /// roots 2ω₀ − 4g, 2ω₀ − 3g, 2ω₀ + g.
    fn kappa_minus_3g_spectrum(w0: f64, g: f64) -> [f64; 6] {
        [
            0.0,
            w0 - g,
            w0 + g,
            2.0 * w0 - 4.0 * g,
            2.0 * w0 - 3.0 * g,
            2.0 * w0 + g,
        ]
    }

    #[test]
    fn bare_hamiltonian_structure() {
        let h = build_bare_hamiltonian(&CircuitParams::new(5.0, 0.0, 0.0).unwrap()).unwrap();
        let w = 2.0 * PI * 5000.0;
        let expected: Vec<f64> = excitation_numbers().iter().map(|&n| w * n as f64).collect();
        assert!(h.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&expected)) < 1e-9);
        let (a, _) = lowering_operators::<f64>();
        assert_eq!(a[(bare_index(0, 0), bare_index(1, 0))].re, 1.0);
        assert!((a[(bare_index(1, 0), bare_index(2, 0))].re - 2f64.sqrt()).abs() < 1e-15);
        let h = build_bare_hamiltonian(&CircuitParams::<f64>::default()).unwrap();
        let n = number_operator::<f64>();
        assert!(h.matrix().commutator(n.matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_params_and_warns() {
        assert!(CircuitParams::new(0.0, -300.0, 100.0).is_err());
        assert!(CircuitParams::new(5.0, 300.0, 100.0).is_err());
        assert!(CircuitParams::new(5.0, -300.0, -1.0).is_err());
        assert!(CircuitParams::new(5.0, -300.0, f64::NAN).is_err());
        assert!(CircuitParams::<f64>::default().warnings().is_empty());
        assert_eq!(CircuitParams::new(5.0, -50.0, 100.0).unwrap().warnings().len(), 1);
    }

    #[test]
    fn default_dressed_spectrum() {
        let b = defaults();
        let energies: Vec<f64> = b.states.iter().map(|s| s.energy_mhz).collect();
        let expected = [0.0, 4900.0, 5100.0, 9600.0, 9700.0, 10100.0, 14500.0, 14900.0, 19400.0];
        for (e, x) in energies.iter().zip(expected) {
            assert!((e - x).abs() < 1e-6, "{energies:?}");
        }
        assert!((b.single_excitation_splitting_mhz() - 200.0).abs() < 1e-6);
        assert!((b.diamond_energies_mhz[3] - 10_100.0).abs() < 1e-6);
        let f = b.transition_frequencies_mhz;
        for (got, want) in f.iter().zip([4900.0, 5100.0, 5200.0, 5000.0]) {
            assert!((got - want).abs() < 1e-6);
        }
        assert!((b.min_transition_separation_mhz() - 100.0).abs() < 1e-6);
        assert!((f[2] - f[1] - 100.0).abs() < 1e-6);
        assert_eq!(b.spectator_states.len(), 5);
    }

    #[test]
    fn closed_form_spectrum_at_kappa_minus_3g() {
        for (w0, g) in [(5.0, 100.0), (4.2, 37.0), (6.5, 250.0)] {
            let b = dressed_basis(&CircuitParams::new(w0, -3.0 * g, g).unwrap()).unwrap();
            let got: Vec<f64> = b
                .states
                .iter()
                .filter(|s| s.excitation <= 2)
                .map(|s| s.energy_mhz)
                .collect();
            let want = kappa_minus_3g_spectrum(w0 * 1000.0, g);
            for (x, y) in got.iter().zip(want) {
                assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0), "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn dressed_states_are_orthonormal_and_phase_fixed() {
        let b = defaults();
        for (i, s) in b.states.iter().enumerate() {
            for (j, r) in b.states.iter().enumerate() {
                let ip = s.state.inner(&r.state);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex::new(want, 0.0)).norm() < 1e-10);
            }
        }
        let m = b.transition_matrix_elements(&DriveTarget::First.raising_operator());
        let want = [-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1.0 / 10f64.sqrt(), 3.0 / 10f64.sqrt()];
        for (got, w) in m.iter().zip(want) {
            assert!((got - Complex::new(w, 0.0)).norm() < 1e-9, "{m:?}");
        }
    }

    #[test]
    fn weak_coupling_loses_addressability() {
        let b = dressed_basis(&CircuitParams::new(5.0f64, -300.0, 1e-3).unwrap()).unwrap();
        let f = b.transition_frequencies_mhz;
        assert!((f[0] - f[3]).abs() < 1e-5);
        assert!((f[1] - f[2]).abs() < 1e-5);
        assert!(matches!(
            dressed_basis(&CircuitParams::new(5.0f64, -300.0, 0.0).unwrap()),
            Err(Error::DegenerateSpectrum(_))
        ));
        assert!(matches!(
            dressed_basis(&CircuitParams::new(5.0f64, 0.0, 0.0).unwrap()),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn drive_hamiltonian_examples() {
        let b = defaults();
        let silent = DriveProgram::silent(&b);
        assert_eq!(build_drive_hamiltonian(&silent, 0.3).unwrap().matrix().max_abs(), 0.0);
        let mut one = silent;
        one.tones[0].amplitude_mhz = Complex::new(2.0, 0.0);
        let h = build_drive_hamiltonian(&one, 0.0).unwrap();
        let (a, _) = lowering_operators::<f64>();
        let pattern = (&a + &a.adjoint()).scale_real(2.0 * PI * 2.0);
        assert!(h.matrix().max_abs_diff(&pattern) < 1e-12);
        let mut bad = silent;
        bad.tones[1].frequency_mhz = -1.0;
        assert!(build_drive_hamiltonian(&bad, 0.0).is_err());
    }

    #[test]
    fn rotating_frame_examples() {
        let b = defaults();
        let mut program = DriveProgram::silent(&b);
        program.tones[0].amplitude_mhz = Complex::new(3.0, 1.0);
        let ham = CircuitHamiltonian::new(&b.params, program, Frame::Lab).unwrap();
        let h = ham.at(0.123).unwrap();
        assert!(
            to_rotating_frame(&h, 0.123, 0.0)
                .unwrap()
                .matrix()
                .max_abs_diff(h.matrix())
                == 0.0
        );
        let h0 = build_bare_hamiltonian(&b.params).unwrap();
        let rot = to_rotating_frame(&h0, 0.7, 5000.0).unwrap();
        // only κ and g remain: the largest entry is 2κ on |22⟩
        assert!((rot.matrix().max_abs() / (2.0 * PI) - 600.0).abs() < 1e-6);
        assert!(to_rotating_frame(&h0, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn mapping_phases() {
        let b = defaults();
        let mass_only = DiracParams::new(20.0, [0.0; 3]).unwrap();
        for mode in [DriveMode::Calibrated, DriveMode::Naive(default_naive_scale())] {
            let p = dirac_drive_mapping(&mass_only, &b, mode, DriveTarget::First).unwrap();
            let v = p.tones.map(|t| t.amplitude_mhz);
            assert!(v[0].norm() < 1e-12 && v[3].norm() < 1e-12);
            assert!(v[1].re.abs() < 1e-12 && v[2].re.abs() < 1e-12);
            assert!(v[1].im * v[2].im < 0.0);
        }
        let naive = dirac_drive_mapping(
            &mass_only,
            &b,
            DriveMode::Naive(default_naive_scale()),
            DriveTarget::First,
        )
        .unwrap();
        assert!((naive.tones[1].amplitude_mhz - Complex::new(0.0, 20.0 * 2f64.sqrt())).norm() < 1e-9);

        let px_only = DiracParams::new(0.0, [20.0, 0.0, 0.0]).unwrap();
        let p = dirac_drive_mapping(&px_only, &b, DriveMode::Calibrated, DriveTarget::First).unwrap();
        assert!(p.tones.iter().all(|t| t.amplitude_mhz.im.abs() < 1e-12));

        let phi = 0.7f64;
        let rotated = DiracParams::new(0.0, [20.0 * phi.cos(), 20.0 * phi.sin(), 0.0]).unwrap();
        let q = dirac_drive_mapping(&rotated, &b, DriveMode::Calibrated, DriveTarget::First).unwrap();
        for k in [0, 3] {
            assert!((q.tones[k].amplitude_mhz - p.tones[k].amplitude_mhz * cis(phi)).norm() < 1e-9);
        }
    }

    #[test]
    fn chirp_mapping_tracks_static_mapping() {
        let b = defaults();
        let base = DiracParams::new(3.0, [-50.0, 2.0, 1.0]).unwrap();
        let sweep = ChirpSchedule::new(ChirpTarget::Px, -50.0, 50.0, 100.0).unwrap();
        let chirped = dirac_chirp_mapping(&base, &sweep, &b, DriveMode::Calibrated, DriveTarget::First).unwrap();
        for t in [0.0, 0.3, 0.77, 1.0] {
            let snapshot =
                dirac_drive_mapping(&sweep.apply(&base, t), &b, DriveMode::Calibrated, DriveTarget::First).unwrap();
            for k in 0..4 {
                assert!((chirped.tones[k].amplitude_at(t) - snapshot.tones[k].amplitude_mhz).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let b = defaults();
        let sup = StateVector::normalized(
            b.diamond_states[0]
                .amplitudes()
                .iter()
                .zip(b.spectator_states[1].amplitudes())
                .zip(b.diamond_states[2].amplitudes())
                .map(|((x, y), z)| *x * 0.6 + *y * 0.48 + *z * Complex::new(0.0, 0.64))
                .collect(),
        )
        .unwrap();
        let traj = Trajectory::from_states(
            vec![0.0, 1.0, 2.0],
            vec![b.diamond_states[0].clone(), b.spectator_states[2].clone(), sup],
        );
        let proj = project_to_diamond(&traj, &b).unwrap();
        assert!((proj.populations[0][0] - 1.0).abs() < 1e-12 && proj.leakage[0].abs() < 1e-12);
        assert!(proj.populations[1].iter().all(|p| p.abs() < 1e-12));
        assert!((proj.leakage[1] - 1.0).abs() < 1e-12);
        let n = 0.6f64 * 0.6 + 0.48 * 0.48 + 0.64 * 0.64;
        assert!((proj.populations[2][0] - 0.36 / n).abs() < 1e-10);
        assert!((proj.populations[2][2] - 0.64 * 0.64 / n).abs() < 1e-10);
        assert!((proj.leakage[2] - 0.48 * 0.48 / n).abs() < 1e-10);
    }

    #[test]
    fn zero_drive_parks_in_ground_state() {
        let b = defaults();
        let grid = TimeGrid::new(0.0, 0.05, 6).unwrap();
        let traj = simulate_circuit(
            &b,
            &DriveProgram::silent(&b),
            &b.diamond_states[0],
            &grid,
            Frame::default_for(&b.params),
            &circuit_stepper_options(),
        )
        .unwrap();
        let proj = project_to_diamond(&traj, &b).unwrap();
        assert!(proj.populations.iter().all(|p| (p[0] - 1.0).abs() < 1e-12));
        assert!(proj.max_leakage().abs() < 1e-12);
    }

    #[test]
    fn lab_and_rotating_frames_agree() {
        let b = defaults();
        let params = DiracParams::new(3.0, [2.0, 1.0, 0.5]).unwrap();
        let program = dirac_drive_mapping(&params, &b, DriveMode::Calibrated, DriveTarget::First).unwrap();
        let grid = TimeGrid::new(0.0, 0.1, 11).unwrap();
        let opts = circuit_stepper_options();
        let lab = simulate_circuit(&b, &program, &b.diamond_states[0], &grid, Frame::Lab, &opts).unwrap();
        let rot = simulate_circuit(
            &b,
            &program,
            &b.diamond_states[0],
            &grid,
            Frame::default_for(&b.params),
            &opts,
        )
        .unwrap();
        for (x, y) in lab.populations.iter().zip(&rot.populations) {
            for (p, q) in x.iter().zip(y) {
                assert!((p - q).abs() < 1e-8);
            }
        }
        assert!(lab.max_norm_error() < 1e-9);
    }

    #[test]
    fn weak_calibrated_drive_tracks_ideal_model() {
        let b = defaults();
        let params = DiracParams::new(2.0, [2.0, 0.0, 0.0]).unwrap();
        let grid = TimeGrid::new(0.0, 0.5, 51).unwrap();
        let c = compare_with_ideal(
            &b,
            &params,
            DriveMode::Calibrated,
            DriveTarget::First,
            0,
            &grid,
            Frame::default_for(&b.params),
            &circuit_stepper_options(),
        )
        .unwrap();
        assert!(c.rms_error < 0.05, "rms {}", c.rms_error);
        assert!(c.max_leakage < 0.05);
        assert!(c.diamond.leakage.iter().all(|&l| l >= -1e-10));
    }

    #[test]
    fn peak_leakage_grows_along_amplitude_ladder() {
        let b = defaults();
        let grid = TimeGrid::new(0.0, 0.2, 41).unwrap();
        let mut last = -1.0;
        for s in [1.25, 2.5, 5.0, 10.0, 20.0] {
            let params = DiracParams::new(s, [s, 0.0, 0.0]).unwrap();
            let c = compare_with_ideal(
                &b,
                &params,
                DriveMode::Calibrated,
                DriveTarget::First,
                0,
                &grid,
                Frame::default_for(&b.params),
                &circuit_stepper_options(),
            )
            .unwrap();
            assert!(c.max_leakage >= last - 1e-4, "{s}: {} < {last}", c.max_leakage);
            last = c.max_leakage;
        }
    }
}
