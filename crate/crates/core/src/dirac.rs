//! The free Dirac Hamiltonian on the four-level diamond and its observables.
//!
//! Amplitudes are stored in the order `(c₀, c₃, c₂, c₁)`: storage index `i`
//! holds level [`INDEX_TO_LEVEL`]`[i]`. In this order the Hamiltonian takes the
//! supersymmetric block form
//!
//! ```text
//!        ⎡ 0    A ⎤
//!   H =  ⎣ A†   0 ⎦ ,     A = p·σ − i·m·I₂
//! ```
//!
//! so `H² = (m² + |p|²)·I₄` and every eigenvalue `±E` is twofold degenerate.
//! Parameters are entered as ordinary frequencies in MHz; matrix entries are
//! angular (rad/µs) and times are in µs.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::linalg::{expectation, kron, pauli, ComplexMatrix, HermitianOperator, StateVector, UnitaryOperator};
use crate::scalar::{angular, Real};

/// Storage index of each level.
pub const LEVEL_TO_INDEX: [usize; 4] = [0, 3, 2, 1];
/// Level held at each storage index.
pub const INDEX_TO_LEVEL: [usize; 4] = [0, 3, 2, 1];

/// Mass and momentum of the simulated plane wave, as ordinary frequencies (MHz).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracParams<T> {
    pub mass_mhz: T,
    pub momentum_mhz: [T; 3],
}

impl<T: Real> DiracParams<T> {
    pub fn new(mass_mhz: T, momentum_mhz: [T; 3]) -> Result<Self> {
        let p = Self { mass_mhz, momentum_mhz };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mass_mhz.is_finite() || self.momentum_mhz.iter().any(|c| !c.is_finite()) {
            return Err(invalid("Dirac parameters must be finite"));
        }
        if self.mass_mhz < T::zero() {
            return Err(invalid("mass must be non-negative"));
        }
        Ok(())
    }

    pub fn momentum_norm_mhz(&self) -> T {
        let [x, y, z] = self.momentum_mhz;
        (x * x + y * y + z * z).sqrt()
    }

    /// `√(m² + |p|²)` in MHz.
    pub fn energy_mhz(&self) -> T {
        let m = self.mass_mhz;
        let pn = self.momentum_norm_mhz();
        (m * m + pn * pn).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.mass_mhz.is_zero() && self.momentum_mhz.iter().all(|c| c.is_zero())
    }
}

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Upper-triangular couplings `⟨upper|H|lower⟩` (angular) for the four diamond
/// transitions `0→1, 0→2, 1→3, 2→3`, read off the Hamiltonian layout.
pub fn transition_couplings<T: Real>(params: &DiracParams<T>) -> [Complex<T>; 4] {
    let m = angular(params.mass_mhz);
    let [px, py, pz] = params.momentum_mhz.map(angular);
    [c(px, py), c(pz, m), c(-pz, -m), c(px, py)]
}

fn hamiltonian_matrix<T: Real>(params: &DiracParams<T>) -> ComplexMatrix<T> {
    let m = angular(params.mass_mhz);
    let [px, py, pz] = params.momentum_mhz.map(angular);
    let z = Complex::zero();
    ComplexMatrix::from_rows(&[
        vec![z, z, c(pz, -m), c(px, -py)],
        vec![z, z, c(px, py), c(-pz, -m)],
        vec![c(pz, m), c(px, -py), z, z],
        vec![c(px, py), c(-pz, m), z, z],
    ])
}

/// The 4×4 Dirac Hamiltonian in storage order, angular units.
pub fn build_dirac_hamiltonian<T: Real>(params: &DiracParams<T>) -> Result<HermitianOperator<T>> {
    params.validate()?;
    Ok(HermitianOperator::new_unchecked(hamiltonian_matrix(params)))
}

/// `2π·√(m² + |p|²)` in rad/µs.
pub fn relativistic_energy<T: Real>(params: &DiracParams<T>) -> T {
    angular(params.energy_mhz())
}

/// Closed-form `exp(−i·H·dt)`, using `H² = E²·I`.
pub fn dirac_propagator<T: Real>(params: &DiracParams<T>, dt: T) -> UnitaryOperator<T> {
    let e = relativistic_energy(params);
    let (s, co) = (e * dt).sin_cos();
    // sin(E·dt)/E → dt as E → 0
    let sinc = if e.is_zero() { dt } else { s / e };
    let h = hamiltonian_matrix(params);
    let mut u = h.scale(c(T::zero(), -sinc));
    for i in 0..4 {
        u[(i, i)] = u[(i, i)] + c(co, T::zero());
    }
    UnitaryOperator::new_unchecked(u)
}

/// Level-labelled state `Σ aₖ|k⟩` packed into storage order and normalized.
pub fn level_state<T: Real>(amps: [Complex<T>; 4]) -> Result<StateVector<T>> {
    let mut v = vec![Complex::zero(); 4];
    for (level, a) in amps.into_iter().enumerate() {
        v[LEVEL_TO_INDEX[level]] = a;
    }
    StateVector::normalized(v)
}

/// Level populations `(P₀, P₁, P₂, P₃)` of a four-level state.
pub fn level_populations<T: Real>(psi: &StateVector<T>) -> [T; 4] {
    assert_eq!(psi.dim(), 4, "level populations need a four-level state");
    let a = psi.amplitudes();
    LEVEL_TO_INDEX.map(|i| a[i].norm_sqr())
}

/// Named initial and reference states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedState {
    Level(usize),
    /// `(|0⟩ + |1⟩)/√2`
    Plus01,
    /// `(|0⟩ − |1⟩)/√2`
    Minus01,
    /// `(|2⟩ + |3⟩)/√2`
    Plus23,
    /// `(|2⟩ − |3⟩)/√2`
    Minus23,
}

impl NamedState {
    pub fn state<T: Real>(self) -> Result<StateVector<T>> {
        let one = c(T::one(), T::zero());
        let z = Complex::zero();
        let amps = match self {
            NamedState::Level(k) if k < 4 => {
                let mut a = [z; 4];
                a[k] = one;
                a
            }
            NamedState::Level(k) => return Err(invalid(format!("level {k} out of range"))),
            NamedState::Plus01 => [one, one, z, z],
            NamedState::Minus01 => [one, -one, z, z],
            NamedState::Plus23 => [z, z, one, one],
            NamedState::Minus23 => [z, z, one, -one],
        };
        level_state(amps)
    }

    pub fn label(self) -> String {
        match self {
            NamedState::Level(k) => format!("{k}"),
            NamedState::Plus01 => "+01".into(),
            NamedState::Minus01 => "-01".into(),
            NamedState::Plus23 => "+23".into(),
            NamedState::Minus23 => "-23".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "+01" => NamedState::Plus01,
            "-01" => NamedState::Minus01,
            "+23" => NamedState::Plus23,
            "-23" => NamedState::Minus23,
            other => match other.parse::<usize>() {
                Ok(k) if k < 4 => NamedState::Level(k),
                _ => return Err(invalid(format!("unknown state label '{s}'"))),
            },
        })
    }
}

/// Bright states of the V system (coupled to `|0⟩`) and of the Λ system (coupled to `|3⟩`).
#[derive(Clone, Debug)]
pub struct BrightStatePair<T> {
    pub bright_v: StateVector<T>,
    pub bright_lambda: StateVector<T>,
}

/// Normalizes a state supported on levels {1,2}, fixing the global phase so the
/// level-1 amplitude (or the level-2 one when level 1 is empty) is real positive.
fn manifold_state<T: Real>(level1: Complex<T>, level2: Complex<T>) -> Result<StateVector<T>> {
    let z = Complex::zero();
    let psi = level_state([z, level1, level2, z])?;
    let a = psi.amplitudes();
    let (a1, a2) = (a[LEVEL_TO_INDEX[1]], a[LEVEL_TO_INDEX[2]]);
    let tiny = T::epsilon() * T::lit(16.0);
    let anchor = if a1.norm() > tiny { a1 } else { a2 };
    let phase = anchor.conj() / anchor.norm();
    Ok(StateVector::from_raw(a.iter().map(|&x| x * phase).collect()))
}

pub fn bright_states<T: Real>(params: &DiracParams<T>) -> Result<BrightStatePair<T>> {
    params.validate()?;
    if params.is_zero() {
        return Err(Error::DegenerateDrive("bright state undefined for a zero drive".into()));
    }
    let h = hamiltonian_matrix(params);
    let col = |level: usize| -> (Complex<T>, Complex<T>) {
        let j = LEVEL_TO_INDEX[level];
        (h[(LEVEL_TO_INDEX[1], j)], h[(LEVEL_TO_INDEX[2], j)])
    };
    let (v1, v2) = col(0);
    let (l1, l2) = col(3);
    Ok(BrightStatePair {
        bright_v: manifold_state(v1, v2)?,
        bright_lambda: manifold_state(l1, l2)?,
    })
}

/// `Σᵢ = ½·I₂⊗σᵢ` in storage order.
pub fn spin_operators<T: Real>() -> [HermitianOperator<T>; 3] {
    let half = T::lit(0.5);
    [pauli::x(), pauli::y(), pauli::z()]
        .map(|s| HermitianOperator::new_unchecked(kron(&pauli::identity(), &s).scale_real(half)))
}

/// Expectation of `Σ⃗` in a four-level state.
pub fn spin_expectation<T: Real>(psi: &StateVector<T>) -> Result<SpinVector<T>> {
    let [sx, sy, sz] = spin_operators();
    Ok(SpinVector {
        sx: expectation(psi, &sx)?,
        sy: expectation(psi, &sy)?,
        sz: expectation(psi, &sz)?,
    })
}

/// `ĥ = p̂·Σ⃗`.
pub fn helicity_operator<T: Real>(params: &DiracParams<T>) -> Result<HermitianOperator<T>> {
    params.validate()?;
    let pn = params.momentum_norm_mhz();
    if pn.is_zero() {
        return Err(Error::DegenerateDrive("helicity undefined at zero momentum".into()));
    }
    let spins = spin_operators();
    let terms: Vec<(T, &HermitianOperator<T>)> = params
        .momentum_mhz
        .iter()
        .zip(&spins)
        .map(|(p, s)| (*p / pn, s))
        .collect();
    Ok(HermitianOperator::linear_combination(&terms))
}

/// Spin expectation with the ½ normalization of `Σ⃗` (a pure spin-½ state has length ½).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SpinVector<T> {
    pub sx: T,
    pub sy: T,
    pub sz: T,
}

impl<T: Real> SpinVector<T> {
    pub fn as_array(&self) -> [T; 3] {
        [self.sx, self.sy, self.sz]
    }

    pub fn magnitude(&self) -> T {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    /// Unit direction; zero vector maps to zero.
    pub fn direction(&self) -> [T; 3] {
        let m = self.magnitude();
        if m.is_zero() {
            return [T::zero(); 3];
        }
        self.as_array().map(|c| c / m)
    }

    pub fn dot(&self, n: &[T; 3]) -> T {
        self.sx * n[0] + self.sy * n[1] + self.sz * n[2]
    }
}

/// Sampling of the momentum sphere: polar angles `θᵢ = iπ/(n_polar−1)` including
/// both poles (one point each), azimuths `φⱼ = 2πj/n_azimuthal`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereGrid {
    pub n_polar: usize,
    pub n_azimuthal: usize,
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self {
            n_polar: 9,
            n_azimuthal: 16,
        }
    }
}

impl SphereGrid {
    pub fn directions<T: Real>(&self) -> Result<Vec<(T, T)>> {
        if self.n_polar < 8 || self.n_azimuthal < 16 {
            return Err(invalid("sphere grid needs at least 8 polar x 16 azimuthal points"));
        }
        let pi = T::PI();
        let mut out = Vec::new();
        for i in 0..self.n_polar {
            let theta = pi * T::from_usize(i).unwrap() / T::from_usize(self.n_polar - 1).unwrap();
            let n_phi = if i == 0 || i == self.n_polar - 1 {
                1
            } else {
                self.n_azimuthal
            };
            for j in 0..n_phi {
                let phi = T::two_pi() * T::from_usize(j).unwrap() / T::from_usize(self.n_azimuthal).unwrap();
                out.push((theta, phi));
            }
        }
        Ok(out)
    }
}

/// One sample of the bright-state spin texture.
#[derive(Clone, Debug, PartialEq)]
pub struct TexturePoint<T> {
    pub theta: T,
    pub phi: T,
    /// Unit momentum direction.
    pub direction: [T; 3],
    /// Spin of the bright state restricted to (and renormalized on) levels {1,2}.
    pub spin: SpinVector<T>,
    /// Projection of `spin` on the momentum direction.
    pub radial: T,
    /// `⟨0|ĥ|0⟩` of the initial ground state, from the helicity operator.
    pub helicity: T,
    /// Stereographic image of the direction, `None` at the north pole.
    pub stereographic: Option<(T, T)>,
}

/// Projection from the north pole: south pole → origin, north pole → infinity.
pub fn stereographic<T: Real>(n: [T; 3]) -> Option<(T, T)> {
    let denom = T::one() - n[2];
    if denom <= T::lit(1e-12) {
        return None;
    }
    Some((n[0] / denom, n[1] / denom))
}

/// Bright-state spin on the sphere `|p| = m = energy_mhz`.
pub fn spin_texture<T: Real>(energy_mhz: T, grid: &SphereGrid) -> Result<Vec<TexturePoint<T>>> {
    if !(energy_mhz > T::zero()) {
        return Err(Error::DegenerateDrive("spin texture needs a positive energy".into()));
    }
    let ground = NamedState::Level(0).state::<T>()?;
    grid.directions::<T>()?
        .into_iter()
        .map(|(theta, phi)| {
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let n = [st * cp, st * sp, ct];
            let params = DiracParams::new(energy_mhz, n.map(|x| x * energy_mhz))?;
            let bright = bright_states(&params)?.bright_v;
            let spin = spin_expectation(&bright)?;
            let helicity = expectation(&ground, &helicity_operator(&params)?)?;
            Ok(TexturePoint {
                theta,
                phi,
                direction: n,
                radial: spin.dot(&n),
                spin,
                helicity,
                stereographic: stereographic(n),
            })
        })
        .collect()
}

/// Unitary whose columns are the Bell states `|0⟩=(|00⟩+|11⟩)/√2`,
/// `|1⟩=(|01⟩+|10⟩)/√2`, `|2⟩=(|01⟩−|10⟩)/√2`, `|3⟩=(|00⟩−|11⟩)/√2`
/// (two-qubit computational basis `|00⟩,|01⟩,|10⟩,|11⟩`) arranged in storage order,
/// so that `U·H·U†` is the Hamiltonian in the two-qubit basis.
pub fn bell_transform<T: Real>() -> UnitaryOperator<T> {
    let h = T::FRAC_1_SQRT_2();
    let bell: [[T; 4]; 4] = [
        [h, T::zero(), T::zero(), h],
        [T::zero(), h, h, T::zero()],
        [T::zero(), h, -h, T::zero()],
        [h, T::zero(), T::zero(), -h],
    ];
    let mut u = ComplexMatrix::zeros(4, 4);
    for (idx, level) in INDEX_TO_LEVEL.iter().enumerate() {
        for row in 0..4 {
            u[(row, idx)] = c(bell[*level][row], T::zero());
        }
    }
    UnitaryOperator::new_unchecked(u)
}

/// `‖U·H·U† − I⊗(pₓσx + mσy)‖_max` in angular units; only defined for `p_y = p_z = 0`.
pub fn factored_residual<T: Real>(params: &DiracParams<T>) -> Result<T> {
    params.validate()?;
    let [_, py, pz] = params.momentum_mhz;
    if !py.is_zero() || !pz.is_zero() {
        return Err(Error::UnsupportedConfiguration(
            "Bell factorization requires momentum along x".into(),
        ));
    }
    let h = build_dirac_hamiltonian(params)?;
    let rotated = h.conjugate_by(&bell_transform());
    let single = &pauli::x::<T>().scale_real(angular(params.momentum_mhz[0]))
        + &pauli::y::<T>().scale_real(angular(params.mass_mhz));
    let target = kron(&pauli::identity(), &single);
    Ok(rotated.matrix().max_abs_diff(&target))
}

/// Whether the Hamiltonian factorizes as `I⊗(pₓσx + mσy)` in the Bell basis to 1e−10.
pub fn factored_check<T: Real>(params: &DiracParams<T>) -> Result<bool> {
    Ok(factored_residual(params)? <= T::lit(1e-10))
}
