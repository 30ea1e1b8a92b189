//! Generator matrices over the truncated basis: the interaction-picture
//! effective Hamiltonian (complex detunings fold the dissipation in), the
//! lab-frame Hamiltonian, and the diagonal frame rotation connecting them.
//!
//! All matrix elements are angular (rad/us). With `M` the returned
//! generator, the equation of motion is `i dC/dt = M C`.

use crate::error::{Result, SimError};
use crate::matrix::ComplexMatrix;
use crate::model::{basis_dim, AtomLevel, BasisState, ParameterSet, StateVector};
use crate::{tau, Real, C};

/// Dense generator over the truncated basis.
///
/// `hermitian` is true iff the parameters are dissipationless, in which
/// case the matrix is exactly self-adjoint.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix<T: Real> {
    pub entries: ComplexMatrix<T>,
    pub hermitian: bool,
}

impl<T: Real> GeneratorMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// Time-independent split of the effective Hamiltonian:
/// `H(t) = static_part + f(t) * drive_part`.
///
/// `static_part` holds the complex-detuning diagonal and the cavity
/// couplings; `drive_part` holds the laser couplings at unit envelope.
#[derive(Debug, Clone)]
pub struct EffectiveParts<T: Real> {
    pub static_part: ComplexMatrix<T>,
    pub drive_part: ComplexMatrix<T>,
    pub hermitian: bool,
}

/// Which atom a single-atom operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Atom {
    A,
    B,
}

fn with_level(state: BasisState, atom: Atom, level: AtomLevel) -> BasisState {
    match atom {
        Atom::A => BasisState::new(level, state.atom_b, state.photons),
        Atom::B => BasisState::new(state.atom_a, level, state.photons),
    }
}

fn level_of(state: BasisState, atom: Atom) -> AtomLevel {
    match atom {
        Atom::A => state.atom_a,
        Atom::B => state.atom_b,
    }
}

/// Build the envelope-independent parts of the generator.
pub fn build_effective_parts<T: Real>(params: &ParameterSet<T>) -> EffectiveParts<T> {
    let n_max = params.n_max();
    let dim = basis_dim(n_max);
    let mut h0 = ComplexMatrix::zeros(dim);
    let mut hd = ComplexMatrix::zeros(dim);
    let half_omega = C::new(params.omega_ang() / T::from_f64(2.0).unwrap(), T::zero());
    let dl = params.delta_l_tilde_ang();
    let dc = params.delta_c_tilde_ang();
    for k in 0..dim {
        let s = BasisState::from_index(k);
        // diagonal: -Delta_L~ per excited atom, -delta_C~ per photon
        let mut diag = C::new(T::zero(), T::zero());
        if s.atom_a == AtomLevel::E {
            diag = diag - dl;
        }
        if s.atom_b == AtomLevel::E {
            diag = diag - dl;
        }
        diag = diag - dc * C::new(T::from_usize(s.photons).unwrap(), T::zero());
        h0.set(k, k, diag);

        for atom in [Atom::A, Atom::B] {
            let g_ang = match atom {
                Atom::A => params.g_a_ang(),
                Atom::B => params.g_b_ang(),
            };
            match level_of(s, atom) {
                // laser drive |1> -> |e| at fixed photon number
                AtomLevel::One => {
                    let j = with_level(s, atom, AtomLevel::E).index();
                    hd.add_to(j, k, half_omega);
                }
                AtomLevel::E => {
                    let j = with_level(s, atom, AtomLevel::One).index();
                    hd.add_to(j, k, half_omega);
                    // cavity emission |e, n> -> |a, n+1>
                    if s.photons < n_max {
                        let up = BasisState::new(s.atom_a, s.atom_b, s.photons + 1);
                        let j = with_level(up, atom, AtomLevel::A).index();
                        let amp = g_ang * T::from_usize(s.photons + 1).unwrap().sqrt();
                        h0.add_to(j, k, C::new(amp, T::zero()));
                    }
                }
                // cavity absorption |a, n> -> |e, n-1>
                AtomLevel::A => {
                    if s.photons >= 1 {
                        let down = BasisState::new(s.atom_a, s.atom_b, s.photons - 1);
                        let j = with_level(down, atom, AtomLevel::E).index();
                        let amp = g_ang * T::from_usize(s.photons).unwrap().sqrt();
                        h0.add_to(j, k, C::new(amp, T::zero()));
                    }
                }
                AtomLevel::Zero => {}
            }
        }
    }
    EffectiveParts {
        static_part: h0,
        drive_part: hd,
        hermitian: params.is_dissipationless(),
    }
}

/// Effective Hamiltonian at time `t` for a run of length `run_duration`
/// (the envelope of a ramped pulse needs the run length to place its
/// trailing ramp).
pub fn build_effective_hamiltonian<T: Real>(
    params: &ParameterSet<T>,
    t: T,
    run_duration: T,
) -> GeneratorMatrix<T> {
    let parts = build_effective_parts(params);
    let f = params.envelope().value(t, run_duration);
    let mut entries = parts.static_part;
    entries.add_scaled(&parts.drive_part, C::new(f, T::zero()));
    GeneratorMatrix {
        entries,
        hermitian: parts.hermitian,
    }
}

/// Absolute level and field frequencies (MHz) for lab-frame verification
/// runs. Toy magnitudes, not optical-scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabFrameFrequencies<T: Real> {
    pub omega_1: T,
    pub omega_e: T,
    pub omega_a: T,
    pub omega_l: T,
    pub omega_c: T,
}

impl<T: Real> LabFrameFrequencies<T> {
    /// Choose omega_1, omega_e, omega_c freely; omega_l and omega_a then
    /// follow from the detuning definitions
    /// `Delta_L = omega_L - (omega_e - omega_1)` and
    /// `delta_C = (omega_L - omega_C) - (omega_a - omega_1)`.
    pub fn derived(params: &ParameterSet<T>, omega_1: T, omega_e: T, omega_c: T) -> Self {
        let omega_l = params.delta_l() + omega_e - omega_1;
        let omega_a = omega_l - omega_c - params.delta_c() + omega_1;
        LabFrameFrequencies {
            omega_1,
            omega_e,
            omega_a,
            omega_l,
            omega_c,
        }
    }

    fn level_ang(&self, level: AtomLevel) -> T {
        let f = match level {
            AtomLevel::Zero => T::zero(),
            AtomLevel::One => self.omega_1,
            AtomLevel::E => self.omega_e,
            AtomLevel::A => self.omega_a,
        };
        tau::<T>() * f
    }

    /// Rotating-frame phase rate (angular) of one basis state: the
    /// diagonal generator of the interaction-picture transformation.
    fn frame_rate_ang(&self, state: BasisState) -> T {
        let tp = tau::<T>();
        let per_level = |level: AtomLevel| -> T {
            match level {
                AtomLevel::Zero => T::zero(),
                AtomLevel::One => tp * self.omega_1,
                AtomLevel::E => tp * (self.omega_1 + self.omega_l),
                AtomLevel::A => tp * self.omega_a,
            }
        };
        let photon = tp * (self.omega_l - (self.omega_a - self.omega_1));
        per_level(state.atom_a)
            + per_level(state.atom_b)
            + photon * T::from_usize(state.photons).unwrap()
    }
}

/// Lab-frame Hamiltonian at time `t`. Dissipationless only; the complex
/// detunings have no lab-frame counterpart here.
pub fn build_lab_hamiltonian<T: Real>(
    params: &ParameterSet<T>,
    freqs: &LabFrameFrequencies<T>,
    t: T,
    run_duration: T,
) -> Result<GeneratorMatrix<T>> {
    if !params.is_dissipationless() {
        return Err(SimError::UnsupportedConfiguration(
            "lab-frame build requires gamma = kappa = 0".into(),
        ));
    }
    let n_max = params.n_max();
    let dim = basis_dim(n_max);
    let mut h = ComplexMatrix::zeros(dim);
    let f = params.envelope().value(t, run_duration);
    let half_omega = params.omega_ang() * f / T::from_f64(2.0).unwrap();
    // e^{-i w_L t} phase on the drive term
    let drive_phase = C::new(T::zero(), -(tau::<T>() * freqs.omega_l * t)).exp();
    let drive = drive_phase * C::new(half_omega, T::zero());
    for k in 0..dim {
        let s = BasisState::from_index(k);
        let diag = freqs.level_ang(s.atom_a)
            + freqs.level_ang(s.atom_b)
            + tau::<T>() * freqs.omega_c * T::from_usize(s.photons).unwrap();
        h.set(k, k, C::new(diag, T::zero()));
        for atom in [Atom::A, Atom::B] {
            let g_ang = match atom {
                Atom::A => params.g_a_ang(),
                Atom::B => params.g_b_ang(),
            };
            match level_of(s, atom) {
                AtomLevel::One => {
                    // (Omega/2) e^{-i w_L t} |e><1|
                    let j = with_level(s, atom, AtomLevel::E).index();
                    h.add_to(j, k, drive);
                }
                AtomLevel::E => {
                    let j = with_level(s, atom, AtomLevel::One).index();
                    h.add_to(j, k, drive.conj());
                    if s.photons < n_max {
                        let up = BasisState::new(s.atom_a, s.atom_b, s.photons + 1);
                        let j = with_level(up, atom, AtomLevel::A).index();
                        let amp = g_ang * T::from_usize(s.photons + 1).unwrap().sqrt();
                        h.add_to(j, k, C::new(amp, T::zero()));
                    }
                }
                AtomLevel::A => {
                    if s.photons >= 1 {
                        let down = BasisState::new(s.atom_a, s.atom_b, s.photons - 1);
                        let j = with_level(down, atom, AtomLevel::E).index();
                        let amp = g_ang * T::from_usize(s.photons).unwrap().sqrt();
                        h.add_to(j, k, C::new(amp, T::zero()));
                    }
                }
                AtomLevel::Zero => {}
            }
        }
    }
    Ok(GeneratorMatrix {
        entries: h,
        hermitian: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    /// psi_I = U(t)^dagger psi_lab
    ToInteraction,
    /// psi_lab = U(t) psi_I
    ToLab,
}

/// Apply the diagonal frame unitary (or its inverse) at time `t`.
pub fn frame_rotate<T: Real>(
    state: &StateVector<T>,
    freqs: &LabFrameFrequencies<T>,
    t: T,
    direction: FrameDirection,
) -> Result<StateVector<T>> {
    let dim = state.dim();
    if dim % 16 != 0 || dim == 0 {
        return Err(SimError::DimensionMismatch {
            expected: 16,
            got: dim,
        });
    }
    let sign = match direction {
        FrameDirection::ToInteraction => T::one(),
        FrameDirection::ToLab => -T::one(),
    };
    let mut out = state.clone();
    for (k, amp) in out.amplitudes.iter_mut().enumerate() {
        let rate = freqs.frame_rate_ang(BasisState::from_index(k));
        let phase = C::new(T::zero(), sign * rate * t).exp();
        *amp = *amp * phase;
    }
    Ok(out)
}
