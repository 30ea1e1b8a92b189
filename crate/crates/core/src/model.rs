//! Physical parameters, the truncated product basis, and the state-vector
//! container shared by every other module.
//!
//! Basis ordering is fixed: `index = photons*16 + level(A)*4 + level(B)`
//! with level order (|0>, |1>, |e>, |a>) = (0, 1, 2, 3).

use crate::error::{Result, SimError};
use crate::{tau, Real, C};

/// One of the four atomic levels.
///
/// `|0>` couples to nothing; `|1>` is laser-driven to `|e>`; `|e>` is
/// cavity-coupled to `|a>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    Zero,
    One,
    E,
    A,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 4] = [AtomLevel::Zero, AtomLevel::One, AtomLevel::E, AtomLevel::A];

    /// Position of the level in the enumeration order.
    pub fn index(self) -> usize {
        match self {
            AtomLevel::Zero => 0,
            AtomLevel::One => 1,
            AtomLevel::E => 2,
            AtomLevel::A => 3,
        }
    }

    pub fn from_index(k: usize) -> Option<AtomLevel> {
        AtomLevel::ALL.get(k).copied()
    }

    pub fn label(self) -> char {
        match self {
            AtomLevel::Zero => '0',
            AtomLevel::One => '1',
            AtomLevel::E => 'e',
            AtomLevel::A => 'a',
        }
    }

    pub fn from_label(c: char) -> Option<AtomLevel> {
        match c {
            '0' => Some(AtomLevel::Zero),
            '1' => Some(AtomLevel::One),
            'e' => Some(AtomLevel::E),
            'a' => Some(AtomLevel::A),
            _ => None,
        }
    }
}

/// Product state |i>_A |j>_B |n>_C of the two atoms and the cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub atom_a: AtomLevel,
    pub atom_b: AtomLevel,
    pub photons: usize,
}

impl BasisState {
    pub fn new(atom_a: AtomLevel, atom_b: AtomLevel, photons: usize) -> BasisState {
        BasisState { atom_a, atom_b, photons }
    }

    /// Ordinal of this state in the deterministic enumeration.
    pub fn index(&self) -> usize {
        self.photons * 16 + self.atom_a.index() * 4 + self.atom_b.index()
    }

    /// Inverse of [`BasisState::index`].
    pub fn from_index(k: usize) -> BasisState {
        let photons = k / 16;
        let atom_a = AtomLevel::from_index((k % 16) / 4).unwrap();
        let atom_b = AtomLevel::from_index(k % 4).unwrap();
        BasisState { atom_a, atom_b, photons }
    }

    /// Parse a label like "a10" (atom A, atom B, photon count).
    pub fn parse(label: &str) -> Result<BasisState> {
        let chars: Vec<char> = label.chars().collect();
        if chars.len() != 3 {
            return Err(SimError::UnknownState(label.to_string()));
        }
        let atom_a = AtomLevel::from_label(chars[0])
            .ok_or_else(|| SimError::UnknownState(label.to_string()))?;
        let atom_b = AtomLevel::from_label(chars[1])
            .ok_or_else(|| SimError::UnknownState(label.to_string()))?;
        let photons = chars[2]
            .to_digit(10)
            .ok_or_else(|| SimError::UnknownState(label.to_string()))?
            as usize;
        Ok(BasisState { atom_a, atom_b, photons })
    }

    pub fn label(&self) -> String {
        format!("{}{}{}", self.atom_a.label(), self.atom_b.label(), self.photons)
    }
}

/// Number of basis states for a photon truncation `n_max`.
pub fn basis_dim(n_max: usize) -> usize {
    16 * (n_max + 1)
}

/// All basis states up to `n_max` photons, in enumeration order.
pub fn enumerate_basis(n_max: usize) -> Result<Vec<BasisState>> {
    if n_max < 1 {
        return Err(SimError::InvalidParameter(format!(
            "n_max must be >= 1, got {n_max}"
        )));
    }
    Ok((0..basis_dim(n_max)).map(BasisState::from_index).collect())
}

/// Conserved charge Q = photons - (number of atoms in |a>).
///
/// Every coupling in the effective Hamiltonian preserves Q, so the
/// generator is block diagonal in it.
pub fn excitation_charge(state: BasisState) -> i64 {
    let in_a = (state.atom_a == AtomLevel::A) as i64 + (state.atom_b == AtomLevel::A) as i64;
    state.photons as i64 - in_a
}

/// Time dependence of the drive amplitude, as a dimensionless factor in
/// [0, 1] multiplying the Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseEnvelope<T: Real> {
    /// f(t) = 1 for all t.
    Constant,
    /// sin^2 ramp up over `ramp_time`, flat top, symmetric ramp down
    /// against the end of the run.
    SinSquaredRamp { ramp_time: T },
}

impl<T: Real> PulseEnvelope<T> {
    /// Envelope value f(t) for a run of total length `duration`.
    pub fn value(&self, t: T, duration: T) -> T {
        match *self {
            PulseEnvelope::Constant => T::one(),
            PulseEnvelope::SinSquaredRamp { ramp_time: r } => {
                if r <= T::zero() {
                    return T::one();
                }
                let half_pi = T::FRAC_PI_2();
                if t <= T::zero() || t >= duration {
                    T::zero()
                } else if t < r {
                    (half_pi * t / r).sin().powi(2)
                } else if t > duration - r {
                    (half_pi * (duration - t) / r).sin().powi(2)
                } else {
                    T::one()
                }
            }
        }
    }

    /// Progressive integral of f(t)^2 from 0 to `t` (closed form).
    ///
    /// The quasi-static effective coupling scales as f^2, so pulse areas
    /// accumulate against this integral.
    pub fn integral_f2(&self, t: T, duration: T) -> T {
        match *self {
            PulseEnvelope::Constant => t,
            PulseEnvelope::SinSquaredRamp { ramp_time: r } => {
                if r <= T::zero() {
                    return t;
                }
                let ramp_area = |u: T| -> T {
                    // int_0^u sin^4(pi x / 2r) dx
                    let three = T::from_f64(3.0).unwrap();
                    let eight = T::from_f64(8.0).unwrap();
                    let pi = T::PI();
                    three * u / eight - (r / (pi + pi)) * (pi * u / r).sin()
                        + (r / (eight * (pi + pi))) * ((pi + pi) * u / r).sin()
                };
                let full_ramp = three_eighths(r);
                if t <= T::zero() {
                    T::zero()
                } else if t < r {
                    ramp_area(t)
                } else if t <= duration - r {
                    full_ramp + (t - r)
                } else if t < duration {
                    full_ramp + (duration - r - r) + (full_ramp - ramp_area(duration - t))
                } else {
                    full_ramp + (duration - r - r) + full_ramp
                }
            }
        }
    }

    /// Extra run time needed, relative to a constant pulse, for the same
    /// integrated f^2 area. Zero for `Constant`; 5r/4 for the sin^2 ramp
    /// (each ramp contributes 3r/8 of area over r of time).
    pub fn duration_excess(&self) -> T {
        match *self {
            PulseEnvelope::Constant => T::zero(),
            PulseEnvelope::SinSquaredRamp { ramp_time: r } => {
                T::from_f64(1.25).unwrap() * r
            }
        }
    }

    pub fn ramp_time(&self) -> T {
        match *self {
            PulseEnvelope::Constant => T::zero(),
            PulseEnvelope::SinSquaredRamp { ramp_time: r } => r,
        }
    }
}

fn three_eighths<T: Real>(r: T) -> T {
    T::from_f64(0.375).unwrap() * r
}

/// Physical rates and detunings, plus truncation and pulse settings.
///
/// All frequency fields are ordinary frequencies in MHz. Angular
/// quantities (rad/us) are derived once at construction and read through
/// the `*_ang` accessors; the complex detunings are always formed as
/// `Delta_L + i Gamma/2` and `delta_C + i kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSet<T: Real> {
    omega: T,
    delta_l: T,
    delta_c: T,
    g_a: T,
    g_b: T,
    gamma: T,
    kappa: T,
    n_max: usize,
    envelope: PulseEnvelope<T>,
    // angular values, fixed at construction
    omega_ang: T,
    delta_l_tilde_ang: C<T>,
    delta_c_tilde_ang: C<T>,
    g_a_ang: T,
    g_b_ang: T,
}

impl<T: Real> ParameterSet<T> {
    /// Symmetric case g_A = g_B = g, which the gate protocol assumes.
    pub fn new(
        omega: T,
        delta_l: T,
        delta_c: T,
        g: T,
        gamma: T,
        kappa: T,
        n_max: usize,
        envelope: PulseEnvelope<T>,
    ) -> Result<ParameterSet<T>> {
        Self::with_couplings(omega, delta_l, delta_c, g, g, gamma, kappa, n_max, envelope)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_couplings(
        omega: T,
        delta_l: T,
        delta_c: T,
        g_a: T,
        g_b: T,
        gamma: T,
        kappa: T,
        n_max: usize,
        envelope: PulseEnvelope<T>,
    ) -> Result<ParameterSet<T>> {
        if omega < T::zero() {
            return Err(SimError::InvalidParameter("omega must be >= 0".into()));
        }
        if g_a < T::zero() || g_b < T::zero() {
            return Err(SimError::InvalidParameter("g must be >= 0".into()));
        }
        if gamma < T::zero() {
            return Err(SimError::InvalidParameter("gamma must be >= 0".into()));
        }
        if kappa < T::zero() {
            return Err(SimError::InvalidParameter("kappa must be >= 0".into()));
        }
        if n_max < 1 {
            return Err(SimError::InvalidParameter("n_max must be >= 1".into()));
        }
        if envelope.ramp_time() < T::zero() {
            return Err(SimError::InvalidParameter("ramp_time must be >= 0".into()));
        }
        let tp = tau::<T>();
        let half = T::from_f64(0.5).unwrap();
        Ok(ParameterSet {
            omega,
            delta_l,
            delta_c,
            g_a,
            g_b,
            gamma,
            kappa,
            n_max,
            envelope,
            omega_ang: tp * omega,
            delta_l_tilde_ang: C::new(tp * delta_l, tp * gamma * half),
            delta_c_tilde_ang: C::new(tp * delta_c, tp * kappa),
            g_a_ang: tp * g_a,
            g_b_ang: tp * g_b,
        })
    }

    // MHz accessors (ordinary frequency)
    pub fn omega(&self) -> T {
        self.omega
    }
    pub fn delta_l(&self) -> T {
        self.delta_l
    }
    pub fn delta_c(&self) -> T {
        self.delta_c
    }
    pub fn g_a(&self) -> T {
        self.g_a
    }
    pub fn g_b(&self) -> T {
        self.g_b
    }
    pub fn gamma(&self) -> T {
        self.gamma
    }
    pub fn kappa(&self) -> T {
        self.kappa
    }
    pub fn n_max(&self) -> usize {
        self.n_max
    }
    pub fn envelope(&self) -> PulseEnvelope<T> {
        self.envelope
    }
    pub fn dim(&self) -> usize {
        basis_dim(self.n_max)
    }
    pub fn is_dissipationless(&self) -> bool {
        self.gamma == T::zero() && self.kappa == T::zero()
    }
    pub fn symmetric_couplings(&self) -> bool {
        self.g_a == self.g_b
    }

    // angular accessors (rad/us)
    pub fn omega_ang(&self) -> T {
        self.omega_ang
    }
    pub fn delta_l_tilde_ang(&self) -> C<T> {
        self.delta_l_tilde_ang
    }
    pub fn delta_c_tilde_ang(&self) -> C<T> {
        self.delta_c_tilde_ang
    }
    pub fn g_a_ang(&self) -> T {
        self.g_a_ang
    }
    pub fn g_b_ang(&self) -> T {
        self.g_b_ang
    }

    /// Copy with dissipation switched off; used for gate timing.
    pub fn without_dissipation(&self) -> ParameterSet<T> {
        ParameterSet::with_couplings(
            self.omega,
            self.delta_l,
            self.delta_c,
            self.g_a,
            self.g_b,
            T::zero(),
            T::zero(),
            self.n_max,
            self.envelope,
        )
        .expect("dropping dissipation keeps parameters valid")
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<ParameterSet<T>> {
        ParameterSet::with_couplings(
            self.omega,
            self.delta_l,
            self.delta_c,
            self.g_a,
            self.g_b,
            self.gamma,
            self.kappa,
            n_max,
            self.envelope,
        )
    }
}

/// Complex amplitude vector over the enumerated basis.
///
/// The norm may drop below one under the non-Hermitian (dissipative)
/// generator; the deficit is the accumulated failure probability.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    pub amplitudes: Vec<C<T>>,
    pub time_tag: T,
}

impl<T: Real> StateVector<T> {
    pub fn zero(dim: usize) -> StateVector<T> {
        StateVector {
            amplitudes: vec![C::new(T::zero(), T::zero()); dim],
            time_tag: T::zero(),
        }
    }

    /// Unit amplitude on one basis state.
    pub fn basis(dim: usize, state: BasisState) -> Result<StateVector<T>> {
        let mut sv = StateVector::zero(dim);
        let k = state.index();
        if k >= dim {
            return Err(SimError::UnknownState(state.label()));
        }
        sv.amplitudes[k] = C::new(T::one(), T::zero());
        Ok(sv)
    }

    /// Normalized superposition of the given states with the given weights.
    pub fn superposition(dim: usize, parts: &[(BasisState, C<T>)]) -> Result<StateVector<T>> {
        let mut sv = StateVector::zero(dim);
        for (state, amp) in parts {
            let k = state.index();
            if k >= dim {
                return Err(SimError::UnknownState(state.label()));
            }
            sv.amplitudes[k] = sv.amplitudes[k] + *amp;
        }
        let n = sv.norm();
        if n == T::zero() {
            return Err(SimError::InvalidParameter("zero superposition".into()));
        }
        for a in &mut sv.amplitudes {
            *a = *a / n;
        }
        Ok(sv)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sq(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn amplitude(&self, state: BasisState) -> Result<C<T>> {
        self.amplitudes
            .get(state.index())
            .copied()
            .ok_or_else(|| SimError::UnknownState(state.label()))
    }
}
