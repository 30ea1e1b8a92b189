//! Adiabatic-elimination analytics for the 4-photon 2-atom resonance:
//! the reduced couplings s, delta, Omega_eff, delta', the closed-form
//! two-level solution with its pulse areas, and gate timing.
//!
//! With `base = |Omega|^2 / (4 Delta_L~)` and `s = g^2 / (Delta_L~ delta_C~)`:
//!
//! ```text
//! delta      = base/2 * (1/(1-2s) + 1)
//! Omega_eff  = base   * (1/(1-2s) - 1)
//! delta'     = base   * 1/(1-s)
//! ```
//!
//! all in angular units, with the complex detunings carrying the decay
//! rates. The approximate (leading order in s) variant replaces these by
//! `delta ~ base (1+s)` and `Omega_eff ~ (Omega^2 / 2 Delta_L~) s`.

use crate::error::{Result, SimError};
use crate::model::{ParameterSet, PulseEnvelope};
use crate::{tau, Real, C};

/// How close |1-2s| may approach the reduction pole before the
/// elimination is rejected outright.
pub const POLE_GUARD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionVariant {
    Exact,
    Approximate,
}

/// The derived quantities of the reduced two-level model, angular rad/us.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParameters<T: Real> {
    /// g^2 / (Delta_L~ delta_C~), dimensionless.
    pub s: C<T>,
    /// Common light shift of |1,a,0> and |a,1,0>.
    pub delta: C<T>,
    /// 4-photon 2-atom coupling.
    pub omega_eff: C<T>,
    /// Light shift of |0,1,0>.
    pub delta_prime: C<T>,
    pub variant: ReductionVariant,
}

impl<T: Real> ReducedParameters<T> {
    /// Display helpers: ordinary-frequency MHz values.
    pub fn delta_mhz(&self) -> C<T> {
        self.delta / tau::<T>()
    }
    pub fn omega_eff_mhz(&self) -> C<T> {
        self.omega_eff / tau::<T>()
    }
    pub fn delta_prime_mhz(&self) -> C<T> {
        self.delta_prime / tau::<T>()
    }
}

fn check_symmetric<T: Real>(params: &ParameterSet<T>) -> Result<()> {
    if !params.symmetric_couplings() {
        return Err(SimError::InvalidParameter(
            "reduction requires the symmetric case g_A = g_B".into(),
        ));
    }
    Ok(())
}

fn s_parameter<T: Real>(params: &ParameterSet<T>) -> C<T> {
    let g = C::new(params.g_a_ang(), T::zero());
    g * g / (params.delta_l_tilde_ang() * params.delta_c_tilde_ang())
}

fn base_shift<T: Real>(params: &ParameterSet<T>) -> C<T> {
    let omega = C::new(params.omega_ang(), T::zero());
    let four = C::new(T::from_f64(4.0).unwrap(), T::zero());
    omega * omega / (four * params.delta_l_tilde_ang())
}

/// Exact reduced parameters from the elimination of |a,a,1>, |e,a,0>,
/// |a,e,0> (and the analogous single-atom chain).
pub fn effective_parameters<T: Real>(params: &ParameterSet<T>) -> Result<ReducedParameters<T>> {
    check_symmetric(params)?;
    let one = C::new(T::one(), T::zero());
    let two = C::new(T::from_f64(2.0).unwrap(), T::zero());
    let s = s_parameter(params);
    let pole = (one - two * s).norm();
    if pole <= T::from_f64(POLE_GUARD).unwrap() {
        return Err(SimError::ResonanceProximity {
            magnitude: pole.to_f64().unwrap_or(f64::NAN),
        });
    }
    let base = base_shift(params);
    let inv = one / (one - two * s);
    Ok(ReducedParameters {
        s,
        delta: base * (inv + one) / two,
        omega_eff: base * (inv - one),
        delta_prime: base / (one - s),
        variant: ReductionVariant::Exact,
    })
}

/// Leading-order (large-detuning) limit of the reduced parameters.
pub fn approximate_parameters<T: Real>(params: &ParameterSet<T>) -> Result<ReducedParameters<T>> {
    check_symmetric(params)?;
    let one = C::new(T::one(), T::zero());
    let two = C::new(T::from_f64(2.0).unwrap(), T::zero());
    let s = s_parameter(params);
    let base = base_shift(params);
    Ok(ReducedParameters {
        s,
        delta: base * (one + s),
        omega_eff: two * base * s,
        delta_prime: base * (one + s),
        variant: ReductionVariant::Approximate,
    })
}

/// Diagnostic ratios for the two alternative validity conditions of the
/// elimination. Both should be small; neither is enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityDiagnostics<T: Real> {
    /// |Omega| / |Delta_L~|
    pub drive_ratio: T,
    /// |g| / |delta_C~|
    pub cavity_ratio: T,
    /// |Omega| / |Delta_L~ - g^2/delta_C~|
    pub shifted_drive_ratio: T,
}

pub fn adiabaticity_diagnostics<T: Real>(params: &ParameterSet<T>) -> AdiabaticityDiagnostics<T> {
    let g = C::new(params.g_a_ang(), T::zero());
    let dl = params.delta_l_tilde_ang();
    let dc = params.delta_c_tilde_ang();
    let shifted = dl - g * g / dc;
    AdiabaticityDiagnostics {
        drive_ratio: params.omega_ang() / dl.norm(),
        cavity_ratio: params.g_a_ang() / dc.norm(),
        shifted_drive_ratio: params.omega_ang() / shifted.norm(),
    }
}

/// Result of the closed-form reduced two-level propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelSolution<T: Real> {
    /// (C_1a0, C_a10) at time t.
    pub amplitudes: [C<T>; 2],
    /// Common-shift area Theta(t) = int delta dt'.
    pub theta_common: C<T>,
    /// Effective pulse area theta(t) = int Omega_eff dt' / 2.
    pub theta_pulse: C<T>,
}

/// Closed-form solution of the reduced two-level model at time `t`:
///
/// ```text
/// C_1a0(t) e^{i Theta} = C_1a0(0) cos(theta) - i C_a10(0) sin(theta)
/// C_a10(t) e^{i Theta} = C_a10(0) cos(theta) - i C_1a0(0) sin(theta)
/// ```
///
/// Areas accumulate against the envelope through the integral of f^2
/// (the instantaneous reduced couplings scale with |Omega f(t)|^2).
pub fn two_level_solution<T: Real>(
    red: &ReducedParameters<T>,
    envelope: &PulseEnvelope<T>,
    run_duration: T,
    c0: [C<T>; 2],
    t: T,
) -> TwoLevelSolution<T> {
    let area = envelope.integral_f2(t, run_duration);
    let half = C::new(T::from_f64(0.5).unwrap(), T::zero());
    let theta_common = red.delta * C::new(area, T::zero());
    let theta_pulse = red.omega_eff * C::new(area, T::zero()) * half;
    let phase = (C::new(T::zero(), T::one()) * theta_common).exp();
    let cos = theta_pulse.cos();
    let sin = theta_pulse.sin();
    let minus_i = C::new(T::zero(), -T::one());
    let c1 = (c0[0] * cos + minus_i * c0[1] * sin) / phase;
    let c2 = (c0[1] * cos + minus_i * c0[0] * sin) / phase;
    TwoLevelSolution {
        amplitudes: [c1, c2],
        theta_common,
        theta_pulse,
    }
}

/// Duration of the 2pi pulse on the 4-photon transition: smallest T with
/// theta(T) = pi. Always timed with the dissipationless coupling, so
/// decay shows up as norm loss rather than mistimed area.
pub fn gate_duration<T: Real>(params: &ParameterSet<T>) -> Result<T> {
    let lossless = params.without_dissipation();
    let red = effective_parameters(&lossless)?;
    let omega_eff = red.omega_eff.norm();
    if omega_eff == T::zero() {
        return Err(SimError::NoGate(
            "omega_eff = 0 (need both Omega > 0 and g > 0)".into(),
        ));
    }
    // flat-envelope equivalent time for integral f^2 = 2 pi / |Omega_eff|
    let need = tau::<T>() / omega_eff;
    let t = need + params.envelope().duration_excess();
    let ramp = params.envelope().ramp_time();
    if t < ramp + ramp {
        return Err(SimError::InvalidParameter(format!(
            "ramp_time {ramp} too long for a gate of flat-equivalent length {need}"
        )));
    }
    Ok(t)
}

/// Residual deviation of the conditional phase from exactly pi, in
/// radians: (Re delta - Re delta') * gate_duration evaluated over the
/// f^2 area of the pulse.
pub fn phase_mismatch<T: Real>(params: &ParameterSet<T>) -> Result<T> {
    let lossless = params.without_dissipation();
    let red = effective_parameters(&lossless)?;
    let t = gate_duration(params)?;
    let area = params.envelope().integral_f2(t, t);
    Ok((red.delta.re - red.delta_prime.re) * area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParameterSet;
    use proptest::prelude::*;

    fn params(omega: f64, dl: f64, dc: f64, g: f64, gamma: f64, kappa: f64) -> ParameterSet<f64> {
        ParameterSet::new(omega, dl, dc, g, gamma, kappa, 2, PulseEnvelope::Constant).unwrap()
    }

    const FIG2: (f64, f64, f64, f64) = (20.0, 100.0, 50.0, 10.0);
    const FIG3: (f64, f64, f64, f64) = (10.0, 30.0, 8.75, 3.0);

    // Frozen against an independent high-precision (30-digit) evaluation
    // of the reduced formulas.
    const FIG2_S: f64 = 0.02;
    const FIG2_DELTA_MHZ: f64 = 1.020833333333333333;
    const FIG2_OMEGA_EFF_MHZ: f64 = 0.041666666666666667;
    const FIG2_DELTA_PRIME_MHZ: f64 = 1.020408163265306122;
    const FIG3_S: f64 = 0.034285714285714286;
    const FIG3_DELTA_MHZ: f64 = 0.864008179959100204;
    const FIG3_OMEGA_EFF_MHZ: f64 = 0.061349693251533742;
    const FIG3_DELTA_PRIME_MHZ: f64 = 0.862919132149901381;

    #[test]
    fn fig2_exact_values() {
        let (o, dl, dc, g) = FIG2;
        let red = effective_parameters(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        assert!((red.s.re - FIG2_S).abs() < 1e-15);
        assert_eq!(red.s.im, 0.0);
        assert!((red.delta_mhz().re - FIG2_DELTA_MHZ).abs() < 1e-12);
        assert!((red.omega_eff_mhz().re - FIG2_OMEGA_EFF_MHZ).abs() < 1e-12);
        assert!((red.delta_prime_mhz().re - FIG2_DELTA_PRIME_MHZ).abs() < 1e-12);
    }

    #[test]
    fn fig3_exact_values() {
        let (o, dl, dc, g) = FIG3;
        let red = effective_parameters(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        assert!((red.s.re - FIG3_S).abs() < 1e-15);
        assert!((red.delta_mhz().re - FIG3_DELTA_MHZ).abs() < 1e-12);
        assert!((red.omega_eff_mhz().re - FIG3_OMEGA_EFF_MHZ).abs() < 1e-12);
        assert!((red.delta_prime_mhz().re - FIG3_DELTA_PRIME_MHZ).abs() < 1e-12);
    }

    #[test]
    fn no_cavity_collapses_to_stark_shift() {
        let red = effective_parameters(&params(20.0, 100.0, 50.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(red.s, C::new(0.0, 0.0));
        assert_eq!(red.omega_eff, C::new(0.0, 0.0));
        let stark = 400.0 / (4.0 * 100.0);
        assert!((red.delta_mhz().re - stark).abs() < 1e-12);
        assert!((red.delta_prime_mhz().re - stark).abs() < 1e-12);
    }

    #[test]
    fn approximate_fig2_gap() {
        let (o, dl, dc, g) = FIG2;
        let approx = approximate_parameters(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        assert!((approx.omega_eff_mhz().re - 0.04).abs() < 1e-12);
        let exact = effective_parameters(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        let gap = (exact.omega_eff_mhz().re - approx.omega_eff_mhz().re).abs()
            / exact.omega_eff_mhz().re;
        assert!((gap - 0.04).abs() < 0.01, "gap = {gap}");
    }

    #[test]
    fn pole_guard_triggers() {
        // g = 10, Delta_L = 100, delta_C = 2 puts s = 100/200 = 0.5
        let p = params(20.0, 100.0, 2.0, 10.0, 0.0, 0.0);
        assert!(matches!(
            effective_parameters(&p),
            Err(SimError::ResonanceProximity { .. })
        ));
    }

    #[test]
    fn two_level_solution_cases() {
        let (o, dl, dc, g) = FIG2;
        let p = params(o, dl, dc, g, 0.0, 0.0);
        let red = effective_parameters(&p).unwrap();
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        // t = 0 -> identity
        let sol = two_level_solution(&red, &PulseEnvelope::Constant, 100.0, [one, zero], 0.0);
        assert_eq!(sol.amplitudes[0], one);
        assert_eq!(sol.amplitudes[1], zero);
        // theta = pi -> conditional sign flip
        let t_pi = std::f64::consts::TAU / red.omega_eff.re;
        let sol = two_level_solution(&red, &PulseEnvelope::Constant, t_pi, [zero, one], t_pi);
        assert!((sol.theta_pulse.re - std::f64::consts::PI).abs() < 1e-10);
        let phase = (C::new(0.0, 1.0) * sol.theta_common).exp();
        let rotated = sol.amplitudes[1] * phase;
        assert!((rotated - (-one)).norm() < 1e-9);
        // theta = pi/2 -> full transfer to -i
        let sol =
            two_level_solution(&red, &PulseEnvelope::Constant, t_pi, [one, zero], t_pi / 2.0);
        let rotated = sol.amplitudes[1] * (C::new(0.0, 1.0) * sol.theta_common).exp();
        assert!((rotated - C::new(0.0, -1.0)).norm() < 1e-9);
    }

    #[test]
    fn gate_durations() {
        let (o, dl, dc, g) = FIG2;
        let t = gate_duration(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        assert!((t - 24.0).abs() < 1e-9, "t = {t}");
        let (o, dl, dc, g) = FIG3;
        let t = gate_duration(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        assert!((t - 16.3).abs() < 1e-9, "t = {t}");
        // ramped envelope stretches by 5r/4
        let p = ParameterSet::<f64>::new(
            20.0,
            100.0,
            50.0,
            10.0,
            0.0,
            0.0,
            2,
            PulseEnvelope::SinSquaredRamp { ramp_time: 0.5 },
        )
        .unwrap();
        let t = gate_duration(&p).unwrap();
        assert!((t - 24.625).abs() < 1e-9, "t = {t}");
        // no-gate error
        assert!(matches!(
            gate_duration(&params(20.0, 100.0, 50.0, 0.0, 0.0, 0.0)),
            Err(SimError::NoGate(_))
        ));
    }

    #[test]
    fn gate_duration_ignores_dissipation() {
        let (o, dl, dc, g) = FIG3;
        let t0 = gate_duration(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        let t1 = gate_duration(&params(o, dl, dc, g, 0.03, 0.1)).unwrap();
        assert_eq!(t0, t1);
    }

    #[test]
    fn phase_mismatch_values() {
        let (o, dl, dc, g) = FIG2;
        let m = phase_mismatch(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        assert!((m - 0.0641141357875468).abs() < 1e-10, "m = {m}");
        let (o, dl, dc, g) = FIG3;
        let m = phase_mismatch(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        assert!((m - 0.1115358338552589).abs() < 1e-10, "m = {m}");
        // g = 0: delta = delta' exactly
        let m = phase_mismatch(&params(20.0, 100.0, 50.0, 0.0, 0.0, 0.0));
        assert!(matches!(m, Err(SimError::NoGate(_))));
    }

    #[test]
    fn ratio_scaling_of_approximate_coupling() {
        let (o, dl, dc, g) = FIG2;
        let base = approximate_parameters(&params(o, dl, dc, g, 0.0, 0.0)).unwrap();
        for c in [2.0, 4.0, 7.5] {
            let scaled =
                approximate_parameters(&params(c * o, c * dl, dc, g, 0.0, 0.0)).unwrap();
            assert!((scaled.omega_eff.re - base.omega_eff.re).abs() < 1e-12 * base.omega_eff.re);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        // delta - Omega_eff/2 = |Omega|^2/(4 Delta_L~) identically
        #[test]
        fn light_shift_identity(
            omega in 1.0f64..50.0,
            dl in 10.0f64..200.0,
            dc in 5.0f64..100.0,
            g in 0.0f64..15.0,
            gamma in 0.0f64..0.2,
            kappa in 0.0f64..0.2,
        ) {
            let p = params(omega, dl, dc, g, gamma, kappa);
            if let Ok(red) = effective_parameters(&p) {
                let half = C::new(0.5, 0.0);
                let lhs = red.delta - half * red.omega_eff;
                let om = C::new(p.omega_ang(), 0.0);
                let rhs = om * om / (C::new(4.0, 0.0) * p.delta_l_tilde_ang());
                prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
            }
        }

        // real parameters stay real without dissipation
        #[test]
        fn dissipationless_is_real(
            omega in 1.0f64..50.0,
            dl in 10.0f64..200.0,
            dc in 5.0f64..100.0,
            g in 0.0f64..15.0,
        ) {
            let p = params(omega, dl, dc, g, 0.0, 0.0);
            if let Ok(red) = effective_parameters(&p) {
                prop_assert!(red.s.im.abs() < 1e-15);
                prop_assert!(red.delta.im.abs() < 1e-12);
                prop_assert!(red.omega_eff.im.abs() < 1e-12);
                prop_assert!(red.delta_prime.im.abs() < 1e-12);
            }
        }

        // |exact - approx| / |exact| <= 2|s| for small s
        #[test]
        fn approximation_error_is_first_order_in_s(
            omega in 1.0f64..50.0,
            dl in 50.0f64..200.0,
            dc in 20.0f64..100.0,
            g in 0.1f64..10.0,
        ) {
            let p = params(omega, dl, dc, g, 0.0, 0.0);
            let exact = effective_parameters(&p).unwrap();
            let approx = approximate_parameters(&p).unwrap();
            let s = exact.s.norm();
            if s <= 0.05 {
                let rel = (exact.delta - approx.delta).norm() / exact.delta.norm();
                prop_assert!(rel <= 2.0 * s + 1e-12, "rel = {rel}, s = {s}");
            }
        }

        // unitarity of the closed-form solution for real couplings
        #[test]
        fn two_level_unitary(
            re1 in -1.0f64..1.0, im1 in -1.0f64..1.0,
            re2 in -1.0f64..1.0, im2 in -1.0f64..1.0,
            t in 0.0f64..30.0,
        ) {
            let p = params(20.0, 100.0, 50.0, 10.0, 0.0, 0.0);
            let red = effective_parameters(&p).unwrap();
            let c0 = [C::new(re1, im1), C::new(re2, im2)];
            let n0 = c0[0].norm_sqr() + c0[1].norm_sqr();
            let sol = two_level_solution(&red, &PulseEnvelope::Constant, 30.0, c0, t);
            let n1 = sol.amplitudes[0].norm_sqr() + sol.amplitudes[1].norm_sqr();
            prop_assert!((n1 - n0).abs() < 1e-10 * n0.max(1.0));
        }
    }
}
