//! Time integration of `i dC/dt = M(t) C` and trajectory observables.
//!
//! The stepper is an adaptive Dormand-Prince 8(5,3) scheme (the DOP853
//! coefficients of Hairer, Norsett & Wanner). Samples land on a fixed
//! grid by clamping steps to sample boundaries; the generator is
//! evaluated at the true integrator stage times, so ramped envelopes are
//! treated exactly, not piecewise-constant.

use crate::error::{Result, SimError};
use crate::hamiltonian::{build_effective_parts, EffectiveParts, GeneratorMatrix};
use crate::matrix::ComplexMatrix;
use crate::model::{BasisState, ParameterSet, PulseEnvelope, StateVector};
use crate::{Real, C};

/// Anything that can act as the (possibly time-dependent) generator.
pub trait GeneratorSource<T: Real> {
    fn dim(&self) -> usize;
    /// out = M(t) y (without the -i of the equation of motion).
    fn apply(&self, t: T, y: &[C<T>], out: &mut [C<T>]);
    fn hermitian(&self) -> bool;
}

impl<T: Real> GeneratorSource<T> for GeneratorMatrix<T> {
    fn dim(&self) -> usize {
        self.entries.dim()
    }
    fn apply(&self, _t: T, y: &[C<T>], out: &mut [C<T>]) {
        self.entries.matvec(y, out);
    }
    fn hermitian(&self) -> bool {
        self.hermitian
    }
}

/// Effective Hamiltonian with a pulse envelope on the drive part.
pub struct DrivenGenerator<T: Real> {
    parts: EffectiveParts<T>,
    envelope: PulseEnvelope<T>,
    duration: T,
}

impl<T: Real> DrivenGenerator<T> {
    pub fn new(params: &ParameterSet<T>, duration: T) -> DrivenGenerator<T> {
        DrivenGenerator {
            parts: build_effective_parts(params),
            envelope: params.envelope(),
            duration,
        }
    }
}

impl<T: Real> GeneratorSource<T> for DrivenGenerator<T> {
    fn dim(&self) -> usize {
        self.parts.static_part.dim()
    }
    fn apply(&self, t: T, y: &[C<T>], out: &mut [C<T>]) {
        self.parts.static_part.matvec(y, out);
        let f = self.envelope.value(t, self.duration);
        if f != T::zero() {
            self.parts
                .drive_part
                .matvec_acc(y, C::new(f, T::zero()), out);
        }
    }
    fn hermitian(&self) -> bool {
        self.parts.hermitian
    }
}

/// Small explicit subsystem with a drive split, used for the 5-state and
/// 3-state reference blocks.
pub struct SubspaceGenerator<T: Real> {
    static_part: ComplexMatrix<T>,
    drive_part: ComplexMatrix<T>,
    envelope: PulseEnvelope<T>,
    duration: T,
    hermitian: bool,
}

impl<T: Real> GeneratorSource<T> for SubspaceGenerator<T> {
    fn dim(&self) -> usize {
        self.static_part.dim()
    }
    fn apply(&self, t: T, y: &[C<T>], out: &mut [C<T>]) {
        self.static_part.matvec(y, out);
        let f = self.envelope.value(t, self.duration);
        if f != T::zero() {
            self.drive_part.matvec_acc(y, C::new(f, T::zero()), out);
        }
    }
    fn hermitian(&self) -> bool {
        self.hermitian
    }
}

/// Basis-state order of the five-amplitude block.
pub const TWO_ATOM_ORDER: [&str; 5] = ["1a0", "a10", "ea0", "ae0", "aa1"];
/// Basis-state order of the single-atom block on atom B.
pub const SINGLE_ATOM_ORDER: [&str; 3] = ["010", "0e0", "0a1"];

/// The explicit 5x5 coefficient block of the two-atom chain,
/// in the order [`TWO_ATOM_ORDER`].
pub fn subspace_two_atom<T: Real>(params: &ParameterSet<T>, duration: T) -> SubspaceGenerator<T> {
    let zero = C::new(T::zero(), T::zero());
    let half_omega = C::new(params.omega_ang() / T::from_f64(2.0).unwrap(), T::zero());
    let ga = C::new(params.g_a_ang(), T::zero());
    let gb = C::new(params.g_b_ang(), T::zero());
    let dl = params.delta_l_tilde_ang();
    let dc = params.delta_c_tilde_ang();
    let mut h0 = ComplexMatrix::zeros(5);
    let mut hd = ComplexMatrix::zeros(5);
    // rows/cols: 1a0, a10, ea0, ae0, aa1
    h0.set(2, 2, zero - dl);
    h0.set(3, 3, zero - dl);
    h0.set(4, 4, zero - dc);
    h0.set(2, 4, ga);
    h0.set(4, 2, ga);
    h0.set(3, 4, gb);
    h0.set(4, 3, gb);
    hd.set(0, 2, half_omega);
    hd.set(2, 0, half_omega);
    hd.set(1, 3, half_omega);
    hd.set(3, 1, half_omega);
    SubspaceGenerator {
        static_part: h0,
        drive_part: hd,
        envelope: params.envelope(),
        duration,
        hermitian: params.is_dissipationless(),
    }
}

/// The explicit 3x3 block of the off-resonant single-atom process on
/// atom B, in the order [`SINGLE_ATOM_ORDER`].
pub fn subspace_single_atom<T: Real>(params: &ParameterSet<T>, duration: T) -> SubspaceGenerator<T> {
    let zero = C::new(T::zero(), T::zero());
    let half_omega = C::new(params.omega_ang() / T::from_f64(2.0).unwrap(), T::zero());
    let gb = C::new(params.g_b_ang(), T::zero());
    let mut h0 = ComplexMatrix::zeros(3);
    let mut hd = ComplexMatrix::zeros(3);
    h0.set(1, 1, zero - params.delta_l_tilde_ang());
    h0.set(2, 2, zero - params.delta_c_tilde_ang());
    h0.set(1, 2, gb);
    h0.set(2, 1, gb);
    hd.set(0, 1, half_omega);
    hd.set(1, 0, half_omega);
    SubspaceGenerator {
        static_part: h0,
        drive_part: hd,
        envelope: params.envelope(),
        duration,
        hermitian: params.is_dissipationless(),
    }
}

/// Step counts and worst scaled local error seen by the integrator.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegratorStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    /// Largest accepted error estimate, scaled so 1.0 = tolerance.
    pub max_scaled_error: f64,
}

/// Time-ordered state samples plus integrator statistics.
///
/// Samples sit on the uniform grid `k * sample_interval`; the final time
/// is always included as the last sample even when off-grid.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub samples: Vec<StateVector<T>>,
    pub stats: IntegratorStats,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.time_tag).collect()
    }

    pub fn final_state(&self) -> &StateVector<T> {
        self.samples.last().expect("trajectory has samples")
    }
}

/// Unwrapped phase series; samples where an amplitude fell below the
/// definedness cutoff carry `None` and break the continuation.
#[derive(Debug, Clone)]
pub struct PhaseSeries<T: Real> {
    pub times: Vec<T>,
    pub unwrapped_phase: Vec<Option<T>>,
}

impl<T: Real> PhaseSeries<T> {
    pub fn last_defined(&self) -> Option<(T, T)> {
        self.times
            .iter()
            .zip(self.unwrapped_phase.iter())
            .rev()
            .find_map(|(t, p)| p.map(|p| (*t, p)))
    }
}

// DOP853 Butcher tableau (Hairer, Norsett & Wanner).
const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;
const BHH1: f64 = 0.244094488188976377952755905512E0;
const BHH2: f64 = 0.733846688281611857341361741547E0;
const BHH3: f64 = 0.220588235294117647058823529412E-1;
const C2: f64 = 0.526001519587677318785587544488E-1;
const C3: f64 = 0.789002279381515978178381316732E-1;
const C4: f64 = 0.118350341907227396726757197510E0;
const C5: f64 = 0.281649658092772603273242802490E0;
const C6: f64 = 1.0 / 3.0;
const C7: f64 = 0.25E0;
const C8: f64 = 0.307692307692307692307692307692E0;
const C9: f64 = 0.651282051282051282051282051282E0;
const C10: f64 = 0.6E0;
const C11: f64 = 0.857142857142857142857142857142E0;
const ER1: f64 = 0.1312004499419488073250102996E-1;
const ER6: f64 = -0.1225156446376204440720569753E1;
const ER7: f64 = -0.4957589496572501915214079952E0;
const ER8: f64 = 0.1664377182454986536961530415E1;
const ER9: f64 = -0.3503288487499736816886487290E0;
const ER10: f64 = 0.3341791187130174790297318841E0;
const ER11: f64 = 0.8192320648511571246570742613E-1;
const ER12: f64 = -0.2235530786388629525884427845E-1;

struct Dop853<'a, T: Real, G: GeneratorSource<T> + ?Sized> {
    gen: &'a G,
    stats: IntegratorStats,
    k: Vec<Vec<C<T>>>,
    scratch: Vec<C<T>>,
}

impl<'a, T: Real, G: GeneratorSource<T> + ?Sized> Dop853<'a, T, G> {
    fn new(gen: &'a G) -> Self {
        let dim = gen.dim();
        Dop853 {
            gen,
            stats: IntegratorStats::default(),
            k: vec![vec![C::new(T::zero(), T::zero()); dim]; 12],
            scratch: vec![C::new(T::zero(), T::zero()); dim],
        }
    }

    /// dy/dt = -i M(t) y
    fn rhs(&mut self, t: T, y: &[C<T>], slot: usize) {
        self.gen.apply(t, y, &mut self.scratch);
        let minus_i = C::new(T::zero(), -T::one());
        for (o, s) in self.k[slot].iter_mut().zip(self.scratch.iter()) {
            *o = minus_i * *s;
        }
        self.stats.rhs_evals += 1;
    }

    fn stage(&self, y: &[C<T>], h: T, terms: &[(usize, f64)], out: &mut Vec<C<T>>) {
        out.clear();
        out.extend_from_slice(y);
        for &(slot, a) in terms {
            let c = C::new(h * T::from_f64(a).unwrap(), T::zero());
            for (o, kk) in out.iter_mut().zip(self.k[slot].iter()) {
                *o = *o + c * *kk;
            }
        }
    }

    /// One attempted step from (t, y) with size h. On acceptance returns
    /// the new state and the error-based step-size factor; on rejection
    /// returns None with the shrink factor.
    #[allow(clippy::type_complexity)]
    fn try_step(
        &mut self,
        t: T,
        y: &[C<T>],
        h: T,
        rel_tol: T,
        abs_tol: T,
        facold: &mut T,
    ) -> (Option<Vec<C<T>>>, T) {
        let dim = y.len();
        let mut ys: Vec<C<T>> = Vec::with_capacity(dim);
        let c = |x: f64| T::from_f64(x).unwrap();

        // slot 0 = k1 must already hold f(t, y)
        self.stage(y, h, &[(0, A21)], &mut ys);
        self.rhs(t + c(C2) * h, &ys, 1);
        self.stage(y, h, &[(0, A31), (1, A32)], &mut ys);
        self.rhs(t + c(C3) * h, &ys, 2);
        self.stage(y, h, &[(0, A41), (2, A43)], &mut ys);
        self.rhs(t + c(C4) * h, &ys, 3);
        self.stage(y, h, &[(0, A51), (2, A53), (3, A54)], &mut ys);
        self.rhs(t + c(C5) * h, &ys, 4);
        self.stage(y, h, &[(0, A61), (3, A64), (4, A65)], &mut ys);
        self.rhs(t + c(C6) * h, &ys, 5);
        self.stage(y, h, &[(0, A71), (3, A74), (4, A75), (5, A76)], &mut ys);
        self.rhs(t + c(C7) * h, &ys, 6);
        self.stage(
            y,
            h,
            &[(0, A81), (3, A84), (4, A85), (5, A86), (6, A87)],
            &mut ys,
        );
        self.rhs(t + c(C8) * h, &ys, 7);
        self.stage(
            y,
            h,
            &[(0, A91), (3, A94), (4, A95), (5, A96), (6, A97), (7, A98)],
            &mut ys,
        );
        self.rhs(t + c(C9) * h, &ys, 8);
        self.stage(
            y,
            h,
            &[
                (0, A101),
                (3, A104),
                (4, A105),
                (5, A106),
                (6, A107),
                (7, A108),
                (8, A109),
            ],
            &mut ys,
        );
        self.rhs(t + c(C10) * h, &ys, 9);
        self.stage(
            y,
            h,
            &[
                (0, A111),
                (3, A114),
                (4, A115),
                (5, A116),
                (6, A117),
                (7, A118),
                (8, A119),
                (9, A1110),
            ],
            &mut ys,
        );
        self.rhs(t + c(C11) * h, &ys, 10);
        self.stage(
            y,
            h,
            &[
                (0, A121),
                (3, A124),
                (4, A125),
                (5, A126),
                (6, A127),
                (7, A128),
                (8, A129),
                (9, A1210),
                (10, A1211),
            ],
            &mut ys,
        );
        self.rhs(t + h, &ys, 11);

        // 8th-order combination
        let mut y_new: Vec<C<T>> = Vec::with_capacity(dim);
        let b = [
            (0usize, B1),
            (5, B6),
            (6, B7),
            (7, B8),
            (8, B9),
            (9, B10),
            (10, B11),
            (11, B12),
        ];
        for i in 0..dim {
            let mut acc = C::new(T::zero(), T::zero());
            for &(slot, w) in &b {
                acc = acc + C::new(T::from_f64(w).unwrap(), T::zero()) * self.k[slot][i];
            }
            y_new.push(y[i] + C::new(h, T::zero()) * acc);
        }

        // embedded error estimates (5th and 3rd order)
        let mut err_sq = T::zero();
        let mut err2_sq = T::zero();
        for i in 0..dim {
            let sk = abs_tol + rel_tol * y[i].norm().max(y_new[i].norm());
            let mut e5 = C::new(T::zero(), T::zero());
            for &(slot, w) in &[
                (0usize, ER1),
                (5, ER6),
                (6, ER7),
                (7, ER8),
                (8, ER9),
                (9, ER10),
                (10, ER11),
                (11, ER12),
            ] {
                e5 = e5 + C::new(T::from_f64(w).unwrap(), T::zero()) * self.k[slot][i];
            }
            let mut e3 = (y_new[i] - y[i]) / C::new(h, T::zero());
            e3 = e3
                - C::new(T::from_f64(BHH1).unwrap(), T::zero()) * self.k[0][i]
                - C::new(T::from_f64(BHH2).unwrap(), T::zero()) * self.k[8][i]
                - C::new(T::from_f64(BHH3).unwrap(), T::zero()) * self.k[11][i];
            err_sq = err_sq + (e5.norm() / sk).powi(2);
            err2_sq = err2_sq + (e3.norm() / sk).powi(2);
        }
        let mut deno = err_sq + c(0.01) * err2_sq;
        if deno <= T::zero() {
            deno = T::one();
        }
        let err = h.abs() * err_sq * (T::one() / (deno * T::from_usize(dim).unwrap())).sqrt();

        let safe = c(0.9);
        let expo = T::one() / c(8.0);
        let fac_min = c(1.0 / 3.0);
        let fac_max = c(6.0);
        let fac11 = err.powf(expo);
        let beta = c(0.0);
        let fac = (fac11 / facold.powf(beta) / safe).max(T::one() / fac_max).min(T::one() / fac_min);
        let scale = T::one() / fac;

        if let Some(e) = err.to_f64() {
            if err <= T::one() && e > self.stats.max_scaled_error {
                self.stats.max_scaled_error = e;
            }
        }

        if err <= T::one() {
            *facold = err.max(c(1.0e-4));
            self.stats.accepted_steps += 1;
            (Some(y_new), scale)
        } else {
            self.stats.rejected_steps += 1;
            (None, scale.min(T::one()))
        }
    }
}

fn validate_rel_tol<T: Real>(rel_tol: T) -> Result<()> {
    let lo = T::from_f64(1e-13).unwrap();
    let hi = T::from_f64(1e-3).unwrap();
    if rel_tol <= lo || rel_tol >= hi {
        return Err(SimError::InvalidParameter(format!(
            "rel_tol must lie in (1e-13, 1e-3), got {rel_tol:e}"
        )));
    }
    Ok(())
}

/// Integrate `i dC/dt = M(t) C` from `initial` up to `t_final`, recording
/// samples every `sample_interval` plus the final state.
pub fn evolve<T: Real, G: GeneratorSource<T> + ?Sized>(
    generator: &G,
    initial: &StateVector<T>,
    t_final: T,
    rel_tol: T,
    sample_interval: T,
) -> Result<Trajectory<T>> {
    if t_final <= T::zero() {
        return Err(SimError::InvalidParameter("t_final must be > 0".into()));
    }
    if sample_interval <= T::zero() {
        return Err(SimError::InvalidParameter(
            "sample_interval must be > 0".into(),
        ));
    }
    validate_rel_tol(rel_tol)?;
    if initial.dim() != generator.dim() {
        return Err(SimError::DimensionMismatch {
            expected: generator.dim(),
            got: initial.dim(),
        });
    }
    let abs_tol = rel_tol * T::from_f64(1e-2).unwrap();
    let dim = initial.dim();
    let mut solver = Dop853::new(generator);

    let mut t = T::zero();
    let mut y = initial.amplitudes.clone();
    let mut samples = Vec::new();
    samples.push(StateVector {
        amplitudes: y.clone(),
        time_tag: t,
    });

    // initial step size from the first derivative magnitude
    solver.rhs(T::zero(), &y, 0);
    let f_norm = solver.k[0]
        .iter()
        .fold(T::zero(), |acc, v| acc + v.norm_sqr())
        .sqrt();
    let y_norm = initial.norm().max(T::from_f64(1e-6).unwrap());
    let mut h = if f_norm > T::zero() {
        (T::from_f64(1e-2).unwrap() * y_norm / f_norm).min(sample_interval)
    } else {
        sample_interval
    };

    let mut facold = T::from_f64(1.0e-4).unwrap();
    let mut next_sample_idx: usize = 1;
    let eps_t = T::from_f64(1e-12).unwrap() * t_final.max(T::one());
    let min_h = T::from_f64(1e-14).unwrap() * t_final.max(T::one());
    let max_steps = 200_000_000usize;

    while t < t_final - eps_t {
        if solver.stats.accepted_steps + solver.stats.rejected_steps > max_steps {
            return Err(SimError::IntegrationFailure {
                t_us: t.to_f64().unwrap_or(f64::NAN),
                reason: "maximum step count exceeded".into(),
            });
        }
        // clamp the step to the next sample boundary (or the end)
        let next_boundary = {
            let grid = sample_interval * T::from_usize(next_sample_idx).unwrap();
            grid.min(t_final)
        };
        let h_try = h.min(next_boundary - t).max(min_h);
        if h_try < min_h {
            return Err(SimError::IntegrationFailure {
                t_us: t.to_f64().unwrap_or(f64::NAN),
                reason: "step size underflow".into(),
            });
        }
        let (result, scale) = solver.try_step(t, &y, h_try, rel_tol, abs_tol, &mut facold);
        match result {
            Some(y_new) => {
                t = t + h_try;
                y = y_new;
                // fresh derivative for the next step (FSAL does not hold
                // for DOP853's error scheme, so just recompute)
                solver.rhs(t, &y, 0);
                if t >= next_boundary - eps_t {
                    samples.push(StateVector {
                        amplitudes: y.clone(),
                        time_tag: t,
                    });
                    while sample_interval * T::from_usize(next_sample_idx).unwrap()
                        <= t + eps_t
                    {
                        next_sample_idx += 1;
                    }
                }
                h = (h_try * scale).min(t_final);
            }
            None => {
                h = h_try * scale;
                if h < min_h {
                    return Err(SimError::IntegrationFailure {
                        t_us: t.to_f64().unwrap_or(f64::NAN),
                        reason: "step size underflow after rejection".into(),
                    });
                }
            }
        }
        let _ = dim;
    }

    Ok(Trajectory {
        samples,
        stats: solver.stats,
    })
}

/// Evolve under the full effective Hamiltonian of a parameter set.
pub fn evolve_effective<T: Real>(
    params: &ParameterSet<T>,
    initial: &StateVector<T>,
    t_final: T,
    rel_tol: T,
    sample_interval: T,
) -> Result<Trajectory<T>> {
    let gen = DrivenGenerator::new(params, t_final);
    evolve(&gen, initial, t_final, rel_tol, sample_interval)
}

/// Integrate the explicit five-amplitude block. `initial` is ordered as
/// [`TWO_ATOM_ORDER`].
pub fn evolve_subspace_two_atom<T: Real>(
    params: &ParameterSet<T>,
    initial: &[C<T>; 5],
    t_final: T,
    rel_tol: T,
    sample_interval: T,
) -> Result<Trajectory<T>> {
    let gen = subspace_two_atom(params, t_final);
    let sv = StateVector {
        amplitudes: initial.to_vec(),
        time_tag: T::zero(),
    };
    evolve(&gen, &sv, t_final, rel_tol, sample_interval)
}

/// Integrate the explicit three-amplitude block. `initial` is ordered as
/// [`SINGLE_ATOM_ORDER`].
pub fn evolve_subspace_single_atom<T: Real>(
    params: &ParameterSet<T>,
    initial: &[C<T>; 3],
    t_final: T,
    rel_tol: T,
    sample_interval: T,
) -> Result<Trajectory<T>> {
    let gen = subspace_single_atom(params, t_final);
    let sv = StateVector {
        amplitudes: initial.to_vec(),
        time_tag: T::zero(),
    };
    evolve(&gen, &sv, t_final, rel_tol, sample_interval)
}

/// |c(t)|^2 of one basis state, per sample.
pub fn population<T: Real>(traj: &Trajectory<T>, state: BasisState) -> Result<Vec<T>> {
    let k = state.index();
    traj.samples
        .iter()
        .map(|s| {
            s.amplitudes
                .get(k)
                .map(|a| a.norm_sqr())
                .ok_or_else(|| SimError::UnknownState(state.label()))
        })
        .collect()
}

/// Squared norm per sample.
pub fn norm_sq_series<T: Real>(traj: &Trajectory<T>) -> Vec<T> {
    traj.samples.iter().map(|s| s.norm_sq()).collect()
}

/// Amplitudes below this magnitude have no meaningful phase.
pub fn phase_cutoff<T: Real>() -> T {
    T::from_f64(1e-6).unwrap()
}

fn wrap_to_pi<T: Real>(x: T) -> T {
    let tp = T::PI() + T::PI();
    let mut v = x % tp;
    if v > T::PI() {
        v = v - tp;
    } else if v < -T::PI() {
        v = v + tp;
    }
    v
}

fn unwrap_series<T: Real>(times: Vec<T>, wrapped: Vec<Option<T>>) -> PhaseSeries<T> {
    let mut out = Vec::with_capacity(wrapped.len());
    let mut prev: Option<T> = None;
    for w in wrapped {
        match (w, prev) {
            (Some(w), Some(p)) => {
                let next = p + wrap_to_pi(w - p);
                out.push(Some(next));
                prev = Some(next);
            }
            (Some(w), None) => {
                out.push(Some(w));
                prev = Some(w);
            }
            (None, _) => {
                out.push(None);
                prev = None;
            }
        }
    }
    PhaseSeries {
        times,
        unwrapped_phase: out,
    }
}

/// Unwrapped phase of a single amplitude.
pub fn absolute_phase<T: Real>(traj: &Trajectory<T>, state: BasisState) -> Result<PhaseSeries<T>> {
    let k = state.index();
    let cutoff = phase_cutoff::<T>();
    let wrapped = traj
        .samples
        .iter()
        .map(|s| {
            let a = s
                .amplitudes
                .get(k)
                .ok_or_else(|| SimError::UnknownState(state.label()))?;
            Ok(if a.norm() > cutoff { Some(a.arg()) } else { None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(unwrap_series(traj.times(), wrapped))
}

/// Unwrapped relative phase arg(c_num) - arg(c_den) between two basis
/// states; samples where either amplitude vanishes are undefined.
pub fn relative_phase<T: Real>(
    traj: &Trajectory<T>,
    numerator: BasisState,
    denominator: BasisState,
) -> Result<PhaseSeries<T>> {
    let kn = numerator.index();
    let kd = denominator.index();
    let cutoff = phase_cutoff::<T>();
    let wrapped = traj
        .samples
        .iter()
        .map(|s| {
            let cn = s
                .amplitudes
                .get(kn)
                .ok_or_else(|| SimError::UnknownState(numerator.label()))?;
            let cd = s
                .amplitudes
                .get(kd)
                .ok_or_else(|| SimError::UnknownState(denominator.label()))?;
            Ok(if cn.norm() > cutoff && cd.norm() > cutoff {
                Some((cn * cd.conj()).arg())
            } else {
                None
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(unwrap_series(traj.times(), wrapped))
}
