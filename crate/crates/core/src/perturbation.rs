//! Second-order jump probability for one measurement + free-evolution cycle,
//! split into the free part W_F, the in-measurement part W_M and the
//! interference term W_Int, plus survival probability and decay rate.
//!
//! Matrix elements are taken in the rotating-wave form
//! V(t)_{fα₁,iα} = u·e^{−isω_L t} with u = v/2, so the products entering the
//! double integrals reduce to |u|²·e^{iΔ(t₁−t₂)} with Δ = ω_{fα₁,iα} − sω_L.
//! Both double integrals are then reduced to one-dimensional quadratures.

use num_complex::Complex64;

use crate::detector::DetectorModel;
use crate::error::{Result, ZenoError};
use crate::quadrature::{integrate, QuadOptions};
use crate::system::{Drive, DriveConvention, Scenario, StateId, Transition};

/// Below this |x| the sinc-type closed forms switch to their series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Boundary-layer split in units of C/(λ|ω_fi|).
pub const BOUNDARY_LAYER_WIDTHS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JumpResult {
    pub w_free: f64,
    pub w_meas: f64,
    pub w_interf: f64,
    pub w_total: f64,
}

impl JumpResult {
    pub fn new(w_free: f64, w_meas: f64, w_interf: f64) -> Self {
        Self {
            w_free,
            w_meas,
            w_interf,
            w_total: w_free + w_meas + w_interf,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.w_free * factor,
            self.w_meas * factor,
            self.w_interf * factor,
        )
    }
}

impl std::ops::Add for JumpResult {
    type Output = JumpResult;

    fn add(self, rhs: Self) -> Self {
        JumpResult::new(
            self.w_free + rhs.w_free,
            self.w_meas + rhs.w_meas,
            self.w_interf + rhs.w_interf,
        )
    }
}

/// sin(x)/x.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// ∫₀^L e^{−iΔu} du, free of cancellation near Δ = 0.
pub fn phase_integral(delta: f64, length: f64) -> Complex64 {
    let x = delta * length;
    let half = sinc(0.5 * x);
    Complex64::new(length * sinc(x), -length * 0.5 * x * half * half)
}

/// Per-channel data entering all three integrals.
#[derive(Debug, Clone, Copy)]
struct Channel {
    /// |u|² with u the RWA amplitude v/2.
    strength: f64,
    /// Δ = ω_{fα₁,iα} − sω_L.
    delta: f64,
    omega_fi: f64,
}

fn channel(sc: &Scenario, tr: &Transition) -> Result<Channel> {
    if sc.drive.convention() != DriveConvention::Rwa {
        return Err(ZenoError::Unsupported(
            "the perturbative engine evaluates rotating-wave matrix elements only".into(),
        ));
    }
    let omega = sc.system.omega_full(tr)?;
    let omega_fi = sc.system.omega_fi(tr)?;
    let el = sc.drive.rwa_element(&sc.system, tr)?;
    Ok(Channel {
        strength: el.amplitude.norm_sqr(),
        delta: omega - el.sign * sc.drive.omega_l(),
        omega_fi,
    })
}

/// Breakpoints on [0, len] for an integrand containing F(rate·s): the
/// boundary-layer split and, for tabulated pointers, the image of every node.
pub(crate) fn kernel_breakpoints(det: &DetectorModel, rate: f64, len: f64) -> Result<Vec<f64>> {
    let mut pts = vec![0.0, len];
    let r = rate.abs();
    if r > 0.0 && len > 0.0 {
        let c = det.width_c()?;
        let split = BOUNDARY_LAYER_WIDTHS * c / r;
        if split < len {
            pts.push(split);
        }
        for &x in det.kinks() {
            let s = x / rate;
            if s > 0.0 && s < len {
                pts.push(s);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

/// W_F: |∫₀^{T−τ} V(t+t₀+τ) e^{iωt} dt|², in closed form.
pub fn w_free(sc: &Scenario, tr: &Transition) -> Result<f64> {
    let ch = channel(sc, tr)?;
    let len = sc.schedule.free_duration();
    let s = sinc(0.5 * ch.delta * len);
    Ok(ch.strength * len * len * s * s)
}

/// W_M: the [0,τ]² double integral with kernel F(λω_fi(t₁−t₂)), reduced to
/// 2|u|² Re ∫₀^τ (τ−s) e^{iΔs} F(λω_fi s) ds.
pub fn w_meas(sc: &Scenario, tr: &Transition, quad: &QuadOptions) -> Result<f64> {
    let ch = channel(sc, tr)?;
    let tau = sc.schedule.tau();
    if tau == 0.0 || ch.strength == 0.0 {
        return Ok(0.0);
    }
    let det = &sc.detector;
    let rate = det.lambda() * ch.omega_fi;
    let pts = kernel_breakpoints(det, rate, tau)?;
    let est = integrate(
        |s| {
            Complex64::from_polar(tau - s, ch.delta * s) * det.characteristic_function(rate * s)
        },
        &pts,
        quad,
    )?;
    Ok(2.0 * ch.strength * est.value.re)
}

/// ∫₀^τ e^{−iΔu} F(λω_if u) du, the measurement factor of W_Int after the
/// substitution u = τ − t₁.
fn interference_measurement_factor(
    sc: &Scenario,
    ch: &Channel,
    quad: &QuadOptions,
) -> Result<Complex64> {
    let tau = sc.schedule.tau();
    let det = &sc.detector;
    let rate = -det.lambda() * ch.omega_fi;
    let pts = kernel_breakpoints(det, rate, tau)?;
    let est = integrate(
        |u| Complex64::from_polar(1.0, -ch.delta * u) * det.characteristic_function(rate * u),
        &pts,
        quad,
    )?;
    Ok(est.value)
}

/// W_Int: 2 Re ∫₀^τ dt₁ ∫_τ^T dt₂ V V e^{iω(t₁−t₂)} F(λω_if(τ−t₁)), which
/// factorizes into a quadrature over t₁ times a closed-form t₂ integral.
pub fn w_interf(sc: &Scenario, tr: &Transition, quad: &QuadOptions) -> Result<f64> {
    let ch = channel(sc, tr)?;
    let tau = sc.schedule.tau();
    let len = sc.schedule.free_duration();
    if tau == 0.0 || len == 0.0 || ch.strength == 0.0 {
        return Ok(0.0);
    }
    let a = interference_measurement_factor(sc, &ch, quad)?;
    let b = phase_integral(ch.delta, len);
    Ok(2.0 * ch.strength * (a * b).re)
}

pub fn jump_probability(sc: &Scenario, tr: &Transition, quad: &QuadOptions) -> Result<JumpResult> {
    Ok(JumpResult::new(
        w_free(sc, tr)?,
        w_meas(sc, tr, quad)?,
        w_interf(sc, tr, quad)?,
    ))
}

/// Jump probabilities into every final state coupled to `initial`.
pub fn channel_probabilities(
    sc: &Scenario,
    initial: StateId,
    quad: &QuadOptions,
) -> Result<Vec<(StateId, JumpResult)>> {
    if !sc.system.contains(initial) {
        return Err(ZenoError::Lookup(format!("initial state {initial}")));
    }
    sc.drive
        .channels_from(initial)
        .into_iter()
        .map(|f| {
            let tr = Transition::new(initial, f)?;
            Ok((f, jump_probability(sc, &tr, quad)?))
        })
        .collect()
}

/// Sum of [`channel_probabilities`].
pub fn total_jump(sc: &Scenario, initial: StateId, quad: &QuadOptions) -> Result<JumpResult> {
    Ok(channel_probabilities(sc, initial, quad)?
        .into_iter()
        .map(|(_, r)| r)
        .fold(JumpResult::default(), |acc, r| acc + r))
}

/// W(iα) = 1 − Σ_f W(iα → fα₁).
pub fn survival(sc: &Scenario, initial: StateId, quad: &QuadOptions) -> Result<f64> {
    let w = 1.0 - total_jump(sc, initial, quad)?.w_total;
    if w < 0.0 {
        return Err(ZenoError::PerturbationValidity(w));
    }
    Ok(w)
}

/// R = Σ_f W(iα → fα₁) / T.
pub fn decay_rate(sc: &Scenario, initial: StateId, quad: &QuadOptions) -> Result<f64> {
    let period = sc.schedule.period();
    if !(period > 0.0) {
        return Err(ZenoError::InvalidSchedule(format!(
            "decay rate needs T > 0, got {period}"
        )));
    }
    Ok(total_jump(sc, initial, quad)?.w_total / period)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalAfterN {
    /// W(iα)^N.
    pub power: f64,
    /// exp(−R·N·T).
    pub exponential: f64,
}

pub fn survival_after_n(
    sc: &Scenario,
    initial: StateId,
    quad: &QuadOptions,
) -> Result<SurvivalAfterN> {
    let n = sc.schedule.repetitions();
    let s = survival(sc, initial, quad)?;
    let rate = decay_rate(sc, initial, quad)?;
    Ok(SurvivalAfterN {
        power: s.powi(n as i32),
        exponential: (-rate * n as f64 * sc.schedule.period()).exp(),
    })
}

/// Convenience for callers that only know the drive: the first channel out
/// of `initial`, if any.
pub fn first_channel(drive: &Drive, initial: StateId) -> Option<Transition> {
    drive
        .channels_from(initial)
        .first()
        .map(|&f| Transition { from: initial, to: f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::DetectorModel;
    use crate::system::{LevelSystem, Schedule};
    use std::f64::consts::PI;

    const OMEGA: f64 = 10.0;

    fn two_level(delta: f64, v: f64, tau: f64, period: f64, lambda: f64) -> Scenario {
        Scenario::new(
            LevelSystem::two_level(OMEGA),
            Drive::two_level(Complex64::new(v, 0.0), OMEGA - delta, DriveConvention::Rwa).unwrap(),
            DetectorModel::gaussian(1.0, lambda).unwrap(),
            Schedule::single(tau, period).unwrap(),
        )
        .unwrap()
    }

    fn up() -> Transition {
        Transition::new(StateId::level(0), StateId::level(1)).unwrap()
    }

    /// Brute-force 2D midpoint rule over the printed double integrals,
    /// independent of the dimension reduction used by the engine.
    fn brute_force(sc: &Scenario, n: usize) -> (f64, f64, f64) {
        let tr = up();
        let tau = sc.schedule.tau();
        let t_total = sc.schedule.period();
        let omega = sc.system.omega_full(&tr).unwrap();
        let omega_fi = sc.system.omega_fi(&tr).unwrap();
        let lambda = sc.detector.lambda();
        let vt = |t: f64| sc.drive.value_at(&sc.system, &tr, t).unwrap();
        let vt_back = |t: f64| sc.drive.value_at(&sc.system, &tr.reversed(), t).unwrap();
        let f = |x: f64| sc.detector.characteristic_function(x);
        let phase = |x: f64| Complex64::from_polar(1.0, x);

        let free_len = t_total - tau;
        let h = free_len / n as f64;
        let mut amp = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let t = (k as f64 + 0.5) * h;
            amp += vt(t + tau) * phase(omega * t) * h;
        }
        let wf = amp.norm_sqr();

        let hm = tau / n as f64;
        let mut wm = Complex64::new(0.0, 0.0);
        for a in 0..n {
            let t1 = (a as f64 + 0.5) * hm;
            for b in 0..n {
                let t2 = (b as f64 + 0.5) * hm;
                wm += vt(t1) * vt_back(t2) * phase(omega * (t1 - t2)) * f(lambda * omega_fi * (t1 - t2));
            }
        }
        wm *= hm * hm;

        let h2 = free_len / n as f64;
        let mut wi = Complex64::new(0.0, 0.0);
        for a in 0..n {
            let t1 = (a as f64 + 0.5) * hm;
            for b in 0..n {
                let t2 = tau + (b as f64 + 0.5) * h2;
                wi += vt(t1) * vt_back(t2) * phase(omega * (t1 - t2)) * f(-lambda * omega_fi * (tau - t1));
            }
        }
        (wf, wm.re, 2.0 * wi.re * hm * h2)
    }

    #[test]
    fn matches_brute_force_double_integrals() {
        // Moderate λ so that a 600×600 midpoint grid resolves the kernel.
        let sc = two_level(0.7, 0.05, 0.3, 1.0, 4.0);
        let (wf, wm, wi) = brute_force(&sc, 600);
        let q = QuadOptions::default();
        let r = jump_probability(&sc, &up(), &q).unwrap();
        assert!((r.w_free - wf).abs() < 1e-5 * wf, "{} {}", r.w_free, wf);
        assert!((r.w_meas - wm).abs() < 1e-5 * wm, "{} {}", r.w_meas, wm);
        assert!((r.w_interf - wi).abs() < 1e-5 * wi.abs(), "{} {}", r.w_interf, wi);
    }

    #[test]
    fn zero_drive_gives_zero() {
        let sc = two_level(0.1, 0.0, 0.01, 0.1, 100.0);
        let q = QuadOptions::default();
        assert_eq!(jump_probability(&sc, &up(), &q).unwrap(), JumpResult::default());
        assert_eq!(survival(&sc, StateId::level(0), &q).unwrap(), 1.0);
        assert_eq!(decay_rate(&sc, StateId::level(0), &q).unwrap(), 0.0);
        let n = Scenario {
            schedule: Schedule::new(0.01, 0.1, 7, 0.0).unwrap(),
            ..sc
        };
        assert_eq!(survival_after_n(&n, StateId::level(0), &q).unwrap().power, 1.0);
    }

    #[test]
    fn free_part_closed_form() {
        let (delta, v, tau, t) = (0.3, 0.02, 0.1, 2.0);
        let sc = two_level(delta, v, tau, t, 50.0);
        let expected = v * v * (0.5 * delta * (t - tau)).sin().powi(2) / (delta * delta);
        let got = w_free(&sc, &up()).unwrap();
        assert!((got - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn free_part_resonant_limit() {
        let (v, tau, t) = (0.02, 0.1, 2.0);
        let limit = v * v * (t - tau) * (t - tau) / 4.0;
        let at_zero = w_free(&two_level(0.0, v, tau, t, 50.0), &up()).unwrap();
        assert_eq!(at_zero, limit);
        let near = w_free(&two_level(1e-8, v, tau, t, 50.0), &up()).unwrap();
        assert!((near - limit).abs() < 1e-12 * limit);
    }

    #[test]
    fn empty_measurement_window() {
        let q = QuadOptions::default();
        let sc = two_level(0.2, 0.01, 0.0, 1.0, 100.0);
        assert_eq!(w_meas(&sc, &up(), &q).unwrap(), 0.0);
        assert_eq!(w_interf(&sc, &up(), &q).unwrap(), 0.0);
        let full = two_level(0.2, 0.01, 1.0, 1.0, 100.0);
        assert_eq!(w_interf(&full, &up(), &q).unwrap(), 0.0);
        assert_eq!(w_free(&full, &up()).unwrap(), 0.0);
    }

    #[test]
    fn uncoupled_detector_reduces_to_free_form() {
        let q = QuadOptions::default();
        for delta in [0.0, 0.4, 3.0] {
            let tau = 0.37;
            let sc = two_level(delta, 0.01, tau, 1.0, 0.0);
            let wm = w_meas(&sc, &up(), &q).unwrap();
            let as_free = two_level(delta, 0.01, 0.0, tau, 0.0);
            let wf = w_free(&as_free, &up()).unwrap();
            assert!((wm - wf).abs() < 1e-10 * wf, "delta={delta}: {wm} vs {wf}");
        }
    }

    #[test]
    fn large_lambda_asymptotics() {
        let q = QuadOptions::default();
        let (v, tau, t) = (0.01, 0.05, 1.0);
        let lambda = 1e4;
        let c = (PI / 2.0).sqrt();
        let big_lambda = OMEGA * lambda / c;
        let sc = two_level(0.3, v, tau, t, lambda);
        let wm = w_meas(&sc, &up(), &q).unwrap();
        let ratio = wm * 2.0 * big_lambda / (tau * v * v);
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
        let wi = w_interf(&sc, &up(), &q).unwrap();
        let asym = v * v * (0.3 * (t - tau)).sin() / (2.0 * big_lambda * 0.3);
        assert!((wi / asym - 1.0).abs() < 0.01, "{wi} {asym}");
    }

    #[test]
    fn resonant_interference_limit() {
        let q = QuadOptions::default();
        let (v, tau, t, lambda) = (0.01, 0.05, 1.0, 1e4);
        let big_lambda = OMEGA * lambda / (PI / 2.0).sqrt();
        let wi = w_interf(&two_level(0.0, v, tau, t, lambda), &up(), &q).unwrap();
        let limit = v * v * (t - tau) / (2.0 * big_lambda);
        assert!((wi / limit - 1.0).abs() < 0.01);
    }

    #[test]
    fn quadratic_in_drive() {
        let q = QuadOptions::default();
        let a = jump_probability(&two_level(0.2, 0.01, 0.05, 1.0, 300.0), &up(), &q).unwrap();
        let b = jump_probability(&two_level(0.2, 0.02, 0.05, 1.0, 300.0), &up(), &q).unwrap();
        for (x, y) in [
            (a.w_free, b.w_free),
            (a.w_meas, b.w_meas),
            (a.w_interf, b.w_interf),
        ] {
            assert!((y / x - 4.0).abs() < 1e-12, "{x} {y}");
        }
    }

    #[test]
    fn full_cosine_is_rejected() {
        let mut sc = two_level(0.0, 0.01, 0.01, 1.0, 10.0);
        sc.drive = sc.drive.with_convention(DriveConvention::FullCosine);
        assert!(matches!(
            jump_probability(&sc, &up(), &QuadOptions::default()),
            Err(ZenoError::Unsupported(_))
        ));
    }

    #[test]
    fn survival_validity_error() {
        let sc = two_level(0.0, 3.0, 0.0, 1.0, 0.0);
        let r = survival(&sc, StateId::level(0), &QuadOptions::default());
        assert!(matches!(r, Err(ZenoError::PerturbationValidity(_))));
    }

    #[test]
    fn three_level_channels_add() {
        let q = QuadOptions::default();
        let sys = LevelSystem::new(&[(0, 0.0), (1, 1.0), (2, 1.5)], &[]).unwrap();
        let g = StateId::level(0);
        let drive = Drive::new(
            &[
                (StateId::level(1), g, Complex64::new(0.01, 0.0)),
                (StateId::level(2), g, Complex64::new(0.0, 0.02)),
            ],
            1.2,
            DriveConvention::Rwa,
        )
        .unwrap();
        let sc = Scenario::new(
            sys,
            drive,
            DetectorModel::gaussian(1.0, 200.0).unwrap(),
            Schedule::single(0.02, 1.0).unwrap(),
        )
        .unwrap();
        let w1 = jump_probability(&sc, &Transition::new(g, StateId::level(1)).unwrap(), &q)
            .unwrap()
            .w_total;
        let w2 = jump_probability(&sc, &Transition::new(g, StateId::level(2)).unwrap(), &q)
            .unwrap()
            .w_total;
        let s = survival(&sc, g, &q).unwrap();
        assert!((s - (1.0 - (w1 + w2))).abs() < 1e-15);
    }

    #[test]
    fn n_cycle_survival_forms_agree() {
        // W = 1e-4, N = 100: (1 − W)^N vs exp(−RNT) with RNT = 1e-2.
        let w: f64 = 1e-4;
        let power = (1.0 - w).powi(100);
        let expo = (-1e-2f64).exp();
        assert!((power - 0.990_049_3).abs() < 1e-6);
        assert!((power - expo).abs() < 1e-6);
    }

    #[test]
    fn phase_integral_matches_direct() {
        for (d, l) in [(0.0, 2.0), (1e-9, 2.0), (0.7, 3.0), (-2.0, 0.5)] {
            let x: f64 = d * l;
            let direct = if x.abs() < 1e-6 {
                Complex64::new(l * (1.0 - x * x / 6.0), -l * x / 2.0)
            } else {
                (Complex64::from_polar(1.0, -d * l) - 1.0) / Complex64::new(0.0, -d)
            };
            assert!((phase_integral(d, l) - direct).norm() < 1e-12, "{d} {l}");
        }
    }
}
