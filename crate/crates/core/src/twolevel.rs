//! Driven two-level system H = (ω/2)σ₃ + (vσ₊ + v*σ₋)cos(ω_L t) under
//! repeated measurement.
//!
//! In the rotating-wave approximation the jump amplitude is v_eff = v/2, which
//! is where the factors ½ in the W_M and W_Int expressions below come from.
//! The formulas here are written in the two-level variables directly
//! (t rather than t₁ − t₂, detuning Δω = ω − ω_L) so they can be compared
//! term by term against the generic engine in [`crate::perturbation`].

use num_complex::Complex64;

use crate::detector::DetectorModel;
use crate::error::{Result, ZenoError};
use crate::perturbation::{phase_integral, sinc, BOUNDARY_LAYER_WIDTHS};
use crate::quadrature::{integrate, QuadOptions};
use crate::system::{Drive, DriveConvention, LevelSystem, Scenario, Schedule};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelParams {
    omega: f64,
    v: Complex64,
    omega_l: f64,
    pub det: DetectorModel,
    pub sched: Schedule,
}

/// Both terms of the two-term large-λ jump probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultApprox {
    /// |v|²T²/4, the instantaneous-measurement value.
    pub ideal: f64,
    /// (|v|²T/2)(1/(Λω) − τ), the finite-duration correction.
    pub correction: f64,
    pub total: f64,
}

impl TwoLevelParams {
    pub fn new(
        omega: f64,
        v: Complex64,
        omega_l: f64,
        det: DetectorModel,
        sched: Schedule,
    ) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(ZenoError::InvalidSystem(format!(
                "level splitting must be > 0, got {omega}"
            )));
        }
        if !(omega_l.is_finite() && omega_l >= 0.0) {
            return Err(ZenoError::InvalidDrive(format!(
                "omega_L must be finite and >= 0, got {omega_l}"
            )));
        }
        Ok(Self {
            omega,
            v,
            omega_l,
            det,
            sched,
        })
    }

    /// Parameters with the carrier set from a detuning: ω_L = ω − Δω.
    pub fn with_detuning(
        omega: f64,
        v: Complex64,
        delta: f64,
        det: DetectorModel,
        sched: Schedule,
    ) -> Result<Self> {
        Self::new(omega, v, omega - delta, det, sched)
    }

    /// Extracts the two-level parameters of a scenario whose initial state is
    /// the lower of exactly two states coupled by one drive element.
    pub fn from_scenario(sc: &Scenario) -> Result<Self> {
        let states = sc.system.states();
        if states.len() != 2 {
            return Err(ZenoError::Unsupported(format!(
                "two-level forms need exactly two states, found {}",
                states.len()
            )));
        }
        if sc.drive.convention() != DriveConvention::Rwa {
            return Err(ZenoError::Unsupported(
                "two-level forms assume the rotating-wave drive".into(),
            ));
        }
        let tr = crate::system::Transition::new(states[0], states[1])?;
        let omega = sc.system.omega_full(&tr)?;
        if omega != sc.system.omega_fi(&tr)? {
            return Err(ZenoError::Unsupported(
                "two-level forms assume H1 shifts both states equally".into(),
            ));
        }
        Self::new(
            omega,
            sc.drive.element(&tr),
            sc.drive.omega_l(),
            sc.detector.clone(),
            sc.schedule,
        )
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }

    /// Δω = ω − ω_L.
    pub fn delta(&self) -> f64 {
        self.omega - self.omega_l
    }

    fn v2(&self) -> f64 {
        self.v.norm_sqr()
    }

    /// The equivalent generic scenario: levels ∓ω/2, element V₁₀ = v, RWA.
    pub fn to_scenario(&self) -> Result<Scenario> {
        Scenario::new(
            LevelSystem::two_level(self.omega),
            Drive::two_level(self.v, self.omega_l, DriveConvention::Rwa)?,
            self.det.clone(),
            self.sched,
        )
    }

    /// Λω.
    pub fn lambda_omega(&self) -> Result<f64> {
        Ok(self.det.lambda_eff()? * self.omega)
    }

    /// W_F(0→1) = |v|² sin²(Δω(T−τ)/2)/Δω².
    pub fn wf_closed(&self) -> f64 {
        let len = self.sched.free_duration();
        let s = sinc(0.5 * self.delta() * len);
        // |v|² (T−τ)²/4 · sinc²
        0.25 * self.v2() * len * len * s * s
    }

    /// W_M(0→1) = (τ/2)|v|² Re ∫₀^τ F(λωt) e^{iΔωt}(1 − t/τ) dt.
    pub fn wm_semiclosed(&self, quad: &QuadOptions) -> Result<f64> {
        let tau = self.sched.tau();
        if tau == 0.0 {
            return Ok(0.0);
        }
        let rate = self.det.lambda() * self.omega;
        let mut pts = vec![0.0, tau];
        if rate > 0.0 {
            let split = BOUNDARY_LAYER_WIDTHS * self.det.width_c()? / rate;
            if split < tau {
                pts.push(split);
            }
            pts.extend(
                self.det
                    .kinks()
                    .iter()
                    .map(|x| x / rate)
                    .filter(|&t| t > 0.0 && t < tau),
            );
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let delta = self.delta();
        let est = integrate(
            |t| {
                self.det.characteristic_function(rate * t)
                    * Complex64::from_polar(1.0 - t / tau, delta * t)
            },
            &pts,
            quad,
        )?;
        Ok(0.5 * tau * self.v2() * est.value.re)
    }

    /// W_Int(0→1) = (|v|²/2) Re ∫₀^τ dt₁ ∫_τ^T dt₂ e^{iΔω(t₁−t₂)} F(λω(t₁−τ)).
    pub fn wint_semiclosed(&self, quad: &QuadOptions) -> Result<f64> {
        let tau = self.sched.tau();
        let period = self.sched.period();
        if tau == 0.0 || period == tau {
            return Ok(0.0);
        }
        let rate = self.det.lambda() * self.omega;
        let mut pts = vec![0.0, tau];
        if rate > 0.0 {
            let split = tau - BOUNDARY_LAYER_WIDTHS * self.det.width_c()? / rate;
            if split > 0.0 {
                pts.push(split);
            }
            pts.extend(
                self.det
                    .kinks()
                    .iter()
                    .map(|x| tau + x / rate)
                    .filter(|&t| t > 0.0 && t < tau),
            );
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let delta = self.delta();
        let a = integrate(
            |t| {
                Complex64::from_polar(1.0, delta * t)
                    * self.det.characteristic_function(rate * (t - tau))
            },
            &pts,
            quad,
        )?
        .value;
        // ∫_τ^T e^{−iΔω t₂} dt₂ = e^{−iΔωτ} ∫₀^{T−τ} e^{−iΔω u} du
        let b = Complex64::from_polar(1.0, -delta * tau) * phase_integral(delta, period - tau);
        Ok(0.5 * self.v2() * (a * b).re)
    }

    /// Large-λ limit of W_M: τ|v|²/(2Λω).
    pub fn wm_asymptotic(&self) -> Result<f64> {
        Ok(self.sched.tau() * self.v2() / (2.0 * self.lambda_omega()?))
    }

    /// Large-λ limit of W_Int: |v|² sin(Δω(T−τ))/(2ΛωΔω), and
    /// |v|²(T−τ)/(2Λω) at resonance.
    pub fn wint_asymptotic(&self) -> Result<f64> {
        let len = self.sched.free_duration();
        let lo = self.lambda_omega()?;
        Ok(self.v2() * len * sinc(self.delta() * len) / (2.0 * lo))
    }

    /// W(0→1) ≈ |v|²T²/4 + (|v|²T/2)(1/(Λω) − τ), meant for T ≫ τ and
    /// Δω·T ≪ 1 (not enforced).
    pub fn w_result_approx(&self) -> Result<ResultApprox> {
        let period = self.sched.period();
        let v2 = self.v2();
        let ideal = 0.25 * v2 * period * period;
        let correction = 0.5 * v2 * period * (1.0 / self.lambda_omega()? - self.sched.tau());
        Ok(ResultApprox {
            ideal,
            correction,
            total: ideal + correction,
        })
    }

    pub fn with_schedule(&self, sched: Schedule) -> Self {
        Self {
            sched,
            ..self.clone()
        }
    }
}
