//! The measured system: spectrum of H₀, auxiliary H₁ eigenvalues, the
//! periodic perturbation V(t) and the measurement schedule.
//!
//! Units have ħ = 1 throughout, so energies are angular frequencies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detector::DetectorModel;
use crate::error::{Result, ZenoError};

/// Basis state |n α⟩: level `n` of H₀ and auxiliary quantum number `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId {
    pub n: u32,
    pub alpha: u32,
}

impl StateId {
    pub const fn new(n: u32, alpha: u32) -> Self {
        Self { n, alpha }
    }

    pub const fn level(n: u32) -> Self {
        Self { n, alpha: 0 }
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.n, self.alpha)
    }
}

/// Jump |iα⟩ → |fα₁⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
}

impl Transition {
    pub fn new(from: StateId, to: StateId) -> Result<Self> {
        if from == to {
            return Err(ZenoError::InvalidSystem(format!(
                "transition from {from} to itself"
            )));
        }
        Ok(Self { from, to })
    }

    pub fn reversed(&self) -> Self {
        Self {
            from: self.to,
            to: self.from,
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSystem {
    levels: BTreeMap<u32, f64>,
    aux: BTreeMap<StateId, f64>,
}

impl LevelSystem {
    /// `levels` holds (n, E_n); `aux` holds (n, α, E₁(n,α)) and may be empty,
    /// in which case every level carries the single state α = 0.
    pub fn new(levels: &[(u32, f64)], aux: &[(u32, u32, f64)]) -> Result<Self> {
        if levels.is_empty() {
            return Err(ZenoError::InvalidSystem("no levels".into()));
        }
        let mut map = BTreeMap::new();
        for &(n, e) in levels {
            if !e.is_finite() {
                return Err(ZenoError::InvalidSystem(format!(
                    "energy of level {n} is not finite"
                )));
            }
            if map.insert(n, e).is_some() {
                return Err(ZenoError::InvalidSystem(format!("duplicate level index {n}")));
            }
        }
        let mut aux_map = BTreeMap::new();
        for &(n, alpha, e1) in aux {
            if !map.contains_key(&n) {
                return Err(ZenoError::InvalidSystem(format!(
                    "auxiliary entry ({n},{alpha}) references unknown level {n}"
                )));
            }
            if !e1.is_finite() {
                return Err(ZenoError::InvalidSystem(format!(
                    "E1({n},{alpha}) is not finite"
                )));
            }
            if aux_map.insert(StateId::new(n, alpha), e1).is_some() {
                return Err(ZenoError::InvalidSystem(format!(
                    "duplicate auxiliary entry ({n},{alpha})"
                )));
            }
        }
        Ok(Self {
            levels: map,
            aux: aux_map,
        })
    }

    /// Two-level system with energies ∓ω/2 for |0⟩ and |1⟩.
    pub fn two_level(omega: f64) -> Self {
        Self::new(&[(0, -0.5 * omega), (1, 0.5 * omega)], &[]).expect("finite energies")
    }

    pub fn levels(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.levels.iter().map(|(&n, &e)| (n, e))
    }

    pub fn aux(&self) -> impl Iterator<Item = (StateId, f64)> + '_ {
        self.aux.iter().map(|(&s, &e)| (s, e))
    }

    pub fn energy(&self, n: u32) -> Result<f64> {
        self.levels
            .get(&n)
            .copied()
            .ok_or_else(|| ZenoError::Lookup(format!("level {n}")))
    }

    /// E₁(n,α); zero when no auxiliary spectrum is given.
    pub fn aux_energy(&self, s: StateId) -> Result<f64> {
        if self.aux.is_empty() {
            if s.alpha == 0 && self.levels.contains_key(&s.n) {
                return Ok(0.0);
            }
            return Err(ZenoError::Lookup(format!("state {s}")));
        }
        self.aux
            .get(&s)
            .copied()
            .ok_or_else(|| ZenoError::Lookup(format!("auxiliary entry for {s}")))
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.aux_energy(s).is_ok()
    }

    /// All basis states in a fixed order.
    pub fn states(&self) -> Vec<StateId> {
        if self.aux.is_empty() {
            self.levels.keys().map(|&n| StateId::level(n)).collect()
        } else {
            self.aux.keys().copied().collect()
        }
    }

    pub fn index_of(&self, s: StateId) -> Result<usize> {
        self.states()
            .iter()
            .position(|&x| x == s)
            .ok_or_else(|| ZenoError::Lookup(format!("state {s}")))
    }

    /// ω_fi = E_f − E_i.
    pub fn omega_fi(&self, tr: &Transition) -> Result<f64> {
        Ok(self.energy(tr.to.n)? - self.energy(tr.from.n)?)
    }

    /// ω_{fα₁,iα} = ω_fi + E₁(f,α₁) − E₁(i,α).
    pub fn omega_full(&self, tr: &Transition) -> Result<f64> {
        Ok(self.omega_fi(tr)? + (self.aux_energy(tr.to)? - self.aux_energy(tr.from)?))
    }

    /// Diagonal of (1 + λq)H₀ + H₁ in [`states`](Self::states) order.
    pub fn diagonal(&self, h0_scale: f64) -> Vec<f64> {
        self.states()
            .iter()
            .map(|&s| h0_scale * self.levels[&s.n] + self.aux_energy(s).unwrap_or(0.0))
            .collect()
    }

    /// Largest |E_a − E_b| of H₀ alone.
    pub fn h0_span(&self) -> f64 {
        let (lo, hi) = self
            .levels
            .values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                (lo.min(e), hi.max(e))
            });
        hi - lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DriveConvention {
    /// Rotating-wave approximation: V_{fi}(t) = (v/2) e^{∓iω_L t}, keeping
    /// the co-rotating component only.
    #[default]
    Rwa,
    /// V_{fi}(t) = v cos(ω_L t).
    FullCosine,
}

impl fmt::Display for DriveConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveConvention::Rwa => f.write_str("rwa"),
            DriveConvention::FullCosine => f.write_str("full_cosine"),
        }
    }
}

/// Rotating-wave form of one matrix element: V_{fi}(t) = amplitude · e^{−i·sign·ω_L t}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaElement {
    pub amplitude: Complex64,
    pub sign: f64,
}

/// Periodic perturbation V(t) with Hermitian matrix elements v_{fα₁,iα}.
#[derive(Debug, Clone, PartialEq)]
pub struct Drive {
    /// Keyed by (final, initial).
    elements: BTreeMap<(StateId, StateId), Complex64>,
    omega_l: f64,
    convention: DriveConvention,
}

impl Drive {
    /// Builds the drive from `(final, initial, v)` entries, adding missing
    /// Hermitian partners. Conflicting partners are rejected.
    pub fn new(
        entries: &[(StateId, StateId, Complex64)],
        omega_l: f64,
        convention: DriveConvention,
    ) -> Result<Self> {
        if !(omega_l.is_finite() && omega_l >= 0.0) {
            return Err(ZenoError::InvalidDrive(format!(
                "omega_L must be finite and >= 0, got {omega_l}"
            )));
        }
        let mut elements: BTreeMap<(StateId, StateId), Complex64> = BTreeMap::new();
        for &(f, i, v) in entries {
            if f == i {
                return Err(ZenoError::InvalidDrive(format!(
                    "diagonal element on {f}; V only couples distinct states"
                )));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(ZenoError::InvalidDrive(format!("non-finite element {f}<-{i}")));
            }
            if let Some(&old) = elements.get(&(f, i)) {
                if old != v {
                    return Err(ZenoError::InvalidDrive(format!(
                        "element {f}<-{i} given twice with different values"
                    )));
                }
            }
            if let Some(&partner) = elements.get(&(i, f)) {
                if (partner - v.conj()).norm() > 1e-12 * v.norm().max(1e-300) {
                    return Err(ZenoError::InvalidDrive(format!(
                        "elements {f}<-{i} and {i}<-{f} are not Hermitian conjugates"
                    )));
                }
            }
            elements.insert((f, i), v);
            elements.entry((i, f)).or_insert(v.conj());
        }
        Ok(Self {
            elements,
            omega_l,
            convention,
        })
    }

    /// Two-level drive (v σ₊ + v* σ₋) cos(ω_L t).
    pub fn two_level(v: Complex64, omega_l: f64, convention: DriveConvention) -> Result<Self> {
        Self::new(
            &[(StateId::level(1), StateId::level(0), v)],
            omega_l,
            convention,
        )
    }

    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }

    pub fn convention(&self) -> DriveConvention {
        self.convention
    }

    pub fn with_omega_l(&self, omega_l: f64) -> Result<Self> {
        if !(omega_l.is_finite() && omega_l >= 0.0) {
            return Err(ZenoError::InvalidDrive(format!(
                "omega_L must be finite and >= 0, got {omega_l}"
            )));
        }
        Ok(Self {
            omega_l,
            ..self.clone()
        })
    }

    pub fn with_convention(&self, convention: DriveConvention) -> Self {
        Self {
            convention,
            ..self.clone()
        }
    }

    /// Every element scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            elements: self.elements.iter().map(|(&k, &v)| (k, v * factor)).collect(),
            ..self.clone()
        }
    }

    /// All stored elements, including generated Hermitian partners.
    pub fn elements(&self) -> impl Iterator<Item = (StateId, StateId, Complex64)> + '_ {
        self.elements.iter().map(|(&(f, i), &v)| (f, i, v))
    }

    /// v_{fα₁,iα} for the jump `tr`, or zero.
    pub fn element(&self, tr: &Transition) -> Complex64 {
        self.elements
            .get(&(tr.to, tr.from))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Final states reachable from `initial` through a non-zero element.
    pub fn channels_from(&self, initial: StateId) -> Vec<StateId> {
        let set: BTreeSet<StateId> = self
            .elements
            .iter()
            .filter(|(&(_, i), v)| i == initial && v.norm() > 0.0)
            .map(|(&(f, _), _)| f)
            .collect();
        set.into_iter().collect()
    }

    pub fn max_element(&self) -> f64 {
        self.elements.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn validate_against(&self, sys: &LevelSystem) -> Result<()> {
        for &(f, i) in self.elements.keys() {
            for s in [f, i] {
                if !sys.contains(s) {
                    return Err(ZenoError::InvalidDrive(format!(
                        "element references unknown state {s}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Which rotating component survives the RWA for the jump `tr`: the one
    /// co-rotating with e^{iω t}, ω = ω_{fα₁,iα}. Ties (ω = 0) are broken by
    /// state order so that partners always get opposite signs.
    pub fn rwa_sign(sys: &LevelSystem, tr: &Transition) -> Result<f64> {
        let w = sys.omega_full(tr)?;
        Ok(if w > 0.0 {
            1.0
        } else if w < 0.0 {
            -1.0
        } else if tr.to > tr.from {
            1.0
        } else {
            -1.0
        })
    }

    /// RWA element for `tr`: amplitude v/2 and the sign of its carrier.
    pub fn rwa_element(&self, sys: &LevelSystem, tr: &Transition) -> Result<RwaElement> {
        Ok(RwaElement {
            amplitude: self.element(tr) * 0.5,
            sign: Self::rwa_sign(sys, tr)?,
        })
    }

    /// V(t)_{fα₁,iα} at absolute time `t` under this drive's convention.
    pub fn value_at(&self, sys: &LevelSystem, tr: &Transition, t: f64) -> Result<Complex64> {
        let v = self.element(tr);
        Ok(match self.convention {
            DriveConvention::FullCosine => v * (self.omega_l * t).cos(),
            DriveConvention::Rwa => {
                let sign = Self::rwa_sign(sys, tr)?;
                v * 0.5 * Complex64::from_polar(1.0, -sign * self.omega_l * t)
            }
        })
    }
}

/// Measurement of duration τ followed by free evolution for T − τ, repeated N
/// times starting at t₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    tau: f64,
    period: f64,
    repetitions: u32,
    t0: f64,
}

impl Schedule {
    pub fn new(tau: f64, period: f64, repetitions: u32, t0: f64) -> Result<Self> {
        if !(tau.is_finite() && period.is_finite() && t0.is_finite()) {
            return Err(ZenoError::InvalidSchedule("non-finite time".into()));
        }
        if tau < 0.0 {
            return Err(ZenoError::InvalidSchedule(format!(
                "measurement duration tau = {tau} must be >= 0"
            )));
        }
        if tau > period {
            return Err(ZenoError::InvalidSchedule(format!(
                "measurement duration tau = {tau} exceeds the period T = {period} (need 0 <= tau <= T)"
            )));
        }
        if repetitions < 1 {
            return Err(ZenoError::InvalidSchedule(
                "repetition count N must be >= 1".into(),
            ));
        }
        Ok(Self {
            tau,
            period,
            repetitions,
            t0,
        })
    }

    pub fn single(tau: f64, period: f64) -> Result<Self> {
        Self::new(tau, period, 1, 0.0)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn repetitions(&self) -> u32 {
        self.repetitions
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Free-evolution time T − τ.
    pub fn free_duration(&self) -> f64 {
        self.period - self.tau
    }
}

/// Everything needed to evaluate one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub system: LevelSystem,
    pub drive: Drive,
    pub detector: DetectorModel,
    pub schedule: Schedule,
}

impl Scenario {
    pub fn new(
        system: LevelSystem,
        drive: Drive,
        detector: DetectorModel,
        schedule: Schedule,
    ) -> Result<Self> {
        drive.validate_against(&system)?;
        Ok(Self {
            system,
            drive,
            detector,
            schedule,
        })
    }
}
