//! Exact (non-perturbative) propagation of system ⊗ pointer.
//!
//! With no detector Hamiltonian, q̂ commutes with the full Hamiltonian, so the
//! joint state is a family of system vectors ψ(q) that evolve independently
//! under (1 + λq)H₀ + H₁ + V(t). The pointer coordinate is discretized on a
//! uniform grid with weights |Φ(q_k)|²; the detector trace is the weighted
//! sum over grid points.
//!
//! Two propagators are available:
//! - carrier frame: for a rotating-wave drive whose couplings admit integer
//!   photon labels k_a (k_f − k_i = ±1 along every element), the substitution
//!   ψ_a = e^{−ik_aω_L t}φ_a makes the Hamiltonian time independent and each
//!   segment is one exact matrix exponential;
//! - stepper: fourth-order Magnus integrator with piecewise exact exponentials,
//!   step Δt ≤ min(0.01/ω_max, 0.01/|v|, duration/100), where ω_max includes
//!   the (1 + λq) enhancement of the level spacing at that grid point.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::detector::PointerKind;
use crate::error::{Result, ZenoError};
use crate::system::{Drive, DriveConvention, Scenario, StateId, Transition};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagator {
    /// Carrier frame when the drive admits one, stepper otherwise.
    #[default]
    Auto,
    Stepper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    /// Lower bound on the pointer grid size.
    pub min_grid_points: usize,
    /// Exact grid size, overriding the automatic choice.
    pub grid_points: Option<usize>,
    /// Grid half-width in units of σ.
    pub half_width: f64,
    pub propagator: Propagator,
    /// Multiplies the stepper's step bound (0.5 halves every step).
    pub step_scale: f64,
    /// Largest tolerated norm drift per cycle.
    pub norm_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            min_grid_points: 1024,
            grid_points: None,
            half_width: 8.0,
            propagator: Propagator::Auto,
            step_scale: 1.0,
            norm_tol: 1e-10,
        }
    }
}

/// Pointer coordinates q_k with normalized weights |Φ(q_k)|².
#[derive(Debug, Clone, PartialEq)]
pub struct PointerGrid {
    q: Vec<f64>,
    weights: Vec<f64>,
}

impl PointerGrid {
    /// Uniform grid of `n_points` over [−half_width·σ, half_width·σ].
    pub fn gaussian(sigma: f64, n_points: usize, half_width: f64) -> Result<Self> {
        if n_points < 2 || !(sigma > 0.0) || !(half_width > 0.0) {
            return Err(ZenoError::InvalidModel(format!(
                "pointer grid needs n >= 2, sigma > 0, half-width > 0 (got {n_points}, {sigma}, {half_width})"
            )));
        }
        let q_max = half_width * sigma;
        let dq = 2.0 * q_max / (n_points - 1) as f64;
        let q: Vec<f64> = (0..n_points).map(|k| -q_max + k as f64 * dq).collect();
        let raw: Vec<f64> = q
            .iter()
            .map(|&x| (-0.5 * (x / sigma).powi(2)).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.into_iter().map(|w| w / total).collect();
        Ok(Self { q, weights })
    }

    /// A single point q = 0: exact when the pointer is uncoupled (λ = 0).
    pub fn trivial() -> Self {
        Self {
            q: vec![0.0],
            weights: vec![1.0],
        }
    }

    /// Grid resolving the measurement stage of `sc`.
    ///
    /// A branch's jump probability depends on q through phases e^{iλq(E_a−E_b)t}
    /// with t ≤ τ, so it is band-limited to |k| ≤ λ·span(H₀)·τ. The trapezoid
    /// sum against the Gaussian weight converges spectrally once the grid
    /// Nyquist wavenumber clears that band plus the Gaussian's own spectral
    /// width.
    pub fn for_scenario(sc: &Scenario, opts: &OracleOptions) -> Result<Self> {
        let sigma = match sc.detector.kind() {
            PointerKind::Gaussian { sigma } => *sigma,
            PointerKind::Tabulated(_) => {
                return Err(ZenoError::Unsupported(
                    "the oracle needs an explicit pointer wavefunction (Gaussian)".into(),
                ))
            }
        };
        let lambda = sc.detector.lambda();
        if lambda == 0.0 && opts.grid_points.is_none() {
            return Ok(Self::trivial());
        }
        let n = match opts.grid_points {
            Some(n) => n,
            None => {
                let band = lambda * sc.system.h0_span() * sc.schedule.tau() + 9.0 / sigma;
                let dq = 2.0 * std::f64::consts::PI / (1.25 * band);
                let needed = (2.0 * opts.half_width * sigma / dq).ceil() as usize + 1;
                needed.max(opts.min_grid_points)
            }
        };
        Self::gaussian(sigma, n, opts.half_width)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.q
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// exp(−iHt) for Hermitian `h`.
pub fn expm_hermitian(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let n = h.nrows();
    if n == 1 {
        return DMatrix::from_element(1, 1, Complex64::from_polar(1.0, -h[(0, 0)].re * t));
    }
    if n == 2 {
        // H = a·1 + b·σ;  e^{−iHt} = e^{−iat}(cos|b|t − i t sinc(|b|t) (b·σ))
        let a = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
        let bz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
        let off = h[(0, 1)];
        let b = (bz * bz + off.norm_sqr()).sqrt();
        let x = b * t;
        let c = x.cos();
        let s = t * if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        let g = Complex64::from_polar(1.0, -a * t);
        let mi = Complex64::new(0.0, -s);
        return DMatrix::from_row_slice(
            2,
            2,
            &[
                g * (c + mi * bz),
                g * mi * off,
                g * mi * off.conj(),
                g * (c - mi * bz),
            ],
        );
    }
    // Shift out the mean level; short steps then take the series route, whose
    // error does not depend on eigenvalue gaps.
    let a = h.diagonal().iter().map(|d| d.re).sum::<f64>() / n as f64;
    let mut shifted = h.clone();
    for k in 0..n {
        shifted[(k, k)] -= a;
    }
    let size = shifted.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64 * t.abs();
    if size <= 1.0 {
        return expm_series(&shifted, t) * Complex64::from_polar(1.0, -a * t);
    }
    // The default convergence threshold leaves off-diagonal residue well above
    // eps·‖H‖, which swamps weak couplings next to large level energies.
    let eig = nalgebra::SymmetricEigen::try_new(h.clone(), 1e-30, 10_000)
        .unwrap_or_else(|| nalgebra::SymmetricEigen::new(h.clone()));
    let q = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * t)),
    );
    let mut scaled = q.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * q.adjoint()
}

/// exp(−iHt) by Taylor series for ‖Ht‖ ≤ 1, with one halving and squaring.
fn expm_series(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let n = h.nrows();
    let a = h * Complex64::new(0.0, -0.5 * t);
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = &term * &a / Complex64::new(k as f64, 0.0);
        sum += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    &sum * &sum
}

/// Index pairs and values of every stored drive element.
fn indexed_elements(sc: &Scenario) -> Result<Vec<(usize, usize, Transition)>> {
    sc.drive
        .elements()
        .map(|(f, i, _)| {
            Ok((
                sc.system.index_of(f)?,
                sc.system.index_of(i)?,
                Transition { from: i, to: f },
            ))
        })
        .collect()
}

/// Photon labels k_a for the carrier frame, if the RWA drive admits them.
fn carrier_labels(sc: &Scenario) -> Result<Option<Vec<f64>>> {
    if sc.drive.convention() != DriveConvention::Rwa {
        return Ok(None);
    }
    let n = sc.system.states().len();
    let mut adjacency = vec![Vec::new(); n];
    for (a, b, tr) in indexed_elements(sc)? {
        let s = Drive::rwa_sign(&sc.system, &tr)?;
        adjacency[b].push((a, s));
    }
    let mut labels: Vec<Option<f64>> = vec![None; n];
    for start in 0..n {
        if labels[start].is_some() {
            continue;
        }
        labels[start] = Some(0.0);
        let mut queue = VecDeque::from([start]);
        while let Some(b) = queue.pop_front() {
            let kb = labels[b].expect("visited");
            for &(a, s) in &adjacency[b] {
                match labels[a] {
                    None => {
                        labels[a] = Some(kb + s);
                        queue.push_back(a);
                    }
                    Some(ka) if ka != kb + s => return Ok(None),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(Some(labels.into_iter().map(|k| k.expect("all visited")).collect()))
}

/// How segments are propagated for a given scenario.
#[derive(Debug, Clone)]
enum Plan {
    Frame {
        shift: Vec<f64>,
        coupling: DMatrix<Complex64>,
    },
    Stepped {
        elements: Vec<(usize, usize, Transition)>,
        max_coupling: f64,
    },
}

impl Plan {
    fn new(sc: &Scenario, opts: &OracleOptions) -> Result<Self> {
        let elements = indexed_elements(sc)?;
        if opts.propagator == Propagator::Auto {
            if let Some(labels) = carrier_labels(sc)? {
                let n = labels.len();
                let mut coupling = DMatrix::from_element(n, n, ZERO);
                for &(a, b, tr) in &elements {
                    coupling[(a, b)] = sc.drive.element(&tr) * 0.5;
                }
                let shift = labels.iter().map(|k| k * sc.drive.omega_l()).collect();
                return Ok(Plan::Frame { shift, coupling });
            }
        }
        Ok(Plan::Stepped {
            elements,
            max_coupling: sc.drive.max_element(),
        })
    }

    fn in_frame(&self) -> bool {
        matches!(self, Plan::Frame { .. })
    }

    /// Propagator over [t_start, t_start + duration] with diagonal part
    /// (h0_scale·H₀ + H₁).
    fn segment(
        &self,
        sc: &Scenario,
        h0_scale: f64,
        t_start: f64,
        duration: f64,
        opts: &OracleOptions,
    ) -> Result<DMatrix<Complex64>> {
        let diag = sc.system.diagonal(h0_scale);
        let n = diag.len();
        if duration == 0.0 {
            return Ok(DMatrix::identity(n, n));
        }
        match self {
            Plan::Frame { shift, coupling } => {
                let mut h = coupling.clone();
                for a in 0..n {
                    h[(a, a)] = Complex64::new(diag[a] - shift[a], 0.0);
                }
                Ok(expm_hermitian(&h, duration))
            }
            Plan::Stepped {
                elements,
                max_coupling,
            } => {
                let spread = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - diag.iter().cloned().fold(f64::INFINITY, f64::min);
                let omega_max = spread + sc.drive.omega_l();
                let mut bound = duration / 100.0;
                if omega_max > 0.0 {
                    bound = bound.min(0.01 / omega_max);
                }
                if *max_coupling > 0.0 {
                    bound = bound.min(0.01 / max_coupling);
                }
                bound *= opts.step_scale;
                let steps = (duration / bound).ceil().max(1.0) as usize;
                let h = duration / steps as f64;
                let hamiltonian = |t: f64| -> Result<DMatrix<Complex64>> {
                    let mut m = DMatrix::from_element(n, n, ZERO);
                    for a in 0..n {
                        m[(a, a)] = Complex64::new(diag[a], 0.0);
                    }
                    for &(a, b, tr) in elements {
                        m[(a, b)] += sc.drive.value_at(&sc.system, &tr, t)?;
                    }
                    Ok(m)
                };
                let c1 = 0.5 - 3f64.sqrt() / 6.0;
                let c2 = 0.5 + 3f64.sqrt() / 6.0;
                let k = Complex64::new(0.0, -3f64.sqrt() / 12.0 * h);
                let mut u = DMatrix::identity(n, n);
                for j in 0..steps {
                    let t = t_start + j as f64 * h;
                    let ha = hamiltonian(t + c1 * h)?;
                    let hb = hamiltonian(t + c2 * h)?;
                    let comm = &hb * &ha - &ha * &hb;
                    let heff = (&ha + &hb) * Complex64::new(0.5, 0.0) + comm * k;
                    u = expm_hermitian(&heff, h) * u;
                }
                Ok(u)
            }
        }
    }
}

/// System amplitudes ψ(q_k) on a pointer grid. In the carrier frame the
/// amplitudes carry the frame phases e^{ik_aω_L t}; populations do not.
#[derive(Debug, Clone)]
pub struct JointState {
    grid: PointerGrid,
    branches: Vec<DVector<Complex64>>,
    in_frame: Option<bool>,
}

impl JointState {
    /// |ψ⟩ ⊗ |Φ⟩: every branch starts in `psi`.
    pub fn product(grid: PointerGrid, psi: DVector<Complex64>) -> Self {
        let branches = vec![psi; grid.len()];
        Self {
            grid,
            branches,
            in_frame: None,
        }
    }

    pub fn basis(grid: PointerGrid, dim: usize, index: usize) -> Self {
        let mut psi = DVector::from_element(dim, ZERO);
        psi[index] = ONE;
        Self::product(grid, psi)
    }

    pub fn grid(&self) -> &PointerGrid {
        &self.grid
    }

    pub fn branches(&self) -> &[DVector<Complex64>] {
        &self.branches
    }

    /// Σ_k w_k |ψ_k|².
    pub fn norm(&self) -> f64 {
        self.grid
            .weights
            .iter()
            .zip(&self.branches)
            .map(|(w, psi)| w * psi.norm_squared())
            .sum()
    }

    /// Tr_D of |⟨a|ψ⟩|²: Σ_k w_k |ψ_k[a]|².
    pub fn population(&self, index: usize) -> f64 {
        self.grid
            .weights
            .iter()
            .zip(&self.branches)
            .map(|(w, psi)| w * psi[index].norm_sqr())
            .sum()
    }

    /// Reduced system density matrix Tr_D |Ψ⟩⟨Ψ|.
    pub fn reduced_density(&self) -> DMatrix<Complex64> {
        let n = self.branches.first().map_or(0, |b| b.len());
        let mut rho = DMatrix::from_element(n, n, ZERO);
        for (w, psi) in self.grid.weights.iter().zip(&self.branches) {
            rho += psi * psi.adjoint() * Complex64::new(*w, 0.0);
        }
        rho
    }

    fn mark_plan(&mut self, plan: &Plan) -> Result<()> {
        match self.in_frame {
            Some(f) if f != plan.in_frame() => Err(ZenoError::Unsupported(
                "cannot mix carrier-frame and stepped propagation on one state".into(),
            )),
            _ => {
                self.in_frame = Some(plan.in_frame());
                Ok(())
            }
        }
    }

    fn apply<F>(mut self, opts: &OracleOptions, unitary: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<DMatrix<Complex64>> + Sync,
    {
        let before = self.norm();
        let updated: Result<Vec<DVector<Complex64>>> = self
            .grid
            .q
            .par_iter()
            .zip(self.branches.par_iter())
            .map(|(&q, psi)| Ok(unitary(q)? * psi))
            .collect();
        self.branches = updated?;
        let drift = (self.norm() - before).abs();
        if drift > opts.norm_tol {
            return Err(ZenoError::NormDrift(drift));
        }
        Ok(self)
    }
}

/// Measurement stage: each branch evolves under (1 + λq_k)H₀ + H₁ + V(t),
/// t ∈ [t0, t0 + τ].
pub fn evolve_measurement(
    state: JointState,
    sc: &Scenario,
    t0: f64,
    tau: f64,
    opts: &OracleOptions,
) -> Result<JointState> {
    if tau < 0.0 {
        return Err(ZenoError::InvalidSchedule(format!("tau = {tau} < 0")));
    }
    let plan = Plan::new(sc, opts)?;
    let mut state = state;
    state.mark_plan(&plan)?;
    let lambda = sc.detector.lambda();
    state.apply(opts, |q| plan.segment(sc, 1.0 + lambda * q, t0, tau, opts))
}

/// Free stage: the same system propagator H₀ + H₁ + V(t) on every branch.
pub fn evolve_free(
    state: JointState,
    sc: &Scenario,
    t0: f64,
    duration: f64,
    opts: &OracleOptions,
) -> Result<JointState> {
    if duration < 0.0 {
        return Err(ZenoError::InvalidSchedule(format!(
            "free duration {duration} < 0"
        )));
    }
    let plan = Plan::new(sc, opts)?;
    let mut state = state;
    state.mark_plan(&plan)?;
    let u = plan.segment(sc, 1.0, t0, duration, opts)?;
    state.apply(opts, |_| Ok(u.clone()))
}

/// Free evolution of a system density matrix (already traced over the
/// detector). Uses the same representation as [`evolve_free`].
pub fn evolve_free_density(
    rho: &DMatrix<Complex64>,
    sc: &Scenario,
    t0: f64,
    duration: f64,
    opts: &OracleOptions,
) -> Result<DMatrix<Complex64>> {
    let plan = Plan::new(sc, opts)?;
    let u = plan.segment(sc, 1.0, t0, duration, opts)?;
    Ok(&u * rho * u.adjoint())
}

/// One exact cycle started from |initial⟩ ⊗ |Φ⟩.
#[derive(Debug, Clone)]
pub struct ExactCycle {
    /// Final population of every basis state, normalized by the final norm.
    pub populations: Vec<(StateId, f64)>,
    pub norm_drift: f64,
    pub grid_points: usize,
}

impl ExactCycle {
    pub fn population(&self, s: StateId) -> Option<f64> {
        self.populations.iter().find(|(x, _)| *x == s).map(|(_, p)| *p)
    }
}

pub fn exact_cycle(sc: &Scenario, initial: StateId, opts: &OracleOptions) -> Result<ExactCycle> {
    let states = sc.system.states();
    let index = sc.system.index_of(initial)?;
    let grid = PointerGrid::for_scenario(sc, opts)?;
    let grid_points = grid.len();
    let start = JointState::basis(grid, states.len(), index);
    let t0 = sc.schedule.t0();
    let tau = sc.schedule.tau();
    let after_m = evolve_measurement(start, sc, t0, tau, opts)?;
    let after_f = evolve_free(after_m, sc, t0 + tau, sc.schedule.free_duration(), opts)?;
    let norm = after_f.norm();
    let populations = states
        .iter()
        .enumerate()
        .map(|(a, &s)| (s, after_f.population(a) / norm))
        .collect();
    Ok(ExactCycle {
        populations,
        norm_drift: (norm - 1.0).abs(),
        grid_points,
    })
}

/// Exact single-cycle W(iα → fα₁).
pub fn jump_probability_exact(sc: &Scenario, tr: &Transition, opts: &OracleOptions) -> Result<f64> {
    if !sc.system.contains(tr.to) {
        return Err(ZenoError::Lookup(format!("final state {}", tr.to)));
    }
    let cycle = exact_cycle(sc, tr.from, opts)?;
    Ok(cycle.population(tr.to).expect("state listed"))
}

/// Survival probabilities after each of N cycles, with the pointer traced out
/// and re-prepared in |Φ⟩ before every measurement.
#[derive(Debug, Clone)]
pub struct CycleSequence {
    pub survival: Vec<f64>,
    pub max_norm_drift: f64,
}

pub fn repeated_cycles(
    sc: &Scenario,
    initial: StateId,
    opts: &OracleOptions,
) -> Result<CycleSequence> {
    let n = sc.system.states().len();
    let index = sc.system.index_of(initial)?;
    let grid = PointerGrid::for_scenario(sc, opts)?;
    let plan = Plan::new(sc, opts)?;
    let lambda = sc.detector.lambda();
    let tau = sc.schedule.tau();
    let period = sc.schedule.period();

    let cycle_unitaries = |t_start: f64| -> Result<Vec<DMatrix<Complex64>>> {
        let u_free = plan.segment(sc, 1.0, t_start + tau, period - tau, opts)?;
        grid.q
            .par_iter()
            .map(|&q| Ok(&u_free * plan.segment(sc, 1.0 + lambda * q, t_start, tau, opts)?))
            .collect()
    };

    let mut rho = DMatrix::from_element(n, n, ZERO);
    rho[(index, index)] = ONE;
    let mut survival = Vec::with_capacity(sc.schedule.repetitions() as usize);
    let mut max_drift: f64 = 0.0;
    let mut cached = None;
    for c in 0..sc.schedule.repetitions() {
        let t_start = sc.schedule.t0() + c as f64 * period;
        let unitaries = match (&plan, &cached) {
            (Plan::Frame { .. }, Some(u)) => u,
            _ => {
                cached = Some(cycle_unitaries(t_start)?);
                cached.as_ref().expect("just set")
            }
        };
        let contributions: Vec<DMatrix<Complex64>> = unitaries
            .par_iter()
            .map(|u| u * &rho * u.adjoint())
            .collect();
        let mut next = DMatrix::from_element(n, n, ZERO);
        for (w, m) in grid.weights.iter().zip(contributions) {
            next += m * Complex64::new(*w, 0.0);
        }
        let drift = (next.trace().re - rho.trace().re).abs();
        if drift > opts.norm_tol {
            return Err(ZenoError::NormDrift(drift));
        }
        max_drift = max_drift.max(drift);
        rho = next;
        survival.push(rho[(index, index)].re / rho.trace().re);
    }
    Ok(CycleSequence {
        survival,
        max_norm_drift: max_drift,
    })
}
