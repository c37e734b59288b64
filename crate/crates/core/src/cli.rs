//! Batch evaluation behind the `zeno` binary: single points, sweeps and
//! cycle sequences, written as CSV.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{Config, Resolved};
use crate::error::{Result, ZenoError};
use crate::oracle::{self, OracleOptions};
use crate::perturbation::{self, JumpResult};
use crate::quadrature::QuadOptions;
use crate::system::Schedule;
use crate::twolevel::TwoLevelParams;

pub const QUAD_TOL_ENV: &str = "ZENO_QUAD_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    T,
    Tau,
    Lambda,
    Delta,
}

impl FromStr for Axis {
    type Err = ZenoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(Axis::T),
            "tau" => Ok(Axis::Tau),
            "lambda" => Ok(Axis::Lambda),
            "delta" => Ok(Axis::Delta),
            _ => Err(ZenoError::config(
                "axis",
                format!("`{s}` is not one of T, tau, lambda, delta"),
            )),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::T => "T",
            Axis::Tau => "tau",
            Axis::Lambda => "lambda",
            Axis::Delta => "delta",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = ZenoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(ZenoError::config("spacing", format!("`{s}` is not linear or log"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Engine {
    Perturbative,
    TwolevelClosed,
    Asymptotic,
    Oracle,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Perturbative => "perturbative",
            Engine::TwolevelClosed => "twolevel_closed",
            Engine::Asymptotic => "asymptotic",
            Engine::Oracle => "oracle",
        }
    }
}

impl FromStr for Engine {
    type Err = ZenoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perturbative" => Ok(Engine::Perturbative),
            "twolevel_closed" => Ok(Engine::TwolevelClosed),
            "asymptotic" => Ok(Engine::Asymptotic),
            "oracle" => Ok(Engine::Oracle),
            _ => Err(ZenoError::config(
                "engines",
                format!("unknown engine `{s}`"),
            )),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated engine list.
pub fn parse_engines(list: &str) -> Result<Vec<Engine>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Engine::from_str)
        .collect()
}

/// `count` points from `from` to `to` inclusive.
pub fn axis_values(from: f64, to: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(ZenoError::config("count", "must be at least 1"));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(ZenoError::config("from/to", "must be finite"));
    }
    if count == 1 {
        return Ok(vec![from]);
    }
    let step = |k: usize| k as f64 / (count - 1) as f64;
    match spacing {
        Spacing::Linear => Ok((0..count)
            .map(|k| if k == count - 1 { to } else { from + (to - from) * step(k) })
            .collect()),
        Spacing::Log => {
            if !(from > 0.0 && to > 0.0) {
                return Err(ZenoError::config("from/to", "log spacing needs positive bounds"));
            }
            let (a, b) = (from.ln(), to.ln());
            Ok((0..count)
                .map(|k| match k {
                    0 => from,
                    k if k == count - 1 => to,
                    k => (a + (b - a) * step(k)).exp(),
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    axis: Axis,
    values: Vec<f64>,
    engines: Vec<Engine>,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>, engines: Vec<Engine>) -> Result<Self> {
        if values.is_empty() {
            return Err(ZenoError::config("values", "sweep needs at least one value"));
        }
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        let decreasing = values.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) || values.iter().any(|v| !v.is_finite()) {
            return Err(ZenoError::config("values", "must be finite and strictly monotone"));
        }
        if engines.is_empty() {
            return Err(ZenoError::config("engines", "at least one engine is required"));
        }
        Ok(Self {
            axis,
            values,
            engines,
        })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn engines(&self) -> &[Engine] {
        &self.engines
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub quad: QuadOptions,
    pub oracle: OracleOptions,
    /// Oracle evaluations are costly and must be requested explicitly.
    pub allow_oracle: bool,
}

impl RunOptions {
    /// Applies the quadrature tolerance override from the environment.
    pub fn from_env() -> Result<Self> {
        let mut opts = Self::default();
        if let Ok(raw) = std::env::var(QUAD_TOL_ENV) {
            let tol: f64 = raw.trim().parse().map_err(|_| {
                ZenoError::config(QUAD_TOL_ENV, format!("`{raw}` is not a number"))
            })?;
            if !(tol > 0.0 && tol < 1.0) {
                return Err(ZenoError::config(QUAD_TOL_ENV, "must lie in (0, 1)"));
            }
            opts.quad = opts.quad.with_rel_tol(tol);
        }
        Ok(opts)
    }
}

/// Engines run when none are requested: the generic engine, the two-level
/// forms when they apply, and the oracle when allowed.
pub fn default_engines(res: &Resolved, allow_oracle: bool) -> Vec<Engine> {
    let mut engines = vec![Engine::Perturbative];
    if two_level(res).is_ok() {
        engines.extend([Engine::TwolevelClosed, Engine::Asymptotic]);
    }
    if allow_oracle {
        engines.push(Engine::Oracle);
    }
    engines
}

/// Rejects the oracle unless it was allowed.
pub fn check_engines(engines: &[Engine], opts: &RunOptions) -> Result<()> {
    if engines.is_empty() {
        return Err(ZenoError::config("engines", "at least one engine is required"));
    }
    if engines.contains(&Engine::Oracle) && !opts.allow_oracle {
        return Err(ZenoError::config(
            "engines",
            "the oracle engine is opt-in; pass --oracle",
        ));
    }
    Ok(())
}

fn two_level(res: &Resolved) -> Result<TwoLevelParams> {
    let p = TwoLevelParams::from_scenario(&res.scenario)?;
    if res.initial != res.scenario.system.states()[0] {
        return Err(ZenoError::Unsupported(
            "two-level forms monitor the lower state".into(),
        ));
    }
    Ok(p)
}

/// Moves one sweep coordinate of a resolved scenario.
pub fn apply_axis(res: &Resolved, axis: Axis, value: f64) -> Result<Resolved> {
    let mut out = res.clone();
    let sc = &mut out.scenario;
    let s = sc.schedule;
    match axis {
        Axis::T => sc.schedule = Schedule::new(s.tau(), value, s.repetitions(), s.t0())?,
        Axis::Tau => sc.schedule = Schedule::new(value, s.period(), s.repetitions(), s.t0())?,
        Axis::Lambda => sc.detector = sc.detector.with_lambda(value)?,
        Axis::Delta => {
            // Δω is measured on the first channel out of the monitored state.
            let tr = perturbation::first_channel(&sc.drive, res.initial).ok_or_else(|| {
                ZenoError::InvalidDrive(format!("no drive element out of {}", res.initial))
            })?;
            let omega = sc.system.omega_full(&tr)?.abs();
            sc.drive = sc.drive.with_omega_l(omega - value)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineValues {
    /// W_F, W_M, W_Int; absent for the oracle.
    pub components: Option<JumpResult>,
    pub w_total: f64,
    /// Survival after the scheduled N cycles.
    pub survival: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineOutcome {
    pub engine: Engine,
    pub result: std::result::Result<EngineValues, ZenoError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub axis_value: Option<f64>,
    pub lambda_eff: Option<f64>,
    pub width_c: Option<f64>,
    /// Failure before any engine ran (e.g. the axis value is invalid).
    pub setup_error: Option<ZenoError>,
    pub engines: Vec<EngineOutcome>,
}

impl PointReport {
    pub fn failed(&self) -> bool {
        self.setup_error.is_some() || self.engines.iter().any(|e| e.result.is_err())
    }

    pub fn value(&self, engine: Engine) -> Option<&EngineValues> {
        self.engines
            .iter()
            .find(|e| e.engine == engine)
            .and_then(|e| e.result.as_ref().ok())
    }
}

fn from_components(w: JumpResult, sched: &Schedule) -> Result<EngineValues> {
    let s = 1.0 - w.w_total;
    if s < 0.0 {
        return Err(ZenoError::PerturbationValidity(s));
    }
    Ok(EngineValues {
        components: Some(w),
        w_total: w.w_total,
        survival: s.powi(sched.repetitions() as i32),
        rate: w.w_total / sched.period(),
    })
}

fn run_engine(res: &Resolved, engine: Engine, opts: &RunOptions) -> Result<EngineValues> {
    let sc = &res.scenario;
    let sched = &sc.schedule;
    if !(sched.period() > 0.0) {
        return Err(ZenoError::InvalidSchedule("T must be positive".into()));
    }
    match engine {
        Engine::Perturbative => {
            let w = perturbation::total_jump(sc, res.initial, &opts.quad)?;
            from_components(w, sched)
        }
        Engine::TwolevelClosed => {
            let p = two_level(res)?;
            let w = JumpResult::new(
                p.wf_closed(),
                p.wm_semiclosed(&opts.quad)?,
                p.wint_semiclosed(&opts.quad)?,
            );
            from_components(w, sched)
        }
        Engine::Asymptotic => {
            let p = two_level(res)?;
            let w = JumpResult::new(p.wf_closed(), p.wm_asymptotic()?, p.wint_asymptotic()?);
            from_components(w, sched)
        }
        Engine::Oracle => {
            if !opts.allow_oracle {
                return Err(ZenoError::Unsupported("oracle not enabled".into()));
            }
            let single = Resolved {
                scenario: crate::system::Scenario {
                    schedule: Schedule::new(sched.tau(), sched.period(), 1, sched.t0())?,
                    ..sc.clone()
                },
                initial: res.initial,
            };
            let cycle = oracle::exact_cycle(&single.scenario, res.initial, &opts.oracle)?;
            let stay = cycle.population(res.initial).expect("initial is a basis state");
            let w_total = cycle
                .populations
                .iter()
                .filter(|(s, _)| *s != res.initial)
                .map(|(_, p)| p)
                .sum::<f64>();
            let survival = if sched.repetitions() == 1 {
                stay
            } else {
                let seq = oracle::repeated_cycles(sc, res.initial, &opts.oracle)?;
                *seq.survival.last().expect("N >= 1")
            };
            Ok(EngineValues {
                components: None,
                w_total,
                survival,
                rate: w_total / sched.period(),
            })
        }
    }
}

/// Every requested engine on one scenario; engine failures stay in the report.
pub fn run_point(res: &Resolved, engines: &[Engine], opts: &RunOptions) -> PointReport {
    let det = &res.scenario.detector;
    PointReport {
        axis_value: None,
        lambda_eff: det.lambda_eff().ok(),
        width_c: det.width_c().ok(),
        setup_error: None,
        engines: engines
            .iter()
            .map(|&engine| EngineOutcome {
                engine,
                result: run_engine(res, engine, opts),
            })
            .collect(),
    }
}

/// One report per axis value, in axis order, on a pool of `jobs` workers.
pub fn run_sweep(
    res: &Resolved,
    spec: &SweepSpec,
    opts: &RunOptions,
    jobs: usize,
) -> Result<Vec<PointReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ZenoError::config("jobs", e.to_string()))?;
    Ok(pool.install(|| {
        spec.values
            .par_iter()
            .map(|&x| match apply_axis(res, spec.axis, x) {
                Ok(moved) => PointReport {
                    axis_value: Some(x),
                    ..run_point(&moved, &spec.engines, opts)
                },
                Err(e) => PointReport {
                    axis_value: Some(x),
                    lambda_eff: None,
                    width_c: None,
                    setup_error: Some(e),
                    engines: Vec::new(),
                },
            })
            .collect()
    }))
}

/// Relative deviation (a − b)/|b|, zero when the values coincide.
pub fn deviation(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b) / b.abs()
    }
}

/// Least-squares line y = a + b·x; None with fewer than two points.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// How a run ended, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Validation,
    Numerical,
    Partial,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Validation => 1,
            Status::Numerical => 2,
            Status::Partial => 3,
        }
    }

    pub fn of_error(e: &ZenoError) -> Self {
        if e.is_validation() {
            Status::Validation
        } else {
            Status::Numerical
        }
    }
}

/// Ok when every row succeeded, Partial when some failed, otherwise the
/// class of the first failure.
pub fn status_of(reports: &[PointReport]) -> Status {
    let failed: Vec<&PointReport> = reports.iter().filter(|r| r.failed()).collect();
    if failed.is_empty() {
        return Status::Ok;
    }
    if failed.len() < reports.len() {
        return Status::Partial;
    }
    let first = failed[0];
    let err = first
        .setup_error
        .as_ref()
        .or_else(|| first.engines.iter().find_map(|e| e.result.as_ref().err()))
        .expect("failed row carries an error");
    Status::of_error(err)
}

fn engine_pairs(engines: &[Engine]) -> Vec<(Engine, Engine)> {
    let mut pairs = Vec::new();
    for (k, &a) in engines.iter().enumerate() {
        for &b in &engines[k + 1..] {
            pairs.push((a, b));
        }
    }
    pairs
}

fn csv_error(e: csv::Error) -> ZenoError {
    ZenoError::Io(e.to_string())
}

/// CSV with a `#` block echoing the config, a header row and one row per
/// report. Deviation columns compare `w_total` between engine pairs.
pub fn write_table<W: Write>(
    mut out: W,
    cfg: &Config,
    axis: Option<Axis>,
    engines: &[Engine],
    reports: &[PointReport],
) -> Result<()> {
    for line in cfg.to_toml().lines() {
        writeln!(out, "# {line}")?;
    }
    let names: Vec<&str> = engines.iter().map(|e| e.name()).collect();
    writeln!(out, "# engines = {}", names.join(","))?;
    if let Some(axis) = axis {
        writeln!(out, "# sweep axis = {axis}")?;
    }

    let mut header = Vec::new();
    if let Some(axis) = axis {
        header.push(axis.to_string());
    }
    header.extend(["lambda_eff".to_string(), "width_c".to_string()]);
    for e in engines {
        for col in ["w_free", "w_meas", "w_interf", "w_total", "survival", "rate", "error"] {
            header.push(format!("{e}_{col}"));
        }
    }
    let pairs = engine_pairs(engines);
    for (a, b) in &pairs {
        header.push(format!("dev_{a}_{b}"));
    }
    header.push("error".to_string());

    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(&header).map_err(csv_error)?;
    for r in reports {
        let mut row = Vec::with_capacity(header.len());
        if axis.is_some() {
            row.push(opt(r.axis_value));
        }
        row.push(opt(r.lambda_eff));
        row.push(opt(r.width_c));
        for &e in engines {
            let outcome = r.engines.iter().find(|o| o.engine == e);
            match outcome.map(|o| &o.result) {
                Some(Ok(v)) => {
                    let c = v.components;
                    row.push(opt(c.map(|c| c.w_free)));
                    row.push(opt(c.map(|c| c.w_meas)));
                    row.push(opt(c.map(|c| c.w_interf)));
                    row.push(format_float(v.w_total));
                    row.push(format_float(v.survival));
                    row.push(format_float(v.rate));
                    row.push(String::new());
                }
                Some(Err(err)) => {
                    row.extend(std::iter::repeat(String::new()).take(6));
                    row.push(err.to_string());
                }
                None => row.extend(std::iter::repeat(String::new()).take(7)),
            }
        }
        for (a, b) in &pairs {
            let d = match (r.value(*a), r.value(*b)) {
                (Some(x), Some(y)) => Some(deviation(x.w_total, y.w_total)),
                _ => None,
            };
            row.push(opt(d));
        }
        row.push(r.setup_error.as_ref().map(|e| e.to_string()).unwrap_or_default());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    drop(w);

    if axis == Some(Axis::T) {
        for &e in engines {
            let pts: Vec<(f64, f64)> = reports
                .iter()
                .filter_map(|r| Some((r.axis_value?, r.value(e)?.rate)))
                .collect();
            if let Some((intercept, slope)) = linear_fit(&pts) {
                writeln!(
                    out,
                    "# summary {e}: R = a + b*T fit over {} points, b = {}, a = {}",
                    pts.len(),
                    format_float(slope),
                    format_float(intercept)
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleSource {
    Exact,
    Perturbative,
}

impl fmt::Display for CycleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CycleSource::Exact => "exact",
            CycleSource::Perturbative => "perturbative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRow {
    pub cycle: u32,
    pub survival: f64,
    pub source: CycleSource,
}

/// Survival after each of the N scheduled cycles: W(iα)^n from the
/// perturbative engine, and the oracle sequence when allowed.
pub fn run_cycles(res: &Resolved, opts: &RunOptions) -> Result<Vec<CycleRow>> {
    let sc = &res.scenario;
    let s = perturbation::survival(sc, res.initial, &opts.quad)?;
    let n = sc.schedule.repetitions();
    let mut rows: Vec<CycleRow> = (1..=n)
        .map(|c| CycleRow {
            cycle: c,
            survival: s.powi(c as i32),
            source: CycleSource::Perturbative,
        })
        .collect();
    if opts.allow_oracle {
        let seq = oracle::repeated_cycles(sc, res.initial, &opts.oracle)?;
        rows.extend(seq.survival.into_iter().enumerate().map(|(k, p)| CycleRow {
            cycle: k as u32 + 1,
            survival: p,
            source: CycleSource::Exact,
        }));
    }
    Ok(rows)
}

pub fn write_cycles<W: Write>(mut out: W, cfg: &Config, rows: &[CycleRow]) -> Result<()> {
    for line in cfg.to_toml().lines() {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["cycle", "survival", "exact_or_perturbative"])
        .map_err(csv_error)?;
    for r in rows {
        w.write_record([r.cycle.to_string(), format_float(r.survival), r.source.to_string()])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn sample() -> (Config, Resolved) {
        let cfg = Config::parse(
            r#"
[system]
levels = [{ n = 0, energy = -0.5 }, { n = 1, energy = 0.5 }]
[drive]
omega_L = 1.0
elements = [{ f = 1, i = 0, re = 0.02 }]
[detector]
kind = "gaussian"
sigma = 1.0
lambda = 1000.0
[schedule]
tau = 0.01
T = 1.0
"#,
        )
        .unwrap();
        let res = cfg.resolve(Path::new(".")).unwrap();
        (cfg, res)
    }

    #[test]
    fn axis_grids() {
        assert_eq!(axis_values(1.0, 3.0, 3, Spacing::Linear).unwrap(), vec![1.0, 2.0, 3.0]);
        let g = axis_values(0.01, 1.0, 3, Spacing::Log).unwrap();
        assert_eq!(g[0], 0.01);
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert_eq!(g[2], 1.0);
        assert!(axis_values(0.0, 1.0, 3, Spacing::Log).is_err());
        assert!(axis_values(0.0, 1.0, 0, Spacing::Linear).is_err());
    }

    #[test]
    fn sweep_spec_validation() {
        let e = vec![Engine::Perturbative];
        assert!(SweepSpec::new(Axis::T, vec![], e.clone()).is_err());
        assert!(SweepSpec::new(Axis::T, vec![1.0, 1.0], e.clone()).is_err());
        assert!(SweepSpec::new(Axis::T, vec![1.0, 2.0], vec![]).is_err());
        assert!(SweepSpec::new(Axis::T, vec![2.0, 1.0], e).is_ok());
    }

    #[test]
    fn oracle_is_opt_in() {
        let opts = RunOptions::default();
        assert!(check_engines(&[Engine::Oracle], &opts).is_err());
        assert!(check_engines(&[], &opts).is_err());
        let allowed = RunOptions {
            allow_oracle: true,
            ..RunOptions::default()
        };
        assert!(check_engines(&[Engine::Oracle], &allowed).is_ok());
    }

    #[test]
    fn delta_axis_moves_the_carrier() {
        let (_, res) = sample();
        let moved = apply_axis(&res, Axis::Delta, 0.25).unwrap();
        assert_eq!(moved.scenario.drive.omega_l(), 0.75);
        assert!(apply_axis(&res, Axis::Delta, 2.0).is_err());
        assert!(apply_axis(&res, Axis::T, 0.001).is_err());
    }

    #[test]
    fn deviations() {
        assert_eq!(deviation(1.0, 1.0), 0.0);
        assert_eq!(deviation(1.1, -1.0), 2.1);
        assert_eq!(deviation(0.0, 0.0), 0.0);
    }

    #[test]
    fn fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.0 + 0.5 * k as f64)).collect();
        let (a, b) = linear_fit(&pts).unwrap();
        assert!((a - 2.0).abs() < 1e-14 && (b - 0.5).abs() < 1e-14);
        assert!(linear_fit(&pts[..1]).is_none());
    }

    #[test]
    fn status_classes() {
        let ok = PointReport {
            axis_value: Some(1.0),
            lambda_eff: None,
            width_c: None,
            setup_error: None,
            engines: vec![],
        };
        let bad = PointReport {
            setup_error: Some(ZenoError::InvalidSchedule("x".into())),
            ..ok.clone()
        };
        assert_eq!(status_of(&[ok.clone()]), Status::Ok);
        assert_eq!(status_of(&[ok, bad.clone()]), Status::Partial);
        assert_eq!(status_of(&[bad]), Status::Validation);
    }

    #[test]
    fn default_engine_set() {
        let (_, res) = sample();
        assert_eq!(
            default_engines(&res, false),
            vec![Engine::Perturbative, Engine::TwolevelClosed, Engine::Asymptotic]
        );
    }
}
