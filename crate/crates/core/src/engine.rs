//! Fixed-point iteration: synchronous runs, a logical-time asynchronous
//! simulator with seeded delay schedules, and the rate/envelope checks run
//! on the resulting traces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ifun::{existence_test, leq, InterferenceFunction};
use crate::numkit::{weighted_max_norm_vec, NumError};

/// `||p||_inf` beyond which a run is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e15;
/// Stopping tolerance of the high-accuracy reference run.
pub const REFERENCE_TOL: f64 = 1e-13;
/// Relative slack in [`envelope_check`].
pub const ENVELOPE_SLACK: f64 = 1e-9;
/// Rate estimates at or above this are flagged sub-linear.
pub const SUBLINEAR_RATE: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("step {step}: I_{component} evaluated to {value}")]
    Evaluation {
        step: usize,
        component: usize,
        value: f64,
    },
    #[error("reference run did not converge ({stop:?} after {steps} steps)")]
    NoReference { stop: StopReason, steps: usize },
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Tolerance,
    MaxIter,
    Divergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleMeta {
    pub seed: u64,
    pub mode: String,
    /// Worst-case delay bound `D` (bounded mode only).
    pub max_delay: Option<usize>,
    pub window: Option<usize>,
}

/// Iterates `p(0), ..., p(n)` of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub powers: Vec<Vec<f64>>,
    pub stop: StopReason,
    /// Largest `t - tau_j^i(t)` used at each async step; empty for sync runs.
    pub staleness: Vec<usize>,
    pub schedule: Option<ScheduleMeta>,
}

impl IterationTrace {
    /// Number of iterations performed.
    pub fn steps(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn final_power(&self) -> &[f64] {
        self.powers.last().expect("trace holds p(0)")
    }

    pub fn converged(&self) -> bool {
        self.stop == StopReason::Tolerance
    }

    /// `e(n) = ||p(n) - p*||_v` for every recorded step.
    pub fn errors(&self, p_star: &[f64], v: &[f64]) -> Result<Vec<f64>, NumError> {
        self.powers
            .iter()
            .map(|p| weighted_max_norm_vec(&sub(p, p_star), v))
            .collect()
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn validate<F: InterferenceFunction + ?Sized>(
    f: &F,
    p0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(), EngineError> {
    if p0.len() != f.dim() {
        return Err(EngineError::InvalidInput(format!(
            "p0 has {} entries, function has dimension {}",
            p0.len(),
            f.dim()
        )));
    }
    if let Some(i) = p0.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(EngineError::InvalidInput(format!(
            "p0[{i}] = {} must be nonnegative and finite",
            p0[i]
        )));
    }
    if !(tol > 0.0) {
        return Err(EngineError::InvalidInput(format!("tol = {tol} must be positive")));
    }
    if max_iter == 0 {
        return Err(EngineError::InvalidInput("max_iter must be at least 1".into()));
    }
    Ok(())
}

fn check_nan(step: usize, p: &[f64]) -> Result<(), EngineError> {
    match p.iter().position(|x| x.is_nan()) {
        Some(component) => Err(EngineError::Evaluation {
            step,
            component,
            value: f64::NAN,
        }),
        None => Ok(()),
    }
}

/// `p(n+1) = I(p(n))` until `||p(n+1) - p(n)||_inf <= tol (1 + ||p(n)||_inf)`,
/// divergence (`||p||_inf > 1e15`) or `max_iter` steps.
pub fn run_sync<F: InterferenceFunction + ?Sized>(
    f: &F,
    p0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace, EngineError> {
    validate(f, p0, tol, max_iter)?;
    let mut powers = vec![p0.to_vec()];
    let mut stop = StopReason::MaxIter;
    for step in 0..max_iter {
        let p = powers.last().unwrap();
        let next = f.eval(p);
        check_nan(step, &next)?;
        let diverged = !(inf_norm(&next) <= DIVERGENCE_LIMIT);
        let calm = max_diff(&next, p) <= tol * (1.0 + inf_norm(p));
        powers.push(next);
        if diverged {
            stop = StopReason::Divergence;
            break;
        }
        if calm {
            stop = StopReason::Tolerance;
            break;
        }
    }
    Ok(IterationTrace {
        powers,
        stop,
        staleness: Vec::new(),
        schedule: None,
    })
}

/// High-accuracy fixed point from a sync run at tolerance `1e-13`.
pub fn reference_fixed_point<F: InterferenceFunction + ?Sized>(
    f: &F,
    p0: &[f64],
    max_iter: usize,
) -> Result<Vec<f64>, EngineError> {
    let trace = run_sync(f, p0, REFERENCE_TOL, max_iter)?;
    if !trace.converged() {
        return Err(EngineError::NoReference {
            stop: trace.stop,
            steps: trace.steps(),
        });
    }
    Ok(trace.final_power().to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AsyncMode {
    /// Receiver `i` sees `p_j(tau)` with `tau` uniform in `{t - D_i + 1, ..., t}`
    /// and its own power fresh. `D_i <= 1` means no delay.
    BoundedDelay { delays: Vec<usize> },
    /// Staleness uniform in `{0, ..., floor((t + 1)^growth)}`; every user is
    /// forced to update at least once per `window` steps.
    TotalAsync { window: usize, growth: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsyncSchedule {
    pub mode: AsyncMode,
    pub seed: u64,
    /// Probability that a user updates at a step (before forcing).
    pub update_prob: f64,
}

impl AsyncSchedule {
    /// Every user updates every step with delay bound `d`.
    pub fn bounded(k: usize, d: usize, seed: u64) -> Self {
        AsyncSchedule::per_user(vec![d; k], seed)
    }

    pub fn per_user(delays: Vec<usize>, seed: u64) -> Self {
        AsyncSchedule {
            mode: AsyncMode::BoundedDelay { delays },
            seed,
            update_prob: 1.0,
        }
    }

    /// Window `10 K`, staleness growth `sqrt(t)`, update probability 1/2.
    pub fn total(k: usize, seed: u64) -> Self {
        AsyncSchedule {
            mode: AsyncMode::TotalAsync {
                window: 10 * k,
                growth: 0.5,
            },
            seed,
            update_prob: 0.5,
        }
    }

    pub fn with_update_prob(mut self, prob: f64) -> Self {
        self.update_prob = prob;
        self
    }

    /// Worst-case delay bound `D` in bounded mode.
    pub fn max_delay(&self) -> Option<usize> {
        match &self.mode {
            AsyncMode::BoundedDelay { delays } => Some(delays.iter().copied().max().unwrap_or(0)),
            AsyncMode::TotalAsync { .. } => None,
        }
    }

    /// Consecutive calm steps required before stopping.
    fn calm_steps(&self) -> usize {
        match &self.mode {
            AsyncMode::BoundedDelay { .. } => self.max_delay().unwrap() + 1,
            AsyncMode::TotalAsync { window, .. } => window + 1,
        }
    }

    fn meta(&self) -> ScheduleMeta {
        let (mode, window) = match &self.mode {
            AsyncMode::BoundedDelay { .. } => ("bounded-delay", None),
            AsyncMode::TotalAsync { window, .. } => ("total-async", Some(*window)),
        };
        ScheduleMeta {
            seed: self.seed,
            mode: mode.into(),
            max_delay: self.max_delay(),
            window,
        }
    }

    fn validate(&self, k: usize) -> Result<(), EngineError> {
        if !(self.update_prob > 0.0 && self.update_prob <= 1.0) {
            return Err(EngineError::InvalidInput(format!(
                "update probability {} must lie in (0, 1]",
                self.update_prob
            )));
        }
        match &self.mode {
            AsyncMode::BoundedDelay { delays } if delays.len() != k => {
                Err(EngineError::InvalidInput(format!(
                    "{} delay bounds for {k} users",
                    delays.len()
                )))
            }
            AsyncMode::TotalAsync { window, growth } if *window == 0 || !(*growth >= 0.0) => {
                Err(EngineError::InvalidInput(format!(
                    "total-async needs window >= 1 and growth >= 0 (got {window}, {growth})"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Logical-time asynchronous iteration
/// `p_i(t+1) = I_i(p_1(tau_1^i(t)), ..., p_K(tau_K^i(t)))` for updating users,
/// `p_i(t+1) = p_i(t)` otherwise. Times before 0 read `p(0)`.
///
/// Stops after `calm` consecutive steps meeting the sync tolerance, during
/// which every user updated at least once; `calm = D + 1` (bounded) or
/// `W + 1` (total).
pub fn run_async<F: InterferenceFunction + ?Sized>(
    f: &F,
    p0: &[f64],
    schedule: &AsyncSchedule,
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace, EngineError> {
    validate(f, p0, tol, max_iter)?;
    let k = f.dim();
    schedule.validate(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut powers = vec![p0.to_vec()];
    let mut staleness = Vec::new();
    let mut last_update = vec![0usize; k];
    let mut view = vec![0.0; k];
    let needed = schedule.calm_steps();
    let mut calm = 0;
    let mut fresh = vec![false; k];
    let mut stop = StopReason::MaxIter;
    for t in 0..max_iter {
        let cur = &powers[t];
        let mut next = cur.clone();
        let mut worst_age = 0;
        for i in 0..k {
            let update = match &schedule.mode {
                AsyncMode::BoundedDelay { .. } => {
                    schedule.update_prob >= 1.0 || rng.gen::<f64>() < schedule.update_prob
                }
                AsyncMode::TotalAsync { window, .. } => {
                    let roll = schedule.update_prob >= 1.0 || rng.gen::<f64>() < schedule.update_prob;
                    roll || t + 1 - last_update[i] >= *window
                }
            };
            if !update {
                continue;
            }
            let max_age = match &schedule.mode {
                AsyncMode::BoundedDelay { delays } => delays[i].saturating_sub(1),
                AsyncMode::TotalAsync { growth, .. } => ((t + 1) as f64).powf(*growth).floor() as usize,
            };
            for j in 0..k {
                let age = if j == i || max_age == 0 {
                    0
                } else {
                    rng.gen_range(0..=max_age)
                };
                worst_age = worst_age.max(age);
                view[j] = if age > t { powers[0][j] } else { powers[t - age][j] };
            }
            next[i] = f.eval_component(i, &view);
            last_update[i] = t + 1;
        }
        check_nan(t, &next)?;
        let diverged = !(inf_norm(&next) <= DIVERGENCE_LIMIT);
        if max_diff(&next, cur) <= tol * (1.0 + inf_norm(cur)) {
            calm += 1;
            for i in 0..k {
                fresh[i] |= last_update[i] == t + 1;
            }
        } else {
            calm = 0;
            fresh.iter_mut().for_each(|x| *x = false);
        }
        powers.push(next);
        staleness.push(worst_age);
        if diverged {
            stop = StopReason::Divergence;
            break;
        }
        if calm >= needed && fresh.iter().all(|&x| x) {
            stop = StopReason::Tolerance;
            break;
        }
    }
    Ok(IterationTrace {
        powers,
        stop,
        staleness,
        schedule: Some(schedule.meta()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// `exp(slope)`, the estimated `lim e(n+1)/e(n)`.
    pub rate: f64,
    pub slope: f64,
    /// Half-open step window `[start, end)` used for the fit.
    pub window: (usize, usize),
    pub usable: usize,
    pub sublinear: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("rate inconclusive: only {usable} usable steps (need 10)")]
pub struct RateInconclusive {
    pub usable: usize,
}

/// Rate from the max-norm errors of `trace` against `p_star`.
pub fn empirical_rate(trace: &IterationTrace, p_star: &[f64]) -> Result<RateEstimate, RateInconclusive> {
    let errors: Vec<f64> = trace.powers.iter().map(|p| max_diff(p, p_star)).collect();
    rate_from_errors(&errors, inf_norm(p_star))
}

/// Least-squares slope of `ln e(n)` over the last half of the usable prefix,
/// where usable means `e(n) > 10 eps scale`.
pub fn rate_from_errors(errors: &[f64], scale: f64) -> Result<RateEstimate, RateInconclusive> {
    let floor = 10.0 * f64::EPSILON * scale;
    let usable = errors.iter().take_while(|&&e| e > floor && e.is_finite()).count();
    if usable < 10 {
        return Err(RateInconclusive { usable });
    }
    let start = usable / 2;
    let n = (usable - start) as f64;
    let xs = start..usable;
    let mean_x = xs.clone().map(|i| i as f64).sum::<f64>() / n;
    let mean_y = xs.clone().map(|i| errors[i].ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in xs {
        let dx = i as f64 - mean_x;
        sxy += dx * (errors[i].ln() - mean_y);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    let rate = slope.exp();
    Ok(RateEstimate {
        rate,
        slope,
        window: (start, usable),
        usable,
        sublinear: rate >= SUBLINEAR_RATE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeVerdict {
    pub passed: bool,
    pub first_violation: Option<usize>,
    /// `max_n e(n) / (c^n e(0))`.
    pub worst_ratio: f64,
}

/// `c^n e0`, computed in log space so it underflows gracefully.
pub fn envelope_bound(e0: f64, c: f64, n: usize) -> f64 {
    if c == 0.0 {
        return if n == 0 { e0 } else { 0.0 };
    }
    e0 * (n as f64 * c.ln()).exp()
}

/// `e(n) <= c^n e(0) (1 + 1e-9)` for every `n`.
pub fn envelope_check(errors: &[f64], c: f64) -> EnvelopeVerdict {
    envelope_check_with_floor(errors, c, 0.0)
}

/// As [`envelope_check`] with an additive floor for the resolution of `e(n)`.
pub fn envelope_check_with_floor(errors: &[f64], c: f64, floor: f64) -> EnvelopeVerdict {
    let e0 = errors.first().copied().unwrap_or(0.0);
    let mut first_violation = None;
    let mut worst_ratio = 0.0_f64;
    for (n, &e) in errors.iter().enumerate() {
        let bound = envelope_bound(e0, c, n);
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(e / bound);
        } else if e > 0.0 {
            worst_ratio = f64::INFINITY;
        }
        if first_violation.is_none() && !(e <= bound * (1.0 + ENVELOPE_SLACK) + floor) {
            first_violation = Some(n);
        }
    }
    EnvelopeVerdict {
        passed: first_violation.is_none(),
        first_violation,
        worst_ratio,
    }
}

/// `c^(1 / (D + 1))`.
pub fn async_modulus(c: f64, d: usize) -> f64 {
    c.powf(1.0 / (d as f64 + 1.0))
}

/// First `n` with `e(n) <= delta`.
pub fn measured_convergence_time(errors: &[f64], delta: f64) -> Option<usize> {
    errors.iter().position(|&e| e <= delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DescentVerdict {
    Pass { steps: usize },
    Fail {
        step: usize,
        component: usize,
        before: f64,
        after: f64,
    },
    Skipped { reason: String },
}

/// From `p'` with `I(p') <= p'`, a monotone `I` produces componentwise
/// nonincreasing iterates. Skipped when `I` is not declared monotone or
/// `p'` fails the existence test.
pub fn monotone_descent_check<F: InterferenceFunction + ?Sized>(
    f: &F,
    p_prime: &[f64],
    max_iter: usize,
) -> Result<DescentVerdict, EngineError> {
    if !f.class().is_monotone() {
        return Ok(DescentVerdict::Skipped {
            reason: format!("{} is not declared monotone", f.name()),
        });
    }
    match existence_test(f, p_prime) {
        Ok(true) => {}
        Ok(false) => {
            return Ok(DescentVerdict::Skipped {
                reason: "I(p') <= p' does not hold".into(),
            })
        }
        Err(e) => {
            return Ok(DescentVerdict::Skipped {
                reason: e.to_string(),
            })
        }
    }
    let trace = run_sync(f, p_prime, REFERENCE_TOL, max_iter)?;
    for (step, w) in trace.powers.windows(2).enumerate() {
        if let Some(component) = (0..w[0].len()).find(|&i| !leq(w[1][i], w[0][i])) {
            return Ok(DescentVerdict::Fail {
                step,
                component,
                before: w[0][component],
                after: w[1][component],
            });
        }
    }
    Ok(DescentVerdict::Pass {
        steps: trace.steps(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifun::{DeclaredClass, FnInterference};
    use crate::numkit::{solve_linear_fixed_point, Mat};
    use crate::zoo::{FixtureId, LinearIf, ScalarIf};

    fn linear() -> LinearIf {
        let m = Mat::from_rows(&[[0.0, 0.3, 0.2], [0.1, 0.0, 0.4], [0.25, 0.25, 0.0]]).unwrap();
        LinearIf::new(m, vec![1.0, 2.0, 0.5]).unwrap()
    }

    #[test]
    fn sync_linear_matches_solve() {
        let f = linear();
        let exact = solve_linear_fixed_point(f.matrix(), f.offset()).unwrap();
        let t = run_sync(&f, &[0.0; 3], 1e-13, 10_000).unwrap();
        assert!(t.converged());
        for (a, b) in t.final_power().iter().zip(&exact) {
            assert!((a - b).abs() <= 1e-11 * b);
        }
        let again = run_sync(&f, &exact, 1e-12, 10).unwrap();
        assert!(again.steps() <= 1);
    }

    #[test]
    fn example1_diverges() {
        let t = run_sync(&ScalarIf { id: FixtureId::Example1 }, &[1.0], 1e-10, 1000).unwrap();
        assert_eq!(t.stop, StopReason::Divergence);
    }

    #[test]
    fn nan_is_an_error() {
        let f = FnInterference::new("nan", 1, DeclaredClass::Unclassified, |_, _: &[f64]| f64::NAN);
        assert!(matches!(
            run_sync(&f, &[1.0], 1e-10, 5),
            Err(EngineError::Evaluation { step: 0, .. })
        ));
    }

    #[test]
    fn async_without_delay_is_sync() {
        let f = linear();
        let sync = run_sync(&f, &[5.0, 0.0, 1.0], 1e-12, 500).unwrap();
        for d in [0, 1] {
            let a = run_async(&f, &[5.0, 0.0, 1.0], &AsyncSchedule::bounded(3, d, 9), 1e-12, 500)
                .unwrap();
            // the async rule waits one extra calm step
            assert_eq!(a.powers[..sync.powers.len()], sync.powers[..]);
        }
    }

    #[test]
    fn async_bounded_and_total_reach_sync_fixed_point() {
        let f = linear();
        let p_star = reference_fixed_point(&f, &[0.0; 3], 10_000).unwrap();
        for sched in [
            AsyncSchedule::bounded(3, 5, 1),
            AsyncSchedule::per_user(vec![1, 3, 7], 2),
            AsyncSchedule::bounded(3, 4, 3).with_update_prob(0.3),
            AsyncSchedule::total(3, 4),
        ] {
            let t = run_async(&f, &[10.0, 10.0, 10.0], &sched, 1e-12, 200_000).unwrap();
            assert!(t.converged(), "{sched:?}");
            for (a, b) in t.final_power().iter().zip(&p_star) {
                assert!((a - b).abs() <= 1e-9 * b, "{sched:?} {a} {b} {}", t.steps());
            }
            if let Some(d) = sched.max_delay() {
                assert!(t.staleness.iter().all(|&s| s < d.max(1)));
            }
        }
    }

    #[test]
    fn async_is_deterministic() {
        let f = linear();
        let s = AsyncSchedule::bounded(3, 3, 77);
        let a = run_async(&f, &[1.0; 3], &s, 1e-12, 1000).unwrap();
        let b = run_async(&f, &[1.0; 3], &s, 1e-12, 1000).unwrap();
        assert_eq!(a, b);
        let c = run_async(&f, &[1.0; 3], &AsyncSchedule::bounded(3, 3, 78), 1e-12, 1000).unwrap();
        assert_ne!(a.powers, c.powers);
    }

    #[test]
    fn geometric_rate_is_exact() {
        let e: Vec<f64> = (0..60).map(|n| 0.5f64.powi(n)).collect();
        let r = rate_from_errors(&e, 1.0).unwrap();
        assert!((r.rate - 0.5).abs() < 1e-12);
        assert!(!r.sublinear);
        assert_eq!(rate_from_errors(&e[..9], 1.0), Err(RateInconclusive { usable: 9 }));
    }

    #[test]
    fn example2_is_sublinear() {
        let f = ScalarIf { id: FixtureId::Example2 };
        let t = run_sync(&f, &[1.0], 1e-300, 4000).unwrap();
        let r = empirical_rate(&t, &[2.0]).unwrap();
        assert!(r.rate >= 0.999 && r.sublinear, "{r:?}");
        let errs: Vec<f64> = t.powers.iter().map(|p| (p[0] - 2.0).abs()).collect();
        let v = envelope_check(&errs, 0.9);
        assert!(!v.passed && v.first_violation.is_some());
    }

    #[test]
    fn envelope_and_time() {
        let e: Vec<f64> = (0..20).map(|n| 0.5f64.powi(n)).collect();
        assert!(envelope_check(&e, 0.5).passed);
        assert_eq!(envelope_check(&e, 0.49).first_violation, Some(1));
        assert_eq!(measured_convergence_time(&e, 2f64.powi(-10)), Some(10));
        assert!((async_modulus(0.0625, 3) - 0.5).abs() < 1e-15);
        assert_eq!(envelope_bound(3.0, 0.0, 0), 3.0);
    }

    #[test]
    fn monotone_descent() {
        let f = linear();
        let p_star = reference_fixed_point(&f, &[0.0; 3], 10_000).unwrap();
        let twice: Vec<f64> = p_star.iter().map(|x| 2.0 * x).collect();
        assert!(matches!(
            monotone_descent_check(&f, &twice, 10_000).unwrap(),
            DescentVerdict::Pass { .. }
        ));
        assert!(matches!(
            monotone_descent_check(&f, &p_star, 10_000).unwrap(),
            DescentVerdict::Pass { .. }
        ));
        let g = FnInterference::new("dec", 1, DeclaredClass::Unclassified, |_, p: &[f64]| {
            1.0 / (1.0 + p[0])
        });
        assert!(matches!(
            monotone_descent_check(&g, &[1.0], 100).unwrap(),
            DescentVerdict::Skipped { .. }
        ));
        let nf = ScalarIf { id: FixtureId::NoFixedPoint };
        assert!(matches!(
            monotone_descent_check(&nf, &[1.0], 100).unwrap(),
            DescentVerdict::Skipped { .. }
        ));
    }
}
