//! Interference functions and sampling-based axiom falsifiers.
//!
//! An interference function maps the current transmit powers `p >= 0` to the
//! powers each user needs next. The checkers in this module look for
//! violations of the standard, contractive and two-sided axioms at seeded
//! random points. A passing verdict only means no violation was found; the
//! guarantees come from [`crate::certify`].

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkit::{weighted_max_norm_vec, NumError};

/// Relative slack for non-strict inequalities. Two sides that agree to about
/// a thousand ulps are treated as equal; strict axioms get no slack.
pub const ROUND_REL: f64 = 1e-13;

/// `lhs <= rhs` up to [`ROUND_REL`].
#[inline]
pub fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + ROUND_REL * lhs.abs().max(rhs.abs())
}

/// Class a function claims to belong to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum DeclaredClass {
    Standard,
    Contractive { c: f64, v: Vec<f64> },
    TwoSidedScalable,
    TwoSidedContractive { c: f64, v: Vec<f64> },
    Unclassified,
}

impl DeclaredClass {
    /// Standard and contractive functions are monotone by definition.
    pub fn is_monotone(&self) -> bool {
        matches!(self, DeclaredClass::Standard | DeclaredClass::Contractive { .. })
    }

    pub fn is_standard(&self) -> bool {
        matches!(self, DeclaredClass::Standard)
    }

    pub fn modulus(&self) -> Option<(f64, &[f64])> {
        match self {
            DeclaredClass::Contractive { c, v } | DeclaredClass::TwoSidedContractive { c, v } => {
                Some((*c, v))
            }
            _ => None,
        }
    }
}

/// A map `I: R_+^K -> R^K`, evaluated one component at a time so that
/// asynchronous updates can feed each user its own stale view of `p`.
pub trait InterferenceFunction: Send + Sync {
    fn dim(&self) -> usize;

    /// `I_i(p)`.
    fn eval_component(&self, i: usize, p: &[f64]) -> f64;

    fn eval(&self, p: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|i| self.eval_component(i, p)).collect()
    }

    fn class(&self) -> DeclaredClass {
        DeclaredClass::Unclassified
    }

    fn name(&self) -> String {
        "interference function".to_string()
    }
}

impl<T: InterferenceFunction + ?Sized> InterferenceFunction for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        (**self).eval_component(i, p)
    }
    fn eval(&self, p: &[f64]) -> Vec<f64> {
        (**self).eval(p)
    }
    fn class(&self) -> DeclaredClass {
        (**self).class()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: InterferenceFunction + ?Sized> InterferenceFunction for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        (**self).eval_component(i, p)
    }
    fn eval(&self, p: &[f64]) -> Vec<f64> {
        (**self).eval(p)
    }
    fn class(&self) -> DeclaredClass {
        (**self).class()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: InterferenceFunction + ?Sized> InterferenceFunction for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        (**self).eval_component(i, p)
    }
    fn eval(&self, p: &[f64]) -> Vec<f64> {
        (**self).eval(p)
    }
    fn class(&self) -> DeclaredClass {
        (**self).class()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

pub type DynInterference = Arc<dyn InterferenceFunction>;

/// Interference function backed by a closure `(i, p) -> I_i(p)`.
pub struct FnInterference<F> {
    dim: usize,
    class: DeclaredClass,
    name: String,
    f: F,
}

impl<F> FnInterference<F>
where
    F: Fn(usize, &[f64]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, dim: usize, class: DeclaredClass, f: F) -> Self {
        FnInterference {
            dim,
            class,
            name: name.into(),
            f,
        }
    }
}

impl<F> InterferenceFunction for FnInterference<F>
where
    F: Fn(usize, &[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        (self.f)(i, p)
    }
    fn class(&self) -> DeclaredClass {
        self.class.clone()
    }
    fn name(&self) -> String {
        self.name.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfunError {
    #[error("evaluator returned non-finite I_{component}(p) = {value} at p = {p:?}")]
    Evaluation {
        p: Vec<f64>,
        component: usize,
        value: f64,
    },
    #[error("log transform undefined: I_{component}(exp(s)) = {value} <= 0 at s = {s:?}")]
    Domain {
        s: Vec<f64>,
        component: usize,
        value: f64,
    },
    #[error("component {index} must be strictly positive, got {value}")]
    NonPositive { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

fn try_eval<F: InterferenceFunction + ?Sized>(f: &F, p: &[f64]) -> Result<Vec<f64>, IfunError> {
    let out = f.eval(p);
    if let Some((component, &value)) = out.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(IfunError::Evaluation {
            p: p.to_vec(),
            component,
            value,
        });
    }
    Ok(out)
}

/// Seeded source of test points for the axiom checkers.
///
/// Powers are drawn log-uniformly per component in `[p_lo, p_hi]`; scalings
/// `alpha - 1` and perturbations `eps` are drawn log-uniformly as well so that
/// both derivative-level and large-step behaviour get probed. `anchors` and
/// `anchor_scales` are tried (all combinations) before any random draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub seed: u64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub alpha_max: f64,
    pub eps_lo: f64,
    pub eps_hi: f64,
    #[serde(default)]
    pub anchors: Vec<Vec<f64>>,
    #[serde(default)]
    pub anchor_scales: Vec<f64>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            p_lo: 1e-6,
            p_hi: 1e6,
            alpha_max: 10.0,
            eps_lo: 1e-9,
            eps_hi: 100.0,
            anchors: Vec::new(),
            anchor_scales: Vec::new(),
        }
    }

    pub fn with_anchors(mut self, anchors: Vec<Vec<f64>>, scales: Vec<f64>) -> Self {
        self.anchors = anchors;
        self.anchor_scales = scales;
        self
    }

    pub fn with_power_range(mut self, lo: f64, hi: f64) -> Self {
        self.p_lo = lo;
        self.p_hi = hi;
        self
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        if lo >= hi {
            return lo;
        }
        (rng.gen_range(lo.ln()..=hi.ln())).exp()
    }

    pub fn power(&self, rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
        (0..k)
            .map(|_| Self::log_uniform(rng, self.p_lo, self.p_hi))
            .collect()
    }

    pub fn alpha(&self, rng: &mut ChaCha8Rng) -> f64 {
        1.0 + Self::log_uniform(rng, 1e-6, (self.alpha_max - 1.0).max(1e-6))
    }

    pub fn eps(&self, rng: &mut ChaCha8Rng) -> f64 {
        Self::log_uniform(rng, self.eps_lo, self.eps_hi)
    }

    /// Exponent in `[-1, 1]`, hitting both endpoints with probability 1/4 each.
    fn unit_offset(rng: &mut ChaCha8Rng) -> f64 {
        match rng.gen_range(0..4) {
            0 => -1.0,
            1 => 1.0,
            _ => rng.gen_range(-1.0..=1.0),
        }
    }

    fn anchor_pairs(&self, k: usize) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::new();
        for a in self.anchors.iter().filter(|a| a.len() == k) {
            for &s in &self.anchor_scales {
                out.push((a.clone(), s));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Positivity,
    Monotonicity,
    Scalability,
    Contractivity,
    TwoSidedScalability,
    TwoSidedContractivity,
    /// Strict decrease of `d_c` between distinct points.
    DcParaContraction,
    /// Strict decrease of the weighted max-norm distance between distinct points.
    NormParaContraction,
    /// `||I(p) - I(p')||_v <= c ||p - p'||_v`.
    Lipschitz,
}

impl Axiom {
    pub fn label(&self) -> &'static str {
        match self {
            Axiom::Positivity => "positivity",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Scalability => "scalability",
            Axiom::Contractivity => "contractivity",
            Axiom::TwoSidedScalability => "two-sided scalability",
            Axiom::TwoSidedContractivity => "two-sided contractivity",
            Axiom::DcParaContraction => "d_c para-contraction",
            Axiom::NormParaContraction => "norm para-contraction",
            Axiom::Lipschitz => "weighted Lipschitz",
        }
    }
}

/// A concrete violation, re-checkable by direct evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Positivity {
        p: Vec<f64>,
        component: usize,
    },
    /// `p_high >= p_low` but `I_i(p_high) < I_i(p_low)`.
    Monotonicity {
        p_low: Vec<f64>,
        p_high: Vec<f64>,
        component: usize,
    },
    Scalability {
        p: Vec<f64>,
        alpha: f64,
        component: usize,
    },
    Contractivity {
        p: Vec<f64>,
        eps: f64,
        c: f64,
        v: Vec<f64>,
        component: usize,
    },
    TwoSidedScalability {
        p: Vec<f64>,
        p_prime: Vec<f64>,
        alpha: f64,
        component: usize,
    },
    TwoSidedContractivity {
        p: Vec<f64>,
        p_prime: Vec<f64>,
        eps: f64,
        c: f64,
        v: Vec<f64>,
        component: usize,
    },
    DcParaContraction {
        p: Vec<f64>,
        p_prime: Vec<f64>,
    },
    NormParaContraction {
        p: Vec<f64>,
        p_prime: Vec<f64>,
        v: Vec<f64>,
    },
    Lipschitz {
        p: Vec<f64>,
        p_prime: Vec<f64>,
        c: f64,
        v: Vec<f64>,
    },
}

fn scaled(p: &[f64], s: f64) -> Vec<f64> {
    p.iter().map(|x| s * x).collect()
}

fn shifted(p: &[f64], eps: f64, v: &[f64]) -> Vec<f64> {
    p.iter().zip(v).map(|(x, vi)| x + eps * vi).collect()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl Witness {
    /// Re-evaluates the violation with no sampler state. Returns `true` if the
    /// point still violates its axiom.
    pub fn recheck<F: InterferenceFunction + ?Sized>(&self, f: &F) -> bool {
        match self {
            Witness::Positivity { p, component } => !(f.eval_component(*component, p) > 0.0),
            Witness::Monotonicity {
                p_low,
                p_high,
                component,
            } => {
                let i = *component;
                !leq(f.eval_component(i, p_low), f.eval_component(i, p_high))
            }
            Witness::Scalability { p, alpha, component } => {
                let i = *component;
                let lhs = alpha * f.eval_component(i, p);
                let rhs = f.eval_component(i, &scaled(p, *alpha));
                !(lhs > rhs)
            }
            Witness::Contractivity {
                p,
                eps,
                c,
                v,
                component,
            } => {
                let i = *component;
                let lhs = f.eval_component(i, &shifted(p, *eps, v));
                let rhs = f.eval_component(i, p) + c * eps * v[i];
                !leq(lhs, rhs)
            }
            Witness::TwoSidedScalability {
                p,
                p_prime,
                alpha,
                component,
            } => {
                let i = *component;
                let ip = f.eval_component(i, p);
                let iq = f.eval_component(i, p_prime);
                !(ip / alpha < iq && iq < alpha * ip)
            }
            Witness::TwoSidedContractivity {
                p,
                p_prime,
                eps,
                c,
                v,
                component,
            } => {
                let i = *component;
                let ip = f.eval_component(i, p);
                let iq = f.eval_component(i, p_prime);
                let band = c * eps * v[i];
                !(leq(iq - band, ip) && leq(ip, iq + band))
            }
            Witness::DcParaContraction { p, p_prime } => {
                match (dc_metric(&f.eval(p), &f.eval(p_prime)), dc_metric(p, p_prime)) {
                    (Ok(out), Ok(inp)) => !(out < inp),
                    _ => true,
                }
            }
            Witness::NormParaContraction { p, p_prime, v } => {
                let out = weighted_max_norm_vec(&diff(&f.eval(p), &f.eval(p_prime)), v);
                let inp = weighted_max_norm_vec(&diff(p, p_prime), v);
                match (out, inp) {
                    (Ok(o), Ok(i)) => !(o < i),
                    _ => true,
                }
            }
            Witness::Lipschitz { p, p_prime, c, v } => {
                let out = weighted_max_norm_vec(&diff(&f.eval(p), &f.eval(p_prime)), v);
                let inp = weighted_max_norm_vec(&diff(p, p_prime), v);
                match (out, inp) {
                    (Ok(o), Ok(i)) => !leq(o, c * i),
                    _ => true,
                }
            }
        }
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub passed: bool,
    pub witness: Option<Witness>,
    /// Points evaluated, anchors included.
    pub samples: usize,
    pub seed: u64,
}

impl AxiomVerdict {
    fn pass(axiom: Axiom, samples: usize, seed: u64) -> Self {
        AxiomVerdict {
            axiom,
            passed: true,
            witness: None,
            samples,
            seed,
        }
    }

    fn fail(axiom: Axiom, witness: Witness, samples: usize, seed: u64) -> Self {
        AxiomVerdict {
            axiom,
            passed: false,
            witness: Some(witness),
            samples,
            seed,
        }
    }
}

fn check_weights(v: &[f64], k: usize) -> Result<(), IfunError> {
    if v.len() != k {
        return Err(IfunError::DimensionMismatch {
            expected: k,
            actual: v.len(),
        });
    }
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(IfunError::NonPositive { index, value });
    }
    Ok(())
}

fn check_modulus(c: f64) -> Result<(), IfunError> {
    if (0.0..1.0).contains(&c) {
        Ok(())
    } else {
        Err(IfunError::InvalidParameter(format!(
            "modulus c = {c} must lie in [0, 1)"
        )))
    }
}

fn check_samples(n: usize) -> Result<(), IfunError> {
    if n == 0 {
        Err(IfunError::InvalidParameter("n_samples must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// `I(p) > 0` at `p = 0`, at the anchors and at `n_samples` random points.
pub fn check_positivity<F: InterferenceFunction + ?Sized>(
    f: &F,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    let k = f.dim();
    let mut rng = sampler.rng(1);
    let mut points = vec![vec![0.0; k]];
    points.extend(sampler.anchors.iter().filter(|a| a.len() == k).cloned());
    let fixed = points.len();
    let random = (0..n_samples).map(|_| sampler.power(&mut rng, k));
    for (idx, p) in points.into_iter().chain(random).enumerate() {
        let out = try_eval(f, &p)?;
        if let Some(component) = out.iter().position(|&x| !(x > 0.0)) {
            return Ok(AxiomVerdict::fail(
                Axiom::Positivity,
                Witness::Positivity { p, component },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(
        Axiom::Positivity,
        fixed + n_samples,
        sampler.seed,
    ))
}

/// `p >= p'` implies `I(p) >= I(p')`, on ordered pairs.
pub fn check_monotonicity<F: InterferenceFunction + ?Sized>(
    f: &F,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    let k = f.dim();
    let mut rng = sampler.rng(2);
    let anchors = sampler.anchor_pairs(k);
    let total = anchors.len() + n_samples;
    for idx in 0..total {
        let (p_low, p_high) = if idx < anchors.len() {
            let (a, s) = &anchors[idx];
            (a.clone(), scaled(a, 1.0 + s.abs()))
        } else {
            let low = sampler.power(&mut rng, k);
            let high = low
                .iter()
                .map(|&x| {
                    if rng.gen_bool(0.5) {
                        x
                    } else {
                        x * (1.0 + Sampler::log_uniform(&mut rng, 1e-6, 1e3))
                    }
                })
                .collect();
            (low, high)
        };
        let lo = try_eval(f, &p_low)?;
        let hi = try_eval(f, &p_high)?;
        if let Some(component) = (0..k).find(|&i| !leq(lo[i], hi[i])) {
            return Ok(AxiomVerdict::fail(
                Axiom::Monotonicity,
                Witness::Monotonicity {
                    p_low,
                    p_high,
                    component,
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(Axiom::Monotonicity, total, sampler.seed))
}

/// `alpha I(p) > I(alpha p)` for `alpha > 1`; ties count as violations.
pub fn check_scalability<F: InterferenceFunction + ?Sized>(
    f: &F,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    let k = f.dim();
    let mut rng = sampler.rng(3);
    let anchors: Vec<_> = sampler
        .anchor_pairs(k)
        .into_iter()
        .filter(|(_, s)| *s > 1.0)
        .collect();
    let total = anchors.len() + n_samples;
    for idx in 0..total {
        let (p, alpha) = if idx < anchors.len() {
            anchors[idx].clone()
        } else {
            let p = sampler.power(&mut rng, k);
            (p, sampler.alpha(&mut rng))
        };
        let base = try_eval(f, &p)?;
        let big = try_eval(f, &scaled(&p, alpha))?;
        if let Some(component) = (0..k).find(|&i| !(alpha * base[i] > big[i])) {
            return Ok(AxiomVerdict::fail(
                Axiom::Scalability,
                Witness::Scalability {
                    p,
                    alpha,
                    component,
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(Axiom::Scalability, total, sampler.seed))
}

/// `I(p + eps v) <= I(p) + c eps v` for `eps > 0`.
pub fn check_contractivity<F: InterferenceFunction + ?Sized>(
    f: &F,
    v: &[f64],
    c: f64,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    let k = f.dim();
    check_weights(v, k)?;
    check_modulus(c)?;
    let mut rng = sampler.rng(4);
    let anchors: Vec<_> = sampler
        .anchor_pairs(k)
        .into_iter()
        .filter(|(_, s)| *s > 0.0)
        .collect();
    let total = anchors.len() + n_samples;
    for idx in 0..total {
        let (p, eps) = if idx < anchors.len() {
            anchors[idx].clone()
        } else {
            let p = sampler.power(&mut rng, k);
            (p, sampler.eps(&mut rng))
        };
        let base = try_eval(f, &p)?;
        let moved = try_eval(f, &shifted(&p, eps, v))?;
        if let Some(component) = (0..k).find(|&i| !leq(moved[i], base[i] + c * eps * v[i])) {
            return Ok(AxiomVerdict::fail(
                Axiom::Contractivity,
                Witness::Contractivity {
                    p,
                    eps,
                    c,
                    v: v.to_vec(),
                    component,
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(Axiom::Contractivity, total, sampler.seed))
}

/// `p/alpha <= p' <= alpha p` implies `I(p)/alpha < I(p') < alpha I(p)`.
pub fn check_two_sided_scalability<F: InterferenceFunction + ?Sized>(
    f: &F,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    let k = f.dim();
    let mut rng = sampler.rng(5);
    for idx in 0..n_samples {
        let p = sampler.power(&mut rng, k);
        let alpha = sampler.alpha(&mut rng);
        let p_prime: Vec<f64> = p
            .iter()
            .map(|&x| {
                let u = Sampler::unit_offset(&mut rng);
                if u == 1.0 {
                    x * alpha
                } else if u == -1.0 {
                    x / alpha
                } else {
                    x * alpha.powf(u)
                }
            })
            .collect();
        let ip = try_eval(f, &p)?;
        let iq = try_eval(f, &p_prime)?;
        if let Some(component) =
            (0..k).find(|&i| !(ip[i] / alpha < iq[i] && iq[i] < alpha * ip[i]))
        {
            return Ok(AxiomVerdict::fail(
                Axiom::TwoSidedScalability,
                Witness::TwoSidedScalability {
                    p,
                    p_prime,
                    alpha,
                    component,
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(
        Axiom::TwoSidedScalability,
        n_samples,
        sampler.seed,
    ))
}

/// `p' - eps v <= p <= p' + eps v` implies `|I(p) - I(p')| <= c eps v`.
pub fn check_two_sided_contractivity<F: InterferenceFunction + ?Sized>(
    f: &F,
    v: &[f64],
    c: f64,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    let k = f.dim();
    check_weights(v, k)?;
    check_modulus(c)?;
    let mut rng = sampler.rng(6);
    for idx in 0..n_samples {
        let p_prime = sampler.power(&mut rng, k);
        let eps = sampler.eps(&mut rng);
        let p: Vec<f64> = p_prime
            .iter()
            .zip(v)
            .map(|(&x, &vi)| (x + eps * vi * Sampler::unit_offset(&mut rng)).max(0.0))
            .collect();
        let ip = try_eval(f, &p)?;
        let iq = try_eval(f, &p_prime)?;
        if let Some(component) = (0..k).find(|&i| {
            let band = c * eps * v[i];
            !(leq(iq[i] - band, ip[i]) && leq(ip[i], iq[i] + band))
        }) {
            return Ok(AxiomVerdict::fail(
                Axiom::TwoSidedContractivity,
                Witness::TwoSidedContractivity {
                    p,
                    p_prime,
                    eps,
                    c,
                    v: v.to_vec(),
                    component,
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(
        Axiom::TwoSidedContractivity,
        n_samples,
        sampler.seed,
    ))
}

fn random_pairs(sampler: &Sampler, stream: u64, k: usize, n: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = sampler.rng(stream);
    (0..n)
        .map(|_| (sampler.power(&mut rng, k), sampler.power(&mut rng, k)))
        .filter(|(p, q)| p != q)
        .collect()
}

/// `d_c(I(p), I(p')) < d_c(p, p')` for distinct positive pairs.
pub fn check_dc_paracontraction<F: InterferenceFunction + ?Sized>(
    f: &F,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    let pairs = random_pairs(sampler, 7, f.dim(), n_samples);
    for (idx, (p, p_prime)) in pairs.iter().enumerate() {
        let ip = try_eval(f, p)?;
        let iq = try_eval(f, p_prime)?;
        let out = dc_metric(&ip, &iq)?;
        let inp = dc_metric(p, p_prime)?;
        if !(out < inp) {
            return Ok(AxiomVerdict::fail(
                Axiom::DcParaContraction,
                Witness::DcParaContraction {
                    p: p.clone(),
                    p_prime: p_prime.clone(),
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(
        Axiom::DcParaContraction,
        pairs.len(),
        sampler.seed,
    ))
}

/// `||I(p) - I(p')||_v < ||p - p'||_v` for distinct pairs.
pub fn check_norm_paracontraction<F: InterferenceFunction + ?Sized>(
    f: &F,
    v: &[f64],
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    check_weights(v, f.dim())?;
    let pairs = random_pairs(sampler, 8, f.dim(), n_samples);
    for (idx, (p, p_prime)) in pairs.iter().enumerate() {
        let out = weighted_max_norm_vec(&diff(&try_eval(f, p)?, &try_eval(f, p_prime)?), v)?;
        let inp = weighted_max_norm_vec(&diff(p, p_prime), v)?;
        if !(out < inp) {
            return Ok(AxiomVerdict::fail(
                Axiom::NormParaContraction,
                Witness::NormParaContraction {
                    p: p.clone(),
                    p_prime: p_prime.clone(),
                    v: v.to_vec(),
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(
        Axiom::NormParaContraction,
        pairs.len(),
        sampler.seed,
    ))
}

/// `||I(p) - I(p')||_v <= c ||p - p'||_v` on random pairs.
pub fn check_lipschitz<F: InterferenceFunction + ?Sized>(
    f: &F,
    v: &[f64],
    c: f64,
    sampler: &Sampler,
    n_samples: usize,
) -> Result<AxiomVerdict, IfunError> {
    check_samples(n_samples)?;
    check_weights(v, f.dim())?;
    let pairs = random_pairs(sampler, 9, f.dim(), n_samples);
    for (idx, (p, p_prime)) in pairs.iter().enumerate() {
        let out = weighted_max_norm_vec(&diff(&try_eval(f, p)?, &try_eval(f, p_prime)?), v)?;
        let inp = weighted_max_norm_vec(&diff(p, p_prime), v)?;
        if !leq(out, c * inp) {
            return Ok(AxiomVerdict::fail(
                Axiom::Lipschitz,
                Witness::Lipschitz {
                    p: p.clone(),
                    p_prime: p_prime.clone(),
                    c,
                    v: v.to_vec(),
                },
                idx + 1,
                sampler.seed,
            ));
        }
    }
    Ok(AxiomVerdict::pass(Axiom::Lipschitz, pairs.len(), sampler.seed))
}

/// `I` in logarithmic coordinates: `s -> ln I(exp(s))`.
pub struct LogTransformed<F> {
    inner: F,
}

/// Wraps `f` so that it acts on log-powers `s = ln p`.
pub fn log_transform<F: InterferenceFunction>(f: F) -> LogTransformed<F> {
    LogTransformed { inner: f }
}

impl<F: InterferenceFunction> LogTransformed<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }

    /// Like [`InterferenceFunction::eval`] but reports where `I` stops being positive.
    pub fn try_eval(&self, s: &[f64]) -> Result<Vec<f64>, IfunError> {
        let p: Vec<f64> = s.iter().map(|x| x.exp()).collect();
        let out = self.inner.eval(&p);
        if let Some((component, &value)) = out.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(IfunError::Domain {
                s: s.to_vec(),
                component,
                value,
            });
        }
        Ok(out.into_iter().map(f64::ln).collect())
    }
}

impl<F: InterferenceFunction> InterferenceFunction for LogTransformed<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// NaN where `I_i(exp(s)) <= 0`; use [`LogTransformed::try_eval`] for a typed error.
    fn eval_component(&self, i: usize, s: &[f64]) -> f64 {
        let p: Vec<f64> = s.iter().map(|x| x.exp()).collect();
        let y = self.inner.eval_component(i, &p);
        if y > 0.0 {
            y.ln()
        } else {
            f64::NAN
        }
    }

    fn name(&self) -> String {
        format!("log({})", self.inner.name())
    }
}

/// `d_c(p, p') = max_i |ln(p_i / p'_i)|` for strictly positive vectors.
pub fn dc_metric(p: &[f64], p_prime: &[f64]) -> Result<f64, IfunError> {
    if p.len() != p_prime.len() {
        return Err(IfunError::DimensionMismatch {
            expected: p.len(),
            actual: p_prime.len(),
        });
    }
    let mut d = 0.0_f64;
    for (index, (&a, &b)) in p.iter().zip(p_prime).enumerate() {
        if !(a > 0.0) {
            return Err(IfunError::NonPositive { index, value: a });
        }
        if !(b > 0.0) {
            return Err(IfunError::NonPositive { index, value: b });
        }
        d = d.max((a.ln() - b.ln()).abs());
    }
    Ok(d)
}

/// `I(p') <= p'` componentwise, up to [`ROUND_REL`] so that a computed fixed
/// point passes. For a standard `I` this guarantees a fixed point below `p'`.
pub fn existence_test<F: InterferenceFunction + ?Sized>(
    f: &F,
    p_prime: &[f64],
) -> Result<bool, IfunError> {
    if p_prime.len() != f.dim() {
        return Err(IfunError::DimensionMismatch {
            expected: f.dim(),
            actual: p_prime.len(),
        });
    }
    if let Some((index, &value)) = p_prime.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(IfunError::NonPositive { index, value });
    }
    let out = try_eval(f, p_prime)?;
    Ok(out.iter().zip(p_prime).all(|(a, b)| leq(*a, *b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(
        name: &str,
        class: DeclaredClass,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> FnInterference<impl Fn(usize, &[f64]) -> f64 + Send + Sync> {
        FnInterference::new(name, 1, class, move |_, p: &[f64]| g(p[0]))
    }

    fn example3(p: f64) -> f64 {
        if p <= 0.25 {
            p * p + 0.01
        } else {
            0.5 * p - 1.0 / 16.0 + 0.01
        }
    }

    #[test]
    fn positivity() {
        let affine = FnInterference::new("2p+1", 3, DeclaredClass::Standard, |i, p: &[f64]| {
            2.0 * p[i] + 1.0
        });
        assert!(check_positivity(&affine, &Sampler::new(1), 200).unwrap().passed);
        let ident = FnInterference::new("p", 2, DeclaredClass::Unclassified, |i, p: &[f64]| p[i]);
        let v = check_positivity(&ident, &Sampler::new(1), 10).unwrap();
        assert!(!v.passed);
        let w = v.witness.unwrap();
        assert_eq!(w, Witness::Positivity { p: vec![0.0, 0.0], component: 0 });
        assert!(w.recheck(&ident));
    }

    #[test]
    fn monotonicity() {
        let lin = FnInterference::new("lin", 2, DeclaredClass::Standard, |i, p: &[f64]| {
            0.5 * p[1 - i] + 1.0
        });
        assert!(check_monotonicity(&lin, &Sampler::new(3), 500).unwrap().passed);
        let dec = scalar("1/(1+p)", DeclaredClass::Unclassified, |p| 1.0 / (1.0 + p));
        let v = check_monotonicity(&dec, &Sampler::new(3), 500).unwrap();
        assert!(!v.passed);
        assert!(v.witness.unwrap().recheck(&dec));
    }

    #[test]
    fn scalability() {
        let f = scalar("ex3", DeclaredClass::Unclassified, example3);
        let sampler = Sampler::new(0).with_anchors(vec![vec![0.125]], vec![2.0]);
        let v = check_scalability(&f, &sampler, 100).unwrap();
        assert!(!v.passed);
        assert_eq!(
            v.witness,
            Some(Witness::Scalability { p: vec![0.125], alpha: 2.0, component: 0 })
        );
        assert_eq!(example3(0.125), 1.0 / 64.0 + 0.01);

        let lin = FnInterference::new("lin", 2, DeclaredClass::Standard, |i, p: &[f64]| {
            0.5 * p[1 - i] + 1.0
        });
        assert!(check_scalability(&lin, &Sampler::new(9), 1000).unwrap().passed);

        let homog = scalar("2p", DeclaredClass::Unclassified, |p| 2.0 * p);
        let v = check_scalability(&homog, &Sampler::new(9), 10).unwrap();
        assert!(!v.passed);
        assert!(v.witness.unwrap().recheck(&homog));
    }

    #[test]
    fn contractivity() {
        let f = scalar("ex3", DeclaredClass::Unclassified, example3);
        assert!(check_contractivity(&f, &[1.0], 0.5, &Sampler::new(5), 5000).unwrap().passed);

        let affine = scalar("2p+1", DeclaredClass::Standard, |p| 2.0 * p + 1.0);
        for c in [0.0, 0.5, 0.99] {
            for v in [0.1, 1.0, 7.0] {
                let verdict = check_contractivity(&affine, &[v], c, &Sampler::new(5), 50).unwrap();
                assert!(!verdict.passed);
            }
        }

        let ex2 = scalar("ex2", DeclaredClass::Standard, |p| 4.0 / (1.0 + (-(p - 2.0)).exp()));
        let v = check_contractivity(&ex2, &[1.0], 0.99, &Sampler::new(11), 20_000).unwrap();
        assert!(!v.passed, "{v:?}");
        match v.witness.clone().unwrap() {
            Witness::Contractivity { p, eps, .. } => {
                assert!((p[0] - 2.0).abs() < 0.5, "p = {p:?}");
                assert!(eps < 1.0);
            }
            w => panic!("{w:?}"),
        }
        assert!(v.witness.unwrap().recheck(&ex2));
    }

    #[test]
    fn contractivity_rejects_bad_parameters() {
        let f = scalar("p", DeclaredClass::Unclassified, |p| p);
        assert!(check_contractivity(&f, &[1.0], 1.0, &Sampler::new(0), 1).is_err());
        assert!(check_contractivity(&f, &[0.0], 0.5, &Sampler::new(0), 1).is_err());
        assert!(check_contractivity(&f, &[1.0, 1.0], 0.5, &Sampler::new(0), 1).is_err());
        assert!(check_positivity(&f, &Sampler::new(0), 0).is_err());
    }

    #[test]
    fn two_sided() {
        let homog = scalar("2p", DeclaredClass::Unclassified, |p| 2.0 * p);
        let v = check_two_sided_scalability(&homog, &Sampler::new(2), 100).unwrap();
        assert!(!v.passed);
        assert!(v.witness.unwrap().recheck(&homog));

        let affine = scalar("2p+1", DeclaredClass::Standard, |p| 2.0 * p + 1.0);
        assert!(check_two_sided_scalability(&affine, &Sampler::new(2), 1000).unwrap().passed);
        let v = check_two_sided_contractivity(&affine, &[1.0], 0.9, &Sampler::new(2), 100).unwrap();
        assert!(!v.passed);

        let lin = FnInterference::new("lin", 2, DeclaredClass::Standard, |i, p: &[f64]| {
            0.5 * p[1 - i] + 1.0
        });
        let verdict =
            check_two_sided_contractivity(&lin, &[1.0, 1.0], 0.5, &Sampler::new(2), 2000).unwrap();
        assert!(verdict.passed, "{verdict:?}");
    }

    #[test]
    fn log_transform_examples() {
        let konst = FnInterference::new("N", 2, DeclaredClass::Standard, |i, _: &[f64]| {
            [3.0, 5.0][i]
        });
        let t = log_transform(konst);
        let out = t.try_eval(&[-4.0, 10.0]).unwrap();
        assert_eq!(out, vec![3.0f64.ln(), 5.0f64.ln()]);

        let gamma = 7.0;
        let inv = scalar("gamma/p", DeclaredClass::Unclassified, move |p| gamma / p);
        let t = log_transform(inv);
        for s in [-3.0, 0.0, 0.7, 5.0] {
            let got = t.eval_component(0, &[s]);
            assert!((got - (gamma.ln() - s)).abs() < 1e-12);
        }

        let neg = scalar("1-p", DeclaredClass::Unclassified, |p| 1.0 - p);
        match log_transform(neg).try_eval(&[1.0]) {
            Err(IfunError::Domain { component: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dc_metric_examples() {
        assert_eq!(dc_metric(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let d = dc_metric(&[std::f64::consts::E, 1.0], &[1.0, 1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(matches!(
            dc_metric(&[0.0, 1.0], &[1.0, 1.0]),
            Err(IfunError::NonPositive { index: 0, .. })
        ));
        assert!(dc_metric(&[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn existence_examples() {
        let no_fp = scalar("p+exp(-p)", DeclaredClass::Standard, |p| p + (-p).exp());
        for p in [1e-3, 0.5, 1.0, 10.0, 20.0] {
            assert!(!existence_test(&no_fp, &[p]).unwrap());
        }
        let lin = FnInterference::new("lin", 2, DeclaredClass::Standard, |i, p: &[f64]| {
            0.5 * p[1 - i] + 1.0
        });
        // fixed point (2, 2)
        assert!(existence_test(&lin, &[2.0, 2.0]).unwrap());
        assert!(existence_test(&lin, &[4.0, 4.0]).unwrap());
        assert!(!existence_test(&lin, &[1.0, 1.0]).unwrap());
        assert!(existence_test(&lin, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn verdicts_are_deterministic() {
        let dec = scalar("1/(1+p)", DeclaredClass::Unclassified, |p| 1.0 / (1.0 + p));
        let a = check_monotonicity(&dec, &Sampler::new(77), 100).unwrap();
        let b = check_monotonicity(&dec, &Sampler::new(77), 100).unwrap();
        assert_eq!(a, b);
    }
}
