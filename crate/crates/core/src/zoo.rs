//! Concrete power-control laws.
//!
//! All families are built from a [`NetworkScenario`]: `K` users, `R` bases,
//! a gain matrix `G[r][j]` (base `r`, user `j`), per-base noise and per-user
//! SINR targets, all on a linear scale.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ifun::{DeclaredClass, InterferenceFunction};
use crate::numkit::{dot, Mat, NumError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("user {user}: zero own gain on base {base}")]
    ZeroOwnGain { user: usize, base: usize },
    #[error("user {user}: a * gamma = {product} must exceed 1 for the sigmoid midpoint to exist")]
    UbpcDomain { user: usize, product: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// `10^(dB / 10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn positive_finite(name: &str, xs: &[f64]) -> Result<(), ZooError> {
    match xs.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        Some(i) => Err(ZooError::InvalidScenario(format!(
            "{name}[{i}] = {} must be positive and finite",
            xs[i]
        ))),
        None => Ok(()),
    }
}

/// Static network: gains, noise, targets and an optional base assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    gains: Mat,
    noise: Vec<f64>,
    targets: Vec<f64>,
    assignment: Option<Vec<usize>>,
}

impl NetworkScenario {
    /// `gains` is `R x K`; `assignment[i]` is the 0-based base serving user `i`.
    pub fn new(
        gains: Mat,
        noise: Vec<f64>,
        targets: Vec<f64>,
        assignment: Option<Vec<usize>>,
    ) -> Result<Self, ZooError> {
        let (r, k) = (gains.rows(), gains.cols());
        if k == 0 || r == 0 {
            return Err(ZooError::InvalidScenario("empty gain matrix".into()));
        }
        if noise.len() != r {
            return Err(ZooError::InvalidScenario(format!(
                "noise has {} entries for {r} bases",
                noise.len()
            )));
        }
        if targets.len() != k {
            return Err(ZooError::InvalidScenario(format!(
                "targets has {} entries for {k} users",
                targets.len()
            )));
        }
        for b in 0..r {
            positive_finite(&format!("gains[{b}]"), gains.row(b))?;
        }
        positive_finite("noise", &noise)?;
        positive_finite("targets", &targets)?;
        if let Some(a) = &assignment {
            if a.len() != k {
                return Err(ZooError::InvalidScenario(format!(
                    "assignment has {} entries for {k} users",
                    a.len()
                )));
            }
            if let Some(i) = a.iter().position(|&x| x >= r) {
                return Err(ZooError::InvalidScenario(format!(
                    "assignment[{i}] = {} is not a base index below {r}",
                    a[i]
                )));
            }
        }
        Ok(NetworkScenario {
            gains,
            noise,
            targets,
            assignment,
        })
    }

    pub fn users(&self) -> usize {
        self.gains.cols()
    }

    pub fn bases(&self) -> usize {
        self.gains.rows()
    }

    pub fn gains(&self) -> &Mat {
        &self.gains
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn assignment(&self) -> Option<&[usize]> {
        self.assignment.as_deref()
    }

    /// Explicit assignment, or strongest server `argmax_r G[r][i]` per user.
    /// The flag is `true` when the default was used.
    pub fn effective_assignment(&self) -> (Vec<usize>, bool) {
        match &self.assignment {
            Some(a) => (a.clone(), false),
            None => {
                let a = (0..self.users())
                    .map(|i| {
                        (0..self.bases())
                            .max_by(|&x, &y| self.gains[(x, i)].total_cmp(&self.gains[(y, i)]))
                            .unwrap()
                    })
                    .collect();
                (a, true)
            }
        }
    }

    pub fn with_targets(&self, targets: Vec<f64>) -> Result<Self, ZooError> {
        NetworkScenario::new(
            self.gains.clone(),
            self.noise.clone(),
            targets,
            self.assignment.clone(),
        )
    }
}

/// Per-base normalised gain matrices `M_r` and offsets `N^(r)`.
///
/// `M_r[i][j] = gamma_i G[r][j] / G[r][i]` off the diagonal, zero on it;
/// `N^(r)_i = gamma_i eta_r / G[r][i]`. Row `i` of `M_r` is user `i`'s
/// interference if it were served by base `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrixSet {
    pub per_base: Vec<Mat>,
    pub offsets: Vec<Vec<f64>>,
}

impl NormalizedMatrixSet {
    pub fn users(&self) -> usize {
        self.per_base[0].rows()
    }

    pub fn bases(&self) -> usize {
        self.per_base.len()
    }

    /// Matrix and offset under a per-user assignment: row `i` comes from base `assignment[i]`.
    pub fn assigned(&self, assignment: &[usize]) -> (Mat, Vec<f64>) {
        let k = self.users();
        let m = Mat::from_fn(k, k, |i, j| self.per_base[assignment[i]][(i, j)]);
        let n = (0..k).map(|i| self.offsets[assignment[i]][i]).collect();
        (m, n)
    }

    /// `sum_j M_r[i][j] p_j + N^(r)_i`.
    #[inline]
    fn affine(&self, r: usize, i: usize, p: &[f64]) -> f64 {
        dot(self.per_base[r].row(i), p) + self.offsets[r][i]
    }
}

pub fn build_normalized(s: &NetworkScenario) -> Result<NormalizedMatrixSet, ZooError> {
    let k = s.users();
    let mut per_base = Vec::with_capacity(s.bases());
    let mut offsets = Vec::with_capacity(s.bases());
    for r in 0..s.bases() {
        for i in 0..k {
            if !(s.gains[(r, i)] > 0.0) {
                return Err(ZooError::ZeroOwnGain { user: i, base: r });
            }
        }
        per_base.push(Mat::from_fn(k, k, |i, j| {
            if i == j {
                0.0
            } else {
                s.targets[i] * s.gains[(r, j)] / s.gains[(r, i)]
            }
        }));
        offsets.push(
            (0..k)
                .map(|i| s.targets[i] * s.noise[r] / s.gains[(r, i)])
                .collect(),
        );
    }
    Ok(NormalizedMatrixSet { per_base, offsets })
}

/// Normalised matrix and offset under the scenario's effective assignment.
pub fn assigned_matrix(s: &NetworkScenario) -> Result<(Mat, Vec<f64>), ZooError> {
    let set = build_normalized(s)?;
    Ok(set.assigned(&s.effective_assignment().0))
}

/// `I(p) = M p + N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearIf {
    m: Mat,
    n: Vec<f64>,
}

impl LinearIf {
    pub fn new(m: Mat, n: Vec<f64>) -> Result<Self, ZooError> {
        m.check_square()?;
        m.check_nonnegative()?;
        if n.len() != m.rows() {
            return Err(ZooError::InvalidParameter(format!(
                "offset has {} entries for a {}x{} matrix",
                n.len(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(LinearIf { m, n })
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn offset(&self) -> &[f64] {
        &self.n
    }
}

impl InterferenceFunction for LinearIf {
    fn dim(&self) -> usize {
        self.n.len()
    }

    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        dot(self.m.row(i), p) + self.n[i]
    }

    fn class(&self) -> DeclaredClass {
        if self.n.iter().all(|&x| x > 0.0) {
            DeclaredClass::Standard
        } else {
            DeclaredClass::Unclassified
        }
    }

    fn name(&self) -> String {
        "linear".into()
    }
}

/// Fixed-assignment law `I_i(p) = sum_j M^(r_i)_ij p_j + N^(r_i)_i`.
pub fn linear_if(s: &NetworkScenario) -> Result<LinearIf, ZooError> {
    let (m, n) = assigned_matrix(s)?;
    LinearIf::new(m, n)
}

/// Minimum power assignment: each user picks the base needing least power.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPowerIf {
    set: NormalizedMatrixSet,
}

impl MinPowerIf {
    pub fn matrices(&self) -> &NormalizedMatrixSet {
        &self.set
    }
}

impl InterferenceFunction for MinPowerIf {
    fn dim(&self) -> usize {
        self.set.users()
    }

    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        (0..self.set.bases())
            .map(|r| self.set.affine(r, i, p))
            .fold(f64::INFINITY, f64::min)
    }

    fn class(&self) -> DeclaredClass {
        DeclaredClass::Standard
    }

    fn name(&self) -> String {
        "mpa".into()
    }
}

pub fn min_power_if(s: &NetworkScenario) -> Result<MinPowerIf, ZooError> {
    Ok(MinPowerIf {
        set: build_normalized(s)?,
    })
}

/// Macro-diversity: harmonic combination over all bases,
/// `I_i(p) = 1 / sum_r 1 / (sum_j M^(r)_ij p_j + N^(r)_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroDiversityIf {
    set: NormalizedMatrixSet,
}

impl MacroDiversityIf {
    pub fn matrices(&self) -> &NormalizedMatrixSet {
        &self.set
    }
}

impl InterferenceFunction for MacroDiversityIf {
    fn dim(&self) -> usize {
        self.set.users()
    }

    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        let inv: f64 = (0..self.set.bases())
            .map(|r| 1.0 / self.set.affine(r, i, p))
            .sum();
        1.0 / inv
    }

    fn class(&self) -> DeclaredClass {
        DeclaredClass::Standard
    }

    fn name(&self) -> String {
        "macro".into()
    }
}

pub fn macro_diversity_if(s: &NetworkScenario) -> Result<MacroDiversityIf, ZooError> {
    Ok(MacroDiversityIf {
        set: build_normalized(s)?,
    })
}

/// Overestimate of the macro-diversity law using the worst base interference
/// and the worst noise: `gamma_i (max_r sum_{j!=i} G_rj p_j + max_r eta_r) / sum_r G_ri`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroOverestimateIf {
    gains: Mat,
    targets: Vec<f64>,
    noise_hat: f64,
    own_gain_sums: Vec<f64>,
}

impl InterferenceFunction for MacroOverestimateIf {
    fn dim(&self) -> usize {
        self.targets.len()
    }

    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        let worst = (0..self.gains.rows())
            .map(|r| {
                self.gains
                    .row(r)
                    .iter()
                    .zip(p)
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (g, pj))| g * pj)
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        self.targets[i] * (worst + self.noise_hat) / self.own_gain_sums[i]
    }

    fn class(&self) -> DeclaredClass {
        DeclaredClass::Standard
    }

    fn name(&self) -> String {
        "macro-over".into()
    }
}

pub fn macro_overestimate_if(s: &NetworkScenario) -> Result<MacroOverestimateIf, ZooError> {
    let k = s.users();
    Ok(MacroOverestimateIf {
        gains: s.gains.clone(),
        targets: s.targets.clone(),
        noise_hat: s.noise.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        own_gain_sums: (0..k)
            .map(|i| (0..s.bases()).map(|r| s.gains[(r, i)]).sum())
            .collect(),
    })
}

/// `H_r[i][j] = gamma_i G[r][j] / sum_r' G[r'][i]` off the diagonal. These bound
/// the increment of the macro-diversity overestimate.
pub fn macro_h_matrices(s: &NetworkScenario) -> Vec<Mat> {
    let k = s.users();
    let sums: Vec<f64> = (0..k)
        .map(|i| (0..s.bases()).map(|r| s.gains[(r, i)]).sum())
        .collect();
    (0..s.bases())
        .map(|r| {
            Mat::from_fn(k, k, |i, j| {
                if i == j {
                    0.0
                } else {
                    s.targets[i] * s.gains[(r, j)] / sums[i]
                }
            })
        })
        .collect()
}

/// Sigmoid utility `U(x) = 1 / (1 + exp(-a (x - b)))` and its marginal `f = U'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sigmoid {
    pub a: f64,
    pub b: f64,
}

const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;

impl Sigmoid {
    /// Midpoint `b = gamma - ln(a gamma - 1) / a`.
    pub fn for_target(a: f64, gamma: f64) -> Option<Sigmoid> {
        let prod = a * gamma;
        if !(a > 0.0) || !(prod > 1.0) {
            return None;
        }
        Some(Sigmoid {
            a,
            b: gamma - (prod - 1.0).ln() / a,
        })
    }

    pub fn utility(&self, x: f64) -> f64 {
        1.0 / (1.0 + (-self.a * (x - self.b)).exp())
    }

    /// `U'(x) = a e / (1 + e)^2` with `e = exp(-a |x - b|)`, symmetric about `b`.
    pub fn marginal(&self, x: f64) -> f64 {
        let e = (-self.a * (x - self.b).abs()).exp();
        self.a * e / ((1.0 + e) * (1.0 + e))
    }

    /// Peak of the marginal utility, reached at `b`.
    pub fn peak(&self) -> f64 {
        self.a / 4.0
    }

    /// Inverse of the marginal on its decreasing branch `[b, b + 200/a]`.
    ///
    /// Arguments at or above the peak `a/4` return `b`; arguments below the
    /// marginal at the far end of the bracket return that end.
    pub fn inverse_marginal(&self, y: f64) -> f64 {
        if y >= self.peak() {
            return self.b;
        }
        let mut lo = self.b;
        let mut hi = self.b + 200.0 / self.a;
        if y <= self.marginal(hi) {
            return hi;
        }
        for _ in 0..INVERSE_MAX_ITER {
            if hi - lo <= INVERSE_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.marginal(mid) > y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Utility-based power control parameters: steepness `a_i`, price `alpha_i`
/// and the derived sigmoid midpoints `b_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UbpcParams {
    pub a: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sigmoids: Vec<Sigmoid>,
}

impl UbpcParams {
    pub fn new(a: Vec<f64>, alpha: Vec<f64>, targets: &[f64]) -> Result<Self, ZooError> {
        if a.len() != targets.len() || alpha.len() != targets.len() {
            return Err(ZooError::InvalidParameter(format!(
                "UBPC needs one a and one alpha per user ({} users, {} a, {} alpha)",
                targets.len(),
                a.len(),
                alpha.len()
            )));
        }
        if let Some(i) = alpha.iter().position(|&x| !(x > 0.0)) {
            return Err(ZooError::InvalidParameter(format!(
                "alpha[{i}] = {} must be positive",
                alpha[i]
            )));
        }
        let sigmoids = a
            .iter()
            .zip(targets)
            .enumerate()
            .map(|(user, (&ai, &gi))| {
                Sigmoid::for_target(ai, gi).ok_or(ZooError::UbpcDomain {
                    user,
                    product: ai * gi,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(UbpcParams { a, alpha, sigmoids })
    }

    pub fn b(&self) -> Vec<f64> {
        self.sigmoids.iter().map(|s| s.b).collect()
    }
}

/// `I_i(p) = x_i f_i^-1(alpha_i x_i)` with `x_i = sum_j M_ij p_j + N_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct UbpcIf {
    m: Mat,
    n: Vec<f64>,
    params: UbpcParams,
}

impl UbpcIf {
    pub fn params(&self) -> &UbpcParams {
        &self.params
    }
}

impl InterferenceFunction for UbpcIf {
    fn dim(&self) -> usize {
        self.n.len()
    }

    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        let x = dot(self.m.row(i), p) + self.n[i];
        x * self.params.sigmoids[i].inverse_marginal(self.params.alpha[i] * x)
    }

    fn class(&self) -> DeclaredClass {
        DeclaredClass::Standard
    }

    fn name(&self) -> String {
        "ubpc".into()
    }
}

pub fn ubpc_if(s: &NetworkScenario, params: &UbpcParams) -> Result<UbpcIf, ZooError> {
    let (m, n) = assigned_matrix(s)?;
    if params.sigmoids.len() != s.users() {
        return Err(ZooError::InvalidParameter(
            "UBPC parameters do not match the number of users".into(),
        ));
    }
    Ok(UbpcIf {
        m,
        n,
        params: params.clone(),
    })
}

/// `M_b = diag(b) M` under the effective assignment.
pub fn ubpc_matrix(s: &NetworkScenario, params: &UbpcParams) -> Result<Mat, ZooError> {
    let (m, _) = assigned_matrix(s)?;
    Ok(m.scale_rows(&params.b()))
}

/// Elementwise interval uncertainty `lower <= M <= upper` on a normalised gain matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUncertainty {
    lower: Mat,
    upper: Mat,
}

impl IntervalUncertainty {
    pub fn new(lower: Mat, upper: Mat) -> Result<Self, ZooError> {
        lower.check_square()?;
        if lower.rows() != upper.rows() || lower.cols() != upper.cols() {
            return Err(ZooError::InvalidParameter(
                "interval bounds have different shapes".into(),
            ));
        }
        lower.check_nonnegative()?;
        for i in 0..lower.rows() {
            if lower[(i, i)] != 0.0 || upper[(i, i)] != 0.0 {
                return Err(ZooError::InvalidParameter(format!(
                    "interval bounds must have a zero diagonal (row {i})"
                )));
            }
            for j in 0..lower.cols() {
                if lower[(i, j)] > upper[(i, j)] {
                    return Err(ZooError::InvalidParameter(format!(
                        "lower[{i}][{j}] = {} exceeds upper = {}",
                        lower[(i, j)],
                        upper[(i, j)]
                    )));
                }
            }
        }
        Ok(IntervalUncertainty { lower, upper })
    }

    pub fn lower(&self) -> &Mat {
        &self.lower
    }

    pub fn upper(&self) -> &Mat {
        &self.upper
    }
}

/// Robust law `I_i(p) = sup_{M_i in box_i} M_i p + N_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrpcIf {
    bounds: IntervalUncertainty,
    n: Vec<f64>,
}

impl DrpcIf {
    pub fn bounds(&self) -> &IntervalUncertainty {
        &self.bounds
    }
}

impl InterferenceFunction for DrpcIf {
    fn dim(&self) -> usize {
        self.n.len()
    }

    /// The supremum of a linear objective over a box picks each entry's
    /// bound by the sign of `p_j`.
    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        let lo = self.bounds.lower.row(i);
        let hi = self.bounds.upper.row(i);
        let sup: f64 = (0..p.len())
            .map(|j| (lo[j] * p[j]).max(hi[j] * p[j]))
            .sum();
        sup + self.n[i]
    }

    fn class(&self) -> DeclaredClass {
        DeclaredClass::Standard
    }

    fn name(&self) -> String {
        "drpc".into()
    }
}

pub fn drpc_if(n: Vec<f64>, bounds: IntervalUncertainty) -> Result<DrpcIf, ZooError> {
    if n.len() != bounds.lower.rows() {
        return Err(ZooError::InvalidParameter(format!(
            "offset has {} entries for {} users",
            n.len(),
            bounds.lower.rows()
        )));
    }
    positive_finite("offset", &n)?;
    Ok(DrpcIf { bounds, n })
}

/// `I^q(p) = max(p_min, min(p_max, I(p)))`.
#[derive(Debug, Clone)]
pub struct ClampIf<F> {
    inner: F,
    p_min: Vec<f64>,
    p_max: Vec<f64>,
}

impl<F> ClampIf<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.p_min, &self.p_max)
    }
}

impl<F: InterferenceFunction> InterferenceFunction for ClampIf<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        self.inner
            .eval_component(i, p)
            .min(self.p_max[i])
            .max(self.p_min[i])
    }

    fn class(&self) -> DeclaredClass {
        match self.inner.class() {
            c @ DeclaredClass::Contractive { .. } => c,
            DeclaredClass::Standard => DeclaredClass::Standard,
            _ => DeclaredClass::Unclassified,
        }
    }

    fn name(&self) -> String {
        format!("clamped-{}", self.inner.name())
    }
}

pub fn clamp_if<F: InterferenceFunction>(
    inner: F,
    p_min: Vec<f64>,
    p_max: Vec<f64>,
) -> Result<ClampIf<F>, ZooError> {
    let k = inner.dim();
    if p_min.len() != k || p_max.len() != k {
        return Err(ZooError::InvalidParameter(format!(
            "clamp bounds need {k} entries (got {} and {})",
            p_min.len(),
            p_max.len()
        )));
    }
    for i in 0..k {
        if !(p_min[i] > 0.0) || !(p_min[i] <= p_max[i]) {
            return Err(ZooError::InvalidParameter(format!(
                "clamp bounds need 0 < p_min <= p_max (user {i}: [{}, {}])",
                p_min[i], p_max[i]
            )));
        }
    }
    Ok(ClampIf {
        inner,
        p_min,
        p_max,
    })
}

/// Tags the function with a class, typically from a certificate.
pub struct Classified<F> {
    inner: F,
    class: DeclaredClass,
}

pub fn with_class<F: InterferenceFunction>(inner: F, class: DeclaredClass) -> Classified<F> {
    Classified { inner, class }
}

impl<F: InterferenceFunction> InterferenceFunction for Classified<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval_component(&self, i: usize, p: &[f64]) -> f64 {
        self.inner.eval_component(i, p)
    }
    fn class(&self) -> DeclaredClass {
        self.class.clone()
    }
    fn name(&self) -> String {
        self.inner.name()
    }
}

/// The scalar counterexamples used for regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureId {
    /// `I(p) = 2p + 1`: standard, expansive, no fixed point.
    Example1,
    /// `I(p) = 4 / (1 + exp(-(p - 2)))`: standard, fixed point 2, sub-linear.
    Example2,
    /// Piecewise `p^2 + 1/100` / `p/2 - 1/16 + 1/100`: contractive, not scalable.
    Example3,
    /// `I(p) = p + exp(-p)`: para-contraction without a fixed point.
    NoFixedPoint,
}

impl FixtureId {
    pub const ALL: [FixtureId; 4] = [
        FixtureId::Example1,
        FixtureId::Example2,
        FixtureId::Example3,
        FixtureId::NoFixedPoint,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            FixtureId::Example1 => "example1",
            FixtureId::Example2 => "example2",
            FixtureId::Example3 => "example3",
            FixtureId::NoFixedPoint => "no-fixed-point",
        }
    }

    pub fn from_label(s: &str) -> Option<FixtureId> {
        FixtureId::ALL.iter().copied().find(|f| f.label() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarIf {
    pub id: FixtureId,
}

impl ScalarIf {
    pub fn value(&self, p: f64) -> f64 {
        match self.id {
            FixtureId::Example1 => 2.0 * p + 1.0,
            FixtureId::Example2 => 4.0 / (1.0 + (-(p - 2.0)).exp()),
            FixtureId::Example3 => {
                if p <= 0.25 {
                    p * p + 0.01
                } else {
                    0.5 * p - 1.0 / 16.0 + 0.01
                }
            }
            FixtureId::NoFixedPoint => p + (-p).exp(),
        }
    }
}

impl InterferenceFunction for ScalarIf {
    fn dim(&self) -> usize {
        1
    }

    fn eval_component(&self, _i: usize, p: &[f64]) -> f64 {
        self.value(p[0])
    }

    fn class(&self) -> DeclaredClass {
        match self.id {
            FixtureId::Example3 => DeclaredClass::Contractive {
                c: 0.5,
                v: vec![1.0],
            },
            _ => DeclaredClass::Standard,
        }
    }

    fn name(&self) -> String {
        self.id.label().into()
    }
}

/// Expected behaviour of a scalar fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureExpectations {
    pub standard: bool,
    pub contractive: Option<(f64, Vec<f64>)>,
    pub fixed_point: Option<f64>,
    pub diverges: bool,
    pub sublinear: bool,
    /// Known scalability violation `(p, alpha)`.
    pub scalability_witness: Option<(f64, f64)>,
    /// Exact Lipschitz ratio `|I(p) - I(p')| / |p - p'|` when constant.
    pub lipschitz_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFixture {
    pub function: ScalarIf,
    pub expected: FixtureExpectations,
}

impl ScalarFixture {
    pub fn new(id: FixtureId) -> Self {
        let expected = match id {
            FixtureId::Example1 => FixtureExpectations {
                standard: true,
                contractive: None,
                fixed_point: None,
                diverges: true,
                sublinear: false,
                scalability_witness: None,
                lipschitz_ratio: Some(2.0),
            },
            FixtureId::Example2 => FixtureExpectations {
                standard: true,
                contractive: None,
                fixed_point: Some(2.0),
                diverges: false,
                sublinear: true,
                scalability_witness: None,
                lipschitz_ratio: None,
            },
            FixtureId::Example3 => FixtureExpectations {
                standard: false,
                contractive: Some((0.5, vec![1.0])),
                // root of p = p^2 + 1/100 on the quadratic branch
                fixed_point: Some((1.0 - 0.96f64.sqrt()) / 2.0),
                diverges: false,
                sublinear: false,
                scalability_witness: Some((0.125, 2.0)),
                lipschitz_ratio: None,
            },
            FixtureId::NoFixedPoint => FixtureExpectations {
                standard: true,
                contractive: None,
                fixed_point: None,
                diverges: false,
                sublinear: false,
                scalability_witness: None,
                lipschitz_ratio: None,
            },
        };
        ScalarFixture {
            function: ScalarIf { id },
            expected,
        }
    }
}

pub fn scalar_fixtures() -> Vec<ScalarFixture> {
    FixtureId::ALL.iter().map(|&id| ScalarFixture::new(id)).collect()
}

/// Random scenario generators for tests and experiments.
pub mod gen {
    use super::*;

    /// `K` users, `R` bases, gains uniform in `[0.05, 1]`, unit noise, targets
    /// uniform in `[0.5, 2]`, default (strongest-server) assignment.
    pub fn random_scenario<G: Rng + ?Sized>(rng: &mut G, k: usize, r: usize) -> NetworkScenario {
        let gains = Mat::from_fn(r, k, |_, _| rng.gen_range(0.05..=1.0));
        let targets = (0..k).map(|_| rng.gen_range(0.5..=2.0)).collect();
        NetworkScenario::new(gains, vec![1.0; r], targets, None)
            .expect("generated scenario is valid")
    }

    /// Rescales all targets by a common factor. Normalised matrices scale
    /// row-wise by `gamma_i`, so every spectral radius scales by `factor`.
    pub fn scale_targets(s: &NetworkScenario, factor: f64) -> NetworkScenario {
        s.with_targets(s.targets().iter().map(|g| g * factor).collect())
            .expect("scaled targets stay positive")
    }
}
