//! Contraction certificates `(c, v)` for the zoo families, and refutations.
//!
//! A certificate covers one or more nonnegative matrices `A` and claims
//! `A v <= c v` rowwise with `c < 1`, `v > 0`. Every certificate carries the
//! matrices it covers so it can be re-verified independently.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ifun::DeclaredClass;
use crate::numkit::{
    dot, spectral_radius_estimate, weight_vector_for, weighted_max_norm_mat, Mat, NumError,
};
use crate::zoo::{ubpc_matrix, IntervalUncertainty, NetworkScenario, UbpcParams};

/// Absolute slack on `A v <= c v` when re-verifying.
pub const VERIFY_TOL: f64 = 1e-9;
/// Largest number of assignments [`enumerate_assignment_spectra`] will visit.
pub const ENUMERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertMethod {
    #[serde(rename = "perron-solve")]
    PerronSolve,
    #[serde(rename = "row-sum")]
    RowSum,
    /// Common weight vector across bases (max-of-affine iteration).
    #[serde(rename = "lemma2-enumeration")]
    CommonV,
    #[serde(rename = "ubpc-Mb")]
    UbpcMb,
    #[serde(rename = "drpc-sup")]
    DrpcSup,
}

impl CertMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CertMethod::PerronSolve => "perron-solve",
            CertMethod::RowSum => "row-sum",
            CertMethod::CommonV => "lemma2-enumeration",
            CertMethod::UbpcMb => "ubpc-Mb",
            CertMethod::DrpcSup => "drpc-sup",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub c: f64,
    pub v: Vec<f64>,
    pub method: CertMethod,
    pub family: String,
    /// Spectral radius of the (worst) covered matrix, when computed.
    pub rho: Option<f64>,
    /// Matrices the inequality `A v <= c v` is claimed for.
    pub covers: Vec<Mat>,
}

impl ContractionCertificate {
    /// Re-checks `c < 1`, `v > 0` and `sum_j A_ij v_j <= c v_i + 1e-9` for every covered matrix.
    pub fn verify(&self) -> bool {
        self.c >= 0.0
            && self.c < 1.0
            && self.v.iter().all(|&x| x > 0.0 && x.is_finite())
            && self.covers.iter().all(|a| {
                a.rows() == self.v.len()
                    && a.cols() == self.v.len()
                    && (0..a.rows()).all(|i| dot(a.row(i), &self.v) <= self.c * self.v[i] + VERIFY_TOL)
            })
    }

    pub fn class(&self) -> DeclaredClass {
        DeclaredClass::Contractive {
            c: self.c,
            v: self.v.clone(),
        }
    }

    /// `v / max_i v_i`; `c` is invariant under rescaling `v`.
    pub fn normalized_v(&self) -> Vec<f64> {
        let m = self.v.iter().cloned().fold(0.0, f64::max);
        self.v.iter().map(|x| x / m).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum CertFailure {
    #[error("spectral radius {rho} >= 1")]
    SpectralRadius { rho: f64, matrix: Mat },
    #[error("assignment {assignment:?} has spectral radius {rho} >= 1")]
    BadAssignment {
        assignment: Vec<usize>,
        rho: f64,
        matrix: Mat,
    },
    #[error("common-v iteration diverged (||v|| = {norm:e} after {iterations} steps)")]
    Diverged {
        iterations: usize,
        norm: f64,
        /// Greedy policy at divergence, with its spectral radius.
        assignment: Vec<usize>,
        rho: f64,
    },
    #[error("common-v iteration inconclusive after {iterations} steps (c(v) = {c_last})")]
    Inconclusive { iterations: usize, c_last: f64 },
    #[error("row sum {row_sum} of row {row} is not below 1")]
    RowSum { row: usize, row_sum: f64 },
    #[error("{count} assignments exceed the enumeration cap {cap}")]
    EnumerationCap { count: f64, cap: usize },
    #[error("parameter domain: {0}")]
    ParameterDomain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<NumError> for CertFailure {
    fn from(e: NumError) -> Self {
        CertFailure::Numerical(e.to_string())
    }
}

impl CertFailure {
    /// Re-derives the failure from the recorded witness.
    /// `None` when the variant carries no checkable witness.
    pub fn recheck(&self) -> Option<bool> {
        match self {
            CertFailure::SpectralRadius { matrix, .. }
            | CertFailure::BadAssignment { matrix, .. } => {
                Some(spectral_radius_estimate(matrix).is_ok_and(|r| r >= 1.0 - VERIFY_TOL))
            }
            CertFailure::Diverged { rho, .. } => Some(*rho >= 1.0 - VERIFY_TOL),
            _ => None,
        }
    }

    /// Reported spectral radius, if the failure has one.
    pub fn rho(&self) -> Option<f64> {
        match self {
            CertFailure::SpectralRadius { rho, .. }
            | CertFailure::BadAssignment { rho, .. }
            | CertFailure::Diverged { rho, .. } => Some(*rho),
            _ => None,
        }
    }
}

pub type CertResult = Result<ContractionCertificate, CertFailure>;

fn validate(m: &Mat) -> Result<(), CertFailure> {
    m.check_square()?;
    m.check_nonnegative()?;
    if m.rows() == 0 {
        return Err(NumError::Empty.into());
    }
    Ok(())
}

fn linear_with(m: &Mat, method: CertMethod, family: &str) -> CertResult {
    validate(m)?;
    let rho = spectral_radius_estimate(m)?;
    if rho >= 1.0 {
        return Err(CertFailure::SpectralRadius {
            rho,
            matrix: m.clone(),
        });
    }
    let v = match weight_vector_for(m, &vec![1.0; m.rows()]) {
        Ok(v) => v,
        Err(NumError::CertificateImpossible { rho }) => {
            return Err(CertFailure::SpectralRadius {
                rho,
                matrix: m.clone(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let c = weighted_max_norm_mat(m, &v)?;
    let cert = ContractionCertificate {
        c,
        v,
        method,
        family: family.to_string(),
        rho: Some(rho),
        covers: vec![m.clone()],
    };
    if !cert.verify() {
        return Err(CertFailure::SpectralRadius {
            rho,
            matrix: m.clone(),
        });
    }
    Ok(cert)
}

/// `v = (I - M)^-1 1`, `c = ||M||_v`, issued iff `rho(M) < 1`.
pub fn certify_linear(m: &Mat) -> CertResult {
    linear_with(m, CertMethod::PerronSolve, "linear")
}

/// `v = 1`, `c = ||M||_inf`; succeeds iff every row sum is below 1.
pub fn certify_linear_rowsum(m: &Mat) -> CertResult {
    validate(m)?;
    let sums = m.row_sums();
    if let Some((row, &row_sum)) = sums.iter().enumerate().find(|(_, &s)| !(s < 1.0)) {
        return Err(CertFailure::RowSum { row, row_sum });
    }
    Ok(ContractionCertificate {
        c: sums.iter().cloned().fold(0.0, f64::max),
        v: vec![1.0; m.rows()],
        method: CertMethod::RowSum,
        family: "linear".into(),
        rho: None,
        covers: vec![m.clone()],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonVConfig {
    pub max_iter: usize,
    /// `||v||_inf` above which the iteration is declared divergent.
    pub divergence: f64,
    /// Relative change accepted as converged.
    pub tol: f64,
}

impl Default for CommonVConfig {
    fn default() -> Self {
        CommonVConfig {
            max_iter: 100_000,
            divergence: 1e12,
            tol: 1e-13,
        }
    }
}

/// Matrix whose row `i` is row `i` of `mats[assignment[i]]`.
pub fn assignment_matrix(mats: &[Mat], assignment: &[usize]) -> Mat {
    let k = assignment.len();
    Mat::from_fn(k, k, |i, j| mats[assignment[i]][(i, j)])
}

fn validate_family(mats: &[Mat]) -> Result<usize, CertFailure> {
    let first = mats
        .first()
        .ok_or_else(|| CertFailure::ParameterDomain("need at least one matrix".into()))?;
    for m in mats {
        validate(m)?;
        if m.rows() != first.rows() {
            return Err(NumError::DimensionMismatch {
                expected: first.rows(),
                actual: m.rows(),
            }
            .into());
        }
    }
    Ok(first.rows())
}

fn max_affine(mats: &[Mat], v: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let k = v.len();
    let mut w = vec![f64::NEG_INFINITY; k];
    let mut arg = vec![0; k];
    for (r, m) in mats.iter().enumerate() {
        for i in 0..k {
            let x = dot(m.row(i), v);
            if x > w[i] {
                w[i] = x;
                arg[i] = r;
            }
        }
    }
    (w, arg)
}

fn common_c(mats: &[Mat], v: &[f64]) -> Result<f64, NumError> {
    mats.iter()
        .map(|m| weighted_max_norm_mat(m, v))
        .try_fold(0.0_f64, |acc, c| Ok(acc.max(c?)))
}

/// Common weight vector for `M_1..M_R` from `v <- max_r(M_r v) + 1`, `v_0 = 1`.
pub fn certify_common_v(mats: &[Mat]) -> CertResult {
    certify_common_v_with(mats, &CommonVConfig::default())
}

pub fn certify_common_v_with(mats: &[Mat], cfg: &CommonVConfig) -> CertResult {
    let k = validate_family(mats)?;
    let issue = |v: Vec<f64>, c: f64| ContractionCertificate {
        c,
        v,
        method: CertMethod::CommonV,
        family: "common-v".into(),
        rho: None,
        covers: mats.to_vec(),
    };
    let mut v = vec![1.0; k];
    for iter in 1..=cfg.max_iter {
        let (mv, arg) = max_affine(mats, &v);
        let w: Vec<f64> = mv.iter().map(|x| x + 1.0).collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        if !(norm <= cfg.divergence) {
            let matrix = assignment_matrix(mats, &arg);
            let rho = spectral_radius_estimate(&matrix)?;
            return Err(CertFailure::Diverged {
                iterations: iter,
                norm,
                assignment: arg,
                rho,
            });
        }
        let change = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs() / a)
            .fold(0.0, f64::max);
        v = w;
        if change <= cfg.tol {
            let c = common_c(mats, &v)?;
            let cert = issue(v, c);
            if cert.verify() {
                return Ok(cert);
            }
            return Err(CertFailure::Inconclusive {
                iterations: iter,
                c_last: c,
            });
        }
    }
    // Not converged: the current iterate may still certify.
    let c = common_c(mats, &v)?;
    let cert = issue(v, c);
    if cert.verify() {
        Ok(cert)
    } else {
        Err(CertFailure::Inconclusive {
            iterations: cfg.max_iter,
            c_last: c,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSpectrum {
    pub assignment: Vec<usize>,
    pub rho: f64,
}

/// `rho(M^l)` for every `l in {0..R-1}^K`, in lexicographic order of `l`
/// (user 0 most significant).
pub fn enumerate_assignment_spectra(mats: &[Mat]) -> Result<Vec<AssignmentSpectrum>, CertFailure> {
    enumerate_assignment_spectra_capped(mats, ENUMERATION_CAP)
}

pub fn enumerate_assignment_spectra_capped(
    mats: &[Mat],
    cap: usize,
) -> Result<Vec<AssignmentSpectrum>, CertFailure> {
    let k = validate_family(mats)?;
    let r = mats.len();
    let count = (r as f64).powi(k as i32);
    if count > cap as f64 {
        return Err(CertFailure::EnumerationCap { count, cap });
    }
    let count = count as usize;
    (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut assignment = vec![0; k];
            let mut rest = idx;
            for slot in assignment.iter_mut().rev() {
                *slot = rest % r;
                rest /= r;
            }
            let rho = spectral_radius_estimate(&assignment_matrix(mats, &assignment))?;
            Ok(AssignmentSpectrum { assignment, rho })
        })
        .collect::<Result<Vec<_>, NumError>>()
        .map_err(CertFailure::from)
}

/// Largest entry of an enumeration, first in order on ties.
pub fn worst_assignment(spectra: &[AssignmentSpectrum]) -> Option<&AssignmentSpectrum> {
    spectra
        .iter()
        .reduce(|best, s| if s.rho > best.rho { s } else { best })
}

/// Exhaustive refutation: fails with the worst assignment if any `rho(M^l) >= 1`.
pub fn certify_by_enumeration(mats: &[Mat]) -> Result<f64, CertFailure> {
    let spectra = enumerate_assignment_spectra(mats)?;
    let worst = worst_assignment(&spectra).expect("non-empty enumeration");
    if worst.rho >= 1.0 {
        return Err(CertFailure::BadAssignment {
            assignment: worst.assignment.clone(),
            rho: worst.rho,
            matrix: assignment_matrix(mats, &worst.assignment),
        });
    }
    Ok(worst.rho)
}

/// Macro-diversity certificate on the `H_r` bounds, with the per-base
/// row-sum test for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroCertification {
    pub certificate: CertResult,
    /// `||H_r||_inf` per base.
    pub row_sum_norms: Vec<f64>,
    /// Row-sum test: every `||H_r||_inf < 1`.
    pub row_sum_passes: bool,
}

pub fn certify_macro(h: &[Mat]) -> Result<MacroCertification, CertFailure> {
    validate_family(h)?;
    let certificate = certify_common_v(h).map(|mut c| {
        c.family = "macro".into();
        c
    });
    let row_sum_norms: Vec<f64> = h.iter().map(Mat::inf_norm).collect();
    let row_sum_passes = row_sum_norms.iter().all(|&x| x < 1.0);
    Ok(MacroCertification {
        certificate,
        row_sum_norms,
        row_sum_passes,
    })
}

/// Certificate on `M_b = diag(b) M`; `rho` carries `rho(M_b)`, `c = ||M_b||_v >= rho`.
pub fn certify_ubpc(s: &NetworkScenario, params: &UbpcParams) -> CertResult {
    if params.sigmoids.len() != s.users() {
        return Err(CertFailure::ParameterDomain(format!(
            "{} sigmoid parameters for {} users",
            params.sigmoids.len(),
            s.users()
        )));
    }
    let mb = ubpc_matrix(s, params).map_err(|e| CertFailure::ParameterDomain(e.to_string()))?;
    linear_with(&mb, CertMethod::UbpcMb, "ubpc")
}

/// For box uncertainty the supremum of `||M||_v` is attained at the upper bound.
pub fn certify_drpc(u: &IntervalUncertainty) -> CertResult {
    linear_with(u.upper(), CertMethod::DrpcSup, "drpc")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("modulus c = {0} must lie in [0, 1)")]
    Modulus(f64),
    #[error("need 0 < delta < R0 (delta = {delta}, R0 = {r0})")]
    Radius { delta: f64, r0: f64 },
}

/// `T_delta <= (D + 1) ln(delta / R0) / ln c`; `+inf` when `c` is so close
/// to 1 that the quotient overflows, `D + 1` for `c = 0`.
pub fn convergence_time_bound(c: f64, r0: f64, delta: f64, d: usize) -> Result<f64, BoundError> {
    if !(0.0..1.0).contains(&c) {
        return Err(BoundError::Modulus(c));
    }
    if !(delta > 0.0 && delta < r0 && r0.is_finite()) {
        return Err(BoundError::Radius { delta, r0 });
    }
    if c == 0.0 {
        // one full round of updates reaches p* exactly
        return Ok((d as f64) + 1.0);
    }
    let ln_c = c.ln();
    if ln_c == 0.0 {
        return Ok(f64::INFINITY);
    }
    let t = (d as f64 + 1.0) * ((delta / r0).ln() / ln_c);
    Ok(if t.is_finite() { t } else { f64::INFINITY })
}
