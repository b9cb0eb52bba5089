//! Builds the interference function and its certificate for a scenario file.

use std::sync::Arc;

use ifc_core::certify::{
    certify_common_v, certify_drpc, certify_linear, certify_macro, certify_ubpc, CertFailure,
    CertResult,
};
use ifc_core::ifun::DynInterference;
use ifc_core::numkit::Mat;
use ifc_core::zoo::{
    assigned_matrix, build_normalized, clamp_if, drpc_if, linear_if, macro_diversity_if,
    macro_h_matrices, macro_overestimate_if, min_power_if, ubpc_if, IntervalUncertainty,
    NetworkScenario, ScalarFixture, UbpcParams,
};
use serde::{Deserialize, Serialize};

use crate::scenario::{Family, ParseError, ScenarioFile};
use crate::CliError;

/// Per-matrix `||A||_inf` and whether all are below 1 (unit-weight test).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSumReport {
    pub norms: Vec<f64>,
    pub passes: bool,
}

impl RowSumReport {
    fn of(mats: &[Mat]) -> Self {
        let norms: Vec<f64> = mats.iter().map(Mat::inf_norm).collect();
        let passes = norms.iter().all(|&x| x < 1.0);
        RowSumReport { norms, passes }
    }
}

pub struct Built {
    pub family: Family,
    pub function: DynInterference,
    pub certificate: CertResult,
    pub row_sums: Option<RowSumReport>,
    /// Known exact fixed point (scalar fixtures).
    pub fixed_point: Option<Vec<f64>>,
    pub anchors: Vec<Vec<f64>>,
    pub scales: Vec<f64>,
    pub decisions: Vec<String>,
    /// Matrices for the assignment enumeration.
    pub base_matrices: Option<Vec<Mat>>,
}

fn parse_err(field: &str, e: impl ToString) -> CliError {
    CliError::Parse(ParseError {
        field: field.into(),
        message: e.to_string(),
        line: None,
        column: None,
    })
}

fn assignment_note(s: &NetworkScenario, decisions: &mut Vec<String>) {
    let (a, defaulted) = s.effective_assignment();
    let one_based: Vec<usize> = a.iter().map(|x| x + 1).collect();
    if defaulted {
        decisions.push(format!(
            "assignment defaulted to strongest server: {one_based:?}"
        ));
    } else {
        decisions.push(format!("assignment from file: {one_based:?}"));
    }
}

fn build_base(file: &ScenarioFile, family: &Family) -> Result<Built, CliError> {
    let mut decisions = Vec::new();
    if let Family::Fixture = family {
        let id = file.algorithm.fixture_id().map_err(CliError::Parse)?;
        let fx = ScalarFixture::new(id);
        let certificate = match fx.expected.lipschitz_ratio {
            // the affine fixture 2p + 1 has matrix [2]
            Some(slope) => certify_linear(&Mat::from_rows(&[[slope]]).unwrap()),
            None => Err(CertFailure::ParameterDomain(format!(
                "fixture {} has no matrix form; declared class {:?}",
                id.label(),
                ifc_core::ifun::InterferenceFunction::class(&fx.function)
            ))),
        };
        let (anchors, scales) = match fx.expected.scalability_witness {
            Some((p, alpha)) => (vec![vec![p]], vec![alpha]),
            None => (Vec::new(), Vec::new()),
        };
        return Ok(Built {
            family: family.clone(),
            function: Arc::new(fx.function),
            certificate,
            row_sums: None,
            fixed_point: fx.expected.fixed_point.map(|p| vec![p]),
            anchors,
            scales,
            decisions,
            base_matrices: None,
        });
    }

    let s = file.network_scenario().map_err(CliError::Parse)?;
    let set = build_normalized(&s).map_err(|e| parse_err("network", e))?;
    let (function, certificate, row_sums, base): (DynInterference, CertResult, _, _) = match family {
        Family::Linear => {
            assignment_note(&s, &mut decisions);
            decisions.push("weight vector v = (I - M)^-1 1".into());
            let f = linear_if(&s).map_err(|e| parse_err("network", e))?;
            let cert = certify_linear(f.matrix());
            let rs = RowSumReport::of(std::slice::from_ref(f.matrix()));
            (Arc::new(f), cert, Some(rs), set.per_base.clone())
        }
        Family::Mpa => {
            decisions.push("common weight vector from v <- max_r(M_r v) + 1".into());
            let f = min_power_if(&s).map_err(|e| parse_err("network", e))?;
            let cert = certify_common_v(&set.per_base).map(|mut c| {
                c.family = "mpa".into();
                c
            });
            (Arc::new(f), cert, Some(RowSumReport::of(&set.per_base)), set.per_base.clone())
        }
        Family::Macro => {
            decisions.push("common weight vector from v <- max_r(M_r v) + 1".into());
            let f = macro_diversity_if(&s).map_err(|e| parse_err("network", e))?;
            let cert = certify_common_v(&set.per_base).map(|mut c| {
                c.family = "macro".into();
                c
            });
            (Arc::new(f), cert, Some(RowSumReport::of(&set.per_base)), set.per_base.clone())
        }
        Family::MacroOver => {
            decisions.push("common weight vector for H_r from v <- max_r(H_r v) + 1".into());
            let f = macro_overestimate_if(&s).map_err(|e| parse_err("network", e))?;
            let h = macro_h_matrices(&s);
            let mc = certify_macro(&h).map_err(CliError::Certification)?;
            let rs = RowSumReport {
                norms: mc.row_sum_norms.clone(),
                passes: mc.row_sum_passes,
            };
            (Arc::new(f), mc.certificate, Some(rs), h)
        }
        Family::Ubpc => {
            assignment_note(&s, &mut decisions);
            decisions.push("weight vector v = (I - M_b)^-1 1".into());
            decisions.push("UBPC gains indexed by each user's assigned base".into());
            let alg = &file.algorithm;
            let params = UbpcParams::new(
                alg.a.clone().unwrap_or_default(),
                alg.alpha.clone().unwrap_or_default(),
                s.targets(),
            )
            .map_err(|e| CliError::Certification(CertFailure::ParameterDomain(e.to_string())))?;
            let cert = certify_ubpc(&s, &params);
            let f = ubpc_if(&s, &params).map_err(|e| parse_err("algorithm", e))?;
            let mb = ifc_core::zoo::ubpc_matrix(&s, &params).map_err(|e| parse_err("algorithm", e))?;
            (Arc::new(f), cert, Some(RowSumReport::of(&[mb])), set.per_base.clone())
        }
        Family::Drpc => {
            assignment_note(&s, &mut decisions);
            decisions.push("box uncertainty: supremum attained at the upper bound".into());
            let alg = &file.algorithm;
            let lower = Mat::from_rows(alg.lower.as_ref().unwrap()).map_err(|e| parse_err("algorithm.lower", e))?;
            let upper = Mat::from_rows(alg.upper.as_ref().unwrap()).map_err(|e| parse_err("algorithm.upper", e))?;
            let u = IntervalUncertainty::new(lower, upper).map_err(|e| parse_err("algorithm.upper", e))?;
            let (_, n) = assigned_matrix(&s).map_err(|e| parse_err("network", e))?;
            let cert = certify_drpc(&u);
            let rs = RowSumReport::of(std::slice::from_ref(u.upper()));
            let f = drpc_if(n, u).map_err(|e| parse_err("algorithm", e))?;
            (Arc::new(f), cert, Some(rs), set.per_base.clone())
        }
        Family::Fixture | Family::Clamped(_) => unreachable!("handled by caller"),
    };
    Ok(Built {
        family: family.clone(),
        function,
        certificate,
        row_sums,
        fixed_point: None,
        anchors: Vec::new(),
        scales: Vec::new(),
        decisions,
        base_matrices: Some(base),
    })
}

pub fn build(file: &ScenarioFile) -> Result<Built, CliError> {
    let family = file.algorithm.family().map_err(CliError::Parse)?;
    match &family {
        Family::Clamped(inner) => {
            let mut built = build_base(file, inner)?;
            let alg = &file.algorithm;
            let q = clamp_if(
                built.function.clone(),
                alg.p_min.clone().unwrap_or_default(),
                alg.p_max.clone().unwrap_or_default(),
            )
            .map_err(|e| parse_err("algorithm.p_min", e))?;
            built.function = Arc::new(q);
            built.certificate = built.certificate.map(|mut c| {
                c.family = family.to_string();
                c
            });
            built.fixed_point = None;
            built
                .decisions
                .push("clamped function inherits the parent certificate".into());
            built.family = family;
            Ok(built)
        }
        _ => build_base(file, &family),
    }
}
