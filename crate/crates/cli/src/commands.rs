//! `certify`, `run`, `check-axioms` and `enumerate`.

use ifc_core::certify::{
    assignment_matrix, certify_common_v, convergence_time_bound, enumerate_assignment_spectra,
    worst_assignment, AssignmentSpectrum, CertFailure, ContractionCertificate,
};
use ifc_core::engine::{
    async_modulus, envelope_bound, envelope_check, measured_convergence_time, rate_from_errors,
    reference_fixed_point, run_async, run_sync, AsyncSchedule, EnvelopeVerdict, IterationTrace,
    RateEstimate, ScheduleMeta, StopReason,
};
use ifc_core::ifun::{
    check_contractivity, check_dc_paracontraction, check_monotonicity, check_norm_paracontraction,
    check_positivity, check_scalability, check_two_sided_contractivity,
    check_two_sided_scalability, AxiomVerdict, Sampler,
};
use ifc_core::numkit::weighted_max_norm_vec;
use serde::{Deserialize, Serialize};

use crate::family::{build, Built, RowSumReport};
use crate::scenario::{RunMode, ScenarioFile, ScheduleKind};
use crate::CliError;

/// Reference runs get at least this many steps.
const REFERENCE_MIN_ITER: usize = 100_000;
/// `T_delta` is measured at `delta = DELTA_REL * e(0)`.
pub const DELTA_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub mode: String,
    pub schedule: Option<ScheduleMeta>,
    pub steps: usize,
    pub stop: StopReason,
    pub final_power: Vec<f64>,
    pub fixed_point: Option<Vec<f64>>,
    /// `known` (closed form) or `reference-run`.
    pub fixed_point_source: Option<String>,
    /// Weights of the error norm `||p(n) - p*||_v`.
    pub error_weights: Vec<f64>,
    pub e0: Option<f64>,
    /// Fit of `ln e(n)` over the weighted errors.
    pub empirical_rate: Option<RateEstimate>,
    pub rate_note: Option<String>,
    /// Modulus of the reported envelope (`c`, or `c^(1/(D+1))` for bounded delays).
    pub envelope_modulus: Option<f64>,
    pub envelope: Option<EnvelopeVerdict>,
    pub delta: Option<f64>,
    pub t_delta_measured: Option<usize>,
    pub t_delta_bound: Option<f64>,
    pub t_delta_within_bound: Option<bool>,
    pub max_staleness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationSection {
    /// Matrices enumerated: `M_r` or, for `macro-over`, `H_r`.
    pub matrices: String,
    pub spectra: Vec<AssignmentSpectrum>,
    pub worst: Option<AssignmentSpectrum>,
    pub all_below_one: bool,
    pub common_v_certified: bool,
    pub common_v_failure: Option<CertFailure>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub family: String,
    pub users: usize,
    pub certified: bool,
    pub certificate: Option<ContractionCertificate>,
    pub failure: Option<CertFailure>,
    pub c: Option<f64>,
    pub v: Option<Vec<f64>>,
    pub rho: Option<f64>,
    pub row_sum_test: Option<RowSumReport>,
    pub run: Option<RunSection>,
    pub axioms: Option<Vec<AxiomVerdict>>,
    pub enumeration: Option<EnumerationSection>,
    pub decisions: Vec<String>,
}

pub struct Outcome {
    pub report: RunReport,
    /// Rendered CSV trace (`run` only).
    pub trace_csv: Option<String>,
    pub exit_code: u8,
}

fn base_report(command: &str, built: &Built) -> RunReport {
    let (certificate, failure) = match &built.certificate {
        Ok(c) => (Some(c.clone()), None),
        Err(f) => (None, Some(f.clone())),
    };
    RunReport {
        command: command.into(),
        family: built.family.to_string(),
        users: built.function.dim(),
        certified: certificate.is_some(),
        c: certificate.as_ref().map(|c| c.c),
        v: certificate.as_ref().map(|c| c.v.clone()),
        rho: certificate
            .as_ref()
            .and_then(|c| c.rho)
            .or_else(|| failure.as_ref().and_then(|f| f.rho())),
        certificate,
        failure,
        row_sum_test: built.row_sums.clone(),
        run: None,
        axioms: None,
        enumeration: None,
        decisions: built.decisions.clone(),
    }
}

/// Certificate `(c, v)`, else the declared modulus of the function.
fn modulus(built: &Built) -> Option<(f64, Vec<f64>)> {
    match &built.certificate {
        Ok(c) => Some((c.c, c.v.clone())),
        Err(_) => built
            .function
            .class()
            .modulus()
            .map(|(c, v)| (c, v.to_vec())),
    }
}

pub fn certify(file: &ScenarioFile) -> Result<Outcome, CliError> {
    let built = build(file)?;
    let report = base_report("certify", &built);
    let exit_code = if report.certified { 0 } else { 2 };
    Ok(Outcome {
        report,
        trace_csv: None,
        exit_code,
    })
}

fn schedule_for(file: &ScenarioFile, k: usize, seed: u64) -> AsyncSchedule {
    let run = &file.run;
    let mut sched = match run.schedule {
        ScheduleKind::BoundedDelay => match &run.delays {
            Some(d) => AsyncSchedule::per_user(d.clone(), seed),
            None => AsyncSchedule::bounded(k, run.d.unwrap_or(1), seed),
        },
        ScheduleKind::TotalAsync => {
            let mut s = AsyncSchedule::total(k, seed);
            if let ifc_core::engine::AsyncMode::TotalAsync { window, growth } = &mut s.mode {
                if let Some(w) = run.window {
                    *window = w;
                }
                if let Some(g) = run.growth {
                    *growth = g;
                }
            }
            s
        }
    };
    if let Some(p) = run.update_prob {
        sched = sched.with_update_prob(p);
    }
    sched
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `step, p_1..p_K, err_weighted, envelope_bound`; unavailable cells are empty.
pub fn render_trace(
    trace: &IterationTrace,
    errors: Option<&[f64]>,
    modulus: Option<f64>,
) -> Result<String, CliError> {
    let k = trace.powers.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["step".to_string()];
    header.extend((1..=k).map(|i| format!("p_{i}")));
    header.push("err_weighted".into());
    header.push("envelope_bound".into());
    w.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    let e0 = errors.and_then(|e| e.first().copied());
    for (n, p) in trace.powers.iter().enumerate() {
        let mut row = vec![n.to_string()];
        row.extend(p.iter().map(|&x| fmt_num(x)));
        row.push(errors.map_or(String::new(), |e| fmt_num(e[n])));
        row.push(match (e0, modulus) {
            (Some(e0), Some(c)) => fmt_num(envelope_bound(e0, c, n)),
            _ => String::new(),
        });
        w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn run(file: &ScenarioFile, seed: Option<u64>) -> Result<Outcome, CliError> {
    let built = build(file)?;
    let mut report = base_report("run", &built);
    let f = built.function.as_ref();
    let k = f.dim();
    let p0 = file.p0().map_err(CliError::Parse)?;
    let seed = seed.unwrap_or(file.run.seed);
    let tol = file.run.tol;
    let max_iter = file.run.max_iter;

    let (trace, sched) = match file.run.mode {
        RunMode::Sync => (run_sync(f, &p0, tol, max_iter)?, None),
        RunMode::Async => {
            let sched = schedule_for(file, k, seed);
            (run_async(f, &p0, &sched, tol, max_iter)?, Some(sched))
        }
    };

    let (p_star, source) = match &built.fixed_point {
        Some(p) => (Some(p.clone()), Some("known".to_string())),
        None => match reference_fixed_point(f, &p0, max_iter.max(REFERENCE_MIN_ITER)) {
            Ok(p) => (Some(p), Some("reference-run".to_string())),
            Err(e) => {
                log::info!("no reference fixed point: {e}");
                (None, None)
            }
        },
    };
    let modulus = modulus(&built);
    let v = match &modulus {
        Some((_, v)) => v.clone(),
        None => {
            report
                .decisions
                .push("error norm uses v = 1 (no certificate)".into());
            vec![1.0; k]
        }
    };
    let c = modulus.as_ref().map(|(c, _)| *c);
    let errors = match &p_star {
        Some(ps) => Some(trace.errors(ps, &v)?),
        None => None,
    };

    let delay = sched.as_ref().and_then(AsyncSchedule::max_delay);
    let env_mod = match (c, &sched) {
        (Some(c), None) => Some(c),
        (Some(c), Some(_)) => delay.map(|d| async_modulus(c, d)),
        (None, _) => None,
    };

    let mut section = RunSection {
        mode: match file.run.mode {
            RunMode::Sync => "sync".into(),
            RunMode::Async => "async".into(),
        },
        schedule: trace.schedule.clone(),
        steps: trace.steps(),
        stop: trace.stop,
        final_power: trace.final_power().to_vec(),
        fixed_point: p_star.clone(),
        fixed_point_source: source,
        error_weights: v.clone(),
        e0: None,
        empirical_rate: None,
        rate_note: None,
        envelope_modulus: env_mod,
        envelope: None,
        delta: None,
        t_delta_measured: None,
        t_delta_bound: None,
        t_delta_within_bound: None,
        max_staleness: trace.staleness.iter().copied().max(),
    };

    if let (Some(errors), Some(ps)) = (&errors, &p_star) {
        let e0 = errors[0];
        section.e0 = Some(e0);
        let scale = weighted_max_norm_vec(ps, &v)?;
        match rate_from_errors(errors, scale) {
            Ok(r) => section.empirical_rate = Some(r),
            Err(e) => section.rate_note = Some(e.to_string()),
        }
        if let Some(m) = env_mod {
            section.envelope = Some(envelope_check(errors, m));
        }
        if e0 > 0.0 {
            let delta = DELTA_REL * e0;
            section.delta = Some(delta);
            section.t_delta_measured = measured_convergence_time(errors, delta);
            if let Some(c) = c {
                let d = if sched.is_some() { delay } else { Some(0) };
                if let Some(d) = d {
                    if let Ok(b) = convergence_time_bound(c, e0, delta, d) {
                        section.t_delta_bound = Some(b);
                        section.t_delta_within_bound = section
                            .t_delta_measured
                            .map(|t| t as f64 <= b.ceil());
                    }
                }
            }
        }
    }

    let trace_csv = render_trace(&trace, errors.as_deref(), env_mod)?;
    let exit_code = if trace.stop == StopReason::Divergence { 3 } else { 0 };
    report.run = Some(section);
    Ok(Outcome {
        report,
        trace_csv: Some(trace_csv),
        exit_code,
    })
}

pub fn check_axioms(file: &ScenarioFile, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    let built = build(file)?;
    let mut report = base_report("check-axioms", &built);
    let f = built.function.as_ref();
    let k = f.dim();
    let mut anchors = built.anchors.clone();
    let mut scales = built.scales.clone();
    let mut sampler = Sampler::new(seed);
    if let Some(ax) = &file.axioms {
        anchors.extend(ax.anchors.iter().cloned());
        scales.extend(ax.scales.iter().copied());
        if let (Some(lo), Some(hi)) = (ax.p_lo, ax.p_hi) {
            sampler = sampler.with_power_range(lo, hi);
        }
    }
    if let Some(i) = anchors.iter().position(|a| a.len() != k) {
        return Err(CliError::Parse(crate::scenario::ParseError {
            field: format!("axioms.anchors[{i}]"),
            message: format!("expected {k} entries"),
            line: None,
            column: None,
        }));
    }
    let sampler = sampler.with_anchors(anchors, scales);

    let mut verdicts = vec![
        check_positivity(f, &sampler, samples)?,
        check_monotonicity(f, &sampler, samples)?,
        check_scalability(f, &sampler, samples)?,
        check_two_sided_scalability(f, &sampler, samples)?,
        check_dc_paracontraction(f, &sampler, samples)?,
    ];
    let (cv, v_norm) = match modulus(&built) {
        Some((c, v)) => (Some(c), v),
        None => {
            report
                .decisions
                .push("norm para-contraction uses v = 1 (no certificate)".into());
            (None, vec![1.0; k])
        }
    };
    verdicts.push(check_norm_paracontraction(f, &v_norm, &sampler, samples)?);
    if let Some(c) = cv {
        verdicts.push(check_contractivity(f, &v_norm, c, &sampler, samples)?);
        verdicts.push(check_two_sided_contractivity(f, &v_norm, c, &sampler, samples)?);
    }
    report.axioms = Some(verdicts);
    Ok(Outcome {
        report,
        trace_csv: None,
        exit_code: 0,
    })
}

pub fn enumerate(file: &ScenarioFile) -> Result<Outcome, CliError> {
    let built = build(file)?;
    let mut report = base_report("enumerate", &built);
    let mats = built.base_matrices.clone().ok_or_else(|| {
        CliError::Parse(crate::scenario::ParseError {
            field: "algorithm.family".into(),
            message: "enumeration needs a network family".into(),
            line: None,
            column: None,
        })
    })?;
    let kind = match built.family.to_string().trim_start_matches("clamped-") {
        "macro-over" => "H_r",
        _ => "M_r",
    };
    let spectra = enumerate_assignment_spectra(&mats).map_err(CliError::Certification)?;
    let worst = worst_assignment(&spectra).cloned();
    let all_below_one = spectra.iter().all(|s| s.rho < 1.0);
    let common = certify_common_v(&mats);
    let common_v_certified = common.is_ok();
    if let Some(w) = &worst {
        log::debug!(
            "worst assignment {:?}: rho = {} (row sums {:?})",
            w.assignment,
            w.rho,
            assignment_matrix(&mats, &w.assignment).row_sums()
        );
    }
    report.enumeration = Some(EnumerationSection {
        matrices: kind.into(),
        spectra,
        worst,
        all_below_one,
        common_v_certified,
        common_v_failure: common.err(),
        agree: all_below_one == common_v_certified,
    });
    Ok(Outcome {
        report,
        trace_csv: None,
        exit_code: 0,
    })
}

/// Plain-text summary for the terminal.
pub fn summary(report: &RunReport) -> String {
    let mut out = format!("{} [{}] K = {}\n", report.command, report.family, report.users);
    match (&report.certificate, &report.failure) {
        (Some(c), _) => out.push_str(&format!(
            "certificate: {} c = {:.12} rho = {}\n  v = {:?}\n",
            c.method.label(),
            c.c,
            c.rho.map_or("-".into(), |r| format!("{r:.12}")),
            c.v
        )),
        (None, Some(f)) => out.push_str(&format!("no certificate: {f}\n")),
        _ => {}
    }
    if let Some(rs) = &report.row_sum_test {
        out.push_str(&format!(
            "row-sum test: {} {:?}\n",
            if rs.passes { "pass" } else { "fail" },
            rs.norms
        ));
    }
    if let Some(r) = &report.run {
        out.push_str(&format!("run: {} steps, stop = {:?}\n", r.steps, r.stop));
        if let Some(p) = &r.fixed_point {
            out.push_str(&format!("  p* = {p:?}\n"));
        }
        if let Some(rate) = &r.empirical_rate {
            out.push_str(&format!(
                "  empirical rate = {:.6}{}\n",
                rate.rate,
                if rate.sublinear { " (sub-linear)" } else { "" }
            ));
        }
        if let Some(env) = &r.envelope {
            out.push_str(&format!(
                "  envelope (modulus {:.6}): {}\n",
                r.envelope_modulus.unwrap_or(f64::NAN),
                if env.passed { "pass" } else { "FAIL" }
            ));
        }
        if let (Some(t), Some(b)) = (r.t_delta_measured, r.t_delta_bound) {
            out.push_str(&format!("  T_delta = {t} (bound {b:.3})\n"));
        }
    }
    if let Some(ax) = &report.axioms {
        for v in ax {
            out.push_str(&format!(
                "  {:<26} {}{}\n",
                v.axiom.label(),
                if v.passed { "PASS" } else { "FAIL" },
                v.witness
                    .as_ref()
                    .map_or(String::new(), |w| format!("  witness {w:?}"))
            ));
        }
    }
    if let Some(e) = &report.enumeration {
        for s in &e.spectra {
            let one_based: Vec<usize> = s.assignment.iter().map(|x| x + 1).collect();
            out.push_str(&format!("  {one_based:?} rho = {:.12}\n", s.rho));
        }
        out.push_str(&format!(
            "  all rho < 1: {}, common-v certified: {}, agree: {}\n",
            e.all_below_one, e.common_v_certified, e.agree
        ));
    }
    for d in &report.decisions {
        out.push_str(&format!("decision: {d}\n"));
    }
    out
}
