use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use pav_core::election::{ActiveSet, CandidateSet, ElectionInstance};
use pav_core::lp::{check_farkas, solve_feasibility, verify_farkas, LpVerdict};
use pav_core::proof::{
    build_program3, check_proposition1, enumerate_histories, inequality_scan, DeviationShape, SearchOptions,
};
use pav_core::rules::{global_pav, local_pav, recursive_pav_with, score, RuleStatus, SearchConfig, Start};
use pav_core::stability::{find_deviation, Quota};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::files::{to_indices, to_set, CertificateFile, ProfileFile};
use crate::{Mode, RuleArg, Settings};

const CERT_SUFFIX: &str = ".cert.json";

fn emit(settings: &Settings, report: &Value, text: impl FnOnce() -> String) {
    if settings.json {
        println!("{}", serde_json::to_string_pretty(report).expect("serialisable report"));
    } else {
        println!("{}", text());
    }
}

fn load(path: &Path) -> anyhow::Result<ElectionInstance> {
    ProfileFile::read(path)?.instance()
}

pub fn verify_core(settings: &Settings, profile: &Path, committee: &[usize], quota: Quota) -> anyhow::Result<u8> {
    let instance = load(profile)?;
    let w = to_set(committee, instance.m())?;
    if w.len() != instance.k() || w.len() != committee.len() {
        bail!("committee must list {} distinct candidates", instance.k());
    }
    let Some(report) = find_deviation(&instance, w, quota)? else {
        let value = json!({ "stable": true, "committee": to_indices(w), "quota": quota.to_string() });
        emit(settings, &value, || format!("stable: {w} is in the {quota} core"));
        return Ok(0);
    };
    let value = json!({
        "stable": false,
        "committee": to_indices(w),
        "quota": quota.to_string(),
        "deviation": to_indices(report.deviation),
        "support": report.support.to_string(),
        "threshold": report.threshold.to_string(),
        "supporters": report.supporters.iter().map(|a| to_indices(*a)).collect::<Vec<_>>(),
    });
    emit(settings, &value, || {
        let supporters: Vec<String> = report.supporters.iter().map(|a| a.to_string()).collect();
        format!(
            "deviation: T = {}\nsupport {} (threshold {}, {quota} quota)\nsupporters: {}",
            report.deviation,
            report.support,
            report.threshold,
            supporters.join(" ")
        )
    });
    Ok(1)
}

fn prepare_out(out: Option<&Path>) -> anyhow::Result<Option<PathBuf>> {
    let Some(dir) = out else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(Some(dir.to_path_buf()))
}

fn write_summary(out: Option<&Path>, value: &Value) -> anyhow::Result<()> {
    if let Some(dir) = out {
        let path = dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(value)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn prove(settings: &Settings, mode: Mode, k: usize, m: Option<usize>, out: Option<&Path>) -> anyhow::Result<u8> {
    if k == 0 {
        bail!("k must be positive");
    }
    let out = prepare_out(out)?;
    match mode {
        Mode::Inequality => prove_inequality(settings, k, out.as_deref()),
        Mode::Program3 => prove_program3(settings, k, out.as_deref()),
        Mode::Histories => {
            let Some(m) = m else {
                bail!("--m is required with --mode histories");
            };
            prove_histories(settings, m, k, out.as_deref())
        }
    }
}

fn prove_inequality(settings: &Settings, k: usize, out: Option<&Path>) -> anyhow::Result<u8> {
    let violations = inequality_scan(k);
    let value = json!({
        "mode": "inequality",
        "k": k,
        "holds": violations.is_empty(),
        "violations": violations.iter().map(|v| json!({
            "shape": { "size": v.shape.size, "overlap": v.shape.overlap },
            "a": v.a, "b": v.b, "c": v.c,
            "delta": v.delta.to_string(),
            "bound": v.bound.to_string(),
        })).collect::<Vec<_>>(),
    });
    write_summary(out, &value)?;
    emit(settings, &value, || {
        let mut lines = vec![format!("k = {k}: {} violations", violations.len())];
        for v in &violations {
            lines.push(format!(
                "shape {}: a = {}, b = {}, c = {}, delta = {} <= {}",
                v.shape, v.a, v.b, v.c, v.delta, v.bound
            ));
        }
        lines.join("\n")
    });
    Ok(if violations.is_empty() { 0 } else { 1 })
}

enum ShapeResult {
    Infeasible,
    Feasible,
    Skipped,
}

fn prove_program3(settings: &Settings, k: usize, out: Option<&Path>) -> anyhow::Result<u8> {
    let started = Instant::now();
    let shapes = DeviationShape::all(k);
    let results = shapes
        .par_iter()
        .map(|&shape| -> anyhow::Result<ShapeResult> {
            if settings.budget.is_some_and(|b| started.elapsed() > b) {
                return Ok(ShapeResult::Skipped);
            }
            let system = build_program3(k, shape)?;
            match solve_feasibility(&system) {
                LpVerdict::Feasible(_) => Ok(ShapeResult::Feasible),
                LpVerdict::Infeasible(certificate) => {
                    anyhow::ensure!(verify_farkas(&system, &certificate)?, "certificate for {shape} does not verify");
                    if let Some(dir) = out {
                        let name = format!("program3_k{k}_{}-{}{CERT_SUFFIX}", shape.size, shape.overlap);
                        CertificateFile::for_shape(k, shape, &certificate).write(&dir.join(name))?;
                    }
                    Ok(ShapeResult::Infeasible)
                }
            }
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let feasible: Vec<DeviationShape> = shapes
        .iter()
        .zip(&results)
        .filter(|(_, r)| matches!(r, ShapeResult::Feasible))
        .map(|(s, _)| *s)
        .collect();
    let complete = !results.iter().any(|r| matches!(r, ShapeResult::Skipped));
    let infeasible = results.iter().filter(|r| matches!(r, ShapeResult::Infeasible)).count();
    let value = json!({
        "mode": "program3",
        "k": k,
        "complete": complete,
        "shapes": shapes.len(),
        "infeasible": infeasible,
        "feasible": feasible.iter().map(|s| json!({ "size": s.size, "overlap": s.overlap })).collect::<Vec<_>>(),
        "holds": complete && feasible.is_empty(),
    });
    write_summary(out, &value)?;
    emit(settings, &value, || {
        let mut lines = vec![format!(
            "k = {k}: {infeasible} of {} shapes infeasible in {:.1?}",
            shapes.len(),
            started.elapsed()
        )];
        lines.extend(feasible.iter().map(|s| format!("feasible: shape {s}")));
        if !complete {
            lines.push("budget exceeded; bundle is partial".into());
        }
        lines.join("\n")
    });
    Ok(if !complete {
        3
    } else if feasible.is_empty() {
        0
    } else {
        1
    })
}

fn prove_histories(settings: &Settings, m: usize, k: usize, out: Option<&Path>) -> anyhow::Result<u8> {
    if k > m {
        bail!("k = {k} exceeds m = {m}");
    }
    let started = Instant::now();
    let options = SearchOptions {
        budget: settings.budget,
        ..SearchOptions::default()
    };
    let enumeration = enumerate_histories(m, k, &options)?;
    if let Some(dir) = out {
        enumeration.rejected.par_iter().try_for_each(|r| {
            let name = format!("{}{CERT_SUFFIX}", r.history.encode());
            CertificateFile::for_history(&r.history, &r.certificate).write(&dir.join(name))
        })?;
    }
    let prop1 = check_proposition1(&enumeration.history_list(), k);
    let histories: Vec<Value> = enumeration
        .histories
        .iter()
        .map(|h| {
            json!({
                "steps": h.history.steps().iter().map(|s| json!({
                    "W": to_indices(s.committee),
                    "T": to_indices(s.deviation),
                })).collect::<Vec<_>>(),
                "deviation_mass": h.history.deviation_mass(),
                "witness": h.witness.as_ref().map(|p| {
                    let instance = ElectionInstance::new(p.clone(), k).expect("witness has m candidates");
                    ProfileFile::from_instance(&instance)
                }),
            })
        })
        .collect();
    let value = json!({
        "mode": "histories",
        "m": m,
        "k": k,
        "complete": enumeration.complete,
        "histories": histories,
        "certificates": enumeration.rejected.len(),
        "deviations_within_k": prop1,
        "holds": enumeration.complete && prop1,
    });
    write_summary(out, &value)?;
    emit(settings, &json!({
        "mode": "histories",
        "m": m,
        "k": k,
        "complete": enumeration.complete,
        "histories": enumeration.histories.iter().map(|h| h.history.to_string()).collect::<Vec<_>>(),
        "certificates": enumeration.rejected.len(),
        "deviations_within_k": prop1,
    }), || {
        let mut lines = vec![format!(
            "m = {m}, k = {k}: {} histories, {} certificates in {:.1?}",
            enumeration.histories.len(),
            enumeration.rejected.len(),
            started.elapsed()
        )];
        lines.extend(enumeration.histories.iter().map(|h| format!("  {}", h.history)));
        lines.push(format!("every history has total deviation size at most k: {prop1}"));
        if !enumeration.complete {
            lines.push("budget exceeded; bundle is partial".into());
        }
        lines.join("\n")
    });
    Ok(if !enumeration.complete {
        3
    } else if prop1 {
        0
    } else {
        1
    })
}

fn check_file(path: &Path) -> anyhow::Result<Result<(), String>> {
    let file = CertificateFile::read(path)?;
    let system = file.system()?;
    let certificate = file.certificate(system.num_rows())?;
    Ok(check_farkas(&system, &certificate)?.map_err(|f| f.to_string()))
}

pub fn check_certificates(settings: &Settings, bundle: &Path) -> anyhow::Result<u8> {
    let started = Instant::now();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(bundle)
        .with_context(|| format!("reading {}", bundle.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(CERT_SUFFIX)));
    paths.sort();
    let verdicts: Vec<Result<(), String>> = paths
        .par_iter()
        .map(|p| check_file(p).unwrap_or_else(|e| Err(format!("{e:#}"))))
        .collect();
    let failures = verdicts.iter().filter(|v| v.is_err()).count();
    let name = |p: &PathBuf| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let value = json!({
        "certificates": paths.len(),
        "failures": failures,
        "seconds": started.elapsed().as_secs_f64(),
        "files": paths.iter().zip(&verdicts).map(|(p, v)| json!({
            "file": name(p),
            "ok": v.is_ok(),
            "reason": v.as_ref().err(),
        })).collect::<Vec<_>>(),
    });
    emit(settings, &value, || {
        let mut lines: Vec<String> = paths
            .iter()
            .zip(&verdicts)
            .map(|(p, v)| match v {
                Ok(()) => format!("ok    {}", name(p)),
                Err(why) => format!("FAIL  {}: {why}", name(p)),
            })
            .collect();
        if paths.is_empty() {
            lines.push("warning: no certificates found".into());
        }
        lines.push(format!(
            "{} certificates, {} passed, {failures} failed in {:.1?}",
            paths.len(),
            paths.len() - failures,
            started.elapsed()
        ));
        lines.join("\n")
    });
    Ok(if failures == 0 { 0 } else { 1 })
}

fn committee_json(instance: &ElectionInstance, w: CandidateSet) -> Value {
    json!({ "committee": to_indices(w), "score": score(instance.profile(), w).to_string() })
}

pub fn rule(
    settings: &Settings,
    profile: &Path,
    rule: RuleArg,
    quota: Quota,
    start: Option<&[usize]>,
) -> anyhow::Result<u8> {
    let instance = load(profile)?;
    let mut config = SearchConfig::default();
    if let Some(start) = start {
        let w = to_set(start, instance.m())?;
        if w.len() != instance.k() || w.len() != start.len() {
            bail!("start committee must list {} distinct candidates", instance.k());
        }
        config.start = Start::Committee(w);
    }
    let scored = |w: CandidateSet| format!("{w} score {}", score(instance.profile(), w));
    match rule {
        RuleArg::PavLocal => {
            let active = ActiveSet::all(instance.profile());
            let w = local_pav(&instance, CandidateSet::EMPTY, &active, &config);
            emit(settings, &committee_json(&instance, w), || scored(w));
            Ok(0)
        }
        RuleArg::PavGlobal => {
            let all = global_pav(&instance)?;
            let value = json!({ "committees": all.iter().map(|&w| committee_json(&instance, w)).collect::<Vec<_>>() });
            emit(settings, &value, || all.iter().map(|&w| scored(w)).collect::<Vec<_>>().join("\n"));
            Ok(0)
        }
        RuleArg::RecursivePav => {
            let outcome = recursive_pav_with(&instance, quota, &config)?;
            let success = outcome.status == RuleStatus::Success;
            let value = json!({
                "status": if success { "success" } else { "failed" },
                "quota": quota.to_string(),
                "committee": to_indices(outcome.committee),
                "score": score(instance.profile(), outcome.committee).to_string(),
                "trace": outcome.trace.iter().map(|s| json!({
                    "W": to_indices(s.committee),
                    "T": to_indices(s.deviation),
                })).collect::<Vec<_>>(),
            });
            emit(settings, &value, || {
                let mut lines: Vec<String> = outcome
                    .trace
                    .iter()
                    .enumerate()
                    .map(|(t, s)| format!("step {}: W = {}, T = {}", t + 1, s.committee, s.deviation))
                    .collect();
                if success {
                    lines.push(format!("core-stable ({quota}): {}", scored(outcome.committee)));
                } else {
                    lines.push(format!("failed: fixed candidates exceed k = {}", instance.k()));
                }
                lines.join("\n")
            });
            Ok(if success { 0 } else { 1 })
        }
    }
}
