use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use kernelguard::classifier::{classify_commit, is_risky_commit, render_report, render_report_jsonl, ClassificationResult};
use kernelguard::corpus::{
    build_snapshots, ingest_changes, ingest_clonebench, parse_method_changes_jsonl, read_series, write_series,
    ChangeRecord, CorpusError, InputFormat,
};
use kernelguard::evaluation::{
    clone_table, defect_table, run_clone_eval, run_defect_eval, CloneEvalConfig, CloneEvalReport, CloneScope,
    DefectEvalConfig, DefectEvalReport,
};
use serde::Serialize;

use crate::settings::Settings;

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn load_records(path: &Path) -> Result<Vec<ChangeRecord>> {
    ingest_changes(path, InputFormat::from_path(path)).with_context(|| format!("reading {}", path.display()))
}

/// Keeps one project's records; without a selection the corpus must hold a
/// single project.
fn select_project(records: Vec<ChangeRecord>, project: Option<&str>) -> Result<Vec<ChangeRecord>> {
    if let Some(p) = project {
        let kept: Vec<ChangeRecord> = records.into_iter().filter(|r| r.project == p).collect();
        if kept.is_empty() {
            bail!("no changes for project {p:?}");
        }
        return Ok(kept);
    }
    let mut names: Vec<&str> = records.iter().map(|r| r.project.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() > 1 {
        bail!("corpus holds {} projects ({}); pick one with --project", names.len(), names.join(", "));
    }
    Ok(records)
}

pub fn index(corpus: &Path, out_path: &Path, settings: &Settings, out: &mut impl Write) -> Result<ExitCode> {
    let records = select_project(load_records(corpus)?, settings.project.as_deref())?;
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus).with_context(|| corpus.display().to_string());
    }
    let series = build_snapshots(records)?;
    let mut w = BufWriter::new(File::create(out_path).with_context(|| format!("cannot create {}", out_path.display()))?);
    write_series(&series, &mut w)?;
    w.flush()?;

    let snapshots = series.snapshots();
    writeln!(out, "project {}", series.project())?;
    for (period, snap) in &snapshots {
        writeln!(
            out,
            "snapshot {:>3}  {}  {} records",
            period.index,
            period.start.format("%Y-%m"),
            snap.len()
        )?;
    }
    writeln!(out, "{} snapshots", snapshots.len())?;
    Ok(ExitCode::SUCCESS)
}

pub fn classify(
    index: &Path,
    payload: &Path,
    settings: &Settings,
    json: bool,
    save: Option<&Path>,
    out: &mut impl Write,
) -> Result<ExitCode> {
    let cfg = settings.classifier_config()?;
    let series = read_series(open(index)?).with_context(|| format!("reading index {}", index.display()))?;
    let methods = parse_method_changes_jsonl(open(payload)?).with_context(|| format!("reading {}", payload.display()))?;
    if methods.is_empty() {
        bail!("{} holds no method changes", payload.display());
    }
    let results = classify_commit(&methods, &series, &cfg)?;
    if let Some(path) = save {
        save_json(&results, path)?;
    }
    write_results(&results, json, out)?;
    Ok(verdict(&results))
}

fn write_results(results: &[ClassificationResult], json: bool, out: &mut impl Write) -> Result<()> {
    let text = if json {
        render_report_jsonl(results)
    } else {
        render_report(results)
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn verdict(results: &[ClassificationResult]) -> ExitCode {
    if is_risky_commit(results) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

pub fn evaluate_defects(
    dataset: &Path,
    settings: &Settings,
    json: bool,
    save: Option<&Path>,
    out: &mut impl Write,
) -> Result<ExitCode> {
    let mut records = load_records(dataset)?;
    if let Some(p) = &settings.project {
        records.retain(|r| &r.project == p);
    }
    let mut cfg = DefectEvalConfig::new(settings.classifier_config()?);
    cfg.evaluate_from = settings.evaluate_from;
    let report = run_defect_eval(records, &cfg)?;
    for (project, why) in &report.skipped_projects {
        log::warn!("skipped project {project}: {why}");
    }
    if report.skipped_queries > 0 {
        log::warn!("{} queries had no usable tree and were skipped", report.skipped_queries);
    }
    emit(&report, defect_table(&report), json, save, out)?;
    if report.time_violations > 0 {
        bail!("time-safety audit failed: {} records from the future were consulted", report.time_violations);
    }
    Ok(ExitCode::SUCCESS)
}

pub fn evaluate_clones(
    dataset: &Path,
    settings: &Settings,
    json: bool,
    save: Option<&Path>,
    out: &mut impl Write,
) -> Result<ExitCode> {
    let mut bench = ingest_clonebench(dataset).with_context(|| format!("reading {}", dataset.display()))?;
    if let Some(p) = &settings.project {
        bench.entries.retain(|e| e.project.as_deref() == Some(p.as_str()));
    }
    let scope = settings.scope.unwrap_or(if settings.types.is_some() {
        CloneScope::ByCloneType
    } else {
        CloneScope::InterProjectByFunctionality
    });
    let mut cfg = CloneEvalConfig::new(settings.kernel_config()?, scope);
    cfg.min_lines = settings.min_lines;
    if let Some(types) = &settings.types {
        cfg.types = types.clone();
    }
    let report = run_clone_eval(&bench, &cfg)?;
    if !report.unparsed.is_empty() {
        log::warn!("{} entries could not be parsed and were skipped", report.unparsed.len());
    }
    emit(&report, clone_table(&report), json, save, out)?;
    Ok(ExitCode::SUCCESS)
}

fn emit<T: Serialize>(report: &T, table: String, json: bool, save: Option<&Path>, out: &mut impl Write) -> Result<()> {
    if let Some(path) = save {
        save_json(report, path)?;
    }
    if json {
        serde_json::to_writer_pretty(&mut *out, report)?;
        writeln!(out)?;
    } else {
        out.write_all(table.as_bytes())?;
    }
    Ok(())
}

/// Re-renders a saved `classify` result set or evaluation report. For
/// classifications the exit code again reflects the verdict.
pub fn report(results: &Path, json: bool, out: &mut impl Write) -> Result<ExitCode> {
    let text = fs::read_to_string(results).with_context(|| format!("cannot open {}", results.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not JSON", results.display()))?;
    let parse_err = || format!("{} is not a saved result set", results.display());
    if value.is_array() {
        let res: Vec<ClassificationResult> = serde_json::from_value(value).with_context(parse_err)?;
        write_results(&res, json, out)?;
        return Ok(verdict(&res));
    }
    if value.get("projects").is_some() {
        let r: DefectEvalReport = serde_json::from_value(value).with_context(parse_err)?;
        emit(&r, defect_table(&r), json, None, out)?;
    } else if value.get("groups").is_some() {
        let r: CloneEvalReport = serde_json::from_value(value).with_context(parse_err)?;
        emit(&r, clone_table(&r), json, None, out)?;
    } else {
        bail!(parse_err());
    }
    Ok(ExitCode::SUCCESS)
}
