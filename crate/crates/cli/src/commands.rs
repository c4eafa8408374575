use std::fs;
use std::path::Path;
use std::time::Instant;

use nsc_core::cache::ScoreCache;
use nsc_core::ensembles::{generate, EnsembleSpec};
use nsc_core::matrix::sidecar_path;
use nsc_core::{
    exhaustive_alpha, find_max_certified_k_with, null_space_basis, pick_l_bound,
    pick_l_optimized_bound, pick_one_bound, sandwich_with_scores, score_all_subsets, BoundMethod,
    DenseMatrix, Error, MatrixKind, MatrixMeta, Method, Result, SandwichTrace, ScoreTable,
    Settings, VerificationReport,
};
use serde::Serialize;

use crate::input::{load_basis, Loaded, RunInputs};
use crate::{
    BoundArgs, ExactArgs, GenArgs, MatrixArgs, ModeArg, NullspaceArgs, OracleArgs, VerifyArgs,
};

pub enum Status {
    Done,
    NotCertified(String),
}

#[derive(Serialize)]
struct SingleReport<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    inputs: &'a RunInputs,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    max_certified_k: Option<usize>,
    reports: &'a [VerificationReport],
    inputs: &'a RunInputs,
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(args: &MatrixArgs, command: &'static str) -> Result<Loaded> {
    load_basis(
        &args.matrix,
        args.as_basis,
        &args.settings(),
        command,
        !args.no_cache,
    )
}

fn scores(h: &DenseMatrix, l: usize, settings: &Settings, cache: bool) -> Result<ScoreTable> {
    if cache {
        ScoreCache::from_env().scores(h, l, settings)
    } else {
        score_all_subsets(h, l, settings)
    }
}

fn certification(report: &VerificationReport, required: bool) -> Status {
    if required && !report.nsc_certified {
        Status::NotCertified(format!(
            "alpha_{} = {} is not below 1/2",
            report.k, report.alpha
        ))
    } else {
        Status::Done
    }
}

pub fn gen(args: &GenArgs) -> Result<Status> {
    let spec = EnsembleSpec::new(args.ensemble.into(), args.rows, args.cols, args.seed);
    let generated = generate(&spec)?;
    generated.matrix.write_csv(&args.out)?;
    let meta = MatrixMeta {
        kind: MatrixKind::A,
        rows: args.rows,
        cols: args.cols,
        ensemble: Some(spec.kind.to_string()),
        seed: Some(generated.seed),
        requested_seed: (generated.seed != args.seed).then_some(args.seed),
    };
    meta.write(sidecar_path(&args.out))?;
    Ok(Status::Done)
}

pub fn nullspace(args: &NullspaceArgs) -> Result<Status> {
    let a = DenseMatrix::read_csv(&args.matrix)?;
    let source = MatrixMeta::read(sidecar_path(&args.matrix)).ok();
    if source.as_ref().is_some_and(|m| m.kind == MatrixKind::H) {
        return Err(Error::Argument(format!(
            "{} is already a null-space basis",
            args.matrix.display()
        )));
    }
    let basis = null_space_basis(&a, args.basis_tol)?;
    basis.h.write_csv(&args.out)?;
    let meta = MatrixMeta {
        kind: MatrixKind::H,
        rows: basis.h.rows(),
        cols: basis.h.cols(),
        ensemble: source.as_ref().and_then(|m| m.ensemble.clone()),
        seed: source.as_ref().and_then(|m| m.seed),
        requested_seed: source.and_then(|m| m.requested_seed),
    };
    meta.write(sidecar_path(&args.out))?;
    log::info!("null-space residual {:e}", basis.residual);
    Ok(Status::Done)
}

pub fn bound(args: &BoundArgs) -> Result<Status> {
    let started = Instant::now();
    let Loaded { h, inputs } = load(&args.input, "bound")?;
    let settings = args.input.settings();
    let method: BoundMethod = args.method.into();
    let l = if method == BoundMethod::Pick1 {
        1
    } else {
        args.l
    };
    if l == 0 || l >= h.rows() {
        return Err(Error::Argument(format!("need 1 <= l < n, got l = {l}")));
    }
    let table = scores(&h, l, &settings, inputs.cache)?;
    let bound = match method {
        BoundMethod::Pick1 => pick_one_bound(&table, args.k)?,
        BoundMethod::PickL => pick_l_bound(&table, args.k)?,
        BoundMethod::PickLOptimized => pick_l_optimized_bound(&table, args.k, &settings)?,
    };
    let mut report = VerificationReport::new(&h, args.k, l, bound.bound, Method::Bound(method));
    report.wall_seconds = started.elapsed().as_secs_f64();
    emit(
        &SingleReport {
            report: &report,
            inputs: &inputs,
        },
        args.report.as_deref(),
    )?;
    Ok(certification(&report, args.require_certified))
}

pub fn exact(args: &ExactArgs) -> Result<Status> {
    let started = Instant::now();
    let Loaded { h, inputs } = load(&args.input, "exact")?;
    let settings = args.input.settings();
    if args.l == 0 || args.l > args.k || args.k >= h.rows() {
        return Err(Error::Argument(format!(
            "need 1 <= l <= k < n, got l = {}, k = {}, n = {}",
            args.l,
            args.k,
            h.rows()
        )));
    }
    let table = scores(&h, args.l, &settings, inputs.cache)?;
    let mut trace = SandwichTrace::default();
    let outcome = sandwich_with_scores(&h, &table, args.k, &settings, &mut trace);
    // The trace is written even when the run fails part way.
    if let Some(path) = &args.trace {
        fs::write(path, trace.to_csv_string())?;
    }
    let mut report = outcome?.report;
    report.wall_seconds = started.elapsed().as_secs_f64();
    emit(
        &SingleReport {
            report: &report,
            inputs: &inputs,
        },
        args.report.as_deref(),
    )?;
    Ok(certification(&report, args.require_certified))
}

pub fn oracle(args: &OracleArgs) -> Result<Status> {
    let started = Instant::now();
    let Loaded { h, inputs } = load(&args.input, "oracle")?;
    let settings = args.input.settings();
    let (alpha, best) = exhaustive_alpha(&h, args.k, &settings)?;
    let mut report = VerificationReport::new(&h, args.k, args.k, alpha.alpha, Method::Exact);
    report.steps_examined = Some(nsc_core::combinatorics::binomial(h.rows(), args.k) as u64);
    report.best_set = Some(best);
    report.wall_seconds = started.elapsed().as_secs_f64();
    emit(
        &SingleReport {
            report: &report,
            inputs: &inputs,
        },
        args.report.as_deref(),
    )?;
    Ok(certification(&report, args.require_certified))
}

pub fn verify(args: &VerifyArgs) -> Result<Status> {
    let Loaded { h, inputs } = load(&args.input, "verify")?;
    let settings = args.input.settings();
    let mode = match args.mode {
        ModeArg::Exact => Method::Exact,
        ModeArg::Pick1 => Method::Bound(BoundMethod::Pick1),
        ModeArg::Pickl => Method::Bound(BoundMethod::PickL),
        ModeArg::Opt => Method::Bound(BoundMethod::PickLOptimized),
    };
    let cache = inputs.cache;
    let reports = find_max_certified_k_with(&h, args.kmax, args.l, mode, &settings, &mut |l| {
        scores(&h, l, &settings, cache)
    })?;
    let max_certified_k = reports.first().and_then(|r| r.max_certified_k);
    emit(
        &SweepReport {
            max_certified_k,
            reports: &reports,
            inputs: &inputs,
        },
        args.report.as_deref(),
    )?;
    if args.require_certified && max_certified_k.is_none() {
        return Ok(Status::NotCertified(
            "no k in the sweep is certified".into(),
        ));
    }
    Ok(Status::Done)
}
