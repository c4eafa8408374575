use std::path::Path;

use nsc_core::matrix::sidecar_path;
use nsc_core::{null_space_basis, DenseMatrix, MatrixKind, MatrixMeta, Result, Settings};
use serde::Serialize;

/// Everything needed to rerun a command, echoed into its report.
#[derive(Debug, Clone, Serialize)]
pub struct RunInputs {
    pub command: &'static str,
    pub matrix: String,
    pub matrix_sha256: String,
    pub input_kind: MatrixKind,
    pub ensemble: Option<String>,
    pub seed: Option<u64>,
    pub settings: Settings,
    pub cache: bool,
}

pub struct Loaded {
    pub h: DenseMatrix,
    pub inputs: RunInputs,
}

/// Reads a matrix and returns a null-space basis for it. The sidecar decides
/// whether the file holds A or H; without one, a wide matrix is taken as A.
pub fn load_basis(
    path: &Path,
    as_basis: bool,
    settings: &Settings,
    command: &'static str,
    cache: bool,
) -> Result<Loaded> {
    let raw = DenseMatrix::read_csv(path)?;
    let meta = MatrixMeta::read(sidecar_path(path)).ok();
    let kind = if as_basis {
        MatrixKind::H
    } else if let Some(m) = &meta {
        m.kind
    } else if raw.rows() < raw.cols() {
        MatrixKind::A
    } else {
        MatrixKind::H
    };
    let inputs = RunInputs {
        command,
        matrix: path.display().to_string(),
        matrix_sha256: raw.content_hash(),
        input_kind: kind,
        ensemble: meta.as_ref().and_then(|m| m.ensemble.clone()),
        seed: meta.as_ref().and_then(|m| m.seed),
        settings: *settings,
        cache,
    };
    let h = match kind {
        MatrixKind::H => raw,
        MatrixKind::A => null_space_basis(&raw, settings.basis_tol)?.h,
    };
    Ok(Loaded { h, inputs })
}
