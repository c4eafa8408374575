//! On-disk cache for score tables, keyed by matrix content hash and subset
//! size.

use std::fs;
use std::path::{Path, PathBuf};

use crate::bounds::{score_all_subsets, ScoreTable};
use crate::error::Result;
use crate::matrix::DenseMatrix;
use crate::settings::Settings;

pub const CACHE_DIR_ENV: &str = "NSC_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct ScoreCache {
    dir: PathBuf,
}

impl ScoreCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ScoreCache { dir: dir.into() }
    }

    /// `$NSC_CACHE_DIR`, falling back to `<tmp>/nsc-cache`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("nsc-cache"));
        Self::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, h: &DenseMatrix, l: usize) -> PathBuf {
        self.dir.join(format!("{}_l{}.csv", h.content_hash(), l))
    }

    /// Cached table, or `None` when absent or unreadable.
    pub fn load(&self, h: &DenseMatrix, l: usize) -> Option<ScoreTable> {
        let path = self.path_for(h, l);
        let text = fs::read_to_string(&path).ok()?;
        match ScoreTable::from_csv_str(h.rows(), l, &text) {
            Ok(table) => Some(table),
            Err(e) => {
                log::warn!("ignoring corrupt score cache {}: {e}", path.display());
                None
            }
        }
    }

    pub fn store(&self, h: &DenseMatrix, table: &ScoreTable) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(h, table.l());
        // Write-then-rename so concurrent readers never see a partial file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, table.to_csv_string())?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Loads the table or computes and stores it.
    pub fn scores(&self, h: &DenseMatrix, l: usize, settings: &Settings) -> Result<ScoreTable> {
        if let Some(table) = self.load(h, l) {
            return Ok(table);
        }
        let table = score_all_subsets(h, l, settings)?;
        if let Err(e) = self.store(h, &table) {
            log::warn!("could not write score cache: {e}");
        }
        Ok(table)
    }
}
