//! Seeded sensing-matrix generators.
//!
//! All generators draw from `ChaCha8Rng::seed_from_u64(seed)`, so a seed maps
//! to the same matrix on every platform.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::nullspace::numerical_rank;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Gaussian,
    Bernoulli,
    #[serde(rename = "fourier")]
    PartialFourier,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::Gaussian => "gaussian",
            EnsembleKind::Bernoulli => "bernoulli",
            EnsembleKind::PartialFourier => "fourier",
        })
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(EnsembleKind::Gaussian),
            "bernoulli" => Ok(EnsembleKind::Bernoulli),
            "fourier" | "partial-fourier" | "partialfourier" => Ok(EnsembleKind::PartialFourier),
            other => Err(Error::Argument(format!("unknown ensemble {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, rows: usize, cols: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind,
            rows,
            cols,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub matrix: DenseMatrix,
    /// Seed that produced `matrix`; differs from the requested one only when
    /// a rank-deficient Gaussian draw was redrawn.
    pub seed: u64,
}

const MAX_REDRAWS: u64 = 64;

pub fn generate(spec: &EnsembleSpec) -> Result<Generated> {
    if spec.rows == 0 || spec.rows >= spec.cols {
        return Err(Error::Argument(format!(
            "ensemble needs 0 < rows < cols, got {}x{}",
            spec.rows, spec.cols
        )));
    }
    match spec.kind {
        EnsembleKind::Gaussian => {
            for bump in 0..MAX_REDRAWS {
                let seed = spec.seed.wrapping_add(bump);
                let matrix = gaussian(spec.rows, spec.cols, seed, 1.0);
                if numerical_rank(&matrix.transpose()) == spec.rows {
                    return Ok(Generated { matrix, seed });
                }
                log::warn!("gaussian draw with seed {seed} is rank deficient, redrawing");
            }
            Err(Error::NumericalBreakdown(format!(
                "{MAX_REDRAWS} consecutive rank-deficient gaussian draws"
            )))
        }
        EnsembleKind::Bernoulli => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let data = (0..spec.rows * spec.cols)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect();
            Ok(Generated {
                matrix: DenseMatrix::new(spec.rows, spec.cols, data)?,
                seed: spec.seed,
            })
        }
        EnsembleKind::PartialFourier => Ok(Generated {
            matrix: partial_fourier(spec.rows, spec.cols, spec.seed)?,
            seed: spec.seed,
        }),
    }
}

/// i.i.d. `N(0, sd²)` entries; used directly for random `H` as well.
pub fn gaussian(rows: usize, cols: usize, seed: u64, sd: f64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols)
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    DenseMatrix::new(rows, cols, data).expect("gaussian samples are finite")
}

#[derive(Debug, Clone, Copy)]
enum Harmonic {
    Cos(usize),
    Sin(usize),
}

/// Nonzero real harmonics of length `n`: cosines for `q = 0..=n/2` and sines
/// for `q = 1..ceil(n/2)`. There are exactly `n` of them and they are
/// mutually orthogonal.
fn real_harmonics(n: usize) -> Vec<Harmonic> {
    let mut out: Vec<Harmonic> = (0..=n / 2).map(Harmonic::Cos).collect();
    out.extend((1..n.div_ceil(2)).map(Harmonic::Sin));
    out
}

fn partial_fourier(rows: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    let harmonics = real_harmonics(n);
    if rows > harmonics.len() {
        return Err(Error::Argument(format!(
            "only {} distinct real harmonics of length {n}",
            harmonics.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, harmonics.len(), rows).into_vec();
    picked.sort_unstable();

    let scale = (2.0 / n as f64).sqrt();
    let mut m = DenseMatrix::zeros(rows, n);
    for (r, &idx) in picked.iter().enumerate() {
        for t in 0..n {
            let angle = |q: usize| 2.0 * PI * ((q * t) % n) as f64 / n as f64;
            m[(r, t)] = scale
                * match harmonics[idx] {
                    Harmonic::Cos(q) => angle(q).cos(),
                    Harmonic::Sin(q) => angle(q).sin(),
                };
        }
    }
    Ok(m)
}
