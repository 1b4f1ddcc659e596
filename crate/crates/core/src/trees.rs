//! Exact spanning-tree counts via the Matrix-Tree theorem.
//!
//! κ(G) is the determinant of the Laplacian with row 0 and column 0 removed,
//! computed by Bareiss fraction-free elimination over big integers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{
    build_cayley_serre, is_connected, laplacian, level_size, GraphError, Multigraph,
};
use crate::padic::{split_prime_part, Prime};
use crate::seed::SeedSpec;

/// Below this many remaining rows an elimination step runs sequentially.
const PARALLEL_ROWS: usize = 48;

pub const DEFAULT_VERTEX_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("graph is disconnected; it has no spanning tree")]
    Disconnected,
    #[error("level {level} has {prime}^{level} vertices, above the cap of {cap}")]
    LevelTooLarge { prime: u64, level: u32, cap: usize },
    #[error("level {level} is disconnected")]
    DisconnectedLevel { level: u32 },
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// κ = ℓ^ell_ord · cofactor with ℓ ∤ cofactor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCount {
    pub kappa: BigInt,
    pub ell_ord: u64,
    pub cofactor: BigInt,
}

/// Determinant of a square integer matrix by Bareiss elimination.
///
/// Pivots are taken as the first nonzero entry in the current column, with a
/// row swap when the diagonal entry vanishes. Every division is exact.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let (done, rest) = a.split_at_mut(k + 1);
        let pivot_row = &done[k];
        let update = |row: &mut Vec<BigInt>| {
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..n {
                let t = &row[j] * &pivot_row[k] - &factor * &pivot_row[j];
                row[j] = t / &prev;
            }
        };
        if rest.len() >= PARALLEL_ROWS {
            rest.par_iter_mut().for_each(update);
        } else {
            rest.iter_mut().for_each(update);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

fn to_big(rows: Vec<Vec<i64>>) -> Vec<Vec<BigInt>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect()
}

/// Number of spanning trees, split at ℓ.
pub fn count_spanning_trees(g: &Multigraph, prime: Prime) -> Result<TreeCount, TreeError> {
    if !is_connected(g) {
        return Err(TreeError::Disconnected);
    }
    let kappa = bareiss_determinant(to_big(laplacian(g).minor(0)));
    // The reduced Laplacian of a connected graph is positive definite.
    if !kappa.is_positive() {
        return Err(TreeError::Internal(format!(
            "reduced Laplacian determinant {kappa} is not positive"
        )));
    }
    let (ell_ord, cofactor) =
        split_prime_part(&kappa, prime).map_err(|e| TreeError::Internal(e.to_string()))?;
    Ok(TreeCount {
        kappa,
        ell_ord,
        cofactor,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCount {
    pub level: u32,
    pub vertices: usize,
    pub count: TreeCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileOptions {
    pub vertex_cap: usize,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            vertex_cap: DEFAULT_VERTEX_CAP,
            jobs: 0,
        }
    }
}

/// κ_n for n = 0, …, n_max, sorted by level.
///
/// Levels are independent and computed concurrently; the result does not
/// depend on the thread count.
pub fn ord_profile(
    spec: &SeedSpec,
    n_max: u32,
    options: ProfileOptions,
) -> Result<Vec<LevelCount>, TreeError> {
    let prime = spec.prime();
    for level in 0..=n_max {
        match level_size(prime, level) {
            Some(v) if v <= options.vertex_cap => {}
            _ => {
                return Err(TreeError::LevelTooLarge {
                    prime: prime.get(),
                    level,
                    cap: options.vertex_cap,
                })
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| TreeError::Internal(e.to_string()))?;
    // Largest levels first so they start early.
    let mut levels = pool.install(|| {
        (0..=n_max)
            .rev()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|level| {
                let g = build_cayley_serre(spec, level)?;
                let count = count_spanning_trees(&g, prime).map_err(|e| match e {
                    TreeError::Disconnected => TreeError::DisconnectedLevel { level },
                    other => other,
                })?;
                Ok(LevelCount {
                    level,
                    vertices: g.vertex_count(),
                    count,
                })
            })
            .collect::<Result<Vec<_>, TreeError>>()
    })?;
    levels.sort_by_key(|l| l.level);
    Ok(levels)
}
