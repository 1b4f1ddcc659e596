//! Iwasawa invariants of abelian ℓ-towers of bouquets.
//!
//! Given a prime ℓ and seeds a₁, …, a_t ∈ Z_ℓ, the tower
//! B_t ← X(Z/ℓZ) ← X(Z/ℓ²Z) ← … of Cayley-Serre multigraphs has
//! spanning-tree counts κ_n with ord_ℓ(κ_n) = μℓⁿ + λn + ν for large n,
//! where μ and λ are read off the power series
//! Q(T) = P_{a₁}(T) + … + P_{a_t}(T) built from shifted Chebyshev
//! polynomials. This crate computes Q(T) ℓ-adically, extracts μ and λ, counts
//! spanning trees exactly and checks the law level by level.
//!
//! ```
//! use ltower::{run_tower, Prime, Seed, SeedSpec, TowerConfig, Verdict};
//!
//! let prime = Prime::new(3).unwrap();
//! let spec = SeedSpec::new(
//!     prime,
//!     vec![Seed::rational(1, 2), Seed::rational(1, 5), Seed::rational(1, 7)],
//! )
//! .unwrap();
//! let mut config = TowerConfig::for_prime(prime);
//! config.levels = 3;
//! let report = run_tower(&spec, &config).unwrap();
//! assert_eq!((report.mu, report.lambda, report.nu), (0, 3, Some(0)));
//! assert_eq!(report.verdict, Verdict::Pass);
//! ```

pub mod chebyshev;
pub mod config;
pub mod graph;
pub mod invariants;
pub mod padic;
pub mod seed;
pub mod series;
pub mod tower;
pub mod trees;

pub use chebyshev::{coeff_closed, coeff_padic, p_recurrence, IntPolynomial};
pub use graph::{bouquet, build_cayley_serre, is_connected, laplacian, Multigraph};
pub use invariants::{extract_mu_lambda, fast_path, n0_sufficient, predict_ord, InvariantResult};
pub use padic::{big_ord, hensel_sqrt, PadicError, PadicInt, Prime, ValuationResult};
pub use seed::{Seed, SeedSpec};
pub use series::{series_p, series_q, PadicSeries};
pub use tower::{run_tower, verify_report, TowerConfig, TowerReport, Verdict};
pub use trees::{count_spanning_trees, ord_profile, TreeCount};
