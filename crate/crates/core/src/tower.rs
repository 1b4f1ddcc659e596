//! End-to-end check of the growth law for one tower: Q(T), μ and λ, exact
//! κ_n per level, a fitted ν, and a verdict.
//!
//! ν has no closed form; it is read off the deepest computed level and then
//! validated backwards. The onset is the least level from which the residual
//! ord_ℓ(κ_n) − μℓⁿ − λn stays constant across all computed levels.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::{
    extract_mu_lambda, fast_path, n0_sufficient, predict_ord, predicted_difference, InvariantError,
};
use crate::padic::Prime;
use crate::seed::SeedSpec;
use crate::series::{series_q, SeriesError};
use crate::trees::{ord_profile, ProfileOptions, TreeError};

/// Version of the machine-readable report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TERMS: usize = 12;
pub const DEFAULT_PRECISION: u32 = 24;
pub const DEFAULT_MAX_LEVELS: u32 = 5;
pub const DEFAULT_PREVIEW_DIGITS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Invariants(#[from] InvariantError),
    #[error(transparent)]
    Trees(#[from] TreeError),
    #[error("at least one tower level beyond the base is required")]
    NoLevels,
    #[error("internal consistency: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuFit {
    pub nu: i64,
    pub onset: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("levels 0..={required} are needed, only up to {available:?} were computed")]
    InsufficientLevels {
        required: u32,
        available: Option<u32>,
    },
    #[error("residual settles at ν = {nu} only from level {onset}, after the n₀ bound {n0_bound}")]
    Unstable { nu: i64, onset: u32, n0_bound: u32 },
}

/// ν from the deepest level and the onset of the constant tail of residuals.
/// `measured` holds `(level, ord)` pairs sorted by level.
pub fn residual_fit(measured: &[(u32, u64)], prime: Prime, mu: u32, lambda: u32) -> Option<NuFit> {
    let residual = |&(n, ord): &(u32, u64)| ord as i128 - predict_ord(prime, n, mu, lambda, 0);
    let last = measured.last()?;
    let nu = residual(last);
    let mut onset = last.0;
    for m in measured.iter().rev().skip(1) {
        if residual(m) != nu {
            break;
        }
        onset = m.0;
    }
    Some(NuFit {
        nu: i64::try_from(nu).ok()?,
        onset,
    })
}

/// Fits ν and checks that the law is already in force at the n₀ bound.
///
/// Requires every level 0, …, n0_bound + 1.
pub fn fit_nu(
    measured: &[(u32, u64)],
    prime: Prime,
    mu: u32,
    lambda: u32,
    n0_bound: u32,
) -> Result<NuFit, FitError> {
    let required = n0_bound + 1;
    let covered = (0..=required).all(|n| measured.iter().any(|&(l, _)| l == n));
    if !covered {
        return Err(FitError::InsufficientLevels {
            required,
            available: measured.last().map(|m| m.0),
        });
    }
    let fit = residual_fit(measured, prime, mu, lambda).expect("measured is nonempty");
    if fit.onset > n0_bound {
        return Err(FitError::Unstable {
            nu: fit.nu,
            onset: fit.onset,
            n0_bound,
        });
    }
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerConfig {
    pub levels: u32,
    pub terms: usize,
    pub precision: u32,
    pub preview_digits: u32,
    pub profile: ProfileOptions,
    /// Replaces the extracted λ; used to build regression fixtures that must
    /// fail.
    pub lambda_override: Option<u32>,
}

impl TowerConfig {
    /// Defaults for a given prime: the deepest level ≤ 5 within the vertex cap.
    pub fn for_prime(prime: Prime) -> Self {
        let profile = ProfileOptions::default();
        TowerConfig {
            levels: default_levels(prime, profile.vertex_cap),
            terms: DEFAULT_TERMS,
            precision: DEFAULT_PRECISION,
            preview_digits: DEFAULT_PREVIEW_DIGITS,
            profile,
            lambda_override: None,
        }
    }
}

/// min(5, largest n with ℓⁿ ≤ cap).
pub fn default_levels(prime: Prime, cap: usize) -> u32 {
    let mut n = 0;
    let mut size: u128 = 1;
    while n < DEFAULT_MAX_LEVELS {
        size *= prime.get() as u128;
        if size > cap as u128 {
            break;
        }
        n += 1;
    }
    n
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: u32,
    pub vertices: usize,
    pub ord: u64,
    /// Decimal κ_n.
    pub kappa: String,
    /// Decimal κ_n / ℓ^ord.
    pub cofactor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerReport {
    pub schema_version: u32,
    pub prime: u64,
    pub seeds: Vec<String>,
    pub terms: usize,
    pub precision: u32,
    /// Leading digits of c₁, …, c_K.
    pub series: Vec<String>,
    pub mu: u32,
    pub lambda: u32,
    pub k0: u32,
    pub provisional: bool,
    pub fast_path: bool,
    pub lambda_forced: bool,
    pub n0_bound: u32,
    pub levels: Vec<LevelRecord>,
    pub nu: Option<i64>,
    pub onset: Option<u32>,
    pub differences_ok: Option<bool>,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
}

impl TowerReport {
    pub fn prime(&self) -> Prime {
        Prime::new(self.prime).expect("report prime was validated")
    }

    pub fn measured(&self) -> Vec<(u32, u64)> {
        self.levels.iter().map(|l| (l.level, l.ord)).collect()
    }

    /// "ord = 5n − 3 for n ≥ 3", when ν and the onset are known.
    pub fn law(&self) -> Option<String> {
        let nu = self.nu?;
        let onset = self.onset?;
        Some(format!(
            "ord = {} for n ≥ {onset}",
            format_law(self.prime, self.mu, self.lambda, nu)
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let report: Self = serde_json::from_str(text)?;
        if Prime::new(report.prime).is_err() {
            return Err(serde::de::Error::custom(format!(
                "prime {} is not a prime",
                report.prime
            )));
        }
        Ok(report)
    }

    /// Aligned human-readable rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "prime    ℓ = {}", self.prime);
        let _ = writeln!(w, "seeds    {}", self.seeds.join(", "));
        let _ = writeln!(
            w,
            "series   Q(T), K = {}, N = {}",
            self.terms, self.precision
        );
        for (i, c) in self.series.iter().enumerate() {
            let _ = writeln!(w, "  c{:<3} = {c}…", i + 1);
        }
        let _ = writeln!(
            w,
            "mu = {}   lambda = {}   k0 = {}   provisional = {}   fast path = {}",
            self.mu,
            self.lambda,
            self.k0,
            yes_no(self.provisional),
            yes_no(self.fast_path)
        );
        let _ = writeln!(w, "n0 bound = {}", self.n0_bound);

        let kappa_width = self
            .levels
            .iter()
            .map(|l| l.kappa.len())
            .max()
            .unwrap_or(1)
            .max("kappa_n".len());
        let _ = writeln!(
            w,
            "{:>3}  {:>8}  {:>8}  {:>9}  {:>kw$}",
            "n",
            "vertices",
            "ord",
            "predicted",
            "kappa_n",
            kw = kappa_width
        );
        for l in &self.levels {
            let predicted = match self.nu {
                Some(nu) => {
                    predict_ord(self.prime(), l.level, self.mu, self.lambda, nu).to_string()
                }
                None => "-".to_string(),
            };
            let _ = writeln!(
                w,
                "{:>3}  {:>8}  {:>8}  {:>9}  {:>kw$}",
                l.level,
                l.vertices,
                l.ord,
                predicted,
                l.kappa,
                kw = kappa_width
            );
        }
        match (self.nu, self.onset) {
            (Some(nu), Some(onset)) => {
                let _ = writeln!(w, "nu = {nu}   onset = {onset}");
            }
            _ => {
                let _ = writeln!(w, "nu = -   onset = -");
            }
        }
        if let Some(ok) = self.differences_ok {
            let _ = writeln!(
                w,
                "first differences: {}",
                if ok { "match" } else { "MISMATCH" }
            );
        }
        for d in &self.diagnostics {
            let _ = writeln!(w, "note: {d}");
        }
        let _ = writeln!(w, "verdict: {}", self.verdict);
        match (self.verdict, self.law()) {
            (Verdict::Pass, Some(law)) => {
                let _ = writeln!(w, "{law}");
            }
            (_, Some(law)) => {
                let _ = writeln!(w, "unverified fit: {law}");
            }
            _ => {}
        }
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// "μ·ℓ^n + λn ± |ν|", omitting zero terms.
pub fn format_law(prime: u64, mu: u32, lambda: u32, nu: i64) -> String {
    let mut s = String::new();
    match mu {
        0 => {}
        1 => {
            let _ = write!(s, "{prime}^n + ");
        }
        _ => {
            let _ = write!(s, "{mu}·{prime}^n + ");
        }
    }
    if lambda == 1 {
        s.push('n');
    } else {
        let _ = write!(s, "{lambda}n");
    }
    match nu.signum() {
        1 => {
            let _ = write!(s, " + {nu}");
        }
        -1 => {
            let _ = write!(s, " − {}", nu.unsigned_abs());
        }
        _ => {}
    }
    s
}

/// True when every first difference from the onset on equals μφ(ℓⁿ) + λ.
/// False if fewer than two levels at or past the onset are available.
pub fn cross_check_differences(report: &TowerReport) -> bool {
    let Some(onset) = report.onset else {
        return false;
    };
    let prime = report.prime();
    let tail: Vec<(u32, u64)> = report
        .measured()
        .into_iter()
        .filter(|&(n, _)| n >= onset)
        .collect();
    if tail.len() < 2 {
        return false;
    }
    tail.windows(2).all(|w| {
        let (n0, o0) = w[0];
        let (n1, o1) = w[1];
        n1 == n0 + 1
            && o1 as i128 - o0 as i128 == predicted_difference(prime, n1, report.mu, report.lambda)
    })
}

/// Re-derives the verdict from the numbers stored in a report, trusting
/// nothing but the measured levels. Any edit to μ, λ, ν or the onset that is
/// inconsistent with the measurements yields `Fail`.
pub fn verify_report(report: &TowerReport) -> Verdict {
    let Ok(prime) = Prime::new(report.prime) else {
        return Verdict::Fail;
    };
    if report.lambda == 0 || report.lambda.is_multiple_of(2) || report.lambda != 2 * report.k0 - 1 {
        return Verdict::Fail;
    }
    let (Some(nu), Some(onset)) = (report.nu, report.onset) else {
        return Verdict::Inconclusive;
    };
    let measured = report.measured();
    let n0 = n0_sufficient(prime, report.lambda);
    let covered = (0..=n0 + 1).all(|n| measured.iter().any(|&(l, _)| l == n));
    let tail: Vec<&(u32, u64)> = measured.iter().filter(|&&(n, _)| n >= onset).collect();
    let law_holds = tail
        .iter()
        .all(|&&(n, ord)| predict_ord(prime, n, report.mu, report.lambda, nu) == ord as i128);
    if !law_holds {
        return Verdict::Fail;
    }
    if !covered {
        return Verdict::Inconclusive;
    }
    if tail.len() < 2 || onset > n0 {
        return Verdict::Fail;
    }
    if report.fast_path && nu != 0 {
        return Verdict::Fail;
    }
    Verdict::Pass
}

/// Runs the whole pipeline for one seed specification.
pub fn run_tower(spec: &SeedSpec, config: &TowerConfig) -> Result<TowerReport, TowerError> {
    if config.levels == 0 {
        return Err(TowerError::NoLevels);
    }
    let prime = spec.prime();
    let mut diagnostics = Vec::new();

    let q = series_q(spec, config.terms, config.precision)?;
    let extracted = extract_mu_lambda(&q)?;
    let fast = fast_path(spec);
    if let Some(f) = &fast {
        if (f.mu, f.lambda) != (extracted.mu, extracted.lambda) {
            return Err(TowerError::Internal(format!(
                "fast path gives (μ, λ) = ({}, {}), series gives ({}, {})",
                f.mu, f.lambda, extracted.mu, extracted.lambda
            )));
        }
        diagnostics.push("ℓ ∤ c1: μ = 0, λ = 1, ν = 0 expected".to_string());
    }

    let (lambda, k0) = match config.lambda_override {
        Some(l) => {
            diagnostics.push(format!(
                "λ forced to {l} (series gives {})",
                extracted.lambda
            ));
            (l, l.div_ceil(2))
        }
        None => (extracted.lambda, extracted.k0),
    };
    let mu = extracted.mu;
    let n0_bound = n0_sufficient(prime, lambda.max(1));

    let counts = ord_profile(spec, config.levels, config.profile)?;
    let levels: Vec<LevelRecord> = counts
        .iter()
        .map(|l| LevelRecord {
            level: l.level,
            vertices: l.vertices,
            ord: l.count.ell_ord,
            kappa: l.count.kappa.to_string(),
            cofactor: l.count.cofactor.to_string(),
        })
        .collect();
    let measured: Vec<(u32, u64)> = levels.iter().map(|l| (l.level, l.ord)).collect();

    let (fit, mut verdict) = match fit_nu(&measured, prime, mu, lambda, n0_bound) {
        Ok(fit) => (Some(fit), Verdict::Pass),
        Err(FitError::InsufficientLevels { required, .. }) => {
            diagnostics.push(format!(
                "levels up to {required} are needed to reach n0 + 1; rerun with --levels {required}"
            ));
            (
                residual_fit(&measured, prime, mu, lambda),
                Verdict::Inconclusive,
            )
        }
        Err(e @ FitError::Unstable { nu, onset, .. }) => {
            diagnostics.push(e.to_string());
            (Some(NuFit { nu, onset }), Verdict::Fail)
        }
    };

    if let (Some(f), Some(_)) = (&fit, &fast) {
        if f.nu != 0 && verdict == Verdict::Pass {
            diagnostics.push(format!("fast path predicts ν = 0, fitted ν = {}", f.nu));
            verdict = Verdict::Fail;
        }
    }
    if extracted.provisional {
        match verdict {
            Verdict::Pass => diagnostics.push(format!(
                "μ and λ are provisional (witnessed within K = {}); the measured levels agree",
                config.terms
            )),
            Verdict::Fail => diagnostics.push(
                "μ and λ are provisional; retry with more terms (--terms) or precision (--precision)"
                    .to_string(),
            ),
            Verdict::Inconclusive => {}
        }
    }

    let mut report = TowerReport {
        schema_version: SCHEMA_VERSION,
        prime: prime.get(),
        seeds: spec.seeds().iter().map(ToString::to_string).collect(),
        terms: config.terms,
        precision: config.precision,
        series: q.render(config.preview_digits),
        mu,
        lambda,
        k0,
        provisional: extracted.provisional,
        fast_path: fast.is_some(),
        lambda_forced: config.lambda_override.is_some(),
        n0_bound,
        levels,
        nu: fit.map(|f| f.nu),
        onset: fit.map(|f| f.onset),
        differences_ok: None,
        verdict,
        diagnostics,
    };
    if report.verdict == Verdict::Pass {
        let ok = cross_check_differences(&report);
        report.differences_ok = Some(ok);
        if !ok {
            report
                .diagnostics
                .push("first differences disagree with μφ(ℓⁿ) + λ".to_string());
            report.verdict = Verdict::Fail;
        }
    }
    Ok(report)
}
