//! Independent oracles and fixtures shared by the integration suites.
//!
//! Nothing here calls into the code under test beyond building inputs.
#![allow(dead_code)]

use std::path::PathBuf;

use ltower::graph::Multigraph;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_240_531;

/// Seed for every randomized test; override with `LTOWER_TEST_SEED`.
pub fn test_seed() -> u64 {
    std::env::var("LTOWER_TEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(test_seed() ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn proptest_config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(test_seed()),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub const PRIMES_TO_97: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// ord_ℓ by repeated division.
pub fn naive_ord(n: &BigInt, l: u64) -> u64 {
    assert!(!n.is_zero());
    let l = BigInt::from(l);
    let mut n = n.abs();
    let mut k = 0;
    while (&n % &l).is_zero() {
        n /= &l;
        k += 1;
    }
    k
}

/// n!/(k!(n−k)!) by the multiplicative formula, independent of any library
/// binomial.
pub fn naive_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// d_k(n) straight from the binomial form.
pub fn naive_d(n: u64, k: u64) -> BigInt {
    let sign = if k % 2 == 1 { 1 } else { -1 };
    let b = naive_binomial(n + k - 1, 2 * k - 1) * BigInt::from(n);
    assert!((&b % BigInt::from(k)).is_zero());
    b / BigInt::from(k) * sign
}

/// x with x·den ≡ num (mod modulus), found by exhaustive search.
pub fn search_quotient(num: i64, den: i64, modulus: u64) -> Option<u64> {
    let m = modulus as i128;
    (0..modulus).find(|&x| ((x as i128) * den as i128 - num as i128).rem_euclid(m) == 0)
}

/// Base-ℓ digits, least significant first.
pub fn naive_digits(mut r: BigUint, l: u64, k: usize) -> Vec<u64> {
    let base = BigUint::from(l);
    (0..k)
        .map(|_| {
            let d = &r % &base;
            r /= &base;
            u64::try_from(d).expect("digit fits")
        })
        .collect()
}

/// Spanning trees by enumerating every (V−1)-subset of edges and testing it
/// with union-find. Parallel edges are distinct; loops never enter a tree.
pub fn brute_force_trees(vertex_count: usize, edges: &[(usize, usize)]) -> u64 {
    if vertex_count <= 1 {
        return 1;
    }
    let proper: Vec<(usize, usize)> = edges.iter().copied().filter(|(u, v)| u != v).collect();
    let need = vertex_count - 1;
    let mut chosen = Vec::with_capacity(need);
    count_subsets(vertex_count, &proper, 0, need, &mut chosen)
}

fn count_subsets(
    n: usize,
    edges: &[(usize, usize)],
    from: usize,
    need: usize,
    chosen: &mut Vec<(usize, usize)>,
) -> u64 {
    if chosen.len() == need {
        return u64::from(forms_tree(n, chosen.iter().copied()));
    }
    if edges.len() - from < need - chosen.len() {
        return 0;
    }
    let mut total = 0;
    for i in from..=edges.len() - (need - chosen.len()) {
        chosen.push(edges[i]);
        total += count_subsets(n, edges, i + 1, need, chosen);
        chosen.pop();
    }
    total
}

fn forms_tree(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// A random multigraph with loops and parallel edges.
pub fn random_multigraph(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_edges: usize,
) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_vertices);
    let e = rng.gen_range(0..=max_edges);
    let edges = (0..e)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    (n, edges)
}

pub fn to_multigraph(n: usize, edges: &[(usize, usize)]) -> Multigraph {
    let mut g = Multigraph::new(n);
    for &(u, v) in edges {
        g.add_edges(u, v, 1).unwrap();
    }
    g
}

/// The three worked towers and a μ = 1 tower.
pub mod towers {
    pub const DYADIC: (u64, &[&str]) = (2, &["1/3", "3/5"]);
    pub const TRIADIC: (u64, &[&str]) = (3, &["1/2", "1/5", "1/7"]);
    pub const ROOTS_13: (u64, &[&str]) = (13, &["sqrt(3)@4", "sqrt(10)@6"]);
    pub const DOUBLED: (u64, &[&str]) = (2, &["1", "1"]);

    pub fn spec(t: (u64, &[&str])) -> ltower::SeedSpec {
        let seeds: Vec<String> = t.1.iter().map(|s| s.to_string()).collect();
        ltower::config::build_spec(t.0 as i64, &seeds).unwrap()
    }
}
