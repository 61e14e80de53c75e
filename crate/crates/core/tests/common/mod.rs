//! Shared seeds and oracles for the integration tests. Nothing here calls into
//! the library's cohomology or symbol code.
#![allow(dead_code)]

use num::{BigInt, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_2026;

/// Base seed; override with `FANO_HELIX_SEED`.
pub fn seed() -> u64 {
    std::env::var("FANO_HELIX_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Independent stream for one test.
pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

pub fn choose(n: i128, k: i128) -> u64 {
    if k < 0 || n < k {
        return 0;
    }
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc as u64
}

/// `h^i(ℙⁿ, O(a))` from the explicit description of the cohomology ring.
pub fn bott(n: u32, a: i64) -> Vec<u64> {
    let mut h = vec![0; n as usize + 1];
    let (n_, a_) = (n as i128, a as i128);
    if a_ >= 0 {
        h[0] = choose(n_ + a_, n_);
    }
    if a_ <= -n_ - 1 {
        h[n as usize] = choose(-a_ - 1, n_);
    }
    h
}

/// Künneth: convolution of the per-factor cohomology vectors.
pub fn kunneth(dims: &[u32], degree: &[i64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    for (&n, &a) in dims.iter().zip(degree) {
        let f = bott(n, a);
        let mut next = vec![0u64; acc.len() + f.len() - 1];
        for (i, &x) in acc.iter().enumerate() {
            for (j, &y) in f.iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    acc
}

pub fn euler(dims: &[u32], degree: &[i64]) -> i64 {
    kunneth(dims, degree)
        .iter()
        .enumerate()
        .map(|(i, &h)| if i % 2 == 0 { h as i64 } else { -(h as i64) })
        .sum()
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Places where `(a, b)` can be ramified: 0 stands for the real place.
pub fn candidate_places(a: i64, b: i64) -> Vec<u64> {
    let mut ps = prime_factors(2 * a.unsigned_abs() * b.unsigned_abs());
    ps.insert(0, 0);
    ps
}

fn split_valuation(mut a: i64, p: i64) -> (u32, i64) {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    (v, a)
}

fn pow_mod(mut b: i128, mut e: i128, m: i128) -> i128 {
    let mut r = 1;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn legendre(u: i64, p: i64) -> i32 {
    match pow_mod(u as i128, (p as i128 - 1) / 2, p as i128) {
        1 => 1,
        0 => 0,
        _ => -1,
    }
}

/// Closed-form Hilbert symbol of nonzero integers (Serre, Course in
/// Arithmetic, III.1.2). `p = 0` is the real place.
pub fn hilbert_closed(a: i64, b: i64, p: u64) -> i32 {
    assert!(a != 0 && b != 0);
    if p == 0 {
        return if a < 0 && b < 0 { -1 } else { 1 };
    }
    let p = p as i64;
    let (alpha, u) = split_valuation(a, p);
    let (beta, v) = split_valuation(b, p);
    let sign = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
    if p == 2 {
        let eps = |x: i64| i64::from(x.rem_euclid(4) == 3);
        let omega = |x: i64| i64::from(matches!(x.rem_euclid(8), 3 | 5));
        sign(eps(u) * eps(v) + alpha as i64 * omega(v) + beta as i64 * omega(u))
    } else {
        let mut s = sign(alpha as i64 * beta as i64 * ((p - 1) / 2));
        if beta % 2 == 1 {
            s *= legendre(u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(v, p);
        }
        s
    }
}

/// Hilbert symbol at an odd prime by searching for a primitive zero of
/// `a x² + b y² - z²` modulo `p³`, after reducing valuations below 2.
pub fn hilbert_brute_odd(a: i64, b: i64, p: u64) -> i32 {
    let p = p as i64;
    let reduce = |x: i64| {
        let (v, u) = split_valuation(x, p);
        if v % 2 == 1 {
            u * p
        } else {
            u
        }
    };
    let m = p * p * p;
    let (a, b) = (reduce(a).rem_euclid(m), reduce(b).rem_euclid(m));
    let mut square_any = vec![false; m as usize];
    let mut square_unit = vec![false; m as usize];
    for z in 0..m {
        let s = (z * z % m) as usize;
        square_any[s] = true;
        if z % p != 0 {
            square_unit[s] = true;
        }
    }
    for x in 0..m {
        for y in 0..m {
            let t = ((a * x % m * x + b * y % m * y) % m) as usize;
            let unit_xy = x % p != 0 || y % p != 0;
            if (unit_xy && square_any[t]) || square_unit[t] {
                return 1;
            }
        }
    }
    -1
}

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            for k in c + 1..cols {
                let v = (&rows[r][c] * &rows[i][k] - &rows[i][c] * &rows[r][k]) / &prev;
                rows[i][k] = v;
            }
            rows[i][c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Exponent vectors of degree `d` in `k` variables, in a fixed order.
pub fn monomials(k: usize, d: i64) -> Vec<Vec<u32>> {
    if d < 0 {
        return Vec::new();
    }
    if k == 1 {
        return vec![vec![d as u32]];
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in monomials(k - 1, d - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

/// Proptest settings pinned to the shared seed.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    use proptest::test_runner::{Config, RngAlgorithm, RngSeed};
    Config {
        cases,
        rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(seed()),
        failure_persistence: None,
        ..Config::default()
    }
}
