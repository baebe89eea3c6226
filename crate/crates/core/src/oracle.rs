//! Independent oracle for abelian groups, used to cross-check the engine.
//!
//! Invariant factors are recovered here by counting solutions of x^d = 1,
//! which never touches the Smith-normal-form path, and tensor/exterior
//! orders come from the classical bilinear formulas
//! |A (x) B| = prod gcd(d_i, e_j) and |A ^ A| = prod_{i<j} gcd(d_i, d_j).

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Repeated pairwise (gcd, lcm) exchange turns any multiset of moduli into
/// the divisor chain d_1 | d_2 | ... presenting the same abelian group.
pub fn normalize_divisor_chain(mut ds: Vec<u64>) -> Vec<u64> {
    ds.retain(|&d| d > 1);
    loop {
        let mut changed = false;
        for i in 0..ds.len() {
            for j in (i + 1)..ds.len() {
                if ds[j] % ds[i] != 0 {
                    let (g, l) = (gcd(ds[i], ds[j]), lcm(ds[i], ds[j]));
                    ds[i] = g;
                    ds[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    ds.retain(|&d| d > 1);
    ds.sort_unstable();
    ds
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant factors of an abelian group by counting, for each prime power
/// p^k, the elements x with x^(p^k) = 1. These counts determine the p-part
/// partition of the group, and the primary parts recombine into a chain.
pub fn abelian_invariants_by_counting(g: &FiniteGroup) -> Result<Vec<u64>> {
    if !g.is_abelian() {
        return Err(Error::InvalidGroup(
            "counting oracle requires an abelian group".into(),
        ));
    }
    let n = g.order() as u64;
    if n == 1 {
        return Ok(vec![]);
    }
    let count_killed = |d: u64| -> u64 {
        (0..g.order())
            .filter(|&x| {
                let mut y = 0usize;
                for _ in 0..d {
                    y = g.mul(y, x);
                }
                y == 0
            })
            .count() as u64
    };
    // per prime: exps[j] = number of cyclic primary factors of order >= p^(j+1)
    let mut primary: Vec<Vec<u32>> = Vec::new(); // one partition per prime
    for p in prime_factors(n) {
        let mut counts = vec![1u64]; // N(p^0) = 1
        let mut pk = p;
        loop {
            let c = count_killed(pk);
            if c == *counts.last().unwrap() {
                break;
            }
            counts.push(c);
            pk *= p;
        }
        // N(p^j) / N(p^(j-1)) = p^(#factors of order >= p^j)
        let mut partition = Vec::new();
        for j in 1..counts.len() {
            let ratio = counts[j] / counts[j - 1];
            let mut m = 0u32;
            let mut r = ratio;
            while r > 1 {
                if r % p != 0 {
                    return Err(Error::InvalidGroup(
                        "order-count ratios are not prime powers".into(),
                    ));
                }
                r /= p;
                m += 1;
            }
            partition.push(m);
        }
        // partition[j-1] = number of primary factors with exponent >= j;
        // convert to the multiset of exponents, largest first
        let mut exps = Vec::new();
        for (j, &cnt) in partition.iter().enumerate() {
            let next = partition.get(j + 1).copied().unwrap_or(0);
            for _ in 0..(cnt - next) {
                exps.push((j + 1) as u32);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        primary.push(exps.iter().map(|&e| (p as u64).pow(e) as u32).collect());
    }
    // combine: i-th invariant factor (from the top) multiplies the i-th
    // largest primary power of every prime
    let rank = primary.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut factors = Vec::new();
    for i in 0..rank {
        let mut d = 1u64;
        for pp in &primary {
            if i < pp.len() {
                d *= pp[i] as u64;
            }
        }
        factors.push(d);
    }
    factors.reverse(); // ascending divisor chain
    if factors.iter().product::<u64>() != n {
        return Err(Error::InvalidGroup(
            "order-count reconstruction does not multiply to the order".into(),
        ));
    }
    Ok(factors)
}

/// |A (x) B| for abelian A, B given by invariant factors.
pub fn tensor_order(d: &[u64], e: &[u64]) -> u64 {
    d.iter()
        .flat_map(|&di| e.iter().map(move |&ej| gcd(di, ej)))
        .product()
}

/// Invariant factors of A (x) B (abelian case): the multiset of pairwise
/// gcds, normalized to a divisor chain.
pub fn tensor_invariants(d: &[u64], e: &[u64]) -> Vec<u64> {
    let moduli: Vec<u64> = d
        .iter()
        .flat_map(|&di| e.iter().map(move |&ej| gcd(di, ej)))
        .collect();
    normalize_divisor_chain(moduli)
}

/// |A ^ A| for abelian A given by invariant factors.
pub fn exterior_order(d: &[u64]) -> u64 {
    let mut out = 1;
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            out *= gcd(d[i], d[j]);
        }
    }
    out
}

/// Invariant factors of A ^ A (abelian case).
pub fn exterior_invariants(d: &[u64]) -> Vec<u64> {
    let mut moduli = Vec::new();
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            moduli.push(gcd(d[i], d[j]));
        }
    }
    normalize_divisor_chain(moduli)
}
