//! Constructions of named small groups and a curated catalog for sweeps.
//!
//! Name grammar: `C<n>` cyclic, `D<n>` dihedral of order 2n, `Q8` quaternion,
//! `S<n>` / `A<n>` symmetric / alternating (n <= 5), `E<p>^<k>` elementary
//! abelian, and `x`-separated direct products such as `C2xC4`.

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{Read as _, Write as _};
use std::path::Path;

/// On-disk Cayley-table format.
#[derive(Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    pub gens: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

pub fn save_group(g: &FiniteGroup, path: &Path) -> Result<()> {
    let file = GroupFile {
        order: g.order(),
        mul: g.mul_rows(),
        gens: g.gens().to_vec(),
        labels: g.labels().map(|l| l.to_vec()),
    };
    let mut f = std::fs::File::create(path)?;
    f.write_all(serde_json::to_string(&file)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Load and fully validate a group from a JSON Cayley-table file.
pub fn load_group(path: &Path, order_cap: usize) -> Result<FiniteGroup> {
    let mut s = String::new();
    std::fs::File::open(path)?.read_to_string(&mut s)?;
    let file: GroupFile = serde_json::from_str(&s)?;
    if file.mul.len() != file.order {
        return Err(Error::InvalidGroup(format!(
            "declared order {} but table has {} rows",
            file.order,
            file.mul.len()
        )));
    }
    FiniteGroup::from_mul_table(&file.mul, file.gens, file.labels, order_cap)
}

/// Build the group generated by permutations of 0..points, indexed by BFS
/// from the identity so that the identity lands at index 0.
fn from_permutations(
    points: usize,
    gens: &[Vec<usize>],
    labels: Option<Vec<String>>,
    cap: usize,
) -> Result<FiniteGroup> {
    let id: Vec<usize> = (0..points).collect();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut elems: Vec<Vec<usize>> = vec![id.clone()];
    index.insert(id, 0);
    let mut head = 0;
    while head < elems.len() {
        let cur = elems[head].clone();
        head += 1;
        for g in gens {
            // left-to-right composition: (cur * g)(p) = g[cur[p]]
            let prod: Vec<usize> = cur.iter().map(|&p| g[p]).collect();
            if !index.contains_key(&prod) {
                if elems.len() >= cap {
                    return Err(Error::OrderCapExceeded {
                        order: elems.len() + 1,
                        cap,
                    });
                }
                index.insert(prod.clone(), elems.len());
                elems.push(prod);
            }
        }
    }
    let n = elems.len();
    let mut mul = Vec::with_capacity(n * n);
    for a in &elems {
        for b in &elems {
            let prod: Vec<usize> = a.iter().map(|&p| b[p]).collect();
            mul.push(index[&prod] as u32);
        }
    }
    let gen_idx: Vec<Elem> = gens
        .iter()
        .map(|g| index[g])
        .filter(|&i| i != 0)
        .collect();
    let g = FiniteGroup::from_parts(n, mul, gen_idx, labels)?;
    g.validate()?;
    Ok(g)
}

pub fn cyclic(n: usize, cap: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidGroup("C0 is not a group".into()));
    }
    if n > cap {
        return Err(Error::OrderCapExceeded { order: n, cap });
    }
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mul.push(((a + b) % n) as u32);
        }
    }
    let gens = if n == 1 { vec![] } else { vec![1] };
    let labels = (0..n).map(|k| format!("r{k}")).collect();
    let g = FiniteGroup::from_parts(n, mul, gens, Some(labels))?;
    g.validate()?;
    Ok(g)
}

/// Dihedral group of order 2n (symmetries of the n-gon), n >= 1.
pub fn dihedral(n: usize, cap: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidGroup("D0 is not a group".into()));
    }
    if n == 1 {
        return cyclic(2, cap);
    }
    if n == 2 {
        // the Klein four-group; build directly since two points don't suffice
        return direct_product(&cyclic(2, cap)?, &cyclic(2, cap)?, cap);
    }
    let rot: Vec<usize> = (0..n).map(|p| (p + 1) % n).collect();
    let refl: Vec<usize> = (0..n).map(|p| (n - p) % n).collect();
    from_permutations(n, &[rot, refl], None, cap)
}

pub fn symmetric(n: usize, cap: usize) -> Result<FiniteGroup> {
    if n == 0 || n > 5 {
        return Err(Error::InvalidGroup(format!("S{n} is outside the catalog")));
    }
    if n == 1 {
        return cyclic(1, cap);
    }
    let transposition: Vec<usize> = {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(0, 1);
        p
    };
    let cycle: Vec<usize> = (0..n).map(|p| (p + 1) % n).collect();
    from_permutations(n, &[transposition, cycle], None, cap)
}

pub fn alternating(n: usize, cap: usize) -> Result<FiniteGroup> {
    if n == 0 || n > 5 {
        return Err(Error::InvalidGroup(format!("A{n} is outside the catalog")));
    }
    if n <= 2 {
        return cyclic(1, cap);
    }
    if n == 3 {
        return cyclic(3, cap);
    }
    let three_cycle: Vec<usize> = {
        let mut p: Vec<usize> = (0..n).collect();
        p[0] = 1;
        p[1] = 2;
        p[2] = 0;
        p
    };
    let even: Vec<usize> = if n % 2 == 1 {
        (0..n).map(|p| (p + 1) % n).collect() // odd n: the n-cycle is even
    } else {
        let mut p: Vec<usize> = (1..n).map(|x| 1 + x % (n - 1)).collect();
        p.insert(0, 0); // fix 0, cycle the rest (odd length n-1)
        p
    };
    from_permutations(n, &[three_cycle, even], None, cap)
}

/// Quaternion group {1, -1, i, -i, j, -j, k, -k}.
pub fn quaternion(cap: usize) -> Result<FiniteGroup> {
    if 8 > cap {
        return Err(Error::OrderCapExceeded { order: 8, cap });
    }
    // encode q = sign * unit, unit in {1, i, j, k}
    let unit_mul = |a: usize, b: usize| -> (i32, usize) {
        match (a, b) {
            (0, x) => (1, x),
            (x, 0) => (1, x),
            (1, 1) | (2, 2) | (3, 3) => (-1, 0),
            (1, 2) => (1, 3),
            (2, 1) => (-1, 3),
            (2, 3) => (1, 1),
            (3, 2) => (-1, 1),
            (3, 1) => (1, 2),
            (1, 3) => (-1, 2),
            _ => unreachable!(),
        }
    };
    // index = 2*unit + (sign < 0): gives identity (+1) index 0
    let mut mul = vec![0u32; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (ua, sa) = (a / 2, if a % 2 == 0 { 1 } else { -1 });
            let (ub, sb) = (b / 2, if b % 2 == 0 { 1 } else { -1 });
            let (s, u) = unit_mul(ua, ub);
            let sign = s * sa * sb;
            mul[a * 8 + b] = (2 * u + usize::from(sign < 0)) as u32;
        }
    }
    let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let g = FiniteGroup::from_parts(8, mul, vec![2, 4], Some(labels))?;
    g.validate()?;
    Ok(g)
}

pub fn elementary_abelian(p: usize, k: usize, cap: usize) -> Result<FiniteGroup> {
    if k == 0 {
        return cyclic(1, cap);
    }
    let mut g = cyclic(p, cap)?;
    for _ in 1..k {
        g = direct_product(&g, &cyclic(p, cap)?, cap)?;
    }
    Ok(g)
}

/// A x B with element (a, b) at index a*|B| + b; identity stays at 0.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup, cap: usize) -> Result<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    let n = na
        .checked_mul(nb)
        .ok_or(Error::OrderCapExceeded { order: usize::MAX, cap })?;
    if n > cap {
        return Err(Error::OrderCapExceeded { order: n, cap });
    }
    let mut mul = vec![0u32; n * n];
    for x in 0..n {
        let (xa, xb) = (x / nb, x % nb);
        for y in 0..n {
            let (ya, yb) = (y / nb, y % nb);
            mul[x * n + y] = (a.mul(xa, ya) * nb + b.mul(xb, yb)) as u32;
        }
    }
    let mut gens: Vec<Elem> = a.gens().iter().map(|&g| g * nb).collect();
    gens.extend(b.gens().iter().copied());
    let labels = match (a.labels(), b.labels()) {
        (Some(la), Some(lb)) => Some(
            (0..n)
                .map(|x| format!("({},{})", la[x / nb], lb[x % nb]))
                .collect(),
        ),
        _ => None,
    };
    let g = FiniteGroup::from_parts(n, mul, gens, labels)?;
    g.validate()?;
    Ok(g)
}

fn by_atom(name: &str, cap: usize) -> Result<FiniteGroup> {
    let err = || Error::UnknownGroup(name.to_string());
    if name == "Q8" {
        return quaternion(cap);
    }
    if let Some(rest) = name.strip_prefix('E') {
        let (p, k) = rest.split_once('^').ok_or_else(err)?;
        let p: usize = p.parse().map_err(|_| err())?;
        let k: usize = k.parse().map_err(|_| err())?;
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("{p} is not prime in {name}")));
        }
        return elementary_abelian(p, k, cap);
    }
    let (kind, num) = name.split_at(1);
    let n: usize = num.parse().map_err(|_| err())?;
    match kind {
        "C" => cyclic(n, cap),
        "D" => dihedral(n, cap),
        "S" => symmetric(n, cap),
        "A" => alternating(n, cap),
        _ => Err(err()),
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Resolve a group name, possibly an `x`-separated direct product.
pub fn by_name(name: &str, cap: usize) -> Result<FiniteGroup> {
    let mut parts = name.split('x');
    let first = parts.next().ok_or_else(|| Error::UnknownGroup(name.into()))?;
    let mut g = by_atom(first, cap)?;
    for part in parts {
        g = direct_product(&g, &by_atom(part, cap)?, cap)?;
    }
    Ok(g)
}

/// The default sweep universe. Groups whose iterated tensor constructions
/// stay within practical bounds; notably excludes E2^3 and C4xC4, whose
/// third tensor powers blow up combinatorially.
pub fn curated_names() -> Vec<&'static str> {
    vec![
        "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12", "C16",
        "C2xC2", "C2xC4", "C2xC6", "C2xC8", "C3xC3", "S3", "D4", "D5", "D6", "D7", "D8",
        "Q8", "A4", "S4", "A5",
    ]
}

/// Curated names restricted to groups of order at most `max_order`.
pub fn curated_names_upto(max_order: usize, cap: usize) -> Vec<&'static str> {
    curated_names()
        .into_iter()
        .filter(|n| by_name(n, cap).map(|g| g.order() <= max_order).unwrap_or(false))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ORDER_CAP as CAP;

    #[test]
    fn orders_of_named_groups() {
        // [TRIVIAL] textbook orders
        for (name, order) in [
            ("C1", 1),
            ("C6", 6),
            ("C2xC2", 4),
            ("S3", 6),
            ("D4", 8),
            ("D6", 12),
            ("Q8", 8),
            ("A4", 12),
            ("S4", 24),
            ("A5", 60),
            ("E2^3", 8),
            ("E3^2", 9),
            ("C2xC8", 16),
        ] {
            let g = by_name(name, CAP).unwrap();
            assert_eq!(g.order(), order, "{name}");
            g.validate().unwrap();
        }
    }

    #[test]
    fn s3_is_nonabelian_d4_class_two() {
        let s3 = by_name("S3", CAP).unwrap();
        assert!(!s3.is_abelian());
        let d4 = by_name("D4", CAP).unwrap();
        let p = d4.predicates();
        assert_eq!(p.nilpotency_class, Some(2));
        assert_eq!(p.p_group, Some(2));
    }

    #[test]
    fn a5_is_perfect_and_simple_enough() {
        let a5 = by_name("A5", CAP).unwrap();
        let p = a5.predicates();
        assert!(p.is_perfect);
        assert!(!p.is_solvable);
        // only normal subgroups are 1 and A5
        assert_eq!(a5.normal_subgroups().len(), 2);
    }

    #[test]
    fn quaternion_anticommutes() {
        let q8 = quaternion(CAP).unwrap();
        // i * j = k, j * i = -k
        assert_eq!(q8.mul(2, 4), 6);
        assert_eq!(q8.mul(4, 2), 7);
        assert_eq!(q8.element_order(2), 4);
        assert_eq!(q8.element_order(1), 2); // -1
    }

    #[test]
    fn json_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d4.json");
        let d4 = by_name("D4", CAP).unwrap();
        save_group(&d4, &path).unwrap();
        let back = load_group(&path, CAP).unwrap();
        assert_eq!(back.order(), 8);
        assert_eq!(back.fingerprint(), d4.fingerprint());
    }

    #[test]
    fn rejects_bad_tables() {
        // identity not at 0
        let rows = vec![vec![1, 0], vec![0, 1]];
        assert!(FiniteGroup::from_mul_table(&rows, vec![1], None, CAP).is_err());
        // cap enforcement
        assert!(matches!(
            cyclic(10, 5),
            Err(crate::error::Error::OrderCapExceeded { .. })
        ));
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(by_name("X7", CAP).is_err());
        assert!(by_name("S9", CAP).is_err());
        assert!(by_name("E4^2", CAP).is_err());
    }
}
