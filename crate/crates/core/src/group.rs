//! Finite groups as dense Cayley tables, with subgroups, homomorphisms,
//! quotients, actions, the central/derived series and their relatives.
//!
//! Elements are indices 0..order-1 and the identity is always index 0.

use crate::error::{Error, Result};
use crate::snf;

pub type Elem = usize;

const UNDEF: u32 = u32::MAX;

/// Default maximum admitted group order. Constructions exceeding the cap in
/// force fail with a resource error rather than truncating.
pub const DEFAULT_ORDER_CAP: usize = 20_000;

/// Default coset-table row limit for enumerations.
pub const DEFAULT_COSET_LIMIT: usize = 1_000_000;

/// Resource limits threaded through constructions.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub coset_limit: usize,
    pub order_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            coset_limit: DEFAULT_COSET_LIMIT,
            order_cap: DEFAULT_ORDER_CAP,
        }
    }
}

/// A finite group as an indexed multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u32>, // row-major: mul[a * order + b]
    inv: Vec<u32>,
    gens: Vec<Elem>,
    labels: Option<Vec<String>>,
    fingerprint: u64,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("gens", &self.gens)
            .finish()
    }
}

fn fnv1a(data: impl IntoIterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for x in data {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

impl FiniteGroup {
    /// Build and fully validate a group from a nested multiplication table.
    /// The identity must be element 0; `gens` must generate the whole group.
    pub fn from_mul_table(
        mul_rows: &[Vec<usize>],
        gens: Vec<Elem>,
        labels: Option<Vec<String>>,
        order_cap: usize,
    ) -> Result<FiniteGroup> {
        let order = mul_rows.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if order > order_cap {
            return Err(Error::OrderCapExceeded { order, cap: order_cap });
        }
        let mut mul = vec![0u32; order * order];
        for (a, row) in mul_rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!("row {a} has wrong length")));
            }
            for (b, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(Error::InvalidGroup(format!(
                        "entry ({a},{b}) = {v} out of range"
                    )));
                }
                mul[a * order + b] = v as u32;
            }
        }
        if let Some(ref l) = labels {
            if l.len() != order {
                return Err(Error::InvalidGroup("labels length mismatch".into()));
            }
        }
        let g = FiniteGroup::from_parts(order, mul, gens, labels)?;
        g.validate()?;
        Ok(g)
    }

    /// Assemble from a flat table, computing the inverse table. Checks the
    /// identity and inverse invariants but not associativity; use
    /// [`FiniteGroup::validate`] for the full suite.
    pub(crate) fn from_parts(
        order: usize,
        mul: Vec<u32>,
        gens: Vec<Elem>,
        labels: Option<Vec<String>>,
    ) -> Result<FiniteGroup> {
        debug_assert_eq!(mul.len(), order * order);
        // identity must be index 0, two-sided
        for b in 0..order {
            if mul[b] as usize != b || mul[b * order] as usize != b {
                return Err(Error::InvalidGroup(
                    "identity is not two-sided neutral at index 0".into(),
                ));
            }
        }
        let mut inv = vec![UNDEF; order];
        for a in 0..order {
            for b in 0..order {
                if mul[a * order + b] == 0 {
                    if mul[b * order + a] != 0 {
                        return Err(Error::InvalidGroup(format!(
                            "one-sided inverse at element {a}"
                        )));
                    }
                    if inv[a] != UNDEF && inv[a] as usize != b {
                        return Err(Error::InvalidGroup(format!(
                            "element {a} has two inverses"
                        )));
                    }
                    inv[a] = b as u32;
                }
            }
            if inv[a] == UNDEF {
                return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
            }
        }
        for &g in &gens {
            if g >= order {
                return Err(Error::InvalidGroup(format!("generator {g} out of range")));
            }
        }
        let fingerprint = fnv1a(
            std::iter::once(order as u64).chain(mul.iter().map(|&x| x as u64)),
        );
        Ok(FiniteGroup {
            order,
            mul,
            inv,
            gens,
            labels,
            fingerprint,
        })
    }

    /// Full invariant suite: identity, inverses, generator closure, and
    /// associativity over all triples (proved via Light's test on a reduced
    /// generating set, which is equivalent to the exhaustive check).
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        for b in 0..n {
            if self.mul(0, b) != b || self.mul(b, 0) != b {
                return Err(Error::InvalidGroup("identity not neutral".into()));
            }
        }
        for a in 0..n {
            let i = self.inv(a);
            if self.mul(a, i) != 0 || self.mul(i, a) != 0 {
                return Err(Error::InvalidGroup(format!("bad inverse for {a}")));
            }
        }
        // generator closure must be everything
        let closure = self.subgroup_closure(&self.gens);
        if closure.order() != n {
            return Err(Error::InvalidGroup(format!(
                "generators span only {} of {} elements",
                closure.order(),
                n
            )));
        }
        // Light's associativity test against a reduced generating set
        let reduced = self.reduced_gens(&self.gens);
        for &s in &reduced {
            for a in 0..n {
                let as_ = self.mul(a, s);
                for b in 0..n {
                    if self.mul(as_, b) != self.mul(a, self.mul(s, b)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a},{s},{b})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn id(&self) -> Elem {
        0
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a] as usize
    }

    pub fn gens(&self) -> &[Elem] {
        &self.gens
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, g: Elem) -> String {
        match &self.labels {
            Some(l) => l[g].clone(),
            None => format!("g{g}"),
        }
    }

    /// Hash of the multiplication table; identical tables share fingerprints.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn mul_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    fn check_elem(&self, g: Elem) -> Result<()> {
        if g >= self.order {
            return Err(Error::IndexOutOfRange {
                index: g,
                order: self.order,
            });
        }
        Ok(())
    }

    /// [g, h] = g h g^-1 h^-1.
    pub fn commutator(&self, g: Elem, h: Elem) -> Result<Elem> {
        self.check_elem(g)?;
        self.check_elem(h)?;
        Ok(self.comm(g, h))
    }

    #[inline]
    pub(crate) fn comm(&self, g: Elem, h: Elem) -> Elem {
        let gh = self.mul(g, h);
        let gi = self.inv(g);
        self.mul(self.mul(gh, gi), self.inv(h))
    }

    /// Left conjugation ^g x = g x g^-1.
    pub fn conjugate(&self, g: Elem, x: Elem) -> Result<Elem> {
        self.check_elem(g)?;
        self.check_elem(x)?;
        Ok(self.conj(g, x))
    }

    #[inline]
    pub(crate) fn conj(&self, g: Elem, x: Elem) -> Elem {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, g: Elem) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        for a in 0..self.order {
            for b in 0..a {
                if self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
            }
        }
        true
    }

    /// Greedily shrink `from` to a subset that still generates the same
    /// subgroup. Keeps validation and homomorphism extension cheap.
    pub fn reduced_gens(&self, from: &[Elem]) -> Vec<Elem> {
        let target = self.closure_set(from).iter().filter(|&&x| x).count();
        let mut picked: Vec<Elem> = Vec::new();
        let mut have = self.closure_set(&picked);
        for &g in from {
            if have[g] {
                continue;
            }
            picked.push(g);
            have = self.closure_set(&picked);
            if have.iter().filter(|&&x| x).count() == target {
                break;
            }
        }
        picked
    }

    fn closure_set(&self, s: &[Elem]) -> Vec<bool> {
        let mut in_set = vec![false; self.order];
        in_set[0] = true;
        let mut queue: Vec<Elem> = vec![0];
        for &g in s {
            if !in_set[g] {
                in_set[g] = true;
                queue.push(g);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in s {
                let y = self.mul(x, g);
                if !in_set[y] {
                    in_set[y] = true;
                    queue.push(y);
                }
            }
        }
        in_set
    }

    /// Smallest subgroup containing `s`.
    pub fn subgroup_closure(&self, s: &[Elem]) -> Subgroup {
        let in_set = self.closure_set(s);
        let elements: Vec<Elem> = (0..self.order).filter(|&i| in_set[i]).collect();
        Subgroup {
            parent_fp: self.fingerprint,
            elements,
            witness_gens: s.to_vec(),
        }
    }

    /// Smallest normal subgroup containing `s`.
    pub fn normal_closure(&self, s: &[Elem]) -> Subgroup {
        let mut gens: Vec<Elem> = s.to_vec();
        loop {
            let sub = self.subgroup_closure(&gens);
            let mut grew = false;
            'search: for &h in &sub.elements {
                for g in 0..self.order {
                    let c = self.conj(g, h);
                    if !sub.contains(c) {
                        gens.push(c);
                        grew = true;
                        break 'search;
                    }
                }
            }
            if !grew {
                return Subgroup {
                    parent_fp: self.fingerprint,
                    elements: sub.elements,
                    witness_gens: s.to_vec(),
                };
            }
        }
    }

    /// Subgroup generated by all commutators [a, b], a in A, b in B.
    pub fn commutator_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        if a.parent_fp != self.fingerprint || b.parent_fp != self.fingerprint {
            return Err(Error::MismatchedParents);
        }
        let mut gens = Vec::new();
        let mut seen = vec![false; self.order];
        for &x in &a.elements {
            for &y in &b.elements {
                let c = self.comm(x, y);
                if !seen[c] && c != 0 {
                    seen[c] = true;
                    gens.push(c);
                }
            }
        }
        Ok(self.subgroup_closure(&gens))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            parent_fp: self.fingerprint,
            elements: vec![0],
            witness_gens: vec![],
        }
    }

    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup {
            parent_fp: self.fingerprint,
            elements: (0..self.order).collect(),
            witness_gens: self.gens.clone(),
        }
    }

    pub fn center(&self) -> Subgroup {
        let elements: Vec<Elem> = (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect();
        Subgroup {
            parent_fp: self.fingerprint,
            witness_gens: elements.clone(),
            elements,
        }
    }

    /// gamma_1 = G, gamma_{k+1} = [gamma_k, G]; `n` terms.
    pub fn lower_central_series(&self, n: usize) -> SeriesChain {
        assert!(n >= 1);
        let mut terms = vec![self.full_subgroup()];
        let full = self.full_subgroup();
        let mut stabilized = false;
        while terms.len() < n {
            let next = self
                .commutator_subgroup(terms.last().unwrap(), &full)
                .expect("same parent");
            if next.elements == terms.last().unwrap().elements {
                stabilized = true;
            }
            terms.push(next);
        }
        if terms.last().unwrap().order() == 1 {
            stabilized = true;
        }
        SeriesChain {
            kind: SeriesKind::LowerCentral,
            terms,
            stabilized,
        }
    }

    /// Z_0 = 1, Z_{k+1} = preimage of Z(G / Z_k); terms Z_0 ..= Z_n.
    pub fn upper_central_series(&self, n: usize) -> SeriesChain {
        let mut terms = vec![self.trivial_subgroup()];
        let mut stabilized = false;
        for _ in 0..n {
            let prev = terms.last().unwrap();
            let (q, proj) = self
                .quotient(prev)
                .expect("upper central terms are normal");
            let zq = q.center();
            let elements: Vec<Elem> = (0..self.order)
                .filter(|&x| zq.contains(proj.apply(x)))
                .collect();
            let next = Subgroup {
                parent_fp: self.fingerprint,
                witness_gens: elements.clone(),
                elements,
            };
            if next.elements == prev.elements || next.order() == self.order {
                stabilized = true;
            }
            terms.push(next);
        }
        SeriesChain {
            kind: SeriesKind::UpperCentral,
            terms,
            stabilized,
        }
    }

    /// Gamma_1 = G, Gamma_{k+1} = [Gamma_k, Gamma_k]; `n` terms.
    pub fn derived_series(&self, n: usize) -> SeriesChain {
        assert!(n >= 1);
        let mut terms = vec![self.full_subgroup()];
        let mut stabilized = false;
        while terms.len() < n {
            let last = terms.last().unwrap();
            let next = self.commutator_subgroup(last, last).expect("same parent");
            if next.elements == last.elements {
                stabilized = true;
            }
            terms.push(next);
        }
        if terms.last().unwrap().order() == 1 {
            stabilized = true;
        }
        SeriesChain {
            kind: SeriesKind::Derived,
            terms,
            stabilized,
        }
    }

    /// Quotient by a normal subgroup, with coset representatives chosen as
    /// the minimum element index per coset, plus the canonical projection.
    pub fn quotient(&self, n: &Subgroup) -> Result<(FiniteGroup, GroupHom)> {
        if n.parent_fp != self.fingerprint {
            return Err(Error::MismatchedParents);
        }
        if !n.is_normal(self)? {
            return Err(Error::NotNormal);
        }
        let order = self.order;
        let mut coset_of = vec![UNDEF; order];
        let mut reps: Vec<Elem> = Vec::new();
        for x in 0..order {
            if coset_of[x] != UNDEF {
                continue;
            }
            // x is minimal in its coset xN since smaller members were visited
            let idx = reps.len() as u32;
            for &h in &n.elements {
                coset_of[self.mul(x, h)] = idx;
            }
            reps.push(x);
        }
        let q = reps.len();
        let mut mul = vec![0u32; q * q];
        for i in 0..q {
            for j in 0..q {
                mul[i * q + j] = coset_of[self.mul(reps[i], reps[j])];
            }
        }
        let mut qgens: Vec<Elem> = Vec::new();
        for &g in &self.gens {
            let img = coset_of[g] as usize;
            if img != 0 && !qgens.contains(&img) {
                qgens.push(img);
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| reps.iter().map(|&r| format!("{}N", l[r])).collect());
        let qg = FiniteGroup::from_parts(q, mul, qgens, labels)?;
        let proj = GroupHom {
            domain_fp: self.fingerprint,
            codomain_fp: qg.fingerprint,
            domain_order: order,
            codomain_order: q,
            image: coset_of,
        };
        Ok((qg, proj))
    }

    /// D_n(G): elements killed by every n-fold iterated bracket against
    /// Gamma_1, ..., Gamma_n. Brute force over full tuples with early exit.
    pub fn frak_d(&self, n: usize) -> Subgroup {
        assert!(n >= 1);
        let derived = self.derived_series(n);
        fn rec(g: &FiniteGroup, c: Elem, i: usize, terms: &[Subgroup]) -> bool {
            if c == 0 {
                return true; // brackets of the identity stay trivial
            }
            if i == terms.len() {
                return c == 0;
            }
            terms[i]
                .elements()
                .iter()
                .all(|&x| rec(g, g.comm(c, x), i + 1, terms))
        }
        let elements: Vec<Elem> = (0..self.order)
            .filter(|&g| rec(self, g, 0, &derived.terms))
            .collect();
        Subgroup {
            parent_fp: self.fingerprint,
            witness_gens: elements.clone(),
            elements,
        }
    }

    /// Structural predicates computed from the series and the order.
    pub fn predicates(&self) -> GroupProps {
        let order = self.order;
        let is_abelian = self.is_abelian();
        let derived2 = self.derived_series(2);
        let is_perfect = derived2.terms[1].order() == order;
        // lower central series until stabilization
        let mut lcs = vec![self.full_subgroup()];
        loop {
            let next = self
                .commutator_subgroup(lcs.last().unwrap(), &self.full_subgroup())
                .unwrap();
            if next.elements == lcs.last().unwrap().elements {
                break;
            }
            lcs.push(next);
        }
        let nilpotency_class = if lcs.last().unwrap().order() == 1 {
            Some(lcs.len() - 1)
        } else {
            None
        };
        let mut ds = vec![self.full_subgroup()];
        loop {
            let last = ds.last().unwrap();
            let next = self.commutator_subgroup(last, last).unwrap();
            if next.elements == last.elements {
                break;
            }
            ds.push(next);
        }
        let is_solvable = ds.last().unwrap().order() == 1;
        let p_group = {
            let mut m = order as u64;
            let mut p = None;
            if m > 1 {
                let mut d = 2;
                while d * d <= m {
                    if m % d == 0 {
                        p = Some(d);
                        break;
                    }
                    d += 1;
                }
                let p0 = p.unwrap_or(m);
                while m % p0 == 0 {
                    m /= p0;
                }
                if m == 1 {
                    p = Some(p0);
                } else {
                    p = None;
                }
            }
            p
        };
        GroupProps {
            order,
            is_abelian,
            is_perfect,
            nilpotency_class,
            is_solvable,
            p_group,
        }
    }

    /// Invariant factors d1 | d2 | ... of the abelianization G / Gamma_2,
    /// via Smith normal form of the Cayley-graph relation matrix.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        let gamma2 = self.derived_series(2).terms[1].clone();
        let (q, _) = self.quotient(&gamma2).expect("derived subgroup is normal");
        let gens = q.reduced_gens(&(1..q.order).collect::<Vec<_>>());
        let r = gens.len();
        if r == 0 {
            return vec![];
        }
        // expression vector per element via BFS over the Cayley graph
        let mut expr: Vec<Option<Vec<i64>>> = vec![None; q.order];
        expr[0] = Some(vec![0; r]);
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for (j, &s) in gens.iter().enumerate() {
                let y = q.mul(x, s);
                if expr[y].is_none() {
                    let mut v = expr[x].clone().unwrap();
                    v[j] += 1;
                    expr[y] = Some(v);
                    queue.push(y);
                }
            }
        }
        let mut rows = Vec::new();
        for x in 0..q.order {
            let vx = expr[x].as_ref().unwrap();
            for (j, &s) in gens.iter().enumerate() {
                let y = q.mul(x, s);
                let vy = expr[y].as_ref().unwrap();
                let mut row: Vec<i64> = (0..r).map(|c| vx[c] - vy[c]).collect();
                row[j] += 1;
                if row.iter().any(|&e| e != 0) {
                    rows.push(row);
                }
            }
        }
        snf::nontrivial_invariant_factors(rows, r)
    }

    /// Every subgroup, by closure-BFS over added generators. Intended for
    /// small orders (the sweep universe).
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        use std::collections::BTreeSet;
        let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = vec![self.trivial_subgroup()];
        seen.insert(queue[0].elements.clone());
        while let Some(sub) = queue.pop() {
            for g in 1..self.order {
                if sub.contains(g) {
                    continue;
                }
                let mut gens = sub.witness_gens.clone();
                gens.push(g);
                let bigger = self.subgroup_closure(&gens);
                if seen.insert(bigger.elements.clone()) {
                    queue.push(bigger);
                }
            }
            out.push(sub);
        }
        out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
        out
    }

    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        self.all_subgroups()
            .into_iter()
            .filter(|s| s.is_normal(self).unwrap_or(false))
            .collect()
    }

    /// Extract a subgroup as a standalone group, together with the embedding
    /// of its elements back into the parent. The subgroup identity maps to 0.
    pub fn subgroup_as_group(&self, sub: &Subgroup) -> Result<(FiniteGroup, Vec<Elem>)> {
        if sub.parent_fp != self.fingerprint {
            return Err(Error::MismatchedParents);
        }
        let elems = &sub.elements;
        let m = elems.len();
        let mut index_of = std::collections::HashMap::new();
        for (i, &e) in elems.iter().enumerate() {
            index_of.insert(e, i);
        }
        let mut mul = vec![0u32; m * m];
        for i in 0..m {
            for j in 0..m {
                let p = self.mul(elems[i], elems[j]);
                let k = *index_of
                    .get(&p)
                    .ok_or_else(|| Error::InvalidGroup("subgroup not closed".into()))?;
                mul[i * m + j] = k as u32;
            }
        }
        let gens: Vec<Elem> = sub
            .witness_gens
            .iter()
            .filter_map(|e| index_of.get(e).copied())
            .filter(|&i| i != 0)
            .collect();
        let gens = if gens.is_empty() && m > 1 {
            (1..m).collect()
        } else {
            gens
        };
        let g = FiniteGroup::from_parts(m, mul, gens, None)?;
        Ok((g, elems.clone()))
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GroupProps {
    pub order: usize,
    pub is_abelian: bool,
    pub is_perfect: bool,
    /// Some(class) iff nilpotent.
    pub nilpotency_class: Option<usize>,
    /// For finite groups this doubles as "polycyclic(=solvable, finite)".
    pub is_solvable: bool,
    /// Some(p) iff the order is a power of the prime p (and > 1).
    pub p_group: Option<u64>,
}

/// A subgroup of a fixed parent group, stored as a sorted element-index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent_fp: u64,
    elements: Vec<Elem>,
    witness_gens: Vec<Elem>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn witness_gens(&self) -> &[Elem] {
        &self.witness_gens
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn parent_fingerprint(&self) -> u64 {
        self.parent_fp
    }

    pub fn is_normal(&self, g: &FiniteGroup) -> Result<bool> {
        if self.parent_fp != g.fingerprint {
            return Err(Error::MismatchedParents);
        }
        for x in 0..g.order() {
            for &h in &self.elements {
                if !self.contains(g.conj(x, h)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Subset relation (both under the same parent).
    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.parent_fp == other.parent_fp
            && self.elements.iter().all(|&e| other.contains(e))
    }

    /// True if the stored data satisfies the subgroup axioms in `g`.
    pub fn check_in(&self, g: &FiniteGroup) -> Result<()> {
        if self.parent_fp != g.fingerprint {
            return Err(Error::MismatchedParents);
        }
        if !self.contains(0) {
            return Err(Error::InvalidGroup("subgroup misses identity".into()));
        }
        for &a in &self.elements {
            if !self.contains(g.inv(a)) {
                return Err(Error::InvalidGroup("subgroup not inverse-closed".into()));
            }
            for &b in &self.elements {
                if !self.contains(g.mul(a, b)) {
                    return Err(Error::InvalidGroup("subgroup not closed".into()));
                }
            }
        }
        let cl = g.subgroup_closure(&self.witness_gens);
        if cl.elements != self.elements {
            return Err(Error::InvalidGroup(
                "witness generators do not span the subgroup".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    LowerCentral,
    UpperCentral,
    Derived,
}

#[derive(Debug, Clone)]
pub struct SeriesChain {
    pub kind: SeriesKind,
    pub terms: Vec<Subgroup>,
    pub stabilized: bool,
}

/// A verified homomorphism stored as a per-element image table.
#[derive(Debug, Clone)]
pub struct GroupHom {
    domain_fp: u64,
    codomain_fp: u64,
    domain_order: usize,
    codomain_order: usize,
    image: Vec<u32>,
}

impl GroupHom {
    pub fn identity(g: &FiniteGroup) -> GroupHom {
        GroupHom {
            domain_fp: g.fingerprint,
            codomain_fp: g.fingerprint,
            domain_order: g.order,
            codomain_order: g.order,
            image: (0..g.order as u32).collect(),
        }
    }

    /// Extend generator images to a homomorphism, or fail with the first
    /// product witnessing the obstruction. Verification is exhaustive over
    /// all pairs plus every assigned generator image.
    pub fn from_gen_images(
        domain: &FiniteGroup,
        codomain: &FiniteGroup,
        images: &[(Elem, Elem)],
    ) -> Result<GroupHom> {
        let n = domain.order();
        let mut img = vec![UNDEF; n];
        img[0] = 0;
        // grow along a reduced generating subset, then check everything
        let gen_elems: Vec<Elem> = images.iter().map(|&(g, _)| g).collect();
        let reduced = domain.reduced_gens(&gen_elems);
        if domain.subgroup_closure(&gen_elems).order() != n {
            return Err(Error::InvalidGroup(
                "hom generator set does not generate the domain".into(),
            ));
        }
        let lookup: std::collections::HashMap<Elem, Elem> = images.iter().copied().collect();
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &s in &reduced {
                let y = domain.mul(x, s);
                let cand = codomain.mul(img[x] as usize, lookup[&s]);
                if img[y] == UNDEF {
                    img[y] = cand as u32;
                    queue.push(y);
                } else if img[y] as usize != cand {
                    return Err(Error::NotAHomomorphism { x, s });
                }
            }
        }
        // every assigned generator image must agree with the extension
        for &(g, v) in images {
            if img[g] as usize != v {
                return Err(Error::NotAHomomorphism { x: g, s: g });
            }
        }
        let hom = GroupHom {
            domain_fp: domain.fingerprint,
            codomain_fp: codomain.fingerprint,
            domain_order: n,
            codomain_order: codomain.order(),
            image: img,
        };
        if let Some((x, s)) = hom.find_violation(domain, codomain) {
            return Err(Error::NotAHomomorphism { x, s });
        }
        Ok(hom)
    }

    fn find_violation(
        &self,
        domain: &FiniteGroup,
        codomain: &FiniteGroup,
    ) -> Option<(Elem, Elem)> {
        let n = domain.order();
        for a in 0..n {
            let fa = self.image[a] as usize;
            for b in 0..n {
                if codomain.mul(fa, self.image[b] as usize)
                    != self.image[domain.mul(a, b)] as usize
                {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn verify(&self, domain: &FiniteGroup, codomain: &FiniteGroup) -> bool {
        self.domain_fp == domain.fingerprint
            && self.codomain_fp == codomain.fingerprint
            && self.image[0] == 0
            && self.find_violation(domain, codomain).is_none()
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.image[x] as usize
    }

    pub fn domain_order(&self) -> usize {
        self.domain_order
    }

    pub fn codomain_order(&self) -> usize {
        self.codomain_order
    }

    pub fn domain_fingerprint(&self) -> u64 {
        self.domain_fp
    }

    pub fn codomain_fingerprint(&self) -> u64 {
        self.codomain_fp
    }

    pub fn kernel(&self, domain: &FiniteGroup) -> Subgroup {
        assert_eq!(self.domain_fp, domain.fingerprint);
        let elements: Vec<Elem> = (0..self.domain_order)
            .filter(|&x| self.image[x] == 0)
            .collect();
        Subgroup {
            parent_fp: self.domain_fp,
            witness_gens: elements.clone(),
            elements,
        }
    }

    pub fn image_subgroup(&self, codomain: &FiniteGroup) -> Subgroup {
        assert_eq!(self.codomain_fp, codomain.fingerprint);
        let mut seen = vec![false; self.codomain_order];
        for &v in &self.image {
            seen[v as usize] = true;
        }
        let elements: Vec<Elem> = (0..self.codomain_order).filter(|&i| seen[i]).collect();
        Subgroup {
            parent_fp: self.codomain_fp,
            witness_gens: elements.clone(),
            elements,
        }
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.codomain_order];
        for &v in &self.image {
            seen[v as usize] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_injective(&self) -> bool {
        self.image.iter().filter(|&&v| v == 0).count() == 1
    }

    /// self: A -> B, then other: B -> C.
    pub fn then(&self, other: &GroupHom) -> GroupHom {
        assert_eq!(self.codomain_fp, other.domain_fp);
        GroupHom {
            domain_fp: self.domain_fp,
            codomain_fp: other.codomain_fp,
            domain_order: self.domain_order,
            codomain_order: other.codomain_order,
            image: self.image.iter().map(|&v| other.image[v as usize]).collect(),
        }
    }
}

/// A left action of `actor` on `target` by automorphisms, as one target
/// permutation per actor element.
#[derive(Debug, Clone)]
pub struct ActionTable {
    actor_fp: u64,
    target_fp: u64,
    perm: Vec<Vec<u32>>,
}

impl ActionTable {
    pub fn trivial(actor: &FiniteGroup, target: &FiniteGroup) -> ActionTable {
        let id: Vec<u32> = (0..target.order() as u32).collect();
        ActionTable {
            actor_fp: actor.fingerprint,
            target_fp: target.fingerprint,
            perm: vec![id; actor.order()],
        }
    }

    /// Conjugation self-action ^g x = g x g^-1.
    pub fn conjugation(g: &FiniteGroup) -> ActionTable {
        let perm = (0..g.order())
            .map(|a| (0..g.order()).map(|x| g.conj(a, x) as u32).collect())
            .collect();
        ActionTable {
            actor_fp: g.fingerprint,
            target_fp: g.fingerprint,
            perm,
        }
    }

    pub fn from_perms(
        actor: &FiniteGroup,
        target: &FiniteGroup,
        perm: Vec<Vec<u32>>,
    ) -> Result<ActionTable> {
        let t = ActionTable {
            actor_fp: actor.fingerprint,
            target_fp: target.fingerprint,
            perm,
        };
        t.validate(actor, target)?;
        Ok(t)
    }

    /// Checks: each permutation is an automorphism of the target, the
    /// identity acts trivially, and perm[h h'] = perm[h] o perm[h'].
    pub fn validate(&self, actor: &FiniteGroup, target: &FiniteGroup) -> Result<()> {
        if self.actor_fp != actor.fingerprint || self.target_fp != target.fingerprint {
            return Err(Error::InvalidAction("action group mismatch".into()));
        }
        let (na, nt) = (actor.order(), target.order());
        if self.perm.len() != na {
            return Err(Error::InvalidAction("wrong number of permutations".into()));
        }
        for (h, p) in self.perm.iter().enumerate() {
            if p.len() != nt {
                return Err(Error::InvalidAction(format!("perm {h} has wrong length")));
            }
            let mut seen = vec![false; nt];
            for &v in p {
                if v as usize >= nt || seen[v as usize] {
                    return Err(Error::InvalidAction(format!("perm {h} is not a bijection")));
                }
                seen[v as usize] = true;
            }
            for a in 0..nt {
                for b in 0..nt {
                    if p[target.mul(a, b)] as usize
                        != target.mul(p[a] as usize, p[b] as usize)
                    {
                        return Err(Error::InvalidAction(format!(
                            "perm {h} is not an automorphism (at {a},{b})"
                        )));
                    }
                }
            }
        }
        for (x, &v) in self.perm[0].iter().enumerate() {
            if v as usize != x {
                return Err(Error::InvalidAction("identity does not act trivially".into()));
            }
        }
        for h1 in 0..na {
            for h2 in 0..na {
                let h12 = actor.mul(h1, h2);
                for x in 0..nt {
                    if self.perm[h12][x] != self.perm[h1][self.perm[h2][x] as usize] {
                        return Err(Error::InvalidAction(format!(
                            "action law fails at ({h1},{h2},{x})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn act(&self, h: Elem, x: Elem) -> Elem {
        self.perm[h][x] as usize
    }

    pub fn actor_fingerprint(&self) -> u64 {
        self.actor_fp
    }

    pub fn target_fingerprint(&self) -> u64 {
        self.target_fp
    }

    pub fn is_trivial(&self) -> bool {
        self.perm
            .iter()
            .all(|p| p.iter().enumerate().all(|(i, &v)| v as usize == i))
    }
}

/// Derivative D_H(G): subgroup of the target generated by g * (^h g)^-1.
pub fn derivative(
    target: &FiniteGroup,
    actor: &FiniteGroup,
    act: &ActionTable,
) -> Result<Subgroup> {
    if act.actor_fp != actor.fingerprint || act.target_fp != target.fingerprint {
        return Err(Error::InvalidAction("action group mismatch".into()));
    }
    let mut gens = Vec::new();
    let mut seen = vec![false; target.order()];
    for g in 0..target.order() {
        for h in 0..actor.order() {
            let d = target.mul(g, target.inv(act.act(h, g)));
            if d != 0 && !seen[d] {
                seen[d] = true;
                gens.push(d);
            }
        }
    }
    Ok(target.subgroup_closure(&gens))
}

/// D_B^k(A) as a chain of subgroups of A, verifying at each step that the
/// term stays closed under the action (an invalid action surfaces here).
pub fn iterated_derivative(
    target: &FiniteGroup,
    actor: &FiniteGroup,
    act: &ActionTable,
    k: usize,
) -> Result<Subgroup> {
    Ok(derivative_chain(target, actor, act, k)?.pop().unwrap())
}

/// All terms D_B^0(A) = A, ..., D_B^k(A), verifying action closure per step.
pub fn derivative_chain(
    target: &FiniteGroup,
    actor: &FiniteGroup,
    act: &ActionTable,
    k: usize,
) -> Result<Vec<Subgroup>> {
    if act.actor_fp != actor.fingerprint || act.target_fp != target.fingerprint {
        return Err(Error::InvalidAction("action group mismatch".into()));
    }
    let mut chain = vec![target.full_subgroup()];
    for _ in 0..k {
        let cur = chain.last().unwrap();
        // closure under the action is what legitimizes the next derivative
        for &x in cur.elements() {
            for h in 0..actor.order() {
                if !cur.contains(act.act(h, x)) {
                    return Err(Error::InvalidAction(
                        "derivative term not closed under the action".into(),
                    ));
                }
            }
        }
        let mut gens = Vec::new();
        let mut seen = vec![false; target.order()];
        for &x in cur.elements() {
            for h in 0..actor.order() {
                let d = target.mul(x, target.inv(act.act(h, x)));
                if d != 0 && !seen[d] {
                    seen[d] = true;
                    gens.push(d);
                }
            }
        }
        chain.push(target.subgroup_closure(&gens));
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    const CAP: usize = DEFAULT_ORDER_CAP;

    fn g(name: &str) -> FiniteGroup {
        catalog::by_name(name, CAP).unwrap()
    }

    #[test]
    fn commutator_and_conjugation_identities() {
        // [TRIVIAL] defining identities, checked exhaustively on S3
        let s3 = g("S3");
        for a in 0..6 {
            for b in 0..6 {
                let c = s3.commutator(a, b).unwrap();
                let lhs = s3.mul(s3.mul(a, b), s3.mul(s3.inv(a), s3.inv(b)));
                assert_eq!(c, lhs);
                // ^a b recovers b when a and b commute
                if s3.mul(a, b) == s3.mul(b, a) {
                    assert_eq!(s3.conjugate(a, b).unwrap(), b);
                }
                // ^(ab) x = ^a(^b x)
                for x in 0..6 {
                    assert_eq!(
                        s3.conj(s3.mul(a, b), x),
                        s3.conj(a, s3.conj(b, x))
                    );
                }
            }
        }
    }

    #[test]
    fn d4_series() {
        // [DERIVED] gamma_2(D4) = Z(D4) has order 2, class 2
        let d4 = g("D4");
        let lcs = d4.lower_central_series(3);
        assert_eq!(lcs.terms[1].order(), 2);
        assert_eq!(lcs.terms[2].order(), 1);
        assert_eq!(d4.center().order(), 2);
        assert_eq!(lcs.terms[1].elements(), d4.center().elements());
        let ucs = d4.upper_central_series(2);
        assert_eq!(ucs.terms[1].order(), 2);
        assert_eq!(ucs.terms[2].order(), 8);
        assert!(ucs.stabilized);
    }

    #[test]
    fn s4_derived_series() {
        // [DERIVED] S4 > A4 > V4 > 1
        let s4 = g("S4");
        let ds = s4.derived_series(4);
        let orders: Vec<usize> = ds.terms.iter().map(|t| t.order()).collect();
        assert_eq!(orders, vec![24, 12, 4, 1]);
    }

    #[test]
    fn quotient_small_cases() {
        // [DERIVED] S3 / A3 = C2; D4 / Z = C2 x C2
        let s3 = g("S3");
        let a3 = s3.derived_series(2).terms[1].clone();
        assert_eq!(a3.order(), 3);
        let (q, proj) = s3.quotient(&a3).unwrap();
        assert_eq!(q.order(), 2);
        assert!(proj.verify(&s3, &q));
        assert!(proj.is_surjective());
        assert_eq!(proj.kernel(&s3).elements(), a3.elements());

        let d4 = g("D4");
        let (q, _) = d4.quotient(&d4.center()).unwrap();
        assert_eq!(q.order(), 4);
        assert!(q.is_abelian());
        assert_eq!(q.abelian_invariants(), vec![2, 2]);
    }

    #[test]
    fn quotient_rejects_non_normal() {
        let s3 = g("S3");
        // a subgroup of order 2 is not normal in S3
        let h = s3
            .all_subgroups()
            .into_iter()
            .find(|s| s.order() == 2)
            .unwrap();
        assert!(matches!(s3.quotient(&h), Err(Error::NotNormal)));
    }

    #[test]
    fn abelian_invariants_examples() {
        // [DERIVED] invariant factors, cross-checked by element-order counts
        assert_eq!(g("C6").abelian_invariants(), vec![6]);
        assert_eq!(g("C2xC2").abelian_invariants(), vec![2, 2]);
        assert_eq!(g("S3").abelian_invariants(), vec![2]);
        assert_eq!(g("C2xC4").abelian_invariants(), vec![2, 4]);
        assert_eq!(g("C12").abelian_invariants(), vec![12]);
        assert_eq!(g("A5").abelian_invariants(), Vec::<u64>::new());
        assert_eq!(g("Q8").abelian_invariants(), vec![2, 2]);
        assert_eq!(g("E3^2").abelian_invariants(), vec![3, 3]);
    }

    #[test]
    fn abelian_invariants_agree_with_order_counts() {
        // independent oracle: #solutions of x^d = 1 in A determines A
        for name in ["C8", "C2xC6", "C3xC3", "C2xC8", "D6", "A4"] {
            let grp = g(name);
            let inv = grp.abelian_invariants();
            let gamma2 = grp.derived_series(2).terms[1].clone();
            let (q, _) = grp.quotient(&gamma2).unwrap();
            // reconstruct abelianization order and exponent-d counts
            let order: u64 = inv.iter().product::<u64>().max(1);
            assert_eq!(order as usize, q.order(), "{name}");
            for d in 1..=q.order() as u64 {
                let from_inv: u64 = inv.iter().map(|&m| gcd(m, d)).product::<u64>().max(1);
                let direct = (0..q.order())
                    .filter(|&x| {
                        let mut y = 0usize;
                        for _ in 0..d {
                            y = q.mul(y, x);
                        }
                        y == 0
                    })
                    .count() as u64;
                assert_eq!(from_inv, direct, "{name} at exponent {d}");
            }
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    #[test]
    fn hom_extension_and_rejection() {
        let c6 = g("C6");
        let c3 = g("C3");
        // C6 -> C3, 1 |-> 1 is a hom (reduction mod 3)
        let h = GroupHom::from_gen_images(&c6, &c3, &[(1, 1)]).unwrap();
        assert!(h.verify(&c6, &c3));
        assert_eq!(h.kernel(&c6).order(), 2);
        assert!(h.is_surjective());
        // C6 -> C4, 1 |-> 1 is not a hom
        let c4 = g("C4");
        assert!(matches!(
            GroupHom::from_gen_images(&c6, &c4, &[(1, 1)]),
            Err(Error::NotAHomomorphism { .. })
        ));
        // composition
        let e = GroupHom::identity(&c3);
        let comp = h.then(&e);
        assert_eq!(comp.apply(4), h.apply(4));
    }

    #[test]
    fn action_validation() {
        let s3 = g("S3");
        let conj = ActionTable::conjugation(&s3);
        conj.validate(&s3, &s3).unwrap();
        let c2 = g("C2");
        let c5 = g("C5");
        let triv = ActionTable::trivial(&c2, &c5);
        triv.validate(&c2, &c5).unwrap();
        assert!(triv.is_trivial());
        // inversion action of C2 on C5 is valid
        let inv_perm: Vec<u32> = (0..5).map(|x| c5.inv(x) as u32).collect();
        let idp: Vec<u32> = (0..5).collect();
        let act = ActionTable::from_perms(&c2, &c5, vec![idp.clone(), inv_perm]).unwrap();
        assert_eq!(act.act(1, 2), 3);
        // x |-> x^2 is not an automorphism-action of C2 (order 4, not <= 2)
        let sq: Vec<u32> = (0..5).map(|x| ((x * 2) % 5) as u32).collect();
        assert!(ActionTable::from_perms(&c2, &c5, vec![idp, sq]).is_err());
    }

    #[test]
    fn derivative_of_inversion_action() {
        // [DERIVED] C2 acting on C5 by inversion: g * (^h g)^-1 = g^2, so
        // the derivative is all of C5
        let c2 = g("C2");
        let c5 = g("C5");
        let idp: Vec<u32> = (0..5).collect();
        let inv_perm: Vec<u32> = (0..5).map(|x| c5.inv(x) as u32).collect();
        let act = ActionTable::from_perms(&c2, &c5, vec![idp, inv_perm]).unwrap();
        let d = derivative(&c5, &c2, &act).unwrap();
        assert_eq!(d.order(), 5);
        // iterating keeps giving C5
        let chain = derivative_chain(&c5, &c2, &act, 3).unwrap();
        assert!(chain.iter().skip(1).all(|s| s.order() == 5));
        // trivial action has trivial derivative
        let triv = ActionTable::trivial(&c2, &c5);
        assert_eq!(derivative(&c5, &c2, &triv).unwrap().order(), 1);
    }

    #[test]
    fn conjugation_derivative_is_commutator_subgroup() {
        // [TRIVIAL] D_G(G) under conjugation = [G, G]
        for name in ["S3", "D4", "A4", "Q8"] {
            let grp = g(name);
            let act = ActionTable::conjugation(&grp);
            let d = derivative(&grp, &grp, &act).unwrap();
            let gamma2 = grp.derived_series(2).terms[1].clone();
            assert_eq!(d.elements(), gamma2.elements(), "{name}");
        }
    }

    #[test]
    fn frak_d_level_one_is_center() {
        for name in ["S3", "D4", "Q8", "A4", "C6", "D6"] {
            let grp = g(name);
            assert_eq!(
                grp.frak_d(1).elements(),
                grp.center().elements(),
                "{name}"
            );
        }
    }

    #[test]
    fn frak_d_grows_and_swallows_nilpotent_groups() {
        // chain is ascending; for Q8 (solvable of length 2) the second term
        // already contains everything killed against [G,G]
        let q8 = g("Q8");
        let d1 = q8.frak_d(1);
        let d2 = q8.frak_d(2);
        assert!(d1.is_subset_of(&d2));
        assert_eq!(d2.order(), 8); // brackets against Q8' = {1,-1} central
        let s3 = g("S3");
        assert!(s3.frak_d(1).is_subset_of(&s3.frak_d(2)));
    }

    #[test]
    fn subgroup_extraction() {
        let s4 = g("S4");
        let a4 = s4.derived_series(2).terms[1].clone();
        let (h, embed) = s4.subgroup_as_group(&a4).unwrap();
        assert_eq!(h.order(), 12);
        h.validate().unwrap();
        // embedding preserves products
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(embed[h.mul(a, b)], s4.mul(embed[a], embed[b]));
            }
        }
    }

    #[test]
    fn all_subgroups_counts() {
        // [DERIVED] subgroup counts: S3 has 6, D4 has 10, Q8 has 6
        assert_eq!(g("S3").all_subgroups().len(), 6);
        assert_eq!(g("D4").all_subgroups().len(), 10);
        assert_eq!(g("Q8").all_subgroups().len(), 6);
        // every subgroup of Q8 is normal
        assert_eq!(g("Q8").normal_subgroups().len(), 6);
    }

    #[test]
    fn normal_closure_examples() {
        let s4 = g("S4");
        // normal closure of a transposition is all of S4
        let transposition = (1..24).find(|&x| s4.element_order(x) == 2
            && !s4.derived_series(2).terms[1].contains(x)).unwrap();
        assert_eq!(s4.normal_closure(&[transposition]).order(), 24);
        // normal closure of a 3-cycle is A4
        let three_cycle = (1..24).find(|&x| s4.element_order(x) == 3).unwrap();
        assert_eq!(s4.normal_closure(&[three_cycle]).order(), 12);
    }

    #[test]
    fn predicates_table() {
        let p = g("C6").predicates();
        assert!(p.is_abelian && p.is_solvable);
        assert_eq!(p.nilpotency_class, Some(1));
        assert_eq!(p.p_group, None);
        let p = g("C1").predicates();
        assert_eq!(p.nilpotency_class, Some(0));
        let p = g("A5").predicates();
        assert!(p.is_perfect && !p.is_solvable);
        assert_eq!(p.nilpotency_class, None);
    }
}
