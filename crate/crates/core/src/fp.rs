//! Finitely presented groups and coset enumeration.
//!
//! Words are sequences of nonzero letters: `+(i+1)` is generator i,
//! `-(i+1)` its inverse. Enumeration is deduction-driven: every table entry
//! made is pushed on a stack and scanned against all relator positions that
//! mention its letter, so the table is kept closed as it grows. Coincidences
//! are merged through a union-find keyed to the minimum representative, and
//! dead rows are compacted away when the table completes.

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, Limits};

pub type Word = Vec<i32>;

const UNDEF: u32 = u32::MAX;

#[inline]
fn col(letter: i32) -> usize {
    debug_assert!(letter != 0);
    if letter > 0 {
        2 * (letter as usize - 1)
    } else {
        2 * ((-letter) as usize - 1) + 1
    }
}

pub fn invert_word(w: &[i32]) -> Word {
    w.iter().rev().map(|&x| -x).collect()
}

/// Cancel adjacent x, x^-1 pairs.
pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        if x == 0 {
            continue;
        }
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn cyclic_reduce(mut w: Word) -> Word {
    while w.len() >= 2 && w[0] == -*w.last().unwrap() {
        w.remove(0);
        w.pop();
    }
    w
}

/// Lexicographically least rotation of the word or its inverse; relators
/// equal up to rotation and inversion impose the same relation.
fn canonical_cyclic(w: &[i32]) -> Word {
    let mut best: Option<Word> = None;
    for cand in [w.to_vec(), invert_word(w)] {
        for i in 0..cand.len() {
            let mut rot = cand[i..].to_vec();
            rot.extend_from_slice(&cand[..i]);
            if best.as_ref().map(|b| rot < *b).unwrap_or(true) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct Presentation {
    pub num_gens: usize,
    pub relators: Vec<Word>,
    pub gen_names: Option<Vec<String>>,
}

impl Presentation {
    pub fn new(num_gens: usize, relators: Vec<Word>) -> Result<Presentation> {
        let p = Presentation {
            num_gens,
            relators,
            gen_names: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.relators {
            self.check_word(r)?;
        }
        Ok(())
    }

    pub fn check_word(&self, w: &[i32]) -> Result<()> {
        for &x in w {
            let mag = x.unsigned_abs() as usize;
            if x == 0 || mag > self.num_gens {
                return Err(Error::InvalidWord {
                    index: mag,
                    num_gens: self.num_gens,
                });
            }
        }
        Ok(())
    }
}

/// Relators preprocessed for scanning: freely and cyclically reduced,
/// deduplicated up to rotation/inversion, and indexed per table column by
/// every position at which that column's letter occurs.
struct RelIndex {
    relators: Vec<Word>,
    edp: Vec<Vec<(u32, u32)>>, // per column: (relator, start position)
}

impl RelIndex {
    fn build(pres: &Presentation) -> RelIndex {
        let mut seen = std::collections::BTreeSet::new();
        let mut relators = Vec::new();
        for r in &pres.relators {
            let r = cyclic_reduce(free_reduce(r));
            if r.is_empty() {
                continue;
            }
            if seen.insert(canonical_cyclic(&r)) {
                relators.push(r);
            }
        }
        let mut edp = vec![Vec::new(); 2 * pres.num_gens];
        for (ri, r) in relators.iter().enumerate() {
            for (pos, &x) in r.iter().enumerate() {
                edp[col(x)].push((ri as u32, pos as u32));
            }
        }
        RelIndex { relators, edp }
    }
}

struct Table {
    cols: usize,
    tbl: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    alloc: usize,
    limit: usize,
    dedns: Vec<(u32, u32)>, // (coset, column)
}

impl Table {
    fn new(cols: usize, limit: usize) -> Table {
        let mut t = Table {
            cols,
            tbl: Vec::new(),
            parent: Vec::new(),
            live: 0,
            alloc: 0,
            limit,
            dedns: Vec::new(),
        };
        t.alloc_row().expect("limit is at least one");
        t
    }

    fn alloc_row(&mut self) -> Result<u32> {
        if self.alloc >= self.limit {
            return Err(Error::CosetLimitExceeded { limit: self.limit });
        }
        let n = self.alloc as u32;
        self.alloc += 1;
        self.live += 1;
        self.tbl.extend(std::iter::repeat(UNDEF).take(self.cols));
        self.parent.push(n);
        Ok(n)
    }

    fn find(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let p = self.parent[c as usize];
            self.parent[c as usize] = self.parent[p as usize];
            c = self.parent[c as usize];
        }
        c
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c as u32
    }

    /// Entry at a live coset, resolved to a live coset (entries may go stale
    /// when rows merge; they stay valid up to union-find resolution).
    #[inline]
    fn get(&mut self, c: u32, col: usize) -> u32 {
        let raw = self.tbl[c as usize * self.cols + col];
        if raw == UNDEF {
            UNDEF
        } else {
            self.find(raw)
        }
    }

    /// Record a * column = b (both live) plus the inverse entry, queuing
    /// deductions. A conflicting inverse entry becomes a coincidence.
    fn set_entry(&mut self, a: u32, c: usize, b: u32) {
        self.tbl[a as usize * self.cols + c] = b;
        self.dedns.push((a, c as u32));
        let ic = c ^ 1;
        let back = self.tbl[b as usize * self.cols + ic];
        if back == UNDEF {
            self.tbl[b as usize * self.cols + ic] = a;
            self.dedns.push((b, ic as u32));
        } else {
            let back = self.find(back);
            let a = self.find(a);
            if back != a {
                self.coincide(back, a);
            }
        }
    }

    fn define(&mut self, a: u32, c: usize) -> Result<u32> {
        let n = self.alloc_row()?;
        let a = self.find(a);
        self.set_entry(a, c, n);
        Ok(n)
    }

    fn merge(&mut self, a: u32, b: u32, rowq: &mut Vec<u32>) {
        let a = self.find(a);
        let b = self.find(b);
        if a == b {
            return;
        }
        let (keep, drop) = if a < b { (a, b) } else { (b, a) };
        self.parent[drop as usize] = keep;
        self.live -= 1;
        rowq.push(drop);
    }

    /// Merge two cosets and transfer every entry of each dead row onto its
    /// surviving representative, cascading further coincidences.
    fn coincide(&mut self, a: u32, b: u32) {
        let mut rowq = Vec::new();
        self.merge(a, b, &mut rowq);
        let mut i = 0;
        while i < rowq.len() {
            let d = rowq[i] as usize;
            i += 1;
            for c in 0..self.cols {
                let e = self.tbl[d * self.cols + c];
                if e == UNDEF {
                    continue;
                }
                let u = self.find(d as u32);
                let v = self.find(e);
                let tu = self.tbl[u as usize * self.cols + c];
                if tu != UNDEF {
                    // u * x already known; the two targets coincide
                    self.merge(tu, v, &mut rowq);
                    continue;
                }
                let ic = c ^ 1;
                let tv = self.tbl[v as usize * self.cols + ic];
                if tv != UNDEF {
                    // v * x^-1 known, so u coincides with it; still record
                    // u * x = v so no entry pair is left half-defined
                    self.merge(u, tv, &mut rowq);
                    let u2 = self.find(u);
                    let v2 = self.find(v);
                    if self.tbl[u2 as usize * self.cols + c] == UNDEF {
                        self.tbl[u2 as usize * self.cols + c] = v2;
                        self.dedns.push((u2, c as u32));
                    }
                } else {
                    self.tbl[u as usize * self.cols + c] = v;
                    self.dedns.push((u, c as u32));
                    self.tbl[v as usize * self.cols + ic] = u;
                    self.dedns.push((v, ic as u32));
                }
            }
        }
    }

    /// Trace the relator cyclically from `start` at coset `alpha`: a closed
    /// scan with mismatched ends is a coincidence, a gap of one is a
    /// deduction, a wider gap is left for later.
    fn scan(&mut self, alpha: u32, rel: &[i32], start: usize) {
        let l = rel.len();
        let alpha = self.find(alpha);
        let mut f = alpha;
        let mut fi = 0;
        while fi < l {
            let t = self.get(f, col(rel[(start + fi) % l]));
            if t == UNDEF {
                break;
            }
            f = t;
            fi += 1;
        }
        if fi == l {
            if f != alpha {
                self.coincide(f, alpha);
            }
            return;
        }
        let mut b = alpha;
        let mut bi = l;
        while bi > fi {
            let t = self.get(b, col(-rel[(start + bi - 1) % l]));
            if t == UNDEF {
                break;
            }
            b = t;
            bi -= 1;
        }
        if bi == fi {
            if b != f {
                self.coincide(b, f);
            }
        } else if bi == fi + 1 {
            // both target entries are undefined here, so this cannot conflict
            self.set_entry(f, col(rel[(start + fi) % l]), b);
        }
    }

    /// Scan a word from `alpha`, defining new cosets until it closes.
    fn scan_and_fill(&mut self, alpha: u32, word: &[i32]) -> Result<()> {
        let l = word.len();
        if l == 0 {
            return Ok(());
        }
        loop {
            let base = self.find(alpha);
            let mut f = base;
            let mut fi = 0;
            while fi < l {
                let t = self.get(f, col(word[fi]));
                if t == UNDEF {
                    break;
                }
                f = t;
                fi += 1;
            }
            if fi == l {
                if f != base {
                    self.coincide(f, base);
                }
                return Ok(());
            }
            let mut b = base;
            let mut bi = l;
            while bi > fi {
                let t = self.get(b, col(-word[bi - 1]));
                if t == UNDEF {
                    break;
                }
                b = t;
                bi -= 1;
            }
            if bi == fi {
                if b != f {
                    self.coincide(b, f);
                }
                return Ok(());
            }
            if bi == fi + 1 {
                self.set_entry(f, col(word[fi]), b);
                return Ok(());
            }
            self.define(f, col(word[fi]))?;
        }
    }

    fn process_deductions(&mut self, rels: &RelIndex) {
        while let Some((a, c)) = self.dedns.pop() {
            let a = self.find(a);
            if self.tbl[a as usize * self.cols + c as usize] == UNDEF {
                continue;
            }
            for k in 0..rels.edp[c as usize].len() {
                let (ri, pos) = rels.edp[c as usize][k];
                self.scan(a, &rels.relators[ri as usize], pos as usize);
            }
        }
    }
}

/// A completed, compacted coset table.
#[derive(Debug, Clone)]
pub struct CosetTable {
    num_gens: usize,
    num_cosets: usize,
    table: Vec<u32>, // row-major, 2 * num_gens columns
}

impl CosetTable {
    pub fn num_cosets(&self) -> usize {
        self.num_cosets
    }

    pub fn num_gens(&self) -> usize {
        self.num_gens
    }

    #[inline]
    pub fn apply(&self, coset: usize, letter: i32) -> usize {
        self.table[coset * 2 * self.num_gens + col(letter)] as usize
    }

    pub fn apply_word(&self, mut coset: usize, word: &[i32]) -> usize {
        for &x in word {
            coset = self.apply(coset, x);
        }
        coset
    }
}

/// Enumerate the cosets of the subgroup generated by `subgroup_gens` in the
/// presented group. Deterministic: new cosets are always defined at the
/// first undefined entry of the lowest-numbered live row, columns in order.
pub fn enumerate(
    pres: &Presentation,
    subgroup_gens: &[Word],
    limit: usize,
) -> Result<CosetTable> {
    pres.validate()?;
    for w in subgroup_gens {
        pres.check_word(w)?;
    }
    if limit == 0 {
        return Err(Error::CosetLimitExceeded { limit });
    }
    let rels = RelIndex::build(pres);
    let cols = 2 * pres.num_gens;
    let mut t = Table::new(cols, limit);
    for w in subgroup_gens {
        let w = free_reduce(w);
        t.scan_and_fill(0, &w)?;
        t.process_deductions(&rels);
    }
    let mut row = 0usize;
    while row < t.alloc {
        if !t.is_live(row) {
            row += 1;
            continue;
        }
        for c in 0..cols {
            if t.tbl[row * cols + c] != UNDEF {
                continue;
            }
            if !t.is_live(row) {
                break; // merged away by a cascade; entries no longer ours
            }
            t.define(row as u32, c)?;
            t.process_deductions(&rels);
        }
        row += 1;
    }
    debug_assert!(t.dedns.is_empty());

    // compact live rows in index order (coset 0 stays 0) and resolve entries
    let mut newidx = vec![UNDEF; t.alloc];
    let mut count = 0u32;
    for i in 0..t.alloc {
        if t.is_live(i) {
            newidx[i] = count;
            count += 1;
        }
    }
    let n = count as usize;
    debug_assert_eq!(n, t.live);
    let mut table = vec![UNDEF; n * cols];
    for i in 0..t.alloc {
        if !t.is_live(i) {
            continue;
        }
        for c in 0..cols {
            let e = t.tbl[i * cols + c];
            debug_assert_ne!(e, UNDEF);
            let e = t.find(e);
            table[newidx[i] as usize * cols + c] = newidx[e as usize];
        }
    }
    let ct = CosetTable {
        num_gens: pres.num_gens,
        num_cosets: n,
        table,
    };
    verify_table(&ct, &rels, subgroup_gens)?;
    Ok(ct)
}

/// Exhaustive post-check: every relator fixes every coset and every subgroup
/// generator fixes coset 0. Failure would indicate an enumeration bug.
fn verify_table(ct: &CosetTable, rels: &RelIndex, subgroup_gens: &[Word]) -> Result<()> {
    for r in &rels.relators {
        for c in 0..ct.num_cosets {
            if ct.apply_word(c, r) != c {
                return Err(Error::InvalidGroup(
                    "coset table fails a relator check".into(),
                ));
            }
        }
    }
    for w in subgroup_gens {
        if ct.apply_word(0, w) != 0 {
            return Err(Error::InvalidGroup(
                "coset table fails a subgroup generator check".into(),
            ));
        }
    }
    Ok(())
}

/// A concrete group realized from a presentation, retaining the coset table
/// for word evaluation.
#[derive(Debug, Clone)]
pub struct Realization {
    pub group: FiniteGroup,
    /// Element index of each presentation generator.
    pub gen_elems: Vec<Elem>,
    pub table: CosetTable,
}

impl Realization {
    /// Element of the realized group spelled by a word in the presentation
    /// generators.
    pub fn word_eval(&self, word: &[i32]) -> Elem {
        self.table.apply_word(0, word)
    }
}

/// Enumerate over the trivial subgroup and turn the coset table into a full
/// multiplication table. Coset 0 is the identity; the product a*b is built
/// by peeling b along its definition path in a spanning tree, which costs
/// O(order^2) total.
pub fn realize_group(pres: &Presentation, limits: &Limits) -> Result<Realization> {
    let ct = enumerate(pres, &[], limits.coset_limit)?;
    let n = ct.num_cosets();
    if n > limits.order_cap {
        return Err(Error::OrderCapExceeded {
            order: n,
            cap: limits.order_cap,
        });
    }
    // spanning tree: order of discovery with (coset, parent, letter-column)
    let cols = 2 * pres.num_gens;
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut tree: Vec<(usize, usize, usize)> = Vec::with_capacity(n - 1.min(n));
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for c in 0..cols {
            let y = ct.table[x * cols + c] as usize;
            if !seen[y] {
                seen[y] = true;
                tree.push((y, x, c));
                queue.push(y);
            }
        }
    }
    if tree.len() + 1 != n {
        return Err(Error::InvalidGroup("coset table is not connected".into()));
    }
    let mut mul = vec![0u32; n * n];
    for a in 0..n {
        mul[a * n] = a as u32;
    }
    for &(b, pb, cb) in &tree {
        for a in 0..n {
            let ap = mul[a * n + pb] as usize;
            mul[a * n + b] = ct.table[ap * cols + cb];
        }
    }
    let mut gen_elems = Vec::with_capacity(pres.num_gens);
    let mut gens = Vec::new();
    for j in 0..pres.num_gens {
        let e = ct.apply(0, (j + 1) as i32);
        gen_elems.push(e);
        if e != 0 && !gens.contains(&e) {
            gens.push(e);
        }
    }
    let group = FiniteGroup::from_parts(n, mul, gens, None)?;
    group.validate()?;
    Ok(Realization {
        group,
        gen_elems,
        table: ct,
    })
}

/// Multiplication-table presentation: one generator per element, one length-3
/// relator per product. Large but always valid; round-trips any table group.
pub fn presentation_of(g: &FiniteGroup) -> Presentation {
    let n = g.order();
    let mut relators = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let c = g.mul(a, b);
            relators.push(vec![(a + 1) as i32, (b + 1) as i32, -((c + 1) as i32)]);
        }
    }
    Presentation {
        num_gens: n,
        relators,
        gen_names: g.labels().map(|l| l.to_vec()),
    }
}

/// Presentation on a chosen generating set, with one relator per Cayley-graph
/// edge against a breadth-first spanning tree. Also returns, for every
/// element, a word in those generators evaluating to it.
pub fn presentation_on_gens(
    g: &FiniteGroup,
    gens: &[Elem],
) -> Result<(Presentation, Vec<Word>)> {
    let n = g.order();
    if g.subgroup_closure(gens).order() != n {
        return Err(Error::InvalidGroup(
            "presentation generators do not generate".into(),
        ));
    }
    let mut parent: Vec<Option<(usize, i32)>> = vec![None; n];
    let mut order: Vec<usize> = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for (j, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, (j + 1) as i32));
                order.push(y);
            }
        }
    }
    let mut words: Vec<Word> = vec![Vec::new(); n];
    for &x in &order {
        if let Some((p, letter)) = parent[x] {
            let mut w = words[p].clone();
            w.push(letter);
            words[x] = w;
        }
    }
    let mut seen_rel = std::collections::BTreeSet::new();
    let mut relators = Vec::new();
    for x in 0..n {
        for (j, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            let mut w = words[x].clone();
            w.push((j + 1) as i32);
            w.extend(invert_word(&words[y]));
            let w = cyclic_reduce(free_reduce(&w));
            if w.is_empty() {
                continue;
            }
            if seen_rel.insert(canonical_cyclic(&w)) {
                relators.push(w);
            }
        }
    }
    let pres = Presentation {
        num_gens: gens.len(),
        relators,
        gen_names: g.labels().map(|l| gens.iter().map(|&s| l[s].clone()).collect()),
    };
    Ok((pres, words))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group::DEFAULT_ORDER_CAP as CAP;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn word_utilities() {
        assert_eq!(free_reduce(&[1, -1, 2]), vec![2]);
        assert_eq!(free_reduce(&[1, 2, -2, -1]), Vec::<i32>::new());
        assert_eq!(invert_word(&[1, 2, -3]), vec![3, -2, -1]);
        assert_eq!(cyclic_reduce(vec![-2, 1, 1, 2]), vec![1, 1]);
        // a relator equals its inverse's rotations canonically
        assert_eq!(canonical_cyclic(&[1, 2]), canonical_cyclic(&[-2, -1]));
    }

    #[test]
    fn cyclic_enumeration_matches_rewriting_oracle() {
        // [DERIVED] <a | a^5>: cosets are a^k, k = 0..4, with a acting as +1
        let pres = Presentation::new(1, vec![vec![1; 5]]).unwrap();
        let ct = enumerate(&pres, &[], 1000).unwrap();
        assert_eq!(ct.num_cosets(), 5);
        // against the rewriting oracle (rule aaaaa -> empty): the words
        // a^0..a^4 are pairwise distinct and a^5 rewrites to the identity
        let cosets: Vec<usize> = (0..5).map(|k| ct.apply_word(0, &vec![1; k])).collect();
        let mut sorted = cosets.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert_eq!(ct.apply_word(0, &[1; 5]), 0);
        for k in 0..5 {
            // a and a^-1 are mutually inverse permutations of the cosets
            assert_eq!(ct.apply(ct.apply(k, 1), -1), k);
            // a^k * a = a^(k+1) in oracle terms
            assert_eq!(ct.apply(cosets[k], 1), cosets[(k + 1) % 5]);
        }
    }

    #[test]
    fn symmetric_group_presentation() {
        // [DERIVED] <a,b | a^2, b^3, (ab)^2> has order 6 and derived length 2
        let pres =
            Presentation::new(2, vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]]).unwrap();
        let r = realize_group(&pres, &limits()).unwrap();
        assert_eq!(r.group.order(), 6);
        assert!(!r.group.is_abelian());
        assert_eq!(r.group.abelian_invariants(), vec![2]);
        // word evaluation respects the relators
        assert_eq!(r.word_eval(&[1, 1]), 0);
        assert_eq!(r.word_eval(&[2, 2, 2]), 0);
        assert_eq!(r.word_eval(&[1, 2]), r.group.mul(r.gen_elems[0], r.gen_elems[1]));
    }

    #[test]
    fn subgroup_indices_in_s3() {
        let pres =
            Presentation::new(2, vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]]).unwrap();
        // [DERIVED] index of <b> is 2, of <a> is 3
        assert_eq!(enumerate(&pres, &[vec![2]], 100).unwrap().num_cosets(), 2);
        assert_eq!(enumerate(&pres, &[vec![1]], 100).unwrap().num_cosets(), 3);
        assert_eq!(
            enumerate(&pres, &[vec![1], vec![2]], 100).unwrap().num_cosets(),
            1
        );
    }

    #[test]
    fn coincidence_collapse_to_trivial() {
        // killing both generators collapses everything
        let pres = Presentation::new(2, vec![vec![1], vec![2]]).unwrap();
        let ct = enumerate(&pres, &[], 100).unwrap();
        assert_eq!(ct.num_cosets(), 1);
    }

    #[test]
    fn free_group_hits_the_limit() {
        let pres = Presentation::new(1, vec![]).unwrap();
        assert!(matches!(
            enumerate(&pres, &[], 100),
            Err(Error::CosetLimitExceeded { limit: 100 })
        ));
    }

    #[test]
    fn quaternion_presentation_signature() {
        // [DERIVED] <a,b | a^4, b^2 a^-2, b a b^-1 a>: order 8, a unique
        // involution, six elements of order 4
        let pres = Presentation::new(
            2,
            vec![vec![1; 4], vec![2, 2, -1, -1], vec![2, 1, -2, 1]],
        )
        .unwrap();
        let r = realize_group(&pres, &limits()).unwrap();
        assert_eq!(r.group.order(), 8);
        let order_counts: Vec<usize> = (1..=4)
            .map(|d| (0..8).filter(|&x| r.group.element_order(x) == d).count())
            .collect();
        assert_eq!(order_counts, vec![1, 1, 0, 6]);
        assert_eq!(r.group.abelian_invariants(), vec![2, 2]);
    }

    #[test]
    fn determinism() {
        let pres = Presentation::new(
            2,
            vec![vec![1; 4], vec![2, 2], vec![2, 1, 2, 1]],
        )
        .unwrap();
        let a = enumerate(&pres, &[], 1000).unwrap();
        let b = enumerate(&pres, &[], 1000).unwrap();
        assert_eq!(a.table, b.table);
        assert_eq!(a.num_cosets(), 8); // dihedral of order 8
    }

    #[test]
    fn mul_table_presentation_round_trip() {
        for name in ["C1", "C6", "S3", "D4", "Q8", "A4", "C2xC4"] {
            let g = catalog::by_name(name, CAP).unwrap();
            let pres = presentation_of(&g);
            let r = realize_group(&pres, &limits()).unwrap();
            assert_eq!(r.group.order(), g.order(), "{name}");
            assert_eq!(
                r.group.abelian_invariants(),
                g.abelian_invariants(),
                "{name}"
            );
        }
    }

    #[test]
    fn generator_presentation_round_trip_with_word_map() {
        for name in ["D4", "S4", "C2xC6", "Q8"] {
            let g = catalog::by_name(name, CAP).unwrap();
            let gens = g.reduced_gens(g.gens());
            let (pres, words) = presentation_on_gens(&g, &gens).unwrap();
            // the word map is checked in the original group, independently
            // of any enumeration
            for x in 0..g.order() {
                let mut acc = 0usize;
                for &letter in &words[x] {
                    let s = gens[(letter - 1) as usize];
                    acc = g.mul(acc, s);
                }
                assert_eq!(acc, x, "{name} word for element {x}");
            }
            let r = realize_group(&pres, &limits()).unwrap();
            assert_eq!(r.group.order(), g.order(), "{name}");
            assert_eq!(
                r.group.abelian_invariants(),
                g.abelian_invariants(),
                "{name}"
            );
        }
    }

    #[test]
    fn invalid_words_rejected() {
        let pres = Presentation::new(2, vec![vec![1, 2]]).unwrap();
        assert!(matches!(
            enumerate(&pres, &[vec![3]], 100),
            Err(Error::InvalidWord { index: 3, num_gens: 2 })
        ));
        assert!(Presentation::new(1, vec![vec![0]]).is_err());
    }

    #[test]
    fn zero_generator_presentation() {
        let pres = Presentation::new(0, vec![]).unwrap();
        let r = realize_group(&pres, &limits()).unwrap();
        assert_eq!(r.group.order(), 1);
    }
}
