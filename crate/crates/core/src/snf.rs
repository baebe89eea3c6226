//! Smith normal form over the integers, used for invariant-factor reduction
//! of finite abelian quotients.

/// Reduce an integer matrix (given as rows of equal width) to its invariant
/// factors d1 | d2 | ... . Returns the nonzero diagonal entries in divisor
/// order, including 1s.
pub fn invariant_factors(mut rows: Vec<Vec<i64>>, cols: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut top = 0usize; // rows < top and cols < left are finished
    let mut left = 0usize;
    while top < rows.len() && left < cols {
        // pick pivot of minimal nonzero absolute value
        let mut pivot: Option<(usize, usize)> = None;
        for r in top..rows.len() {
            for c in left..cols {
                let v = rows[r][c].unsigned_abs();
                if v != 0 && pivot.map_or(true, |(pr, pc)| v < rows[pr][pc].unsigned_abs()) {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        rows.swap(top, pr);
        for row in rows.iter_mut() {
            row.swap(left, pc);
        }
        if rows[top][left] < 0 {
            for c in left..cols {
                rows[top][c] = -rows[top][c];
            }
        }
        let p = rows[top][left];
        // clear column
        let mut dirty = false;
        for r in top + 1..rows.len() {
            let q = rows[r][left].div_euclid(p);
            if q != 0 {
                for c in left..cols {
                    rows[r][c] -= q * rows[top][c];
                }
            }
            if rows[r][left] != 0 {
                dirty = true;
            }
        }
        // clear row
        for c in left + 1..cols {
            let q = rows[top][c].div_euclid(p);
            if q != 0 {
                for r in top..rows.len() {
                    rows[r][c] -= q * rows[r][left];
                }
            }
            if rows[top][c] != 0 {
                dirty = true;
            }
        }
        if dirty {
            continue; // remainders became new, smaller pivot candidates
        }
        // pivot must divide every remaining entry for the divisor chain
        let mut fixed = false;
        'outer: for r in top + 1..rows.len() {
            for c in left + 1..cols {
                if rows[r][c] % p != 0 {
                    // fold the offending row into the pivot row and restart
                    for cc in left..cols {
                        rows[top][cc] += rows[r][cc];
                    }
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        out.push(p as u64);
        top += 1;
        left += 1;
    }
    out
}

/// Invariant factors of the quotient presented by `rows` with the 1s dropped,
/// i.e. the cyclic decomposition d1 | d2 | ... of Z^cols / rowspace, assuming
/// the quotient is finite.
pub fn nontrivial_invariant_factors(rows: Vec<Vec<i64>>, cols: usize) -> Vec<u64> {
    invariant_factors(rows, cols)
        .into_iter()
        .filter(|&d| d > 1)
        .collect()
}
