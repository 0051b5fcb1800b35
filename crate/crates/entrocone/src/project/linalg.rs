//! Small dense exact linear algebra over rationals.
//!
//! Everything here runs on matrices no larger than a few dozen rows, so a
//! plain Gauss-Jordan with full reduction is plenty.

use num_traits::{One, Zero};

use crate::space::Rat;

/// Reduce `rows` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row (strictly increasing).
pub fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let dim = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut next_row = 0usize;
    for col in 0..dim {
        let Some(src) = (next_row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, src);
        let inv = {
            let p = &rows[next_row][col];
            Rat::one() / p
        };
        for v in rows[next_row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[next_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == next_row || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                let delta = &f * p;
                *v -= delta;
            }
        }
        pivots.push(col);
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }
    rows.truncate(next_row);
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut copy: Vec<Vec<Rat>> = rows.to_vec();
    rref(&mut copy).len()
}

/// Indices of a maximal independent subset of `rows`, greedy in order.
pub fn independent_subset(rows: &[Vec<Rat>]) -> Vec<usize> {
    // Maintain the picked rows in reduced form; a candidate extends the
    // subset exactly when it reduces to something nonzero.
    let mut reduced: Vec<Vec<Rat>> = Vec::new();
    let mut idx = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut candidate = reduced.clone();
        candidate.push(row.clone());
        if rref(&mut candidate).len() > reduced.len() {
            reduced = candidate;
            idx.push(i);
        }
    }
    idx
}

/// A basis of `{x : rows . x = 0}` in `dim` unknowns.
pub fn null_space(rows: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    let mut reduced: Vec<Vec<Rat>> = rows.to_vec();
    let pivots = rref(&mut reduced);
    let mut basis = Vec::new();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    for free in 0..dim {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); dim];
        v[free] = Rat::one();
        for (row, &p) in reduced.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of `A x = b` (rows of `A` against `x`), or `None` if the
/// system is inconsistent. Free unknowns are set to zero.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let dim = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    let mut x = vec![Rat::zero(); dim];
    for (row, &p) in aug.iter().zip(&pivots) {
        if p == dim {
            return None; // pivot in the constant column: inconsistent
        }
        x[p] = row[dim].clone();
    }
    Some(x)
}

/// Scale a rational vector to primitive integers with a positive leading
/// sign convention off (inequality-style: direction preserved).
pub fn reduce_primitive(v: &mut [Rat]) {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut denom_lcm = BigInt::one();
    for x in v.iter() {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let mut numer_gcd = BigInt::zero();
    for x in v.iter() {
        numer_gcd = numer_gcd.gcd(&(x.numer() * &denom_lcm / x.denom()));
    }
    if numer_gcd.is_zero() {
        return;
    }
    let scale = Rat::new(denom_lcm, numer_gcd);
    for x in v.iter_mut() {
        *x *= &scale;
    }
}
