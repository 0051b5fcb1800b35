//! A textbook dense rational Phase-I simplex with Bland's rule.
//!
//! Deliberately naive: rational arithmetic everywhere, no fraction-free
//! tricks, no Dantzig acceleration. It exists to cross-check the verdicts
//! of the production solver on small random systems.

use num_traits::{One, Signed, Zero};

use crate::space::Rat;

/// Is `M u = b` feasible? Columns are sparse `(row, value)` lists paired
/// with a nonnegativity flag (`false` means the unknown is free).
pub fn feasible(nrows: usize, cols: &[(Vec<(usize, Rat)>, bool)], rhs: &[Rat]) -> bool {
    // Split free columns, orient rhs nonnegative, append artificials.
    let mut dense: Vec<Vec<Rat>> = Vec::new();
    for (entries, nonneg) in cols {
        let mut v = vec![Rat::zero(); nrows];
        for (i, c) in entries {
            v[*i] = c.clone();
        }
        dense.push(v.clone());
        if !nonneg {
            dense.push(v.into_iter().map(|x| -x).collect());
        }
    }
    let nstruct = dense.len();
    let ncols = nstruct + nrows;
    let mut t = vec![vec![Rat::zero(); ncols + 1]; nrows + 1];
    for i in 0..nrows {
        let flip = rhs[i].is_negative();
        for (j, col) in dense.iter().enumerate() {
            t[i][j] = if flip { -col[i].clone() } else { col[i].clone() };
        }
        t[i][nstruct + i] = Rat::one();
        t[i][ncols] = if flip { -rhs[i].clone() } else { rhs[i].clone() };
    }
    // Cost row: minimize the sum of artificials, priced out.
    for j in 0..=ncols {
        let mut s = Rat::zero();
        for i in 0..nrows {
            s -= &t[i][j];
        }
        t[nrows][j] = s;
    }
    for i in 0..nrows {
        t[nrows][nstruct + i] = Rat::zero();
    }

    let mut basis: Vec<usize> = (0..nrows).map(|i| nstruct + i).collect();
    loop {
        // Bland: lowest-index nonbasic column with a negative reduced cost.
        let entering = (0..ncols).find(|&j| {
            t[nrows][j].is_negative() && !basis.contains(&j)
        });
        let Some(c) = entering else { break };
        let mut leave: Option<usize> = None;
        for i in 0..nrows {
            if !t[i][c].is_positive() {
                continue;
            }
            let better = match leave {
                None => true,
                Some(l) => {
                    let ratio_i = &t[i][ncols] / &t[i][c];
                    let ratio_l = &t[l][ncols] / &t[l][c];
                    ratio_i < ratio_l || (ratio_i == ratio_l && basis[i] < basis[l])
                }
            };
            if better {
                leave = Some(i);
            }
        }
        let r = leave.expect("phase-one objective is bounded below");
        let pivot = t[r][c].clone();
        for v in t[r].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..=nrows {
            if i == r || t[i][c].is_zero() {
                continue;
            }
            let f = t[i][c].clone();
            for j in 0..=ncols {
                let delta = &f * &t[r][j];
                t[i][j] -= delta;
            }
        }
        basis[r] = c;
    }
    t[nrows][ncols].is_zero()
}
