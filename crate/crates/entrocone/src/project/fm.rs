//! Fourier-Motzkin elimination and LP-based redundancy removal.
//!
//! Elimination is exact but blows up without pruning, so every elimination
//! step is followed by redundancy removal. The canonical H-representation
//! pass at the end separates implicit equalities and reduces the
//! inequalities modulo them, which makes outputs comparable across
//! projection methods.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::linalg;
use crate::lp::infer;
use crate::shannon::Cone;
use crate::space::{cmp_coeff_seq, form_key, LinForm, Rat, Relation, SubsetMask};
use crate::{Error, Result};

/// Drop duplicates (by canonical form) and every inequality that the
/// remaining ones plus the equalities already imply. The input order is
/// preserved on the survivors.
pub fn remove_redundant(ineqs: &[LinForm], eqs: &[LinForm]) -> Result<Vec<LinForm>> {
    let n = match ineqs.first().or_else(|| eqs.first()) {
        Some(f) => f.n(),
        None => return Ok(Vec::new()),
    };
    let mut forms: Vec<LinForm> = Vec::new();
    let mut seen = BTreeSet::new();
    for f in ineqs {
        let c = f.canonicalize();
        if !c.is_zero() && seen.insert(form_key(&c)) {
            forms.push(c);
        }
    }
    let mut alive = vec![true; forms.len()];
    for i in 0..forms.len() {
        let others: Vec<LinForm> = forms
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i && alive[*j])
            .map(|(_, f)| f.clone())
            .collect();
        let cone = Cone::new(n, others, eqs.to_vec())?;
        if infer(&cone, &forms[i])?.implied() {
            alive[i] = false;
        }
    }
    Ok(forms
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(f, _)| f)
        .collect())
}

/// Eliminate the given coordinates one at a time: by Gaussian substitution
/// when an equality mentions the coordinate, otherwise by combining
/// opposite-sign inequality pairs. The result is the exact projection onto
/// the remaining coordinates, in canonical H-representation.
pub fn fm_eliminate(cone: &Cone, drop: &BTreeSet<SubsetMask>) -> Result<Cone> {
    let n = cone.n();
    let all: BTreeSet<SubsetMask> = SubsetMask::full(n).nonempty_subsets().collect();
    if !drop.is_subset(&all) {
        return Err(Error::DegenerateKeepSet);
    }
    if drop.len() == all.len() {
        return Err(Error::DegenerateKeepSet);
    }

    let mut ineqs: Vec<LinForm> = cone.ineqs().iter().map(LinForm::canonicalize).collect();
    let mut eqs: Vec<LinForm> = cone.eqs().iter().map(LinForm::canonicalize).collect();

    for &coord in drop.iter().rev() {
        // Substitution via an equality, when one mentions the coordinate.
        let pivot = eqs
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.coeff(coord).is_zero())
            .min_by(|(_, a), (_, b)| {
                a.support_size()
                    .cmp(&b.support_size())
                    .then_with(|| cmp_coeff_seq(a, b))
            })
            .map(|(i, _)| i);
        if let Some(pi) = pivot {
            let eq = eqs.swap_remove(pi);
            let et = eq.coeff(coord);
            let substitute = |f: &LinForm| -> LinForm {
                let ft = f.coeff(coord);
                if ft.is_zero() {
                    f.clone()
                } else {
                    f.add_scaled(&eq, &(-ft / &et)).canonicalize()
                }
            };
            ineqs = ineqs.iter().map(&substitute).filter(|f| !f.is_zero()).collect();
            eqs = eqs.iter().map(&substitute).filter(|f| !f.is_zero()).collect();
        } else {
            let mut next: Vec<LinForm> = Vec::new();
            let mut pos: Vec<&LinForm> = Vec::new();
            let mut neg: Vec<&LinForm> = Vec::new();
            for f in &ineqs {
                let c = f.coeff(coord);
                if c.is_zero() {
                    next.push(f.clone());
                } else if c > Rat::zero() {
                    pos.push(f);
                } else {
                    neg.push(f);
                }
            }
            for p in &pos {
                for q in &neg {
                    // (-q_t) * p + p_t * q cancels the coordinate.
                    let combined = (*p)
                        .add_scaled(q, &(-p.coeff(coord) / q.coeff(coord)))
                        .canonicalize();
                    if !combined.is_zero() {
                        next.push(combined);
                    }
                }
            }
            ineqs = next;
        }
        ineqs = remove_redundant(&ineqs, &eqs)?;
    }

    canonical_h_rep(n, ineqs, eqs)
}

/// Canonical H-representation: implicit equalities separated out, the
/// equality system reduced to a unique echelon basis, inequalities reduced
/// modulo the equalities, made irredundant, and sorted.
pub fn canonical_h_rep(n: usize, ineqs: Vec<LinForm>, eqs: Vec<LinForm>) -> Result<Cone> {
    let mut eqs: Vec<LinForm> = eqs
        .iter()
        .map(LinForm::canonicalize)
        .filter(|f| !f.is_zero())
        .collect();
    let mut ineqs: Vec<LinForm> = ineqs
        .iter()
        .map(LinForm::canonicalize)
        .filter(|f| !f.is_zero())
        .collect();

    // An inequality whose negation is also implied holds with equality
    // everywhere on the cone.
    let whole = Cone::new(n, ineqs.clone(), eqs.clone())?;
    let mut forced: Vec<LinForm> = Vec::new();
    let mut keep: Vec<LinForm> = Vec::new();
    for f in &ineqs {
        if infer(&whole, &f.negated())?.implied() {
            forced.push(f.clone().with_relation(Relation::Eq));
        } else {
            keep.push(f.clone());
        }
    }
    eqs.extend(forced);
    ineqs = keep;

    // Echelon basis for the equalities over ascending coordinates.
    let masks: Vec<SubsetMask> = SubsetMask::full(n).nonempty_subsets().collect();
    let mut eq_rows: Vec<Vec<Rat>> = eqs
        .iter()
        .map(|f| masks.iter().map(|m| f.coeff(*m)).collect())
        .collect();
    let pivots = linalg::rref(&mut eq_rows);
    let eqs: Vec<LinForm> = eq_rows
        .iter()
        .map(|row| {
            LinForm::new(
                n,
                Relation::Eq,
                masks.iter().zip(row).map(|(m, c)| (*m, c.clone())),
            )
            .map(|f| f.canonicalize())
        })
        .collect::<Result<_>>()?;

    // Reduce inequalities modulo the equality pivots, prune, sort.
    let reduced: Vec<LinForm> = ineqs
        .iter()
        .map(|f| {
            let mut row: Vec<Rat> = masks.iter().map(|m| f.coeff(*m)).collect();
            for (eq_row, &p) in eq_rows.iter().zip(&pivots) {
                if row[p].is_zero() {
                    continue;
                }
                let factor = row[p].clone();
                for (v, e) in row.iter_mut().zip(eq_row) {
                    let delta = &factor * e;
                    *v -= delta;
                }
            }
            LinForm::new(
                n,
                Relation::Ge,
                masks.iter().zip(&row).map(|(m, c)| (*m, c.clone())),
            )
            .map(|f| f.canonicalize())
        })
        .collect::<Result<_>>()?;
    let mut ineqs = remove_redundant(&reduced, &eqs)?;
    sort_forms(&mut ineqs);
    Ok(Cone::new(n, ineqs, eqs)?)
}

/// Deterministic constraint order: by support size, then coefficients.
pub fn sort_forms(forms: &mut [LinForm]) {
    forms.sort_by(|a, b| {
        a.support_size()
            .cmp(&b.support_size())
            .then_with(|| cmp_coeff_seq(a, b))
    });
}
