//! Random functionals and cones for property tests.

use num_bigint::BigInt;
use rand::Rng;

use crate::shannon::Cone;
use crate::space::{LinForm, Rat, Relation, SubsetMask};

/// A random functional over the nonempty subsets of `{1..n}` with integer
/// coefficients in `[-bound, bound]`; roughly half the coordinates are
/// zero. Never returns the zero functional.
pub fn random_form(rng: &mut impl Rng, n: usize, relation: Relation, bound: i64) -> LinForm {
    loop {
        let mut coeffs = Vec::new();
        for m in SubsetMask::full(n).nonempty_subsets() {
            if rng.gen_bool(0.5) {
                let c = rng.gen_range(-bound..=bound);
                coeffs.push((m, Rat::from_integer(BigInt::from(c))));
            }
        }
        let f = LinForm::new(n, relation, coeffs).unwrap().canonicalize();
        if !f.is_zero() {
            return f;
        }
    }
}

/// A random cone over a small ground set: `n_ineqs` inequalities and
/// `n_eqs` equalities with coefficients in `[-3, 3]`.
pub fn random_cone(rng: &mut impl Rng, n: usize, n_ineqs: usize, n_eqs: usize) -> Cone {
    let ineqs = (0..n_ineqs)
        .map(|_| random_form(rng, n, Relation::Ge, 3))
        .collect();
    let eqs = (0..n_eqs)
        .map(|_| random_form(rng, n, Relation::Eq, 3))
        .collect();
    Cone::new(n, ineqs, eqs).unwrap()
}
