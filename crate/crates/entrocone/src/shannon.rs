//! The Shannon cone and polyhedral outer bounds.
//!
//! The cone of a ground set `{1..n}` is generated by the elemental
//! inequalities: the `n` conditional entropies `H(i | rest) >= 0` and the
//! `C(n,2) * 2^(n-2)` conditional mutual informations `I(i; j | K) >= 0`.
//! These are exactly the facet-defining Shannon-type inequalities, so the
//! H-representation is already irredundant.

use std::collections::BTreeSet;

use num_traits::One;

use crate::catalog::conditional_mi;
use crate::space::{check_ground_set, form_key, EntVector, LinForm, Rat, Relation, SubsetMask};
use crate::{Error, Result};

/// A polyhedral cone in joint-entropy space: an H-representation
/// (inequalities plus equalities) with an optional V-representation.
/// When both are present they form a double description pair.
#[derive(Clone, PartialEq, Debug)]
pub struct Cone {
    n: usize,
    ineqs: Vec<LinForm>,
    eqs: Vec<LinForm>,
    rays: Option<Vec<EntVector>>,
}

impl Cone {
    pub fn new(n: usize, ineqs: Vec<LinForm>, eqs: Vec<LinForm>) -> Result<Cone> {
        check_ground_set(n)?;
        for f in ineqs.iter().chain(eqs.iter()) {
            if f.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.n(),
                });
            }
        }
        Ok(Cone {
            n,
            ineqs,
            eqs,
            rays: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ineqs(&self) -> &[LinForm] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[LinForm] {
        &self.eqs
    }

    pub fn rays(&self) -> Option<&[EntVector]> {
        self.rays.as_deref()
    }

    pub fn constraint_count(&self) -> usize {
        self.ineqs.len() + self.eqs.len()
    }

    /// Attach a V-representation. The caller asserts double description
    /// consistency; debug builds verify it.
    pub fn with_rays(mut self, rays: Vec<EntVector>) -> Cone {
        #[cfg(debug_assertions)]
        for r in &rays {
            for f in &self.ineqs {
                debug_assert!(!f.evaluate(r).unwrap().lt(&Rat::from_integer(0.into())));
            }
            for f in &self.eqs {
                debug_assert!(f.evaluate(r).unwrap() == Rat::from_integer(0.into()));
            }
        }
        self.rays = Some(rays);
        self
    }

    /// Exact membership test against the H-representation.
    pub fn contains(&self, v: &EntVector) -> Result<bool> {
        let zero = Rat::from_integer(0.into());
        for f in &self.ineqs {
            if f.evaluate(v)? < zero {
                return Ok(false);
            }
        }
        for f in &self.eqs {
            if f.evaluate(v)? != zero {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The elemental inequalities of a ground set of `n`, canonicalized:
/// first the `n` conditional entropies `H(i | rest)`, then the conditional
/// mutual informations `I(i; j | K)` ordered by `(i, j, K)`.
pub fn elemental_inequalities(n: usize) -> Result<Vec<LinForm>> {
    check_ground_set(n)?;
    let full = SubsetMask::full(n);
    let mut out = Vec::with_capacity(elemental_count(n));
    let one = Rat::one();
    for i in 1..=n {
        let rest = full.minus(SubsetMask::singleton(i));
        out.push(
            LinForm::new(n, Relation::Ge, [(full, one.clone()), (rest, -one.clone())])?
                .canonicalize(),
        );
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            let others = full.minus(SubsetMask::from_vars([i, j]));
            // Submask walk emits K in ascending bitmask order, empty set first.
            let mut conds: Vec<SubsetMask> = others.nonempty_subsets().collect();
            conds.insert(0, SubsetMask::EMPTY);
            for cond in conds {
                out.push(conditional_mi(n, i, j, cond).canonicalize());
            }
        }
    }
    Ok(out)
}

/// `n + C(n,2) * 2^(n-2)`, the size of the elemental family.
pub fn elemental_count(n: usize) -> usize {
    if n == 1 {
        return 1;
    }
    n + n * (n - 1) / 2 * (1 << (n - 2))
}

/// The Shannon cone: every vector satisfying all elemental inequalities,
/// equivalently every normalized, nondecreasing, submodular set function.
pub fn shannon_cone(n: usize) -> Result<Cone> {
    Cone::new(n, elemental_inequalities(n)?, Vec::new())
}

/// The substituted forms of the given inequalities into `n` variables
/// that carry content beyond the Shannon cone: every map of each
/// functional's variables to nonempty subsets of `{1..n}` is enumerated,
/// duplicates and Shannon-implied forms are dropped, and the survivors
/// come back in deterministic order.
///
/// Shannon implication is decided once per renaming orbit (the cone is
/// symmetric), which keeps the LP count far below the family size.
pub fn beyond_shannon_closure(forms: &[LinForm], n: usize) -> Result<Vec<LinForm>> {
    use std::collections::BTreeMap;
    // The closure of a renamed form is the closure of the original, so
    // one representative per input orbit suffices.
    let mut input_reps: Vec<LinForm> = Vec::new();
    let mut seen_inputs = BTreeSet::new();
    for f in forms {
        if f.n() > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.n(),
            });
        }
        if seen_inputs.insert(f.orbit_key()) {
            input_reps.push(f.clone());
        }
    }

    let mut family: Vec<LinForm> = Vec::new();
    let mut seen = BTreeSet::new();
    for f in &input_reps {
        for g in f.joint_substituted_forms(n)? {
            if seen.insert(form_key(&g)) {
                family.push(g);
            }
        }
    }

    let mut orbits: BTreeMap<Vec<i128>, Vec<LinForm>> = BTreeMap::new();
    for g in family {
        orbits.entry(g.orbit_key()).or_default().push(g);
    }
    let shannon = shannon_cone(n)?;
    let mut out = Vec::new();
    for members in orbits.into_values() {
        if !crate::lp::infer(&shannon, &members[0])?.implied() {
            out.extend(members);
        }
    }
    out.sort_by(|a, b| {
        a.support_size()
            .cmp(&b.support_size())
            .then_with(|| crate::space::cmp_coeff_seq(a, b))
    });
    Ok(out)
}

/// Append extra inequalities to a cone's H-representation. With the
/// `substituted` flag the full substitution closure is adjoined instead:
/// every joint-variable form of each extra that is not already implied by
/// the Shannon cone (the cone is assumed to contain the elemental
/// inequalities, as every outer bound here does, so dropping
/// Shannon-implied forms never changes the region). Duplicates are
/// removed and any attached V-representation is invalidated.
pub fn adjoin(cone: &Cone, extra: &[LinForm], substituted: bool) -> Result<Cone> {
    let n = cone.n();
    let mut seen: BTreeSet<_> = cone.ineqs().iter().map(|f| form_key(&f.canonicalize())).collect();
    let mut ineqs = cone.ineqs().to_vec();
    let widened: Vec<LinForm> = if substituted {
        beyond_shannon_closure(extra, n)?
    } else {
        let mut out = Vec::new();
        for f in extra {
            if f.n() > n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.n(),
                });
            }
            out.push(f.embed(n)?);
        }
        out
    };
    for g in widened {
        if seen.insert(form_key(&g)) {
            ineqs.push(g);
        }
    }
    Cone::new(n, ineqs, cone.eqs().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::space::cmp_coeff_seq;
    use num_traits::Zero;

    #[test]
    fn two_variable_elementals_are_the_classic_three() {
        let got = elemental_inequalities(2).unwrap();
        assert_eq!(got.len(), 3);
        let expect = vec![
            LinForm::from_ints(2, Relation::Ge, &[(&[1, 2], 1), (&[2], -1)]).unwrap(),
            LinForm::from_ints(2, Relation::Ge, &[(&[1, 2], 1), (&[1], -1)]).unwrap(),
            LinForm::from_ints(2, Relation::Ge, &[(&[1], 1), (&[2], 1), (&[1, 2], -1)]).unwrap(),
        ];
        let mut got_sorted = got.clone();
        let mut expect_sorted = expect.clone();
        got_sorted.sort_by(cmp_coeff_seq);
        expect_sorted.sort_by(cmp_coeff_seq);
        assert_eq!(got_sorted, expect_sorted);
    }

    #[test]
    fn elemental_counts_match_formula() {
        for n in 2..=7 {
            assert_eq!(elemental_inequalities(n).unwrap().len(), elemental_count(n));
        }
        assert_eq!(elemental_count(4), 28);
        assert_eq!(elemental_count(7), 679);
    }

    #[test]
    fn ground_set_bounds_are_enforced() {
        assert!(elemental_inequalities(0).is_err());
        assert!(elemental_inequalities(17).is_err());
    }

    #[test]
    fn independent_bits_lie_in_the_cone() {
        let cone = shannon_cone(2).unwrap();
        let v = catalog::independent_bits_point(2);
        assert!(cone.contains(&v).unwrap());
    }

    #[test]
    fn rank_capped_point_lies_in_the_four_variable_cone() {
        let cone = shannon_cone(4).unwrap();
        let v = catalog::rank_capped_point(4, 3);
        for f in cone.ineqs() {
            assert!(f.evaluate(&v).unwrap() >= Rat::zero());
        }
        assert!(cone.contains(&v).unwrap());
    }

    #[test]
    fn adjoin_nothing_is_identity() {
        let cone = shannon_cone(3).unwrap();
        let same = adjoin(&cone, &[], true).unwrap();
        assert_eq!(cone.ineqs(), same.ineqs());
    }

    #[test]
    fn adjoin_substituted_closes_under_substitution() {
        // Over the same ground set the closure of the Zhang-Yeung form
        // collapses to its twelve renamings: every joint-variable
        // instance is Shannon-implied.
        let cone = shannon_cone(4).unwrap();
        let bound = adjoin(&cone, &[catalog::zhang_yeung()], true).unwrap();
        assert_eq!(bound.ineqs().len(), 28 + 12);
        for f in catalog::zhang_yeung().substituted_forms(4).unwrap() {
            assert!(bound.ineqs().contains(&f));
        }
        // Adjoining again changes nothing.
        let again = adjoin(&bound, &[catalog::zhang_yeung()], true).unwrap();
        assert_eq!(again.ineqs().len(), bound.ineqs().len());
    }

    #[test]
    fn adjoin_rejects_oversized_forms() {
        let cone = shannon_cone(3).unwrap();
        assert!(adjoin(&cone, &[catalog::zhang_yeung()], false).is_err());
    }
}
