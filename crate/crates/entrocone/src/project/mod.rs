//! Projection of polyhedral cones in H-representation.
//!
//! Two routes to the same answer: the convex hull method ([`chm_project`]),
//! which works directly in the projection space and certifies every facet
//! and ray it emits, and Fourier-Motzkin elimination ([`fm_eliminate`]),
//! which is kept as an independent cross-check and a small-case tool. Both
//! finish with the same canonical H-representation, so their outputs are
//! directly comparable.

mod chm;
mod dd;
mod fm;
pub(crate) mod linalg;

pub use chm::{chm_project, ProjectOptions, Projection};
pub use fm::{canonical_h_rep, fm_eliminate, remove_redundant, sort_forms};

use std::collections::BTreeSet;

use dd::DualRayEngine;

use crate::shannon::Cone;
use crate::space::{cmp_coeff_seq, EntVector, LinForm, Rat, SubsetMask};
use crate::Result;

/// The kept coordinate set induced by a variable subset: every nonempty
/// subset of `{1..m}`.
pub fn keep_vars(m: usize) -> BTreeSet<SubsetMask> {
    SubsetMask::full(m).nonempty_subsets().collect()
}

/// Extreme rays of a cone given by its H-representation, via incremental
/// double description. For a cone with a lineality space the extreme-ray
/// notion degenerates; this returns a generator set instead, padding the
/// rays with both signs of a lineality basis.
pub fn dd_rays(cone: &Cone) -> Result<Vec<EntVector>> {
    let n = cone.n();
    let masks: Vec<SubsetMask> = SubsetMask::full(n).nonempty_subsets().collect();
    let dense = |f: &LinForm| -> Vec<Rat> { masks.iter().map(|m| f.coeff(*m)).collect() };

    let mut eqs: Vec<LinForm> = cone.eqs().iter().map(LinForm::canonicalize).collect();
    let mut ineqs: Vec<LinForm> = cone.ineqs().iter().map(LinForm::canonicalize).collect();
    sort_forms(&mut eqs);
    sort_forms(&mut ineqs);

    let mut engine = DualRayEngine::new(masks.len());
    for e in &eqs {
        let row = dense(e);
        engine.insert(row.iter().map(|x| -x.clone()).collect());
        engine.insert(row);
    }
    for f in &ineqs {
        engine.insert(dense(f));
    }

    let mut out: Vec<EntVector> = engine
        .rays()
        .map(|r| {
            EntVector::new(n, masks.iter().zip(r).map(|(m, v)| (*m, v.clone())))
                .map(|v| v.canonicalize())
        })
        .collect::<Result<_>>()?;
    for l in engine.lineality() {
        for sign in [1i64, -1] {
            let s = Rat::from_integer(sign.into());
            out.push(
                EntVector::new(
                    n,
                    masks.iter().zip(l).map(|(m, v)| (*m, v * &s)),
                )?
                .canonicalize(),
            );
        }
    }
    out.sort_by(|a, b| {
        let av: Vec<Rat> = masks.iter().map(|m| a.get(*m)).collect();
        let bv: Vec<Rat> = masks.iter().map(|m| b.get(*m)).collect();
        av.cmp(&bv)
    });
    out.dedup();
    Ok(out)
}

/// Set-comparison helper: identical canonical inequality families.
pub fn same_facet_family(a: &Cone, b: &Cone) -> bool {
    if a.n() != b.n() {
        return false;
    }
    let canon = |c: &Cone| -> (Vec<LinForm>, Vec<LinForm>) {
        let mut i: Vec<LinForm> = c.ineqs().iter().map(LinForm::canonicalize).collect();
        let mut e: Vec<LinForm> = c.eqs().iter().map(LinForm::canonicalize).collect();
        i.sort_by(cmp_coeff_seq);
        e.sort_by(cmp_coeff_seq);
        (i, e)
    };
    canon(a) == canon(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::shannon::{elemental_inequalities, shannon_cone};
    use crate::space::Relation;
    use num_traits::Zero;

    fn ge(n: usize, terms: &[(&[usize], i64)]) -> LinForm {
        LinForm::from_ints(n, Relation::Ge, terms).unwrap()
    }

    #[test]
    fn orthant_rays_are_units() {
        // Two variables, constraints x1 >= 0 and x2 >= 0 and x12 >= 0:
        // the orthant in three coordinates.
        let cone = Cone::new(
            2,
            vec![ge(2, &[(&[1], 1)]), ge(2, &[(&[2], 1)]), ge(2, &[(&[1, 2], 1)])],
            vec![],
        )
        .unwrap();
        let rays = dd_rays(&cone).unwrap();
        assert_eq!(rays.len(), 3);
        for r in &rays {
            assert_eq!(r.values().len(), 1);
        }
    }

    #[test]
    fn two_variable_shannon_cone_has_the_classic_three_rays() {
        let rays = dd_rays(&shannon_cone(2).unwrap()).unwrap();
        let expect = vec![
            EntVector::from_ints(2, &[(&[1], 1), (&[1, 2], 1)]).unwrap(),
            EntVector::from_ints(2, &[(&[2], 1), (&[1, 2], 1)]).unwrap(),
            EntVector::from_ints(2, &[(&[1], 1), (&[2], 1), (&[1, 2], 1)]).unwrap(),
        ];
        assert_eq!(rays.len(), 3);
        for e in &expect {
            assert!(rays.contains(e), "missing ray {e}");
        }
    }

    #[test]
    fn equalities_restrict_the_ray_set() {
        // x1 = x2 inside the two-variable Shannon cone.
        let cone = Cone::new(
            2,
            elemental_inequalities(2).unwrap(),
            vec![LinForm::from_ints(2, Relation::Eq, &[(&[1], 1), (&[2], -1)]).unwrap()],
        )
        .unwrap();
        let rays = dd_rays(&cone).unwrap();
        for r in &rays {
            assert_eq!(r.get(SubsetMask::from_vars([1])), r.get(SubsetMask::from_vars([2])));
        }
        assert_eq!(rays.len(), 2);
    }

    #[test]
    fn four_variable_shannon_cone_ray_count() {
        // The polymatroid cone on four variables has 41 extreme rays.
        let rays = dd_rays(&shannon_cone(4).unwrap()).unwrap();
        assert_eq!(rays.len(), 41);
        let cone = shannon_cone(4).unwrap();
        for r in &rays {
            assert!(cone.contains(r).unwrap());
        }
    }

    #[test]
    fn chm_identity_projection_reproduces_the_cone() {
        let cone = shannon_cone(2).unwrap();
        let keep = keep_vars(2);
        let proj = chm_project(&cone, &keep, &ProjectOptions::default()).unwrap();
        let expected = canonical_h_rep(2, cone.ineqs().to_vec(), vec![]).unwrap();
        assert!(same_facet_family(&proj.cone, &expected));
        assert_eq!(proj.cone.rays().unwrap().len(), 3);
    }

    #[test]
    fn chm_projects_three_variable_shannon_onto_two() {
        let cone = shannon_cone(3).unwrap();
        let proj = chm_project(&cone, &keep_vars(2), &ProjectOptions::default()).unwrap();
        let (small, _) = proj.into_variable_cone(2).unwrap();
        let expected =
            canonical_h_rep(2, elemental_inequalities(2).unwrap(), vec![]).unwrap();
        assert!(same_facet_family(&small, &expected));
    }

    #[test]
    fn chm_and_fm_agree_on_the_zhang_yeung_bound_slice() {
        // A nontrivial but small instance: project the four-variable cone
        // with the Zhang-Yeung form adjoined onto three variables.
        let bound = crate::shannon::adjoin(
            &shannon_cone(4).unwrap(),
            &[catalog::zhang_yeung()],
            false,
        )
        .unwrap();
        let keep = keep_vars(3);
        let drop: BTreeSet<SubsetMask> = SubsetMask::full(4)
            .nonempty_subsets()
            .filter(|m| !keep.contains(m))
            .collect();
        let via_fm = fm_eliminate(&bound, &drop).unwrap();
        let via_chm = chm_project(&bound, &keep, &ProjectOptions::default()).unwrap();
        assert!(same_facet_family(&via_fm, &via_chm.cone));
    }

    #[test]
    fn chm_certificates_and_rays_validate() {
        let cone = shannon_cone(3).unwrap();
        let keep = keep_vars(2);
        let proj = chm_project(&cone, &keep, &ProjectOptions::default()).unwrap();
        for (facet, cert) in proj.cone.ineqs().iter().zip(&proj.certificates) {
            assert_eq!(&cert.target, facet);
            assert!(crate::lp::check_certificate(&cone, cert).unwrap());
        }
        for ray in proj.cone.rays().unwrap() {
            assert!(crate::lp::point_in_projection(&cone, &keep, ray).unwrap());
            for facet in proj.cone.ineqs() {
                assert!(facet.evaluate(ray).unwrap() >= Rat::zero());
            }
        }
    }

    #[test]
    fn warm_start_must_lie_in_the_projection() {
        let cone = shannon_cone(3).unwrap();
        let keep = keep_vars(2);
        let bad = EntVector::from_ints(3, &[(&[1], 1), (&[2], 1), (&[1, 2], 3)]).unwrap();
        let opts = ProjectOptions {
            warm_start: Some(vec![bad]),
            ray_budget: None,
        };
        assert!(matches!(
            chm_project(&cone, &keep, &opts),
            Err(crate::Error::WarmStartOutsideProjection)
        ));
    }

    #[test]
    fn warm_start_does_not_change_the_answer() {
        let cone = shannon_cone(3).unwrap();
        let keep = keep_vars(2);
        let plain = chm_project(&cone, &keep, &ProjectOptions::default()).unwrap();
        let warm = ProjectOptions {
            warm_start: Some(
                plain.cone.rays().unwrap().iter().cloned().collect(),
            ),
            ray_budget: None,
        };
        let warmed = chm_project(&cone, &keep, &warm).unwrap();
        assert!(same_facet_family(&plain.cone, &warmed.cone));
    }

    #[test]
    fn ray_budget_aborts_large_runs() {
        let cone = shannon_cone(4).unwrap();
        let opts = ProjectOptions {
            warm_start: None,
            ray_budget: Some(2),
        };
        assert!(matches!(
            chm_project(&cone, &keep_vars(3), &opts),
            Err(crate::Error::RayBudgetExceeded { .. })
        ));
    }

    #[test]
    fn projection_with_forced_equalities_factors_them_out() {
        // x1 = 0 on the whole cone; the projection onto {x1, x2} is the
        // half-line x2 >= 0 inside the plane x1 = 0.
        let cone = Cone::new(
            2,
            vec![ge(2, &[(&[2], 1)]), ge(2, &[(&[1, 2], 1)])],
            vec![LinForm::from_ints(2, Relation::Eq, &[(&[1], 1)]).unwrap()],
        )
        .unwrap();
        let keep: BTreeSet<SubsetMask> =
            [SubsetMask::from_vars([1]), SubsetMask::from_vars([2])].into();
        let proj = chm_project(&cone, &keep, &ProjectOptions::default()).unwrap();
        assert_eq!(proj.cone.eqs().len(), 1);
        assert_eq!(proj.cone.ineqs().len(), 1);
        let rays = proj.cone.rays().unwrap();
        assert_eq!(rays.len(), 1);
        assert!(rays[0].get(SubsetMask::from_vars([1])).is_zero());
    }

    #[test]
    fn non_pointed_projection_reports_generators() {
        // One constraint x1 + x2 >= 0 in two coordinates: projecting onto
        // both keeps the half-plane, whose H-form has one facet and a
        // one-dimensional lineality space.
        let cone = Cone::new(
            2,
            vec![ge(2, &[(&[1], 1), (&[2], 1)])],
            vec![],
        )
        .unwrap();
        let keep: BTreeSet<SubsetMask> =
            [SubsetMask::from_vars([1]), SubsetMask::from_vars([2])].into();
        let proj = chm_project(&cone, &keep, &ProjectOptions::default()).unwrap();
        assert_eq!(proj.cone.ineqs().len(), 1);
        assert!(proj.cone.eqs().is_empty());
        // Generators must span the facet hyperplane in both directions.
        let rays = proj.cone.rays().unwrap();
        assert!(rays.len() >= 3);
    }
}
