//! End-to-end derivation pipelines.
//!
//! `derive` builds a scenario cone, projects it onto the base variables,
//! deduplicates the facets up to variable renaming, classifies every class
//! against the Shannon cone and a user-supplied list of known
//! inequalities, and attaches a Farkas certificate per facet (and an
//! independence witness per new facet on request). `sigma_step` wraps one
//! round of the outer-bound iteration: project, close the new facets
//! under renaming, intersect with the input bound.

use std::collections::BTreeMap;

use crate::copy::{scenario_cone, Scenario};
use crate::lp::{infer, Certificate, Inference};
use crate::project::{
    canonical_h_rep, chm_project, keep_vars, remove_redundant, sort_forms, ProjectOptions,
};
use crate::shannon::{adjoin, elemental_inequalities, shannon_cone, Cone};
use crate::space::{cmp_coeff_seq, form_key, EntVector, LinForm};
use crate::{Error, Result};

/// Where a projection facet sits relative to what was already known.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    /// Implied by the Shannon cone of the base variables.
    Shannon,
    /// Beyond Shannon, but implied once the supplied known inequalities
    /// (all substituted forms) are adjoined.
    Known,
    /// Implied by neither: a new inequality.
    New,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Shannon => "shannon",
            Classification::Known => "known",
            Classification::New => "new",
        })
    }
}

/// One facet class of a certified projection.
#[derive(Clone, Debug)]
pub struct FacetReport {
    /// The lexicographically least raw facet of the class, over the base
    /// variables.
    pub facet: LinForm,
    /// How many raw facets of the projection fall in the class.
    pub orbit_size: usize,
    pub classification: Classification,
    /// Farkas certificate for the facet against the scenario cone.
    pub proof: Certificate,
    /// For new facets, on request: a point satisfying the Shannon cone,
    /// all substituted knowns, and the other new classes, but violating
    /// this facet.
    pub independence_witness: Option<EntVector>,
}

/// Options for [`derive`].
#[derive(Clone, Debug, Default)]
pub struct DeriveOptions {
    /// Known non-Shannon inequalities for the `Known` classification tier
    /// (adjoined with all substituted forms).
    pub known: Vec<LinForm>,
    /// Attach independence witnesses to new facets.
    pub witnesses: bool,
    /// Projection knobs (warm start, ray budget).
    pub project: ProjectOptions,
    /// Candidate inequalities for targeted verification. When the full
    /// projection exceeds the ray budget and candidates are present,
    /// `derive` falls back to certifying just these.
    pub targets: Option<Vec<LinForm>>,
}

/// Outcome of a derivation run.
#[derive(Clone, Debug)]
pub struct DeriveOutcome {
    /// The assembled scenario cone (certificates index its constraints).
    pub scenario_cone: Cone,
    /// The certified projection over the base variables; absent in
    /// targeted mode.
    pub projection: Option<Cone>,
    /// Raw irredundant facet count of the projection (0 in targeted mode).
    pub raw_facet_count: usize,
    /// One report per facet class (full mode) or per verified candidate
    /// (targeted mode), deterministically ordered.
    pub reports: Vec<FacetReport>,
    /// Candidates that failed targeted verification, with a ray of the
    /// scenario cone witnessing the failure.
    pub rejected: Vec<(LinForm, EntVector)>,
}

/// Build the scenario cone over the enlarged ground set, project onto the
/// base variables, and classify the facets.
pub fn derive(scenario: &Scenario, base: &Cone, options: &DeriveOptions) -> Result<DeriveOutcome> {
    let cone = scenario_cone(scenario, base)?;
    let m = scenario.m;

    let projected = match chm_project(&cone, &keep_vars(m), &options.project) {
        Ok(p) => p,
        Err(Error::RayBudgetExceeded { budget }) => {
            let Some(targets) = &options.targets else {
                return Err(Error::RayBudgetExceeded { budget });
            };
            return derive_targeted(scenario, cone, targets, options);
        }
        Err(e) => return Err(e),
    };
    let (small, certificates) = projected.into_variable_cone(m)?;

    // Group raw facets by orbit; the class representative is the least
    // raw member.
    let mut classes: BTreeMap<_, (LinForm, Vec<usize>)> = BTreeMap::new();
    for (i, facet) in small.ineqs().iter().enumerate() {
        let orbit = facet.orbit_canonical();
        let entry = classes
            .entry(form_key(&orbit))
            .or_insert_with(|| (facet.clone(), Vec::new()));
        if cmp_coeff_seq(facet, &entry.0) == std::cmp::Ordering::Less {
            entry.0 = facet.clone();
        }
        entry.1.push(i);
    }

    let shannon = shannon_cone(m)?;
    let known_cone = adjoin(&shannon, &options.known, true)?;
    let mut reports = Vec::new();
    let mut new_reps: Vec<LinForm> = Vec::new();
    let mut pending: Vec<(LinForm, usize, Certificate)> = Vec::new();
    for (rep, members) in classes.into_values() {
        let rep_index = members
            .iter()
            .copied()
            .find(|&i| small.ineqs()[i] == rep)
            .expect("representative is a member");
        let classification = if infer(&shannon, &rep)?.implied() {
            Classification::Shannon
        } else if !options.known.is_empty() && infer(&known_cone, &rep)?.implied() {
            Classification::Known
        } else {
            Classification::New
        };
        if classification == Classification::New {
            new_reps.push(rep.clone());
        }
        let proof = certificates[rep_index].clone();
        match classification {
            Classification::New => pending.push((rep, members.len(), proof)),
            _ => reports.push(FacetReport {
                facet: rep,
                orbit_size: members.len(),
                classification,
                proof,
                independence_witness: None,
            }),
        }
    }
    for (rep, orbit_size, proof) in pending {
        let independence_witness = if options.witnesses {
            let context: Vec<LinForm> = options
                .known
                .iter()
                .cloned()
                .chain(new_reps.iter().filter(|f| **f != rep).cloned())
                .collect();
            independence_check(&rep, &context)?
        } else {
            None
        };
        reports.push(FacetReport {
            facet: rep,
            orbit_size,
            classification: Classification::New,
            proof,
            independence_witness,
        });
    }
    reports.sort_by(|a, b| cmp_coeff_seq(&a.facet, &b.facet));

    Ok(DeriveOutcome {
        scenario_cone: cone,
        raw_facet_count: small.ineqs().len(),
        projection: Some(small),
        reports,
        rejected: Vec::new(),
    })
}

/// Targeted mode: certify each candidate against the scenario cone
/// instead of computing the projection.
fn derive_targeted(
    scenario: &Scenario,
    cone: Cone,
    targets: &[LinForm],
    options: &DeriveOptions,
) -> Result<DeriveOutcome> {
    let m = scenario.m;
    let n = scenario.dimension();
    let shannon = shannon_cone(m)?;
    let known_cone = adjoin(&shannon, &options.known, true)?;
    let mut reports = Vec::new();
    let mut rejected = Vec::new();
    let verified: Vec<(LinForm, Certificate)> = {
        let mut out = Vec::new();
        for t in targets {
            let target = t.canonicalize();
            match infer(&cone, &target.embed(n)?)? {
                Inference::Implied(cert) => out.push((target, cert)),
                Inference::NotImplied(ray) => rejected.push((target, ray)),
            }
        }
        out
    };
    let verified_forms: Vec<LinForm> = verified.iter().map(|(f, _)| f.clone()).collect();
    for (target, proof) in verified {
        let classification = if infer(&shannon, &target)?.implied() {
            Classification::Shannon
        } else if !options.known.is_empty() && infer(&known_cone, &target)?.implied() {
            Classification::Known
        } else {
            Classification::New
        };
        let independence_witness = if options.witnesses && classification == Classification::New {
            let context: Vec<LinForm> = options
                .known
                .iter()
                .cloned()
                .chain(verified_forms.iter().filter(|f| **f != target).cloned())
                .collect();
            independence_check(&target, &context)?
        } else {
            None
        };
        reports.push(FacetReport {
            facet: target,
            orbit_size: 1,
            classification,
            proof,
            independence_witness,
        });
    }
    reports.sort_by(|a, b| cmp_coeff_seq(&a.facet, &b.facet));
    Ok(DeriveOutcome {
        scenario_cone: cone,
        projection: None,
        raw_facet_count: 0,
        reports,
        rejected,
    })
}

/// A point satisfying the Shannon cone and all substituted forms of the
/// context, but violating the candidate — or `None` when the candidate is
/// implied by them (hence not independent).
pub fn independence_check(candidate: &LinForm, context: &[LinForm]) -> Result<Option<EntVector>> {
    let cone = adjoin(&shannon_cone(candidate.n())?, context, true)?;
    Ok(infer(&cone, candidate)?.into_witness())
}

/// One round of the outer-bound map.
#[derive(Clone, Debug)]
pub struct SigmaOutcome {
    /// The raw certified projection of this round.
    pub projection: Cone,
    /// Facet classes of the projection not implied by the input bound.
    pub new_classes: Vec<LinForm>,
    /// The tightened bound: input intersected with all substituted forms
    /// of the new classes, redundancy removed.
    pub bound: Cone,
}

/// Map an outer bound through the scenario: lift it (all substituted
/// forms) into the scenario cone, project back onto the base variables,
/// and intersect the bound with the renaming closure of whatever new
/// facets appeared. The result never grows, so iterating is monotone.
pub fn sigma_step(bound: &Cone, scenario: &Scenario, project: &ProjectOptions) -> Result<SigmaOutcome> {
    if bound.n() != scenario.m {
        return Err(Error::DimensionMismatch {
            expected: scenario.m,
            found: bound.n(),
        });
    }
    let m = scenario.m;
    let options = DeriveOptions {
        project: project.clone(),
        ..DeriveOptions::default()
    };
    let outcome = derive(scenario, bound, &options)?;
    let projection = outcome.projection.expect("full mode always projects");

    let mut new_classes = Vec::new();
    for report in &outcome.reports {
        if !infer(bound, &report.facet)?.implied() {
            new_classes.push(report.facet.clone());
        }
    }
    sort_forms(&mut new_classes);

    let bound_after = if new_classes.is_empty() {
        canonical_h_rep(m, bound.ineqs().to_vec(), bound.eqs().to_vec())?
    } else {
        let widened = adjoin(bound, &new_classes, true)?;
        let ineqs = remove_redundant(widened.ineqs(), widened.eqs())?;
        canonical_h_rep(m, ineqs, widened.eqs().to_vec())?
    };
    Ok(SigmaOutcome {
        projection,
        new_classes,
        bound: bound_after,
    })
}

/// Iterate [`sigma_step`], collecting the outcome of each round.
pub fn iterate(
    bound: &Cone,
    scenario: &Scenario,
    steps: usize,
    project: &ProjectOptions,
) -> Result<Vec<SigmaOutcome>> {
    let mut out = Vec::with_capacity(steps);
    let mut current = bound.clone();
    for _ in 0..steps {
        let step = sigma_step(&current, scenario, project)?;
        current = step.bound.clone();
        out.push(step);
    }
    Ok(out)
}

/// The inequalities of a bound beyond the elemental family, canonicalized.
pub fn beyond_elemental(bound: &Cone) -> Result<Vec<LinForm>> {
    let elem: std::collections::BTreeSet<_> = elemental_inequalities(bound.n())?
        .iter()
        .map(form_key)
        .collect();
    Ok(bound
        .ineqs()
        .iter()
        .map(LinForm::canonicalize)
        .filter(|f| !elem.contains(&form_key(f)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::copy::CopyStep;
    use crate::space::{Relation, SubsetMask};

    fn one_step_scenario() -> Scenario {
        Scenario::new(
            4,
            vec![CopyStep::new(
                3,
                SubsetMask::from_vars([1, 2]),
                SubsetMask::from_vars([4]),
                5,
            )
            .unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn independence_of_zhang_yeung_from_shannon() {
        let w = independence_check(&catalog::zhang_yeung(), &[]).unwrap();
        let w = w.expect("Zhang-Yeung is independent of the Shannon cone");
        assert!(shannon_cone(4).unwrap().contains(&w).unwrap());
        assert!(catalog::zhang_yeung().evaluate(&w).unwrap() < crate::space::Rat::from_integer(0.into()));
    }

    #[test]
    fn elemental_facets_have_witnesses_against_the_rest() {
        // Every elemental inequality is facet-defining, so a point exists
        // that satisfies all the others while violating it.
        let forms = elemental_inequalities(3).unwrap();
        for (i, f) in forms.iter().enumerate() {
            let context: Vec<LinForm> = forms
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, g)| g.clone())
                .collect();
            // Witness search against context only (no Shannon base, which
            // would contain f itself).
            let cone = Cone::new(3, context, vec![]).unwrap();
            let w = infer(&cone, f).unwrap().into_witness();
            assert!(w.is_some(), "no witness for elemental {f}");
        }
    }

    #[test]
    fn implied_combinations_have_no_witness() {
        let forms = elemental_inequalities(3).unwrap();
        let sum = forms[0].add_scaled(&forms[1], &crate::space::Rat::from_integer(1.into()));
        let w = independence_check(&sum.canonicalize(), &[]).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn targeted_mode_verifies_and_rejects() {
        let scenario = one_step_scenario();
        let base = shannon_cone(4).unwrap();
        let bogus = LinForm::from_ints(4, Relation::Ge, &[(&[1], -1)]).unwrap();
        let options = DeriveOptions {
            targets: Some(vec![catalog::zhang_yeung(), bogus.clone()]),
            project: ProjectOptions {
                warm_start: None,
                ray_budget: Some(0),
            },
            witnesses: false,
            known: vec![],
        };
        let outcome = derive(&scenario, &base, &options).unwrap();
        assert!(outcome.projection.is_none());
        assert_eq!(outcome.reports.len(), 1);
        assert_eq!(outcome.reports[0].classification, Classification::New);
        assert!(crate::lp::check_certificate(&outcome.scenario_cone, &outcome.reports[0].proof).unwrap());
        assert_eq!(outcome.rejected.len(), 1);
        let (form, ray) = &outcome.rejected[0];
        assert_eq!(form, &bogus);
        assert!(outcome.scenario_cone.contains(ray).unwrap());
    }

    #[test]
    fn sigma_step_on_a_fixed_point_is_identity() {
        // A scenario with no copy steps projects the bound onto itself.
        let scenario = Scenario::new(3, vec![]).unwrap();
        let bound = canonical_h_rep(3, elemental_inequalities(3).unwrap(), vec![]).unwrap();
        let step = sigma_step(&bound, &scenario, &ProjectOptions::default()).unwrap();
        assert!(step.new_classes.is_empty());
        assert!(crate::project::same_facet_family(&step.bound, &bound));
    }
}
