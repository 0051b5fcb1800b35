//! Copy-lemma constraint systems.
//!
//! Given a random vector over `{1..n}`, the copy lemma supplies a new
//! variable `n+1` that reproduces the joint distribution of `(k, I)` and is
//! conditionally independent of `{k} union J` given `I`. Its entropy
//! consequences are two families of linear equalities; a scenario chains
//! several such steps over a base ground set and intersects the resulting
//! equalities with a Shannon (or tighter) cone over the enlarged set.

use std::collections::BTreeSet;

use num_traits::One;

use crate::shannon::{elemental_inequalities, Cone};
use crate::space::{form_key, LinForm, Rat, Relation, SubsetMask};
use crate::{Error, Result};

/// One application of the copy lemma: variable `new` is a `J`-copy of `k`
/// over `I`. All of `k`, `I`, `J` live strictly below `new`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CopyStep {
    pub k: usize,
    pub i_set: SubsetMask,
    pub j_set: SubsetMask,
    pub new: usize,
}

impl CopyStep {
    pub fn new(k: usize, i_set: SubsetMask, j_set: SubsetMask, new: usize) -> Result<CopyStep> {
        let step = CopyStep {
            k,
            i_set,
            j_set,
            new,
        };
        step.validate()?;
        Ok(step)
    }

    pub fn validate(&self) -> Result<()> {
        let k_mask = SubsetMask::singleton(self.k);
        if !k_mask.disjoint(self.i_set)
            || !k_mask.disjoint(self.j_set)
            || !self.i_set.disjoint(self.j_set)
        {
            return Err(Error::CopyStepOverlap);
        }
        let below = SubsetMask::full(self.new - 1);
        if !k_mask.union(self.i_set).union(self.j_set).is_subset_of(below) {
            return Err(Error::CopyStepOverlap);
        }
        Ok(())
    }
}

/// The equalities contributed by one copy step, over a ground set of
/// `step.new` variables, canonicalized.
///
/// Family one, one member per `I1 ated I`: `H(new, I1) = H(k, I1)` (the empty
/// `I1` gives `H(new) = H(k)`). Family two, one member per nonempty
/// `J1 ⊆ {k} union J`:
/// `H(new, I) + H(I, J1) = H(new, I, J1) + H(I)`.
/// Total: `2^|I| + 2^(|J|+1) - 1`.
pub fn copy_equalities(step: &CopyStep) -> Result<Vec<LinForm>> {
    step.validate()?;
    let n = step.new;
    let new_mask = SubsetMask::singleton(step.new);
    let k_mask = SubsetMask::singleton(step.k);
    let one = Rat::one();
    let mut out = Vec::new();

    let mut i1_list: Vec<SubsetMask> = step.i_set.nonempty_subsets().collect();
    i1_list.insert(0, SubsetMask::EMPTY);
    for i1 in i1_list {
        let f = LinForm::new(
            n,
            Relation::Eq,
            [
                (new_mask.union(i1), one.clone()),
                (k_mask.union(i1), -one.clone()),
            ],
        )?;
        out.push(f.canonicalize());
    }

    for j1 in k_mask.union(step.j_set).nonempty_subsets() {
        let f = LinForm::new(
            n,
            Relation::Eq,
            [
                (new_mask.union(step.i_set), one.clone()),
                (step.i_set.union(j1), one.clone()),
                (new_mask.union(step.i_set).union(j1), -one.clone()),
                (step.i_set, -one.clone()),
            ],
        )?;
        out.push(f.canonicalize());
    }
    Ok(out)
}

/// A chained copy construction over a base ground set of `m` variables.
/// Step `t` introduces variable `m + t`. An optional base bound carries
/// inequalities over the `m` base variables that tighten the Shannon cone
/// of the enlarged ground set.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub m: usize,
    pub steps: Vec<CopyStep>,
    pub base_bound: Option<BaseBound>,
}

/// Extra inequalities over the base variables, lifted into the scenario
/// cone either verbatim or through every injective renaming.
#[derive(Clone, Debug)]
pub struct BaseBound {
    pub forms: Vec<LinForm>,
    pub substituted: bool,
}

impl Scenario {
    pub fn new(m: usize, steps: Vec<CopyStep>) -> Result<Scenario> {
        let s = Scenario {
            m,
            steps,
            base_bound: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_base_bound(mut self, forms: Vec<LinForm>, substituted: bool) -> Scenario {
        self.base_bound = Some(BaseBound { forms, substituted });
        self
    }

    /// Ground-set size after all steps.
    pub fn dimension(&self) -> usize {
        self.m + self.steps.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Scenario("base dimension must be positive".into()));
        }
        for (t, step) in self.steps.iter().enumerate() {
            if step.new != self.m + t + 1 {
                return Err(Error::Scenario(format!(
                    "step {} must introduce variable {}, found {}",
                    t + 1,
                    self.m + t + 1,
                    step.new
                )));
            }
            step.validate()?;
        }
        if let Some(bb) = &self.base_bound {
            for f in &bb.forms {
                if f.n() > self.m {
                    return Err(Error::Scenario(format!(
                        "base-bound form over {} variables exceeds base dimension {}",
                        f.n(),
                        self.m
                    )));
                }
            }
        }
        Ok(())
    }

    /// All copy equalities of the scenario, widened to the final ground set.
    pub fn equalities(&self) -> Result<Vec<LinForm>> {
        let n = self.dimension();
        let mut eqs = Vec::new();
        for step in &self.steps {
            for f in copy_equalities(step)? {
                eqs.push(f.embed(n)?);
            }
        }
        Ok(eqs)
    }
}

/// Assemble the scenario cone: elemental inequalities of the enlarged
/// ground set, base-bound inequalities lifted in, and the copy equalities.
///
/// Base-bound forms that coincide with an elemental inequality after
/// lifting are dropped, as are duplicates.
pub fn scenario_cone(scenario: &Scenario, base: &Cone) -> Result<Cone> {
    scenario.validate()?;
    if base.n() != scenario.m {
        return Err(Error::DimensionMismatch {
            expected: scenario.m,
            found: base.n(),
        });
    }
    let n = scenario.dimension();
    let mut ineqs = elemental_inequalities(n)?;
    let mut seen: BTreeSet<_> = ineqs.iter().map(form_key).collect();

    // The Shannon part of the base is subsumed by the enlarged elemental
    // family, so only forms beyond it need lifting. Extra inequalities can
    // come from the base cone itself (always lifted through the full
    // substitution closure) or the scenario's base bound (closure only
    // when its flag says so).
    let elemental_base: BTreeSet<_> = elemental_inequalities(scenario.m)?
        .iter()
        .map(form_key)
        .collect();
    let mut closure_in: Vec<LinForm> = Vec::new();
    let mut verbatim: Vec<LinForm> = Vec::new();
    for f in base.ineqs() {
        let c = f.canonicalize();
        if !elemental_base.contains(&form_key(&c)) {
            closure_in.push(c);
        }
    }
    if let Some(bb) = &scenario.base_bound {
        for f in &bb.forms {
            let c = f.canonicalize();
            if f.n() == scenario.m && elemental_base.contains(&form_key(&c)) {
                continue;
            }
            if bb.substituted {
                closure_in.push(c);
            } else {
                verbatim.push(c.embed(n)?);
            }
        }
    }
    let mut lifted = crate::shannon::beyond_shannon_closure(&closure_in, n)?;
    lifted.extend(verbatim);
    for g in lifted {
        if seen.insert(form_key(&g)) {
            ineqs.push(g);
        }
    }

    let mut eqs = Vec::new();
    let mut seen_eqs = BTreeSet::new();
    for f in scenario.equalities()? {
        if seen_eqs.insert(form_key(&f)) {
            eqs.push(f);
        }
    }
    Cone::new(n, ineqs, eqs)
}

/// Parse user-supplied equalities (inference-rule style constraint
/// systems) into canonical equality functionals over `n` variables.
///
/// Each record lists `(subset, coefficient)` pairs; a nonzero coefficient
/// on the empty set or a variable above `n` is rejected.
pub fn script_equalities(
    n: usize,
    records: &[Vec<(SubsetMask, Rat)>],
) -> Result<Vec<LinForm>> {
    let mut out = Vec::new();
    for rec in records {
        let f = LinForm::new(n, Relation::Eq, rec.iter().cloned())?;
        out.push(f.canonicalize());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shannon::shannon_cone;

    fn mask(vars: &[usize]) -> SubsetMask {
        SubsetMask::from_vars(vars.iter().copied())
    }

    /// The one-step scenario: 5 is a {4}-copy of 3 over {1,2}.
    pub(crate) fn one_step_scenario() -> Scenario {
        Scenario::new(
            4,
            vec![CopyStep::new(3, mask(&[1, 2]), mask(&[4]), 5).unwrap()],
        )
        .unwrap()
    }

    /// The two-step scenario: 5 as above, then 6 is a {2}-copy of 3 over {1,4,5}.
    pub(crate) fn two_step_scenario() -> Scenario {
        Scenario::new(
            4,
            vec![
                CopyStep::new(3, mask(&[1, 2]), mask(&[4]), 5).unwrap(),
                CopyStep::new(3, mask(&[1, 4, 5]), mask(&[2]), 6).unwrap(),
            ],
        )
        .unwrap()
    }

    /// The three-step scenario: the two above, then 7 is a {4}-copy of 2 over {1,3,5,6}.
    pub(crate) fn three_step_scenario() -> Scenario {
        Scenario::new(
            4,
            vec![
                CopyStep::new(3, mask(&[1, 2]), mask(&[4]), 5).unwrap(),
                CopyStep::new(3, mask(&[1, 4, 5]), mask(&[2]), 6).unwrap(),
                CopyStep::new(2, mask(&[1, 3, 5, 6]), mask(&[4]), 7).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn copy_equality_count_law() {
        let step = CopyStep::new(3, mask(&[1, 2]), mask(&[4]), 5).unwrap();
        let eqs = copy_equalities(&step).unwrap();
        assert_eq!(eqs.len(), 4 + 3);
        for f in &eqs {
            assert_eq!(f.relation(), Relation::Eq);
        }
    }

    #[test]
    fn six_variable_construction_has_eighteen_equalities() {
        let s = two_step_scenario();
        assert_eq!(s.equalities().unwrap().len(), 7 + 11);
    }

    #[test]
    fn seventh_variable_adds_nineteen_equalities() {
        let step = CopyStep::new(2, mask(&[1, 3, 5, 6]), mask(&[4]), 7).unwrap();
        assert_eq!(copy_equalities(&step).unwrap().len(), 16 + 3);
        let s = three_step_scenario();
        assert_eq!(s.equalities().unwrap().len(), 18 + 19);
    }

    #[test]
    fn empty_i1_ties_the_new_variable_to_its_source() {
        let step = CopyStep::new(3, mask(&[1, 2]), mask(&[4]), 5).unwrap();
        let eqs = copy_equalities(&step).unwrap();
        let direct = LinForm::from_ints(5, Relation::Eq, &[(&[3], 1), (&[5], -1)])
            .unwrap()
            .canonicalize();
        assert!(eqs.contains(&direct));
    }

    #[test]
    fn equalities_mention_the_new_variable_or_cancel() {
        // Every generated equality is supported only on coordinates that
        // include the new variable or appear with matching coefficients on
        // both sides; concretely, the coefficients over coordinates free of
        // the new variable must sum to zero within each equality.
        for s in [one_step_scenario(), two_step_scenario(), three_step_scenario()] {
            for (t, step) in s.steps.iter().enumerate() {
                let new_var = s.m + t + 1;
                for f in copy_equalities(step).unwrap() {
                    let with_new: Vec<_> = f
                        .coeffs()
                        .keys()
                        .filter(|m| m.contains(new_var))
                        .collect();
                    assert!(!with_new.is_empty());
                }
            }
        }
    }

    #[test]
    fn overlapping_parameters_are_rejected() {
        assert!(CopyStep::new(3, mask(&[1, 3]), mask(&[4]), 5).is_err());
        assert!(CopyStep::new(3, mask(&[1]), mask(&[3]), 5).is_err());
        assert!(CopyStep::new(5, mask(&[1]), mask(&[2]), 5).is_err());
    }

    #[test]
    fn scenario_steps_must_be_sequential() {
        let bad = Scenario::new(
            4,
            vec![CopyStep::new(3, mask(&[1, 2]), mask(&[4]), 6).unwrap()],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn empty_scenario_reproduces_the_base() {
        let s = Scenario::new(4, vec![]).unwrap();
        let base = shannon_cone(4).unwrap();
        let cone = scenario_cone(&s, &base).unwrap();
        assert_eq!(cone.n(), 4);
        assert_eq!(cone.ineqs(), base.ineqs());
        assert!(cone.eqs().is_empty());
    }

    #[test]
    fn two_step_scenario_cone_shape() {
        let s = two_step_scenario();
        let cone = scenario_cone(&s, &shannon_cone(4).unwrap()).unwrap();
        assert_eq!(cone.n(), 6);
        assert_eq!(cone.ineqs().len(), 6 + 15 * 16);
        assert_eq!(cone.eqs().len(), 18);
    }

    #[test]
    fn script_equalities_parse_the_inference_rule_family() {
        // x{3,4,5} + x({3,4} u J) - x({3,4,5} u J) - x{3,4} = 0 for
        // nonempty J inside {1,2}: three equalities over five variables.
        let one = Rat::one();
        let mut records = Vec::new();
        for j in mask(&[1, 2]).nonempty_subsets() {
            records.push(vec![
                (mask(&[3, 4, 5]), one.clone()),
                (mask(&[3, 4]).union(j), one.clone()),
                (mask(&[3, 4, 5]).union(j), -one.clone()),
                (mask(&[3, 4]), -one.clone()),
            ]);
        }
        let eqs = script_equalities(5, &records).unwrap();
        assert_eq!(eqs.len(), 3);
        assert!(script_equalities(4, &records).is_err());
        assert!(script_equalities(5, &[vec![]]).unwrap()[0].is_zero());
    }

    #[test]
    fn script_matches_generated_copy_equalities() {
        let step = CopyStep::new(3, mask(&[1, 2]), mask(&[4]), 5).unwrap();
        let generated = copy_equalities(&step).unwrap();
        let one = Rat::one();
        // Re-enter the first-family member for I1 = {1} by hand.
        let script = script_equalities(
            5,
            &[vec![
                (mask(&[5, 1]), one.clone()),
                (mask(&[3, 1]), -one.clone()),
            ]],
        )
        .unwrap();
        assert!(generated.contains(&script[0]));
    }
}
