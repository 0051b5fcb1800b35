//! The infinite family of four-variable non-Shannon inequalities.
//!
//! The family is indexed by `s >= 1`. Its coefficients are rational
//! combinations of `2^(s-1)` and the integer sequences
//!
//! ```text
//! u_s = (2+sqrt 2)^s + (2-sqrt 2)^s            u_1 = 4
//! w_s = ((2+sqrt 2)^s - (2-sqrt 2)^s)/sqrt 2   w_1 = 2
//! ```
//!
//! both satisfying `x_{s+1} = 4 x_s - 2 x_{s-1}`, so no irrational value
//! is ever materialized. The first member is the Shannon form
//! `I(1;2|3) >= 0`, the second is the Zhang-Yeung inequality, and each
//! later member is certified from its predecessor through one copy step.

use num_bigint::BigInt;
use num_traits::One;

use crate::copy::{CopyStep, Scenario};
use crate::lp::{infer, Certificate, Inference};
use crate::shannon::{adjoin, shannon_cone};
use crate::space::{LinForm, Rat, Relation, SubsetMask};
use crate::{Error, Result};

/// Index into the inequality family; must be at least 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SeqIndex(pub u64);

impl SeqIndex {
    pub fn new(s: u64) -> Result<SeqIndex> {
        if s < 1 {
            return Err(Error::SeqIndexRange);
        }
        Ok(SeqIndex(s))
    }
}

/// `u_s` and `w_s` by the shared second-order recurrence.
pub fn sqrt2_power_sums(s: u64) -> (BigInt, BigInt) {
    if s == 0 {
        return (BigInt::from(2), BigInt::from(0));
    }
    let (mut u_prev, mut w_prev) = (BigInt::from(2), BigInt::from(0)); // s = 0
    let (mut u, mut w) = (BigInt::from(4), BigInt::from(2)); // s = 1
    for _ in 1..s {
        let u_next = 4 * &u - 2 * &u_prev;
        let w_next = 4 * &w - 2 * &w_prev;
        u_prev = std::mem::replace(&mut u, u_next);
        w_prev = std::mem::replace(&mut w, w_next);
    }
    (u, w)
}

/// The family member at index `s`, canonicalized.
pub fn seq_inequality(s: SeqIndex) -> Result<LinForm> {
    let SeqIndex(s) = s;
    if s < 1 {
        return Err(Error::SeqIndexRange);
    }
    let (u, w) = sqrt2_power_sums(s);
    let u = Rat::from_integer(u);
    let w = Rat::from_integer(w);
    let p = Rat::from_integer(BigInt::one() << (s - 1) as usize);
    let one = Rat::one();
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let quarter = Rat::new(BigInt::one(), BigInt::from(4));

    let singles = &p - &w * &half; // x1, x2
    let pair12 = &one - Rat::from_integer(BigInt::from(3)) * &p + &w;
    let pair_with3 = &u * &quarter; // x13, x23
    let pair_with4 = &w * &half - &u * &quarter; // x14, x24
    let pair34 = &one - &p;
    let triple123 = &p - &u * &half;
    let triple124 = &p - &one - &w + &u * &half;

    let m = |vars: &[usize]| SubsetMask::from_vars(vars.iter().copied());
    LinForm::new(
        4,
        Relation::Ge,
        [
            (m(&[1]), singles.clone()),
            (m(&[2]), singles),
            (m(&[3]), -one),
            (m(&[1, 2]), pair12),
            (m(&[1, 3]), pair_with3.clone()),
            (m(&[2, 3]), pair_with3),
            (m(&[1, 4]), pair_with4.clone()),
            (m(&[2, 4]), pair_with4),
            (m(&[3, 4]), pair34),
            (m(&[1, 2, 3]), triple123),
            (m(&[1, 2, 4]), triple124),
        ],
    )
    .map(|f| f.canonicalize())
}

/// The single copy step behind the family's induction: the fifth variable
/// is a `{4}`-copy of `3` over `{1,2}`.
pub fn family_scenario() -> Scenario {
    Scenario::new(
        4,
        vec![CopyStep::new(
            3,
            SubsetMask::from_vars([1, 2]),
            SubsetMask::from_vars([4]),
            5,
        )
        .expect("static step is valid")],
    )
    .expect("static scenario is valid")
}

/// Certify the member at `s >= 2` from the member at `s - 1`: the target
/// must be a nonnegative combination of the constraints of the copy-step
/// cone built over the Shannon cone plus all substituted forms of the
/// predecessor. Failure would falsify the family and is surfaced as a
/// hard error.
pub fn verify_seq_step(s: SeqIndex, scenario: Option<&Scenario>) -> Result<Certificate> {
    let SeqIndex(s) = s;
    if s < 2 {
        return Err(Error::SeqIndexRange);
    }
    let default_scenario = family_scenario();
    let scenario = scenario.unwrap_or(&default_scenario);
    let predecessor = seq_inequality(SeqIndex(s - 1))?;
    let base = adjoin(&shannon_cone(scenario.m)?, &[predecessor], true)?;
    let cone = crate::copy::scenario_cone(scenario, &base)?;
    let target = seq_inequality(SeqIndex(s))?.embed(scenario.dimension())?;
    match infer(&cone, &target)? {
        Inference::Implied(cert) => Ok(cert),
        Inference::NotImplied(_) => Err(Error::FamilyInferenceFailed(format!(
            "member {s} is not implied by the copy-step cone over member {}",
            s - 1
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn index_zero_is_rejected() {
        assert!(SeqIndex::new(0).is_err());
        assert!(seq_inequality(SeqIndex(0)).is_err());
    }

    #[test]
    fn recurrence_matches_binomial_expansion() {
        // (2 ± sqrt2)^s expanded over the binomial theorem: u_s is twice
        // the rational part, w_s twice the sqrt2 coefficient.
        fn binomial(s: u64) -> (BigInt, BigInt) {
            let mut rational = BigInt::from(0);
            let mut irrational = BigInt::from(0);
            let mut binom = BigInt::one();
            for i in 0..=s {
                let pow2 = BigInt::one() << (s - i) as usize;
                let sqrt2_half = BigInt::one() << (i / 2) as usize;
                if i % 2 == 0 {
                    rational += &binom * &pow2 * &sqrt2_half;
                } else {
                    irrational += &binom * &pow2 * &sqrt2_half;
                }
                binom = &binom * BigInt::from(s - i) / BigInt::from(i + 1);
            }
            (rational, irrational)
        }
        for s in 1..=8u64 {
            let (a, b) = binomial(s);
            let (u, w) = sqrt2_power_sums(s);
            assert_eq!(u, 2 * a, "u at s={s}");
            assert_eq!(w, 2 * b, "w at s={s}");
        }
    }

    #[test]
    fn first_member_is_a_conditional_mutual_information() {
        let f = seq_inequality(SeqIndex(1)).unwrap();
        let expect = catalog::conditional_mi(4, 1, 2, SubsetMask::from_vars([3])).canonicalize();
        assert_eq!(f, expect);
    }

    #[test]
    fn second_member_is_zhang_yeung() {
        assert_eq!(
            seq_inequality(SeqIndex(2)).unwrap(),
            catalog::zhang_yeung().canonicalize()
        );
    }

    #[test]
    fn third_member_has_the_published_coefficients() {
        let expect = LinForm::from_ints(
            4,
            Relation::Ge,
            &[
                (&[1], -10),
                (&[2], -10),
                (&[3], -1),
                (&[1, 2], 17),
                (&[1, 3], 10),
                (&[2, 3], 10),
                (&[1, 4], 4),
                (&[2, 4], 4),
                (&[3, 4], -3),
                (&[1, 2, 3], -16),
                (&[1, 2, 4], -5),
            ],
        )
        .unwrap();
        assert_eq!(seq_inequality(SeqIndex(3)).unwrap(), expect);
    }

    #[test]
    fn raw_coefficients_are_half_integral_before_canonicalization() {
        use num_traits::Signed;
        for s in 1..=20u64 {
            let (u, w) = sqrt2_power_sums(s);
            // u divisible by 4 and w by 2 keep every raw coefficient at
            // worst half-integral; canonical forms are integral, gcd 1.
            assert_eq!(&u % 4, BigInt::from(0), "u at s={s}");
            assert_eq!(&w % 2, BigInt::from(0), "w at s={s}");
            let f = seq_inequality(SeqIndex(s)).unwrap();
            let mut gcd = BigInt::from(0);
            for c in f.coeffs().values() {
                assert!(c.is_integer());
                gcd = num_integer::Integer::gcd(&gcd, &c.numer().abs());
            }
            assert_eq!(gcd, BigInt::one(), "gcd at s={s}");
        }
    }

    #[test]
    fn members_are_symmetric_in_the_first_two_variables() {
        for s in 1..=8u64 {
            let f = seq_inequality(SeqIndex(s)).unwrap();
            assert_eq!(f.substitute(&[2, 1, 3, 4], 4).unwrap(), f);
        }
    }

    #[test]
    fn second_member_certified_from_the_first() {
        let cert = verify_seq_step(SeqIndex(2), None).unwrap();
        let base = adjoin(
            &shannon_cone(4).unwrap(),
            &[seq_inequality(SeqIndex(1)).unwrap()],
            true,
        )
        .unwrap();
        let cone = crate::copy::scenario_cone(&family_scenario(), &base).unwrap();
        assert!(crate::lp::check_certificate(&cone, &cert).unwrap());
    }
}
