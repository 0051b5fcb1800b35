//! Named inequalities and reference points used across the pipelines.

use num_bigint::BigInt;
use num_traits::One;

use crate::space::{EntVector, LinForm, Rat, Relation, SubsetMask};

/// The Zhang-Yeung inequality, the first unconditional non-Shannon-type
/// information inequality (four variables):
///
/// `-2H(1) - 2H(2) - H(3) + 3H(12) + 3H(13) + 3H(23)
///  + H(14) + H(24) - H(34) - 4H(123) - H(124) >= 0`
pub fn zhang_yeung() -> LinForm {
    LinForm::from_ints(
        4,
        Relation::Ge,
        &[
            (&[1], -2),
            (&[2], -2),
            (&[3], -1),
            (&[1, 2], 3),
            (&[1, 3], 3),
            (&[2, 3], 3),
            (&[1, 4], 1),
            (&[2, 4], 1),
            (&[3, 4], -1),
            (&[1, 2, 3], -4),
            (&[1, 2, 4], -1),
        ],
    )
    .expect("static coefficients are valid")
}

/// Three four-variable non-Shannon inequalities first obtained from a
/// seven-variable copy construction (three copy steps over a four-variable
/// base). They are used as regression targets for the inference pipeline.
pub fn seven_variable_discoveries() -> Vec<LinForm> {
    let rows: [&[(&[usize], i64)]; 3] = [
        &[
            (&[1], -56),
            (&[2], -4),
            (&[3], -19),
            (&[1, 2], 45),
            (&[1, 3], 67),
            (&[2, 3], 22),
            (&[1, 4], 23),
            (&[2, 4], -8),
            (&[3, 4], 9),
            (&[1, 2, 3], -55),
            (&[1, 3, 4], -24),
        ],
        &[
            (&[1], -34),
            (&[2], -2),
            (&[3], -11),
            (&[4], -1),
            (&[1, 2], 27),
            (&[1, 3], 40),
            (&[2, 3], 12),
            (&[1, 4], 15),
            (&[2, 4], -5),
            (&[3, 4], 7),
            (&[1, 2, 3], -32),
            (&[1, 3, 4], -16),
        ],
        &[
            (&[1], -28),
            (&[2], -1),
            (&[3], -10),
            (&[4], -2),
            (&[1, 2], 22),
            (&[1, 3], 34),
            (&[2, 3], 11),
            (&[1, 4], 13),
            (&[2, 4], -4),
            (&[3, 4], 6),
            (&[1, 2, 3], -28),
            (&[1, 3, 4], -13),
        ],
    ];
    rows.iter()
        .map(|r| LinForm::from_ints(4, Relation::Ge, r).expect("static coefficients are valid"))
        .collect()
}

/// The point with `H(I) = min(|I|, cap)`: the rank function of a uniform
/// matroid, scaled to integers. A handy member of every Shannon cone.
pub fn rank_capped_point(n: usize, cap: usize) -> EntVector {
    EntVector::new(
        n,
        SubsetMask::full(n).nonempty_subsets().map(|m| {
            (
                m,
                Rat::from_integer(BigInt::from(m.len().min(cap) as i64)),
            )
        }),
    )
    .expect("static point is valid")
}

/// Entropy vector of `n` independent uniform bits, scaled so each bit
/// carries one unit: `H(I) = |I|`.
pub fn independent_bits_point(n: usize) -> EntVector {
    EntVector::new(
        n,
        SubsetMask::full(n)
            .nonempty_subsets()
            .map(|m| (m, Rat::from_integer(BigInt::from(m.len() as i64)))),
    )
    .expect("static point is valid")
}

/// The conditional mutual information `I(a; b | K) >= 0` expanded into
/// joint entropies. With empty `K` this is plain mutual information.
pub fn conditional_mi(n: usize, a: usize, b: usize, cond: SubsetMask) -> LinForm {
    let sa = SubsetMask::singleton(a);
    let sb = SubsetMask::singleton(b);
    let one = Rat::one();
    LinForm::new(
        n,
        Relation::Ge,
        [
            (cond.union(sa), one.clone()),
            (cond.union(sb), one.clone()),
            (cond.union(sa).union(sb), -one.clone()),
            (cond, -one),
        ],
    )
    .expect("masks fit the ground set")
}
