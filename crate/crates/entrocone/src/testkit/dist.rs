//! Rational distributions and exact entropy arithmetic.
//!
//! A linear combination of joint entropies of a distribution with rational
//! probabilities is a rational combination of logarithms of primes. Those
//! logarithms are linearly independent over the rationals, so the
//! combination is zero exactly when every prime coefficient vanishes, and
//! otherwise its sign is decided by interval enclosures of the prime
//! logarithms at whatever precision it takes. No floating point, no
//! tolerance knobs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::copy::CopyStep;
use crate::space::{EntVector, LinForm, Rat, SubsetMask};

/// A joint distribution of `n` discrete variables with rational
/// probabilities. Outcomes are small tuples; zero-probability cells are
/// not stored.
#[derive(Clone, Debug)]
pub struct RatDist {
    n: usize,
    pmf: BTreeMap<Vec<u8>, Rat>,
}

impl RatDist {
    pub fn new(n: usize, pmf: BTreeMap<Vec<u8>, Rat>) -> RatDist {
        let total: Rat = pmf.values().sum();
        assert!(total.is_one(), "probabilities must sum to one");
        assert!(pmf.values().all(|p| p.is_positive()));
        assert!(pmf.keys().all(|o| o.len() == n));
        RatDist { n, pmf }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pmf(&self) -> &BTreeMap<Vec<u8>, Rat> {
        &self.pmf
    }

    /// A random distribution with per-variable support of at most
    /// `max_support` and probabilities on a grid of small denominators.
    pub fn random(rng: &mut impl Rng, n: usize, max_support: u8) -> RatDist {
        loop {
            let supports: Vec<u8> = (0..n).map(|_| rng.gen_range(1..=max_support)).collect();
            let mut cells: Vec<Vec<u8>> = vec![vec![]];
            for &s in &supports {
                let mut next = Vec::new();
                for c in &cells {
                    for v in 0..s {
                        let mut c2 = c.clone();
                        c2.push(v);
                        next.push(c2);
                    }
                }
                cells = next;
            }
            let weights: Vec<u64> = cells.iter().map(|_| rng.gen_range(0..=6)).collect();
            let total: u64 = weights.iter().sum();
            if total == 0 {
                continue;
            }
            let pmf: BTreeMap<Vec<u8>, Rat> = cells
                .into_iter()
                .zip(weights)
                .filter(|(_, w)| *w > 0)
                .map(|(c, w)| (c, Rat::new(BigInt::from(w), BigInt::from(total))))
                .collect();
            return RatDist { n, pmf };
        }
    }

    /// Marginal distribution of the variables in `mask` (joint outcomes
    /// restricted to those positions).
    pub fn marginal(&self, mask: SubsetMask) -> BTreeMap<Vec<u8>, Rat> {
        let vars: Vec<usize> = mask.vars().collect();
        let mut out: BTreeMap<Vec<u8>, Rat> = BTreeMap::new();
        for (outcome, p) in &self.pmf {
            let key: Vec<u8> = vars.iter().map(|&v| outcome[v - 1]).collect();
            *out.entry(key).or_insert_with(Rat::zero) += p;
        }
        out
    }

    /// Extend by one variable through the copy construction: the new
    /// variable reproduces the conditional law of `k` given `I` and is
    /// conditionally independent of everything else given `I`.
    pub fn copy_extend(&self, step: &CopyStep) -> RatDist {
        assert_eq!(step.new, self.n + 1);
        let i_vars: Vec<usize> = step.i_set.vars().collect();
        // Mass of each I-cell and of each (I, k) cell.
        let mut mass_i: BTreeMap<Vec<u8>, Rat> = BTreeMap::new();
        let mut mass_ik: BTreeMap<(Vec<u8>, u8), Rat> = BTreeMap::new();
        for (outcome, p) in &self.pmf {
            let key: Vec<u8> = i_vars.iter().map(|&v| outcome[v - 1]).collect();
            *mass_i.entry(key.clone()).or_insert_with(Rat::zero) += p;
            *mass_ik
                .entry((key, outcome[step.k - 1]))
                .or_insert_with(Rat::zero) += p;
        }
        let mut pmf = BTreeMap::new();
        for (outcome, p) in &self.pmf {
            let key: Vec<u8> = i_vars.iter().map(|&v| outcome[v - 1]).collect();
            let denom = &mass_i[&key];
            for ((k2, v), m) in mass_ik.range((key.clone(), 0u8)..=(key.clone(), u8::MAX)) {
                debug_assert_eq!(k2, &key);
                let q = p * m / denom;
                if q.is_positive() {
                    let mut o2 = outcome.clone();
                    o2.push(*v);
                    *pmf.entry(o2).or_insert_with(Rat::zero) += q;
                }
            }
        }
        RatDist {
            n: self.n + 1,
            pmf,
        }
    }

    /// The exact entropy of the marginal on `mask`, as a formal rational
    /// combination of prime logarithms.
    pub fn entropy(&self, mask: SubsetMask) -> LogCombo {
        let mut combo = LogCombo::zero();
        for p in self.marginal(mask).values() {
            // contribution -p * ln p
            combo.add_log_of(p, &-p.clone());
        }
        combo
    }

    /// Evaluate a functional on the exact entropy vector.
    pub fn evaluate(&self, form: &LinForm) -> LogCombo {
        assert_eq!(form.n(), self.n);
        let mut combo = LogCombo::zero();
        for (mask, c) in form.coeffs() {
            for p in self.marginal(*mask).values() {
                let coeff = -(c * p);
                combo.add_log_of(p, &coeff);
            }
        }
        combo
    }

    /// Sign of `form` on the entropy vector of this distribution.
    pub fn evaluate_sign(&self, form: &LinForm) -> Ordering {
        self.evaluate(form).sign()
    }

    /// A rational vector entrywise equal in sign-behavior to the entropy
    /// vector is impossible, but scaled approximations are not needed
    /// either: tests work with [`LogCombo`] directly. This helper exports
    /// the entropy profile as formal objects keyed by subset.
    pub fn entropy_profile(&self) -> BTreeMap<SubsetMask, LogCombo> {
        SubsetMask::full(self.n)
            .nonempty_subsets()
            .map(|m| (m, self.entropy(m)))
            .collect()
    }
}

/// A formal rational combination of natural logarithms of primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogCombo {
    terms: BTreeMap<u64, Rat>,
}

impl LogCombo {
    pub fn zero() -> LogCombo {
        LogCombo {
            terms: BTreeMap::new(),
        }
    }

    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `coeff * ln(x)` for a positive rational `x`.
    pub fn add_log_of(&mut self, x: &Rat, coeff: &Rat) {
        assert!(x.is_positive());
        if coeff.is_zero() {
            return;
        }
        for (prime, e) in factorize(x.numer().try_into().expect("small numerator")) {
            self.add_prime(prime, &(coeff * Rat::from_integer(BigInt::from(e))));
        }
        for (prime, e) in factorize(x.denom().try_into().expect("small denominator")) {
            self.add_prime(prime, &(coeff * Rat::from_integer(BigInt::from(-e))));
        }
    }

    fn add_prime(&mut self, prime: u64, coeff: &Rat) {
        let slot = self.terms.entry(prime).or_insert_with(Rat::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&prime);
        }
    }

    /// Exact sign. Zero is decided formally (prime logarithms are linearly
    /// independent over the rationals); nonzero combinations are resolved
    /// by interval enclosures of increasing precision.
    pub fn sign(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let mut terms = 24usize;
        loop {
            let mut lo = Rat::zero();
            let mut hi = Rat::zero();
            for (&prime, c) in &self.terms {
                let (plo, phi) = ln_bounds(prime, terms);
                if c.is_positive() {
                    lo += c * &plo;
                    hi += c * &phi;
                } else {
                    lo += c * &phi;
                    hi += c * &plo;
                }
            }
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            terms *= 2;
            assert!(
                terms <= 1 << 16,
                "sign resolution stalled; combination is {self:?}"
            );
        }
    }
}

/// Rigorous rational enclosure of `ln k` for an integer `k >= 2`, via
/// argument reduction to `[1, 2)` and the atanh series with an explicit
/// geometric tail bound.
fn ln_bounds(k: u64, terms: usize) -> (Rat, Rat) {
    {
        let cache = LN_CACHE.lock().unwrap();
        if let Some((t, lo, hi)) = cache.get(&k) {
            if *t >= terms {
                return (lo.clone(), hi.clone());
            }
        }
    }
    let (lo, hi) = if k == 2 {
        // Directly: t = 1/3 converges fast enough.
        ln_series(&Rat::from_integer(BigInt::from(2)), terms)
    } else {
        let j = 63 - k.leading_zeros() as u64; // floor(log2 k)
        let x = Rat::new(BigInt::from(k), BigInt::from(1u64 << j));
        let (mut lo, mut hi) = ln_series(&x, terms);
        if j > 0 {
            let (l2lo, l2hi) = ln_bounds(2, terms);
            let jr = Rat::from_integer(BigInt::from(j));
            lo += &jr * l2lo;
            hi += &jr * l2hi;
        }
        (lo, hi)
    };
    let mut cache = LN_CACHE.lock().unwrap();
    cache.insert(k, (terms, lo.clone(), hi.clone()));
    (lo, hi)
}

/// `ln x` for rational `x in [1, 2]`, by `2 atanh((x-1)/(x+1))`.
fn ln_series(x: &Rat, terms: usize) -> (Rat, Rat) {
    let one = Rat::one();
    let t = (x - &one) / (x + &one);
    if t.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let t2 = &t * &t;
    let mut power = t.clone();
    let mut sum = Rat::zero();
    for i in 0..terms {
        sum += &power / Rat::from_integer(BigInt::from(2 * i as i64 + 1));
        power *= &t2;
    }
    // power is now t^(2*terms+1); the tail is bounded by a geometric series.
    let tail = &power / (Rat::from_integer(BigInt::from(2 * terms as i64 + 1)) * (&one - &t2));
    let two = Rat::from_integer(BigInt::from(2));
    (&two * &sum, two * (sum + tail))
}

static LN_CACHE: Mutex<BTreeMap<u64, (usize, Rat, Rat)>> = Mutex::new(BTreeMap::new());

fn factorize(mut v: u64) -> Vec<(u64, i64)> {
    assert!(v > 0);
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= v {
        if v % d == 0 {
            let mut e = 0i64;
            while v % d == 0 {
                v /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if v > 1 {
        out.push((v, 1));
    }
    out
}

/// An entropy-like rational stand-in is sometimes handy for structural
/// tests: the entropy vector of a uniform distribution on `2^k` outcomes
/// is exactly integral in units of `ln 2`. This returns the entropy vector
/// of independent uniform bits with the given per-variable widths, in
/// `ln 2` units, which is an exact rational vector.
pub fn independent_uniform_bits(widths: &[u32]) -> EntVector {
    let n = widths.len();
    EntVector::new(
        n,
        SubsetMask::full(n).nonempty_subsets().map(|m| {
            let total: u32 = m.vars().map(|v| widths[v - 1]).sum();
            (m, Rat::from_integer(BigInt::from(total)))
        }),
    )
    .expect("static vector is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::shannon::elemental_inequalities;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform_bit() -> RatDist {
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        RatDist::new(
            1,
            [(vec![0u8], half.clone()), (vec![1u8], half)].into_iter().collect(),
        )
    }

    #[test]
    fn entropy_of_a_uniform_bit_is_ln2() {
        let d = uniform_bit();
        let h = d.entropy(SubsetMask::singleton(1));
        assert_eq!(h.sign(), Ordering::Greater);
        let mut expected = LogCombo::zero();
        expected.add_prime(2, &Rat::one());
        assert_eq!(h, expected);
    }

    #[test]
    fn deterministic_variables_have_zero_entropy() {
        let d = RatDist::new(1, [(vec![0u8], Rat::one())].into_iter().collect());
        assert!(d.entropy(SubsetMask::singleton(1)).is_formally_zero());
    }

    #[test]
    fn ln_bounds_are_ordered_and_tight() {
        for k in [2u64, 3, 5, 7, 11, 97] {
            let (lo, hi) = ln_bounds(k, 32);
            assert!(lo.is_positive());
            assert!(lo < hi);
            let width = &hi - &lo;
            assert!(width < Rat::new(BigInt::one(), BigInt::from(1_000_000_000u64)));
        }
    }

    #[test]
    fn mutual_information_of_independent_bits_is_zero() {
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        let q = &half * &half;
        let pmf: BTreeMap<Vec<u8>, Rat> = [
            (vec![0u8, 0u8], q.clone()),
            (vec![0u8, 1u8], q.clone()),
            (vec![1u8, 0u8], q.clone()),
            (vec![1u8, 1u8], q),
        ]
        .into_iter()
        .collect();
        let d = RatDist::new(2, pmf);
        let mi = catalog::conditional_mi(2, 1, 2, SubsetMask::EMPTY);
        assert_eq!(d.evaluate_sign(&mi), Ordering::Equal);
    }

    #[test]
    fn perfectly_correlated_bits_hit_monotonicity_exactly() {
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        let pmf: BTreeMap<Vec<u8>, Rat> = [
            (vec![0u8, 0u8], half.clone()),
            (vec![1u8, 1u8], half),
        ]
        .into_iter()
        .collect();
        let d = RatDist::new(2, pmf);
        // H(12) - H(1) = 0 for a copy.
        let f = LinForm::from_ints(2, crate::space::Relation::Ge, &[(&[1, 2], 1), (&[1], -1)])
            .unwrap();
        assert_eq!(d.evaluate_sign(&f), Ordering::Equal);
    }

    #[test]
    fn random_distributions_satisfy_elemental_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let forms = elemental_inequalities(3).unwrap();
        for _ in 0..50 {
            let d = RatDist::random(&mut rng, 3, 3);
            for f in &forms {
                assert_ne!(d.evaluate_sign(f), Ordering::Less, "violated {f}");
            }
        }
    }

    #[test]
    fn copy_extension_matches_marginals_and_equalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let step = CopyStep::new(
            3,
            SubsetMask::from_vars([1, 2]),
            SubsetMask::from_vars([4]),
            5,
        )
        .unwrap();
        for _ in 0..10 {
            let d = RatDist::random(&mut rng, 4, 2);
            let e = d.copy_extend(&step);
            // The (new, I) marginal agrees with the (k, I) marginal.
            let a = e.marginal(SubsetMask::from_vars([1, 2, 5]));
            let b = e.marginal(SubsetMask::from_vars([1, 2, 3]));
            assert_eq!(a, b);
            for eq in crate::copy::copy_equalities(&step).unwrap() {
                assert_eq!(e.evaluate_sign(&eq), Ordering::Equal, "violated {eq}");
            }
        }
    }
}
