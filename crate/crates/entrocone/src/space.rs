//! Coordinates of joint-entropy space.
//!
//! A ground set `{1..n}` induces one coordinate per nonempty subset; the
//! empty set is pinned to zero and never carries a coordinate. Subsets are
//! encoded as bitmasks, and every serialized or compared coefficient
//! sequence runs in ascending bitmask order, which makes all outputs
//! deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Largest supported ground set. Keeps the coordinate count (`2^n - 1`)
/// within memory reach; the shipped pipelines need at most seven.
pub const MAX_GROUND_SET: usize = 16;

/// A subset of the ground set `{1..n}`, encoded as a bitmask.
///
/// Bit `i-1` set means variable `i` is in the subset. The empty mask is
/// representable (it shows up as an intermediate in subset arithmetic) but
/// never indexes a coordinate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// Mask of the full ground set `{1..n}`.
    pub fn full(n: usize) -> SubsetMask {
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    /// Mask of a single variable (1-based).
    pub fn singleton(var: usize) -> SubsetMask {
        SubsetMask(1 << (var - 1))
    }

    /// Build from 1-based variable indices.
    pub fn from_vars<I: IntoIterator<Item = usize>>(vars: I) -> SubsetMask {
        let mut bits = 0u32;
        for v in vars {
            bits |= 1 << (v - 1);
        }
        SubsetMask(bits)
    }

    /// The 1-based variables of the subset, ascending.
    pub fn vars(self) -> impl Iterator<Item = usize> {
        (0..32u32).filter_map(move |i| (self.0 >> i & 1 == 1).then_some(i as usize + 1))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, var: usize) -> bool {
        self.0 >> (var - 1) & 1 == 1
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersect(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    pub fn minus(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn disjoint(self, other: SubsetMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Checks the mask fits in a ground set of `n`.
    pub fn fits(self, n: usize) -> bool {
        u64::from(self.0) < (1u64 << n)
    }

    /// All nonempty subsets of this mask, ascending by bitmask value.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = SubsetMask> {
        let m = self.0;
        // Standard subset-enumeration trick: (s - 1) & m walks submasks
        // descending, so collect and reverse for ascending order.
        let mut subs = Vec::with_capacity(1 << m.count_ones());
        let mut s = m;
        while s != 0 {
            subs.push(SubsetMask(s));
            s = (s - 1) & m;
        }
        subs.into_iter().rev()
    }

    /// Apply an injective variable map; `map[i-1]` is the image of `i`.
    pub fn apply_map(self, map: &[usize]) -> SubsetMask {
        let mut bits = 0u32;
        for v in self.vars() {
            bits |= 1 << (map[v - 1] - 1);
        }
        SubsetMask(bits)
    }

    /// Serialization key: comma-separated ascending variables, e.g. "1,3,4".
    pub fn to_key(self) -> String {
        let mut out = String::new();
        for (i, v) in self.vars().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out
    }

    /// Parse a serialization key against a ground set of `n`.
    pub fn parse_key(key: &str, n: usize) -> Result<SubsetMask> {
        let mut bits = 0u32;
        for part in key.split(',') {
            let part = part.trim();
            let var: usize = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable {part:?} in subset key")))?;
            if var == 0 || var > n {
                return Err(Error::VariableOutOfRange { var, n });
            }
            bits |= 1 << (var - 1);
        }
        Ok(SubsetMask(bits))
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{{{}}}", self.to_key())
        }
    }
}

/// Relation carried by a linear functional.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Relation {
    /// The functional is asserted nonnegative.
    Ge,
    /// The functional is asserted zero.
    Eq,
}

/// A rational linear functional on joint-entropy space with a relation:
/// one information inequality (`>= 0`) or equality (`= 0`).
///
/// Stored sparsely over nonempty subsets; zero coefficients are dropped.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinForm {
    n: usize,
    relation: Relation,
    coeffs: BTreeMap<SubsetMask, Rat>,
}

impl LinForm {
    /// Build a functional from `(subset, coefficient)` pairs. Zero
    /// coefficients are dropped, and so are contributions to the empty
    /// set, whose coordinate is identically zero.
    pub fn new<I>(n: usize, relation: Relation, coeffs: I) -> Result<LinForm>
    where
        I: IntoIterator<Item = (SubsetMask, Rat)>,
    {
        check_ground_set(n)?;
        let mut map = BTreeMap::new();
        for (mask, c) in coeffs {
            if c.is_zero() || mask.is_empty() {
                continue;
            }
            if !mask.fits(n) {
                return Err(Error::VariableOutOfRange {
                    var: mask.vars().last().unwrap_or(0),
                    n,
                });
            }
            let slot = map.entry(mask).or_insert_with(Rat::zero);
            *slot += c;
            if slot.is_zero() {
                map.remove(&mask);
            }
        }
        Ok(LinForm {
            n,
            relation,
            coeffs: map,
        })
    }

    /// Convenience constructor from integer coefficients over variable lists.
    pub fn from_ints(
        n: usize,
        relation: Relation,
        terms: &[(&[usize], i64)],
    ) -> Result<LinForm> {
        LinForm::new(
            n,
            relation,
            terms.iter().map(|(vars, c)| {
                (
                    SubsetMask::from_vars(vars.iter().copied()),
                    Rat::from_integer(BigInt::from(*c)),
                )
            }),
        )
    }

    pub fn zero(n: usize, relation: Relation) -> LinForm {
        LinForm {
            n,
            relation,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn coeffs(&self) -> &BTreeMap<SubsetMask, Rat> {
        &self.coeffs
    }

    pub fn coeff(&self, mask: SubsetMask) -> Rat {
        self.coeffs.get(&mask).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of nonzero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn with_relation(mut self, relation: Relation) -> LinForm {
        self.relation = relation;
        self
    }

    /// The negated functional (same relation).
    pub fn negated(&self) -> LinForm {
        LinForm {
            n: self.n,
            relation: self.relation,
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    /// `self + scale * other`, coefficientwise. Relations must already agree
    /// with what the caller intends; the result keeps `self`'s relation.
    pub fn add_scaled(&self, other: &LinForm, scale: &Rat) -> LinForm {
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            let slot = coeffs.entry(*m).or_insert_with(Rat::zero);
            *slot += c * scale;
            if slot.is_zero() {
                coeffs.remove(m);
            }
        }
        LinForm {
            n: self.n,
            relation: self.relation,
            coeffs,
        }
    }

    /// Inner product with an entropy vector.
    pub fn evaluate(&self, v: &EntVector) -> Result<Rat> {
        if self.n != v.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.n,
            });
        }
        let mut acc = Rat::zero();
        for (mask, c) in &self.coeffs {
            if let Some(x) = v.values.get(mask) {
                acc += c * x;
            }
        }
        Ok(acc)
    }

    /// Scale to the canonical representative: integer coefficients with
    /// gcd 1. Inequalities only admit positive scaling; equalities are also
    /// sign-normalized so the lowest-mask nonzero coefficient is positive.
    /// The zero functional is returned unchanged.
    pub fn canonicalize(&self) -> LinForm {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        for c in self.coeffs.values() {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let mut numer_gcd = BigInt::zero();
        for c in self.coeffs.values() {
            numer_gcd = numer_gcd.gcd(&(c.numer() * &denom_lcm / c.denom()));
        }
        let mut scale = Rat::new(denom_lcm, numer_gcd);
        if scale.is_negative() {
            scale = -scale;
        }
        if self.relation == Relation::Eq {
            let first = self.coeffs.values().next().unwrap();
            if first.is_negative() {
                scale = -scale;
            }
        }
        LinForm {
            n: self.n,
            relation: self.relation,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (*m, c * &scale))
                .collect(),
        }
    }

    /// Rename variables through an injective map into `{1..n_target}`;
    /// `map[i-1]` is the image of variable `i`. The result is canonical.
    pub fn substitute(&self, map: &[usize], n_target: usize) -> Result<LinForm> {
        check_ground_set(n_target)?;
        if map.len() != self.n || self.n > n_target {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: map.len(),
            });
        }
        let mut seen = 0u32;
        for &image in map {
            if image == 0 || image > n_target {
                return Err(Error::VariableOutOfRange {
                    var: image,
                    n: n_target,
                });
            }
            let bit = 1u32 << (image - 1);
            if seen & bit != 0 {
                return Err(Error::NonInjectiveSubstitution);
            }
            seen |= bit;
        }
        let form = LinForm::new(
            n_target,
            self.relation,
            self.coeffs
                .iter()
                .map(|(m, c)| (m.apply_map(map), c.clone())),
        )?;
        Ok(form.canonicalize())
    }

    /// Reinterpret over a larger ground set without renaming variables.
    pub fn embed(&self, n_target: usize) -> Result<LinForm> {
        let identity: Vec<usize> = (1..=self.n).collect();
        self.substitute(&identity, n_target)
    }

    /// The lexicographically least canonical form over all permutations of
    /// the ground set. Two functionals are permutation-equivalent exactly
    /// when their orbit canonicals coincide.
    pub fn orbit_canonical(&self) -> LinForm {
        let mut best = self.canonicalize();
        let mut perm: Vec<usize> = (1..=self.n).collect();
        permute_inner(&mut perm, 0, &mut |p| {
            let candidate = self
                .substitute(p, self.n)
                .expect("permutations are injective");
            if cmp_coeff_seq(&candidate, &best) == Ordering::Less {
                best = candidate;
            }
        });
        best
    }

    /// All distinct canonical forms over injective maps of the variables
    /// into `{1..n_target}` (the renamed forms of the functional).
    pub fn substituted_forms(&self, n_target: usize) -> Result<Vec<LinForm>> {
        if self.n > n_target {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: n_target,
            });
        }
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for map in injections(self.n, n_target) {
            let form = self.substitute(&map, n_target)?;
            if seen.insert(form_key(&form)) {
                out.push(form);
            }
        }
        Ok(out)
    }

    /// All distinct canonical forms over maps sending each variable to a
    /// nonempty subset of `{1..n_target}`: the substituted forms of the
    /// functional, where every slot may receive a joint variable. Renamed
    /// forms are the singleton assignments. Validity of an information
    /// inequality is preserved by every such substitution.
    pub fn joint_substituted_forms(&self, n_target: usize) -> Result<Vec<LinForm>> {
        check_ground_set(n_target)?;
        let subsets = (1u64 << n_target) - 1;
        if (subsets as f64).powi(self.n as i32) > 5e8 {
            return Err(Error::ClosureTooLarge {
                maps: subsets.saturating_pow(self.n as u32),
            });
        }
        let terms: Vec<(Vec<usize>, Rat)> = self
            .coeffs
            .iter()
            .map(|(m, c)| (m.vars().collect(), c.clone()))
            .collect();
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let mut assignment = vec![SubsetMask::EMPTY; self.n];
        let mut stack = vec![0u32; self.n + 1];
        // Iterative odometer over assignments; position i counts from 1
        // (mask value) to `subsets`.
        let mut pos = 0usize;
        stack[0] = 0;
        loop {
            if pos == self.n {
                let mut coeffs: BTreeMap<SubsetMask, Rat> = BTreeMap::new();
                for (vars, c) in &terms {
                    let mut union = 0u32;
                    for &v in vars {
                        union |= assignment[v - 1].0;
                    }
                    if union == 0 {
                        continue;
                    }
                    let slot = coeffs.entry(SubsetMask(union)).or_insert_with(Rat::zero);
                    *slot += c;
                    if slot.is_zero() {
                        coeffs.remove(&SubsetMask(union));
                    }
                }
                let form = LinForm {
                    n: n_target,
                    relation: self.relation,
                    coeffs,
                }
                .canonicalize();
                if !form.is_zero() && seen.insert(form_key(&form)) {
                    out.push(form);
                }
                pos -= 1;
                continue;
            }
            stack[pos] += 1;
            if u64::from(stack[pos]) > subsets {
                stack[pos] = 0;
                if pos == 0 {
                    break;
                }
                pos -= 1;
                continue;
            }
            assignment[pos] = SubsetMask(stack[pos]);
            pos += 1;
            if pos < self.n {
                stack[pos] = 0;
            }
        }
        Ok(out)
    }

    /// A cheap total invariant of the renaming orbit: the least dense
    /// coefficient vector over all ground-set permutations. Agrees with
    /// [`orbit_canonical`] as a grouping key but avoids rebuilding forms.
    pub fn orbit_key(&self) -> Vec<i128> {
        let canon = self.canonicalize();
        let dim = (1usize << self.n) - 1;
        let mut dense: Vec<i128> = vec![0; dim];
        let mut big = false;
        for (m, c) in &canon.coeffs {
            debug_assert!(c.is_integer());
            match i128::try_from(c.numer()) {
                Ok(v) => dense[m.0 as usize - 1] = v,
                Err(_) => {
                    big = true;
                    break;
                }
            }
        }
        if big {
            // Fall back for coefficients beyond i128: derive the key from
            // the exact orbit canonical instead.
            let oc = self.orbit_canonical();
            let mut out = vec![0i128; dim];
            for (m, c) in oc.coeffs() {
                out[m.0 as usize - 1] = i128::try_from(c.numer()).unwrap_or(i128::MAX);
            }
            return out;
        }
        let tables = mask_permutation_tables(self.n);
        let mut best: Option<Vec<i128>> = None;
        let mut buf = vec![0i128; dim];
        for table in tables.iter() {
            for (src, &dst) in table.iter().enumerate() {
                buf[dst] = dense[src];
            }
            if self.relation == Relation::Eq {
                if let Some(first) = buf.iter().find(|v| **v != 0) {
                    if *first < 0 {
                        for v in buf.iter_mut() {
                            *v = -*v;
                        }
                    }
                }
            }
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        best.unwrap_or(dense)
    }
}

/// For each permutation of `{1..n}` (in a fixed order), the table sending
/// the dense index of mask `I` to the dense index of its image.
fn mask_permutation_tables(n: usize) -> Vec<Vec<usize>> {
    let mut tables = Vec::new();
    let mut perm: Vec<usize> = (1..=n).collect();
    permute_inner(&mut perm, 0, &mut |p| {
        let table: Vec<usize> = (1u32..(1 << n))
            .map(|bits| SubsetMask(bits).apply_map(p).0 as usize - 1)
            .collect();
        tables.push(table);
    });
    tables
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (mask, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "x{mask}")?;
            } else {
                write!(f, "{a} x{mask}")?;
            }
        }
        match self.relation {
            Relation::Ge => write!(f, " >= 0"),
            Relation::Eq => write!(f, " = 0"),
        }
    }
}

/// Deterministic total order on functionals: by ascending-bitmask dense
/// coefficient sequence, rationals compared by value, then relation.
pub fn cmp_coeff_seq(a: &LinForm, b: &LinForm) -> Ordering {
    let mut ia = a.coeffs.iter().peekable();
    let mut ib = b.coeffs.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(_), None) | (None, Some(_)) => {
                // The exhausted side reads as zero at the other's next mask.
                let (side, iter_nonzero) = match ia.peek() {
                    Some(_) => (Ordering::Greater, &mut ia),
                    None => (Ordering::Less, &mut ib),
                };
                let (_, c) = iter_nonzero.next().unwrap();
                let zero = Rat::zero();
                let ord = c.cmp(&zero);
                if ord != Ordering::Equal {
                    return if side == Ordering::Greater { ord } else { ord.reverse() };
                }
            }
            (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb) {
                Ordering::Less => {
                    // a has a nonzero where b reads zero.
                    let ord = ca.cmp(&&Rat::zero());
                    if ord != Ordering::Equal {
                        return ord;
                    }
                    ia.next();
                }
                Ordering::Greater => {
                    let ord = Rat::zero().cmp(cb);
                    if ord != Ordering::Equal {
                        return ord;
                    }
                    ib.next();
                }
                Ordering::Equal => {
                    let ord = ca.cmp(cb);
                    if ord != Ordering::Equal {
                        return ord;
                    }
                    ia.next();
                    ib.next();
                }
            },
        }
    }
    rel_rank(a.relation).cmp(&rel_rank(b.relation))
}

fn rel_rank(r: Relation) -> u8 {
    match r {
        Relation::Ge => 0,
        Relation::Eq => 1,
    }
}

/// Hashable identity of a canonical form, used for dedup sets.
pub(crate) fn form_key(f: &LinForm) -> (u8, Vec<(u32, BigInt, BigInt)>) {
    let _ = ();
    form_key_inner(f)
}

fn form_key_inner(f: &LinForm) -> (u8, Vec<(u32, BigInt, BigInt)>) {
    (
        rel_rank(f.relation),
        f.coeffs
            .iter()
            .map(|(m, c)| (m.0, c.numer().clone(), c.denom().clone()))
            .collect(),
    )
}

/// Probe-only stringly form identity.
#[doc(hidden)]
pub fn form_key_probe(f: &LinForm) -> Vec<(u32, String)> {
    f.coeffs
        .iter()
        .map(|(m, c)| (m.0, c.to_string()))
        .collect()
}

/// A point of joint-entropy space with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EntVector {
    n: usize,
    values: BTreeMap<SubsetMask, Rat>,
}

impl EntVector {
    pub fn new<I>(n: usize, values: I) -> Result<EntVector>
    where
        I: IntoIterator<Item = (SubsetMask, Rat)>,
    {
        check_ground_set(n)?;
        let mut map = BTreeMap::new();
        for (mask, x) in values {
            if mask.is_empty() {
                if !x.is_zero() {
                    return Err(Error::NonzeroEmptySet);
                }
                continue;
            }
            if !mask.fits(n) {
                return Err(Error::VariableOutOfRange {
                    var: mask.vars().last().unwrap_or(0),
                    n,
                });
            }
            if !x.is_zero() {
                map.insert(mask, x);
            }
        }
        Ok(EntVector { n, values: map })
    }

    pub fn from_ints(n: usize, values: &[(&[usize], i64)]) -> Result<EntVector> {
        EntVector::new(
            n,
            values.iter().map(|(vars, x)| {
                (
                    SubsetMask::from_vars(vars.iter().copied()),
                    Rat::from_integer(BigInt::from(*x)),
                )
            }),
        )
    }

    pub fn zero(n: usize) -> EntVector {
        EntVector {
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &BTreeMap<SubsetMask, Rat> {
        &self.values
    }

    pub fn get(&self, mask: SubsetMask) -> Rat {
        self.values.get(&mask).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Rename variables through an injective map (`map[i-1]` = image of `i`).
    pub fn permute(&self, map: &[usize], n_target: usize) -> Result<EntVector> {
        if map.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: map.len(),
            });
        }
        EntVector::new(
            n_target,
            self.values
                .iter()
                .map(|(m, x)| (m.apply_map(map), x.clone())),
        )
    }

    /// Scale to a primitive integer vector (positive scaling only).
    pub fn canonicalize(&self) -> EntVector {
        if self.values.is_empty() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        for x in self.values.values() {
            denom_lcm = denom_lcm.lcm(x.denom());
        }
        let mut numer_gcd = BigInt::zero();
        for x in self.values.values() {
            numer_gcd = numer_gcd.gcd(&(x.numer() * &denom_lcm / x.denom()));
        }
        let scale = Rat::new(denom_lcm, numer_gcd);
        EntVector {
            n: self.n,
            values: self
                .values
                .iter()
                .map(|(m, x)| (*m, x * &scale))
                .collect(),
        }
    }

    /// Restrict to the coordinates indexed by subsets of `keep_vars`.
    pub fn restrict(&self, keep_vars: SubsetMask, n_target: usize) -> Result<EntVector> {
        EntVector::new(
            n_target,
            self.values
                .iter()
                .filter(|(m, _)| m.is_subset_of(keep_vars))
                .map(|(m, x)| (*m, x.clone())),
        )
    }
}

impl fmt::Display for EntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (mask, x)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{mask}={x}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_ground_set(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GROUND_SET {
        return Err(Error::GroundSetSize(n));
    }
    Ok(())
}

/// All injective maps `{1..m} -> {1..n}` in lexicographic order.
pub fn injections(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    let mut used = vec![false; n + 1];
    fn rec(
        m: usize,
        n: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == m {
            out.push(current.clone());
            return;
        }
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(m, n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(m, n, &mut current, &mut used, &mut out);
    out
}

fn permute_inner(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute_inner(perm, k + 1, visit);
        perm.swap(k, i);
    }
}
