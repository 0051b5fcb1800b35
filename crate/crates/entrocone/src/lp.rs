//! Exact rational linear programming over cones.
//!
//! Everything here reduces to one primitive: feasibility of a system
//! `M u = b` with some components of `u` sign-constrained, decided by a
//! Phase-I simplex over exact integers (fraction-free pivoting with a
//! global denominator). A feasible outcome carries the solution, an
//! infeasible one carries the Farkas row multipliers, so every answer is a
//! machine-checkable certificate:
//!
//! * `infer` asks whether a target inequality is a nonnegative combination
//!   of a cone's inequalities plus a free combination of its equalities.
//!   Yes yields the multipliers; no yields a ray of the cone on which the
//!   target goes negative.
//! * `point_in_projection` asks whether a point of a coordinate subspace
//!   lifts into the cone, without computing the projection.
//!
//! Equalities are handled natively as free multipliers. Pivoting uses a
//! steepest-coefficient rule and falls back to Bland's rule after a run of
//! degenerate pivots, so every solve terminates; identical inputs pivot
//! identically, so certificates are deterministic.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::shannon::Cone;
use crate::space::{EntVector, LinForm, Rat, Relation, SubsetMask};
use crate::{Error, Result};

/// Nonnegative multipliers over a cone's inequalities plus free
/// multipliers over its equalities, expressing `target` as their exact
/// combination: a machine-checkable implication proof.
#[derive(Clone, PartialEq, Debug)]
pub struct Certificate {
    pub ineq_multipliers: BTreeMap<usize, Rat>,
    pub eq_multipliers: BTreeMap<usize, Rat>,
    pub target: LinForm,
}

/// Outcome of an inference check: either an implication proof or a ray of
/// the cone violating the target.
#[derive(Clone, Debug)]
pub enum Inference {
    Implied(Certificate),
    NotImplied(EntVector),
}

impl Inference {
    pub fn implied(&self) -> bool {
        matches!(self, Inference::Implied(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Inference::Implied(c) => Some(c),
            Inference::NotImplied(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&EntVector> {
        match self {
            Inference::Implied(_) => None,
            Inference::NotImplied(w) => Some(w),
        }
    }

    pub fn into_certificate(self) -> Option<Certificate> {
        match self {
            Inference::Implied(c) => Some(c),
            Inference::NotImplied(_) => None,
        }
    }

    pub fn into_witness(self) -> Option<EntVector> {
        match self {
            Inference::Implied(_) => None,
            Inference::NotImplied(w) => Some(w),
        }
    }
}

/// Does the cone imply `target >= 0`?
///
/// The dual system `sum y_i ineq_i + sum z_j eq_j = target, y >= 0` is
/// solved directly: feasibility gives the certificate, and the Farkas
/// multipliers of an infeasible system are exactly a member of the cone on
/// which the target evaluates negative.
pub fn infer(cone: &Cone, target: &LinForm) -> Result<Inference> {
    if target.relation() != Relation::Ge {
        return Err(Error::EqualityTarget);
    }
    if target.n() != cone.n() {
        return Err(Error::DimensionMismatch {
            expected: cone.n(),
            found: target.n(),
        });
    }
    if target.is_zero() {
        return Ok(Inference::Implied(Certificate {
            ineq_multipliers: BTreeMap::new(),
            eq_multipliers: BTreeMap::new(),
            target: target.clone(),
        }));
    }

    // Rows: every coordinate touched by a constraint or the target.
    let mut masks = BTreeSet::new();
    for f in cone.ineqs().iter().chain(cone.eqs()).chain([target]) {
        masks.extend(f.coeffs().keys().copied());
    }
    let masks: Vec<SubsetMask> = masks.into_iter().collect();
    let row_of: BTreeMap<SubsetMask, usize> =
        masks.iter().enumerate().map(|(i, m)| (*m, i)).collect();

    let ineq_cols: Vec<SparseCol> = cone
        .ineqs()
        .iter()
        .map(|f| SparseCol::from_form(f, &row_of, true))
        .collect();
    let eq_cols: Vec<SparseCol> = cone
        .eqs()
        .iter()
        .map(|f| SparseCol::from_form(f, &row_of, false))
        .collect();
    let mut rhs = vec![Rat::zero(); masks.len()];
    for (m, c) in target.coeffs() {
        rhs[row_of[m]] = c.clone();
    }

    // Column generation: wide cones are solved against an active subset
    // of inequality columns, with the Farkas multipliers of each failed
    // round pricing the inactive ones. A multiplier vector that prices no
    // inactive column is a genuine witness for the whole cone; a feasible
    // subset solution is a certificate for the whole cone as it stands.
    const COLGEN_THRESHOLD: usize = 256;
    const COLGEN_BATCH: usize = 48;
    let mut active: Vec<usize> = if ineq_cols.len() <= COLGEN_THRESHOLD {
        (0..ineq_cols.len()).collect()
    } else {
        (0..COLGEN_THRESHOLD).collect()
    };
    let trace = std::env::var_os("ENTROCONE_TRACE").is_some();
    let mut round = 0usize;
    loop {
        round += 1;
        let round_start = std::time::Instant::now();
        let mut cols: Vec<SparseCol> = active.iter().map(|&j| ineq_cols[j].clone()).collect();
        cols.extend(eq_cols.iter().cloned());
        let outcome = solve_feasibility(masks.len(), &cols, &rhs);
        if trace && (round > 1 || round_start.elapsed().as_millis() > 500) {
            eprintln!(
                "  infer round {round}: active {} of {}, {:?}",
                active.len(),
                ineq_cols.len(),
                round_start.elapsed()
            );
        }
        match outcome {
            FeasOutcome::Feasible(values) => {
                let mut ineq_multipliers = BTreeMap::new();
                let mut eq_multipliers = BTreeMap::new();
                for (slot, v) in values.into_iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    if slot < active.len() {
                        ineq_multipliers.insert(active[slot], v);
                    } else {
                        eq_multipliers.insert(slot - active.len(), v);
                    }
                }
                let cert = Certificate {
                    ineq_multipliers,
                    eq_multipliers,
                    target: target.clone(),
                };
                debug_assert!(check_certificate(cone, &cert)?);
                return Ok(Inference::Implied(cert));
            }
            FeasOutcome::Infeasible(multipliers) => {
                if active.len() < ineq_cols.len() {
                    let mut violated = Vec::new();
                    let mut next_active_probe = active.iter().copied().peekable();
                    for (j, col) in ineq_cols.iter().enumerate() {
                        if next_active_probe.peek() == Some(&j) {
                            next_active_probe.next();
                            continue;
                        }
                        let dot: Rat = col
                            .entries
                            .iter()
                            .map(|(i, a)| a * &multipliers[*i])
                            .sum();
                        if dot.is_positive() {
                            violated.push(j);
                            if violated.len() >= COLGEN_BATCH {
                                break;
                            }
                        }
                    }
                    if !violated.is_empty() {
                        active.extend(violated);
                        active.sort_unstable();
                        continue;
                    }
                }
                // r satisfies every cone constraint and target(r) < 0.
                let witness = EntVector::new(
                    cone.n(),
                    masks
                        .iter()
                        .zip(&multipliers)
                        .map(|(m, v)| (*m, -v.clone())),
                )?;
                #[cfg(debug_assertions)]
                {
                    debug_assert!(cone.contains(&witness)?);
                    debug_assert!(target.evaluate(&witness)? < Rat::zero());
                }
                return Ok(Inference::NotImplied(witness));
            }
        }
    }
}

/// Split an equality target into its two one-sided checks.
pub fn infer_equality(cone: &Cone, target: &LinForm) -> Result<bool> {
    let ge = target.clone().with_relation(Relation::Ge);
    Ok(infer(cone, &ge)?.implied() && infer(cone, &ge.negated())?.implied())
}

/// Re-multiply a certificate and compare coefficientwise; no LP involved.
/// Out-of-range constraint indices are an error, everything else that can
/// fail just answers `false`.
pub fn check_certificate(cone: &Cone, cert: &Certificate) -> Result<bool> {
    for &j in cert.ineq_multipliers.keys() {
        if j >= cone.ineqs().len() {
            return Err(Error::CertificateIndex {
                index: j,
                len: cone.ineqs().len(),
            });
        }
    }
    for &j in cert.eq_multipliers.keys() {
        if j >= cone.eqs().len() {
            return Err(Error::CertificateIndex {
                index: j,
                len: cone.eqs().len(),
            });
        }
    }
    if cert.ineq_multipliers.values().any(|v| v.is_negative()) {
        return Ok(false);
    }
    let mut acc = LinForm::zero(cone.n(), cert.target.relation());
    for (&j, v) in &cert.ineq_multipliers {
        acc = acc.add_scaled(&cone.ineqs()[j], v);
    }
    for (&j, v) in &cert.eq_multipliers {
        acc = acc.add_scaled(&cone.eqs()[j], v);
    }
    Ok(acc.coeffs() == cert.target.coeffs())
}

/// Is `point` (supported on the kept coordinates) in the projection of the
/// cone onto those coordinates? Decided by one feasibility LP over the
/// dropped coordinates; the projection itself is never formed.
pub fn point_in_projection(
    cone: &Cone,
    keep: &BTreeSet<SubsetMask>,
    point: &EntVector,
) -> Result<bool> {
    if point.n() != cone.n() {
        return Err(Error::DimensionMismatch {
            expected: cone.n(),
            found: point.n(),
        });
    }
    if point.values().keys().any(|m| !keep.contains(m)) {
        return Err(Error::DegenerateKeepSet);
    }

    // Unknowns: the dropped coordinates (free) and one slack per
    // inequality. Row i reads
    //   sum_dropped a_i[d] x_d - s_i = -(a_i on keep) . point
    // with equality rows getting no slack.
    let mut dropped = BTreeSet::new();
    for f in cone.ineqs().iter().chain(cone.eqs()) {
        for m in f.coeffs().keys() {
            if !keep.contains(m) {
                dropped.insert(*m);
            }
        }
    }
    let dropped: Vec<SubsetMask> = dropped.into_iter().collect();
    let col_of: BTreeMap<SubsetMask, usize> =
        dropped.iter().enumerate().map(|(i, m)| (*m, i)).collect();

    let nrows = cone.ineqs().len() + cone.eqs().len();
    let mut cols: Vec<SparseCol> = (0..dropped.len())
        .map(|_| SparseCol {
            entries: Vec::new(),
            nonneg: false,
        })
        .collect();
    let mut rhs = Vec::with_capacity(nrows);
    for (i, f) in cone.ineqs().iter().chain(cone.eqs()).enumerate() {
        let mut kept_dot = Rat::zero();
        for (m, c) in f.coeffs() {
            if keep.contains(m) {
                kept_dot += c * point.get(*m);
            } else {
                cols[col_of[m]].entries.push((i, c.clone()));
            }
        }
        rhs.push(-kept_dot);
    }
    for i in 0..cone.ineqs().len() {
        cols.push(SparseCol {
            entries: vec![(i, -Rat::one())],
            nonneg: true,
        });
    }

    Ok(matches!(
        solve_feasibility(nrows, &cols, &rhs),
        FeasOutcome::Feasible(_)
    ))
}

/// Push a violating member of the cone onto a minimal face: walk along
/// null directions of the tight constraint set (keeping the target value
/// fixed) until the tight set has full corank. For a pointed cone the
/// result is an extreme ray, whose small entries keep downstream hull
/// arithmetic cheap; if a free line turns up (non-pointed cone) the
/// current point is returned as is. No LP is solved.
pub fn purify_witness(cone: &Cone, target: &LinForm, member: EntVector) -> Result<EntVector> {
    let mut masks = BTreeSet::new();
    for f in cone.ineqs().iter().chain(cone.eqs()).chain([target]) {
        masks.extend(f.coeffs().keys().copied());
    }
    let masks: Vec<SubsetMask> = masks.into_iter().collect();
    let dim = masks.len();
    let dense_form = |f: &LinForm| -> Vec<Rat> { masks.iter().map(|m| f.coeff(*m)).collect() };
    let ineq_rows: Vec<Vec<Rat>> = cone.ineqs().iter().map(&dense_form).collect();
    let eq_rows: Vec<Vec<Rat>> = cone.eqs().iter().map(&dense_form).collect();
    let target_row = dense_form(target);

    let dot = |a: &[Rat], b: &[Rat]| -> Rat {
        let mut acc = Rat::zero();
        for (x, y) in a.iter().zip(b) {
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
        acc
    };

    let mut x: Vec<Rat> = masks.iter().map(|m| member.get(*m)).collect();
    debug_assert!(dot(&target_row, &x).is_negative());
    loop {
        let mut tight: Vec<Vec<Rat>> = eq_rows.clone();
        tight.push(target_row.clone());
        let values: Vec<Rat> = ineq_rows.iter().map(|a| dot(a, &x)).collect();
        for (a, v) in ineq_rows.iter().zip(&values) {
            if v.is_zero() {
                tight.push(a.clone());
            }
        }
        let null = crate::project::linalg::null_space(&tight, dim);
        if null.is_empty() {
            break;
        }
        let d = &null[0];
        // Blocking rows bound the step; the first new tight row is
        // independent of the old tight set, so the loop ends within the
        // dimension.
        let mut best: Option<(Rat, bool)> = None; // (step, negative direction?)
        for dir_neg in [false, true] {
            let mut limit: Option<Rat> = None;
            for (a, v) in ineq_rows.iter().zip(&values) {
                if v.is_zero() {
                    continue;
                }
                let mut ad = dot(a, d);
                if dir_neg {
                    ad = -ad;
                }
                if ad.is_negative() {
                    let t = v / -ad;
                    if limit.as_ref().is_none_or(|l| t < *l) {
                        limit = Some(t);
                    }
                }
            }
            if let Some(t) = limit {
                if best.as_ref().is_none_or(|(b, _)| t < *b) {
                    best = Some((t, dir_neg));
                }
            }
        }
        let Some((t, dir_neg)) = best else {
            // A full line inside the cone: nothing more to pin down.
            break;
        };
        for (xi, di) in x.iter_mut().zip(d) {
            let step = &t * di;
            if dir_neg {
                *xi -= step;
            } else {
                *xi += step;
            }
        }
        crate::project::linalg::reduce_primitive(&mut x);
    }
    let out = EntVector::new(
        cone.n(),
        masks.iter().zip(&x).map(|(m, v)| (*m, v.clone())),
    )?
    .canonicalize();
    #[cfg(debug_assertions)]
    {
        debug_assert!(cone.contains(&out)?);
        debug_assert!(target.evaluate(&out)? < Rat::zero());
    }
    Ok(out)
}

/// Optimization sense for [`solve`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sense {
    Min,
    Max,
}

/// Outcome of optimizing a linear objective over a cone: homogeneous
/// problems are bounded exactly when the optimum is zero.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    /// The optimum is zero; the certificate proves the sign bound.
    BoundedAtZero(Certificate),
    /// The objective runs off to infinity along this ray of the cone.
    Unbounded(EntVector),
}

/// Minimize or maximize `objective` over the cone. The optimum of a
/// homogeneous LP is zero or infinite, so this is inference in disguise:
/// minimizing checks `objective >= 0`, maximizing checks `-objective >= 0`.
pub fn solve(objective: &LinForm, cone: &Cone, sense: Sense) -> Result<SolveOutcome> {
    let target = match sense {
        Sense::Min => objective.clone().with_relation(Relation::Ge),
        Sense::Max => objective.negated().with_relation(Relation::Ge),
    };
    Ok(match infer(cone, &target)? {
        Inference::Implied(cert) => SolveOutcome::BoundedAtZero(cert),
        Inference::NotImplied(ray) => SolveOutcome::Unbounded(ray),
    })
}

// ---------------------------------------------------------------------------
// Feasibility core
// ---------------------------------------------------------------------------

/// A column of the feasibility system, sparse over row indices.
#[derive(Clone, Debug)]
pub(crate) struct SparseCol {
    pub entries: Vec<(usize, Rat)>,
    pub nonneg: bool,
}

impl SparseCol {
    fn from_form(f: &LinForm, row_of: &BTreeMap<SubsetMask, usize>, nonneg: bool) -> SparseCol {
        SparseCol {
            entries: f
                .coeffs()
                .iter()
                .map(|(m, c)| (row_of[m], c.clone()))
                .collect(),
            nonneg,
        }
    }
}

#[derive(Debug)]
pub(crate) enum FeasOutcome {
    /// Values of the structural unknowns.
    Feasible(Vec<Rat>),
    /// Row multipliers `r` with `r.M <= 0` on nonnegative columns,
    /// `r.M = 0` on free columns, and `r.b > 0`.
    Infeasible(Vec<Rat>),
}

/// Decide `M u = b` with the given sign constraints, by Phase-I simplex
/// over exact integers.
pub(crate) fn solve_feasibility(nrows: usize, cols: &[SparseCol], rhs: &[Rat]) -> FeasOutcome {
    Tableau::assemble(nrows, cols, rhs).run()
}

/// Dense integer tableau with a global denominator: every true value is
/// `entry / denom`. Pivoting keeps entries integral (each is a minor of
/// the input system), so no rational reduction happens in the hot loop.
struct Tableau {
    nrows: usize,
    ncols: usize,
    nstruct: usize,
    /// Row-major, `nrows + 1` rows: constraint rows then the cost row.
    /// Each row has `ncols + 1` entries: columns then the right-hand side.
    t: Vec<Vec<BigInt>>,
    denom: BigInt,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Artificial columns may never (re-)enter the basis.
    banned: Vec<bool>,
    /// Per-row scaling applied to the original system (sign times a
    /// positive integer), combined into the Farkas pull-back.
    row_scale: Vec<Rat>,
    /// Per-column positive scaling applied to make entries integral.
    col_scale: Vec<Rat>,
    /// Split free columns: split column `nsplit_base + k` is the negation
    /// of structural column `split_of[k]`.
    split_of: Vec<usize>,
}

impl Tableau {
    fn assemble(nrows: usize, cols: &[SparseCol], rhs: &[Rat]) -> Tableau {
        assert_eq!(rhs.len(), nrows);
        // Row scaling first: clear the rhs denominator and orient rhs >= 0.
        let mut row_scale = Vec::with_capacity(nrows);
        let mut int_rhs = Vec::with_capacity(nrows);
        for b in rhs {
            let mut scale = Rat::from_integer(b.denom().clone());
            if (b * &scale).is_negative() {
                scale = -scale;
            }
            int_rhs.push((b * &scale).to_integer());
            row_scale.push(scale);
        }
        // Column scaling: clear denominators per column.
        let mut col_scale = Vec::with_capacity(cols.len());
        let mut int_cols: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(cols.len());
        for col in cols {
            let mut lcm = BigInt::one();
            for (i, v) in &col.entries {
                lcm = lcm.lcm((v * &row_scale[*i]).denom());
            }
            let scale = Rat::from_integer(lcm);
            int_cols.push(
                col.entries
                    .iter()
                    .map(|(i, v)| (*i, (v * &scale * &row_scale[*i]).to_integer()))
                    .collect(),
            );
            col_scale.push(scale);
        }
        // Free columns split into a positive and a negated copy.
        let mut split_of = Vec::new();
        for (j, col) in cols.iter().enumerate() {
            if !col.nonneg {
                int_cols.push(int_cols[j].iter().map(|(i, v)| (*i, -v)).collect());
                col_scale.push(col_scale[j].clone());
                split_of.push(j);
            }
        }

        let nstruct = int_cols.len();
        let ncols = nstruct + nrows; // one artificial per row
        let mut t = vec![vec![BigInt::zero(); ncols + 1]; nrows + 1];
        for (j, col) in int_cols.iter().enumerate() {
            for (i, v) in col {
                t[*i][j] = v.clone();
            }
        }
        for (i, b) in int_rhs.iter().enumerate() {
            t[i][nstruct + i] = BigInt::one();
            t[i][ncols] = b.clone();
        }
        // Cost row for min(sum of artificials) with the artificial basis:
        // the reduced cost of a structural column is minus its column sum,
        // artificial columns read zero, and the corner carries -sum(rhs).
        for j in 0..nstruct {
            let mut s = BigInt::zero();
            for row in t.iter().take(nrows) {
                s -= &row[j];
            }
            t[nrows][j] = s;
        }
        let mut corner = BigInt::zero();
        for b in &int_rhs {
            corner -= b;
        }
        t[nrows][ncols] = corner;

        let banned = vec![false; ncols];
        let basis: Vec<usize> = (0..nrows).map(|i| nstruct + i).collect();
        let mut in_basis = vec![false; ncols];
        for &j in &basis {
            in_basis[j] = true;
        }
        Tableau {
            nrows,
            ncols,
            nstruct,
            t,
            denom: BigInt::one(),
            basis,
            in_basis,
            banned,
            row_scale,
            col_scale,
            split_of,
        }
    }

    fn run(mut self) -> FeasOutcome {
        const STALL_LIMIT: u32 = 24;
        let mut stalled = 0u32;
        loop {
            let entering = if stalled >= STALL_LIMIT {
                self.entering_bland()
            } else {
                self.entering_dantzig()
            };
            let Some(c) = entering else { break };
            let r = self
                .leaving_row(c, stalled >= STALL_LIMIT)
                .expect("phase-one objective is bounded below");
            let degenerate = self.t[r][self.ncols].is_zero();
            self.pivot(r, c);
            if degenerate {
                stalled += 1;
            } else {
                stalled = 0;
            }
        }
        self.extract()
    }

    fn entering_dantzig(&self) -> Option<usize> {
        let mut best: Option<(usize, &BigInt)> = None;
        let cost = &self.t[self.nrows];
        for j in 0..self.ncols {
            if self.in_basis[j] || self.banned[j] {
                continue;
            }
            let rc = &cost[j];
            if rc.is_negative() && best.is_none_or(|(_, b)| rc < b) {
                best = Some((j, rc));
            }
        }
        best.map(|(j, _)| j)
    }

    fn entering_bland(&self) -> Option<usize> {
        (0..self.ncols).find(|&j| {
            !self.in_basis[j] && !self.banned[j] && self.t[self.nrows][j].is_negative()
        })
    }

    /// Minimum-ratio row for the entering column. In Bland mode ties break
    /// on the lowest basic-variable index (the anti-cycling guarantee);
    /// otherwise artificial rows win ties so they leave the basis early.
    fn leaving_row(&self, c: usize, bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.nrows {
            if !self.t[i][c].is_positive() {
                continue;
            }
            let better = match best {
                None => true,
                Some(bi) => {
                    // rhs[i]/t[i][c] vs rhs[bi]/t[bi][c], cross-multiplied;
                    // both column entries are positive.
                    let lhs = &self.t[i][self.ncols] * &self.t[bi][c];
                    let rhs = &self.t[bi][self.ncols] * &self.t[i][c];
                    match lhs.cmp(&rhs) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => {
                            if bland {
                                self.basis[i] < self.basis[bi]
                            } else {
                                let art_i = self.basis[i] >= self.nstruct;
                                let art_b = self.basis[bi] >= self.nstruct;
                                (art_i && !art_b)
                                    || (art_i == art_b && self.basis[i] < self.basis[bi])
                            }
                        }
                    }
                }
            };
            if better {
                best = Some(i);
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pivot = self.t[r][c].clone();
        debug_assert!(pivot.is_positive());
        let pivot_row = std::mem::take(&mut self.t[r]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = std::mem::replace(&mut row[c], BigInt::zero());
            if factor.is_zero() {
                if pivot != self.denom {
                    for v in row.iter_mut() {
                        if !v.is_zero() {
                            *v *= &pivot;
                            let (q, rem) = v.div_rem(&self.denom);
                            debug_assert!(rem.is_zero(), "fraction-free invariant broken");
                            *v = q;
                        }
                    }
                }
            } else {
                for (j, v) in row.iter_mut().enumerate() {
                    if j == c {
                        continue; // cleared below: the entering column is unit
                    }
                    let num = &*v * &pivot - &factor * &pivot_row[j];
                    if num.is_zero() {
                        *v = BigInt::zero();
                        continue;
                    }
                    let (q, rem) = num.div_rem(&self.denom);
                    debug_assert!(rem.is_zero(), "fraction-free invariant broken");
                    *v = q;
                }
            }
        }
        self.t[r] = pivot_row;
        self.denom = pivot;
        let old = self.basis[r];
        self.in_basis[old] = false;
        if old >= self.nstruct {
            self.banned[old] = true;
        }
        self.basis[r] = c;
        self.in_basis[c] = true;
    }

    fn extract(self) -> FeasOutcome {
        let feasible = self.t[self.nrows][self.ncols].is_zero();
        if feasible {
            let nsplit = self.split_of.len();
            let norig = self.nstruct - nsplit;
            let mut values = vec![Rat::zero(); norig];
            for (i, &j) in self.basis.iter().enumerate() {
                if j >= self.nstruct {
                    debug_assert!(self.t[i][self.ncols].is_zero());
                    continue;
                }
                let v = Rat::new(self.t[i][self.ncols].clone(), self.denom.clone());
                if j < norig {
                    values[j] += v;
                } else {
                    values[self.split_of[j - norig]] -= v;
                }
            }
            for (j, v) in values.iter_mut().enumerate() {
                *v *= &self.col_scale[j];
            }
            FeasOutcome::Feasible(values)
        } else {
            // pi_i = 1 - rc(artificial_i), pulled back through row scaling.
            let mut multipliers = Vec::with_capacity(self.nrows);
            for i in 0..self.nrows {
                let rc = Rat::new(
                    self.t[self.nrows][self.nstruct + i].clone(),
                    self.denom.clone(),
                );
                multipliers.push((Rat::one() - rc) * &self.row_scale[i]);
            }
            FeasOutcome::Infeasible(multipliers)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::shannon::{adjoin, shannon_cone};

    fn rat(p: i64) -> Rat {
        Rat::from_integer(BigInt::from(p))
    }

    fn ge(n: usize, terms: &[(&[usize], i64)]) -> LinForm {
        LinForm::from_ints(n, Relation::Ge, terms).unwrap()
    }

    #[test]
    fn zero_target_is_trivially_implied() {
        let cone = shannon_cone(2).unwrap();
        let inf = infer(&cone, &LinForm::zero(2, Relation::Ge)).unwrap();
        let cert = inf.certificate().unwrap();
        assert!(cert.ineq_multipliers.is_empty());
        assert!(check_certificate(&cone, cert).unwrap());
    }

    #[test]
    fn elemental_form_is_implied_by_itself() {
        let cone = shannon_cone(2).unwrap();
        let target = ge(2, &[(&[1], 1), (&[2], 1), (&[1, 2], -1)]);
        let inf = infer(&cone, &target).unwrap();
        assert!(inf.implied());
        assert!(check_certificate(&cone, inf.certificate().unwrap()).unwrap());
    }

    #[test]
    fn entropy_nonnegativity_is_implied() {
        // x_1 >= 0 is not elemental for n = 2 but follows from
        // H(1|2) >= 0 and I(1;2) >= 0.
        let cone = shannon_cone(2).unwrap();
        let inf = infer(&cone, &ge(2, &[(&[1], 1)])).unwrap();
        assert!(inf.implied());
    }

    #[test]
    fn clearly_false_targets_get_witnesses() {
        let cone = shannon_cone(2).unwrap();
        let inf = infer(&cone, &ge(2, &[(&[1], -1)])).unwrap();
        let w = inf.witness().unwrap();
        assert!(cone.contains(w).unwrap());
        assert!(ge(2, &[(&[1], -1)]).evaluate(w).unwrap() < Rat::zero());
    }

    #[test]
    fn zhang_yeung_is_not_shannon_implied() {
        let cone = shannon_cone(4).unwrap();
        let inf = infer(&cone, &catalog::zhang_yeung()).unwrap();
        let w = inf.witness().expect("Zhang-Yeung is non-Shannon-type");
        assert!(cone.contains(w).unwrap());
        assert!(catalog::zhang_yeung().evaluate(w).unwrap() < Rat::zero());
    }

    #[test]
    fn adjoined_bound_implies_its_own_forms() {
        let bound = adjoin(&shannon_cone(4).unwrap(), &[catalog::zhang_yeung()], true).unwrap();
        let inf = infer(&bound, &catalog::zhang_yeung()).unwrap();
        assert!(inf.implied());
        assert!(check_certificate(&bound, inf.certificate().unwrap()).unwrap());
    }

    #[test]
    fn equality_targets_are_rejected() {
        let cone = shannon_cone(2).unwrap();
        let eq = LinForm::from_ints(2, Relation::Eq, &[(&[1], 1)]).unwrap();
        assert!(matches!(infer(&cone, &eq), Err(Error::EqualityTarget)));
    }

    #[test]
    fn perturbed_certificates_fail_exactly() {
        let cone = shannon_cone(2).unwrap();
        let target = ge(2, &[(&[1], 1)]);
        let mut cert = infer(&cone, &target).unwrap().into_certificate().unwrap();
        let (&j, v) = cert.ineq_multipliers.iter().next().unwrap();
        let bumped = v + Rat::new(BigInt::one(), BigInt::from(1_000_000_000i64));
        cert.ineq_multipliers.insert(j, bumped);
        assert!(!check_certificate(&cone, &cert).unwrap());
    }

    #[test]
    fn out_of_range_certificate_indices_error() {
        let cone = shannon_cone(2).unwrap();
        let cert = Certificate {
            ineq_multipliers: [(99usize, rat(1))].into_iter().collect(),
            eq_multipliers: BTreeMap::new(),
            target: ge(2, &[(&[1], 1)]),
        };
        assert!(check_certificate(&cone, &cert).is_err());
    }

    #[test]
    fn solve_matches_inference() {
        let cone = shannon_cone(2).unwrap();
        let x1 = ge(2, &[(&[1], 1)]);
        assert!(matches!(
            solve(&x1, &cone, Sense::Min).unwrap(),
            SolveOutcome::BoundedAtZero(_)
        ));
        assert!(matches!(
            solve(&x1, &cone, Sense::Max).unwrap(),
            SolveOutcome::Unbounded(_)
        ));
        let zy = catalog::zhang_yeung();
        let cone4 = shannon_cone(4).unwrap();
        match solve(&zy, &cone4, Sense::Min).unwrap() {
            SolveOutcome::Unbounded(ray) => {
                assert!(cone4.contains(&ray).unwrap());
                assert!(zy.evaluate(&ray).unwrap() < Rat::zero());
            }
            SolveOutcome::BoundedAtZero(_) => panic!("Zhang-Yeung must be violated"),
        }
    }

    #[test]
    fn submodularity_objective_is_bounded() {
        let cone = shannon_cone(2).unwrap();
        let obj = ge(2, &[(&[1], 1), (&[2], 1), (&[1, 2], -1)]);
        assert!(matches!(
            solve(&obj, &cone, Sense::Min).unwrap(),
            SolveOutcome::BoundedAtZero(_)
        ));
    }

    #[test]
    fn apex_is_in_every_projection() {
        let cone = shannon_cone(3).unwrap();
        let keep: BTreeSet<SubsetMask> = SubsetMask::full(2).nonempty_subsets().collect();
        let origin = EntVector::zero(3);
        assert!(point_in_projection(&cone, &keep, &origin).unwrap());
    }

    #[test]
    fn explicit_members_project_inside() {
        let cone = shannon_cone(3).unwrap();
        let keep: BTreeSet<SubsetMask> = SubsetMask::full(2).nonempty_subsets().collect();
        let member = catalog::independent_bits_point(3);
        let projected = member.restrict(SubsetMask::full(2), 3).unwrap();
        assert!(point_in_projection(&cone, &keep, &projected).unwrap());
    }

    #[test]
    fn points_outside_the_projection_are_rejected() {
        // x_12 > x_1 + x_2 violates subadditivity, which survives
        // projection from any larger Shannon cone.
        let cone = shannon_cone(3).unwrap();
        let keep: BTreeSet<SubsetMask> = SubsetMask::full(2).nonempty_subsets().collect();
        let bad = EntVector::from_ints(3, &[(&[1], 1), (&[2], 1), (&[1, 2], 3)]).unwrap();
        assert!(!point_in_projection(&cone, &keep, &bad).unwrap());
    }

    #[test]
    fn infer_requires_matching_ground_sets() {
        let cone = shannon_cone(3).unwrap();
        assert!(infer(&cone, &ge(2, &[(&[1], 1)])).is_err());
    }

    #[test]
    fn inference_is_deterministic() {
        let cone = shannon_cone(3).unwrap();
        let target = ge(3, &[(&[1], 1), (&[2], 1), (&[1, 2], -1)]);
        let a = infer(&cone, &target).unwrap().into_certificate().unwrap();
        let b = infer(&cone, &target).unwrap().into_certificate().unwrap();
        assert_eq!(a, b);
    }
}

#[cfg(all(test, feature = "testkit"))]
mod fuzz {
    use super::*;
    use crate::testkit::refsimplex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The production solver against a textbook rational simplex, plus
    /// direct validation of whichever artifact comes back.
    #[test]
    fn feasibility_agrees_with_reference_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for case in 0..400 {
            let nrows = rng.gen_range(1..=6);
            let ncols = rng.gen_range(1..=8);
            let cols: Vec<SparseCol> = (0..ncols)
                .map(|_| {
                    let mut entries = Vec::new();
                    for i in 0..nrows {
                        if rng.gen_bool(0.7) {
                            let v = rng.gen_range(-3i64..=3);
                            if v != 0 {
                                entries.push((i, Rat::from_integer(BigInt::from(v))));
                            }
                        }
                    }
                    SparseCol {
                        entries,
                        nonneg: rng.gen_bool(0.7),
                    }
                })
                .collect();
            let rhs: Vec<Rat> = (0..nrows)
                .map(|_| Rat::from_integer(BigInt::from(rng.gen_range(-3i64..=3))))
                .collect();

            let ref_cols: Vec<(Vec<(usize, Rat)>, bool)> = cols
                .iter()
                .map(|c| (c.entries.clone(), c.nonneg))
                .collect();
            let expected = refsimplex::feasible(nrows, &ref_cols, &rhs);

            match solve_feasibility(nrows, &cols, &rhs) {
                FeasOutcome::Feasible(values) => {
                    assert!(expected, "case {case}: solver feasible, reference not");
                    // Plug the solution back in.
                    let mut residual = rhs.clone();
                    for (j, v) in values.iter().enumerate() {
                        assert!(
                            !cols[j].nonneg || !v.is_negative(),
                            "case {case}: sign violation"
                        );
                        for (i, a) in &cols[j].entries {
                            residual[*i] -= a * v;
                        }
                    }
                    assert!(
                        residual.iter().all(|r| r.is_zero()),
                        "case {case}: solution does not satisfy the system"
                    );
                }
                FeasOutcome::Infeasible(mult) => {
                    assert!(!expected, "case {case}: solver infeasible, reference not");
                    // r.M <= 0 on nonneg columns, = 0 on free, r.b > 0.
                    for (j, col) in cols.iter().enumerate() {
                        let mut dot = Rat::zero();
                        for (i, a) in &col.entries {
                            dot += a * &mult[*i];
                        }
                        if col.nonneg {
                            assert!(!dot.is_positive(), "case {case}: col {j} prices wrong");
                        } else {
                            assert!(dot.is_zero(), "case {case}: free col {j} prices nonzero");
                        }
                    }
                    let dot_b: Rat = rhs.iter().zip(&mult).map(|(b, r)| b * r).sum();
                    assert!(dot_b.is_positive(), "case {case}: Farkas value not positive");
                }
            }
        }
    }

    /// Rational (non-integer) inputs exercise the row/column scaling.
    #[test]
    fn feasibility_handles_rational_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..150 {
            let nrows = rng.gen_range(1..=5);
            let ncols = rng.gen_range(1..=6);
            let rand_rat = |rng: &mut ChaCha8Rng| {
                Rat::new(
                    BigInt::from(rng.gen_range(-4i64..=4)),
                    BigInt::from(rng.gen_range(1i64..=4)),
                )
            };
            let cols: Vec<SparseCol> = (0..ncols)
                .map(|_| {
                    let mut entries = Vec::new();
                    for i in 0..nrows {
                        let v = rand_rat(&mut rng);
                        if !v.is_zero() {
                            entries.push((i, v));
                        }
                    }
                    SparseCol {
                        entries,
                        nonneg: rng.gen_bool(0.5),
                    }
                })
                .collect();
            let rhs: Vec<Rat> = (0..nrows).map(|_| rand_rat(&mut rng)).collect();
            let ref_cols: Vec<(Vec<(usize, Rat)>, bool)> = cols
                .iter()
                .map(|c| (c.entries.clone(), c.nonneg))
                .collect();
            let expected = refsimplex::feasible(nrows, &ref_cols, &rhs);
            let got = matches!(
                solve_feasibility(nrows, &cols, &rhs),
                FeasOutcome::Feasible(_)
            );
            assert_eq!(got, expected);
        }
    }
}
