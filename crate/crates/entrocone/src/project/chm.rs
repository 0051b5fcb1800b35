//! Convex hull method: projection directly in the target subspace.
//!
//! The algorithm grows an inner approximation of the projected cone as the
//! hull of rays known to lie in it, maintaining the hull's double
//! description pair. Each facet of the approximation is tested against the
//! input cone by one inference LP: an implied facet is a certified facet
//! of the true projection, a refuted one yields a member of the cone whose
//! projection lies strictly outside the hull and is inserted as a new ray.
//! The loop ends when every facet is certified, at which point the hull
//! *is* the projection, with a Farkas certificate per facet and a
//! projection-membership certificate per ray.
//!
//! Initialization probes each kept coordinate direction (and then any
//! leftover orthogonal directions) with the same inference LP; directions
//! bounded on both sides are implicit equalities of the projection and are
//! factored out before the hull starts, so the hull always works in a
//! full-dimensional quotient. A valid warm start (rays already known to
//! lie in the projection, spanning the target space) skips the probing.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::dd::DualRayEngine;
use super::fm::sort_forms;
use super::linalg;
use crate::lp::{infer, point_in_projection, Certificate};
use crate::shannon::Cone;
use crate::space::{form_key, EntVector, LinForm, Rat, Relation, SubsetMask};
use crate::{Error, Result};

/// Knobs for [`chm_project`].
#[derive(Clone, Debug, Default)]
pub struct ProjectOptions {
    /// Rays already known to lie in the projection. Each is validated by a
    /// projection-membership LP; any ray outside the projection is an
    /// error. If the valid rays span the target space, coordinate probing
    /// is skipped entirely.
    pub warm_start: Option<Vec<EntVector>>,
    /// Abort with an error after this many ray insertions.
    pub ray_budget: Option<usize>,
}

/// A certified projection: the cone (facets, implicit equalities, extreme
/// rays) plus one implication certificate per facet, indexed in step with
/// `cone.ineqs()`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub cone: Cone,
    pub certificates: Vec<Certificate>,
}

impl Projection {
    /// Reinterpret over the ground set `{1..m}` when the kept coordinates
    /// were exactly the nonempty subsets of it. Certificates keep indexing
    /// the input cone and are unaffected.
    pub fn into_variable_cone(self, m: usize) -> Result<(Cone, Vec<Certificate>)> {
        let shrink = |f: &LinForm| -> Result<LinForm> {
            LinForm::new(
                m,
                f.relation(),
                f.coeffs().iter().map(|(k, v)| (*k, v.clone())),
            )
        };
        let ineqs: Vec<LinForm> = self.cone.ineqs().iter().map(&shrink).collect::<Result<_>>()?;
        let eqs: Vec<LinForm> = self.cone.eqs().iter().map(&shrink).collect::<Result<_>>()?;
        let rays: Option<Vec<EntVector>> = match self.cone.rays() {
            None => None,
            Some(rs) => Some(
                rs.iter()
                    .map(|r| {
                        EntVector::new(m, r.values().iter().map(|(k, v)| (*k, v.clone())))
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        let mut cone = Cone::new(m, ineqs, eqs)?;
        if let Some(rays) = rays {
            cone = cone.with_rays(rays);
        }
        Ok((cone, self.certificates))
    }
}

/// Project a cone onto a set of coordinates by the convex hull method.
pub fn chm_project(
    cone: &Cone,
    keep: &BTreeSet<SubsetMask>,
    options: &ProjectOptions,
) -> Result<Projection> {
    let n = cone.n();
    let all: BTreeSet<SubsetMask> = SubsetMask::full(n).nonempty_subsets().collect();
    if keep.is_empty() || !keep.is_subset(&all) {
        return Err(Error::DegenerateKeepSet);
    }
    let kept: Vec<SubsetMask> = keep.iter().copied().collect();
    let d = kept.len();
    let dense = |v: &EntVector| -> Vec<Rat> { kept.iter().map(|m| v.get(*m)).collect() };

    let mut state = Harvest {
        rays: Vec::new(),
        ray_rows: Vec::new(),
        eq_rows: Vec::new(),
        rank: 0,
    };

    // Warm start: validate, then only probe if it does not span.
    let mut warm_spans = false;
    if let Some(warm) = &options.warm_start {
        for ray in warm {
            if ray.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: ray.n(),
                });
            }
            if ray.values().keys().any(|m| !keep.contains(m))
                || !point_in_projection(cone, keep, ray)?
            {
                return Err(Error::WarmStartOutsideProjection);
            }
            state.offer_ray(ray.clone(), dense(ray));
        }
        warm_spans = state.rank == d;
    }

    if !warm_spans {
        // Probe both signs of each kept coordinate, then mop up whatever
        // subspace is left with orthogonal-complement directions.
        for (i, mask) in kept.iter().enumerate() {
            if state.rank + state.eq_rows.len() == d {
                break;
            }
            let mut unit = vec![Rat::zero(); d];
            unit[i] = Rat::from_integer(1.into());
            let plus = LinForm::new(n, Relation::Ge, [(*mask, Rat::from_integer(1.into()))])?;
            let bounded_above = probe(cone, &plus.negated(), keep, &mut state)?;
            let bounded_below = probe(cone, &plus, keep, &mut state)?;
            if bounded_above && bounded_below {
                state.offer_equality(unit);
            }
        }
        while state.rank + state.eq_rows.len() < d {
            if std::env::var_os("ENTROCONE_TRACE").is_some() {
                eprintln!("chm completion: rank {} + eqs {} of {}", state.rank, state.eq_rows.len(), d);
            }
            let mut span_rows = state.ray_rows.clone();
            span_rows.extend(state.eq_rows.iter().cloned());
            let complement = linalg::null_space(&span_rows, d);
            let u = complement
                .first()
                .expect("rank accounting says the complement is nonempty");
            let form = dense_to_form(n, &kept, u, Relation::Ge)?;
            let bounded_below = probe(cone, &form, keep, &mut state)?;
            if bounded_below && probe(cone, &form.negated(), keep, &mut state)? {
                state.offer_equality(u.clone());
            }
        }
    }

    // Implicit equalities of the projection, in echelon form.
    let eq_pivots = linalg::rref(&mut state.eq_rows);
    let eqs: Vec<LinForm> = state
        .eq_rows
        .iter()
        .map(|row| dense_to_form(n, &kept, row, Relation::Eq).map(|f| f.canonicalize()))
        .collect::<Result<_>>()?;
    let dim = d - eqs.len();
    if dim == 0 {
        // The projection is the origin alone.
        let cone_out = Cone::new(n, Vec::new(), eqs)?.with_rays(Vec::new());
        return Ok(Projection {
            cone: cone_out,
            certificates: Vec::new(),
        });
    }

    let quotient = QuotientMap::build(&state, &eq_pivots, d, dim);

    // The hull engine works in quotient coordinates.
    let mut engine = DualRayEngine::new(dim);
    let mut inserted: BTreeSet<Vec<(num_bigint::BigInt, num_bigint::BigInt)>> = BTreeSet::new();
    let mut ray_list: Vec<EntVector> = Vec::new();
    let mut insertions = 0usize;
    let budget = options.ray_budget.unwrap_or(usize::MAX);
    let mut push_ray = |engine: &mut DualRayEngine,
                        ray_list: &mut Vec<EntVector>,
                        insertions: &mut usize,
                        ambient: EntVector,
                        row: Vec<Rat>|
     -> Result<()> {
        let mut q = quotient.to_quotient(&row);
        linalg::reduce_primitive(&mut q);
        let key: Vec<_> = q.iter().map(|x| (x.numer().clone(), x.denom().clone())).collect();
        if !inserted.insert(key) {
            return Ok(());
        }
        *insertions += 1;
        if *insertions > budget {
            return Err(Error::RayBudgetExceeded { budget });
        }
        engine.insert(q);
        ray_list.push(ambient);
        Ok(())
    };

    for (ambient, row) in state.rays.iter().zip(&state.ray_rows) {
        push_ray(
            &mut engine,
            &mut ray_list,
            &mut insertions,
            ambient.clone(),
            row.clone(),
        )?;
    }
    debug_assert!(engine.pointed());

    // Certify facets; refuted ones admit a ray that grows the hull.
    let trace = std::env::var_os("ENTROCONE_TRACE").is_some();
    let t_loop = std::time::Instant::now();
    let mut lp_count = 0usize;
    let mut certificates: BTreeMap<_, Certificate> = BTreeMap::new();
    loop {
        let mut pending: Option<LinForm> = None;
        for fq in engine.rays() {
            let facet = quotient.facet_to_ambient(n, &kept, fq)?;
            if certificates.contains_key(&form_key(&facet)) {
                continue;
            }
            let better = match &pending {
                None => true,
                Some(best) => {
                    facet.support_size() < best.support_size()
                        || (facet.support_size() == best.support_size()
                            && crate::space::cmp_coeff_seq(&facet, best)
                                == std::cmp::Ordering::Less)
                }
            };
            if better {
                pending = Some(facet);
            }
        }
        let Some(facet) = pending else { break };
        lp_count += 1;
        if trace && lp_count >= 238 {
            let bits = facet
                .coeffs()
                .values()
                .map(|c| c.numer().bits())
                .max()
                .unwrap_or(0);
            eprintln!("chm: lp {lp_count} starting (facet bits {bits}) at {:?}", t_loop.elapsed());
        }
        if trace && lp_count % 10 == 0 {
            eprintln!(
                "chm: lp {lp_count}, rays {}, facets {}, certified {}, {:?}",
                ray_list.len(),
                engine.rays().count(),
                certificates.len(),
                t_loop.elapsed()
            );
        }
        match infer(cone, &facet)? {
            crate::lp::Inference::Implied(cert) => {
                certificates.insert(form_key(&facet), cert);
            }
            crate::lp::Inference::NotImplied(member) => {
                // Swap the dual multiplier vector for an extreme ray of
                // the cone: its entries stay small, which keeps the hull
                // arithmetic cheap.
                let t_p = std::time::Instant::now();
                let member = crate::lp::purify_witness(cone, &facet, member)?;
                if trace && t_p.elapsed().as_millis() > 200 {
                    eprintln!("  purify: {:?}", t_p.elapsed());
                }
                let projected = EntVector::new(
                    n,
                    kept.iter().map(|m| (*m, member.get(*m))),
                )?
                .canonicalize();
                let row = dense(&projected);
                push_ray(
                    &mut engine,
                    &mut ray_list,
                    &mut insertions,
                    projected,
                    row,
                )?;
            }
        }
    }

    // Assemble: facets with their certificates, extreme rays certified by
    // projection membership.
    let mut facets: Vec<LinForm> = engine
        .rays()
        .map(|fq| quotient.facet_to_ambient(n, &kept, fq))
        .collect::<Result<_>>()?;
    sort_forms(&mut facets);
    let certs: Vec<Certificate> = facets
        .iter()
        .map(|f| certificates[&form_key(f)].clone())
        .collect();

    let facet_rows: Vec<Vec<Rat>> = engine.rays().map(<[Rat]>::to_vec).collect();
    let lineality = linalg::null_space(&facet_rows, dim);
    let mut out_rays: Vec<EntVector> = Vec::new();
    if lineality.is_empty() {
        for (gi, gen) in engine.gens().iter().enumerate() {
            let saturated: Vec<Vec<Rat>> = facet_rows
                .iter()
                .filter(|f| dot(f, gen).is_zero())
                .cloned()
                .collect();
            if linalg::rank(&saturated) == dim - 1 {
                out_rays.push(ray_list[gi].clone());
            }
        }
    } else {
        // Non-pointed projection: emit a generator set instead of extreme
        // rays, padding with both signs of the lineality directions.
        out_rays.extend(ray_list.iter().cloned());
        for l in &lineality {
            for sign in [1i64, -1] {
                let ambient = quotient.from_quotient(l, sign);
                out_rays.push(EntVector::new(
                    n,
                    kept.iter().zip(&ambient).map(|(m, v)| (*m, v.clone())),
                )?);
            }
        }
    }
    let mut out_rays: Vec<EntVector> = out_rays
        .into_iter()
        .map(|r| r.canonicalize())
        .collect();
    out_rays.sort_by(|a, b| {
        let av: Vec<Rat> = kept.iter().map(|m| a.get(*m)).collect();
        let bv: Vec<Rat> = kept.iter().map(|m| b.get(*m)).collect();
        av.cmp(&bv)
    });
    out_rays.dedup();
    for ray in &out_rays {
        debug_assert!(point_in_projection(cone, keep, ray)?);
    }

    let cone_out = Cone::new(n, facets, eqs)?.with_rays(out_rays);
    Ok(Projection {
        cone: cone_out,
        certificates: certs,
    })
}

/// One inference probe during initialization. Returns whether the target
/// is implied; refutation witnesses are offered to the harvest state.
fn probe(
    cone: &Cone,
    target: &LinForm,
    keep: &BTreeSet<SubsetMask>,
    state: &mut Harvest,
) -> Result<bool> {
    if std::env::var_os("ENTROCONE_TRACE").is_some() {
        eprintln!("chm probe: {target}");
    }
    match infer(cone, target)? {
        crate::lp::Inference::Implied(_) => Ok(true),
        crate::lp::Inference::NotImplied(member) => {
            let member = crate::lp::purify_witness(cone, target, member)?;
            let kept: Vec<SubsetMask> = keep.iter().copied().collect();
            let projected =
                EntVector::new(cone.n(), kept.iter().map(|m| (*m, member.get(*m))))?
                    .canonicalize();
            let row: Vec<Rat> = kept.iter().map(|m| projected.get(*m)).collect();
            state.offer_ray(projected, row);
            Ok(false)
        }
    }
}

/// Rays and implicit-equality directions found during initialization.
struct Harvest {
    rays: Vec<EntVector>,
    ray_rows: Vec<Vec<Rat>>,
    eq_rows: Vec<Vec<Rat>>,
    rank: usize,
}

impl Harvest {
    /// Keep a ray only if it extends the spanned subspace.
    fn offer_ray(&mut self, ray: EntVector, row: Vec<Rat>) {
        let mut rows = self.ray_rows.clone();
        rows.push(row.clone());
        let r = linalg::rank(&rows);
        if r > self.rank {
            self.rank = r;
            self.rays.push(ray);
            self.ray_rows.push(row);
        }
    }

    fn offer_equality(&mut self, row: Vec<Rat>) {
        let mut rows = self.eq_rows.clone();
        rows.push(row);
        if linalg::rank(&rows) > self.eq_rows.len() {
            self.eq_rows = rows;
        }
    }
}

/// Coordinates of the full-dimensional quotient: the span of the harvested
/// rays, with the implicit equalities factored out.
struct QuotientMap {
    /// None when the projection is already full-dimensional.
    basis: Option<QuotientBasis>,
}

struct QuotientBasis {
    /// Rows: `dim` independent rays spanning the projection, dense over
    /// the kept coordinates.
    rays: Vec<Vec<Rat>>,
    /// Echelon rows of the implicit equalities with their pivot columns,
    /// for reducing lifted facets to a canonical representative.
    eq_rows: Vec<Vec<Rat>>,
    eq_pivots: Vec<usize>,
}

impl QuotientMap {
    fn build(state: &Harvest, eq_pivots: &[usize], d: usize, dim: usize) -> QuotientMap {
        if state.eq_rows.is_empty() {
            return QuotientMap { basis: None };
        }
        let _ = d;
        let idx = linalg::independent_subset(&state.ray_rows);
        debug_assert_eq!(idx.len(), dim);
        QuotientMap {
            basis: Some(QuotientBasis {
                rays: idx.iter().map(|&i| state.ray_rows[i].clone()).collect(),
                eq_rows: state.eq_rows.clone(),
                eq_pivots: eq_pivots.to_vec(),
            }),
        }
    }

    /// Dense kept-space vector (inside the span) to quotient coordinates.
    fn to_quotient(&self, row: &[Rat]) -> Vec<Rat> {
        match &self.basis {
            None => row.to_vec(),
            Some(b) => {
                // Solve sum_j rho_j * ray_j = row.
                let d = row.len();
                let rows: Vec<Vec<Rat>> = (0..d)
                    .map(|i| b.rays.iter().map(|r| r[i].clone()).collect())
                    .collect();
                linalg::solve(&rows, row).expect("vector lies in the projection span")
            }
        }
    }

    /// Quotient vector back to a dense kept-space vector.
    fn from_quotient(&self, q: &[Rat], sign: i64) -> Vec<Rat> {
        let s = Rat::from_integer(sign.into());
        match &self.basis {
            None => q.iter().map(|x| x * &s).collect(),
            Some(b) => {
                let d = b.rays[0].len();
                let mut out = vec![Rat::zero(); d];
                for (coef, ray) in q.iter().zip(&b.rays) {
                    for (o, r) in out.iter_mut().zip(ray) {
                        *o += coef * r * &s;
                    }
                }
                out
            }
        }
    }

    /// A quotient facet normal to its canonical ambient functional: any
    /// lift agreeing on the basis rays, reduced modulo the equality rows.
    fn facet_to_ambient(&self, n: usize, kept: &[SubsetMask], fq: &[Rat]) -> Result<LinForm> {
        let row = match &self.basis {
            None => fq.to_vec(),
            Some(b) => {
                let mut c =
                    linalg::solve(&b.rays, fq).expect("lift system is consistent by construction");
                for (eq, &p) in b.eq_rows.iter().zip(&b.eq_pivots) {
                    if c[p].is_zero() {
                        continue;
                    }
                    let factor = c[p].clone();
                    for (v, e) in c.iter_mut().zip(eq) {
                        let delta = &factor * e;
                        *v -= delta;
                    }
                }
                c
            }
        };
        dense_to_form(n, kept, &row, Relation::Ge).map(|f| f.canonicalize())
    }
}

fn dense_to_form(
    n: usize,
    kept: &[SubsetMask],
    row: &[Rat],
    relation: Relation,
) -> Result<LinForm> {
    LinForm::new(
        n,
        relation,
        kept.iter().zip(row).map(|(m, c)| (*m, c.clone())),
    )
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}
