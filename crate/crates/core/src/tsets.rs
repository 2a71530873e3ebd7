//! T-sets and discrepancy.
//!
//! For a polyhedral normed space the maximal norm-additive subsets (T-sets)
//! are exactly the cones over unit-ball facets, so every question about them
//! reduces to face-lattice combinatorics on facet incidence sets:
//!
//! * two T-set cones intersect only at zero iff their facets share no
//!   vertex (facets meet in a face, and a nonempty face has a vertex);
//! * two T-sets are *discrepant* if they intersect trivially or some third
//!   T-set intersects both trivially;
//! * property (D): every pair of T-sets is discrepant; property (D_w): some
//!   single T-set is discrepant to every other.
//!
//! The pair and candidate scans run through [`crate::exec`], so the
//! `parallel` feature changes only the schedule. Witnesses are always the
//! lowest qualifying facet id, which keeps all verdicts deterministic.

use crate::exec;
use crate::linalg::{Covector, Matrix, Vector};
use crate::polyhedral::NormedSpace;
use crate::scalar::{int, Scalar};
use num_traits::One;
use serde::{Deserialize, Serialize};

/// A T-set: the norm-additive cone over one facet of the unit ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TSet {
    pub facet_id: usize,
    /// Ascending ids of the ball vertices spanning the facet.
    pub incident: Vec<usize>,
    /// The unique normalized supporting functional: `support·u = ‖u‖` on
    /// every cone member, and its dual norm is 1.
    pub support: Covector,
}

/// The set Γ of norm-one functionals attaining the norm on a whole T-set.
/// For a facet cone this is a single functional, the facet normal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaRecord {
    pub tset_id: usize,
    pub functionals: Vec<Covector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "witness")]
pub enum DiscrepancyVerdict {
    /// The two facets share no vertex: the cones meet only at zero.
    TriviallyIntersecting,
    /// A third T-set (lowest qualifying id) meets both only at zero.
    ViaWitness(usize),
    NotDiscrepant,
}

/// Why one candidate witness fails: the vertices it shares with each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockedCandidate {
    pub tset_id: usize,
    pub shared_with_first: Vec<usize>,
    pub shared_with_second: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub pair: (usize, usize),
    pub verdict: DiscrepancyVerdict,
    /// For `NotDiscrepant`: every other T-set with the shared vertex ids
    /// that disqualify it. Empty for the other verdicts.
    pub blocking_evidence: Vec<BlockedCandidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyD {
    Holds,
    /// First (lexicographically) non-discrepant pair, with full evidence.
    Fails { report: DiscrepancyReport },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyDw {
    /// Lowest facet id discrepant to all others.
    Holds { witness: usize },
    /// For every candidate, the first pair report that disqualifies it.
    Fails { blockers: Vec<DiscrepancyReport> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TSetError {
    #[error("the two T-set ids must differ, both are {0}")]
    SameTSet(usize),
    #[error("no T-set with id {id}; the space has {count}")]
    UnknownTSet { id: usize, count: usize },
    #[error("vector {0:?} is not on the unit sphere")]
    NotOnSphere(Vector),
}

/// All T-sets of the space, one per facet, in facet-id order.
pub fn tsets(space: &NormedSpace) -> Vec<TSet> {
    space
        .ball
        .facets
        .iter()
        .enumerate()
        .map(|(id, f)| TSet {
            facet_id: id,
            incident: f.incident.clone(),
            support: f.normal.clone(),
        })
        .collect()
}

pub fn tset(space: &NormedSpace, id: usize) -> Result<TSet, TSetError> {
    let count = space.facet_count();
    if id >= count {
        return Err(TSetError::UnknownTSet { id, count });
    }
    let f = space.facet(id);
    Ok(TSet {
        facet_id: id,
        incident: f.incident.clone(),
        support: f.normal.clone(),
    })
}

/// Cone membership: `v` is in the T-set iff `support·v = ‖v‖` (zero
/// included, both sides vanish).
pub fn tset_contains(space: &NormedSpace, tset: &TSet, v: &Vector) -> bool {
    tset.support.apply(v) == space.norm(v)
}

/// Derive Γ for a T-set by solving `w·v = 1` on its incident vertices.
/// The system has full column rank, so the solution is unique: the facet
/// normal. Returned as a (singleton) list because Γ is a set by definition.
pub fn gamma(space: &NormedSpace, tset: &TSet) -> GammaRecord {
    let rows: Vec<Vec<Scalar>> = tset
        .incident
        .iter()
        .map(|&i| space.vertex(i).0.clone())
        .collect();
    let ones = Vector(vec![Scalar::one(); rows.len()]);
    let w = Matrix::from_rows(&rows)
        .solve(&ones)
        .expect("incident vertices lie on the facet hyperplane");
    let w = Covector(w.0);
    assert_eq!(
        w, tset.support,
        "supporting functional of a facet must be unique"
    );
    assert!(space.dual_norm(&w).is_one());
    GammaRecord {
        tset_id: tset.facet_id,
        functionals: vec![w],
    }
}

fn check_pair(space: &NormedSpace, r: usize, s: usize) -> Result<(), TSetError> {
    let count = space.facet_count();
    for id in [r, s] {
        if id >= count {
            return Err(TSetError::UnknownTSet { id, count });
        }
    }
    if r == s {
        return Err(TSetError::SameTSet(r));
    }
    Ok(())
}

fn shared_ids(a: &[usize], b: &[usize]) -> Vec<usize> {
    // Both inputs ascending.
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// True iff the two facet cones intersect only at zero, decided by vertex
/// disjointness: polytope faces meet in a common face, and every nonempty
/// face of the ball contains a vertex.
pub fn trivially_intersecting(
    space: &NormedSpace,
    r: usize,
    s: usize,
) -> Result<bool, TSetError> {
    check_pair(space, r, s)?;
    Ok(shared_ids(&space.facet(r).incident, &space.facet(s).incident).is_empty())
}

fn scan_discrepancy(
    space: &NormedSpace,
    r: usize,
    s: usize,
    collect_evidence: bool,
) -> (DiscrepancyVerdict, Vec<BlockedCandidate>) {
    let ri = &space.facet(r).incident;
    let si = &space.facet(s).incident;
    if shared_ids(ri, si).is_empty() {
        return (DiscrepancyVerdict::TriviallyIntersecting, Vec::new());
    }
    let mut blocked = Vec::new();
    for l in 0..space.facet_count() {
        if l == r || l == s {
            continue;
        }
        let li = &space.facet(l).incident;
        let with_r = shared_ids(li, ri);
        let with_s = shared_ids(li, si);
        if with_r.is_empty() && with_s.is_empty() {
            return (DiscrepancyVerdict::ViaWitness(l), Vec::new());
        }
        if collect_evidence {
            blocked.push(BlockedCandidate {
                tset_id: l,
                shared_with_first: with_r,
                shared_with_second: with_s,
            });
        }
    }
    (DiscrepancyVerdict::NotDiscrepant, blocked)
}

/// Full discrepancy decision for the pair `(r, s)`.
pub fn discrepant(space: &NormedSpace, r: usize, s: usize) -> Result<DiscrepancyReport, TSetError> {
    check_pair(space, r, s)?;
    let (verdict, blocking_evidence) = scan_discrepancy(space, r, s, true);
    Ok(DiscrepancyReport {
        pair: (r, s),
        verdict,
        blocking_evidence,
    })
}

fn pair_not_discrepant(space: &NormedSpace, r: usize, s: usize) -> bool {
    matches!(
        scan_discrepancy(space, r, s, false).0,
        DiscrepancyVerdict::NotDiscrepant
    )
}

/// All unordered pairs `(i, j)`, `i < j`, in lexicographic order.
fn facet_pairs(space: &NormedSpace) -> Vec<(usize, usize)> {
    let n = space.facet_count();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

fn property_d_fail(space: &NormedSpace, pair: Option<&(usize, usize)>) -> PropertyD {
    match pair {
        Some(&(r, s)) => PropertyD::Fails {
            report: discrepant(space, r, s).expect("pair ids are valid"),
        },
        None => PropertyD::Holds,
    }
}

pub fn has_property_d_seq(space: &NormedSpace) -> PropertyD {
    let pairs = facet_pairs(space);
    let hit = exec::seq_first(&pairs, |&(r, s)| pair_not_discrepant(space, r, s));
    property_d_fail(space, hit.map(|(_, p)| p))
}

#[cfg(feature = "parallel")]
pub fn has_property_d_par(space: &NormedSpace) -> PropertyD {
    let pairs = facet_pairs(space);
    let hit = exec::par_first(&pairs, |&(r, s)| pair_not_discrepant(space, r, s));
    property_d_fail(space, hit.map(|(_, p)| p))
}

/// Property (D): every pair of T-sets is discrepant. On failure returns the
/// lexicographically first bad pair with its blocking evidence.
pub fn has_property_d(space: &NormedSpace) -> PropertyD {
    #[cfg(feature = "parallel")]
    {
        has_property_d_par(space)
    }
    #[cfg(not(feature = "parallel"))]
    {
        has_property_d_seq(space)
    }
}

fn dw_qualifies(space: &NormedSpace, r: usize) -> bool {
    (0..space.facet_count()).all(|s| s == r || !pair_not_discrepant(space, r, s))
}

fn property_dw_from(space: &NormedSpace, witness: Option<usize>) -> PropertyDw {
    match witness {
        Some(witness) => PropertyDw::Holds { witness },
        None => {
            // One disqualifying report per candidate, for the record.
            let blockers = (0..space.facet_count())
                .map(|r| {
                    let s = (0..space.facet_count())
                        .find(|&s| s != r && pair_not_discrepant(space, r, s))
                        .expect("candidate failed, so a blocking partner exists");
                    discrepant(space, r, s).expect("pair ids are valid")
                })
                .collect();
            PropertyDw::Fails { blockers }
        }
    }
}

pub fn has_property_dw_seq(space: &NormedSpace) -> PropertyDw {
    let witness = exec::seq_first_index(space.facet_count(), |r| dw_qualifies(space, r));
    property_dw_from(space, witness)
}

#[cfg(feature = "parallel")]
pub fn has_property_dw_par(space: &NormedSpace) -> PropertyDw {
    let witness = exec::par_first_index(space.facet_count(), |r| dw_qualifies(space, r));
    property_dw_from(space, witness)
}

/// Property (D_w): some T-set is discrepant to every other. The witness is
/// the lowest qualifying facet id.
pub fn has_property_dw(space: &NormedSpace) -> PropertyDw {
    #[cfg(feature = "parallel")]
    {
        has_property_dw_par(space)
    }
    #[cfg(not(feature = "parallel"))]
    {
        has_property_dw_seq(space)
    }
}

/// Reports for every unordered pair, lexicographic, with full evidence.
pub fn discrepancy_matrix(space: &NormedSpace) -> Vec<DiscrepancyReport> {
    let pairs = facet_pairs(space);
    exec::map_collect(pairs.len(), |k| {
        let (r, s) = pairs[k];
        discrepant(space, r, s).expect("pair ids are valid")
    })
}

/// Star-like set membership: `e' ∈ St(e)` iff `‖e + e'‖ = 2` for sphere
/// points, equivalently the two lie on a common facet.
pub fn st_contains(space: &NormedSpace, e: &Vector, ep: &Vector) -> Result<bool, TSetError> {
    for v in [e, ep] {
        if !space.sphere_membership(v) {
            return Err(TSetError::NotOnSphere(v.clone()));
        }
    }
    Ok(space.norm(&(e + ep)) == int(2))
}

/// The facet-sharing side of the St characterization; used to cross-check
/// [`st_contains`] (union-of-maximal-convex-sets description of St).
pub fn on_common_facet(space: &NormedSpace, e: &Vector, ep: &Vector) -> bool {
    let one = Scalar::one();
    space
        .ball
        .facets
        .iter()
        .any(|f| f.normal.apply(e) == one && f.normal.apply(ep) == one)
}

/// Weak star set membership: `e' ∈ St_w(u)` iff `‖u + e'‖ > ‖u‖`, with `e'`
/// on the sphere and `u` arbitrary.
pub fn stw_contains(space: &NormedSpace, u: &Vector, ep: &Vector) -> Result<bool, TSetError> {
    if !space.sphere_membership(ep) {
        return Err(TSetError::NotOnSphere(ep.clone()));
    }
    Ok(space.norm(&(u + ep)) > space.norm(u))
}
