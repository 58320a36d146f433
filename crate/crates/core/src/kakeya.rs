//! The Kakeya verifier, unions of one hyperplane per direction, and exact
//! incidence statistics.
//!
//! A set `E` is Kakeya with respect to `k`-planes when, for every
//! `k`-dimensional linear subspace `w`, some translate of `w` lies inside `E`.
//! The primary case is `k = n - 1`, where a choice of translate for every
//! direction is an [`OffsetAssignment`]: the level `c` of the hyperplane
//! `{ x : normal . x = c }`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ExactRational;
use crate::field::FieldSpec;
use crate::geometry::{
    enumerate_directions, enumerate_subspaces, for_each_hyperplane_index, point_coords, point_index,
    AffineHyperplane, Direction, Point, SubspaceBasis,
};
use crate::limits::space_size;
use crate::oracle;
use crate::pointset::PointSet;
use crate::{Elem, Error, Result};

/// One level per hyperplane direction, in direction order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OffsetAssignment {
    levels: Vec<Elem>,
}

impl OffsetAssignment {
    /// Validates the level count against `|S|` and every level against `q`.
    pub fn new(field: &FieldSpec, n: usize, levels: Vec<Elem>) -> Result<OffsetAssignment> {
        let expected = direction_count(field.q(), n)?;
        if levels.len() != expected {
            return Err(Error::IncompleteAssignment { got: levels.len(), expected });
        }
        for &c in &levels {
            field.check(c as u64)?;
        }
        Ok(OffsetAssignment { levels })
    }

    pub(crate) fn from_levels_unchecked(levels: Vec<Elem>) -> OffsetAssignment {
        OffsetAssignment { levels }
    }

    pub fn levels(&self) -> &[Elem] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn hyperplanes<'a>(&'a self, directions: &'a [Direction]) -> impl Iterator<Item = AffineHyperplane> + 'a {
        directions
            .iter()
            .zip(&self.levels)
            .map(|(d, &level)| AffineHyperplane { direction: d.clone(), level })
    }
}

pub(crate) fn direction_count(q: u32, n: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::Dimension { n, min: 1 });
    }
    let size = space_size(q, n)?;
    Ok((size - 1) / (q as usize - 1))
}

fn check_space(field: &FieldSpec, set: &PointSet, n: usize) -> Result<()> {
    if set.q() != field.q() || set.n() != n {
        return Err(Error::Mismatch { q: field.q(), n, got_q: set.q(), got_n: set.n() });
    }
    Ok(())
}

/// `union over w of { x : normal_w . x = level_w }`.
pub fn build_union(field: &FieldSpec, n: usize, assignment: &OffsetAssignment) -> Result<PointSet> {
    let directions = enumerate_directions(field, n)?;
    if assignment.len() != directions.len() {
        return Err(Error::IncompleteAssignment { got: assignment.len(), expected: directions.len() });
    }
    let mut set = PointSet::empty(field.q(), n)?;
    for h in assignment.hyperplanes(&directions) {
        for_each_hyperplane_index(field, &h, |i| {
            set.insert(i);
        });
    }
    Ok(set)
}

/// A translate of a `k`-dimensional direction, named by its canonical coset
/// representative (the coset element whose pivot coordinates vanish).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaneWitness {
    pub direction: SubspaceBasis,
    pub representative: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Hyperplanes(OffsetAssignment),
    Planes(Vec<PlaneWitness>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    Hyperplane { index: usize, direction: Direction },
    Plane(SubspaceBasis),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Kakeya(Witness),
    NotKakeya(Failure),
}

impl Verdict {
    pub fn is_kakeya(&self) -> bool {
        matches!(self, Verdict::Kakeya(_))
    }

    pub fn assignment(&self) -> Option<&OffsetAssignment> {
        match self {
            Verdict::Kakeya(Witness::Hyperplanes(a)) => Some(a),
            _ => None,
        }
    }
}

fn check_plane_dim(n: usize, k: usize) -> Result<()> {
    let ok = k < n && (k >= 1 || n == 1);
    if ok {
        Ok(())
    } else {
        Err(Error::PlaneDimension { k, n })
    }
}

/// Kakeya test with respect to `k`-planes (`None` means hyperplanes).
pub fn is_kakeya(field: &FieldSpec, set: &PointSet, k: Option<usize>) -> Result<Verdict> {
    let n = set.n();
    check_space(field, set, n)?;
    let k = k.unwrap_or(n - 1);
    check_plane_dim(n, k)?;
    if k + 1 == n {
        is_kakeya_hyperplanes(field, set)
    } else {
        is_kakeya_planes(field, set, k)
    }
}

/// Hyperplane case: for every direction, bucket the members of `E` by their
/// level; the direction is covered iff some bucket holds `q^{n-1}` points.
/// The witness level is the smallest covered one.
pub fn is_kakeya_hyperplanes(field: &FieldSpec, set: &PointSet) -> Result<Verdict> {
    let n = set.n();
    check_space(field, set, n)?;
    let q = field.q();
    let directions = enumerate_directions(field, n)?;
    let full = set.universe_size() / q as usize;
    let members: Vec<Elem> = set.iter().flat_map(|i| point_coords(q, n, i)).collect();
    let choices: Vec<Option<Elem>> = directions
        .par_iter()
        .map(|d| {
            let mut buckets = vec![0usize; q as usize];
            for x in members.chunks_exact(n.max(1)) {
                buckets[d.level_of(field, x) as usize] += 1;
            }
            buckets.iter().position(|&b| b == full).map(|c| c as Elem)
        })
        .collect();
    match choices.iter().position(Option::is_none) {
        Some(index) => Ok(Verdict::NotKakeya(Failure::Hyperplane { index, direction: directions[index].clone() })),
        None => {
            let levels = choices.into_iter().map(Option::unwrap).collect();
            Ok(Verdict::Kakeya(Witness::Hyperplanes(OffsetAssignment::from_levels_unchecked(levels))))
        }
    }
}

/// General `k`: for every RREF subspace, bucket members of `E` by coset
/// representative; a coset is inside `E` iff its bucket holds `q^k` points.
pub fn is_kakeya_planes(field: &FieldSpec, set: &PointSet, k: usize) -> Result<Verdict> {
    let n = set.n();
    check_space(field, set, n)?;
    check_plane_dim(n, k)?;
    let q = field.q();
    let subspaces = enumerate_subspaces(field, n, k)?;
    let full = (q as usize).pow(k as u32);
    let members: Vec<Vec<Elem>> = set.iter().map(|i| point_coords(q, n, i)).collect();
    let found: Vec<Option<usize>> = subspaces
        .par_iter()
        .map(|w| {
            let mut buckets: HashMap<usize, usize> = HashMap::new();
            for x in &members {
                *buckets.entry(point_index(q, &w.coset_representative(field, x))).or_default() += 1;
            }
            buckets.into_iter().filter(|&(_, c)| c == full).map(|(rep, _)| rep).min()
        })
        .collect();
    let mut witnesses = Vec::with_capacity(subspaces.len());
    for (w, rep) in subspaces.into_iter().zip(found) {
        match rep {
            Some(rep) => witnesses.push(PlaneWitness { direction: w, representative: Point::from_index(q, n, rep)? }),
            None => return Ok(Verdict::NotKakeya(Failure::Plane(w))),
        }
    }
    Ok(Verdict::Kakeya(Witness::Planes(witnesses)))
}

/// `|w' cap E|` for every chosen hyperplane; diagnostics for partial containment.
pub fn hyperplane_hits(field: &FieldSpec, set: &PointSet, assignment: &OffsetAssignment) -> Result<Vec<u64>> {
    let n = set.n();
    check_space(field, set, n)?;
    let directions = enumerate_directions(field, n)?;
    if assignment.len() != directions.len() {
        return Err(Error::IncompleteAssignment { got: assignment.len(), expected: directions.len() });
    }
    Ok(assignment
        .hyperplanes(&directions)
        .map(|h| {
            let mut hits = 0;
            for_each_hyperplane_index(field, &h, |i| hits += set.contains(i) as u64);
            hits
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceReport {
    pub q: u32,
    pub n: usize,
    /// `|S|`, the number of hyperplane directions.
    pub s_count: u64,
    /// `|I|`, pairs (direction, point of E on its chosen hyperplane).
    pub i_count: u64,
    /// `|W|`, triples (w1, w2, v) with v on both chosen hyperplanes.
    pub w_count: u64,
    /// Triples with `w1 = w2`.
    pub w_same_direction: u64,
    /// Triples with `w1 != w2`.
    pub w_distinct_directions: u64,
    /// `|W|` by direct triple enumeration, computed when `q^n <= 256`.
    pub w_count_brute: Option<u64>,
    /// `|I|^2 / |W|`, reduced.
    pub cs_bound: ExactRational,
    pub set_size: u64,
}

impl IncidenceReport {
    /// `|I|^2 / |W|` written without reduction, e.g. `"784/112"`.
    pub fn cs_bound_unreduced(&self) -> String {
        format!("{}/{}", self.i_count as u128 * self.i_count as u128, self.w_count)
    }
}

/// Largest space for which [`incidence_stats`] also enumerates every triple.
pub const BRUTE_TRIPLE_MAX_POINTS: usize = 256;

/// Exact `|I|`, `|W|` and `|I|^2/|W|` for a Kakeya set and a containment
/// witness. Every named hyperplane must lie inside `E`.
pub fn incidence_stats(field: &FieldSpec, set: &PointSet, witness: &OffsetAssignment) -> Result<IncidenceReport> {
    let n = set.n();
    check_space(field, set, n)?;
    let q = field.q() as u64;
    let directions = enumerate_directions(field, n)?;
    if witness.len() != directions.len() {
        return Err(Error::IncompleteAssignment { got: witness.len(), expected: directions.len() });
    }
    let plane_size = q.pow(n as u32 - 1);
    let hits = hyperplane_hits(field, set, witness)?;
    if let Some((direction, &h)) = hits.iter().enumerate().find(|&(_, &h)| h != plane_size) {
        return Err(Error::WitnessNotContained {
            direction,
            level: witness.levels()[direction],
            hits: h,
            expected: plane_size,
        });
    }

    // m_v = number of chosen hyperplanes through v.
    let mut multiplicity = vec![0u64; set.universe_size()];
    for h in witness.hyperplanes(&directions) {
        for_each_hyperplane_index(field, &h, |i| multiplicity[i] += 1);
    }
    let i_count: u64 = hits.iter().sum();
    let w_same = i_count;
    let w_distinct: u64 = multiplicity.iter().map(|&m| m * m.saturating_sub(1)).sum();
    let w_count = w_same + w_distinct;

    let s = directions.len() as u64;
    if i_count != s * plane_size {
        return Err(Error::Consistency(format!("|I| = {i_count}, expected |S| q^(n-1) = {}", s * plane_size)));
    }
    if n >= 2 {
        let expected = i_count + s * (s - 1) * q.pow(n as u32 - 2);
        if w_count != expected {
            return Err(Error::Consistency(format!("|W| = {w_count}, expected {expected}")));
        }
    }

    let w_count_brute = if set.universe_size() <= BRUTE_TRIPLE_MAX_POINTS {
        let brute = oracle::count_triples_brute(field, set, witness);
        if brute != w_count {
            return Err(Error::Consistency(format!("|W| = {w_count} but triple enumeration gives {brute}")));
        }
        Some(brute)
    } else {
        None
    };

    let cs_bound = ExactRational::new(i_count as u128 * i_count as u128, w_count);
    let set_size = set.len() as u64;
    if ExactRational::from_integer(set_size) < cs_bound {
        return Err(Error::Consistency(format!("|E| = {set_size} is below |I|^2/|W| = {cs_bound}")));
    }
    Ok(IncidenceReport {
        q: field.q(),
        n,
        s_count: s,
        i_count,
        w_count,
        w_same_direction: w_same,
        w_distinct_directions: w_distinct,
        w_count_brute,
        cs_bound,
        set_size,
    })
}

/// Uniform random levels from a seeded ChaCha8 stream.
pub fn random_assignment(field: &FieldSpec, n: usize, seed: u64) -> Result<OffsetAssignment> {
    let count = direction_count(field.q(), n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = (0..count).map(|_| rng.gen_range(0..field.q())).collect();
    Ok(OffsetAssignment::from_levels_unchecked(levels))
}

/// The union construction for a seeded random assignment.
pub fn random_kakeya(field: &FieldSpec, n: usize, seed: u64) -> Result<PointSet> {
    build_union(field, n, &random_assignment(field, n, seed)?)
}
