//! Points of `F_q^n`, hyperplane directions, affine hyperplanes and linear
//! subspaces, together with the subspace-counting formulas.
//!
//! A point's index is the base-`q` number whose digit `i` is coordinate `i`
//! (coordinate 0 is the lowest digit). Hyperplane directions are stored dually
//! by their normal vector, scaled so the first nonzero coordinate is 1; the
//! direction list is ordered by the point index of that normal.

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::field::FieldSpec;
use crate::limits::{check_cap, enumeration_cap, space_size};
use crate::pointset::PointSet;
use crate::{Elem, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Point {
    pub coords: Vec<Elem>,
    pub index: usize,
}

impl Point {
    pub fn from_index(q: u32, n: usize, index: usize) -> Result<Point> {
        let size = space_size(q, n)?;
        if index >= size {
            return Err(Error::PointOutOfRange { index: index as u64, size: size as u64 });
        }
        Ok(Point { coords: point_coords(q, n, index), index })
    }

    pub fn from_coords(q: u32, coords: &[Elem]) -> Result<Point> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= q) {
            return Err(Error::ElementOutOfRange { elem: bad as u64, q });
        }
        Ok(Point { coords: coords.to_vec(), index: point_index(q, coords) })
    }
}

#[inline]
pub fn point_index(q: u32, coords: &[Elem]) -> usize {
    coords.iter().rev().fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

pub fn point_coords(q: u32, n: usize, mut index: usize) -> Vec<Elem> {
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n {
        coords.push((index % q as usize) as Elem);
        index /= q as usize;
    }
    coords
}

/// Visits every point of `F_q^n` in index order.
pub fn for_each_point(q: u32, n: usize, mut f: impl FnMut(usize, &[Elem])) {
    let mut coords = vec![0; n];
    let total = (q as usize).pow(n as u32);
    for index in 0..total {
        f(index, &coords);
        for c in coords.iter_mut() {
            *c += 1;
            if *c < q {
                break;
            }
            *c = 0;
        }
    }
}

/// The standard bilinear form `sum a_i b_i`.
#[inline]
pub fn dot(field: &FieldSpec, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// Scales `v` so its first nonzero coordinate is 1. `None` for the zero vector.
pub fn canonicalize(field: &FieldSpec, v: &[Elem]) -> Option<Vec<Elem>> {
    let lead = *v.iter().find(|&&c| c != 0)?;
    let scale = field.inv(lead).ok()?;
    Some(v.iter().map(|&c| field.mul(c, scale)).collect())
}

/// A hyperplane direction `w = { x : normal . x = 0 }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Direction {
    normal: Vec<Elem>,
    index: usize,
}

impl Direction {
    pub fn from_normal(field: &FieldSpec, v: &[Elem]) -> Result<Direction> {
        if let Some(&bad) = v.iter().find(|&&c| c >= field.q()) {
            return Err(Error::ElementOutOfRange { elem: bad as u64, q: field.q() });
        }
        let normal = canonicalize(field, v).ok_or(Error::ZeroNormal)?;
        let index = point_index(field.q(), &normal);
        Ok(Direction { normal, index })
    }

    pub fn normal(&self) -> &[Elem] {
        &self.normal
    }

    /// Point index of the canonical normal.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    #[inline]
    pub fn level_of(&self, field: &FieldSpec, x: &[Elem]) -> Elem {
        dot(field, &self.normal, x)
    }

    /// The linear subspace `w` itself, as an RREF basis of dimension `n - 1`.
    pub fn subspace(&self, field: &FieldSpec) -> SubspaceBasis {
        SubspaceBasis::span_of(field, self.dim(), &[self.normal.clone()]).orthogonal_complement(field)
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.normal.serialize(s)
    }
}

/// `{ x : normal . x = level }`, the translate `v + w` of the direction `w`
/// for any `v` with `normal . v = level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineHyperplane {
    pub direction: Direction,
    pub level: Elem,
}

impl AffineHyperplane {
    pub fn new(field: &FieldSpec, normal: &[Elem], level: Elem) -> Result<AffineHyperplane> {
        let level = field.check(level as u64)?;
        let direction = Direction::from_normal(field, normal)?;
        // Rescaling the normal rescales the level by the same factor.
        let lead = *normal.iter().find(|&&c| c != 0).expect("nonzero normal");
        let level = field.mul(level, field.inv(lead)?);
        Ok(AffineHyperplane { direction, level })
    }

    /// The translate `offset + w`.
    pub fn through(field: &FieldSpec, direction: &Direction, offset: &[Elem]) -> AffineHyperplane {
        AffineHyperplane { direction: direction.clone(), level: direction.level_of(field, offset) }
    }

    #[inline]
    pub fn contains(&self, field: &FieldSpec, x: &[Elem]) -> bool {
        self.direction.level_of(field, x) == self.level
    }
}

impl Serialize for AffineHyperplane {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AffineHyperplane", 2)?;
        st.serialize_field("normal", self.direction.normal())?;
        st.serialize_field("level", &self.level)?;
        st.end()
    }
}

/// A linear subspace given by its reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SubspaceBasis {
    n: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    /// Span of arbitrary vectors of length `n`.
    pub fn span_of(field: &FieldSpec, n: usize, vectors: &[Vec<Elem>]) -> SubspaceBasis {
        let (rows, pivots) = rref(field, vectors.to_vec());
        SubspaceBasis { n, rows, pivots }
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// `{ x : r . x = 0 for every basis row r }`.
    pub fn orthogonal_complement(&self, field: &FieldSpec) -> SubspaceBasis {
        let free: Vec<usize> = (0..self.n).filter(|c| !self.pivots.contains(c)).collect();
        let vectors: Vec<Vec<Elem>> = free
            .iter()
            .map(|&f| {
                let mut x = vec![0; self.n];
                x[f] = 1;
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    x[p] = field.neg(row[f]);
                }
                x
            })
            .collect();
        SubspaceBasis::span_of(field, self.n, &vectors)
    }

    /// Canonical representative of the coset `x + W`: the unique element of
    /// the coset whose pivot coordinates are zero.
    pub fn coset_representative(&self, field: &FieldSpec, x: &[Elem]) -> Vec<Elem> {
        let mut v = x.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (vi, &ri) in v.iter_mut().zip(row) {
                    *vi = field.sub(*vi, field.mul(c, ri));
                }
            }
        }
        v
    }

    pub fn contains(&self, field: &FieldSpec, x: &[Elem]) -> bool {
        self.coset_representative(field, x).iter().all(|&c| c == 0)
    }
}

/// Gauss–Jordan elimination; returns the nonzero RREF rows and pivot columns.
pub fn rref(field: &FieldSpec, mut rows: Vec<Vec<Elem>>) -> (Vec<Vec<Elem>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let scale = field.inv(rows[r][col]).expect("pivot is nonzero");
        for c in rows[r].iter_mut() {
            *c = field.mul(*c, scale);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let factor = rows[i][col];
                for c in 0..ncols {
                    let t = field.mul(factor, rows[r][c]);
                    rows[i][c] = field.sub(rows[i][c], t);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(field: &FieldSpec, rows: Vec<Vec<Elem>>) -> usize {
    rref(field, rows).1.len()
}

/// All hyperplane directions of `F_q^n`, ascending by normal index.
pub fn enumerate_directions(field: &FieldSpec, n: usize) -> Result<Vec<Direction>> {
    if n < 1 {
        return Err(Error::Dimension { n, min: 1 });
    }
    let q = field.q();
    let size = space_size(q, n)?;
    let expected = (size - 1) / (q as usize - 1);
    check_cap("direction count", expected as u128, enumeration_cap())?;
    let mut out = Vec::with_capacity(expected);
    for_each_point(q, n, |index, coords| {
        if coords.iter().find(|&&c| c != 0) == Some(&1) {
            out.push(Direction { normal: coords.to_vec(), index });
        }
    });
    debug_assert_eq!(out.len(), expected);
    Ok(out)
}

fn check_q(q: u64) -> Result<()> {
    if q < 2 {
        Err(Error::FieldOrder(q))
    } else {
        Ok(())
    }
}

/// `(q^n - 1) / (q - 1)`, the number of hyperplane directions.
pub fn count_directions_formula(q: u64, n: usize) -> Result<BigUint> {
    check_q(q)?;
    if n < 1 {
        return Err(Error::Dimension { n, min: 1 });
    }
    let q = BigUint::from(q);
    let num = Pow::pow(&q, n) - 1u32;
    Ok(num / (q - 1u32))
}

fn falling_product(q: u64, top: usize, count: usize) -> BigUint {
    let q = BigUint::from(q);
    let qt = Pow::pow(&q, top);
    (0..count).fold(BigUint::one(), |acc, h| acc * (&qt - Pow::pow(&q, h)))
}

/// Ordered `(n-1)`-tuples of vectors of `F_q^n` spanning an `(n-1)`-dimensional
/// subspace: `prod_{h=0}^{n-2} (q^n - q^h)`.
pub fn count_spanning_tuples(q: u64, n: usize) -> Result<BigUint> {
    check_q(q)?;
    if n < 2 {
        return Err(Error::Dimension { n, min: 2 });
    }
    Ok(falling_product(q, n, n - 1))
}

/// Ordered bases of one fixed hyperplane direction:
/// `prod_{h=0}^{n-2} (q^{n-1} - q^h)`.
pub fn count_fiber(q: u64, n: usize) -> Result<BigUint> {
    check_q(q)?;
    if n < 2 {
        return Err(Error::Dimension { n, min: 2 });
    }
    Ok(falling_product(q, n - 1, n - 1))
}

/// Gaussian binomial `[n choose k]_q`.
pub fn count_subspaces(q: u64, n: usize, k: usize) -> Result<BigUint> {
    check_q(q)?;
    if k > n {
        return Err(Error::PlaneDimension { k, n });
    }
    Ok(falling_product(q, n, k) / falling_product(q, k, k))
}

/// Every `k`-dimensional subspace of `F_q^n` exactly once, as its RREF basis.
/// Ordered by pivot set (lexicographic), then by the free entries.
pub fn enumerate_subspaces(field: &FieldSpec, n: usize, k: usize) -> Result<Vec<SubspaceBasis>> {
    let total = count_subspaces(field.q() as u64, n, k)?;
    let cap = enumeration_cap();
    if total > BigUint::from(cap) {
        return Err(Error::TooLarge { what: "subspace count", value: u128::MAX, cap });
    }
    let q = field.q();
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        // Free slots: row i, column c > pivots[i], c not a pivot column.
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| ((p + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
            .collect();
        let mut values = vec![0 as Elem; slots.len()];
        loop {
            let mut rows = vec![vec![0 as Elem; n]; k];
            for (i, &p) in pivots.iter().enumerate() {
                rows[i][p] = 1;
            }
            for (&(i, c), &v) in slots.iter().zip(&values) {
                rows[i][c] = v;
            }
            out.push(SubspaceBasis { n, rows, pivots: pivots.clone() });
            let mut carry = true;
            for v in values.iter_mut() {
                *v += 1;
                if *v < q {
                    carry = false;
                    break;
                }
                *v = 0;
            }
            if carry {
                break;
            }
        }
    }
    Ok(out)
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Visits the `q^{n-1}` point indices of `h` by solving for the leading
/// coordinate of the normal, without scanning the whole space.
pub fn for_each_hyperplane_index(field: &FieldSpec, h: &AffineHyperplane, mut f: impl FnMut(usize)) {
    let normal = h.direction.normal();
    let n = normal.len();
    let q = field.q();
    let lead = normal.iter().position(|&c| c == 1).expect("canonical normal");
    let mut weights = vec![0usize; n];
    let mut w = 1usize;
    for slot in weights.iter_mut() {
        *slot = w;
        w *= q as usize;
    }
    // Odometer over every coordinate except `lead`.
    let mut coords = vec![0 as Elem; n];
    loop {
        let partial = coords
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != lead)
            .fold(0, |acc, (i, &x)| field.add(acc, field.mul(normal[i], x)));
        coords[lead] = field.sub(h.level, partial);
        f(coords.iter().zip(&weights).map(|(&c, &w)| c as usize * w).sum());
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if i != lead {
                coords[i] += 1;
                if coords[i] < q {
                    break;
                }
                coords[i] = 0;
            }
            i += 1;
        }
    }
}

pub fn hyperplane_points(field: &FieldSpec, n: usize, h: &AffineHyperplane) -> Result<PointSet> {
    if h.direction.dim() != n {
        return Err(Error::Length { got: h.direction.dim(), expected: n });
    }
    let mut set = PointSet::empty(field.q(), n)?;
    for_each_point(field.q(), n, |index, coords| {
        if h.contains(field, coords) {
            set.insert(index);
        }
    });
    Ok(set)
}

pub fn intersect_hyperplanes(
    field: &FieldSpec,
    n: usize,
    h1: &AffineHyperplane,
    h2: &AffineHyperplane,
) -> Result<PointSet> {
    let a = hyperplane_points(field, n, h1)?;
    let b = hyperplane_points(field, n, h2)?;
    Ok(a.intersection(&b))
}
