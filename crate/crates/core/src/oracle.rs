//! Brute-force reference computations.
//!
//! Nothing here uses RREF, canonical normals, the bucket-counting verifier or
//! branch-and-bound: spans are built by enumerating linear combinations, and
//! Kakeya checks scan every nonzero vector as a normal. These routines back
//! the self-test and the acceptance suite.

use std::collections::{BTreeMap, HashSet};

use crate::bounds::{theorem1_bound, ExactRational};
use crate::field::{make_field, FieldSpec};
use crate::geometry::{dot, point_coords, point_index};
use crate::kakeya::OffsetAssignment;
use crate::pointset::PointSet;
use crate::Elem;

fn all_points(q: u32, n: usize) -> Vec<Vec<Elem>> {
    let size = (q as usize).pow(n as u32);
    (0..size).map(|i| point_coords(q, n, i)).collect()
}

/// The set of all linear combinations of `vectors`, as sorted point indices.
pub fn span_by_combinations(field: &FieldSpec, n: usize, vectors: &[Vec<Elem>]) -> Vec<usize> {
    let q = field.q();
    let mut out: Vec<usize> = all_points(q, vectors.len())
        .into_iter()
        .map(|coeffs| {
            let mut v = vec![0; n];
            for (c, vec) in coeffs.iter().zip(vectors) {
                for (vi, &x) in v.iter_mut().zip(vec) {
                    *vi = field.add(*vi, field.mul(*c, x));
                }
            }
            point_index(q, &v)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Number of distinct `(n-1)`-dimensional spans among unordered
/// `(n-1)`-subsets of nonzero vectors.
pub fn count_hyperplane_spans(field: &FieldSpec, n: usize) -> usize {
    assert!(n >= 2);
    let q = field.q();
    let points = all_points(q, n);
    let target = (q as usize).pow(n as u32 - 1);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut chosen = Vec::with_capacity(n - 1);
    fn rec(
        field: &FieldSpec,
        n: usize,
        start: usize,
        points: &[Vec<Elem>],
        chosen: &mut Vec<usize>,
        target: usize,
        seen: &mut HashSet<Vec<usize>>,
    ) {
        if chosen.len() == n - 1 {
            let vectors: Vec<Vec<Elem>> = chosen.iter().map(|&i| points[i].clone()).collect();
            let span = span_by_combinations(field, n, &vectors);
            if span.len() == target {
                seen.insert(span);
            }
            return;
        }
        for i in start..points.len() {
            chosen.push(i);
            rec(field, n, i + 1, points, chosen, target, seen);
            chosen.pop();
        }
    }
    rec(field, n, 1, &points, &mut chosen, target, &mut seen);
    seen.len()
}

/// Ordered `(n-1)`-tuples of vectors spanning an `(n-1)`-dimensional
/// subspace, grouped by span. Returns the tuple count and the fiber sizes.
pub fn spanning_tuple_fibers(field: &FieldSpec, n: usize) -> (u64, Vec<u64>) {
    assert!(n >= 2);
    let q = field.q();
    let size = (q as usize).pow(n as u32);
    let target = size / q as usize;
    let points = all_points(q, n);
    let mut fibers: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut total = 0;
    let tuples = size.pow(n as u32 - 1);
    for t in 0..tuples {
        let vectors: Vec<Vec<Elem>> = point_coords(size as u32, n - 1, t)
            .into_iter()
            .map(|i| points[i as usize].clone())
            .collect();
        let span = span_by_combinations(field, n, &vectors);
        if span.len() == target {
            total += 1;
            *fibers.entry(span).or_default() += 1;
        }
    }
    (total, fibers.into_values().collect())
}

/// `|W|` by enumerating every `(w1, w2, v)`; directions are taken from the
/// nonzero vectors with first nonzero coordinate 1, checked by scanning.
pub fn count_triples_brute(field: &FieldSpec, set: &PointSet, assignment: &OffsetAssignment) -> u64 {
    let (q, n) = (field.q(), set.n());
    let normals: Vec<Vec<Elem>> = all_points(q, n)
        .into_iter()
        .filter(|v| v.iter().find(|&&c| c != 0) == Some(&1))
        .collect();
    assert_eq!(normals.len(), assignment.len());
    let members: Vec<Vec<Elem>> = set.iter().map(|i| point_coords(q, n, i)).collect();
    let levels = assignment.levels();
    let mut count = 0;
    for (a, &la) in normals.iter().zip(levels) {
        for (b, &lb) in normals.iter().zip(levels) {
            count += members
                .iter()
                .filter(|v| dot(field, a, v) == la && dot(field, b, v) == lb)
                .count() as u64;
        }
    }
    count
}

/// `(normal, level) -> membership mask` for every nonzero normal; needs `q^n <= 64`.
fn hyperplane_masks(field: &FieldSpec, n: usize) -> Vec<Vec<u64>> {
    let q = field.q();
    let points = all_points(q, n);
    assert!(points.len() <= 64);
    points[1..]
        .iter()
        .map(|normal| {
            (0..q)
                .map(|c| {
                    points
                        .iter()
                        .enumerate()
                        .filter(|(_, x)| dot(field, normal, x) == c)
                        .fold(0u64, |m, (i, _)| m | 1 << i)
                })
                .collect()
        })
        .collect()
}

/// Kakeya test by scanning every nonzero normal and level.
pub fn is_kakeya_brute(field: &FieldSpec, set: &PointSet) -> bool {
    let (q, n) = (field.q(), set.n());
    let points = all_points(q, n);
    points[1..].iter().all(|normal| {
        (0..q).any(|c| {
            points
                .iter()
                .enumerate()
                .all(|(i, x)| dot(field, normal, x) != c || set.contains(i))
        })
    })
}

/// Minimum Kakeya set size over every subset of `F_q^n` (`q^n <= 20`).
pub fn min_kakeya_powerset(field: &FieldSpec, n: usize) -> usize {
    let size = (field.q() as usize).pow(n as u32);
    assert!(size <= 20, "powerset oracle limited to 2^20 subsets");
    let masks = hyperplane_masks(field, n);
    let mut best = size;
    for subset in 0u64..(1u64 << size) {
        let card = subset.count_ones() as usize;
        if card >= best {
            continue;
        }
        if masks.iter().all(|levels| levels.iter().any(|&m| m & !subset == 0)) {
            best = card;
        }
    }
    best
}

/// Minimum union size over every offset assignment, with no pruning and no
/// symmetry reduction. Needs `q^n <= 64` and `q^|S| <= 2^26`.
pub fn min_kakeya_assignments_brute(field: &FieldSpec, n: usize) -> (usize, Vec<Elem>) {
    let q = field.q();
    let masks: Vec<Vec<u64>> = {
        let points = all_points(q, n);
        let all = hyperplane_masks(field, n);
        points[1..]
            .iter()
            .zip(all)
            .filter(|(v, _)| v.iter().find(|&&c| c != 0) == Some(&1))
            .map(|(_, m)| m)
            .collect()
    };
    let dirs = masks.len();
    assert!((q as f64).powi(dirs as i32) <= (1u64 << 26) as f64, "assignment space too large");
    let mut levels = vec![0 as Elem; dirs];
    let mut best = (usize::MAX, levels.clone());
    loop {
        let union = masks.iter().zip(&levels).fold(0u64, |u, (m, &c)| u | m[c as usize]);
        let size = union.count_ones() as usize;
        if size < best.0 {
            best = (size, levels.clone());
        }
        let mut i = dirs;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            levels[i] += 1;
            if levels[i] < q {
                break;
            }
            levels[i] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SelfTestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> SelfTestCheck {
    SelfTestCheck { name: name.into(), passed, detail: detail.into() }
}

/// Runs the brute-force oracles at fixed small sizes against the main code paths.
pub fn run_selftest() -> Vec<SelfTestCheck> {
    use crate::geometry::{count_directions_formula, count_fiber, count_spanning_tuples, enumerate_directions};
    use crate::kakeya::{build_union, incidence_stats, is_kakeya, random_assignment};
    use crate::search::minimal_kakeya_exact;

    let mut out = Vec::new();
    let field = |p, k| make_field(p, k).expect("small field");

    for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let f = field(p, k);
        let q = f.q();
        let mut ok = true;
        for a in 0..q {
            ok &= f.add(a, f.neg(a)) == 0 && f.mul(a, 1) == a;
            if a != 0 {
                ok &= f.inv(a).map(|i| f.mul(a, i) == 1).unwrap_or(false);
            }
            for b in 0..q {
                ok &= f.mul(a, b) == f.mul_poly(a, b);
                for c in 0..q {
                    ok &= f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                }
            }
        }
        out.push(check(format!("field axioms q={q}"), ok, "exhaustive"));
    }

    for (p, k, n) in [(2, 1, 2), (2, 1, 3), (3, 1, 2), (3, 1, 3), (2, 2, 2)] {
        let f = field(p, k);
        let q = f.q();
        let listed = enumerate_directions(&f, n).map(|d| d.len()).unwrap_or(0);
        let formula = count_directions_formula(q as u64, n).map(|c| c.to_string()).unwrap_or_default();
        let brute = count_hyperplane_spans(&f, n);
        out.push(check(
            format!("direction count q={q} n={n}"),
            listed.to_string() == formula && listed == brute,
            format!("enumerated {listed}, formula {formula}, brute-force spans {brute}"),
        ));
    }

    for (p, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let f = field(p, 1);
        let (tuples, fibers) = spanning_tuple_fibers(&f, n);
        let t = count_spanning_tuples(p as u64, n).unwrap();
        let fib = count_fiber(p as u64, n).unwrap();
        let ok = t == tuples.into()
            && fibers.iter().all(|&s| fib == s.into())
            && count_directions_formula(p as u64, n).unwrap() == fibers.len().into();
        out.push(check(
            format!("spanning tuples q={p} n={n}"),
            ok,
            format!("{tuples} tuples in {} fibers", fibers.len()),
        ));
    }

    for (p, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let f = field(p, 1);
        let mut ok = true;
        for seed in 0..10 {
            let a = random_assignment(&f, n, seed).expect("small instance");
            let e = build_union(&f, n, &a).expect("small instance");
            ok &= is_kakeya(&f, &e, None).map(|v| v.is_kakeya()).unwrap_or(false) && is_kakeya_brute(&f, &e);
            ok &= match incidence_stats(&f, &e, &a) {
                Ok(r) => r.w_count_brute == Some(count_triples_brute(&f, &e, &a)),
                Err(_) => false,
            };
        }
        out.push(check(format!("incidence identities q={p} n={n}"), ok, "10 seeded assignments"));
    }

    for (p, n) in [(2, 2), (2, 3), (3, 2)] {
        let f = field(p, 1);
        let (brute, _) = min_kakeya_assignments_brute(&f, n);
        let powerset = min_kakeya_powerset(&f, n);
        let exact = minimal_kakeya_exact(&f, n, 1_000_000);
        let bound = theorem1_bound(p as u64, n).expect("n >= 2");
        let (ok, detail) = match exact {
            Ok(r) => (
                r.proof_of_optimality
                    && r.min_size == brute
                    && r.min_size == powerset
                    && ExactRational::from_integer(r.min_size as u64) >= bound,
                format!("search {}, assignments {brute}, powerset {powerset}, bound {bound}", r.min_size),
            ),
            Err(e) => (false, e.to_string()),
        };
        out.push(check(format!("minimum Kakeya size q={p} n={n}"), ok, detail));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_of_small_spaces() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(count_hyperplane_spans(&f2, 2), 3);
        assert_eq!(count_hyperplane_spans(&f2, 3), 7);
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(count_hyperplane_spans(&f3, 3), 13);
    }

    #[test]
    fn spanning_tuples_small() {
        let f2 = make_field(2, 1).unwrap();
        let (t, fibers) = spanning_tuple_fibers(&f2, 3);
        assert_eq!(t, 42);
        assert_eq!(fibers, vec![6; 7]);
        let f3 = make_field(3, 1).unwrap();
        let (t, fibers) = spanning_tuple_fibers(&f3, 2);
        assert_eq!(t, 8);
        assert_eq!(fibers, vec![2; 4]);
    }

    #[test]
    fn brute_minima() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(min_kakeya_powerset(&f2, 2), 3);
        assert_eq!(min_kakeya_assignments_brute(&f2, 2).0, 3);
        assert_eq!(min_kakeya_assignments_brute(&f2, 3).0, 7);
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(min_kakeya_assignments_brute(&f3, 2).0, 7);
    }

    #[test]
    fn selftest_passes() {
        for c in run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
