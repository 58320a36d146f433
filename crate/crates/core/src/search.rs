//! Exact minimum size of a hyperplane Kakeya set in `F_q^n`.
//!
//! Any Kakeya set contains one hyperplane per direction, and the union of one
//! hyperplane per direction is itself Kakeya, so the minimum over all
//! [`OffsetAssignment`]s is the global minimum. The search space is therefore
//! `q^|S|` level assignments rather than all subsets.
//!
//! Translations act on assignments by `level_w += normal_w . t`; translating
//! along `e_i` touches the direction `e_i` first in direction order, so every
//! orbit contains an assignment with the levels of the `n` standard-basis
//! directions all zero. With normalization on, those levels are fixed.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{theorem1_bound, ExactRational};
use crate::field::{prime_power, make_field, FieldSpec};
use crate::geometry::{enumerate_directions, for_each_hyperplane_index, AffineHyperplane};
use crate::kakeya::{build_union, is_kakeya, OffsetAssignment};
use crate::limits::space_size;
use crate::{Elem, Error, Result};

/// Hyperplane masks above this many bits are refused.
pub const MAX_MASK_BITS: u128 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub q: u32,
    pub n: usize,
    pub min_size: usize,
    pub witness: OffsetAssignment,
    pub nodes_explored: u64,
    pub proof_of_optimality: bool,
    /// The lower bound the result is checked against (`theorem1_bound`; 1 when n = 1).
    pub lower_bound_used: ExactRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_budget: u64,
    pub workers: usize,
    pub normalize: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_budget: 50_000_000, workers: 1, normalize: true }
    }
}

/// Precomputed hyperplane masks for one `(q, n)`.
struct Instance {
    q: u32,
    n: usize,
    dirs: usize,
    words: usize,
    masks: Vec<u64>,
    basis_dirs: Vec<usize>,
}

impl Instance {
    fn new(field: &FieldSpec, n: usize) -> Result<Instance> {
        let size = space_size(field.q(), n)?;
        let directions = enumerate_directions(field, n)?;
        let q = field.q();
        let bits = directions.len() as u128 * q as u128 * size as u128;
        if bits > MAX_MASK_BITS {
            return Err(Error::SearchSpace(format!(
                "{} directions x {q} levels x {size} points exceeds {MAX_MASK_BITS} mask bits",
                directions.len()
            )));
        }
        let words = size.div_ceil(64);
        let mut masks = vec![0u64; directions.len() * q as usize * words];
        for (d, dir) in directions.iter().enumerate() {
            for c in 0..q {
                let h = AffineHyperplane { direction: dir.clone(), level: c };
                let base = (d * q as usize + c as usize) * words;
                for_each_hyperplane_index(field, &h, |i| masks[base + i / 64] |= 1 << (i % 64));
            }
        }
        let basis_dirs = (0..n)
            .map(|i| {
                let target = (q as usize).pow(i as u32);
                directions.iter().position(|d| d.index() == target).expect("e_i is canonical")
            })
            .collect();
        Ok(Instance { q, n, dirs: directions.len(), words, masks, basis_dirs })
    }

    #[inline]
    fn mask(&self, d: usize, c: Elem) -> &[u64] {
        let base = (d * self.q as usize + c as usize) * self.words;
        &self.masks[base..base + self.words]
    }

    #[inline]
    fn fresh_points(&self, union: &[u64], d: usize, c: Elem) -> usize {
        self.mask(d, c).iter().zip(union).map(|(&m, &u)| (m & !u).count_ones() as usize).sum()
    }

    fn union_of(&self, levels: &[Elem]) -> Vec<u64> {
        let mut union = vec![0u64; self.words];
        for (d, &c) in levels.iter().enumerate() {
            or_into(&mut union, self.mask(d, c));
        }
        union
    }

    fn lower_bound(&self) -> ExactRational {
        if self.n >= 2 {
            theorem1_bound(self.q as u64, self.n).expect("n >= 2")
        } else {
            ExactRational::from_integer(1)
        }
    }
}

fn or_into(dst: &mut [u64], src: &[u64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

struct Shared {
    incumbent: AtomicUsize,
    best: Mutex<Vec<Elem>>,
    nodes: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
}

impl Shared {
    /// Installs `levels` if it strictly improves the incumbent.
    fn offer(&self, size: usize, levels: &[Elem]) {
        let mut best = self.best.lock().expect("incumbent lock");
        if size < self.incumbent.load(Ordering::Acquire) {
            self.incumbent.store(size, Ordering::Release);
            best.clear();
            best.extend_from_slice(levels);
        }
    }

    fn tick(&self) -> bool {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            false
        } else {
            true
        }
    }
}

/// Depth-first branch-and-bound over one subtree.
struct Worker<'a> {
    inst: &'a Instance,
    shared: &'a Shared,
    levels: Vec<Option<Elem>>,
    buffers: Vec<Vec<u64>>,
}

impl<'a> Worker<'a> {
    fn new(inst: &'a Instance, shared: &'a Shared, levels: Vec<Option<Elem>>) -> Self {
        let buffers = vec![vec![0; inst.words]; inst.dirs + 1];
        Worker { inst, shared, levels, buffers }
    }

    /// Returns false once the node budget is gone.
    fn dfs(&mut self, depth: usize, union: &[u64], count: usize) -> bool {
        if !self.shared.tick() {
            return false;
        }
        let inst = self.inst;
        // Fail-first: the unassigned direction whose cheapest level adds the
        // most points. That minimum is also a sound lower bound on what the
        // remaining directions must add.
        let mut pick: Option<(usize, usize)> = None;
        for d in (0..inst.dirs).filter(|&d| self.levels[d].is_none()) {
            let cheapest = (0..inst.q).map(|c| inst.fresh_points(union, d, c)).min().unwrap();
            if pick.is_none_or(|(_, m)| cheapest > m) {
                pick = Some((d, cheapest));
            }
        }
        let Some((d, cheapest)) = pick else {
            self.shared.offer(count, &self.levels.iter().map(|l| l.unwrap()).collect::<Vec<_>>());
            return true;
        };
        if count + cheapest >= self.shared.incumbent.load(Ordering::Acquire) {
            return true;
        }
        let mut order: Vec<(usize, Elem)> = (0..inst.q).map(|c| (inst.fresh_points(union, d, c), c)).collect();
        order.sort_unstable();
        let mut next = std::mem::take(&mut self.buffers[depth]);
        for (fresh, c) in order {
            if count + fresh >= self.shared.incumbent.load(Ordering::Acquire) {
                break;
            }
            next.copy_from_slice(union);
            or_into(&mut next, inst.mask(d, c));
            self.levels[d] = Some(c);
            let alive = self.dfs(depth + 1, &next, count + fresh);
            self.levels[d] = None;
            if !alive {
                self.buffers[depth] = next;
                return false;
            }
        }
        self.buffers[depth] = next;
        true
    }
}

/// Lexicographically smallest assignment (direction order, levels ascending)
/// whose union has at most `target` points.
fn lexicographic_first(inst: &Instance, target: usize, budget: u64) -> Option<Vec<Elem>> {
    struct Lex<'a> {
        inst: &'a Instance,
        target: usize,
        levels: Vec<Elem>,
        nodes: u64,
        budget: u64,
    }
    impl Lex<'_> {
        fn go(&mut self, d: usize, union: &[u64], count: usize) -> Option<bool> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let inst = self.inst;
            if d == inst.dirs {
                return Some(count <= self.target);
            }
            let need = (d..inst.dirs)
                .map(|e| (0..inst.q).map(|c| inst.fresh_points(union, e, c)).min().unwrap())
                .max()
                .unwrap_or(0);
            if count + need > self.target {
                return Some(false);
            }
            for c in 0..inst.q {
                let fresh = inst.fresh_points(union, d, c);
                if count + fresh > self.target {
                    continue;
                }
                let mut next = union.to_vec();
                or_into(&mut next, inst.mask(d, c));
                self.levels[d] = c;
                if self.go(d + 1, &next, count + fresh)? {
                    return Some(true);
                }
            }
            Some(false)
        }
    }
    let mut lex = Lex { inst, target, levels: vec![0; inst.dirs], nodes: 0, budget };
    let root = vec![0u64; inst.words];
    match lex.go(0, &root, 0) {
        Some(true) => Some(lex.levels),
        _ => None,
    }
}

fn greedy_on(inst: &Instance, restarts: usize, seed: u64) -> (usize, Vec<Elem>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..inst.dirs).collect();
    let mut best = (usize::MAX, Vec::new());
    for _ in 0..restarts.max(1) {
        order.shuffle(&mut rng);
        let mut union = vec![0u64; inst.words];
        let mut levels = vec![0 as Elem; inst.dirs];
        for &d in &order {
            let c = (0..inst.q).min_by_key(|&c| (inst.fresh_points(&union, d, c), c)).unwrap();
            levels[d] = c;
            or_into(&mut union, inst.mask(d, c));
        }
        let size = popcount(&union);
        if size < best.0 {
            best = (size, levels);
        }
    }
    best
}

/// Re-derives the witness's union through the public construction path and
/// checks it against the reported size and the lower bound.
fn certify(field: &FieldSpec, result: &SearchResult) -> Result<()> {
    let union = build_union(field, result.n, &result.witness)?;
    if union.len() != result.min_size {
        return Err(Error::Consistency(format!(
            "witness union has {} points, search reported {}",
            union.len(),
            result.min_size
        )));
    }
    if !is_kakeya(field, &union, None)?.is_kakeya() {
        return Err(Error::Consistency("witness union failed the Kakeya verifier".into()));
    }
    if ExactRational::from_integer(result.min_size as u64) < result.lower_bound_used {
        return Err(Error::Consistency(format!(
            "size {} is below the lower bound {} at q={}, n={}",
            result.min_size, result.lower_bound_used, result.q, result.n
        )));
    }
    Ok(())
}

/// Exact minimum with default options (single worker, normalized).
pub fn minimal_kakeya_exact(field: &FieldSpec, n: usize, node_budget: u64) -> Result<SearchResult> {
    minimal_kakeya_exact_with(field, n, &SearchOptions { node_budget, ..SearchOptions::default() })
}

pub fn minimal_kakeya_exact_with(field: &FieldSpec, n: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if opts.node_budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let inst = Instance::new(field, n)?;
    let (greedy_size, greedy_levels) = greedy_on(&inst, 8, 0);
    let shared = Shared {
        incumbent: AtomicUsize::new(greedy_size),
        best: Mutex::new(greedy_levels),
        nodes: AtomicU64::new(0),
        budget: opts.node_budget,
        exhausted: AtomicBool::new(false),
    };

    let mut root: Vec<Option<Elem>> = vec![None; inst.dirs];
    if opts.normalize {
        for &d in &inst.basis_dirs {
            root[d] = Some(0);
        }
    }

    // Split the top of the tree over the first free directions, in direction
    // order, into enough disjoint subtrees to keep the workers busy.
    let workers = opts.workers.max(1);
    let free: Vec<usize> = (0..inst.dirs).filter(|&d| root[d].is_none()).collect();
    let mut split = 0;
    while workers > 1 && split < free.len() && (inst.q as usize).pow(split as u32) < 8 * workers {
        split += 1;
    }
    let prefixes: Vec<Vec<Option<Elem>>> = (0..(inst.q as usize).pow(split as u32))
        .map(|code| {
            let mut levels = root.clone();
            let mut code = code;
            for &d in &free[..split] {
                levels[d] = Some((code % inst.q as usize) as Elem);
                code /= inst.q as usize;
            }
            levels
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::SearchSpace(e.to_string()))?;
    pool.install(|| {
        prefixes.par_iter().for_each(|prefix| {
            if shared.exhausted.load(Ordering::Relaxed) {
                return;
            }
            let mut union = vec![0u64; inst.words];
            for (d, c) in prefix.iter().enumerate() {
                if let Some(c) = c {
                    or_into(&mut union, inst.mask(d, *c));
                }
            }
            let count = popcount(&union);
            let mut worker = Worker::new(&inst, &shared, prefix.clone());
            worker.dfs(0, &union, count);
        })
    });

    let exhausted = shared.exhausted.load(Ordering::Relaxed);
    let nodes = shared.nodes.load(Ordering::Relaxed).min(opts.node_budget);
    let min_size = shared.incumbent.load(Ordering::Acquire);
    let mut witness = shared.best.into_inner().expect("incumbent lock");
    if !exhausted {
        if let Some(lex) = lexicographic_first(&inst, min_size, opts.node_budget) {
            witness = lex;
        }
    }
    debug_assert_eq!(popcount(&inst.union_of(&witness)), min_size);

    let result = SearchResult {
        q: inst.q,
        n,
        min_size,
        witness: OffsetAssignment::new(field, n, witness)?,
        nodes_explored: nodes,
        proof_of_optimality: !exhausted,
        lower_bound_used: inst.lower_bound(),
    };
    certify(field, &result)?;
    Ok(result)
}

/// Best of `restarts` greedy passes, each visiting directions in a seeded
/// random order and choosing the level that adds the fewest new points.
pub fn greedy_upper_bound(field: &FieldSpec, n: usize, restarts: usize, seed: u64) -> Result<SearchResult> {
    let inst = Instance::new(field, n)?;
    let (size, levels) = greedy_on(&inst, restarts, seed);
    let result = SearchResult {
        q: inst.q,
        n,
        min_size: size,
        witness: OffsetAssignment::new(field, n, levels)?,
        nodes_explored: (restarts.max(1) * inst.dirs) as u64,
        proof_of_optimality: false,
        lower_bound_used: inst.lower_bound(),
    };
    certify(field, &result)?;
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Exact,
    UpperBound,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessCell {
    pub q: u64,
    pub n: usize,
    pub bound: Option<ExactRational>,
    pub ceiling: Option<String>,
    pub best_size: Option<usize>,
    /// `best_size - ceil(bound)`.
    pub gap: Option<i64>,
    pub optimal: bool,
    pub status: CellStatus,
    pub note: Option<String>,
}

/// Lower bound against the exact minimum (or best upper bound) per cell.
pub fn tightness_report(
    grid: &[(u64, usize)],
    opts: &SearchOptions,
    heuristic_only: bool,
) -> Vec<TightnessCell> {
    grid.iter()
        .map(|&(q, n)| {
            let mut cell = TightnessCell {
                q,
                n,
                bound: None,
                ceiling: None,
                best_size: None,
                gap: None,
                optimal: false,
                status: CellStatus::Infeasible,
                note: None,
            };
            let field = match prime_power(q).ok_or(Error::NotPrimePower(q)).and_then(|(p, k)| make_field(p, k)) {
                Ok(f) => f,
                Err(e) => {
                    cell.note = Some(e.to_string());
                    return cell;
                }
            };
            if let Ok(b) = theorem1_bound(q, n) {
                cell.ceiling = Some(b.ceil().to_string());
                cell.bound = Some(b);
            }
            let run = if heuristic_only {
                greedy_upper_bound(&field, n, 64, 0)
            } else {
                minimal_kakeya_exact_with(&field, n, opts)
            };
            match run {
                Ok(r) => {
                    cell.best_size = Some(r.min_size);
                    cell.optimal = r.proof_of_optimality;
                    cell.status = if r.proof_of_optimality { CellStatus::Exact } else { CellStatus::UpperBound };
                    if let Some(b) = &cell.bound {
                        let ceil: i64 = b.ceil().try_into().unwrap_or(i64::MAX);
                        cell.gap = Some(r.min_size as i64 - ceil);
                    }
                }
                Err(e) => cell.note = Some(e.to_string()),
            }
            cell
        })
        .collect()
}
