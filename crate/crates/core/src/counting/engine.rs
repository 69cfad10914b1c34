//! The exhaustive word-enumeration engine.
//!
//! Words are walked as elementary-step chains over a compiled Rauzy class:
//! a depth-first search recurses per letter (run of one operation) with an
//! inner loop over the run length, so the recursion depth stays proportional
//! to the letter count. Every chain prefix within the norm bound is one word;
//! pruning at `||A|| > bound` is sound because right-multiplication by an
//! elementary matrix never decreases the max column sum (each elementary
//! matrix dominates a permutation matrix entrywise).
//!
//! Closed words (cyclically chained, primitive matrix) are the admissible
//! words; the engine counts them, and counts orbit representatives on the
//! fly by maintaining the longest-Lyndon-prefix length of the current path
//! (Duval's invariant): a closed primitive-matrix word is the canonical
//! rotation of its cyclic class exactly when that length equals the word
//! length. Subtrees that stop being prefixes of canonical words are flagged
//! dead for orbit counting but still enumerated for word counts.
//!
//! The product matrix is mutated in place, one column operation per
//! elementary step, and unwound by the exact inverse operation on the way
//! back up; the only per-step memory is `(k, previous vertex)`. Entries
//! never overflow: every retained column sum is at most the bound, the
//! bound is capped below `2^62`, and a step adds two retained sums.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::perm::{Op, RauzyClass};

/// Hard cap on the symbol count the monomorphized engine supports.
pub const MAX_M: usize = 8;

/// Largest accepted log-norm bound; `exp(42)` still leaves headroom below
/// `2^62` so column-sum additions cannot overflow `u64`.
pub const MAX_T_BOUND: f64 = 42.0;

const BUDGET_CHUNK: u64 = 65_536;

/// Integer norm bound for `log ||A(w)|| <= t`.
pub fn norm_bound_from_t(t: f64) -> Result<u64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("T must be positive, got {t}")));
    }
    if t > MAX_T_BOUND {
        return Err(Error::BoundTooLarge(format!(
            "T = {t} exceeds the 64-bit-safe maximum {MAX_T_BOUND}"
        )));
    }
    Ok((t.exp() * (1.0 + 1e-12)).floor() as u64)
}

/// Per-class transition tables, vertex ids in canonical member order.
#[derive(Debug, Clone)]
pub(crate) struct Tables {
    pub m: usize,
    pub k: Vec<u8>,
    pub a_to: Vec<u16>,
    pub b_to: Vec<u16>,
}

impl Tables {
    pub fn new(class: &RauzyClass) -> Tables {
        let n = class.len();
        let mut k = Vec::with_capacity(n);
        let mut a_to = Vec::with_capacity(n);
        let mut b_to = Vec::with_capacity(n);
        for v in 0..n {
            k.push(class.member(v).last_preimage0() as u8);
            a_to.push(class.successor(v, Op::A) as u16);
            b_to.push(class.successor(v, Op::B) as u16);
        }
        Tables { m: class.m(), k, a_to, b_to }
    }
}

/// A letter in the engine's compact form; `vrank` is the canonical index of
/// the base permutation, which is also its rank in the letter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct PathLetter {
    pub op: u8, // 0 = a, 1 = b
    pub n: u64,
    pub vrank: u16,
}

impl PathLetter {
    #[inline]
    fn cmp_key(&self) -> (u8, u64, u16) {
        (self.op, self.n, self.vrank)
    }
}

pub(crate) struct Node<const M: usize> {
    /// Column-major: `cols[j][i]` is entry `(i, j)`.
    pub cols: [[u64; M]; M],
    pub sums: [u64; M],
    pub vertex: u16,
}

impl<const M: usize> Node<M> {
    pub fn identity(vertex: u16) -> Node<M> {
        let mut cols = [[0u64; M]; M];
        for (j, col) in cols.iter_mut().enumerate() {
            col[j] = 1;
        }
        Node { cols, sums: [1u64; M], vertex }
    }

    #[inline(always)]
    pub fn norm(&self) -> u64 {
        let mut best = 0;
        for &s in &self.sums {
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Applies one elementary step in place; returns the undo record, or
    /// `None` (state unchanged) if the norm bound would be exceeded.
    #[inline(always)]
    fn step(&mut self, tables: &Tables, op: u8, bound: u64) -> Option<(u8, u16)> {
        let v = self.vertex as usize;
        let k = tables.k[v] as usize;
        let merged_sum = self.sums[k] + self.sums[M - 1];
        if op == 1 {
            // b: column k absorbs column m
            if merged_sum > bound {
                return None;
            }
            for i in 0..M {
                self.cols[k][i] += self.cols[M - 1][i];
            }
            self.sums[k] = merged_sum;
            let prev = self.vertex;
            self.vertex = tables.b_to[v];
            Some((k as u8, prev))
        } else {
            // a: merged column replaces column m and cycles into slot k+1
            if merged_sum > bound {
                return None;
            }
            let mut merged = [0u64; M];
            for i in 0..M {
                merged[i] = self.cols[k][i] + self.cols[M - 1][i];
            }
            let mut j = M - 1;
            while j > k + 1 {
                self.cols[j] = self.cols[j - 1];
                self.sums[j] = self.sums[j - 1];
                j -= 1;
            }
            self.cols[k + 1] = merged;
            self.sums[k + 1] = merged_sum;
            let prev = self.vertex;
            self.vertex = tables.a_to[v];
            Some((k as u8, prev))
        }
    }

    /// Exact inverse of `step`.
    #[inline(always)]
    fn unstep(&mut self, op: u8, undo: (u8, u16)) {
        let (k8, prev) = undo;
        let k = k8 as usize;
        if op == 1 {
            for i in 0..M {
                self.cols[k][i] -= self.cols[M - 1][i];
            }
            self.sums[k] -= self.sums[M - 1];
        } else {
            let mut old_last = [0u64; M];
            let mut old_last_sum = 0u64;
            for i in 0..M {
                old_last[i] = self.cols[k + 1][i] - self.cols[k][i];
            }
            for i in 0..M {
                old_last_sum += old_last[i];
            }
            let mut j = k + 1;
            while j < M - 1 {
                self.cols[j] = self.cols[j + 1];
                self.sums[j] = self.sums[j + 1];
                j += 1;
            }
            self.cols[M - 1] = old_last;
            self.sums[M - 1] = old_last_sum;
        }
        self.vertex = prev;
    }
}

// The `merged_sum > bound` test inside `step` is the exact pruning
// condition: both step kinds keep every other retained column sum, each
// `<= bound` by induction, so the new norm exceeds the bound iff the merged
// column does.

const fn pattern_squarings(m: usize) -> usize {
    // enough boolean squarings to pass the Wielandt exponent (m-1)^2 + 1
    match m {
        0..=2 => 1,
        3 => 3,
        4 => 4,
        5 | 6 => 5,
        _ => 6,
    }
}

/// Primitivity of the node's positivity pattern. Valid for products of the
/// elementary matrices (no zero rows or columns, so positivity of a power is
/// monotone in the exponent and checking a power of two past the Wielandt
/// bound suffices).
#[inline]
fn node_primitive<const M: usize>(nd: &Node<M>) -> bool {
    if M == 2 {
        // a closed word contains both operations; any such 2x2 product is
        // already entrywise positive
        return true;
    }
    let mut pat = [0u16; M];
    let full: u16 = (1 << M) - 1;
    for (j, col) in nd.cols.iter().enumerate() {
        for i in 0..M {
            if col[i] > 0 {
                pat[i] |= 1 << j;
            }
        }
    }
    let mut cur = pat;
    for _ in 0..pattern_squarings(M) {
        let mut all = true;
        for &row in &cur {
            if row != full {
                all = false;
                break;
            }
        }
        if all {
            return true;
        }
        let mut next = [0u16; M];
        for i in 0..M {
            let mut acc = 0u16;
            let row = cur[i];
            for (j, &prow) in cur.iter().enumerate() {
                if row >> j & 1 == 1 {
                    acc |= prow;
                }
            }
            next[i] = acc;
        }
        cur = next;
    }
    cur.iter().all(|&row| row == full)
}

/// Minimum of `log ||A(w)|| / |w|` over counted words, with its witness.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AlphaStat {
    pub min_ratio: f64,
    pub witness_norm: u64,
    pub witness_len: usize,
}

#[derive(Debug, Clone)]
struct AlphaTracker {
    best: Option<AlphaStat>,
    /// `thresholds[len] = exp(best * len)`; a word can improve the minimum
    /// only if its norm is strictly below the threshold at its length.
    thresholds: Vec<f64>,
}

impl AlphaTracker {
    fn new() -> AlphaTracker {
        AlphaTracker { best: None, thresholds: vec![f64::INFINITY; 64] }
    }

    #[inline(always)]
    fn observe(&mut self, norm: u64, len: usize) {
        if len >= self.thresholds.len() {
            self.grow(len);
        }
        if (norm as f64) < self.thresholds[len] {
            self.update(norm, len);
        }
    }

    #[cold]
    fn grow(&mut self, len: usize) {
        let fill = self.best.map(|b| b.min_ratio);
        let old = self.thresholds.len();
        self.thresholds.resize(len + 32, f64::INFINITY);
        if let Some(r) = fill {
            for l in old..self.thresholds.len() {
                self.thresholds[l] = (r * l as f64).exp();
            }
        }
    }

    #[cold]
    fn update(&mut self, norm: u64, len: usize) {
        let ratio = (norm as f64).ln() / len as f64;
        if self.best.map_or(true, |b| ratio < b.min_ratio) {
            self.best = Some(AlphaStat { min_ratio: ratio, witness_norm: norm, witness_len: len });
            for (l, thr) in self.thresholds.iter_mut().enumerate().skip(1) {
                *thr = (ratio * l as f64).exp();
            }
        } else {
            self.thresholds[len] = norm as f64;
        }
    }

    fn merge_best(&mut self, other: Option<AlphaStat>) {
        if let Some(b) = other {
            if self.best.map_or(true, |mine| b.min_ratio < mine.min_ratio) {
                self.best = Some(b);
            }
        }
    }
}

/// Aggregate results of one engine run.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub nodes: u64,
    pub n_words: u64,
    pub n_orbits: u64,
    pub alpha: Option<AlphaStat>,
}

/// Everything fixed for the duration of one run.
pub(crate) struct RunSpec {
    pub tables: Tables,
    pub bound: u64,
    /// Preloaded path (prefix letters) or empty.
    pub prefix: Vec<PathLetter>,
    pub roots: Vec<RootTask>,
    pub count_orbits: bool,
    pub track_alpha: bool,
    pub threads: usize,
}

/// One independent top-level subtree.
#[derive(Debug, Clone)]
pub(crate) struct RootTask {
    pub start_vertex: u16,
    pub first_ext_op: u8,
    /// Vertex the whole word must return to and the whole word's first
    /// operation (for the cyclic-compatibility check).
    pub closure_vertex: u16,
    pub word_first_op: u8,
    /// Only process first-extension letters with `n % modulus == residue`.
    pub residue: u64,
    pub modulus: u64,
    /// Lyndon state after the prefix: (period, live).
    pub lyn: (usize, bool),
}

struct SharedGate {
    remaining: AtomicU64,
    aborted: AtomicBool,
}

impl SharedGate {
    fn grab(&self) -> Option<u64> {
        if self.aborted.load(AtomicOrdering::Relaxed) {
            return None;
        }
        let mut cur = self.remaining.load(AtomicOrdering::Relaxed);
        loop {
            if cur == 0 {
                self.aborted.store(true, AtomicOrdering::Relaxed);
                return None;
            }
            let take = cur.min(BUDGET_CHUNK);
            match self.remaining.compare_exchange_weak(
                cur,
                cur - take,
                AtomicOrdering::Relaxed,
                AtomicOrdering::Relaxed,
            ) {
                Ok(_) => return Some(take),
                Err(seen) => cur = seen,
            }
        }
    }
}

/// How the current letter compares against the Duval reference letter, as a
/// function of its multiplicity alone (operation and base vertex are fixed
/// for the whole inner loop).
#[derive(Clone, Copy)]
enum LynCmp {
    /// Not tracking (dead subtree or orbit counting off).
    Off,
    /// Every multiplicity compares greater: the period resets.
    GreaterAll,
    /// Every multiplicity compares smaller: children are dead.
    LessAll,
    /// Compare `n` against the reference multiplicity; at equality the
    /// verdict is the precomputed vertex comparison.
    ByN { n_ref: u64, at_eq: Ordering },
}

struct TaskState<'a> {
    gate: &'a SharedGate,
    allowance: u64,
    nodes: u64,
    words: u64,
    orbits: u64,
    alpha: AlphaTracker,
    path: Vec<PathLetter>,
    undo: Vec<(u8, u16)>,
}

struct AbortSignal;

impl<'a> TaskState<'a> {
    #[inline(always)]
    fn charge(&mut self) -> std::result::Result<(), AbortSignal> {
        self.nodes += 1;
        if self.allowance == 0 {
            match self.gate.grab() {
                Some(a) => self.allowance = a,
                None => return Err(AbortSignal),
            }
        }
        self.allowance -= 1;
        Ok(())
    }
}

fn letter_dfs<const M: usize>(
    spec: &RunSpec,
    task: &RootTask,
    st: &mut TaskState<'_>,
    node: &mut Node<M>,
    op: u8,
    period: usize,
    live: bool,
) -> std::result::Result<(), AbortSignal> {
    let t = st.path.len(); // absolute letter index including prefix
    let base_vrank = node.vertex;
    let gating = task.modulus > 1 && t == spec.prefix.len();
    let can_close = op != task.word_first_op;
    let track = spec.count_orbits || spec.track_alpha;

    // comparison against the Duval reference, resolved by multiplicity only
    let lyn = if !spec.count_orbits || (t > 0 && !live) {
        LynCmp::Off
    } else if t == 0 {
        LynCmp::GreaterAll // placeholder; first letter always has period 1
    } else {
        let r = st.path[t - period];
        match op.cmp(&r.op) {
            Ordering::Less => LynCmp::LessAll,
            Ordering::Greater => LynCmp::GreaterAll,
            Ordering::Equal => LynCmp::ByN { n_ref: r.n, at_eq: base_vrank.cmp(&r.vrank) },
        }
    };

    st.path.push(PathLetter { op, n: 0, vrank: base_vrank });
    let undo_mark = st.undo.len();
    let mut n = 0u64;
    let mut result = Ok(());
    loop {
        match node.step(&spec.tables, op, spec.bound) {
            Some(rec) => st.undo.push(rec),
            None => break,
        }
        n += 1;
        if gating && n % task.modulus != task.residue {
            continue;
        }
        if st.charge().is_err() {
            result = Err(AbortSignal);
            break;
        }
        let (p_here, live_here) = if t == 0 {
            (1usize, true)
        } else {
            match lyn {
                LynCmp::Off => (period, false),
                LynCmp::GreaterAll => (t + 1, true),
                LynCmp::LessAll => (period, false),
                LynCmp::ByN { n_ref, at_eq } => {
                    if n > n_ref {
                        (t + 1, true)
                    } else if n < n_ref {
                        (period, false)
                    } else {
                        match at_eq {
                            Ordering::Greater => (t + 1, true),
                            Ordering::Equal => (period, true),
                            Ordering::Less => (period, false),
                        }
                    }
                }
            }
        };
        if can_close && node.vertex == task.closure_vertex && node_primitive(node) {
            st.words += 1;
            if track {
                if spec.track_alpha {
                    st.alpha.observe(node.norm(), t + 1);
                }
                if spec.count_orbits && live_here && p_here == t + 1 {
                    st.orbits += 1;
                }
            }
        }
        // the child letter's first step merges the same two sums whichever
        // operation it uses; skip the call when it cannot even start
        let child_k = spec.tables.k[node.vertex as usize] as usize;
        if node.sums[child_k] + node.sums[M - 1] <= spec.bound {
            st.path[t].n = n;
            if let Err(sig) = letter_dfs(spec, task, st, node, 1 - op, p_here, live_here) {
                result = Err(sig);
                break;
            }
        }
    }
    // rewind the chain walked inside this letter
    while st.undo.len() > undo_mark {
        let rec = st.undo.pop().unwrap();
        node.unstep(op, rec);
    }
    st.path.pop();
    result
}

/// The two-symbol torus case is the enumeration hot spot: its class has a
/// single vertex with `k = 0`, both operations are column accumulations
/// whose whole run unwinds in O(1), and closed words are automatically
/// primitive. This specialized recursion carries the matrix as six scalars.
struct M2State {
    // col0 = (c00, c01), col1 = (c10, c11); sums s0, s1
    c: [u64; 4],
    s: [u64; 2],
}

fn letter_dfs_m2(
    spec: &RunSpec,
    task: &RootTask,
    st: &mut TaskState<'_>,
    mat: &mut M2State,
    op: u8,
    period: usize,
    live: bool,
) -> std::result::Result<(), AbortSignal> {
    let t = st.path.len();
    let gating = task.modulus > 1 && t == spec.prefix.len();
    let can_close = op != task.word_first_op;
    let lyn = if !spec.count_orbits || (t > 0 && !live) {
        LynCmp::Off
    } else if t == 0 {
        LynCmp::GreaterAll
    } else {
        let r = st.path[t - period];
        match op.cmp(&r.op) {
            Ordering::Less => LynCmp::LessAll,
            Ordering::Greater => LynCmp::GreaterAll,
            Ordering::Equal => LynCmp::ByN { n_ref: r.n, at_eq: Ordering::Equal },
        }
    };
    st.path.push(PathLetter { op, n: 0, vrank: 0 });
    let bound = spec.bound;
    let mut n = 0u64;
    let mut result = Ok(());
    loop {
        // op 0 (a): col1 += col0; op 1 (b): col0 += col1
        let merged = st_sum2(mat);
        if merged > bound {
            break;
        }
        if op == 0 {
            mat.c[2] += mat.c[0];
            mat.c[3] += mat.c[1];
            mat.s[1] = merged;
        } else {
            mat.c[0] += mat.c[2];
            mat.c[1] += mat.c[3];
            mat.s[0] = merged;
        }
        n += 1;
        if gating && n % task.modulus != task.residue {
            continue;
        }
        if st.charge().is_err() {
            result = Err(AbortSignal);
            break;
        }
        let (p_here, live_here) = if t == 0 {
            (1usize, true)
        } else {
            match lyn {
                LynCmp::Off | LynCmp::LessAll => (period, false),
                LynCmp::GreaterAll => (t + 1, true),
                LynCmp::ByN { n_ref, .. } => {
                    if n > n_ref {
                        (t + 1, true)
                    } else if n < n_ref {
                        (period, false)
                    } else {
                        (period, true)
                    }
                }
            }
        };
        if can_close {
            st.words += 1;
            if spec.track_alpha {
                st.alpha.observe(mat.s[0].max(mat.s[1]), t + 1);
            }
            if spec.count_orbits && live_here && p_here == t + 1 {
                st.orbits += 1;
            }
        }
        // skip the call when the child letter cannot even start
        if st_sum2(mat) <= bound {
            st.path[t].n = n;
            if let Err(sig) = letter_dfs_m2(spec, task, st, mat, 1 - op, p_here, live_here) {
                result = Err(sig);
                break;
            }
        }
    }
    // a whole run of one operation unwinds in closed form
    if op == 0 {
        mat.c[2] -= n * mat.c[0];
        mat.c[3] -= n * mat.c[1];
        mat.s[1] -= n * mat.s[0];
    } else {
        mat.c[0] -= n * mat.c[2];
        mat.c[1] -= n * mat.c[3];
        mat.s[0] -= n * mat.s[1];
    }
    st.path.pop();
    result
}

#[inline(always)]
fn st_sum2(mat: &M2State) -> u64 {
    mat.s[0] + mat.s[1]
}

fn run_task<const M: usize>(
    spec: &RunSpec,
    task: &RootTask,
    gate: &SharedGate,
    prefix_node: &Node<M>,
) -> (RunStats, bool) {
    let mut st = TaskState {
        gate,
        allowance: 0,
        nodes: 0,
        words: 0,
        orbits: 0,
        alpha: AlphaTracker::new(),
        path: spec.prefix.clone(),
        undo: Vec::with_capacity(256),
    };
    let (p0, live0) = task.lyn;
    let aborted = if M == 2 {
        let mut mat = M2State {
            c: [
                prefix_node.cols[0][0],
                prefix_node.cols[0][1],
                prefix_node.cols[1][0],
                prefix_node.cols[1][1],
            ],
            s: [prefix_node.sums[0], prefix_node.sums[1]],
        };
        letter_dfs_m2(spec, task, &mut st, &mut mat, task.first_ext_op, p0, live0).is_err()
    } else {
        let mut node = Node::<M> {
            cols: prefix_node.cols,
            sums: prefix_node.sums,
            vertex: task.start_vertex,
        };
        letter_dfs(spec, task, &mut st, &mut node, task.first_ext_op, p0, live0).is_err()
    };
    (
        RunStats {
            nodes: st.nodes,
            n_words: st.words,
            n_orbits: st.orbits,
            alpha: st.alpha.best,
        },
        aborted,
    )
}

/// Outcome of one run: stats plus whether the node budget aborted it.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub stats: RunStats,
    pub aborted: bool,
}

pub(crate) fn run_spec(
    spec: &RunSpec,
    prefix_matrix_cols: &[Vec<u64>],
    budget: u64,
) -> Result<RunOutcome> {
    match spec.tables.m {
        2 => run_spec_m::<2>(spec, prefix_matrix_cols, budget),
        3 => run_spec_m::<3>(spec, prefix_matrix_cols, budget),
        4 => run_spec_m::<4>(spec, prefix_matrix_cols, budget),
        5 => run_spec_m::<5>(spec, prefix_matrix_cols, budget),
        6 => run_spec_m::<6>(spec, prefix_matrix_cols, budget),
        7 => run_spec_m::<7>(spec, prefix_matrix_cols, budget),
        8 => run_spec_m::<8>(spec, prefix_matrix_cols, budget),
        m => Err(Error::InvalidInput(format!(
            "m = {m} exceeds the engine limit {MAX_M}"
        ))),
    }
}

fn run_spec_m<const M: usize>(
    spec: &RunSpec,
    prefix_matrix_cols: &[Vec<u64>],
    budget: u64,
) -> Result<RunOutcome> {
    let mut prefix_node = Node::<M>::identity(0);
    if !prefix_matrix_cols.is_empty() {
        for (j, col) in prefix_matrix_cols.iter().enumerate() {
            let mut sum = 0u64;
            for (i, &e) in col.iter().enumerate() {
                prefix_node.cols[j][i] = e;
                sum = sum
                    .checked_add(e)
                    .ok_or_else(|| Error::BoundTooLarge("prefix matrix overflows u64".into()))?;
            }
            prefix_node.sums[j] = sum;
        }
        if prefix_node.norm() > spec.bound {
            // norm is monotone under extension, so nothing can qualify
            return Ok(RunOutcome { stats: RunStats::default(), aborted: false });
        }
    }
    let gate = SharedGate { remaining: AtomicU64::new(budget), aborted: AtomicBool::new(false) };
    let workers = spec.threads.max(1).min(spec.roots.len().max(1));
    let mut slots: Vec<Option<(RunStats, bool)>> = vec![None; spec.roots.len()];
    if workers <= 1 {
        for (i, task) in spec.roots.iter().enumerate() {
            let out = run_task::<M>(spec, task, &gate, &prefix_node);
            let hit = out.1;
            slots[i] = Some(out);
            if hit {
                break;
            }
        }
    } else {
        let next = AtomicUsize::new(0);
        let slot_lock = Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                    if i >= spec.roots.len() {
                        break;
                    }
                    let out = run_task::<M>(spec, &spec.roots[i], &gate, &prefix_node);
                    slot_lock.lock().unwrap()[i] = Some(out);
                });
            }
        });
    }
    let mut stats = RunStats::default();
    let mut alpha = AlphaTracker::new();
    let mut aborted = gate.aborted.load(AtomicOrdering::Relaxed);
    for slot in slots.into_iter().flatten() {
        stats.nodes += slot.0.nodes;
        stats.n_words += slot.0.n_words;
        stats.n_orbits += slot.0.n_orbits;
        alpha.merge_best(slot.0.alpha);
        aborted |= slot.1;
    }
    stats.alpha = alpha.best;
    Ok(RunOutcome { stats, aborted })
}

/// Replays Duval's invariant over a letter sequence; returns the
/// longest-Lyndon-prefix period and whether the sequence is still a prefix
/// of some canonical word.
pub(crate) fn replay_lyn(letters: &[PathLetter]) -> (usize, bool) {
    let mut period = 1usize;
    let mut live = true;
    for t in 1..letters.len() {
        if !live {
            break;
        }
        let x = letters[t].cmp_key();
        let r = letters[t - period].cmp_key();
        if x > r {
            period = t + 1;
        } else if x < r {
            live = false;
        }
    }
    (period, live)
}
