//! Exact enumeration of admissible words with bounded matrix norm, orbit
//! counting via canonical cyclic forms, prefix- and sector-constrained
//! counts, and logarithmic slope estimation.
//!
//! Throughout, the bound `T` is a log-norm bound: a word `w` qualifies when
//! `log ||A(w)|| <= T` with `||A|| = max_j sum_i A_ij`.

mod engine;

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{perron, RenormMatrix};
use crate::perm::{Op, Permutation, RauzyClass};
use crate::symbolic::{Letter, Word};

pub use engine::{norm_bound_from_t, AlphaStat, RunStats, MAX_M, MAX_T_BOUND};
use engine::{replay_lyn, PathLetter, RootTask, RunOutcome, RunSpec, Tables};

/// Default node budget for a counting run.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Sector restriction: loops based at `base` whose first letter uses `first`
/// (and whose last letter therefore uses the other operation and returns to
/// `base`). `first = a` is the set usually written `W_pi`, `first = b` its
/// primed companion.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorQuery {
    pub base: Permutation,
    pub first: Op,
}

/// How orbits are deduplicated against the norm bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrbitMode {
    /// An orbit qualifies iff its canonical representative is within bound.
    #[default]
    CanonicalWithinBound,
    /// An orbit qualifies iff any coding word of it is within bound
    /// (hash-based dedup; memory grows with the orbit count).
    AnyRotationWithinBound,
}

/// An enumeration request.
#[derive(Debug, Clone)]
pub struct EnumQuery {
    pub class: RauzyClass,
    /// Log-norm bound.
    pub t_bound: f64,
    /// Restrict to words strictly extending this word.
    pub prefix: Option<Word>,
    /// Restrict to one based loop set.
    pub sector: Option<SectorQuery>,
}

impl EnumQuery {
    pub fn new(class: RauzyClass, t_bound: f64) -> EnumQuery {
        EnumQuery { class, t_bound, prefix: None, sector: None }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_bound > 0.0) {
            return Err(Error::InvalidInput("T must be positive".into()));
        }
        if let Some(sector) = &self.sector {
            if self.class.index_of(&sector.base).is_none() {
                return Err(Error::InvalidInput(
                    "sector base permutation is not in the class".into(),
                ));
            }
        }
        if let Some(prefix) = &self.prefix {
            if self.class.index_of(prefix.base()).is_none() {
                return Err(Error::InvalidInput(
                    "prefix base permutation is not in the class".into(),
                ));
            }
            if let Some(sector) = &self.sector {
                if prefix.base() != &sector.base || prefix.first().op != sector.first {
                    return Err(Error::InvalidInput(
                        "prefix does not lie in the requested sector".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Knobs of a counting run.
#[derive(Debug, Clone)]
pub struct CountOptions {
    /// Node budget across the whole grid; 0 means the default.
    pub budget: u64,
    pub threads: usize,
    pub orbit_mode: OrbitMode,
}

impl Default for CountOptions {
    fn default() -> CountOptions {
        CountOptions { budget: DEFAULT_BUDGET, threads: 1, orbit_mode: OrbitMode::default() }
    }
}

/// One grid row of a counting run.
#[derive(Debug, Clone, Serialize)]
pub struct TRow {
    pub t: f64,
    pub n_words: u64,
    pub n_orbits: u64,
    pub nodes: u64,
    pub seconds: f64,
}

/// Least-squares slope of `log count` against `T`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    /// Number of grid points in the fit window.
    pub window: usize,
}

/// Results of a grid counting run.
#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub rows: Vec<TRow>,
    /// True when the node budget stopped the run; `rows` then holds the
    /// completed grid prefix.
    pub aborted: bool,
    pub slope_words: Option<SlopeFit>,
    pub slope_orbits: Option<SlopeFit>,
    /// Measured minimum of `log ||A(w)|| / |w|` at the largest completed T.
    pub alpha_min: Option<AlphaStat>,
    pub total_nodes: u64,
    pub wallclock_seconds: f64,
}

fn compile_query(query: &EnumQuery, t: f64, count_orbits: bool, threads: usize) -> Result<RunSpec> {
    query.validate()?;
    let bound = norm_bound_from_t(t)?;
    let tables = Tables::new(&query.class);
    let class = &query.class;

    let mut prefix_letters: Vec<PathLetter> = Vec::new();
    let mut roots = Vec::new();
    let split = threads.max(1) as u64 * 2;

    if let Some(prefix) = &query.prefix {
        for letter in prefix.letters() {
            let vrank = class
                .index_of(&letter.pi)
                .ok_or_else(|| Error::InvalidInput("prefix leaves the class".into()))? as u16;
            prefix_letters.push(PathLetter {
                op: match letter.op {
                    Op::A => 0,
                    Op::B => 1,
                },
                n: letter.n,
                vrank,
            });
        }
        let end = prefix.last().target();
        let start_vertex = class
            .index_of(&end)
            .ok_or_else(|| Error::InvalidInput("prefix leaves the class".into()))? as u16;
        let closure_vertex = class.index_of(prefix.base()).unwrap() as u16;
        let first_ext_op = match prefix.last().op.other() {
            Op::A => 0u8,
            Op::B => 1,
        };
        let word_first_op = match prefix.first().op {
            Op::A => 0u8,
            Op::B => 1,
        };
        let lyn = replay_lyn(&prefix_letters);
        let modulus = split;
        for residue in 0..modulus {
            roots.push(RootTask {
                start_vertex,
                first_ext_op,
                closure_vertex,
                word_first_op,
                residue,
                modulus,
                lyn,
            });
        }
    } else {
        let vertex_ops: Vec<(u16, u8)> = match &query.sector {
            Some(sector) => {
                let v = class.index_of(&sector.base).unwrap() as u16;
                let op = match sector.first {
                    Op::A => 0u8,
                    Op::B => 1,
                };
                vec![(v, op)]
            }
            None => (0..class.len() as u16)
                .flat_map(|v| [(v, 0u8), (v, 1u8)])
                .collect(),
        };
        let modulus = if vertex_ops.len() >= threads.max(1) * 2 { 1 } else { split };
        for (v, op) in vertex_ops {
            for residue in 0..modulus {
                roots.push(RootTask {
                    start_vertex: v,
                    first_ext_op: op,
                    closure_vertex: v,
                    word_first_op: op,
                    residue,
                    modulus,
                    lyn: (1, true),
                });
            }
        }
    }

    Ok(RunSpec {
        tables,
        bound,
        prefix: prefix_letters,
        roots,
        count_orbits,
        track_alpha: true,
        threads,
    })
}

fn prefix_matrix_cols(query: &EnumQuery) -> Result<Vec<Vec<u64>>> {
    match &query.prefix {
        None => Ok(Vec::new()),
        Some(prefix) => {
            let mat = prefix.matrix();
            let m = mat.m();
            let mut cols = vec![vec![0u64; m]; m];
            for (j, col) in cols.iter_mut().enumerate() {
                for (i, slot) in col.iter_mut().enumerate() {
                    *slot = mat.entry_u64(i, j).ok_or_else(|| {
                        Error::BoundTooLarge("prefix matrix exceeds u64".into())
                    })?;
                }
            }
            Ok(cols)
        }
    }
}

/// Counts admissible words and orbit representatives at one bound.
pub fn count_at(query: &EnumQuery, opts: &CountOptions) -> Result<(RunStats, bool)> {
    let budget = if opts.budget == 0 { DEFAULT_BUDGET } else { opts.budget };
    match opts.orbit_mode {
        OrbitMode::CanonicalWithinBound => {
            let spec = compile_query(query, query.t_bound, true, opts.threads)?;
            let cols = prefix_matrix_cols(query)?;
            let RunOutcome { stats, aborted } = engine::run_spec(&spec, &cols, budget)?;
            Ok((stats, aborted))
        }
        OrbitMode::AnyRotationWithinBound => count_any_rotation(query, budget, opts.threads),
    }
}

/// Counts words and orbits on an ascending grid of bounds, stopping at the
/// first bound the budget cannot finish; `rows` holds the completed prefix.
pub fn count_grid(query: &EnumQuery, grid: &[f64], opts: &CountOptions) -> Result<CountReport> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    let started = Instant::now();
    let total_budget = if opts.budget == 0 { DEFAULT_BUDGET } else { opts.budget };
    let mut spent = 0u64;
    let mut rows = Vec::new();
    let mut aborted = false;
    let mut alpha_min: Option<AlphaStat> = None;
    for &t in grid {
        let mut q = query.clone();
        q.t_bound = t;
        let remaining = total_budget.saturating_sub(spent);
        if remaining == 0 {
            aborted = true;
            break;
        }
        let row_start = Instant::now();
        let (stats, hit) = count_at(
            &q,
            &CountOptions { budget: remaining, threads: opts.threads, orbit_mode: opts.orbit_mode },
        )?;
        spent = spent.saturating_add(stats.nodes);
        if hit {
            aborted = true;
            break;
        }
        if let Some(prev) = rows.last() {
            let prev: &TRow = prev;
            debug_assert!(stats.n_words >= prev.n_words && stats.n_orbits >= prev.n_orbits);
        }
        alpha_min = stats.alpha; // largest completed T wins
        rows.push(TRow {
            t,
            n_words: stats.n_words,
            n_orbits: stats.n_orbits,
            nodes: stats.nodes,
            seconds: row_start.elapsed().as_secs_f64(),
        });
    }
    let slope_words = fit_slope(rows.iter().map(|r| (r.t, r.n_words)));
    let slope_orbits = fit_slope(rows.iter().map(|r| (r.t, r.n_orbits)));
    Ok(CountReport {
        rows,
        aborted,
        slope_words,
        slope_orbits,
        alpha_min,
        total_nodes: spent,
        wallclock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Least-squares slope of `log count` over the top half of the grid
/// (`ceil(len/2)` points, at least two).
pub fn fit_slope<I: IntoIterator<Item = (f64, u64)>>(rows: I) -> Option<SlopeFit> {
    let rows: Vec<(f64, u64)> = rows.into_iter().collect();
    let window = rows.len().div_ceil(2).max(2);
    if rows.len() < window {
        return None;
    }
    let tail = &rows[rows.len() - window..];
    if tail.iter().any(|&(_, c)| c == 0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = tail.iter().map(|&(t, c)| (t, (c as f64).ln())).collect();
    let k = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let stderr = if pts.len() > 2 {
        let ss_res: f64 = pts
            .iter()
            .map(|p| {
                let fit = mean_y + slope * (p.0 - mean_x);
                (p.1 - fit).powi(2)
            })
            .sum();
        (ss_res / (k - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(SlopeFit { slope, stderr, window: pts.len() })
}

/// Streaming enumeration: calls `visit` for every admissible word within the
/// query's bound, materialized with its exact matrix. Words arrive once each,
/// as written; return `false` to stop early.
pub fn enumerate<F>(query: &EnumQuery, budget: u64, mut visit: F) -> Result<RunStats>
where
    F: FnMut(&Word, &RenormMatrix) -> Result<bool>,
{
    query.validate()?;
    let bound = norm_bound_from_t(query.t_bound)?;
    let class = &query.class;
    let tables = Tables::new(class);
    let budget = if budget == 0 { DEFAULT_BUDGET } else { budget };

    struct Walk<'a, F> {
        class: &'a RauzyClass,
        tables: &'a Tables,
        bound: u64,
        budget: u64,
        nodes: u64,
        words: u64,
        stopped: bool,
        path: Vec<(u8, u64, u16)>,
        visit: &'a mut F,
    }

    impl<'a, F> Walk<'a, F>
    where
        F: FnMut(&Word, &RenormMatrix) -> Result<bool>,
    {
        fn materialize(&self) -> Result<(Word, RenormMatrix)> {
            let letters: Vec<Letter> = self
                .path
                .iter()
                .map(|&(op, n, v)| {
                    Letter::new(
                        if op == 0 { Op::A } else { Op::B },
                        n,
                        self.class.member(v as usize).clone(),
                    )
                })
                .collect::<Result<_>>()?;
            let word = Word::new(letters)?;
            Ok((word.clone(), word.matrix()))
        }

        fn dfs(
            &mut self,
            mat: &RenormMatrix,
            vertex: u16,
            op: u8,
            closure_vertex: u16,
            word_first_op: u8,
        ) -> Result<()> {
            if self.stopped {
                return Ok(());
            }
            let base = vertex;
            let mut cur = mat.clone();
            let mut cur_vertex = vertex;
            let mut n = 0u64;
            self.path.push((op, 0, base));
            loop {
                let member = self.class.member(cur_vertex as usize);
                let elem = RenormMatrix::elementary(if op == 0 { Op::A } else { Op::B }, member)?;
                let next = cur.mul(&elem)?;
                let norm = next.col_norm_u64();
                cur_vertex = if op == 0 {
                    self.tables.a_to[cur_vertex as usize]
                } else {
                    self.tables.b_to[cur_vertex as usize]
                };
                match norm {
                    Some(v) if v <= self.bound => {}
                    _ => break,
                }
                cur = next;
                n += 1;
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(Error::BudgetExceeded { visited: self.nodes });
                }
                self.path.last_mut().unwrap().1 = n;
                if cur_vertex == closure_vertex && op != word_first_op && cur.is_primitive() {
                    let (word, matrix) = self.materialize()?;
                    self.words += 1;
                    if !(self.visit)(&word, &matrix)? {
                        self.stopped = true;
                        break;
                    }
                }
                self.dfs(&cur, cur_vertex, 1 - op, closure_vertex, word_first_op)?;
                if self.stopped {
                    break;
                }
            }
            self.path.pop();
            Ok(())
        }
    }

    let mut walk = Walk {
        class,
        tables: &tables,
        bound,
        budget,
        nodes: 0,
        words: 0,
        stopped: false,
        path: Vec::new(),
        visit: &mut visit,
    };

    if let Some(prefix) = &query.prefix {
        for letter in prefix.letters() {
            let v = class.index_of(&letter.pi).unwrap() as u16;
            walk.path
                .push((if letter.op == Op::A { 0 } else { 1 }, letter.n, v));
        }
        let start = class.index_of(&prefix.last().target()).unwrap() as u16;
        let closure = class.index_of(prefix.base()).unwrap() as u16;
        let first_op = if prefix.first().op == Op::A { 0u8 } else { 1 };
        let ext_op = if prefix.last().op == Op::A { 1u8 } else { 0 };
        let mat = prefix.matrix();
        if mat.col_norm_u64().map_or(false, |n| n <= bound) {
            walk.dfs(&mat, start, ext_op, closure, first_op)?;
        }
    } else {
        let roots: Vec<(u16, u8)> = match &query.sector {
            Some(sector) => {
                let v = class.index_of(&sector.base).unwrap() as u16;
                vec![(v, if sector.first == Op::A { 0 } else { 1 })]
            }
            None => (0..class.len() as u16)
                .flat_map(|v| [(v, 0u8), (v, 1u8)])
                .collect(),
        };
        let identity = RenormMatrix::identity(class.m());
        for (v, op) in roots {
            walk.dfs(&identity, v, op, v, op)?;
            if walk.stopped {
                break;
            }
        }
    }
    Ok(RunStats { nodes: walk.nodes, n_words: walk.words, n_orbits: 0, alpha: None })
}

/// As [`enumerate`], but emits only orbit representatives: words that equal
/// their own canonical cyclic form.
pub fn enumerate_orbit_reps<F>(query: &EnumQuery, budget: u64, mut visit: F) -> Result<RunStats>
where
    F: FnMut(&Word, &RenormMatrix) -> Result<bool>,
{
    let mut reps = 0u64;
    let mut stats = enumerate(query, budget, |word, matrix| {
        if word.canonical_form()? == *word {
            reps += 1;
            visit(word, matrix)
        } else {
            Ok(true)
        }
    })?;
    stats.n_orbits = reps;
    Ok(stats)
}

fn count_any_rotation(query: &EnumQuery, budget: u64, _threads: usize) -> Result<(RunStats, bool)> {
    // Hash-dedup over canonical keys of every within-bound coding word. The
    // set grows with the orbit count; intended for moderate bounds.
    let mut keys: HashSet<Vec<(u8, u64, u16)>> = HashSet::new();
    let class = &query.class;
    let mut words = 0u64;
    let outcome = enumerate(query, budget, |word, _| {
        words += 1;
        let canon = canonical_key(word, class);
        keys.insert(canon);
        Ok(true)
    });
    match outcome {
        Ok(stats) => Ok((
            RunStats {
                nodes: stats.nodes,
                n_words: words,
                n_orbits: keys.len() as u64,
                alpha: None,
            },
            false,
        )),
        Err(Error::BudgetExceeded { visited }) => Ok((
            RunStats { nodes: visited, n_words: words, n_orbits: keys.len() as u64, alpha: None },
            true,
        )),
        Err(e) => Err(e),
    }
}

fn canonical_key(word: &Word, class: &RauzyClass) -> Vec<(u8, u64, u16)> {
    let root = word.primitive_root();
    let letters: Vec<(u8, u64, u16)> = root
        .letters()
        .iter()
        .map(|l| {
            (
                if l.op == Op::A { 0u8 } else { 1 },
                l.n,
                class.index_of(&l.pi).unwrap() as u16,
            )
        })
        .collect();
    let n = letters.len();
    let mut best: Option<Vec<(u8, u64, u16)>> = None;
    for k in 0..n {
        let mut rot = Vec::with_capacity(n);
        rot.extend_from_slice(&letters[k..]);
        rot.extend_from_slice(&letters[..k]);
        if best.as_ref().map_or(true, |b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap()
}

/// Concatenates `q` and `w`, checking the junction chains; the norm obeys
/// `||A(qw)|| <= ||A(q)|| ||A(w)||`. An absent `q` is the identity
/// injection.
pub fn inject_prefix(q: Option<&Word>, w: &Word) -> Result<Word> {
    match q {
        None => Ok(w.clone()),
        Some(q) => q.concat(w),
    }
}

/// Spread of `exp(l(w)) / ||A(w)||` over the enumerated words of a query.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub count: u64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Measures how the orbit period compares to the log-norm over a word
/// stream: reports the bracket of `exp(l(w)) / ||A(w)||` (always `<= 1`).
pub fn period_norm_gap(query: &EnumQuery, budget: u64) -> Result<GapReport> {
    let mut count = 0u64;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    enumerate(query, budget, |_, matrix| {
        let pd = perron(matrix)?;
        let ratio = (pd.log_rho - matrix.log_col_norm()).exp();
        count += 1;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        Ok(true)
    })?;
    if count == 0 {
        return Err(Error::InvalidInput("no words within bound".into()));
    }
    Ok(GapReport { count, min_ratio, max_ratio })
}

#[cfg(test)]
mod tests;
