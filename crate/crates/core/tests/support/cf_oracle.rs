//! Independent two-symbol brute force used to cross-check the counting
//! engine: words over the torus class are continued-fraction expansions, so
//! the product matrix follows the convergent recurrences directly. The walk
//! passes the four matrix entries by value, groups maximal runs into
//! letters, and buckets each closed word by the smallest grid bound that
//! admits its column norm.
//!
//! Canonical-rotation detection keeps Duval's longest-Lyndon-prefix length
//! over the `(op, n)` letter sequence; a closed word is an orbit
//! representative exactly when that length equals its letter count.

/// Per-grid cumulative counts plus the minimum of `log(norm)/letters`.
pub struct CfCounts {
    pub words: Vec<u64>,
    pub orbits: Vec<u64>,
    pub min_log_ratio: f64,
    #[allow(dead_code)]
    pub nodes: u64,
}

struct Ctx<'a> {
    bounds: &'a [u64],
    top: u64,
    words_at: Vec<u64>,
    orbits_at: Vec<u64>,
    /// `ratio_floor[len]` bounds the norm below which a word of that letter
    /// count could improve the running minimum of `log(norm)/len`; keeps the
    /// logarithm off the hot path.
    ratio_floor: Vec<f64>,
    min_log_ratio: f64,
    nodes: u64,
    path: Vec<(u8, u64)>,
}

impl Ctx<'_> {
    #[inline(always)]
    fn bucket(&self, norm: u64) -> usize {
        // most closed words land in the top bucket; scan downward
        let mut idx = self.bounds.len() - 1;
        while idx > 0 && norm <= self.bounds[idx - 1] {
            idx -= 1;
        }
        idx
    }

    #[cold]
    fn improve_ratio(&mut self, norm: u64, len: usize) {
        let ratio = (norm as f64).ln() / len as f64;
        if ratio < self.min_log_ratio {
            self.min_log_ratio = ratio;
            for (l, slot) in self.ratio_floor.iter_mut().enumerate().skip(1) {
                *slot = (ratio * l as f64).exp();
            }
        } else {
            self.ratio_floor[len] = norm as f64;
        }
    }
}

/// Exhaustively counts admissible words and canonical representatives of the
/// two-symbol class for every bound in `bounds` (ascending).
pub fn count_m2(bounds: &[u64]) -> CfCounts {
    assert!(!bounds.is_empty() && bounds.windows(2).all(|w| w[0] < w[1]));
    let mut ctx = Ctx {
        bounds,
        top: *bounds.last().unwrap(),
        words_at: vec![0; bounds.len()],
        orbits_at: vec![0; bounds.len()],
        ratio_floor: vec![f64::INFINITY; 128],
        min_log_ratio: f64::INFINITY,
        nodes: 0,
        path: Vec::new(),
    };
    for first_op in [0u8, 1] {
        // identity convergents: X = (1,0), Y = (0,1)
        walk(&mut ctx, 1, 0, 0, 1, first_op, first_op, 1, true);
    }
    let mut words = ctx.words_at;
    let mut orbits = ctx.orbits_at;
    for i in 1..bounds.len() {
        words[i] += words[i - 1];
        orbits[i] += orbits[i - 1];
    }
    CfCounts { words, orbits, min_log_ratio: ctx.min_log_ratio, nodes: ctx.nodes }
}

/// How the letter at the current position compares with Duval's reference,
/// as a function of its multiplicity.
#[derive(Clone, Copy)]
enum Cmp {
    Off,
    GreaterAll,
    LessAll,
    ByN(u64),
}

#[allow(clippy::too_many_arguments)]
fn walk(
    ctx: &mut Ctx<'_>,
    x0: u64,
    x1: u64,
    y0: u64,
    y1: u64,
    op: u8,
    first_op: u8,
    period: usize,
    live: bool,
) {
    let t = ctx.path.len();
    if t + 2 >= ctx.ratio_floor.len() {
        ctx.ratio_floor.resize(t + 34, f64::INFINITY);
    }
    let closes = t >= 1 && op != first_op;
    let cmp = if t == 0 {
        Cmp::GreaterAll
    } else if !live {
        Cmp::Off
    } else {
        let (ref_op, ref_n) = ctx.path[t - period];
        match op.cmp(&ref_op) {
            std::cmp::Ordering::Greater => Cmp::GreaterAll,
            std::cmp::Ordering::Less => Cmp::LessAll,
            std::cmp::Ordering::Equal => Cmp::ByN(ref_n),
        }
    };
    ctx.path.push((op, 0));
    let (mut cx0, mut cx1, mut cy0, mut cy1) = (x0, x1, y0, y1);
    let mut n = 0u64;
    loop {
        // one more application of the block's operation
        if op == 0 {
            cy0 += cx0;
            cy1 += cx1;
        } else {
            cx0 += cy0;
            cx1 += cy1;
        }
        let norm = (cx0 + cx1).max(cy0 + cy1);
        if norm > ctx.top {
            break;
        }
        n += 1;
        ctx.nodes += 1;
        let (p_here, live_here) = if t == 0 {
            (1usize, true)
        } else {
            match cmp {
                Cmp::Off | Cmp::LessAll => (period, false),
                Cmp::GreaterAll => (t + 1, true),
                Cmp::ByN(ref_n) => {
                    if n > ref_n {
                        (t + 1, true)
                    } else if n < ref_n {
                        (period, false)
                    } else {
                        (period, true)
                    }
                }
            }
        };
        if closes {
            let idx = ctx.bucket(norm);
            ctx.words_at[idx] += 1;
            if (norm as f64) < ctx.ratio_floor[t + 1] {
                ctx.improve_ratio(norm, t + 1);
            }
            if live_here && p_here == t + 1 {
                ctx.orbits_at[idx] += 1;
            }
        }
        // the child letter's first step has norm sx + sy either way; skip
        // the call when it cannot start
        if cx0 + cx1 + cy0 + cy1 <= ctx.top {
            ctx.path[t].1 = n;
            walk(ctx, cx0, cx1, cy0, cy1, 1 - op, first_op, p_here, live_here);
        }
    }
    ctx.path.pop();
}
