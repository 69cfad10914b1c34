use std::collections::HashSet;

use super::*;
use crate::perm::Permutation;

fn perm(images: &[usize]) -> Permutation {
    Permutation::from_images(images).unwrap()
}

fn class_of(images: &[usize]) -> RauzyClass {
    RauzyClass::new(&perm(images)).unwrap()
}

fn word(base: &[usize], tokens: &[(Op, u64)]) -> Word {
    Word::from_tokens(&perm(base), tokens).unwrap()
}

/// Obviously-correct brute force: recurse over letters with `Word` objects
/// and exact matrices, collecting every admissible word within the bound.
/// Slow; small bounds only.
fn naive_words(class: &RauzyClass, t: f64) -> Vec<Word> {
    let bound = norm_bound_from_t(t).unwrap();
    let mut out = Vec::new();
    fn extend(
        class: &RauzyClass,
        bound: u64,
        letters: &mut Vec<Letter>,
        out: &mut Vec<Word>,
    ) {
        let last = letters.last().unwrap().clone();
        let next_op = last.op.other();
        let mut pi = last.target();
        let mut n = 0u64;
        loop {
            n += 1;
            let cand = Letter::new(next_op, n, pi.clone()).unwrap();
            let _ = &cand;
            let mut trial = letters.clone();
            trial.push(Letter::new(next_op, n, letters.last().unwrap().target()).unwrap());
            let w = Word::new(trial).unwrap();
            let norm = w.matrix().col_norm_u64().unwrap_or(u64::MAX);
            if norm > bound {
                break;
            }
            if w.closes_up() && w.matrix().is_primitive() {
                out.push(w.clone());
            }
            letters.push(w.letters().last().unwrap().clone());
            extend(class, bound, letters, out);
            letters.pop();
            pi = pi.clone();
        }
    }
    for base in class.members() {
        for op in [Op::A, Op::B] {
            let mut n = 0u64;
            loop {
                n += 1;
                let letter = Letter::new(op, n, base.clone()).unwrap();
                let w = Word::new(vec![letter.clone()]).unwrap();
                let norm = w.matrix().col_norm_u64().unwrap_or(u64::MAX);
                if norm > bound {
                    break;
                }
                if w.closes_up() && w.matrix().is_primitive() {
                    out.push(w.clone());
                }
                let mut letters = vec![letter];
                extend(class, bound, &mut letters, &mut out);
            }
        }
    }
    out
}

fn naive_orbit_count(words: &[Word]) -> usize {
    let mut canon: HashSet<Vec<(Op, u64, Vec<usize>)>> = HashSet::new();
    for w in words {
        let c = w.canonical_form().unwrap();
        canon.insert(
            c.letters()
                .iter()
                .map(|l| (l.op, l.n, l.pi.images_one_indexed()))
                .collect(),
        );
    }
    canon.len()
}

/// Canonical words among `words` (for checking the engine's orbit counter,
/// which counts orbits at their canonical representative within bound).
fn naive_canonical_within(words: &[Word]) -> usize {
    words
        .iter()
        .filter(|w| &w.canonical_form().unwrap() == *w)
        .count()
}

#[test]
fn m2_word_counts_at_small_bounds() {
    let class = class_of(&[2, 1]);
    // T = log 3: exactly the two rotations of the double step
    let q = EnumQuery::new(class.clone(), 3.0f64.ln());
    let (stats, aborted) = count_at(&q, &CountOptions::default()).unwrap();
    assert!(!aborted);
    assert_eq!(stats.n_words, 2);
    assert_eq!(stats.n_orbits, 1);

    // T = log 2: below the minimal admissible norm
    let q2 = EnumQuery::new(class, 2.0f64.ln());
    let (stats2, _) = count_at(&q2, &CountOptions::default()).unwrap();
    assert_eq!(stats2.n_words, 0);
    assert_eq!(stats2.n_orbits, 0);
}

#[test]
fn m2_enumerate_lists_the_two_words() {
    let class = class_of(&[2, 1]);
    let q = EnumQuery::new(class, 3.0f64.ln());
    let mut seen = Vec::new();
    enumerate(&q, 0, |w, mat| {
        seen.push((w.clone(), mat.col_norm_u64().unwrap()));
        Ok(true)
    })
    .unwrap();
    assert_eq!(seen.len(), 2);
    let ab = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
    let ba = word(&[2, 1], &[(Op::B, 1), (Op::A, 1)]);
    assert!(seen.iter().any(|(w, n)| w == &ab && *n == 3));
    assert!(seen.iter().any(|(w, n)| w == &ba && *n == 3));
}

#[test]
fn engine_matches_naive_m2_up_to_log50() {
    let class = class_of(&[2, 1]);
    let t = 50.0f64.ln();
    let naive = naive_words(&class, t);
    let q = EnumQuery::new(class.clone(), t);
    let (stats, _) = count_at(&q, &CountOptions::default()).unwrap();
    assert_eq!(stats.n_words as usize, naive.len());
    assert_eq!(stats.n_orbits as usize, naive_canonical_within(&naive));

    // the streaming path sees the identical word set
    let mut streamed = HashSet::new();
    enumerate(&q, 0, |w, _| {
        streamed.insert(format!("{w:?}"));
        Ok(true)
    })
    .unwrap();
    let naive_set: HashSet<String> = naive.iter().map(|w| format!("{w:?}")).collect();
    assert_eq!(streamed, naive_set);
}

#[test]
fn engine_matches_naive_m3() {
    let class = class_of(&[3, 2, 1]);
    let t = 4.0;
    let naive = naive_words(&class, t);
    let q = EnumQuery::new(class, t);
    let (stats, _) = count_at(&q, &CountOptions::default()).unwrap();
    assert_eq!(stats.n_words as usize, naive.len());
    assert_eq!(stats.n_orbits as usize, naive_canonical_within(&naive));
    // non-primitive closed chains exist at m=3 and must have been filtered
    assert!(naive.iter().all(|w| w.is_admissible()));
}

#[test]
fn engine_matches_naive_with_threads() {
    let class = class_of(&[3, 2, 1]);
    let t = 4.5;
    let q = EnumQuery::new(class, t);
    let (seq, _) = count_at(&q, &CountOptions::default()).unwrap();
    let (par, _) = count_at(
        &q,
        &CountOptions { threads: 4, ..CountOptions::default() },
    )
    .unwrap();
    assert_eq!(seq.n_words, par.n_words);
    assert_eq!(seq.n_orbits, par.n_orbits);
    assert_eq!(seq.nodes, par.nodes);
}

#[test]
fn orbit_count_excludes_nonprimitive_powers() {
    // at T = log 8, (ab)^2 with norm 8 is within bound, but it codes the
    // same orbit as ab; canonical dedup must not double-count
    let class = class_of(&[2, 1]);
    let q = EnumQuery::new(class.clone(), 8.0f64.ln());
    let (stats, _) = count_at(&q, &CountOptions::default()).unwrap();
    let naive = naive_words(&class, 8.0f64.ln());
    assert_eq!(stats.n_words as usize, naive.len());
    assert_eq!(stats.n_orbits as usize, naive_canonical_within(&naive));
    // direct count: canonical forms of the naive set
    assert!(naive_orbit_count(&naive) >= stats.n_orbits as usize);
}

#[test]
fn any_rotation_mode_counts_all_reached_orbits() {
    let class = class_of(&[2, 1]);
    for t in [2.0, 2.5, 3.0] {
        let q = EnumQuery::new(class.clone(), t);
        let naive = naive_words(&class, t);
        let (canonical, _) = count_at(&q, &CountOptions::default()).unwrap();
        let (any, _) = count_at(
            &q,
            &CountOptions { orbit_mode: OrbitMode::AnyRotationWithinBound, ..Default::default() },
        )
        .unwrap();
        assert_eq!(any.n_words, canonical.n_words);
        assert_eq!(any.n_orbits as usize, naive_orbit_count(&naive));
        assert!(any.n_orbits >= canonical.n_orbits);
    }
}

#[test]
fn prefix_queries_contain_the_squared_word() {
    let class = class_of(&[2, 1]);
    let q_word = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
    let query = EnumQuery {
        class,
        t_bound: 9.0f64.ln(),
        prefix: Some(q_word.clone()),
        sector: None,
    };
    let mut found_qq = false;
    let mut all_start_with_q = true;
    enumerate(&query, 0, |w, mat| {
        if w.len() == 4 && mat.col_norm_u64() == Some(8) {
            found_qq = true;
        }
        if w.letters()[..2] != *q_word.letters() {
            all_start_with_q = false;
        }
        // strictly extending the prefix
        assert!(w.len() > q_word.len());
        Ok(true)
    })
    .unwrap();
    assert!(found_qq, "qq with norm 8 within e^T = 9");
    assert!(all_start_with_q);

    // counting path agrees with streaming
    let (stats, _) = count_at(&query, &CountOptions::default()).unwrap();
    let mut streamed = 0u64;
    enumerate(&query, 0, |_, _| {
        streamed += 1;
        Ok(true)
    })
    .unwrap();
    assert_eq!(stats.n_words, streamed);
}

#[test]
fn sector_counts_split_the_total() {
    let class = class_of(&[2, 1]);
    let t = 20.0f64.ln();
    let total = count_at(&EnumQuery::new(class.clone(), t), &CountOptions::default())
        .unwrap()
        .0
        .n_words;
    let w_pi = count_at(
        &EnumQuery {
            class: class.clone(),
            t_bound: t,
            prefix: None,
            sector: Some(SectorQuery { base: perm(&[2, 1]), first: Op::A }),
        },
        &CountOptions::default(),
    )
    .unwrap()
    .0
    .n_words;
    let w_pi_prime = count_at(
        &EnumQuery {
            class,
            t_bound: t,
            prefix: None,
            sector: Some(SectorQuery { base: perm(&[2, 1]), first: Op::B }),
        },
        &CountOptions::default(),
    )
    .unwrap()
    .0
    .n_words;
    assert_eq!(total, w_pi + w_pi_prime);
}

#[test]
fn sandwich_inequalities_exact_at_small_bounds() {
    // #W(q, T + log||A(q)||) >= #W_sector(T) >= #W(q, T)
    let class = class_of(&[2, 1]);
    let q_word = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
    let log_norm_q = 3.0f64.ln();
    for t in [1.2, 2.0, 3.0, 4.0, 5.0] {
        let sector = count_at(
            &EnumQuery {
                class: class.clone(),
                t_bound: t,
                prefix: None,
                sector: Some(SectorQuery { base: perm(&[2, 1]), first: Op::A }),
            },
            &CountOptions::default(),
        )
        .unwrap()
        .0
        .n_words;
        let prefix_at = |bound: f64| {
            count_at(
                &EnumQuery {
                    class: class.clone(),
                    t_bound: bound,
                    prefix: Some(q_word.clone()),
                    sector: None,
                },
                &CountOptions::default(),
            )
            .unwrap()
            .0
            .n_words
        };
        let left = prefix_at(t + log_norm_q);
        let right = prefix_at(t);
        assert!(left >= sector, "left {left} < sector {sector} at T={t}");
        assert!(sector >= right, "sector {sector} < right {right} at T={t}");
    }
}

#[test]
fn inject_prefix_examples() {
    let q = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
    let w = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
    let qw = inject_prefix(Some(&q), &w).unwrap();
    let norm = qw.matrix().col_norm_u64().unwrap();
    assert_eq!(norm, 8);
    assert!(norm <= q.matrix().col_norm_u64().unwrap() * w.matrix().col_norm_u64().unwrap());

    // incompatible junction: q ends with a b-letter only chains to a-letters
    let w_bad = word(&[2, 1], &[(Op::B, 1), (Op::A, 1)]);
    assert!(inject_prefix(Some(&q), &w_bad).is_err());

    // absent prefix is the identity injection
    assert_eq!(inject_prefix(None, &w).unwrap(), w);
}

#[test]
fn period_norm_gap_brackets() {
    let class = class_of(&[2, 1]);
    let q_word = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
    let query = EnumQuery {
        class,
        t_bound: 8.5f64.ln(),
        prefix: Some(q_word),
        sector: None,
    };
    let gap = period_norm_gap(&query, 0).unwrap();
    assert!(gap.count >= 1);
    assert!(gap.max_ratio <= 1.0 + 1e-12, "exp(l) <= norm always");
    assert!(gap.min_ratio > 0.0);
    // qq = (ab)^2 has rho = ((3+sqrt5)/2)^2 and norm 8
    let qq_ratio = ((3.0 + 5.0f64.sqrt()) / 2.0).powi(2) / 8.0;
    assert!(gap.min_ratio <= qq_ratio + 1e-9 && qq_ratio <= gap.max_ratio + 1e-9);
}

#[test]
fn alpha_tracking_matches_naive_minimum() {
    let class = class_of(&[2, 1]);
    let t = 30.0f64.ln();
    let naive = naive_words(&class, t);
    let expected = naive
        .iter()
        .map(|w| w.matrix().log_col_norm() / w.len() as f64)
        .fold(f64::INFINITY, f64::min);
    let (stats, _) = count_at(&EnumQuery::new(class, t), &CountOptions::default()).unwrap();
    let alpha = stats.alpha.unwrap();
    assert!((alpha.min_ratio - expected).abs() < 1e-12);
}

#[test]
fn grid_rows_monotone_and_slope_sane() {
    let class = class_of(&[2, 1]);
    let grid: Vec<f64> = (2..=6).map(|t| t as f64).collect();
    let report = count_grid(&EnumQuery::new(class, 1.0), &grid, &CountOptions::default()).unwrap();
    assert!(!report.aborted);
    assert_eq!(report.rows.len(), 5);
    for pair in report.rows.windows(2) {
        assert!(pair[1].n_words >= pair[0].n_words);
        assert!(pair[1].n_orbits >= pair[0].n_orbits);
    }
    for row in &report.rows {
        assert!(row.n_orbits <= row.n_words);
    }
    let slope = report.slope_words.unwrap();
    assert!(slope.slope > 1.0 && slope.slope < 3.0, "slope {}", slope.slope);
}

#[test]
fn budget_abort_reports_partial_prefix() {
    let class = class_of(&[2, 1]);
    let grid: Vec<f64> = (2..=10).map(|t| t as f64).collect();
    let report = count_grid(
        &EnumQuery::new(class, 1.0),
        &grid,
        &CountOptions { budget: 2_000, ..Default::default() },
    )
    .unwrap();
    assert!(report.aborted);
    assert!(report.rows.len() < grid.len());
    // the completed prefix still carries exact counts
    if let Some(first) = report.rows.first() {
        assert!(first.n_words > 0);
    }
}

#[test]
fn fit_slope_recovers_exponential() {
    let rows: Vec<(f64, u64)> = (1..=8)
        .map(|t| (t as f64, (200.0 * (2.0 * t as f64).exp()) as u64))
        .collect();
    let fit = fit_slope(rows).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-3);
    assert_eq!(fit.window, 4);
}

#[test]
fn rotation_class_sizes_match_primitive_length() {
    // group enumerated words by canonical form; when every rotation of the
    // form is within bound, the class size equals the primitive length
    let class = class_of(&[2, 1]);
    let t = 10.0f64.ln();
    let words = naive_words(&class, t);
    let bound = norm_bound_from_t(t).unwrap();
    use std::collections::HashMap;
    let mut groups: HashMap<String, Vec<Word>> = HashMap::new();
    for w in &words {
        groups
            .entry(format!("{:?}", w.canonical_form().unwrap()))
            .or_default()
            .push(w.clone());
    }
    for group in groups.values() {
        let canon = group[0].canonical_form().unwrap();
        let prim_len = canon.len();
        let all_rotations_within = (0..prim_len).all(|k| {
            canon
                .rotate(k)
                .unwrap()
                .matrix()
                .col_norm_u64()
                .map_or(false, |n| n <= bound)
        });
        if all_rotations_within {
            // count only words that are exactly the primitive root's class
            let as_written: Vec<&Word> =
                group.iter().filter(|w| w.len() == prim_len).collect();
            assert_eq!(
                as_written.len(),
                prim_len,
                "rotation class of {canon:?} has wrong size"
            );
        }
    }
}

#[test]
fn orbit_representative_stream_matches_counts() {
    let class = class_of(&[2, 1]);
    let t = 20.0f64.ln();
    let q = EnumQuery::new(class, t);
    let (stats, _) = count_at(&q, &CountOptions::default()).unwrap();
    let mut seen = 0u64;
    let streamed = enumerate_orbit_reps(&q, 0, |w, _| {
        assert_eq!(&w.canonical_form().unwrap(), w);
        seen += 1;
        Ok(true)
    })
    .unwrap();
    assert_eq!(seen, stats.n_orbits);
    assert_eq!(streamed.n_orbits, stats.n_orbits);
}

#[test]
fn bound_parsing_limits() {
    assert!(norm_bound_from_t(-1.0).is_err());
    assert!(norm_bound_from_t(0.0).is_err());
    assert!(norm_bound_from_t(50.0).is_err());
    assert_eq!(norm_bound_from_t(3.0f64.ln()).unwrap(), 3);
    assert_eq!(norm_bound_from_t(1.0).unwrap(), 2);
}
