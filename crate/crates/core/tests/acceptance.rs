//! Acceptance suite: one test per criterion, each printing a
//! `criterion N: ...` line (visible with `-- --nocapture`). The heavy m=2
//! enumeration is shared between criteria 1 and 4 through a `OnceLock`.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zippered::counting::{
    count_at, count_grid, enumerate, norm_bound_from_t, CountOptions, CountReport, EnumQuery,
    SectorQuery,
};
use zippered::induction::{random_simplex_point, zorich_step, IETPoint};
use zippered::measure::{cylinder_identity_exact, mc_cylinder, mc_expansion, McConfig};
use zippered::perm::{Op, Permutation, RauzyClass};
use zippered::rect::{
    first_return, flow, interior_margin, on_transversal, sample_k_pi, u_map, DeltaCoords,
    Violation,
};
use zippered::symbolic::{Letter, Word};

#[path = "support/cf_oracle.rs"]
mod cf_oracle;

fn perm(images: &[usize]) -> Permutation {
    Permutation::from_images(images).unwrap()
}

fn class_of(images: &[usize]) -> RauzyClass {
    RauzyClass::new(&perm(images)).unwrap()
}

struct Criterion1Data {
    report: CountReport,
    oracle: cf_oracle::CfCounts,
    seconds: f64,
}

static C1: OnceLock<Criterion1Data> = OnceLock::new();

fn criterion1_data() -> &'static Criterion1Data {
    C1.get_or_init(|| {
        let started = Instant::now();
        let grid: Vec<f64> = (6..=12).map(f64::from).collect();
        let query = EnumQuery::new(class_of(&[2, 1]), 1.0);
        let opts = CountOptions { budget: u64::MAX / 4, threads: 1, ..Default::default() };
        let report = count_grid(&query, &grid, &opts).expect("m=2 grid");
        let bounds: Vec<u64> = grid.iter().map(|&t| norm_bound_from_t(t).unwrap()).collect();
        let oracle = cf_oracle::count_m2(&bounds);
        Criterion1Data { report, oracle, seconds: started.elapsed().as_secs_f64() }
    })
}

/// Criterion 1: the logarithmic growth rate of the full m=2 enumeration on
/// T = 6..12 approaches the symbol count, for words and for orbits, and the
/// exact counts match an independent continued-fraction brute force.
#[test]
fn c01_torus_growth_rate_and_oracle_equivalence() {
    let data = criterion1_data();
    let report = &data.report;
    assert!(!report.aborted, "full enumeration must complete");
    assert_eq!(report.rows.len(), 7);
    for (i, row) in report.rows.iter().enumerate() {
        assert_eq!(
            row.n_words, data.oracle.words[i],
            "word count mismatch against the brute force at T={}",
            row.t
        );
        assert_eq!(
            row.n_orbits, data.oracle.orbits[i],
            "orbit count mismatch against the brute force at T={}",
            row.t
        );
    }
    let slope_words = report.slope_words.expect("word slope").slope;
    let slope_orbits = report.slope_orbits.expect("orbit slope").slope;
    println!(
        "criterion 1: slope_words={slope_words:.4} slope_orbits={slope_orbits:.4} \
         top row: T=12 words={} orbits={} ({:.1}s incl. oracle)",
        report.rows[6].n_words, report.rows[6].n_orbits, data.seconds
    );
    assert!((1.7..=2.3).contains(&slope_words), "slope_words {slope_words}");
    assert!((1.7..=2.3).contains(&slope_orbits), "slope_orbits {slope_orbits}");
    assert!(
        data.seconds <= 300.0,
        "criterion 1 exceeded five minutes: {:.1}s",
        data.seconds
    );
    println!("criterion 1: PASS");
}

/// Criterion 2: the m=3 class on T = 4..8 under the node budget; the budget
/// aborts at the top bound and the completed prefix (length >= 3) carries a
/// growth rate near the symbol count.
#[test]
fn c02_three_symbol_growth_rate_under_budget() {
    let started = Instant::now();
    let grid: Vec<f64> = (4..=8).map(f64::from).collect();
    let query = EnumQuery::new(class_of(&[3, 2, 1]), 1.0);
    let opts = CountOptions { budget: 6_000_000_000, threads: 1, ..Default::default() };
    let report = count_grid(&query, &grid, &opts).expect("m=3 grid");
    let seconds = started.elapsed().as_secs_f64();
    assert!(report.rows.len() >= 3, "completed prefix too short: {}", report.rows.len());
    let slope_words = report.slope_words.expect("word slope").slope;
    let slope_orbits = report.slope_orbits.expect("orbit slope").slope;
    println!(
        "criterion 2: completed prefix len={} aborted={} slope_words={slope_words:.4} \
         slope_orbits={slope_orbits:.4} ({seconds:.1}s)",
        report.rows.len(),
        report.aborted
    );
    assert!((2.5..=3.5).contains(&slope_words), "slope_words {slope_words}");
    assert!((2.5..=3.5).contains(&slope_orbits), "slope_orbits {slope_orbits}");
    assert!(seconds <= 1800.0, "criterion 2 exceeded thirty minutes: {seconds:.1}s");
    println!("criterion 2: PASS");
}

/// Criterion 3: the prefix-injection sandwich
/// `#W(q, T + log||A(q)||) >= #W_sector(T) >= #W(q, T)` holds exactly at
/// every grid T (integer grid 4..10 here) for q = (a,1)(b,1) on the torus
/// class.
#[test]
fn c03_prefix_injection_sandwich_exact() {
    let started = Instant::now();
    let class = class_of(&[2, 1]);
    let base = perm(&[2, 1]);
    let q = Word::from_tokens(&base, &[(Op::A, 1), (Op::B, 1)]).unwrap();
    let log_norm_q = q.matrix().log_col_norm();
    assert!((log_norm_q - 3.0f64.ln()).abs() < 1e-12);
    let opts = CountOptions { budget: u64::MAX / 4, threads: 1, ..Default::default() };
    let prefix_count = |t: f64| -> u64 {
        let query = EnumQuery {
            class: class.clone(),
            t_bound: t,
            prefix: Some(q.clone()),
            sector: None,
        };
        count_at(&query, &opts).unwrap().0.n_words
    };
    let sector_count = |t: f64| -> u64 {
        let query = EnumQuery {
            class: class.clone(),
            t_bound: t,
            prefix: None,
            sector: Some(SectorQuery { base: base.clone(), first: Op::A }),
        };
        count_at(&query, &opts).unwrap().0.n_words
    };
    let mut rows = Vec::new();
    for t in (4..=10).map(f64::from) {
        let left = prefix_count(t + log_norm_q);
        let middle = sector_count(t);
        let right = prefix_count(t);
        assert!(left >= middle, "T={t}: left {left} < middle {middle}");
        assert!(middle >= right, "T={t}: middle {middle} < right {right}");
        rows.push((t, left, middle, right));
    }
    println!(
        "criterion 3: sandwich exact on T=4..10; top row T=10: {} >= {} >= {} ({:.1}s)",
        rows.last().unwrap().1,
        rows.last().unwrap().2,
        rows.last().unwrap().3,
        started.elapsed().as_secs_f64()
    );
    println!("criterion 3: PASS");
}

/// Criterion 4: over all enumerated m=2 words with T <= 12, the measured
/// minimum of `log||A(w)|| / |w|` stays above 0.4 (the golden-ratio rate is
/// the true floor), and the independent brute force agrees on the minimum.
#[test]
fn c04_norm_growth_rate_floor() {
    let data = criterion1_data();
    let alpha = data.report.alpha_min.expect("alpha tracked");
    assert!(
        (alpha.min_ratio - data.oracle.min_log_ratio).abs() <= 1e-12,
        "engine {} vs oracle {}",
        alpha.min_ratio,
        data.oracle.min_log_ratio
    );
    println!(
        "criterion 4: min log||A(w)||/|w| = {:.6} (witness norm {} at {} letters), floor 0.4",
        alpha.min_ratio, alpha.witness_norm, alpha.witness_len
    );
    assert!(alpha.min_ratio >= 0.4, "alpha {} below 0.4", alpha.min_ratio);
    println!("criterion 4: PASS");
}

fn random_admissible_words(
    class: &RauzyClass,
    count: usize,
    seed: u64,
    max_letters: usize,
    norm_cap: u64,
) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let start = rng.gen_range(0..class.len());
        let first_op = if rng.gen_bool(0.5) { Op::A } else { Op::B };
        let mut letters: Vec<Letter> = Vec::new();
        let mut vertex = start;
        let mut op = first_op;
        let mut closed = false;
        for _ in 0..max_letters {
            let n = rng.gen_range(1..=3u64);
            let letter = Letter::new(op, n, class.member(vertex).clone()).unwrap();
            vertex = class.index_of(&letter.target()).unwrap();
            letters.push(letter);
            op = op.other();
            if vertex == start && letters.len() % 2 == 0 && rng.gen_bool(0.4) {
                closed = true;
                break;
            }
        }
        if !closed {
            continue;
        }
        let word = Word::new(letters).unwrap();
        // forward iteration amplifies the eigenvector's float error by
        // roughly the spectral radius, so the 1e-8 fixed-point check needs
        // desk-sized norms
        if word.is_admissible()
            && word.matrix().col_norm_u64().map_or(false, |n| n <= norm_cap)
        {
            out.push(word);
        }
    }
    out
}

/// Criterion 5: spectral identities of periodic points for 10^3 random
/// admissible words over m=2 and m=3: the eigen-equation holds to 1e-9
/// relative and |w| accelerated steps fix the point to 1e-8.
#[test]
fn c05_periodic_point_spectral_identities() {
    let started = Instant::now();
    let mut total = 0usize;
    for (images, count, seed) in [(vec![2usize, 1], 500, 101u64), (vec![3, 2, 1], 500, 102)] {
        let class = class_of(&images);
        for word in random_admissible_words(&class, count, seed, 12, 10_000) {
            let (point, log_rho) = zippered::periodic_point(&word).unwrap();
            let mat = word.matrix();
            let image = mat.mul_vec_f64(point.lambda());
            let rho = log_rho.exp();
            for (got, lam) in image.iter().zip(point.lambda()) {
                assert!(
                    (got - rho * lam).abs() <= 1e-9 * got.abs(),
                    "eigen residual for {word:?}"
                );
            }
            let mut cur = point.clone();
            for _ in 0..word.len() {
                cur = zorich_step(&cur).unwrap().0;
            }
            assert_eq!(cur.pi(), point.pi());
            for (a, b) in cur.lambda().iter().zip(point.lambda()) {
                assert!((a - b).abs() <= 1e-8, "acceleration does not fix {word:?}");
            }
            total += 1;
        }
    }
    println!(
        "criterion 5: {total} random admissible words verified ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
    println!("criterion 5: PASS");
}

/// Criterion 6: zippered-rectangle identities on 10^5 delta samples per
/// class (m = 2, 3, 4): cone/constraint equivalence in both directions,
/// agreement of the two area formulas to 1e-12 relative, and an exact-shape
/// round trip to 1e-12.
#[test]
fn c06_zippered_rectangle_identities() {
    let started = Instant::now();
    for images in [vec![2usize, 1], vec![3, 2, 1], vec![4, 3, 2, 1]] {
        let pi = perm(&images);
        let m = pi.len();
        let mut rng = ChaCha8Rng::seed_from_u64(600 + m as u64);
        let mut checked = 0u64;
        let mut max_area = 0.0f64;
        let mut max_round = 0.0f64;
        while checked < 100_000 {
            let delta: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lambda = random_simplex_point(m, &mut rng);
            let d = DeltaCoords::new(lambda, pi.clone(), delta).unwrap();
            let margin = interior_margin(&d);
            if margin.abs() < 1e-7 {
                continue;
            }
            checked += 1;
            let zip_violations: Vec<Violation> = d
                .to_rectangle()
                .validate()
                .into_iter()
                .filter(|v| !matches!(v, Violation::ZipOne { .. }))
                .collect();
            if margin > 0.0 {
                assert!(zip_violations.is_empty(), "inside cone but invalid: {zip_violations:?}");
                let rect = d.to_rectangle();
                let by_delta = d.area();
                let by_h = rect.area();
                max_area = max_area.max((by_delta - by_h).abs() / by_h.abs());
                let back = rect.to_delta();
                for (x, y) in back.delta.iter().zip(&d.delta) {
                    max_round = max_round.max((x - y).abs());
                }
            } else {
                assert!(!zip_violations.is_empty(), "outside cone but valid: {:?}", d.delta);
            }
        }
        assert!(max_area <= 1e-12, "area mismatch {max_area} at m={m}");
        assert!(max_round <= 1e-12, "round trip error {max_round} at m={m}");
    }
    println!(
        "criterion 6: equivalence + area + round trip on 3x100000 samples ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
    println!("criterion 6: PASS");
}

/// Criterion 7: the renormalization map commutes with the flow and preserves
/// the area to 1e-12 on 10^3 samples, and the transversal first-return map
/// projects to the accelerated induction exactly in rational arithmetic on
/// 10^2 short trajectories.
#[test]
fn c07_flow_renormalization_algebra() {
    use num_rational::BigRational;
    let started = Instant::now();
    for images in [vec![2usize, 1], vec![3, 2, 1]] {
        let pi = perm(&images);
        let m = pi.len();
        let mut rng = ChaCha8Rng::seed_from_u64(700 + m as u64);
        let mut checked = 0;
        while checked < 1_000 {
            let delta = sample_k_pi(&pi, &mut rng, 100_000).unwrap();
            let lambda = random_simplex_point(m, &mut rng);
            let d = DeltaCoords::new(lambda, pi.clone(), delta).unwrap();
            let t = rng.gen_range(-1.0..1.0);
            let (u_then_flow, op1) = match u_map(&flow(&d, t)) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let (u_first, op2) = u_map(&d).unwrap();
            assert_eq!(op1, op2);
            let flow_then_u = flow(&u_first, t);
            assert_eq!(u_then_flow.pi, flow_then_u.pi);
            for i in 0..m {
                assert!((u_then_flow.lambda[i] - flow_then_u.lambda[i]).abs() <= 1e-12);
                assert!((u_then_flow.delta[i] - flow_then_u.delta[i]).abs() <= 1e-12);
            }
            let area_err = (u_first.area() - d.area()).abs() / d.area().abs().max(1e-300);
            assert!(area_err <= 1e-12, "area drift {area_err}");
            checked += 1;
        }
    }

    // exact rational first-return projection on 100 short trajectories
    let pi = perm(&[2, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut trajectories = 0;
    while trajectories < 100 {
        let denom = 1_000_003i64;
        let cut = rng.gen_range(1..denom);
        let lam = vec![
            BigRational::new(cut.into(), denom.into()),
            BigRational::new((denom - cut).into(), denom.into()),
        ];
        let num = rng.gen_range(-999i64..=999);
        let delta = vec![
            BigRational::new(num.into(), 1000.into()),
            BigRational::new((-num).into(), 1000.into()) + BigRational::new(1.into(), 2.into()),
        ];
        let mut d = match DeltaCoords::new(lam.clone(), pi.clone(), delta) {
            Ok(d) => d,
            Err(_) => continue,
        };
        if !d.validate().is_empty() || on_transversal(&d).is_none() {
            continue;
        }
        let mut p = IETPoint::new(lam, pi.clone()).unwrap();
        let mut steps = 0;
        loop {
            let fr = match first_return(&d) {
                Ok(fr) => fr,
                Err(_) => break,
            };
            let (q, letter) = match zorich_step(&p) {
                Ok(v) => v,
                Err(_) => break,
            };
            assert_eq!(fr.point.pi, *q.pi());
            assert_eq!(fr.letter, letter);
            for (u, v) in fr.point.lambda.iter().zip(q.lambda()) {
                assert_eq!(u, v, "rational projection must be exact");
            }
            d = fr.point;
            p = q;
            steps += 1;
            if steps >= 2 {
                break;
            }
        }
        if steps >= 1 {
            trajectories += 1;
        }
    }
    println!(
        "criterion 7: commutation + area on 2x1000 samples, {trajectories} exact rational \
         first returns ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
    println!("criterion 7: PASS");
}

/// Criterion 8: conditional leaf measures scale by exp(mt) on expanding
/// leaves and exp(-mt) on contracting leaves within 3 sigma, and coordinate
/// volume is preserved within 2%, for m = 2, 3 and t in {0.1, 0.2}.
#[test]
fn c08_uniform_expansion_contraction() {
    let started = Instant::now();
    for images in [vec![2usize, 1], vec![3, 2, 1]] {
        let pi = perm(&images);
        for t in [0.1, 0.2] {
            let cfg = McConfig { seed: 800, samples: 150_000, tolerance_sigmas: 3.0 };
            let report = mc_expansion(&pi, t, &cfg).unwrap();
            assert!(
                report.f_plus.pass,
                "m={} t={t} expanding leaf: {:?}",
                pi.len(),
                report.f_plus
            );
            assert!(
                report.f_minus.pass,
                "m={} t={t} contracting leaf: {:?}",
                pi.len(),
                report.f_minus
            );
            assert!(
                report.volume_rel_err <= 0.02,
                "volume preservation off by {}",
                report.volume_rel_err
            );
            assert_eq!(report.jacobian_log, 0.0);
        }
    }
    println!(
        "criterion 8: leaf scaling within 3 sigma and volume within 2% ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
    println!("criterion 8: PASS");
}

/// Criterion 9: cylinder frequency ratios pass at 3 sigma with 10^5 samples,
/// and the exact identity `leb(w) * prod(colsums) = 1` holds for every
/// enumerated word of the m=2 (T <= 5) and m=3 (T <= 4) runs.
#[test]
fn c09_cylinder_statistics() {
    let started = Instant::now();
    let base = perm(&[2, 1]);
    let pairs = [
        (vec![(Op::A, 1)], vec![(Op::A, 5)]),
        (vec![(Op::A, 1), (Op::B, 1)], vec![(Op::A, 2), (Op::B, 1)]),
    ];
    for (first, second) in pairs {
        let w1 = Word::from_tokens(&base, &first).unwrap();
        let w2 = Word::from_tokens(&base, &second).unwrap();
        let cfg = McConfig { seed: 900, samples: 100_000, tolerance_sigmas: 3.0 };
        let report = mc_cylinder(&w1, &w2, &cfg).unwrap();
        assert!(
            report.pass,
            "ratio {} expected {} sigma {}",
            report.observed_ratio, report.expected_ratio, report.sigma
        );
    }

    let mut checked = 0u64;
    for (images, t) in [(vec![2usize, 1], 5.0), (vec![3, 2, 1], 4.0)] {
        let query = EnumQuery::new(class_of(&images), t);
        enumerate(&query, 0, |word, _| {
            assert!(cylinder_identity_exact(word), "identity fails for {word:?}");
            checked += 1;
            Ok(true)
        })
        .unwrap();
    }
    assert!(checked > 30_000, "only {checked} words checked");
    println!(
        "criterion 9: two 3-sigma ratio tests and {checked} exact identities ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
    println!("criterion 9: PASS");
}

/// Criterion 10 records the intentional exclusions: the entropy value of the
/// flow, strong mixing, and the sharp constants of the Margulis-type lemma
/// are taken as given and only exercised indirectly by criteria 1-3 and 9.
#[test]
fn c10_documented_exclusions() {
    println!(
        "criterion 10: N/A by design (entropy value, mixing, and sharp Margulis \
         constants are not independently reproduced)"
    );
    println!("criterion 10: PASS");
}

/// The growth rates under the two orbit-deduplication modes agree at
/// moderate bounds (recorded alongside the main criteria: the dedup decision
/// does not change the logarithmic slope).
#[test]
fn c11_orbit_mode_slopes_agree() {
    use zippered::counting::OrbitMode;
    let class = class_of(&[2, 1]);
    let grid: Vec<f64> = (3..=7).map(f64::from).collect();
    let canonical = count_grid(
        &EnumQuery::new(class.clone(), 1.0),
        &grid,
        &CountOptions::default(),
    )
    .unwrap();
    let any = count_grid(
        &EnumQuery::new(class, 1.0),
        &grid,
        &CountOptions { orbit_mode: OrbitMode::AnyRotationWithinBound, ..Default::default() },
    )
    .unwrap();
    let s1 = canonical.slope_orbits.unwrap().slope;
    let s2 = any.slope_orbits.unwrap().slope;
    println!("orbit-mode slopes: canonical {s1:.4} vs any-rotation {s2:.4}");
    assert!((s1 - s2).abs() < 0.35, "slopes diverge: {s1} vs {s2}");
    for (a, b) in canonical.rows.iter().zip(&any.rows) {
        assert!(b.n_orbits >= a.n_orbits);
        assert_eq!(a.n_words, b.n_words);
    }
}
