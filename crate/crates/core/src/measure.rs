//! Seeded Monte-Carlo verification of the measure-theoretic identities:
//! cylinder volumes, the cylinder-measure bracket, and the uniform
//! expansion/contraction of the conditional leaf measures under the flow.
//!
//! Every estimate draws from per-sample substreams of a counter-based
//! generator, so reports are bit-reproducible for a fixed `(seed, samples)`
//! and independent of any parallel scheduling.

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::induction::{random_simplex_point, zorich_step, IETPoint};
use crate::perm::{Op, Permutation};
use crate::rect::{sample_k_pi, DeltaCoords};
use crate::symbolic::{cylinder_leb, Word};

/// Monte-Carlo configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
    pub tolerance_sigmas: f64,
}

impl Default for McConfig {
    fn default() -> McConfig {
        McConfig { seed: 0, samples: 100_000, tolerance_sigmas: 3.0 }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.samples < 1_000 {
            return Err(Error::InvalidInput("samples must be at least 10^3".into()));
        }
        Ok(())
    }
}

/// Independent substream for sample `index`.
fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Membership of `lambda` in the pullback cone of a word: the forward
/// elementary orbit of `(lambda, pi(w_1))` performs exactly the word's
/// elementary operation sequence (equivalently, the coding starts with the
/// word's letters, the last run relaxed to "at least"). Tested by pulling
/// the inverse elementary factors through and checking strict positivity;
/// `None` on a boundary (measure-zero) sample.
fn in_pullback_cone(word: &Word, lambda: &[f64]) -> Option<bool> {
    let mut cur = lambda.to_vec();
    for letter in word.letters() {
        let mut pi = letter.pi.clone();
        for _ in 0..letter.n {
            let m = cur.len();
            let k = pi.last_preimage0();
            match letter.op {
                Op::B => {
                    cur[m - 1] -= cur[k];
                }
                Op::A => {
                    let mut next = Vec::with_capacity(m);
                    next.extend_from_slice(&cur[..k]);
                    next.push(cur[k] - cur[m - 1]);
                    next.push(cur[m - 1]);
                    next.extend_from_slice(&cur[k + 1..m - 1]);
                    cur = next;
                }
            }
            let changed = if letter.op == Op::B { cur[m - 1] } else { cur[k] };
            if changed == 0.0 {
                return None;
            }
            if changed < 0.0 {
                return Some(false);
            }
            pi = pi.apply_op(letter.op).ok()?;
        }
    }
    Some(true)
}

/// Report of a two-cylinder ratio test.
#[derive(Debug, Clone, Serialize)]
pub struct CylinderReport {
    pub samples: u64,
    pub hits_first: u64,
    pub hits_second: u64,
    pub hits_both: u64,
    pub discarded: u64,
    pub observed_ratio: f64,
    pub expected_ratio: f64,
    pub expected_ratio_exact: String,
    pub sigma: f64,
    pub tolerance_sigmas: f64,
    pub pass: bool,
}

/// Compares the empirical frequency ratio of two cylinders against the
/// exact `1 / prod(column sums)` ratio. Both words must share a base
/// permutation; the sampling measure is uniform on the length simplex.
pub fn mc_cylinder(first: &Word, second: &Word, cfg: &McConfig) -> Result<CylinderReport> {
    cfg.validate()?;
    if first.base() != second.base() {
        return Err(Error::InvalidInput(
            "cylinder words must share a base permutation".into(),
        ));
    }
    let m = first.base().len();
    let expected_exact = cylinder_leb(first) / cylinder_leb(second);
    let expected = rational_to_f64(&expected_exact);

    let mut hits1 = 0u64;
    let mut hits2 = 0u64;
    let mut both = 0u64;
    let mut discarded = 0u64;
    for i in 0..cfg.samples {
        let mut rng = substream(cfg.seed, i);
        let lambda = random_simplex_point(m, &mut rng);
        match (in_pullback_cone(first, &lambda), in_pullback_cone(second, &lambda)) {
            (Some(a), Some(b)) => {
                if a {
                    hits1 += 1;
                }
                if b {
                    hits2 += 1;
                }
                if a && b {
                    both += 1;
                }
            }
            _ => discarded += 1,
        }
    }
    let n = (cfg.samples - discarded) as f64;
    if hits2 == 0 {
        return Err(Error::InvalidInput(
            "second cylinder received no hits; increase samples".into(),
        ));
    }
    let p1 = hits1 as f64 / n;
    let p2 = hits2 as f64 / n;
    let p12 = both as f64 / n;
    let ratio = p1 / p2;
    // delta method with the empirical covariance (cylinders may nest)
    let var = (ratio * ratio / n)
        * ((1.0 - p1) / p1 + (1.0 - p2) / p2 - 2.0 * (p12 - p1 * p2) / (p1 * p2));
    let sigma = var.max(0.0).sqrt();
    let pass = (ratio - expected).abs() <= cfg.tolerance_sigmas * sigma;
    Ok(CylinderReport {
        samples: cfg.samples,
        hits_first: hits1,
        hits_second: hits2,
        hits_both: both,
        discarded,
        observed_ratio: ratio,
        expected_ratio: expected,
        expected_ratio_exact: expected_exact.to_string(),
        sigma,
        tolerance_sigmas: cfg.tolerance_sigmas,
        pass,
    })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// The exact sanity identity behind the cylinder formula:
/// `leb(w) * prod_j colsum_j(A(w)) = 1` in rational arithmetic.
pub fn cylinder_identity_exact(word: &Word) -> bool {
    let mat = word.matrix();
    let mut prod = BigRational::one();
    for s in mat.col_sums() {
        prod *= BigRational::from_integer(s.into());
    }
    cylinder_leb(word) * prod == BigRational::one()
}

/// Report of the cylinder-measure bracket estimate.
#[derive(Debug, Clone, Serialize)]
pub struct BracketReport {
    pub orbit_steps: u64,
    pub burn_in: u64,
    pub per_word: Vec<BracketEntry>,
    pub spread: f64,
    pub spread_limit: f64,
    pub identity_exact: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketEntry {
    pub letters: usize,
    pub matches: u64,
    pub windows: u64,
    pub probability: f64,
    pub norm: u64,
    /// `Prob(C(w)) * ||A(w)||^m`.
    pub value: f64,
}

/// Estimates `Prob(C(w)) ||A(w)||^m` for each `w = q tilde q` by the
/// Birkhoff frequency of the letter window along one long accelerated orbit,
/// and reports the spread `max/min`. The invariant measure is finite and
/// ergodic, so the frequencies converge; the defaults are statistical, not
/// certified.
pub fn lemma2_bracket(
    q: &Word,
    tildes: &[Word],
    cfg: &McConfig,
    spread_limit: f64,
) -> Result<BracketReport> {
    cfg.validate()?;
    // q must have an entrywise positive matrix
    let qm = q.matrix();
    for i in 0..qm.m() {
        for j in 0..qm.m() {
            if qm.entry_u64(i, j) == Some(0) {
                return Err(Error::InvalidInput(
                    "bracket words need an entrywise positive A(q)".into(),
                ));
            }
        }
    }
    let words: Vec<Word> = tildes
        .iter()
        .map(|tilde| q.concat(tilde)?.concat(q))
        .collect::<Result<_>>()?;
    for w in &words {
        if !w.is_admissible() {
            return Err(Error::NotAdmissible);
        }
    }
    let identity_exact = words.iter().all(cylinder_identity_exact);

    let burn_in = 1_000u64;
    let orbit_steps = cfg.samples.max(10_000);
    let m = q.base().len();

    // one long orbit; its letter stream visits every cylinder
    let mut rng = substream(cfg.seed, 0);
    let mut point = IETPoint::new(random_simplex_point(m, &mut rng), q.base().clone())?;
    let mut letters: Vec<(Op, u64, Permutation)> = Vec::with_capacity(orbit_steps as usize);
    for step in 0..(burn_in + orbit_steps) {
        let (next, letter) = zorich_step(&point)?;
        if step >= burn_in {
            letters.push((letter.op, letter.n, letter.pi.clone()));
        }
        point = next;
    }

    let mut per_word = Vec::new();
    let mut min_v = f64::INFINITY;
    let mut max_v = 0.0f64;
    for w in &words {
        let target: Vec<(Op, u64, Permutation)> =
            w.letters().iter().map(|l| (l.op, l.n, l.pi.clone())).collect();
        let len = target.len();
        if letters.len() < len {
            return Err(Error::InvalidInput("orbit shorter than the word".into()));
        }
        let windows = (letters.len() - len + 1) as u64;
        let mut matches = 0u64;
        for start in 0..windows as usize {
            if letters[start..start + len] == target[..] {
                matches += 1;
            }
        }
        let probability = matches as f64 / windows as f64;
        let norm = w
            .matrix()
            .col_norm_u64()
            .ok_or_else(|| Error::BoundTooLarge("norm exceeds u64".into()))?;
        let value = probability * (norm as f64).powi(m as i32);
        if probability > 0.0 {
            min_v = min_v.min(value);
            max_v = max_v.max(value);
        }
        per_word.push(BracketEntry { letters: len, matches, windows, probability, norm, value });
    }
    let spread = if per_word.is_empty() || min_v == 0.0 || !min_v.is_finite() {
        f64::INFINITY
    } else {
        max_v / min_v
    };
    let pass = per_word.is_empty()
        || (per_word.iter().all(|e| e.matches > 0) && spread <= spread_limit);
    Ok(BracketReport { orbit_steps, burn_in, per_word, spread, spread_limit, identity_exact, pass })
}

/// One leaf-measure estimate with its Monte-Carlo error.
#[derive(Debug, Clone, Serialize)]
pub struct LeafEstimate {
    pub measured_ratio: f64,
    pub expected_ratio: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Report of the uniform expansion/contraction checks.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub m: usize,
    pub t: f64,
    pub f_plus: LeafEstimate,
    pub f_minus: LeafEstimate,
    /// Monte-Carlo volume of a flowed box over its exact volume.
    pub volume_ratio: f64,
    pub volume_rel_err: f64,
    pub volume_pass: bool,
    /// The coordinate Jacobian exponent `m t + (-m t)`, identically zero.
    pub jacobian_log: f64,
    pub pass: bool,
}

/// A box on an area-one leaf together with the linear functional whose value
/// is the cone parameter.
struct ConeBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    weights: Vec<f64>,
}

impl ConeBox {
    /// Inside the cone over the box iff `0 < tau <= 1` and the leaf
    /// projection's free coordinates land in range.
    fn contains(&self, x: &[f64]) -> bool {
        let tau: f64 = x.iter().zip(&self.weights).map(|(a, b)| a * b).sum();
        if !(tau > 0.0 && tau <= 1.0) {
            return false;
        }
        for i in 0..self.lo.len() {
            let c = x[i] / tau;
            if c < self.lo[i] || c > self.hi[i] {
                return false;
            }
        }
        true
    }

    /// Axis-aligned bounding box of the cone (segments from the origin to
    /// the leaf box).
    fn bounding(&self) -> (Vec<f64>, Vec<f64>, f64) {
        let m = self.weights.len();
        let mut lo = vec![0.0; m];
        let mut hi = vec![0.0; m];
        for i in 0..m - 1 {
            lo[i] = self.lo[i].min(0.0);
            hi[i] = self.hi[i].max(0.0);
        }
        // the last coordinate follows from tau = 1 on the leaf
        let corners = 1usize << (m - 1);
        let mut last_lo = f64::INFINITY;
        let mut last_hi = f64::NEG_INFINITY;
        for mask in 0..corners {
            let mut acc = 0.0;
            for i in 0..m - 1 {
                let v = if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] };
                acc += v * self.weights[i];
            }
            let last = (1.0 - acc) / self.weights[m - 1];
            last_lo = last_lo.min(last);
            last_hi = last_hi.max(last);
        }
        lo[m - 1] = last_lo.min(0.0);
        hi[m - 1] = last_hi.max(0.0);
        let volume: f64 = (0..m).map(|i| hi[i] - lo[i]).product();
        (lo, hi, volume)
    }

    /// Image under scaling the leaf by `factor` (the functional scales
    /// inversely).
    fn scaled(&self, factor: f64) -> ConeBox {
        ConeBox {
            lo: self.lo.iter().map(|x| x * factor).collect(),
            hi: self.hi.iter().map(|x| x * factor).collect(),
            weights: self.weights.iter().map(|w| w / factor).collect(),
        }
    }
}

fn mc_cone_volume(bx: &ConeBox, seed: u64, stream_base: u64, samples: u64) -> (f64, f64) {
    let (lo, hi, vol) = bx.bounding();
    let m = lo.len();
    let mut hits = 0u64;
    let mut x = vec![0.0; m];
    for i in 0..samples {
        let mut rng = substream(seed, stream_base + i);
        for j in 0..m {
            x[j] = rng.gen_range(lo[j]..hi[j]);
        }
        if bx.contains(&x) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (vol * p, vol * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Verifies that the conditional leaf measures transform by `exp(m t)` on
/// expanding leaves and `exp(-m t)` on contracting ones, and that the
/// coordinate volume is preserved.
pub fn mc_expansion(pi: &Permutation, t: f64, cfg: &McConfig) -> Result<ExpansionReport> {
    cfg.validate()?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidInput("t must lie in (0, 1]".into()));
    }
    let m = pi.len();
    let mut rng = substream(cfg.seed, u64::MAX / 2);
    // base zippered rectangle of unit area with interior margins
    let (lambda0, delta0, heights) = loop {
        let delta = sample_k_pi(pi, &mut rng, 100_000)?;
        let lambda_raw = random_simplex_point(m, &mut rng);
        let d = DeltaCoords::new(lambda_raw.clone(), pi.clone(), delta.clone())?;
        let h = d.to_rectangle().h;
        if h.iter().any(|&x| x < 1e-3) {
            continue;
        }
        let area: f64 = lambda_raw.iter().zip(&h).map(|(a, b)| a * b).sum();
        let lambda: Vec<f64> = lambda_raw.iter().map(|x| x / area).collect();
        break (lambda, delta, h);
    };

    // expanding leaf: delta frozen, lambda free; the weights are the heights
    let width = 0.2;
    let f_plus_box = ConeBox {
        lo: lambda0[..m - 1].iter().map(|x| x * (1.0 - width)).collect(),
        hi: lambda0[..m - 1].iter().map(|x| x * (1.0 + width)).collect(),
        weights: heights.clone(),
    };
    let (v_base, s_base) = mc_cone_volume(&f_plus_box, cfg.seed, 0, cfg.samples);
    let flowed_plus = f_plus_box.scaled(t.exp());
    let (v_img, s_img) = mc_cone_volume(&flowed_plus, cfg.seed, cfg.samples, cfg.samples);
    let f_plus = ratio_estimate(v_img, s_img, v_base, s_base, (m as f64 * t).exp(), cfg);

    // contracting leaf: lambda frozen, delta free; the weights are the area
    // coefficients of delta
    let area_coeffs = delta_area_coefficients(&lambda0, pi);
    let base_tau: f64 = delta0.iter().zip(&area_coeffs).map(|(a, b)| a * b).sum();
    if base_tau <= 0.0 {
        return Err(Error::InvalidInput(
            "sampled leaf has a nonpositive area functional; reseed".into(),
        ));
    }
    let delta1: Vec<f64> = delta0.iter().map(|x| x / base_tau).collect();
    let mut rho = 0.2;
    let f_minus_box = loop {
        let bx = ConeBox {
            lo: delta1[..m - 1].iter().map(|x| x - rho * x.abs().max(0.05)).collect(),
            hi: delta1[..m - 1].iter().map(|x| x + rho * x.abs().max(0.05)).collect(),
            weights: area_coeffs.clone(),
        };
        if delta_box_inside_cone(&bx, pi) {
            break bx;
        }
        rho *= 0.5;
        if rho < 1e-6 {
            return Err(Error::InvalidInput(
                "could not fit a delta box inside the cone".into(),
            ));
        }
    };
    let (w_base, sw_base) = mc_cone_volume(&f_minus_box, cfg.seed, 2 * cfg.samples, cfg.samples);
    let flowed_minus = f_minus_box.scaled((-t).exp());
    let (w_img, sw_img) = mc_cone_volume(&flowed_minus, cfg.seed, 3 * cfg.samples, cfg.samples);
    let f_minus = ratio_estimate(w_img, sw_img, w_base, sw_base, (-(m as f64) * t).exp(), cfg);

    // coordinate-volume preservation in the full (lambda, delta) chart
    let (volume_ratio, volume_rel_err) = volume_preservation(&lambda0, &delta1, t, cfg);
    let volume_pass = volume_rel_err <= 0.02;

    let jacobian_log = m as f64 * t + (-(m as f64) * t);
    let pass = f_plus.pass && f_minus.pass && volume_pass && jacobian_log == 0.0;
    Ok(ExpansionReport {
        m,
        t,
        f_plus,
        f_minus,
        volume_ratio,
        volume_rel_err,
        volume_pass,
        jacobian_log,
        pass,
    })
}

fn ratio_estimate(
    v_img: f64,
    s_img: f64,
    v_base: f64,
    s_base: f64,
    expected: f64,
    cfg: &McConfig,
) -> LeafEstimate {
    let ratio = v_img / v_base;
    let sigma = ratio * ((s_img / v_img).powi(2) + (s_base / v_base).powi(2)).sqrt();
    LeafEstimate {
        measured_ratio: ratio,
        expected_ratio: expected,
        sigma,
        pass: (ratio - expected).abs() <= cfg.tolerance_sigmas * sigma,
    }
}

/// Coefficients `c_i` with `Area(lambda, delta) = sum_i c_i delta_i`.
fn delta_area_coefficients(lambda: &[f64], pi: &Permutation) -> Vec<f64> {
    let m = lambda.len();
    let mut pos_suffix = vec![0.0; m + 1];
    for i in (0..m).rev() {
        pos_suffix[i] = pos_suffix[i + 1] + lambda[i];
    }
    let mut img_suffix = vec![0.0; m + 1];
    for v in (0..m).rev() {
        img_suffix[v] = img_suffix[v + 1] + lambda[pi.preimage0(v)];
    }
    (0..m)
        .map(|i| img_suffix[pi.image0(i) + 1] - pos_suffix[i + 1])
        .collect()
}

/// Every corner of the leaf box (last coordinate resolved from the area
/// functional) must satisfy the cone inequalities with a margin.
fn delta_box_inside_cone(bx: &ConeBox, pi: &Permutation) -> bool {
    let m = bx.weights.len();
    let corners = 1usize << (m - 1);
    for mask in 0..corners {
        let mut delta = vec![0.0; m];
        let mut acc = 0.0;
        for i in 0..m - 1 {
            delta[i] = if mask >> i & 1 == 1 { bx.hi[i] } else { bx.lo[i] };
            acc += delta[i] * bx.weights[i];
        }
        delta[m - 1] = (1.0 - acc) / bx.weights[m - 1];
        let d = DeltaCoords::new(vec![1.0 / m as f64; m], pi.clone(), delta).unwrap();
        if crate::rect::interior_margin(&d) <= 1e-9 {
            return false;
        }
    }
    true
}

/// Monte-Carlo check that the flow preserves coordinate volume: the image of
/// a `(lambda, delta)` box is measured from a padded hull against its exact
/// volume.
fn volume_preservation(lambda0: &[f64], delta0: &[f64], t: f64, cfg: &McConfig) -> (f64, f64) {
    let m = lambda0.len();
    let dim = 2 * m;
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for i in 0..m {
        lo[i] = lambda0[i] * 0.8;
        hi[i] = lambda0[i] * 1.2;
        lo[m + i] = delta0[i] - 0.1;
        hi[m + i] = delta0[i] + 0.1;
    }
    let exact: f64 = (0..dim).map(|i| hi[i] - lo[i]).product();
    let up = t.exp();
    let down = (-t).exp();
    let mut hull_lo = vec![0.0; dim];
    let mut hull_hi = vec![0.0; dim];
    for i in 0..dim {
        let (a, b) = if i < m {
            (lo[i] * up, hi[i] * up)
        } else {
            (lo[i] * down, hi[i] * down)
        };
        let mid = 0.5 * (a + b);
        let half = 0.65 * (b - a);
        hull_lo[i] = mid - half;
        hull_hi[i] = mid + half;
    }
    let hull_vol: f64 = (0..dim).map(|i| hull_hi[i] - hull_lo[i]).product();
    let mut hits = 0u64;
    let samples = cfg.samples;
    let mut x = vec![0.0; dim];
    for i in 0..samples {
        let mut rng = substream(cfg.seed, 4 * cfg.samples + i);
        for j in 0..dim {
            x[j] = rng.gen_range(hull_lo[j]..hull_hi[j]);
        }
        // map back by the inverse flow and test the original box
        let mut inside = true;
        for j in 0..dim {
            let back = if j < m { x[j] * down } else { x[j] * up };
            if back < lo[j] || back > hi[j] {
                inside = false;
                break;
            }
        }
        if inside {
            hits += 1;
        }
    }
    let measured = hull_vol * hits as f64 / samples as f64;
    (measured / exact, (measured - exact).abs() / exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induction::encode;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    fn word(base: &[usize], tokens: &[(Op, u64)]) -> Word {
        Word::from_tokens(&perm(base), tokens).unwrap()
    }

    #[test]
    fn cylinder_ratio_matches_exact_volumes() {
        // leb((a,1)) = 1/2, leb((a,5)) = 1/6: ratio 3 within 3 sigma
        let w1 = word(&[2, 1], &[(Op::A, 1)]);
        let w2 = word(&[2, 1], &[(Op::A, 5)]);
        let report = mc_cylinder(&w1, &w2, &McConfig::default()).unwrap();
        assert!((report.expected_ratio - 3.0).abs() < 1e-12);
        assert_eq!(report.expected_ratio_exact, "3");
        assert!(report.pass, "observed {} +- {}", report.observed_ratio, report.sigma);
        assert!(report.discarded < report.samples / 1000);
    }

    #[test]
    fn cylinder_ratio_self_is_one() {
        let w = word(&[2, 1], &[(Op::A, 1), (Op::B, 2)]);
        let report =
            mc_cylinder(&w, &w, &McConfig { samples: 2_000, ..Default::default() }).unwrap();
        assert_eq!(report.hits_first, report.hits_second);
        assert_eq!(report.observed_ratio, 1.0);
        assert!(report.pass);
    }

    #[test]
    fn cylinder_membership_agrees_with_coding() {
        // pullback-cone membership = coding starts with the word's letters,
        // the last run relaxed to "at least n"
        let w = word(&[2, 1], &[(Op::A, 2), (Op::B, 3)]);
        let mut rng = substream(99, 0);
        let mut checked = 0;
        while checked < 300 {
            let lambda = random_simplex_point(2, &mut rng);
            let member = match in_pullback_cone(&w, &lambda) {
                Some(v) => v,
                None => continue,
            };
            let p = IETPoint::new(lambda, perm(&[2, 1])).unwrap();
            let coded = match encode(&p, 2) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let l = coded.letters();
            let coding_member = l[0].op == Op::A && l[0].n == 2 && l[1].n >= 3;
            assert_eq!(member, coding_member);
            checked += 1;
        }
    }

    #[test]
    fn cylinder_identity_is_exact() {
        for tokens in [vec![(Op::A, 1)], vec![(Op::A, 1), (Op::B, 1)], vec![(Op::B, 3), (Op::A, 2)]]
        {
            let w = word(&[2, 1], &tokens);
            assert!(cylinder_identity_exact(&w));
        }
    }

    #[test]
    fn bracket_reports_bounded_spread() {
        let q = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
        let tildes = vec![
            word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]),
            word(&[2, 1], &[(Op::A, 2), (Op::B, 1)]),
            word(&[2, 1], &[(Op::A, 1), (Op::B, 2)]),
        ];
        let cfg = McConfig { seed: 7, samples: 200_000, tolerance_sigmas: 3.0 };
        let report = lemma2_bracket(&q, &tildes, &cfg, 100.0).unwrap();
        assert!(report.identity_exact);
        assert!(report.pass, "spread {}", report.spread);
        for e in &report.per_word {
            assert!(e.matches > 0, "empty cylinder estimate");
        }
    }

    #[test]
    fn bracket_rejects_nonpositive_q() {
        let q = word(&[2, 1], &[(Op::A, 1)]);
        assert!(lemma2_bracket(&q, &[], &McConfig::default(), 100.0).is_err());
    }

    #[test]
    fn bracket_trivially_passes_on_empty_list() {
        let q = word(&[2, 1], &[(Op::A, 1), (Op::B, 1)]);
        let cfg = McConfig { samples: 10_000, ..Default::default() };
        let report = lemma2_bracket(&q, &[], &cfg, 100.0).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn expansion_ratios_within_three_sigma() {
        for images in [vec![2usize, 1], vec![3, 2, 1]] {
            let pi = perm(&images);
            let cfg = McConfig { seed: 11, samples: 120_000, tolerance_sigmas: 3.0 };
            let report = mc_expansion(&pi, 0.1, &cfg).unwrap();
            assert!(report.f_plus.pass, "F+ {:?}", report.f_plus);
            assert!(report.f_minus.pass, "F- {:?}", report.f_minus);
            assert!(report.volume_pass, "volume rel err {}", report.volume_rel_err);
            assert_eq!(report.jacobian_log, 0.0);
        }
    }

    #[test]
    fn expansion_doubling_t_squares_the_ratio() {
        let pi = perm(&[2, 1]);
        let cfg = McConfig { seed: 13, samples: 150_000, tolerance_sigmas: 3.0 };
        let r1 = mc_expansion(&pi, 0.1, &cfg).unwrap();
        let r2 = mc_expansion(&pi, 0.2, &cfg).unwrap();
        let squared = r1.f_plus.measured_ratio.powi(2);
        let tol = 3.0 * (2.0 * r1.f_plus.sigma + r2.f_plus.sigma);
        assert!((r2.f_plus.measured_ratio - squared).abs() <= tol);
    }

    #[test]
    fn expansion_reports_reproducible() {
        let pi = perm(&[2, 1]);
        let cfg = McConfig { seed: 3, samples: 20_000, tolerance_sigmas: 3.0 };
        let a = mc_expansion(&pi, 0.2, &cfg).unwrap();
        let b = mc_expansion(&pi, 0.2, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
