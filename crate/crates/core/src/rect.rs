//! Zippered rectangles, their defining constraints, delta coordinates, the
//! Teichmüller flow, the renormalization map `U`, and the first-return map
//! of the flow on the transversal.
//!
//! The `(lambda, h, a, pi)` presentation carries four constraint families;
//! the equivalent cone presentation keeps `(lambda, pi, delta)` with
//! `delta_i = a_{i-1} - a_i` and two families of prefix-sum inequalities.
//! The inverse accumulation is `a_i = -(delta_1 + .. + delta_i)`; the
//! auxiliary `a_m = -(delta_1 + .. + delta_m)` is unconstrained in sign.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::induction::{IETPoint, Sector, STALL_LIMIT};
use crate::perm::{Op, Permutation};
use crate::scalar::Scalar;
use crate::symbolic::Letter;

/// A zippered rectangle `(lambda, h, a, pi)` with auxiliary components
/// `a_0 = h_0 = a_{m+1} = h_{m+1} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZippedRectangle<S: Scalar> {
    pub lambda: Vec<S>,
    pub h: Vec<S>,
    pub a: Vec<S>,
    pub pi: Permutation,
}

/// The cone presentation `(lambda, pi, delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCoords<S: Scalar> {
    pub lambda: Vec<S>,
    pub pi: Permutation,
    pub delta: Vec<S>,
}

/// A violated constraint, identified by family and 1-indexed position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Matching equation `h_i - a_i = h_{pi^{-1}(pi(i)+1)} - a_{...-1}`.
    ZipOne { i: usize },
    /// `h_i >= 0`.
    ZipTwoH { i: usize },
    /// `a_i >= 0`, `i <= m-1`.
    ZipTwoA { i: usize },
    /// `a_i <= min(h_i, h_{i+1})` away from `m` and `pi^{-1}m`.
    ZipThree { i: usize },
    /// `a_m <= h_m`.
    ZipFourUpper,
    /// `a_m >= -h_{pi^{-1}m}`.
    ZipFourLower,
    /// `a_{pi^{-1}m} <= h_{pi^{-1}m + 1}`.
    ZipFourSeam,
    /// `delta_1 + .. + delta_i <= 0`, `i <= m-1`.
    DeltaOne { i: usize },
    /// `delta_{pi^{-1}1} + .. + delta_{pi^{-1}i} >= 0`, `i <= m-1`.
    DeltaTwo { i: usize },
    /// `lambda_i > 0`.
    LambdaPositive { i: usize },
}

fn tol<S: Scalar>() -> S {
    if S::EXACT {
        S::zero()
    } else {
        S::from_f64_approx(1e-9)
    }
}

impl<S: Scalar> ZippedRectangle<S> {
    pub fn m(&self) -> usize {
        self.pi.len()
    }

    fn h_aux(&self, i: usize) -> S {
        // 1-indexed with h_0 = h_{m+1} = 0
        if i == 0 || i == self.m() + 1 {
            S::zero()
        } else {
            self.h[i - 1].clone()
        }
    }

    fn a_aux(&self, i: usize) -> S {
        if i == 0 || i == self.m() + 1 {
            S::zero()
        } else {
            self.a[i - 1].clone()
        }
    }

    /// Checks all four constraint families; violations are data, not errors.
    pub fn validate(&self) -> Vec<Violation> {
        let m = self.m();
        let eps = tol::<S>();
        let mut out = Vec::new();

        // matching equations, i = 0..m, with pi(0) = 0 and pi^{-1}(m+1) = m+1
        for i in 0..=m {
            let lhs = self.h_aux(i) - self.a_aux(i);
            let image_next = if i == 0 { 1 } else { self.pi.image0(i - 1) + 2 };
            let rhs = if image_next == m + 1 {
                S::zero() - self.a_aux(m)
            } else {
                let p = self.pi.preimage0(image_next - 1) + 1;
                self.h_aux(p) - self.a_aux(p - 1)
            };
            if (lhs.clone() - rhs).abs() > eps {
                out.push(Violation::ZipOne { i });
            }
        }

        for i in 1..=m {
            if self.h_aux(i) < S::zero() - eps.clone() {
                out.push(Violation::ZipTwoH { i });
            }
        }
        for i in 1..m {
            if self.a_aux(i) < S::zero() - eps.clone() {
                out.push(Violation::ZipTwoA { i });
            }
        }

        let k = self.pi.last_preimage0() + 1; // 1-indexed pi^{-1}(m)
        for i in 1..m {
            if i == k {
                continue;
            }
            let bound = if self.h_aux(i) < self.h_aux(i + 1) {
                self.h_aux(i)
            } else {
                self.h_aux(i + 1)
            };
            if self.a_aux(i) > bound + eps.clone() {
                out.push(Violation::ZipThree { i });
            }
        }

        if self.a_aux(m) > self.h_aux(m) + eps.clone() {
            out.push(Violation::ZipFourUpper);
        }
        if self.a_aux(m) < (S::zero() - self.h_aux(k)) - eps.clone() {
            out.push(Violation::ZipFourLower);
        }
        if self.a_aux(k) > self.h_aux(k + 1) + eps.clone() {
            out.push(Violation::ZipFourSeam);
        }

        for (i, lam) in self.lambda.iter().enumerate() {
            if !(lam.clone() > S::zero()) {
                out.push(Violation::LambdaPositive { i: i + 1 });
            }
        }
        out
    }

    /// `delta_i = a_{i-1} - a_i`.
    pub fn to_delta(&self) -> DeltaCoords<S> {
        let m = self.m();
        let delta = (1..=m)
            .map(|i| self.a_aux(i - 1) - self.a_aux(i))
            .collect();
        DeltaCoords {
            lambda: self.lambda.clone(),
            pi: self.pi.clone(),
            delta,
        }
    }

    /// Area `sum_i lambda_i h_i`.
    pub fn area(&self) -> S {
        let mut acc = S::zero();
        for (lam, h) in self.lambda.iter().zip(&self.h) {
            acc = acc + lam.clone() * h.clone();
        }
        acc
    }
}

impl<S: Scalar> DeltaCoords<S> {
    pub fn new(lambda: Vec<S>, pi: Permutation, delta: Vec<S>) -> Result<DeltaCoords<S>> {
        if lambda.len() != pi.len() || delta.len() != pi.len() {
            return Err(Error::DimensionMismatch(
                "lambda, delta, pi must share length".into(),
            ));
        }
        Ok(DeltaCoords { lambda, pi, delta })
    }

    pub fn m(&self) -> usize {
        self.pi.len()
    }

    /// Cone and positivity checks in the delta presentation.
    pub fn validate(&self) -> Vec<Violation> {
        let m = self.m();
        let eps = tol::<S>();
        let mut out = Vec::new();
        let mut prefix = S::zero();
        for i in 1..m {
            prefix = prefix + self.delta[i - 1].clone();
            if prefix > eps.clone() {
                out.push(Violation::DeltaOne { i });
            }
        }
        let mut image_prefix = S::zero();
        for i in 1..m {
            image_prefix = image_prefix + self.delta[self.pi.preimage0(i - 1)].clone();
            if image_prefix < S::zero() - eps.clone() {
                out.push(Violation::DeltaTwo { i });
            }
        }
        for (i, lam) in self.lambda.iter().enumerate() {
            if !(lam.clone() > S::zero()) {
                out.push(Violation::LambdaPositive { i: i + 1 });
            }
        }
        out
    }

    /// Heights from the delta vector:
    /// `h_r = -sum_{i<r} delta_i + sum_{l < pi(r)} delta_{pi^{-1} l}`.
    pub fn heights(&self) -> Vec<S> {
        let m = self.m();
        let mut pos_prefix = vec![S::zero(); m + 1];
        for i in 0..m {
            pos_prefix[i + 1] = pos_prefix[i].clone() + self.delta[i].clone();
        }
        // prefix sums in image order
        let mut img_prefix = vec![S::zero(); m + 1];
        for v in 0..m {
            img_prefix[v + 1] = img_prefix[v].clone() + self.delta[self.pi.preimage0(v)].clone();
        }
        (0..m)
            .map(|r0| {
                let img = self.pi.image0(r0);
                (S::zero() - pos_prefix[r0].clone()) + img_prefix[img].clone()
            })
            .collect()
    }

    /// `a_i = -(delta_1 + .. + delta_i)`.
    pub fn a_vector(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.m());
        let mut acc = S::zero();
        for d in &self.delta {
            acc = acc + d.clone();
            out.push(S::zero() - acc.clone());
        }
        out
    }

    /// The zippered rectangle determined by these coordinates.
    pub fn to_rectangle(&self) -> ZippedRectangle<S> {
        ZippedRectangle {
            lambda: self.lambda.clone(),
            h: self.heights(),
            a: self.a_vector(),
            pi: self.pi.clone(),
        }
    }

    /// Area in delta form:
    /// `sum_i delta_i (-sum_{r>i} lambda_r + sum_{r>pi(i)} lambda_{pi^{-1}r})`.
    pub fn area(&self) -> S {
        let m = self.m();
        let mut pos_suffix = vec![S::zero(); m + 1];
        for i in (0..m).rev() {
            pos_suffix[i] = pos_suffix[i + 1].clone() + self.lambda[i].clone();
        }
        let mut img_suffix = vec![S::zero(); m + 1];
        for v in (0..m).rev() {
            img_suffix[v] =
                img_suffix[v + 1].clone() + self.lambda[self.pi.preimage0(v)].clone();
        }
        let mut acc = S::zero();
        for i in 0..m {
            let img = self.pi.image0(i);
            let coeff = img_suffix[img + 1].clone() - pos_suffix[i + 1].clone();
            acc = acc + self.delta[i].clone() * coeff;
        }
        acc
    }

    pub fn lambda_sum(&self) -> S {
        S::sum(&self.lambda)
    }

    /// Sector of the underlying `(lambda, pi)`; scale-free.
    pub fn sector(&self) -> Result<Sector> {
        let m = self.m();
        let k = self.pi.last_preimage0();
        if self.lambda[k] > self.lambda[m - 1] {
            Ok(Sector::Plus)
        } else if self.lambda[m - 1] > self.lambda[k] {
            Ok(Sector::Minus)
        } else {
            Err(Error::DegenerateTie)
        }
    }

    /// `a_m = -(delta_1 + .. + delta_m)`; its sign selects the transversal
    /// side.
    pub fn a_m(&self) -> S {
        S::zero() - S::sum(&self.delta)
    }
}

/// Which half of the transversal a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YSide {
    Plus,
    Minus,
}

/// The Teichmüller flow `P^t (lambda, pi, delta) = (e^t lambda, pi, e^{-t} delta)`.
pub fn flow(d: &DeltaCoords<f64>, t: f64) -> DeltaCoords<f64> {
    let up = t.exp();
    let down = (-t).exp();
    DeltaCoords {
        lambda: d.lambda.iter().map(|x| x * up).collect(),
        pi: d.pi.clone(),
        delta: d.delta.iter().map(|x| x * down).collect(),
    }
}

fn apply_inverse_elementary<S: Scalar>(op: Op, k: usize, v: &[S]) -> Vec<S> {
    let m = v.len();
    let mut out;
    match op {
        Op::B => {
            out = v.to_vec();
            out[m - 1] = v[m - 1].clone() - v[k].clone();
        }
        Op::A => {
            out = Vec::with_capacity(m);
            out.extend_from_slice(&v[..k]);
            out.push(v[k].clone() - v[m - 1].clone());
            out.push(v[m - 1].clone());
            out.extend_from_slice(&v[k + 1..m - 1]);
        }
    }
    out
}

/// One step of the renormalization map `U`: the inverse elementary matrix
/// applied to both `lambda` and `delta`, the permutation advanced. Matches
/// `rv_step` on the `(lambda, pi)` part (before normalization) and preserves
/// the area.
pub fn u_map<S: Scalar>(d: &DeltaCoords<S>) -> Result<(DeltaCoords<S>, Op)> {
    let sector = d.sector()?;
    let op = sector.op();
    let k = d.pi.last_preimage0();
    let lambda = apply_inverse_elementary(op, k, &d.lambda);
    let delta = apply_inverse_elementary(op, k, &d.delta);
    let pi = d.pi.apply_op(op)?;
    Ok((DeltaCoords { lambda, pi, delta }, op))
}

/// Return time of the flow from the unit-sum section:
/// `-log(1 - min(lambda_m, lambda_{pi^{-1}m})) > 0`.
pub fn return_time<S: Scalar>(p: &IETPoint<S>) -> Result<f64> {
    p.sector()?;
    let m = p.m();
    let k = p.pi().last_preimage0();
    let lm = p.lambda()[m - 1].to_f64();
    let lk = p.lambda()[k].to_f64();
    Ok(-(1.0 - lm.min(lk)).ln())
}

/// Transversal membership: `Y+` is the Plus sector with `a_m <= 0`, `Y-` the
/// Minus sector with `a_m >= 0`. Requires unit lambda sum.
///
/// The sign pairing is forced by the dynamics: a completed `b`-run lands on
/// points with the Plus sector and `a_m <= 0`, a completed `a`-run on the
/// Minus sector with `a_m >= 0`, while every mid-run point carries the
/// opposite sign. Pairing the signs the other way would make the "first
/// return" stop after a single elementary step instead of lifting the
/// accelerated induction.
pub fn on_transversal<S: Scalar>(d: &DeltaCoords<S>) -> Option<YSide> {
    let eps = tol::<S>();
    let sum = d.lambda_sum();
    if (sum - S::one()).abs() > eps {
        return None;
    }
    let a_m = d.a_m();
    match d.sector() {
        Ok(Sector::Plus) if a_m <= eps => Some(YSide::Plus),
        Ok(Sector::Minus) if a_m >= S::zero() - eps.clone() => Some(YSide::Minus),
        _ => None,
    }
}

/// Result of one first-return step on the transversal.
#[derive(Debug, Clone)]
pub struct FirstReturn<S: Scalar> {
    pub point: DeltaCoords<S>,
    pub side: YSide,
    /// Accumulated flow time, `sum_j -log(shrink_j)`.
    pub time: f64,
    /// The induction letter the step consumed.
    pub letter: Letter,
}

/// First return of the flow to the transversal: alternates sides and lifts
/// the accelerated induction on the `(lambda, pi)` part.
pub fn first_return<S: Scalar>(d: &DeltaCoords<S>) -> Result<FirstReturn<S>> {
    if on_transversal(d).is_none() {
        return Err(Error::InvalidInput(
            "point does not lie on the transversal".into(),
        ));
    }
    let start_pi = d.pi.clone();
    let mut cur = d.clone();
    let mut time = 0.0;
    let mut ops: Vec<Op> = Vec::new();
    loop {
        let (next, op) = u_map(&cur)?;
        let mass = next.lambda_sum();
        // flow forward to the unit-sum section: lambda /= mass, delta *= mass
        let scaled = DeltaCoords {
            lambda: next.lambda.iter().map(|x| x.clone() / mass.clone()).collect(),
            pi: next.pi.clone(),
            delta: next.delta.iter().map(|x| x.clone() * mass.clone()).collect(),
        };
        time -= mass.to_f64().ln();
        ops.push(op);
        cur = scaled;
        if let Some(side) = on_transversal(&cur) {
            debug_assert!(ops.iter().all(|&o| o == ops[0]));
            let letter = Letter::new(ops[0], ops.len() as u64, start_pi)?;
            return Ok(FirstReturn { point: cur, side, time, letter });
        }
        if ops.len() >= STALL_LIMIT {
            return Err(Error::Stall(STALL_LIMIT));
        }
    }
}

/// Rejection sampler for the cone `K_pi` from the centered unit cube.
pub fn sample_k_pi<R: rand::Rng>(
    pi: &Permutation,
    rng: &mut R,
    max_tries: usize,
) -> Result<Vec<f64>> {
    let m = pi.len();
    for _ in 0..max_tries {
        let delta: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cand = DeltaCoords {
            lambda: vec![1.0 / m as f64; m],
            pi: pi.clone(),
            delta,
        };
        // strict interior so float checks are unambiguous
        if interior_margin(&cand) > 1e-6 {
            return Ok(cand.delta);
        }
    }
    Err(Error::InvalidInput(format!(
        "K_pi rejection sampling exhausted {max_tries} tries"
    )))
}

/// Smallest slack of the cone inequalities; positive inside `K_pi`.
pub fn interior_margin(d: &DeltaCoords<f64>) -> f64 {
    let m = d.m();
    let mut margin = f64::INFINITY;
    let mut prefix = 0.0;
    for i in 0..m - 1 {
        prefix += d.delta[i];
        margin = margin.min(-prefix);
    }
    let mut img_prefix = 0.0;
    for v in 0..m - 1 {
        img_prefix += d.delta[d.pi.preimage0(v)];
        margin = margin.min(img_prefix);
    }
    margin
}
