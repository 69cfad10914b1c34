//! Rauzy-Veech induction, the Zorich acceleration, the symbolic coding map,
//! inverse branches, and periodic points.
//!
//! Case assignment. With `k = pi^{-1}(m)`, the induction subtracts
//! `min(lambda_m, lambda_k)` from the longer of the two competing intervals:
//!
//! * `lambda_m > lambda_k`: operation `b`, new permutation `b pi`, and
//!   `lambda_old = A(b,pi) lambda_new` with `lambda_new` positive;
//! * `lambda_k > lambda_m`: operation `a`, new permutation `a pi`, the split
//!   interval re-indexed as in `A(a,pi)`.
//!
//! This is the unique sign-consistent assignment: pairing the cases the other
//! way produces a negative length on one side. `verify_sign_convention`
//! asserts positivity over random points and is run by the test suite and by
//! `zip check`.

use num_rational::BigRational;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{perron, RenormMatrix};
use crate::perm::{Op, Permutation};
use crate::scalar::{mat_mul_vec, normalize_sum, Scalar};
use crate::symbolic::{Letter, Word};

/// Elementary-step stall guard for the acceleration.
pub const STALL_LIMIT: usize = 1_000_000;

/// Which of the two competing end intervals is longer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// `lambda_{pi^{-1}m} > lambda_m`; operation `a` applies here.
    Plus,
    /// `lambda_m > lambda_{pi^{-1}m}`; operation `b` applies here.
    Minus,
}

impl Sector {
    pub fn op(self) -> Op {
        match self {
            Sector::Plus => Op::A,
            Sector::Minus => Op::B,
        }
    }

    pub fn other(self) -> Sector {
        match self {
            Sector::Plus => Sector::Minus,
            Sector::Minus => Sector::Plus,
        }
    }

    /// Sector an operation acts on.
    pub fn of_op(op: Op) -> Sector {
        match op {
            Op::A => Sector::Plus,
            Op::B => Sector::Minus,
        }
    }
}

/// A point `(lambda, pi)` of the IET space, `lambda` positive with unit
/// coordinate sum.
#[derive(Debug, Clone, PartialEq)]
pub struct IETPoint<S: Scalar> {
    lambda: Vec<S>,
    pi: Permutation,
}

pub type IETPointF = IETPoint<f64>;
pub type IETPointQ = IETPoint<BigRational>;

impl<S: Scalar> IETPoint<S> {
    pub fn new(lambda: Vec<S>, pi: Permutation) -> Result<IETPoint<S>> {
        if lambda.len() != pi.len() {
            return Err(Error::DimensionMismatch(format!(
                "lambda has {} entries for m = {}",
                lambda.len(),
                pi.len()
            )));
        }
        if !pi.is_irreducible() {
            return Err(Error::Reducible);
        }
        if lambda.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidInput("lambda must be strictly positive".into()));
        }
        let total = S::sum(&lambda).to_f64();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "lambda must sum to 1, got {total}"
            )));
        }
        Ok(IETPoint { lambda, pi })
    }

    /// Normalizes the lengths to unit sum first.
    pub fn new_normalized(lambda: Vec<S>, pi: Permutation) -> Result<IETPoint<S>> {
        if lambda.is_empty() || lambda.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidInput("lambda must be strictly positive".into()));
        }
        IETPoint::new(normalize_sum(&lambda), pi)
    }

    pub fn lambda(&self) -> &[S] {
        &self.lambda
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn m(&self) -> usize {
        self.pi.len()
    }

    pub fn lambda_f64(&self) -> Vec<f64> {
        self.lambda.iter().map(Scalar::to_f64).collect()
    }

    /// Sector of the point; `Err` on the measure-zero tie.
    pub fn sector(&self) -> Result<Sector> {
        let m = self.m();
        let k = self.pi.last_preimage0();
        let last = &self.lambda[m - 1];
        let comp = &self.lambda[k];
        if comp > last {
            Ok(Sector::Plus)
        } else if last > comp {
            Ok(Sector::Minus)
        } else {
            Err(Error::DegenerateTie)
        }
    }
}

/// What one elementary induction step did.
#[derive(Debug, Clone)]
pub struct StepRecord<S: Scalar> {
    pub op: Op,
    pub matrix: RenormMatrix,
    /// `|lambda| - min(lambda_m, lambda_{pi^{-1}m})` before renormalization;
    /// in `(0,1)` for unit-sum input.
    pub shrink: S,
}

/// One step of Rauzy-Veech induction.
pub fn rv_step<S: Scalar>(p: &IETPoint<S>) -> Result<(IETPoint<S>, StepRecord<S>)> {
    let sector = p.sector()?;
    let m = p.m();
    let k = p.pi.last_preimage0();
    let lambda = p.lambda();
    let mut next: Vec<S> = Vec::with_capacity(m);
    match sector {
        Sector::Minus => {
            // b: truncate the last domain interval
            next.extend_from_slice(&lambda[..m - 1]);
            next.push(lambda[m - 1].clone() - lambda[k].clone());
        }
        Sector::Plus => {
            // a: split interval k, drop the last, re-index
            next.extend_from_slice(&lambda[..k]);
            next.push(lambda[k].clone() - lambda[m - 1].clone());
            next.push(lambda[m - 1].clone());
            next.extend_from_slice(&lambda[k + 1..m - 1]);
        }
    }
    debug_assert_eq!(next.len(), m);
    let op = sector.op();
    let matrix = RenormMatrix::elementary(op, &p.pi)?;
    let shrink = S::sum(&next);
    let new_pi = p.pi.apply_op(op)?;
    let normalized = normalize_sum(&next);
    let new_point = IETPoint { lambda: normalized, pi: new_pi };
    Ok((new_point, StepRecord { op, matrix, shrink }))
}

/// One step of the Zorich acceleration: iterate `rv_step` while the sector
/// is unchanged; the consumed letter is `(c, n, pi_start)`.
pub fn zorich_step<S: Scalar>(p: &IETPoint<S>) -> Result<(IETPoint<S>, Letter)> {
    let (q, letter, _) = zorich_step_detailed(p)?;
    Ok((q, letter))
}

/// As `zorich_step`, also returning the per-elementary-step records.
pub fn zorich_step_detailed<S: Scalar>(
    p: &IETPoint<S>,
) -> Result<(IETPoint<S>, Letter, Vec<StepRecord<S>>)> {
    let start_sector = p.sector()?;
    let mut cur = p.clone();
    let mut records = Vec::new();
    loop {
        let (next, record) = rv_step(&cur)?;
        records.push(record);
        cur = next;
        if cur.sector()? != start_sector {
            break;
        }
        if records.len() >= STALL_LIMIT {
            return Err(Error::Stall(STALL_LIMIT));
        }
    }
    let letter = Letter::new(start_sector.op(), records.len() as u64, p.pi.clone())?;
    Ok((cur, letter, records))
}

/// First `k` letters of the symbolic coding of `p`.
pub fn encode<S: Scalar>(p: &IETPoint<S>, k: usize) -> Result<Word> {
    if k == 0 {
        return Err(Error::InvalidInput("encode needs k >= 1".into()));
    }
    let mut letters = Vec::with_capacity(k);
    let mut cur = p.clone();
    for _ in 0..k {
        let (next, letter) = zorich_step(&cur)?;
        letters.push(letter);
        cur = next;
    }
    Word::new(letters)
}

/// Whether the word's last letter can be pulled back from `p`: the letter
/// must chain to `p`'s permutation and `p` must lie in the sector a run of
/// that type lands in (the opposite of the sector the operation acts on).
pub fn compatible<S: Scalar>(word: &Word, p: &IETPoint<S>) -> bool {
    let last = word.last();
    if last.target() != *p.pi() {
        return false;
    }
    match p.sector() {
        Ok(s) => s == Sector::of_op(last.op).other(),
        Err(_) => false,
    }
}

/// The inverse branch `t_w`: `(A(w) lambda / |A(w) lambda|, pi(w_1))`.
///
/// Encoding the result reproduces `w` as the leading letters.
pub fn inverse_branch<S: Scalar>(word: &Word, p: &IETPoint<S>) -> Result<IETPoint<S>> {
    if !compatible(word, p) {
        return Err(Error::Incompatible);
    }
    let pulled = mat_mul_vec(&word.matrix(), p.lambda());
    IETPoint::new_normalized(pulled, word.base().clone())
}

/// The periodic point of an admissible word: `lambda(w)` is the Perron
/// eigenvector of `A(w)` (computed spectrally, never by forward iteration),
/// and `l(w) = log rho(A(w))` is the orbit length.
pub fn periodic_point(word: &Word) -> Result<(IETPoint<f64>, f64)> {
    if !word.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    let mat = word.matrix();
    let pd = perron(&mat)?;
    let point = IETPoint::new_normalized(pd.eigvec.clone(), word.base().clone())?;
    // eigen-equation residual guard at 1e-9 relative
    let mv = mat.mul_vec_f64(point.lambda());
    let scale = pd.rho;
    for (got, lam) in mv.iter().zip(point.lambda()) {
        if (got - scale * lam).abs() > 1e-9 * got.abs().max(1e-300) {
            return Err(Error::NonConvergence(0));
        }
    }
    Ok((point, pd.log_rho))
}

/// Uniform sample from the open unit simplex.
pub fn random_simplex_point<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..m)
            .map(|_| -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln())
            .collect();
        let total: f64 = v.iter().sum();
        for x in &mut v {
            *x /= total;
        }
        if v.iter().all(|&x| x > 1e-12) {
            return v;
        }
    }
}

/// Asserts the sign-consistent case assignment: over `samples` random points
/// of every member of the class of `pi`, no induction step ever produces a
/// nonpositive coordinate.
pub fn verify_sign_convention(pi: &Permutation, samples: usize, seed: u64) -> Result<()> {
    use rand::SeedableRng;
    let class = crate::perm::RauzyClass::new(pi)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for round in 0..samples {
        let member = class.member(round % class.len()).clone();
        let lambda = random_simplex_point(member.len(), &mut rng);
        let p = IETPoint::new(lambda, member)?;
        let (q, record) = match rv_step(&p) {
            Ok(v) => v,
            Err(Error::DegenerateTie) => continue,
            Err(e) => return Err(e),
        };
        if q.lambda().iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "negative length after {} step at {:?}",
                record.op, p
            )));
        }
    }
    Ok(())
}
