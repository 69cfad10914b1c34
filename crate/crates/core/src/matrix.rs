//! Exact nonnegative integer renormalization matrices and their Perron data.
//!
//! Entries are machine 64-bit with checked arithmetic, escalating to
//! arbitrary precision transparently on overflow. Products are always exact;
//! only the Perron eigendata is floating point.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::perm::{Op, Permutation};

#[derive(Clone, PartialEq, Eq)]
enum Entries {
    Small(Vec<u64>),
    Big(Vec<BigUint>),
}

/// An `m x m` nonnegative integer matrix, row-major, exact.
#[derive(Clone, PartialEq, Eq)]
pub struct RenormMatrix {
    m: usize,
    entries: Entries,
}

impl fmt::Debug for RenormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RenormMatrix({:?})", self.rows_string())
    }
}

impl RenormMatrix {
    pub fn identity(m: usize) -> RenormMatrix {
        let mut e = vec![0u64; m * m];
        for i in 0..m {
            e[i * m + i] = 1;
        }
        RenormMatrix { m, entries: Entries::Small(e) }
    }

    /// Builds from row-major u64 rows.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<RenormMatrix> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        Ok(RenormMatrix {
            m,
            entries: Entries::Small(rows.concat()),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Entry (i, j), 0-indexed, as an exact big integer.
    pub fn entry(&self, i: usize, j: usize) -> BigUint {
        match &self.entries {
            Entries::Small(v) => BigUint::from(v[i * self.m + j]),
            Entries::Big(v) => v[i * self.m + j].clone(),
        }
    }

    /// Entry as u64 if it fits.
    pub fn entry_u64(&self, i: usize, j: usize) -> Option<u64> {
        match &self.entries {
            Entries::Small(v) => Some(v[i * self.m + j]),
            Entries::Big(v) => v[i * self.m + j].to_u64(),
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.entries, Entries::Small(_))
    }

    fn to_big_vec(&self) -> Vec<BigUint> {
        match &self.entries {
            Entries::Small(v) => v.iter().map(|&x| BigUint::from(x)).collect(),
            Entries::Big(v) => v.clone(),
        }
    }

    /// `A(op, pi)`: the elementary matrix of one induction step.
    ///
    /// For `op = b` this is `E + E_{m, pi^{-1}m}`. For `op = a` it is the
    /// unique nonnegative unimodular matrix with `lambda_old = A lambda_new`
    /// for the geometric step: columns
    /// `(e_1, .., e_k, e_k + e_m, e_{k+1}, .., e_{m-1})` with `k = pi^{-1}m`.
    pub fn elementary(op: Op, pi: &Permutation) -> Result<RenormMatrix> {
        if !pi.is_irreducible() {
            return Err(Error::Reducible);
        }
        let m = pi.len();
        let k = pi.last_preimage0(); // 0-indexed, k <= m-2
        let mut e = vec![0u64; m * m];
        match op {
            Op::B => {
                for i in 0..m {
                    e[i * m + i] = 1;
                }
                e[(m - 1) * m + k] += 1;
            }
            Op::A => {
                // column j = e_j for j <= k; column k+1 = e_k + e_m;
                // column j = e_{j-1} for j >= k+2 (all 0-indexed)
                for j in 0..=k {
                    e[j * m + j] = 1;
                }
                e[k * m + (k + 1)] = 1;
                e[(m - 1) * m + (k + 1)] = 1;
                for j in (k + 2)..m {
                    e[(j - 1) * m + j] = 1;
                }
            }
        }
        Ok(RenormMatrix { m, entries: Entries::Small(e) })
    }

    /// Exact product `self * rhs`, escalating to big integers on overflow.
    pub fn mul(&self, rhs: &RenormMatrix) -> Result<RenormMatrix> {
        if self.m != rhs.m {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.m, self.m, rhs.m, rhs.m
            )));
        }
        let m = self.m;
        if let (Entries::Small(a), Entries::Small(b)) = (&self.entries, &rhs.entries) {
            let mut out = vec![0u64; m * m];
            let mut ok = true;
            'small: for i in 0..m {
                for j in 0..m {
                    let mut acc: u64 = 0;
                    for k in 0..m {
                        match a[i * m + k]
                            .checked_mul(b[k * m + j])
                            .and_then(|p| acc.checked_add(p))
                        {
                            Some(v) => acc = v,
                            None => {
                                ok = false;
                                break 'small;
                            }
                        }
                    }
                    out[i * m + j] = acc;
                }
            }
            if ok {
                return Ok(RenormMatrix { m, entries: Entries::Small(out) });
            }
        }
        let a = self.to_big_vec();
        let b = rhs.to_big_vec();
        let mut out = vec![BigUint::zero(); m * m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = BigUint::zero();
                for k in 0..m {
                    acc += &a[i * m + k] * &b[k * m + j];
                }
                out[i * m + j] = acc;
            }
        }
        Ok(RenormMatrix { m, entries: Entries::Big(out) })
    }

    /// Left-to-right product of a nonempty sequence.
    pub fn product(mats: &[RenormMatrix]) -> Result<RenormMatrix> {
        let first = mats
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty product".into()))?;
        let mut acc = first.clone();
        for mat in &mats[1..] {
            acc = acc.mul(mat)?;
        }
        Ok(acc)
    }

    /// Exact column sums.
    pub fn col_sums(&self) -> Vec<BigUint> {
        let m = self.m;
        let mut sums = vec![BigUint::zero(); m];
        for j in 0..m {
            for i in 0..m {
                sums[j] += self.entry(i, j);
            }
        }
        sums
    }

    /// `||A|| = max_j sum_i A_ij`, exact.
    pub fn col_norm(&self) -> BigUint {
        self.col_sums().into_iter().max().unwrap()
    }

    pub fn col_norm_u64(&self) -> Option<u64> {
        self.col_norm().to_u64()
    }

    pub fn log_col_norm(&self) -> f64 {
        big_ln(&self.col_norm())
    }

    /// Exact determinant (Bareiss fraction-free elimination).
    pub fn det(&self) -> BigInt {
        let m = self.m;
        let mut a: Vec<BigInt> = self
            .to_big_vec()
            .into_iter()
            .map(BigInt::from)
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..m {
            if a[k * m + k].is_zero() {
                let pivot = (k + 1..m).find(|&r| !a[r * m + k].is_zero());
                match pivot {
                    Some(r) => {
                        for j in 0..m {
                            a.swap(k * m + j, r * m + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..m {
                for j in k + 1..m {
                    let num = &a[i * m + j] * &a[k * m + k] - &a[i * m + k] * &a[k * m + j];
                    a[i * m + j] = num / &prev;
                }
                a[i * m + k] = BigInt::zero();
            }
            prev = a[k * m + k].clone();
        }
        sign * a[(m - 1) * m + (m - 1)].clone()
    }

    /// True iff some power has all entries positive. Decided by boolean
    /// reachability up to the Wielandt bound `(m-1)^2 + 1`.
    pub fn is_primitive(&self) -> bool {
        let m = self.m;
        debug_assert!(m <= 64);
        let mut pattern = vec![0u64; m];
        for i in 0..m {
            for j in 0..m {
                if !self.entry(i, j).is_zero() {
                    pattern[i] |= 1 << j;
                }
            }
        }
        let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let wielandt = (m - 1) * (m - 1) + 1;
        let mut power = pattern.clone();
        for _ in 0..wielandt {
            if power.iter().all(|&row| row == full) {
                return true;
            }
            let mut next = vec![0u64; m];
            for i in 0..m {
                let mut acc = 0u64;
                for k in 0..m {
                    if power[i] >> k & 1 == 1 {
                        acc |= pattern[k];
                    }
                }
                next[i] = acc;
            }
            power = next;
        }
        power.iter().all(|&row| row == full)
    }

    /// Applies the matrix to an f64 vector.
    pub fn mul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        let m = self.m;
        assert_eq!(v.len(), m);
        let mut out = vec![0.0; m];
        for i in 0..m {
            let mut acc = 0.0;
            for j in 0..m {
                acc += big_to_f64(&self.entry(i, j)) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Rows as decimal strings (JSON-safe beyond 64 bits).
    pub fn rows_string(&self) -> Vec<Vec<String>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.entry(i, j).to_string()).collect())
            .collect()
    }

    /// JSON value: numeric rows while entries fit in u64, decimal strings
    /// beyond that.
    pub fn to_json(&self) -> serde_json::Value {
        if self.is_small() {
            let rows: Vec<Vec<u64>> = (0..self.m)
                .map(|i| (0..self.m).map(|j| self.entry_u64(i, j).unwrap()).collect())
                .collect();
            serde_json::json!(rows)
        } else {
            serde_json::json!(self.rows_string())
        }
    }
}

/// Natural log of a big unsigned integer, accurate enough for norms.
pub fn big_ln(x: &BigUint) -> f64 {
    if let Some(v) = x.to_u64() {
        return (v as f64).ln();
    }
    let bits = x.bits();
    // keep the top 64 bits, track the shifted-out exponent
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).ln() + (shift as f64) * std::f64::consts::LN_2
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Perron-Frobenius eigendata of a primitive matrix.
#[derive(Debug, Clone)]
pub struct PerronData {
    /// Spectral radius.
    pub rho: f64,
    /// Positive eigenvector normalized to unit coordinate sum.
    pub eigvec: Vec<f64>,
    /// `log(rho)`; for a word matrix this is the orbit length `l(w)`.
    pub log_rho: f64,
}

const PERRON_TOL: f64 = 1e-13;
const PERRON_MAX_ITERS: usize = 1_000_000;

/// Power iteration from the uniform vector; deterministic.
///
/// Stops when successive Rayleigh quotients agree to `1e-13` relative *and*
/// the eigen-equation residual is met: the quotient sequence can plateau
/// early when subdominant eigenvalues are close in modulus, so convergence
/// is only accepted once `M v = rho v` holds to `1e-9` componentwise
/// relative error.
pub fn perron(mat: &RenormMatrix) -> Result<PerronData> {
    if !mat.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let m = mat.m();
    let mut v = vec![1.0 / m as f64; m];
    let mut rho_prev = f64::NAN;
    for _ in 0..PERRON_MAX_ITERS {
        let w = mat.mul_vec_f64(&v);
        let sum: f64 = w.iter().sum();
        let rho = sum; // |v|_1 = 1, so the 1-norm Rayleigh quotient is |Mv|_1
        for (dst, &src) in v.iter_mut().zip(w.iter()) {
            *dst = src / sum;
        }
        if rho_prev.is_finite() && (rho - rho_prev).abs() <= PERRON_TOL * rho.abs() {
            let image = mat.mul_vec_f64(&v);
            let residual_ok = image
                .iter()
                .zip(&v)
                .all(|(got, lam)| (got - rho * lam).abs() <= 1e-10 * got.abs().max(1e-300));
            if residual_ok {
                return Ok(PerronData { rho, eigvec: v, log_rho: rho.ln() });
            }
        }
        rho_prev = rho;
    }
    Err(Error::NonConvergence(PERRON_MAX_ITERS))
}
