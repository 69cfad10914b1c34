//! Scalar abstraction so the induction and zippered-rectangle machinery runs
//! both in binary64 (fast path) and in exact rationals (ground truth for
//! short trajectories).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::matrix::RenormMatrix;

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact scalars compare exactly; floats go through the documented
    /// tolerances.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn from_f64_approx(v: f64) -> Self;
    /// Exact for rationals; rounds to nearest for floats.
    fn from_big(v: &BigUint) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn sum(values: &[Self]) -> Self {
        values
            .iter()
            .cloned()
            .fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn from_u64(v: u64) -> f64 {
        v as f64
    }
    fn from_f64_approx(v: f64) -> f64 {
        v
    }
    fn from_big(v: &BigUint) -> f64 {
        v.to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> f64 {
        f64::abs(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> BigRational {
        num_traits::Zero::zero()
    }
    fn one() -> BigRational {
        num_traits::One::one()
    }
    fn from_u64(v: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64_approx(v: f64) -> BigRational {
        BigRational::from_float(v).expect("finite float")
    }
    fn from_big(v: &BigUint) -> BigRational {
        BigRational::from_integer(BigInt::from(v.clone()))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> BigRational {
        Signed::abs(self)
    }
}

/// `M v` with exact matrix entries lifted into the scalar type.
pub fn mat_mul_vec<S: Scalar>(mat: &RenormMatrix, v: &[S]) -> Vec<S> {
    let m = mat.m();
    assert_eq!(v.len(), m);
    (0..m)
        .map(|i| {
            let mut acc = S::zero();
            for (j, val) in v.iter().enumerate() {
                let e = mat.entry(i, j);
                if !e.is_zero() {
                    let coeff = match e.to_u64() {
                        Some(u) => S::from_u64(u),
                        None => S::from_big(&e),
                    };
                    acc = acc + coeff * val.clone();
                }
            }
            acc
        })
        .collect()
}

/// Normalizes a positive vector to unit coordinate sum.
pub fn normalize_sum<S: Scalar>(v: &[S]) -> Vec<S> {
    let total = S::sum(v);
    v.iter().map(|x| x.clone() / total.clone()).collect()
}
