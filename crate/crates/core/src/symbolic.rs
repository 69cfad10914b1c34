//! The countable alphabet of accelerated induction steps and the words over
//! it.
//!
//! A letter `(c, n, pi)` records `n` consecutive applications of the Rauzy
//! operation `c` starting at the permutation `pi`. Two letters chain when the
//! first one's action lands on the second one's base permutation and their
//! labels differ; a word is a chained nonempty sequence. Admissible words
//! (cyclically chained, primitive matrix) code exactly one periodic orbit of
//! the flow each.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::RenormMatrix;
use crate::perm::{Op, Permutation};

/// One symbol `(c, n, pi)` of the countable alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub op: Op,
    pub n: u64,
    pub pi: Permutation,
}

impl Letter {
    pub fn new(op: Op, n: u64, pi: Permutation) -> Result<Letter> {
        if n == 0 {
            return Err(Error::InvalidWord("letter multiplicity must be >= 1".into()));
        }
        if !pi.is_irreducible() {
            return Err(Error::Reducible);
        }
        Ok(Letter { op, n, pi })
    }

    /// `c^n pi`: where the letter's action lands.
    pub fn target(&self) -> Permutation {
        self.pi.apply_op_pow(self.op, self.n).expect("irreducible")
    }

    /// `A(w_1) = A(c,pi) A(c,c pi) ... A(c,c^{n-1} pi)`.
    pub fn matrix(&self) -> RenormMatrix {
        let mut acc = RenormMatrix::identity(self.pi.len());
        let mut cur = self.pi.clone();
        for _ in 0..self.n {
            let e = RenormMatrix::elementary(self.op, &cur).expect("irreducible");
            acc = acc.mul(&e).expect("same dimension");
            cur = cur.apply_op(self.op).expect("irreducible");
        }
        acc
    }

    /// Total order used for canonical forms: label (`a < b`), then
    /// multiplicity, then base permutation by image array.
    pub fn cmp_canonical(&self, other: &Letter) -> Ordering {
        self.op
            .cmp(&other.op)
            .then(self.n.cmp(&other.n))
            .then_with(|| self.pi.cmp(&other.pi))
    }
}

/// `B(w1, w2) = 1` iff `c1^{n1} pi1 = pi2` and `c1 != c2`.
pub fn b_compat(w1: &Letter, w2: &Letter) -> bool {
    w1.op != w2.op && w1.target() == w2.pi
}

/// A nonempty `B`-chained sequence of letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Word> {
        if letters.is_empty() {
            return Err(Error::InvalidWord("word must be nonempty".into()));
        }
        for pair in letters.windows(2) {
            if !b_compat(&pair[0], &pair[1]) {
                return Err(Error::InvalidWord(format!(
                    "letters do not chain: ({},{},{}) then ({},{},{})",
                    pair[0].op, pair[0].n, pair[0].pi, pair[1].op, pair[1].n, pair[1].pi
                )));
            }
        }
        Ok(Word { letters })
    }

    /// Builds a word from `(op, n)` tokens chained from a base permutation,
    /// the CLI's `--word "a1,b2" --pi "..."` form.
    pub fn from_tokens(base: &Permutation, tokens: &[(Op, u64)]) -> Result<Word> {
        let mut letters = Vec::with_capacity(tokens.len());
        let mut cur = base.clone();
        for &(op, n) in tokens {
            let letter = Letter::new(op, n, cur.clone())?;
            cur = letter.target();
            letters.push(letter);
        }
        Word::new(letters)
    }

    /// Parses `"a1,b2"`-style token text.
    pub fn parse_tokens(text: &str) -> Result<Vec<(Op, u64)>> {
        text.split(',')
            .map(|tok| {
                let tok = tok.trim();
                let mut chars = tok.chars();
                let c = chars
                    .next()
                    .ok_or_else(|| Error::Parse("empty word token".into()))?;
                let op = Op::from_char(c)?;
                let n: u64 = chars
                    .as_str()
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad multiplicity in '{tok}': {e}")))?;
                if n == 0 {
                    return Err(Error::Parse(format!("zero multiplicity in '{tok}'")));
                }
                Ok((op, n))
            })
            .collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &Letter {
        &self.letters[0]
    }

    pub fn last(&self) -> &Letter {
        &self.letters[self.letters.len() - 1]
    }

    /// Base permutation `pi(w_1)`.
    pub fn base(&self) -> &Permutation {
        &self.letters[0].pi
    }

    /// `A(w) = A(w_1) ... A(w_n)`, exact.
    pub fn matrix(&self) -> RenormMatrix {
        let mats: Vec<RenormMatrix> = self.letters.iter().map(Letter::matrix).collect();
        RenormMatrix::product(&mats).expect("chained letters share m")
    }

    /// `w pi`, defined only when `pi` is the word's base permutation.
    pub fn act(&self, pi: &Permutation) -> Result<Permutation> {
        if pi != self.base() {
            return Err(Error::ActionUndefined);
        }
        Ok(self.last().target())
    }

    /// Concatenation; fails unless the junction letters chain.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word::new(letters)
    }

    /// True iff `ww` is a valid word, i.e. the last letter chains back to
    /// the first.
    pub fn closes_up(&self) -> bool {
        b_compat(self.last(), self.first())
    }

    /// Admissible: `ww` valid and `A(w)` primitive.
    pub fn is_admissible(&self) -> bool {
        self.closes_up() && self.matrix().is_primitive()
    }

    /// Rotation by `k` letters: `w_{k+1} .. w_n w_1 .. w_k`.
    pub fn rotate(&self, k: usize) -> Result<Word> {
        if !self.closes_up() {
            return Err(Error::NotAdmissible);
        }
        let n = self.letters.len();
        let k = k % n;
        let mut letters = Vec::with_capacity(n);
        letters.extend_from_slice(&self.letters[k..]);
        letters.extend_from_slice(&self.letters[..k]);
        Word::new(letters)
    }

    /// Shortest `u` with `w = u^k` as letter sequences.
    pub fn primitive_root(&self) -> Word {
        let n = self.letters.len();
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            let periodic = (d..n).all(|i| self.letters[i] == self.letters[i - d]);
            if periodic {
                return Word { letters: self.letters[..d].to_vec() };
            }
        }
        unreachable!("d = n always periodic")
    }

    /// Orbit-counting representative: primitive root reduced to its
    /// lexicographically least rotation under the fixed letter order.
    pub fn canonical_form(&self) -> Result<Word> {
        if !self.is_admissible() {
            return Err(Error::NotAdmissible);
        }
        let root = self.primitive_root();
        let n = root.len();
        let mut best = root.clone();
        for k in 1..n {
            let rot = root.rotate(k)?;
            if word_cmp(&rot, &best) == Ordering::Less {
                best = rot;
            }
        }
        Ok(best)
    }
}

fn word_cmp(a: &Word, b: &Word) -> Ordering {
    for (x, y) in a.letters().iter().zip(b.letters()) {
        let ord = x.cmp_canonical(y);
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

/// Exact `1 / prod_j (column sum j of A(w))`, the Lebesgue volume of the
/// positive pullback cone of `A(w)` in the unit simplex.
pub fn cylinder_leb(word: &Word) -> BigRational {
    cylinder_leb_of_matrix(&word.matrix())
}

pub fn cylinder_leb_of_matrix(mat: &RenormMatrix) -> BigRational {
    let mut denom = BigUint::one();
    for s in mat.col_sums() {
        denom *= s;
    }
    BigRational::new(BigInt::one(), BigInt::from(denom))
}
