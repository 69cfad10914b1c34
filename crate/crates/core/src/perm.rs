//! Irreducible permutations, the two Rauzy operations, and Rauzy classes.
//!
//! A permutation on `m` symbols is stored by its image array: `pi(i)` for
//! `i = 1..m` (internally 0-indexed). It is *irreducible* when no proper
//! prefix `{1..k}`, `k < m`, is invariant. The operations `a` and `b` act on
//! irreducible permutations and preserve irreducibility; the Rauzy class of
//! `pi` is the closure of `{pi}` under both operations, and the Rauzy
//! diagram is that vertex set with one `a`-edge and one `b`-edge out of each
//! vertex.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label of a Rauzy operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl Op {
    pub fn other(self) -> Op {
        match self {
            Op::A => Op::B,
            Op::B => Op::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Op::A => 'a',
            Op::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Result<Op> {
        match c {
            'a' => Ok(Op::A),
            'b' => Ok(Op::B),
            _ => Err(Error::Parse(format!("unknown operation label '{c}'"))),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A permutation of `{1..m}` given by its images, with the inverse cached.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    /// 0-indexed images: position `i` maps to `images[i]`, both in `0..m`.
    images: Vec<usize>,
    inverse: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Permutation {
    /// Builds a permutation from 1-indexed images, e.g. `[3,2,1]`.
    pub fn from_images(images_one_indexed: &[usize]) -> Result<Permutation> {
        let m = images_one_indexed.len();
        if m < 2 {
            return Err(Error::TooShort);
        }
        let mut images = Vec::with_capacity(m);
        let mut seen = vec![false; m];
        for &v in images_one_indexed {
            if v < 1 || v > m {
                return Err(Error::NotAPermutation(format!(
                    "image {v} out of range 1..={m}"
                )));
            }
            if seen[v - 1] {
                return Err(Error::NotAPermutation(format!("image {v} repeated")));
            }
            seen[v - 1] = true;
            images.push(v - 1);
        }
        let mut inverse = vec![0; m];
        for (i, &v) in images.iter().enumerate() {
            inverse[v] = i;
        }
        Ok(Permutation { images, inverse })
    }

    /// Parses a comma-separated 1-indexed image list, e.g. `"3,2,1"`.
    pub fn parse(s: &str) -> Result<Permutation> {
        let images: Vec<usize> = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad permutation entry '{tok}': {e}")))
            })
            .collect::<Result<_>>()?;
        Permutation::from_images(&images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-indexed image of a 0-indexed position.
    pub fn image0(&self, i: usize) -> usize {
        self.images[i]
    }

    /// 0-indexed preimage of a 0-indexed value.
    pub fn preimage0(&self, v: usize) -> usize {
        self.inverse[v]
    }

    /// `pi^{-1}(m)`, 0-indexed: the position whose image is the last symbol.
    pub fn last_preimage0(&self) -> usize {
        self.inverse[self.len() - 1]
    }

    /// 1-indexed image array, the external representation.
    pub fn images_one_indexed(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }

    /// True iff `pi{1..k} = {1..k}` only for `k = m`.
    pub fn is_irreducible(&self) -> bool {
        let m = self.len();
        let mut max_seen = 0usize;
        for k in 0..m - 1 {
            max_seen = max_seen.max(self.images[k]);
            if max_seen == k {
                return false;
            }
        }
        true
    }

    fn check_irreducible(&self) -> Result<()> {
        if self.is_irreducible() {
            Ok(())
        } else {
            Err(Error::Reducible)
        }
    }

    /// Applies a single Rauzy operation.
    pub fn apply_op(&self, op: Op) -> Result<Permutation> {
        self.check_irreducible()?;
        let m = self.len();
        let mut images = vec![0usize; m];
        match op {
            Op::A => {
                // k = pi^{-1}(m); images: j<=k unchanged, k+1 gets pi(m),
                // the rest shift right by one.
                let k = self.last_preimage0();
                for j in 0..m {
                    images[j] = if j <= k {
                        self.images[j]
                    } else if j == k + 1 {
                        self.images[m - 1]
                    } else {
                        self.images[j - 1]
                    };
                }
            }
            Op::B => {
                let pm = self.images[m - 1];
                for j in 0..m {
                    let pj = self.images[j];
                    images[j] = if pj <= pm {
                        pj
                    } else if pj < m - 1 {
                        pj + 1
                    } else {
                        pm + 1
                    };
                }
            }
        }
        let mut inverse = vec![0; m];
        for (i, &v) in images.iter().enumerate() {
            inverse[v] = i;
        }
        let out = Permutation { images, inverse };
        debug_assert!(out.is_irreducible());
        Ok(out)
    }

    /// Applies `op` `n` times.
    pub fn apply_op_pow(&self, op: Op, n: u64) -> Result<Permutation> {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.apply_op(op)?;
        }
        Ok(cur)
    }
}

/// A directed, labeled edge of the Rauzy diagram, indices into the canonical
/// member order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub label: Op,
    pub to: usize,
}

/// A Rauzy class: the closure of a permutation under both operations, with
/// members sorted lexicographically by image array so that serialization and
/// vertex indices are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RauzyClass {
    members: Vec<Permutation>,
    /// `a_to[v]`, `b_to[v]`: successor vertex of `v` under each operation.
    a_to: Vec<usize>,
    b_to: Vec<usize>,
}

impl RauzyClass {
    /// BFS closure of `pi` under the operations `a` and `b`.
    pub fn new(pi: &Permutation) -> Result<RauzyClass> {
        pi.check_irreducible()?;
        let mut members = vec![pi.clone()];
        let mut queue = vec![pi.clone()];
        while let Some(cur) = queue.pop() {
            for op in [Op::A, Op::B] {
                let next = cur.apply_op(op)?;
                if !members.contains(&next) {
                    members.push(next.clone());
                    queue.push(next);
                }
            }
        }
        members.sort();
        let index_of = |p: &Permutation| members.binary_search(p).expect("closed under ops");
        let mut a_to = Vec::with_capacity(members.len());
        let mut b_to = Vec::with_capacity(members.len());
        for p in &members {
            a_to.push(index_of(&p.apply_op(Op::A)?));
            b_to.push(index_of(&p.apply_op(Op::B)?));
        }
        Ok(RauzyClass { members, a_to, b_to })
    }

    pub fn m(&self) -> usize {
        self.members[0].len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Members in canonical (lexicographic) order.
    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    pub fn member(&self, v: usize) -> &Permutation {
        &self.members[v]
    }

    /// Canonical index of a member permutation.
    pub fn index_of(&self, pi: &Permutation) -> Option<usize> {
        self.members.binary_search(pi).ok()
    }

    pub fn successor(&self, v: usize, op: Op) -> usize {
        match op {
            Op::A => self.a_to[v],
            Op::B => self.b_to[v],
        }
    }

    /// All `2·|members|` labeled edges, sorted by `(from, label)`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges = Vec::with_capacity(2 * self.members.len());
        for v in 0..self.members.len() {
            edges.push(Edge { from: v, label: Op::A, to: self.a_to[v] });
            edges.push(Edge { from: v, label: Op::B, to: self.b_to[v] });
        }
        edges
    }

    /// JSON form: `{"m":..,"members":[[..1-indexed..],..],"edges":[..]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m(),
            "members": self.members.iter().map(|p| p.images_one_indexed()).collect::<Vec<_>>(),
            "edges": self.edges(),
        })
    }
}
