//! Composition indices and the duality involution.
//!
//! An index is a finite sequence of positive integers `k = (k_1, ..., k_r)`.
//! Its weight is the sum of the parts and its depth is the number of parts.
//! An index is admissible when it is non-empty and its last part is at
//! least 2; admissibility is exactly the convergence condition for the
//! one-sided series built on the index.
//!
//! Every admissible index factors uniquely into runs
//! `({1}^{a_1 - 1}, b_1 + 1, ..., {1}^{a_s - 1}, b_s + 1)` with all
//! `a_i, b_i >= 1`. The dual index transposes that data: it reverses the
//! list of `(a_i, b_i)` pairs and swaps the roles of a and b. Duality is an
//! involution that preserves weight and sends depth to weight minus depth.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A composition index: a finite sequence of positive integers.
///
/// Serializes as a plain JSON array of its parts. The textual form used by
/// `Display`/`FromStr` is comma-separated, e.g. `"1,2"`; the empty index
/// prints as the empty string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Index(Vec<u32>);

impl Index {
    /// Builds an index, rejecting zero parts.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::ZeroPart);
        }
        Ok(Index(parts))
    }

    /// The empty index. Not admissible; its one-sided series is the empty
    /// sum, which is where inductive identities bottom out.
    pub fn empty() -> Self {
        Index(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of parts.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Sum of parts.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Non-empty with last part at least 2.
    pub fn is_admissible(&self) -> bool {
        matches!(self.0.last(), Some(&p) if p >= 2)
    }

    /// Unique factorization into runs `({1}^{a-1}, b+1)`.
    ///
    /// Errors with [`Error::NotAdmissible`] unless the index is admissible;
    /// a trailing 1 would leave a run without its closing part.
    pub fn decompose(&self) -> Result<RunDecomposition> {
        if !self.is_admissible() {
            return Err(Error::NotAdmissible(self.to_string()));
        }
        let mut pairs = Vec::new();
        let mut ones: u32 = 0;
        for &p in &self.0 {
            if p == 1 {
                ones += 1;
            } else {
                pairs.push((ones + 1, p - 1));
                ones = 0;
            }
        }
        debug_assert_eq!(ones, 0, "admissible index cannot end in 1");
        Ok(RunDecomposition { pairs })
    }

    /// The dual index: reverse the run pairs and swap each `(a, b)`.
    ///
    /// An involution on admissible indices. Weight is preserved and the
    /// depth of the dual is weight minus depth.
    pub fn dual(&self) -> Result<Index> {
        Ok(self.decompose()?.transpose().compose())
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Index({self})")
    }
}

impl FromStr for Index {
    type Err = Error;

    /// Parses `"1,2"`; whitespace around parts is tolerated. The empty
    /// string parses to the empty index.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Index::empty());
        }
        let mut parts = Vec::new();
        for piece in s.split(',') {
            let p: u32 = piece
                .trim()
                .parse()
                .map_err(|_| Error::ParseIndex(s.to_string()))?;
            if p == 0 {
                return Err(Error::ZeroPart);
            }
            parts.push(p);
        }
        Ok(Index(parts))
    }
}

/// Run data `(a_i, b_i)` of an admissible index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunDecomposition {
    pairs: Vec<(u32, u32)>,
}

impl RunDecomposition {
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Reverses the pair list and swaps a with b in each pair.
    pub fn transpose(&self) -> RunDecomposition {
        RunDecomposition {
            pairs: self.pairs.iter().rev().map(|&(a, b)| (b, a)).collect(),
        }
    }

    /// Rebuilds the index `({1}^{a_1 - 1}, b_1 + 1, ...)`.
    pub fn compose(&self) -> Index {
        let mut parts = Vec::new();
        for &(a, b) in &self.pairs {
            for _ in 0..a - 1 {
                parts.push(1);
            }
            parts.push(b + 1);
        }
        Index(parts)
    }
}

/// All admissible indices of the given weight, optionally restricted to one
/// depth, in ascending lexicographic order of their part sequences.
///
/// Unsatisfiable constraints (weight below 2, depth 0, depth out of range)
/// yield an empty list rather than an error.
pub fn enumerate_admissible(weight: u32, depth: Option<u32>) -> Vec<Index> {
    let mut out = Vec::new();
    if weight < 2 {
        return out;
    }
    let mut prefix = Vec::new();
    collect_admissible(weight, depth, &mut prefix, &mut out);
    out
}

fn collect_admissible(
    remaining: u32,
    depth: Option<u32>,
    prefix: &mut Vec<u32>,
    out: &mut Vec<Index>,
) {
    let next_len = prefix.len() as u32 + 1;
    // Continuing with part p needs at least 2 left for the final part, so
    // p <= remaining - 2 < remaining: every continuation lexicographically
    // precedes closing here, and ascending p keeps the order within them.
    if depth.is_none_or(|d| next_len < d) {
        for p in 1..=remaining.saturating_sub(2) {
            prefix.push(p);
            collect_admissible(remaining - p, depth, prefix, out);
            prefix.pop();
        }
    }
    // Close the index: the final part takes everything left, at least 2.
    if remaining >= 2 && depth.is_none_or(|d| next_len == d) {
        out.push(Index(
            prefix.iter().copied().chain([remaining]).collect(),
        ));
    }
}

/// All weak compositions of `total` into exactly `parts` non-negative
/// summands, in ascending lexicographic order. There are
/// `C(total + parts - 1, parts - 1)` of them.
pub fn compositions(total: u32, parts: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut prefix = Vec::with_capacity(parts as usize);
    collect_compositions(total, parts, &mut prefix, &mut out);
    out
}

fn collect_compositions(total: u32, parts: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for c in 0..=total {
        prefix.push(c);
        collect_compositions(total - c, parts - 1, prefix, out);
        prefix.pop();
    }
}
