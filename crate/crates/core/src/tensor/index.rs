//! Compressed multi-index bookkeeping for symmetric tensors.
//!
//! A symmetric rank-`m` tensor in dimension `n` is stored by its
//! components at nondecreasing index tuples, in lexicographic order.
//! Axis labels are 0-based everywhere inside the crate; the only place
//! that converts to the 1-based labels used in file formats and docs is
//! [`SymIndex::from_one_based`] / [`SymIndex::to_one_based`].

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)` (zero when `k > n`).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Number of distinct components `C(n + m - 1, m)` of a symmetric rank-`m`
/// tensor in dimension `n`.
pub fn num_components(n: usize, m: usize) -> usize {
    if n == 0 {
        return usize::from(m == 0);
    }
    binomial(n + m - 1, m) as usize
}

/// A nondecreasing tuple of 0-based axis labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymIndex {
    n: usize,
    entries: Vec<u8>,
}

impl SymIndex {
    /// Builds an index from arbitrary-order 0-based labels.
    pub fn new(n: usize, labels: &[usize]) -> Result<Self> {
        let mut entries = Vec::with_capacity(labels.len());
        for &l in labels {
            if l >= n {
                return Err(Error::invalid(format!("axis label {l} out of range for n = {n}")));
            }
            entries.push(l as u8);
        }
        entries.sort_unstable();
        Ok(Self { n, entries })
    }

    pub fn from_one_based(n: usize, labels: &[usize]) -> Result<Self> {
        let zero: Result<Vec<usize>> = labels
            .iter()
            .map(|&l| {
                l.checked_sub(1)
                    .ok_or_else(|| Error::invalid("axis labels are 1-based"))
            })
            .collect();
        Self::new(n, &zero?)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.entries.iter().map(|&e| e as usize + 1).collect()
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lexicographic position among all nondecreasing tuples.
    pub fn position(&self) -> usize {
        position_of(self.n, &self.entries)
    }

    /// Number of distinct permutations of the tuple (multinomial count).
    pub fn multiplicity(&self) -> u64 {
        multiplicity_of(&self.entries)
    }

    /// Per-axis occurrence counts, i.e. the derivative multi-index `alpha`.
    pub fn counts(&self) -> Vec<u32> {
        let mut c = vec![0u32; self.n];
        for &e in &self.entries {
            c[e as usize] += 1;
        }
        c
    }

    pub fn from_counts(counts: &[u32]) -> Self {
        let mut entries = Vec::new();
        for (axis, &c) in counts.iter().enumerate() {
            entries.extend(std::iter::repeat(axis as u8).take(c as usize));
        }
        Self { n: counts.len(), entries }
    }
}

pub(crate) fn position_of(n: usize, sorted: &[u8]) -> usize {
    let m = sorted.len();
    let mut rank = 0usize;
    let mut lo = 0usize;
    for (j, &e) in sorted.iter().enumerate() {
        let rest = m - j - 1;
        for v in lo..e as usize {
            rank += binomial(n - v + rest - 1, rest) as usize;
        }
        lo = e as usize;
    }
    rank
}

pub(crate) fn multiplicity_of(sorted: &[u8]) -> u64 {
    let mut denom = 1u64;
    let mut run = 1usize;
    for w in 1..=sorted.len() {
        if w < sorted.len() && sorted[w] == sorted[w - 1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    factorial(sorted.len()) / denom
}

/// All nondecreasing index tuples of a given `(n, m)` with their
/// multiplicities, in storage order.
#[derive(Clone, Debug)]
pub struct Layout {
    n: usize,
    m: usize,
    indices: Vec<Vec<u8>>,
    mult: Vec<u64>,
}

impl Layout {
    pub fn new(n: usize, m: usize) -> Self {
        let mut indices = Vec::with_capacity(num_components(n, m));
        let mut cur = vec![0u8; m];
        if n > 0 {
            loop {
                indices.push(cur.clone());
                // advance to the next nondecreasing tuple
                let mut j = m;
                loop {
                    if j == 0 {
                        let mult = indices.iter().map(|i| multiplicity_of(i)).collect();
                        return Self { n, m, indices, mult };
                    }
                    j -= 1;
                    if (cur[j] as usize) + 1 < n {
                        let v = cur[j] + 1;
                        for c in cur.iter_mut().skip(j) {
                            *c = v;
                        }
                        break;
                    }
                }
            }
        }
        Self { n, m, indices, mult: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, pos: usize) -> &[u8] {
        &self.indices[pos]
    }

    pub fn multiplicity(&self, pos: usize) -> u64 {
        self.mult[pos]
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.mult
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[u8])> {
        self.indices.iter().enumerate().map(|(p, i)| (p, i.as_slice()))
    }

    /// Position of an arbitrary-order tuple.
    pub fn position(&self, labels: &[u8]) -> usize {
        let mut s = labels.to_vec();
        s.sort_unstable();
        position_of(self.n, &s)
    }

    /// Position of the tuple obtained by appending `extra` labels.
    pub fn position_with(&self, pos: usize, extra: &[u8]) -> usize {
        let mut s = self.indices[pos].clone();
        s.extend_from_slice(extra);
        s.sort_unstable();
        position_of(self.n, &s)
    }
}
