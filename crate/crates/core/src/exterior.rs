//! Exterior-algebra combinatorics over a weighted basis: multi-index
//! enumeration, permutation signs, weights, and the Hodge star in an
//! orthonormal basis.
//!
//! Basis ordering is lexicographic within each degree and every matrix in the
//! crate is expressed in that fixed ordering.

use crate::linalg::QMat;
use num::One;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("weights list is empty")]
    EmptyWeights,
    #[error("weight at position {0} is zero; generator weights must be >= 1")]
    ZeroWeight(usize),
    #[error("weights must be nondecreasing, violated at position {0}")]
    UnsortedWeights(usize),
    #[error("multi-index entry {0} outside 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("multi-index is not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("Hodge star requires the identity Gram in this basis")]
    NonOrthonormalStar,
}

/// Positive generator weights `v_1 <= ... <= v_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weighting {
    weights: Vec<u32>,
}

impl Weighting {
    pub fn new(weights: Vec<u32>) -> Result<Self, ExteriorError> {
        if weights.is_empty() {
            return Err(ExteriorError::EmptyWeights);
        }
        for (i, &w) in weights.iter().enumerate() {
            if w == 0 {
                return Err(ExteriorError::ZeroWeight(i + 1));
            }
            if i > 0 && weights[i - 1] > w {
                return Err(ExteriorError::UnsortedWeights(i + 1));
            }
        }
        Ok(Weighting { weights })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Weight of generator `i` (1-based).
    pub fn of(&self, i: usize) -> u32 {
        self.weights[i - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.weights
    }

    /// Weight of the volume form: the sum of all generator weights.
    pub fn total(&self) -> u32 {
        self.weights.iter().sum()
    }
}

/// Strictly increasing multi-index with 1-based entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self, ExteriorError> {
        for (pos, &i) in indices.iter().enumerate() {
            if i == 0 || i > n {
                return Err(ExteriorError::IndexOutOfRange(i, n));
            }
            if pos > 0 && indices[pos - 1] >= i {
                return Err(ExteriorError::NotIncreasing(pos + 1));
            }
        }
        Ok(MultiIndex { indices })
    }

    pub fn empty() -> Self {
        MultiIndex { indices: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn weight(&self, w: &Weighting) -> u32 {
        self.indices.iter().map(|&i| w.of(i)).sum()
    }

    /// Complement in `1..=n`, with the sign of the permutation
    /// `(i_1 .. i_k, complement ascending)`.
    pub fn complement(&self, n: usize) -> (i32, MultiIndex) {
        let comp: Vec<usize> = (1..=n).filter(|i| !self.contains(*i)).collect();
        // Inversions between the I-part and the complement part; both parts
        // are internally sorted.
        let mut inversions = 0usize;
        for &x in &self.indices {
            inversions += comp.iter().filter(|&&y| y < x).count();
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        (sign, MultiIndex { indices: comp })
    }

    pub fn label(&self) -> String {
        if self.indices.is_empty() {
            "()".to_string()
        } else {
            let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
            format!("({})", parts.join(","))
        }
    }
}

/// Sorts a wedge word into a strictly increasing multi-index, tracking the
/// permutation sign. Returns `None` when an index repeats (the wedge is zero).
pub fn sort_with_sign(word: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut v = word.to_vec();
    let mut sign = 1i32;
    // Insertion sort; swap count parity is the permutation sign.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for i in 1..v.len() {
        if v[i - 1] == v[i] {
            return None;
        }
    }
    Some((sign, v))
}

/// All multi-indices per degree, lexicographically ordered, with cached
/// weights and positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisTable {
    n: usize,
    weights: Weighting,
    by_degree: Vec<Vec<MultiIndex>>,
    positions: Vec<BTreeMap<Vec<usize>, usize>>,
}

impl BasisTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weighting(&self) -> &Weighting {
        &self.weights
    }

    pub fn dim(&self, k: usize) -> usize {
        self.by_degree.get(k).map_or(0, Vec::len)
    }

    pub fn degree(&self, k: usize) -> &[MultiIndex] {
        &self.by_degree[k]
    }

    pub fn position(&self, k: usize, idx: &[usize]) -> Option<usize> {
        self.positions.get(k)?.get(idx).copied()
    }

    pub fn weight_of(&self, k: usize, pos: usize) -> u32 {
        self.by_degree[k][pos].weight(&self.weights)
    }

    /// Weights of the degree-`k` basis elements in basis order.
    pub fn weights_of_degree(&self, k: usize) -> Vec<u32> {
        self.by_degree[k].iter().map(|i| i.weight(&self.weights)).collect()
    }
}

/// Enumerates the full exterior basis for `n` generators with the given
/// weights. Errors if the weighting dimension disagrees with `n`.
pub fn enumerate_basis(n: usize, weights: &Weighting) -> Result<BasisTable, ExteriorError> {
    if weights.dim() != n {
        return Err(ExteriorError::IndexOutOfRange(weights.dim(), n));
    }
    let mut by_degree: Vec<Vec<MultiIndex>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut list = Vec::new();
        let mut current: Vec<usize> = (1..=k).collect();
        if k == 0 {
            list.push(MultiIndex::empty());
        } else {
            loop {
                list.push(MultiIndex { indices: current.clone() });
                // Next k-combination of 1..=n in lexicographic order.
                let mut i = k;
                while i > 0 && current[i - 1] == n - (k - i) {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                current[i - 1] += 1;
                for j in i..k {
                    current[j] = current[j - 1] + 1;
                }
            }
        }
        by_degree.push(list);
    }
    let positions = by_degree
        .iter()
        .map(|list| {
            list.iter().enumerate().map(|(pos, idx)| (idx.indices.clone(), pos)).collect()
        })
        .collect();
    Ok(BasisTable { n, weights: weights.clone(), by_degree, positions })
}

/// Sign and complement of a multi-index; the free-standing form of
/// [`MultiIndex::complement`].
pub fn complement_sign(index: &MultiIndex, n: usize) -> (i32, MultiIndex) {
    index.complement(n)
}

/// Matrix of the Hodge star on degree `k`, valid only for the identity Gram:
/// basis element `I` maps to `sign(I) * complement(I)`.
///
/// `gram_is_identity` is the caller's assertion about the degree-1 Gram; a
/// non-orthonormal frame is rejected since the star would need irrational
/// normalizations there.
pub fn hodge_star_matrix(
    k: usize,
    table: &BasisTable,
    gram_is_identity: bool,
) -> Result<QMat, ExteriorError> {
    if !gram_is_identity {
        return Err(ExteriorError::NonOrthonormalStar);
    }
    let n = table.n();
    let mut m = QMat::zeros(table.dim(n - k), table.dim(k));
    for (col, idx) in table.degree(k).iter().enumerate() {
        let (sign, comp) = idx.complement(n);
        let row = table.position(n - k, comp.indices()).expect("complement in basis");
        let mut v = crate::linalg::Rat::one();
        if sign < 0 {
            v = -v;
        }
        m.set(row, col, v);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u32]) -> Weighting {
        Weighting::new(v.to_vec()).unwrap()
    }

    #[test]
    fn enumerates_degree_two_with_weights() {
        let table = enumerate_basis(3, &w(&[1, 1, 2])).unwrap();
        let deg2: Vec<(&[usize], u32)> = table
            .degree(2)
            .iter()
            .map(|i| (i.indices(), i.weight(table.weighting())))
            .collect();
        assert_eq!(
            deg2,
            vec![(&[1, 2][..], 2), (&[1, 3][..], 3), (&[2, 3][..], 3)]
        );
    }

    #[test]
    fn degree_zero_is_the_empty_wedge() {
        let table = enumerate_basis(3, &w(&[1, 1, 2])).unwrap();
        assert_eq!(table.dim(0), 1);
        assert_eq!(table.weight_of(0, 0), 0);
    }

    #[test]
    fn weight_of_13_in_engel_weights() {
        let weights = w(&[1, 1, 2, 2]);
        let idx = MultiIndex::new(vec![1, 3], 4).unwrap();
        assert_eq!(idx.weight(&weights), 3);
    }

    #[test]
    fn complement_signs_match_small_cases() {
        let i1 = MultiIndex::new(vec![1], 3).unwrap();
        assert_eq!(i1.complement(3), (1, MultiIndex::new(vec![2, 3], 3).unwrap()));
        let i2 = MultiIndex::new(vec![2], 3).unwrap();
        assert_eq!(i2.complement(3), (-1, MultiIndex::new(vec![1, 3], 3).unwrap()));
        let i13 = MultiIndex::new(vec![1, 3], 3).unwrap();
        assert_eq!(i13.complement(3), (-1, MultiIndex::new(vec![2], 3).unwrap()));
    }

    #[test]
    fn star_on_three_dims() {
        let table = enumerate_basis(3, &w(&[1, 1, 2])).unwrap();
        let star1 = hodge_star_matrix(1, &table, true).unwrap();
        // Column of theta^3: star(theta^3) = theta^1 wedge theta^2.
        let col = star1.column(2);
        let pos12 = table.position(2, &[1, 2]).unwrap();
        assert!(col[pos12].is_one());
        let star0 = hodge_star_matrix(0, &table, true).unwrap();
        // star(1) = vol.
        assert!(star0.get(0, 0).is_one());
        assert!(hodge_star_matrix(1, &table, false).is_err());
    }

    #[test]
    fn star_squares_with_sign_for_all_small_dims() {
        for n in 1..=7usize {
            let table = enumerate_basis(n, &w(&vec![1; n])).unwrap();
            for k in 0..=n {
                let star_k = hodge_star_matrix(k, &table, true).unwrap();
                let star_back = hodge_star_matrix(n - k, &table, true).unwrap();
                let square = star_back * star_k;
                let expect = if (k * (n - k)) % 2 == 0 {
                    QMat::identity(table.dim(k))
                } else {
                    -QMat::identity(table.dim(k))
                };
                assert_eq!(square, expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn complement_weight_and_sign_laws() {
        let weights = w(&[1, 1, 2, 3]);
        let table = enumerate_basis(4, &weights).unwrap();
        let q = weights.total();
        for k in 0..=4usize {
            for idx in table.degree(k) {
                let (sign, comp) = idx.complement(4);
                let (sign_back, _) = comp.complement(4);
                let expect = if (k * (4 - k)) % 2 == 0 { 1 } else { -1 };
                assert_eq!(sign * sign_back, expect);
                assert_eq!(idx.weight(&weights) + comp.weight(&weights), q);
            }
        }
    }

    #[test]
    fn counts_are_binomial() {
        let table = enumerate_basis(6, &w(&[1, 1, 1, 2, 2, 2])).unwrap();
        assert_eq!(
            (0..=6).map(|k| table.dim(k)).collect::<Vec<_>>(),
            vec![1, 6, 15, 20, 15, 6, 1]
        );
    }

    #[test]
    fn sort_with_sign_handles_duplicates_and_parity() {
        assert_eq!(sort_with_sign(&[2, 1]), Some((-1, vec![1, 2])));
        assert_eq!(sort_with_sign(&[3, 1, 2]), Some((1, vec![1, 2, 3])));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn weighting_rejects_bad_input() {
        assert!(Weighting::new(vec![]).is_err());
        assert!(Weighting::new(vec![1, 0]).is_err());
        assert!(Weighting::new(vec![2, 1]).is_err());
    }
}
