//! Degree-shifting operator families on the exterior algebra and their
//! graded/filtered structure: the Chevalley-Eilenberg differential, Gram
//! families with their adjoints, gr extraction, and weight predicates.

use crate::exterior::{enumerate_basis, sort_with_sign, BasisTable, MultiIndex};
use crate::lie::{LieAlgebraSpec, LieError};
use crate::linalg::{QMat, Rat};
use num::Zero;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error("operator shifts do not chain: {0} then {1}")]
    ShiftMismatch(i32, i32),
    #[error("operator families live on different bases")]
    BasisMismatch,
    #[error("matrix for degree {k} must be {rows}x{cols}")]
    ShapeMismatch { k: usize, rows: usize, cols: usize },
    #[error("degree-1 Gram is not symmetric positive-definite")]
    GramNotSpd,
    #[error("coframe matrix is singular")]
    SingularCoframe,
    #[error("{0}")]
    Lie(#[from] LieError),
}

fn dim_of(table: &BasisTable, k: i32) -> usize {
    if k < 0 {
        0
    } else {
        table.dim(k as usize)
    }
}

/// One matrix per form degree `k = 0..=n`, all shifting the degree by the
/// same amount: `mats[k]` maps degree `k` to degree `k + shift` in the fixed
/// lexicographic basis ordering (rows index the target basis). Degrees
/// outside `0..=n` are zero-dimensional, so edge matrices have zero rows or
/// columns and composition needs no special cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorFamily {
    table: Arc<BasisTable>,
    shift: i32,
    mats: Vec<QMat>,
}

impl OperatorFamily {
    pub fn zero(table: Arc<BasisTable>, shift: i32) -> Self {
        let n = table.n();
        let mats = (0..=n)
            .map(|k| QMat::zeros(dim_of(&table, k as i32 + shift), table.dim(k)))
            .collect();
        OperatorFamily { table, shift, mats }
    }

    pub fn identity(table: Arc<BasisTable>) -> Self {
        let n = table.n();
        let mats = (0..=n).map(|k| QMat::identity(table.dim(k))).collect();
        OperatorFamily { table, shift: 0, mats }
    }

    pub fn from_mats(
        table: Arc<BasisTable>,
        shift: i32,
        mats: Vec<QMat>,
    ) -> Result<Self, CalculusError> {
        let n = table.n();
        assert_eq!(mats.len(), n + 1, "one matrix per degree 0..=n");
        for (k, m) in mats.iter().enumerate() {
            let rows = dim_of(&table, k as i32 + shift);
            let cols = table.dim(k);
            if m.rows() != rows || m.cols() != cols {
                return Err(CalculusError::ShapeMismatch { k, rows, cols });
            }
        }
        Ok(OperatorFamily { table, shift, mats })
    }

    pub fn table(&self) -> &Arc<BasisTable> {
        &self.table
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn mat(&self, k: usize) -> &QMat {
        &self.mats[k]
    }

    pub fn mats(&self) -> &[QMat] {
        &self.mats
    }

    pub fn set_mat(&mut self, k: usize, m: QMat) {
        let rows = dim_of(&self.table, k as i32 + self.shift);
        assert_eq!((m.rows(), m.cols()), (rows, self.table.dim(k)));
        self.mats[k] = m;
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(QMat::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.mats.iter().all(QMat::is_identity)
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &OperatorFamily) -> OperatorFamily {
        assert!(Arc::ptr_eq(&self.table, &other.table) || self.table.n() == other.table.n());
        let n = self.n() as i32;
        let shift = self.shift + other.shift;
        let mats = (0..=self.n())
            .map(|k| {
                let mid = k as i32 + other.shift;
                if (0..=n).contains(&mid) {
                    self.mats[mid as usize].clone() * other.mats[k].clone()
                } else {
                    QMat::zeros(dim_of(&self.table, k as i32 + shift), self.table.dim(k))
                }
            })
            .collect();
        OperatorFamily { table: self.table.clone(), shift, mats }
    }

    pub fn add(&self, other: &OperatorFamily) -> OperatorFamily {
        assert_eq!(self.shift, other.shift, "add requires equal shifts");
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        OperatorFamily { table: self.table.clone(), shift: self.shift, mats }
    }

    pub fn sub(&self, other: &OperatorFamily) -> OperatorFamily {
        assert_eq!(self.shift, other.shift, "sub requires equal shifts");
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        OperatorFamily { table: self.table.clone(), shift: self.shift, mats }
    }

    pub fn neg(&self) -> OperatorFamily {
        OperatorFamily {
            table: self.table.clone(),
            shift: self.shift,
            mats: self.mats.iter().map(|m| -m.clone()).collect(),
        }
    }

    pub fn squares_to_zero(&self) -> bool {
        self.compose(self).is_zero()
    }

    /// Keeps exactly the entries whose source and target basis weights agree.
    pub fn gr_part(&self) -> OperatorFamily {
        let mut out = self.clone();
        for k in 0..=self.n() {
            let target = k as i32 + self.shift;
            if !(0..=self.n() as i32).contains(&target) {
                continue;
            }
            let src_w = self.table.weights_of_degree(k);
            let tgt_w = self.table.weights_of_degree(target as usize);
            let mut m = self.mats[k].clone();
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if tgt_w[r] != src_w[c] {
                        m.set(r, c, Rat::zero());
                    }
                }
            }
            out.mats[k] = m;
        }
        out
    }

    fn weight_witness(&self, strict: bool) -> Option<WeightWitness> {
        for k in 0..=self.n() {
            let target = k as i32 + self.shift;
            if !(0..=self.n() as i32).contains(&target) {
                continue;
            }
            let m = &self.mats[k];
            for c in 0..m.cols() {
                for r in 0..m.rows() {
                    if m.get(r, c).is_zero() {
                        continue;
                    }
                    let sw = self.table.weight_of(k, c);
                    let tw = self.table.weight_of(target as usize, r);
                    let bad = if strict { tw <= sw } else { tw < sw };
                    if bad {
                        return Some(WeightWitness {
                            degree: k,
                            source: self.table.degree(k)[c].clone(),
                            target: self.table.degree(target as usize)[r].clone(),
                            entry: m.get(r, c).clone(),
                        });
                    }
                }
            }
        }
        None
    }

    /// `Ok(())` iff every nonzero entry has target weight >= source weight.
    pub fn respects_filtration(&self) -> Result<(), WeightWitness> {
        match self.weight_witness(false) {
            None => Ok(()),
            Some(w) => Err(w),
        }
    }

    /// `Ok(())` iff every nonzero entry strictly increases the weight.
    pub fn increases_weight(&self) -> Result<(), WeightWitness> {
        match self.weight_witness(true) {
            None => Ok(()),
            Some(w) => Err(w),
        }
    }
}

/// First entry violating a weight predicate: which degree, which basis
/// elements, and the offending coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightWitness {
    pub degree: usize,
    pub source: MultiIndex,
    pub target: MultiIndex,
    pub entry: Rat,
}

impl std::fmt::Display for WeightWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "degree {} entry {} -> {} value {}",
            self.degree,
            self.source.label(),
            self.target.label(),
            crate::linalg::rat_to_string(&self.entry)
        )
    }
}

/// Builds the shared basis table of a spec.
pub fn basis_table(spec: &LieAlgebraSpec) -> Arc<BasisTable> {
    Arc::new(enumerate_basis(spec.dim(), spec.weights()).expect("weights match dimension"))
}

/// Chevalley-Eilenberg differential of a validated spec as a shift `+1`
/// family: on degree one `d theta^k = -sum_{i<j} c_ij^k theta^i wedge theta^j`,
/// extended to all degrees by the Leibniz rule. Squaring to zero follows from
/// the Jacobi identity and is asserted after construction.
pub fn ce_differential(spec: &LieAlgebraSpec) -> Result<OperatorFamily, CalculusError> {
    ce_differential_on(spec, basis_table(spec))
}

/// Same as [`ce_differential`] but reusing an existing basis table so that
/// the resulting families share one table allocation.
pub fn ce_differential_on(
    spec: &LieAlgebraSpec,
    table: Arc<BasisTable>,
) -> Result<OperatorFamily, CalculusError> {
    spec.ensure_valid()?;
    let n = spec.dim();
    let mut d = OperatorFamily::zero(table.clone(), 1);
    for k in 0..n {
        let mut m = QMat::zeros(table.dim(k + 1), table.dim(k));
        for (col, idx) in table.degree(k).iter().enumerate() {
            let ids = idx.indices();
            for (t, &it) in ids.iter().enumerate() {
                for (&(a, b), coeffs) in spec.bracket_entries() {
                    let Some(c) = coeffs.get(&it) else { continue };
                    // theta^{i_0} ^ ... ^ (theta^a ^ theta^b) ^ ... with the
                    // differential in slot t.
                    let mut word: Vec<usize> = Vec::with_capacity(k + 1);
                    word.extend_from_slice(&ids[..t]);
                    word.push(a);
                    word.push(b);
                    word.extend_from_slice(&ids[t + 1..]);
                    let Some((sign, sorted)) = sort_with_sign(&word) else { continue };
                    let row = table.position(k + 1, &sorted).expect("sorted index in basis");
                    let leibniz = if t % 2 == 0 { 1 } else { -1 };
                    let mut v = -c.clone();
                    if sign * leibniz < 0 {
                        v = -v;
                    }
                    let v = m.get(row, col) + &v;
                    m.set(row, col, v);
                }
            }
        }
        d.set_mat(k, m);
    }
    assert!(d.squares_to_zero(), "Jacobi holds, so d^2 = 0");
    Ok(d)
}

/// Per-degree Gram matrices on the exterior algebra, induced from a degree-1
/// Gram by the determinant formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramFamily {
    table: Arc<BasisTable>,
    mats: Vec<QMat>,
    identity: bool,
}

impl GramFamily {
    pub fn table(&self) -> &Arc<BasisTable> {
        &self.table
    }

    pub fn mat(&self, k: usize) -> &QMat {
        &self.mats[k]
    }

    pub fn degree_one(&self) -> &QMat {
        &self.mats[1]
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Compact fingerprint of the degree-1 Gram for report headers.
    pub fn fingerprint(&self) -> String {
        if self.identity {
            "identity".to_string()
        } else {
            self.mats[1].to_compact_string()
        }
    }
}

/// Extends a degree-1 Gram to all degrees:
/// `G_k[I][J] = det( G_1[i_a][j_b] )_{a,b}`, with `G_0 = (1)`.
pub fn gram_family(table: Arc<BasisTable>, g1: &QMat) -> Result<GramFamily, CalculusError> {
    let n = table.n();
    if g1.rows() != n || g1.cols() != n || !g1.is_spd() {
        return Err(CalculusError::GramNotSpd);
    }
    let mut mats = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let dim = table.dim(k);
        let mut m = QMat::zeros(dim, dim);
        for (r, idx_i) in table.degree(k).iter().enumerate() {
            for (c, idx_j) in table.degree(k).iter().enumerate() {
                let mut minor = QMat::zeros(k, k);
                for (a, &ia) in idx_i.indices().iter().enumerate() {
                    for (b, &jb) in idx_j.indices().iter().enumerate() {
                        minor.set(a, b, g1.get(ia - 1, jb - 1).clone());
                    }
                }
                m.set(r, c, minor.det());
            }
        }
        mats.push(m);
    }
    let identity = g1.is_identity();
    Ok(GramFamily { table, mats, identity })
}

/// Identity Gram family for a table.
pub fn identity_gram(table: Arc<BasisTable>) -> GramFamily {
    let n = table.n();
    let mats = (0..=n).map(|k| QMat::identity(table.dim(k))).collect();
    GramFamily { table, mats, identity: true }
}

/// Gram adjoint of a family: per degree `adj(M_k) = G_k^{-1} M_k^t G_{k+s}`,
/// assembled into the shift `-s` family. With the identity Gram this is the
/// plain matrix transpose; applying it twice returns the original family.
pub fn adjoint(op: &OperatorFamily, gram: &GramFamily) -> OperatorFamily {
    let n = op.n() as i32;
    let s = op.shift();
    let table = op.table().clone();
    let mut out = OperatorFamily::zero(table.clone(), -s);
    for j in 0..=op.n() {
        let src = j as i32 - s;
        if !(0..=n).contains(&src) {
            continue;
        }
        let k = src as usize;
        let g_k_inv = gram.mat(k).inverse().expect("Gram blocks are SPD");
        let m = g_k_inv * op.mat(k).transpose() * gram.mat(j).clone();
        out.set_mat(j, m);
    }
    out
}

/// Per-degree nilpotency bound: the weight span of the degree plus one. Any
/// degree-preserving, strictly weight-increasing family `T` satisfies
/// `T^{N_0(k)} = 0` on degree `k`.
pub fn nilpotency_bound(table: &BasisTable) -> Vec<usize> {
    (0..=table.n())
        .map(|k| {
            let ws = table.weights_of_degree(k);
            match (ws.iter().min(), ws.iter().max()) {
                (Some(&lo), Some(&hi)) => (hi - lo) as usize + 1,
                _ => 1,
            }
        })
        .collect()
}

/// Degree-1 Gram that makes the coframe with the given rows orthonormal:
/// `(S^t S)^{-1}` for rows expressing the new coframe in the old one.
pub fn gram_for_orthonormal_coframe(rows: &QMat) -> Result<QMat, CalculusError> {
    let g = (rows.transpose() * rows.clone())
        .inverse()
        .ok_or(CalculusError::SingularCoframe)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::builtin;
    use crate::linalg::{rat, ratio};

    fn d_of(name: &str) -> OperatorFamily {
        ce_differential(&builtin(name).unwrap()).unwrap()
    }

    #[test]
    fn heisenberg_degree_one_matrix() {
        let d = d_of("heisenberg3");
        let m1 = d.mat(1);
        let pos12 = d.table().position(2, &[1, 2]).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expect = if (r, c) == (pos12, 2) { rat(-1) } else { rat(0) };
                assert_eq!(*m1.get(r, c), expect);
            }
        }
        assert!(d.mat(0).is_zero());
    }

    #[test]
    fn engel_sends_theta4_to_minus_13() {
        let d = d_of("engel4");
        let m1 = d.mat(1);
        let pos13 = d.table().position(2, &[1, 3]).unwrap();
        assert_eq!(*m1.get(pos13, 3), rat(-1));
        // d(theta^4) has no other component.
        for r in 0..m1.rows() {
            if r != pos13 {
                assert!(m1.get(r, 3).is_zero());
            }
        }
    }

    #[test]
    fn differential_squares_to_zero_on_catalog() {
        for name in crate::lie::BUILTIN_NAMES {
            assert!(d_of(name).squares_to_zero(), "{name}");
        }
    }

    #[test]
    fn gr_of_differential_is_differential_of_graded() {
        for name in crate::lie::BUILTIN_NAMES {
            let spec = builtin(name).unwrap();
            let d = ce_differential(&spec).unwrap();
            let d0 = ce_differential_on(
                &spec.associated_graded().unwrap(),
                d.table().clone(),
            )
            .unwrap();
            assert_eq!(d.gr_part(), d0, "{name}");
            assert!(d.respects_filtration().is_ok(), "{name}");
            assert!(d.sub(&d0).increases_weight().is_ok(), "{name}");
        }
    }

    #[test]
    fn gram_family_minor_values() {
        let h = builtin("heisenberg3").unwrap();
        let table = basis_table(&h);
        let g1 = QMat::diag(vec![rat(1), rat(1), rat(4)]);
        let fam = gram_family(table.clone(), &g1).unwrap();
        assert_eq!(*fam.mat(2), QMat::diag(vec![rat(1), rat(4), rat(4)]));
        assert_eq!(*fam.mat(3), QMat::from_rows(vec![vec![rat(4)]]));
        assert_eq!(*fam.mat(0), QMat::identity(1));

        let idfam = gram_family(table, &QMat::identity(3)).unwrap();
        assert!(idfam.is_identity());
        for k in 0..=3 {
            assert!(idfam.mat(k).is_identity());
        }
    }

    #[test]
    fn gram_family_two_dims_det() {
        let spec = crate::lie::LieAlgebraSpec::new(
            "abelian2",
            crate::exterior::Weighting::new(vec![1, 1]).unwrap(),
            vec![],
        )
        .unwrap();
        let table = basis_table(&spec);
        let g1 = QMat::from_rows(vec![vec![rat(2), rat(1)], vec![rat(1), rat(2)]]);
        let fam = gram_family(table, &g1).unwrap();
        assert_eq!(*fam.mat(2), QMat::from_rows(vec![vec![rat(3)]]));
    }

    #[test]
    fn adjoint_is_transpose_for_identity_gram() {
        let h = builtin("heisenberg3").unwrap();
        let d0 = ce_differential(&h).unwrap();
        let gram = identity_gram(d0.table().clone());
        let delta = adjoint(&d0, &gram);
        assert_eq!(delta.shift(), -1);
        let m = delta.mat(2);
        let pos12 = d0.table().position(2, &[1, 2]).unwrap();
        assert_eq!(*m.get(2, pos12), rat(-1));
        assert_eq!(adjoint(&delta, &gram), d0);
    }

    #[test]
    fn adjoint_involution_with_nontrivial_gram() {
        let engel = builtin("engel4").unwrap();
        let d = ce_differential(&engel).unwrap();
        let g1 = QMat::diag(vec![rat(1), rat(2), rat(3), ratio(1, 2)]);
        let gram = gram_family(d.table().clone(), &g1).unwrap();
        let delta = adjoint(&d, &gram);
        assert_eq!(adjoint(&delta, &gram), d);
    }

    #[test]
    fn adjoint_entry_follows_gram_conjugation() {
        let h = builtin("heisenberg3").unwrap();
        let d0 = ce_differential(&h).unwrap();
        let g1 = QMat::diag(vec![rat(1), rat(1), rat(4)]);
        let gram = gram_family(d0.table().clone(), &g1).unwrap();
        let delta = adjoint(&d0, &gram);
        // <d0 theta^3, theta^12> = -1 and <theta^3, theta^3> = 4 force the
        // adjoint entry -1/4.
        let pos12 = d0.table().position(2, &[1, 2]).unwrap();
        assert_eq!(*delta.mat(2).get(2, pos12), ratio(-1, 4));
    }

    #[test]
    fn transpose_of_engel_differential_breaks_filtration() {
        let engel = builtin("engel4").unwrap();
        let d = ce_differential(&engel).unwrap();
        let gram = identity_gram(d.table().clone());
        let delta = adjoint(&d, &gram);
        let witness = delta.respects_filtration().unwrap_err();
        assert_eq!(witness.degree, 2);
        assert_eq!(witness.source.indices(), &[1, 3]);
        assert_eq!(witness.target.indices(), &[4]);
        assert_eq!(witness.entry, rat(-1));
    }

    #[test]
    fn heisenberg_differential_minus_graded_is_zero() {
        let h = builtin("heisenberg3").unwrap();
        let d = ce_differential(&h).unwrap();
        let d0 = ce_differential_on(&h.associated_graded().unwrap(), d.table().clone()).unwrap();
        let diff = d.sub(&d0);
        assert!(diff.is_zero());
        assert!(diff.increases_weight().is_ok());
    }

    #[test]
    fn nilpotency_bounds_per_degree() {
        let h = basis_table(&builtin("heisenberg3").unwrap());
        assert_eq!(nilpotency_bound(&h), vec![1, 2, 2, 1]);
        let engel = basis_table(&builtin("engel4").unwrap());
        assert_eq!(nilpotency_bound(&engel)[2], 3);
        assert_eq!(nilpotency_bound(&engel)[0], 1);
    }

    #[test]
    fn weight_increasing_family_is_nilpotent_within_bound() {
        let engel = builtin("engel4").unwrap();
        let d = ce_differential(&engel).unwrap();
        let d0 = ce_differential_on(&engel.associated_graded().unwrap(), d.table().clone())
            .unwrap();
        let gram = identity_gram(d.table().clone());
        let delta0 = adjoint(&d0, &gram);
        // T = d0^t (d - d0) preserves degree and strictly increases weight.
        let t = delta0.compose(&d.sub(&d0));
        assert_eq!(t.shift(), 0);
        assert!(t.increases_weight().is_ok());
        let bounds = nilpotency_bound(d.table());
        for k in 0..=4usize {
            let mut power = QMat::identity(t.table().dim(k));
            for _ in 0..bounds[k] {
                power = t.mat(k).clone() * power;
            }
            assert!(power.is_zero(), "degree {k}");
        }
    }

    #[test]
    fn orthonormal_coframe_gram() {
        // Rescaled third covector: Gram diag(1,1,1/4) makes (t1,t2,2t3)
        // orthonormal.
        let s = QMat::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]);
        let g = gram_for_orthonormal_coframe(&s).unwrap();
        assert_eq!(g, QMat::diag(vec![rat(1), rat(1), ratio(1, 4)]));
        assert!(gram_for_orthonormal_coframe(&QMat::zeros(2, 2)).is_err());
    }
}
